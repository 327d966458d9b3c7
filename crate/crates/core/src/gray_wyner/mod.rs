//! The Gray-Wyner rate region for a finite source: one public message at
//! rate R_0 plus one private message at rate R_i per receiver, receiver i
//! reconstructing the i-th source variable.
//!
//! Achievable points come from auxiliary channels W via
//! (R_0, R_i) = (I(a ; W), H(a_i | W)). For product sources the region is
//! exactly the set of points satisfying the subset entropy inequalities
//! R_0 + sum_{i in S} R_i >= H(a_S); for general sources those inequalities
//! are necessary only, and membership verdicts are bracketed between
//! explicit channel witnesses (inside) and certified dual bounds (outside).

mod dual;
mod lp;
mod membership;
mod optim;

pub use dual::{dual_value, DualOptions, DualValue};
pub use membership::{membership_test, MembershipOptions};

/// Deterministic per-task seed derivation used across the crate so parallel
/// schedules never change results.
pub use optim::derive_seed;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{Channel, JointPmf};
use crate::real::Real;

/// Coordinates this close to zero (from below) are clamped on construction.
pub const RATE_CLAMP: f64 = 1e-12;

/// Dominance tolerance for inside witnesses.
pub const WITNESS_TOL: f64 = 1e-6;

/// Strictness margin for outside certificates.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// Facet slack at or above this is comfortably interior; slacks in
/// (-CERTIFICATE_TOL, WITNESS_TOL) are reported as boundary.
pub const FACET_TOL: f64 = 1e-9;

/// A rate tuple (R_0, R_1, ..., R_N) in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRatePoint<T>")]
pub struct RatePoint<T: Real = f64> {
    r0: T,
    rs: Vec<T>,
}

#[derive(Deserialize)]
struct RawRatePoint<T> {
    r0: T,
    rs: Vec<T>,
}

impl<T: Real> TryFrom<RawRatePoint<T>> for RatePoint<T> {
    type Error = Error;

    fn try_from(raw: RawRatePoint<T>) -> Result<Self> {
        RatePoint::new(raw.r0, raw.rs)
    }
}

impl<T: Real> RatePoint<T> {
    /// Validates nonnegativity; coordinates in `(-1e-12, 0)` are clamped
    /// to zero.
    pub fn new(r0: T, rs: Vec<T>) -> Result<Self> {
        let clamp = T::of(RATE_CLAMP);
        let fix = |v: T| -> Result<T> {
            if !v.is_finite() || v < -clamp {
                return Err(Error::InvalidParameter(format!("rate {} is negative", v)));
            }
            Ok(v.max(T::zero()))
        };
        Ok(Self {
            r0: fix(r0)?,
            rs: rs.into_iter().map(fix).collect::<Result<_>>()?,
        })
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn rs(&self) -> &[T] {
        &self.rs
    }

    pub fn num_receivers(&self) -> usize {
        self.rs.len()
    }

    /// R_0 + sum_i lambda_i R_i.
    pub fn weighted(&self, weights: &DualWeights<T>) -> T {
        self.r0
            + self
                .rs
                .iter()
                .zip(weights.lambdas())
                .map(|(&r, &l)| r * l)
                .sum()
    }
}

/// Nonnegative weights lambda indexing the supporting hyperplanes
/// R_0 + sum_i lambda_i R_i >= T(lambda) of the region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDualWeights<T>")]
pub struct DualWeights<T: Real = f64> {
    lambdas: Vec<T>,
}

#[derive(Deserialize)]
struct RawDualWeights<T> {
    lambdas: Vec<T>,
}

impl<T: Real> TryFrom<RawDualWeights<T>> for DualWeights<T> {
    type Error = Error;

    fn try_from(raw: RawDualWeights<T>) -> Result<Self> {
        DualWeights::new(raw.lambdas)
    }
}

impl<T: Real> DualWeights<T> {
    pub fn new(lambdas: Vec<T>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidParameter("at least one weight required".into()));
        }
        if lambdas.iter().any(|l| !l.is_finite() || *l < T::zero()) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        Ok(Self { lambdas })
    }

    /// Indicator weights of a subset given as a bitmask over `n` receivers.
    pub fn indicator(n: usize, mask: usize) -> Self {
        let lambdas = (0..n)
            .map(|i| if mask >> i & 1 == 1 { T::one() } else { T::zero() })
            .collect();
        Self { lambdas }
    }

    pub fn all_ones(n: usize) -> Self {
        Self {
            lambdas: vec![T::one(); n],
        }
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// Region-membership verdict. `Inside` and `Outside` are both certified:
/// the witness channel satisfies the dominance conditions within `1e-6`,
/// and the certificate inequality is violated by more than `1e-9` against
/// a bound that is valid for every region point. `Undetermined` reports the
/// smallest dominance violation any candidate witness achieved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MembershipVerdict<T: Real = f64> {
    Inside {
        witness: Channel<T>,
    },
    Outside {
        certificate: DualWeights<T>,
        certified_bound: T,
    },
    Undetermined {
        gap: T,
    },
}

impl<T: Real> MembershipVerdict<T> {
    pub fn is_inside(&self) -> bool {
        matches!(self, Self::Inside { .. })
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, Self::Outside { .. })
    }

    pub fn is_undetermined(&self) -> bool {
        matches!(self, Self::Undetermined { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Inside { .. } => "inside",
            Self::Outside { .. } => "outside",
            Self::Undetermined { .. } => "undetermined",
        }
    }
}

/// Rate point achieved by the auxiliary channel `w`:
/// (I(a ; W), H(a_1 | W), ..., H(a_N | W)), computed exactly.
pub fn achievable_point<T: Real>(p: &JointPmf<T>, w: &Channel<T>) -> Result<RatePoint<T>> {
    let n = p.num_vars();
    let all: Vec<usize> = (0..n).collect();
    if w.input_arity() != p.num_cells() {
        return Err(Error::ArityMismatch(format!(
            "channel input arity {} but source alphabet has {} symbols",
            w.input_arity(),
            p.num_cells()
        )));
    }
    let joint = p.extend_with_channel(w, &all)?;
    let r0 = joint.mutual_information(&all, &[n])?;
    let rs = (0..n)
        .map(|i| joint.conditional_entropy(&[i], &[n]))
        .collect::<Result<Vec<_>>>()?;
    RatePoint::new(r0, rs)
}

/// Slack of one subset inequality R_0 + sum_{i in S} R_i - H(a_S).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetSlack<T: Real = f64> {
    pub subset: Vec<usize>,
    pub slack: T,
    /// Slack within (-1e-9, 1e-6): the point sits on this facet.
    pub boundary: bool,
}

/// All 2^N subset inequalities evaluated at one rate point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetReport<T: Real = f64> {
    pub slacks: Vec<FacetSlack<T>>,
    /// Every slack >= -1e-9.
    pub facet_inside: bool,
    /// Some slack sits in the boundary band.
    pub on_boundary: bool,
    /// True when the source factorizes, in which case the facets decide
    /// membership exactly; otherwise they are necessary conditions only.
    pub complete_characterization: bool,
}

/// Evaluates every subset inequality at `pt`. The inequalities hold for all
/// region points of any source; they characterize the region completely
/// exactly when the source is a product, which the report flags.
pub fn entropy_facets_check<T: Real>(p: &JointPmf<T>, pt: &RatePoint<T>) -> Result<FacetReport<T>> {
    let n = p.num_vars();
    if pt.num_receivers() != n {
        return Err(Error::ArityMismatch(format!(
            "rate point has {} private rates, source has {} variables",
            pt.num_receivers(),
            n
        )));
    }
    let facet_tol = T::of(FACET_TOL);
    let witness_tol = T::of(WITNESS_TOL);
    let mut slacks = Vec::with_capacity(1 << n);
    let mut facet_inside = true;
    let mut on_boundary = false;
    for mask in 0..(1usize << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let h_s = if subset.is_empty() {
            T::zero()
        } else {
            p.entropy(&subset)?
        };
        let mut lhs = pt.r0();
        for &i in &subset {
            lhs += pt.rs()[i];
        }
        let slack = lhs - h_s;
        let boundary = slack > -facet_tol && slack < witness_tol;
        facet_inside &= slack >= -facet_tol;
        on_boundary |= boundary;
        slacks.push(FacetSlack {
            subset,
            slack,
            boundary,
        });
    }
    Ok(FacetReport {
        slacks,
        facet_inside,
        on_boundary,
        complete_characterization: p.is_product(T::of(crate::pmf::NORMALIZATION_TOL)),
    })
}

/// Exact membership for product sources, where the subset inequalities are
/// the whole region. Errors on a source that does not factorize within 1e-9.
pub fn product_region_membership<T: Real>(p: &JointPmf<T>, pt: &RatePoint<T>) -> Result<bool> {
    if !p.is_product(T::of(crate::pmf::NORMALIZATION_TOL)) {
        return Err(Error::NonProductSource);
    }
    Ok(entropy_facets_check(p, pt)?.facet_inside)
}

/// Joint entropies H(a_S) for every subset mask, shared by the dual bounds
/// and the certificate search.
#[derive(Debug, Clone)]
pub(crate) struct SubsetEntropies<T: Real> {
    h: Vec<T>,
}

impl<T: Real> SubsetEntropies<T> {
    pub fn compute(p: &JointPmf<T>) -> Result<Self> {
        let n = p.num_vars();
        let mut h = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            h.push(if subset.is_empty() {
                T::zero()
            } else {
                p.entropy(&subset)?
            });
        }
        Ok(Self { h })
    }

    pub fn num_vars(&self) -> usize {
        self.h.len().trailing_zeros() as usize
    }

    pub fn of_mask(&self, mask: usize) -> T {
        self.h[mask]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // h(delta) = 0.5 at this flip probability (frozen from an independent
    // root-find before the build).
    pub(crate) const DELTA_HALF_BIT: f64 = 0.11002786443835955;

    #[test]
    fn identity_channel_achieves_full_common_rate() {
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let w = Channel::identity(4).unwrap();
        let pt = achievable_point(&p, &w).unwrap();
        assert_relative_eq!(pt.r0(), 2.0, epsilon = 1e-9);
        assert_relative_eq!(pt.rs()[0], 0.0, epsilon = 1e-9);
        assert_relative_eq!(pt.rs()[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_channel_achieves_private_only_point() {
        let p = JointPmf::<f64>::doubly_symmetric_binary(0.1).unwrap();
        let w = Channel::constant(4).unwrap();
        let pt = achievable_point(&p, &w).unwrap();
        assert_relative_eq!(pt.r0(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(pt.rs()[0], 1.0, epsilon = 1e-9);
        assert_relative_eq!(pt.rs()[1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn noisy_pair_channel_achieves_one_half_half() {
        // W = (a_1 xor Z_1, a_2 xor Z_2), Z_i Bernoulli(delta), h(delta)=1/2.
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let d = DELTA_HALF_BIT;
        let mut rows = Vec::new();
        for a1 in 0..2usize {
            for a2 in 0..2usize {
                let mut row = vec![0.0; 4];
                for w1 in 0..2usize {
                    for w2 in 0..2usize {
                        let f1 = if w1 == a1 { 1.0 - d } else { d };
                        let f2 = if w2 == a2 { 1.0 - d } else { d };
                        row[w1 * 2 + w2] = f1 * f2;
                    }
                }
                rows.push(row);
            }
        }
        let w = Channel::new(rows).unwrap();
        let pt = achievable_point(&p, &w).unwrap();
        assert_relative_eq!(pt.r0(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(pt.rs()[0], 0.5, epsilon = 1e-9);
        assert_relative_eq!(pt.rs()[1], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn facets_of_product_uniform_bits() {
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let pt = RatePoint::new(1.0, vec![0.5, 0.5]).unwrap();
        let report = entropy_facets_check(&p, &pt).unwrap();
        assert!(report.facet_inside);
        assert!(report.complete_characterization);
        let by_subset = |s: &[usize]| {
            report
                .slacks
                .iter()
                .find(|f| f.subset == s)
                .unwrap()
                .slack
        };
        assert_relative_eq!(by_subset(&[]), 1.0, epsilon = 1e-12);
        assert_relative_eq!(by_subset(&[0]), 0.5, epsilon = 1e-12);
        assert_relative_eq!(by_subset(&[1]), 0.5, epsilon = 1e-12);
        assert_relative_eq!(by_subset(&[0, 1]), 0.0, epsilon = 1e-12);
        assert!(report.on_boundary);
    }

    #[test]
    fn facets_reject_deficient_point() {
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let pt = RatePoint::new(0.5, vec![0.5, 0.5]).unwrap();
        let report = entropy_facets_check(&p, &pt).unwrap();
        assert!(!report.facet_inside);
        let worst = report
            .slacks
            .iter()
            .find(|f| f.subset == [0, 1])
            .unwrap()
            .slack;
        assert_relative_eq!(worst, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn full_common_point_is_facet_inside_for_any_source() {
        let p = JointPmf::<f64>::doubly_symmetric_binary(0.23).unwrap();
        let h = p.entropy_all();
        let pt = RatePoint::new(h, vec![0.0, 0.0]).unwrap();
        let report = entropy_facets_check(&p, &pt).unwrap();
        assert!(report.facet_inside);
        assert!(!report.complete_characterization);
    }

    #[test]
    fn product_membership_rejects_correlated_source() {
        let p = JointPmf::<f64>::doubly_symmetric_binary(0.1).unwrap();
        let pt = RatePoint::new(1.0, vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            product_region_membership(&p, &pt),
            Err(Error::NonProductSource)
        ));
    }

    #[test]
    fn rate_point_clamps_and_rejects() {
        let pt = RatePoint::new(-1e-13, vec![0.5]).unwrap();
        assert_eq!(pt.r0(), 0.0);
        assert!(RatePoint::new(-1e-3, vec![0.5]).is_err());
    }

    #[test]
    fn dual_weights_validation() {
        assert!(DualWeights::new(vec![0.0, 1.0]).is_ok());
        assert!(DualWeights::new(vec![-0.1]).is_err());
        let ind = DualWeights::<f64>::indicator(3, 0b101);
        assert_eq!(ind.lambdas(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn subset_entropies_of_dsbs() {
        let p = JointPmf::<f64>::doubly_symmetric_binary(0.1).unwrap();
        let ents = SubsetEntropies::compute(&p).unwrap();
        assert_eq!(ents.num_vars(), 2);
        assert_relative_eq!(ents.of_mask(0), 0.0);
        assert_relative_eq!(ents.of_mask(0b01), 1.0, epsilon = 1e-12);
        assert_relative_eq!(ents.of_mask(0b11), p.entropy_all(), epsilon = 1e-12);
    }
}
