//! Region membership with certified verdicts.
//!
//! Inside is decided only by an explicit witness channel whose achievable
//! point is dominated by the queried point within 1e-6 per coordinate
//! (the region is upward closed). Outside is decided only by a certified
//! dual bound violated by more than 1e-9. When neither side resolves, the
//! verdict is Undetermined with the best dominance gap found, which keeps
//! both decided verdicts sound even when the search stalls.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{Channel, JointPmf};
use crate::real::Real;

use super::dual::{certified_lower_bound, SourceTables};
use super::optim::{derive_seed, dirichlet_rows, subgradient_walk};
use super::{
    DualWeights, MembershipVerdict, RatePoint, SubsetEntropies, CERTIFICATE_TOL, WITNESS_TOL,
};

/// Search knobs for [`membership_test`]. The verdict tolerances themselves
/// are fixed: witnesses dominate within 1e-6, certificates violate by more
/// than 1e-9.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipOptions<T: Real = f64> {
    pub restarts: usize,
    pub iterations: usize,
    pub cardinality_cap: Option<usize>,
    pub seed: u64,
    /// Also try fractional certificate weights (pairwise chords of the 0/1
    /// vectors); only applied for up to 4 variables.
    pub fractional_certificates: bool,
    /// Caller-supplied witness channels tried before any search.
    #[serde(skip)]
    pub extra_witnesses: Vec<Channel<T>>,
}

impl<T: Real> Default for MembershipOptions<T> {
    fn default() -> Self {
        Self {
            restarts: 16,
            iterations: 300,
            cardinality_cap: None,
            seed: 0,
            fractional_certificates: true,
            extra_witnesses: Vec::new(),
        }
    }
}

/// Dominance violation of the achievable point of `rows` against `pt`:
/// max over coordinates of (achieved - allowed). Negative or zero means the
/// channel witnesses membership.
struct DominanceObjective<'a, T: Real> {
    tables: SourceTables<'a, T>,
    pt: &'a RatePoint<T>,
}

impl<'a, T: Real> DominanceObjective<'a, T> {
    fn new(p: &'a JointPmf<T>, pt: &'a RatePoint<T>) -> Self {
        Self {
            tables: SourceTables::new(p),
            pt,
        }
    }

    /// Max violation in one statistics pass; the gradient (when requested)
    /// is the gradient of the most violated coordinate.
    fn eval(&self, rows: &[Vec<T>], grad: Option<&mut [Vec<T>]>) -> T {
        let stats = self.tables.stats(rows);
        let mi = self.tables.mutual_information(rows, &stats);
        let mut worst = mi - self.pt.r0();
        let mut worst_idx = 0usize;
        for i in 0..self.tables.num_vars() {
            let violation = self.tables.conditional_entropy(i, &stats) - self.pt.rs()[i];
            if violation > worst {
                worst = violation;
                worst_idx = i + 1;
            }
        }
        if let Some(grad) = grad {
            if worst_idx == 0 {
                self.tables.mi_gradient(rows, &stats, grad);
            } else {
                self.tables.h_gradient(worst_idx - 1, &stats, grad);
            }
        }
        worst
    }
}

/// Product-erasure output alphabets above this size fall back to the joint
/// construction, keeping witnesses (and the reports that embed them) small
/// on 8-variable sources.
const PRODUCT_ERASURE_CELL_CAP: usize = 4096;

/// Per-variable erasure probabilities matched to the private-rate budgets:
/// eps_i = r_i / H(a_i), clamped to [0, 1].
fn erasure_rates<T: Real>(p: &JointPmf<T>, pt: &RatePoint<T>) -> Result<Vec<T>> {
    (0..p.num_vars())
        .map(|i| {
            let h_i = p.entropy(&[i])?;
            Ok(if h_i <= T::of(1e-12) {
                T::one()
            } else {
                (pt.rs()[i] / h_i).min(T::one())
            })
        })
        .collect()
}

/// Erasure witness tuned to the queried point: each variable is passed
/// through independently and erased with probability eps_i, which meets the
/// private-rate budgets with the least common rate when the source is a
/// product. Output alphabet: product over variables of (arity + 1).
fn product_erasure_witness<T: Real>(p: &JointPmf<T>, pt: &RatePoint<T>) -> Result<Channel<T>> {
    let n = p.num_vars();
    let erase = erasure_rates(p, pt)?;
    let out_arities: Vec<usize> = p.arities().iter().map(|&a| a + 1).collect();
    let out_cells: usize = out_arities.iter().product();
    let strides = p.strides();
    let mut rows = vec![vec![T::zero(); out_cells]; p.num_cells()];
    for (a_flat, row) in rows.iter_mut().enumerate() {
        for (w_flat, slot) in row.iter_mut().enumerate() {
            let mut q = T::one();
            let mut rem = w_flat;
            for i in (0..n).rev() {
                let w_i = rem % out_arities[i];
                rem /= out_arities[i];
                let a_i = (a_flat / strides[i]) % p.arities()[i];
                q *= if w_i == p.arities()[i] {
                    erase[i]
                } else if w_i == a_i {
                    T::one() - erase[i]
                } else {
                    T::zero()
                };
                if q == T::zero() {
                    break;
                }
            }
            *slot = q;
        }
    }
    Channel::new(rows)
}

/// Compact all-or-nothing variant: W reveals the whole string with
/// probability 1 - eps and a single erasure mark otherwise, with eps chosen
/// as the tightest private-rate budget. Exploits source correlations and
/// needs only |alphabet| + 1 outputs.
fn joint_erasure_witness<T: Real>(p: &JointPmf<T>, pt: &RatePoint<T>) -> Result<Channel<T>> {
    let erase = erasure_rates(p, pt)?;
    let eps = erase
        .into_iter()
        .fold(T::one(), |acc, e| acc.min(e));
    let cells = p.num_cells();
    let mut rows = vec![vec![T::zero(); cells + 1]; cells];
    for (a_flat, row) in rows.iter_mut().enumerate() {
        row[a_flat] = T::one() - eps;
        row[cells] = eps;
    }
    Channel::new(rows)
}

/// Certificate weight candidates: every 0/1 vector plus, for small N,
/// pairwise chords between them.
fn certificate_candidates<T: Real>(n: usize, fractional: bool) -> Vec<DualWeights<T>> {
    let mut out: Vec<DualWeights<T>> = (1..(1usize << n))
        .map(|mask| DualWeights::indicator(n, mask))
        .collect();
    if fractional && n <= 4 {
        let masks: Vec<usize> = (1..(1usize << n)).collect();
        for (idx, &m1) in masks.iter().enumerate() {
            for &m2 in &masks[idx + 1..] {
                for &alpha in &[0.25f64, 0.5, 0.75] {
                    let a = T::of(alpha);
                    let lambdas: Vec<T> = (0..n)
                        .map(|i| {
                            let x1 = if m1 >> i & 1 == 1 { T::one() } else { T::zero() };
                            let x2 = if m2 >> i & 1 == 1 { T::one() } else { T::zero() };
                            a * x1 + (T::one() - a) * x2
                        })
                        .collect();
                    out.push(DualWeights::new(lambdas).expect("nonnegative"));
                }
            }
        }
    }
    out
}

/// Tests whether `pt` lies in the rate region of `p`.
pub fn membership_test<T: Real>(
    p: &JointPmf<T>,
    pt: &RatePoint<T>,
    opts: &MembershipOptions<T>,
) -> Result<MembershipVerdict<T>> {
    let n = p.num_vars();
    if pt.num_receivers() != n {
        return Err(Error::ArityMismatch(format!(
            "rate point has {} private rates, source has {} variables",
            pt.num_receivers(),
            n
        )));
    }
    let witness_tol = T::of(WITNESS_TOL);
    let certificate_tol = T::of(CERTIFICATE_TOL);

    // Certificates first: they are exact arithmetic and decide every
    // cleanly-outside point without touching the optimizer.
    let ents = SubsetEntropies::compute(p)?;
    let mut best_certificate: Option<(T, DualWeights<T>, T)> = None;
    for lam in certificate_candidates::<T>(n, opts.fractional_certificates) {
        let bound = certified_lower_bound(&ents, lam.lambdas());
        let violation = bound - pt.weighted(&lam);
        if best_certificate
            .as_ref()
            .is_none_or(|(v, _, _)| violation > *v)
        {
            best_certificate = Some((violation, lam, bound));
        }
    }
    if let Some((violation, certificate, certified_bound)) = best_certificate {
        if violation > certificate_tol {
            return Ok(MembershipVerdict::Outside {
                certificate,
                certified_bound,
            });
        }
    }

    // Witness pass: explicit candidates, then multi-start subgradient
    // descent on the dominance violation.
    let dominance = DominanceObjective::new(p, pt);
    let mut best_gap: Option<T> = None;
    let check = |ch: Channel<T>, best_gap: &mut Option<T>| -> Option<MembershipVerdict<T>> {
        let gap = dominance.eval(ch.rows(), None);
        if best_gap.is_none_or(|g| gap < g) {
            *best_gap = Some(gap);
        }
        if gap <= witness_tol {
            Some(MembershipVerdict::Inside { witness: ch })
        } else {
            None
        }
    };

    for ch in &opts.extra_witnesses {
        if ch.input_arity() != p.num_cells() {
            return Err(Error::ArityMismatch(
                "extra witness input arity must match the source alphabet".into(),
            ));
        }
        if let Some(v) = check(ch.clone(), &mut best_gap) {
            return Ok(v);
        }
    }

    // Witness cardinality is not capped: any valid channel is a sound
    // inside certificate regardless of the optimizer cap.
    let cells = p.num_cells();
    let mut candidates = super::dual::canonical_candidates(p, usize::MAX);
    candidates.push(Channel::identity(cells)?);
    let product_cells: usize = p.arities().iter().map(|&a| a + 1).product();
    if product_cells <= PRODUCT_ERASURE_CELL_CAP {
        candidates.push(product_erasure_witness(p, pt)?);
    }
    candidates.push(joint_erasure_witness(p, pt)?);
    for ch in candidates {
        if let Some(v) = check(ch, &mut best_gap) {
            return Ok(v);
        }
    }

    let cap = opts.cardinality_cap.unwrap_or(cells + n);
    let results: Vec<(T, Vec<Vec<T>>)> = (0..opts.restarts as u64)
        .into_par_iter()
        .map(|ridx| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, ridx));
            let init = dirichlet_rows::<T>(&mut rng, cells, cap);
            subgradient_walk(init, opts.iterations, T::zero(), |rows, grad| {
                dominance.eval(rows, Some(grad))
            })
        })
        .collect();
    for (_, rows) in results {
        let ch = Channel::new(rows)?;
        if let Some(v) = check(ch, &mut best_gap) {
            return Ok(v);
        }
    }

    Ok(MembershipVerdict::Undetermined {
        gap: best_gap.expect("candidates were evaluated").max(T::zero()),
    })
}
