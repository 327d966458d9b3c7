//! Bipartite no-signaling boxes: conditional distributions
//! p(o_A, o_B | i_A, i_B) whose output marginals on either side do not
//! depend on the other side's input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{NORMALIZATION_TOL, ZERO_CLAMP};
use crate::real::Real;

/// CHSH value of the PR box; no box exceeds it in absolute value.
pub const CHSH_ALGEBRAIC_MAX: f64 = 4.0;

/// Classical (local hidden variable) CHSH bound.
pub const CHSH_CLASSICAL_BOUND: f64 = 2.0;

/// Tsirelson bound 2*sqrt(2) on the CHSH value of quantum correlations.
pub const CHSH_TSIRELSON_BOUND: f64 = 2.8284271247461903;

// |S| <= 2*sqrt(2) + 4e-12, so the isotropic family flips its label at
// eta = sqrt(2)/2 within 1e-12 of the threshold.
const QUANTUM_LABEL_TOL: f64 = 4e-12;

/// Bipartite conditional distribution with no-signaling marginals.
///
/// The flat `probs` array is indexed by (i_A, i_B, o_A, o_B) in row-major
/// order with the last index fastest; this is also the serialized order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox<T>")]
pub struct BipartiteBox<T: Real = f64> {
    input_arities: [usize; 2],
    output_arities: [usize; 2],
    probs: Vec<T>,
}

#[derive(Deserialize)]
struct RawBox<T> {
    input_arities: [usize; 2],
    output_arities: [usize; 2],
    probs: Vec<T>,
}

impl<T: Real> TryFrom<RawBox<T>> for BipartiteBox<T> {
    type Error = Error;

    fn try_from(raw: RawBox<T>) -> Result<Self> {
        BipartiteBox::new(raw.input_arities, raw.output_arities, raw.probs)
    }
}

impl<T: Real> BipartiteBox<T> {
    /// Validates normalization (per input pair) and no-signaling, both
    /// within `1e-9`, and constructs the box.
    pub fn new(input_arities: [usize; 2], output_arities: [usize; 2], probs: Vec<T>) -> Result<Self> {
        let b = Self::new_unchecked(input_arities, output_arities, probs)?;
        b.validate()?;
        Ok(b)
    }

    /// Constructs without the normalization/no-signaling checks. Intended
    /// for building raw conditionals that [`Self::is_no_signaling`] or
    /// [`Self::validate`] will then judge.
    pub fn new_unchecked(
        input_arities: [usize; 2],
        output_arities: [usize; 2],
        probs: Vec<T>,
    ) -> Result<Self> {
        if input_arities.contains(&0) || output_arities.contains(&0) {
            return Err(Error::InvalidBox("arities must be >= 1".into()));
        }
        let cells = input_arities[0] * input_arities[1] * output_arities[0] * output_arities[1];
        if probs.len() != cells {
            return Err(Error::InvalidBox(format!(
                "expected {} probabilities, got {}",
                cells,
                probs.len()
            )));
        }
        let mut probs = probs;
        let clamp = T::of(ZERO_CLAMP);
        for p in &mut probs {
            if !p.is_finite() {
                return Err(Error::InvalidBox("non-finite probability".into()));
            }
            if *p < T::zero() {
                if *p < -clamp {
                    return Err(Error::InvalidBox(format!("negative probability {}", p)));
                }
                *p = T::zero();
            }
        }
        Ok(Self {
            input_arities,
            output_arities,
            probs,
        })
    }

    /// Checks both invariants: unit mass for every input pair and
    /// no-signaling, each within `1e-9`.
    pub fn validate(&self) -> Result<()> {
        let tol = T::of(NORMALIZATION_TOL);
        for ia in 0..self.input_arities[0] {
            for ib in 0..self.input_arities[1] {
                let mut total = T::zero();
                for oa in 0..self.output_arities[0] {
                    for ob in 0..self.output_arities[1] {
                        total += self.prob(ia, ib, oa, ob);
                    }
                }
                if (total - T::one()).abs() > tol {
                    return Err(Error::InvalidBox(format!(
                        "outputs for inputs ({}, {}) sum to {}",
                        ia, ib, total
                    )));
                }
            }
        }
        if !self.is_no_signaling(tol) {
            return Err(Error::InvalidBox("marginals signal across parties".into()));
        }
        Ok(())
    }

    pub fn input_arities(&self) -> [usize; 2] {
        self.input_arities
    }

    pub fn output_arities(&self) -> [usize; 2] {
        self.output_arities
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// p(o_A, o_B | i_A, i_B).
    pub fn prob(&self, ia: usize, ib: usize, oa: usize, ob: usize) -> T {
        let [_, nib] = self.input_arities;
        let [noa, nob] = self.output_arities;
        self.probs[((ia * nib + ib) * noa + oa) * nob + ob]
    }

    /// True when every box dimension is binary.
    pub fn is_binary(&self) -> bool {
        self.input_arities == [2, 2] && self.output_arities == [2, 2]
    }

    /// Alice's output marginal p(o_A | i_A, i_B); no-signaling makes it
    /// independent of `ib`.
    pub fn alice_marginal(&self, ia: usize, ib: usize, oa: usize) -> T {
        (0..self.output_arities[1])
            .map(|ob| self.prob(ia, ib, oa, ob))
            .sum()
    }

    /// Bob's output marginal p(o_B | i_A, i_B).
    pub fn bob_marginal(&self, ia: usize, ib: usize, ob: usize) -> T {
        (0..self.output_arities[0])
            .map(|oa| self.prob(ia, ib, oa, ob))
            .sum()
    }

    /// True iff each party's output marginal is independent of the other
    /// party's input, within `tol`.
    pub fn is_no_signaling(&self, tol: T) -> bool {
        for ia in 0..self.input_arities[0] {
            for oa in 0..self.output_arities[0] {
                let reference = self.alice_marginal(ia, 0, oa);
                for ib in 1..self.input_arities[1] {
                    if (self.alice_marginal(ia, ib, oa) - reference).abs() > tol {
                        return false;
                    }
                }
            }
        }
        for ib in 0..self.input_arities[1] {
            for ob in 0..self.output_arities[1] {
                let reference = self.bob_marginal(0, ib, ob);
                for ia in 1..self.input_arities[0] {
                    if (self.bob_marginal(ia, ib, ob) - reference).abs() > tol {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The PR box: o_A xor o_B = i_A and i_B, with uniform marginals.
    pub fn pr() -> Self {
        let mut probs = vec![T::zero(); 16];
        let half = T::of(0.5);
        for ia in 0..2usize {
            for ib in 0..2usize {
                for oa in 0..2usize {
                    for ob in 0..2usize {
                        if oa ^ ob == ia & ib {
                            probs[((ia * 2 + ib) * 2 + oa) * 2 + ob] = half;
                        }
                    }
                }
            }
        }
        Self {
            input_arities: [2, 2],
            output_arities: [2, 2],
            probs,
        }
    }

    /// eta * PR + (1 - eta) * uniform output noise.
    pub fn isotropic(eta: T) -> Result<Self> {
        if eta < T::zero() || eta > T::one() {
            return Err(Error::InvalidParameter(format!("eta = {} outside [0,1]", eta)));
        }
        let pr = Self::pr();
        let noise = T::of(0.25) * (T::one() - eta);
        let probs = pr.probs.iter().map(|&p| eta * p + noise).collect();
        Ok(Self {
            input_arities: [2, 2],
            output_arities: [2, 2],
            probs,
        })
    }

    /// Local deterministic box o_A = f_a[i_A], o_B = f_b[i_B].
    pub fn local_deterministic(f_a: [usize; 2], f_b: [usize; 2]) -> Result<Self> {
        if f_a.iter().chain(&f_b).any(|&o| o > 1) {
            return Err(Error::InvalidBox("deterministic outputs must be bits".into()));
        }
        let mut probs = vec![T::zero(); 16];
        for ia in 0..2usize {
            for ib in 0..2usize {
                probs[((ia * 2 + ib) * 2 + f_a[ia]) * 2 + f_b[ib]] = T::one();
            }
        }
        Ok(Self {
            input_arities: [2, 2],
            output_arities: [2, 2],
            probs,
        })
    }

    /// All 16 local deterministic binary boxes.
    pub fn all_local_deterministic() -> Vec<Self> {
        let mut boxes = Vec::with_capacity(16);
        for fa0 in 0..2 {
            for fa1 in 0..2 {
                for fb0 in 0..2 {
                    for fb1 in 0..2 {
                        boxes.push(Self::local_deterministic([fa0, fa1], [fb0, fb1]).unwrap());
                    }
                }
            }
        }
        boxes
    }

    /// Convex mixture of same-shaped boxes.
    pub fn mix(boxes: &[Self], weights: &[T]) -> Result<Self> {
        if boxes.is_empty() || boxes.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} boxes with {} weights",
                boxes.len(),
                weights.len()
            )));
        }
        let shape = (boxes[0].input_arities, boxes[0].output_arities);
        if boxes.iter().any(|b| (b.input_arities, b.output_arities) != shape) {
            return Err(Error::InvalidParameter("mixed boxes must share arities".into()));
        }
        if weights.iter().any(|&w| w < -T::of(ZERO_CLAMP)) {
            return Err(Error::InvalidParameter("negative mixture weight".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::of(NORMALIZATION_TOL) {
            return Err(Error::InvalidParameter(format!("weights sum to {}", total)));
        }
        let mut probs = vec![T::zero(); boxes[0].probs.len()];
        for (b, &w) in boxes.iter().zip(weights) {
            for (acc, &p) in probs.iter_mut().zip(&b.probs) {
                *acc += w.max(T::zero()) * p;
            }
        }
        Ok(Self {
            input_arities: shape.0,
            output_arities: shape.1,
            probs,
        })
    }

    /// CHSH score S = sum over input pairs of (-1)^(i_A i_B) E(i_A, i_B)
    /// with E the expectation of (-1)^(o_A xor o_B). Binary boxes only.
    pub fn chsh_value(&self) -> Result<T> {
        if !self.is_binary() {
            return Err(Error::InvalidBox("chsh is defined for binary boxes".into()));
        }
        let mut s = T::zero();
        for ia in 0..2usize {
            for ib in 0..2usize {
                let mut correlator = T::zero();
                for oa in 0..2usize {
                    for ob in 0..2usize {
                        let sign = if oa ^ ob == 0 { T::one() } else { -T::one() };
                        correlator += sign * self.prob(ia, ib, oa, ob);
                    }
                }
                if ia & ib == 1 {
                    s -= correlator;
                } else {
                    s += correlator;
                }
            }
        }
        Ok(s)
    }

    /// Boolean label |S| <= 2*sqrt(2): whether the CHSH score is within the
    /// Tsirelson bound. This is the only quantum-feasibility tracking the
    /// crate does.
    pub fn is_quantum_feasible(&self) -> Result<bool> {
        let s = self.chsh_value()?;
        Ok(s.abs() <= T::of(CHSH_TSIRELSON_BOUND + QUANTUM_LABEL_TOL))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force CHSH oracle over all 16 correlator terms.
    fn chsh_oracle(b: &BipartiteBox<f64>) -> f64 {
        let mut s = 0.0;
        for ia in 0..2usize {
            for ib in 0..2usize {
                for oa in 0..2usize {
                    for ob in 0..2usize {
                        let input_sign = if ia * ib == 1 { -1.0 } else { 1.0 };
                        let output_sign = if (oa + ob) % 2 == 0 { 1.0 } else { -1.0 };
                        s += input_sign * output_sign * b.prob(ia, ib, oa, ob);
                    }
                }
            }
        }
        s
    }

    #[test]
    fn pr_box_is_no_signaling_and_normalized() {
        let pr = BipartiteBox::<f64>::pr();
        assert!(pr.validate().is_ok());
        assert!(pr.is_no_signaling(1e-9));
    }

    #[test]
    fn pr_box_satisfies_its_constraint_on_inputs_11() {
        let pr = BipartiteBox::<f64>::pr();
        let mut p_odd = 0.0;
        for oa in 0..2usize {
            for ob in 0..2usize {
                if oa ^ ob == 1 {
                    p_odd += pr.prob(1, 1, oa, ob);
                }
            }
        }
        assert_relative_eq!(p_odd, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn chsh_of_pr_is_four() {
        let pr = BipartiteBox::<f64>::pr();
        assert_relative_eq!(pr.chsh_value().unwrap(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(chsh_oracle(&pr), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn chsh_matches_oracle_on_random_mixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dets = BipartiteBox::<f64>::all_local_deterministic();
        for _ in 0..100 {
            let mut weights: Vec<f64> = (0..16).map(|_| -(rng.random::<f64>().ln())).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let b = BipartiteBox::mix(&dets, &weights).unwrap();
            assert_relative_eq!(b.chsh_value().unwrap(), chsh_oracle(&b), epsilon = 1e-12);
        }
    }

    #[test]
    fn isotropic_endpoints() {
        let b1 = BipartiteBox::<f64>::isotropic(1.0).unwrap();
        assert_eq!(b1, BipartiteBox::pr());
        let b0 = BipartiteBox::<f64>::isotropic(0.0).unwrap();
        assert_relative_eq!(b0.chsh_value().unwrap(), 0.0, epsilon = 1e-12);
        let bhalf = BipartiteBox::<f64>::isotropic(0.5).unwrap();
        assert_relative_eq!(bhalf.chsh_value().unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn isotropic_chsh_is_linear_in_eta() {
        for i in 0..=20 {
            let eta = i as f64 / 20.0;
            let b = BipartiteBox::<f64>::isotropic(eta).unwrap();
            assert_relative_eq!(b.chsh_value().unwrap(), 4.0 * eta, epsilon = 1e-9);
            assert!(b.is_no_signaling(1e-9));
        }
    }

    #[test]
    fn isotropic_rejects_out_of_range() {
        assert!(BipartiteBox::<f64>::isotropic(1.5).is_err());
        assert!(BipartiteBox::<f64>::isotropic(-0.1).is_err());
    }

    #[test]
    fn local_deterministic_boxes_respect_classical_bound() {
        let mut max_abs: f64 = 0.0;
        for b in BipartiteBox::<f64>::all_local_deterministic() {
            let s = b.chsh_value().unwrap();
            assert!(s.abs() <= 2.0 + 1e-12);
            max_abs = max_abs.max(s.abs());
        }
        assert_relative_eq!(max_abs, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn equal_mixture_of_all_deterministic_boxes_has_zero_chsh() {
        let dets = BipartiteBox::<f64>::all_local_deterministic();
        let weights = vec![1.0 / 16.0; 16];
        let b = BipartiteBox::mix(&dets, &weights).unwrap();
        assert_relative_eq!(b.chsh_value().unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_mixture_returns_same_box() {
        let pr = BipartiteBox::<f64>::pr();
        let b = BipartiteBox::mix(std::slice::from_ref(&pr), &[1.0]).unwrap();
        assert_eq!(b, pr);
    }

    #[test]
    fn mix_rejects_bad_weights() {
        let pr = BipartiteBox::<f64>::pr();
        assert!(BipartiteBox::mix(&[pr.clone(), pr.clone()], &[0.7, 0.7]).is_err());
        assert!(BipartiteBox::mix(&[pr.clone(), pr], &[1.5, -0.5]).is_err());
    }

    #[test]
    fn signaling_box_detected() {
        // o_A := i_B deterministically, o_B := 0.
        let mut probs = vec![0.0; 16];
        for ia in 0..2usize {
            for ib in 0..2usize {
                probs[((ia * 2 + ib) * 2 + ib) * 2] = 1.0;
            }
        }
        let raw = BipartiteBox::<f64>::new_unchecked([2, 2], [2, 2], probs).unwrap();
        assert!(!raw.is_no_signaling(1e-9));
        assert!(raw.validate().is_err());
        assert!(BipartiteBox::<f64>::new([2, 2], [2, 2], raw.probs().to_vec()).is_err());
    }

    #[test]
    fn isotropic_point_three_is_no_signaling() {
        let b = BipartiteBox::<f64>::isotropic(0.3).unwrap();
        assert!(b.is_no_signaling(1e-9));
    }

    #[test]
    fn random_mixtures_preserve_no_signaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pool: Vec<BipartiteBox<f64>> = vec![
            BipartiteBox::pr(),
            BipartiteBox::isotropic(0.4).unwrap(),
            BipartiteBox::local_deterministic([0, 1], [1, 0]).unwrap(),
        ];
        for _ in 0..50 {
            let mut weights: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let b = BipartiteBox::mix(&pool, &weights).unwrap();
            assert!(b.is_no_signaling(1e-9));
        }
    }

    #[test]
    fn quantum_label_flips_at_tsirelson_eta() {
        let threshold = std::f64::consts::FRAC_1_SQRT_2;
        for eta in [0.0, 0.3, 0.5, threshold, threshold + 1e-12] {
            let b = BipartiteBox::<f64>::isotropic(eta).unwrap();
            assert!(b.is_quantum_feasible().unwrap(), "eta = {eta}");
        }
        for eta in [threshold + 1e-9, 0.8, 1.0] {
            let b = BipartiteBox::<f64>::isotropic(eta).unwrap();
            assert!(!b.is_quantum_feasible().unwrap(), "eta = {eta}");
        }
    }

    #[test]
    fn box_json_round_trip() {
        let b = BipartiteBox::<f64>::isotropic(0.75).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        let back: BipartiteBox<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
    }
}
