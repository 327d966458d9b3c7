//! The index-retrieval communication game: Alice holds a bit-string drawn
//! from a joint source, Bob holds a uniform index b, Alice sends one
//! classical message x, and Bob guesses the b-th bit.
//!
//! Strategies come in two kinds: nested XOR protocols over bipartite
//! no-signaling boxes, and classical shared-randomness protocols given as
//! explicit map tables. Both are evaluated exactly, by enumerating the full
//! joint distribution over (a, b, x, beta) — no sampling anywhere.

use serde::{Deserialize, Serialize};

use crate::boxes::BipartiteBox;
use crate::error::{Error, Result};
use crate::gray_wyner::RatePoint;
use crate::pmf::{Channel, JointPmf};
use crate::real::Real;

/// Comparison tolerance for the two inequality checks.
pub const EQ_TOL: f64 = 1e-9;

/// Nested XOR protocol over no-signaling boxes for N = 2^k source bits.
///
/// `level_boxes[0]` is the design used at the bottom level (the games on
/// adjacent bit pairs); `level_boxes[k-1]` is the top level that merges the
/// two half-string messages. Each level instantiates its design
/// independently as many times as the recursion requires, and the message
/// is a single bit at every N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStrategy<T: Real = f64> {
    k: usize,
    level_boxes: Vec<BipartiteBox<T>>,
}

impl<T: Real> BoxStrategy<T> {
    pub fn new(level_boxes: Vec<BipartiteBox<T>>) -> Result<Self> {
        if level_boxes.is_empty() {
            return Err(Error::InvalidStrategy("at least one level required".into()));
        }
        for (level, b) in level_boxes.iter().enumerate() {
            if !b.is_binary() {
                return Err(Error::InvalidStrategy(format!("level {} box is not binary", level)));
            }
            b.validate()
                .map_err(|e| Error::InvalidStrategy(format!("level {} box: {}", level, e)))?;
        }
        Ok(Self {
            k: level_boxes.len(),
            level_boxes,
        })
    }

    /// Same box design at every level.
    pub fn homogeneous(k: usize, design: BipartiteBox<T>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidStrategy("k must be >= 1".into()));
        }
        Self::new(vec![design; k])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of source bits the strategy plays.
    pub fn num_bits(&self) -> usize {
        1 << self.k
    }

    pub fn level_boxes(&self) -> &[BipartiteBox<T>] {
        &self.level_boxes
    }
}

/// Classical shared-randomness protocol given by explicit map tables.
///
/// Table layouts (row-major, last index fastest):
/// - `alice_map[a_flat * r + r_idx]` is the message in `0..message_arity`,
///   where `a_flat` is the flattened source outcome and `r` the number of
///   shared-seed cells;
/// - `bob_map[(x * n + b0) * r + r_idx]` is the guess bit, where `n` is the
///   number of source variables and `b0 = b - 1` the zero-based index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClassicalStrategy<T>")]
pub struct ClassicalStrategy<T: Real = f64> {
    source_arities: Vec<usize>,
    randomness: JointPmf<T>,
    message_arity: usize,
    alice_map: Vec<usize>,
    bob_map: Vec<usize>,
}

#[derive(Deserialize)]
struct RawClassicalStrategy<T: Real> {
    source_arities: Vec<usize>,
    randomness: JointPmf<T>,
    message_arity: usize,
    alice_map: Vec<usize>,
    bob_map: Vec<usize>,
}

impl<T: Real> TryFrom<RawClassicalStrategy<T>> for ClassicalStrategy<T> {
    type Error = Error;

    fn try_from(raw: RawClassicalStrategy<T>) -> Result<Self> {
        Self::new(
            raw.source_arities,
            raw.randomness,
            raw.message_arity,
            raw.alice_map,
            raw.bob_map,
        )
    }
}

impl<T: Real> ClassicalStrategy<T> {
    pub fn new(
        source_arities: Vec<usize>,
        randomness: JointPmf<T>,
        message_arity: usize,
        alice_map: Vec<usize>,
        bob_map: Vec<usize>,
    ) -> Result<Self> {
        if source_arities.is_empty() || source_arities.contains(&0) {
            return Err(Error::InvalidStrategy("source arities must be nonempty and >= 1".into()));
        }
        if message_arity == 0 {
            return Err(Error::InvalidStrategy("message arity must be >= 1".into()));
        }
        let a_cells: usize = source_arities.iter().product();
        let r_cells = randomness.num_cells();
        let n = source_arities.len();
        if alice_map.len() != a_cells * r_cells {
            return Err(Error::InvalidStrategy(format!(
                "alice_map has {} entries, expected {}",
                alice_map.len(),
                a_cells * r_cells
            )));
        }
        if bob_map.len() != message_arity * n * r_cells {
            return Err(Error::InvalidStrategy(format!(
                "bob_map has {} entries, expected {}",
                bob_map.len(),
                message_arity * n * r_cells
            )));
        }
        if alice_map.iter().any(|&x| x >= message_arity) {
            return Err(Error::InvalidStrategy("alice_map value out of message range".into()));
        }
        if bob_map.iter().any(|&b| b > 1) {
            return Err(Error::InvalidStrategy("bob_map values must be bits".into()));
        }
        Ok(Self {
            source_arities,
            randomness,
            message_arity,
            alice_map,
            bob_map,
        })
    }

    /// Deterministic protocol (trivial shared seed).
    pub fn deterministic(
        source_arities: Vec<usize>,
        message_arity: usize,
        alice_map: Vec<usize>,
        bob_map: Vec<usize>,
    ) -> Result<Self> {
        let trivial = JointPmf::new(vec![1], vec![T::one()])?;
        Self::new(source_arities, trivial, message_arity, alice_map, bob_map)
    }

    pub fn source_arities(&self) -> &[usize] {
        &self.source_arities
    }

    pub fn message_arity(&self) -> usize {
        self.message_arity
    }

    pub fn randomness(&self) -> &JointPmf<T> {
        &self.randomness
    }

    /// The map (a, r) -> (x, r) as a channel; a valid rate-region witness
    /// for the protocol's induced rate point.
    pub fn message_and_seed_channel(&self) -> Result<Channel<T>> {
        let a_cells: usize = self.source_arities.iter().product();
        let r_cells = self.randomness.num_cells();
        let mut rows = vec![vec![T::zero(); self.message_arity * r_cells]; a_cells];
        for (a_flat, row) in rows.iter_mut().enumerate() {
            for (r, &pr) in self.randomness.probs().iter().enumerate() {
                let x = self.alice_map[a_flat * r_cells + r];
                row[x * r_cells + r] += pr;
            }
        }
        Channel::new(rows)
    }
}

/// Exact evaluation of the game's two information inequalities on a joint
/// over (a, b, x, beta).
///
/// The first inequality compares H(x) against the sum of the per-index
/// informations I(a_i ; beta | b = i); the second compares
/// H(x) + sum of residuals H(a_i | beta, b = i) against H(a).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ICEvaluation<T: Real = f64> {
    pub h_x: T,
    /// I(a_i ; beta | b = i), one entry per index.
    pub mi_per_index: Vec<T>,
    /// H(a_i | beta, b = i), one entry per index.
    pub residual_per_index: Vec<T>,
    pub h_source: T,
    pub eq1_lhs: T,
    pub eq1_rhs: T,
    pub eq1_violated: bool,
    pub eq2_lhs: T,
    pub eq2_rhs: T,
    pub eq2_violated: bool,
}

impl<T: Real> ICEvaluation<T> {
    /// Rate point (H(x), residual_1, ..., residual_N) the game induces.
    pub fn induced_rate_point(&self) -> RatePoint<T> {
        RatePoint::new(self.h_x, self.residual_per_index.clone())
            .expect("entropies are nonnegative")
    }
}

/// Joint variable layout produced by the runners: the N source variables,
/// then b (arity N, value b-1), then the message x, then the guess beta.
fn game_names(n: usize, message: &str) -> Vec<String> {
    let mut names: Vec<String> = (1..=n).map(|i| format!("a{}", i)).collect();
    names.push("b".into());
    names.push(message.into());
    names.push("beta".into());
    names
}

/// Distribution of the 1-bit message of the nested protocol on `bits`,
/// using `levels` bottom-up (the last entry is this subgame's top box).
fn message_dist<T: Real>(bits: &[usize], levels: &[BipartiteBox<T>]) -> [T; 2] {
    if bits.len() == 1 {
        let mut d = [T::zero(); 2];
        d[bits[0]] = T::one();
        return d;
    }
    let half = bits.len() / 2;
    let sub = &levels[..levels.len() - 1];
    let top = levels.last().expect("strategy depth matches string length");
    let left = message_dist(&bits[..half], sub);
    let right = message_dist(&bits[half..], sub);
    let mut out = [T::zero(); 2];
    for (xl, &pl) in left.iter().enumerate() {
        if pl == T::zero() {
            continue;
        }
        for (xr, &pr) in right.iter().enumerate() {
            if pr == T::zero() {
                continue;
            }
            let alpha = xl ^ xr;
            for oa in 0..2usize {
                // Alice's marginal; Bob input 0 is arbitrary by no-signaling.
                let pa = top.alice_marginal(alpha, 0, oa);
                out[xl ^ oa] += pl * pr * pa;
            }
        }
    }
    out
}

/// Joint distribution over (message x, correction c) for the subgame on
/// `bits` when Bob walks the address `addr` (most significant bit first).
/// Bob's final guess for the addressed bit is x xor c.
fn message_correction_dist<T: Real>(
    bits: &[usize],
    addr: &[usize],
    levels: &[BipartiteBox<T>],
) -> [[T; 2]; 2] {
    if bits.len() == 1 {
        let mut d = [[T::zero(); 2]; 2];
        d[bits[0]][0] = T::one();
        return d;
    }
    let half = bits.len() / 2;
    let sub = &levels[..levels.len() - 1];
    let top = levels.last().expect("strategy depth matches string length");
    let take_right = addr[0];
    let (chosen_bits, other_bits) = if take_right == 0 {
        (&bits[..half], &bits[half..])
    } else {
        (&bits[half..], &bits[..half])
    };
    let chosen = message_correction_dist(chosen_bits, &addr[1..], sub);
    let other = message_dist(other_bits, sub);
    let mut out = [[T::zero(); 2]; 2];
    for (xs, row) in chosen.iter().enumerate() {
        for (cs, &ps) in row.iter().enumerate() {
            if ps == T::zero() {
                continue;
            }
            for (xo, &po) in other.iter().enumerate() {
                if po == T::zero() {
                    continue;
                }
                let (xl, xr) = if take_right == 0 { (xs, xo) } else { (xo, xs) };
                let alpha = xl ^ xr;
                for oa in 0..2usize {
                    for ob in 0..2usize {
                        let p = top.prob(alpha, take_right, oa, ob);
                        if p == T::zero() {
                            continue;
                        }
                        out[xl ^ oa][cs ^ ob] += ps * po * p;
                    }
                }
            }
        }
    }
    out
}

/// Runs the nested box protocol on source `p`, returning the exact joint
/// over (a_1..a_N, b, x, beta). Requires `p` to have exactly 2^k binary
/// variables.
pub fn run_box_strategy<T: Real>(p: &JointPmf<T>, strategy: &BoxStrategy<T>) -> Result<JointPmf<T>> {
    let n = strategy.num_bits();
    if p.num_vars() != n {
        return Err(Error::ArityMismatch(format!(
            "strategy with k = {} plays {} bits, source has {} variables",
            strategy.k(),
            n,
            p.num_vars()
        )));
    }
    if p.arities().iter().any(|&a| a != 2) {
        return Err(Error::ArityMismatch("source variables must be binary".into()));
    }
    let mut arities = vec![2; n];
    arities.extend_from_slice(&[n, 2, 2]);
    let mut probs = vec![T::zero(); (1 << n) * n * 4];
    let inv_n = T::one() / T::of_usize(n);
    for (a_flat, &pa) in p.probs().iter().enumerate() {
        if pa == T::zero() {
            continue;
        }
        let bits: Vec<usize> = (0..n).map(|i| (a_flat >> (n - 1 - i)) & 1).collect();
        for b0 in 0..n {
            let addr: Vec<usize> = (0..strategy.k())
                .map(|j| (b0 >> (strategy.k() - 1 - j)) & 1)
                .collect();
            let dist = message_correction_dist(&bits, &addr, strategy.level_boxes());
            for (x, row) in dist.iter().enumerate() {
                for (c, &q) in row.iter().enumerate() {
                    if q == T::zero() {
                        continue;
                    }
                    let beta = x ^ c;
                    let flat = ((a_flat * n + b0) * 2 + x) * 2 + beta;
                    probs[flat] += pa * inv_n * q;
                }
            }
        }
    }
    JointPmf::new(arities, probs)?.with_names(game_names(n, "x"))
}

/// Runs a classical shared-randomness protocol on source `p`, returning the
/// exact joint over (a_1..a_N, b, x, beta) with the seed marginalized out.
pub fn run_classical_strategy<T: Real>(
    p: &JointPmf<T>,
    strategy: &ClassicalStrategy<T>,
) -> Result<JointPmf<T>> {
    if p.arities() != strategy.source_arities() {
        return Err(Error::ArityMismatch(format!(
            "strategy expects source arities {:?}, got {:?}",
            strategy.source_arities(),
            p.arities()
        )));
    }
    let n = p.num_vars();
    let m = strategy.message_arity;
    let r_cells = strategy.randomness.num_cells();
    let mut arities = p.arities().to_vec();
    arities.extend_from_slice(&[n, m, 2]);
    let mut probs = vec![T::zero(); p.num_cells() * n * m * 2];
    let inv_n = T::one() / T::of_usize(n);
    for (a_flat, &pa) in p.probs().iter().enumerate() {
        if pa == T::zero() {
            continue;
        }
        for (r, &pr) in strategy.randomness.probs().iter().enumerate() {
            if pr == T::zero() {
                continue;
            }
            let x = strategy.alice_map[a_flat * r_cells + r];
            for b0 in 0..n {
                let beta = strategy.bob_map[(x * n + b0) * r_cells + r];
                let flat = ((a_flat * n + b0) * m + x) * 2 + beta;
                probs[flat] += pa * pr * inv_n;
            }
        }
    }
    JointPmf::new(arities, probs)?.with_names(game_names(n, "x"))
}

/// Evaluates both inequalities on a game joint over (a, b, x, beta).
///
/// `source` fixes the variable layout: its N variables must match the first
/// N of `joint`, and b (at index N) must be uniform and independent of the
/// source — both are checked.
pub fn evaluate_ic<T: Real>(joint: &JointPmf<T>, source: &JointPmf<T>) -> Result<ICEvaluation<T>> {
    let n = source.num_vars();
    if joint.num_vars() != n + 3 {
        return Err(Error::ArityMismatch(format!(
            "joint has {} variables, expected {} (source + b + x + beta)",
            joint.num_vars(),
            n + 3
        )));
    }
    if &joint.arities()[..n] != source.arities() || joint.arities()[n] != n {
        return Err(Error::ArityMismatch(
            "joint layout must be (source vars, b with arity N, x, beta)".into(),
        ));
    }
    let b_var = n;
    let x_var = n + 1;
    let beta_var = n + 2;
    if joint.arities()[beta_var] != 2 {
        return Err(Error::ArityMismatch("guess variable must be binary".into()));
    }

    // Precondition: b uniform on its alphabet and independent of the source.
    let source_vars: Vec<usize> = (0..n).collect();
    let mut ab_vars = source_vars.clone();
    ab_vars.push(b_var);
    let ab = joint.marginalize(&ab_vars)?;
    let inv_n = T::one() / T::of_usize(n);
    let tol = T::of(EQ_TOL);
    for (a_flat, &pa) in source.probs().iter().enumerate() {
        for b0 in 0..n {
            let got = ab.probs()[a_flat * n + b0];
            if (got - pa * inv_n).abs() > tol {
                return Err(Error::Precondition(
                    "b must be uniform and independent of the source".into(),
                ));
            }
        }
    }

    let h_x = joint.entropy(&[x_var])?;
    let h_source = source.entropy(&source_vars)?;
    let mut mi_per_index = Vec::with_capacity(n);
    let mut residual_per_index = Vec::with_capacity(n);
    for i in 0..n {
        let cond = joint.condition_on_event(b_var, i)?;
        mi_per_index.push(cond.mutual_information(&[i], &[beta_var])?);
        residual_per_index.push(cond.conditional_entropy(&[i], &[beta_var])?);
    }
    let eq1_rhs: T = mi_per_index.iter().copied().sum();
    let eq2_lhs = h_x + residual_per_index.iter().copied().sum();
    Ok(ICEvaluation {
        h_x,
        eq1_lhs: h_x,
        eq1_rhs,
        eq1_violated: h_x < eq1_rhs - tol,
        eq2_lhs,
        eq2_rhs: h_source,
        eq2_violated: eq2_lhs < h_source - tol,
        h_source,
        mi_per_index,
        residual_per_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Frozen with an independent script before the build.
    const SUM_MI_ETA_HALF: f64 = 0.3774437510817343;

    fn guess_success_prob(joint: &JointPmf<f64>, n: usize) -> Vec<f64> {
        // P(beta = a_b | b = i) for each i.
        let mut per_index = vec![0.0; n];
        for (flat, &p) in joint.probs().iter().enumerate() {
            let values = joint.values_of(flat);
            let b0 = values[n];
            if values[b0] == values[n + 2] {
                per_index[b0] += p;
            }
        }
        per_index.iter().map(|&p| p * n as f64).collect()
    }

    #[test]
    fn pr_strategy_k1_is_perfect() {
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let s = BoxStrategy::homogeneous(1, BipartiteBox::pr()).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        for q in guess_success_prob(&joint, 2) {
            assert_relative_eq!(q, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn isotropic_k1_success_is_half_plus_half_eta() {
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        for eta in [0.0, 0.3, 0.5, 0.9] {
            let s = BoxStrategy::homogeneous(1, BipartiteBox::isotropic(eta).unwrap()).unwrap();
            let joint = run_box_strategy(&p, &s).unwrap();
            for q in guess_success_prob(&joint, 2) {
                assert_relative_eq!(q, (1.0 + eta) / 2.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn isotropic_k1_success_holds_on_correlated_sources() {
        // The XOR protocol's error is independent of the source, so the
        // success rate stays (1+eta)/2 for arbitrary p.
        let p = JointPmf::<f64>::doubly_symmetric_binary(0.2).unwrap();
        let s = BoxStrategy::homogeneous(1, BipartiteBox::isotropic(0.6).unwrap()).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        for q in guess_success_prob(&joint, 2) {
            assert_relative_eq!(q, 0.8, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_noise_k1_gives_zero_information() {
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let s = BoxStrategy::homogeneous(1, BipartiteBox::isotropic(0.0).unwrap()).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        for q in guess_success_prob(&joint, 2) {
            assert_relative_eq!(q, 0.5, epsilon = 1e-12);
        }
        let eval = evaluate_ic(&joint, &p).unwrap();
        for i in eval.mi_per_index {
            assert_relative_eq!(i, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn pr_strategy_k2_is_perfect_for_all_indices() {
        let p = JointPmf::<f64>::uniform_bits(4).unwrap();
        let s = BoxStrategy::homogeneous(2, BipartiteBox::pr()).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        for q in guess_success_prob(&joint, 4) {
            assert_relative_eq!(q, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn nested_isotropic_success_composes_multiplicatively() {
        // Bob's guess picks up one independent XOR error per level, each
        // with bias eta, so the success probability at depth k is
        // (1 + eta^k) / 2 — the standard bias-composition rule.
        for (k, n) in [(2usize, 4usize), (3, 8)] {
            let p = JointPmf::<f64>::uniform_bits(n).unwrap();
            for eta in [0.0, 0.4, 0.8, 1.0] {
                let s =
                    BoxStrategy::homogeneous(k, BipartiteBox::isotropic(eta).unwrap()).unwrap();
                let joint = run_box_strategy(&p, &s).unwrap();
                let expected = (1.0 + eta.powi(k as i32)) / 2.0;
                for q in guess_success_prob(&joint, n) {
                    assert_relative_eq!(q, expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn mixed_level_boxes_compose_their_biases() {
        let p = JointPmf::<f64>::uniform_bits(4).unwrap();
        let s = BoxStrategy::new(vec![
            BipartiteBox::isotropic(0.9).unwrap(),
            BipartiteBox::isotropic(0.3).unwrap(),
        ])
        .unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        let expected = (1.0 + 0.9 * 0.3) / 2.0;
        for q in guess_success_prob(&joint, 4) {
            assert_relative_eq!(q, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn box_strategy_rejects_wrong_source_size() {
        let p = JointPmf::<f64>::uniform_bits(3).unwrap();
        let s = BoxStrategy::homogeneous(1, BipartiteBox::pr()).unwrap();
        assert!(run_box_strategy(&p, &s).is_err());
    }

    #[test]
    fn evaluate_pr_point() {
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let s = BoxStrategy::homogeneous(1, BipartiteBox::pr()).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert_relative_eq!(eval.h_x, 1.0, epsilon = 1e-12);
        assert_relative_eq!(eval.eq1_rhs, 2.0, epsilon = 1e-9);
        assert!(eval.eq1_violated);
        assert_relative_eq!(eval.eq2_lhs, 1.0, epsilon = 1e-9);
        assert_relative_eq!(eval.eq2_rhs, 2.0, epsilon = 1e-12);
        assert!(eval.eq2_violated);
        let pt = eval.induced_rate_point();
        assert_relative_eq!(pt.r0(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(pt.rs()[0], 0.0, epsilon = 1e-9);
        assert_relative_eq!(pt.rs()[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn evaluate_isotropic_half_holds_eq1() {
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let s = BoxStrategy::homogeneous(1, BipartiteBox::isotropic(0.5).unwrap()).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert_relative_eq!(eval.eq1_rhs, SUM_MI_ETA_HALF, epsilon = 1e-9);
        assert!(!eval.eq1_violated);
        assert!(!eval.eq2_violated);
    }

    #[test]
    fn identity_and_residual_sum_to_conditional_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..30 {
            let mut probs: Vec<f64> = (0..4).map(|_| -(rng.random::<f64>().ln())).collect();
            let total: f64 = probs.iter().sum();
            for q in &mut probs {
                *q /= total;
            }
            let p = JointPmf::new(vec![2, 2], probs).unwrap();
            let eta = (trial as f64) / 30.0;
            let s = BoxStrategy::homogeneous(1, BipartiteBox::isotropic(eta).unwrap()).unwrap();
            let joint = run_box_strategy(&p, &s).unwrap();
            let eval = evaluate_ic(&joint, &p).unwrap();
            for i in 0..2 {
                let cond = joint.condition_on_event(2, i).unwrap();
                let h_ai = cond.entropy(&[i]).unwrap();
                assert_relative_eq!(
                    eval.mi_per_index[i] + eval.residual_per_index[i],
                    h_ai,
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn classical_send_first_bit() {
        // alice sends a_1, bob outputs the message.
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let alice_map = vec![0, 0, 1, 1];
        // bob_map[(x * 2 + b0) * 1]: beta = x regardless of b.
        let bob_map = vec![0, 0, 1, 1];
        let s = ClassicalStrategy::deterministic(vec![2, 2], 2, alice_map, bob_map).unwrap();
        let joint = run_classical_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert_relative_eq!(eval.mi_per_index[0], 1.0, epsilon = 1e-9);
        assert_relative_eq!(eval.mi_per_index[1], 0.0, epsilon = 1e-9);
        assert!(!eval.eq2_violated);
    }

    #[test]
    fn classical_constant_message_gives_zero_information() {
        let p = JointPmf::<f64>::doubly_symmetric_binary(0.3).unwrap();
        let s = ClassicalStrategy::deterministic(vec![2, 2], 1, vec![0; 4], vec![0, 0]).unwrap();
        let joint = run_classical_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert_relative_eq!(eval.h_x, 0.0, epsilon = 1e-12);
        for i in eval.mi_per_index {
            assert_relative_eq!(i, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn classical_full_message_recovers_everything() {
        // x encodes both bits (M = 4); bob selects bit b from the message.
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        let alice_map = vec![0, 1, 2, 3];
        let mut bob_map = vec![0; 4 * 2];
        for x in 0..4usize {
            for b0 in 0..2usize {
                bob_map[x * 2 + b0] = (x >> (1 - b0)) & 1;
            }
        }
        let s = ClassicalStrategy::deterministic(vec![2, 2], 4, alice_map, bob_map).unwrap();
        let joint = run_classical_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert_relative_eq!(eval.h_x, 2.0, epsilon = 1e-12);
        for c in &eval.residual_per_index {
            assert_relative_eq!(*c, 0.0, epsilon = 1e-9);
        }
        let pt = eval.induced_rate_point();
        assert_relative_eq!(pt.r0(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_rejects_dependent_b() {
        // A joint where b copies a_1 instead of being independent.
        let mut probs = vec![0.0; 2 * 2 * 2 * 2 * 2];
        // (a1, a2, b, x, beta) with b = a1.
        for a1 in 0..2usize {
            for a2 in 0..2usize {
                probs[(((a1 * 2 + a2) * 2 + a1) * 2) * 2] = 0.25;
            }
        }
        let joint = JointPmf::<f64>::new(vec![2, 2, 2, 2, 2], probs).unwrap();
        let p = JointPmf::<f64>::uniform_bits(2).unwrap();
        assert!(matches!(
            evaluate_ic(&joint, &p),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn game_pipeline_works_at_f32() {
        let p = JointPmf::<f32>::uniform_bits(2).unwrap();
        let s = BoxStrategy::homogeneous(1, BipartiteBox::<f32>::pr()).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert!((eval.h_x - 1.0).abs() < 1e-5);
        assert!((eval.eq1_rhs - 2.0).abs() < 1e-5);
        assert!(eval.eq1_violated);
    }

    #[test]
    fn classical_strategy_json_round_trip() {
        let s = ClassicalStrategy::<f64>::deterministic(vec![2, 2], 2, vec![0, 0, 1, 1], vec![0, 0, 1, 1])
            .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: ClassicalStrategy<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
