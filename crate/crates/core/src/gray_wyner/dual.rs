//! Dual support function of the rate region:
//! T(lambda) = min over channels W of I(a ; W) + sum_i lambda_i H(a_i | W).
//!
//! The upper bound comes from explicit channels: canonical deterministic
//! candidates (identity, constants, subset projections), exhaustive sweep
//! of all deterministic channels when the budget permits, and multi-start
//! projected descent over stochastic channels. The certified lower bound
//! never uses the optimizer: it is the best combination of the exact
//! anchor values T(1_S) = H(a_S), extended to fractional lambda by
//! concavity chords and coordinate monotonicity, computed as a small LP.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{Channel, JointPmf};
use crate::real::Real;

use super::lp::simplex_maximize;
use super::optim::{derive_seed, dirichlet_rows, projected_descent};
use super::{DualWeights, SubsetEntropies};

/// Optimizer knobs. Defaults: cap = |alphabet| + N, 64 Dirichlet restarts
/// of 500 iterations, step tolerance 1e-8, deterministic sweep whenever
/// cap^|alphabet| <= 1e6.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualOptions {
    pub cardinality_cap: Option<usize>,
    pub restarts: usize,
    pub iterations: usize,
    pub step_tol: f64,
    pub deterministic_budget: u64,
    pub seed: u64,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            cardinality_cap: None,
            restarts: 64,
            iterations: 500,
            step_tol: 1e-8,
            deterministic_budget: 1_000_000,
            seed: 0,
        }
    }
}

/// Bracketed value of T(lambda): a channel achieving `upper` and a bound
/// `certified_lower` that is valid independently of the optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualValue<T: Real = f64> {
    pub upper: T,
    pub witness: Channel<T>,
    pub certified_lower: T,
}

/// Per-source lookup tables shared by every channel-objective evaluation:
/// the flattened source and, for each variable, its value at every flat
/// source index.
pub(crate) struct SourceTables<'a, T: Real> {
    source: &'a [T],
    var_values: Vec<Vec<usize>>,
    arities: Vec<usize>,
}

/// One-pass statistics of a channel against a source: the output marginal
/// r(w) and the joint tables m_i(v, w) for every variable.
pub(crate) struct ChannelStats<T> {
    outputs: usize,
    w_marginal: Vec<T>,
    var_tables: Vec<Vec<T>>,
}

impl<'a, T: Real> SourceTables<'a, T> {
    pub fn new(p: &'a JointPmf<T>) -> Self {
        let n = p.num_vars();
        let strides = p.strides();
        let var_values = (0..n)
            .map(|i| {
                (0..p.num_cells())
                    .map(|flat| (flat / strides[i]) % p.arities()[i])
                    .collect()
            })
            .collect();
        Self {
            source: p.probs(),
            var_values,
            arities: p.arities().to_vec(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.arities.len()
    }

    pub fn stats(&self, rows: &[Vec<T>]) -> ChannelStats<T> {
        let outputs = rows[0].len();
        let mut w_marginal = vec![T::zero(); outputs];
        let mut var_tables: Vec<Vec<T>> = self
            .arities
            .iter()
            .map(|&k| vec![T::zero(); k * outputs])
            .collect();
        for (a, &pa) in self.source.iter().enumerate() {
            if pa == T::zero() {
                continue;
            }
            for (w, &q) in rows[a].iter().enumerate() {
                let mass = pa * q;
                if mass == T::zero() {
                    continue;
                }
                w_marginal[w] += mass;
                for (i, table) in var_tables.iter_mut().enumerate() {
                    table[self.var_values[i][a] * outputs + w] += mass;
                }
            }
        }
        ChannelStats {
            outputs,
            w_marginal,
            var_tables,
        }
    }

    /// I(a ; W), needing the rows again on top of the statistics.
    pub fn mutual_information(&self, rows: &[Vec<T>], stats: &ChannelStats<T>) -> T {
        let mut mi = T::zero();
        for (a, &pa) in self.source.iter().enumerate() {
            if pa == T::zero() {
                continue;
            }
            for (w, &q) in rows[a].iter().enumerate() {
                if q > T::zero() && stats.w_marginal[w] > T::zero() {
                    mi += pa * q * (q / stats.w_marginal[w]).log2();
                }
            }
        }
        mi.max(T::zero())
    }

    /// H(a_i | W) = -sum m log2 m + sum r log2 r, from the statistics alone.
    pub fn conditional_entropy(&self, i: usize, stats: &ChannelStats<T>) -> T {
        let mut h = T::zero();
        for &m in &stats.var_tables[i] {
            if m > T::zero() {
                h -= m * m.log2();
            }
        }
        for &r in &stats.w_marginal {
            if r > T::zero() {
                h += r * r.log2();
            }
        }
        h.max(T::zero())
    }

    /// Gradient of I(a ; W) with respect to each q(w | a).
    pub fn mi_gradient(&self, rows: &[Vec<T>], stats: &ChannelStats<T>, grad: &mut [Vec<T>]) {
        let floor = T::min_positive_value();
        for (a, &pa) in self.source.iter().enumerate() {
            for (w, g) in grad[a].iter_mut().enumerate() {
                if pa == T::zero() {
                    *g = T::zero();
                    continue;
                }
                let r = stats.w_marginal[w].max(floor);
                let q = rows[a][w].max(floor);
                *g = pa * (q / r).log2();
            }
        }
    }

    /// Gradient of H(a_i | W) with respect to each q(w | a).
    pub fn h_gradient(&self, i: usize, stats: &ChannelStats<T>, grad: &mut [Vec<T>]) {
        let floor = T::min_positive_value();
        for (a, &pa) in self.source.iter().enumerate() {
            for (w, g) in grad[a].iter_mut().enumerate() {
                if pa == T::zero() {
                    *g = T::zero();
                    continue;
                }
                let r = stats.w_marginal[w].max(floor);
                let m = stats.var_tables[i][self.var_values[i][a] * stats.outputs + w].max(floor);
                *g = -pa * (m / r).log2();
            }
        }
    }
}

/// The dual objective I(a ; W) + sum_i lambda_i H(a_i | W) on channel rows.
pub(crate) struct DualObjective<'a, T: Real> {
    tables: SourceTables<'a, T>,
    lambdas: Vec<T>,
}

impl<'a, T: Real> DualObjective<'a, T> {
    pub fn new(p: &'a JointPmf<T>, lambdas: &[T]) -> Self {
        Self {
            tables: SourceTables::new(p),
            lambdas: lambdas.to_vec(),
        }
    }

    /// Objective value; fills the gradient when `grad` is provided.
    pub fn eval(&self, rows: &[Vec<T>], mut grad: Option<&mut [Vec<T>]>) -> T {
        let stats = self.tables.stats(rows);
        let mut value = self.tables.mutual_information(rows, &stats);
        for (i, &lam) in self.lambdas.iter().enumerate() {
            if lam == T::zero() {
                continue;
            }
            value += lam * self.tables.conditional_entropy(i, &stats);
        }
        if let Some(grad) = grad.as_mut() {
            let floor = T::min_positive_value();
            for (a, &pa) in self.tables.source.iter().enumerate() {
                for (w, g) in grad[a].iter_mut().enumerate() {
                    if pa == T::zero() {
                        *g = T::zero();
                        continue;
                    }
                    let r = stats.w_marginal[w].max(floor);
                    let q = rows[a][w].max(floor);
                    let mut d = (q / r).log2();
                    for (i, &lam) in self.lambdas.iter().enumerate() {
                        if lam == T::zero() {
                            continue;
                        }
                        let m = stats.var_tables[i]
                            [self.tables.var_values[i][a] * stats.outputs + w]
                            .max(floor);
                        d -= lam * (m / r).log2();
                    }
                    *g = pa * d;
                }
            }
        }
        value
    }
}

/// Canonical deterministic candidates: constant, identity (when the cap
/// allows), and the projection onto every variable subset that fits.
pub(crate) fn canonical_candidates<T: Real>(p: &JointPmf<T>, cap: usize) -> Vec<Channel<T>> {
    let n = p.num_vars();
    let cells = p.num_cells();
    let strides = p.strides();
    let mut out = Vec::new();
    out.push(Channel::constant(cells).expect("valid"));
    for mask in 1..(1usize << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub_cells: usize = subset.iter().map(|&i| p.arities()[i]).product();
        if sub_cells > cap {
            continue;
        }
        let map: Vec<usize> = (0..cells)
            .map(|flat| {
                subset.iter().fold(0, |acc, &i| {
                    acc * p.arities()[i] + (flat / strides[i]) % p.arities()[i]
                })
            })
            .collect();
        out.push(Channel::deterministic(sub_cells, &map).expect("valid"));
    }
    out
}

/// Best certified lower bound on T(lambda) from the anchor identities:
/// maximize sum_S mu_S H(a_S) over mu >= 0 with sum mu <= 1 and, for each
/// coordinate i, sum over S containing i of mu_S <= lambda_i. Any feasible
/// mu gives a valid bound by concavity of T plus monotonicity, so the LP
/// optimum is certified.
pub(crate) fn certified_lower_bound<T: Real>(ents: &SubsetEntropies<T>, lambdas: &[T]) -> T {
    let n = ents.num_vars();
    debug_assert_eq!(n, lambdas.len());
    let masks: Vec<usize> = (1..(1usize << n)).collect();
    let c: Vec<T> = masks.iter().map(|&m| ents.of_mask(m)).collect();
    let mut a: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        a.push(
            masks
                .iter()
                .map(|&m| if m >> i & 1 == 1 { T::one() } else { T::zero() })
                .collect(),
        );
    }
    a.push(vec![T::one(); masks.len()]);
    let mut b: Vec<T> = lambdas.iter().map(|&l| l.min(T::one())).collect();
    b.push(T::one());
    simplex_maximize(&c, &a, &b).max(T::zero())
}

/// Brackets T(lambda) for the given source.
pub fn dual_value<T: Real>(
    p: &JointPmf<T>,
    lam: &DualWeights<T>,
    opts: &DualOptions,
) -> Result<DualValue<T>> {
    let n = p.num_vars();
    if lam.len() != n {
        return Err(Error::ArityMismatch(format!(
            "{} weights for {} variables",
            lam.len(),
            n
        )));
    }
    let cells = p.num_cells();
    let cap = opts.cardinality_cap.unwrap_or(cells + n);
    if cap == 0 {
        return Err(Error::InvalidParameter("cardinality cap must be >= 1".into()));
    }
    let ents = SubsetEntropies::compute(p)?;
    let certified_lower = certified_lower_bound(&ents, lam.lambdas());
    let objective = DualObjective::new(p, lam.lambdas());
    let close_enough = T::of(1e-9);

    let mut best: Option<(T, Channel<T>)> = None;
    let consider = |value: T, ch: Channel<T>, best: &mut Option<(T, Channel<T>)>| {
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            *best = Some((value, ch));
        }
    };

    let mut candidates = canonical_candidates(p, cap);
    if cap >= cells {
        candidates.push(Channel::identity(cells)?);
    }
    for ch in candidates {
        let value = objective.eval(ch.rows(), None);
        consider(value, ch, &mut best);
    }

    // The anchors are exact optima; once matched there is nothing to gain.
    let reached_lower = |best: &Option<(T, Channel<T>)>| {
        best.as_ref()
            .is_some_and(|(v, _)| *v <= certified_lower + close_enough)
    };

    if !reached_lower(&best) && feasible_det_sweep(cap, cells, opts.deterministic_budget) {
        let mut map = vec![0usize; cells];
        loop {
            let ch = Channel::deterministic(cap, &map)?;
            let value = objective.eval(ch.rows(), None);
            consider(value, ch, &mut best);
            // Odometer over all cap^cells maps.
            let mut pos = 0;
            loop {
                if pos == cells {
                    break;
                }
                map[pos] += 1;
                if map[pos] < cap {
                    break;
                }
                map[pos] = 0;
                pos += 1;
            }
            if pos == cells {
                break;
            }
        }
    }

    if !reached_lower(&best) {
        let results: Vec<(T, Vec<Vec<T>>)> = (0..opts.restarts as u64)
            .into_par_iter()
            .map(|ridx| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, ridx));
                let init = dirichlet_rows::<T>(&mut rng, cells, cap);
                projected_descent(
                    init,
                    opts.iterations,
                    opts.step_tol,
                    certified_lower + close_enough,
                    |rows, grad| objective.eval(rows, Some(grad)),
                )
            })
            .collect();
        for (_, rows) in results {
            // Revalidate and rescore so the reported upper bound matches the
            // returned witness exactly.
            let ch = Channel::new(rows)?;
            let value = objective.eval(ch.rows(), None);
            consider(value, ch, &mut best);
        }
    }

    let (upper, witness) = best.expect("at least the constant candidate");
    Ok(DualValue {
        upper,
        witness,
        certified_lower,
    })
}

fn feasible_det_sweep(cap: usize, cells: usize, budget: u64) -> bool {
    let mut total: u64 = 1;
    for _ in 0..cells {
        total = match total.checked_mul(cap as u64) {
            Some(t) if t <= budget => t,
            _ => return false,
        };
    }
    true
}
