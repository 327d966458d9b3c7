//! Sweep harness: runs grids of (source, strategy) cells, places every
//! induced rate point relative to the rate region, and emits reproducible
//! machine-readable reports. Also hosts the classical-protocol consistency
//! suite.
//!
//! Everything here is `f64`; the generic core types are instantiated at
//! their default scalar.

pub mod report;

use std::sync::atomic::{AtomicBool, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::BipartiteBox;
use crate::error::{Error, Result};
use crate::game::{
    evaluate_ic, run_box_strategy, run_classical_strategy, BoxStrategy, ClassicalStrategy,
    ICEvaluation,
};
use crate::gray_wyner::{
    membership_test, MembershipOptions, MembershipVerdict, RatePoint,
};
use crate::pmf::JointPmf;

pub use crate::gray_wyner::derive_seed;

/// Largest string the game sweeps play (N = 2^k <= 8).
pub const MAX_GAME_BITS: usize = 8;

const CLASSICAL_ETA: f64 = 0.5;
const QUANTUM_ETA: f64 = std::f64::consts::FRAC_1_SQRT_2;
const REGIME_TOL: f64 = 1e-12;

/// Source grids a sweep can range over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SourceFamily {
    /// One product source Bernoulli(q)^n per grid value.
    BernoulliProductGrid { qs: Vec<f64>, n: usize },
    /// Doubly symmetric binary sources, one per flip probability.
    DsbsGrid { rhos: Vec<f64> },
    /// Explicit list of sources.
    Explicit { pmfs: Vec<JointPmf> },
    /// Seeded random binary sources (over the 2^k game variables).
    Random { count: usize, seed: u64 },
}

/// Strategy grids a sweep can range over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StrategyFamily {
    /// The perfect PR box at every level.
    Pr,
    /// One homogeneous isotropic-box strategy per eta.
    IsotropicGrid { etas: Vec<f64> },
    /// Every deterministic classical protocol with the given message size.
    ClassicalEnumeration {
        message_bits: u32,
        #[serde(default = "default_enumeration_budget")]
        budget: u64,
    },
}

fn default_enumeration_budget() -> u64 {
    100_000
}

/// Membership-search knobs carried by the sweep config (per-cell seeds are
/// derived from the master seed, not configured here).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipSettings {
    pub restarts: usize,
    pub iterations: usize,
    pub cardinality_cap: Option<usize>,
    pub fractional_certificates: bool,
}

impl Default for MembershipSettings {
    fn default() -> Self {
        Self {
            restarts: 16,
            iterations: 300,
            cardinality_cap: None,
            fractional_certificates: true,
        }
    }
}

impl MembershipSettings {
    fn to_options(&self, seed: u64) -> MembershipOptions<f64> {
        MembershipOptions {
            restarts: self.restarts,
            iterations: self.iterations,
            cardinality_cap: self.cardinality_cap,
            seed,
            fractional_certificates: self.fractional_certificates,
            extra_witnesses: Vec::new(),
        }
    }
}

/// Full sweep specification; serializable so runs are reproducible from the
/// config file alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub sources: SourceFamily,
    pub strategies: StrategyFamily,
    pub k: usize,
    #[serde(default)]
    pub membership: MembershipSettings,
    pub master_seed: u64,
    /// Default report directory, overridable on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

fn default_schema_version() -> u32 {
    1
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != 1 {
            return Err(Error::InvalidConfig(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        let n = 1usize << self.k;
        if n > MAX_GAME_BITS {
            return Err(Error::InvalidConfig(format!(
                "2^k = {} exceeds the supported maximum of {}",
                n, MAX_GAME_BITS
            )));
        }
        match &self.sources {
            SourceFamily::BernoulliProductGrid { qs, n: sn } => {
                if qs.is_empty() {
                    return Err(Error::InvalidConfig("empty q grid".into()));
                }
                if qs.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
                    return Err(Error::InvalidConfig("q outside [0,1]".into()));
                }
                if *sn != n {
                    return Err(Error::InvalidConfig(format!(
                        "source has {} variables but k = {} needs {}",
                        sn, self.k, n
                    )));
                }
            }
            SourceFamily::DsbsGrid { rhos } => {
                if rhos.is_empty() {
                    return Err(Error::InvalidConfig("empty rho grid".into()));
                }
                if rhos.iter().any(|&r| !(0.0..=0.5).contains(&r)) {
                    return Err(Error::InvalidConfig("rho outside [0,1/2]".into()));
                }
                if n != 2 {
                    return Err(Error::InvalidConfig(
                        "dsbs sources have 2 variables; use k = 1".into(),
                    ));
                }
            }
            SourceFamily::Explicit { pmfs } => {
                if pmfs.is_empty() {
                    return Err(Error::InvalidConfig("empty source list".into()));
                }
                for p in pmfs {
                    if p.num_vars() != n || p.arities().iter().any(|&a| a != 2) {
                        return Err(Error::InvalidConfig(format!(
                            "explicit sources must have {} binary variables",
                            n
                        )));
                    }
                }
            }
            SourceFamily::Random { count, .. } => {
                if *count == 0 {
                    return Err(Error::InvalidConfig("random source count must be >= 1".into()));
                }
            }
        }
        match &self.strategies {
            StrategyFamily::IsotropicGrid { etas } => {
                if etas.is_empty() {
                    return Err(Error::InvalidConfig("empty eta grid".into()));
                }
                if etas.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
                    return Err(Error::InvalidConfig("eta outside [0,1]".into()));
                }
            }
            StrategyFamily::Pr => {}
            StrategyFamily::ClassicalEnumeration { message_bits, .. } => {
                if *message_bits == 0 {
                    return Err(Error::InvalidConfig("message_bits must be >= 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Regime label of a strategy, from the isotropic noise parameter (box
/// strategies) or by definition (classical protocols).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Classical,
    QuantumFeasible,
    Superquantum,
}

impl Regime {
    pub fn from_eta(eta: f64) -> Self {
        if eta <= CLASSICAL_ETA + REGIME_TOL {
            Regime::Classical
        } else if eta <= QUANTUM_ETA + REGIME_TOL {
            Regime::QuantumFeasible
        } else {
            Regime::Superquantum
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::Classical => "classical",
            Regime::QuantumFeasible => "quantum_feasible",
            Regime::Superquantum => "superquantum",
        }
    }
}

/// One evaluated (source, strategy) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    pub source_id: String,
    pub source_params: serde_json::Value,
    pub source_correlated: bool,
    pub strategy_id: String,
    pub eta: Option<f64>,
    pub k: usize,
    pub evaluation: ICEvaluation,
    pub rate_point: RatePoint,
    pub verdict: MembershipVerdict,
    pub eq1_violated: bool,
    pub eq2_violated: bool,
    pub regime: Regime,
    /// Outside verdict within the quantum-feasible envelope on a correlated
    /// source: the sweep's reportable finding.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub inside: usize,
    pub outside: usize,
    pub undetermined: usize,
}

impl VerdictCounts {
    fn add(&mut self, v: &MembershipVerdict) {
        match v {
            MembershipVerdict::Inside { .. } => self.inside += 1,
            MembershipVerdict::Outside { .. } => self.outside += 1,
            MembershipVerdict::Undetermined { .. } => self.undetermined += 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub total: usize,
    pub classical: VerdictCounts,
    pub quantum_feasible: VerdictCounts,
    pub superquantum: VerdictCounts,
    pub eq1_violations: usize,
    pub eq2_violations: usize,
    pub flagged_indices: Vec<usize>,
}

impl SweepSummary {
    pub fn from_records(records: &[SweepRecord]) -> Self {
        let mut s = SweepSummary {
            total: records.len(),
            ..Default::default()
        };
        for r in records {
            match r.regime {
                Regime::Classical => s.classical.add(&r.verdict),
                Regime::QuantumFeasible => s.quantum_feasible.add(&r.verdict),
                Regime::Superquantum => s.superquantum.add(&r.verdict),
            }
            s.eq1_violations += r.eq1_violated as usize;
            s.eq2_violations += r.eq2_violated as usize;
            if r.flagged {
                s.flagged_indices.push(r.index);
            }
        }
        s
    }

    pub fn has_flags(&self) -> bool {
        !self.flagged_indices.is_empty()
    }
}

/// Sweep output: config echo, per-cell records in cell order, and counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub config: SweepConfig,
    /// True when the run was interrupted and the records are a subset.
    pub partial: bool,
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

struct SourceCell {
    id: String,
    params: serde_json::Value,
    pmf: JointPmf,
    correlated: bool,
}

enum StrategyKind {
    Boxes { eta: Option<f64>, strategy: BoxStrategy },
    Classical { strategy: ClassicalStrategy },
}

struct StrategyCell {
    id: String,
    kind: StrategyKind,
}

fn expand_sources(cfg: &SweepConfig) -> Result<Vec<SourceCell>> {
    let n = 1usize << cfg.k;
    let cells = match &cfg.sources {
        SourceFamily::BernoulliProductGrid { qs, .. } => qs
            .iter()
            .map(|&q| {
                let bit = JointPmf::bernoulli(q)?;
                let pmf = JointPmf::product_of(&vec![bit; n])?;
                Ok(SourceCell {
                    id: format!("bernoulli-product:{q}"),
                    params: serde_json::json!({ "q": q, "n": n }),
                    pmf,
                    correlated: false,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        SourceFamily::DsbsGrid { rhos } => rhos
            .iter()
            .map(|&rho| {
                Ok(SourceCell {
                    id: format!("dsbs:{rho}"),
                    params: serde_json::json!({ "rho": rho }),
                    pmf: JointPmf::doubly_symmetric_binary(rho)?,
                    correlated: rho < 0.5 - 1e-12,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        SourceFamily::Explicit { pmfs } => pmfs
            .iter()
            .enumerate()
            .map(|(i, pmf)| SourceCell {
                id: format!("explicit:{i}"),
                params: serde_json::json!({ "index": i }),
                correlated: !pmf.is_product(1e-9),
                pmf: pmf.clone(),
            })
            .collect(),
        SourceFamily::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*count)
                .map(|i| {
                    let cells = 1usize << n;
                    let mut probs: Vec<f64> =
                        (0..cells).map(|_| -(rng.random::<f64>().ln())).collect();
                    let total: f64 = probs.iter().sum();
                    for p in &mut probs {
                        *p /= total;
                    }
                    let pmf = JointPmf::new(vec![2; n], probs)?;
                    Ok(SourceCell {
                        id: format!("random:{i}"),
                        params: serde_json::json!({ "index": i, "seed": seed }),
                        correlated: !pmf.is_product(1e-9),
                        pmf,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(cells)
}

fn expand_strategies(cfg: &SweepConfig) -> Result<Vec<StrategyCell>> {
    let n = 1usize << cfg.k;
    match &cfg.strategies {
        StrategyFamily::Pr => Ok(vec![StrategyCell {
            id: "box:pr".into(),
            kind: StrategyKind::Boxes {
                eta: Some(1.0),
                strategy: BoxStrategy::homogeneous(cfg.k, BipartiteBox::pr())?,
            },
        }]),
        StrategyFamily::IsotropicGrid { etas } => etas
            .iter()
            .map(|&eta| {
                Ok(StrategyCell {
                    id: format!("box:isotropic:{eta}"),
                    kind: StrategyKind::Boxes {
                        eta: Some(eta),
                        strategy: BoxStrategy::homogeneous(cfg.k, BipartiteBox::isotropic(eta)?)?,
                    },
                })
            })
            .collect(),
        StrategyFamily::ClassicalEnumeration {
            message_bits,
            budget,
        } => {
            let m = 1usize << message_bits;
            let a_cells = 1usize << n;
            count_deterministic_protocols(m, a_cells, n)
                .filter(|&c| c <= *budget)
                .ok_or_else(|| {
                    Error::BudgetExceeded(format!(
                        "deterministic enumeration with M = {} exceeds budget {}",
                        m, budget
                    ))
                })?;
            let mut out = Vec::new();
            let alice_count = (m as u64).pow(a_cells as u32);
            let bob_count = 1u64 << (m * n);
            for ai in 0..alice_count {
                let alice_map = digits(ai, m, a_cells);
                for bi in 0..bob_count {
                    let bob_map = digits(bi, 2, m * n);
                    let strategy = ClassicalStrategy::deterministic(
                        vec![2; n],
                        m,
                        alice_map.clone(),
                        bob_map,
                    )?;
                    out.push(StrategyCell {
                        id: format!("classical:det:{ai}:{bi}"),
                        kind: StrategyKind::Classical { strategy },
                    });
                }
            }
            Ok(out)
        }
    }
}

/// Base-`base` digits of `value`, least significant first, `len` of them.
fn digits(mut value: u64, base: usize, len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((value % base as u64) as usize);
        value /= base as u64;
    }
    out
}

fn count_deterministic_protocols(m: usize, a_cells: usize, n: usize) -> Option<u64> {
    let alice = (m as u64).checked_pow(a_cells as u32)?;
    if m * n >= 63 {
        return None;
    }
    let bob = 1u64 << (m * n);
    alice.checked_mul(bob)
}

fn evaluate_cell(
    cfg: &SweepConfig,
    index: usize,
    source: &SourceCell,
    strategy: &StrategyCell,
) -> Result<SweepRecord> {
    let (joint, eta, extra_witnesses) = match &strategy.kind {
        StrategyKind::Boxes { eta, strategy } => {
            (run_box_strategy(&source.pmf, strategy)?, *eta, Vec::new())
        }
        StrategyKind::Classical { strategy } => (
            run_classical_strategy(&source.pmf, strategy)?,
            None,
            vec![strategy.message_and_seed_channel()?],
        ),
    };
    let evaluation = evaluate_ic(&joint, &source.pmf)?;
    let rate_point = evaluation.induced_rate_point();
    let mut opts = cfg
        .membership
        .to_options(derive_seed(cfg.master_seed, index as u64));
    opts.extra_witnesses = extra_witnesses;
    let verdict = membership_test(&source.pmf, &rate_point, &opts)?;
    let regime = match eta {
        Some(e) => Regime::from_eta(e),
        None => Regime::Classical,
    };
    let flagged =
        verdict.is_outside() && regime != Regime::Superquantum && source.correlated;
    Ok(SweepRecord {
        index,
        source_id: source.id.clone(),
        source_params: source.params.clone(),
        source_correlated: source.correlated,
        strategy_id: strategy.id.clone(),
        eta,
        k: cfg.k,
        eq1_violated: evaluation.eq1_violated,
        eq2_violated: evaluation.eq2_violated,
        evaluation,
        rate_point,
        verdict,
        regime,
        flagged,
    })
}

/// Runs every (source, strategy) cell. Cells are evaluated in parallel with
/// per-cell seeds derived from the master seed, so the records are
/// reproducible bit-for-bit regardless of scheduling; they are returned in
/// cell order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    run_sweep_with_cancel(cfg, &AtomicBool::new(false))
}

/// [`run_sweep`] with a cooperative cancellation flag: once raised, pending
/// cells are skipped and the report is marked `partial` with the completed
/// records flushed.
pub fn run_sweep_with_cancel(cfg: &SweepConfig, cancel: &AtomicBool) -> Result<SweepReport> {
    cfg.validate()?;
    let sources = expand_sources(cfg)?;
    let strategies = expand_strategies(cfg)?;
    let cells: Vec<(usize, &SourceCell, &StrategyCell)> = sources
        .iter()
        .flat_map(|src| strategies.iter().map(move |st| (src, st)))
        .enumerate()
        .map(|(i, (src, st))| (i, src, st))
        .collect();
    let outcomes: Vec<Option<Result<SweepRecord>>> = cells
        .par_iter()
        .map(|&(index, source, strategy)| {
            if cancel.load(Ordering::Relaxed) {
                None
            } else {
                Some(evaluate_cell(cfg, index, source, strategy))
            }
        })
        .collect();
    let mut partial = false;
    let mut records = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        match outcome {
            Some(record) => records.push(record?),
            None => partial = true,
        }
    }
    let summary = SweepSummary::from_records(&records);
    Ok(SweepReport {
        schema_version: cfg.schema_version,
        config: cfg.clone(),
        partial,
        records,
        summary,
    })
}

/// Options for the classical-world consistency suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalSuiteOptions {
    pub message_bits: u32,
    pub seed_arity_cap: usize,
    pub mixture_trials: usize,
    pub check_membership: bool,
    pub budget: u64,
    pub seed: u64,
    pub membership: MembershipSettings,
}

impl Default for ClassicalSuiteOptions {
    fn default() -> Self {
        Self {
            message_bits: 1,
            seed_arity_cap: 4,
            mixture_trials: 200,
            check_membership: true,
            budget: 10_000_000,
            seed: 0,
            membership: MembershipSettings::default(),
        }
    }
}

/// One failed consistency check; an empty list is the expected outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalViolation {
    pub protocol: String,
    pub kind: String,
    pub eq2_lhs: f64,
    pub eq2_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSuiteReport {
    pub deterministic_protocols: u64,
    pub mixture_trials: usize,
    /// Smallest slack of the cut-set inequality seen across all protocols.
    pub min_eq2_slack: f64,
    pub violations: Vec<ClassicalViolation>,
}

/// Exhaustively enumerates deterministic protocols (and samples seeded
/// shared-randomness mixtures) on `source`, collecting every case where the
/// cut-set inequality fails or the induced point is certified outside the
/// region. The expected result is an empty violation list.
pub fn enumerate_classical_suite(
    source: &JointPmf,
    opts: &ClassicalSuiteOptions,
) -> Result<ClassicalSuiteReport> {
    if source.arities().iter().any(|&a| a != 2) {
        return Err(Error::InvalidParameter(
            "classical suite expects a binary source".into(),
        ));
    }
    let n = source.num_vars();
    let a_cells = source.num_cells();
    let m = 1usize << opts.message_bits;
    let total = count_deterministic_protocols(m, a_cells, n)
        .filter(|&c| c <= opts.budget)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "M^{} * 2^{} deterministic protocols exceed budget {}",
                a_cells,
                m * n,
                opts.budget
            ))
        })?;

    let alice_count = (m as u64).pow(a_cells as u32);
    let bob_count = 1u64 << (m * n);
    let pairs: Vec<(u64, u64)> = (0..alice_count)
        .flat_map(|ai| (0..bob_count).map(move |bi| (ai, bi)))
        .collect();
    let checked: Vec<(f64, Option<ClassicalViolation>)> = pairs
        .par_iter()
        .map(|&(ai, bi)| {
            let strategy = ClassicalStrategy::deterministic(
                vec![2; n],
                m,
                digits(ai, m, a_cells),
                digits(bi, 2, m * n),
            )
            .expect("enumerated maps are total");
            check_classical_protocol(
                source,
                &strategy,
                format!("det:{ai}:{bi}"),
                opts,
                derive_seed(opts.seed, ai ^ (bi << 32)),
            )
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut min_eq2_slack = f64::INFINITY;
    let mut violations = Vec::new();
    for (slack, violation) in checked {
        min_eq2_slack = min_eq2_slack.min(slack);
        violations.extend(violation);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for t in 0..opts.mixture_trials {
        let seed_arity = if opts.seed_arity_cap >= 2 {
            rng.random_range(2..=opts.seed_arity_cap)
        } else {
            1
        };
        let mut weights: Vec<f64> = (0..seed_arity)
            .map(|_| -(rng.random::<f64>().ln()))
            .collect();
        let total_w: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total_w;
        }
        let randomness = JointPmf::new(vec![seed_arity], weights)?;
        let alice_map: Vec<usize> = (0..a_cells * seed_arity)
            .map(|_| rng.random_range(0..m))
            .collect();
        let bob_map: Vec<usize> = (0..m * n * seed_arity)
            .map(|_| rng.random_range(0..2usize))
            .collect();
        let strategy = ClassicalStrategy::new(vec![2; n], randomness, m, alice_map, bob_map)?;
        let (slack, violation) = check_classical_protocol(
            source,
            &strategy,
            format!("mix:{t}"),
            opts,
            derive_seed(opts.seed, 0x5eed_0000 + t as u64),
        )?;
        min_eq2_slack = min_eq2_slack.min(slack);
        violations.extend(violation);
    }

    Ok(ClassicalSuiteReport {
        deterministic_protocols: total,
        mixture_trials: opts.mixture_trials,
        min_eq2_slack,
        violations,
    })
}

fn check_classical_protocol(
    source: &JointPmf,
    strategy: &ClassicalStrategy,
    protocol: String,
    opts: &ClassicalSuiteOptions,
    membership_seed: u64,
) -> Result<(f64, Option<ClassicalViolation>)> {
    let joint = run_classical_strategy(source, strategy)?;
    let evaluation = evaluate_ic(&joint, source)?;
    let slack = evaluation.eq2_lhs - evaluation.eq2_rhs;
    if evaluation.eq2_violated {
        return Ok((
            slack,
            Some(ClassicalViolation {
                protocol,
                kind: "eq2".into(),
                eq2_lhs: evaluation.eq2_lhs,
                eq2_rhs: evaluation.eq2_rhs,
            }),
        ));
    }
    if opts.check_membership {
        let mut mopts = opts.membership.to_options(membership_seed);
        mopts.extra_witnesses = vec![strategy.message_and_seed_channel()?];
        let verdict = membership_test(source, &evaluation.induced_rate_point(), &mopts)?;
        if verdict.is_outside() {
            return Ok((
                slack,
                Some(ClassicalViolation {
                    protocol,
                    kind: "membership_outside".into(),
                    eq2_lhs: evaluation.eq2_lhs,
                    eq2_rhs: evaluation.eq2_rhs,
                }),
            ));
        }
    }
    Ok((slack, None))
}
