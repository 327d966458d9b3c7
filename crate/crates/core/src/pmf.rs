//! Finite discrete joint distributions and conditional channels.
//!
//! A [`JointPmf`] stores p(a_1, ..., a_N) as a flat array in row-major order
//! with the **last variable fastest**; this layout is also the serialized
//! order, so file I/O is bit-exact with respect to it. A [`Channel`] stores
//! a conditional distribution p(w | input) as one stochastic row per
//! flattened input symbol.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Unit-sum validation tolerance for pmfs, channel rows and box columns.
/// Loose enough to accept round-tripped decimal JSON.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Entries below this magnitude are treated as exact zeros; slightly
/// negative entries above `-ZERO_CLAMP` are clamped to zero on construction.
pub const ZERO_CLAMP: f64 = 1e-15;

/// Minimum probability an event must carry to be conditioned on.
pub const NULL_EVENT_TOL: f64 = 1e-12;

/// Finite discrete joint distribution over one or more variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJointPmf<T>")]
pub struct JointPmf<T: Real = f64> {
    arities: Vec<usize>,
    probs: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawJointPmf<T> {
    arities: Vec<usize>,
    probs: Vec<T>,
    #[serde(default)]
    names: Option<Vec<String>>,
}

impl<T: Real> TryFrom<RawJointPmf<T>> for JointPmf<T> {
    type Error = Error;

    fn try_from(raw: RawJointPmf<T>) -> Result<Self> {
        let pmf = JointPmf::new(raw.arities, raw.probs)?;
        match raw.names {
            Some(names) => pmf.with_names(names),
            None => Ok(pmf),
        }
    }
}

impl<T: Real> JointPmf<T> {
    /// Validates and constructs a joint pmf.
    ///
    /// Entries in `(-1e-15, 0)` are clamped to zero; anything more negative,
    /// a length mismatch, or a total mass off by more than `1e-9` is an
    /// error.
    pub fn new(arities: Vec<usize>, probs: Vec<T>) -> Result<Self> {
        if arities.is_empty() {
            return Err(Error::InvalidPmf("at least one variable required".into()));
        }
        if arities.contains(&0) {
            return Err(Error::InvalidPmf("every arity must be >= 1".into()));
        }
        let cells: usize = arities.iter().product();
        if probs.len() != cells {
            return Err(Error::InvalidPmf(format!(
                "expected {} probabilities for arities {:?}, got {}",
                cells,
                arities,
                probs.len()
            )));
        }
        let mut probs = probs;
        let clamp = T::of(ZERO_CLAMP);
        for p in &mut probs {
            if !p.is_finite() {
                return Err(Error::InvalidPmf("non-finite probability".into()));
            }
            if *p < T::zero() {
                if *p < -clamp {
                    return Err(Error::InvalidPmf(format!("negative probability {}", p)));
                }
                *p = T::zero();
            }
            if *p > T::one() {
                if *p > T::one() + T::of(NORMALIZATION_TOL) {
                    return Err(Error::InvalidPmf(format!("probability {} exceeds 1", p)));
                }
                *p = T::one();
            }
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::of(NORMALIZATION_TOL) {
            return Err(Error::InvalidPmf(format!("probabilities sum to {}", total)));
        }
        Ok(Self {
            arities,
            probs,
            names: None,
        })
    }

    /// Attaches one name per variable.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.arities.len() {
            return Err(Error::InvalidPmf(format!(
                "{} names for {} variables",
                names.len(),
                self.arities.len()
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    /// Uniform distribution over the product alphabet.
    pub fn uniform(arities: &[usize]) -> Result<Self> {
        if arities.is_empty() || arities.contains(&0) {
            return Err(Error::InvalidPmf("arities must be nonempty and >= 1".into()));
        }
        let cells: usize = arities.iter().product();
        let p = T::one() / T::of_usize(cells);
        Ok(Self {
            arities: arities.to_vec(),
            probs: vec![p; cells],
            names: None,
        })
    }

    /// `n` independent uniform bits.
    pub fn uniform_bits(n: usize) -> Result<Self> {
        Self::uniform(&vec![2; n])
    }

    /// Single bit with P(1) = `q`.
    pub fn bernoulli(q: T) -> Result<Self> {
        if q < T::zero() || q > T::one() {
            return Err(Error::InvalidParameter(format!("bernoulli q = {} outside [0,1]", q)));
        }
        Self::new(vec![2], vec![T::one() - q, q])
    }

    /// Doubly symmetric binary source: a uniform bit and a copy flipped
    /// independently with probability `rho`.
    pub fn doubly_symmetric_binary(rho: T) -> Result<Self> {
        if rho < T::zero() || rho > T::of(0.5) {
            return Err(Error::InvalidParameter(format!("dsbs rho = {} outside [0,1/2]", rho)));
        }
        let half = T::of(0.5);
        let agree = half * (T::one() - rho);
        let flip = half * rho;
        Self::new(vec![2, 2], vec![agree, flip, flip, agree])
    }

    pub fn num_vars(&self) -> usize {
        self.arities.len()
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Number of cells in the product alphabet.
    pub fn num_cells(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Probability of the outcome with the given per-variable values.
    pub fn prob(&self, values: &[usize]) -> T {
        self.probs[self.flat_index(values)]
    }

    /// Row-major strides (last variable fastest).
    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.arities)
    }

    /// Flat index of a full outcome.
    pub fn flat_index(&self, values: &[usize]) -> usize {
        debug_assert_eq!(values.len(), self.arities.len());
        let mut idx = 0;
        for (v, a) in values.iter().zip(&self.arities) {
            debug_assert!(v < a);
            idx = idx * a + v;
        }
        idx
    }

    /// Per-variable values of a flat index.
    pub fn values_of(&self, mut flat: usize) -> Vec<usize> {
        let mut values = vec![0; self.arities.len()];
        for i in (0..self.arities.len()).rev() {
            values[i] = flat % self.arities[i];
            flat /= self.arities[i];
        }
        values
    }

    fn check_vars(&self, vars: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.arities.len()];
        for &v in vars {
            if v >= self.arities.len() {
                return Err(Error::VarIndexOutOfRange {
                    index: v,
                    count: self.arities.len(),
                });
            }
            if seen[v] {
                return Err(Error::DuplicateVar(v));
            }
            seen[v] = true;
        }
        Ok(())
    }

    pub(crate) fn check_nonempty_vars(&self, vars: &[usize]) -> Result<()> {
        if vars.is_empty() {
            return Err(Error::EmptyVarSet);
        }
        self.check_vars(vars)
    }

    pub(crate) fn check_disjoint(a: &[usize], b: &[usize]) -> Result<()> {
        for &x in a {
            if b.contains(&x) {
                return Err(Error::OverlappingVars(x));
            }
        }
        Ok(())
    }

    /// Marginal probability table over `vars`, in the order given.
    pub(crate) fn marginal_table(&self, vars: &[usize]) -> Vec<T> {
        let sub_arities: Vec<usize> = vars.iter().map(|&v| self.arities[v]).collect();
        let cells: usize = sub_arities.iter().product();
        let mut table = vec![T::zero(); cells];
        let strides = self.strides();
        for (flat, &p) in self.probs.iter().enumerate() {
            if p == T::zero() {
                continue;
            }
            let mut idx = 0;
            for (&v, &a) in vars.iter().zip(&sub_arities) {
                idx = idx * a + (flat / strides[v]) % self.arities[v];
            }
            table[idx] += p;
        }
        table
    }

    /// Marginal distribution on `keep`, with variables in the order given.
    pub fn marginalize(&self, keep: &[usize]) -> Result<JointPmf<T>> {
        self.check_nonempty_vars(keep)?;
        let arities: Vec<usize> = keep.iter().map(|&v| self.arities[v]).collect();
        let probs = self.marginal_table(keep);
        let names = self
            .names
            .as_ref()
            .map(|ns| keep.iter().map(|&v| ns[v].clone()).collect());
        Ok(JointPmf {
            arities,
            probs,
            names,
        })
    }

    /// Conditions on the event `variable = value`, keeping the variable in
    /// place as a point mass. Errors if the event has probability below
    /// `1e-12`.
    pub fn condition_on_event(&self, var: usize, value: usize) -> Result<JointPmf<T>> {
        self.check_vars(&[var])?;
        if value >= self.arities[var] {
            return Err(Error::InvalidParameter(format!(
                "value {} out of range for variable {} (arity {})",
                value, var, self.arities[var]
            )));
        }
        let stride = self.strides()[var];
        let arity = self.arities[var];
        let mut mass = T::zero();
        for (flat, &p) in self.probs.iter().enumerate() {
            if (flat / stride) % arity == value {
                mass += p;
            }
        }
        if mass <= T::of(NULL_EVENT_TOL) {
            return Err(Error::NullEvent {
                var,
                value,
                prob: mass.as_f64(),
            });
        }
        let mut probs = vec![T::zero(); self.probs.len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            if (flat / stride) % arity == value {
                probs[flat] = p / mass;
            }
        }
        Ok(JointPmf {
            arities: self.arities.clone(),
            probs,
            names: self.names.clone(),
        })
    }

    /// Tensor product of independent distributions, concatenating variables.
    pub fn product_of(parts: &[JointPmf<T>]) -> Result<JointPmf<T>> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("product of zero pmfs".into()));
        }
        let mut arities = Vec::new();
        for part in parts {
            arities.extend_from_slice(&part.arities);
        }
        let cells: usize = arities.iter().product();
        let mut probs = vec![T::one(); cells];
        let strides = strides_of(&arities);
        let mut offset = 0;
        for part in parts {
            let part_strides = part.strides();
            for (flat, p) in probs.iter_mut().enumerate() {
                let mut part_flat = 0;
                for (j, &a) in part.arities.iter().enumerate() {
                    part_flat += ((flat / strides[offset + j]) % a) * part_strides[j];
                }
                *p *= part.probs[part_flat];
            }
            offset += part.arities.len();
        }
        let names = if parts.iter().all(|p| p.names.is_some()) {
            Some(
                parts
                    .iter()
                    .flat_map(|p| p.names.as_ref().unwrap().clone())
                    .collect(),
            )
        } else {
            None
        };
        Ok(JointPmf {
            arities,
            probs,
            names,
        })
    }

    /// Appends one variable distributed per `channel` applied to the
    /// flattened value of `conditioning` (in the order given, last fastest).
    pub fn extend_with_channel(&self, channel: &Channel<T>, conditioning: &[usize]) -> Result<JointPmf<T>> {
        self.check_nonempty_vars(conditioning)?;
        let cond_cells: usize = conditioning.iter().map(|&v| self.arities[v]).product();
        if channel.input_arity() != cond_cells {
            return Err(Error::ArityMismatch(format!(
                "channel input arity {} but conditioning alphabet has {} symbols",
                channel.input_arity(),
                cond_cells
            )));
        }
        let mut arities = self.arities.clone();
        arities.push(channel.output_arity());
        let strides = self.strides();
        let out = channel.output_arity();
        let mut probs = vec![T::zero(); self.probs.len() * out];
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut cond_flat = 0;
            for &v in conditioning {
                cond_flat = cond_flat * self.arities[v] + (flat / strides[v]) % self.arities[v];
            }
            let row = channel.row(cond_flat);
            for (w, &q) in row.iter().enumerate() {
                probs[flat * out + w] = p * q;
            }
        }
        let names = self.names.as_ref().map(|ns| {
            let mut ns = ns.clone();
            ns.push("w".into());
            ns
        });
        Ok(JointPmf {
            arities,
            probs,
            names,
        })
    }

    /// True when the joint factorizes into the product of its single-variable
    /// marginals within `tol` (per-cell absolute difference).
    pub fn is_product(&self, tol: T) -> bool {
        let marginals: Vec<Vec<T>> = (0..self.num_vars()).map(|v| self.marginal_table(&[v])).collect();
        let strides = self.strides();
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut q = T::one();
            for (v, m) in marginals.iter().enumerate() {
                q *= m[(flat / strides[v]) % self.arities[v]];
            }
            if (p - q).abs() > tol {
                return false;
            }
        }
        true
    }
}

pub(crate) fn strides_of(arities: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; arities.len()];
    for i in (0..arities.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * arities[i + 1];
    }
    strides
}

/// Conditional distribution p(w | input), one stochastic row per flattened
/// input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel<T>")]
pub struct Channel<T: Real = f64> {
    input_arity: usize,
    output_arity: usize,
    rows: Vec<Vec<T>>,
}

#[derive(Deserialize)]
struct RawChannel<T> {
    input_arity: usize,
    output_arity: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Real> TryFrom<RawChannel<T>> for Channel<T> {
    type Error = Error;

    fn try_from(raw: RawChannel<T>) -> Result<Self> {
        let ch = Channel::new(raw.rows)?;
        if ch.input_arity != raw.input_arity || ch.output_arity != raw.output_arity {
            return Err(Error::InvalidChannel(format!(
                "declared arities {}x{} do not match rows {}x{}",
                raw.input_arity, raw.output_arity, ch.input_arity, ch.output_arity
            )));
        }
        Ok(ch)
    }
}

impl<T: Real> Channel<T> {
    /// Validates and constructs a channel from its stochastic rows.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidChannel("at least one row required".into()));
        }
        let output_arity = rows[0].len();
        if output_arity == 0 {
            return Err(Error::InvalidChannel("rows must be nonempty".into()));
        }
        let mut rows = rows;
        let clamp = T::of(ZERO_CLAMP);
        for (r, row) in rows.iter_mut().enumerate() {
            if row.len() != output_arity {
                return Err(Error::InvalidChannel(format!(
                    "row {} has {} entries, expected {}",
                    r,
                    row.len(),
                    output_arity
                )));
            }
            for p in row.iter_mut() {
                if !p.is_finite() {
                    return Err(Error::InvalidChannel(format!("non-finite entry in row {}", r)));
                }
                if *p < T::zero() {
                    if *p < -clamp {
                        return Err(Error::InvalidChannel(format!("negative entry {} in row {}", p, r)));
                    }
                    *p = T::zero();
                }
                if *p > T::one() {
                    if *p > T::one() + T::of(NORMALIZATION_TOL) {
                        return Err(Error::InvalidChannel(format!("entry {} > 1 in row {}", p, r)));
                    }
                    *p = T::one();
                }
            }
            let total: T = row.iter().copied().sum();
            if (total - T::one()).abs() > T::of(NORMALIZATION_TOL) {
                return Err(Error::InvalidChannel(format!("row {} sums to {}", r, total)));
            }
        }
        Ok(Self {
            input_arity: rows.len(),
            output_arity,
            rows,
        })
    }

    /// Deterministic channel w = map[input].
    pub fn deterministic(output_arity: usize, map: &[usize]) -> Result<Self> {
        if output_arity == 0 {
            return Err(Error::InvalidChannel("output arity must be >= 1".into()));
        }
        let mut rows = Vec::with_capacity(map.len());
        for (r, &w) in map.iter().enumerate() {
            if w >= output_arity {
                return Err(Error::InvalidChannel(format!(
                    "row {} maps to {} but output arity is {}",
                    r, w, output_arity
                )));
            }
            let mut row = vec![T::zero(); output_arity];
            row[w] = T::one();
            rows.push(row);
        }
        Self::new(rows)
    }

    /// Identity channel on an alphabet of size `n`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::deterministic(n, &(0..n).collect::<Vec<_>>())
    }

    /// Channel that ignores its input (output alphabet of size one).
    pub fn constant(input_arity: usize) -> Result<Self> {
        Self::deterministic(1, &vec![0; input_arity])
    }

    /// Binary symmetric channel with flip probability `delta`.
    pub fn binary_symmetric(delta: T) -> Result<Self> {
        if delta < T::zero() || delta > T::one() {
            return Err(Error::InvalidParameter(format!("bsc delta = {} outside [0,1]", delta)));
        }
        Self::new(vec![
            vec![T::one() - delta, delta],
            vec![delta, T::one() - delta],
        ])
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn output_arity(&self) -> usize {
        self.output_arity
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.rows[r]
    }
}
