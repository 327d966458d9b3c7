//! Parsing of the compact source/box/strategy specs the subcommands accept,
//! plus JSON file loading with path context in errors.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;

use icgw_core::boxes::BipartiteBox;
use icgw_core::game::{BoxStrategy, ClassicalStrategy};
use icgw_core::pmf::JointPmf;

pub fn load_json<T: DeserializeOwned>(path: &str) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
}

/// Accepts `uniform:N`, `dsbs:RHO`, `bernoulli-product:q1,q2,...`, or a path
/// to a pmf JSON file. A leading `family:` prefix on the named shortcuts is
/// tolerated.
pub fn parse_source(spec: &str) -> Result<JointPmf> {
    let spec = spec.strip_prefix("family:").unwrap_or(spec);
    if let Some(rest) = spec.strip_prefix("uniform:") {
        let n: usize = rest.parse().with_context(|| format!("bad variable count in {spec:?}"))?;
        if n == 0 {
            bail!("uniform source needs at least one variable");
        }
        return Ok(JointPmf::uniform_bits(n)?);
    }
    if let Some(rest) = spec.strip_prefix("dsbs:") {
        let rho: f64 = rest.parse().with_context(|| format!("bad rho in {spec:?}"))?;
        return Ok(JointPmf::doubly_symmetric_binary(rho)?);
    }
    if let Some(rest) = spec.strip_prefix("bernoulli-product:") {
        let bits = rest
            .split(',')
            .map(|q| {
                let q: f64 = q.trim().parse().with_context(|| format!("bad q in {spec:?}"))?;
                Ok(JointPmf::bernoulli(q)?)
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            bail!("bernoulli-product needs at least one probability");
        }
        return Ok(JointPmf::product_of(&bits)?);
    }
    if Path::new(spec).exists() {
        return load_json(spec);
    }
    bail!("unrecognized source spec {spec:?} (expected uniform:N, dsbs:RHO, bernoulli-product:..., or a file path)");
}

/// Accepts `pr`, `isotropic:ETA`, or `file:PATH`.
pub fn parse_box(spec: &str) -> Result<BipartiteBox> {
    if spec == "pr" {
        return Ok(BipartiteBox::pr());
    }
    if let Some(rest) = spec.strip_prefix("isotropic:") {
        let eta: f64 = rest.parse().with_context(|| format!("bad eta in {spec:?}"))?;
        return Ok(BipartiteBox::isotropic(eta)?);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return load_json(path);
    }
    bail!("unrecognized box spec {spec:?} (expected pr, isotropic:ETA, or file:PATH)");
}

/// A parsed game strategy.
pub enum StrategySpec {
    Boxes(BoxStrategy),
    Classical(ClassicalStrategy),
}

/// Accepts `box:<box spec>` (the design replicated at every level) or
/// `classical:PATH`.
pub fn parse_strategy(spec: &str, k: usize) -> Result<StrategySpec> {
    if let Some(rest) = spec.strip_prefix("box:") {
        let design = parse_box(rest)?;
        return Ok(StrategySpec::Boxes(BoxStrategy::homogeneous(k, design)?));
    }
    if let Some(path) = spec.strip_prefix("classical:") {
        return Ok(StrategySpec::Classical(load_json(path)?));
    }
    bail!("unrecognized strategy spec {spec:?} (expected box:... or classical:FILE)");
}

/// Comma-separated nonnegative reals.
pub fn parse_weights(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("bad weight {v:?}"))
        })
        .collect()
}

/// Comma-separated variable indices.
pub fn parse_vars(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("bad variable index {v:?}"))
        })
        .collect()
}
