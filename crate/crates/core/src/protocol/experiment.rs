//! JSON-configured Monte Carlo experiments.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::prover::Prover;
use super::repeat::{NoiseModel, NoisyRepeatConfig, NoisyRunner, RoundOutcome};
use super::run::{ProtocolConfig, ProtocolKind};
use super::timing::Geometry;
use crate::analysis::boolean::{ip_function, random_function, xor_function};
use crate::analysis::BooleanFunction;
use crate::attacks::{builtin, AttackStrategy};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Random { seed: u64 },
    Ip,
    Xor,
    /// Truth table as `2^{2n}` characters of `0`/`1`, `x` outer.
    Table { table: String },
}

impl FunctionSpec {
    pub fn build(&self, n: usize) -> Result<BooleanFunction> {
        match self {
            FunctionSpec::Random { seed } => random_function(n, *seed),
            FunctionSpec::Ip => ip_function(n),
            FunctionSpec::Xor => xor_function(n),
            FunctionSpec::Table { table } => BooleanFunction::from_bits(n, table),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProverSpec {
    Honest,
    WrongVerifier,
    ApplyX,
    DiscardSendZero,
    MeasureComputational,
    RandomBit,
    WrongBasis,
    Delayed { dt: f64 },
    FromPosition { z: f64 },
    Synthetic { p: f64 },
    /// Alice keeps the qubit whatever the inputs.
    KeepQ,
    /// A strategy in the JSON form written by `attack-optimize`; relative
    /// paths resolve against the config file's directory.
    StrategyFile { path: PathBuf },
}

impl ProverSpec {
    pub fn build(&self, n: usize, base: Option<&Path>) -> Result<Prover> {
        Ok(match self {
            ProverSpec::Honest => Prover::Honest,
            ProverSpec::WrongVerifier => Prover::WrongVerifier,
            ProverSpec::ApplyX => Prover::ApplyX,
            ProverSpec::DiscardSendZero => Prover::DiscardSendZero,
            ProverSpec::MeasureComputational => Prover::MeasureComputational,
            ProverSpec::RandomBit => Prover::RandomBit,
            ProverSpec::WrongBasis => Prover::WrongBasis,
            ProverSpec::Delayed { dt } => Prover::Delayed(*dt),
            ProverSpec::FromPosition { z } => Prover::FromPosition(*z),
            ProverSpec::Synthetic { p } => Prover::Synthetic(*p),
            ProverSpec::KeepQ => Prover::Attack(Arc::new(builtin::keep_q(n)?)),
            ProverSpec::StrategyFile { path } => {
                let full = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", full.display())))?;
                Prover::Attack(Arc::new(AttackStrategy::from_json(&text)?))
            }
        })
    }
}

fn default_trials() -> usize {
    1
}

fn default_prover() -> ProverSpec {
    ProverSpec::Honest
}

fn default_true() -> bool {
    true
}

fn default_noise() -> NoiseModel {
    NoiseModel::Bernoulli
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: ProtocolKind,
    pub n: usize,
    pub f: FunctionSpec,
    pub rounds: usize,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_prover")]
    pub prover: ProverSpec,
    #[serde(default)]
    pub z: Option<f64>,
    #[serde(default = "default_true")]
    pub requires_both: bool,
    #[serde(default = "default_noise")]
    pub noise: NoiseModel,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub trial: usize,
    pub round: usize,
    pub x: usize,
    pub y: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub protocol: ProtocolKind,
    pub prover: String,
    pub n: usize,
    pub rounds: usize,
    pub trials: usize,
    pub eta: f64,
    pub threshold: f64,
    /// Exact single-round acceptance averaged over inputs and preparations.
    pub round_accept_probability: f64,
    /// Fraction of all rounds accepted.
    pub round_acceptance_rate: f64,
    /// Fraction of trials accepted by the threshold rule.
    pub acceptance_rate: f64,
    /// Wilson 95% interval for `acceptance_rate`.
    pub ci95: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub summary: ExperimentSummary,
    pub rows: Vec<ExperimentRow>,
}

/// Wilson score interval at `z = 1.96`.
pub fn wilson_interval(successes: usize, trials: usize) -> [f64; 2] {
    if trials == 0 {
        return [0.0, 1.0];
    }
    let z = 1.96f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    [(centre - half).max(0.0), (centre + half).min(1.0)]
}

/// Runs `trials` noisy-threshold repetitions. With `eta = 0` the threshold
/// rule demands every round, i.e. plain sequential repetition.
pub fn run_experiment(cfg: &ExperimentConfig, base: Option<&Path>, keep_rows: bool) -> Result<ExperimentResult> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let f = cfg.f.build(cfg.n)?;
    let prover = cfg.prover.build(cfg.n, base)?;
    let mut pcfg = ProtocolConfig::new(cfg.protocol);
    if let Some(z) = cfg.z {
        pcfg.geometry = Geometry::new(z)?;
    }
    pcfg.requires_both = cfg.requires_both;
    let mut noisy = NoisyRepeatConfig::new(cfg.rounds, cfg.eta)?;
    noisy.model = cfg.noise;
    let runner = NoisyRunner::new(noisy, &pcfg, &f, &prover)?;
    let outcomes = runner.trials(cfg.trials, SeedStream::new(cfg.seed), keep_rows);
    let accepted = outcomes.iter().filter(|o| o.accepted).count();
    let round_accepts: usize = outcomes.iter().map(|o| o.accept_count).sum();
    let rows = outcomes
        .iter()
        .enumerate()
        .flat_map(|(trial, o)| {
            o.rounds.iter().flatten().map(move |r: &RoundOutcome| ExperimentRow {
                trial,
                round: r.round,
                x: r.x,
                y: r.y,
                accepted: r.accepted,
            })
        })
        .collect();
    let mut exact_cfg = pcfg;
    if cfg.noise == NoiseModel::Depolarizing {
        exact_cfg.depolarizing = cfg.eta;
    }
    let table = super::repeat::AcceptTable::new(&exact_cfg, &f, &prover)?;
    Ok(ExperimentResult {
        summary: ExperimentSummary {
            protocol: cfg.protocol,
            prover: prover.label(),
            n: cfg.n,
            rounds: cfg.rounds,
            trials: cfg.trials,
            eta: cfg.eta,
            threshold: noisy.threshold(),
            round_accept_probability: table.average(),
            round_acceptance_rate: round_accepts as f64 / (cfg.trials * cfg.rounds) as f64,
            acceptance_rate: accepted as f64 / cfg.trials as f64,
            ci95: wilson_interval(accepted, cfg.trials),
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = ExperimentConfig::from_json(
            r#"{"protocol":"route_bb84","n":2,"f":{"kind":"random","seed":3},"rounds":10,"trials":2,"seed":5}"#,
        )
        .unwrap();
        assert_eq!(cfg.prover, ProverSpec::Honest);
        assert!(ExperimentConfig::from_json(r#"{"protocol":"meas","n":1,"f":{"kind":"ip"},"rounds":1,"bogus":1}"#).is_err());
        let r = run_experiment(&cfg, None, true).unwrap();
        assert_eq!(r.rows.len(), 20);
        assert_eq!(r.summary.acceptance_rate, 1.0);
    }

    #[test]
    fn keep_q_on_xor_accepts_half_the_rounds() {
        let cfg = ExperimentConfig::from_json(
            r#"{"protocol":"route_entangled","n":1,"f":{"kind":"xor"},"rounds":1,"trials":4000,"seed":1,"prover":{"kind":"keep_q"}}"#,
        )
        .unwrap();
        let r = run_experiment(&cfg, None, false).unwrap();
        assert_eq!(r.summary.round_accept_probability, 0.5);
        assert!((r.summary.acceptance_rate - 0.5).abs() < 0.03);
        let [lo, hi] = r.summary.ci95;
        assert!(lo < 0.5 && 0.5 < hi);
    }
}
