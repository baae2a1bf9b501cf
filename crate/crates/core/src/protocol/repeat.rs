use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::prover::Prover;
use super::run::{accept_probability, ProtocolConfig};
use crate::analysis::BooleanFunction;
use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Largest per-round noise the threshold rule is designed for.
pub const MAX_ETA: f64 = 0.01;
/// Fraction of the expected honest acceptances a run must exceed.
pub const THRESHOLD_FACTOR: f64 = 0.996;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub round: usize,
    pub x: usize,
    pub y: usize,
    pub preparation: Option<usize>,
    pub accepted: bool,
}

/// Exact per-round acceptance probabilities, indexed by pair then
/// preparation.
#[derive(Debug, Clone)]
pub struct AcceptTable {
    side: usize,
    preparations: usize,
    probs: Vec<Vec<f64>>,
}

impl AcceptTable {
    pub fn new(cfg: &ProtocolConfig, f: &BooleanFunction, prover: &Prover) -> Result<Self> {
        let preparations = cfg.kind.preparations();
        let side = f.side();
        let probs = (0..f.pairs())
            .into_par_iter()
            .map(|p| {
                (0..preparations)
                    .map(|k| {
                        let prep = (preparations > 1).then_some(k);
                        accept_probability(cfg, f, p / side, p % side, prover, prep)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            side,
            preparations,
            probs,
        })
    }

    pub fn get(&self, x: usize, y: usize, preparation: Option<usize>) -> f64 {
        self.probs[x * self.side + y][preparation.unwrap_or(0)]
    }

    pub fn average(&self) -> f64 {
        let total: f64 = self.probs.iter().flatten().sum();
        total / (self.probs.len() * self.preparations) as f64
    }

    /// Draws one round. Always consumes the same number of random values, so
    /// runs that differ only in their noise level stay coupled.
    fn draw<R: Rng>(&self, rng: &mut R, round: usize) -> (RoundOutcome, f64) {
        let x = rng.random_range(0..self.side);
        let y = rng.random_range(0..self.side);
        let k = rng.random_range(0..self.preparations);
        let preparation = (self.preparations > 1).then_some(k);
        let verdict: f64 = rng.random();
        let noise: f64 = rng.random();
        let accepted = verdict < self.get(x, y, preparation);
        (
            RoundOutcome {
                round,
                x,
                y,
                preparation,
                accepted,
            },
            noise,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentialOutcome {
    pub rounds: Vec<RoundOutcome>,
    /// Every round accepted.
    pub accepted: bool,
}

/// `rounds` independent rounds with fresh uniform inputs; the overall run
/// accepts only if every round does.
pub fn repeat_sequential(cfg: &ProtocolConfig, f: &BooleanFunction, rounds: usize, prover: &Prover, stream: SeedStream) -> Result<SequentialOutcome> {
    let table = AcceptTable::new(cfg, f, prover)?;
    repeat_with_table(&table, rounds, stream)
}

pub fn repeat_with_table(table: &AcceptTable, rounds: usize, stream: SeedStream) -> Result<SequentialOutcome> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("at least one round is required".into()));
    }
    let mut rng = stream.rng();
    let rounds: Vec<RoundOutcome> = (0..rounds).map(|r| table.draw(&mut rng, r).0).collect();
    let accepted = rounds.iter().all(|r| r.accepted);
    Ok(SequentialOutcome { rounds, accepted })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// The honest prover's round verdict is independently turned into a
    /// rejection with probability `eta`.
    Bernoulli,
    /// The qubit passes through a depolarizing channel of strength `eta`.
    Depolarizing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyRepeatConfig {
    pub rounds: usize,
    pub eta: f64,
    pub model: NoiseModel,
}

impl NoisyRepeatConfig {
    pub fn new(rounds: usize, eta: f64) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidArgument("at least one round is required".into()));
        }
        if !(0.0..=MAX_ETA).contains(&eta) {
            return Err(Error::OutOfRange {
                value: eta,
                expected: "[0, 0.01]",
            });
        }
        Ok(Self {
            rounds,
            eta,
            model: NoiseModel::Bernoulli,
        })
    }

    pub fn threshold(&self) -> f64 {
        THRESHOLD_FACTOR * (1.0 - self.eta) * self.rounds as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyOutcome {
    pub accept_count: usize,
    pub threshold: f64,
    /// Strictly more acceptances than the threshold.
    pub accepted: bool,
    /// Per-round outcomes, when requested.
    pub rounds: Option<Vec<RoundOutcome>>,
}

/// Precomputed state for repeated noisy-threshold trials.
#[derive(Debug, Clone)]
pub struct NoisyRunner {
    config: NoisyRepeatConfig,
    table: AcceptTable,
    corrupts: bool,
}

impl NoisyRunner {
    pub fn new(config: NoisyRepeatConfig, cfg: &ProtocolConfig, f: &BooleanFunction, prover: &Prover) -> Result<Self> {
        let mut cfg = *cfg;
        if config.model == NoiseModel::Depolarizing {
            cfg.depolarizing = config.eta;
        }
        Ok(Self {
            config,
            table: AcceptTable::new(&cfg, f, prover)?,
            corrupts: config.model == NoiseModel::Bernoulli && *prover == Prover::Honest,
        })
    }

    pub fn trial(&self, stream: SeedStream, keep_rounds: bool) -> NoisyOutcome {
        let mut rng = stream.rng();
        let mut count = 0;
        let mut kept = keep_rounds.then(|| Vec::with_capacity(self.config.rounds));
        for r in 0..self.config.rounds {
            let (mut out, noise) = self.table.draw(&mut rng, r);
            if self.corrupts && noise < self.config.eta {
                out.accepted = false;
            }
            count += out.accepted as usize;
            if let Some(k) = kept.as_mut() {
                k.push(out);
            }
        }
        let threshold = self.config.threshold();
        NoisyOutcome {
            accept_count: count,
            threshold,
            accepted: count as f64 > threshold,
            rounds: kept,
        }
    }

    /// Independent trials on split streams, in trial order.
    pub fn trials(&self, count: usize, stream: SeedStream, keep_rounds: bool) -> Vec<NoisyOutcome> {
        (0..count)
            .into_par_iter()
            .map(|t| self.trial(stream.split(t as u64), keep_rounds))
            .collect()
    }
}

pub fn run_noisy_threshold(
    config: &NoisyRepeatConfig,
    cfg: &ProtocolConfig,
    f: &BooleanFunction,
    prover: &Prover,
    stream: SeedStream,
) -> Result<NoisyOutcome> {
    Ok(NoisyRunner::new(*config, cfg, f, prover)?.trial(stream, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::boolean::ip_function;
    use crate::protocol::run::ProtocolKind;

    #[test]
    fn honest_noiseless_always_passes() {
        let f = ip_function(2).unwrap();
        let cfg = ProtocolConfig::new(ProtocolKind::RouteEntangled);
        let out = repeat_sequential(&cfg, &f, 100, &Prover::Honest, SeedStream::new(1)).unwrap();
        assert!(out.accepted && out.rounds.len() == 100);
        let noisy = run_noisy_threshold(&NoisyRepeatConfig::new(50, 0.0).unwrap(), &cfg, &f, &Prover::Honest, SeedStream::new(2)).unwrap();
        assert_eq!(noisy.accept_count, 50);
        assert!(noisy.accepted);
    }

    #[test]
    fn failing_prover_is_rejected_overall() {
        let f = ip_function(1).unwrap();
        let cfg = ProtocolConfig::new(ProtocolKind::RouteEntangled);
        let out = repeat_sequential(&cfg, &f, 5, &Prover::ApplyX, SeedStream::new(1)).unwrap();
        assert!(!out.rounds[0].accepted && !out.accepted);
    }

    #[test]
    fn ties_at_the_threshold_reject() {
        // 0.996 * 250 = 249 exactly: 249 acceptances are not enough.
        let c = NoisyRepeatConfig::new(250, 0.0).unwrap();
        assert_eq!(c.threshold(), 249.0);
        assert!(NoisyRepeatConfig::new(10, 0.02).is_err());
    }

    #[test]
    fn noise_is_coupled_across_eta() {
        let f = ip_function(1).unwrap();
        let cfg = ProtocolConfig::new(ProtocolKind::Meas);
        for t in 0..50 {
            let s = SeedStream::new(7).split(t);
            let counts: Vec<usize> = [0.0, 0.004, 0.01]
                .iter()
                .map(|&eta| {
                    run_noisy_threshold(&NoisyRepeatConfig::new(100, eta).unwrap(), &cfg, &f, &Prover::Honest, s)
                        .unwrap()
                        .accept_count
                })
                .collect();
            assert!(counts[0] >= counts[1] && counts[1] >= counts[2]);
        }
    }
}
