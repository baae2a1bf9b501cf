use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::prover::{depolarizing, on_second, Prover};
use super::timing::*;
use crate::analysis::BooleanFunction;
use crate::attacks::execute::{basis_projector, execute_meas, final_reduced_state};
use crate::attacks::{AttackKind, AttackStrategy, Finale};
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, kron_le, CMatrix};
use crate::qcore::state::{bb84_vector, omega_vector};
use crate::rng::SeedStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Half of `|Omega>` is routed to `V_f(x,y)`; checked with the Bell
    /// projector.
    RouteEntangled,
    /// A BB84 state is routed to `V_f(x,y)`; checked in its preparation basis.
    RouteBb84,
    /// The prover measures in basis `f(x,y)` and announces the outcome.
    Meas,
}

impl ProtocolKind {
    pub fn attack_kind(self) -> AttackKind {
        match self {
            ProtocolKind::Meas => AttackKind::Meas,
            _ => AttackKind::Route,
        }
    }

    pub fn preparations(self) -> usize {
        if self == ProtocolKind::RouteBb84 {
            4
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    pub geometry: Geometry,
    /// Measuring protocol: demand the answer at both verifiers (otherwise
    /// only at `V_f(x,y)`).
    pub requires_both: bool,
    /// Depolarizing noise on the qubit before the prover touches it.
    pub depolarizing: f64,
}

impl ProtocolConfig {
    pub fn new(kind: ProtocolKind) -> Self {
        Self {
            kind,
            geometry: Geometry::default(),
            requires_both: true,
            depolarizing: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolRun {
    pub protocol: ProtocolKind,
    pub n: usize,
    pub f: Arc<BooleanFunction>,
    pub x: usize,
    pub y: usize,
    /// BB84 preparation index (`|0>, |1>, |+>, |->`).
    pub preparation: Option<usize>,
    pub events: Vec<SpacetimeEvent>,
    pub timing_ok: bool,
    /// Probability of acceptance given the inputs and preparation.
    pub accept_probability: f64,
    pub accepted: bool,
}

fn bell_projector() -> CMatrix {
    linalg::projector(&omega_vector())
}

fn check_dim(rho: &CMatrix) -> Result<()> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.nrows(),
        });
    }
    Ok(())
}

/// Acceptance probability of the Bell-projector check.
pub fn m1_accept_probability(rho: &CMatrix) -> Result<f64> {
    check_dim(rho)?;
    Ok(linalg::trace(&(bell_projector() * rho)).re)
}

/// Acceptance probability when, with probability 1/2 each, both qubits are
/// measured in the computational or the Hadamard basis and must agree.
pub fn m2_accept_probability(rho: &CMatrix) -> Result<f64> {
    check_dim(rho)?;
    let agree = |basis: bool| -> CMatrix {
        (0..2)
            .map(|z| kron_le(&basis_projector(basis, z), &basis_projector(basis, z)))
            .fold(CMatrix::zeros(4, 4), |a, b| a + b)
    };
    Ok(0.5 * linalg::trace(&(agree(false) * rho)).re + 0.5 * linalg::trace(&(agree(true) * rho)).re)
}

/// `2 <s s| rho |s s>`: accepting the returned qubit for preparation `s`
/// when `rho` is the joint state of the verifier's reference and the
/// returned qubit in the entanglement-based picture.
fn bb84_accept(rho: &CMatrix, preparation: usize) -> f64 {
    let s = bb84_vector(preparation).expect("preparation < 4");
    let ss = linalg::kron_le_vec(&s, &s);
    2.0 * ss.dotc(&(rho * &ss)).re
}

fn check_inputs(f: &BooleanFunction, x: usize, y: usize) -> Result<()> {
    for v in [x, y] {
        if v >= f.side() {
            return Err(Error::LengthMismatch {
                expected: f.n(),
                got: (usize::BITS - v.leading_zeros()) as usize,
            });
        }
    }
    Ok(())
}

/// Returned-qubit state (reference `R` in the low bit) for route protocols,
/// or `None` when nobody answers `V_f`.
fn route_state(cfg: &ProtocolConfig, f: &BooleanFunction, x: usize, y: usize, prover: &Prover) -> Result<Option<CMatrix>> {
    if let Prover::Attack(s) = prover {
        let Finale::Route { responds, .. } = s.finale() else {
            return Err(Error::KindMismatch("route"));
        };
        if !responds[s.pair(x, y)][f.eval(x, y) as usize] {
            return Ok(None);
        }
        return final_reduced_state(s, f, x, y).map(Some);
    }
    let mut rho = bell_projector();
    if cfg.depolarizing > 0.0 {
        rho = on_second(&rho, &depolarizing(cfg.depolarizing));
    }
    Ok(Some(on_second(&rho, &prover.channel())))
}

fn meas_accept(cfg: &ProtocolConfig, f: &BooleanFunction, x: usize, y: usize, prover: &Prover) -> Result<f64> {
    if let Prover::Attack(s) = prover {
        return execute_meas(s, f, x, y);
    }
    let basis = f.eval(x, y);
    let mut rho = bell_projector();
    if cfg.depolarizing > 0.0 {
        rho = on_second(&rho, &depolarizing(cfg.depolarizing));
    }
    let rho = on_second(&rho, &prover.channel());
    let mut total = 0.0;
    for z in 0..2 {
        let report = match prover {
            Prover::RandomBit => CMatrix::identity(2, 2) * linalg::c(0.5, 0.0),
            Prover::WrongBasis => basis_projector(!basis, z),
            _ => basis_projector(basis, z),
        };
        total += linalg::trace(&(kron_le(&basis_projector(basis, z), &report) * &rho)).re;
    }
    Ok(total)
}

/// The event log of a run and whether every required answer arrived on
/// time.
fn events_for(cfg: &ProtocolConfig, f: &BooleanFunction, x: usize, y: usize, prover: &Prover) -> (Vec<SpacetimeEvent>, bool) {
    let g = &cfg.geometry;
    let target = Verifier::from_bit(f.eval(x, y));
    let mut ev = dispatch_events(g, x, y, ", Q");
    let (payload, honest_targets) = match cfg.kind {
        ProtocolKind::Meas => ("b", vec![Verifier::V0, Verifier::V1]),
        _ => ("Q", vec![target]),
    };
    match prover {
        Prover::Attack(_) => {
            let z = g.prover;
            let sides = [(Verifier::V0, "Alice", z / 2.0), (Verifier::V1, "Bob", (1.0 + z) / 2.0)];
            for (v, who, at) in sides {
                if honest_targets.contains(&v) {
                    ev.extend(responder_events(g, who, at, 0.0, &[v], payload));
                }
            }
        }
        _ => {
            let (at, delay) = match prover {
                Prover::Delayed(dt) => (g.prover, *dt),
                Prover::FromPosition(p) => (*p, 0.0),
                _ => (g.prover, 0.0),
            };
            let targets = if *prover == Prover::WrongVerifier {
                vec![target.other()]
            } else {
                honest_targets
            };
            ev.extend(responder_events(g, "P", at, delay, &targets, payload));
        }
    }
    let required: Vec<Verifier> = if cfg.kind == ProtocolKind::Meas && cfg.requires_both {
        vec![Verifier::V0, Verifier::V1]
    } else {
        vec![target]
    };
    let arrived = |v: Verifier| ev.iter().any(|e| e.action == EventAction::Arrive && e.actor == v.label());
    let ok = timing_check_events(g, &ev) && required.iter().all(|&v| arrived(v));
    (ev, ok)
}

fn validate_prover(cfg: &ProtocolConfig, f: &BooleanFunction, prover: &Prover) -> Result<()> {
    match prover {
        Prover::RandomBit | Prover::WrongBasis if cfg.kind != ProtocolKind::Meas => Err(Error::InvalidArgument(format!(
            "prover {} only applies to the measuring protocol",
            prover.label()
        ))),
        Prover::Synthetic(p) if !(0.0..=1.0).contains(p) => Err(Error::OutOfRange {
            value: *p,
            expected: "[0, 1]",
        }),
        Prover::Delayed(dt) if !(*dt >= 0.0) => Err(Error::OutOfRange {
            value: *dt,
            expected: "[0, inf)",
        }),
        Prover::Attack(s) if s.kind() != cfg.kind.attack_kind() => Err(Error::KindMismatch(match cfg.kind {
            ProtocolKind::Meas => "meas",
            _ => "route",
        })),
        Prover::Attack(s) if s.n() != f.n() => Err(Error::LengthMismatch {
            expected: f.n(),
            got: s.n(),
        }),
        _ => Ok(()),
    }
}

/// Exact acceptance probability of one round, given inputs and (for the
/// BB84 protocol) the preparation.
pub fn accept_probability(
    cfg: &ProtocolConfig,
    f: &BooleanFunction,
    x: usize,
    y: usize,
    prover: &Prover,
    preparation: Option<usize>,
) -> Result<f64> {
    check_inputs(f, x, y)?;
    validate_prover(cfg, f, prover)?;
    let (_, timing_ok) = events_for(cfg, f, x, y, prover);
    if !timing_ok {
        return Ok(0.0);
    }
    if let Prover::Synthetic(p) = prover {
        return Ok(*p);
    }
    let p = match cfg.kind {
        ProtocolKind::RouteEntangled => match route_state(cfg, f, x, y, prover)? {
            Some(rho) => m1_accept_probability(&rho)?,
            None => 0.0,
        },
        ProtocolKind::RouteBb84 => {
            let k = preparation.ok_or_else(|| Error::InvalidArgument("BB84 run needs a preparation".into()))?;
            if k > 3 {
                return Err(Error::IndexOutOfRange(k));
            }
            match route_state(cfg, f, x, y, prover)? {
                Some(rho) => bb84_accept(&rho, k),
                None => 0.0,
            }
        }
        ProtocolKind::Meas => meas_accept(cfg, f, x, y, prover)?,
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Acceptance probability averaged over the preparations of the protocol.
pub fn average_accept_probability(cfg: &ProtocolConfig, f: &BooleanFunction, x: usize, y: usize, prover: &Prover) -> Result<f64> {
    if cfg.kind == ProtocolKind::RouteBb84 {
        let mut s = 0.0;
        for k in 0..4 {
            s += accept_probability(cfg, f, x, y, prover, Some(k))?;
        }
        Ok(s / 4.0)
    } else {
        accept_probability(cfg, f, x, y, prover, None)
    }
}

/// One round with a sampled preparation and verdict.
pub fn run_protocol(
    cfg: &ProtocolConfig,
    f: &Arc<BooleanFunction>,
    x: usize,
    y: usize,
    prover: &Prover,
    stream: SeedStream,
) -> Result<ProtocolRun> {
    let mut rng = stream.rng();
    let preparation = (cfg.kind == ProtocolKind::RouteBb84).then(|| rng.random_range(0..4));
    let accept_probability = accept_probability(cfg, f, x, y, prover, preparation)?;
    let (events, timing_ok) = events_for(cfg, f, x, y, prover);
    let accepted = rng.random::<f64>() < accept_probability;
    Ok(ProtocolRun {
        protocol: cfg.kind,
        n: f.n(),
        f: Arc::clone(f),
        x,
        y,
        preparation,
        events,
        timing_ok,
        accept_probability,
        accepted,
    })
}

pub fn run_route_entangled(f: &Arc<BooleanFunction>, x: usize, y: usize, prover: &Prover, seed: u64) -> Result<ProtocolRun> {
    run_protocol(&ProtocolConfig::new(ProtocolKind::RouteEntangled), f, x, y, prover, SeedStream::new(seed))
}

pub fn run_route_bb84(f: &Arc<BooleanFunction>, x: usize, y: usize, prover: &Prover, seed: u64) -> Result<ProtocolRun> {
    run_protocol(&ProtocolConfig::new(ProtocolKind::RouteBb84), f, x, y, prover, SeedStream::new(seed))
}

pub fn run_meas(f: &Arc<BooleanFunction>, x: usize, y: usize, prover: &Prover, seed: u64) -> Result<ProtocolRun> {
    run_protocol(&ProtocolConfig::new(ProtocolKind::Meas), f, x, y, prover, SeedStream::new(seed))
}

/// Re-checks the timing of a finished run.
pub fn timing_check(run: &ProtocolRun, geometry: &Geometry) -> bool {
    timing_check_events(geometry, &run.events)
}

/// Convenience for tests and tools: the attack as a prover.
pub fn attack_prover(s: AttackStrategy) -> Prover {
    Prover::Attack(Arc::new(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::boolean::xor_function;
    use crate::qcore::state::bb84_vector;

    fn xor() -> Arc<BooleanFunction> {
        Arc::new(xor_function(1).unwrap())
    }

    fn avg(kind: ProtocolKind, prover: &Prover) -> f64 {
        let f = xor();
        let cfg = ProtocolConfig::new(kind);
        let mut s = 0.0;
        for p in 0..4 {
            s += average_accept_probability(&cfg, &f, p / 2, p % 2, prover).unwrap();
        }
        s / 4.0
    }

    #[test]
    fn naive_provers() {
        use ProtocolKind::*;
        assert!(avg(RouteEntangled, &Prover::ApplyX).abs() < 1e-12);
        assert!((avg(RouteBb84, &Prover::MeasureComputational) - 0.75).abs() < 1e-12);
        assert!((avg(RouteBb84, &Prover::DiscardSendZero) - 0.5).abs() < 1e-12);
        assert!((avg(Meas, &Prover::RandomBit) - 0.5).abs() < 1e-12);
        assert!((avg(Meas, &Prover::WrongBasis) - 0.5).abs() < 1e-12);
        assert_eq!(avg(RouteEntangled, &Prover::WrongVerifier), 0.0);
        assert_eq!(avg(Meas, &Prover::Delayed(0.1)), 0.0);
        assert!(accept_probability(&ProtocolConfig::new(RouteBb84), &xor(), 0, 0, &Prover::RandomBit, Some(0)).is_err());
    }

    #[test]
    fn bb84_acceptance_matches_prepare_and_measure() {
        // <s| E(|s><s|) |s> computed directly for the discard prover.
        let cfg = ProtocolConfig::new(ProtocolKind::RouteBb84);
        for k in 0..4 {
            let s = bb84_vector(k).unwrap();
            let direct = s[0].norm_sqr();
            let p = accept_probability(&cfg, &xor(), 0, 0, &Prover::DiscardSendZero, Some(k)).unwrap();
            assert!((p - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn m1_m2_examples() {
        let phi1 = {
            let w = std::f64::consts::FRAC_1_SQRT_2;
            let mut v = linalg::CVector::zeros(4);
            v[1] = linalg::c(w, 0.0);
            v[2] = linalg::c(w, 0.0);
            linalg::projector(&v)
        };
        assert!(m1_accept_probability(&phi1).unwrap().abs() < 1e-12);
        assert!((m2_accept_probability(&phi1).unwrap() - 0.5).abs() < 1e-12);
        let mixed = CMatrix::identity(4, 4) * linalg::c(0.25, 0.0);
        assert!((m1_accept_probability(&mixed).unwrap() - 0.25).abs() < 1e-12);
        assert!((m2_accept_probability(&mixed).unwrap() - 0.5).abs() < 1e-12);
        assert!(m1_accept_probability(&CMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn depolarizing_lowers_honest_acceptance() {
        let mut cfg = ProtocolConfig::new(ProtocolKind::RouteEntangled);
        cfg.depolarizing = 0.2;
        let p = accept_probability(&cfg, &xor(), 0, 1, &Prover::Honest, None).unwrap();
        assert!((p - (1.0 - 0.75 * 0.2)).abs() < 1e-12);
    }

    #[test]
    fn runs_are_deterministic() {
        let f = xor();
        let a = run_route_bb84(&f, 1, 0, &Prover::MeasureComputational, 9).unwrap();
        let b = run_route_bb84(&f, 1, 0, &Prover::MeasureComputational, 9).unwrap();
        assert_eq!((a.preparation, a.accepted), (b.preparation, b.accepted));
        assert!(a.timing_ok);
        assert!(run_meas(&f, 2, 0, &Prover::Honest, 0).is_err());
    }
}
