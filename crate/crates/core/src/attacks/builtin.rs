use serde::{Deserialize, Serialize};

use super::strategy::*;
use crate::analysis::BooleanFunction;
use crate::error::Result;
use crate::protocol::timing::{dispatch_events, responder_events, timing_check_events, Geometry, SpacetimeEvent, Verifier};
use crate::qcore::gates;
use crate::qcore::linalg::{self, CMatrix};

/// Alice keeps the qubit in `A`, nobody acts, only Alice answers.
pub fn keep_q(n: usize) -> Result<AttackStrategy> {
    let shape = Shape::symmetric(n, 0, 0)?;
    let mut s = AttackStrategy::trivial(shape, AttackKind::Route)?;
    for p in 0..shape.pairs() {
        s.set_responds(p, true, false)?;
    }
    Ok(s)
}

/// Alice forwards the qubit to Bob through `Ac`; Bob moves it into `B`.
pub fn forward_to_bob(n: usize) -> Result<AttackStrategy> {
    let shape = Shape::symmetric(n, 0, 1)?;
    let mut s = AttackStrategy::trivial(shape, AttackKind::Route)?;
    // Local order [A, Ac]: swap the two qubits.
    for x in 0..shape.inputs() {
        s.set_u(x, gates::swap(1))?;
    }
    // Local order [B, Bt(empty), Ac]: swap B and Ac.
    for p in 0..shape.pairs() {
        s.set_l(p, gates::swap(1))?;
    }
    Ok(s)
}

/// Alice measures the qubit along the real angle `angles[x]`
/// (`cos t |0> + sin t |1>` is outcome 0), records the outcome in `At` and
/// copies it to Bob through `Ac`; both report it.
pub fn measure_and_copy(n: usize, angles: &[f64]) -> Result<AttackStrategy> {
    let shape = Shape::symmetric(n, 1, 1)?;
    let mut s = AttackStrategy::trivial(shape, AttackKind::Meas)?;
    // Local order [A, At, Ac]: rotate A, then CNOT A->At and A->Ac.
    let copy = gates::permutation(8, |i| if i & 1 == 1 { i ^ 0b110 } else { i });
    for (x, &t) in angles.iter().enumerate() {
        let rot = linalg::kron_le(&gates::real_rotation(t).adjoint(), &linalg::identity(4));
        s.set_u(x, &copy * rot)?;
    }
    // Alice reads A (bit 0 of [A, At, Bc]); Bob reads Ac (bit 2 of [B, Bt, Ac]).
    let read = |bit: usize| -> CMatrix {
        let mut p = CMatrix::zeros(8, 8);
        for i in (0..8).filter(|i| (i >> bit) & 1 == 0) {
            p[(i, i)] = linalg::c(1.0, 0.0);
        }
        p
    };
    for p in 0..shape.pairs() {
        s.set_povm(0, p, read(0))?;
        s.set_povm(1, p, read(2))?;
    }
    Ok(s)
}

/// Measure-and-copy in the computational or Hadamard basis per `x`.
pub fn measure_and_copy_bases(n: usize, hadamard: impl Fn(usize) -> bool) -> Result<AttackStrategy> {
    let angles: Vec<f64> = (0..1usize << n)
        .map(|x| if hadamard(x) { std::f64::consts::FRAC_PI_4 } else { 0.0 })
        .collect();
    measure_and_copy(n, &angles)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCopyReport {
    pub successes: Vec<f64>,
    pub events: Vec<Vec<SpacetimeEvent>>,
    pub timing_ok: bool,
}

/// Two attackers on either side of the prover position intercept `x` and
/// `y`, forward copies to each other, and both answer `f(x, y)`: in the
/// purely classical protocol they are indistinguishable from the prover.
pub fn classical_copy_attack(f: &BooleanFunction, geometry: &Geometry) -> ClassicalCopyReport {
    let z = geometry.prover;
    let (alice, bob) = (z / 2.0, (1.0 + z) / 2.0);
    let side = f.side();
    let mut successes = Vec::with_capacity(f.pairs());
    let mut events = Vec::with_capacity(f.pairs());
    let mut timing_ok = true;
    for p in 0..f.pairs() {
        let (x, y) = (p / side, p % side);
        // Each attacker learns both inputs after one exchange; the answer is
        // computed from the copies, identical to what the prover would send.
        let answer = f.eval(x, y);
        let mut ev = dispatch_events(geometry, x, y, "");
        ev.extend(responder_events(geometry, "Alice", alice, 0.0, &[Verifier::V0], &format!("{}", answer as u8)));
        ev.extend(responder_events(geometry, "Bob", bob, 0.0, &[Verifier::V1], &format!("{}", answer as u8)));
        let ok = timing_check_events(geometry, &ev);
        timing_ok &= ok;
        successes.push(if ok && answer == f.eval(x, y) { 1.0 } else { 0.0 });
        events.push(ev);
    }
    ClassicalCopyReport {
        successes,
        events,
        timing_ok,
    }
}

/// Best measure-and-copy attack over a grid of `resolution` angles in
/// `[0, pi)`, chosen independently for each `x`. Returns the average success
/// and the chosen angles.
pub fn grid_search_measure_and_copy(f: &BooleanFunction, resolution: usize) -> Result<(f64, Vec<f64>)> {
    use super::execute::execute_meas;
    let grid: Vec<f64> = (0..resolution)
        .map(|i| std::f64::consts::PI * i as f64 / resolution as f64)
        .collect();
    let side = f.side();
    let mut angles = vec![0.0; side];
    let mut total = 0.0;
    for x in 0..side {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for &t in &grid {
            let mut a = vec![0.0; side];
            a[x] = t;
            let s = measure_and_copy(f.n(), &a)?;
            let v: f64 = (0..side).map(|y| execute_meas(&s, f, x, y)).sum::<Result<f64>>()?;
            if v > best.0 + 1e-15 {
                best = (v, t);
            }
        }
        angles[x] = best.1;
        total += best.0;
    }
    Ok((total / f.pairs() as f64, angles))
}
