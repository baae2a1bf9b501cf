//! Garden-hose protocols and their compilation into teleportation attacks.
//!
//! Pipe `i` (`1..=pipes`) is an EPR pair whose halves sit in `At[i-1]` and
//! `Bt[i-1]`. Alice's matchings pair endpoints in `{0 = source, 1..=pipes}`,
//! the source being the qubit received in `A`; Bob's matchings pair pipe
//! endpoints. Water (the qubit) leaves on the side where it reaches an
//! unmatched endpoint; the protocol computes `f` when that side is `f(x, y)`.
//!
//! Every matched pair is Bell-measured (`CNOT(u -> v)`, `H(u)`, outcome bits
//! left in place and copied into the sender's communication register).
//! The exit side then undoes the accumulated Paulis with controlled gates and
//! swaps the exit qubit into `A` or `B`.

use serde::{Deserialize, Serialize};

use super::execute::omega_overlap;
use super::strategy::*;
use crate::analysis::BooleanFunction;
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c, CMatrix, CVector};
use crate::qcore::ops::{self, reduced_matrix};
use crate::qcore::{gates, Povm, QuantumState, RegisterLayout, Unitary};
use crate::rng::SeedStream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GardenHose {
    pub pipes: usize,
    /// Alice's matching for each `x`, over endpoints `0..=pipes`.
    pub alice: Vec<Vec<(usize, usize)>>,
    /// Bob's matching for each `y`, over endpoints `1..=pipes`.
    pub bob: Vec<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Hop {
    /// `false` for Alice, `true` for Bob.
    bob: bool,
    u: usize,
    v: usize,
    /// Index of the pair within that side's matching.
    slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Flow {
    hops: Vec<Hop>,
    exit_bob: bool,
    exit_end: usize,
}

fn partner(m: &[(usize, usize)], e: usize) -> Option<(usize, usize, usize)> {
    m.iter().enumerate().find_map(|(slot, &(a, b))| {
        if a == e {
            Some((b, a.min(b), slot))
        } else if b == e {
            Some((a, a.min(b), slot))
        } else {
            None
        }
    })
}

fn validate_matching(m: &[(usize, usize)], lo: usize, hi: usize, who: &str) -> Result<()> {
    let mut used = vec![false; hi + 1];
    for &(a, b) in m {
        if a == b || a < lo || b < lo || a > hi || b > hi {
            return Err(Error::InvalidMatching(format!("{who}: bad pair ({a}, {b})")));
        }
        for e in [a, b] {
            if std::mem::replace(&mut used[e], true) {
                return Err(Error::InvalidMatching(format!("{who}: endpoint {e} used twice")));
            }
        }
    }
    Ok(())
}

/// Small dense circuit on `bits` local qubits (bit 0 least significant).
struct LocalCircuit {
    m: CMatrix,
}

impl LocalCircuit {
    fn new(bits: usize) -> Self {
        Self {
            m: linalg::identity(1 << bits),
        }
    }

    fn map_rows(&mut self, f: impl Fn(usize) -> (usize, f64)) {
        let d = self.m.nrows();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            let (j, sign) = f(i);
            out.set_row(j, &(self.m.row(i) * c(sign, 0.0)));
        }
        self.m = out;
    }

    fn h(&mut self, b: usize) {
        let d = self.m.nrows();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in (0..d).filter(|i| i >> b & 1 == 0) {
            let j = i | 1 << b;
            let (r0, r1) = (self.m.row(i).into_owned(), self.m.row(j).into_owned());
            self.m.set_row(i, &((&r0 + &r1) * c(s, 0.0)));
            self.m.set_row(j, &((&r0 - &r1) * c(s, 0.0)));
        }
    }

    fn cnot(&mut self, ctl: usize, tgt: usize) {
        self.map_rows(|i| (if i >> ctl & 1 == 1 { i ^ 1 << tgt } else { i }, 1.0));
    }

    fn cz(&mut self, ctl: usize, tgt: usize) {
        self.map_rows(|i| (i, if i >> ctl & 1 == 1 && i >> tgt & 1 == 1 { -1.0 } else { 1.0 }));
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a != b {
            self.map_rows(|i| {
                let (x, y) = (i >> a & 1, i >> b & 1);
                (i & !(1 << a) & !(1 << b) | y << a | x << b, 1.0)
            });
        }
    }
}

impl GardenHose {
    pub fn new(pipes: usize, alice: Vec<Vec<(usize, usize)>>, bob: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        let g = Self { pipes, alice, bob };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let side = self.alice.len();
        if side == 0 || !side.is_power_of_two() || self.bob.len() != side {
            return Err(Error::InvalidMatching("need one matching per input on each side".into()));
        }
        for m in &self.alice {
            validate_matching(m, 0, self.pipes, "Alice")?;
        }
        for m in &self.bob {
            validate_matching(m, 1, self.pipes, "Bob")?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.alice.len().trailing_zeros() as usize
    }

    fn flow(&self, x: usize, y: usize) -> Flow {
        let mut hops = Vec::new();
        let (mut on_bob, mut end) = (false, 0usize);
        loop {
            let m = if on_bob { &self.bob[y] } else { &self.alice[x] };
            match partner(m, end) {
                None => {
                    return Flow {
                        hops,
                        exit_bob: on_bob,
                        exit_end: end,
                    }
                }
                Some((other, u, slot)) => {
                    let v = if u == end { other } else { end };
                    hops.push(Hop { bob: on_bob, u, v, slot });
                    on_bob = !on_bob;
                    end = other;
                }
            }
        }
    }

    /// Side where the water leaves: `false` = Alice, `true` = Bob.
    pub fn water_exit(&self, x: usize, y: usize) -> bool {
        self.flow(x, y).exit_bob
    }

    /// Whether the protocol computes `f` on every input pair.
    pub fn computes(&self, f: &BooleanFunction) -> bool {
        f.n() == self.n()
            && (0..f.pairs()).all(|p| self.water_exit(p / f.side(), p % f.side()) == f.table()[p])
    }

    fn comm_width(&self) -> usize {
        let a = self.alice.iter().map(Vec::len).max().unwrap_or(0);
        let b = self.bob.iter().map(Vec::len).max().unwrap_or(0);
        2 * a.max(b)
    }

    pub fn shape(&self) -> Result<Shape> {
        let w = self.comm_width();
        Shape::symmetric(self.n(), self.pipes, w)
    }

    fn start_state(&self, shape: &Shape) -> Result<QuantumState> {
        let layout = shape.layout()?;
        let (at, bt) = (layout.offset(AT)?, layout.offset(BT)?);
        let (r, a) = (layout.offset(R)?, layout.offset(A)?);
        let s = self.pipes;
        let amp = std::f64::consts::FRAC_1_SQRT_2.powi(s as i32 + 1);
        let mut v = CVector::zeros(layout.dim());
        for bits in 0..1usize << (s + 1) {
            let mut idx = (bits & 1) << r | (bits & 1) << a;
            for i in 0..s {
                let e = bits >> (i + 1) & 1;
                idx |= e << (at + i) | e << (bt + i);
            }
            v[idx] = c(amp, 0.0);
        }
        QuantumState::pure(layout, v)
    }

    /// First-phase unitary for one matching: endpoint `e` is local bit `e`,
    /// copies of pair `j` go to bits `pipes + 1 + 2j` and `pipes + 2 + 2j`.
    fn bell_and_copy(&self, m: &[(usize, usize)], width: usize) -> CMatrix {
        let mut circ = LocalCircuit::new(1 + self.pipes + width);
        for (j, &(a, b)) in m.iter().enumerate() {
            let (u, v) = (a.min(b), a.max(b));
            circ.cnot(u, v);
            circ.h(u);
            circ.cnot(u, self.pipes + 1 + 2 * j);
            circ.cnot(v, self.pipes + 2 + 2 * j);
        }
        circ.m
    }

    /// Correction on the exit side (local bits as in `bell_and_copy`, the
    /// received copies in the upper bits), then swap of the exit into bit 0.
    fn correction(&self, flow: &Flow, exit_bob: bool, width: usize) -> CMatrix {
        let mut circ = LocalCircuit::new(1 + self.pipes + width);
        if flow.exit_bob == exit_bob {
            let exit = flow.exit_end;
            for hop in flow.hops.iter().rev() {
                let (zb, xb) = if hop.bob == exit_bob {
                    (hop.u, hop.v)
                } else {
                    (self.pipes + 1 + 2 * hop.slot, self.pipes + 2 + 2 * hop.slot)
                };
                circ.cnot(xb, exit);
                circ.cz(zb, exit);
            }
            circ.swap(exit, 0);
        }
        circ.m
    }

    /// The routing attack carrying out this protocol with deferred measurements.
    pub fn compile(&self) -> Result<AttackStrategy> {
        self.validate()?;
        let shape = self.shape()?;
        let w = shape.alice_sent;
        let psi = self.start_state(&shape)?;
        let u = self
            .alice
            .iter()
            .map(|m| Unitary::new(self.bell_and_copy(m, w), &ALICE_FIRST))
            .collect::<Result<Vec<_>>>()?;
        let v = self
            .bob
            .iter()
            .map(|m| Unitary::new(self.bell_and_copy(m, w), &BOB_FIRST))
            .collect::<Result<Vec<_>>>()?;
        let side = self.alice.len();
        let (mut k, mut l) = (Vec::new(), Vec::new());
        for p in 0..side * side {
            let flow = self.flow(p / side, p % side);
            k.push(Unitary::new(self.correction(&flow, false, w), &ALICE_FINAL)?);
            l.push(Unitary::new(self.correction(&flow, true, w), &BOB_FINAL)?);
        }
        let responds = vec![[true, true]; side * side];
        AttackStrategy::new(shape, psi, u, v, Finale::Route { k, l, responds })
    }

    fn measured_layout(&self) -> Result<RegisterLayout> {
        let mut regs = vec![("R".to_string(), 1), ("a0".to_string(), 1)];
        for i in 1..=self.pipes {
            regs.push((format!("a{i}"), 1));
            regs.push((format!("b{i}"), 1));
        }
        RegisterLayout::new(regs)
    }

    /// Success with explicit Bell measurements and classically controlled
    /// corrections. `Exact` sums over all outcome branches; `Sampled` draws one.
    pub fn execute_measured(&self, x: usize, y: usize, mode: MeasuredMode) -> Result<f64> {
        self.validate()?;
        let layout = self.measured_layout()?;
        let mut v = CVector::zeros(layout.dim());
        let amp = std::f64::consts::FRAC_1_SQRT_2.powi(self.pipes as i32 + 1);
        // R, a0 and each (a_i, b_i) pair in |Phi+>.
        for bits in 0..1usize << (self.pipes + 1) {
            let mut idx = (bits & 1) * 0b11;
            for i in 0..self.pipes {
                idx |= (bits >> (i + 1) & 1) * (0b11 << (2 + 2 * i));
            }
            v[idx] = c(amp, 0.0);
        }
        let mut state = QuantumState::pure(layout, v)?;
        let name = |bob: bool, e: usize| if bob { format!("b{e}") } else { format!("a{e}") };
        let mut pairs = Vec::new();
        for (bob, m) in [(false, &self.alice[x]), (true, &self.bob[y])] {
            for &(a, b) in m.iter() {
                let (u, w) = (name(bob, a.min(b)), name(bob, a.max(b)));
                state = ops::apply(&state, &Unitary::new(gates::cnot(), &[&u, &w])?)?;
                state = ops::apply(&state, &Unitary::new(gates::h(), &[&u])?)?;
                pairs.push((bob, a.min(b), a.max(b)));
            }
        }
        let flow = self.flow(x, y);
        let exit = name(flow.exit_bob, flow.exit_end);
        let finish = |st: &QuantumState, outcomes: &[(usize, usize)]| -> Result<f64> {
            let mut st = st.clone();
            for hop in flow.hops.iter().rev() {
                let idx = pairs
                    .iter()
                    .position(|&(b, u, v)| b == hop.bob && u == hop.u && v == hop.v)
                    .expect("path hop is a matched pair");
                let (zbit, xbit) = outcomes[idx];
                if xbit == 1 {
                    st = ops::apply(&st, &Unitary::new(gates::x(), &[&exit])?)?;
                }
                if zbit == 1 {
                    st = ops::apply(&st, &Unitary::new(gates::z(), &[&exit])?)?;
                }
            }
            Ok(omega_overlap(&reduced_matrix(&st, &["R", &exit])?))
        };
        let comp = Povm::computational(2, &["q"])?;
        let projector = |bit: usize| comp.elements()[bit].clone();
        match mode {
            MeasuredMode::Exact => {
                fn branch(
                    st: &QuantumState,
                    weight: f64,
                    depth: usize,
                    pairs: &[(bool, usize, usize)],
                    outcomes: &mut Vec<(usize, usize)>,
                    project: &dyn Fn(&QuantumState, &str, usize) -> Result<Option<(f64, QuantumState)>>,
                    names: &dyn Fn(bool, usize) -> String,
                    finish: &dyn Fn(&QuantumState, &[(usize, usize)]) -> Result<f64>,
                ) -> Result<f64> {
                    if depth == pairs.len() {
                        return Ok(weight * finish(st, outcomes)?);
                    }
                    let (bob, u, v) = pairs[depth];
                    let mut total = 0.0;
                    for zb in 0..2 {
                        let Some((pz, s1)) = project(st, &names(bob, u), zb)? else { continue };
                        for xb in 0..2 {
                            let Some((px, s2)) = project(&s1, &names(bob, v), xb)? else { continue };
                            outcomes.push((zb, xb));
                            total += branch(&s2, weight * pz * px, depth + 1, pairs, outcomes, project, names, finish)?;
                            outcomes.pop();
                        }
                    }
                    Ok(total)
                }
                let project = |st: &QuantumState, reg: &str, bit: usize| -> Result<Option<(f64, QuantumState)>> {
                    let p = Povm::two_outcome(projector(bit), &[reg])?;
                    let prob = ops::probabilities(st, &p)?[0];
                    if prob < 1e-14 {
                        return Ok(None);
                    }
                    Ok(Some((prob, ops::post_measurement(st, &p, 0)?)))
                };
                branch(&state, 1.0, 0, &pairs, &mut Vec::new(), &project, &name, &finish)
            }
            MeasuredMode::Sampled(stream) => {
                let mut rng = stream.rng();
                let mut outcomes = Vec::new();
                for &(bob, u, v) in &pairs {
                    let mut bits = [0usize; 2];
                    for (slot, e) in [u, v].into_iter().enumerate() {
                        let p = Povm::computational(2, &[&name(bob, e)])?;
                        let (b, post) = ops::measure_with(&state, &p, &mut rng)?;
                        bits[slot] = b;
                        state = post;
                    }
                    outcomes.push((bits[0], bits[1]));
                }
                finish(&state, &outcomes)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasuredMode {
    Exact,
    Sampled(SeedStream),
}

/// Three pipes computing `x XOR y` for one-bit inputs.
pub fn xor_protocol() -> GardenHose {
    GardenHose::new(3, vec![vec![(0, 1)], vec![(0, 2)]], vec![vec![(1, 3)], vec![(2, 3)]]).expect("valid matchings")
}

/// Two pipes computing `f(x, y) = y` for one-bit inputs.
pub fn second_input_protocol() -> GardenHose {
    GardenHose::new(2, vec![vec![(0, 1)], vec![(0, 1)]], vec![vec![(1, 2)], vec![]]).expect("valid matchings")
}

/// No pipes; the water never leaves Alice.
pub fn constant_zero_protocol(n: usize) -> GardenHose {
    GardenHose::new(0, vec![vec![]; 1 << n], vec![vec![]; 1 << n]).expect("valid matchings")
}
