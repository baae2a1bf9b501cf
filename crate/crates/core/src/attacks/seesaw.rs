//! See-saw search over two-phase attacks.
//!
//! Each success probability is a positive quadratic form in any single
//! unitary of the strategy, hence convex in it; replacing the unitary by the
//! polar maximizer of the linearized objective never decreases the value.
//! Two-outcome measurements are set to the Helstrom projector of the
//! weighted operator difference, and an optimized starting state to the top
//! eigenvector of the success operator: both are exact maximizations.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::execute::{basis_projector, AttackReport};
use super::strategy::*;
use crate::analysis::BooleanFunction;
use crate::error::{Error, Result};
use crate::qcore::layout::Split;
use crate::qcore::linalg::{self, CMatrix, CVector};
use crate::qcore::ops::{act_on_vector, split_matrix};
use crate::qcore::random::{haar_unitary_with, random_vector_with};
use crate::qcore::state::omega_vector;
use crate::qcore::{Povm, QuantumState, Unitary};
use crate::rng::SeedStream;

#[derive(Debug, Clone, PartialEq)]
pub enum StartMode {
    /// Keep this starting state.
    Fixed(QuantumState),
    /// `|Omega>_{RA}` times an optimized state on all other registers.
    Entangled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawConfig {
    pub kind: AttackKind,
    pub shape: Shape,
    pub start: StartMode,
    pub restarts: usize,
    pub iters: usize,
    /// Stop once a sweep improves the average by less than this.
    pub tolerance: f64,
}

impl SeesawConfig {
    pub fn new(kind: AttackKind, shape: Shape, start: StartMode) -> Self {
        Self {
            kind,
            shape,
            start,
            restarts: 20,
            iters: 500,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub average: f64,
    pub sweeps: usize,
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub strategy: AttackStrategy,
    pub report: AttackReport,
    /// Average success after initialization and after every sweep, for the
    /// winning restart.
    pub history: Vec<f64>,
    pub restarts: Vec<RestartSummary>,
}

struct Splits {
    alice_first: Split,
    bob_first: Split,
    alice_final: Split,
    bob_final: Split,
    ra: Split,
    rb: Split,
    r: Split,
}

struct Work<'a> {
    f: &'a BooleanFunction,
    kind: AttackKind,
    side: usize,
    sp: &'a Splits,
    psi: CVector,
    optimize_start: bool,
    u: Vec<CMatrix>,
    v: Vec<CMatrix>,
    /// `K` (route) or Alice's outcome-0 effect (meas), per pair.
    alice_fin: Vec<CMatrix>,
    /// `L` (route) or Bob's outcome-0 effect (meas), per pair.
    bob_fin: Vec<CMatrix>,
    omega: CMatrix,
    basis: [[CMatrix; 2]; 2],
}

fn random_projector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let u = haar_unitary_with(dim, rng);
    let mut p = CMatrix::zeros(dim, dim);
    let rank = rng.random_range(0..=dim);
    for k in 0..rank {
        let col = u.column(k).into_owned();
        p += linalg::projector(&col);
    }
    p
}

/// Projector onto the strictly positive eigenspace.
fn positive_part_projector(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = linalg::hermitian_eigen(m);
    let d = m.nrows();
    let mut p = CMatrix::zeros(d, d);
    for (k, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            let col = vecs.column(k).into_owned();
            p += linalg::projector(&col);
        }
    }
    p
}

fn complement(e: &CMatrix) -> CMatrix {
    linalg::identity(e.nrows()) - e
}

impl<'a> Work<'a> {
    fn value_of(&self, x: usize, y: usize) -> f64 {
        let p = x * self.side + y;
        let phi = act_on_vector(&act_on_vector(&self.psi, &self.u[x], &self.sp.alice_first), &self.v[y], &self.sp.bob_first);
        self.pair_operator(p, &phi).dotc(&phi).re
    }

    /// `O phi` where the pair's success is `<phi|O|phi>` after the first phase.
    fn pair_operator(&self, p: usize, phi: &CVector) -> CVector {
        let fval = self.f.table()[p];
        match self.kind {
            AttackKind::Route => {
                let (w, split, proj) = if fval {
                    (&self.bob_fin[p], &self.sp.bob_final, &self.sp.rb)
                } else {
                    (&self.alice_fin[p], &self.sp.alice_final, &self.sp.ra)
                };
                let a = act_on_vector(phi, w, split);
                let b = act_on_vector(&a, &self.omega, proj);
                act_on_vector(&b, &w.adjoint(), split)
            }
            AttackKind::Meas => {
                let mut out = CVector::zeros(phi.len());
                for z in 0..2 {
                    let (ea, eb) = if z == 0 {
                        (self.alice_fin[p].clone(), self.bob_fin[p].clone())
                    } else {
                        (complement(&self.alice_fin[p]), complement(&self.bob_fin[p]))
                    };
                    let a = act_on_vector(phi, &self.basis[fval as usize][z], &self.sp.r);
                    let b = act_on_vector(&a, &ea, &self.sp.alice_final);
                    out += act_on_vector(&b, &eb, &self.sp.bob_final);
                }
                out
            }
        }
    }

    fn average(&self) -> f64 {
        let mut s = 0.0;
        for x in 0..self.side {
            for y in 0..self.side {
                s += self.value_of(x, y);
            }
        }
        s / (self.side * self.side) as f64
    }

    fn update_u(&mut self, x: usize) {
        let base = split_matrix(&self.psi, &self.sp.alice_first);
        let phi0 = act_on_vector(&self.psi, &self.u[x], &self.sp.alice_first);
        let dk = self.sp.alice_first.keep_dim();
        let mut g = CMatrix::zeros(dk, dk);
        for y in 0..self.side {
            let a = act_on_vector(&phi0, &self.v[y], &self.sp.bob_first);
            let b = self.pair_operator(x * self.side + y, &a);
            let chi = act_on_vector(&b, &self.v[y].adjoint(), &self.sp.bob_first);
            g += &base * split_matrix(&chi, &self.sp.alice_first).adjoint();
        }
        self.u[x] = linalg::polar_maximizer(&g);
    }

    fn update_v(&mut self, y: usize) {
        let dk = self.sp.bob_first.keep_dim();
        let mut g = CMatrix::zeros(dk, dk);
        for x in 0..self.side {
            let phi = act_on_vector(&self.psi, &self.u[x], &self.sp.alice_first);
            let a = act_on_vector(&phi, &self.v[y], &self.sp.bob_first);
            let chi = self.pair_operator(x * self.side + y, &a);
            g += split_matrix(&phi, &self.sp.bob_first) * split_matrix(&chi, &self.sp.bob_first).adjoint();
        }
        self.v[y] = linalg::polar_maximizer(&g);
    }

    fn update_finale(&mut self, p: usize) {
        let (x, y) = (p / self.side, p % self.side);
        let phi = act_on_vector(&act_on_vector(&self.psi, &self.u[x], &self.sp.alice_first), &self.v[y], &self.sp.bob_first);
        let fval = self.f.table()[p];
        match self.kind {
            AttackKind::Route => {
                let (w, split, proj) = if fval {
                    (&self.bob_fin[p], &self.sp.bob_final, &self.sp.rb)
                } else {
                    (&self.alice_fin[p], &self.sp.alice_final, &self.sp.ra)
                };
                let chi = act_on_vector(&act_on_vector(&phi, w, split), &self.omega, proj);
                let g = split_matrix(&phi, split) * split_matrix(&chi, split).adjoint();
                let new = linalg::polar_maximizer(&g);
                if fval {
                    self.bob_fin[p] = new;
                } else {
                    self.alice_fin[p] = new;
                }
            }
            AttackKind::Meas => {
                for alice in [true, false] {
                    let (own, other_split) = if alice {
                        (&self.sp.alice_final, &self.sp.bob_final)
                    } else {
                        (&self.sp.bob_final, &self.sp.alice_final)
                    };
                    let other = if alice { &self.bob_fin[p] } else { &self.alice_fin[p] };
                    let phi_m = split_matrix(&phi, own);
                    let mut diff = CMatrix::zeros(own.keep_dim(), own.keep_dim());
                    for z in 0..2 {
                        let e = if z == 0 { other.clone() } else { complement(other) };
                        let w = act_on_vector(&act_on_vector(&phi, &self.basis[fval as usize][z], &self.sp.r), &e, other_split);
                        let o = split_matrix(&w, own) * phi_m.adjoint();
                        if z == 0 {
                            diff += o;
                        } else {
                            diff -= o;
                        }
                    }
                    let new = positive_part_projector(&linalg::hermitian_part(&diff));
                    if alice {
                        self.alice_fin[p] = new;
                    } else {
                        self.bob_fin[p] = new;
                    }
                }
            }
        }
    }

    /// Replaces the state on everything but `R A` by the top eigenvector of
    /// the averaged success operator.
    fn update_start(&mut self) {
        let dim = self.psi.len();
        let rest = dim / 4;
        let omega = omega_vector();
        let embed = |k: usize| -> CVector {
            let mut v = CVector::zeros(dim);
            for ra in 0..4 {
                v[ra | k << 2] = omega[ra];
            }
            v
        };
        let mut n = CMatrix::zeros(rest, rest);
        for k in 0..rest {
            let psi_k = embed(k);
            let mut w = CVector::zeros(dim);
            for x in 0..self.side {
                let a = act_on_vector(&psi_k, &self.u[x], &self.sp.alice_first);
                for y in 0..self.side {
                    let b = act_on_vector(&a, &self.v[y], &self.sp.bob_first);
                    let o = self.pair_operator(x * self.side + y, &b);
                    let back = act_on_vector(&act_on_vector(&o, &self.v[y].adjoint(), &self.sp.bob_first), &self.u[x].adjoint(), &self.sp.alice_first);
                    w += back;
                }
            }
            for l in 0..rest {
                n[(l, k)] = (0..4).map(|ra| omega[ra].conj() * w[ra | l << 2]).sum();
            }
        }
        let (_, vecs) = linalg::hermitian_eigen(&n);
        let top = vecs.column(rest - 1).into_owned();
        let mut psi = CVector::zeros(dim);
        for k in 0..rest {
            for ra in 0..4 {
                psi[ra | k << 2] = omega[ra] * top[k];
            }
        }
        let norm = psi.norm();
        self.psi = psi.unscale(norm);
    }

    fn sweep(&mut self, trace: &mut Option<Vec<f64>>) {
        let mut note = |w: &Self| {
            if let Some(t) = trace.as_mut() {
                t.push(w.average());
            }
        };
        for x in 0..self.side {
            self.update_u(x);
            note(self);
        }
        for y in 0..self.side {
            self.update_v(y);
            note(self);
        }
        for p in 0..self.side * self.side {
            self.update_finale(p);
            note(self);
        }
        if self.optimize_start {
            self.update_start();
            note(self);
        }
    }
}

fn splits(shape: &Shape) -> Result<Splits> {
    let l = shape.layout()?;
    Ok(Splits {
        alice_first: Split::new(&l, &ALICE_FIRST)?,
        bob_first: Split::new(&l, &BOB_FIRST)?,
        alice_final: Split::new(&l, &ALICE_FINAL)?,
        bob_final: Split::new(&l, &BOB_FINAL)?,
        ra: Split::new(&l, &[R, A])?,
        rb: Split::new(&l, &[R, B])?,
        r: Split::new(&l, &[R])?,
    })
}

struct RunOutcome {
    average: f64,
    sweeps: usize,
    history: Vec<f64>,
    psi: CVector,
    u: Vec<CMatrix>,
    v: Vec<CMatrix>,
    alice_fin: Vec<CMatrix>,
    bob_fin: Vec<CMatrix>,
    /// Values after every single update (only when tracing).
    steps: Option<Vec<f64>>,
}

fn run_once(f: &BooleanFunction, cfg: &SeesawConfig, sp: &Splits, stream: SeedStream, trace_steps: bool) -> Result<RunOutcome> {
    let shape = &cfg.shape;
    let mut rng = stream.rng();
    let side = shape.inputs();
    let (psi, optimize_start) = match &cfg.start {
        StartMode::Fixed(s) => (
            s.amplitudes()
                .cloned()
                .ok_or_else(|| Error::InvalidState("see-saw needs a pure starting state".into()))?,
            false,
        ),
        StartMode::Entangled => {
            let rest = random_vector_with(shape.layout()?.dim() / 4, &mut rng);
            (linalg::kron_le_vec(&omega_vector(), &rest), true)
        }
    };
    let q = shape.alice_first_dim();
    let u = (0..side).map(|_| haar_unitary_with(q, &mut rng)).collect();
    let v = (0..side).map(|_| haar_unitary_with(q, &mut rng)).collect();
    let (af, bf) = (shape.alice_final_dim(), shape.bob_final_dim());
    let (alice_fin, bob_fin) = match cfg.kind {
        AttackKind::Route => (
            (0..side * side).map(|_| haar_unitary_with(af, &mut rng)).collect(),
            (0..side * side).map(|_| haar_unitary_with(bf, &mut rng)).collect(),
        ),
        AttackKind::Meas => (
            (0..side * side).map(|_| random_projector(af, &mut rng)).collect(),
            (0..side * side).map(|_| random_projector(bf, &mut rng)).collect(),
        ),
    };
    let basis = [
        [basis_projector(false, 0), basis_projector(false, 1)],
        [basis_projector(true, 0), basis_projector(true, 1)],
    ];
    let mut w = Work {
        f,
        kind: cfg.kind,
        side,
        sp,
        psi,
        optimize_start,
        u,
        v,
        alice_fin,
        bob_fin,
        omega: linalg::projector(&omega_vector()),
        basis,
    };
    let mut history = vec![w.average()];
    let mut steps = trace_steps.then(|| vec![history[0]]);
    let mut sweeps = 0;
    for _ in 0..cfg.iters {
        w.sweep(&mut steps);
        sweeps += 1;
        let now = w.average();
        let prev = *history.last().expect("non-empty");
        history.push(now);
        if now - prev < cfg.tolerance {
            break;
        }
    }
    Ok(RunOutcome {
        average: *history.last().expect("non-empty"),
        sweeps,
        history,
        psi: w.psi,
        u: w.u,
        v: w.v,
        alice_fin: w.alice_fin,
        bob_fin: w.bob_fin,
        steps,
    })
}

fn to_strategy(cfg: &SeesawConfig, run: &RunOutcome) -> Result<AttackStrategy> {
    let shape = cfg.shape;
    let psi = QuantumState::normalized(shape.layout()?, run.psi.clone())?;
    let u = run
        .u
        .iter()
        .map(|m| Unitary::new(m.clone(), &ALICE_FIRST))
        .collect::<Result<Vec<_>>>()?;
    let v = run
        .v
        .iter()
        .map(|m| Unitary::new(m.clone(), &BOB_FIRST))
        .collect::<Result<Vec<_>>>()?;
    let finale = match cfg.kind {
        AttackKind::Route => Finale::Route {
            k: run
                .alice_fin
                .iter()
                .map(|m| Unitary::new(m.clone(), &ALICE_FINAL))
                .collect::<Result<_>>()?,
            l: run
                .bob_fin
                .iter()
                .map(|m| Unitary::new(m.clone(), &BOB_FINAL))
                .collect::<Result<_>>()?,
            responds: vec![[true, true]; shape.pairs()],
        },
        AttackKind::Meas => Finale::Meas {
            pi: run
                .alice_fin
                .iter()
                .map(|e| Povm::two_outcome(e.clone(), &ALICE_FINAL))
                .collect::<Result<_>>()?,
            sigma: run
                .bob_fin
                .iter()
                .map(|e| Povm::two_outcome(e.clone(), &BOB_FINAL))
                .collect::<Result<_>>()?,
        },
    };
    AttackStrategy::new(shape, psi, u, v, finale)
}

fn check_config(f: &BooleanFunction, cfg: &SeesawConfig) -> Result<()> {
    if f.n() != cfg.shape.n {
        return Err(Error::LengthMismatch {
            expected: cfg.shape.n,
            got: f.n(),
        });
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    if let StartMode::Fixed(s) = &cfg.start {
        if s.layout() != &cfg.shape.layout()? {
            return Err(Error::InvalidArgument("fixed starting state does not match the shape".into()));
        }
    }
    Ok(())
}

/// Best strategy over `restarts` independent see-saw chains (run in
/// parallel; the result does not depend on scheduling).
pub fn seesaw_optimize(f: &BooleanFunction, cfg: &SeesawConfig, stream: SeedStream) -> Result<SeesawResult> {
    check_config(f, cfg)?;
    let sp = splits(&cfg.shape)?;
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_once(f, cfg, &sp, stream.split(r as u64), false))
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.average > runs[b].average { i } else { b });
    let strategy = to_strategy(cfg, &runs[best])?;
    let successes = super::execute::pair_successes(&strategy, f)?;
    Ok(SeesawResult {
        report: AttackReport::from_successes(cfg.kind, f, &successes, None),
        strategy,
        history: runs[best].history.clone(),
        restarts: runs
            .iter()
            .enumerate()
            .map(|(index, r)| RestartSummary {
                index,
                average: r.average,
                sweeps: r.sweeps,
            })
            .collect(),
    })
}

/// Average success after every individual update of a single chain.
pub fn seesaw_trace(f: &BooleanFunction, cfg: &SeesawConfig, stream: SeedStream) -> Result<Vec<f64>> {
    check_config(f, cfg)?;
    let sp = splits(&cfg.shape)?;
    Ok(run_once(f, cfg, &sp, stream, true)?.steps.expect("tracing enabled"))
}

/// Maximizes `<Omega| rho_{R,out} |Omega>` over a unitary on one attacker's
/// final registers by repeated polar updates. Returns the maximum found.
pub(crate) fn maximize_omega_overlap(
    phi: &CVector,
    fin: &Split,
    proj: &Split,
    restarts: usize,
    iters: usize,
    stream: SeedStream,
) -> f64 {
    let omega = linalg::projector(&omega_vector());
    let dk = fin.keep_dim();
    let value = |k: &CMatrix| {
        let a = act_on_vector(phi, k, fin);
        act_on_vector(&a, &omega, proj).norm_squared()
    };
    let phi_m = split_matrix(phi, fin);
    (0..restarts)
        .map(|r| {
            let mut rng = stream.split(r as u64).rng();
            let mut k = if r == 0 { linalg::identity(dk) } else { haar_unitary_with(dk, &mut rng) };
            let mut best = value(&k);
            for _ in 0..iters {
                let chi = act_on_vector(&act_on_vector(phi, &k, fin), &omega, proj);
                k = linalg::polar_maximizer(&(&phi_m * split_matrix(&chi, fin).adjoint()));
                let now = value(&k);
                let done = now - best < 1e-13;
                best = best.max(now);
                if done {
                    break;
                }
            }
            best
        })
        .fold(0.0, f64::max)
        .min(1.0)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::boolean::first_bit_of_x;
    use crate::attacks::strategy::standard_start;

    fn quick(kind: AttackKind, shape: Shape, start: StartMode) -> SeesawConfig {
        SeesawConfig {
            restarts: 4,
            iters: 200,
            ..SeesawConfig::new(kind, shape, start)
        }
    }

    #[test]
    fn every_update_is_monotone() {
        let f = BooleanFunction::from_bits(1, "0111").unwrap();
        for kind in [AttackKind::Route, AttackKind::Meas] {
            let shape = Shape::symmetric(1, 0, 1).unwrap();
            let cfg = quick(kind, shape, StartMode::Entangled);
            let steps = seesaw_trace(&f, &cfg, SeedStream::new(11)).unwrap();
            for w in steps.windows(2) {
                assert!(w[1] >= w[0] - 1e-10, "{kind:?}: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn constant_and_local_functions_are_solved() {
        let zero = BooleanFunction::constant(1, false).unwrap();
        let shape = Shape::symmetric(1, 0, 1).unwrap();
        let start = StartMode::Fixed(standard_start(&shape).unwrap());
        let r = seesaw_optimize(&zero, &quick(AttackKind::Route, shape, start.clone()), SeedStream::new(1)).unwrap();
        assert!(r.report.average >= 1.0 - 1e-6, "{}", r.report.average);
        let local = first_bit_of_x(1).unwrap();
        let r = seesaw_optimize(&local, &quick(AttackKind::Route, shape, start), SeedStream::new(2)).unwrap();
        assert!(r.report.average >= 1.0 - 1e-6, "{}", r.report.average);
    }

    #[test]
    fn reported_value_matches_executor() {
        let f = BooleanFunction::from_bits(1, "0001").unwrap();
        let shape = Shape::symmetric(1, 0, 1).unwrap();
        let r = seesaw_optimize(&f, &quick(AttackKind::Meas, shape, StartMode::Entangled), SeedStream::new(5)).unwrap();
        let best = r.restarts.iter().map(|s| s.average).fold(0.0, f64::max);
        assert!((r.report.average - best).abs() < 1e-9);
        assert!((r.history.last().unwrap() - best).abs() < 1e-9);
    }

    #[test]
    fn mismatched_config_is_rejected() {
        let f = BooleanFunction::constant(2, false).unwrap();
        let shape = Shape::symmetric(1, 0, 0).unwrap();
        assert!(seesaw_optimize(&f, &quick(AttackKind::Route, shape, StartMode::Entangled), SeedStream::new(0)).is_err());
    }
}
