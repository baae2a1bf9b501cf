//! Entropic inequalities: the uncertainty relation for conjugate bases,
//! continuity of conditional entropy, Fano-type guessing bounds, and the
//! separation of states good for opposite bases.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::{BoundReport, Extreme, Relation};
use crate::attacks::execute::basis_projector;
use crate::error::{Error, Result};
use crate::qcore::info::{binary_entropy, entropy_matrix, purified_distance_from_fidelity};
use crate::qcore::linalg::{self, c, kron_le, CMatrix, CVector};
use crate::qcore::ops::reduced_matrix;
use crate::qcore::random::{haar_unitary_with, random_vector_with};
use crate::qcore::{QuantumState, RegisterLayout};
use crate::rng::SeedStream;

pub const CIT_TOLERANCE: f64 = 1e-7;
pub const AFW_DISTANCE: f64 = 0.013;
pub const AFW_BOUND: f64 = 0.127;
/// Guessing error `0.3^2` that defines the entropy premise of the
/// measuring-protocol separation.
pub const MEAS_EPSILON: f64 = 0.3;
pub const MEAS_SEPARATION: f64 = 0.013;

/// `H(Z|S)` where `Z` is the outcome of measuring the one-qubit register
/// `target` in the computational (`basis = false`) or Hadamard basis.
pub fn measured_conditional_entropy(state: &QuantumState, target: &str, basis: bool, side: &[&str]) -> Result<f64> {
    if state.layout().width(target)? != 1 {
        return Err(Error::InvalidArgument(format!("{target} must be a single qubit")));
    }
    let mut keep = vec![target];
    keep.extend_from_slice(side);
    let rho = reduced_matrix(state, &keep)?;
    let d = rho.nrows() / 2;
    let id = linalg::identity(d);
    let mut dephased = CMatrix::zeros(2 * d, 2 * d);
    for z in 0..2 {
        let p = kron_le(&basis_projector(basis, z), &id);
        dephased += &p * &rho * &p;
    }
    let side_rho = CMatrix::from_fn(d, d, |i, j| rho[(i << 1, j << 1)] + rho[(1 | i << 1, 1 | j << 1)]);
    Ok(entropy_matrix(&dephased) - entropy_matrix(&side_rho))
}

fn cit_layout(dims: (usize, usize)) -> Result<RegisterLayout> {
    let width = |d: usize| -> Result<usize> {
        match d {
            1 => Ok(0),
            2 => Ok(1),
            4 => Ok(2),
            _ => Err(Error::OutOfRange {
                value: d as f64,
                expected: "dimension 1, 2 or 4",
            }),
        }
    };
    RegisterLayout::new([("R", 1), ("E", width(dims.0)?), ("F", width(dims.1)?)])
}

/// Both sums `H(Z_theta|E) + H(Z_theta'|F)` for the two basis pairings.
pub fn cit_sums(state: &QuantumState) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (k, theta) in [false, true].into_iter().enumerate() {
        out[k] = measured_conditional_entropy(state, "R", theta, &["E"])? + measured_conditional_entropy(state, "R", !theta, &["F"])?;
    }
    Ok(out)
}

/// Uncertainty relation with quantum side information on Haar-random
/// tripartite states.
pub fn check_cit(trials: usize, dims: (usize, usize), seed: u64) -> Result<BoundReport> {
    let layout = cit_layout(dims)?;
    let stream = SeedStream::new(seed).named("cit");
    let worst = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Extreme<(u64, [f64; 2])>> {
            let mut rng = stream.split(t as u64).rng();
            let psi = QuantumState::pure(layout.clone(), random_vector_with(layout.dim(), &mut rng))?;
            let sums = cit_sums(&psi)?;
            let mut e = Extreme::min();
            e.offer(sums[0].min(sums[1]), || (t as u64, sums));
            Ok(e)
        })
        .try_reduce(Extreme::min, |a, b| Ok(a.merge(b)))?;
    let (t, sums) = worst.witness.unwrap_or((0, [f64::NAN; 2]));
    Ok(BoundReport::new(
        "cit",
        worst.value,
        Relation::Ge,
        1.0,
        CIT_TOLERANCE,
        trials,
        json!({"trial": t, "sums": sums, "dims": [dims.0, dims.1], "seed": seed}),
    ))
}

/// `2 d + (1 + d) h(1 / (1 + d))`, the continuity bound for conditional
/// entropy of a qubit at trace distance `d`.
pub fn afw_value(d: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    2.0 * d + (1.0 + d) * binary_entropy(1.0 / (1.0 + d)).expect("in range")
}

pub fn check_afw() -> BoundReport {
    BoundReport::new(
        "afw_constant",
        afw_value(AFW_DISTANCE),
        Relation::Le,
        AFW_BOUND,
        0.0,
        1,
        json!({"distance": AFW_DISTANCE}),
    )
}

/// A unit vector at purified distance exactly `p` from `v`.
pub(crate) fn perturb<R: Rng + ?Sized>(v: &CVector, p: f64, rng: &mut R) -> CVector {
    let mut w = random_vector_with(v.len(), rng);
    let along = v.dotc(&w);
    w -= v * along;
    let n = w.norm();
    if n < 1e-12 {
        return v.clone();
    }
    let w = w.unscale(n);
    v * c((1.0 - p * p).max(0.0).sqrt(), 0.0) + w * c(p, 0.0)
}

/// Monte-Carlo companion of [`check_afw`]: pairs of pure states on
/// `R E E'` within purified distance 0.013 have `|H(R|E) - H(R|E)'| <= 0.127`.
pub fn check_afw_sampled(trials: usize, seed: u64) -> Result<BoundReport> {
    let layout = RegisterLayout::new([("R", 1), ("E", 2), ("P", 2)])?;
    let stream = SeedStream::new(seed).named("afw");
    let worst = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Extreme<(u64, f64, f64)>> {
            let mut rng = stream.split(t as u64).rng();
            let v = random_vector_with(layout.dim(), &mut rng);
            let dist = AFW_DISTANCE * rng.random::<f64>().sqrt();
            let w = perturb(&v, dist, &mut rng);
            let a = QuantumState::pure(layout.clone(), v)?;
            let b = QuantumState::pure(layout.clone(), w)?;
            let ha = crate::qcore::info::conditional_entropy(&a, &["R"], &["E"])?;
            let hb = crate::qcore::info::conditional_entropy(&b, &["R"], &["E"])?;
            let mut e = Extreme::max();
            e.offer((ha - hb).abs(), || (t as u64, dist, ha));
            Ok(e)
        })
        .try_reduce(Extreme::max, |a, b| Ok(a.merge(b)))?;
    let (t, dist, h) = worst.witness.unwrap_or((0, f64::NAN, f64::NAN));
    Ok(BoundReport::new(
        "afw_sampled",
        worst.value,
        Relation::Le,
        AFW_BOUND,
        0.0,
        trials,
        json!({"trial": t, "distance": dist, "conditional_entropy": h, "seed": seed}),
    ))
}

/// A state in which register `side` lets its holder guess the outcome of
/// measuring `R` in `basis` with error exactly `err`, built as
/// `sum_z a_z |z_basis>_R (sqrt(1-err)|z> + sqrt(err)|1-z>)_W |j_z>` with
/// `W` the first qubit of `side`, `j_z` random on the remaining qubits,
/// and a random local unitary on `side` on top.
pub(crate) fn guessable_state<R: Rng + ?Sized>(
    layout: &RegisterLayout,
    side: &str,
    basis: bool,
    err: f64,
    amplitudes: [f64; 2],
    rng: &mut R,
) -> Result<CVector> {
    let side_off = layout.offset(side)?;
    let side_w = layout.width(side)?;
    if side_off == 0 || side_w == 0 || layout.offset("R")? != 0 {
        return Err(Error::InvalidArgument("layout must start with R and have a non-empty side register".into()));
    }
    let total = layout.total_qubits();
    let rest_q = total - 1 - 1;
    let mut v = CVector::zeros(layout.dim());
    for z in 0..2usize {
        let r = basis_vector(basis, z);
        let junk = random_vector_with(1 << rest_q, rng);
        let w = [((1.0 - err).sqrt(), z), (err.sqrt(), 1 - z)];
        for (ra, &rv) in r.iter().enumerate() {
            for &(wa, wbit) in &w {
                for (k, &jv) in junk.iter().enumerate() {
                    // Place W at the side register's first qubit and the
                    // junk bits on every other non-R qubit, in order.
                    let mut idx = ra | wbit << side_off;
                    let mut bit = 0;
                    for q in 1..total {
                        if q == side_off {
                            continue;
                        }
                        idx |= ((k >> bit) & 1) << q;
                        bit += 1;
                    }
                    v[idx] += rv * jv * c(wa * amplitudes[z], 0.0);
                }
            }
        }
    }
    let u = haar_unitary_with(1 << side_w, rng);
    let split = crate::qcore::layout::Split::new(layout, &[side])?;
    let v = crate::qcore::ops::act_on_vector(&v, &u, &split);
    let n = v.norm();
    Ok(v.unscale(n))
}

fn basis_vector(basis: bool, z: usize) -> CVector {
    crate::qcore::state::bb84_vector(2 * basis as usize + z).expect("index < 4")
}

fn random_amplitudes<R: Rng + ?Sized>(rng: &mut R) -> [f64; 2] {
    let t: f64 = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
    [t.cos(), t.sin()]
}

/// Side information that guesses `Z` with error at most `eps^2` leaves
/// `H(Z|side) <= h(eps^2)`.
pub fn check_fano_chain(epsilon: f64, trials: usize, seed: u64) -> Result<BoundReport> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange {
            value: epsilon,
            expected: "[0, 1]",
        });
    }
    let e2 = epsilon * epsilon;
    let bound = binary_entropy(e2.min(0.5))?;
    let layout = RegisterLayout::new([("R", 1), ("S", 2), ("O", 1)])?;
    let stream = SeedStream::new(seed).named("fano");
    let worst = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Extreme<(u64, f64)>> {
            let mut rng = stream.split(t as u64).rng();
            let err = e2.min(0.5) * rng.random::<f64>();
            let basis = rng.random::<bool>();
            let amps = random_amplitudes(&mut rng);
            let v = guessable_state(&layout, "S", basis, err, amps, &mut rng)?;
            let s = QuantumState::pure(layout.clone(), v)?;
            let h = measured_conditional_entropy(&s, "R", basis, &["S"])?;
            let mut e = Extreme::max();
            e.offer(h, || (t as u64, err));
            Ok(e)
        })
        .try_reduce(Extreme::max, |a, b| Ok(a.merge(b)))?;
    let (t, err) = worst.witness.unwrap_or((0, f64::NAN));
    Ok(BoundReport::new(
        "fano_chain",
        worst.value,
        Relation::Le,
        bound,
        1e-9,
        trials,
        json!({"trial": t, "guess_error": err, "epsilon": epsilon, "seed": seed}),
    ))
}

/// States from which one side reads the computational outcome and states
/// from which the other side reads the Hadamard outcome, each with
/// conditional entropy at most `h(0.09)`, are more than 0.013 apart.
pub fn check_meas_disjoint(trials: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let delta = binary_entropy(MEAS_EPSILON * MEAS_EPSILON)?;
    let layout = RegisterLayout::new([("R", 1), ("E", 2), ("F", 2)])?;
    let stream = SeedStream::new(seed).named("meas-disjoint");
    type W = (u64, f64, f64);
    let results = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(Extreme<W>, Extreme<W>, usize)> {
            let mut rng = stream.split(t as u64).rng();
            let e0 = MEAS_EPSILON * MEAS_EPSILON * rng.random::<f64>();
            let e1 = MEAS_EPSILON * MEAS_EPSILON * rng.random::<f64>();
            let a0 = random_amplitudes(&mut rng);
            let a1 = random_amplitudes(&mut rng);
            let v0 = guessable_state(&layout, "E", false, e0, a0, &mut rng)?;
            let v1 = guessable_state(&layout, "F", true, e1, a1, &mut rng)?;
            let s0 = QuantumState::pure(layout.clone(), v0.clone())?;
            let s1 = QuantumState::pure(layout.clone(), v1.clone())?;
            let h0 = measured_conditional_entropy(&s0, "R", false, &["E"])?;
            let h1x = measured_conditional_entropy(&s1, "R", true, &["F"])?;
            let mut dist = Extreme::min();
            let mut gap = Extreme::min();
            // Premises are re-verified; a sample failing them is vacuous.
            if h0 > delta + 1e-12 || h1x > delta + 1e-12 {
                return Ok((dist, gap, 1));
            }
            let h1z = measured_conditional_entropy(&s1, "R", false, &["E"])?;
            let p = purified_distance_from_fidelity(v0.dotc(&v1).norm());
            dist.offer(p, || (t as u64, h0, h1z));
            gap.offer(h1z - h0, || (t as u64, h0, h1z));
            Ok((dist, gap, 0))
        })
        .try_reduce(
            || (Extreme::min(), Extreme::min(), 0),
            |a, b| Ok((a.0.merge(b.0), a.1.merge(b.1), a.2 + b.2)),
        )?;
    let (dist, gap, vacuous) = results;
    let witness = |e: &Extreme<W>| {
        let (t, h0, h1) = e.witness.unwrap_or((0, f64::NAN, f64::NAN));
        json!({"trial": t, "h_comp_given_e_first": h0, "h_comp_given_e_second": h1, "vacuous": vacuous, "seed": seed})
    };
    Ok(vec![
        BoundReport::new("meas_disjoint", dist.value, Relation::Gt, MEAS_SEPARATION, 0.0, trials, witness(&dist)),
        BoundReport::new("meas_entropy_gap", gap.value, Relation::Ge, 1.0 - 2.0 * delta, 1e-9, trials, witness(&gap)),
    ])
}
