//! Geometry of the states from which the routing attack can still succeed.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::entropic::perturb;
use super::report::{BoundReport, Extreme, Relation};
use crate::attacks::strategy::{Shape, A, ALICE_FINAL, B, BOB_FINAL, R};
use crate::error::{Error, Result};
use crate::protocol::run::{m1_accept_probability, m2_accept_probability};
use crate::qcore::info::{fidelity_matrices, purified_distance_from_fidelity};
use crate::qcore::layout::Split;
use crate::qcore::linalg::{self, c, CMatrix, CVector};
use crate::qcore::ops::{act_on_vector, reduced_matrix};
use crate::qcore::random::{haar_unitary_with, random_density_with, random_vector_with};
use crate::qcore::state::omega_vector;
use crate::qcore::{QuantumState, RegisterLayout};
use crate::rng::SeedStream;

pub const OVERLAP_BOUND: f64 = 0.5;
pub const ROUTE_EPSILON: f64 = 0.41;
pub const ROUTE_SEPARATION: f64 = 0.046;

/// Layout used by the routing checks: one qubit in every attacker register.
pub fn route_layout() -> RegisterLayout {
    Shape::symmetric(1, 1, 1).and_then(|s| s.layout()).expect("valid shape")
}

/// `|Omega>` on `R` and `out` tensored with `phi` on all other qubits (in
/// layout order).
pub fn omega_with(layout: &RegisterLayout, out: &str, phi: &CVector) -> Result<CVector> {
    let split = Split::new(layout, &[R, out])?;
    if phi.len() != split.rest_dim() {
        return Err(Error::DimensionMismatch {
            expected: split.rest_dim(),
            got: phi.len(),
        });
    }
    let w = omega_vector();
    let mut v = CVector::zeros(layout.dim());
    for (i, &wi) in w.iter().enumerate() {
        for (j, &pj) in phi.iter().enumerate() {
            v[split.keep[i] | split.rest[j]] = wi * pj;
        }
    }
    Ok(v)
}

/// A member of the set good for the verifier at 0 (`out = A`, undone by
/// `K` on Alice's final registers) or at 1 (`out = B`, `L` on Bob's).
pub fn good_state<Rn: Rng + ?Sized>(layout: &RegisterLayout, out: &str, rng: &mut Rn) -> Result<CVector> {
    let regs: &[&str] = if out == A { &ALICE_FINAL } else { &BOB_FINAL };
    let split = Split::new(layout, regs)?;
    let phi = random_vector_with(layout.dim() / 4, rng);
    let k = haar_unitary_with(split.keep_dim(), rng);
    Ok(act_on_vector(&omega_with(layout, out, &phi)?, &k.adjoint(), &split))
}

/// `|<psi_0|psi_1>| <= 1/2` for members of the two sets at zero error.
pub fn check_lemma_e1(trials: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let layout = route_layout();
    let stream = SeedStream::new(seed).named("lemma-e1");
    let worst = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Extreme<u64>> {
            let mut rng = stream.split(t as u64).rng();
            let a = good_state(&layout, A, &mut rng)?;
            let b = good_state(&layout, B, &mut rng)?;
            let mut e = Extreme::max();
            e.offer(a.dotc(&b).norm(), || t as u64);
            Ok(e)
        })
        .try_reduce(Extreme::max, |a, b| Ok(a.merge(b)))?;
    let witness = overlap_witness(&layout)?;
    Ok(vec![
        BoundReport::new(
            "lemma_e1",
            worst.value,
            Relation::Le,
            OVERLAP_BOUND,
            1e-9,
            trials,
            json!({"trial": worst.witness, "seed": seed}),
        ),
        BoundReport::new(
            "lemma_e1_witness",
            witness,
            Relation::Ge,
            OVERLAP_BOUND,
            1e-6,
            1,
            json!({"construction": "Omega_RA Omega_B,At vs Omega_RB Omega_A,At"}),
        ),
    ])
}

/// Overlap of `|Omega>_{RA} |Omega>_{B At}` with `|Omega>_{RB} |Omega>_{A At}`
/// (identity recovery maps): the bound is attained.
pub fn overlap_witness(layout: &RegisterLayout) -> Result<f64> {
    let (a, b) = witness_pair(layout)?;
    Ok(a.dotc(&b).norm())
}

/// The two states of [`overlap_witness`].
pub fn witness_pair(layout: &RegisterLayout) -> Result<(CVector, CVector)> {
    let pair = |p: &str, q: &str, out: &str| -> Result<CVector> {
        // Omega on (p, q) inside the complement of (R, out).
        let rest = Split::new(layout, &[R, out])?;
        let local = |name: &str| -> Result<usize> {
            let global = 1usize << layout.qubit_positions(&[name])?[0];
            (0..rest.rest_dim().trailing_zeros() as usize)
                .find(|&b| rest.rest[1 << b] == global)
                .ok_or_else(|| Error::InvalidArgument(format!("{name} overlaps R or {out}")))
        };
        let mut phi = CVector::zeros(rest.rest_dim());
        let w = std::f64::consts::FRAC_1_SQRT_2;
        phi[0] = c(w, 0.0);
        phi[(1 << local(p)?) | (1 << local(q)?)] = c(w, 0.0);
        omega_with(layout, out, &phi)
    };
    Ok((pair(B, "At", A)?, pair(A, "At", B)?))
}

/// Members of the two sets, each moved by purified distance at most
/// `epsilon`, stay at least `sqrt(3)/2 - 2 epsilon` apart.
pub fn check_low_fidelity_route(epsilon: f64, trials: usize, seed: u64) -> Result<BoundReport> {
    if !(0.0..=ROUTE_EPSILON).contains(&epsilon) {
        return Err(Error::OutOfRange {
            value: epsilon,
            expected: "[0, 0.41]",
        });
    }
    let layout = route_layout();
    let stream = SeedStream::new(seed).named("low-fidelity-route");
    let worst = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Extreme<(u64, f64, f64)>> {
            let mut rng = stream.split(t as u64).rng();
            // Half the samples sit exactly on the boundary of the ball.
            let radius = |rng: &mut rand_chacha::ChaCha20Rng| if t % 2 == 0 { epsilon } else { epsilon * rng.random::<f64>() };
            let (r0, r1) = (radius(&mut rng), radius(&mut rng));
            // Trial 0 starts from the pair with the largest possible overlap.
            let (a, b) = if t == 0 {
                witness_pair(&layout)?
            } else {
                (good_state(&layout, A, &mut rng)?, good_state(&layout, B, &mut rng)?)
            };
            let a = perturb(&a, r0, &mut rng);
            let b = perturb(&b, r1, &mut rng);
            let mut e = Extreme::min();
            e.offer(purified_distance_from_fidelity(a.dotc(&b).norm()), || (t as u64, r0, r1));
            Ok(e)
        })
        .try_reduce(Extreme::min, |a, b| Ok(a.merge(b)))?;
    let rhs = 3f64.sqrt() / 2.0 - 2.0 * epsilon;
    let (t, r0, r1) = worst.witness.unwrap_or((0, f64::NAN, f64::NAN));
    Ok(BoundReport::new(
        "low_fidelity_route",
        worst.value,
        Relation::Ge,
        rhs,
        1e-9,
        trials,
        json!({"trial": t, "epsilon": epsilon, "radii": [r0, r1], "seed": seed}),
    ))
}

/// The closest state of the form `|Omega>_{RA} |phi>` is at the purified
/// distance of the reduced state from `|Omega>`; the optimal `phi` is
/// `(<Omega| ⊗ I)|psi>`, normalized.
pub fn check_uhlmann(trials: usize, random_candidates: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let layout = RegisterLayout::new([("R", 1), ("A", 1), ("E", 2)])?;
    let split = Split::new(&layout, &[R, A])?;
    let omega = omega_vector();
    let stream = SeedStream::new(seed).named("uhlmann");
    let results = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(Extreme<u64>, Extreme<u64>)> {
            let mut rng = stream.split(t as u64).rng();
            let psi = random_vector_with(layout.dim(), &mut rng);
            let state = QuantumState::pure(layout.clone(), psi.clone())?;
            let rho = reduced_matrix(&state, &[R, A])?;
            let reduced = purified_distance_from_fidelity(fidelity_matrices(&rho, &linalg::projector(&omega)));
            let mut chi = CVector::zeros(split.rest_dim());
            for (j, slot) in chi.iter_mut().enumerate() {
                *slot = (0..4).map(|i| omega[i].conj() * psi[split.keep[i] | split.rest[j]]).sum();
            }
            let distance = |phi: &CVector| -> Result<f64> {
                let cand = omega_with(&layout, A, phi)?;
                Ok(purified_distance_from_fidelity(cand.dotc(&psi).norm()))
            };
            let norm = chi.norm();
            let optimal = distance(&chi.unscale(norm))?;
            let mut gap = Extreme::max();
            gap.offer((optimal - reduced).abs(), || t as u64);
            // No random candidate may beat the reduced-state distance.
            let mut undercut = Extreme::max();
            for _ in 0..random_candidates {
                let d = distance(&random_vector_with(split.rest_dim(), &mut rng))?;
                undercut.offer(reduced - d, || t as u64);
            }
            Ok((gap, undercut))
        })
        .try_reduce(|| (Extreme::max(), Extreme::max()), |a, b| Ok((a.0.merge(b.0), a.1.merge(b.1))))?;
    let (gap, undercut) = results;
    Ok(vec![
        BoundReport::new("uhlmann", gap.value, Relation::Le, 0.0, 1e-6, trials, json!({"trial": gap.witness, "seed": seed})),
        BoundReport::new(
            "uhlmann_random_candidates",
            undercut.value.max(f64::NEG_INFINITY),
            Relation::Le,
            0.0,
            1e-9,
            trials * random_candidates,
            json!({"trial": undercut.witness, "seed": seed}),
        ),
    ])
}

/// Weights of `rho` on the four Bell states `Omega, (01+10), (00-11),
/// (01-10)` (all over `sqrt 2`).
pub fn bell_weights(rho: &CMatrix) -> [f64; 4] {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let basis = [[w, 0.0, 0.0, w], [0.0, w, w, 0.0], [w, 0.0, 0.0, -w], [0.0, w, -w, 0.0]];
    basis.map(|b| {
        let v = CVector::from_iterator(4, b.iter().map(|&x| c(x, 0.0)));
        v.dotc(&(rho * &v)).re
    })
}

/// Both directions of the comparison between the Bell-projector check and
/// its basis-sampling replacement, on random two-qubit states.
pub fn check_m1_m2(trials: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let stream = SeedStream::new(seed).named("m1-m2");
    type W = (u64, [f64; 4]);
    let results = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(Extreme<W>, Extreme<W>, Extreme<W>)> {
            let mut rng = stream.split(t as u64).rng();
            let rank = rng.random_range(1..=4);
            let rho = random_density_with(4, rank, &mut rng);
            let m1 = m1_accept_probability(&rho)?;
            let m2 = m2_accept_probability(&rho)?;
            let p = bell_weights(&rho);
            // First direction: 1 - M1 <= d  implies  1 - M2 <= d, i.e. M2 >= M1.
            let mut first = Extreme::min();
            first.offer(m2 - m1, || (t as u64, p));
            // Second: 1 - M2 <= d  implies  1 - M1 <= 2d.
            let mut second = Extreme::min();
            second.offer(2.0 * (1.0 - m2) - (1.0 - m1), || (t as u64, p));
            let mut decomposition = Extreme::max();
            let err = (m1 - p[0]).abs().max((m2 - (p[0] + 0.5 * (p[1] + p[2]))).abs());
            decomposition.offer(err, || (t as u64, p));
            Ok((first, second, decomposition))
        })
        .try_reduce(
            || (Extreme::min(), Extreme::min(), Extreme::max()),
            |a, b| Ok((a.0.merge(b.0), a.1.merge(b.1), a.2.merge(b.2))),
        )?;
    let w = |e: &Extreme<W>| {
        let (t, p) = e.witness.unwrap_or((0, [f64::NAN; 4]));
        json!({"trial": t, "bell_weights": p, "seed": seed})
    };
    Ok(vec![
        BoundReport::new("m1_implies_m2", results.0.value, Relation::Ge, 0.0, 1e-9, trials, w(&results.0)),
        BoundReport::new("m2_implies_m1", results.1.value, Relation::Ge, 0.0, 1e-9, trials, w(&results.1)),
        BoundReport::new("m1_m2_decomposition", results.2.value, Relation::Le, 0.0, 1e-9, trials, w(&results.2)),
    ])
}
