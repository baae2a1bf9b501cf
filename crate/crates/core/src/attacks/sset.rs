//! Membership oracles for the sets of post-exchange states from which the
//! attackers can still answer correctly: `S0` (the verifier at 0 must be
//! satisfied, computational basis for measuring) and `S1` (the verifier at
//! 1, Hadamard basis).

use serde::{Deserialize, Serialize};

use super::execute::basis_projector;
use super::seesaw::maximize_omega_overlap;
use super::strategy::*;
use crate::error::{Error, Result};
use crate::qcore::layout::Split;
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::ops::reduced_matrix;
use crate::qcore::QuantumState;
use crate::rng::SeedStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    S0,
    S1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetMembership {
    pub which: Which,
    pub kind: AttackKind,
    pub epsilon: f64,
    /// Route: smallest purified distance to `|Omega>` found. Meas: the
    /// smaller of the two optimal guessing probabilities.
    pub figure: f64,
    pub member: bool,
}

const RESTARTS: usize = 8;
const ITERS: usize = 400;

/// Best probability of guessing the outcome of measuring `R` in `basis`
/// from the registers `side`, by the Helstrom measurement.
pub fn guessing_probability(state: &QuantumState, basis: bool, side: &[&str]) -> Result<f64> {
    let mut keep = vec![R];
    keep.extend_from_slice(side);
    let rho = reduced_matrix(state, &keep)?;
    let d = rho.nrows() / 2;
    let mut diff = CMatrix::zeros(d, d);
    for z in 0..2 {
        let p = basis_projector(basis, z);
        let sign = if z == 0 { 1.0 } else { -1.0 };
        for i in 0..d {
            for j in 0..d {
                let mut s = linalg::c(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        s += p[(a, b)] * rho[(b | i << 1, a | j << 1)];
                    }
                }
                diff[(i, j)] += s * sign;
            }
        }
    }
    Ok((0.5 + 0.5 * linalg::nuclear_norm(&linalg::hermitian_part(&diff))).min(1.0))
}

pub fn s_set_distance(state: &QuantumState, which: Which, kind: AttackKind, epsilon: f64, stream: SeedStream) -> Result<SetMembership> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange {
            value: epsilon,
            expected: "[0, 1]",
        });
    }
    let layout = state.layout();
    let figure = match kind {
        AttackKind::Route => {
            let phi = state
                .amplitudes()
                .ok_or_else(|| Error::InvalidState("set membership is defined for pure states".into()))?;
            let (fin, out): (&[&str], &str) = match which {
                Which::S0 => (&ALICE_FINAL, A),
                Which::S1 => (&BOB_FINAL, B),
            };
            let overlap = maximize_omega_overlap(
                phi,
                &Split::new(layout, fin)?,
                &Split::new(layout, &[R, out])?,
                RESTARTS,
                ITERS,
                stream,
            );
            (1.0 - overlap).max(0.0).sqrt()
        }
        AttackKind::Meas => {
            let basis = which == Which::S1;
            let alice = guessing_probability(state, basis, &ALICE_FINAL)?;
            let bob = guessing_probability(state, basis, &BOB_FINAL)?;
            alice.min(bob)
        }
    };
    let member = match kind {
        AttackKind::Route => figure <= epsilon + 1e-9,
        AttackKind::Meas => figure >= 1.0 - epsilon * epsilon - 1e-9,
    };
    Ok(SetMembership {
        which,
        kind,
        epsilon,
        figure,
        member,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::kron_le_vec;
    use crate::qcore::state::QuantumState;

    fn shape() -> Shape {
        Shape::symmetric(1, 1, 1).unwrap()
    }

    #[test]
    fn omega_on_ra_is_in_s0() {
        let s = standard_start(&shape()).unwrap();
        let m = s_set_distance(&s, Which::S0, AttackKind::Route, 0.0, SeedStream::new(0)).unwrap();
        assert!(m.member && m.figure < 1e-7);
    }

    #[test]
    fn omega_on_rb_is_far_from_s0() {
        // |Omega>_{RB}: R at bit 0, B at bit 4 of the 7-qubit layout.
        let layout = shape().layout().unwrap();
        let mut v = linalg::CVector::zeros(layout.dim());
        let w = std::f64::consts::FRAC_1_SQRT_2;
        v[0] = linalg::c(w, 0.0);
        v[1 | 1 << 4] = linalg::c(w, 0.0);
        let s = QuantumState::pure(layout, v).unwrap();
        let m1 = s_set_distance(&s, Which::S1, AttackKind::Route, 0.0, SeedStream::new(1)).unwrap();
        assert!(m1.member);
        let m0 = s_set_distance(&s, Which::S0, AttackKind::Route, 0.5, SeedStream::new(1)).unwrap();
        assert!(m0.figure >= 3f64.sqrt() / 2.0 - 1e-9, "{}", m0.figure);
        assert!(!m0.member);
    }

    #[test]
    fn uncorrelated_reference_cannot_be_guessed() {
        // R in |+>, uncorrelated: computational outcomes are unguessable.
        let layout = shape().layout().unwrap();
        let plus = crate::qcore::state::bb84_vector(2).unwrap();
        let mut rest = linalg::CVector::zeros(layout.dim() / 2);
        rest[0] = linalg::c(1.0, 0.0);
        let s = QuantumState::pure(layout, kron_le_vec(&plus, &rest)).unwrap();
        let m = s_set_distance(&s, Which::S0, AttackKind::Meas, 0.5, SeedStream::new(0)).unwrap();
        assert!((m.figure - 0.5).abs() < 1e-12);
        assert!(!m.member);
    }
}
