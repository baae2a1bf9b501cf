use std::sync::Arc;

use crate::attacks::AttackStrategy;
use crate::qcore::linalg::{c, kron_le, CMatrix};
use crate::qcore::gates;

/// Who answers the verifiers.
#[derive(Debug, Clone, PartialEq)]
pub enum Prover {
    Honest,
    /// Honest processing, but the answer goes to the other verifier.
    WrongVerifier,
    /// Applies `X` to the qubit, then behaves honestly.
    ApplyX,
    /// Throws the qubit away and forwards a fresh `|0>`.
    DiscardSendZero,
    /// Measures the qubit in the computational basis and forwards the
    /// post-measurement state.
    MeasureComputational,
    /// Measuring protocol only: answers a uniformly random bit.
    RandomBit,
    /// Measuring protocol only: measures in the basis `1 - f(x, y)`.
    WrongBasis,
    /// Honest, but answers `dt` after receiving both challenges.
    Delayed(f64),
    /// Honest, but sits at this position instead of the claimed one.
    FromPosition(f64),
    /// Passes each round independently with this probability.
    Synthetic(f64),
    /// Two attackers running a two-phase strategy.
    Attack(Arc<AttackStrategy>),
}

impl Prover {
    /// Kraus operators of what the prover does to the qubit before
    /// answering.
    pub(crate) fn channel(&self) -> Vec<CMatrix> {
        let m = |a: [f64; 4]| CMatrix::from_row_slice(2, 2, &a.map(|v| c(v, 0.0)));
        match self {
            Prover::ApplyX => vec![gates::x()],
            Prover::DiscardSendZero => vec![m([1.0, 0.0, 0.0, 0.0]), m([0.0, 1.0, 0.0, 0.0])],
            Prover::MeasureComputational => vec![m([1.0, 0.0, 0.0, 0.0]), m([0.0, 0.0, 0.0, 1.0])],
            _ => vec![CMatrix::identity(2, 2)],
        }
    }

    pub fn label(&self) -> String {
        match self {
            Prover::Honest => "honest".into(),
            Prover::WrongVerifier => "wrong_verifier".into(),
            Prover::ApplyX => "apply_x".into(),
            Prover::DiscardSendZero => "discard_send_zero".into(),
            Prover::MeasureComputational => "measure_computational".into(),
            Prover::RandomBit => "random_bit".into(),
            Prover::WrongBasis => "wrong_basis".into(),
            Prover::Delayed(dt) => format!("delayed({dt})"),
            Prover::FromPosition(z) => format!("from_position({z})"),
            Prover::Synthetic(p) => format!("synthetic({p})"),
            Prover::Attack(_) => "attack".into(),
        }
    }
}

/// Depolarizing noise `rho -> (1 - eta) rho + eta I/2` as Kraus operators.
pub(crate) fn depolarizing(eta: f64) -> Vec<CMatrix> {
    let w = (eta / 4.0).sqrt();
    vec![
        CMatrix::identity(2, 2) * c((1.0 - 3.0 * eta / 4.0).sqrt(), 0.0),
        gates::x() * c(w, 0.0),
        gates::y() * c(w, 0.0),
        gates::z() * c(w, 0.0),
    ]
}

/// Applies a channel on the second qubit of a two-qubit density matrix.
pub(crate) fn on_second(rho: &CMatrix, kraus: &[CMatrix]) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    kraus.iter().fold(CMatrix::zeros(4, 4), |acc, k| {
        let full = kron_le(&id, k);
        acc + &full * rho * full.adjoint()
    })
}
