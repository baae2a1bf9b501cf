use rand::Rng;
use rand_distr::StandardNormal;

use super::layout::RegisterLayout;
use super::linalg::{c, CMatrix, CVector};
use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::rng::SeedStream;

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_random_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    if !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("dimension {dim} is not a power of two")));
    }
    Ok(haar_unitary_with(dim, &mut SeedStream::new(seed).rng()))
}

/// Uniformly random unit vector.
pub fn random_vector_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_iterator(dim, ginibre(dim, 1, rng).iter().copied());
    let n = v.norm();
    v.unscale(n)
}

pub fn random_state_with<R: Rng + ?Sized>(layout: &RegisterLayout, rng: &mut R) -> QuantumState {
    QuantumState::pure(layout.clone(), random_vector_with(layout.dim(), rng)).expect("unit vector")
}

pub fn random_pure_state(layout: &RegisterLayout, seed: u64) -> QuantumState {
    random_state_with(layout, &mut SeedStream::new(seed).rng())
}

/// Random density matrix of the given rank (`G G^dagger / tr`).
pub fn random_density_with<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    m.unscale(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::unitarity_defect;

    #[test]
    fn haar_is_unitary_and_deterministic() {
        let a = haar_random_unitary(8, 11).unwrap();
        let b = haar_random_unitary(8, 11).unwrap();
        assert_eq!(a, b);
        assert!(unitarity_defect(&a) < 1e-12);
        for j in 0..8 {
            assert!((a.column(j).norm() - 1.0).abs() < 1e-10);
        }
        assert!(haar_random_unitary(6, 0).is_err());
    }

    #[test]
    fn density_is_normalized() {
        let m = random_density_with(4, 2, &mut SeedStream::new(1).rng());
        assert!((m.trace().re - 1.0).abs() < 1e-14);
    }
}
