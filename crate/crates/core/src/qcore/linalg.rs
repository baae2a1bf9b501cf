//! Dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues at or above this (negative) value are treated as zero.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Eigenvalues below this contribute nothing to entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`: ascending eigenvalues
/// and the matching eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let mut vecs = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vecs)
}

pub fn eigenvalues_hermitian(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Applies `g` to the spectrum of a Hermitian matrix.
pub fn spectral_map(m: &CMatrix, g: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for (k, &v) in vals.iter().enumerate() {
        let s = g(v);
        for i in 0..n {
            scaled[(i, k)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

/// Clips eigenvalues in `[-PSD_TOLERANCE, 0)` to zero; anything more
/// negative is clipped as well but the caller is expected to have validated.
pub fn clip(v: f64) -> f64 {
    v.max(0.0)
}

pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    spectral_map(m, |v| clip(v).sqrt())
}

/// Unitary maximizing `Re tr(U g)`.
pub fn polar_maximizer(g: &CMatrix) -> CMatrix {
    let svd = g.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    v_t.adjoint() * u.adjoint()
}

pub fn nuclear_norm(g: &CMatrix) -> f64 {
    g.clone().svd(false, false).singular_values.iter().sum()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

pub fn projector(v: &CVector) -> CMatrix {
    outer(v, v)
}

/// Kronecker product in little-endian index order: the result acts on
/// index `i_first + dim(first) * i_second`.
pub fn kron_le(first: &CMatrix, second: &CMatrix) -> CMatrix {
    second.kronecker(first)
}

pub fn kron_le_vec(first: &CVector, second: &CVector) -> CVector {
    second.kronecker(first)
}

/// Frobenius deviation of `U^dagger U` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (u.adjoint() * u - identity(u.nrows())).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermitian_eigen_reconstructs() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.5, 0.3),
                c(0.0, -1.0),
                c(0.5, -0.3),
                c(1.0, 0.0),
                c(0.2, 0.1),
                c(0.0, 1.0),
                c(0.2, -0.1),
                c(-0.5, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            3,
            vals.iter().map(|&v| c(v, 0.0)),
        ));
        let back = &vecs * d * vecs.adjoint();
        assert_abs_diff_eq!((back - &m).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(unitarity_defect(&vecs), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn polar_maximizer_beats_identity() {
        let g = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(0.3, 0.0), c(-1.0, 0.5)]);
        let u = polar_maximizer(&g);
        assert!(unitarity_defect(&u) < 1e-12);
        let best = trace(&(&u * &g)).re;
        assert_abs_diff_eq!(best, nuclear_norm(&g), epsilon = 1e-12);
        assert!(best >= trace(&g).re);
    }

    #[test]
    fn kron_little_endian() {
        let a = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let b = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        // first = |0>, second = |1>  ->  index 0 + 2*1 = 2
        let v = kron_le_vec(&a, &b);
        assert_eq!(v[2], c(1.0, 0.0));
    }
}
