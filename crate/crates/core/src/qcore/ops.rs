use rand::Rng;

use super::layout::{RegisterLayout, Split, MAX_MIXED_QUBITS};
use super::linalg::{self, c, CMatrix, CVector, C64, PSD_TOLERANCE};
use super::state::{QuantumState, StateData};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

pub const UNITARY_TOLERANCE: f64 = 1e-10;
pub const POVM_TOLERANCE: f64 = 1e-10;

fn check_power_of_two(m: &CMatrix) -> Result<()> {
    if !m.is_square() || !m.nrows().is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows().next_power_of_two(),
            got: m.ncols(),
        });
    }
    Ok(())
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// A unitary acting on a list of registers. The local basis index is
/// little-endian over `acts_on`: the first named register is least significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: CMatrix,
    acts_on: Vec<String>,
}

impl Unitary {
    pub fn new(matrix: CMatrix, acts_on: &[&str]) -> Result<Self> {
        check_power_of_two(&matrix)?;
        let defect = linalg::unitarity_defect(&matrix);
        if defect > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self {
            matrix,
            acts_on: owned(acts_on),
        })
    }

    pub fn identity(dim: usize, acts_on: &[&str]) -> Result<Self> {
        Self::new(linalg::identity(dim), acts_on)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn acts_on(&self) -> Vec<&str> {
        self.acts_on.iter().map(String::as_str).collect()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            acts_on: self.acts_on.clone(),
        }
    }

    /// `other` after `self`, on the same registers.
    pub fn then(&self, other: &Unitary) -> Result<Self> {
        if self.acts_on != other.acts_on {
            return Err(Error::InvalidArgument("composed unitaries act on different registers".into()));
        }
        Ok(Self {
            matrix: &other.matrix * &self.matrix,
            acts_on: self.acts_on.clone(),
        })
    }
}

/// A POVM on a list of registers; element `k` corresponds to outcome `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
    acts_on: Vec<String>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>, acts_on: &[&str]) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        check_power_of_two(first)?;
        let d = first.nrows();
        let mut sum = CMatrix::zeros(d, d);
        for e in &elements {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::InvalidPovm("element dimensions differ".into()));
            }
            if (e - e.adjoint()).norm() > POVM_TOLERANCE {
                return Err(Error::InvalidPovm("element not Hermitian".into()));
            }
            let min = linalg::eigenvalues_hermitian(e)[0];
            if min < -POVM_TOLERANCE {
                return Err(Error::InvalidPovm(format!("element eigenvalue {min:e}")));
            }
            sum += e;
        }
        let dev = (sum - linalg::identity(d)).norm();
        if dev > POVM_TOLERANCE {
            return Err(Error::InvalidPovm(format!("elements sum to I only within {dev:e}")));
        }
        Ok(Self {
            elements,
            acts_on: owned(acts_on),
        })
    }

    /// Projective measurement onto the columns of `basis`.
    pub fn from_basis(basis: &CMatrix, acts_on: &[&str]) -> Result<Self> {
        let els = (0..basis.ncols())
            .map(|k| linalg::projector(&basis.column(k).into_owned()))
            .collect();
        Self::new(els, acts_on)
    }

    pub fn computational(dim: usize, acts_on: &[&str]) -> Result<Self> {
        Self::from_basis(&linalg::identity(dim), acts_on)
    }

    /// `{E, I - E}`.
    pub fn two_outcome(effect: CMatrix, acts_on: &[&str]) -> Result<Self> {
        let rest = linalg::identity(effect.nrows()) - &effect;
        Self::new(vec![effect, rest], acts_on)
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn acts_on(&self) -> Vec<&str> {
        self.acts_on.iter().map(String::as_str).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Standard gate matrices. Two-qubit gates use local index `a + 2b`.
pub mod gates {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn real(d: usize, v: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(d, d, v.iter().map(|&x| c(x, 0.0)))
    }

    pub fn x() -> CMatrix {
        real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn z() -> CMatrix {
        real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    pub fn h() -> CMatrix {
        real(2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
    }

    /// Control is the first qubit (bit 0), target the second.
    pub fn cnot() -> CMatrix {
        permutation(4, |i| if i & 1 == 1 { i ^ 2 } else { i })
    }

    pub fn cz() -> CMatrix {
        real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, -1.0,
            ],
        )
    }

    /// Exchanges two registers of `width` qubits each.
    pub fn swap(width: usize) -> CMatrix {
        let d = 1usize << width;
        permutation(d * d, |i| (i % d) * d + i / d)
    }

    /// Permutation matrix sending basis state `i` to `map(i)`.
    pub fn permutation(dim: usize, map: impl Fn(usize) -> usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(map(i), i)] = c(1.0, 0.0);
        }
        m
    }

    /// Rotation taking the computational basis to the basis with first
    /// vector `cos t |0> + sin t |1>`.
    pub fn real_rotation(t: f64) -> CMatrix {
        real(2, &[t.cos(), -t.sin(), t.sin(), t.cos()])
    }
}

fn check_dim(layout: &RegisterLayout, names: &[&str], d: usize) -> Result<Split> {
    let w = layout.width_of(names)?;
    if 1usize << w != d {
        return Err(Error::DimensionMismatch {
            expected: 1 << w,
            got: d,
        });
    }
    Split::new(layout, names)
}

/// `op` applied to each column of `m` in the split's local coordinates.
fn act_on_columns(m: &mut CMatrix, op: &CMatrix, split: &Split) {
    let dk = split.keep_dim();
    let mut buf = CVector::zeros(dk);
    for col in 0..m.ncols() {
        for &r in &split.rest {
            for i in 0..dk {
                buf[i] = m[(split.keep[i] | r, col)];
            }
            let out = op * &buf;
            for i in 0..dk {
                m[(split.keep[i] | r, col)] = out[i];
            }
        }
    }
}

pub(crate) fn act_on_vector(v: &CVector, op: &CMatrix, split: &Split) -> CVector {
    let dk = split.keep_dim();
    let mut out = CVector::zeros(v.len());
    let mut buf = CVector::zeros(dk);
    for &r in &split.rest {
        for i in 0..dk {
            buf[i] = v[split.keep[i] | r];
        }
        let res = op * &buf;
        for i in 0..dk {
            out[split.keep[i] | r] = res[i];
        }
    }
    out
}

/// Amplitudes arranged as a `keep x rest` matrix.
pub(crate) fn split_matrix(v: &CVector, split: &Split) -> CMatrix {
    CMatrix::from_fn(split.keep_dim(), split.rest_dim(), |i, j| v[split.keep[i] | split.rest[j]])
}

/// `op` embedded on `names` applied to a vector over `layout`; no normalization.
pub fn apply_to_vector(layout: &RegisterLayout, v: &CVector, op: &CMatrix, names: &[&str]) -> Result<CVector> {
    let split = check_dim(layout, names, op.nrows())?;
    Ok(act_on_vector(v, op, &split))
}

/// `op rho op^dagger` with `op` embedded on `names`; no normalization.
pub fn conjugate_matrix(layout: &RegisterLayout, rho: &CMatrix, op: &CMatrix, names: &[&str]) -> Result<CMatrix> {
    let split = check_dim(layout, names, op.nrows())?;
    let mut m = rho.clone();
    act_on_columns(&mut m, op, &split);
    let mut m = m.adjoint();
    act_on_columns(&mut m, op, &split);
    Ok(m.adjoint())
}

/// `op rho` with `op` embedded on `names`.
pub fn left_multiply(layout: &RegisterLayout, rho: &CMatrix, op: &CMatrix, names: &[&str]) -> Result<CMatrix> {
    let split = check_dim(layout, names, op.nrows())?;
    let mut m = rho.clone();
    act_on_columns(&mut m, op, &split);
    Ok(m)
}

/// The full-space matrix of `op` acting on `names`.
pub fn embed(layout: &RegisterLayout, op: &CMatrix, names: &[&str]) -> Result<CMatrix> {
    let split = check_dim(layout, names, op.nrows())?;
    let mut m = linalg::identity(layout.dim());
    act_on_columns(&mut m, op, &split);
    Ok(m)
}

pub fn apply(state: &QuantumState, u: &Unitary) -> Result<QuantumState> {
    apply_raw(state, u.matrix(), &u.acts_on())
}

/// Applies a matrix assumed unitary.
pub(crate) fn apply_raw(state: &QuantumState, m: &CMatrix, names: &[&str]) -> Result<QuantumState> {
    let layout = state.layout().clone();
    let data = match state.data() {
        StateData::Pure(v) => StateData::Pure(apply_to_vector(&layout, v, m, names)?),
        StateData::Mixed(rho) => StateData::Mixed(conjugate_matrix(&layout, rho, m, names)?),
    };
    Ok(QuantumState::from_parts_unchecked(layout, data))
}

/// Applies a sequence of unitaries in order.
pub fn apply_all<'a>(state: &QuantumState, us: impl IntoIterator<Item = &'a Unitary>) -> Result<QuantumState> {
    let mut s = state.clone();
    for u in us {
        s = apply(&s, u)?;
    }
    Ok(s)
}

/// Reduced density matrix on `keep` (in `keep` order) without validation.
pub fn reduced_matrix(state: &QuantumState, keep: &[&str]) -> Result<CMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let layout = state.layout();
    let split = Split::new(layout, keep)?;
    let (dk, dr) = (split.keep_dim(), split.rest_dim());
    if layout.width_of(keep)? > MAX_MIXED_QUBITS {
        return Err(Error::TooManyQubits {
            total: layout.width_of(keep)?,
            cap: MAX_MIXED_QUBITS,
        });
    }
    Ok(match state.data() {
        StateData::Pure(v) => {
            let m = CMatrix::from_fn(dk, dr, |i, j| v[split.keep[i] | split.rest[j]]);
            &m * m.adjoint()
        }
        StateData::Mixed(rho) => CMatrix::from_fn(dk, dk, |i, k| {
            split
                .rest
                .iter()
                .map(|&r| rho[(split.keep[i] | r, split.keep[k] | r)])
                .sum::<C64>()
        }),
    })
}

pub fn partial_trace(state: &QuantumState, keep: &[&str]) -> Result<QuantumState> {
    let rho = reduced_matrix(state, keep)?;
    let layout = state.layout().select(keep)?;
    Ok(QuantumState::from_parts_unchecked(
        layout,
        StateData::Mixed(linalg::hermitian_part(&rho)),
    ))
}

/// `<O>` for `op` embedded on `names`.
pub fn expectation(state: &QuantumState, op: &CMatrix, names: &[&str]) -> Result<C64> {
    let layout = state.layout();
    match state.data() {
        StateData::Pure(v) => Ok(v.dotc(&apply_to_vector(layout, v, op, names)?)),
        StateData::Mixed(_) => {
            let rho = reduced_matrix(state, names)?;
            Ok(linalg::trace(&(op * rho)))
        }
    }
}

/// Born probabilities of every outcome.
pub fn probabilities(state: &QuantumState, povm: &Povm) -> Result<Vec<f64>> {
    let names = povm.acts_on();
    let rho = reduced_matrix(state, &names)?;
    Ok(povm
        .elements()
        .iter()
        .map(|e| linalg::trace(&(e * &rho)).re.max(0.0))
        .collect())
}

/// Samples an outcome and returns the Lüders post-measurement state.
pub fn measure_with<R: Rng + ?Sized>(state: &QuantumState, povm: &Povm, rng: &mut R) -> Result<(usize, QuantumState)> {
    let probs = probabilities(state, povm)?;
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut outcome = probs.len() - 1;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            outcome = k;
            break;
        }
    }
    let post = post_measurement(state, povm, outcome)?;
    Ok((outcome, post))
}

pub fn measure(state: &QuantumState, povm: &Povm, seed: u64) -> Result<(usize, QuantumState)> {
    measure_with(state, povm, &mut SeedStream::new(seed).rng())
}

/// Normalized `sqrt(E_k) rho sqrt(E_k)`.
pub fn post_measurement(state: &QuantumState, povm: &Povm, outcome: usize) -> Result<QuantumState> {
    let e = povm.elements().get(outcome).ok_or(Error::IndexOutOfRange(outcome))?;
    let k = linalg::sqrt_psd(e);
    let names = povm.acts_on();
    let layout = state.layout().clone();
    let data = match state.data() {
        StateData::Pure(v) => {
            let w = apply_to_vector(&layout, v, &k, &names)?;
            let n = w.norm();
            if n < 1e-300 {
                return Err(Error::InvalidState("outcome has probability zero".into()));
            }
            StateData::Pure(w.unscale(n))
        }
        StateData::Mixed(rho) => {
            let m = conjugate_matrix(&layout, rho, &k, &names)?;
            let tr = linalg::trace(&m).re;
            if tr < 1e-300 {
                return Err(Error::InvalidState("outcome has probability zero".into()));
            }
            StateData::Mixed(m.unscale(tr))
        }
    };
    Ok(QuantumState::from_parts_unchecked(layout, data))
}

/// Non-selective measurement of `povm` in the Lüders form, as a density matrix.
pub fn dephase(state: &QuantumState, povm: &Povm) -> Result<QuantumState> {
    let layout = state.layout().clone();
    if layout.total_qubits() > MAX_MIXED_QUBITS {
        return Err(Error::TooManyQubits {
            total: layout.total_qubits(),
            cap: MAX_MIXED_QUBITS,
        });
    }
    let rho = state.density();
    let names = povm.acts_on();
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for e in povm.elements() {
        out += conjugate_matrix(&layout, &rho, &linalg::sqrt_psd(e), &names)?;
    }
    Ok(QuantumState::from_parts_unchecked(layout, StateData::Mixed(out)))
}

/// True when all PSD eigenvalues are at least `-PSD_TOLERANCE`.
pub fn is_psd(m: &CMatrix) -> bool {
    linalg::eigenvalues_hermitian(m)[0] >= -PSD_TOLERANCE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::{bell_state, bb84_state};
    use approx::assert_abs_diff_eq;

    fn two() -> RegisterLayout {
        RegisterLayout::new([("R", 1), ("Q", 1)]).unwrap()
    }

    #[test]
    fn x_flips_zero() {
        let l = RegisterLayout::new([("Q", 1)]).unwrap();
        let s = QuantumState::zero(l);
        let out = apply(&s, &Unitary::new(gates::x(), &["Q"]).unwrap()).unwrap();
        assert_eq!(out.amplitudes().unwrap()[1], c(1.0, 0.0));
    }

    #[test]
    fn circuit_makes_bell() {
        let s = QuantumState::zero(two());
        let s = apply(&s, &Unitary::new(gates::h(), &["R"]).unwrap()).unwrap();
        let s = apply(&s, &Unitary::new(gates::cnot(), &["R", "Q"]).unwrap()).unwrap();
        let b = bell_state();
        assert_abs_diff_eq!(s.inner(&b).unwrap().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn mixed_apply_matches_pure() {
        let s = apply(&bell_state(), &Unitary::new(gates::h(), &["Q"]).unwrap()).unwrap();
        let m = apply(&bell_state().to_mixed().unwrap(), &Unitary::new(gates::h(), &["Q"]).unwrap()).unwrap();
        assert!((s.density() - m.density()).norm() < 1e-14);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(Unitary::new(m, &["Q"]), Err(Error::NotUnitary(_))));
        assert!(matches!(
            apply(&bell_state(), &Unitary::new(gates::x(), &["Z"]).unwrap()),
            Err(Error::UnknownRegister(_))
        ));
    }

    #[test]
    fn partial_traces() {
        let r = partial_trace(&bell_state(), &["R"]).unwrap();
        assert!((r.density() - linalg::identity(2).scale(0.5)).norm() < 1e-15);
        let all = partial_trace(&bell_state(), &["R", "Q"]).unwrap();
        assert!((all.density() - bell_state().density()).norm() < 1e-15);
        assert!(matches!(partial_trace(&bell_state(), &[]), Err(Error::EmptySelection)));
        let prod = bb84_state(2).unwrap().tensor(&bb84_state(1).unwrap().relabel(&["E"]).unwrap()).unwrap();
        let q = partial_trace(&prod, &["Q"]).unwrap();
        assert!((q.density() - bb84_state(2).unwrap().density()).norm() < 1e-15);
        let m = partial_trace(&prod.to_mixed().unwrap(), &["E"]).unwrap();
        assert!((m.density() - bb84_state(1).unwrap().density()).norm() < 1e-15);
    }

    #[test]
    fn deterministic_measurements() {
        let l = RegisterLayout::new([("Q", 1)]).unwrap();
        let p = Povm::computational(2, &["Q"]).unwrap();
        for seed in 0..20 {
            assert_eq!(measure(&QuantumState::zero(l.clone()), &p, seed).unwrap().0, 0);
        }
        let pb = Povm::computational(2, &["R"]).unwrap();
        let pq = Povm::computational(2, &["Q"]).unwrap();
        for seed in 0..50 {
            let (a, post) = measure(&bell_state(), &pb, seed).unwrap();
            let (b, _) = measure(&post, &pq, seed + 1000).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn povm_validation() {
        let bad = vec![linalg::identity(2), linalg::identity(2)];
        assert!(Povm::new(bad, &["Q"]).is_err());
        assert!(Povm::two_outcome(linalg::projector(&bb84_state(2).unwrap().into_amplitudes().unwrap()), &["Q"]).is_ok());
    }
}
