use std::f64::consts::FRAC_1_SQRT_2;

use super::layout::{RegisterLayout, Split, MAX_MIXED_QUBITS};
use super::linalg::{self, c, CMatrix, CVector, C64, PSD_TOLERANCE};
use crate::error::{Error, Result};

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(CVector),
    Mixed(CMatrix),
}

/// A pure state vector or a density matrix over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    data: StateData,
}

impl QuantumState {
    /// Pure state; rejects vectors whose norm is off by more than 1e-12.
    pub fn pure(layout: RegisterLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self {
            layout,
            data: StateData::Pure(amplitudes),
        })
    }

    /// Pure state from an unnormalized non-zero vector.
    pub fn normalized(layout: RegisterLayout, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::pure(layout, amplitudes.unscale(norm))
    }

    /// Density matrix; checks Hermiticity, unit trace and positivity.
    pub fn mixed(layout: RegisterLayout, rho: CMatrix) -> Result<Self> {
        let d = layout.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: rho.nrows(),
            });
        }
        if layout.total_qubits() > MAX_MIXED_QUBITS {
            return Err(Error::TooManyQubits {
                total: layout.total_qubits(),
                cap: MAX_MIXED_QUBITS,
            });
        }
        let herm_dev = (&rho - rho.adjoint()).norm();
        if herm_dev > 1e-10 {
            return Err(Error::InvalidState(format!("not Hermitian ({herm_dev:e})")));
        }
        let tr = linalg::trace(&rho);
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = linalg::eigenvalues_hermitian(&rho)[0];
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidState(format!("eigenvalue {min:e} < 0")));
        }
        Ok(Self {
            layout,
            data: StateData::Mixed(linalg::hermitian_part(&rho)),
        })
    }

    pub(crate) fn from_parts_unchecked(layout: RegisterLayout, data: StateData) -> Self {
        Self { layout, data }
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::IndexOutOfRange(index));
        }
        let mut v = CVector::zeros(layout.dim());
        v[index] = c(1.0, 0.0);
        Self::pure(layout, v)
    }

    pub fn zero(layout: RegisterLayout) -> Self {
        Self::basis(layout, 0).expect("index 0 always valid")
    }

    /// Maximally mixed state on a layout.
    pub fn maximally_mixed(layout: RegisterLayout) -> Result<Self> {
        let d = layout.dim();
        Self::mixed(layout, linalg::identity(d).unscale(d as f64))
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&CVector> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    pub fn into_amplitudes(self) -> Option<CVector> {
        match self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Density matrix (materialized for pure states).
    pub fn density(&self) -> CMatrix {
        match &self.data {
            StateData::Pure(v) => linalg::projector(v),
            StateData::Mixed(m) => m.clone(),
        }
    }

    pub fn to_mixed(&self) -> Result<Self> {
        Self::mixed(self.layout.clone(), self.density())
    }

    /// Tensor product; `self` keeps the low-order registers.
    pub fn tensor(&self, other: &QuantumState) -> Result<Self> {
        let regs = self
            .layout
            .registers()
            .iter()
            .chain(other.layout.registers())
            .map(|r| (r.name.clone(), r.width));
        let layout = RegisterLayout::new(regs)?;
        let data = match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => StateData::Pure(linalg::kron_le_vec(a, b)),
            _ => {
                if layout.total_qubits() > MAX_MIXED_QUBITS {
                    return Err(Error::TooManyQubits {
                        total: layout.total_qubits(),
                        cap: MAX_MIXED_QUBITS,
                    });
                }
                StateData::Mixed(linalg::kron_le(&self.density(), &other.density()))
            }
        };
        Ok(Self { layout, data })
    }

    /// Same data, registers renamed in place.
    pub fn relabel(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.layout.registers().len() {
            return Err(Error::InvalidArgument("relabel arity".into()));
        }
        let layout = RegisterLayout::new(
            names
                .iter()
                .zip(self.layout.registers())
                .map(|(n, r)| (n.to_string(), r.width)),
        )?;
        Ok(Self {
            layout,
            data: self.data.clone(),
        })
    }

    /// Reorders registers to `order` (a permutation of the layout names).
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.layout.registers().len() {
            return Err(Error::InvalidArgument("permutation must list every register".into()));
        }
        let split = Split::new(&self.layout, order)?;
        let layout = self.layout.select(order)?;
        let data = match &self.data {
            StateData::Pure(v) => StateData::Pure(CVector::from_iterator(
                v.len(),
                split.keep.iter().map(|&g| v[g]),
            )),
            StateData::Mixed(m) => {
                let d = m.nrows();
                StateData::Mixed(CMatrix::from_fn(d, d, |i, j| m[(split.keep[i], split.keep[j])]))
            }
        };
        Ok(Self { layout, data })
    }

    /// Inner product `<self|other>` for pure states.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => {
                if a.len() != b.len() {
                    return Err(Error::DimensionMismatch {
                        expected: a.len(),
                        got: b.len(),
                    });
                }
                Ok(a.dotc(b))
            }
            _ => Err(Error::InvalidState("inner product needs pure states".into())),
        }
    }
}

/// `(|00> + |11>)/sqrt(2)` on registers `R`, `Q`.
pub fn bell_state() -> QuantumState {
    bell_state_on("R", "Q")
}

pub fn bell_state_on(first: &str, second: &str) -> QuantumState {
    let layout = RegisterLayout::new([(first, 1), (second, 1)]).expect("two qubits");
    QuantumState::pure(layout, omega_vector()).expect("normalized")
}

/// Amplitudes of the maximally entangled two-qubit state.
pub fn omega_vector() -> CVector {
    CVector::from_vec(vec![
        c(FRAC_1_SQRT_2, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(FRAC_1_SQRT_2, 0.0),
    ])
}

/// Index of a BB84 state: `0 -> |0>`, `1 -> |1>`, `2 -> |+>`, `3 -> |->`.
pub fn bb84_vector(index: usize) -> Result<CVector> {
    let h = FRAC_1_SQRT_2;
    let v = match index {
        0 => [1.0, 0.0],
        1 => [0.0, 1.0],
        2 => [h, h],
        3 => [h, -h],
        _ => return Err(Error::IndexOutOfRange(index)),
    };
    Ok(CVector::from_vec(vec![c(v[0], 0.0), c(v[1], 0.0)]))
}

pub fn bb84_state(index: usize) -> Result<QuantumState> {
    let layout = RegisterLayout::new([("Q", 1)])?;
    QuantumState::pure(layout, bb84_vector(index)?)
}
