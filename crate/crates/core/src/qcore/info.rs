use super::linalg::{self, CMatrix, ENTROPY_CUTOFF};
use super::ops::reduced_matrix;
use super::state::{QuantumState, StateData};
use crate::error::{Error, Result};

fn same_dim(a: &QuantumState, b: &QuantumState) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// `tr sqrt(sqrt(sigma) rho sqrt(sigma))`, evaluated as the trace norm of
/// `sqrt(rho) sqrt(sigma)`. Eigenvalues under the cutoff are rounding noise
/// and are zeroed before the square root, which would otherwise amplify
/// them to ~1e-8.
pub fn fidelity_matrices(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let root = |m: &CMatrix| linalg::spectral_map(m, |v| if v < ENTROPY_CUTOFF { 0.0 } else { v.sqrt() });
    linalg::nuclear_norm(&(root(rho) * root(sigma))).min(1.0)
}

pub fn fidelity(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    same_dim(rho, sigma)?;
    let f = match (rho.data(), sigma.data()) {
        (StateData::Pure(a), StateData::Pure(b)) => a.dotc(b).norm(),
        (StateData::Pure(v), StateData::Mixed(m)) | (StateData::Mixed(m), StateData::Pure(v)) => {
            linalg::clip(v.dotc(&(m * v)).re).sqrt()
        }
        (StateData::Mixed(a), StateData::Mixed(b)) => fidelity_matrices(a, b),
    };
    Ok(f.min(1.0))
}

pub fn purified_distance_from_fidelity(f: f64) -> f64 {
    (1.0 - f.min(1.0).powi(2)).max(0.0).sqrt()
}

pub fn purified_distance(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    Ok(purified_distance_from_fidelity(fidelity(rho, sigma)?))
}

pub fn trace_distance_matrices(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    0.5 * linalg::eigenvalues_hermitian(&(rho - sigma))
        .iter()
        .map(|v| v.abs())
        .sum::<f64>()
}

pub fn trace_distance(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok(trace_distance_matrices(&rho.density(), &sigma.density()))
}

/// Base-2 Shannon entropy of a spectrum, ignoring entries below the cutoff.
pub fn spectrum_entropy(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&v| v > ENTROPY_CUTOFF)
        .map(|&v| -v * v.log2())
        .sum()
}

pub fn entropy_matrix(rho: &CMatrix) -> f64 {
    spectrum_entropy(&linalg::eigenvalues_hermitian(rho))
}

pub fn von_neumann_entropy(state: &QuantumState) -> f64 {
    match state.data() {
        StateData::Pure(_) => 0.0,
        StateData::Mixed(m) => entropy_matrix(m),
    }
}

/// Entropy of the marginal on `registers`; zero for an empty selection.
pub fn marginal_entropy(state: &QuantumState, registers: &[&str]) -> Result<f64> {
    if registers.is_empty() {
        return Ok(0.0);
    }
    let total = state.layout().registers().len();
    if state.is_pure() && registers.len() == total {
        // Validate names even though the answer is known.
        state.layout().qubit_positions(registers)?;
        return Ok(0.0);
    }
    Ok(entropy_matrix(&reduced_matrix(state, registers)?))
}

/// `H(TS) - H(S)`.
pub fn conditional_entropy(state: &QuantumState, target: &[&str], side: &[&str]) -> Result<f64> {
    if target.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(t) = target.iter().find(|t| side.contains(t)) {
        return Err(Error::OverlappingRegisters(t.to_string()));
    }
    let joint: Vec<&str> = target.iter().chain(side).copied().collect();
    Ok(marginal_entropy(state, &joint)? - marginal_entropy(state, side)?)
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            value: p,
            expected: "[0, 1]",
        });
    }
    Ok(spectrum_entropy(&[p, 1.0 - p]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::layout::RegisterLayout;
    use crate::qcore::state::{bb84_state, bell_state};
    use approx::assert_abs_diff_eq;

    #[test]
    fn fidelity_cases() {
        let zero = bb84_state(0).unwrap();
        let one = bb84_state(1).unwrap();
        let plus = bb84_state(2).unwrap();
        let mixed = QuantumState::maximally_mixed(RegisterLayout::new([("Q", 1)]).unwrap()).unwrap();
        assert_abs_diff_eq!(fidelity(&bell_state(), &bell_state()).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(fidelity(&zero, &mixed).unwrap(), s, epsilon = 1e-14);
        assert_abs_diff_eq!(fidelity(&zero.to_mixed().unwrap(), &mixed).unwrap(), s, epsilon = 1e-12);
        assert_abs_diff_eq!(purified_distance(&zero, &one).unwrap(), 1.0);
        assert_abs_diff_eq!(purified_distance(&zero, &plus).unwrap(), s, epsilon = 1e-14);
        assert!(matches!(fidelity(&zero, &bell_state()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn entropies() {
        let b = bell_state();
        assert_abs_diff_eq!(conditional_entropy(&b, &["R"], &["Q"]).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(conditional_entropy(&b, &["R"], &[]).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            conditional_entropy(&b, &["R"], &["R"]),
            Err(Error::OverlappingRegisters(_))
        ));
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.25).unwrap(), 2.0 - 0.75 * 3f64.log2(), epsilon = 1e-15);
        assert!(binary_entropy(1.5).is_err());
    }
}
