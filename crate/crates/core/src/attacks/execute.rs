use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::strategy::*;
use crate::analysis::BooleanFunction;
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::ops::{self, apply_all, reduced_matrix};
use crate::qcore::state::{bb84_vector, omega_vector, QuantumState, StateData};
use crate::qcore::{Povm, RegisterLayout, Unitary};

/// Largest input half-length for which reports enumerate every pair.
pub const REPORT_MAX_N: usize = 4;

/// `(U^x ⊗ V^y)|psi>`.
pub fn evolved_state(s: &AttackStrategy, x: usize, y: usize) -> Result<QuantumState> {
    apply_all(&s.psi, [&s.u[x], &s.v[y]])
}

/// `<Omega| rho |Omega>` for a two-qubit density matrix.
pub fn omega_overlap(rho: &CMatrix) -> f64 {
    let w = omega_vector();
    w.dotc(&(rho * &w)).re
}

/// Reduced state on `R` and the register returned to `V_f(x,y)` after the
/// routing finale.
pub fn final_reduced_state(s: &AttackStrategy, f: &BooleanFunction, x: usize, y: usize) -> Result<CMatrix> {
    s.check_inputs(f, x, y)?;
    let Finale::Route { k, l, .. } = &s.finale else {
        return Err(Error::KindMismatch("route"));
    };
    let p = s.pair(x, y);
    let evolved = evolved_state(s, x, y)?;
    let (fin, out) = if f.eval(x, y) { (&l[p], B) } else { (&k[p], A) };
    reduced_matrix(&ops::apply(&evolved, fin)?, &[R, out])
}

pub fn execute_route(s: &AttackStrategy, f: &BooleanFunction, x: usize, y: usize) -> Result<f64> {
    s.check_inputs(f, x, y)?;
    let Finale::Route { responds, .. } = &s.finale else {
        return Err(Error::KindMismatch("route"));
    };
    if !responds[s.pair(x, y)][f.eval(x, y) as usize] {
        return Ok(0.0);
    }
    Ok(omega_overlap(&final_reduced_state(s, f, x, y)?).clamp(0.0, 1.0))
}

/// Projector onto outcome `z` of measuring one qubit in the computational
/// (`basis = 0`) or Hadamard (`basis = 1`) basis.
pub fn basis_projector(basis: bool, z: usize) -> CMatrix {
    linalg::projector(&bb84_vector(2 * basis as usize + z).expect("index < 4"))
}

/// `sum_z <P_z^R ⊗ Pi_z ⊗ Sigma_z>` on an evolved state.
pub(crate) fn joint_guess(layout: &RegisterLayout, state: &QuantumState, basis: bool, pi: &Povm, sigma: &Povm) -> Result<f64> {
    let mut total = 0.0;
    for z in 0..2 {
        let chain: [(CMatrix, &[&str]); 3] = [
            (basis_projector(basis, z), &[R]),
            (pi.elements()[z].clone(), &ALICE_FINAL),
            (sigma.elements()[z].clone(), &BOB_FINAL),
        ];
        total += match state.data() {
            StateData::Pure(v) => {
                let mut w = v.clone();
                for (op, regs) in &chain {
                    w = ops::apply_to_vector(layout, &w, op, regs)?;
                }
                v.dotc(&w).re
            }
            StateData::Mixed(rho) => {
                let mut w = rho.clone();
                for (op, regs) in &chain {
                    w = ops::left_multiply(layout, &w, op, regs)?;
                }
                linalg::trace(&w).re
            }
        };
    }
    Ok(total.clamp(0.0, 1.0))
}

pub fn execute_meas(s: &AttackStrategy, f: &BooleanFunction, x: usize, y: usize) -> Result<f64> {
    s.check_inputs(f, x, y)?;
    let Finale::Meas { pi, sigma } = &s.finale else {
        return Err(Error::KindMismatch("meas"));
    };
    let p = s.pair(x, y);
    let evolved = evolved_state(s, x, y)?;
    joint_guess(&s.layout, &evolved, f.eval(x, y), &pi[p], &sigma[p])
}

/// Success probability for one input pair, whatever the strategy kind.
pub fn execute(s: &AttackStrategy, f: &BooleanFunction, x: usize, y: usize) -> Result<f64> {
    match s.kind() {
        AttackKind::Route => execute_route(s, f, x, y),
        AttackKind::Meas => execute_meas(s, f, x, y),
    }
}

/// Success for every pair in `x * 2^n + y` order.
pub fn pair_successes(s: &AttackStrategy, f: &BooleanFunction) -> Result<Vec<f64>> {
    if f.n() != s.n() {
        return Err(Error::LengthMismatch {
            expected: s.n(),
            got: f.n(),
        });
    }
    let side = f.side();
    (0..f.pairs())
        .into_par_iter()
        .map(|p| execute(s, f, p / side, p % side))
        .collect()
}

pub fn average_success(s: &AttackStrategy, f: &BooleanFunction) -> Result<f64> {
    let p = pair_successes(s, f)?;
    Ok(p.iter().sum::<f64>() / p.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSuccess {
    pub x: usize,
    pub y: usize,
    pub f: bool,
    pub success: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub kind: AttackKind,
    pub n: usize,
    pub per_pair: Vec<PairSuccess>,
    pub average: f64,
    pub worst: f64,
    /// Pairs with detection probability at most `epsilon^2`.
    pub epsilon: Option<f64>,
    pub l: Option<usize>,
}

impl AttackReport {
    pub fn from_successes(kind: AttackKind, f: &BooleanFunction, successes: &[f64], epsilon: Option<f64>) -> Self {
        let side = f.side();
        let per_pair: Vec<PairSuccess> = successes
            .iter()
            .enumerate()
            .map(|(p, &success)| PairSuccess {
                x: p / side,
                y: p % side,
                f: f.table()[p],
                success,
            })
            .collect();
        let l = epsilon.map(|e| successes.iter().filter(|&&s| 1.0 - s <= e * e + 1e-12).count());
        Self {
            kind,
            n: f.n(),
            average: successes.iter().sum::<f64>() / successes.len() as f64,
            worst: successes.iter().copied().fold(f64::INFINITY, f64::min),
            per_pair,
            epsilon,
            l,
        }
    }
}

pub fn attack_report(s: &AttackStrategy, f: &BooleanFunction) -> Result<AttackReport> {
    Ok(AttackReport::from_successes(s.kind(), f, &pair_successes(s, f)?, None))
}

/// Counts the pairs on which the attack is caught with probability at most
/// `epsilon^2`.
pub fn epsilon_l_report(s: &AttackStrategy, f: &BooleanFunction, epsilon: f64) -> Result<AttackReport> {
    if f.n() > REPORT_MAX_N {
        return Err(Error::BudgetExceeded(format!("pair enumeration limited to n <= {REPORT_MAX_N}")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange {
            value: epsilon,
            expected: "[0, 1]",
        });
    }
    Ok(AttackReport::from_successes(s.kind(), f, &pair_successes(s, f)?, Some(epsilon)))
}

/// Inserts a control qubit at local bit `pos`: `|0><0| ⊗ m0 + |1><1| ⊗ m1`.
fn controlled_at(m0: &CMatrix, m1: &CMatrix, pos: usize) -> CMatrix {
    let d = m0.nrows();
    let low = (1usize << pos) - 1;
    let split = |i: usize| -> (usize, usize) { ((i >> pos) & 1, (i & low) | ((i >> (pos + 1)) << pos)) };
    CMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let (ci, oi) = split(i);
        let (cj, oj) = split(j);
        if ci != cj {
            linalg::c(0.0, 0.0)
        } else if ci == 0 {
            m0[(oi, oj)]
        } else {
            m1[(oi, oj)]
        }
    })
}

/// The strategy that runs `s1` with probability `lambda` and `s2` otherwise,
/// using a shared classical coin stored as one extra qubit in each of `At`
/// and `Bt`. Both strategies must share shape, kind and response pattern.
pub fn mix_strategies(s1: &AttackStrategy, s2: &AttackStrategy, lambda: f64) -> Result<AttackStrategy> {
    if s1.shape != s2.shape || s1.kind() != s2.kind() {
        return Err(Error::InvalidArgument("mixed strategies must share shape and kind".into()));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            value: lambda,
            expected: "[0, 1]",
        });
    }
    let old = s1.shape;
    let shape = Shape::new(old.n, old.alice_kept + 1, old.alice_sent, old.bob_kept + 1, old.bob_sent)?;
    let layout = shape.layout()?;
    let old_layout = &s1.layout;
    // Position of every old qubit in the new layout, and of the two coins.
    let mut map = Vec::new();
    for r in old_layout.registers() {
        let off = layout.offset(&r.name)?;
        map.extend((0..r.width).map(|j| off + j));
    }
    let coin_a = layout.offset(AT)? + old.alice_kept;
    let coin_b = layout.offset(BT)? + old.bob_kept;
    let place = |i: usize, coin: usize| -> usize {
        let mut g = 0;
        for (bit, &pos) in map.iter().enumerate() {
            g |= ((i >> bit) & 1) << pos;
        }
        g | (coin << coin_a) | (coin << coin_b)
    };
    let dim = layout.dim();
    let mut rho = CMatrix::zeros(dim, dim);
    for (coin, s, w) in [(0, s1, lambda), (1, s2, 1.0 - lambda)] {
        let d = s.psi.density();
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                rho[(place(i, coin), place(j, coin))] += d[(i, j)] * w;
            }
        }
    }
    let psi = QuantumState::mixed(layout, rho)?;
    let mk = |a: &Unitary, b: &Unitary, pos: usize, regs: &[&str]| Unitary::new(controlled_at(a.matrix(), b.matrix(), pos), regs);
    let u = s1
        .u
        .iter()
        .zip(&s2.u)
        .map(|(a, b)| mk(a, b, 1 + old.alice_kept, &ALICE_FIRST))
        .collect::<Result<Vec<_>>>()?;
    let v = s1
        .v
        .iter()
        .zip(&s2.v)
        .map(|(a, b)| mk(a, b, 1 + old.bob_kept, &BOB_FIRST))
        .collect::<Result<Vec<_>>>()?;
    let finale = match (&s1.finale, &s2.finale) {
        (
            Finale::Route { k: k1, l: l1, responds: r1 },
            Finale::Route { k: k2, l: l2, responds: r2 },
        ) => {
            if r1 != r2 {
                return Err(Error::InvalidArgument("mixed strategies must answer on the same pairs".into()));
            }
            Finale::Route {
                k: k1
                    .iter()
                    .zip(k2)
                    .map(|(a, b)| mk(a, b, 1 + old.alice_kept, &ALICE_FINAL))
                    .collect::<Result<_>>()?,
                l: l1
                    .iter()
                    .zip(l2)
                    .map(|(a, b)| mk(a, b, 1 + old.bob_kept, &BOB_FINAL))
                    .collect::<Result<_>>()?,
                responds: r1.clone(),
            }
        }
        (Finale::Meas { pi: p1, sigma: s1m }, Finale::Meas { pi: p2, sigma: s2m }) => {
            let povm = |a: &Povm, b: &Povm, pos: usize, regs: &[&str]| -> Result<Povm> {
                Povm::new(
                    a.elements()
                        .iter()
                        .zip(b.elements())
                        .map(|(ea, eb)| controlled_at(ea, eb, pos))
                        .collect(),
                    regs,
                )
            };
            Finale::Meas {
                pi: p1
                    .iter()
                    .zip(p2)
                    .map(|(a, b)| povm(a, b, 1 + old.alice_kept, &ALICE_FINAL))
                    .collect::<Result<_>>()?,
                sigma: s1m
                    .iter()
                    .zip(s2m)
                    .map(|(a, b)| povm(a, b, 1 + old.bob_kept, &BOB_FINAL))
                    .collect::<Result<_>>()?,
            }
        }
        _ => unreachable!("kinds checked above"),
    };
    AttackStrategy::new(shape, psi, u, v, finale)
}
