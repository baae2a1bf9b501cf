use serde::{Deserialize, Serialize};

use crate::analysis::BooleanFunction;
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::state::omega_vector;
use crate::qcore::{Povm, QuantumState, RegisterLayout, Unitary};

pub const R: &str = "R";
pub const A: &str = "A";
pub const AT: &str = "At";
pub const AC: &str = "Ac";
pub const B: &str = "B";
pub const BT: &str = "Bt";
pub const BC: &str = "Bc";

/// Registers Alice acts on before communicating.
pub const ALICE_FIRST: [&str; 3] = [A, AT, AC];
/// Registers Bob acts on before communicating.
pub const BOB_FIRST: [&str; 3] = [B, BT, BC];
/// Registers Alice holds after the exchange of `Ac` and `Bc`.
pub const ALICE_FINAL: [&str; 3] = [A, AT, BC];
pub const BOB_FINAL: [&str; 3] = [B, BT, AC];

/// Register widths of a strategy. `A` and `B` hold one qubit each; each
/// attacker holds `q = 1 + kept + sent` qubits in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub n: usize,
    pub alice_kept: usize,
    pub alice_sent: usize,
    pub bob_kept: usize,
    pub bob_sent: usize,
}

impl Shape {
    pub fn new(n: usize, alice_kept: usize, alice_sent: usize, bob_kept: usize, bob_sent: usize) -> Result<Self> {
        let s = Self {
            n,
            alice_kept,
            alice_sent,
            bob_kept,
            bob_sent,
        };
        if alice_kept + alice_sent != bob_kept + bob_sent {
            return Err(Error::InvalidArgument(format!(
                "Alice holds {} qubits but Bob holds {}",
                1 + alice_kept + alice_sent,
                1 + bob_kept + bob_sent
            )));
        }
        if n > 4 {
            return Err(Error::BudgetExceeded(format!("strategies are tabulated for n <= 4, got {n}")));
        }
        s.layout()?;
        Ok(s)
    }

    /// Same split on both sides.
    pub fn symmetric(n: usize, kept: usize, sent: usize) -> Result<Self> {
        Self::new(n, kept, sent, kept, sent)
    }

    pub fn q(&self) -> usize {
        1 + self.alice_kept + self.alice_sent
    }

    pub fn layout(&self) -> Result<RegisterLayout> {
        RegisterLayout::new([
            (R, 1),
            (A, 1),
            (AT, self.alice_kept),
            (AC, self.alice_sent),
            (B, 1),
            (BT, self.bob_kept),
            (BC, self.bob_sent),
        ])
    }

    pub fn inputs(&self) -> usize {
        1 << self.n
    }

    pub fn pairs(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn alice_first_dim(&self) -> usize {
        1 << self.q()
    }

    pub fn alice_final_dim(&self) -> usize {
        1 << (1 + self.alice_kept + self.bob_sent)
    }

    pub fn bob_final_dim(&self) -> usize {
        1 << (1 + self.bob_kept + self.alice_sent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    Route,
    Meas,
}

/// What the attackers do after the single round of communication.
#[derive(Debug, Clone, PartialEq)]
pub enum Finale {
    /// `k[pair]` on Alice's final registers, `l[pair]` on Bob's; the qubit is
    /// returned from `A` (to the verifier at 0) or `B` (at 1). `responds[pair]`
    /// says whether Alice and Bob answer at all.
    Route {
        k: Vec<Unitary>,
        l: Vec<Unitary>,
        responds: Vec<[bool; 2]>,
    },
    /// Two-outcome measurements; outcome `b` means "the answer is b".
    Meas { pi: Vec<Povm>, sigma: Vec<Povm> },
}

/// A two-phase attack: a shared starting state, local unitaries indexed by
/// the inputs, and a finale indexed by the input pair `x * 2^n + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackStrategy {
    pub(crate) shape: Shape,
    pub(crate) layout: RegisterLayout,
    pub(crate) psi: QuantumState,
    pub(crate) u: Vec<Unitary>,
    pub(crate) v: Vec<Unitary>,
    pub(crate) finale: Finale,
}

/// `|Omega>_{RA}` with every other register in `|0>`.
pub fn standard_start(shape: &Shape) -> Result<QuantumState> {
    let layout = shape.layout()?;
    let rest = layout.dim() / 4;
    let mut zero = linalg::CVector::zeros(rest);
    zero[0] = linalg::c(1.0, 0.0);
    QuantumState::pure(layout, linalg::kron_le_vec(&omega_vector(), &zero))
}

impl AttackStrategy {
    pub fn new(shape: Shape, psi: QuantumState, u: Vec<Unitary>, v: Vec<Unitary>, finale: Finale) -> Result<Self> {
        let layout = shape.layout()?;
        if psi.layout() != &layout {
            return Err(Error::InvalidArgument("starting state layout differs from the shape".into()));
        }
        let fam = |us: &[Unitary], count: usize, regs: &[&str], dim: usize, what: &str| -> Result<()> {
            if us.len() != count {
                return Err(Error::LengthMismatch {
                    expected: count,
                    got: us.len(),
                });
            }
            for m in us {
                if m.acts_on() != regs || m.dim() != dim {
                    return Err(Error::InvalidArgument(format!("{what} must act on {regs:?} with dimension {dim}")));
                }
            }
            Ok(())
        };
        fam(&u, shape.inputs(), &ALICE_FIRST, shape.alice_first_dim(), "U")?;
        fam(&v, shape.inputs(), &BOB_FIRST, shape.alice_first_dim(), "V")?;
        match &finale {
            Finale::Route { k, l, responds } => {
                fam(k, shape.pairs(), &ALICE_FINAL, shape.alice_final_dim(), "K")?;
                fam(l, shape.pairs(), &BOB_FINAL, shape.bob_final_dim(), "L")?;
                if responds.len() != shape.pairs() {
                    return Err(Error::LengthMismatch {
                        expected: shape.pairs(),
                        got: responds.len(),
                    });
                }
            }
            Finale::Meas { pi, sigma } => {
                for (povms, regs, dim) in [
                    (pi, &ALICE_FINAL, shape.alice_final_dim()),
                    (sigma, &BOB_FINAL, shape.bob_final_dim()),
                ] {
                    if povms.len() != shape.pairs() {
                        return Err(Error::LengthMismatch {
                            expected: shape.pairs(),
                            got: povms.len(),
                        });
                    }
                    for p in povms {
                        if p.len() != 2 || p.acts_on() != regs || p.elements()[0].nrows() != dim {
                            return Err(Error::InvalidPovm(format!("expected two outcomes on {regs:?}")));
                        }
                    }
                }
            }
        }
        Ok(Self {
            shape,
            layout,
            psi,
            u,
            v,
            finale,
        })
    }

    /// Identity unitaries, `|Omega>_{RA}` start, and either identity routing
    /// (everyone answers) or computational-basis readout of `A` and `B`.
    pub fn trivial(shape: Shape, kind: AttackKind) -> Result<Self> {
        let psi = standard_start(&shape)?;
        let id = |d: usize, regs: &[&str]| Unitary::identity(d, regs);
        let u = (0..shape.inputs())
            .map(|_| id(shape.alice_first_dim(), &ALICE_FIRST))
            .collect::<Result<Vec<_>>>()?;
        let v = (0..shape.inputs())
            .map(|_| id(shape.alice_first_dim(), &BOB_FIRST))
            .collect::<Result<Vec<_>>>()?;
        let finale = match kind {
            AttackKind::Route => Finale::Route {
                k: (0..shape.pairs())
                    .map(|_| id(shape.alice_final_dim(), &ALICE_FINAL))
                    .collect::<Result<_>>()?,
                l: (0..shape.pairs())
                    .map(|_| id(shape.bob_final_dim(), &BOB_FINAL))
                    .collect::<Result<_>>()?,
                responds: vec![[true, true]; shape.pairs()],
            },
            AttackKind::Meas => Finale::Meas {
                pi: (0..shape.pairs())
                    .map(|_| first_qubit_readout(shape.alice_final_dim(), &ALICE_FINAL))
                    .collect::<Result<_>>()?,
                sigma: (0..shape.pairs())
                    .map(|_| first_qubit_readout(shape.bob_final_dim(), &BOB_FINAL))
                    .collect::<Result<_>>()?,
            },
        };
        Self::new(shape, psi, u, v, finale)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn psi(&self) -> &QuantumState {
        &self.psi
    }

    pub fn u(&self) -> &[Unitary] {
        &self.u
    }

    pub fn v(&self) -> &[Unitary] {
        &self.v
    }

    pub fn finale(&self) -> &Finale {
        &self.finale
    }

    pub fn kind(&self) -> AttackKind {
        match self.finale {
            Finale::Route { .. } => AttackKind::Route,
            Finale::Meas { .. } => AttackKind::Meas,
        }
    }

    pub fn n(&self) -> usize {
        self.shape.n
    }

    pub fn pair(&self, x: usize, y: usize) -> usize {
        x * self.shape.inputs() + y
    }

    pub(crate) fn check_inputs(&self, f: &BooleanFunction, x: usize, y: usize) -> Result<()> {
        if f.n() != self.shape.n {
            return Err(Error::LengthMismatch {
                expected: self.shape.n,
                got: f.n(),
            });
        }
        let side = self.shape.inputs();
        if x >= side || y >= side {
            return Err(Error::IndexOutOfRange(x.max(y)));
        }
        Ok(())
    }

    pub fn with_psi(mut self, psi: QuantumState) -> Result<Self> {
        if psi.layout() != &self.layout {
            return Err(Error::InvalidArgument("starting state layout differs from the shape".into()));
        }
        self.psi = psi;
        Ok(self)
    }

    pub fn set_u(&mut self, x: usize, m: CMatrix) -> Result<()> {
        let slot = self.u.get_mut(x).ok_or(Error::IndexOutOfRange(x))?;
        *slot = Unitary::new(m, &ALICE_FIRST)?;
        Ok(())
    }

    pub fn set_v(&mut self, y: usize, m: CMatrix) -> Result<()> {
        let slot = self.v.get_mut(y).ok_or(Error::IndexOutOfRange(y))?;
        *slot = Unitary::new(m, &BOB_FIRST)?;
        Ok(())
    }

    pub fn set_k(&mut self, pair: usize, m: CMatrix) -> Result<()> {
        match &mut self.finale {
            Finale::Route { k, .. } => {
                *k.get_mut(pair).ok_or(Error::IndexOutOfRange(pair))? = Unitary::new(m, &ALICE_FINAL)?;
                Ok(())
            }
            Finale::Meas { .. } => Err(Error::KindMismatch("route")),
        }
    }

    pub fn set_l(&mut self, pair: usize, m: CMatrix) -> Result<()> {
        match &mut self.finale {
            Finale::Route { l, .. } => {
                *l.get_mut(pair).ok_or(Error::IndexOutOfRange(pair))? = Unitary::new(m, &BOB_FINAL)?;
                Ok(())
            }
            Finale::Meas { .. } => Err(Error::KindMismatch("route")),
        }
    }

    pub fn set_responds(&mut self, pair: usize, alice: bool, bob: bool) -> Result<()> {
        match &mut self.finale {
            Finale::Route { responds, .. } => {
                *responds.get_mut(pair).ok_or(Error::IndexOutOfRange(pair))? = [alice, bob];
                Ok(())
            }
            Finale::Meas { .. } => Err(Error::KindMismatch("route")),
        }
    }

    /// Sets Alice's (`side = 0`) or Bob's (`side = 1`) measurement for a pair
    /// from the effect of outcome 0.
    pub fn set_povm(&mut self, side: usize, pair: usize, effect0: CMatrix) -> Result<()> {
        match &mut self.finale {
            Finale::Meas { pi, sigma } => {
                let (list, regs) = if side == 0 { (pi, &ALICE_FINAL) } else { (sigma, &BOB_FINAL) };
                *list.get_mut(pair).ok_or(Error::IndexOutOfRange(pair))? = Povm::two_outcome(effect0, regs)?;
                Ok(())
            }
            Finale::Route { .. } => Err(Error::KindMismatch("meas")),
        }
    }
}

/// `{|0><0|, |1><1|}` on the first qubit of a register group.
pub fn first_qubit_readout(dim: usize, regs: &[&str]) -> Result<Povm> {
    let mut p0 = CMatrix::zeros(dim, dim);
    for i in (0..dim).step_by(2) {
        p0[(i, i)] = linalg::c(1.0, 0.0);
    }
    Povm::two_outcome(p0, regs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let s = Shape::new(1, 1, 2, 2, 1).unwrap();
        assert_eq!(s.q(), 4);
        assert_eq!(s.layout().unwrap().total_qubits(), 9);
        assert!(Shape::new(1, 1, 0, 0, 0).is_err());
        assert!(Shape::new(5, 0, 0, 0, 0).is_err());
    }

    #[test]
    fn trivial_is_valid() {
        let s = Shape::symmetric(1, 1, 1).unwrap();
        let t = AttackStrategy::trivial(s, AttackKind::Meas).unwrap();
        assert_eq!(t.kind(), AttackKind::Meas);
        assert_eq!(t.u().len(), 2);
    }
}
