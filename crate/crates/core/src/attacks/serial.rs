//! Loss-free JSON form of strategies. Every matrix entry is written as
//! `"<re>,<im>"` with each part the 16 hex digits of its IEEE-754 bits,
//! row-major.

use serde::{Deserialize, Serialize};

use super::strategy::*;
use crate::error::{Error, Result};
use crate::qcore::linalg::{c, CMatrix, CVector};
use crate::qcore::state::StateData;
use crate::qcore::{Povm, QuantumState, RegisterLayout, Unitary};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<String>,
}

fn encode_entry(z: &crate::qcore::C64) -> String {
    format!(
        "{},{}",
        hex::encode(z.re.to_bits().to_be_bytes()),
        hex::encode(z.im.to_bits().to_be_bytes())
    )
}

fn decode_part(s: &str) -> Result<f64> {
    let bytes: [u8; 8] = hex::decode(s)
        .map_err(|e| Error::Parse(format!("bad hex {s:?}: {e}")))?
        .try_into()
        .map_err(|_| Error::Parse(format!("expected 16 hex digits, got {s:?}")))?;
    Ok(f64::from_bits(u64::from_be_bytes(bytes)))
}

impl HexMatrix {
    pub fn encode(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(encode_entry(&m[(i, j)]));
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn decode(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::LengthMismatch {
                expected: self.rows * self.cols,
                got: self.data.len(),
            });
        }
        let mut entries = Vec::with_capacity(self.data.len());
        for e in &self.data {
            let (re, im) = e
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("entry {e:?} is not \"re,im\"")))?;
            entries.push(c(decode_part(re)?, decode_part(im)?));
        }
        Ok(CMatrix::from_row_slice(self.rows, self.cols, &entries))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateFile {
    Pure { amplitudes: HexMatrix },
    Mixed { density: HexMatrix },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FinaleFile {
    Route {
        k: Vec<HexMatrix>,
        l: Vec<HexMatrix>,
        responds: Vec<[bool; 2]>,
    },
    Meas {
        /// Outcome-0 effects.
        pi: Vec<HexMatrix>,
        sigma: Vec<HexMatrix>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub shape: Shape,
    pub layout: RegisterLayout,
    pub psi: StateFile,
    pub u: Vec<HexMatrix>,
    pub v: Vec<HexMatrix>,
    pub finale: FinaleFile,
}

fn unitaries(list: &[Unitary]) -> Vec<HexMatrix> {
    list.iter().map(|u| HexMatrix::encode(u.matrix())).collect()
}

fn effects(list: &[Povm]) -> Vec<HexMatrix> {
    list.iter().map(|p| HexMatrix::encode(&p.elements()[0])).collect()
}

impl From<&AttackStrategy> for StrategyFile {
    fn from(s: &AttackStrategy) -> Self {
        let psi = match s.psi.data() {
            StateData::Pure(v) => StateFile::Pure {
                amplitudes: HexMatrix::encode(&CMatrix::from_column_slice(v.len(), 1, v.as_slice())),
            },
            StateData::Mixed(m) => StateFile::Mixed {
                density: HexMatrix::encode(m),
            },
        };
        let finale = match &s.finale {
            Finale::Route { k, l, responds } => FinaleFile::Route {
                k: unitaries(k),
                l: unitaries(l),
                responds: responds.clone(),
            },
            Finale::Meas { pi, sigma } => FinaleFile::Meas {
                pi: effects(pi),
                sigma: effects(sigma),
            },
        };
        Self {
            shape: s.shape,
            layout: s.layout.clone(),
            psi,
            u: unitaries(&s.u),
            v: unitaries(&s.v),
            finale,
        }
    }
}

impl TryFrom<&StrategyFile> for AttackStrategy {
    type Error = Error;

    fn try_from(f: &StrategyFile) -> Result<Self> {
        let layout = f.shape.layout()?;
        if layout != f.layout {
            return Err(Error::InvalidArgument("layout descriptor does not match the shape".into()));
        }
        let psi = match &f.psi {
            StateFile::Pure { amplitudes } => {
                let m = amplitudes.decode()?;
                QuantumState::pure(layout, CVector::from_column_slice(m.as_slice()))?
            }
            StateFile::Mixed { density } => QuantumState::mixed(layout, density.decode()?)?,
        };
        let us = |list: &[HexMatrix], regs: &[&str]| -> Result<Vec<Unitary>> {
            list.iter().map(|m| Unitary::new(m.decode()?, regs)).collect()
        };
        let povms = |list: &[HexMatrix], regs: &[&str]| -> Result<Vec<Povm>> {
            list.iter().map(|m| Povm::two_outcome(m.decode()?, regs)).collect()
        };
        let finale = match &f.finale {
            FinaleFile::Route { k, l, responds } => Finale::Route {
                k: us(k, &ALICE_FINAL)?,
                l: us(l, &BOB_FINAL)?,
                responds: responds.clone(),
            },
            FinaleFile::Meas { pi, sigma } => Finale::Meas {
                pi: povms(pi, &ALICE_FINAL)?,
                sigma: povms(sigma, &BOB_FINAL)?,
            },
        };
        AttackStrategy::new(f.shape, psi, us(&f.u, &ALICE_FIRST)?, us(&f.v, &BOB_FIRST)?, finale)
    }
}

impl AttackStrategy {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&StrategyFile::from(self)).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: StrategyFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(&file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::haar_unitary_with;
    use crate::rng::SeedStream;

    #[test]
    fn hex_entries_round_trip_exactly() {
        let mut rng = SeedStream::new(3).rng();
        let m = haar_unitary_with(4, &mut rng);
        let h = HexMatrix::encode(&m);
        assert_eq!(h.data[0].len(), 33);
        assert_eq!(h.decode().unwrap(), m);
    }

    #[test]
    fn malformed_entries_are_rejected() {
        let h = HexMatrix {
            rows: 1,
            cols: 1,
            data: vec!["zz,00".into()],
        };
        assert!(h.decode().is_err());
        let short = HexMatrix {
            rows: 1,
            cols: 2,
            data: vec![encode_entry(&c(1.0, 0.0))],
        };
        assert!(short.decode().is_err());
    }
}
