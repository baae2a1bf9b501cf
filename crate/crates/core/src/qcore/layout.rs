use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register layout a pure state may span.
pub const MAX_QUBITS: usize = 20;
/// Largest layout for which a full density matrix is materialized.
pub const MAX_MIXED_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub width: usize,
}

/// Ordered named registers. The first register occupies the least
/// significant bits of a basis index; inside a register, qubit `j` is bit `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Register>", into = "Vec<Register>")]
pub struct RegisterLayout {
    registers: Vec<Register>,
    offsets: Vec<usize>,
    total: usize,
}

impl TryFrom<Vec<Register>> for RegisterLayout {
    type Error = Error;
    fn try_from(registers: Vec<Register>) -> Result<Self> {
        RegisterLayout::new(registers.into_iter().map(|r| (r.name, r.width)))
    }
}

impl From<RegisterLayout> for Vec<Register> {
    fn from(l: RegisterLayout) -> Self {
        l.registers
    }
}

impl RegisterLayout {
    pub fn new<I, S>(regs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut registers: Vec<Register> = Vec::new();
        let mut offsets = Vec::new();
        let mut total = 0;
        for (name, width) in regs {
            let name = name.into();
            if registers.iter().any(|r| r.name == name) {
                return Err(Error::DuplicateRegister(name));
            }
            offsets.push(total);
            total += width;
            registers.push(Register { name, width });
        }
        if total > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                total,
                cap: MAX_QUBITS,
            });
        }
        Ok(Self {
            registers,
            offsets,
            total,
        })
    }

    /// Layout of `n` single-qubit registers named `q0`, `q1`, ...
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (format!("q{i}"), 1)))
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn total_qubits(&self) -> usize {
        self.total
    }

    pub fn dim(&self) -> usize {
        1 << self.total
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        Ok(self.registers[self.position(name)?].width)
    }

    pub fn offset(&self, name: &str) -> Result<usize> {
        Ok(self.offsets[self.position(name)?])
    }

    /// Total width of a register selection.
    pub fn width_of(&self, names: &[&str]) -> Result<usize> {
        names.iter().map(|n| self.width(n)).sum()
    }

    /// Global qubit positions of `names`, concatenated in selection order.
    pub fn qubit_positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::OverlappingRegisters(n.to_string()));
            }
            let p = self.position(n)?;
            out.extend(self.offsets[p]..self.offsets[p] + self.registers[p].width);
        }
        Ok(out)
    }

    /// Sub-layout made of the selected registers in selection order.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        let regs: Vec<(String, usize)> = names
            .iter()
            .map(|n| Ok((n.to_string(), self.width(n)?)))
            .collect::<Result<_>>()?;
        Self::new(regs)
    }

    /// Names of registers not in `names`, in layout order.
    pub fn complement(&self, names: &[&str]) -> Vec<&str> {
        self.registers
            .iter()
            .map(|r| r.name.as_str())
            .filter(|n| !names.contains(n))
            .collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.registers.iter().map(|r| r.name.as_str()).collect()
    }
}

/// Index maps splitting a layout's basis into a selected subsystem and its
/// complement: global index = `keep[i] | rest[j]`.
#[derive(Debug, Clone)]
pub struct Split {
    pub keep: Vec<usize>,
    pub rest: Vec<usize>,
}

fn deposit_table(positions: &[usize]) -> Vec<usize> {
    let mut table = vec![0usize; 1 << positions.len()];
    for (local, slot) in table.iter_mut().enumerate() {
        let mut g = 0;
        for (bit, &pos) in positions.iter().enumerate() {
            if local >> bit & 1 == 1 {
                g |= 1 << pos;
            }
        }
        *slot = g;
    }
    table
}

impl Split {
    pub fn new(layout: &RegisterLayout, names: &[&str]) -> Result<Self> {
        let keep_pos = layout.qubit_positions(names)?;
        let rest_pos: Vec<usize> = (0..layout.total_qubits())
            .filter(|q| !keep_pos.contains(q))
            .collect();
        Ok(Self {
            keep: deposit_table(&keep_pos),
            rest: deposit_table(&rest_pos),
        })
    }

    pub fn keep_dim(&self) -> usize {
        self.keep.len()
    }

    pub fn rest_dim(&self) -> usize {
        self.rest.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_rules() {
        let l = RegisterLayout::new([("R", 1), ("A", 2), ("E", 0)]).unwrap();
        assert_eq!(l.total_qubits(), 3);
        assert_eq!(l.offset("A").unwrap(), 1);
        assert_eq!(l.width("E").unwrap(), 0);
        assert!(matches!(
            RegisterLayout::new([("R", 1), ("R", 1)]),
            Err(Error::DuplicateRegister(_))
        ));
        assert!(matches!(
            RegisterLayout::new([("R", 21)]),
            Err(Error::TooManyQubits { .. })
        ));
        assert!(matches!(l.width("Z"), Err(Error::UnknownRegister(_))));
    }

    #[test]
    fn split_covers_all_indices_once() {
        let l = RegisterLayout::new([("R", 1), ("A", 2), ("B", 1)]).unwrap();
        let s = Split::new(&l, &["B", "R"]).unwrap();
        let mut seen = vec![false; l.dim()];
        for &k in &s.keep {
            for &r in &s.rest {
                assert!(!seen[k | r]);
                seen[k | r] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
        // local index 1 is the first selected register (B at bit 3)
        assert_eq!(s.keep[1], 1 << 3);
        assert_eq!(s.keep[2], 1);
    }

    #[test]
    fn serde_round_trip() {
        let l = RegisterLayout::new([("R", 1), ("A", 2)]).unwrap();
        let js = serde_json::to_string(&l).unwrap();
        let back: RegisterLayout = serde_json::from_str(&js).unwrap();
        assert_eq!(l, back);
    }
}
