use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Largest input half-length for which truth tables are materialized.
pub const MAX_TABLE_BITS: usize = 12;

/// A function `{0,1}^n x {0,1}^n -> {0,1}` stored as a truth table.
///
/// Inputs are integers whose most significant of `n` bits is the first
/// coordinate; `table[x * 2^n + y]` is `f(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct BooleanFunction {
    n: usize,
    table: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    n: usize,
    table: String,
}

impl TryFrom<TableRepr> for BooleanFunction {
    type Error = Error;
    fn try_from(r: TableRepr) -> Result<Self> {
        Self::from_bits(r.n, &r.table)
    }
}

impl From<BooleanFunction> for TableRepr {
    fn from(f: BooleanFunction) -> Self {
        TableRepr {
            n: f.n,
            table: f.bit_string(),
        }
    }
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        if n > MAX_TABLE_BITS {
            return Err(Error::BudgetExceeded(format!("n = {n} exceeds table cap {MAX_TABLE_BITS}")));
        }
        let expected = 1usize << (2 * n);
        if table.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: table.len(),
            });
        }
        Ok(Self { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        if n > MAX_TABLE_BITS {
            return Err(Error::BudgetExceeded(format!("n = {n} exceeds table cap {MAX_TABLE_BITS}")));
        }
        let side = 1usize << n;
        Self::new(n, (0..side * side).map(|i| f(i / side, i % side)).collect())
    }

    /// Parses a row-major string of `0`/`1` characters.
    pub fn from_bits(n: usize, bits: &str) -> Result<Self> {
        let table = bits
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in table"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, table)
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_, _| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    pub fn pairs(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        x * self.side() + y
    }

    pub fn eval(&self, x: usize, y: usize) -> bool {
        self.table[self.index(x, y)]
    }

    /// Bounds-checked evaluation.
    pub fn try_eval(&self, x: usize, y: usize) -> Result<bool> {
        let side = self.side();
        if x >= side || y >= side {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: usize::BITS as usize - x.max(y).leading_zeros() as usize,
            });
        }
        Ok(self.eval(x, y))
    }

    /// Rows indexed by `x`, columns by `y`.
    pub fn communication_matrix(&self) -> Vec<Vec<bool>> {
        self.table.chunks(self.side()).map(<[bool]>::to_vec).collect()
    }

    pub fn negate(&self) -> Self {
        Self {
            n: self.n,
            table: self.table.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&b| b == self.table[0])
    }

    pub fn bit_string(&self) -> String {
        self.table.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// File format: `n=<int>` on the first line, the table on the second.
impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "{}", self.bit_string())
    }
}

impl FromStr for BooleanFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let n = header
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("expected `n=<int>`, got {header:?}")))?
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        let bits = lines.next().ok_or_else(|| Error::Parse("missing table line".into()))?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after table".into()));
        }
        Self::from_bits(n, bits)
    }
}

/// Inner product mod 2.
pub fn ip_function(n: usize) -> Result<BooleanFunction> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    BooleanFunction::from_fn(n, |x, y| (x & y).count_ones() % 2 == 1)
}

pub fn xor_function(n: usize) -> Result<BooleanFunction> {
    BooleanFunction::from_fn(n, |x, y| (x ^ y).count_ones() % 2 == 1)
}

/// `f(x, y) = x_1` (first bit of Alice's input).
pub fn first_bit_of_x(n: usize) -> Result<BooleanFunction> {
    BooleanFunction::from_fn(n, move |x, _| (x >> (n - 1)) & 1 == 1)
}

/// `f(x, y) = y_1`.
pub fn first_bit_of_y(n: usize) -> Result<BooleanFunction> {
    BooleanFunction::from_fn(n, move |_, y| (y >> (n - 1)) & 1 == 1)
}

pub fn random_function(n: usize, seed: u64) -> Result<BooleanFunction> {
    let mut rng = SeedStream::new(seed).named("boolean-function").rng();
    let size = 1usize
        .checked_shl(2 * n as u32)
        .filter(|_| n <= MAX_TABLE_BITS)
        .ok_or_else(|| Error::BudgetExceeded(format!("n = {n} exceeds table cap {MAX_TABLE_BITS}")))?;
    BooleanFunction::new(n, (0..size).map(|_| rng.random::<bool>()).collect())
}

pub fn hamming(f: &BooleanFunction, g: &BooleanFunction) -> Result<usize> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            got: g.n,
        });
    }
    Ok(f.table.iter().zip(&g.table).filter(|(a, b)| a != b).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_tables() {
        assert_eq!(ip_function(1).unwrap().table(), &[false, false, false, true]);
        let ip2 = ip_function(2).unwrap();
        assert!(!ip2.eval(0b11, 0b11));
        assert!(ip2.eval(0b10, 0b11));
        assert!(ip_function(0).is_err());
    }

    #[test]
    fn file_round_trip() {
        let f = random_function(2, 5).unwrap();
        let text = f.to_string();
        assert!(text.starts_with("n=2\n"));
        assert_eq!(text.parse::<BooleanFunction>().unwrap(), f);
        assert!("n=1\n010".parse::<BooleanFunction>().is_err());
        assert!("m=1\n0101".parse::<BooleanFunction>().is_err());
    }

    #[test]
    fn hamming_basics() {
        let f = random_function(3, 1).unwrap();
        assert_eq!(hamming(&f, &f).unwrap(), 0);
        assert_eq!(hamming(&f, &f.negate()).unwrap(), 64);
        assert!(hamming(&f, &ip_function(2).unwrap()).is_err());
    }

    #[test]
    fn first_bits() {
        let f = first_bit_of_x(2).unwrap();
        assert!(f.eval(0b10, 0));
        assert!(!f.eval(0b01, 3));
    }
}
