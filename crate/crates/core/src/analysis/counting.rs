//! Counting-argument arithmetic with certified (outward-rounded) bounds.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision of the interval arithmetic, in bits after the binary point.
pub const PRECISION_BITS: u32 = 256;

/// Size of the one-qubit-per-coordinate net used by the compression argument.
pub const NET_BASE: u64 = 927;

/// Closed rational interval, kept on the dyadic grid `2^-PRECISION_BITS`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn scale() -> BigInt {
    BigInt::one() << PRECISION_BITS
}

fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl Interval {
    pub fn exact(v: BigRational) -> Self {
        Self { lo: v.clone(), hi: v }
    }

    /// Rounds `lo` down and `hi` up to the dyadic grid.
    fn round_out(self) -> Self {
        let s = scale();
        let lo = (&self.lo * &s).floor();
        let hi = (&self.hi * &s).ceil();
        Self {
            lo: lo / BigRational::from_integer(s.clone()),
            hi: hi / BigRational::from_integer(s),
        }
    }

    fn add(&self, o: &Interval) -> Self {
        Self {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
        .round_out()
    }

    fn scale_int(&self, k: &BigInt) -> Self {
        let k = BigRational::from_integer(k.clone());
        if k.is_negative() {
            Self {
                lo: &self.hi * &k,
                hi: &self.lo * &k,
            }
        } else {
            Self {
                lo: &self.lo * &k,
                hi: &self.hi * &k,
            }
        }
    }

    /// Quotient of a non-negative interval by a positive one.
    fn div_positive(&self, o: &Interval) -> Self {
        assert!(!self.lo.is_negative() && o.lo.is_positive());
        Self {
            lo: &self.lo / &o.hi,
            hi: &self.hi / &o.lo,
        }
        .round_out()
    }

    pub fn mid_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        BigRational::from_float(v).is_some_and(|r| self.lo <= r && r <= self.hi)
    }
}

fn fine_grid() -> BigRational {
    BigRational::from_integer(BigInt::one() << (2 * PRECISION_BITS))
}

/// `ln r` for rational `1 <= r <= 2`, by `2 * atanh((r-1)/(r+1))` with an
/// explicit geometric tail bound. Powers of `z` are carried as a lower and an
/// upper copy on a grid finer than the working precision, so both ends of the
/// enclosure stay rigorous while the numbers stay small.
fn ln_unit_interval(r: &BigRational) -> Interval {
    let one = BigRational::one();
    let z = (r - &one) / (r + &one);
    let z2 = &z * &z;
    let grid = fine_grid();
    let eps = ratio(1, BigInt::one() << (PRECISION_BITS + 8));
    let (mut p_lo, mut p_hi) = (z.clone(), z.clone());
    let (mut s_lo, mut s_hi) = (BigRational::zero(), BigRational::zero());
    let mut k: u64 = 0;
    loop {
        let denom = BigRational::from_integer((2 * k + 1).into());
        s_lo += &p_lo / &denom;
        s_hi += &p_hi / &denom;
        p_lo = (&p_lo * &z2 * &grid).floor() / &grid;
        p_hi = (&p_hi * &z2 * &grid).ceil() / &grid;
        k += 1;
        // Remaining terms sum to at most z^(2k+1) / ((2k+1)(1 - z^2)).
        let tail = &p_hi / (BigRational::from_integer((2 * k + 1).into()) * (&one - &z2));
        if tail < eps || p_hi.is_zero() {
            let two = BigRational::from_integer(2.into());
            return Interval {
                lo: &s_lo * &two,
                hi: (&s_hi + &tail) * &two,
            }
            .round_out();
        }
    }
}

/// Certified enclosure of `log2(num / den)` for positive integers.
pub fn log2_interval(num: &BigUint, den: &BigUint) -> Result<Interval> {
    if num.is_zero() || den.is_zero() {
        return Err(Error::InvalidArgument("log2 of a non-positive value".into()));
    }
    let mut e: i64 = num.bits() as i64 - den.bits() as i64;
    let r = |e: i64| -> BigRational {
        let (n, d) = (BigInt::from(num.clone()), BigInt::from(den.clone()));
        if e >= 0 {
            ratio(n, d << e as u32)
        } else {
            ratio(n << (-e) as u32, d)
        }
    };
    let mut x = r(e);
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    while x < one {
        e -= 1;
        x = r(e);
    }
    while x >= two {
        e += 1;
        x = r(e);
    }
    let ln2 = ln_unit_interval(&two);
    let frac = ln_unit_interval(&x).div_positive(&ln2);
    Ok(frac.add(&Interval::exact(BigRational::from_integer(e.into()))))
}

/// `h(1/4) = 2 - (3/4) log2 3`, enclosed.
pub fn h_quarter_interval() -> Interval {
    let l3 = log2_interval(&BigUint::from(3u32), &BigUint::one()).expect("positive");
    let three_quarters = ratio(3, 4);
    let two = BigRational::from_integer(2.into());
    Interval {
        lo: &two - &l3.hi * &three_quarters,
        hi: &two - &l3.lo * &three_quarters,
    }
    .round_out()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub n: u32,
    pub q: u32,
    /// `log2(927) * 2^(2q+2)`.
    pub k: f64,
    /// Exponent written as `c927 * log2(927) + ch * h(1/4) + c0`.
    pub coeff_log2_927: String,
    pub coeff_h_quarter: String,
    pub constant: String,
    pub log2_bound: f64,
    pub log2_bound_lower: f64,
    pub log2_bound_upper: f64,
    /// `-2^n`.
    pub threshold: f64,
    /// Certified: the upper end of the enclosure lies strictly below the threshold.
    pub passes: bool,
    pub precision_bits: u32,
    /// Whether `n >= 10` and `q <= n/2 - 5`, the regime where passing is claimed.
    pub in_claimed_regime: bool,
}

/// Exponent of `2^((2^(n+1)+1)k) * 2^(2^(2n) h(1/4)) * 2^(-2^(2n))` against `-2^n`.
pub fn counting_bound(n: u32, q: u32) -> Result<CountingReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > 4096 || q > 4096 {
        return Err(Error::BudgetExceeded("exponent sizes beyond 2^8192".into()));
    }
    let l927 = log2_interval(&BigUint::from(NET_BASE), &BigUint::one())?;
    let h = h_quarter_interval();
    let c927 = ((BigInt::one() << (n + 1)) + 1) * (BigInt::one() << (2 * q + 2));
    let ch = BigInt::one() << (2 * n);
    let c0 = -(BigInt::one() << (2 * n));
    let bound = l927
        .scale_int(&c927)
        .add(&h.scale_int(&ch))
        .add(&Interval::exact(BigRational::from_integer(c0.clone())));
    let threshold = -(BigInt::one() << n);
    let passes = bound.hi < BigRational::from_integer(threshold.clone());
    let k = l927.mid_f64() * 2f64.powi(2 * q as i32 + 2);
    Ok(CountingReport {
        n,
        q,
        k,
        coeff_log2_927: c927.to_string(),
        coeff_h_quarter: ch.to_string(),
        constant: c0.to_string(),
        log2_bound: bound.mid_f64(),
        log2_bound_lower: bound.lo.to_f64().unwrap_or(f64::NEG_INFINITY),
        log2_bound_upper: bound.hi.to_f64().unwrap_or(f64::INFINITY),
        threshold: threshold.to_f64().unwrap_or(f64::NEG_INFINITY),
        passes,
        precision_bits: PRECISION_BITS,
        in_claimed_regime: n >= 10 && 2 * q as i64 + 10 <= n as i64,
    })
}

/// `V(n, a) = sum_{l <= a} C(n, l)`.
pub fn hamming_volume(n: u64, a: u64) -> Result<BigUint> {
    if a > n {
        return Err(Error::InvalidArgument(format!("radius {a} exceeds length {n}")));
    }
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for l in 1..=a {
        term = term * BigUint::from(n - l + 1) / BigUint::from(l);
        total += &term;
    }
    Ok(total)
}

/// Checks `V(n, a) <= 2^(n h(a/n))` for `a = lambda * n` exactly, using
/// `2^(n h(a/n)) = n^n / (a^a (n-a)^(n-a))`.
pub fn volume_entropy_check(n: u64, lambda: f64) -> Result<bool> {
    if !(lambda > 0.0 && lambda < 0.5) {
        return Err(Error::OutOfRange {
            value: lambda,
            expected: "(0, 1/2)",
        });
    }
    let scaled = lambda * n as f64;
    let a = scaled.round();
    if (scaled - a).abs() > 1e-9 * n.max(1) as f64 {
        return Err(Error::InvalidArgument(format!("lambda * n = {scaled} is not an integer")));
    }
    volume_entropy_check_exact(n, a as u64)
}

pub fn volume_entropy_check_exact(n: u64, a: u64) -> Result<bool> {
    if n > 1 << 20 {
        return Err(Error::BudgetExceeded("n too large for exact powers".into()));
    }
    let v = hamming_volume(n, a)?;
    let pow = |b: u64, e: u64| num_traits::pow(BigUint::from(b), e as usize);
    Ok(v * pow(a, a) * pow(n - a, n - a) <= pow(n, n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSizeReport {
    pub q: u32,
    pub log2_net_a: f64,
    pub log2_net_b: f64,
    pub log2_net_s: f64,
    pub k: f64,
    pub note: String,
}

pub const NET_DIMENSION_NOTE: &str = "the unitary nets are sized for dimension 2^q although each local unitary acts \
on q qubits including the communication register; formulas are reported verbatim";

pub fn net_size_report(q: u32) -> NetSizeReport {
    let l = (NET_BASE as f64).log2();
    let unit = 2f64.powi(2 * q as i32 + 1);
    NetSizeReport {
        q,
        log2_net_a: unit * l,
        log2_net_b: unit * l,
        log2_net_s: 2.0 * unit * l,
        k: 2.0 * unit * l,
        note: NET_DIMENSION_NOTE.into(),
    }
}

/// `3 delta + 3 delta^2 + delta^3`, exactly.
pub fn delta_margin_value(delta: &BigRational) -> BigRational {
    let three = BigRational::from_integer(3.into());
    &three * delta + &three * delta * delta + delta * delta * delta
}

pub fn delta_margin_check_at(delta: &BigRational) -> bool {
    delta_margin_value(delta) < ratio(65, 10_000)
}

/// The net radius used by the compression argument, `0.00216`.
pub fn default_delta() -> BigRational {
    ratio(216, 100_000)
}

pub fn delta_margin_check() -> bool {
    delta_margin_check_at(&default_delta())
}

/// Parses a plain decimal such as `0.00216` into an exact rational.
pub fn decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a decimal: {s:?}")));
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().expect("digits") / 10;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(digits, den);
    Ok(if neg { -v } else { v })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QubitBoundInput {
    /// Uniformly random function on `n`-bit halves.
    Random { n: u64 },
    /// Function with SMP communication complexity at least `k`.
    Cc { k: u64 },
}

/// Largest `q` for which the security statements apply; negative means none.
pub fn attacker_qubit_bound(input: QubitBoundInput) -> Result<i64> {
    match input {
        QubitBoundInput::Random { n } if n > 0 => Ok((n / 2) as i64 - 5),
        QubitBoundInput::Cc { k } if k > 0 => {
            let log = (u64::BITS - 1 - k.leading_zeros()) as i64;
            Ok(log / 2 - 3)
        }
        _ => Err(Error::InvalidArgument("parameter must be positive".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_enclosures() {
        let l = log2_interval(&BigUint::from(927u32), &BigUint::one()).unwrap();
        assert!(l.contains_f64(927f64.log2()) || (l.mid_f64() - 927f64.log2()).abs() < 1e-14);
        let width = (&l.hi - &l.lo).to_f64().unwrap();
        assert!(width < 1e-70, "{width}");
        let h = h_quarter_interval();
        assert!((h.mid_f64() - 0.811_278_124_459_132_8).abs() < 1e-15);
    }

    #[test]
    fn volume_values() {
        assert_eq!(hamming_volume(4, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(hamming_volume(4, 2).unwrap(), BigUint::from(11u32));
        assert!(volume_entropy_check(20, 0.25).unwrap());
        assert!(volume_entropy_check(20, 0.33).is_err());
    }

    #[test]
    fn decimal_parse() {
        assert_eq!(decimal("0.00216").unwrap(), default_delta());
        assert_eq!(decimal("3").unwrap(), ratio(3, 1));
        assert!(decimal("1e3").is_err());
    }
}
