//! Small numeric helpers shared across modules.

use alloc::format;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Natural logarithm of a positive big integer, accurate to f64 precision
/// far beyond the f64 range.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * core::f64::consts::LN_2
}

/// `ln(Σ exp(l_i))` without overflow.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    let s: CompensatedSum = logs.iter().map(|l| (l - max).exp()).collect();
    max + s.value().ln()
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64: go through logarithms
        let n = r.numer().magnitude();
        let d = r.denom().magnitude();
        let v = (ln_biguint(n) - ln_biguint(d)).exp();
        if r.numer().sign() == num_bigint::Sign::Minus {
            -v
        } else {
            v
        }
    })
}

/// Root of a strictly increasing function on `[lo, hi]`, bisected until the
/// bracket can no longer shrink in double precision (well below `1e-12`).
pub fn bisect_increasing(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    if f(hi) <= target {
        return hi;
    }
    if f(lo) >= target {
        return lo;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // whichever endpoint is closer in value
    if (f(hi) - target).abs() < (target - f(lo)).abs() {
        hi
    } else {
        lo
    }
}

/// A positive rational `num/den` with exact arithmetic, parsed from
/// `"3/2"`, `"1.4"` or `"2"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PositiveRatio {
    num: u64,
    den: u64,
}

impl PositiveRatio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::invalid("ratio must be positive"));
        }
        let g = num_integer::gcd(num, den);
        Ok(PositiveRatio { num: num / g, den: den / g })
    }

    pub fn integer(n: u64) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(self.num.into(), self.den.into())
    }

    pub fn recip(&self) -> Self {
        PositiveRatio { num: self.den, den: self.num }
    }

    pub fn ge_one(&self) -> bool {
        self.num >= self.den
    }

    pub fn gt_one(&self) -> bool {
        self.num > self.den
    }
}

impl fmt::Display for PositiveRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for PositiveRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad rational {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return PositiveRatio::new(n, d).map_err(|_| bad());
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10u64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
            let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            let num = int.checked_mul(den).and_then(|v| v.checked_add(frac_v)).ok_or_else(bad)?;
            return PositiveRatio::new(num, den).map_err(|_| bad());
        }
        let n: u64 = s.parse().map_err(|_| bad())?;
        PositiveRatio::integer(n).map_err(|_| bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-15)).abs() < 1e-17);
    }

    #[test]
    fn ln_of_huge_integers() {
        let big = BigUint::one() << 5000u32;
        assert!((ln_biguint(&big) - 5000.0 * core::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_biguint(&BigUint::from(1000u32)) - 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ratios_parse_exactly() {
        assert_eq!("3/2".parse::<PositiveRatio>().unwrap(), PositiveRatio::new(3, 2).unwrap());
        assert_eq!("1.4".parse::<PositiveRatio>().unwrap(), PositiveRatio::new(7, 5).unwrap());
        assert_eq!("2".parse::<PositiveRatio>().unwrap(), PositiveRatio::new(2, 1).unwrap());
        assert!("0".parse::<PositiveRatio>().is_err());
        assert!("x".parse::<PositiveRatio>().is_err());
    }

    #[test]
    fn bisection_hits_quadratic_root() {
        let r = bisect_increasing(|x| x + 2.0 * x * x, 1e-9, 1.0, 1.0);
        assert!((r - 0.5).abs() < 1e-15);
    }
}
