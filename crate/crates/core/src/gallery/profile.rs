use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{Float, One, ToPrimitive};
use spin::RwLock;

use crate::numeric::{ln_biguint, PositiveRatio};
use crate::{Error, Result};

/// How the per-level child counts of a spherically symmetric tree are made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeRule {
    /// Every vertex has the same number of children.
    Constant(u32),
    /// `ℓ_n = ⌊ x^n / (n^k · ℓ_1 ⋯ ℓ_{n-1}) ⌋`, each level doubled when
    /// `double_squares` is set and `n` is a perfect square. The product in
    /// the denominator uses the undoubled values.
    Floor { x: PositiveRatio, k: u32, double_squares: bool },
}

struct Cache {
    /// undoubled ℓ_1, ℓ_2, …
    base: Vec<u32>,
    base_product: BigUint,
    x_num_pow: BigUint,
    x_den_pow: BigUint,
    /// |T_0|, |T_1|, …
    sizes: Vec<BigUint>,
    ln_sizes: Vec<f64>,
}

/// Per-level child counts of a spherically symmetric tree, generated on
/// demand and cached. `child_count(i)` is the number of children of every
/// vertex at depth `i - 1`, so `|T_n| = child_count(1) ⋯ child_count(n)`.
pub struct LevelProfile {
    rule: DegreeRule,
    cache: RwLock<Cache>,
}

impl core::fmt::Debug for LevelProfile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LevelProfile").field("rule", &self.rule).finish()
    }
}

fn is_square(n: usize) -> bool {
    let r = isqrt(n);
    r * r == n
}

pub(crate) fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl LevelProfile {
    pub fn constant(children: u32) -> Result<Self> {
        if children == 0 {
            return Err(Error::invalid("a level profile needs at least one child per vertex"));
        }
        Ok(Self::from_rule(DegreeRule::Constant(children)))
    }

    /// Builds a floor-rule profile and checks every level at which the
    /// floor could vanish.
    pub fn floor(x: PositiveRatio, k: u32, double_squares: bool) -> Result<Self> {
        if !x.ge_one() {
            return Err(Error::invalid("x must be at least 1"));
        }
        let p = Self::from_rule(DegreeRule::Floor { x, k, double_squares });
        // ℓ_n ≥ ⌊x ((n-1)/n)^k⌋ once the sandwich holds, so zeros can only
        // occur while x ((n-1)/n)^k < 1.
        let last_risky = if k == 0 {
            1
        } else {
            let xf = x.to_f64();
            if xf <= 1.0 {
                return Err(Error::invalid("x must exceed 1 when k > 0"));
            }
            let n0 = 1.0 / (1.0 - Float::powf(xf, -1.0 / k as f64));
            if !(n0 < 1e6) {
                return Err(Error::invalid("x is too close to 1 for this k"));
            }
            n0 as usize + 2
        };
        for level in 1..=last_risky {
            p.extend_to(level)?;
        }
        Ok(p)
    }

    fn from_rule(rule: DegreeRule) -> Self {
        LevelProfile {
            rule,
            cache: RwLock::new(Cache {
                base: Vec::new(),
                base_product: BigUint::one(),
                x_num_pow: BigUint::one(),
                x_den_pow: BigUint::one(),
                sizes: vec![BigUint::one()],
                ln_sizes: vec![0.0],
            }),
        }
    }

    pub fn rule(&self) -> DegreeRule {
        self.rule
    }

    fn extend_to(&self, level: usize) -> Result<()> {
        if self.cache.read().base.len() >= level {
            return Ok(());
        }
        let mut c = self.cache.write();
        while c.base.len() < level {
            let n = c.base.len() + 1;
            let l = match self.rule {
                DegreeRule::Constant(b) => b,
                DegreeRule::Floor { x, k, .. } => {
                    c.x_num_pow *= x.num();
                    c.x_den_pow *= x.den();
                    let den = &c.x_den_pow * &c.base_product * BigUint::from(n).pow(k);
                    let l = (&c.x_num_pow / den)
                        .to_u32()
                        .ok_or_else(|| Error::invalid("degree overflows u32"))?;
                    if l == 0 {
                        // roll back so the cache stays consistent
                        c.x_num_pow /= x.num();
                        c.x_den_pow /= x.den();
                        return Err(Error::ZeroDegree { level: n });
                    }
                    l
                }
            };
            c.base.push(l);
            c.base_product *= l;
        }
        Ok(())
    }

    fn final_count(&self, base: u32, level: usize) -> u32 {
        match self.rule {
            DegreeRule::Floor { double_squares: true, .. } if is_square(level) => base * 2,
            _ => base,
        }
    }

    /// Children of each vertex at depth `level - 1`.
    pub fn child_count(&self, level: usize) -> u32 {
        assert!(level >= 1, "levels start at 1");
        if let DegreeRule::Constant(b) = self.rule {
            return b;
        }
        self.extend_to(level).expect("degree sequence checked at construction");
        let base = self.cache.read().base[level - 1];
        self.final_count(base, level)
    }

    /// Undoubled degree `ℓ_level` of the floor rule.
    pub fn base_count(&self, level: usize) -> u32 {
        if let DegreeRule::Constant(b) = self.rule {
            return b;
        }
        self.extend_to(level).expect("degree sequence checked at construction");
        self.cache.read().base[level - 1]
    }

    fn extend_sizes(&self, n: usize) {
        if self.cache.read().sizes.len() > n {
            return;
        }
        let counts: Vec<u32> = (1..=n).map(|i| self.child_count(i)).collect();
        let mut c = self.cache.write();
        while c.sizes.len() <= n {
            let m = c.sizes.len();
            let next = c.sizes[m - 1].clone() * counts[m - 1];
            let ln = ln_biguint(&next);
            c.sizes.push(next);
            c.ln_sizes.push(ln);
        }
    }

    /// `|T_n|`, exactly.
    pub fn size(&self, n: usize) -> BigUint {
        self.extend_sizes(n);
        self.cache.read().sizes[n].clone()
    }

    pub fn ln_size(&self, n: usize) -> f64 {
        self.extend_sizes(n);
        self.cache.read().ln_sizes[n]
    }

    /// Size of level `r` of the subtree rooted at a vertex of depth `offset`.
    pub fn subtree_level_size(&self, offset: usize, r: usize) -> BigUint {
        if r <= 64 {
            (offset + 1..=offset + r).map(|i| BigUint::from(self.child_count(i))).product()
        } else {
            self.size(offset + r) / self.size(offset)
        }
    }

    /// Natural log of a certified upper bound on `Σ_{m>n} 1/(λ^m |T_m|)`,
    /// from a lower bound on `|T_m|` that the construction guarantees.
    /// `None` when the rule gives no convergent certificate at this `λ`.
    pub fn tail_bound_ln(&self, n: usize, lambda: f64) -> Option<f64> {
        match self.rule {
            DegreeRule::Constant(b) => {
                let q = 1.0 / (b as f64 * lambda);
                (q < 1.0).then(|| (n as f64 + 1.0) * q.ln() - (1.0 - q).ln())
            }
            DegreeRule::Floor { x, k: 0, double_squares } => {
                // |T_m| ≥ x^m - x^{m-1} (exactly x^m = 1 when x = 1)
                let xf = x.to_f64();
                let ln_factor = if x.gt_one() { (xf / (xf - 1.0)).ln() } else { 0.0 };
                let q = 1.0 / (lambda * xf);
                if double_squares {
                    if q > 1.0 {
                        return None;
                    }
                    // Σ_{m>n} 2^{-⌊√m⌋} split into the current square block and the rest
                    let j = isqrt(n + 1);
                    let partial = ((j + 1) * (j + 1) - (n + 1)) as f64;
                    let rest = (2 * j + 5) as f64;
                    let g_ln = (partial + rest).ln() - j as f64 * core::f64::consts::LN_2;
                    Some(ln_factor + (n as f64 + 1.0) * q.ln() + g_ln)
                } else {
                    (q < 1.0).then(|| ln_factor + (n as f64 + 1.0) * q.ln() - (1.0 - q).ln())
                }
            }
            DegreeRule::Floor { x, k, double_squares: false } => {
                // |T_m| ≥ (x^m/m^k)(1 - ρ/x) with ρ = ((n+1)/n)^k for m > n
                if n == 0 {
                    return None;
                }
                let xf = x.to_f64();
                let kf = k as f64;
                let nf = n as f64;
                let rho = Float::powf((nf + 1.0) / nf, kf);
                if rho >= xf {
                    return None;
                }
                let q = 1.0 / (lambda * xf);
                let r = Float::powf((nf + 2.0) / (nf + 1.0), kf) * q;
                if r >= 1.0 {
                    return None;
                }
                Some(kf * (nf + 1.0).ln() + (nf + 1.0) * q.ln() - (1.0 - r).ln() - (1.0 - rho / xf).ln())
            }
            DegreeRule::Floor { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(s: &str) -> PositiveRatio {
        s.parse().unwrap()
    }

    #[test]
    fn floor_sequences() {
        let p = LevelProfile::floor(ratio("3/2"), 0, false).unwrap();
        let l: Vec<u32> = (1..=4).map(|i| p.child_count(i)).collect();
        assert_eq!(l, vec![1, 2, 1, 2]);
        let two = LevelProfile::floor(ratio("2"), 0, false).unwrap();
        assert!((1..=30).all(|i| two.child_count(i) == 2));
        let four = LevelProfile::floor(ratio("2"), 1, false).unwrap();
        assert_eq!((1..=3).map(|i| four.child_count(i)).collect::<Vec<_>>(), vec![2, 1, 1]);
    }

    #[test]
    fn doubling_at_squares() {
        let bar = LevelProfile::floor(ratio("2"), 0, true).unwrap();
        assert_eq!((1..=4).map(|i| bar.child_count(i)).collect::<Vec<_>>(), vec![4, 2, 2, 4]);
        let one = LevelProfile::floor(ratio("1"), 0, true).unwrap();
        assert_eq!((1..=3).map(|i| one.size(i)).collect::<Vec<_>>(), vec![2u32.into(), 2u32.into(), 2u32.into()]);
    }

    #[test]
    fn zero_degree_is_reported() {
        // x = 11/10, k = 1: ℓ_1 = 1, ℓ_2 = ⌊1.21/2⌋ = 0
        assert_eq!(
            LevelProfile::floor(ratio("11/10"), 1, false).err(),
            Some(Error::ZeroDegree { level: 2 })
        );
    }

    #[test]
    fn subtree_sizes_divide_out() {
        let p = LevelProfile::floor(ratio("17/10"), 0, false).unwrap();
        for off in [0usize, 3, 10] {
            for r in [1usize, 5, 70] {
                assert_eq!(p.subtree_level_size(off, r) * p.size(off), p.size(off + r));
            }
        }
    }

    #[test]
    fn tail_bounds_dominate_partial_sums() {
        // compare the certificate with a long explicit partial tail
        let cases = [
            (LevelProfile::constant(2).unwrap(), 0.8),
            (LevelProfile::floor(ratio("3/2"), 0, false).unwrap(), 0.9),
            (LevelProfile::floor(ratio("5/4"), 0, true).unwrap(), 0.8),
            (LevelProfile::floor(ratio("5/4"), 0, true).unwrap(), 0.85),
            (LevelProfile::floor(ratio("1"), 0, true).unwrap(), 1.0),
            (LevelProfile::floor(ratio("3"), 1, false).unwrap(), 0.5),
        ];
        for (p, lambda) in &cases {
            for n in [5usize, 20, 60] {
                let bound = p.tail_bound_ln(n, *lambda).expect("certificate").exp();
                let explicit: f64 = (n + 1..n + 4000)
                    .map(|m| (-(m as f64) * lambda.ln() - p.ln_size(m)).exp())
                    .sum();
                assert!(explicit <= bound * (1.0 + 1e-12), "{:?} λ={lambda} n={n}: {explicit} > {bound}", p.rule());
            }
        }
    }
}
