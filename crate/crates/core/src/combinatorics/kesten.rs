use alloc::vec::Vec;

use rand::{Rng, RngCore};

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::{for_each_irreducible, CountTable, Turn};
use crate::lattice::Dir;
use crate::numeric::bisect_increasing;
use crate::saw_tree::FiniteWalk;
use crate::tree::Budget;
use crate::{Error, Result};

/// Longest irreducible bridges kept explicitly for sampling.
pub const MAX_STORED_LENGTH: usize = 12;

fn need(table: &CountTable, n: usize) -> Result<()> {
    if table.max_n() < n {
        return Err(Error::BudgetExceeded { reached: table.max_n() });
    }
    Ok(())
}

/// `[max_{m≤n} b_m^{1/m}, min_{m≤n} c_m^{1/m}]`, a bracket for the
/// connective constant.
pub fn mu_bracket(walks: &CountTable, bridges: &CountTable, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::invalid("the bracket starts at n = 1"));
    }
    need(walks, n)?;
    need(bridges, n)?;
    let root = |c: u64, m: usize| (c as f64).ln() / m as f64;
    let lo = (1..=n).map(|m| root(bridges.counts[m], m)).fold(f64::NEG_INFINITY, f64::max);
    let hi = (1..=n).map(|m| root(walks.counts[m], m)).fold(f64::INFINITY, f64::min);
    Ok((lo.exp(), hi.exp()))
}

/// `Σ_{n=1}^{N} p_n x^n`.
pub fn kesten_partial_sum(irreducible: &CountTable, x: f64, n: usize) -> Result<f64> {
    need(irreducible, n)?;
    Ok((1..=n).map(|k| irreducible.counts[k] as f64 * x.powi(k as i32)).sum())
}

/// `λ_m`: the root in `(0, 1]` of `Σ_{n≤m} p_n x^n = 1`.
pub fn critical_lambda_m(irreducible: &CountTable, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    need(irreducible, m)?;
    let p = &irreducible.counts;
    let f = |x: f64| (1..=m).map(|k| p[k] as f64 * x.powi(k as i32)).sum::<f64>();
    Ok(bisect_increasing(f, 1e-9, 1.0, 1.0))
}

/// `φ^{m,λ_m,2}(o, y, x_i) = Σ_{n≤m} p_{i,n} λ_m^n` for the three turns, in
/// [`Turn::ALL`] order. `through[i]` must be the table for `Turn::ALL[i]`.
pub fn phi_critical_m(through: &[CountTable], lambda_m: f64, m: usize) -> Result<[f64; 3]> {
    if through.len() != 3 {
        return Err(Error::invalid("need one table per turn"));
    }
    let mut out = [0.0; 3];
    for (i, t) in Turn::ALL.iter().enumerate() {
        if through[i].kind != super::CountKind::IrreducibleThrough(*t) {
            return Err(Error::invalid("tables out of turn order"));
        }
        need(&through[i], m)?;
        out[i] = (1..=m).map(|n| through[i].counts[n] as f64 * lambda_m.powi(n as i32)).sum();
    }
    Ok(out)
}

/// All irreducible bridges up to a length, as step words.
#[derive(Clone, Debug)]
pub struct IrreducibleBridges {
    by_len: Vec<Vec<Vec<Dir>>>,
}

impl IrreducibleBridges {
    pub fn enumerate(m_max: usize, budget: &mut Budget) -> Result<Self> {
        if m_max > MAX_STORED_LENGTH {
            return Err(Error::invalid("irreducible bridges are stored up to length 12"));
        }
        let mut by_len = alloc::vec![Vec::new()];
        for n in 1..=m_max {
            let mut v = Vec::new();
            for_each_irreducible(n, budget, &mut |d| v.push(d.to_vec()))
                .map_err(|_| Error::BudgetExceeded { reached: n - 1 })?;
            by_len.push(v);
        }
        Ok(IrreducibleBridges { by_len })
    }

    pub fn m_max(&self) -> usize {
        self.by_len.len() - 1
    }

    pub fn of_length(&self, n: usize) -> &[Vec<Dir>] {
        &self.by_len[n]
    }
}

/// Kesten measure `Q^β` truncated to irreducible bridges of length `≤ m_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct KestenConfig {
    pub beta: f64,
    pub m_max: usize,
    /// `Σ_{n≤m_max} p_n β^n`
    pub z: f64,
    /// `weights[n] = p_n β^n / z`
    pub weights: Vec<f64>,
}

impl KestenConfig {
    pub fn new(beta: f64, store: &IrreducibleBridges) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::invalid("β must be positive"));
        }
        let m_max = store.m_max();
        let raw: Vec<f64> = (0..=m_max)
            .map(|n| if n == 0 { 0.0 } else { store.of_length(n).len() as f64 * beta.powi(n as i32) })
            .collect();
        let z: f64 = raw.iter().sum();
        if !(z > 0.0) {
            return Err(Error::invalid("empty support"));
        }
        Ok(KestenConfig { beta, m_max, z, weights: raw.iter().map(|w| w / z).collect() })
    }
}

/// A concatenation of i.i.d. `Q^β` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct KestenSample {
    pub walk: FiniteWalk,
    pub block_lengths: Vec<usize>,
}

/// Draws `k_blocks` irreducible bridges (length by weight, then uniformly
/// within the length) and concatenates them.
pub fn kesten_sample<R: RngCore + ?Sized>(
    config: &KestenConfig,
    store: &IrreducibleBridges,
    k_blocks: usize,
    rng: &mut R,
) -> Result<KestenSample> {
    if store.m_max() != config.m_max {
        return Err(Error::invalid("configuration and store disagree on m_max"));
    }
    let mut dirs = Vec::new();
    let mut lengths = Vec::with_capacity(k_blocks);
    for _ in 0..k_blocks {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut n = config.m_max;
        for (len, w) in config.weights.iter().enumerate() {
            acc += w;
            if u < acc && *w > 0.0 {
                n = len;
                break;
            }
        }
        while store.of_length(n).is_empty() {
            n -= 1;
        }
        let pool = store.of_length(n);
        dirs.extend_from_slice(&pool[rng.gen_range(0..pool.len())]);
        lengths.push(n);
    }
    Ok(KestenSample { walk: FiniteWalk::from_dirs(&dirs)?, block_lengths: lengths })
}

#[cfg(test)]
mod tests {
    use super::super::{count_bridges, count_irreducible, count_walks, irreducible_through, is_bridge};
    use super::*;
    use crate::lattice::DomainSpec;
    use crate::rng::substream;

    #[test]
    fn first_critical_values() {
        let p = count_irreducible(6, &mut Budget::unlimited());
        assert_eq!(critical_lambda_m(&p, 1).unwrap(), 1.0);
        assert!((critical_lambda_m(&p, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(critical_lambda_m(&p, 7), Err(Error::BudgetExceeded { reached: 6 })));
    }

    #[test]
    fn phi_at_m2() {
        let mut b = Budget::unlimited();
        let through: Vec<_> = Turn::ALL.iter().map(|&t| irreducible_through(t, 2, &mut b)).collect();
        let phi = phi_critical_m(&through, 0.5, 2).unwrap();
        assert_eq!(phi, [0.5, 0.25, 0.25]);
    }

    #[test]
    fn bracket_at_one() {
        let mut b = Budget::unlimited();
        let c = count_walks(DomainSpec::FullPlane, 1, &mut b);
        let br = count_bridges(DomainSpec::FullPlane, 1, &mut b);
        assert_eq!(mu_bracket(&c, &br, 1).unwrap(), (1.0, 4.0));
    }

    #[test]
    fn samples_are_bridges() {
        let store = IrreducibleBridges::enumerate(6, &mut Budget::unlimited()).unwrap();
        let cfg = KestenConfig::new(0.35, &store).unwrap();
        assert!((cfg.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut rng = substream(5, "kesten", 0);
        for _ in 0..200 {
            let s = kesten_sample(&cfg, &store, 5, &mut rng).unwrap();
            assert!(is_bridge(&s.walk));
        }
        let tiny = KestenConfig::new(1e-9, &store).unwrap();
        let s = kesten_sample(&tiny, &store, 4, &mut rng).unwrap();
        assert_eq!(s.block_lengths, alloc::vec![1; 4]);
    }

    #[test]
    fn storage_is_capped() {
        assert!(IrreducibleBridges::enumerate(13, &mut Budget::unlimited()).is_err());
    }
}
