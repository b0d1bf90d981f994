//! Rayon drivers. Work is split into fixed units (Monte Carlo blocks, runs,
//! grid points) whose random streams depend only on the unit index, and
//! results are merged in index order, so thread count never changes output.

use rayon::prelude::*;

use sawtree_core::conductance::{escape_block, mc_blocks, McEstimate};
use sawtree_core::{Error, Result, TreeModel};

/// [`sawtree_core::conductance::escape_probability_mc`] with the blocks spread
/// over threads; returns the same estimate.
pub fn escape_probability_par<T: TreeModel + Sync + ?Sized>(
    tree: &T,
    lam: f64,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::InvalidInput(format!("λ must be positive and finite, got {lam}")));
    }
    if n == 0 || samples == 0 {
        return Err(Error::InvalidInput("need n ≥ 1 and at least one sample".into()));
    }
    if tree.children(&tree.root()).is_empty() {
        return Err(Error::DegenerateRoot);
    }
    let blocks: Vec<_> = mc_blocks(samples).collect();
    let hits: u64 = blocks.par_iter().map(|&(b, c)| escape_block(tree, lam, n, seed, b, c)).sum();
    Ok(McEstimate::from_counts(hits, samples, seed))
}

/// Evaluates `f` on every item in parallel and returns the results in item order.
pub fn map_ordered<I: Sync, V: Send>(items: &[I], f: impl Fn(&I) -> V + Sync + Send) -> Vec<V> {
    items.par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sawtree_core::conductance::escape_probability_mc;
    use sawtree_core::gallery::GalleryTree;

    #[test]
    fn matches_sequential() {
        let t = GalleryTree::join(GalleryTree::ray(), GalleryTree::b_ary(2));
        let a = escape_probability_par(&t, 1.2, 5, 10_000, 3).unwrap();
        let b = escape_probability_mc(&t, 1.2, 5, 10_000, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn order_kept() {
        let v: Vec<u64> = (0..1000).collect();
        assert_eq!(map_ordered(&v, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
