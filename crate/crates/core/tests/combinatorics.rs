use proptest::prelude::*;
use sawtree_core::combinatorics::{
    count_bridges, count_irreducible, critical_lambda_m, irreducible_through, is_bridge, is_irreducible, kesten_sample,
    phi_critical_m, IrreducibleBridges, KestenConfig, Turn,
};
use sawtree_core::rng::substream;
use sawtree_core::tree::Budget;
use sawtree_core::DomainSpec;

const N: usize = 14;

fn ub() -> Budget {
    Budget::unlimited()
}

#[test]
fn bridges_renew_through_irreducibles() {
    let b = count_bridges(DomainSpec::FullPlane, N, &mut ub()).counts;
    let p = count_irreducible(N, &mut ub()).counts;
    assert_eq!(b[0], 1);
    for n in 1..=N {
        let renewal: u64 = (1..=n).map(|k| p[k] * b[n - k]).sum();
        assert_eq!(b[n], renewal, "n={n}");
    }
}

#[test]
fn turn_tables_split_the_irreducibles() {
    let p = count_irreducible(12, &mut ub()).counts;
    let t: Vec<_> = Turn::ALL.iter().map(|&t| irreducible_through(t, 12, &mut ub())).collect();
    for n in 1..=12 {
        assert_eq!(t.iter().map(|c| c.counts[n]).sum::<u64>(), p[n], "n={n}");
        assert_eq!(t[1].counts[n], t[2].counts[n], "reflection symmetry at n={n}");
    }
    for m in 1..=12 {
        let lm = critical_lambda_m(&count_irreducible(m, &mut ub()), m).unwrap();
        let phi = phi_critical_m(&t, lm, m).unwrap();
        assert!((phi.iter().sum::<f64>() - 1.0).abs() < 1e-9, "m={m}");
    }
}

#[test]
fn critical_lambdas_decrease() {
    let p = count_irreducible(12, &mut ub());
    let l: Vec<f64> = (1..=12).map(|m| critical_lambda_m(&p, m).unwrap()).collect();
    assert!((l[0] - 1.0).abs() < 1e-9);
    assert!(l.windows(2).all(|w| w[1] <= w[0]));
}

fn strip(width: u32, n: usize) -> Vec<u64> {
    count_bridges(DomainSpec::strip(width).unwrap(), n, &mut ub()).counts
}

#[test]
fn doubled_strip_dominates_products() {
    for l in [1, 2, 3, 4] {
        let (s, d) = (strip(l, 12), strip(2 * l, 12));
        for n in 1..12 {
            for m in 1..=12 - n {
                assert!(d[n + m] >= s[n] * s[m], "ℓ={l} n={n} m={m}");
            }
        }
    }
}

#[test]
fn strip_counts_grow_with_width() {
    let b = count_bridges(DomainSpec::FullPlane, 12, &mut ub()).counts;
    for l in 1..6 {
        let (s, t) = (strip(l, 12), strip(l + 1, 12));
        for n in 0..=12 {
            assert!(s[n] <= t[n] && t[n] <= b[n], "ℓ={l} n={n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kesten_blocks_are_irreducible(beta in 0.1f64..0.6, blocks in 1usize..8, seed in any::<u64>()) {
        let store = IrreducibleBridges::enumerate(7, &mut ub()).unwrap();
        let cfg = KestenConfig::new(beta, &store).unwrap();
        prop_assert!((cfg.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let s = kesten_sample(&cfg, &store, blocks, &mut substream(seed, "kesten", 0)).unwrap();
        prop_assert!(is_bridge(&s.walk));
        prop_assert_eq!(s.block_lengths.len(), blocks);
        prop_assert_eq!(s.block_lengths.iter().sum::<usize>(), s.walk.len());
        let mut at = 0;
        for &len in &s.block_lengths {
            prop_assert!(is_irreducible(&s.walk.segment(at, at + len)));
            at += len;
        }
    }
}
