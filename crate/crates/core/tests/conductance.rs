use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use sawtree_core::conductance::{conductance_interval, escape_probability_mc, root_weight, truncated_conductance};
use sawtree_core::gallery::{FiniteTree, GalleryTree, GraftSpec};
use sawtree_core::numeric::PositiveRatio;
use sawtree_core::tree::{level_counts, Budget};
use sawtree_core::{DomainSpec, SawTree, TreePath};

fn ub() -> Budget {
    Budget::unlimited()
}

fn c(t: &GalleryTree, lam: f64, n: usize) -> f64 {
    truncated_conductance(t, lam, n, &mut ub()).unwrap().value
}

// levels are equipotential in a spherically symmetric tree: R = Σ 1 / (λ^d |T_d|)
fn ss_oracle(t: &GalleryTree, lam: &BigRational, n: usize) -> BigRational {
    let sizes = level_counts(t, n, &mut ub()).unwrap();
    let mut r = BigRational::zero();
    let mut p = BigRational::one();
    for size in sizes.iter().skip(1) {
        p = p * lam;
        r += (&p * BigRational::from_integer(BigInt::from(size.clone()))).recip();
    }
    r.recip()
}

#[test]
fn spherical_trees_match_level_resistance() {
    let lam = BigRational::new(5.into(), 4.into());
    for t in [
        GalleryTree::b_ary(2),
        GalleryTree::ss_tree_prop5(PositiveRatio::new(7, 5).unwrap()).unwrap(),
        GalleryTree::ss_tree_prop5_bar(PositiveRatio::new(5, 4).unwrap()).unwrap(),
        GalleryTree::ss_tree_prop4(PositiveRatio::new(3, 1).unwrap(), 1).unwrap(),
    ] {
        for n in [1, 5, 12] {
            let got = truncated_conductance(&t, 1.25, n, &mut ub()).unwrap();
            assert_eq!(got.exact.unwrap(), ss_oracle(&t, &lam, n), "{t:?} n={n}");
        }
    }
}

#[test]
fn b_ary_interval_brackets_closed_form() {
    for b in [2u32, 3] {
        let t = GalleryTree::b_ary(b);
        for lam in [0.4, 0.6, 1.0, 1.7] {
            let want = (b as f64 * lam - 1.0).max(0.0);
            let iv = conductance_interval(&t, lam, 40, &mut ub()).unwrap();
            assert!(iv.lower <= want + 1e-12 && want <= iv.upper + 1e-12, "b={b} λ={lam}: {iv:?}");
        }
    }
}

#[test]
fn ray_is_exact_for_large_lambda() {
    let t = GalleryTree::ray();
    let iv = conductance_interval(&t, 2.0, 10, &mut ub()).unwrap();
    assert!((iv.lower - 1.0).abs() < 1e-12 && iv.lower <= iv.upper);
}

#[test]
fn escape_frequency_matches_conductance() {
    let t = GalleryTree::ss_tree_prop5(PositiveRatio::new(3, 2).unwrap()).unwrap();
    for lam in [0.8, 1.0, 1.3] {
        let p = c(&t, lam, 8) / root_weight(&t, lam);
        let mc = escape_probability_mc(&t, lam, 8, 20_000, 5).unwrap();
        assert!((mc.mean - p).abs() < 4.0 * mc.stderr + 1e-9, "λ={lam}: {} vs {p}", mc.mean);
    }
    let saw = SawTree::new(DomainSpec::ClosedHalfPlane, true);
    let p = truncated_conductance(&saw, 1.0, 6, &mut ub()).unwrap().value / root_weight(&saw, 1.0);
    let mc = escape_probability_mc(&saw, 1.0, 6, 20_000, 6).unwrap();
    assert!((mc.mean - p).abs() < 4.0 * mc.stderr, "{} vs {p}", mc.mean);
}

fn spec_tree() -> impl Strategy<Value = GalleryTree> {
    prop_oneof![
        (1u32..4).prop_map(GalleryTree::b_ary),
        (11u64..25).prop_map(|p| GalleryTree::ss_tree_prop5(PositiveRatio::new(p, 10).unwrap()).unwrap()),
        (11u64..25).prop_map(|p| GalleryTree::ss_tree_prop5_bar(PositiveRatio::new(p, 10).unwrap()).unwrap()),
        Just(GalleryTree::periodic_closure(FiniteTree::parse("(()(()))").unwrap()).unwrap()),
        Just(GalleryTree::join(GalleryTree::b_ary(2), GalleryTree::ray())),
        Just(GalleryTree::join(
            GalleryTree::ss_tree_prop5(PositiveRatio::new(7, 5).unwrap()).unwrap(),
            GalleryTree::ss_tree_prop5_bar(PositiveRatio::new(5, 4).unwrap()).unwrap()
        )),
    ]
}

fn finite_tree() -> impl Strategy<Value = FiniteTree> {
    prop::collection::vec(any::<prop::sample::Index>(), 1..16).prop_map(|picks| {
        let mut t = FiniteTree::single();
        for (i, p) in picks.iter().enumerate() {
            t.add_child(p.index(i + 1) as u32);
        }
        t
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncation_decreases_and_intervals_nest(t in spec_tree(), lam in 0.3f64..2.2, n in 1usize..12) {
        let a = conductance_interval(&t, lam, n, &mut ub()).unwrap();
        let b = conductance_interval(&t, lam, n + 1, &mut ub()).unwrap();
        let slack = 1e-12 * a.upper.max(1.0);
        prop_assert!(a.lower <= a.upper);
        prop_assert!(b.upper <= a.upper + slack, "{} > {}", b.upper, a.upper);
        prop_assert!(b.lower + slack >= a.lower, "{} < {}", b.lower, a.lower);
    }

    #[test]
    fn conductance_increases_with_lambda(t in spec_tree(), lam in 0.3f64..2.0, d in 0.01f64..0.5, n in 1usize..10) {
        prop_assert!(c(&t, lam, n) <= c(&t, lam + d, n) * (1.0 + 1e-12));
    }

    #[test]
    fn adding_a_subtree_never_lowers_conductance(host in finite_tree(), scion in finite_tree(), site in any::<prop::sample::Index>(), lam in 0.3f64..2.0) {
        let host_t = GalleryTree::finite(host.clone());
        let mut path = Vec::new();
        let mut v = 0u32;
        let mut steps = site.index(host.height() + 1);
        while steps > 0 && !host.is_leaf(v) {
            path.push(0);
            v = host.children(v)[0];
            steps -= 1;
        }
        let g = GalleryTree::graft(GraftSpec { host: host_t.clone(), sites: vec![TreePath(path)], scion: GalleryTree::finite(scion) }).unwrap();
        for n in 1..=host.height().max(1) {
            prop_assert!(c(&host_t, lam, n) <= c(&g, lam, n) * (1.0 + 1e-12));
        }
    }
}
