use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use sawtree_core::gallery::{growth_estimate, periodic_critical_lambda, FiniteTree, GalleryTree, GraftSpec};
use sawtree_core::numeric::PositiveRatio;
use sawtree_core::tree::{level_counts, Budget};
use sawtree_core::TreePath;

fn counts(t: &GalleryTree, n: usize) -> Vec<BigUint> {
    level_counts(t, n, &mut Budget::unlimited()).unwrap()
}

fn small(t: &GalleryTree, n: usize) -> Vec<u64> {
    counts(t, n).iter().map(|c| c.to_u64().unwrap()).collect()
}

fn pow(x: &BigRational, n: usize) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, _| acc * x)
}

fn big(c: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(c.clone()))
}

#[test]
fn prop5_sizes_are_sandwiched() {
    for (p, q) in [(7, 5), (5, 4), (3, 2), (2, 1), (13, 10)] {
        let x = BigRational::new(p.into(), q.into());
        let t = GalleryTree::ss_tree_prop5(PositiveRatio::new(p, q).unwrap()).unwrap();
        let c = counts(&t, 40);
        for n in 1..=40 {
            let size = big(&c[n]);
            assert!(size <= pow(&x, n), "x={p}/{q} n={n}");
            assert!(size > pow(&x, n) - pow(&x, n - 1), "x={p}/{q} n={n}");
        }
    }
}

#[test]
fn prop4_sizes_are_sandwiched() {
    for (p, q, k) in [(3, 1, 1), (4, 1, 2), (5, 2, 1)] {
        let x = BigRational::new(p.into(), q.into());
        let t = GalleryTree::ss_tree_prop4(PositiveRatio::new(p, q).unwrap(), k).unwrap();
        let c = counts(&t, 30);
        for n in 1..=30 {
            let nk = BigRational::from_integer(BigInt::from(n).pow(k));
            let top = pow(&x, n) / nk;
            assert!(big(&c[n]) <= top, "n={n}");
            assert!(big(&c[n]) > top - big(&c[n - 1]), "n={n}");
        }
    }
}

#[test]
fn bar_tree_doubles_at_squares() {
    let x = PositiveRatio::new(5, 4).unwrap();
    let plain = counts(&GalleryTree::ss_tree_prop5(x).unwrap(), 50);
    let bar = counts(&GalleryTree::ss_tree_prop5_bar(x).unwrap(), 50);
    for n in 0..=50 {
        let squares = (1..=n).filter(|m| (1..=*m).any(|r| r * r == *m)).count();
        assert_eq!(&bar[n], &(&plain[n] << squares), "n={n}");
    }
}

#[test]
fn periodic_closure_matches_explicit_grafting() {
    for s in ["(()(()))", "((())()(()))", "(()()())", "((()))"] {
        let t = FiniteTree::parse(s).unwrap();
        let closure = small(&GalleryTree::periodic_closure(t.clone()).unwrap(), 12);
        let mut explicit = t.clone();
        for _ in 0..12 {
            explicit = explicit.graft_at_leaves(&t);
        }
        let levels = explicit.level_counts();
        for n in 0..=12 {
            assert_eq!(closure[n], levels[n] as u64, "{s} n={n}");
        }
    }
}

#[test]
fn periodic_growth_matches_critical_lambda() {
    let t = FiniteTree::parse("(()(()))").unwrap();
    let lc = periodic_critical_lambda(&t).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((lc - 1.0 / golden).abs() < 1e-8);
    let g = growth_estimate(&GalleryTree::periodic_closure(t).unwrap(), 40, &mut Budget::unlimited()).unwrap();
    assert!((g[39].1 * lc - 1.0).abs() < 0.02, "{}", g[39].1);
}

#[test]
fn join_adds_shifted_levels() {
    let a = GalleryTree::ss_tree_prop5(PositiveRatio::new(3, 2).unwrap()).unwrap();
    let b = GalleryTree::b_ary(3);
    let j = small(&GalleryTree::join(a.clone(), b.clone()), 10);
    let (ca, cb) = (small(&a, 9), small(&b, 9));
    assert_eq!(j[0], 1);
    for n in 1..=10 {
        assert_eq!(j[n], ca[n - 1] + cb[n - 1]);
    }
}

#[test]
fn graft_is_associative_on_disjoint_sites() {
    let host = GalleryTree::b_ary(2);
    let s1 = GalleryTree::ray();
    let s2 = GalleryTree::finite(FiniteTree::star(3));
    let sites1 = vec![TreePath(vec![0])];
    let sites2 = vec![TreePath(vec![1, 1])];
    let step = GalleryTree::graft(GraftSpec { host: host.clone(), sites: sites1.clone(), scion: s1.clone() }).unwrap();
    let left = GalleryTree::graft(GraftSpec { host: step, sites: sites2.clone(), scion: s2.clone() }).unwrap();
    let step = GalleryTree::graft(GraftSpec { host, sites: sites2, scion: s2 }).unwrap();
    let right = GalleryTree::graft(GraftSpec { host: step, sites: sites1, scion: s1 }).unwrap();
    assert_eq!(small(&left, 8), small(&right, 8));
}

fn finite_tree() -> impl Strategy<Value = FiniteTree> {
    prop::collection::vec(any::<prop::sample::Index>(), 1..20).prop_map(|picks| {
        let mut t = FiniteTree::single();
        for (i, p) in picks.iter().enumerate() {
            t.add_child(p.index(i + 1) as u32);
        }
        t
    })
}

// child-index path of every vertex, in vertex order
fn paths(t: &FiniteTree) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new(); t.len()];
    for v in 0..t.len() as u32 {
        for (i, &c) in t.children(v).iter().enumerate() {
            let mut p = out[v as usize].clone();
            p.push(i as u32);
            out[c as usize] = p;
        }
    }
    out
}

proptest! {
    #[test]
    fn graft_adds_shifted_scion_levels(host in finite_tree(), scion in finite_tree(), pick in prop::collection::btree_set(0usize..20, 1..4)) {
        let ps = paths(&host);
        let sites: Vec<_> = pick.into_iter().filter(|&i| i < ps.len()).map(|i| TreePath(ps[i].clone())).collect();
        prop_assume!(!sites.is_empty());
        let g = GalleryTree::graft(GraftSpec { host: GalleryTree::finite(host.clone()), sites: sites.clone(), scion: GalleryTree::finite(scion.clone()) }).unwrap();
        let got = small(&g, 40);
        let mut want = host.level_counts();
        want.resize(41, 0);
        let sc = scion.level_counts();
        for s in &sites {
            for (r, &c) in sc.iter().enumerate().skip(1) {
                want[s.len() + r] += c;
            }
        }
        for n in 0..=40 {
            prop_assert_eq!(got[n], want[n] as u64);
        }
    }
}
