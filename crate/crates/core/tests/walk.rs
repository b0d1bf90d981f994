use proptest::prelude::*;
use sawtree_core::gallery::{FiniteTree, GalleryTree};
use sawtree_core::rng::substream;
use sawtree_core::walk::{limit_walk_commit, line_visit_count, simulate, transition_distribution, Bias, CommitParams, Move};
use sawtree_core::{DomainSpec, SawTree};

#[test]
fn ray_occupation_matches_stationary_law() {
    // edge into depth d has weight λ^d: π(0) = λ, π(d) = λ^d (1 + λ)
    let lam: f64 = 0.5;
    let steps = 400_000;
    let trace = simulate(&GalleryTree::ray(), Bias::new(lam).unwrap(), steps, false, &mut substream(3, "ray", 0)).unwrap();
    let total = lam + (1.0 + lam) * lam / (1.0 - lam);
    for d in 0..5u32 {
        let want = if d == 0 { lam } else { lam.powi(d as i32) * (1.0 + lam) } / total;
        let got = trace.depths.iter().filter(|&&x| x == d).count() as f64 / trace.depths.len() as f64;
        assert!((got - want).abs() < 0.01, "depth {d}: {got} vs {want}");
    }
}

#[test]
fn ray_up_frequency_is_birth_death() {
    let lam = 2.0;
    let trace = simulate(&GalleryTree::ray(), Bias::new(lam).unwrap(), 100_000, true, &mut substream(3, "ray", 1)).unwrap();
    let moves = trace.moves.as_ref().unwrap();
    let (mut off_root, mut ups) = (0u64, 0u64);
    for (i, m) in moves.iter().enumerate() {
        if trace.depths[i] > 0 {
            off_root += 1;
            ups += (*m == Move::Up) as u64;
        }
    }
    let p = 1.0 / (1.0 + lam);
    let f = ups as f64 / off_root as f64;
    let sigma = (p * (1.0 - p) / off_root as f64).sqrt();
    assert!((f - p).abs() < 4.0 * sigma, "{f} vs {p}");
}

#[test]
fn infinite_bias_stops_at_a_leaf() {
    let t = GalleryTree::finite(FiniteTree::parse("((())())").unwrap());
    let trace = simulate(&t, Bias::Infinite, 10, false, &mut substream(1, "inf", 0)).unwrap();
    assert!(trace.stuck);
    assert!(trace.depths.windows(2).all(|w| w[1] == w[0] + 1));
}

#[test]
fn commit_margins_agree() {
    let tree = GalleryTree::join(GalleryTree::b_ary(2), GalleryTree::ray());
    let bias = Bias::new(1.5).unwrap();
    let samples = 2000u64;
    let freq = |margin: usize| {
        let params = CommitParams { margin, ..CommitParams::new(1) };
        let hits: u64 = (0..samples)
            .map(|i| {
                let out = limit_walk_commit(&tree, bias, params, &mut substream(margin as u64, "margin", i)).unwrap();
                (out.prefix().unwrap().path[0] == 0) as u64
            })
            .sum();
        hits as f64 / samples as f64
    };
    let (a, b) = (freq(30), freq(60));
    let sigma = (0.25 / samples as f64).sqrt();
    assert!((a - b).abs() < 4.0 * sigma * 2f64.sqrt(), "{a} vs {b}");
}

#[test]
fn walk_tree_heads_track_depth() {
    let tree = SawTree::new(DomainSpec::ClosedHalfPlane, true);
    let trace = simulate(&tree, Bias::new(1.0).unwrap(), 2000, false, &mut substream(2, "heads", 0)).unwrap();
    assert_eq!(trace.heads.len(), trace.depths.len());
    for (h, d) in trace.heads.iter().zip(&trace.depths) {
        assert!(h.y >= 0 && (h.x.abs() + h.y) as u32 <= *d);
    }
    assert_eq!(line_visit_count(&trace), trace.heads.iter().skip(1).filter(|p| p.y == 0).count());
}

proptest! {
    #[test]
    fn transition_rows_are_distributions(k in 0usize..8, root in any::<bool>(), lam in 0.01f64..50.0) {
        match transition_distribution(k, root, Bias::new(lam).unwrap()) {
            Ok(p) => {
                prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(p.iter().all(|&x| x >= 0.0));
                if !root {
                    prop_assert!(p[1..].iter().all(|&x| (x - lam * p[0]).abs() < 1e-9 * x.max(1.0)));
                }
            }
            Err(_) => prop_assert!(root && k == 0),
        }
    }
}
