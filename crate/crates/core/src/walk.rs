//! The biased random walk `RW_λ` on a rooted tree and limit-walk samplers.
//!
//! From a vertex with `k` children the walk steps to the parent with
//! probability `1/(1+kλ)` and to each child with `λ/(1+kλ)`; from the root it
//! picks a child uniformly. With infinite bias it always moves to a uniform
//! child and stops at leaves.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::conductance::phi_children_intervals;
use crate::lattice::LatticePoint;
use crate::saw_tree::FiniteWalk;
use crate::tree::{Budget, TreeCursor, TreeModel};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bias {
    Finite(f64),
    Infinite,
}

impl Bias {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_infinite() && lambda > 0.0 {
            Ok(Bias::Infinite)
        } else if lambda > 0.0 {
            Ok(Bias::Finite(lambda))
        } else {
            Err(Error::invalid("λ must be positive"))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Bias::Finite(l) => l,
            Bias::Infinite => f64::INFINITY,
        }
    }
}

/// Step probabilities: `[parent, child_1, …, child_k]` off the root and
/// `[child_1, …, child_k]` at the root.
pub fn transition_distribution(k_children: usize, is_root: bool, bias: Bias) -> Result<Vec<f64>> {
    if is_root {
        if k_children == 0 {
            return Err(Error::DegenerateRoot);
        }
        return Ok(vec![1.0 / k_children as f64; k_children]);
    }
    match bias {
        Bias::Finite(l) => {
            let z = 1.0 + k_children as f64 * l;
            let mut out = vec![l / z; k_children + 1];
            out[0] = 1.0 / z;
            Ok(out)
        }
        Bias::Infinite if k_children == 0 => Err(Error::Stuck),
        Bias::Infinite => {
            let mut out = vec![1.0 / k_children as f64; k_children + 1];
            out[0] = 0.0;
            Ok(out)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Up,
    Down(u32),
}

/// One step of the walk from the cursor's position.
pub fn step<C: TreeCursor + ?Sized, R: RngCore + ?Sized>(cursor: &mut C, bias: Bias, rng: &mut R) -> Result<Move> {
    let k = cursor.child_count();
    let mv = if cursor.depth() == 0 {
        if k == 0 {
            return Err(Error::DegenerateRoot);
        }
        Move::Down(rng.gen_range(0..k) as u32)
    } else {
        match bias {
            Bias::Infinite if k == 0 => return Err(Error::Stuck),
            Bias::Infinite => Move::Down(rng.gen_range(0..k) as u32),
            Bias::Finite(l) => {
                let u = rng.gen::<f64>() * (1.0 + k as f64 * l);
                if u < 1.0 {
                    Move::Up
                } else {
                    Move::Down((((u - 1.0) / l) as usize).min(k - 1) as u32)
                }
            }
        }
    };
    match mv {
        Move::Up => cursor.ascend(),
        Move::Down(i) => cursor.descend(i as usize),
    }
    Ok(mv)
}

/// Depth (and head point, for walk trees) after every step, starting at the root.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WalkerTrace {
    pub depths: Vec<u32>,
    /// Empty unless the tree's vertices are lattice walks.
    pub heads: Vec<LatticePoint>,
    /// Present when move recording was requested.
    pub moves: Option<Vec<Move>>,
    /// Set when an infinitely biased walk stopped at a leaf.
    pub stuck: bool,
}

impl WalkerTrace {
    pub fn steps(&self) -> usize {
        self.depths.len().saturating_sub(1)
    }

    pub fn max_depth(&self) -> u32 {
        self.depths.iter().copied().max().unwrap_or(0)
    }

    /// The trace cut after `steps` steps.
    pub fn prefix(&self, steps: usize) -> WalkerTrace {
        let m = (steps + 1).min(self.depths.len());
        WalkerTrace {
            depths: self.depths[..m].to_vec(),
            heads: self.heads[..m.min(self.heads.len())].to_vec(),
            moves: self.moves.as_ref().map(|v| v[..m - 1].to_vec()),
            stuck: self.stuck && m == self.depths.len(),
        }
    }
}

/// Runs `max_steps` steps from the root (fewer if an infinitely biased
/// walk gets stuck).
pub fn simulate<T: TreeModel + ?Sized, R: RngCore + ?Sized>(
    tree: &T,
    bias: Bias,
    max_steps: usize,
    record_moves: bool,
    rng: &mut R,
) -> Result<WalkerTrace> {
    let mut cursor = tree.cursor();
    simulate_cursor(&mut cursor, bias, max_steps, record_moves, rng)
}

/// [`simulate`] on a caller-supplied cursor, which is left at the final vertex.
pub fn simulate_cursor<C: TreeCursor + ?Sized, R: RngCore + ?Sized>(
    cursor: &mut C,
    bias: Bias,
    max_steps: usize,
    record_moves: bool,
    rng: &mut R,
) -> Result<WalkerTrace> {
    cursor.reset();
    let with_heads = cursor.head().is_some();
    let mut trace = WalkerTrace {
        depths: Vec::with_capacity(max_steps + 1),
        moves: record_moves.then(Vec::new),
        ..Default::default()
    };
    trace.depths.push(0);
    if with_heads {
        trace.heads.reserve(max_steps + 1);
        trace.heads.extend(cursor.head());
    }
    for _ in 0..max_steps {
        let mv = match step(cursor, bias, rng) {
            Ok(mv) => mv,
            Err(Error::Stuck) => {
                trace.stuck = true;
                break;
            }
            Err(e) => return Err(e),
        };
        trace.depths.push(cursor.depth() as u32);
        if with_heads {
            trace.heads.extend(cursor.head());
        }
        if let Some(m) = trace.moves.as_mut() {
            m.push(mv);
        }
    }
    Ok(trace)
}

/// Number of steps `i ≥ 1` whose head lies on the line `y = 0`.
pub fn line_visit_count(trace: &WalkerTrace) -> usize {
    trace.heads.iter().skip(1).filter(|p| p.y == 0).count()
}

/// Number of vertices `i ≥ 1` of a walk on the line `y = 0`.
pub fn walk_line_visit_count(w: &FiniteWalk) -> usize {
    w.points().iter().skip(1).filter(|p| p.y == 0).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixMethod {
    CommitHeuristic,
    ExactSequential,
}

/// The first `k` steps of a limit walk, as child indices from the root.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitWalkPrefix {
    pub path: Vec<u32>,
    /// Head points along the prefix, for walk trees.
    pub heads: Vec<LatticePoint>,
    pub commit_margin: usize,
    pub total_steps: u64,
    pub method: PrefixMethod,
    /// Exact sampler: largest interval width at each step.
    pub widths: Vec<f64>,
    /// Commit heuristic: how often the margin was doubled.
    pub doublings: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommitOutcome {
    Committed(LimitWalkPrefix),
    Timeout { steps: u64, max_depth: usize, margin: usize },
}

impl CommitOutcome {
    pub fn prefix(&self) -> Option<&LimitWalkPrefix> {
        match self {
            CommitOutcome::Committed(p) => Some(p),
            CommitOutcome::Timeout { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CommitParams {
    pub k: usize,
    pub margin: usize,
    pub max_steps: u64,
    /// Check again at margin `2M`; on disagreement double and repeat.
    pub doubling: bool,
}

impl CommitParams {
    pub const DEFAULT_MARGIN: usize = 40;

    pub fn new(k: usize) -> Self {
        CommitParams { k, margin: Self::DEFAULT_MARGIN, max_steps: 10_000_000, doubling: false }
    }
}

/// Commit heuristic for the limit walk: run the walk until it first reaches
/// depth `k + M` and report the depth-`k` ancestor. With doubling, the
/// ancestor is checked again at depth `k + 2M`; if it changed, `M` doubles.
pub fn limit_walk_commit<T: TreeModel + ?Sized, R: RngCore + ?Sized>(
    tree: &T,
    bias: Bias,
    params: CommitParams,
    rng: &mut R,
) -> Result<CommitOutcome> {
    let mut cursor = tree.cursor();
    let with_heads = cursor.head().is_some();
    let mut heads: Vec<LatticePoint> = cursor.head().into_iter().collect();
    let mut margin = params.margin.max(1);
    let mut candidate: Option<(Vec<u32>, Vec<LatticePoint>)> = None;
    let mut doublings = 0;
    let mut max_depth = 0;
    let mut steps = 0u64;
    let mut goal = params.k + margin;
    while steps < params.max_steps {
        match step(&mut cursor, bias, rng) {
            Ok(Move::Up) => {
                heads.truncate(heads.len().saturating_sub(1).max(with_heads as usize));
            }
            Ok(Move::Down(_)) => heads.extend(cursor.head()),
            Err(Error::Stuck) => break,
            Err(e) => return Err(e),
        }
        steps += 1;
        let d = cursor.depth();
        max_depth = max_depth.max(d);
        if d < goal {
            continue;
        }
        let now = (cursor.path()[..params.k].to_vec(), heads[..heads.len().min(params.k + 1)].to_vec());
        let done = match (&candidate, params.doubling) {
            (_, false) => true,
            (Some(c), true) if *c == now => true,
            (Some(_), true) => {
                doublings += 1;
                false
            }
            (None, true) => false,
        };
        if done {
            return Ok(CommitOutcome::Committed(LimitWalkPrefix {
                path: now.0,
                heads: now.1,
                commit_margin: margin,
                total_steps: steps,
                method: PrefixMethod::CommitHeuristic,
                widths: Vec::new(),
                doublings,
            }));
        }
        if candidate.is_some() {
            margin *= 2;
        }
        candidate = Some(now);
        goal = params.k + 2 * margin;
    }
    Ok(CommitOutcome::Timeout { steps, max_depth, margin })
}

/// Samples the first `k` limit-walk steps one at a time from the
/// first-step law intervals, refining the truncation along `schedule` until
/// every child's interval is narrower than `tol`.
pub fn limit_walk_exact<T: TreeModel + ?Sized, R: RngCore + ?Sized>(
    tree: &T,
    lambda: f64,
    k: usize,
    tol: f64,
    schedule: &[usize],
    rng: &mut R,
    budget: &mut Budget,
) -> Result<LimitWalkPrefix> {
    let sampler = ExactSampler::new(tree, lambda, tol, schedule)?;
    sampler.sample(k, rng, budget)
}

/// Per-vertex child laws for the sequential exact sampler, cached by path.
pub struct ExactSampler<'a, T: TreeModel + ?Sized> {
    tree: &'a T,
    lambda: f64,
    tol: f64,
    schedule: Vec<usize>,
    cache: spin::Mutex<hashbrown::HashMap<Vec<u32>, (Vec<f64>, f64)>>,
}

impl<'a, T: TreeModel + ?Sized> ExactSampler<'a, T> {
    pub fn new(tree: &'a T, lambda: f64, tol: f64, schedule: &[usize]) -> Result<Self> {
        if schedule.is_empty() || !(tol > 0.0) {
            return Err(Error::invalid("need a nonempty schedule and tol > 0"));
        }
        Ok(ExactSampler {
            tree,
            lambda,
            tol,
            schedule: schedule.to_vec(),
            cache: spin::Mutex::new(hashbrown::HashMap::new()),
        })
    }

    /// Normalized midpoint law of the children of the vertex at `path`, and
    /// the largest interval width reached.
    pub fn child_law(&self, path: &[u32], budget: &mut Budget) -> Result<(Vec<f64>, f64)> {
        if let Some(v) = self.cache.lock().get(path) {
            return Ok(v.clone());
        }
        let mut node = self.tree.root();
        for &i in path {
            let mut kids = self.tree.children(&node);
            if i as usize >= kids.len() {
                return Err(Error::InvalidPath);
            }
            node = kids.swap_remove(i as usize);
        }
        let mut width = f64::INFINITY;
        let mut law = Vec::new();
        for &n in &self.schedule {
            let iv = phi_children_intervals(self.tree, &node, self.lambda, n, budget)?;
            width = iv.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
            law = iv.iter().map(|(a, b)| 0.5 * (a + b)).collect();
            if width < self.tol {
                break;
            }
        }
        if law.is_empty() {
            return Err(Error::Stuck);
        }
        if width >= self.tol {
            return Err(Error::RefinementExhausted { tol: self.tol, width });
        }
        let total: f64 = law.iter().sum();
        for p in &mut law {
            *p /= total;
        }
        self.cache.lock().insert(path.to_vec(), (law.clone(), width));
        Ok((law, width))
    }

    pub fn sample<R: RngCore + ?Sized>(&self, k: usize, rng: &mut R, budget: &mut Budget) -> Result<LimitWalkPrefix> {
        let mut path = Vec::with_capacity(k);
        let mut widths = Vec::with_capacity(k);
        for _ in 0..k {
            let (law, width) = self.child_law(&path, budget)?;
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = law.len() - 1;
            for (i, p) in law.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            path.push(pick as u32);
            widths.push(width);
        }
        let heads = match self.tree.head(&self.tree.root()) {
            Some(_) => {
                let mut node = self.tree.root();
                let mut hs = vec![self.tree.head(&node).unwrap()];
                for &i in &path {
                    node = self.tree.children(&node).swap_remove(i as usize);
                    hs.extend(self.tree.head(&node));
                }
                hs
            }
            None => Vec::new(),
        };
        Ok(LimitWalkPrefix {
            path,
            heads,
            commit_margin: 0,
            total_steps: 0,
            method: PrefixMethod::ExactSequential,
            widths,
            doublings: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::GalleryTree;
    use crate::lattice::{Dir, DomainSpec};
    use crate::rng::substream;
    use crate::saw_tree::SawTree;

    #[test]
    fn kernel_values() {
        assert_eq!(transition_distribution(3, false, Bias::Finite(1.0)).unwrap(), vec![0.25; 4]);
        assert_eq!(transition_distribution(5, true, Bias::Finite(9.0)).unwrap(), vec![0.2; 5]);
        assert_eq!(transition_distribution(0, false, Bias::Finite(7.0)).unwrap(), vec![1.0]);
        assert_eq!(transition_distribution(0, true, Bias::Finite(1.0)), Err(Error::DegenerateRoot));
        let p = transition_distribution(4, false, Bias::Finite(0.3)).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_visits() {
        let w = |s: &str| FiniteWalk::from_dirs(&Dir::parse_word(s).unwrap()).unwrap();
        assert_eq!(walk_line_visit_count(&w("EEE")), 3);
        assert_eq!(walk_line_visit_count(&w("NNN")), 0);
        assert_eq!(walk_line_visit_count(&w("ENES")), 2);
    }

    #[test]
    fn traces_are_reproducible() {
        let t = SawTree::new(DomainSpec::ClosedHalfPlane, true);
        let a = simulate(&t, Bias::Finite(1.0), 2000, true, &mut substream(3, "walk", 0)).unwrap();
        let b = simulate(&t, Bias::Finite(1.0), 2000, true, &mut substream(3, "walk", 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.steps(), 2000);
        // consecutive depths differ by one
        assert!(a.depths.windows(2).all(|w| w[0].abs_diff(w[1]) == 1));
    }

    #[test]
    fn infinite_bias_never_backtracks_on_pruned_tree() {
        let t = SawTree::new(DomainSpec::FullPlane, true);
        for s in 0..20 {
            let tr = simulate(&t, Bias::Infinite, 300, false, &mut substream(s, "walk", 0)).unwrap();
            assert!(!tr.stuck);
            assert!(tr.depths.iter().enumerate().all(|(i, &d)| d as usize == i));
        }
    }

    #[test]
    fn infinite_bias_gets_trapped_on_unpruned_tree() {
        let t = SawTree::new(DomainSpec::FullPlane, false);
        let stuck = (0..400)
            .filter(|&s| simulate(&t, Bias::Infinite, 500, false, &mut substream(s, "walk", 0)).unwrap().stuck)
            .count();
        assert!(stuck > 0);
    }

    #[test]
    fn ray_prefix_is_forced() {
        let ray = GalleryTree::ray();
        let out = limit_walk_commit(&ray, Bias::Finite(1.5), CommitParams::new(5), &mut substream(1, "c", 0)).unwrap();
        assert_eq!(out.prefix().unwrap().path, vec![0; 5]);
        let ex = limit_walk_exact(&ray, 1.5, 5, 1e-6, &[5], &mut substream(1, "e", 0), &mut Budget::unlimited()).unwrap();
        assert_eq!(ex.path, vec![0; 5]);
    }

    #[test]
    fn exact_sampler_law_on_b_ary() {
        let t = GalleryTree::b_ary(3);
        let s = ExactSampler::new(&t, 1.0, 1e-9, &[2]).unwrap();
        let (law, width) = s.child_law(&[], &mut Budget::unlimited()).unwrap();
        assert_eq!(law, vec![1.0 / 3.0; 3]);
        assert_eq!(width, 0.0);
    }

    #[test]
    fn refinement_can_be_exhausted() {
        let t = GalleryTree::join(GalleryTree::b_ary(2), GalleryTree::ray());
        let r = limit_walk_exact(&t, 0.9, 1, 1e-6, &[2, 3], &mut substream(0, "e", 0), &mut Budget::unlimited());
        assert!(matches!(r, Err(Error::RefinementExhausted { .. })));
    }

    #[test]
    fn commit_times_out_on_finite_tree() {
        let t = GalleryTree::finite(crate::gallery::FiniteTree::path(3));
        let p = CommitParams { k: 1, margin: 5, max_steps: 1000, doubling: false };
        let out = limit_walk_commit(&t, Bias::Finite(2.0), p, &mut substream(0, "c", 0)).unwrap();
        assert!(matches!(out, CommitOutcome::Timeout { steps: 1000, .. }));
    }
}
