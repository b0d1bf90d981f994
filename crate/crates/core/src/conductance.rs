//! Effective conductance of the biased walk's electrical network.
//!
//! The edge from a vertex at depth `d` to a child carries conductance
//! `λ^{d+1}`, so `π(o) = k_root · λ`. Reductions run on normalized values to
//! stay in range: for a vertex `v` at depth `d`, `g(v) = C_v / λ^d` where `C_v`
//! is the conductance from `v` down to the target level, and a child `c`
//! contributes `h(c) = g(c) / (1 + g(c))` (or `1` if it is on the target
//! level), giving `g(v) = λ Σ_c h(c)`.

use alloc::vec;
use core::cell::Cell;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng as _;

use crate::numeric::{rational_to_f64, CompensatedSum};
use crate::rng::substream;
use crate::tree::{fold_section, section_size, Budget, SsView, TreeCursor, TreeModel};
use crate::{Error, Result};

/// Sections up to this many nodes are reduced in exact rational arithmetic.
pub const EXACT_SECTION_LIMIT: u64 = 100_000;

/// Exact reductions give up once a value needs more bits than this.
pub const EXACT_BITS_LIMIT: u64 = 1 << 14;

/// Samples per Monte Carlo block; block `b` draws from `substream(seed, "escape", b)`.
pub const MC_BLOCK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    TruncatedExact,
    RayClosure,
    NashWilliams,
    SsClosedForm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TruncatedExact => "truncated-exact",
            Method::RayClosure => "ray-closure",
            Method::NashWilliams => "nash-williams",
            Method::SsClosedForm => "ss-closed-form",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConductanceInterval {
    pub lower: f64,
    pub upper: f64,
    pub truncation_level: usize,
    pub methods: Vec<Method>,
}

impl ConductanceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// `C(λ, T, n)`, with the exact rational when the section was small enough.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncated {
    pub value: f64,
    pub exact: Option<BigRational>,
    /// False when no vertex sits at the target level (the value is then 0).
    pub reaches_level: bool,
    pub used_ss_form: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Bernoulli estimate from a success count.
    pub fn from_counts(successes: u64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let mean = successes as f64 / n;
        let var = if samples > 1 { mean * (1.0 - mean) * n / (n - 1.0) } else { 0.0 };
        McEstimate { mean, stderr: (var / n).sqrt(), samples, seed }
    }
}

trait Scalar: Clone {
    fn from_f64(v: f64) -> Self;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn bits(&self) -> u64;
    /// `Σ_{i=1}^{r} 1 / (λ^i ℓ_{off+1} ⋯ ℓ_{off+i})`
    fn ss_rho(view: SsView<'_>, r: usize, lam: &Self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn bits(&self) -> u64 {
        0
    }
    fn ss_rho(view: SsView<'_>, r: usize, lam: &Self) -> Self {
        let ln_lam = lam.ln();
        let mut acc = 0.0;
        let mut sum = CompensatedSum::new();
        for i in 1..=r {
            acc += ln_lam + (view.profile.child_count(view.offset + i) as f64).ln();
            sum.add((-acc).exp());
        }
        sum.value()
    }
}

impl Scalar for BigRational {
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite value")
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
    fn ss_rho(view: SsView<'_>, r: usize, lam: &Self) -> Self {
        let mut denom = <BigRational as One>::one();
        let mut sum = <BigRational as Zero>::zero();
        for i in 1..=r {
            denom = denom * lam * BigRational::from_integer(BigInt::from(view.profile.child_count(view.offset + i)));
            sum += denom.recip();
        }
        sum
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Upper,
    Lower,
}

struct Reduction<S> {
    value: S,
    used_ss: bool,
    /// Some value exceeded [`EXACT_BITS_LIMIT`]; `value` is meaningless.
    too_big: bool,
}

/// Normalized value `g` of `start` (relative to its own depth) for the
/// network truncated at absolute depth `target`.
fn reduce<T, S>(tree: &T, start: T::Node, lam_f: f64, target: usize, side: Side, budget: &mut Budget) -> Result<Reduction<S>>
where
    T: TreeModel + ?Sized,
    S: Scalar,
{
    let lam = S::from_f64(lam_f);
    let d0 = tree.depth(&start);
    let one = S::one();
    // value passed up from a vertex: g at the start vertex, h elsewhere
    let up = |g: S, depth: usize| if depth == d0 { g } else { g.div(&one.add(&g)) };
    let ray_h = if lam_f > 1.0 { S::from_f64(lam_f - 1.0).div(&lam) } else { S::zero() };
    let used_ss = Cell::new(false);
    let too_big = Cell::new(false);
    // spherically symmetric node `r` levels above the target
    let ss_value = |view: SsView<'_>, depth: usize, r: usize| -> S {
        used_ss.set(true);
        let mut rho = S::ss_rho(view, r, &lam);
        if side == Side::Lower {
            // ray closure of the subtree's level r, when the walk can escape along a ray
            let ray = (lam_f > 1.0).then(|| {
                let size = view.profile.ln_size(view.offset + r) - view.profile.ln_size(view.offset);
                (-(r as f64) * lam_f.ln() - size).exp() / (lam_f - 1.0) * (1.0 + 1e-12)
            });
            let tail = match (ss_tail(view, r, lam_f), ray) {
                (Some(a), Some(b)) => a.min(b),
                (a, b) => match a.or(b) {
                    Some(t) => t,
                    None => return up(S::zero(), depth),
                },
            };
            if r == 0 {
                return one.div(&one.add(&S::from_f64(tail)));
            }
            rho = rho.add(&S::from_f64(tail));
        }
        up(one.div(&rho), depth)
    };

    let value = fold_section(
        tree,
        start,
        target,
        budget,
        |node| match side {
            Side::Upper => S::one(),
            Side::Lower => match tree.ss_view(node) {
                Some(view) => ss_value(view, tree.depth(node), 0),
                None if tree.is_infinite(node) == Some(true) => ray_h.clone(),
                None => S::zero(),
            },
        },
        |node| {
            let view = tree.ss_view(node)?;
            let depth = tree.depth(node);
            Some(ss_value(view, depth, target - depth))
        },
        |node, vals| {
            if too_big.get() {
                return S::zero();
            }
            let mut s = S::zero();
            for v in &vals {
                s = s.add(v);
            }
            let v = up(lam.mul(&s), tree.depth(node));
            if v.bits() > EXACT_BITS_LIMIT {
                too_big.set(true);
            }
            v
        },
    )?;
    Ok(Reduction { value, used_ss: used_ss.get(), too_big: too_big.get() })
}

/// Certified upper bound on the normalized tail of an SS subtree below its
/// level `r`, or `None` without a convergent certificate.
fn ss_tail(view: SsView<'_>, r: usize, lam: f64) -> Option<f64> {
    let ln_tail = view.profile.tail_bound_ln(view.offset + r, lam)?;
    let ln = view.offset as f64 * lam.ln() + view.profile.ln_size(view.offset) + ln_tail;
    let t = ln.exp() * (1.0 + 1e-12);
    t.is_finite().then_some(t)
}

fn check_args<T: TreeModel + ?Sized>(tree: &T, lam: f64, n: usize) -> Result<()> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::invalid("λ must be positive and finite"));
    }
    if n == 0 {
        return Err(Error::invalid("truncation level must be at least 1"));
    }
    if tree.children(&tree.root()).is_empty() {
        return Err(Error::DegenerateRoot);
    }
    Ok(())
}

fn budget_to_level(e: Error, n: usize) -> Error {
    match e {
        Error::BudgetExceeded { .. } => Error::BudgetExceeded { reached: n.saturating_sub(1) },
        e => e,
    }
}

/// `C(λ, T, n)`: conductance between the root and level `n` by series /
/// parallel reduction, exact when the section has at most
/// [`EXACT_SECTION_LIMIT`] vertices and no intermediate value outgrows
/// [`EXACT_BITS_LIMIT`].
pub fn truncated_conductance<T: TreeModel + ?Sized>(tree: &T, lam: f64, n: usize, budget: &mut Budget) -> Result<Truncated> {
    check_args(tree, lam, n)?;
    if section_size(tree, n, EXACT_SECTION_LIMIT + 1) <= EXACT_SECTION_LIMIT {
        let r = reduce::<T, BigRational>(tree, tree.root(), lam, n, Side::Upper, budget)
            .map_err(|e| budget_to_level(e, n))?;
        if r.too_big {
            return truncated_conductance_f64(tree, lam, n, budget);
        }
        let value = rational_to_f64(&r.value);
        return Ok(Truncated {
            value,
            reaches_level: !Zero::is_zero(&r.value),
            exact: Some(r.value),
            used_ss_form: r.used_ss,
        });
    }
    truncated_conductance_f64(tree, lam, n, budget)
}

/// Double-precision variant of [`truncated_conductance`].
pub fn truncated_conductance_f64<T: TreeModel + ?Sized>(
    tree: &T,
    lam: f64,
    n: usize,
    budget: &mut Budget,
) -> Result<Truncated> {
    check_args(tree, lam, n)?;
    let r = reduce::<T, f64>(tree, tree.root(), lam, n, Side::Upper, budget).map_err(|e| budget_to_level(e, n))?;
    Ok(Truncated { value: r.value, exact: None, reaches_level: r.value > 0.0, used_ss_form: r.used_ss })
}

/// `[lower, upper]` around `C(λ, T)` from the truncation at level `n`.
///
/// The upper end is `C(λ, T, n)`. The lower end is the conductance of a
/// subnetwork: every level-`n` vertex with an infinite subtree gets a single
/// ray attached (nothing when `λ ≤ 1`), and spherically symmetric subtrees
/// use their closed-form resistance plus a certified tail.
pub fn conductance_interval<T: TreeModel + ?Sized>(
    tree: &T,
    lam: f64,
    n: usize,
    budget: &mut Budget,
) -> Result<ConductanceInterval> {
    let upper = truncated_conductance(tree, lam, n, budget)?;
    let lower = reduce::<T, f64>(tree, tree.root(), lam, n, Side::Lower, budget).map_err(|e| budget_to_level(e, n))?;
    let mut methods = vec![Method::TruncatedExact];
    if lam > 1.0 {
        methods.push(Method::RayClosure);
    }
    if upper.used_ss_form || lower.used_ss {
        methods.push(Method::SsClosedForm);
    }
    Ok(ConductanceInterval {
        lower: lower.value.min(upper.value),
        upper: upper.value,
        truncation_level: n,
        methods,
    })
}

/// `[0, 1/NW]` from level counts alone, valid for any tree with these counts.
pub fn conductance_interval_from_levels(levels: &[BigUint], lam: f64, n: usize) -> ConductanceInterval {
    let r = nash_williams_bound(levels, lam, n);
    ConductanceInterval {
        lower: 0.0,
        upper: if r > 0.0 { 1.0 / r } else { f64::INFINITY },
        truncation_level: n,
        methods: vec![Method::NashWilliams],
    }
}

/// `Σ_{n=1}^{N} λ^{-n} / |T_n|` for a spherically symmetric profile: the
/// resistance to level `N`, a lower bound on `R(λ, T)`.
pub fn ss_resistance_partial(profile: &crate::gallery::LevelProfile, lam: f64, n: usize) -> f64 {
    f64::ss_rho(SsView { profile, offset: 0 }, n, &lam)
}

/// Exact form of [`ss_resistance_partial`].
pub fn ss_resistance_partial_exact(profile: &crate::gallery::LevelProfile, lam: &BigRational, n: usize) -> BigRational {
    BigRational::ss_rho(SsView { profile, offset: 0 }, n, lam)
}

/// `Σ_{n=1}^{N} (λ^n |T_n|)^{-1}` from level counts `levels[n] = |T_n|`:
/// the level-cutset lower bound on the resistance of any tree with them.
pub fn nash_williams_bound(levels: &[BigUint], lam: f64, n: usize) -> f64 {
    let ln_lam = lam.ln();
    let mut sum = CompensatedSum::new();
    for (i, size) in levels.iter().enumerate().take(n + 1).skip(1) {
        sum.add((-(i as f64) * ln_lam - crate::numeric::ln_biguint(size)).exp());
    }
    sum.value()
}

/// Per-step interval for `C̃(λ, T^{y_{i-1}}, y_i) / C̃(λ, T^{y_{i-1}})` and
/// the product interval for the law of the first `k` limit-walk steps.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiInterval {
    pub steps: Vec<(f64, f64)>,
    pub lower: f64,
    pub upper: f64,
}

impl PhiInterval {
    pub fn max_width(&self) -> f64 {
        self.steps.iter().map(|(a, b)| b - a).fold(0.0, f64::max)
    }
}

/// Bounds on the normalized branch conductance `h(c)` of each child of
/// `node`, truncated `n` levels below `node`. Children with equal class share
/// one entry; returns `(class representative index per child, lower, upper)`.
struct ChildBounds {
    group: Vec<usize>,
    size: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn child_bounds<T: TreeModel + ?Sized>(tree: &T, node: &T::Node, n: usize, lam: f64, budget: &mut Budget) -> Result<ChildBounds> {
    let kids = tree.children(node);
    let target = tree.depth(node) + n;
    let mut group = Vec::with_capacity(kids.len());
    let mut reps: Vec<(Option<u64>, usize)> = Vec::new();
    let mut b = ChildBounds { group: Vec::new(), size: Vec::new(), lower: Vec::new(), upper: Vec::new() };
    for (i, kid) in kids.iter().enumerate() {
        let class = tree.class(kid);
        let found = class.and_then(|c| reps.iter().position(|&(rc, _)| rc == Some(c)));
        match found {
            Some(g) => {
                group.push(g);
                b.size[g] += 1;
            }
            None => {
                group.push(reps.len());
                reps.push((class, i));
                let mut h = |side| -> Result<f64> {
                    let v: f64 = reduce::<T, f64>(tree, kid.clone(), lam, target, side, &mut *budget)?.value;
                    // a child on the target level already reports h
                    Ok(if n == 1 { v } else { v / (1.0 + v) })
                };
                b.upper.push(h(Side::Upper)?);
                b.lower.push(h(Side::Lower)?);
                b.size.push(1);
            }
        }
    }
    b.group = group;
    Ok(b)
}

/// Intervals for the first `path.len()` steps of the limit walk along
/// `path` (child indices from the root), each truncated `n` levels below the
/// current vertex.
pub fn phi_first_k_interval<T: TreeModel + ?Sized>(
    tree: &T,
    lam: f64,
    path: &[u32],
    n: usize,
    budget: &mut Budget,
) -> Result<PhiInterval> {
    check_args(tree, lam, n)?;
    let mut node = tree.root();
    let mut steps = Vec::with_capacity(path.len());
    for &idx in path {
        let b = child_bounds(tree, &node, n, lam, budget)?;
        if idx as usize >= b.group.len() {
            return Err(Error::InvalidPath);
        }
        steps.push(step_ratio(&b, b.group[idx as usize]));
        node = tree.children(&node).swap_remove(idx as usize);
    }
    let lower = steps.iter().map(|s| s.0).product();
    let upper = steps.iter().map(|s| s.1).product();
    Ok(PhiInterval { steps, lower, upper })
}

/// Interval for the probability of each child of `node`.
pub fn phi_children_intervals<T: TreeModel + ?Sized>(
    tree: &T,
    node: &T::Node,
    lam: f64,
    n: usize,
    budget: &mut Budget,
) -> Result<Vec<(f64, f64)>> {
    let b = child_bounds(tree, node, n, lam, budget)?;
    Ok(b.group.iter().map(|&g| step_ratio(&b, g)).collect())
}

/// Probability of one child in group `g`: `1 / (m_g + Σ_{j≠g} m_j e_j / e_g)`.
fn step_ratio(b: &ChildBounds, g: usize) -> (f64, f64) {
    let m = b.size[g] as f64;
    if b.size.len() == 1 {
        return (1.0 / m, 1.0 / m);
    }
    let mut others_hi = 0.0;
    let mut others_lo = 0.0;
    for j in 0..b.size.len() {
        if j != g {
            others_hi += b.size[j] as f64 * b.upper[j];
            others_lo += b.size[j] as f64 * b.lower[j];
        }
    }
    let lo = if b.lower[g] > 0.0 { b.lower[g] / (m * b.lower[g] + others_hi) } else { 0.0 };
    let hi_den = m * b.upper[g] + others_lo;
    let hi = if others_lo == 0.0 || hi_den <= 0.0 { 1.0 / m } else { b.upper[g] / hi_den };
    (lo, hi.max(lo))
}

/// Successes among `count` escape trials from the root (reach level `n`
/// before returning to the root), drawn from `substream(seed, "escape", block)`.
pub fn escape_block<T: TreeModel + ?Sized>(tree: &T, lam: f64, n: usize, seed: u64, block: u64, count: u64) -> u64 {
    let mut rng = substream(seed, "escape", block);
    let mut cursor = tree.cursor();
    let mut hits = 0;
    for _ in 0..count {
        cursor.reset();
        let k = cursor.child_count();
        cursor.descend(rng.gen_range(0..k));
        loop {
            let d = cursor.depth();
            if d >= n {
                hits += 1;
                break;
            }
            if d == 0 {
                break;
            }
            let k = cursor.child_count();
            let u: f64 = rng.gen::<f64>() * (1.0 + k as f64 * lam);
            if u < 1.0 {
                cursor.ascend();
            } else {
                let i = (((u - 1.0) / lam) as usize).min(k - 1);
                cursor.descend(i);
            }
        }
    }
    hits
}

/// Number of blocks and the size of block `b` for a run of `samples`.
pub fn mc_blocks(samples: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = samples / MC_BLOCK;
    let rest = samples % MC_BLOCK;
    (0..full).map(|b| (b, MC_BLOCK)).chain((rest > 0).then_some((full, rest)))
}

/// Monte Carlo estimate of `P(reach level n before returning to the root)`.
pub fn escape_probability_mc<T: TreeModel + ?Sized>(
    tree: &T,
    lam: f64,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_args(tree, lam, n)?;
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let hits = mc_blocks(samples).map(|(b, c)| escape_block(tree, lam, n, seed, b, c)).sum();
    Ok(McEstimate::from_counts(hits, samples, seed))
}

/// `π(o) = k_root · λ`.
pub fn root_weight<T: TreeModel + ?Sized>(tree: &T, lam: f64) -> f64 {
    tree.children(&tree.root()).len() as f64 * lam
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{FiniteTree, GalleryTree};
    use crate::numeric::PositiveRatio;

    fn b() -> Budget {
        Budget::unlimited()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ray_and_binary_closed_forms() {
        let ray = GalleryTree::ray();
        let c = truncated_conductance(&ray, 2.0, 3, &mut b()).unwrap();
        assert_eq!(c.exact, Some(q(8, 7)));
        let bin = GalleryTree::b_ary(2);
        let c = truncated_conductance(&bin, 1.0, 4, &mut b()).unwrap();
        assert_eq!(c.exact, Some(q(16, 15)));
        assert!((ss_resistance_partial(ray.profile().unwrap(), 2.0, 3) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn ray_interval() {
        let i = conductance_interval(&GalleryTree::ray(), 2.0, 3, &mut b()).unwrap();
        assert!((i.lower - 1.0).abs() < 1e-9);
        assert!((i.upper - 8.0 / 7.0).abs() < 1e-12);
        let i = conductance_interval(&GalleryTree::b_ary(2), 1.0, 4, &mut b()).unwrap();
        assert!((i.upper - 16.0 / 15.0).abs() < 1e-12);
        assert!(i.lower >= 0.0 && i.lower <= i.upper);
    }

    #[test]
    fn finite_tree_below_level_gives_zero() {
        let t = GalleryTree::finite(FiniteTree::path(2));
        let c = truncated_conductance(&t, 1.0, 5, &mut b()).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(!c.reaches_level);
        let single = GalleryTree::finite(FiniteTree::single());
        assert_eq!(truncated_conductance(&single, 1.0, 2, &mut b()).err(), Some(Error::DegenerateRoot));
    }

    #[test]
    fn generic_and_ss_paths_agree() {
        // a periodic closure of the 2-star is the binary tree but has no SS view
        let per = GalleryTree::periodic_closure(FiniteTree::star(2)).unwrap();
        let bin = GalleryTree::b_ary(2);
        for lam in [0.7, 1.0, 1.9] {
            for n in [1, 5, 12] {
                let a = truncated_conductance(&per, lam, n, &mut b()).unwrap();
                let c = truncated_conductance(&bin, lam, n, &mut b()).unwrap();
                assert_eq!(a.exact, c.exact);
            }
        }
    }

    #[test]
    fn f64_path_matches_exact() {
        let t = GalleryTree::ss_tree_prop5("3/2".parse::<PositiveRatio>().unwrap()).unwrap();
        for n in [3, 10, 20] {
            let e = truncated_conductance(&t, 1.3, n, &mut b()).unwrap();
            let f = truncated_conductance_f64(&t, 1.3, n, &mut b()).unwrap();
            assert!((e.value - f.value).abs() < 1e-12 * e.value.max(1.0));
        }
    }

    #[test]
    fn nash_williams_on_binary() {
        let levels: Vec<BigUint> = (0..=10).map(|i| BigUint::from(1u32) << i).collect();
        assert!((nash_williams_bound(&levels, 1.0, 10) - (1.0 - 2f64.powi(-10))).abs() < 1e-15);
        assert_eq!(nash_williams_bound(&levels, 1.0, 0), 0.0);
    }

    #[test]
    fn phi_on_symmetric_trees() {
        for bb in [2u32, 3] {
            let t = GalleryTree::b_ary(bb);
            for n in [1, 4, 9] {
                let p = phi_first_k_interval(&t, 1.0, &[0], n, &mut b()).unwrap();
                assert_eq!(p.steps[0], (1.0 / bb as f64, 1.0 / bb as f64));
            }
        }
        let p = phi_first_k_interval(&GalleryTree::ray(), 0.5, &[0, 0, 0], 3, &mut b()).unwrap();
        assert_eq!((p.lower, p.upper), (1.0, 1.0));
        assert_eq!(phi_first_k_interval(&GalleryTree::ray(), 2.0, &[1], 3, &mut b()).err(), Some(Error::InvalidPath));
    }

    #[test]
    fn escape_on_first_level_is_certain() {
        let e = escape_probability_mc(&GalleryTree::b_ary(3), 0.3, 1, 1000, 1).unwrap();
        assert_eq!(e.mean, 1.0);
    }

    #[test]
    fn block_split_covers_samples() {
        let v: Vec<_> = mc_blocks(10_000).collect();
        assert_eq!(v.iter().map(|x| x.1).sum::<u64>(), 10_000);
        assert_eq!(v.last(), Some(&(2, 10_000 - 2 * MC_BLOCK)));
    }
}
