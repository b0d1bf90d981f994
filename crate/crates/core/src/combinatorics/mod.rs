//! Exact enumeration of self-avoiding walks, bridges and irreducible bridges.
//!
//! Bridges follow the x-coordinate convention: `0 < x_i ≤ x_n` for every
//! `1 ≤ i ≤ n`. In a restricted domain the walk's vertices must also lie in
//! the domain; the bridge condition itself is unchanged.

mod kesten;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{Dir, DomainSpec, LatticePoint};
use crate::saw_tree::FiniteWalk;
use crate::tree::Budget;
use crate::{Error, Result};

pub use kesten::{
    critical_lambda_m, kesten_partial_sum, kesten_sample, mu_bracket, phi_critical_m, IrreducibleBridges,
    KestenConfig, MAX_STORED_LENGTH,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountKind {
    Saw,
    Bridge,
    Irreducible,
    /// Irreducible bridges whose second step takes the given turn.
    IrreducibleThrough(Turn),
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountKind::Saw => f.write_str("saw"),
            CountKind::Bridge => f.write_str("bridge"),
            CountKind::Irreducible => f.write_str("irreducible"),
            CountKind::IrreducibleThrough(t) => write!(f, "irreducible-{}", t.letter()),
        }
    }
}

/// The three children of the forced first step `E`: the second step goes
/// straight on (E), turns left (N) or right (S). The one-step bridge counts
/// as straight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Turn {
    Straight,
    Left,
    Right,
}

impl Turn {
    pub const ALL: [Turn; 3] = [Turn::Straight, Turn::Left, Turn::Right];

    pub fn letter(self) -> char {
        match self {
            Turn::Straight => 'E',
            Turn::Left => 'N',
            Turn::Right => 'S',
        }
    }

    /// Turn taken by a bridge (E for the one-step bridge).
    pub fn of_bridge(dirs: &[Dir]) -> Turn {
        match dirs.get(1) {
            None | Some(Dir::East) => Turn::Straight,
            Some(Dir::North) => Turn::Left,
            Some(Dir::South) => Turn::Right,
            Some(Dir::West) => unreachable!("a bridge never steps back to x = 0 at step 2"),
        }
    }
}

/// Exact counts indexed by length; `counts[n]` is the number of length-`n` objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub kind: CountKind,
    pub domain: DomainSpec,
    pub counts: Vec<u64>,
    /// False when the budget ran out; `counts` then holds the complete levels.
    pub complete: bool,
}

impl CountTable {
    pub fn get(&self, n: usize) -> Option<u64> {
        self.counts.get(n).copied()
    }

    pub fn max_n(&self) -> usize {
        self.counts.len() - 1
    }
}

/// Depth-first enumerator over an occupancy grid.
struct Grid {
    side: i32,
    cells: Vec<bool>,
}

impl Grid {
    fn new(n: usize) -> Self {
        let side = 2 * n as i32 + 3;
        Grid { side, cells: vec![false; (side * side) as usize] }
    }

    fn idx(&self, p: LatticePoint) -> usize {
        let h = self.side / 2;
        ((p.y + h) * self.side + (p.x + h)) as usize
    }
}

/// Calls `visit` on every walk of length exactly `m` in `domain`; with
/// `positive_x`, only walks with `x_i > 0` for `i ≥ 1` are visited.
fn for_each_walk(
    domain: DomainSpec,
    positive_x: bool,
    m: usize,
    budget: &mut Budget,
    visit: &mut dyn FnMut(&[LatticePoint], &[Dir]),
) -> Result<()> {
    let mut grid = Grid::new(m);
    let mut points = Vec::with_capacity(m + 1);
    let mut dirs = Vec::with_capacity(m);
    points.push(LatticePoint::ORIGIN);
    let o = grid.idx(LatticePoint::ORIGIN);
    grid.cells[o] = true;

    fn go(
        domain: DomainSpec,
        positive_x: bool,
        m: usize,
        grid: &mut Grid,
        points: &mut Vec<LatticePoint>,
        dirs: &mut Vec<Dir>,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[LatticePoint], &[Dir]),
    ) -> Result<()> {
        budget.charge(1)?;
        if dirs.len() == m {
            visit(points, dirs);
            return Ok(());
        }
        let end = *points.last().unwrap();
        for d in Dir::ALL {
            let q = end.step(d);
            if (positive_x && q.x <= 0) || !domain.contains(q) {
                continue;
            }
            let i = grid.idx(q);
            if grid.cells[i] {
                continue;
            }
            grid.cells[i] = true;
            points.push(q);
            dirs.push(d);
            let r = go(domain, positive_x, m, grid, points, dirs, budget, visit);
            points.pop();
            dirs.pop();
            grid.cells[i] = false;
            r?;
        }
        Ok(())
    }

    go(domain, positive_x, m, &mut grid, &mut points, &mut dirs, budget, visit)
}

/// Levels `0..=n_max` counted one at a time so that a budget failure keeps
/// the complete levels.
fn count_levels(
    kind: CountKind,
    domain: DomainSpec,
    n_max: usize,
    budget: &mut Budget,
    positive_x: bool,
    zero: u64,
    accept: &dyn Fn(&[LatticePoint], &[Dir]) -> bool,
) -> CountTable {
    let mut counts = vec![zero];
    for m in 1..=n_max {
        let mut c = 0u64;
        let r = for_each_walk(domain, positive_x, m, budget, &mut |p, d| {
            if accept(p, d) {
                c += 1;
            }
        });
        if r.is_err() {
            return CountTable { kind, domain, counts, complete: false };
        }
        counts.push(c);
    }
    CountTable { kind, domain, counts, complete: true }
}

/// `c_n`: self-avoiding walks of length `n` from the origin in `domain`.
pub fn count_walks(domain: DomainSpec, n_max: usize, budget: &mut Budget) -> CountTable {
    count_levels(CountKind::Saw, domain, n_max, budget, false, 1, &|_, _| true)
}

fn bridge_end_is_max(points: &[LatticePoint]) -> bool {
    let xn = points.last().unwrap().x;
    points.iter().all(|p| p.x <= xn)
}

/// Index `i` in `1..n` splits the bridge iff `x_i` is a prefix maximum and
/// every later vertex lies strictly to its right.
fn split_points(points: &[LatticePoint]) -> Vec<usize> {
    let n = points.len() - 1;
    let mut suffix_min = vec![i32::MAX; n + 2];
    for i in (0..=n).rev() {
        suffix_min[i] = suffix_min[i + 1].min(points[i].x);
    }
    let mut prefix_max = i32::MIN;
    let mut out = Vec::new();
    for i in 0..n {
        prefix_max = prefix_max.max(points[i].x);
        if i >= 1 && points[i].x == prefix_max && points[i].x < suffix_min[i + 1] {
            out.push(i);
        }
    }
    out
}

/// `b_n` in `domain` (`b_0 = 1`); over [`DomainSpec::Quadrant`] this is
/// `b^Q_n`, over a strip `p^{(ℓ)}_n`.
pub fn count_bridges(domain: DomainSpec, n_max: usize, budget: &mut Budget) -> CountTable {
    count_levels(CountKind::Bridge, domain, n_max, budget, true, 1, &|p, _| bridge_end_is_max(p))
}

/// `p_n`: irreducible bridges of length `n` in the plane (`p_0 = 0`).
pub fn count_irreducible(n_max: usize, budget: &mut Budget) -> CountTable {
    count_levels(CountKind::Irreducible, DomainSpec::FullPlane, n_max, budget, true, 0, &|p, _| {
        bridge_end_is_max(p) && split_points(p).is_empty()
    })
}

/// `p_{i,n}`: irreducible bridges of length `n` whose second step takes `turn`.
pub fn irreducible_through(turn: Turn, n_max: usize, budget: &mut Budget) -> CountTable {
    count_levels(CountKind::IrreducibleThrough(turn), DomainSpec::FullPlane, n_max, budget, true, 0, &|p, d| {
        bridge_end_is_max(p) && split_points(p).is_empty() && Turn::of_bridge(d) == turn
    })
}

/// Calls `visit` on every irreducible bridge of length `n`.
pub(crate) fn for_each_irreducible(n: usize, budget: &mut Budget, visit: &mut dyn FnMut(&[Dir])) -> Result<()> {
    for_each_walk(DomainSpec::FullPlane, true, n, budget, &mut |p, d| {
        if bridge_end_is_max(p) && split_points(p).is_empty() {
            visit(d);
        }
    })
}

/// `0 = x_0 < x_i ≤ x_n` for every `i ≥ 1`, relative to the walk's start.
pub fn is_bridge(w: &FiniteWalk) -> bool {
    let pts = w.points();
    if pts.len() < 2 {
        return false;
    }
    let x0 = pts[0].x;
    let xn = pts[pts.len() - 1].x;
    pts[1..].iter().all(|p| p.x > x0 && p.x <= xn)
}

/// Unique factorization of a bridge into irreducible bridges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeDecomposition {
    pub pieces: Vec<FiniteWalk>,
}

impl BridgeDecomposition {
    /// The `⊕`-concatenation of the pieces.
    pub fn concat(&self) -> FiniteWalk {
        self.pieces
            .iter()
            .fold(FiniteWalk::origin(), |acc, p| acc.concat(p).expect("bridges concatenate"))
    }
}

/// Splits a bridge at every index where prefix and suffix are both bridges.
pub fn decompose(bridge: &FiniteWalk) -> Result<BridgeDecomposition> {
    if !is_bridge(bridge) {
        return Err(Error::NotABridge);
    }
    let mut cuts = split_points(bridge.points());
    cuts.insert(0, 0);
    cuts.push(bridge.len());
    let pieces = cuts.windows(2).map(|w| bridge.segment(w[0], w[1])).collect();
    Ok(BridgeDecomposition { pieces })
}

pub fn is_irreducible(bridge: &FiniteWalk) -> bool {
    is_bridge(bridge) && split_points(bridge.points()).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FiniteWalk {
        FiniteWalk::from_dirs(&Dir::parse_word(s).unwrap()).unwrap()
    }

    #[test]
    fn saw_counts() {
        let t = count_walks(DomainSpec::FullPlane, 6, &mut Budget::unlimited());
        assert_eq!(t.counts, vec![1, 4, 12, 36, 100, 284, 780]);
        let h = count_walks(DomainSpec::ClosedHalfPlane, 2, &mut Budget::unlimited());
        assert_eq!(h.counts, vec![1, 3, 7]);
    }

    #[test]
    fn bridge_predicate() {
        assert!(is_bridge(&w("E")));
        assert!(is_bridge(&w("EN")));
        assert!(!is_bridge(&w("N")));
        assert!(!is_bridge(&w("ENW")));
        assert!(!is_bridge(&FiniteWalk::origin()));
    }

    #[test]
    fn bridge_and_irreducible_counts() {
        let b = count_bridges(DomainSpec::FullPlane, 3, &mut Budget::unlimited());
        assert_eq!(&b.counts[..3], &[1, 1, 3]);
        let p = count_irreducible(3, &mut Budget::unlimited());
        assert_eq!(&p.counts[1..3], &[1, 2]);
        assert_eq!(p.counts[3], 2);
    }

    #[test]
    fn decompositions() {
        let d = decompose(&w("EE")).unwrap();
        assert_eq!(d.pieces, vec![w("E"), w("E")]);
        let d = decompose(&w("ENE")).unwrap();
        assert_eq!(d.pieces, vec![w("EN"), w("E")]);
        assert_eq!(d.concat(), w("ENE"));
        assert_eq!(decompose(&w("ENN")).unwrap().pieces.len(), 1);
        assert_eq!(decompose(&w("N")), Err(Error::NotABridge));
    }

    #[test]
    fn turn_partition() {
        let mut b = Budget::unlimited();
        let p = count_irreducible(8, &mut b);
        let parts: Vec<CountTable> = Turn::ALL.iter().map(|&t| irreducible_through(t, 8, &mut b)).collect();
        for n in 1..=8 {
            assert_eq!(parts.iter().map(|t| t.counts[n]).sum::<u64>(), p.counts[n]);
        }
        assert_eq!(parts[0].counts[1], 1);
        assert_eq!(parts[1].counts[2], 1);
        assert_eq!(parts[2].counts[2], 1);
    }

    #[test]
    fn budget_keeps_complete_levels() {
        let t = count_walks(DomainSpec::FullPlane, 10, &mut Budget::new(100));
        assert!(!t.complete);
        assert_eq!(t.counts, vec![1, 4, 12, 36]);
    }
}
