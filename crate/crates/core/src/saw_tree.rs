//! Self-avoiding walks and the self-avoiding tree of a domain.
//!
//! The vertices of the tree are the finite self-avoiding walks from the
//! origin; a walk's children are its one-step extensions in E, N, W, S order.
//! The pruned tree keeps only walks that extend to an infinite walk.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use hashbrown::HashSet;

use crate::lattice::{Dir, DomainSpec, LatticePoint};
use crate::tree::{TreeCursor, TreeModel, TreePath};
use crate::{Error, Result};

/// A self-avoiding lattice path starting at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWalk {
    points: Vec<LatticePoint>,
}

impl FiniteWalk {
    /// The zero-step walk.
    pub fn origin() -> Self {
        FiniteWalk { points: vec![LatticePoint::ORIGIN] }
    }

    pub fn from_points(points: Vec<LatticePoint>) -> Result<Self> {
        if points.first() != Some(&LatticePoint::ORIGIN) {
            return Err(Error::invalid("walk must start at the origin"));
        }
        if points.windows(2).any(|w| !w[0].is_adjacent(w[1])) {
            return Err(Error::invalid("consecutive points must be lattice neighbours"));
        }
        let mut seen = HashSet::with_capacity(points.len());
        if !points.iter().all(|p| seen.insert(*p)) {
            return Err(Error::invalid("walk revisits a point"));
        }
        Ok(FiniteWalk { points })
    }

    pub fn from_dirs(dirs: &[Dir]) -> Result<Self> {
        let mut points = Vec::with_capacity(dirs.len() + 1);
        let mut p = LatticePoint::ORIGIN;
        points.push(p);
        for &d in dirs {
            p = p.step(d);
            points.push(p);
        }
        Self::from_points(points)
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.len() == 1
    }

    pub fn end(&self) -> LatticePoint {
        *self.points.last().unwrap()
    }

    pub fn dirs(&self) -> Vec<Dir> {
        self.points
            .windows(2)
            .map(|w| w[0].direction_to(w[1]).expect("adjacent points"))
            .collect()
    }

    pub fn lies_in(&self, domain: DomainSpec) -> bool {
        self.points.iter().all(|&p| domain.contains(p))
    }

    pub fn contains_point(&self, p: LatticePoint) -> bool {
        self.points.contains(&p)
    }

    /// Sub-walk between step indices `from` and `to`, translated so it starts
    /// at the origin.
    pub fn segment(&self, from: usize, to: usize) -> FiniteWalk {
        let base = self.points[from];
        FiniteWalk {
            points: self.points[from..=to]
                .iter()
                .map(|p| LatticePoint::new(p.x - base.x, p.y - base.y))
                .collect(),
        }
    }

    /// `self ⊕ other`: `other` translated to start at the end of `self`.
    pub fn concat(&self, other: &FiniteWalk) -> Result<FiniteWalk> {
        let e = self.end();
        let mut points = self.points.clone();
        points.extend(other.points[1..].iter().map(|p| LatticePoint::new(p.x + e.x, p.y + e.y)));
        FiniteWalk::from_points(points)
    }

    /// Appends a step without re-checking the prefix.
    pub fn extended(&self, dir: Dir) -> Option<FiniteWalk> {
        let q = self.end().step(dir);
        if self.contains_point(q) {
            return None;
        }
        let mut points = self.points.clone();
        points.push(q);
        Some(FiniteWalk { points })
    }
}

impl fmt::Display for FiniteWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        for d in self.dirs() {
            write!(f, "{}", d.letter())?;
        }
        Ok(())
    }
}

/// All one-step self-avoiding in-domain extensions of `w`, in E, N, W, S order.
pub fn extensions(w: &FiniteWalk, domain: DomainSpec) -> Vec<FiniteWalk> {
    let end = w.end();
    Dir::ALL
        .into_iter()
        .filter(|&d| domain.contains(end.step(d)))
        .filter_map(|d| w.extended(d))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct BBox {
    min_x: i32,
    max_x: i32,
    min_y: i32,
    max_y: i32,
}

impl BBox {
    fn point(p: LatticePoint) -> Self {
        BBox { min_x: p.x, max_x: p.x, min_y: p.y, max_y: p.y }
    }

    fn with(self, p: LatticePoint) -> Self {
        BBox {
            min_x: self.min_x.min(p.x),
            max_x: self.max_x.max(p.x),
            min_y: self.min_y.min(p.y),
            max_y: self.max_y.max(p.y),
        }
    }
}

const ESCAPE_MARGIN: i32 = 2;

#[derive(Default)]
struct EscapeScratch {
    seen: HashSet<LatticePoint>,
    heap: BinaryHeap<Reverse<(u32, i32, i32)>>,
}

impl EscapeScratch {
    /// Flood fill from `start` through free in-domain vertices; true iff it
    /// leaves `bbox` enlarged by the margin. Best-first towards the nearest
    /// reachable box side, so open space is crossed in a straight line.
    fn escapes(
        &mut self,
        domain: DomainSpec,
        occupied: &HashSet<LatticePoint>,
        start: LatticePoint,
        bbox: BBox,
    ) -> bool {
        let lo_x = bbox.min_x - ESCAPE_MARGIN;
        let hi_x = bbox.max_x + ESCAPE_MARGIN;
        let lo_y = bbox.min_y - ESCAPE_MARGIN;
        let hi_y = bbox.max_y + ESCAPE_MARGIN;
        let outside = |p: LatticePoint| p.x < lo_x || p.x > hi_x || p.y < lo_y || p.y > hi_y;
        let score = |p: LatticePoint| -> u32 {
            let mut best = u32::MAX;
            let mut consider = |dist: i32, target: LatticePoint| {
                if domain.contains(target) {
                    best = best.min(dist as u32);
                }
            };
            consider(hi_x - p.x + 1, LatticePoint::new(hi_x + 1, p.y));
            consider(p.x - lo_x + 1, LatticePoint::new(lo_x - 1, p.y));
            consider(hi_y - p.y + 1, LatticePoint::new(p.x, hi_y + 1));
            consider(p.y - lo_y + 1, LatticePoint::new(p.x, lo_y - 1));
            best
        };

        self.seen.clear();
        self.heap.clear();
        self.seen.insert(start);
        self.heap.push(Reverse((score(start), start.x, start.y)));
        while let Some(Reverse((_, x, y))) = self.heap.pop() {
            let p = LatticePoint::new(x, y);
            for d in Dir::ALL {
                let q = p.step(d);
                if !domain.contains(q) || occupied.contains(&q) || !self.seen.insert(q) {
                    continue;
                }
                if outside(q) {
                    return true;
                }
                self.heap.push(Reverse((score(q), q.x, q.y)));
            }
        }
        false
    }
}

/// Whether `w` is the prefix of some infinite self-avoiding walk in `domain`.
pub fn has_infinite_extension(w: &FiniteWalk, domain: DomainSpec) -> bool {
    let occupied: HashSet<LatticePoint> = w.points().iter().copied().collect();
    let bbox = w.points().iter().fold(BBox::point(LatticePoint::ORIGIN), |b, &p| b.with(p));
    EscapeScratch::default().escapes(domain, &occupied, w.end(), bbox)
}

/// The self-avoiding tree of a domain, optionally pruned of finite branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SawTree {
    pub domain: DomainSpec,
    pub pruned: bool,
}

impl SawTree {
    pub fn new(domain: DomainSpec, pruned: bool) -> Self {
        SawTree { domain, pruned }
    }

    /// The walk at a tree path.
    pub fn walk_of(&self, path: &TreePath) -> Result<FiniteWalk> {
        self.node_at(path)
    }
}

impl TreeModel for SawTree {
    type Node = FiniteWalk;
    type Cursor<'a> = SawCursor<'a>;

    fn root(&self) -> FiniteWalk {
        FiniteWalk::origin()
    }

    fn children(&self, node: &FiniteWalk) -> Vec<FiniteWalk> {
        let mut kids = extensions(node, self.domain);
        if self.pruned {
            kids.retain(|w| has_infinite_extension(w, self.domain));
        }
        kids
    }

    fn depth(&self, node: &FiniteWalk) -> usize {
        node.len()
    }

    fn is_infinite(&self, node: &FiniteWalk) -> Option<bool> {
        Some(has_infinite_extension(node, self.domain))
    }

    fn head(&self, node: &FiniteWalk) -> Option<LatticePoint> {
        Some(node.end())
    }

    fn cursor(&self) -> SawCursor<'_> {
        SawCursor::new(self)
    }
}

#[derive(Clone, Copy, Default)]
struct KidDirs {
    dirs: [Option<Dir>; 4],
    len: u8,
}

impl KidDirs {
    fn get(&self, i: usize) -> Dir {
        assert!(i < self.len as usize, "child index {i} out of range");
        self.dirs[i].unwrap()
    }
}

/// Incremental cursor over a [`SawTree`]: keeps the current walk, its
/// occupancy set and per-prefix bounding boxes so each step costs O(1)
/// plus, on the pruned tree, one escape search per new child.
pub struct SawCursor<'a> {
    tree: &'a SawTree,
    points: Vec<LatticePoint>,
    occupied: HashSet<LatticePoint>,
    boxes: Vec<BBox>,
    kids: Vec<Option<KidDirs>>,
    path: Vec<u32>,
    scratch: EscapeScratch,
}

impl<'a> SawCursor<'a> {
    fn new(tree: &'a SawTree) -> Self {
        let mut occupied = HashSet::new();
        occupied.insert(LatticePoint::ORIGIN);
        SawCursor {
            tree,
            points: vec![LatticePoint::ORIGIN],
            occupied,
            boxes: vec![BBox::point(LatticePoint::ORIGIN)],
            kids: vec![None],
            path: Vec::new(),
            scratch: EscapeScratch::default(),
        }
    }

    pub fn walk(&self) -> FiniteWalk {
        FiniteWalk { points: self.points.clone() }
    }

    fn kid_dirs(&mut self) -> KidDirs {
        let top = self.points.len() - 1;
        if let Some(k) = self.kids[top] {
            return k;
        }
        let end = self.points[top];
        let bbox = self.boxes[top];
        let mut out = KidDirs::default();
        for d in Dir::ALL {
            let q = end.step(d);
            if !self.tree.domain.contains(q) || self.occupied.contains(&q) {
                continue;
            }
            if self.tree.pruned {
                self.occupied.insert(q);
                let ok = self.scratch.escapes(self.tree.domain, &self.occupied, q, bbox.with(q));
                self.occupied.remove(&q);
                if !ok {
                    continue;
                }
            }
            out.dirs[out.len as usize] = Some(d);
            out.len += 1;
        }
        self.kids[top] = Some(out);
        out
    }
}

impl TreeCursor for SawCursor<'_> {
    fn depth(&self) -> usize {
        self.points.len() - 1
    }

    fn child_count(&mut self) -> usize {
        self.kid_dirs().len as usize
    }

    fn descend(&mut self, index: usize) {
        let d = self.kid_dirs().get(index);
        let q = self.points.last().unwrap().step(d);
        let b = self.boxes.last().unwrap().with(q);
        self.points.push(q);
        self.occupied.insert(q);
        self.boxes.push(b);
        self.kids.push(None);
        self.path.push(index as u32);
    }

    fn ascend(&mut self) {
        if self.points.len() > 1 {
            let q = self.points.pop().unwrap();
            self.occupied.remove(&q);
            self.boxes.pop();
            self.kids.pop();
            self.path.pop();
        }
    }

    fn reset(&mut self) {
        while self.points.len() > 1 {
            self.ascend();
        }
    }

    fn path(&self) -> &[u32] {
        &self.path
    }

    fn head(&self) -> Option<LatticePoint> {
        self.points.last().copied()
    }
}
