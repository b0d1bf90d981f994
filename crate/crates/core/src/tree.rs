//! The rooted-tree abstraction shared by self-avoiding trees and the gallery.
//!
//! Trees are never materialized. A [`TreeModel`] hands out a root node and
//! expands children on demand in a fixed order; a [`TreeCursor`] walks a
//! single root-to-node path, which is all the random-walk engine needs.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use num_bigint::BigUint;
use num_traits::One;

use crate::gallery::LevelProfile;
use crate::lattice::LatticePoint;
use crate::{Error, Result};

/// A node handle given as the child indices taken from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreePath(pub Vec<u32>);

impl TreePath {
    pub fn root() -> Self {
        TreePath(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: u32) -> Self {
        let mut v = self.0.clone();
        v.push(index);
        TreePath(v)
    }

    pub fn prefix(&self, len: usize) -> Self {
        TreePath(self.0[..len.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("/")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Marks a node whose subtree is spherically symmetric: the node sits at
/// level `offset` of `profile` and its subtree repeats the profile from there.
#[derive(Clone, Copy)]
pub struct SsView<'a> {
    pub profile: &'a LevelProfile,
    pub offset: usize,
}

/// A lazily expandable rooted tree.
pub trait TreeModel {
    type Node: Clone;
    type Cursor<'a>: TreeCursor
    where
        Self: 'a;

    fn root(&self) -> Self::Node;

    /// Children in canonical order. Repeated calls return the same order.
    fn children(&self, node: &Self::Node) -> Vec<Self::Node>;

    fn depth(&self, node: &Self::Node) -> usize;

    /// Isomorphism class: two nodes at the same depth carrying the same
    /// class have isomorphic subtrees. `None` means unknown.
    fn class(&self, _node: &Self::Node) -> Option<u64> {
        None
    }

    /// Whether the subtree below `node` contains an infinite ray.
    fn is_infinite(&self, _node: &Self::Node) -> Option<bool> {
        None
    }

    fn ss_view(&self, _node: &Self::Node) -> Option<SsView<'_>> {
        None
    }

    /// Lattice endpoint of a node, for trees whose nodes are walks.
    fn head(&self, _node: &Self::Node) -> Option<LatticePoint> {
        None
    }

    fn cursor(&self) -> Self::Cursor<'_>;

    /// The level profile of the whole tree when it is spherically symmetric.
    fn level_profile(&self) -> Option<&LevelProfile> {
        match self.ss_view(&self.root()) {
            Some(v) if v.offset == 0 => Some(v.profile),
            _ => None,
        }
    }

    fn node_at(&self, path: &TreePath) -> Result<Self::Node> {
        let mut node = self.root();
        for &i in &path.0 {
            let mut kids = self.children(&node);
            if (i as usize) >= kids.len() {
                return Err(Error::InvalidPath);
            }
            node = kids.swap_remove(i as usize);
        }
        Ok(node)
    }
}

/// A movable position in a tree, always on a path from the root.
pub trait TreeCursor {
    fn depth(&self) -> usize;
    fn child_count(&mut self) -> usize;
    /// Moves to child `index`; panics when out of range.
    fn descend(&mut self, index: usize);
    /// Moves to the parent; does nothing at the root.
    fn ascend(&mut self);
    fn reset(&mut self);
    fn path(&self) -> &[u32];

    fn head(&self) -> Option<LatticePoint> {
        None
    }
}

/// Cursor that keeps the node stack of any [`TreeModel`].
pub struct NodeCursor<'a, T: TreeModel + ?Sized> {
    tree: &'a T,
    stack: Vec<T::Node>,
    kids: Vec<Option<Vec<T::Node>>>,
    path: Vec<u32>,
}

impl<'a, T: TreeModel + ?Sized> NodeCursor<'a, T> {
    pub fn new(tree: &'a T) -> Self {
        NodeCursor { tree, stack: vec![tree.root()], kids: vec![None], path: Vec::new() }
    }

    pub fn node(&self) -> &T::Node {
        self.stack.last().expect("cursor stack never empty")
    }

    fn ensure_kids(&mut self) -> &Vec<T::Node> {
        let top = self.stack.len() - 1;
        if self.kids[top].is_none() {
            self.kids[top] = Some(self.tree.children(&self.stack[top]));
        }
        self.kids[top].as_ref().unwrap()
    }
}

impl<T: TreeModel + ?Sized> TreeCursor for NodeCursor<'_, T> {
    fn depth(&self) -> usize {
        self.path.len()
    }

    fn child_count(&mut self) -> usize {
        self.ensure_kids().len()
    }

    fn descend(&mut self, index: usize) {
        let child = self.ensure_kids()[index].clone();
        self.stack.push(child);
        self.kids.push(None);
        self.path.push(index as u32);
    }

    fn ascend(&mut self) {
        if self.stack.len() > 1 {
            self.stack.pop();
            self.kids.pop();
            self.path.pop();
        }
    }

    fn reset(&mut self) {
        self.stack.truncate(1);
        self.kids.truncate(1);
        self.path.clear();
    }

    fn path(&self) -> &[u32] {
        &self.path
    }

    fn head(&self) -> Option<LatticePoint> {
        self.tree.head(self.node())
    }
}

/// Counts tree-node expansions against a fixed allowance.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    remaining: u64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { remaining: u64::MAX }
    }

    pub fn new(nodes: u64) -> Self {
        Budget { remaining: nodes }
    }

    pub(crate) fn charge(&mut self, n: u64) -> Result<()> {
        if self.remaining < n {
            self.remaining = 0;
            return Err(Error::BudgetExceeded { reached: 0 });
        }
        self.remaining -= n;
        Ok(())
    }
}

/// Post-order fold of the section of the tree between `start` and absolute
/// depth `target`, memoized on `(depth, class)`.
///
/// `at_target` values nodes at depth `target`; `shortcut` may value a node
/// without expanding it; `combine` gets the child values (empty for a leaf).
pub(crate) fn fold_section<T, V>(
    tree: &T,
    start: T::Node,
    target: usize,
    budget: &mut Budget,
    mut at_target: impl FnMut(&T::Node) -> V,
    mut shortcut: impl FnMut(&T::Node) -> Option<V>,
    mut combine: impl FnMut(&T::Node, Vec<V>) -> V,
) -> Result<V>
where
    T: TreeModel + ?Sized,
    V: Clone,
{
    struct Frame<N, V> {
        node: N,
        kids: Vec<N>,
        next: usize,
        vals: Vec<V>,
        key: Option<(usize, u64)>,
    }

    let mut memo: HashMap<(usize, u64), V> = HashMap::new();

    // Values a node directly when possible, otherwise returns it expanded.
    let mut open = |node: T::Node,
                    memo: &HashMap<(usize, u64), V>,
                    budget: &mut Budget|
     -> Result<core::result::Result<V, Frame<T::Node, V>>> {
        let depth = tree.depth(&node);
        if depth >= target {
            return Ok(Ok(at_target(&node)));
        }
        let key = tree.class(&node).map(|c| (depth, c));
        if let Some(k) = key {
            if let Some(v) = memo.get(&k) {
                return Ok(Ok(v.clone()));
            }
        }
        if let Some(v) = shortcut(&node) {
            return Ok(Ok(v));
        }
        budget.charge(1)?;
        let kids = tree.children(&node);
        let n = kids.len();
        Ok(Err(Frame { node, kids, next: 0, vals: Vec::with_capacity(n), key }))
    };

    let mut stack = match open(start, &memo, budget)? {
        Ok(v) => return Ok(v),
        Err(frame) => vec![frame],
    };
    loop {
        let top = stack.last_mut().unwrap();
        if top.next < top.kids.len() {
            let child = top.kids[top.next].clone();
            top.next += 1;
            match open(child, &memo, budget)? {
                Ok(v) => stack.last_mut().unwrap().vals.push(v),
                Err(frame) => stack.push(frame),
            }
            continue;
        }
        let frame = stack.pop().unwrap();
        let v = combine(&frame.node, frame.vals);
        if let Some(k) = frame.key {
            memo.insert(k, v.clone());
        }
        match stack.last_mut() {
            Some(parent) => parent.vals.push(v),
            None => return Ok(v),
        }
    }
}

/// Exact number of nodes at absolute depth `n`.
pub fn level_count<T: TreeModel + ?Sized>(tree: &T, n: usize, budget: &mut Budget) -> Result<BigUint> {
    if n == 0 {
        return Ok(BigUint::one());
    }
    fold_section(
        tree,
        tree.root(),
        n,
        budget,
        |_| BigUint::one(),
        |node| {
            tree.ss_view(node)
                .map(|v| v.profile.subtree_level_size(v.offset, n - tree.depth(node)))
        },
        |_, vals| vals.into_iter().sum(),
    )
    .map_err(|e| match e {
        Error::BudgetExceeded { .. } => Error::BudgetExceeded { reached: n - 1 },
        e => e,
    })
}

/// `|T_0|, …, |T_{n_max}|`, computed level by level so that a budget failure
/// reports the deepest complete level.
pub fn level_counts<T: TreeModel + ?Sized>(
    tree: &T,
    n_max: usize,
    budget: &mut Budget,
) -> Result<Vec<BigUint>> {
    let mut out = vec![BigUint::one()];
    for n in 1..=n_max {
        out.push(level_count(tree, n, budget)?);
    }
    Ok(out)
}

/// Number of nodes of the section from the root down to depth `n`,
/// saturating at `cap`.
pub fn section_size<T: TreeModel + ?Sized>(tree: &T, n: usize, cap: u64) -> u64 {
    let cap_big = BigUint::from(cap);
    let mut total = BigUint::from(0u32);
    let mut budget = Budget::new(cap);
    for d in 0..=n {
        match level_count(tree, d, &mut budget) {
            Ok(c) => total += c,
            Err(_) => return cap,
        }
        if total >= cap_big {
            return cap;
        }
    }
    u64::try_from(total).unwrap_or(cap)
}
