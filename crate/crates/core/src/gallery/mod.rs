//! Example trees: spherically symmetric floor-rule trees, joins, grafts and
//! periodic closures of finite trees.

mod finite;
mod profile;

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;
use num_bigint::BigUint;

use crate::numeric::{ln_biguint, PositiveRatio};
use crate::tree::{level_count, Budget, NodeCursor, SsView, TreeModel, TreePath};
use crate::{Error, Result};

pub use finite::{periodic_critical_lambda, FiniteTree};
pub use profile::{DegreeRule, LevelProfile};

/// A tree from the gallery. Cloning is cheap (shared structure).
#[derive(Clone, Debug)]
pub enum GalleryTree {
    Spherical(Arc<LevelProfile>),
    Finite(Arc<FiniteTree>),
    Periodic(Arc<FiniteTree>),
    Join(Arc<GalleryTree>, Arc<GalleryTree>),
    Graft(Arc<Graft>),
}

/// Host tree, graft sites (as paths in the host) and the tree grafted at each.
#[derive(Clone, Debug)]
pub struct GraftSpec {
    pub host: GalleryTree,
    pub sites: Vec<TreePath>,
    pub scion: GalleryTree,
}

#[derive(Debug)]
struct TrieNode {
    kids: Vec<(u32, u32)>,
    site: bool,
}

#[derive(Debug)]
pub struct Graft {
    host: GalleryTree,
    scion: GalleryTree,
    trie: Vec<TrieNode>,
}

impl Graft {
    fn trie_child(&self, at: u32, index: u32) -> Option<u32> {
        self.trie[at as usize].kids.iter().find(|&&(i, _)| i == index).map(|&(_, t)| t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GalleryNode {
    Level(u32),
    Finite(u32),
    Periodic { depth: u32, pos: u32 },
    JoinRoot,
    Left(Box<GalleryNode>),
    Right(Box<GalleryNode>),
    /// A host node; `site` is its trie entry when grafts lie below it.
    Host { inner: Box<GalleryNode>, site: Option<u32> },
    /// A scion node hanging from a host site at depth `base`.
    Scion { base: u32, inner: Box<GalleryNode> },
}

fn mix(tag: u64, v: u64) -> u64 {
    let mut z = v ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn either_infinite(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

impl GalleryTree {
    pub fn spherical(profile: LevelProfile) -> Self {
        GalleryTree::Spherical(Arc::new(profile))
    }

    /// The infinite `b`-ary tree.
    pub fn b_ary(b: u32) -> Self {
        assert!(b >= 1, "a b-ary tree needs b >= 1");
        Self::spherical(LevelProfile::constant(b).expect("b >= 1"))
    }

    pub fn ray() -> Self {
        Self::b_ary(1)
    }

    /// Spherically symmetric tree with `ℓ_n = ⌊x^n / (ℓ_1 ⋯ ℓ_{n-1})⌋`.
    pub fn ss_tree_prop5(x: PositiveRatio) -> Result<Self> {
        Ok(Self::spherical(LevelProfile::floor(x, 0, false)?))
    }

    /// As [`GalleryTree::ss_tree_prop5`] with the degree doubled at perfect-square levels.
    pub fn ss_tree_prop5_bar(x: PositiveRatio) -> Result<Self> {
        Ok(Self::spherical(LevelProfile::floor(x, 0, true)?))
    }

    /// Spherically symmetric tree with `ℓ_n = ⌊x^n / (n^k ℓ_1 ⋯ ℓ_{n-1})⌋`.
    pub fn ss_tree_prop4(x: PositiveRatio, k: u32) -> Result<Self> {
        if !x.gt_one() || k == 0 {
            return Err(Error::invalid("need x > 1 and k >= 1"));
        }
        Ok(Self::spherical(LevelProfile::floor(x, k, false)?))
    }

    pub fn finite(t: FiniteTree) -> Self {
        GalleryTree::Finite(Arc::new(t))
    }

    /// A new root whose two children carry `a` and `b`.
    pub fn join(a: GalleryTree, b: GalleryTree) -> Self {
        GalleryTree::Join(Arc::new(a), Arc::new(b))
    }

    /// Grafts a copy of the scion at every site; the scion root is
    /// identified with the site and its children follow the host children.
    pub fn graft(spec: GraftSpec) -> Result<Self> {
        let mut trie = alloc::vec![TrieNode { kids: Vec::new(), site: false }];
        for site in &spec.sites {
            spec.host.node_at(site).map_err(|_| Error::InvalidSite(format!("{site}")))?;
            let mut at = 0u32;
            for &i in &site.0 {
                at = match trie[at as usize].kids.iter().find(|&&(j, _)| j == i) {
                    Some(&(_, t)) => t,
                    None => {
                        let t = trie.len() as u32;
                        trie.push(TrieNode { kids: Vec::new(), site: false });
                        trie[at as usize].kids.push((i, t));
                        t
                    }
                };
            }
            if trie[at as usize].site {
                return Err(Error::InvalidSite(format!("{site} listed twice")));
            }
            trie[at as usize].site = true;
        }
        Ok(GalleryTree::Graft(Arc::new(Graft { host: spec.host, scion: spec.scion, trie })))
    }

    /// The infinite tree obtained by grafting copies of `t` at its leaves,
    /// recursively.
    pub fn periodic_closure(t: FiniteTree) -> Result<Self> {
        t.check_closable()?;
        Ok(GalleryTree::Periodic(Arc::new(t)))
    }

    pub fn profile(&self) -> Option<&LevelProfile> {
        match self {
            GalleryTree::Spherical(p) => Some(p),
            _ => None,
        }
    }
}

impl TreeModel for GalleryTree {
    type Node = GalleryNode;
    type Cursor<'a> = NodeCursor<'a, GalleryTree>;

    fn root(&self) -> GalleryNode {
        match self {
            GalleryTree::Spherical(_) => GalleryNode::Level(0),
            GalleryTree::Finite(_) => GalleryNode::Finite(0),
            GalleryTree::Periodic(_) => GalleryNode::Periodic { depth: 0, pos: 0 },
            GalleryTree::Join(..) => GalleryNode::JoinRoot,
            GalleryTree::Graft(g) => GalleryNode::Host { inner: Box::new(g.host.root()), site: Some(0) },
        }
    }

    fn children(&self, node: &GalleryNode) -> Vec<GalleryNode> {
        match (self, node) {
            (GalleryTree::Spherical(p), GalleryNode::Level(d)) => {
                let k = p.child_count(*d as usize + 1);
                (0..k).map(|_| GalleryNode::Level(d + 1)).collect()
            }
            (GalleryTree::Finite(t), GalleryNode::Finite(v)) => {
                t.children(*v).iter().map(|&c| GalleryNode::Finite(c)).collect()
            }
            (GalleryTree::Periodic(t), GalleryNode::Periodic { depth, pos }) => t
                .children(*pos)
                .iter()
                .map(|&c| GalleryNode::Periodic { depth: depth + 1, pos: if t.is_leaf(c) { 0 } else { c } })
                .collect(),
            (GalleryTree::Join(a, b), GalleryNode::JoinRoot) => alloc::vec![
                GalleryNode::Left(Box::new(a.root())),
                GalleryNode::Right(Box::new(b.root())),
            ],
            (GalleryTree::Join(a, _), GalleryNode::Left(n)) => {
                a.children(n).into_iter().map(|c| GalleryNode::Left(Box::new(c))).collect()
            }
            (GalleryTree::Join(_, b), GalleryNode::Right(n)) => {
                b.children(n).into_iter().map(|c| GalleryNode::Right(Box::new(c))).collect()
            }
            (GalleryTree::Graft(g), GalleryNode::Host { inner, site }) => {
                let mut out: Vec<GalleryNode> = g
                    .host
                    .children(inner)
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| GalleryNode::Host {
                        inner: Box::new(c),
                        site: site.and_then(|s| g.trie_child(s, i as u32)),
                    })
                    .collect();
                if let Some(s) = site {
                    if g.trie[*s as usize].site {
                        let base = g.host.depth(inner) as u32;
                        out.extend(
                            g.scion
                                .children(&g.scion.root())
                                .into_iter()
                                .map(|c| GalleryNode::Scion { base, inner: Box::new(c) }),
                        );
                    }
                }
                out
            }
            (GalleryTree::Graft(g), GalleryNode::Scion { base, inner }) => g
                .scion
                .children(inner)
                .into_iter()
                .map(|c| GalleryNode::Scion { base: *base, inner: Box::new(c) })
                .collect(),
            _ => panic!("node does not belong to this tree"),
        }
    }

    fn depth(&self, node: &GalleryNode) -> usize {
        match (self, node) {
            (_, GalleryNode::Level(d)) => *d as usize,
            (GalleryTree::Finite(t), GalleryNode::Finite(v)) => t.depth(*v),
            (_, GalleryNode::Periodic { depth, .. }) => *depth as usize,
            (_, GalleryNode::JoinRoot) => 0,
            (GalleryTree::Join(a, _), GalleryNode::Left(n)) => 1 + a.depth(n),
            (GalleryTree::Join(_, b), GalleryNode::Right(n)) => 1 + b.depth(n),
            (GalleryTree::Graft(g), GalleryNode::Host { inner, .. }) => g.host.depth(inner),
            (GalleryTree::Graft(g), GalleryNode::Scion { base, inner }) => *base as usize + g.scion.depth(inner),
            _ => panic!("node does not belong to this tree"),
        }
    }

    fn class(&self, node: &GalleryNode) -> Option<u64> {
        match (self, node) {
            (_, GalleryNode::Level(_)) => Some(0),
            (_, GalleryNode::Finite(v)) => Some(mix(1, *v as u64)),
            (_, GalleryNode::Periodic { pos, .. }) => Some(mix(2, *pos as u64)),
            (_, GalleryNode::JoinRoot) => Some(3),
            (GalleryTree::Join(a, _), GalleryNode::Left(n)) => a.class(n).map(|c| mix(4, c)),
            (GalleryTree::Join(_, b), GalleryNode::Right(n)) => b.class(n).map(|c| mix(5, c)),
            (GalleryTree::Graft(g), GalleryNode::Host { inner, site: None }) => g.host.class(inner).map(|c| mix(6, c)),
            (_, GalleryNode::Host { site: Some(s), .. }) => Some(mix(7, *s as u64)),
            (GalleryTree::Graft(g), GalleryNode::Scion { inner, .. }) => g.scion.class(inner).map(|c| mix(8, c)),
            _ => None,
        }
    }

    fn is_infinite(&self, node: &GalleryNode) -> Option<bool> {
        match (self, node) {
            (GalleryTree::Spherical(_), _) | (GalleryTree::Periodic(_), _) => Some(true),
            (GalleryTree::Finite(_), _) => Some(false),
            (GalleryTree::Join(a, b), GalleryNode::JoinRoot) => {
                either_infinite(a.is_infinite(&a.root()), b.is_infinite(&b.root()))
            }
            (GalleryTree::Join(a, _), GalleryNode::Left(n)) => a.is_infinite(n),
            (GalleryTree::Join(_, b), GalleryNode::Right(n)) => b.is_infinite(n),
            (GalleryTree::Graft(g), GalleryNode::Host { inner, site }) => {
                let below = match site {
                    Some(_) => g.scion.is_infinite(&g.scion.root()),
                    None => Some(false),
                };
                either_infinite(g.host.is_infinite(inner), below)
            }
            (GalleryTree::Graft(g), GalleryNode::Scion { inner, .. }) => g.scion.is_infinite(inner),
            _ => None,
        }
    }

    fn ss_view(&self, node: &GalleryNode) -> Option<SsView<'_>> {
        match (self, node) {
            (GalleryTree::Spherical(p), GalleryNode::Level(d)) => Some(SsView { profile: p, offset: *d as usize }),
            (GalleryTree::Join(a, _), GalleryNode::Left(n)) => a.ss_view(n),
            (GalleryTree::Join(_, b), GalleryNode::Right(n)) => b.ss_view(n),
            (GalleryTree::Graft(g), GalleryNode::Host { inner, site: None }) => g.host.ss_view(inner),
            (GalleryTree::Graft(g), GalleryNode::Scion { inner, .. }) => g.scion.ss_view(inner),
            _ => None,
        }
    }

    fn cursor(&self) -> NodeCursor<'_, GalleryTree> {
        NodeCursor::new(self)
    }
}

/// `(|T_n|, |T_n|^{1/n})` for `n = 1..=n_max`.
pub fn growth_estimate<T: TreeModel + ?Sized>(
    tree: &T,
    n_max: usize,
    budget: &mut Budget,
) -> Result<Vec<(BigUint, f64)>> {
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let size = level_count(tree, n, budget)?;
        let root = (ln_biguint(&size) / n as f64).exp();
        out.push((size, root));
    }
    Ok(out)
}
