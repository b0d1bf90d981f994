use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::numeric::bisect_increasing;
use crate::{Error, Result};

/// An explicit finite rooted tree; node 0 is the root, children are ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTree {
    children: Vec<Vec<u32>>,
    depth: Vec<u32>,
}

impl FiniteTree {
    /// The one-node tree.
    pub fn single() -> Self {
        FiniteTree { children: vec![Vec::new()], depth: vec![0] }
    }

    /// A root with `k` leaf children.
    pub fn star(k: usize) -> Self {
        let mut t = Self::single();
        for _ in 0..k {
            t.add_child(0);
        }
        t
    }

    /// A path with `edges` edges.
    pub fn path(edges: usize) -> Self {
        let mut t = Self::single();
        let mut last = 0;
        for _ in 0..edges {
            last = t.add_child(last);
        }
        t
    }

    pub fn add_child(&mut self, parent: u32) -> u32 {
        let id = self.children.len() as u32;
        self.children.push(Vec::new());
        self.depth.push(self.depth[parent as usize] + 1);
        self.children[parent as usize].push(id);
        id
    }

    /// Parses the nested-parentheses format: a node is `(` followed by its
    /// children and `)`, so `(()(()()))` is a root with a leaf child and a
    /// child carrying two leaves. Whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.first() != Some(&'(') {
            return Err(Error::Parse(String::from("tree must start with '('")));
        }
        let mut tree = FiniteTree { children: Vec::new(), depth: Vec::new() };
        let mut stack: Vec<u32> = Vec::new();
        for (i, &c) in chars.iter().enumerate() {
            match c {
                '(' => {
                    let id = match stack.last() {
                        Some(&parent) => tree.add_child(parent),
                        None if tree.children.is_empty() => {
                            tree.children.push(Vec::new());
                            tree.depth.push(0);
                            0
                        }
                        None => return Err(Error::Parse(format!("trailing input at {i}"))),
                    };
                    stack.push(id);
                }
                ')' => {
                    if stack.pop().is_none() {
                        return Err(Error::Parse(format!("unbalanced ')' at {i}")));
                    }
                }
                other => return Err(Error::Parse(format!("unexpected {other:?} at {i}"))),
            }
        }
        if !stack.is_empty() {
            return Err(Error::Parse(String::from("unbalanced '('")));
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn children(&self, node: u32) -> &[u32] {
        &self.children[node as usize]
    }

    pub fn depth(&self, node: u32) -> usize {
        self.depth[node as usize] as usize
    }

    pub fn is_leaf(&self, node: u32) -> bool {
        self.children[node as usize].is_empty()
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }

    /// Depths of the leaves, i.e. lengths of the root-to-leaf paths.
    pub fn leaf_depths(&self) -> Vec<usize> {
        (0..self.len() as u32).filter(|&v| self.is_leaf(v)).map(|v| self.depth(v)).collect()
    }

    pub fn level_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.height() + 1];
        for &d in &self.depth {
            out[d as usize] += 1;
        }
        out
    }

    /// `self` with a copy of `scion` grafted at every leaf (the scion root is
    /// identified with the leaf).
    pub fn graft_at_leaves(&self, scion: &FiniteTree) -> FiniteTree {
        let mut out = FiniteTree::single();
        fn copy(src: &FiniteTree, v: u32, dst: &mut FiniteTree, at: u32, scion: Option<&FiniteTree>) {
            for &c in src.children(v) {
                let id = dst.add_child(at);
                copy(src, c, dst, id, scion);
            }
            if let Some(s) = scion {
                if src.is_leaf(v) {
                    copy(s, 0, dst, at, None);
                }
            }
        }
        copy(self, 0, &mut out, 0, Some(scion));
        out
    }

    pub(crate) fn check_closable(&self) -> Result<()> {
        if self.is_leaf(0) {
            return Err(Error::NoLeaf);
        }
        Ok(())
    }
}

impl fmt::Display for FiniteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &FiniteTree, v: u32, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("(")?;
            for &c in t.children(v) {
                go(t, c, f)?;
            }
            f.write_str(")")
        }
        go(self, 0, f)
    }
}

/// Critical bias of the periodic closure of `t`: the root in `(0, 1]` of
/// `Σ_{root-to-leaf paths γ} x^{|γ|} = 1`.
pub fn periodic_critical_lambda(t: &FiniteTree) -> Result<f64> {
    t.check_closable()?;
    let depths = t.leaf_depths();
    let f = |x: f64| depths.iter().map(|&d| x.powi(d as i32)).sum::<f64>();
    if f(1.0) < 1.0 {
        return Err(Error::invalid("path polynomial below 1 at x = 1"));
    }
    Ok(bisect_increasing(f, 1e-9, 1.0, 1.0))
}
