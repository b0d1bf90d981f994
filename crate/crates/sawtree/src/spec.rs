//! Text syntax for trees.
//!
//! ```text
//! bary:2            b-ary tree
//! ray
//! prop5:7/5         floor-rule tree, |T_n| = ⌊x^n⌋
//! prop5bar:5/4      same, doubled at square levels
//! prop4:3:1         prop4 with x = 3, k = 1
//! finite:(()())     nested parentheses, one pair per vertex
//! periodic:(()(())) periodic closure; periodic:@file reads the parens from a file
//! saw:halfplane     self-avoiding tree of a domain, saw:halfplane:pruned for T̃
//! join(A,B)
//! graft(A,B,/0.1;/1)
//! ```

use std::fs;

use sawtree_core::gallery::{FiniteTree, GalleryTree, GraftSpec};
use sawtree_core::numeric::PositiveRatio;
use sawtree_core::{DomainSpec, Error, Result, SawTree, TreePath};

#[derive(Clone, Debug)]
pub enum AnyTree {
    Gallery(GalleryTree),
    Saw(SawTree),
}

/// Runs `$body` with `$t` bound to the concrete tree inside an [`AnyTree`].
#[macro_export]
macro_rules! with_tree {
    ($tree:expr, $t:ident => $body:expr) => {
        match $tree {
            $crate::spec::AnyTree::Gallery($t) => $body,
            $crate::spec::AnyTree::Saw($t) => $body,
        }
    };
}

impl AnyTree {
    pub fn gallery(&self) -> Option<&GalleryTree> {
        match self {
            AnyTree::Gallery(g) => Some(g),
            AnyTree::Saw(_) => None,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn strip_key<'a>(v: &'a str, key: &str) -> &'a str {
    v.strip_prefix(key).and_then(|r| r.strip_prefix('=')).unwrap_or(v)
}

fn ratio(v: &str) -> Result<PositiveRatio> {
    strip_key(v, "x").parse()
}

/// Splits `s` at top-level commas.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

fn parse_path(s: &str) -> Result<TreePath> {
    let s = s.trim();
    let body = s.strip_prefix('/').ok_or_else(|| bad(format!("site {s:?} must start with '/'")))?;
    if body.is_empty() {
        return Ok(TreePath::root());
    }
    let idx = body
        .split('.')
        .map(|p| p.parse::<u32>().map_err(|_| bad(format!("bad site {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreePath(idx))
}

fn parens(arg: &str) -> Result<FiniteTree> {
    match arg.strip_prefix('@') {
        Some(file) => {
            let text = fs::read_to_string(file).map_err(|e| Error::InvalidInput(format!("{file}: {e}")))?;
            FiniteTree::parse(text.trim())
        }
        None => FiniteTree::parse(arg),
    }
}

fn parse_gallery(s: &str) -> Result<GalleryTree> {
    let s = s.trim();
    if let Some(inner) = call(s, "join") {
        let args = split_args(inner);
        if args.len() != 2 {
            return Err(bad("join takes two trees"));
        }
        return Ok(GalleryTree::join(parse_gallery(args[0])?, parse_gallery(args[1])?));
    }
    if let Some(inner) = call(s, "graft") {
        let args = split_args(inner);
        if args.len() != 3 {
            return Err(bad("graft takes a host, a scion and a site list"));
        }
        let sites = args[2].split(';').map(parse_path).collect::<Result<Vec<_>>>()?;
        return GalleryTree::graft(GraftSpec { host: parse_gallery(args[0])?, sites, scion: parse_gallery(args[1])? });
    }
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let args: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(':').collect() };
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(bad(format!("{kind} takes {n} argument(s)")))
        }
    };
    match kind {
        "ray" => want(0).map(|_| GalleryTree::ray()),
        "bary" => {
            want(1)?;
            let b: u32 = strip_key(args[0], "b").parse().map_err(|_| bad(format!("bad branching {:?}", args[0])))?;
            if b == 0 {
                return Err(Error::InvalidInput("b must be at least 1".into()));
            }
            Ok(GalleryTree::b_ary(b))
        }
        "prop5" => {
            want(1)?;
            GalleryTree::ss_tree_prop5(ratio(args[0])?)
        }
        "prop5bar" => {
            want(1)?;
            GalleryTree::ss_tree_prop5_bar(ratio(args[0])?)
        }
        "prop4" => {
            want(2)?;
            let k: u32 = strip_key(args[1], "k").parse().map_err(|_| bad(format!("bad k {:?}", args[1])))?;
            GalleryTree::ss_tree_prop4(ratio(args[0])?, k)
        }
        "finite" => Ok(GalleryTree::finite(parens(rest)?)),
        "periodic" => GalleryTree::periodic_closure(parens(rest)?),
        _ => Err(bad(format!("unknown tree {s:?}"))),
    }
}

/// Parses a tree spec.
pub fn parse_tree(s: &str) -> Result<AnyTree> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("saw:") {
        let (domain, pruned) = match rest.strip_suffix(":pruned") {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let domain: DomainSpec = domain.parse()?;
        return Ok(AnyTree::Saw(SawTree::new(domain, pruned)));
    }
    parse_gallery(s).map(AnyTree::Gallery)
}
