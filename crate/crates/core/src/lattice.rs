//! Square-lattice geometry: points, unit steps and the planar domains walks
//! are confined to.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// A point of Z². `x` is the real part, `y` the imaginary part.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub x: i32,
    pub y: i32,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        LatticePoint { x, y }
    }

    pub fn step(self, dir: Dir) -> Self {
        let (dx, dy) = dir.delta();
        LatticePoint::new(self.x + dx, self.y + dy)
    }

    pub fn is_adjacent(self, other: LatticePoint) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    pub fn direction_to(self, other: LatticePoint) -> Option<Dir> {
        Dir::ALL.into_iter().find(|&d| self.step(d) == other)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A unit step. The declaration order East, North, West, South is the
/// canonical child order of every self-avoiding tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    East,
    North,
    West,
    South,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::East, Dir::North, Dir::West, Dir::South];

    pub const fn delta(self) -> (i32, i32) {
        match self {
            Dir::East => (1, 0),
            Dir::North => (0, 1),
            Dir::West => (-1, 0),
            Dir::South => (0, -1),
        }
    }

    pub const fn opposite(self) -> Dir {
        match self {
            Dir::East => Dir::West,
            Dir::North => Dir::South,
            Dir::West => Dir::East,
            Dir::South => Dir::North,
        }
    }

    pub const fn letter(self) -> char {
        match self {
            Dir::East => 'E',
            Dir::North => 'N',
            Dir::West => 'W',
            Dir::South => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Dir> {
        match c.to_ascii_uppercase() {
            'E' => Some(Dir::East),
            'N' => Some(Dir::North),
            'W' => Some(Dir::West),
            'S' => Some(Dir::South),
            _ => None,
        }
    }

    /// Parses a step word such as `"ENE"` or `"E,N,E"`.
    pub fn parse_word(word: &str) -> Result<Vec<Dir>> {
        word.chars()
            .filter(|c| !matches!(c, ',' | ' '))
            .map(|c| Dir::from_letter(c).ok_or_else(|| Error::Parse(alloc::format!("bad step {c:?}"))))
            .collect()
    }
}

/// The planar domains a self-avoiding tree can be built over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainSpec {
    FullPlane,
    /// `y >= 0`.
    ClosedHalfPlane,
    /// `y > 0`, together with the origin.
    UpperHalfPlane,
    /// `x >= 0` and `y >= 0`.
    Quadrant,
    /// `0 <= y <= width`; construct with [`DomainSpec::strip`].
    Strip(u32),
}

impl DomainSpec {
    pub fn strip(width: u32) -> Result<Self> {
        if width == 0 {
            return Err(Error::invalid("strip width must be at least 1"));
        }
        Ok(DomainSpec::Strip(width))
    }

    pub fn contains(self, p: LatticePoint) -> bool {
        match self {
            DomainSpec::FullPlane => true,
            DomainSpec::ClosedHalfPlane => p.y >= 0,
            DomainSpec::UpperHalfPlane => p.y > 0 || p == LatticePoint::ORIGIN,
            DomainSpec::Quadrant => p.x >= 0 && p.y >= 0,
            DomainSpec::Strip(w) => p.y >= 0 && i64::from(p.y) <= i64::from(w),
        }
    }

    /// In-domain lattice neighbours of `p`, in E, N, W, S order.
    pub fn neighbors(self, p: LatticePoint) -> Result<Vec<LatticePoint>> {
        if !self.contains(p) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
        Ok(Dir::ALL
            .into_iter()
            .map(|d| p.step(d))
            .filter(|&q| self.contains(q))
            .collect())
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::FullPlane => f.write_str("plane"),
            DomainSpec::ClosedHalfPlane => f.write_str("halfplane"),
            DomainSpec::UpperHalfPlane => f.write_str("upperhalfplane"),
            DomainSpec::Quadrant => f.write_str("quadrant"),
            DomainSpec::Strip(w) => write!(f, "strip:{w}"),
        }
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plane" => Ok(DomainSpec::FullPlane),
            "halfplane" => Ok(DomainSpec::ClosedHalfPlane),
            "upperhalfplane" => Ok(DomainSpec::UpperHalfPlane),
            "quadrant" => Ok(DomainSpec::Quadrant),
            other => match other.strip_prefix("strip:") {
                Some(w) => {
                    let w: u32 = w
                        .parse()
                        .map_err(|_| Error::Parse(alloc::format!("bad strip width {w:?}")))?;
                    DomainSpec::strip(w)
                }
                None => Err(Error::Parse(alloc::format!("unknown domain {:?}", other.to_string()))),
            },
        }
    }
}
