//! Points and finite sets of the square lattice, discrete balls and their
//! boundaries.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of Z².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn is_origin(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Euclidean norm.
    pub fn norm(self) -> f64 {
        ((self.x * self.x + self.y * self.y) as f64).sqrt()
    }

    pub fn norm_sq(self) -> i64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm_inf(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    /// The four nearest neighbours, in the order east, west, north, south.
    pub fn neighbors(self) -> [LatticePoint; 4] {
        [
            Self::new(self.x + 1, self.y),
            Self::new(self.x - 1, self.y),
            Self::new(self.x, self.y + 1),
            Self::new(self.x, self.y - 1),
        ]
    }

    pub fn is_neighbor(self, other: LatticePoint) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    /// The eight images under the dihedral group fixing the origin.
    pub fn dihedral_images(self) -> [LatticePoint; 8] {
        let (x, y) = (self.x, self.y);
        [
            Self::new(x, y),
            Self::new(-x, y),
            Self::new(x, -y),
            Self::new(-x, -y),
            Self::new(y, x),
            Self::new(-y, x),
            Self::new(y, -x),
            Self::new(-y, -x),
        ]
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl From<(i64, i64)> for LatticePoint {
    fn from((x, y): (i64, i64)) -> Self {
        Self::new(x, y)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for LatticePoint {
    type Err = Error;

    /// Parses `x,y`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(',').map(str::trim);
        let parse = |p: Option<&str>| -> Result<i64> {
            p.ok_or_else(|| Error::Domain(format!("expected `x,y`, got `{s}`")))?
                .parse::<i64>()
                .map_err(|e| Error::Domain(format!("bad coordinate in `{s}`: {e}")))
        };
        let x = parse(parts.next())?;
        let y = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::Domain(format!("expected `x,y`, got `{s}`")));
        }
        Ok(Self::new(x, y))
    }
}

/// Parses a point list of the form `x1,y1;x2,y2;...`.
pub fn parse_point_list(s: &str) -> Result<Vec<LatticePoint>> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect()
}

/// A finite set of distinct lattice points with a fixed order.
///
/// The order is the row/column convention used by every matrix built from
/// the set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSet {
    points: Vec<LatticePoint>,
    contains_origin: bool,
}

impl LatticeSet {
    /// Builds a set, rejecting empty input and repeated points.
    pub fn new(points: Vec<LatticePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("empty lattice set".into()));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !seen.insert(*p) {
                return Err(Error::Domain(format!("repeated point ({p}) in lattice set")));
            }
        }
        let contains_origin = seen.contains(&LatticePoint::ORIGIN);
        Ok(Self {
            points,
            contains_origin,
        })
    }

    /// The discrete ball `B(center, r) = { y : |y - center| <= r }`, listed row by row.
    pub fn ball(center: LatticePoint, r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("ball radius must be finite and >= 0, got {r}")));
        }
        let ri = r.floor() as i64;
        let r2 = r * r;
        let mut pts = Vec::new();
        for dy in -ri..=ri {
            for dx in -ri..=ri {
                if ((dx * dx + dy * dy) as f64) <= r2 {
                    pts.push(LatticePoint::new(center.x + dx, center.y + dy));
                }
            }
        }
        Self::new(pts)
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_origin(&self) -> bool {
        self.contains_origin
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points.contains(&p)
    }

    pub fn translate(&self, by: LatticePoint) -> Self {
        let points: Vec<_> = self.points.iter().map(|&p| p + by).collect();
        let contains_origin = points.iter().any(|p| p.is_origin());
        Self {
            points,
            contains_origin,
        }
    }

    /// Internal boundary: points of the set having a neighbour outside it.
    pub fn inner_boundary(&self) -> Vec<LatticePoint> {
        let members: HashSet<_> = self.points.iter().copied().collect();
        self.points
            .iter()
            .copied()
            .filter(|p| p.neighbors().iter().any(|q| !members.contains(q)))
            .collect()
    }

    /// Outer boundary: points outside the set adjacent to it, in first-seen order.
    pub fn outer_boundary(&self) -> Vec<LatticePoint> {
        let members: HashSet<_> = self.points.iter().copied().collect();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in &self.points {
            for q in p.neighbors() {
                if !members.contains(&q) && seen.insert(q) {
                    out.push(q);
                }
            }
        }
        out
    }
}

impl fmt::Display for LatticeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 6;
        write!(f, "{{")?;
        for (i, p) in self.points.iter().take(SHOWN).enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{p}")?;
        }
        if self.points.len() > SHOWN {
            write!(f, ";... ({} points)", self.points.len())?;
        }
        write!(f, "}}")
    }
}

/// Square bounding-box index for grids covering `[-half, half]²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BoxIndex {
    pub half: i64,
    pub width: usize,
}

impl BoxIndex {
    pub fn new(half: i64) -> Self {
        Self {
            half,
            width: (2 * half + 1) as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.width
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        p.x.abs() <= self.half && p.y.abs() <= self.half
    }

    pub fn index(&self, p: LatticePoint) -> usize {
        debug_assert!(self.contains(p));
        (p.x + self.half) as usize + (p.y + self.half) as usize * self.width
    }

    pub fn point(&self, i: usize) -> LatticePoint {
        let x = (i % self.width) as i64 - self.half;
        let y = (i / self.width) as i64 - self.half;
        LatticePoint::new(x, y)
    }
}
