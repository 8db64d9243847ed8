//! Integer lattices `Z^n` with the sup metric.
//!
//! All distances are integers, so separation and norm tests are exact.
//! Enumeration always happens inside a finite [`Window`], and every
//! enumeration returns points in lexicographic order.

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point. Its length is the dimension of the ambient lattice.
pub type Point = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "lattice")]
pub struct LatticeSpace {
    dim: usize,
}

impl LatticeSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check_point(&self, p: &[i64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        Ok(())
    }

    pub fn distance(&self, a: &[i64], b: &[i64]) -> i64 {
        sup_distance(a, b)
    }

    /// Closed ball of radius `r`, lexicographically ordered.
    pub fn ball(&self, center: &[i64], r: u32) -> Result<Vec<Point>> {
        self.check_point(center)?;
        let r = i64::from(r);
        let lo = center.iter().map(|c| c - r).collect();
        let hi = center.iter().map(|c| c + r).collect();
        Ok(Window { lo, hi }.points())
    }

    /// Maximal `c`-separated subset of the window, built by a greedy scan in
    /// lexicographic order: a point is kept when it is farther than `c` from
    /// every point kept so far.
    pub fn greedy_net(&self, spec: &NetSpec) -> Result<Vec<Point>> {
        if spec.window.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: spec.window.dim(),
            });
        }
        let mut net: Vec<Point> = Vec::new();
        for p in spec.window.points() {
            if net.iter().all(|g| spec.separated(sup_distance(g, &p))) {
                net.push(p);
            }
        }
        Ok(net)
    }

    /// Net point closest to `x`; ties go to the lexicographically smallest.
    pub fn nearest_in_net<'a>(&self, net: &'a [Point], x: &[i64]) -> Result<&'a Point> {
        self.check_point(x)?;
        net.iter()
            .min_by(|a, b| {
                sup_distance(a, x)
                    .cmp(&sup_distance(b, x))
                    .then_with(|| a.cmp(b))
            })
            .ok_or(Error::EmptyNet)
    }
}

pub fn sup_distance(a: &[i64], b: &[i64]) -> i64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or(0)
}

/// Inclusive axis-aligned box `lo ≤ p ≤ hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: Point,
    pub hi: Point,
}

impl Window {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() || lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::EmptyWindow);
        }
        Ok(Self { lo, hi })
    }

    /// Cube `[-r, r]^dim`.
    pub fn centered(dim: usize, r: i64) -> Self {
        Self {
            lo: vec![-r; dim],
            hi: vec![r; dim],
        }
    }

    /// Smallest window containing every point, or `None` for no points.
    pub fn bounding<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for p in it {
            for (i, &c) in p.iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        Some(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dim() && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (l, h))| l <= c && c <= h)
    }

    pub fn grow(&self, r: i64) -> Self {
        Self {
            lo: self.lo.iter().map(|c| c - r).collect(),
            hi: self.hi.iter().map(|c| c + r).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1).max(0) as usize)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points of the window in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| l..=h)
            .multi_cartesian_product()
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetSpec {
    separation: BigRational,
    pub window: Window,
}

impl NetSpec {
    pub fn new(separation: BigRational, window: Window) -> Result<Self> {
        if !separation.is_positive() || separation.is_zero() {
            return Err(Error::NonPositiveSeparation);
        }
        Ok(Self { separation, window })
    }

    pub fn separation(&self) -> &BigRational {
        &self.separation
    }

    fn separated(&self, d: i64) -> bool {
        BigRational::from_integer(d.into()) > self.separation
    }
}
