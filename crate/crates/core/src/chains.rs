//! Uniformly finite chains with finite support.
//!
//! A degree-`k` chain is a sparse map from ordered `(k+1)`-tuples of lattice
//! points to nonzero coefficients. Terms live in a `BTreeMap`, so the
//! support is always in lexicographic order and zero coefficients never
//! survive an operation. Degenerate tuples (repeated vertices) are ordinary
//! basis elements.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::coeffs::Coefficient;
use crate::error::{Error, Result};
use crate::spaces::{sup_distance, LatticeSpace, Point};

/// Ordered vertex tuple of a chain term.
pub type Tuple = Vec<Point>;

/// `max_{i,j} d(y_i, y_j)`; zero for a single vertex.
pub fn tuple_length(t: &[Point]) -> i64 {
    let mut len = 0;
    for (i, a) in t.iter().enumerate() {
        for b in &t[i + 1..] {
            len = len.max(sup_distance(a, b));
        }
    }
    len
}

/// Faces of an ordered tuple with their boundary signs `(-1)^j`.
pub fn tuple_faces(t: &[Point]) -> impl Iterator<Item = (i64, Tuple)> + '_ {
    (0..t.len()).map(move |j| {
        let mut face = t.to_vec();
        face.remove(j);
        (if j % 2 == 0 { 1 } else { -1 }, face)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UfChain<A> {
    degree: usize,
    space: LatticeSpace,
    terms: BTreeMap<Tuple, A>,
}

impl<A: Coefficient> UfChain<A> {
    pub fn zero(space: LatticeSpace, degree: usize) -> Self {
        Self {
            degree,
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        space: LatticeSpace,
        degree: usize,
        terms: impl IntoIterator<Item = (A, Tuple)>,
    ) -> Result<Self> {
        let mut chain = Self::zero(space, degree);
        for (a, t) in terms {
            chain.add_term(t, a)?;
        }
        Ok(chain)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn space(&self) -> LatticeSpace {
        self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tuple, &A)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &[Point]) -> Option<&A> {
        self.terms.get(t)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `a·t`, merging with an existing term and dropping zeros.
    pub fn add_term(&mut self, t: Tuple, a: A) -> Result<()> {
        if t.len() != self.degree + 1 {
            return Err(Error::TupleLength {
                degree: self.degree,
                found: t.len(),
            });
        }
        for p in &t {
            self.space.check_point(p)?;
        }
        self.insert_unchecked(t, a);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, t: Tuple, a: A) {
        if a.is_zero() {
            return;
        }
        match self.terms.get_mut(&t) {
            Some(existing) => {
                let sum = existing.clone() + a;
                if sum.is_zero() {
                    self.terms.remove(&t);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(t, a);
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: other.space.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (t, a) in &other.terms {
            out.insert_unchecked(t.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero(self.space, self.degree);
        for (t, a) in &self.terms {
            out.insert_unchecked(t.clone(), a.scale(k));
        }
        out
    }

    /// Ordered simplicial boundary `Σ_j (-1)^j (y_0, …, ŷ_j, …, y_k)`.
    pub fn boundary(&self) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::DegreeTooLow { min: 1, found: 0 });
        }
        let mut out = Self::zero(self.space, self.degree - 1);
        for (t, a) in &self.terms {
            for (sign, face) in tuple_faces(t) {
                out.insert_unchecked(face, a.scale(sign));
            }
        }
        Ok(out)
    }

    /// Largest tuple length in the support (the chain's propagation `R`).
    pub fn propagation(&self) -> i64 {
        self.terms.keys().map(|t| tuple_length(t)).max().unwrap_or(0)
    }

    pub fn sup_norm(&self) -> BigRational {
        self.terms
            .values()
            .map(Coefficient::norm)
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// `sup |a_y| · length(y)^n` with `0^0 = 1`.
    pub fn uf_norm(&self, n: u32) -> BigRational {
        self.terms
            .iter()
            .map(|(t, a)| {
                let weight = BigInt::from(tuple_length(t)).pow(n);
                a.norm() * BigRational::from_integer(weight)
            })
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// `uf_norm(c, n) + uf_norm(∂c, n)`; the boundary term is zero in degree 0.
    pub fn frechet_seminorm(&self, n: u32) -> BigRational {
        let boundary_term = match self.boundary() {
            Ok(b) => b.uf_norm(n),
            Err(_) => BigRational::zero(),
        };
        self.uf_norm(n) + boundary_term
    }

    pub fn chain_stats(&self, radii: &[u32]) -> ChainStats {
        let multiplicity = radii
            .iter()
            .map(|&r| (r, self.max_multiplicity(i64::from(r))))
            .collect();
        ChainStats {
            propagation: self.propagation(),
            sup_norm: self.sup_norm(),
            multiplicity,
        }
    }

    /// Largest number of supported tuples in a closed `r`-ball (product sup
    /// metric on `X^{k+1}`) centred at a supported tuple.
    ///
    /// Tuples are swept in order of their first coordinate, so only a window
    /// of candidates is compared for each centre.
    fn max_multiplicity(&self, r: i64) -> usize {
        let flat: Vec<Vec<i64>> = self
            .terms
            .keys()
            .map(|t| t.iter().flatten().copied().collect())
            .collect();
        let mut order: Vec<usize> = (0..flat.len()).collect();
        order.sort_by_key(|&i| flat[i].first().copied().unwrap_or(0));
        let key = |i: usize| flat[i].first().copied().unwrap_or(0);
        let mut best = 0;
        let mut lo = 0;
        for &i in &order {
            while key(order[lo]) < key(i) - r {
                lo += 1;
            }
            let mut count = 0;
            for &j in order[lo..].iter() {
                if key(j) > key(i) + r {
                    break;
                }
                if sup_distance(&flat[i], &flat[j]) <= r {
                    count += 1;
                }
            }
            best = best.max(count);
        }
        best
    }

    /// Applies `f` to every vertex, landing in `target`; coefficients of
    /// colliding tuples are combined. Degenerate images are kept.
    pub fn push_tuplewise<F>(&self, target: LatticeSpace, f: F) -> Result<Self>
    where
        F: Fn(&Point) -> Point,
    {
        let mut out = Self::zero(target, self.degree);
        for (t, a) in &self.terms {
            let image: Tuple = t.iter().map(&f).collect();
            for p in &image {
                target.check_point(p)?;
            }
            out.insert_unchecked(image, a.clone());
        }
        Ok(out)
    }

    pub fn into_terms(self) -> BTreeMap<Tuple, A> {
        self.terms
    }
}

/// Finite-support statistics behind the uniform finiteness conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStats {
    pub propagation: i64,
    pub sup_norm: BigRational,
    /// `r -> K_r`
    pub multiplicity: BTreeMap<u32, usize>,
}
