use std::collections::BTreeMap;

use itertools::Itertools;

use crate::chains::{tuple_faces, tuple_length, Tuple, UfChain};
use crate::coeffs::Coefficient;
use crate::error::{Error, Result};
use crate::geometry::FlatPair;
use crate::spaces::{LatticeSpace, Point, Window};
use crate::verify::Mutation;
use crate::wrongway::WrongWayContext;

use super::action::{translate, TranslationAction};

/// A chain invariant under a translation lattice, stored as one coefficient
/// per orbit. Keys are canonical representatives (see
/// [`TranslationAction::normalize`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantChain<A> {
    degree: usize,
    action: TranslationAction,
    reps: BTreeMap<Tuple, A>,
}

impl<A: Coefficient> EquivariantChain<A> {
    pub fn zero(action: TranslationAction, degree: usize) -> Self {
        Self {
            degree,
            action,
            reps: BTreeMap::new(),
        }
    }

    /// Sums orbits; each tuple may be any member of its orbit.
    pub fn from_orbits(
        action: TranslationAction,
        degree: usize,
        terms: impl IntoIterator<Item = (A, Tuple)>,
    ) -> Result<Self> {
        let mut chain = Self::zero(action, degree);
        for (a, t) in terms {
            chain.add_orbit(t, a)?;
        }
        Ok(chain)
    }

    pub fn add_orbit(&mut self, t: Tuple, a: A) -> Result<()> {
        if t.len() != self.degree + 1 {
            return Err(Error::TupleLength {
                degree: self.degree,
                found: t.len(),
            });
        }
        let space = self.action.space();
        for p in &t {
            space.check_point(p)?;
        }
        let t = self.action.normalize(&t);
        self.insert_canonical(t, a);
        Ok(())
    }

    fn insert_canonical(&mut self, t: Tuple, a: A) {
        if a.is_zero() {
            return;
        }
        match self.reps.get_mut(&t) {
            Some(existing) => {
                let sum = existing.clone() + a;
                if sum.is_zero() {
                    self.reps.remove(&t);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.reps.insert(t, a);
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn action(&self) -> &TranslationAction {
        &self.action
    }

    pub fn space(&self) -> LatticeSpace {
        self.action.space()
    }

    pub fn orbits(&self) -> impl Iterator<Item = (&Tuple, &A)> {
        self.reps.iter()
    }

    pub fn coefficient(&self, t: &[Point]) -> Option<&A> {
        self.reps.get(&self.action.normalize(t))
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn propagation(&self) -> i64 {
        self.reps.keys().map(|t| tuple_length(t)).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        if !self.action.same_lattice(&other.action) {
            return Err(Error::IncompatibleSubgroup);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (t, a) in &other.reps {
            out.insert_canonical(t.clone(), a.clone());
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
        let mut out = Self::zero(self.action.clone(), self.degree);
        for (t, a) in &self.reps {
            out.insert_canonical(t.clone(), a.scale(k));
        }
        out
    }

    /// Boundary on representatives, each face re-normalized to its orbit.
    pub fn boundary(&self) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::DegreeTooLow { min: 1, found: 0 });
        }
        let mut out = Self::zero(self.action.clone(), self.degree - 1);
        for (t, a) in &self.reps {
            for (sign, face) in tuple_faces(t) {
                let face = self.action.normalize(&face);
                out.insert_canonical(face, a.scale(sign));
            }
        }
        Ok(out)
    }

    /// The orbit sum restricted to tuples with every vertex in `window`.
    pub fn expand(&self, window: &Window) -> Result<UfChain<A>> {
        let space = self.space();
        if window.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: window.dim(),
            });
        }
        let mut by_first: BTreeMap<&Point, Vec<(&Tuple, &A)>> = BTreeMap::new();
        for (t, a) in &self.reps {
            by_first.entry(&t[0]).or_default().push((t, a));
        }
        let mut out = UfChain::zero(space, self.degree);
        for p in window.points() {
            let (r, shift) = self.action.reduce(&p);
            let Some(reps) = by_first.get(&r) else {
                continue;
            };
            let back: Point = shift.iter().map(|s| -s).collect();
            for (t, a) in reps {
                let image: Tuple = t.iter().map(|x| translate(x, &back)).collect();
                if image.iter().all(|x| window.contains(x)) {
                    out.insert_unchecked(image, (*a).clone());
                }
            }
        }
        Ok(out)
    }
}

/// Freudenthal–Kuhn triangulation of the unit cube, as a `Z^n`-equivariant
/// fundamental cycle: one simplex `(0, e_{π1}, e_{π1}+e_{π2}, …, 1)` per
/// permutation `π`, with coefficient `sign(π)`.
pub fn kuhn_fundamental_cycle(n: usize) -> Result<EquivariantChain<i64>> {
    let space = LatticeSpace::new(n)?;
    let action = TranslationAction::standard(space);
    let mut chain = EquivariantChain::zero(action, n);
    for perm in (0..n).permutations(n) {
        let mut vertex = vec![0; n];
        let mut t = vec![vertex.clone()];
        for &axis in &perm {
            vertex[axis] = 1;
            t.push(vertex.clone());
        }
        chain.add_orbit(t, permutation_sign(&perm))?;
    }
    Ok(chain)
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Checks that `sub` fixes the flat and is cocompact along it: its
/// generators have zero normal part and its pivots are exactly the tangent
/// coordinates.
fn check_flat_lattice(sub: &TranslationAction, pair: &FlatPair) -> Result<()> {
    if sub.space().dim() != pair.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.ambient_dim(),
            found: sub.space().dim(),
        });
    }
    let (_, pivots) = sub.basis();
    let tangent: Vec<usize> = (0..pair.flat_dim()).collect();
    let fixes_flat = sub.generators().iter().all(|g| pair.normal(g).iter().all(|&x| x == 0));
    if !fixes_flat || pivots != tangent.as_slice() {
        return Err(Error::IncompatibleSubgroup);
    }
    Ok(())
}

/// Forgets equivariance down to `sub`, keeping the translates of each orbit
/// whose vertices all lie within `radius` of the flat.
pub fn restrict_equivariance<A: Coefficient>(
    c: &EquivariantChain<A>,
    sub: &TranslationAction,
    pair: &FlatPair,
    radius: i64,
) -> Result<EquivariantChain<A>> {
    check_flat_lattice(sub, pair)?;
    if !c.action().contains_lattice(sub) {
        return Err(Error::NotSubgroup);
    }
    let propagation = c.propagation();
    if radius < propagation {
        return Err(Error::RadiusTooSmall { radius, propagation });
    }
    let n = pair.ambient_dim();
    let (basis, pivots) = sub.basis();
    let mut lo = vec![-radius; n];
    let mut hi = vec![radius; n];
    for (b, &p) in basis.iter().zip(pivots) {
        lo[p] = 0;
        hi[p] = b[p] - 1;
    }
    let firsts = Window::new(lo, hi)?.points();
    let mut out = EquivariantChain::zero(sub.clone(), c.degree());
    for (t, a) in c.orbits() {
        for p in &firsts {
            let shift: Point = p.iter().zip(&t[0]).map(|(x, y)| x - y).collect();
            if !c.action().contains(&shift) {
                continue;
            }
            let image: Tuple = t.iter().map(|x| translate(x, &shift)).collect();
            if image.iter().all(|x| pair.distance_to_flat(x) <= radius) {
                out.insert_canonical(image, a.clone());
            }
        }
    }
    Ok(out)
}

/// The lattice induced on `Z^{n-q}` by a flat-preserving `sub`.
pub fn tangent_action(sub: &TranslationAction, pair: &FlatPair) -> Result<TranslationAction> {
    check_flat_lattice(sub, pair)?;
    let space = LatticeSpace::new(pair.flat_dim())?;
    let generators = sub.generators().iter().map(|g| pair.tangent(g).to_vec()).collect();
    TranslationAction::new(space, generators)
}

/// The wrong-way map applied orbit by orbit. Crossing numbers and the
/// coordinate projection commute with translations along the flat, so the
/// image of a representative is a representative of the image orbit.
pub fn equivariant_wrong_way<A: Coefficient>(
    c: &EquivariantChain<A>,
    ctx: &WrongWayContext,
) -> Result<EquivariantChain<A>> {
    let pair = ctx.pair();
    let q = pair.codim();
    if c.degree() < q {
        return Err(Error::DegreeTooLow { min: q, found: c.degree() });
    }
    let target = tangent_action(c.action(), pair)?;
    let mut out = EquivariantChain::zero(target, c.degree() - q);
    for (t, a) in c.orbits() {
        let theta = ctx.thom_on_tuple(t)?;
        if theta != 0 {
            let tail: Tuple = t[q..].iter().map(|x| pair.tangent(x).to_vec()).collect();
            let tail = out.action.normalize(&tail);
            out.insert_canonical(tail, a.scale(theta));
        }
    }
    Ok(out)
}

/// `∂ ww(c) - (-1)^q ww(∂c)` on orbit representatives.
pub fn equivariant_sign_identity_residual<A: Coefficient>(
    c: &EquivariantChain<A>,
    ctx: &WrongWayContext,
) -> Result<EquivariantChain<A>> {
    let q = ctx.pair().codim();
    if c.degree() < q + 1 {
        return Err(Error::DegreeTooLow { min: q + 1, found: c.degree() });
    }
    let left = equivariant_wrong_way(c, ctx)?.boundary()?;
    let right = equivariant_wrong_way(&c.boundary()?, ctx)?;
    let sign = if q % 2 == 0 || ctx.mutation == Some(Mutation::DropSignPower) {
        1
    } else {
        -1
    };
    left.sub(&right.scale(sign))
}
