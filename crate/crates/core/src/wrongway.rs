//! Chain-level wrong-way map `c ↦ η_*(θ ∩ c)` for the flat model pair.
//!
//! For a term `a·(x_0, …, x_k)` the cap product keeps the tail
//! `(x_q, …, x_k)` with coefficient `a·θ(Δ(x_0, …, x_q))`, where `Δ` is the
//! affine filling and `θ` the crossing cochain. `η` is the coordinate
//! projection onto the flat, and the result is re-indexed to `Z^{n-q}`.

use std::collections::BTreeMap;

use crate::chains::{tuple_faces, Tuple, UfChain};
use crate::coeffs::Coefficient;
use crate::error::{Error, Result};
use crate::geometry::{leading_crossing, FlatPair};
use crate::spaces::{sup_distance, LatticeSpace, Point, Window};
use crate::verify::Mutation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrongWayContext {
    pair: FlatPair,
    window: Window,
    perturb: bool,
    pub(crate) mutation: Option<Mutation>,
}

impl WrongWayContext {
    pub fn new(pair: FlatPair, window: Window, perturb: bool) -> Result<Self> {
        if pair.codim() >= pair.ambient_dim() {
            return Err(Error::InvalidCodimension {
                dim: pair.ambient_dim(),
                codim: pair.codim(),
            });
        }
        if window.dim() != pair.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: pair.ambient_dim(),
                found: window.dim(),
            });
        }
        Ok(Self {
            pair,
            window,
            perturb,
            mutation: None,
        })
    }

    /// Context whose window is the bounding box of the chain's support.
    pub fn for_chain<A: Coefficient>(pair: FlatPair, chain: &UfChain<A>, perturb: bool) -> Result<Self> {
        let window = Window::bounding(chain.terms().flat_map(|(t, _)| t.iter()))
            .unwrap_or_else(|| Window::centered(pair.ambient_dim(), 0));
        Self::new(pair, window, perturb)
    }

    pub fn pair(&self) -> &FlatPair {
        &self.pair
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn perturb(&self) -> bool {
        self.perturb
    }

    pub fn with_pair(&self, pair: FlatPair) -> Self {
        Self { pair, ..self.clone() }
    }

    pub(crate) fn with_mutation(mut self, mutation: Option<Mutation>) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn flat_space(&self) -> LatticeSpace {
        LatticeSpace::new(self.pair.flat_dim()).expect("codim below ambient dimension")
    }

    fn check_input<A: Coefficient>(&self, c: &UfChain<A>) -> Result<()> {
        if c.space().dim() != self.pair.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.pair.ambient_dim(),
                found: c.space().dim(),
            });
        }
        if c.degree() < self.pair.codim() {
            return Err(Error::DegreeTooLow {
                min: self.pair.codim(),
                found: c.degree(),
            });
        }
        for (t, _) in c.terms() {
            if let Some(p) = t.iter().find(|p| !self.window.contains(p)) {
                return Err(Error::OutsideWindow { point: p.clone() });
            }
        }
        Ok(())
    }

    /// `θ(Δ(x_0, …, x_q))` for the leading vertices of a tuple.
    pub fn thom_on_tuple(&self, t: &Tuple) -> Result<i64> {
        let signed = self.mutation != Some(Mutation::ThomSignFlip);
        leading_crossing(t, &self.pair, self.perturb, signed)
    }

    /// `θ ∩ c`, a degree `k - q` chain on the ambient lattice.
    pub fn cap_thom<A: Coefficient>(&self, c: &UfChain<A>) -> Result<UfChain<A>> {
        self.check_input(c)?;
        let q = self.pair.codim();
        let mut out = UfChain::zero(c.space(), c.degree() - q);
        for (t, a) in c.terms() {
            let theta = self.thom_on_tuple(t)?;
            if theta != 0 {
                out.insert_unchecked(t[q..].to_vec(), a.scale(theta));
            }
        }
        debug_assert!(self.is_local(c, &out));
        Ok(out)
    }

    /// Every vertex of `θ ∩ c` lies within `propagation(c)` of the flat.
    pub fn is_local<A: Coefficient>(&self, c: &UfChain<A>, capped: &UfChain<A>) -> bool {
        let r = c.propagation();
        capped
            .terms()
            .all(|(t, _)| t.iter().all(|p| self.pair.distance_to_flat(p) <= r))
    }

    /// Nearest point of the flat, in ambient coordinates.
    pub fn eta(&self, x: &[i64]) -> Point {
        self.pair.project(x)
    }

    /// `η_*(θ ∩ c)` on `Z^{n-q}`.
    pub fn wrong_way<A: Coefficient>(&self, c: &UfChain<A>) -> Result<UfChain<A>> {
        let capped = self.cap_thom(c)?;
        let pair = self.pair;
        capped.push_tuplewise(self.flat_space(), |x| pair.tangent(x).to_vec())
    }

    /// `∂(η_*(θ ∩ c)) - (-1)^q · η_*(θ ∩ ∂c)`, the zero chain whenever `c`
    /// and `∂c` are in general position.
    pub fn sign_identity_residual<A: Coefficient>(&self, c: &UfChain<A>) -> Result<UfChain<A>> {
        let q = self.pair.codim();
        if c.degree() < q + 1 {
            return Err(Error::DegreeTooLow {
                min: q + 1,
                found: c.degree(),
            });
        }
        let left = self.wrong_way(c)?.boundary()?;
        let right = self.wrong_way(&c.boundary()?)?;
        let sign = if q % 2 == 0 || self.mutation == Some(Mutation::DropSignPower) {
            1
        } else {
            -1
        };
        left.sub(&right.scale(sign))
    }

    /// The residual expanded term by term from the two displayed sums of the
    /// chain identity, without going through `boundary` on output chains:
    /// `-(-1)^q Σ a · δθ(x_0, …, x_{q+1}) · η_*(x_{q+1}, …, x_k)`.
    pub fn obstruction_term<A: Coefficient>(&self, c: &UfChain<A>) -> Result<UfChain<A>> {
        let q = self.pair.codim();
        if c.degree() < q + 1 {
            return Err(Error::DegreeTooLow {
                min: q + 1,
                found: c.degree(),
            });
        }
        self.check_input(c)?;
        let mut out = UfChain::zero(self.flat_space(), c.degree() - q - 1);
        for (t, a) in c.terms() {
            let mut delta_theta = 0;
            for (sign, face) in tuple_faces(&t[..q + 2]) {
                delta_theta += sign * self.thom_on_tuple(&face)?;
            }
            if delta_theta != 0 {
                let sign = if q % 2 == 0 { -1 } else { 1 };
                let tail = t[q + 1..].iter().map(|x| self.pair.tangent(x).to_vec()).collect();
                out.insert_unchecked(tail, a.scale(sign * delta_theta));
            }
        }
        Ok(out)
    }
}

/// Empirical expansion and co-expansion of a point map on a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoughProfile {
    /// `r -> (S(r), T(r))` with `S(r) = max{d(f x, f y) : d(x, y) ≤ r}` and
    /// `T(r) = max{d(x, y) : d(f x, f y) ≤ r}`.
    pub rows: BTreeMap<i64, (i64, i64)>,
}

impl RoughProfile {
    pub fn expansion(&self, r: i64) -> Option<i64> {
        self.rows.get(&r).map(|&(s, _)| s)
    }

    pub fn coexpansion(&self, r: i64) -> Option<i64> {
        self.rows.get(&r).map(|&(_, t)| t)
    }
}

pub fn rough_map_profile<F>(f: F, window: &Window, radii: &[i64]) -> RoughProfile
where
    F: Fn(&Point) -> Point,
{
    let points = window.points();
    let images: Vec<Point> = points.iter().map(&f).collect();
    let mut rows: BTreeMap<i64, (i64, i64)> = radii.iter().map(|&r| (r, (0, 0))).collect();
    for i in 0..points.len() {
        for j in i..points.len() {
            let d = sup_distance(&points[i], &points[j]);
            let e = sup_distance(&images[i], &images[j]);
            for (&r, (s, t)) in rows.iter_mut() {
                if d <= r {
                    *s = (*s).max(e);
                }
                if e <= r {
                    *t = (*t).max(d);
                }
            }
        }
    }
    RoughProfile { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Mod2;

    fn ctx(n: usize, q: usize) -> WrongWayContext {
        WrongWayContext::new(FlatPair::new(n, q).unwrap(), Window::centered(n, 6), false).unwrap()
    }

    fn chain(dim: usize, degree: usize, terms: &[(i64, &[&[i64]])]) -> UfChain<i64> {
        UfChain::from_terms(
            LatticeSpace::new(dim).unwrap(),
            degree,
            terms.iter().map(|(a, t)| (*a, t.iter().map(|p| p.to_vec()).collect())),
        )
        .unwrap()
    }

    #[test]
    fn cap_of_crossing_edge() {
        let c = chain(2, 1, &[(1, &[&[0, -1], &[0, 1]])]);
        assert_eq!(ctx(2, 1).cap_thom(&c).unwrap(), chain(2, 0, &[(1, &[&[0, 1]])]));
    }

    #[test]
    fn cap_of_one_sided_chain_vanishes() {
        let c = chain(2, 1, &[(3, &[&[0, 1], &[2, 2]]), (1, &[&[1, 1], &[1, 4]])]);
        assert!(ctx(2, 1).cap_thom(&c).unwrap().is_zero());
    }

    #[test]
    fn cap_in_degree_q_totals_crossings() {
        let c = chain(2, 1, &[(2, &[&[0, -1], &[0, 1]]), (1, &[&[3, 2], &[1, -2]]), (5, &[&[1, 1], &[1, 2]])]);
        let capped = ctx(2, 1).cap_thom(&c).unwrap();
        let total: i64 = capped.terms().map(|(_, a)| *a).sum();
        assert_eq!(total, 2 - 1);
    }

    #[test]
    fn eta_examples() {
        let cx = ctx(2, 1);
        assert_eq!(cx.eta(&[3, 7]), vec![3, 0]);
        assert_eq!(cx.eta(&[3, 0]), vec![3, 0]);
    }

    #[test]
    fn wrong_way_examples() {
        let c = chain(2, 1, &[(1, &[&[0, -1], &[0, 1]])]);
        assert_eq!(ctx(2, 1).wrong_way(&c).unwrap(), chain(1, 0, &[(1, &[&[0]])]));
        let one_sided = chain(2, 2, &[(1, &[&[0, 1], &[1, 2], &[0, 3]])]);
        assert!(ctx(2, 1).wrong_way(&one_sided.boundary().unwrap()).unwrap().is_zero());
    }

    #[test]
    fn wrong_way_degree_errors() {
        let c = chain(3, 1, &[(1, &[&[0, 0, -1], &[0, 1, 1]])]);
        assert!(matches!(ctx(3, 2).wrong_way(&c), Err(Error::DegreeTooLow { .. })));
        assert!(matches!(ctx(3, 1).sign_identity_residual(&c), Err(Error::DegreeTooLow { .. })));
    }

    #[test]
    fn window_is_enforced() {
        let c = chain(2, 1, &[(1, &[&[0, -1], &[0, 9]])]);
        assert!(matches!(ctx(2, 1).cap_thom(&c), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn degenerate_tuple_reported() {
        let c = chain(2, 1, &[(1, &[&[0, 0], &[0, 1]])]);
        match ctx(2, 1).cap_thom(&c) {
            Err(Error::DegeneratePosition { vertices }) => assert_eq!(vertices, vec![vec![0, 0], vec![0, 1]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn residual_of_straddling_triangle_matches_hand_expansion() {
        // k = q + 1 = 2: the two sides are
        //   ∂η_*(θ∩x) = θ(x0,x1)·[(x2) - (x1)]
        //   η_*(θ∩∂x) = θ(x1,x2)(x2) - θ(x0,x2)(x2) + θ(x0,x1)(x1)
        let cx = ctx(2, 1);
        let x = chain(2, 2, &[(1, &[&[0, -1], &[1, 2], &[3, 1]])]);
        let th = |a: &[i64], b: &[i64]| cx.thom_on_tuple(&vec![a.to_vec(), b.to_vec()]).unwrap();
        assert_eq!(th(&[0, -1], &[1, 2]), 1);
        assert_eq!(th(&[1, 2], &[3, 1]), 0);
        assert_eq!(th(&[0, -1], &[3, 1]), 1);
        let left = cx.wrong_way(&x).unwrap().boundary().unwrap();
        assert_eq!(left, chain(1, 0, &[(1, &[&[3]]), (-1, &[&[1]])]));
        let right = cx.wrong_way(&x.boundary().unwrap()).unwrap();
        assert_eq!(right, chain(1, 0, &[(-1, &[&[3]]), (1, &[&[1]])]));
        assert!(cx.sign_identity_residual(&x).unwrap().is_zero());
        assert!(cx.obstruction_term(&x).unwrap().is_zero());
    }

    #[test]
    fn residual_away_from_flat_is_zero() {
        let c = chain(3, 3, &[(2, &[&[0, 1, 1], &[1, 2, 1], &[0, 3, 2], &[1, 1, 5]])]);
        assert!(ctx(3, 2).sign_identity_residual(&c).unwrap().is_zero());
    }

    #[test]
    fn mutated_sign_power_breaks_identity() {
        let cx = ctx(2, 1).with_mutation(Some(Mutation::DropSignPower));
        let x = chain(2, 2, &[(1, &[&[0, -1], &[1, 2], &[3, 1]])]);
        assert!(!cx.sign_identity_residual(&x).unwrap().is_zero());
    }

    #[test]
    fn mod2_wrong_way() {
        let c = UfChain::from_terms(
            LatticeSpace::new(2).unwrap(),
            1,
            [(Mod2::ONE, vec![vec![0, 1], vec![0, -1]])],
        )
        .unwrap();
        let out = ctx(2, 1).wrong_way(&c).unwrap();
        assert_eq!(out.coefficient(&[vec![0]]), Some(&Mod2::ONE));
    }

    #[test]
    fn rough_profiles() {
        let w = Window::centered(1, 6);
        let id = rough_map_profile(|p| p.clone(), &w, &[1, 2, 3]);
        for r in 1..=3 {
            assert_eq!(id.expansion(r), Some(r));
            assert_eq!(id.coexpansion(r), Some(r));
        }
        let double = rough_map_profile(|p| vec![2 * p[0]], &w, &[1, 2, 3]);
        for r in 1..=3 {
            assert_eq!(double.expansion(r), Some(2 * r));
        }
        let w2 = Window::centered(2, 4);
        let cx = ctx(2, 1);
        let eta = rough_map_profile(|p| cx.eta(p), &w2, &[1, 2, 3]);
        for r in 1..=3 {
            assert_eq!(eta.expansion(r), Some(r));
        }
    }
}
