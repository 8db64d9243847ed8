use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::FlatPair;
use crate::spaces::{LatticeSpace, Window};
use crate::verify::Mutation;
use crate::wrongway::WrongWayContext;

use super::action::TranslationAction;
use super::chain::{equivariant_wrong_way, kuhn_fundamental_cycle, restrict_equivariance, EquivariantChain};
use super::quotient::{build_quotient_complex, identify_class};

/// Outcome of carrying `[T^n]` to `H_{n-q}(T^{n-q})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransportReport {
    pub n: usize,
    pub q: usize,
    pub orientation: i64,
    pub strip_orbits: usize,
    pub image_orbits: usize,
    pub class: Vec<i64>,
}

/// Applies `(t, ν) ↦ (t, Sν)` to every vertex. `S` must be unimodular so
/// the lattice and the flat are preserved.
pub fn shear_normal<A: crate::coeffs::Coefficient>(
    c: &EquivariantChain<A>,
    pair: &FlatPair,
    shear: &[Vec<i64>],
) -> Result<EquivariantChain<A>> {
    let q = pair.codim();
    if shear.len() != q || shear.iter().any(|row| row.len() != q) {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: shear.len(),
        });
    }
    let flat = pair.flat_dim();
    let apply = |p: &Vec<i64>| {
        let mut out = p.clone();
        for (i, row) in shear.iter().enumerate() {
            out[flat + i] = row.iter().zip(&p[flat..]).map(|(a, b)| a * b).sum();
        }
        out
    };
    EquivariantChain::from_orbits(
        c.action().clone(),
        c.degree(),
        c.orbits().map(|(t, a)| (a.clone(), t.iter().map(apply).collect())),
    )
}

/// Determinant of a small integer matrix by cofactor expansion.
pub(crate) fn small_determinant(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * small_determinant(&minor)
            })
            .sum(),
    }
}

/// Kuhn cycle of `T^n`, restricted to `Z^{n-q} × 0`-equivariance within
/// `radius` of the flat, pushed through the wrong-way map and identified in
/// the quotient complex of `T^{n-q}`.
pub fn transport_fundamental_class(pair: FlatPair, radius: i64, r_max: i64) -> Result<TransportReport> {
    transport_with(pair, radius, r_max, None, None)
}

/// As [`transport_fundamental_class`], with the strip sheared in its normal
/// coordinates before filling; the orientation is corrected by `det S`, so
/// only the filling changes.
pub fn transport_sheared(pair: FlatPair, radius: i64, r_max: i64, shear: &[Vec<i64>]) -> Result<TransportReport> {
    transport_with(pair, radius, r_max, Some(shear), None)
}

pub(crate) fn transport_with(
    pair: FlatPair,
    radius: i64,
    r_max: i64,
    shear: Option<&[Vec<i64>]>,
    mutation: Option<Mutation>,
) -> Result<TransportReport> {
    let (n, q) = (pair.ambient_dim(), pair.codim());
    let space = LatticeSpace::new(n)?;
    let lambda = TranslationAction::coordinate_sublattice(space, n - q)?;
    let mut strip = restrict_equivariance(&kuhn_fundamental_cycle(n)?, &lambda, &pair, radius)?;
    let mut effective = pair;
    if let Some(s) = shear {
        strip = shear_normal(&strip, &pair, s)?;
        let det = small_determinant(s);
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { det });
        }
        effective = pair.with_orientation(pair.orientation() * det);
    }
    let ctx = WrongWayContext::new(effective, Window::centered(n, radius), true)?.with_mutation(mutation);
    let image = equivariant_wrong_way(&strip, &ctx)?;
    let complex = build_quotient_complex(image.action(), r_max, 0..n - q + 2)?;
    let class = identify_class(&image, &complex)?;
    Ok(TransportReport {
        n,
        q,
        orientation: pair.orientation(),
        strip_orbits: strip.len(),
        image_orbits: image.len(),
        class,
    })
}
