//! Exact affine geometry on the flat model pair `Z^{n-q} × {0}^q ⊂ Z^n`.
//!
//! The filling of a vertex tuple is the affine simplex spanned by it, so
//! faces of a filling are fillings of faces. The Thom class of the flat
//! normal bundle is represented by the signed crossing number: project a
//! `q`-simplex to the normal coordinates and count, with orientation sign,
//! whether the origin lies inside the projected simplex.
//!
//! In strict mode an origin on the boundary of a projected simplex is an
//! error. In perturbed mode the origin is replaced by the symbolic point
//! `(ε, ε², …, ε^q)` for an infinitesimal `ε > 0`, which never lies on a
//! lower-dimensional face.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::chains::Tuple;
use crate::coeffs::Coefficient;
use crate::error::{Error, Result};
use crate::spaces::Point;

pub type Vector = Vec<BigRational>;

fn rational(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

fn sign_of(x: &BigRational) -> i64 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Affine simplex with ordered vertices in `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSimplex {
    ambient_dim: usize,
    vertices: Vec<Vector>,
}

impl AffineSimplex {
    pub fn new(ambient_dim: usize, vertices: Vec<Vector>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::SimplexDimension { expected: 1, found: 0 });
        }
        for v in &vertices {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
        }
        Ok(Self {
            ambient_dim,
            vertices,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn face(&self, j: usize) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.remove(j);
        Self {
            ambient_dim: self.ambient_dim,
            vertices,
        }
    }

    /// Faces with boundary signs `(-1)^j`.
    pub fn boundary(&self) -> Vec<(i64, Self)> {
        if self.dim() == 0 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|j| (if j % 2 == 0 { 1 } else { -1 }, self.face(j)))
            .collect()
    }

    /// Sup-metric diameter, attained at a pair of vertices by convexity.
    pub fn diameter(&self) -> BigRational {
        let mut best = BigRational::zero();
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                for (x, y) in a.iter().zip(b) {
                    let d = (x - y).abs();
                    if d > best {
                        best = d;
                    }
                }
            }
        }
        best
    }

    /// Point with the given barycentric weights (not required to sum to one).
    pub fn point_at(&self, weights: &[BigRational]) -> Vector {
        let mut out = vec![BigRational::zero(); self.ambient_dim];
        for (w, v) in weights.iter().zip(&self.vertices) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * x;
            }
        }
        out
    }
}

/// Affine filling of a vertex tuple.
pub fn fill(tuple: &[Point]) -> Result<AffineSimplex> {
    let dim = tuple.first().map(Vec::len).ok_or(Error::SimplexDimension { expected: 1, found: 0 })?;
    let vertices = tuple
        .iter()
        .map(|p| p.iter().map(|&c| rational(c)).collect())
        .collect();
    AffineSimplex::new(dim, vertices)
}

/// Determinant by Gaussian elimination over `Q`.
pub fn determinant(rows: &[Vector]) -> BigRational {
    let n = rows.len();
    let mut m: Vec<Vector> = rows.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// Rank of a list of row vectors over `Q`.
pub fn rank(rows: &[Vector]) -> usize {
    let mut m: Vec<Vector> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(pivot, r);
        let p = m[r][col].clone();
        for i in r + 1..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = &m[i][col] / &p;
            for c in col..cols {
                let delta = &factor * &m[r][c];
                m[i][c] -= delta;
            }
        }
        r += 1;
    }
    r
}

/// Sign of the determinant of `q` vectors in `Q^q`.
pub fn orientation_sign(vectors: &[Vector]) -> i64 {
    sign_of(&determinant(vectors))
}

/// `det(w_1 - w_0, …, w_q - w_0)` for `q+1` points of `Q^q`.
fn simplex_volume(points: &[&Vector]) -> BigRational {
    let base = points[0];
    let rows: Vec<Vector> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    determinant(&rows)
}

/// Model pair `N̄ = Z^{n-q} × {0}^q ⊂ Z^n` with the normal frame
/// `(e_{n-q+1}, …, e_n)` declared positive when `orientation = +1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlatPair {
    ambient_dim: usize,
    codim: usize,
    orientation: i64,
}

impl FlatPair {
    pub fn new(ambient_dim: usize, codim: usize) -> Result<Self> {
        if codim == 0 || codim > ambient_dim {
            return Err(Error::InvalidCodimension {
                dim: ambient_dim,
                codim,
            });
        }
        Ok(Self {
            ambient_dim,
            codim,
            orientation: 1,
        })
    }

    pub fn with_orientation(mut self, orientation: i64) -> Self {
        self.orientation = if orientation < 0 { -1 } else { 1 };
        self
    }

    pub fn flipped(self) -> Self {
        self.with_orientation(-self.orientation)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn flat_dim(&self) -> usize {
        self.ambient_dim - self.codim
    }

    pub fn orientation(&self) -> i64 {
        self.orientation
    }

    /// Last `q` coordinates.
    pub fn normal<'a, T>(&self, p: &'a [T]) -> &'a [T] {
        &p[self.flat_dim()..]
    }

    /// First `n - q` coordinates.
    pub fn tangent<'a, T>(&self, p: &'a [T]) -> &'a [T] {
        &p[..self.flat_dim()]
    }

    /// Sup distance from `p` to `N̄`.
    pub fn distance_to_flat(&self, p: &[i64]) -> i64 {
        self.normal(p).iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.distance_to_flat(p) == 0
    }

    /// Nearest point of `N̄` in the ambient coordinates: normal part zeroed.
    pub fn project(&self, p: &[i64]) -> Point {
        let mut out = p.to_vec();
        for c in &mut out[self.flat_dim()..] {
            *c = 0;
        }
        out
    }
}

/// Signed crossing number of a `q`-simplex with the flat, as an integer.
pub fn crossing_number(simplex: &AffineSimplex, pair: &FlatPair, perturb: bool) -> Result<i64> {
    crossing_number_with(simplex, pair, perturb, true)
}

/// `signed = false` drops the determinant sign; only fault injection uses it.
pub(crate) fn crossing_number_with(
    simplex: &AffineSimplex,
    pair: &FlatPair,
    perturb: bool,
    signed: bool,
) -> Result<i64> {
    let q = pair.codim();
    if simplex.ambient_dim() != pair.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.ambient_dim(),
            found: simplex.ambient_dim(),
        });
    }
    if simplex.dim() != q {
        return Err(Error::SimplexDimension {
            expected: q + 1,
            found: simplex.vertices().len(),
        });
    }
    let projected: Vec<Vector> = simplex.vertices().iter().map(|v| pair.normal(v).to_vec()).collect();

    // All vertices strictly on one side of a normal hyperplane.
    for k in 0..q {
        if projected.iter().all(|w| w[k].is_positive()) || projected.iter().all(|w| w[k].is_negative()) {
            return Ok(0);
        }
    }

    let refs: Vec<&Vector> = projected.iter().collect();
    let volume_sign = sign_of(&simplex_volume(&refs));
    let degenerate = || Error::DegeneratePosition {
        vertices: simplex
            .vertices()
            .iter()
            .map(|v| v.iter().map(|x| x.to_integer().try_into().unwrap_or(i64::MAX)).collect())
            .collect(),
    };

    if volume_sign == 0 {
        if perturb {
            return Ok(0);
        }
        let base = &projected[0];
        let mut rows: Vec<Vector> = projected[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let r = rank(&rows);
        rows.push(base.iter().map(|x| -x).collect());
        return if rank(&rows) == r { Err(degenerate()) } else { Ok(0) };
    }

    let origin: Vector = vec![BigRational::zero(); q];
    let mut on_boundary = false;
    for i in 0..=q {
        let barycentric_sign = if perturb {
            perturbed_replacement_sign(&projected, i)
        } else {
            let mut with_origin = refs.clone();
            with_origin[i] = &origin;
            sign_of(&simplex_volume(&with_origin))
        } * volume_sign;
        match barycentric_sign {
            -1 => return Ok(0),
            0 => on_boundary = true,
            _ => {}
        }
    }
    if on_boundary {
        return Err(degenerate());
    }
    let sign = if signed { volume_sign } else { 1 };
    Ok(pair.orientation() * sign)
}

/// Sign of the volume with vertex `i` replaced by `(ε, ε², …, ε^q)`.
///
/// The volume is affine in the replaced point, so it expands as
/// `c_0 + Σ_k c_k ε^k`; its sign is that of the first nonzero `c`.
fn perturbed_replacement_sign(points: &[Vector], i: usize) -> i64 {
    let q = points.len() - 1;
    let mut probe: Vec<Vector> = points.to_vec();
    probe[i] = vec![BigRational::zero(); q];
    let c0 = {
        let refs: Vec<&Vector> = probe.iter().collect();
        simplex_volume(&refs)
    };
    if !c0.is_zero() {
        return sign_of(&c0);
    }
    for k in 0..q {
        probe[i] = vec![BigRational::zero(); q];
        probe[i][k] = BigRational::one();
        let refs: Vec<&Vector> = probe.iter().collect();
        let ck = simplex_volume(&refs) - &c0;
        if !ck.is_zero() {
            return sign_of(&ck);
        }
    }
    // Only reachable when the remaining q points are affinely dependent,
    // which a nondegenerate simplex excludes.
    0
}

/// Thom class evaluated on a `q`-simplex, as a coefficient.
pub fn thom_evaluate<A: Coefficient>(simplex: &AffineSimplex, pair: &FlatPair, perturb: bool) -> Result<A> {
    crossing_number(simplex, pair, perturb).map(A::from_int)
}

/// `Σ_j (-1)^j θ(face_j σ)` for a `(q+1)`-simplex; zero because the crossing
/// cochain is a cocycle.
pub fn cocycle_check<A: Coefficient>(simplex: &AffineSimplex, pair: &FlatPair, perturb: bool) -> Result<A> {
    if simplex.dim() != pair.codim() + 1 {
        return Err(Error::SimplexDimension {
            expected: pair.codim() + 2,
            found: simplex.vertices().len(),
        });
    }
    let mut total = 0i64;
    for (sign, face) in simplex.boundary() {
        total += sign * crossing_number(&face, pair, perturb)?;
    }
    Ok(A::from_int(total))
}

/// Filling of the first `q+1` vertices of a tuple evaluated against the flat.
pub(crate) fn leading_crossing(tuple: &Tuple, pair: &FlatPair, perturb: bool, signed: bool) -> Result<i64> {
    let lead = fill(&tuple[..=pair.codim()])?;
    crossing_number_with(&lead, pair, perturb, signed).map_err(|e| match e {
        Error::DegeneratePosition { .. } => Error::DegeneratePosition { vertices: tuple.clone() },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Mod2;

    fn simplex(points: &[&[i64]]) -> AffineSimplex {
        fill(&points.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn vecs(rows: &[&[i64]]) -> Vec<Vector> {
        rows.iter().map(|r| r.iter().map(|&x| rational(x)).collect()).collect()
    }

    /// Signed sign changes of the normal coordinate along a fine sampling of
    /// the segment.
    fn sampled_crossings_q1(a: i64, b: i64) -> i64 {
        let steps = 997;
        let mut count = 0;
        let f = |t: f64| a as f64 + t * (b - a) as f64;
        for s in 0..steps {
            let (x, y) = (f(s as f64 / steps as f64), f((s + 1) as f64 / steps as f64));
            if x < 0.0 && y > 0.0 {
                count += 1;
            } else if x > 0.0 && y < 0.0 {
                count -= 1;
            }
        }
        count
    }

    /// Winding number of a closed polygon around the origin.
    fn winding(poly: &[(f64, f64)]) -> i64 {
        let mut total = 0.0;
        for i in 0..poly.len() {
            let (x0, y0) = poly[i];
            let (x1, y1) = poly[(i + 1) % poly.len()];
            total += (x0 * y1 - x1 * y0).atan2(x0 * x1 + y0 * y1);
        }
        (total / std::f64::consts::TAU).round() as i64
    }

    #[test]
    fn fill_examples() {
        let seg = simplex(&[&[0], &[1]]);
        assert_eq!(seg.dim(), 1);
        assert_eq!(seg.vertices(), &vecs(&[&[0], &[1]])[..]);
        let tri = simplex(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(tri.dim(), 2);
        assert_eq!(tri.diameter(), rational(1));
    }

    #[test]
    fn fill_commutes_with_faces() {
        let t = vec![vec![0, 0, 1], vec![2, 1, 0], vec![-1, 3, 3], vec![4, 4, -2]];
        let s = fill(&t).unwrap();
        for (j, (sign, face)) in s.boundary().into_iter().enumerate() {
            let mut ft = t.clone();
            ft.remove(j);
            assert_eq!(face, fill(&ft).unwrap());
            assert_eq!(sign, if j % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation_sign(&vecs(&[&[1, 0], &[0, 1]])), 1);
        assert_eq!(orientation_sign(&vecs(&[&[0, 1], &[1, 0]])), -1);
        assert_eq!(orientation_sign(&vecs(&[&[1, 2], &[2, 4]])), 0);
        assert_eq!(determinant(&vecs(&[&[2, 1, 0], &[0, 3, 1], &[1, 0, 1]])), rational(7));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&vecs(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&vecs(&[&[1, 2], &[2, 5]])), 2);
        assert_eq!(rank(&vecs(&[&[0, 0]])), 0);
    }

    #[test]
    fn thom_segment_crossing() {
        let pair = FlatPair::new(2, 1).unwrap();
        let s = simplex(&[&[0, -1], &[0, 1]]);
        assert_eq!(thom_evaluate::<i64>(&s, &pair, false).unwrap(), 1);
        assert_eq!(sampled_crossings_q1(-1, 1), 1);
        let back = simplex(&[&[0, 1], &[0, -1]]);
        assert_eq!(thom_evaluate::<i64>(&back, &pair, false).unwrap(), -1);
        assert_eq!(thom_evaluate::<i64>(&s, &pair.flipped(), false).unwrap(), -1);
        assert_eq!(thom_evaluate::<Mod2>(&back, &pair, false).unwrap(), Mod2::ONE);
    }

    #[test]
    fn thom_matches_sampling_oracle_in_codim_one() {
        let pair = FlatPair::new(2, 1).unwrap();
        for a in -4..=4 {
            for b in -4..=4 {
                if a == 0 || b == 0 {
                    continue;
                }
                let s = simplex(&[&[3, a], &[-2, b]]);
                assert_eq!(crossing_number(&s, &pair, false).unwrap(), sampled_crossings_q1(a, b), "{a} {b}");
            }
        }
    }

    #[test]
    fn thom_no_crossing() {
        let pair = FlatPair::new(2, 1).unwrap();
        assert_eq!(thom_evaluate::<i64>(&simplex(&[&[1, 2], &[3, 5]]), &pair, false).unwrap(), 0);
    }

    #[test]
    fn thom_codim_two_triangle() {
        let pair = FlatPair::new(3, 2).unwrap();
        let s = simplex(&[&[0, 1, 0], &[0, -1, 1], &[0, -1, -1]]);
        assert_eq!(thom_evaluate::<i64>(&s, &pair, false).unwrap(), 1);
        assert_eq!(winding(&[(1.0, 0.0), (-1.0, 1.0), (-1.0, -1.0)]), 1);
        assert_eq!(orientation_sign(&vecs(&[&[-2, 1], &[-2, -1]])), 1);
    }

    #[test]
    fn thom_matches_winding_oracle_in_codim_two() {
        let pair = FlatPair::new(3, 2).unwrap();
        let coords = [-2i64, -1, 1, 3];
        let mut checked = 0;
        for &a in &coords {
            for &b in &coords {
                for &c in &coords {
                    for &d in &coords {
                        let (p0, p1, p2) = ((a, b), (c, d), (b - c, a + d));
                        let s = simplex(&[&[5, p0.0, p0.1], &[0, p1.0, p1.1], &[1, p2.0, p2.1]]);
                        let Ok(value) = crossing_number(&s, &pair, false) else {
                            continue;
                        };
                        let poly = [p0, p1, p2].map(|(x, y)| (x as f64, y as f64));
                        assert_eq!(value, winding(&poly));
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn thom_degenerate_endpoint() {
        let pair = FlatPair::new(2, 1).unwrap();
        let s = simplex(&[&[0, 0], &[1, 0]]);
        assert!(matches!(
            thom_evaluate::<i64>(&s, &pair, false),
            Err(Error::DegeneratePosition { .. })
        ));
        let touching = simplex(&[&[0, 0], &[1, 3]]);
        assert!(thom_evaluate::<i64>(&touching, &pair, false).is_err());
    }

    #[test]
    fn thom_degenerate_projection_with_origin_in_hull() {
        let pair = FlatPair::new(3, 2).unwrap();
        let s = simplex(&[&[0, 1, 1], &[0, -1, -1], &[0, 2, 2]]);
        assert!(thom_evaluate::<i64>(&s, &pair, false).is_err());
        let off = simplex(&[&[0, 1, 2], &[0, -1, 0], &[0, 3, 4]]);
        assert_eq!(thom_evaluate::<i64>(&off, &pair, false).unwrap(), 0);
    }

    #[test]
    fn perturbation_resolves_boundary_cases() {
        let pair = FlatPair::new(2, 1).unwrap();
        // The flat sits at normal height +ε.
        assert_eq!(crossing_number(&simplex(&[&[0, 0], &[1, 1]]), &pair, true).unwrap(), 1);
        assert_eq!(crossing_number(&simplex(&[&[0, 0], &[1, -1]]), &pair, true).unwrap(), 0);
        assert_eq!(crossing_number(&simplex(&[&[0, 1], &[1, 0]]), &pair, true).unwrap(), -1);
        assert_eq!(crossing_number(&simplex(&[&[0, 0], &[1, 0]]), &pair, true).unwrap(), 0);
        let pair2 = FlatPair::new(2, 2).unwrap();
        let s = simplex(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(crossing_number(&s, &pair2, true).unwrap(), 1);
    }

    #[test]
    fn cocycle_examples() {
        let pair = FlatPair::new(2, 1).unwrap();
        let tri = simplex(&[&[0, -1], &[2, -1], &[1, 2]]);
        assert_eq!(cocycle_check::<i64>(&tri, &pair, false).unwrap(), 0);
        // faces: (2,-1)->(1,2) crosses up, (0,-1)->(1,2) crosses up, (0,-1)->(2,-1) none
        assert_eq!(crossing_number(&tri.face(0), &pair, false).unwrap(), 1);
        assert_eq!(crossing_number(&tri.face(1), &pair, false).unwrap(), 1);
        assert_eq!(crossing_number(&tri.face(2), &pair, false).unwrap(), 0);
        let above = simplex(&[&[0, 1], &[2, 3], &[1, 2]]);
        assert_eq!(cocycle_check::<i64>(&above, &pair, false).unwrap(), 0);
        assert!(cocycle_check::<i64>(&simplex(&[&[0, 1], &[2, 3]]), &pair, false).is_err());
    }

    #[test]
    fn mismatched_dimensions() {
        let pair = FlatPair::new(3, 1).unwrap();
        assert!(matches!(
            crossing_number(&simplex(&[&[0, 1], &[0, -1]]), &pair, false),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(FlatPair::new(2, 0).is_err());
        assert!(FlatPair::new(2, 3).is_err());
    }

    #[test]
    fn flat_pair_projections() {
        let pair = FlatPair::new(3, 1).unwrap();
        assert_eq!(pair.normal(&[1, 2, 3]), &[3]);
        assert_eq!(pair.tangent(&[1, 2, 3]), &[1, 2]);
        assert_eq!(pair.project(&[1, 2, 3]), vec![1, 2, 0]);
        assert_eq!(pair.distance_to_flat(&[1, 2, -7]), 7);
    }
}
