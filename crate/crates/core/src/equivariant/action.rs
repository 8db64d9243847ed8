use num_integer::Integer;

use crate::chains::Tuple;
use crate::error::{Error, Result};
use crate::spaces::{LatticeSpace, Point, Window};

/// Free action of a translation lattice `Γ ≤ Z^n` on `Z^n`.
///
/// The generators are brought into Hermite normal form; reducing a point
/// against the echelon rows picks the unique orbit representative whose
/// pivot coordinates satisfy `0 ≤ v_p < b_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TranslationAction {
    space: LatticeSpace,
    generators: Vec<Point>,
    basis: Vec<Point>,
    pivots: Vec<usize>,
}

impl TranslationAction {
    pub fn new(space: LatticeSpace, generators: Vec<Point>) -> Result<Self> {
        for g in &generators {
            space.check_point(g)?;
        }
        let (basis, pivots) = hermite_rows(&generators);
        if basis.len() < generators.len() {
            return Err(Error::DependentGenerators);
        }
        Ok(Self {
            space,
            generators,
            basis,
            pivots,
        })
    }

    /// `Z^n` acting on itself.
    pub fn standard(space: LatticeSpace) -> Self {
        let n = space.dim();
        let generators = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::new(space, generators).expect("standard basis is independent")
    }

    /// `Z^k × {0}^{n-k}`: the standard lattice of the first `k` coordinates.
    pub fn coordinate_sublattice(space: LatticeSpace, k: usize) -> Result<Self> {
        let n = space.dim();
        let generators = (0..k.min(n))
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::new(space, generators)
    }

    pub fn space(&self) -> LatticeSpace {
        self.space
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    /// Echelon basis and pivot columns.
    pub fn basis(&self) -> (&[Point], &[usize]) {
        (&self.basis, &self.pivots)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.space.dim()
    }

    /// Canonical representative of `v` and the translation that reaches it.
    pub fn reduce(&self, v: &[i64]) -> (Point, Point) {
        let mut r = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let k = Integer::div_floor(&r[p], &b[p]);
            if k != 0 {
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= k * y;
                }
            }
        }
        let shift = r.iter().zip(v).map(|(a, b)| a - b).collect();
        (r, shift)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }

    /// Translate a tuple so its first vertex is canonical.
    pub fn normalize(&self, t: &[Point]) -> Tuple {
        let Some(first) = t.first() else {
            return Vec::new();
        };
        let (_, shift) = self.reduce(first);
        t.iter().map(|p| translate(p, &shift)).collect()
    }

    /// The half-open fundamental parallelepiped as a box, for full-rank
    /// lattices.
    pub fn fundamental_domain(&self) -> Result<Window> {
        if !self.is_full_rank() {
            return Err(Error::NotFullRank {
                expected: self.space.dim(),
                found: self.rank(),
            });
        }
        let mut hi = vec![0; self.space.dim()];
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            hi[p] = b[p] - 1;
        }
        Window::new(vec![0; self.space.dim()], hi)
    }

    /// `#{γ ∈ Γ : |γ| ≤ r}`, the uniform properness count (the same around
    /// every point since the action is by translations).
    pub fn properness_count(&self, r: u32) -> usize {
        self.space
            .ball(&vec![0; self.space.dim()], r)
            .map(|ball| ball.iter().filter(|v| self.contains(v)).count())
            .unwrap_or(0)
    }

    /// Whether every element of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &TranslationAction) -> bool {
        self.space == other.space && other.generators.iter().all(|g| self.contains(g))
    }

    /// Same lattice, possibly with different generators.
    pub fn same_lattice(&self, other: &TranslationAction) -> bool {
        self.space == other.space && self.basis == other.basis
    }
}

pub(crate) fn translate(p: &[i64], shift: &[i64]) -> Point {
    p.iter().zip(shift).map(|(a, b)| a + b).collect()
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
fn hermite_rows(rows: &[Point]) -> (Vec<Point>, Vec<usize>) {
    let mut m: Vec<Point> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        loop {
            let Some(best) = (r..m.len())
                .filter(|&i| m[i][col] != 0)
                .min_by_key(|&i| m[i][col].abs())
            else {
                break;
            };
            m.swap(r, best);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][col] != 0 {
                    let k = Integer::div_floor(&m[i][col], &m[r][col]);
                    let pivot_row = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                        *x -= k * y;
                    }
                    if m[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && m[r][col] != 0 {
            if m[r][col] < 0 {
                for x in m[r].iter_mut() {
                    *x = -*x;
                }
            }
            let pivot_row = m[r].clone();
            for i in 0..r {
                let k = Integer::div_floor(&m[i][col], &pivot_row[col]);
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= k * y;
                }
            }
            pivots.push(col);
            r += 1;
        }
    }
    m.truncate(r);
    (m, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> LatticeSpace {
        LatticeSpace::new(n).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let g = TranslationAction::standard(z(2));
        let t = vec![vec![5, 3], vec![6, 3]];
        assert_eq!(g.normalize(&t), vec![vec![0, 0], vec![1, 0]]);
        let canonical = vec![vec![0, 0], vec![1, 0]];
        assert_eq!(g.normalize(&canonical), canonical);
    }

    #[test]
    fn hermite_form_of_skew_lattice() {
        let g = TranslationAction::new(z(2), vec![vec![2, 1], vec![0, 3]]).unwrap();
        let (basis, pivots) = g.basis();
        assert_eq!(pivots, &[0, 1]);
        assert_eq!(basis[0][0], 2);
        assert_eq!(basis[1], vec![0, 3]);
        assert!(g.contains(&[2, 1]));
        assert!(g.contains(&[4, 5]));
        assert!(!g.contains(&[1, 0]));
        let (r, _) = g.reduce(&[7, -4]);
        assert!(r[0] >= 0 && r[0] < 2 && r[1] >= 0 && r[1] < 3);
        assert_eq!(g.fundamental_domain().unwrap().len(), 6);
    }

    #[test]
    fn dependent_generators_rejected() {
        assert_eq!(
            TranslationAction::new(z(2), vec![vec![1, 1], vec![2, 2]]),
            Err(Error::DependentGenerators)
        );
    }

    #[test]
    fn partial_rank_reduction() {
        let lambda = TranslationAction::coordinate_sublattice(z(3), 2).unwrap();
        assert_eq!(lambda.rank(), 2);
        assert!(lambda.fundamental_domain().is_err());
        let (r, shift) = lambda.reduce(&[5, -2, 7]);
        assert_eq!(r, vec![0, 0, 7]);
        assert_eq!(shift, vec![-5, 2, 0]);
        assert!(TranslationAction::standard(z(3)).contains_lattice(&lambda));
        assert!(!lambda.contains_lattice(&TranslationAction::standard(z(3))));
    }

    #[test]
    fn properness_counts() {
        assert_eq!(TranslationAction::standard(z(2)).properness_count(1), 9);
        let sparse = TranslationAction::new(z(2), vec![vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(sparse.properness_count(1), 1);
        assert_eq!(sparse.properness_count(2), 9);
    }
}
