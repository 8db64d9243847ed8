use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use serde::Serialize;

use crate::chains::{tuple_faces, Tuple};
use crate::error::{Error, Result};
use crate::spaces::{sup_distance, Point};

use super::action::TranslationAction;
use super::chain::EquivariantChain;
use super::snf::{smith_normal_form, IntMatrix, SmithForm};

/// Orbits of lexicographically non-decreasing tuples of spread at most
/// `r_max`, with integer boundary matrices between consecutive degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientComplex {
    action: TranslationAction,
    r_max: i64,
    degrees: Range<usize>,
    bases: Vec<Vec<Tuple>>,
    index: Vec<HashMap<Tuple, usize>>,
    /// `boundaries[i]` maps degree `degrees.start + i + 1` to the degree below.
    boundaries: Vec<IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub degree: usize,
    pub betti: usize,
    pub torsion: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<i64>>,
}

pub fn build_quotient_complex(action: &TranslationAction, r_max: i64, degrees: Range<usize>) -> Result<QuotientComplex> {
    if r_max < 1 {
        return Err(Error::RadiusTooSmall {
            radius: r_max,
            propagation: 1,
        });
    }
    let domain = action.fundamental_domain()?.points();
    let space = action.space();
    let mut bases = Vec::new();
    for d in degrees.clone() {
        let mut basis = BTreeSet::new();
        for x0 in &domain {
            let mut ball = space.ball(x0, r_max as u32)?;
            ball.retain(|p| p >= x0);
            ball.sort();
            extend(&mut vec![x0.clone()], d + 1, &ball, r_max, &mut basis);
        }
        bases.push(basis.into_iter().collect::<Vec<_>>());
    }
    let index: Vec<HashMap<Tuple, usize>> = bases
        .iter()
        .map(|b| b.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect())
        .collect();
    let mut boundaries = Vec::new();
    for i in 1..bases.len() {
        let d = degrees.start + i;
        let mut m = IntMatrix::zeros(bases[i - 1].len(), bases[i].len());
        for (col, t) in bases[i].iter().enumerate() {
            for (sign, face) in tuple_faces(t) {
                let face = action.normalize(&face);
                let row = *index[i - 1].get(&face).ok_or_else(|| Error::NotRepresentable {
                    degree: d - 1,
                    tuple: face.clone(),
                })?;
                m.add_to(row, col, sign);
            }
        }
        boundaries.push(m);
    }
    Ok(QuotientComplex {
        action: action.clone(),
        r_max,
        degrees,
        bases,
        index,
        boundaries,
    })
}

fn extend(prefix: &mut Vec<Point>, len: usize, ball: &[Point], r_max: i64, out: &mut BTreeSet<Tuple>) {
    if prefix.len() == len {
        out.insert(prefix.clone());
        return;
    }
    let last = prefix.last().expect("prefix starts with the first vertex").clone();
    for p in ball {
        if *p >= last && prefix.iter().all(|x| sup_distance(x, p) <= r_max) {
            prefix.push(p.clone());
            extend(prefix, len, ball, r_max, out);
            prefix.pop();
        }
    }
}

impl QuotientComplex {
    pub fn action(&self) -> &TranslationAction {
        &self.action
    }

    pub fn r_max(&self) -> i64 {
        self.r_max
    }

    pub fn degrees(&self) -> Range<usize> {
        self.degrees.clone()
    }

    pub fn basis(&self, degree: usize) -> Result<&[Tuple]> {
        let i = self.offset(degree)?;
        Ok(&self.bases[i])
    }

    pub fn basis_sizes(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// The matrix of `∂_degree`, rows indexed by the basis of `degree - 1`.
    pub fn boundary_matrix(&self, degree: usize) -> Result<&IntMatrix> {
        let i = self.offset(degree)?;
        if i == 0 {
            return Err(Error::DegreeOutOfRange { degree });
        }
        Ok(&self.boundaries[i - 1])
    }

    pub(crate) fn transpose_boundary(&mut self, degree: usize) -> Result<()> {
        let i = self.offset(degree)?;
        if i == 0 {
            return Err(Error::DegreeOutOfRange { degree });
        }
        self.boundaries[i - 1] = self.boundaries[i - 1].transpose();
        Ok(())
    }

    fn offset(&self, degree: usize) -> Result<usize> {
        if self.degrees.contains(&degree) {
            Ok(degree - self.degrees.start)
        } else {
            Err(Error::DegreeOutOfRange { degree })
        }
    }

    /// Shapes match the bases and consecutive boundaries compose to zero.
    pub fn check(&self) -> Result<()> {
        for (i, m) in self.boundaries.iter().enumerate() {
            let d = self.degrees.start + i + 1;
            if m.rows() != self.bases[i].len() || m.cols() != self.bases[i + 1].len() {
                return Err(Error::NotAComplex { degree: d });
            }
        }
        for (i, pair) in self.boundaries.windows(2).enumerate() {
            let d = self.degrees.start + i + 2;
            let product = pair[0].mul(&pair[1]).map_err(|_| Error::NotAComplex { degree: d })?;
            if !product.is_zero() {
                return Err(Error::NotAComplex { degree: d });
            }
        }
        Ok(())
    }

    /// Degrees whose homology is determined by the stored matrices.
    pub fn homology_degrees(&self) -> Range<usize> {
        let start = if self.degrees.start == 0 { 0 } else { self.degrees.start + 1 };
        start..self.degrees.end.saturating_sub(1).max(start)
    }

    /// Coordinates of a cycle in the basis of its degree.
    pub fn coordinates(&self, cycle: &EquivariantChain<i64>) -> Result<Vec<i64>> {
        if !cycle.action().same_lattice(&self.action) {
            return Err(Error::IncompatibleSubgroup);
        }
        let i = self.offset(cycle.degree())?;
        let mut z = vec![0; self.bases[i].len()];
        for (t, a) in cycle.orbits() {
            let row = *self.index[i].get(t).ok_or_else(|| Error::NotRepresentable {
                degree: cycle.degree(),
                tuple: t.clone(),
            })?;
            z[row] = *a;
        }
        Ok(z)
    }
}

fn smith_of(m: &IntMatrix, transposed: bool, with_transforms: bool) -> Result<SmithForm> {
    if transposed {
        smith_normal_form(&m.transpose(), with_transforms)
    } else {
        smith_normal_form(m, with_transforms)
    }
}

fn homology_with(complex: &QuotientComplex, transposed: bool) -> Result<Vec<HomologyReport>> {
    complex.check()?;
    let mut reports = Vec::new();
    for d in complex.homology_degrees() {
        let dim = complex.basis(d)?.len();
        let rank_in = if d == 0 {
            0
        } else {
            smith_of(complex.boundary_matrix(d)?, transposed, false)?.rank()
        };
        let out = smith_of(complex.boundary_matrix(d + 1)?, transposed, false)?;
        reports.push(HomologyReport {
            degree: d,
            betti: dim - rank_in - out.rank(),
            torsion: out.torsion(),
            class: None,
        });
    }
    Ok(reports)
}

pub fn snf_homology(complex: &QuotientComplex) -> Result<Vec<HomologyReport>> {
    homology_with(complex, false)
}

/// The same computation on transposed boundary matrices, an independent
/// Smith normal form run for cross-checking.
pub fn snf_homology_transposed(complex: &QuotientComplex) -> Result<Vec<HomologyReport>> {
    homology_with(complex, true)
}

/// Homology coordinates of a cycle: free coordinates first, then residues
/// for each torsion summand.
///
/// With `U ∂_{d+1} V = D` of rank `r`, a chain `z` has `y = U z`. Cycles
/// modulo boundaries embed in `⊕ Z/d_i ⊕ Z^{m-r}` via `y`, and the image of
/// the cycles in the free part is the lattice spanned by the tails of
/// `U K` for a kernel basis `K` of `∂_d`; its own Smith form gives the
/// basis used for the free coordinates.
pub fn identify_class(cycle: &EquivariantChain<i64>, complex: &QuotientComplex) -> Result<Vec<i64>> {
    complex.check()?;
    let d = cycle.degree();
    if !complex.homology_degrees().contains(&d) {
        return Err(Error::DegreeOutOfRange { degree: d });
    }
    let z = complex.coordinates(cycle)?;
    let m = z.len();
    let kernel = if d == 0 {
        IntMatrix::identity(m)
    } else {
        let a = complex.boundary_matrix(d)?;
        if a.mul_vec(&z)?.iter().any(|&x| x != 0) {
            return Err(Error::NotACycle);
        }
        let snf = smith_normal_form(a, true)?;
        let v = snf.right.expect("transforms requested");
        let cols: Vec<Vec<i64>> = (snf.invariants.len()..m).map(|j| v.column(j)).collect();
        columns_to_matrix(m, &cols)
    };
    let b = smith_normal_form(complex.boundary_matrix(d + 1)?, true)?;
    let u = b.left.as_ref().expect("transforms requested");
    let r = b.rank();
    let y = u.mul_vec(&z)?;
    let uk = u.mul(&kernel)?;
    let tail_rows: Vec<Vec<i64>> = (r..m).map(|i| uk.row(i).to_vec()).collect();
    let p = IntMatrix::from_rows(&tail_rows);
    let mut class = Vec::new();
    if p.rows() > 0 && p.cols() > 0 {
        let lattice = smith_normal_form(&p, true)?;
        let u2 = lattice.left.as_ref().expect("transforms requested");
        let w = u2.mul_vec(&y[r..])?;
        for (i, &di) in lattice.invariants.iter().enumerate() {
            if w[i] % di != 0 {
                return Err(Error::NotACycle);
            }
            class.push(w[i] / di);
        }
    }
    for (i, &di) in b.invariants.iter().enumerate() {
        if di > 1 {
            class.push(y[i].rem_euclid(di));
        }
    }
    Ok(class)
}

fn columns_to_matrix(rows: usize, cols: &[Vec<i64>]) -> IntMatrix {
    let mut out = IntMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            out.set(i, j, x);
        }
    }
    out
}

/// Betti numbers of the quotient torus `Z^n / Z^n` at spread one, degrees
/// `0..=n`.
pub fn torus_homology(n: usize, r_max: i64) -> Result<(QuotientComplex, Vec<HomologyReport>)> {
    let space = crate::spaces::LatticeSpace::new(n)?;
    let action = TranslationAction::standard(space);
    let complex = build_quotient_complex(&action, r_max, 0..n + 2)?;
    let reports = snf_homology(&complex)?;
    Ok((complex, reports))
}
