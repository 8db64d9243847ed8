//! Dense integer matrices and Smith normal form.

use num_integer::Integer;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = a.checked_mul(b).and_then(|p| p.checked_add(out.get(i, j))).ok_or(Error::Overflow)?;
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (a, b)| {
                    a.checked_mul(*b).and_then(|p| acc.checked_add(p)).ok_or(Error::Overflow)
                })
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += k · row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s != 0 {
                let v = s.checked_mul(k).and_then(|p| p.checked_add(self.get(dst, j))).ok_or(Error::Overflow)?;
                self.set(dst, j, v);
            }
        }
        Ok(())
    }

    /// `col[dst] += k · col[src]`
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s != 0 {
                let v = s.checked_mul(k).and_then(|p| p.checked_add(self.get(i, dst))).ok_or(Error::Overflow)?;
                self.set(i, dst, v);
            }
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = self.get(i, j);
            self.set(i, j, -v);
        }
    }
}

/// `left · A · right = diag(invariants, 0, …)` with `invariants[i] | invariants[i+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub invariants: Vec<i64>,
    pub left: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    pub fn torsion(&self) -> Vec<i64> {
        self.invariants.iter().copied().filter(|&d| d > 1).collect()
    }
}

struct Reducer {
    a: IntMatrix,
    left: Option<IntMatrix>,
    right: Option<IntMatrix>,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some(u) = &mut self.left {
            u.swap_rows(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some(v) = &mut self.right {
            v.swap_cols(i, j);
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        self.a.add_row_multiple(dst, src, k)?;
        if let Some(u) = &mut self.left {
            u.add_row_multiple(dst, src, k)?;
        }
        Ok(())
    }

    fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        self.a.add_col_multiple(dst, src, k)?;
        if let Some(v) = &mut self.right {
            v.add_col_multiple(dst, src, k)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some(u) = &mut self.left {
            u.negate_row(i);
        }
    }

    fn smallest_from(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let v = self.a.get(i, j).abs();
                if v != 0 && best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((i, j, v));
                    if v == 1 {
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Clears row and column `t` outside the pivot; returns false if a
    /// smaller remainder appeared and the pivot must be re-chosen.
    fn clear_cross(&mut self, t: usize) -> Result<bool> {
        let p = self.a.get(t, t);
        let mut clean = true;
        for i in t + 1..self.a.rows {
            let v = self.a.get(i, t);
            if v != 0 {
                self.add_row(i, t, -Integer::div_floor(&v, &p))?;
                if self.a.get(i, t) != 0 {
                    clean = false;
                }
            }
        }
        for j in t + 1..self.a.cols {
            let v = self.a.get(t, j);
            if v != 0 {
                self.add_col(j, t, -Integer::div_floor(&v, &p))?;
                if self.a.get(t, j) != 0 {
                    clean = false;
                }
            }
        }
        Ok(clean)
    }

    fn run(mut self) -> Result<SmithForm> {
        let mut invariants = Vec::new();
        let mut t = 0;
        while t < self.a.rows.min(self.a.cols) {
            let Some((i, j)) = self.smallest_from(t) else {
                break;
            };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            if !self.clear_cross(t)? {
                continue;
            }
            let p = self.a.get(t, t);
            let offender = (t + 1..self.a.rows).find(|&i| (t + 1..self.a.cols).any(|j| self.a.get(i, j) % p != 0));
            if let Some(i) = offender {
                self.add_row(t, i, 1)?;
                continue;
            }
            if p < 0 {
                self.negate_row(t);
            }
            invariants.push(self.a.get(t, t));
            t += 1;
        }
        Ok(SmithForm {
            invariants,
            left: self.left,
            right: self.right,
        })
    }
}

/// Smith normal form of `a`, optionally with the unimodular transforms.
pub fn smith_normal_form(a: &IntMatrix, with_transforms: bool) -> Result<SmithForm> {
    let reducer = Reducer {
        a: a.clone(),
        left: with_transforms.then(|| IntMatrix::identity(a.rows)),
        right: with_transforms.then(|| IntMatrix::identity(a.cols)),
    };
    reducer.run()
}
