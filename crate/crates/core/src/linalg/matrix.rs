use std::fmt;

use serde::{Deserialize, Serialize};

use super::{LinalgError, Subspace};
use crate::gf::{Elem, FieldRef};

/// Dense row-major matrix over a finite field.
#[derive(Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
    field: FieldRef,
}

/// Serialized form, `{"rows": int, "cols": int, "data": [codes...]}`.
/// The field travels separately with the enclosing artifact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Elem>,
}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    /// Same shape as the input, zero rows last.
    pub canonical: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data && self.field == other.field
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over F_{}", self.rows, self.cols, self.field.q())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &FieldRef, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &FieldRef, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn new(field: &FieldRef, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|&c| !field.contains(c)) {
            return Err(LinalgError::InvalidElement {
                code: data[pos] as u32,
                q: field.q(),
            });
        }
        Ok(Matrix {
            rows,
            cols,
            data,
            field: field.clone(),
        })
    }

    /// Stacks row vectors. All rows must have length `cols`.
    pub fn from_rows(field: &FieldRef, cols: usize, rows: &[Vec<Elem>]) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::ShapeMismatch(format!("row of length {} in a {cols}-column matrix", r.len())));
            }
            data.extend_from_slice(r);
        }
        Self::new(field, rows.len(), cols, data)
    }

    pub fn from_data(field: &FieldRef, d: MatrixData) -> Result<Self, LinalgError> {
        Self::new(field, d.rows, d.cols, d.data)
    }

    pub fn to_data(&self) -> MatrixData {
        MatrixData {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                let orow = other.row(t);
                let base = i * other.cols;
                for (j, &b) in orow.iter().enumerate() {
                    if b != 0 {
                        out.data[base + j] = f.add(out.data[base + j], f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let f = &self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot stack {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
            field: self.field.clone(),
        })
    }

    /// Row band `start..end` as its own matrix.
    pub fn row_band(&self, start: usize, end: usize) -> Matrix {
        Matrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
            field: self.field.clone(),
        }
    }

    /// Unique reduced row-echelon form.
    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pr) = (rank..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(pr, rank);
            let inv = f.inv(m.get(rank, c)).expect("pivot is nonzero");
            m.scale_row(rank, inv);
            for r in 0..m.rows {
                if r != rank {
                    let factor = m.get(r, c);
                    if factor != 0 {
                        m.axpy_row(r, rank, f.neg(factor));
                    }
                }
            }
            pivots.push(c);
            rank += 1;
        }
        Rref {
            canonical: m,
            rank,
            pivots,
        }
    }

    /// Rank by forward elimination only.
    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pr) = (rank..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(pr, rank);
            let inv = f.inv(m.get(rank, c)).expect("pivot is nonzero");
            for r in rank + 1..m.rows {
                let factor = m.get(r, c);
                if factor != 0 {
                    m.axpy_row(r, rank, f.neg(f.mul(factor, inv)));
                }
            }
            rank += 1;
        }
        rank
    }

    /// `{x : self * x = 0}` in canonical form.
    pub fn kernel(&self) -> Subspace {
        let Rref {
            canonical, pivots, ..
        } = self.rref();
        let f = &self.field;
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (t, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(canonical.get(t, free));
            }
            basis.push(v);
        }
        let m = Matrix::from_rows(f, self.cols, &basis).expect("kernel vectors have ambient length");
        Subspace::span(&m)
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let f = &self.field;
        let mut aug = Matrix::zeros(f, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let red = aug.rref();
        if red.pivots.iter().take(n).copied().ne(0..n) || red.rank < n {
            return None;
        }
        let mut inv = Matrix::zeros(f, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.canonical.get(r, n + c));
            }
        }
        Some(inv)
    }

    /// Some `x` with `self * x = b`, or `None` if `b` is outside the column space.
    pub fn solve(&self, b: &[Elem]) -> Option<Vec<Elem>> {
        assert_eq!(b.len(), self.rows, "right-hand side length must match row count");
        let f = &self.field;
        let mut aug = Matrix::zeros(f, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let red = aug.rref();
        if red.pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (t, &p) in red.pivots.iter().enumerate() {
            x[p] = red.canonical.get(t, self.cols);
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, r: usize, s: Elem) {
        let f = self.field.clone();
        for v in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *v = f.mul(*v, s);
        }
    }

    /// `row[dst] += s * row[src]`
    fn axpy_row(&mut self, dst: usize, src: usize, s: Elem) {
        let f = self.field.clone();
        for c in 0..self.cols {
            let v = self.data[src * self.cols + c];
            if v != 0 {
                let d = &mut self.data[dst * self.cols + c];
                *d = f.add(*d, f.mul(s, v));
            }
        }
    }
}
