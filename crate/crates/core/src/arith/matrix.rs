//! Dense matrices over a single field.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use super::field::{Field, FieldElement, Valuation};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = f(i, j);
                assert_eq!(x.field(), field, "matrix entry from another field");
                data.push(x);
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Builds from row vectors; all entries must lie in `field`.
    pub fn from_rows(field: Field, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch(c, row.len()));
            }
            for x in row {
                if x.field() != field {
                    return Err(Error::FieldMismatch(field, x.field()));
                }
                data.push(x);
            }
        }
        Ok(Matrix {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::from_fn(field, r, c, |i, j| {
            FieldElement::from_i64(field, rows[i][j])
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix::from_fn(field, rows, cols, |_, _| FieldElement::zero(field))
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Matrix::from_fn(field, n, n, |i, j| {
            FieldElement::from_i64(field, (i == j) as i64)
        })
    }

    pub fn diagonal(field: Field, diag: &[FieldElement]) -> Self {
        let n = diag.len();
        Matrix::from_fn(field, n, n, |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                FieldElement::zero(field)
            }
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, cols: &[Vec<FieldElement>]) -> Self {
        let r = cols.first().map_or(0, Vec::len);
        Matrix::from_fn(field, r, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| {
            self[(j, i)].clone()
        })
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.field, o.field, "mixed-field product");
        assert_eq!(self.cols, o.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let t = a * b;
                    out[(i, j)] = &out[(i, j)] + &t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = FieldElement::zero(self.field);
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &Matrix, f: impl Fn(&FieldElement, &FieldElement) -> FieldElement) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        assert_eq!(self.field, o.field, "mixed-field arithmetic");
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| f(a, b))
            .collect();
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        self.map(|x| x * c)
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Matrix {
        let mut acc = Matrix::identity(self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn trace(&self) -> FieldElement {
        let mut acc = FieldElement::zero(self.field);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + &self[(i, i)];
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    /// Largest absolute entry (for reals), used to scale tolerances.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(FieldElement::abs).fold(0.0, f64::max)
    }

    /// Minimal valuation over all entries; errors on real matrices.
    pub fn min_valuation(&self) -> Result<Valuation> {
        let mut best = Valuation::Infinite;
        for x in &self.data {
            best = best.min(x.valuation()?);
        }
        Ok(best)
    }

    pub fn valuations(&self) -> Result<Vec<Vec<Valuation>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].valuation()).collect())
            .collect()
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Matrix::from_fn(self.field, r1 - r0, c1 - c0, |i, j| {
            self[(r0 + i, c0 + j)].clone()
        })
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn block_diagonal(field: Field, blocks: &[Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(field, n, n);
        let mut off = 0;
        for b in blocks {
            out.set_block(off, off, b);
            off += b.rows;
        }
        out
    }

    /// Converts a real matrix to nalgebra form.
    pub fn to_dmatrix(&self) -> Result<DMatrix<f64>> {
        if !self.field.is_real() {
            return Err(Error::NotRealField);
        }
        Ok(DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].as_real().unwrap()
        }))
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Matrix {
        Matrix::from_fn(Field::Real, m.nrows(), m.ncols(), |i, j| {
            FieldElement::Real(m[(i, j)])
        })
    }

    /// Same shape and entries within `tol` (exact equality for exact fields).
    pub fn approx_eq(&self, o: &Matrix, tol: f64) -> bool {
        if (self.rows, self.cols, self.field) != (o.rows, o.cols, o.field) {
            return false;
        }
        self.data.iter().zip(&o.data).all(|(a, b)| match (a, b) {
            (FieldElement::Real(x), FieldElement::Real(y)) => (x - y).abs() <= tol,
            _ => a == b,
        })
    }

    pub fn encode(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].encode()).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElement;
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
