//! Row reduction, kernels, inverses and determinants.

use super::field::{cmp_abs, Field, FieldElement};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Relative pivot tolerance for real matrices.
pub const REAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// Basis of the right kernel, one vector per free column.
    pub kernel: Vec<Vec<FieldElement>>,
}

/// Reduced row echelon form.
pub fn rref(m: &Matrix) -> Rref {
    rref_tol(m, REAL_TOL)
}

/// Reduced row echelon form; real entries below `rel_tol` times the largest
/// absolute entry count as zero.
pub fn rref_tol(m: &Matrix, rel_tol: f64) -> Rref {
    let field = m.field();
    let tol = if field.is_real() {
        rel_tol * m.max_abs()
    } else {
        0.0
    };
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pick = if field.is_real() {
            (r..rows)
                .max_by(|&i, &j| cmp_abs(&a[(i, c)], &a[(j, c)]))
                .filter(|&i| !a[(i, c)].is_negligible(tol))
        } else {
            (r..rows).find(|&i| !a[(i, c)].is_zero())
        };
        let Some(pr) = pick else {
            if field.is_real() {
                for i in r..rows {
                    a[(i, c)] = FieldElement::zero(field);
                }
            }
            continue;
        };
        if pr != r {
            for j in 0..cols {
                let tmp = a[(r, j)].clone();
                a[(r, j)] = a[(pr, j)].clone();
                a[(pr, j)] = tmp;
            }
        }
        let inv = a[(r, c)].inv().expect("nonzero pivot");
        for j in c..cols {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in c..cols {
                if a[(r, j)].is_zero() {
                    continue;
                }
                let t = &factor * &a[(r, j)];
                a[(i, j)] = &a[(i, j)] - &t;
                if field.is_real() && a[(i, j)].is_negligible(tol) {
                    a[(i, j)] = FieldElement::zero(field);
                }
            }
            a[(i, c)] = FieldElement::zero(field);
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    let mut kernel = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![FieldElement::zero(field); cols];
        v[free] = FieldElement::one(field);
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -&a[(row, free)];
        }
        kernel.push(v);
    }
    Rref {
        reduced: a,
        rank,
        pivots,
        kernel,
    }
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).rank
}

pub fn kernel(m: &Matrix) -> Vec<Vec<FieldElement>> {
    rref(m).kernel
}

/// Determinant by Gaussian elimination.
pub fn det(m: &Matrix) -> FieldElement {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let field = m.field();
    let n = m.rows();
    let mut a = m.clone();
    let mut acc = FieldElement::one(field);
    for c in 0..n {
        let pick = if field.is_real() {
            (c..n)
                .max_by(|&i, &j| cmp_abs(&a[(i, c)], &a[(j, c)]))
                .filter(|&i| !a[(i, c)].is_zero())
        } else {
            (c..n).find(|&i| !a[(i, c)].is_zero())
        };
        let Some(pr) = pick else {
            return FieldElement::zero(field);
        };
        if pr != c {
            for j in 0..n {
                let tmp = a[(c, j)].clone();
                a[(c, j)] = a[(pr, j)].clone();
                a[(pr, j)] = tmp;
            }
            acc = -acc;
        }
        let piv = a[(c, c)].clone();
        acc = &acc * &piv;
        let inv = piv.inv().unwrap();
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let factor = &a[(i, c)] * &inv;
            for j in c..n {
                let t = &factor * &a[(c, j)];
                a[(i, j)] = &a[(i, j)] - &t;
            }
        }
    }
    acc
}

/// Inverse; `Singular` when the matrix is not invertible (reals: rank deficient
/// at the relative pivot tolerance).
pub fn invert(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.rows(), m.cols()));
    }
    let n = m.rows();
    let field = m.field();
    if field.is_real() {
        if m.max_abs() == 0.0 || rref(m).rank < n {
            return Err(Error::Singular);
        }
        let inv = m.to_dmatrix()?.try_inverse().ok_or(Error::Singular)?;
        return Ok(Matrix::from_dmatrix(&inv));
    }
    let mut aug = Matrix::zeros(field, n, 2 * n);
    aug.set_block(0, 0, m);
    aug.set_block(0, n, &Matrix::identity(field, n));
    let r = rref(&aug);
    if r.pivots.iter().take(n).enumerate().any(|(i, &c)| c != i) || r.rank < n {
        return Err(Error::Singular);
    }
    Ok(r.reduced.submatrix(0, n, n, 2 * n))
}

/// Solves `a x = b`. Returns a particular solution and a kernel basis, or
/// `None` when the system is inconsistent.
pub fn solve_affine(
    a: &Matrix,
    b: &[FieldElement],
) -> Option<(Vec<FieldElement>, Vec<Vec<FieldElement>>)> {
    assert_eq!(a.rows(), b.len());
    let field = a.field();
    let (rows, cols) = (a.rows(), a.cols());
    let mut aug = Matrix::zeros(field, rows, cols + 1);
    aug.set_block(0, 0, a);
    for (i, x) in b.iter().enumerate() {
        aug[(i, cols)] = x.clone();
    }
    let r = rref(&aug);
    if r.pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![FieldElement::zero(field); cols];
    for (row, &pc) in r.pivots.iter().enumerate() {
        x[pc] = r.reduced[(row, cols)].clone();
    }
    let kernel = r
        .kernel
        .into_iter()
        .filter(|v| v[cols].is_zero())
        .map(|mut v| {
            v.truncate(cols);
            v
        })
        .collect();
    Some((x, kernel))
}

/// Row-reduced basis of the span of `vectors` (all of length `dim`).
pub fn span_basis(
    field: Field,
    dim: usize,
    vectors: &[Vec<FieldElement>],
) -> Vec<Vec<FieldElement>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_fn(field, vectors.len(), dim, |i, j| vectors[i][j].clone());
    let r = rref(&m);
    (0..r.rank).map(|i| r.reduced.row(i)).collect()
}

/// Whether `v` lies in the span of the rows of `basis`.
pub fn in_span(field: Field, basis: &[Vec<FieldElement>], v: &[FieldElement]) -> bool {
    let dim = v.len();
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    span_basis(field, dim, &all).len() == span_basis(field, dim, basis).len()
}

/// Annihilator of a row space: all x with u·x = 0 for every basis row u.
pub fn annihilator(
    field: Field,
    dim: usize,
    basis: &[Vec<FieldElement>],
) -> Vec<Vec<FieldElement>> {
    if basis.is_empty() {
        return (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| FieldElement::from_i64(field, (i == j) as i64))
                    .collect()
            })
            .collect();
    }
    let m = Matrix::from_fn(field, basis.len(), dim, |i, j| basis[i][j].clone());
    span_basis(field, dim, &kernel(&m))
}

/// Coordinates of `v` with respect to the row basis `basis`, if `v` lies in its span.
pub fn coordinates(
    field: Field,
    basis: &[Vec<FieldElement>],
    v: &[FieldElement],
) -> Option<Vec<FieldElement>> {
    let cols: Vec<Vec<FieldElement>> = basis.to_vec();
    let a = Matrix::from_columns(field, &cols);
    let (x, ker) = solve_affine(&a, v)?;
    debug_assert!(ker.is_empty() || field.is_real());
    Some(x)
}

pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let field = a[0].field();
    a.iter()
        .zip(b)
        .fold(FieldElement::zero(field), |acc, (x, y)| &acc + &(x * y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> Field {
        Field::Padic { p }
    }

    #[test]
    fn rref_examples() {
        let id = Matrix::identity(q(5), 3);
        let r = rref(&id);
        assert_eq!(r.rank, 3);
        assert!(r.kernel.is_empty());
        let ones = Matrix::from_i64(q(5), &[&[1, 1], &[1, 1]]);
        let r = rref(&ones);
        assert_eq!(r.rank, 1);
        assert_eq!(
            r.kernel,
            vec![vec![
                FieldElement::from_i64(q(5), -1),
                FieldElement::from_i64(q(5), 1)
            ]]
        );
    }

    #[test]
    fn inverse_examples() {
        let f = q(3);
        let d = Matrix::diagonal(f, &[FieldElement::from_i64(f, 3), FieldElement::one(f)]);
        let di = invert(&d).unwrap();
        assert_eq!(
            di,
            Matrix::diagonal(
                f,
                &[FieldElement::from_ratio(f, 1, 3), FieldElement::one(f)]
            )
        );
        let u = Matrix::from_i64(f, &[&[1, 1], &[0, 1]]);
        assert_eq!(
            invert(&u).unwrap(),
            Matrix::from_i64(f, &[&[1, -1], &[0, 1]])
        );
        let s = Matrix::from_i64(f, &[&[1, 2], &[2, 4]]);
        assert_eq!(invert(&s), Err(Error::Singular));
        assert!(det(&s).is_zero());
    }

    #[test]
    fn real_inverse_and_singularity() {
        let m = Matrix::from_i64(Field::Real, &[&[2, 1], &[1, 1]]);
        let inv = invert(&m).unwrap();
        assert!(m
            .mul(&inv)
            .approx_eq(&Matrix::identity(Field::Real, 2), 1e-12));
        let s = Matrix::from_fn(Field::Real, 2, 2, |i, j| {
            FieldElement::Real([[1.0, 2.0], [1.0, 2.0 + 1e-13]][i][j])
        });
        assert_eq!(invert(&s), Err(Error::Singular));
    }

    #[test]
    fn affine_solve() {
        let f = q(7);
        let a = Matrix::from_i64(f, &[&[1, 1, 0], &[0, 1, 1]]);
        let b = vec![FieldElement::from_i64(f, 2), FieldElement::from_i64(f, 3)];
        let (x, ker) = solve_affine(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert_eq!(ker.len(), 1);
        let inconsistent = Matrix::from_i64(f, &[&[1, 1], &[1, 1]]);
        assert!(solve_affine(
            &inconsistent,
            &[FieldElement::one(f), FieldElement::zero(f)]
        )
        .is_none());
    }
}
