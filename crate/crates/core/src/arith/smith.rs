use super::field::{Field, FieldElement, Valuation};
use super::linalg::invert;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Cartan decomposition over ℤ_(p): `m = k1 · a · k2` where `k1`, `k2` are
/// p-integral with unit determinant and `a = diag(p^e_1, …, p^e_n)` with
/// `e_1 ≤ … ≤ e_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm {
    pub k1: Matrix,
    pub a: Matrix,
    pub k2: Matrix,
    pub exponents: Vec<i64>,
}

pub fn smith_padic(m: &Matrix) -> Result<SmithForm> {
    let field = m.field();
    let Field::Padic { p } = field else {
        return Err(Error::WrongField {
            expected: "p-adic",
            found: field,
        });
    };
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.rows(), m.cols()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut left = Matrix::identity(field, n);
    let mut right = Matrix::identity(field, n);
    let mut exponents = Vec::with_capacity(n);
    let mut units = Vec::with_capacity(n);
    for t in 0..n {
        let mut best: Option<(Valuation, usize, usize)> = None;
        for i in t..n {
            for j in t..n {
                let v = a[(i, j)].valuation()?;
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, bi, bj) = best.expect("nonempty block");
        let Valuation::Finite(e) = v else {
            return Err(Error::Singular);
        };
        swap_rows(&mut a, t, bi);
        swap_rows(&mut left, t, bi);
        swap_cols(&mut a, t, bj);
        swap_cols(&mut right, t, bj);
        let pivot_inv = a[(t, t)].inv().unwrap();
        for i in t + 1..n {
            if a[(i, t)].is_zero() {
                continue;
            }
            let f = &a[(i, t)] * &pivot_inv;
            row_axpy(&mut a, i, t, &f);
            row_axpy(&mut left, i, t, &f);
        }
        for j in t + 1..n {
            if a[(t, j)].is_zero() {
                continue;
            }
            let f = &a[(t, j)] * &pivot_inv;
            col_axpy(&mut a, j, t, &f);
            col_axpy(&mut right, j, t, &f);
        }
        let pe = FieldElement::from_i64(field, p as i64).pow(e);
        units.push(&a[(t, t)] / &pe);
        exponents.push(e);
    }
    let k1 = invert(&left)?;
    let k2 = Matrix::diagonal(field, &units).mul(&invert(&right)?);
    let pf = FieldElement::from_i64(field, p as i64);
    let diag: Vec<FieldElement> = exponents.iter().map(|&e| pf.pow(e)).collect();
    Ok(SmithForm {
        k1,
        a: Matrix::diagonal(field, &diag),
        k2,
        exponents,
    })
}

/// Exponents of the elementary divisors of an invertible p-adic matrix.
pub fn elementary_divisors(m: &Matrix) -> Result<Vec<i64>> {
    Ok(smith_padic(m)?.exponents)
}

fn swap_rows(m: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..m.cols() {
        let tmp = m[(i, c)].clone();
        m[(i, c)] = m[(j, c)].clone();
        m[(j, c)] = tmp;
    }
}

fn swap_cols(m: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in 0..m.rows() {
        let tmp = m[(r, i)].clone();
        m[(r, i)] = m[(r, j)].clone();
        m[(r, j)] = tmp;
    }
}

/// row_i -= f · row_t
fn row_axpy(m: &mut Matrix, i: usize, t: usize, f: &FieldElement) {
    for c in 0..m.cols() {
        if m[(t, c)].is_zero() {
            continue;
        }
        let d = f * &m[(t, c)];
        m[(i, c)] = &m[(i, c)] - &d;
    }
}

/// col_j -= f · col_t
fn col_axpy(m: &mut Matrix, j: usize, t: usize, f: &FieldElement) {
    for r in 0..m.rows() {
        if m[(r, t)].is_zero() {
            continue;
        }
        let d = f * &m[(r, t)];
        m[(r, j)] = &m[(r, j)] - &d;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::linalg::det;

    fn integral_unimodular(m: &Matrix) -> bool {
        m.min_valuation().unwrap() >= Valuation::Finite(0)
            && det(m).valuation().unwrap() == Valuation::Finite(0)
    }

    #[test]
    fn diagonal_input() {
        let f = Field::Padic { p: 5 };
        let m = Matrix::diagonal(f, &[FieldElement::from_i64(f, 25), FieldElement::one(f)]);
        let s = smith_padic(&m).unwrap();
        assert_eq!(s.exponents, vec![0, 2]);
        assert_eq!(s.k1.mul(&s.a).mul(&s.k2), m);
    }

    #[test]
    fn upper_triangular_example() {
        let f = Field::Padic { p: 5 };
        let m = Matrix::from_i64(f, &[&[1, 1], &[0, 5]]);
        let s = smith_padic(&m).unwrap();
        assert_eq!(s.exponents, vec![0, 1]);
        assert_eq!(s.k1.mul(&s.a).mul(&s.k2), m);
        assert!(integral_unimodular(&s.k1) && integral_unimodular(&s.k2));
    }

    #[test]
    fn unimodular_gives_identity() {
        let f = Field::Padic { p: 3 };
        let m = Matrix::from_i64(f, &[&[2, 1], &[1, 1]]);
        let s = smith_padic(&m).unwrap();
        assert!(s.a.is_identity());
    }

    #[test]
    fn errors() {
        let r = Matrix::identity(Field::Real, 2);
        assert!(matches!(smith_padic(&r), Err(Error::WrongField { .. })));
        let f = Field::Padic { p: 3 };
        let s = Matrix::from_i64(f, &[&[1, 2], &[2, 4]]);
        assert_eq!(smith_padic(&s), Err(Error::Singular));
    }
}
