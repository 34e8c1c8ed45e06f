//! Characteristic polynomials and eigenvalues lying in the base field.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{Field, FieldElement};
use super::linalg::det;
use super::matrix::Matrix;
use super::poly::{Poly, RatFunc};

const TRIAL_LIMIT: u64 = 1_000_000;
const FACTOR_BUDGET: u64 = 200_000;

/// Coefficients (constant term first) of det(x·I − m); exact fields only.
pub fn charpoly(m: &Matrix) -> Vec<FieldElement> {
    assert!(m.is_square());
    let field = m.field();
    let n = m.rows();
    let points: Vec<FieldElement> = (0..=n)
        .map(|k| match field {
            Field::Funcfield { p } => {
                FieldElement::Func(RatFunc::from_poly(Poly::monomial(p, 1, k)))
            }
            _ => FieldElement::from_i64(field, k as i64),
        })
        .collect();
    let values: Vec<FieldElement> = points
        .iter()
        .map(|x| {
            let shifted = Matrix::identity(field, n).scale(x).sub(m);
            det(&shifted)
        })
        .collect();
    interpolate(field, &points, &values)
}

fn interpolate(field: Field, xs: &[FieldElement], ys: &[FieldElement]) -> Vec<FieldElement> {
    let n = xs.len();
    let mut out = vec![FieldElement::zero(field); n];
    for k in 0..n {
        let mut basis = vec![FieldElement::one(field)];
        let mut denom = FieldElement::one(field);
        for j in 0..n {
            if j == k {
                continue;
            }
            let mut next = vec![FieldElement::zero(field); basis.len() + 1];
            for (i, c) in basis.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
                next[i] = &next[i] - &(c * &xs[j]);
            }
            basis = next;
            denom = &denom * &(&xs[k] - &xs[j]);
        }
        let scale = &ys[k] / &denom;
        for (i, c) in basis.iter().enumerate() {
            out[i] = &out[i] + &(c * &scale);
        }
    }
    out
}

pub fn poly_eval(coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = FieldElement::zero(x.field());
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Distinct eigenvalues of `m` that lie in its field.
///
/// Exact fields use a rational-root search on the characteristic polynomial;
/// reals use a numerical eigensolver and keep eigenvalues with negligible
/// imaginary part, merging near-duplicates.
pub fn eigenvalues(m: &Matrix) -> Vec<FieldElement> {
    match m.field() {
        Field::Real => real_eigenvalues(&m.to_dmatrix().unwrap())
            .into_iter()
            .map(FieldElement::Real)
            .collect(),
        Field::Padic { p } => {
            let cp: Vec<BigRational> = charpoly(m)
                .iter()
                .map(|c| c.as_rational().unwrap().clone())
                .collect();
            rational_roots(&cp)
                .into_iter()
                .map(|r| FieldElement::rational(p, r))
                .collect()
        }
        Field::Funcfield { p } => {
            let cp: Vec<RatFunc> = charpoly(m)
                .iter()
                .map(|c| c.as_ratfunc().unwrap().clone())
                .collect();
            ratfunc_roots(p, &cp)
                .into_iter()
                .map(FieldElement::Func)
                .collect()
        }
    }
}

pub fn real_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
    let eig = m.clone().complex_eigenvalues();
    let mut reals: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * scale)
        .map(|z| z.re)
        .collect();
    reals.sort_by(f64::total_cmp);
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for x in reals {
        match clusters.last_mut() {
            Some(c) if (x - c[c.len() - 1]).abs() <= 1e-4 * scale => c.push(x),
            _ => clusters.push(vec![x]),
        }
    }
    clusters
        .into_iter()
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect()
}

/// Rational roots of a polynomial with rational coefficients (constant term first).
pub fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut ints = clear_denominators(coeffs);
    while ints.last().is_some_and(Zero::is_zero) {
        ints.pop();
    }
    let mut roots = Vec::new();
    if ints.len() <= 1 {
        return roots;
    }
    let zeros = ints.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(BigRational::zero());
        ints.drain(..zeros);
    }
    if ints.len() == 1 {
        return roots;
    }
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let bound = {
        let lead = BigRational::from_integer(an.clone());
        ints.iter()
            .map(|c| BigRational::from_integer(c.abs()) / &lead)
            .max()
            .unwrap()
            + BigRational::one()
    };
    let nums = divisors_int(&a0);
    let dens = divisors_int(&an);
    for v in &dens {
        for u in &nums {
            for sign in [1, -1] {
                let cand = BigRational::new(u * sign, v.clone());
                if cand.abs() > bound || roots.contains(&cand) {
                    continue;
                }
                if eval_int_poly(&ints, &cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

fn clear_denominators(coeffs: &[BigRational]) -> Vec<BigInt> {
    let l = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
        .collect()
}

fn eval_int_poly(ints: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in ints.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

/// Positive divisors of |n| (n ≠ 0). Cofactors beyond the trial limit are
/// treated as prime.
fn divisors_int(n: &BigInt) -> Vec<BigInt> {
    let mut rest = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_LIMIT {
        let dd = BigInt::from(d);
        if &dd * &dd > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&dd);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((dd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        factors.push((rest, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (q, e) in factors {
        let mut next = Vec::new();
        for dv in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(dv * &pw);
                pw *= &q;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Roots in 𝔽_p(T) of a polynomial with coefficients in 𝔽_p(T).
pub fn ratfunc_roots(p: u64, coeffs: &[RatFunc]) -> Vec<RatFunc> {
    let l = coeffs.iter().fold(Poly::constant(p, 1), |acc, c| {
        let g = acc.gcd(c.den());
        acc.mul(c.den()).div_rem(&g).0
    });
    let lf = RatFunc::from_poly(l);
    let mut polys: Vec<Poly> = coeffs
        .iter()
        .map(|c| {
            let x = c.mul(&lf);
            debug_assert!(x.den().is_one());
            x.num().clone()
        })
        .collect();
    while polys.last().is_some_and(Poly::is_zero) {
        polys.pop();
    }
    let mut roots = Vec::new();
    if polys.len() <= 1 {
        return roots;
    }
    let zeros = polys.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(RatFunc::zero(p));
        polys.drain(..zeros);
    }
    if polys.len() == 1 {
        return roots;
    }
    let (Some(nums), Some(dens)) = (
        poly_divisors(&polys[0]),
        poly_divisors(polys.last().unwrap()),
    ) else {
        return roots;
    };
    let eval = |x: &RatFunc| {
        let mut acc = RatFunc::zero(p);
        for c in polys.iter().rev() {
            acc = acc.mul(x).add(&RatFunc::from_poly(c.clone()));
        }
        acc
    };
    for v in &dens {
        for u in &nums {
            for unit in 1..p {
                let Ok(cand) = RatFunc::new(u.scale(unit), v.clone()) else {
                    continue;
                };
                if roots.contains(&cand) {
                    continue;
                }
                if eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

/// Monic divisors of a nonzero polynomial, or `None` past the factoring budget.
fn poly_divisors(f: &Poly) -> Option<Vec<Poly>> {
    let p = f.prime();
    let (_, factors) = f.factor(FACTOR_BUDGET)?;
    let mut grouped: Vec<(Poly, u32)> = Vec::new();
    for q in factors {
        match grouped.iter_mut().find(|(g, _)| *g == q) {
            Some(entry) => entry.1 += 1,
            None => grouped.push((q, 1)),
        }
    }
    let mut divs = vec![Poly::constant(p, 1)];
    for (q, e) in grouped {
        let mut next = Vec::new();
        for dv in &divs {
            let mut pw = Poly::constant(p, 1);
            for _ in 0..=e {
                next.push(dv.mul(&pw));
                pw = pw.mul(&q);
            }
        }
        divs = next;
    }
    Some(divs)
}
