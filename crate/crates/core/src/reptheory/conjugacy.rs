//! Trace fingerprints and simultaneous conjugacy of semisimple tuples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cr::is_cr;
use super::irreducible::{intertwiner_equations, kernel_of};
use super::representation::{Letter, Representation};
use crate::arith::{det, invert, Field, FieldElement, Matrix, Poly, RatFunc};
use crate::error::{Error, Result};

/// Relative tolerance for comparing real traces.
pub const REAL_TRACE_TOL: f64 = 1e-6;

const SWEEP_COEFFS: std::ops::RangeInclusive<i64> = -2..=2;
const SWEEP_CAP: usize = 4096;
const RANDOM_TRIALS: usize = 64;

/// Reduced words of length ≤ `max_len` over s1, s1⁻¹, s2, s2⁻¹, … in
/// shortlex order, starting with the empty word.
pub fn reduced_words(generators: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let letters: Vec<Letter> = (0..generators)
        .flat_map(|g| {
            [
                Letter {
                    generator: g,
                    inverse: false,
                },
                Letter {
                    generator: g,
                    inverse: true,
                },
            ]
        })
        .collect();
    let mut out = vec![Vec::new()];
    let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for &l in &letters {
                if w.last().is_some_and(|&last| last == l.inv()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Traces of ρ(w) for all reduced words up to `max_len`, in shortlex order.
pub fn trace_fingerprint(rho: &Representation, max_len: usize) -> Vec<FieldElement> {
    let field = rho.field();
    let letters = rho.letters();
    let mut out = vec![Matrix::identity(field, rho.dim()).trace()];
    let mut level: Vec<(Option<Letter>, Matrix)> = vec![(None, Matrix::identity(field, rho.dim()))];
    for depth in 1..=max_len {
        let mut next = Vec::new();
        for (last, m) in &level {
            for &l in &letters {
                if last.is_some_and(|x| x == l.inv()) {
                    continue;
                }
                // The deepest level needs only tr(m·L) = Σ m_ij L_ji.
                if depth == max_len {
                    out.push(trace_of_product(m, rho.letter_matrix(l)));
                    continue;
                }
                let prod = m.mul(rho.letter_matrix(l));
                out.push(prod.trace());
                next.push((Some(l), prod));
            }
        }
        level = next;
    }
    out
}

fn trace_of_product(a: &Matrix, b: &Matrix) -> FieldElement {
    let mut acc = FieldElement::zero(a.field());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if !a[(i, j)].is_zero() && !b[(j, i)].is_zero() {
                acc = &acc + &(&a[(i, j)] * &b[(j, i)]);
            }
        }
    }
    acc
}

/// Whether two traces agree: exactly, or within a relative tolerance for reals.
pub fn traces_agree(a: &FieldElement, b: &FieldElement) -> bool {
    match (a, b) {
        (FieldElement::Real(x), FieldElement::Real(y)) => {
            (x - y).abs() <= REAL_TRACE_TOL * x.abs().max(y.abs()).max(1.0)
        }
        _ => a == b,
    }
}

/// Index of the first fingerprint entry where the two lists differ.
pub fn first_disagreement(a: &[FieldElement], b: &[FieldElement]) -> Option<usize> {
    a.iter()
        .zip(b)
        .position(|(x, y)| !traces_agree(x, y))
        .or_else(|| (a.len() != b.len()).then(|| a.len().min(b.len())))
}

/// Basis of {M : M·ρ1(s) = ρ2(s)·M for all s}.
pub fn intertwiners(rho1: &Representation, rho2: &Representation) -> Result<Vec<Matrix>> {
    rho1.same_shape(rho2)?;
    let field = rho1.field();
    let n = rho1.dim();
    let mut stacked: Option<Matrix> = None;
    for ((_, a), (_, b)) in rho1.generators().zip(rho2.generators()) {
        let eq = intertwiner_equations(a, b);
        stacked = Some(match stacked {
            None => eq,
            Some(s) => {
                let mut out = Matrix::zeros(field, s.rows() + eq.rows(), n * n);
                out.set_block(0, 0, &s);
                out.set_block(s.rows(), 0, &eq);
                out
            }
        });
    }
    let ker = kernel_of(&stacked.expect("nonempty generator set"));
    Ok(ker
        .iter()
        .map(|v| Matrix::from_fn(field, n, n, |i, j| v[i * n + j].clone()))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Conjugacy {
    /// M with M·ρ1(s)·M⁻¹ = ρ2(s) for all s.
    Conjugate(Matrix),
    /// Either no intertwiner exists or the trace fingerprints differ.
    NotConjugate { first_trace_mismatch: Option<usize> },
    /// Intertwiners exist and traces agree, but no invertible one was found.
    Inconclusive,
}

impl Conjugacy {
    pub fn is_conjugate(&self) -> bool {
        matches!(self, Conjugacy::Conjugate(_))
    }
}

fn is_invertible(m: &Matrix) -> bool {
    if m.field().is_real() {
        let scale = m.max_abs();
        scale > 0.0 && det(m).abs() > 1e-9 * scale.powi(m.rows() as i32)
    } else {
        !det(m).is_zero()
    }
}

fn combine(basis: &[Matrix], coeffs: &[FieldElement]) -> Matrix {
    let mut acc = Matrix::zeros(basis[0].field(), basis[0].rows(), basis[0].cols());
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&b.scale(c));
        }
    }
    acc
}

/// Coefficient vectors over {−2, …, 2}, by increasing support size, capped.
fn sweep_vectors(d: usize) -> Vec<Vec<i64>> {
    let values: Vec<i64> = SWEEP_COEFFS.filter(|&c| c != 0).collect();
    let mut out = Vec::new();
    for support in 1..=d {
        let mut chosen = Vec::new();
        fn subsets(
            d: usize,
            k: usize,
            start: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..d {
                cur.push(i);
                subsets(d, k, i + 1, cur, out);
                cur.pop();
            }
        }
        subsets(d, support, 0, &mut Vec::new(), &mut chosen);
        for idx in chosen {
            let mut assign = vec![0usize; support];
            loop {
                let mut v = vec![0i64; d];
                for (slot, &i) in idx.iter().enumerate() {
                    v[i] = values[assign[slot]];
                }
                out.push(v);
                if out.len() >= SWEEP_CAP {
                    return out;
                }
                let mut pos = 0;
                while pos < support {
                    assign[pos] += 1;
                    if assign[pos] < values.len() {
                        break;
                    }
                    assign[pos] = 0;
                    pos += 1;
                }
                if pos == support {
                    break;
                }
            }
        }
    }
    out
}

fn random_scalar(field: Field, rng: &mut ChaCha8Rng) -> FieldElement {
    match field {
        Field::Real => FieldElement::Real(rng.gen_range(-1.0..1.0)),
        Field::Padic { .. } => FieldElement::from_i64(field, rng.gen_range(-10..=10)),
        Field::Funcfield { p } => {
            let coeffs: Vec<u64> = (0..3).map(|_| rng.gen_range(0..p)).collect();
            FieldElement::Func(RatFunc::from_poly(Poly::new(p, coeffs)))
        }
    }
}

fn verify(rho1: &Representation, rho2: &Representation, m: &Matrix) -> bool {
    let Ok(mi) = invert(m) else { return false };
    rho1.generators()
        .zip(rho2.generators())
        .all(|((_, a), (_, b))| {
            let c = m.mul(a).mul(&mi);
            if c.field().is_real() {
                c.approx_eq(b, 1e-7 * b.max_abs().max(1.0))
            } else {
                &c == b
            }
        })
}

/// Word length used by the fingerprint cross-check.
pub fn conjugacy_fingerprint_len(n: usize) -> usize {
    (n * n).min(6)
}

/// Decides simultaneous conjugacy of two completely reducible tuples.
pub fn are_conjugate_ss(
    rho1: &Representation,
    rho2: &Representation,
    seed: u64,
) -> Result<Conjugacy> {
    rho1.same_shape(rho2)?;
    if !is_cr(rho1, seed) || !is_cr(rho2, seed) {
        return Err(Error::NotCr);
    }
    Ok(conjugacy_search(rho1, rho2, seed))
}

/// The intertwiner search without the complete-reducibility precondition.
pub fn conjugacy_search(rho1: &Representation, rho2: &Representation, seed: u64) -> Conjugacy {
    let len = conjugacy_fingerprint_len(rho1.dim());
    let mismatch = first_disagreement(&trace_fingerprint(rho1, len), &trace_fingerprint(rho2, len));
    if mismatch.is_some() {
        return Conjugacy::NotConjugate {
            first_trace_mismatch: mismatch,
        };
    }
    intertwiner_search(rho1, rho2, seed)
}

/// Looks for an invertible intertwiner, assuming the trace filter has passed.
pub fn intertwiner_search(rho1: &Representation, rho2: &Representation, seed: u64) -> Conjugacy {
    let basis = match intertwiners(rho1, rho2) {
        Ok(b) => b,
        Err(_) => {
            return Conjugacy::NotConjugate {
                first_trace_mismatch: None,
            }
        }
    };
    if basis.is_empty() {
        return Conjugacy::NotConjugate {
            first_trace_mismatch: None,
        };
    }
    let field = rho1.field();
    for v in sweep_vectors(basis.len()) {
        let coeffs: Vec<FieldElement> = v
            .iter()
            .map(|&c| FieldElement::from_i64(field, c))
            .collect();
        let m = combine(&basis, &coeffs);
        if is_invertible(&m) && verify(rho1, rho2, &m) {
            return Conjugacy::Conjugate(m);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_TRIALS {
        let coeffs: Vec<FieldElement> = (0..basis.len())
            .map(|_| random_scalar(field, &mut rng))
            .collect();
        let m = combine(&basis, &coeffs);
        if is_invertible(&m) && verify(rho1, rho2, &m) {
            return Conjugacy::Conjugate(m);
        }
    }
    Conjugacy::Inconclusive
}
