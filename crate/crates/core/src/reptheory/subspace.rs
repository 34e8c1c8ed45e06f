//! Subspaces of K^n, spinning and probe vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::representation::Representation;
use crate::arith::{rref_tol, Field, FieldElement, Matrix};

/// Relative tolerance for real subspace membership.
pub const REAL_SUBSPACE_TOL: f64 = 1e-8;

/// Default seed for probe vectors and randomized searches.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// A subspace stored as a row-reduced basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<FieldElement>>,
}

fn normalize_real(v: &[FieldElement]) -> Vec<FieldElement> {
    let m = v.iter().map(FieldElement::abs).fold(0.0, f64::max);
    if m == 0.0 {
        return v.to_vec();
    }
    v.iter()
        .map(|x| FieldElement::Real(x.as_real().unwrap() / m))
        .collect()
}

impl Subspace {
    pub fn span(field: Field, ambient: usize, vectors: &[Vec<FieldElement>]) -> Subspace {
        let rows: Vec<Vec<FieldElement>> = if field.is_real() {
            vectors.iter().map(|v| normalize_real(v)).collect()
        } else {
            vectors.to_vec()
        };
        if rows.is_empty() {
            return Subspace {
                field,
                ambient,
                basis: Vec::new(),
            };
        }
        let m = Matrix::from_fn(field, rows.len(), ambient, |i, j| rows[i][j].clone());
        let r = rref_tol(&m, REAL_SUBSPACE_TOL);
        let basis = (0..r.rank).map(|i| r.reduced.row(i)).collect();
        Subspace {
            field,
            ambient,
            basis,
        }
    }

    pub fn whole(field: Field, ambient: usize) -> Subspace {
        Subspace::span(field, ambient, &standard_basis(field, ambient))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_proper_nonzero(&self) -> bool {
        self.dim() > 0 && self.dim() < self.ambient
    }

    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        let mut all = self.basis.clone();
        all.push(v.to_vec());
        Subspace::span(self.field, self.ambient, &all).dim() == self.dim()
    }

    pub fn with(&self, v: &[FieldElement]) -> Subspace {
        let mut all = self.basis.clone();
        all.push(v.to_vec());
        Subspace::span(self.field, self.ambient, &all)
    }

    /// Invariance under every generator (inverses follow by finiteness).
    pub fn is_invariant(&self, rho: &Representation) -> bool {
        rho.matrices()
            .all(|g| self.basis.iter().all(|b| self.contains(&g.mul_vec(b))))
    }

    /// Vectors x with u·x = 0 for all u in the subspace.
    pub fn annihilator(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::whole(self.field, self.ambient);
        }
        let m = Matrix::from_fn(self.field, self.dim(), self.ambient, |i, j| {
            self.basis[i][j].clone()
        });
        let ker = rref_tol(&m, REAL_SUBSPACE_TOL).kernel;
        Subspace::span(self.field, self.ambient, &ker)
    }

    /// Invertible matrix whose first `dim` columns are the basis, completed
    /// by standard basis vectors in increasing index order.
    pub fn adapted_basis(&self) -> Matrix {
        let mut cols = self.basis.clone();
        let mut current = self.clone();
        for e in standard_basis(self.field, self.ambient) {
            if cols.len() == self.ambient {
                break;
            }
            let next = current.with(&e);
            if next.dim() > current.dim() {
                cols.push(e);
                current = next;
            }
        }
        Matrix::from_columns(self.field, &cols)
    }

    /// Image of coordinates `coords` (w.r.t. the first columns of `frame`).
    pub fn from_frame(frame: &Matrix, coords: &Subspace) -> Subspace {
        let k = coords.ambient;
        let sub = frame.submatrix(0, frame.rows(), 0, k);
        let vecs: Vec<Vec<FieldElement>> = coords.basis.iter().map(|c| sub.mul_vec(c)).collect();
        Subspace::span(frame.field(), frame.rows(), &vecs)
    }
}

pub fn standard_basis(field: Field, n: usize) -> Vec<Vec<FieldElement>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| FieldElement::from_i64(field, (i == j) as i64))
                .collect()
        })
        .collect()
}

/// Smallest subspace containing `v` and stable under all generators and
/// their inverses.
pub fn spin(rho: &Representation, v: &[FieldElement]) -> Subspace {
    let field = rho.field();
    let n = rho.dim();
    let mats = rho.matrices_with_inverses();
    let mut space = Subspace::span(field, n, &[v.to_vec()]);
    let mut queue = vec![v.to_vec()];
    while let Some(w) = queue.pop() {
        if space.dim() == n {
            break;
        }
        for m in &mats {
            let u = m.mul_vec(&w);
            let next = space.with(&u);
            if next.dim() > space.dim() {
                space = next;
                queue.push(if field.is_real() {
                    normalize_real(&u)
                } else {
                    u
                });
            }
        }
    }
    space
}

/// Standard basis vectors followed by `2n` seeded vectors with entries in
/// {−3, …, 3}, all as integer coordinates.
pub fn probe_batch(n: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < 3 * n {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        if v.iter().any(|&x| x != 0) {
            out.push(v);
        }
    }
    out
}

pub fn to_field_vector(field: Field, v: &[i64]) -> Vec<FieldElement> {
    v.iter()
        .map(|&x| FieldElement::from_i64(field, x))
        .collect()
}
