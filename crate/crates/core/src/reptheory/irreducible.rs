//! Search for proper invariant subspaces, with certificates for irreducibility.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::representation::Representation;
use super::subspace::{probe_batch, spin, to_field_vector, Subspace};
use crate::arith::roots::eigenvalues;
use crate::arith::{rref_tol, Field, FieldElement, Matrix};

/// Relative singular-value cutoff for real kernels in eigen and trace computations.
const REAL_KERNEL_TOL: f64 = 1e-6;

/// How an irreducibility verdict was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IrreducibilityWitness {
    /// Dimension one.
    OneDimensional,
    /// The word algebra is all of M_n(K).
    Burnside,
    /// An algebra element with a one-dimensional eigenspace whose vector
    /// spins to V and whose dual vector spins to V*.
    Norton,
    /// n ≤ 3 and neither V nor V* has a common eigenvector, so no proper
    /// invariant subspace exists.
    NoCommonEigenvector,
    /// No certificate found; no invariant subspace was found either.
    Unverified,
}

/// Which search step produced an invariant subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceSource {
    Probe,
    DualProbe,
    Eigenvector,
    DualEigenvector,
    Commutant,
    TraceRadical,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Finding {
    Reducible(Subspace, SubspaceSource),
    Irreducible(IrreducibilityWitness),
}

/// Looks for a proper nonzero invariant subspace.
pub fn find_invariant_subspace(rho: &Representation, seed: u64) -> Finding {
    let n = rho.dim();
    if n == 1 {
        return Finding::Irreducible(IrreducibilityWitness::OneDimensional);
    }
    if let Some((w, src)) = probe_search(rho, seed) {
        return Finding::Reducible(w, src);
    }
    let field = rho.field();
    let gens: Vec<Matrix> = rho.matrices().cloned().collect();
    if let Some(v) = common_eigenvector(&gens) {
        let w = Subspace::span(field, n, &[v]);
        if w.is_invariant(rho) {
            return Finding::Reducible(w, SubspaceSource::Eigenvector);
        }
    }
    let transposed: Vec<Matrix> = gens.iter().map(Matrix::transpose).collect();
    if let Some(u) = common_eigenvector(&transposed) {
        let w = Subspace::span(field, n, &[u]).annihilator();
        if w.is_proper_nonzero() && w.is_invariant(rho) {
            return Finding::Reducible(w, SubspaceSource::DualEigenvector);
        }
    }
    if let Some(w) = commutant_kernel(rho) {
        return Finding::Reducible(w, SubspaceSource::Commutant);
    }
    let algebra = word_algebra(rho);
    if field.characteristic() == 0 {
        if let Some(w) = trace_radical_image(rho, &algebra) {
            return Finding::Reducible(w, SubspaceSource::TraceRadical);
        }
    }
    if algebra.len() == n * n {
        return Finding::Irreducible(IrreducibilityWitness::Burnside);
    }
    if field.is_exact() && norton_certificate(rho, &algebra, seed) {
        return Finding::Irreducible(IrreducibilityWitness::Norton);
    }
    if n <= 3 {
        return Finding::Irreducible(IrreducibilityWitness::NoCommonEigenvector);
    }
    Finding::Irreducible(IrreducibilityWitness::Unverified)
}

/// Spins every probe vector in V and in V*; keeps the smallest proper result,
/// ties broken by the lexicographically smallest probe.
fn probe_search(rho: &Representation, seed: u64) -> Option<(Subspace, SubspaceSource)> {
    let field = rho.field();
    let n = rho.dim();
    let dual = rho.dual();
    let mut best: Option<(usize, Vec<i64>, Subspace, SubspaceSource)> = None;
    for probe in probe_batch(n, seed) {
        let v = to_field_vector(field, &probe);
        let candidates = [
            (spin(rho, &v), SubspaceSource::Probe),
            (spin(&dual, &v).annihilator(), SubspaceSource::DualProbe),
        ];
        for (w, src) in candidates {
            if !w.is_proper_nonzero() {
                continue;
            }
            let key = (w.dim(), probe.clone());
            if best
                .as_ref()
                .is_none_or(|(d, p, _, _)| key < (*d, p.clone()))
            {
                best = Some((key.0, key.1, w, src));
            }
        }
    }
    best.map(|(_, _, w, src)| (w, src))
}

/// Right kernel of a matrix; real matrices use a singular-value cutoff.
pub(crate) fn kernel_of(m: &Matrix) -> Vec<Vec<FieldElement>> {
    if !m.field().is_real() {
        return rref_tol(m, 0.0).kernel;
    }
    let (r, c) = (m.rows(), m.cols());
    let mut d = DMatrix::<f64>::zeros(r.max(c), c);
    for i in 0..r {
        for j in 0..c {
            d[(i, j)] = m[(i, j)].as_real().unwrap();
        }
    }
    let svd = d.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    if smax == 0.0 {
        return super::subspace::standard_basis(Field::Real, c);
    }
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= REAL_KERNEL_TOL * smax)
        .map(|(i, _)| (0..c).map(|j| FieldElement::Real(v_t[(i, j)])).collect())
        .collect()
}

fn stack(blocks: &[Matrix]) -> Matrix {
    let field = blocks[0].field();
    let cols = blocks[0].cols();
    let rows: usize = blocks.iter().map(Matrix::rows).sum();
    let mut out = Matrix::zeros(field, rows, cols);
    let mut off = 0;
    for b in blocks {
        out.set_block(off, 0, b);
        off += b.rows();
    }
    out
}

/// A nonzero vector that is an eigenvector of every matrix in `mats`.
///
/// Enumerates tuples of eigenvalues lying in the field and intersects the
/// eigenspaces, backtracking on empty intersections.
pub fn common_eigenvector(mats: &[Matrix]) -> Option<Vec<FieldElement>> {
    let field = mats[0].field();
    let n = mats[0].rows();
    let spectra: Vec<Vec<FieldElement>> = mats.iter().map(eigenvalues).collect();
    if spectra.iter().any(Vec::is_empty) {
        return None;
    }
    fn go(
        mats: &[Matrix],
        spectra: &[Vec<FieldElement>],
        idx: usize,
        acc: &mut Vec<Matrix>,
        field: Field,
        n: usize,
    ) -> Option<Vec<FieldElement>> {
        if idx == mats.len() {
            return kernel_of(&stack(acc)).into_iter().next();
        }
        for lambda in &spectra[idx] {
            let shifted = mats[idx].sub(&Matrix::identity(field, n).scale(lambda));
            acc.push(shifted);
            if !kernel_of(&stack(acc)).is_empty() {
                if let Some(v) = go(mats, spectra, idx + 1, acc, field, n) {
                    return Some(v);
                }
            }
            acc.pop();
        }
        None
    }
    go(mats, &spectra, 0, &mut Vec::new(), field, n)
}

fn vec_of(m: &Matrix) -> Vec<FieldElement> {
    m.entries().to_vec()
}

fn unvec(field: Field, n: usize, v: &[FieldElement]) -> Matrix {
    Matrix::from_fn(field, n, n, |i, j| v[i * n + j].clone())
}

/// Basis of the span of all words in the generators and their inverses.
pub fn word_algebra(rho: &Representation) -> Vec<Matrix> {
    let field = rho.field();
    let n = rho.dim();
    let mats = rho.matrices_with_inverses();
    let id = Matrix::identity(field, n);
    let mut span = Subspace::span(field, n * n, &[vec_of(&id)]);
    let mut basis = vec![id];
    let mut frontier = 0;
    while frontier < basis.len() && span.dim() < n * n {
        let x = basis[frontier].clone();
        frontier += 1;
        for m in &mats {
            let y = m.mul(&x);
            let next = span.with(&vec_of(&y));
            if next.dim() > span.dim() {
                span = next;
                basis.push(y);
            }
        }
    }
    basis
}

/// Basis of the commutant {X : X ρ(s) = ρ(s) X}.
pub fn commutant(rho: &Representation) -> Vec<Matrix> {
    let field = rho.field();
    let n = rho.dim();
    let blocks: Vec<Matrix> = rho
        .matrices()
        .map(|g| intertwiner_equations(g, g))
        .collect();
    kernel_of(&stack(&blocks))
        .iter()
        .map(|v| unvec(field, n, v))
        .collect()
}

/// Linear equations in vec(M) for M·a = b·M.
pub(crate) fn intertwiner_equations(a: &Matrix, b: &Matrix) -> Matrix {
    let field = a.field();
    let n = a.rows();
    let mut eq = Matrix::zeros(field, n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for l in 0..n {
                // (M a)_{ij} = Σ_l M_{il} a_{lj}
                let col = i * n + l;
                eq[(row, col)] = &eq[(row, col)] + &a[(l, j)];
                // (b M)_{ij} = Σ_k b_{ik} M_{kj}
                let col = l * n + j;
                eq[(row, col)] = &eq[(row, col)] - &b[(i, l)];
            }
        }
    }
    eq
}

/// A singular nonzero commutant element gives an invariant kernel.
fn commutant_kernel(rho: &Representation) -> Option<Subspace> {
    let field = rho.field();
    let n = rho.dim();
    let comm = commutant(rho);
    if comm.len() <= 1 {
        return None;
    }
    for x in &comm {
        for lambda in eigenvalues(x) {
            let shifted = x.sub(&Matrix::identity(field, n).scale(&lambda));
            let negligible = if field.is_real() {
                shifted.max_abs() <= 1e-9 * x.max_abs()
            } else {
                shifted.is_zero()
            };
            if negligible {
                continue;
            }
            let w = Subspace::span(field, n, &kernel_of(&shifted));
            if w.is_proper_nonzero() && w.is_invariant(rho) {
                return Some(w);
            }
        }
    }
    None
}

/// In characteristic zero the radical of the word algebra is the kernel of
/// its trace form; a nonzero radical J gives the proper invariant subspace JV.
pub fn trace_radical(algebra: &[Matrix]) -> Vec<Matrix> {
    let d = algebra.len();
    if d == 0 {
        return Vec::new();
    }
    let field = algebra[0].field();
    let gram = Matrix::from_fn(field, d, d, |i, j| algebra[i].mul(&algebra[j]).trace());
    kernel_of(&gram)
        .iter()
        .map(|c| {
            let mut x = Matrix::zeros(field, algebra[0].rows(), algebra[0].cols());
            for (ci, a) in c.iter().zip(algebra) {
                x = x.add(&a.scale(ci));
            }
            x
        })
        .collect()
}

fn trace_radical_image(rho: &Representation, algebra: &[Matrix]) -> Option<Subspace> {
    let field = rho.field();
    let n = rho.dim();
    let radical = trace_radical(algebra);
    let cols: Vec<Vec<FieldElement>> = radical
        .iter()
        .flat_map(|x| (0..n).map(move |j| x.column(j)))
        .collect();
    let w = Subspace::span(field, n, &cols);
    (w.is_proper_nonzero() && w.is_invariant(rho)).then_some(w)
}

/// Norton's criterion over the base field: an element `a` of the word algebra
/// and eigenvalue λ with one-dimensional ker(a − λ) = ⟨v⟩, ker(aᵀ − λ) = ⟨w⟩,
/// such that v spins to V and w spins to V* proves irreducibility.
fn norton_certificate(rho: &Representation, algebra: &[Matrix], seed: u64) -> bool {
    let field = rho.field();
    let n = rho.dim();
    let dual = rho.dual();
    let mut candidates: Vec<Matrix> = rho.matrices_with_inverses().into_iter().cloned().collect();
    let gens: Vec<Matrix> = rho.matrices().cloned().collect();
    for a in &gens {
        for b in &gens {
            candidates.push(a.add(b));
            candidates.push(a.mul(b));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4e4f5254);
    for _ in 0..16 {
        let mut x = Matrix::zeros(field, n, n);
        for a in algebra {
            let c: i64 = rng.gen_range(-2..=2);
            x = x.add(&a.scale(&FieldElement::from_i64(field, c)));
        }
        candidates.push(x);
    }
    let id = Matrix::identity(field, n);
    for a in &candidates {
        for lambda in eigenvalues(a) {
            let shifted = a.sub(&id.scale(&lambda));
            let ker = kernel_of(&shifted);
            if ker.len() != 1 {
                continue;
            }
            let ker_t = kernel_of(&shifted.transpose());
            if ker_t.len() != 1 {
                continue;
            }
            if spin(rho, &ker[0]).dim() == n && spin(&dual, &ker_t[0]).dim() == n {
                return true;
            }
        }
    }
    false
}
