//! Complete reducibility, composition series and semisimplification.

use super::irreducible::{
    find_invariant_subspace, kernel_of, Finding, IrreducibilityWitness, SubspaceSource,
};
use super::representation::Representation;
use super::subspace::Subspace;
use crate::arith::{invert, solve_affine, Field, FieldElement, Matrix};
use crate::error::{Error, Result};

/// Basis change `h` and block sizes such that every h⁻¹ρ(s)h is block upper
/// triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantFlag {
    pub basis_change: Matrix,
    pub block_sizes: Vec<usize>,
}

impl InvariantFlag {
    pub fn trivial(field: Field, n: usize) -> Self {
        InvariantFlag {
            basis_change: Matrix::identity(field, n),
            block_sizes: vec![n],
        }
    }

    /// The subspace spanned by the first `blocks` blocks of the flag.
    pub fn step(&self, blocks: usize) -> Subspace {
        let k: usize = self.block_sizes[..blocks].iter().sum();
        let cols: Vec<Vec<FieldElement>> = (0..k).map(|j| self.basis_change.column(j)).collect();
        Subspace::span(self.basis_change.field(), self.basis_change.rows(), &cols)
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut out = vec![0];
        for s in &self.block_sizes {
            out.push(out.last().unwrap() + s);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonparabolicVerdict {
    pub nonparabolic: bool,
    /// A one-step invariant flag when the answer is negative.
    pub certificate: Option<InvariantFlag>,
    pub source: Option<SubspaceSource>,
    pub witness: Option<IrreducibilityWitness>,
}

pub fn is_nonparabolic(rho: &Representation, seed: u64) -> NonparabolicVerdict {
    match find_invariant_subspace(rho, seed) {
        Finding::Irreducible(w) => NonparabolicVerdict {
            nonparabolic: true,
            certificate: None,
            source: None,
            witness: Some(w),
        },
        Finding::Reducible(sub, src) => NonparabolicVerdict {
            nonparabolic: false,
            certificate: Some(InvariantFlag {
                basis_change: sub.adapted_basis(),
                block_sizes: vec![sub.dim(), rho.dim() - sub.dim()],
            }),
            source: Some(src),
            witness: None,
        },
    }
}

/// Matrix of the restriction of `g` to an invariant subspace, in its basis.
fn restriction(g: &Matrix, w: &Subspace) -> Result<Matrix> {
    let h = w.adapted_basis();
    let k = w.dim();
    Ok(invert(&h)?.mul(g).mul(&h).submatrix(0, k, 0, k))
}

/// Looks for an equivariant projector onto an invariant subspace `w`.
///
/// Writes π = B·X with B the basis of `w` as columns and solves the linear
/// system X·ρ(s) = R_s·X, X·B = I, where R_s is ρ(s) restricted to `w`.
pub fn has_invariant_complement(rho: &Representation, w: &Subspace) -> Result<Option<Matrix>> {
    if w.ambient() != rho.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), w.ambient()));
    }
    if !w.is_invariant(rho) {
        return Err(Error::NotInvariant);
    }
    let field = rho.field();
    let n = rho.dim();
    let k = w.dim();
    let b = Matrix::from_columns(field, w.basis());
    let unknowns = k * n;
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    let mut rhs: Vec<FieldElement> = Vec::new();
    let zero = FieldElement::zero(field);
    for g in rho.matrices() {
        let r = restriction(g, w)?;
        for a in 0..k {
            for c in 0..n {
                let mut row = vec![zero.clone(); unknowns];
                for l in 0..n {
                    row[a * n + l] = &row[a * n + l] + &g[(l, c)];
                }
                for bb in 0..k {
                    row[bb * n + c] = &row[bb * n + c] - &r[(a, bb)];
                }
                rows.push(row);
                rhs.push(zero.clone());
            }
        }
    }
    for a in 0..k {
        for d in 0..k {
            let mut row = vec![zero.clone(); unknowns];
            for l in 0..n {
                row[a * n + l] = b[(l, d)].clone();
            }
            rows.push(row);
            rhs.push(FieldElement::from_i64(field, (a == d) as i64));
        }
    }
    let system = Matrix::from_rows(field, rows)?;
    let Some((x, _)) = solve_affine(&system, &rhs) else {
        return Ok(None);
    };
    let xm = Matrix::from_fn(field, k, n, |a, c| x[a * n + c].clone());
    Ok(Some(b.mul(&xm)))
}

/// Complete reducibility (semisimplicity of the module K^n).
pub fn is_cr(rho: &Representation, seed: u64) -> bool {
    cr_split(rho, seed).is_some()
}

/// Splits ρ into irreducible summands; `None` when ρ is not completely reducible.
/// Returns the basis change and the block sizes of a block-diagonal form.
pub fn cr_split(rho: &Representation, seed: u64) -> Option<InvariantFlag> {
    let field = rho.field();
    let n = rho.dim();
    let (w, _) = match find_invariant_subspace(rho, seed) {
        Finding::Irreducible(_) => return Some(InvariantFlag::trivial(field, n)),
        Finding::Reducible(w, src) => (w, src),
    };
    let pi = has_invariant_complement(rho, &w).ok()??;
    let complement = kernel_of(&pi);
    if complement.len() + w.dim() != n {
        return None;
    }
    let mut cols: Vec<Vec<FieldElement>> = w.basis().to_vec();
    cols.extend(complement);
    let h = Matrix::from_columns(field, &cols);
    let conj = rho.in_basis(&h).ok()?;
    let k = w.dim();
    let left = cr_split(&conj.block(0, k).ok()?, seed)?;
    let right = cr_split(&conj.block(k, n).ok()?, seed)?;
    let inner = Matrix::block_diagonal(field, &[left.basis_change, right.basis_change]);
    let mut sizes = left.block_sizes;
    sizes.extend(right.block_sizes);
    Some(InvariantFlag {
        basis_change: h.mul(&inner),
        block_sizes: sizes,
    })
}

/// An irreducible invariant subspace, or `None` if ρ is irreducible.
pub fn minimal_invariant_subspace(rho: &Representation, seed: u64) -> Option<Subspace> {
    let Finding::Reducible(mut w, _) = find_invariant_subspace(rho, seed) else {
        return None;
    };
    loop {
        let h = w.adapted_basis();
        let sub = rho.in_basis(&h).ok()?.block(0, w.dim()).ok()?;
        match find_invariant_subspace(&sub, seed) {
            Finding::Irreducible(_) => return Some(w),
            Finding::Reducible(inner, _) => w = Subspace::from_frame(&h, &inner),
        }
    }
}

/// A full flag with irreducible successive quotients.
pub fn composition_series(rho: &Representation, seed: u64) -> InvariantFlag {
    let field = rho.field();
    let n = rho.dim();
    let Some(w) = minimal_invariant_subspace(rho, seed) else {
        return InvariantFlag::trivial(field, n);
    };
    let k = w.dim();
    let h1 = w.adapted_basis();
    let quotient = rho
        .in_basis(&h1)
        .and_then(|c| c.block(k, n))
        .expect("adapted basis is invertible");
    let rest = composition_series(&quotient, seed);
    let inner = Matrix::block_diagonal(field, &[Matrix::identity(field, k), rest.basis_change]);
    let mut sizes = vec![k];
    sizes.extend(rest.block_sizes);
    InvariantFlag {
        basis_change: h1.mul(&inner),
        block_sizes: sizes,
    }
}

/// Block-diagonal part of a matrix for the given block sizes.
pub fn block_diagonal_part(m: &Matrix, sizes: &[usize]) -> Matrix {
    let field = m.field();
    let mut out = Matrix::zeros(field, m.rows(), m.cols());
    let mut off = 0;
    for &s in sizes {
        out.set_block(off, off, &m.submatrix(off, off + s, off, off + s));
        off += s;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Semisimplification {
    pub flag: InvariantFlag,
    /// Block-diagonal representation in the flag basis.
    pub levi: Representation,
    /// The same, conjugated back to the original basis.
    pub rho_ss: Representation,
}

pub fn semisimplify(rho: &Representation, seed: u64) -> Semisimplification {
    let flag = composition_series(rho, seed);
    let h = &flag.basis_change;
    let conj = rho.in_basis(h).expect("flag basis is invertible");
    let levi = conj
        .map(|_, m| Ok(block_diagonal_part(m, &flag.block_sizes)))
        .expect("Levi part of an invertible block-triangular matrix");
    let rho_ss = levi.conjugate(h).expect("flag basis is invertible");
    Semisimplification { flag, levi, rho_ss }
}
