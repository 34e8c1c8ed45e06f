//! Local-field scalars, exact matrices and linear algebra.

pub mod field;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod roots;
pub mod smith;

pub use field::{parse_rational, Field, FieldElement, Valuation};
pub use linalg::{det, invert, rref, rref_tol, solve_affine, Rref, REAL_TOL};
pub use matrix::Matrix;
pub use poly::{Poly, RatFunc};
pub use smith::{elementary_divisors, smith_padic, SmithForm};

/// Valuation of a scalar; errors on reals.
pub fn valuation(x: &FieldElement) -> crate::error::Result<Valuation> {
    x.valuation()
}
