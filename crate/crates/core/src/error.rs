use thiserror::Error;

use crate::arith::{Field, Valuation};

/// Which side of the diagonal a block-triangular matrix lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Upper => f.write_str("upper"),
            Side::Lower => f.write_str("lower"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("real numbers carry no discrete valuation")]
    RealHasNoValuation,
    #[error("matrix is singular")]
    Singular,
    #[error("operation requires a {expected} field, got {found}")]
    WrongField {
        expected: &'static str,
        found: Field,
    },
    #[error("fields do not match: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("subspace is not invariant under the representation")]
    NotInvariant,
    #[error("representation is not completely reducible")]
    NotCr,
    #[error("leading principal block {0} is singular; matrix lies outside the big cell")]
    NotInBigCell(usize),
    #[error("matrix is not block {0} triangular for the given block structure")]
    NotParabolic(Side),
    #[error("matrix is not block unitriangular")]
    NotUnipotent,
    #[error("Levi parts differ for generator {0:?}")]
    LeviMismatch(String),
    #[error("operation requires the real field")]
    NotRealField,
    #[error("displacement minimum was not attained")]
    NotAttained,
    #[error("objects live over different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),
    #[error("t must have negative valuation, got {0}")]
    BadT(Valuation),
    #[error("{0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, shared by the CLI and the C interface.
    pub fn code(&self) -> &'static str {
        match self {
            Error::RealHasNoValuation => "REAL_HAS_NO_VALUATION",
            Error::Singular => "SINGULAR",
            Error::WrongField { .. } => "WRONG_FIELD",
            Error::FieldMismatch(..) => "FIELD_MISMATCH",
            Error::DimensionMismatch(..) => "DIMENSION_MISMATCH",
            Error::NotInvariant => "NOT_INVARIANT",
            Error::NotCr => "NOT_CR",
            Error::NotInBigCell(_) => "NOT_IN_BIG_CELL",
            Error::NotParabolic(_) => "NOT_PARABOLIC",
            Error::NotUnipotent => "NOT_UNIPOTENT",
            Error::LeviMismatch(_) => "LEVI_MISMATCH",
            Error::NotRealField => "NOT_REAL_FIELD",
            Error::NotAttained => "NOT_ATTAINED",
            Error::PrimeMismatch(..) => "PRIME_MISMATCH",
            Error::BadT(_) => "BAD_T",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::Parse(_) => "PARSE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
