//! Complete reducibility, semisimplification and displacement minimization for
//! finitely generated subgroups of GL_n over ℝ, ℚ_p and 𝔽_p((T)).

pub mod arith;
pub mod cli;
pub mod error;
pub mod io;
pub mod parabolic;
pub mod quotient;
pub mod reptheory;
pub mod symspace;
pub mod tree;

pub use error::{Error, Result};
