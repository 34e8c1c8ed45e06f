//! Invariant subspaces, complete reducibility, semisimplification and
//! conjugacy of tuples of matrices.

pub mod conjugacy;
pub mod cr;
pub mod irreducible;
pub mod representation;
pub mod subspace;

pub use conjugacy::{are_conjugate_ss, intertwiners, reduced_words, trace_fingerprint, Conjugacy};
pub use cr::{
    composition_series, cr_split, has_invariant_complement, is_cr, is_nonparabolic, semisimplify,
    InvariantFlag, NonparabolicVerdict, Semisimplification,
};
pub use irreducible::{find_invariant_subspace, word_algebra, Finding, IrreducibilityWitness};
pub use representation::{Letter, Representation};
pub use subspace::{spin, Subspace, DEFAULT_SEED};

/// Entry point carrying the seed used for probe vectors and randomized
/// intertwiner trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Analyzer {
    pub seed: u64,
}

impl Default for Analyzer {
    fn default() -> Self {
        Analyzer { seed: DEFAULT_SEED }
    }
}

impl Analyzer {
    pub fn new(seed: u64) -> Self {
        Analyzer { seed }
    }

    pub fn is_nonparabolic(&self, rho: &Representation) -> NonparabolicVerdict {
        cr::is_nonparabolic(rho, self.seed)
    }

    pub fn is_cr(&self, rho: &Representation) -> bool {
        cr::is_cr(rho, self.seed)
    }

    pub fn composition_series(&self, rho: &Representation) -> InvariantFlag {
        cr::composition_series(rho, self.seed)
    }

    pub fn semisimplify(&self, rho: &Representation) -> Semisimplification {
        cr::semisimplify(rho, self.seed)
    }

    pub fn are_conjugate_ss(
        &self,
        a: &Representation,
        b: &Representation,
    ) -> crate::Result<Conjugacy> {
        conjugacy::are_conjugate_ss(a, b, self.seed)
    }
}
