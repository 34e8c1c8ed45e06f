//! Points of the cr quotient: semisimplified representatives, their trace
//! fingerprints, and pairwise separation of finite families.

use serde::Serialize;

use crate::arith::{FieldElement, Matrix};
use crate::error::{Error, Result};
use crate::reptheory::conjugacy::{first_disagreement, intertwiner_search};
use crate::reptheory::{semisimplify, trace_fingerprint, Conjugacy, Representation};
use crate::symspace::{minimize_displacement, DEFAULT_BUDGET};

/// Word length of the fingerprint.
pub const FINGERPRINT_LEN: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct CrClass {
    pub canonical: Representation,
    pub fingerprint: Vec<FieldElement>,
    pub lambda: Option<f64>,
}

/// Options shared by the projection-based operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Projector {
    pub seed: u64,
    pub budget: usize,
    /// Run the displacement minimization for real inputs.
    pub with_lambda: bool,
}

impl Default for Projector {
    fn default() -> Self {
        Projector {
            seed: crate::reptheory::DEFAULT_SEED,
            budget: DEFAULT_BUDGET,
            with_lambda: true,
        }
    }
}

impl Projector {
    pub fn project(&self, rho: &Representation) -> CrClass {
        let canonical = semisimplify(rho, self.seed).rho_ss;
        let fingerprint = trace_fingerprint(&canonical, FINGERPRINT_LEN);
        let lambda = if self.with_lambda && canonical.field().is_real() {
            minimize_displacement(&canonical, self.budget)
                .ok()
                .map(|r| r.lambda_est)
        } else {
            None
        };
        CrClass {
            canonical,
            fingerprint,
            lambda,
        }
    }

    pub fn same_point(&self, r1: &Representation, r2: &Representation) -> Result<SamePoint> {
        r1.same_shape(r2)?;
        let quick = Projector {
            with_lambda: false,
            ..*self
        };
        Ok(compare(&quick.project(r1), &quick.project(r2), self.seed))
    }
}

pub fn project(rho: &Representation, seed: u64) -> CrClass {
    Projector {
        seed,
        ..Projector::default()
    }
    .project(rho)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SamePoint {
    /// The canonical representatives are conjugate by this matrix.
    Same(Matrix),
    Different {
        first_trace_mismatch: Option<usize>,
    },
    Inconclusive,
}

impl SamePoint {
    pub fn verdict(&self) -> Option<bool> {
        match self {
            SamePoint::Same(_) => Some(true),
            SamePoint::Different { .. } => Some(false),
            SamePoint::Inconclusive => None,
        }
    }
}

fn compare(c1: &CrClass, c2: &CrClass, seed: u64) -> SamePoint {
    if let Some(i) = first_disagreement(&c1.fingerprint, &c2.fingerprint) {
        return SamePoint::Different {
            first_trace_mismatch: Some(i),
        };
    }
    // The fingerprint above covers the shorter one used inside the conjugacy test.
    match intertwiner_search(&c1.canonical, &c2.canonical, seed) {
        Conjugacy::Conjugate(m) => SamePoint::Same(m),
        Conjugacy::NotConjugate {
            first_trace_mismatch,
        } => SamePoint::Different {
            first_trace_mismatch,
        },
        Conjugacy::Inconclusive => SamePoint::Inconclusive,
    }
}

/// Whether the orbit closures of r1 and r2 meet.
#[allow(non_snake_case)]
pub fn same_point_in_Xcr(r1: &Representation, r2: &Representation, seed: u64) -> Result<SamePoint> {
    Projector {
        seed,
        with_lambda: false,
        ..Projector::default()
    }
    .same_point(r1, r2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairEvidence {
    pub i: usize,
    pub j: usize,
    pub same: Option<bool>,
    pub first_trace_mismatch: Option<usize>,
    pub conjugator: Option<Vec<Vec<String>>>,
    pub lambda_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationMatrix {
    /// `None` marks an inconclusive intertwiner search.
    pub same: Vec<Vec<Option<bool>>>,
    pub lambdas: Option<Vec<Option<f64>>>,
    pub evidence: Vec<PairEvidence>,
    pub symmetric: bool,
    pub transitive: bool,
}

/// Pairwise comparison of a family; both orders of every pair are computed
/// so that symmetry is checked rather than assumed.
pub fn separation_experiment(
    family: &[Representation],
    projector: &Projector,
) -> Result<SeparationMatrix> {
    for r in family.iter().skip(1) {
        family[0].same_shape(r)?;
    }
    let classes: Vec<CrClass> = family.iter().map(|r| projector.project(r)).collect();
    let k = family.len();
    let mut same = vec![vec![None; k]; k];
    let mut evidence = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let outcome = compare(&classes[i], &classes[j], projector.seed);
            same[i][j] = outcome.verdict();
            let lambda_gap = match (classes[i].lambda, classes[j].lambda) {
                (Some(a), Some(b)) => Some((a - b).abs()),
                _ => None,
            };
            let (first_trace_mismatch, conjugator) = match &outcome {
                SamePoint::Same(m) => (None, Some(m.encode())),
                SamePoint::Different {
                    first_trace_mismatch,
                } => (*first_trace_mismatch, None),
                SamePoint::Inconclusive => (None, None),
            };
            if i < j {
                evidence.push(PairEvidence {
                    i,
                    j,
                    same: same[i][j],
                    first_trace_mismatch,
                    conjugator,
                    lambda_gap,
                });
            }
        }
    }
    let symmetric = (0..k).all(|i| (0..k).all(|j| same[i][j] == same[j][i]));
    let holds = |i: usize, j: usize| same[i][j] == Some(true);
    let transitive = (0..k)
        .all(|i| (0..k).all(|j| (0..k).all(|l| !(holds(i, j) && holds(j, l)) || holds(i, l))));
    let lambdas = family
        .first()
        .is_some_and(|r| r.field().is_real() && projector.with_lambda)
        .then(|| classes.iter().map(|c| c.lambda).collect());
    Ok(SeparationMatrix {
        same,
        lambdas,
        evidence,
        symmetric,
        transitive,
    })
}

/// λ of the semisimplification, which equals λ(ρ).
pub fn lambda_class_invariant(rho: &Representation, seed: u64, budget: usize) -> Result<f64> {
    if !rho.field().is_real() {
        return Err(Error::NotRealField);
    }
    let canonical = semisimplify(rho, seed).rho_ss;
    Ok(minimize_displacement(&canonical, budget)?.lambda_est)
}
