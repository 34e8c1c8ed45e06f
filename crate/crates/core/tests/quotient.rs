mod common;

use common::*;
use crlocal::arith::Field;
use crlocal::quotient::{same_point_in_Xcr, separation_experiment, Projector};
use crlocal::reptheory::{semisimplify, DEFAULT_SEED};

const CONJUGATIONS: usize = 20;

#[test]
fn projection_is_conjugation_invariant() {
    let mut r = rng(31);
    for item in exact_corpus() {
        for _ in 0..CONJUGATIONS {
            let g = random_conjugator(item.rho.field(), item.rho.dim(), &mut r);
            let moved = item.rho.conjugate(&g).unwrap();
            let s = same_point_in_Xcr(&item.rho, &moved, DEFAULT_SEED).unwrap();
            assert_eq!(s.verdict(), Some(true), "{}: {s:?}", item.kind);
        }
    }
}

#[test]
fn semisimplification_lies_in_the_same_class() {
    for item in exact_corpus().into_iter().chain(real_corpus()) {
        let ss = semisimplify(&item.rho, DEFAULT_SEED).rho_ss;
        let s = same_point_in_Xcr(&item.rho, &ss, DEFAULT_SEED).unwrap();
        assert_eq!(s.verdict(), Some(true), "{}", item.kind);
    }
}

#[test]
fn distinct_lambdas_are_separated() {
    let fam: Vec<_> = [0.0, 0.5, 1.0, 1.7, 2.5, 3.5]
        .iter()
        .map(|&s: &f64| {
            rep(
                Field::Real,
                vec![
                    real(&[&[s.exp(), 0.0], &[0.0, (-s).exp()]]),
                    real(&[&[1.0, 0.0], &[0.0, 1.0]]),
                ],
            )
        })
        .collect();
    let m = separation_experiment(&fam, &Projector::default()).unwrap();
    let lambdas: Vec<f64> = m
        .lambdas
        .clone()
        .unwrap()
        .into_iter()
        .map(Option::unwrap)
        .collect();
    assert!(lambdas.last().unwrap() <= &10.0);
    for i in 0..fam.len() {
        for j in 0..fam.len() {
            if (lambdas[i] - lambdas[j]).abs() > 1e-2 {
                assert_eq!(m.same[i][j], Some(false), "({i},{j})");
            }
        }
    }
    assert!(m.symmetric && m.transitive);
}

#[test]
fn separation_is_deterministic() {
    let (fam, _) = exact_family();
    let a = separation_experiment(&fam, &Projector::default()).unwrap();
    let b = separation_experiment(&fam, &Projector::default()).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}
