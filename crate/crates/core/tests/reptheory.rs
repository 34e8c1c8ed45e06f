mod common;

use proptest::prelude::*;

use common::*;
use crlocal::reptheory::{
    are_conjugate_ss, is_cr, is_nonparabolic, semisimplify, trace_fingerprint, Conjugacy,
    DEFAULT_SEED,
};

#[test]
fn nonparabolic_implies_cr() {
    for item in exact_corpus() {
        if is_nonparabolic(&item.rho, DEFAULT_SEED).nonparabolic {
            assert!(is_cr(&item.rho, DEFAULT_SEED), "{}", item.kind);
        }
    }
}

#[test]
fn semisimplification_is_cr_and_idempotent() {
    for item in exact_corpus() {
        let ss = semisimplify(&item.rho, DEFAULT_SEED).rho_ss;
        assert!(is_cr(&ss, DEFAULT_SEED), "{}", item.kind);
        let ss2 = semisimplify(&ss, DEFAULT_SEED).rho_ss;
        assert!(
            matches!(
                are_conjugate_ss(&ss, &ss2, DEFAULT_SEED),
                Ok(Conjugacy::Conjugate(_))
            ),
            "{}",
            item.kind
        );
    }
}

#[test]
fn semisimplification_preserves_word_traces() {
    for item in exact_corpus() {
        let ss = semisimplify(&item.rho, DEFAULT_SEED).rho_ss;
        assert_eq!(
            trace_fingerprint(&ss, 6),
            trace_fingerprint(&item.rho, 6),
            "{}",
            item.kind
        );
    }
}

#[test]
fn splitting_and_trace_form_oracles() {
    for item in exact_corpus() {
        let got = is_cr(&item.rho, DEFAULT_SEED);
        assert_eq!(got, splitting_oracle(&item.rho), "{}", item.kind);
        assert_eq!(got, item.cr, "{}", item.kind);
        if item.rho.field().characteristic() == 0 {
            assert_eq!(got, trace_form_oracle(&item.rho), "{}", item.kind);
        }
    }
}

#[test]
fn real_corpus_cr_labels() {
    for item in real_corpus() {
        assert_eq!(is_cr(&item.rho, DEFAULT_SEED), item.cr, "{}", item.kind);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn cr_is_conjugation_invariant(idx in 0usize..60, seed in any::<u64>()) {
        let item = &exact_corpus()[idx];
        let g = random_conjugator(item.rho.field(), item.rho.dim(), &mut rng(seed));
        let moved = item.rho.conjugate(&g).unwrap();
        prop_assert_eq!(is_cr(&moved, DEFAULT_SEED), item.cr);
        prop_assert_eq!(trace_fingerprint(&moved, 4), trace_fingerprint(&item.rho, 4));
    }
}
