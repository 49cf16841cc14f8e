//! End-to-end tests for the fragment deciders: frozen example queries with
//! certificate re-checking on both the positive and negative sides.

use relsyl::deciders::{
    decide, decide_l1, decide_l2plus, decide_l3, decide_l35, validate_case_certificate,
    DecideError, DecideOptions,
};
use relsyl::decision::{Answer, Certificate};
use relsyl::proofs::check_proof;
use relsyl::rules::{rule_set, RuleSetName};
use relsyl::semantics::is_countermodel;
use relsyl::syntax::{parse_sentence, parse_theory, ParseOptions, Sentence, Theory};

fn theory(src: &str) -> Theory {
    parse_theory(src, ParseOptions::default())
        .expect("theory parses")
        .0
}

fn goal(src: &str) -> Sentence {
    parse_sentence(src, ParseOptions::default()).expect("sentence parses")
}

fn opts() -> DecideOptions {
    DecideOptions::default()
}

#[test]
fn all_only_yes_with_checkable_proof() {
    let t = theory("nouns: x y z\nverbs: r\nall x y\nall y z");
    let g = goal("all (r all z) (r all x)");
    let d = decide_l1(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::Yes);
    let Some(Certificate::Proof(p)) = &d.certificate else {
        panic!("expected a proof certificate");
    };
    assert_eq!(p.conclusion, g);
    check_proof(&t.sentences, rule_set(RuleSetName::L1Core), p).expect("proof checks");
}

#[test]
fn all_only_reflexivity_from_nothing() {
    let t = theory("nouns: p");
    let g = goal("all p p");
    let d = decide_l1(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::Yes);
    let Some(Certificate::Proof(p)) = &d.certificate else {
        panic!("expected a proof certificate");
    };
    assert_eq!(p.rule, "AXIOM");
    assert!(p.children.is_empty());
}

#[test]
fn all_only_no_with_checked_countermodel() {
    let t = theory("nouns: p q\nall p q");
    let g = goal("all q p");
    let d = decide_l1(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::No);
    let Some(Certificate::Model(m)) = &d.certificate else {
        panic!("expected a countermodel");
    };
    assert!(is_countermodel(m, &t, &g).expect("model evaluates"));
}

#[test]
fn all_only_rejects_some_sentences() {
    let t = theory("nouns: p q\nsome p q");
    let g = goal("all q p");
    let err = decide_l1(&t, &g, &opts()).unwrap_err();
    assert!(matches!(err, DecideError::Fragment { .. }));
}

#[test]
fn all_some_disjunctive_case_analysis_yes() {
    let t = theory(
        "nouns: a c d x y\nverbs: r\nsome c d\nall a x\nall a y\nall (r all a) x\nall (r all a) y",
    );
    let g = goal("some x y");
    let d = decide_l2plus(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::Yes);
    let Some(Certificate::Proof(p)) = &d.certificate else {
        panic!("expected a proof certificate");
    };
    assert_eq!(p.conclusion, g);
    check_proof(&t.sentences, rule_set(RuleSetName::L2Plus), p).expect("proof checks");
}

#[test]
fn all_some_no_for_some_goal() {
    let t = theory("nouns: p q\nverbs: r\nall p q");
    let g = goal("some p q");
    let d = decide_l2plus(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::No);
    let Some(Certificate::Model(m)) = &d.certificate else {
        panic!("expected a countermodel");
    };
    assert!(is_countermodel(m, &t, &g).expect("model evaluates"));
}

#[test]
fn all_some_no_for_all_goal() {
    let t = theory("nouns: p q\nsome p p\nsome q q");
    let g = goal("all p q");
    let d = decide_l2plus(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::No);
    let Some(Certificate::Model(m)) = &d.certificate else {
        panic!("expected a countermodel");
    };
    assert!(is_countermodel(m, &t, &g).expect("model evaluates"));
}

#[test]
fn relational_some_split_yes() {
    let t = theory("nouns: p q\nverbs: r\nsome p p\nall p (r some q)");
    let g = goal("some q q");
    let d = decide_l35(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::Yes);
    let Some(Certificate::Cases(cert)) = &d.certificate else {
        panic!("expected a case certificate");
    };
    validate_case_certificate(&t, &g, cert, &opts()).expect("certificate validates");
}

#[test]
fn relational_some_split_no() {
    let t = theory("nouns: p q\nverbs: r\nall p (r some q)");
    let g = goal("some q q");
    let d = decide_l35(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::No);
    let Some(Certificate::Model(m)) = &d.certificate else {
        panic!("expected a countermodel");
    };
    assert!(is_countermodel(m, &t, &g).expect("model evaluates"));
}

#[test]
fn relational_some_split_empty_theory_no() {
    let t = theory("nouns: p");
    let g = goal("some p p");
    let d = decide_l35(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::No);
    let Some(Certificate::Model(m)) = &d.certificate else {
        panic!("expected a countermodel");
    };
    assert!(is_countermodel(m, &t, &g).expect("model evaluates"));
}

#[test]
fn relational_all_split_trivial_yes() {
    let t = theory("nouns: p");
    let g = goal("all p p");
    let d = decide_l3(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::Yes);
}

#[test]
fn relational_all_split_transitivity_yes() {
    let t = theory("nouns: p q s\nall p q\nall q s");
    let g = goal("all p s");
    let d = decide_l3(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::Yes);
    match &d.certificate {
        Some(Certificate::Proof(p)) => {
            assert_eq!(p.rule, "BARBARA");
            check_proof(&t.sentences, rule_set(RuleSetName::L1Core), p).expect("proof checks");
        }
        other => panic!("expected a plain proof for the verb-free input, got {other:?}"),
    }
}

#[test]
fn relational_all_split_mixing_yes() {
    let t = theory("nouns: x y\nverbs: r s\nall (r all y) (r some y)\nall y (r some x)");
    let g = goal("all (s all x) (s some x)");
    let d = decide_l3(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::Yes);
    let Some(Certificate::Cases(cert)) = &d.certificate else {
        panic!("expected a case certificate");
    };
    validate_case_certificate(&t, &g, cert, &opts()).expect("certificate validates");
}

#[test]
fn dispatcher_routes_by_features() {
    let t = theory("nouns: p q\nall p q");
    let g = goal("all q p");
    let d = decide(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::No);

    let t = theory("nouns: p q\nverbs: r\nsome p p\nall p (r some q)");
    let g = goal("some q q");
    let d = decide(&t, &g, &opts()).expect("decider runs");
    assert_eq!(d.answer, Answer::Yes);
    assert!(matches!(d.certificate, Some(Certificate::Cases(_))));
}

#[test]
fn branch_budget_is_enforced() {
    let t = theory("nouns: p q\nverbs: r\nall p (r some q)");
    let g = goal("some q q");
    let tight = DecideOptions {
        branch_cap: 2,
        ..DecideOptions::default()
    };
    let err = decide_l35(&t, &g, &tight).unwrap_err();
    assert!(matches!(err, DecideError::BranchBudget { .. }));
}
