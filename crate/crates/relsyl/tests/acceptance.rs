//! End-to-end acceptance gate: one test per shipping criterion, with pinned
//! tolerances. Each test exercises the public API the way a user would.

use std::time::{Duration, Instant};

use relsyl::corpus::{fixture_model, gen_delta_ni, gen_gamma_n, Fixture};
use relsyl::deciders::{decide, decide_l2plus, DecideOptions};
use relsyl::decision::{Answer, Certificate};
use relsyl::proofs::check_proof;
use relsyl::rules::{rule_set, RuleSetName};
use relsyl::semantics::{is_countermodel, model_check};
use relsyl::syntax::{parse_sentence, ParseOptions, Sentence};

fn sentence(src: &str) -> Sentence {
    parse_sentence(src, ParseOptions::default()).expect("test sentence parses")
}

/// Criterion 1: the chain family up to n = 5 resolves both ways — the full
/// theories entail `some a a` with checker-accepted proofs, every weakened
/// theory refutes it with a model-checked countermodel — within ten seconds
/// for the whole family.
#[test]
fn chain_family_resolves_both_ways_quickly() {
    let budget = Duration::from_secs(10);
    let started = Instant::now();
    let goal = sentence("some a a");
    let opts = DecideOptions::default();

    for n in 1..=5 {
        let gamma = gen_gamma_n(n).unwrap();
        let decision = decide_l2plus(&gamma, &goal, &opts).unwrap();
        assert_eq!(decision.answer, Answer::Yes, "chain theory n = {n}");
        match &decision.certificate {
            Some(Certificate::Proof(proof)) => {
                check_proof(&gamma.sentences, rule_set(RuleSetName::L2Plus), proof)
                    .expect("returned proof must check");
            }
            other => panic!("expected a proof certificate, got {other:?}"),
        }

        for i in 1..=n {
            let delta = gen_delta_ni(n, i).unwrap();
            let decision = decide(&delta, &goal, &opts).unwrap();
            assert_eq!(decision.answer, Answer::No, "weakened chain n = {n}, i = {i}");
            match &decision.certificate {
                Some(Certificate::Model(m)) => {
                    assert!(is_countermodel(m, &delta, &goal).unwrap());
                }
                other => panic!("expected a countermodel, got {other:?}"),
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "family took {elapsed:?}, budget is {budget:?}"
    );
    eprintln!("chain family decided in {elapsed:?}");
}

/// Criterion 2: the hand-built fixture models satisfy exactly the theories
/// the construction claims, including the four-point model's term
/// denotations, for every n up to 5.
#[test]
fn fixtures_satisfy_exactly_what_they_claim() {
    use relsyl::corpus::{nested_all, Subcase};
    use relsyl::syntax::Term;

    let a = Term::noun("a");
    let b = Term::noun("b");
    for n in 1..=5 {
        let gamma = gen_gamma_n(n).unwrap();
        for which in [Fixture::M1, Fixture::M2] {
            let m = fixture_model(n, &which).unwrap();
            assert!(model_check(&m, &gamma).unwrap().all_satisfied);
        }
        for i in 1..=n {
            let delta = gen_delta_ni(n, i).unwrap();
            let m = fixture_model(n, &Fixture::M3 { i }).unwrap();
            assert!(model_check(&m, &delta).unwrap().all_satisfied);
            assert!(is_countermodel(&m, &delta, &sentence("some a a")).unwrap());
        }
        let four_point_cases: [(Vec<usize>, Subcase); 3] = [
            (vec![2, 2], Subcase::A),
            (vec![2, 1], Subcase::B),
            (vec![2, 1, 1, 1], Subcase::C),
        ];
        for (svec, subcase) in four_point_cases {
            if svec.iter().any(|&j| j > n) {
                continue;
            }
            let m = fixture_model(
                n,
                &Fixture::M4 {
                    svec: svec.clone(),
                    subcase,
                },
            )
            .unwrap();
            assert!(model_check(&m, &gamma).unwrap().all_satisfied);
            let eval = |t: &Term| m.eval_term(t).unwrap();
            assert_eq!(
                eval(&nested_all(&[1], a.clone())),
                std::iter::once("x".to_string()).collect()
            );
            assert_eq!(
                eval(&nested_all(&[1, 1], a.clone())),
                std::iter::once("y".to_string()).collect()
            );
            for j in 1..=n {
                assert!(eval(&nested_all(&[j], b.clone())).is_empty());
            }
            assert!(eval(&nested_all(&svec, a.clone())).is_empty());
        }
    }
}
