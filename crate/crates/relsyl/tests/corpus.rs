//! Generators, fixtures, encoders, and oracles: frozen input/output pairs.

use relsyl::corpus::{
    brute_sat, encode_3sat, encode_one_in_three, fixture_model, gen_delta_ni, gen_gamma_n,
    nested_all, one_in_three_check, parse_dimacs, parse_triples, CnfInstance, CnfLit, CorpusError,
    Fixture, OneInThreeInstance, Subcase,
};
use relsyl::deciders::{decide_l3, DecideOptions};
use relsyl::decision::{Answer, Certificate};
use relsyl::semantics::{is_countermodel, model_check, oracle_consequence, OracleOutcome};
use relsyl::syntax::{parse_sentence, parse_theory, Fragment, ParseOptions, Sentence, Term, Theory};

fn theory(src: &str) -> Theory {
    let (th, warnings) = parse_theory(src, ParseOptions::default()).expect("test theory parses");
    assert!(warnings.is_empty(), "unexpected warnings: {warnings:?}");
    th
}

fn sentence(src: &str) -> Sentence {
    parse_sentence(src, ParseOptions::default()).expect("test sentence parses")
}

#[test]
fn chain_theory_matches_its_display() {
    let expected = theory(
        "nouns: a b\n\
         verbs: r1 r2\n\
         some (r1 all (r1 all a)) (r1 all (r1 all a))\n\
         all (r1 all b) (r2 all (r2 all a))\n\
         all (r2 all b) a\n",
    );
    assert_eq!(gen_gamma_n(2).unwrap(), expected);

    // One verb: just the seed and the cap.
    let expected1 = theory(
        "nouns: a b\n\
         verbs: r1\n\
         some (r1 all (r1 all a)) (r1 all (r1 all a))\n\
         all (r1 all b) a\n",
    );
    assert_eq!(gen_gamma_n(1).unwrap(), expected1);

    for n in 1..=6 {
        let th = gen_gamma_n(n).unwrap();
        assert_eq!(th.sentences.len(), n + 1);
        assert_eq!(th.verbs.len(), n);
        th.validate().unwrap();
    }
    assert!(matches!(gen_gamma_n(0), Err(CorpusError::Range(_))));
}

#[test]
fn chain_theory_link_removal() {
    // Dropping the last link for i = n means dropping the cap sentence.
    let expected = theory(
        "nouns: a b\n\
         verbs: r1 r2\n\
         some (r1 all (r1 all a)) (r1 all (r1 all a))\n\
         all (r1 all b) (r2 all (r2 all a))\n",
    );
    assert_eq!(gen_delta_ni(2, 2).unwrap(), expected);

    let expected1 = theory(
        "nouns: a b\n\
         verbs: r1 r2\n\
         some (r1 all (r1 all a)) (r1 all (r1 all a))\n\
         all (r2 all b) a\n",
    );
    assert_eq!(gen_delta_ni(2, 1).unwrap(), expected1);

    assert!(matches!(gen_delta_ni(2, 0), Err(CorpusError::Range(_))));
    assert!(matches!(gen_delta_ni(2, 3), Err(CorpusError::Range(_))));
}

#[test]
fn point_fixtures_satisfy_their_theories() {
    for n in 1..=5 {
        let gamma = gen_gamma_n(n).unwrap();
        for which in [Fixture::M1, Fixture::M2] {
            let m = fixture_model(n, &which).unwrap();
            let report = model_check(&m, &gamma).unwrap();
            assert!(report.all_satisfied, "{which:?} fails on n = {n}");
        }
        for i in 1..=n {
            let delta = gen_delta_ni(n, i).unwrap();
            let m = fixture_model(n, &Fixture::M3 { i }).unwrap();
            assert!(model_check(&m, &delta).unwrap().all_satisfied);
            // The same model witnesses that the weakened theory no longer
            // forces a to be inhabited.
            assert!(is_countermodel(&m, &delta, &sentence("some a a")).unwrap());
        }
    }
    assert!(matches!(
        fixture_model(3, &Fixture::M3 { i: 4 }),
        Err(CorpusError::Fixture(_))
    ));
    assert!(matches!(
        fixture_model(3, &Fixture::M3 { i: 0 }),
        Err(CorpusError::Fixture(_))
    ));
}

#[test]
fn four_point_fixture_denotations() {
    let a = Term::noun("a");
    let b = Term::noun("b");
    let cases: [(&[usize], Subcase); 5] = [
        (&[2, 2], Subcase::A),
        (&[3, 2], Subcase::A),
        (&[2, 1], Subcase::B),
        (&[2, 1, 1, 1], Subcase::C),
        (&[1, 1, 1, 1], Subcase::C),
    ];
    for n in [3, 5] {
        let gamma = gen_gamma_n(n).unwrap();
        for (svec, subcase) in &cases {
            let m = fixture_model(
                n,
                &Fixture::M4 {
                    svec: svec.to_vec(),
                    subcase: *subcase,
                },
            )
            .unwrap();
            assert!(
                model_check(&m, &gamma).unwrap().all_satisfied,
                "four-point model fails the chain theory for svec {svec:?}"
            );
            let eval = |t: &Term| m.eval_term(t).unwrap();
            let singleton = |e: &str| std::iter::once(e.to_string()).collect();
            assert_eq!(eval(&nested_all(&[1], a.clone())), singleton("x"));
            assert_eq!(eval(&nested_all(&[1, 1], a.clone())), singleton("y"));
            for i in 1..=n {
                assert!(eval(&nested_all(&[i], b.clone())).is_empty());
            }
            assert!(
                eval(&nested_all(svec, a.clone())).is_empty(),
                "nested term over {svec:?} should denote nothing"
            );
            // The seed witness is never under a, so the model also refutes
            // the inhabitation claims the weakened theories drop.
            assert!(is_countermodel(
                &m,
                &gamma,
                &sentence("some a (r1 all (r1 all a))")
            )
            .unwrap());
        }
    }

    let reject = |svec: &[usize], subcase: Subcase| {
        assert!(
            matches!(
                fixture_model(
                    3,
                    &Fixture::M4 {
                        svec: svec.to_vec(),
                        subcase,
                    }
                ),
                Err(CorpusError::Fixture(_))
            ),
            "expected rejection of svec {svec:?} as {subcase:?}"
        );
    };
    reject(&[1, 1], Subcase::B); // the provably inhabited seed sequence
    reject(&[2], Subcase::A); // odd length
    reject(&[], Subcase::A); // empty
    reject(&[2, 2], Subcase::B); // subcase contradicts the sequence tail
    reject(&[0, 2], Subcase::A); // verb index out of range
    reject(&[4, 2], Subcase::A); // verb index beyond n = 3
}

#[test]
fn one_in_three_encoding_shape() {
    let inst = OneInThreeInstance::new(vec![[
        "u".to_string(),
        "v".to_string(),
        "w".to_string(),
    ]])
    .unwrap();
    let (th, goal) = encode_one_in_three(&inst).unwrap();
    th.validate().unwrap();
    assert_eq!(goal, sentence("all start finish"));

    // Six chain sentences plus six co-occurrence sentences, four new nouns
    // (start, finish, y_c1, z_c1), nine verbs (three chain, three shared
    // pairs of two).
    assert_eq!(th.sentences.len(), 12);
    assert_eq!(th.nouns.len(), 7);
    assert_eq!(th.verbs.len(), 9);

    let expected: Vec<Sentence> = [
        "all start (r1_c1 all u)",
        "all (r1_c1 some u) y_c1",
        "all y_c1 (r2_c1 all v)",
        "all (r2_c1 some v) z_c1",
        "all z_c1 (r3_c1 all w)",
        "all (r3_c1 some w) finish",
        "all (r_u_v all u) (rp_u_v some v)",
        "all (r_u_v all v) (rp_u_v some u)",
        "all (r_u_w all u) (rp_u_w some w)",
        "all (r_u_w all w) (rp_u_w some u)",
        "all (r_v_w all v) (rp_v_w some w)",
        "all (r_v_w all w) (rp_v_w some v)",
    ]
    .iter()
    .map(|s| sentence(s))
    .collect();
    assert_eq!(th.sentences, expected);

    // The encoding stays in the All-only relational fragment and survives a
    // print/parse round trip.
    assert_eq!(th.fragment().unwrap(), Fragment::L3);
    let reparsed = theory(&th.to_string());
    assert_eq!(reparsed, th);
}

#[test]
fn one_in_three_rejects_bad_clauses() {
    let mk = |names: [&str; 3]| OneInThreeInstance::new(vec![names.map(str::to_string)]);
    assert!(matches!(mk(["u", "u", "w"]), Err(CorpusError::Clause(_))));
    assert!(matches!(
        mk(["start", "v", "w"]),
        Err(CorpusError::Clause(_))
    ));
    assert!(matches!(
        mk(["y_c1", "v", "w"]),
        Err(CorpusError::Clause(_))
    ));
    assert!(matches!(
        mk(["r_u_v", "v", "w"]),
        Err(CorpusError::Clause(_))
    ));
    assert!(matches!(mk(["all", "v", "w"]), Err(CorpusError::Clause(_))));
    assert!(matches!(mk(["1bad", "v", "w"]), Err(CorpusError::Clause(_))));
}

#[test]
fn one_in_three_reduction_agrees_on_small_instances() {
    // A single clause always admits a one-true assignment, so the encoding
    // must not entail its goal. Counting order makes the first variable the
    // true one.
    let inst =
        OneInThreeInstance::new(vec![["u".to_string(), "v".to_string(), "w".to_string()]])
            .unwrap();
    let picked = one_in_three_check(&inst).unwrap().expect("satisfiable");
    assert_eq!(picked["u"], true);
    assert_eq!(picked["v"], false);
    assert_eq!(picked["w"], false);

    let (th, goal) = encode_one_in_three(&inst).unwrap();
    let started = std::time::Instant::now();
    let decision = decide_l3(&th, &goal, &DecideOptions::default()).unwrap();
    eprintln!(
        "single-clause reduction query decided in {:?} ({:?} branch visits)",
        started.elapsed(),
        decision.stats.branches
    );
    assert_eq!(decision.answer, Answer::No);
    match &decision.certificate {
        Some(Certificate::Model(m)) => {
            assert!(is_countermodel(m, &th, &goal).unwrap());
        }
        other => panic!("expected a countermodel, got {other:?}"),
    }

    // Repeating the clause mints a second chain over fresh verbs but leaves
    // the decision unchanged.
    let twice = OneInThreeInstance::new(vec![
        ["u".to_string(), "v".to_string(), "w".to_string()],
        ["u".to_string(), "v".to_string(), "w".to_string()],
    ])
    .unwrap();
    assert!(one_in_three_check(&twice).unwrap().is_some());
    let (th2, goal2) = encode_one_in_three(&twice).unwrap();
    let started = std::time::Instant::now();
    let decision2 = decide_l3(&th2, &goal2, &DecideOptions::default()).unwrap();
    eprintln!(
        "doubled-clause reduction query decided in {:?} ({:?} branch visits)",
        started.elapsed(),
        decision2.stats.branches
    );
    assert_eq!(decision2.answer, Answer::No);
}

#[test]
fn threesat_encoding_shape() {
    // Worked example: the clause (P ∨ Q ∨ ¬S).
    let inst = CnfInstance::new(vec![[
        CnfLit::pos("P"),
        CnfLit::pos("Q"),
        CnfLit::neg("S"),
    ]])
    .unwrap();
    let (th, goal) = encode_3sat(&inst).unwrap();
    th.validate().unwrap();
    let expected: Vec<Sentence> = [
        "all (not p) (r1 all y1)",
        "all (not q) (r1 all (not y1))",
        "all (r1 all z1) (not s)",
    ]
    .iter()
    .map(|s| sentence(s))
    .collect();
    assert_eq!(th.sentences, expected);
    // The variable q claims the usual goal noun, so the goal falls back to
    // the first free suffix.
    assert_eq!(goal, sentence("all q_1 (not q_1)"));

    // Without the collision the goal uses the plain fresh noun.
    let plain = CnfInstance::new(vec![[
        CnfLit::pos("A"),
        CnfLit::pos("B"),
        CnfLit::neg("C"),
    ]])
    .unwrap();
    let (th2, goal2) = encode_3sat(&plain).unwrap();
    th2.validate().unwrap();
    assert_eq!(goal2, sentence("all q (not q)"));
    assert_eq!(th2.sentences[0], sentence("all (not a) (r1 all y1)"));

    // Negated first literal gives a doubled complement, kept as written.
    let neg_first = CnfInstance::new(vec![[
        CnfLit::neg("A"),
        CnfLit::pos("B"),
        CnfLit::pos("C"),
    ]])
    .unwrap();
    let (th3, _) = encode_3sat(&neg_first).unwrap();
    assert_eq!(th3.sentences[0], sentence("all (not (not a)) (r1 all y1)"));

    let reparsed = theory(&th2.to_string());
    assert_eq!(reparsed, th2);
}

#[test]
fn threesat_satisfiability_shows_up_as_a_one_point_countermodel() {
    // Satisfiable: one clause.
    let sat = CnfInstance::new(vec![[
        CnfLit::pos("A"),
        CnfLit::pos("B"),
        CnfLit::neg("C"),
    ]])
    .unwrap();
    assert!(brute_sat(&sat).unwrap().is_some());
    let (th, goal) = encode_3sat(&sat).unwrap();
    match oracle_consequence(&th, &goal, 1, 1 << 20).unwrap() {
        OracleOutcome::Countermodel(m) => {
            assert_eq!(m.domain.len(), 1);
            assert!(is_countermodel(&m, &th, &goal).unwrap());
        }
        other => panic!("expected a one-point countermodel, got {other:?}"),
    }

    // Unsatisfiable: force and forbid the same variable.
    let unsat = CnfInstance::new(vec![
        [CnfLit::pos("P"), CnfLit::pos("P"), CnfLit::pos("P")],
        [CnfLit::neg("P"), CnfLit::neg("P"), CnfLit::neg("P")],
    ])
    .unwrap();
    assert_eq!(brute_sat(&unsat).unwrap(), None);
    let (th, goal) = encode_3sat(&unsat).unwrap();
    assert!(matches!(
        oracle_consequence(&th, &goal, 1, 1 << 20).unwrap(),
        OracleOutcome::NoCounterexampleUpTo(1)
    ));
}

#[test]
fn brute_force_oracle_basics() {
    let empty = CnfInstance::new(Vec::new()).unwrap();
    assert_eq!(brute_sat(&empty).unwrap(), Some(Default::default()));

    let empty_triples = OneInThreeInstance::new(Vec::new()).unwrap();
    assert_eq!(
        one_in_three_check(&empty_triples).unwrap(),
        Some(Default::default())
    );

    // The variable cap is enforced rather than silently ground through.
    let wide = CnfInstance::new(
        (0..7)
            .map(|i| {
                [
                    CnfLit::pos(format!("v{}a", i)),
                    CnfLit::pos(format!("v{}b", i)),
                    CnfLit::pos(format!("v{}c", i)),
                ]
            })
            .collect(),
    )
    .unwrap();
    assert!(matches!(
        brute_sat(&wide),
        Err(CorpusError::TooManyVariables { cap: 20, have: 21 })
    ));
}

#[test]
fn dimacs_reader_reads_and_rejects() {
    let inst = parse_dimacs(
        "c a comment\n\
         p cnf 3 2\n\
         1 -2 3 0\n\
         -1 2 -3 0\n",
    )
    .unwrap();
    assert_eq!(inst.variables, vec!["p1", "p2", "p3"]);
    assert_eq!(inst.clauses.len(), 2);
    assert_eq!(inst.clauses[0][1], CnfLit::neg("p2"));

    // Three literals per clause, enforced.
    assert!(matches!(
        parse_dimacs("1 -2 0\n"),
        Err(CorpusError::Parse(_))
    ));
    // Header consistency, both directions.
    assert!(matches!(
        parse_dimacs("p cnf 1 1\n1 -2 3 0\n"),
        Err(CorpusError::Parse(_))
    ));
    assert!(matches!(
        parse_dimacs("p cnf 3 2\n1 -2 3 0\n"),
        Err(CorpusError::Parse(_))
    ));
    assert!(matches!(
        parse_dimacs("1 two 3 0\n"),
        Err(CorpusError::Parse(_))
    ));
}

#[test]
fn triple_reader_reads_and_rejects() {
    let inst = parse_triples(
        "c names or positive numbers\n\
         u v w 0\n\
         1 2 3\n",
    )
    .unwrap();
    assert_eq!(inst.clauses[0], ["u", "v", "w"].map(str::to_string));
    assert_eq!(inst.clauses[1], ["p1", "p2", "p3"].map(str::to_string));

    assert!(matches!(
        parse_triples("u v 0\n"),
        Err(CorpusError::Parse(_))
    ));
    assert!(matches!(
        parse_triples("p cnf 3 1\nu v w 0\n"),
        Err(CorpusError::Parse(_))
    ));
    assert!(matches!(
        parse_triples("u u w 0\n"),
        Err(CorpusError::Clause(_))
    ));
}
