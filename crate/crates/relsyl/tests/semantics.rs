//! Model evaluation, sentence satisfaction, the exhaustive consequence
//! oracle, and reproducible random models.

use std::collections::{BTreeMap, BTreeSet};

use relsyl::corpus::{fixture_model, gen_gamma_n, Fixture, Subcase};
use relsyl::semantics::{
    is_countermodel, model_check, oracle_candidates, oracle_consequence, oracle_max_feasible_size,
    random_model, FiniteModel, OracleOutcome, SemanticsError, DEFAULT_ORACLE_CAP,
};
use relsyl::syntax::{parse_sentence, parse_term, parse_theory, ParseOptions, Sentence, Term, Theory};

fn sentence(src: &str) -> Sentence {
    parse_sentence(src, ParseOptions::default()).expect(src)
}

fn term(src: &str) -> Term {
    parse_term(src, ParseOptions::default()).expect(src)
}

fn theory(src: &str) -> Theory {
    parse_theory(src, ParseOptions::default()).expect(src).0
}

fn set(elems: &[&str]) -> BTreeSet<String> {
    elems.iter().map(|s| s.to_string()).collect()
}

/// Hand-built copy of the four-point fixture in its "last verb differs"
/// layout for two verbs: domain {w, x, y, z}, a = {w}, b full,
/// r1 = {(x,w), (y,x)}, r2 = {(z,w)}.
fn four_point_model() -> FiniteModel {
    let mut nouns: BTreeMap<_, BTreeSet<String>> = BTreeMap::new();
    nouns.insert("a".into(), set(&["w"]));
    nouns.insert("b".into(), set(&["w", "x", "y", "z"]));
    let mut verbs: BTreeMap<_, BTreeSet<(String, String)>> = BTreeMap::new();
    verbs.insert(
        "r1".into(),
        [("x", "w"), ("y", "x")]
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .into_iter()
            .collect(),
    );
    verbs.insert(
        "r2".into(),
        std::iter::once(("z".to_string(), "w".to_string())).collect(),
    );
    FiniteModel {
        domain: ["w", "x", "y", "z"].map(str::to_string).to_vec(),
        nouns,
        verbs,
    }
}

// ---------------------------------------------------------------------------
// Term evaluation
// ---------------------------------------------------------------------------

#[test]
fn universal_verb_terms_climb_the_four_point_model() {
    let m = four_point_model();
    assert_eq!(m.eval_term(&term("(r1 all a)")).unwrap(), set(&["x"]));
    assert_eq!(
        m.eval_term(&term("(r1 all (r1 all a))")).unwrap(),
        set(&["y"])
    );
}

#[test]
fn empty_bodies_make_universal_terms_total_and_existential_terms_empty() {
    let mut m = four_point_model();
    m.nouns.insert("a".into(), BTreeSet::new());
    let everyone: BTreeSet<String> = m.domain.iter().cloned().collect();
    assert_eq!(m.eval_term(&term("(r1 all a)")).unwrap(), everyone);
    assert_eq!(m.eval_term(&term("(r1 some a)")).unwrap(), BTreeSet::new());
}

#[test]
fn double_complement_is_identity() {
    let m = four_point_model();
    for t in ["a", "b", "(r1 all a)", "(r2 some b)"] {
        assert_eq!(
            m.eval_term(&term(&format!("(not (not {t}))"))).unwrap(),
            m.eval_term(&term(t)).unwrap(),
            "{t}"
        );
    }
}

#[test]
fn evaluation_requires_interpreted_symbols() {
    let m = four_point_model();
    let err = m.eval_term(&term("zz")).unwrap_err();
    assert!(matches!(err, SemanticsError::MissingSymbol { .. }), "{err}");
    let err = m.eval_term(&term("(r9 some a)")).unwrap_err();
    assert!(matches!(err, SemanticsError::MissingSymbol { .. }), "{err}");
}

// ---------------------------------------------------------------------------
// Sentence satisfaction
// ---------------------------------------------------------------------------

#[test]
fn empty_denotations_satisfy_all_and_refute_some() {
    let mut nouns: BTreeMap<_, BTreeSet<String>> = BTreeMap::new();
    nouns.insert("p".into(), BTreeSet::new());
    nouns.insert("q".into(), BTreeSet::new());
    let m = FiniteModel {
        domain: vec!["*".into()],
        nouns,
        verbs: BTreeMap::new(),
    };
    assert!(m.satisfies(&sentence("all p q")).unwrap());
    assert!(!m.satisfies(&sentence("some p p")).unwrap());
}

#[test]
fn the_four_point_fixture_satisfies_the_chain_family() {
    let gamma = gen_gamma_n(2).unwrap();
    let m = fixture_model(
        2,
        &Fixture::M4 {
            svec: vec![1, 2],
            subcase: Subcase::A,
        },
    )
    .unwrap();
    assert_eq!(m, four_point_model());
    let report = model_check(&m, &gamma).unwrap();
    assert!(report.all_satisfied, "fixture fails M4: {:?}", report.results);
}

#[test]
fn singleton_meets_follow_the_intersection_reading() {
    let mut nouns: BTreeMap<_, BTreeSet<String>> = BTreeMap::new();
    nouns.insert("p".into(), set(&["*"]));
    let m = FiniteModel {
        domain: vec!["*".into()],
        nouns,
        verbs: BTreeMap::new(),
    };
    assert!(m.satisfies(&sentence("< p p >")).unwrap());
    assert!(!m.satisfies(&sentence("[ p ]")).unwrap());
}

#[test]
fn four_place_sentences_are_disjunctions() {
    let mut nouns: BTreeMap<_, BTreeSet<String>> = BTreeMap::new();
    nouns.insert("a".into(), set(&["0"]));
    nouns.insert("b".into(), BTreeSet::new());
    let m = FiniteModel {
        domain: vec!["0".into()],
        nouns,
        verbs: BTreeMap::new(),
    };
    // Left disjunct false (a ⊄ b), right true (a ∩ a ≠ ∅).
    assert!(m.satisfies(&sentence("all a b or some a a")).unwrap());
    // Both false.
    assert!(!m.satisfies(&sentence("all a b or some b b")).unwrap());
    // Left true vacuously.
    assert!(m.satisfies(&sentence("all b a or some b b")).unwrap());
}

// ---------------------------------------------------------------------------
// The consequence oracle
// ---------------------------------------------------------------------------

#[test]
fn oracle_finds_the_empty_countermodel_first() {
    let t = theory("nouns: p q\nall p q");
    let goal = sentence("some p p");
    match oracle_consequence(&t, &goal, 1, DEFAULT_ORACLE_CAP).unwrap() {
        OracleOutcome::Countermodel(m) => {
            // Sizes are enumerated from zero, so the empty model — which
            // satisfies the premise vacuously and refutes the goal — wins.
            assert!(m.domain.is_empty());
            assert!(is_countermodel(&m, &t, &goal).unwrap());
        }
        other => panic!("expected a countermodel, got {other:?}"),
    }
}

#[test]
fn oracle_cannot_refute_the_reflexivity_axiom() {
    let t = theory("nouns: x");
    for k in 0..=2 {
        assert_eq!(
            oracle_consequence(&t, &sentence("all x x"), k, DEFAULT_ORACLE_CAP).unwrap(),
            OracleOutcome::NoCounterexampleUpTo(k)
        );
    }
}

#[test]
fn oracle_reports_the_first_two_point_countermodel() {
    let t = theory("nouns: p q\nsome p q");
    let goal = sentence("all p q");
    match oracle_consequence(&t, &goal, 2, DEFAULT_ORACLE_CAP).unwrap() {
        OracleOutcome::Countermodel(m) => {
            assert_eq!(m.domain, vec!["e0".to_string(), "e1".to_string()]);
            assert_eq!(m.nouns["p"], set(&["e0", "e1"]));
            assert_eq!(m.nouns["q"], set(&["e0"]));
        }
        other => panic!("expected a countermodel, got {other:?}"),
    }
}

#[test]
fn oracle_countermodels_survive_reverification() {
    let theories = [
        ("nouns: p q\nsome p q", "all p q"),
        ("nouns: p q\nverbs: r\nall p (r some q)", "some q q"),
        ("nouns: p q\nverbs: r\nsome p (r all q)", "some p q"),
        ("nouns: p\nverbs: r\nall p (r all p)", "all (r all p) p"),
    ];
    for (src, goal_src) in theories {
        let t = theory(src);
        let goal = sentence(goal_src);
        if let OracleOutcome::Countermodel(m) =
            oracle_consequence(&t, &goal, 2, DEFAULT_ORACLE_CAP).unwrap()
        {
            assert!(m.validate().is_ok());
            assert!(is_countermodel(&m, &t, &goal).unwrap(), "{src} vs {goal_src}");
        }
    }
}

#[test]
fn oracle_budget_is_enforced() {
    let t = theory("nouns: p q\nverbs: r s\nall p q");
    let candidates = oracle_candidates(&t, 3);
    let err = oracle_consequence(&t, &sentence("some p p"), 3, candidates - 1).unwrap_err();
    assert!(matches!(err, SemanticsError::Budget { .. }), "{err}");
    assert!(oracle_consequence(&t, &sentence("some p p"), 3, candidates).is_ok());
}

#[test]
fn feasible_size_is_the_largest_within_budget() {
    let t = theory("nouns: p q\nverbs: r\nall p q");
    let limit = 6;
    for cap in [100u128, 10_000, 1 << 30] {
        let m = oracle_max_feasible_size(&t, cap, limit);
        assert!(oracle_candidates(&t, m) <= cap);
        if m < limit {
            assert!(oracle_candidates(&t, m + 1) > cap);
        }
    }
}

#[test]
fn oracle_requires_declared_vocabulary() {
    let t = theory("nouns: p");
    let err = oracle_consequence(&t, &sentence("some p q"), 1, DEFAULT_ORACLE_CAP).unwrap_err();
    assert!(matches!(err, SemanticsError::MissingSymbol { .. }), "{err}");
}

// ---------------------------------------------------------------------------
// Random models
// ---------------------------------------------------------------------------

#[test]
fn empty_vocabulary_and_zero_bound_give_the_empty_model() {
    let m = random_model(&[], &[], 0, 7);
    assert!(m.domain.is_empty());
    assert!(m.nouns.is_empty());
    assert!(m.verbs.is_empty());
}

#[test]
fn random_models_are_reproducible_from_the_seed() {
    let nouns = ["p".into(), "q".into()];
    let verbs = ["r".into()];
    for seed in 0..20 {
        let a = random_model(&nouns, &verbs, 4, seed);
        let b = random_model(&nouns, &verbs, 4, seed);
        assert_eq!(a, b);
    }
    let different = (0..20)
        .map(|seed| random_model(&nouns, &verbs, 4, seed))
        .collect::<Vec<_>>();
    assert!(different.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn random_models_interpret_the_whole_vocabulary_within_bounds() {
    let nouns = ["p".into()];
    let verbs = ["r".into()];
    for seed in 0..50 {
        let m = random_model(&nouns, &verbs, 3, seed);
        assert!(m.domain.len() <= 3);
        assert!(m.nouns.contains_key("p"));
        assert!(m.verbs.contains_key("r"));
        assert!(m.validate().is_ok());
    }
}

// ---------------------------------------------------------------------------
// Semantic laws on random models
// ---------------------------------------------------------------------------

fn law_pool() -> Vec<Term> {
    [
        "p",
        "q",
        "(not p)",
        "(r all p)",
        "(r some q)",
        "(r all (not q))",
        "(not (r some p))",
    ]
    .iter()
    .map(|s| term(s))
    .collect()
}

#[test]
fn universal_terms_are_antitone_and_existential_terms_monotone() {
    let nouns = ["p".into(), "q".into()];
    let verbs = ["r".into()];
    let pool = law_pool();
    let mut applicable = 0usize;
    for seed in 0..200 {
        let m = random_model(&nouns, &verbs, 3, seed);
        for x in &pool {
            for y in &pool {
                let ex = m.eval_term(x).unwrap();
                let ey = m.eval_term(y).unwrap();
                if !ex.is_subset(&ey) {
                    continue;
                }
                applicable += 1;
                let all_y = m.eval_term(&Term::all_of("r", y.clone())).unwrap();
                let all_x = m.eval_term(&Term::all_of("r", x.clone())).unwrap();
                assert!(all_y.is_subset(&all_x), "antitone fails: {x} ⊆ {y}");
                let some_x = m.eval_term(&Term::some_of("r", x.clone())).unwrap();
                let some_y = m.eval_term(&Term::some_of("r", y.clone())).unwrap();
                assert!(some_x.is_subset(&some_y), "monotone fails: {x} ⊆ {y}");
            }
        }
    }
    assert!(applicable > 1_000, "only {applicable} subset pairs arose");
}

#[test]
fn complements_partition_the_domain() {
    let nouns = ["p".into(), "q".into()];
    let verbs = ["r".into()];
    let pool = law_pool();
    for seed in 0..100 {
        let m = random_model(&nouns, &verbs, 4, seed);
        let everyone: BTreeSet<String> = m.domain.iter().cloned().collect();
        for x in &pool {
            let ex = m.eval_term(x).unwrap();
            let not_x = m.eval_term(&Term::not(x.clone())).unwrap();
            assert_eq!(
                m.eval_term(&Term::not(Term::not(x.clone()))).unwrap(),
                ex,
                "double complement of {x}"
            );
            assert_eq!(ex.union(&not_x).cloned().collect::<BTreeSet<_>>(), everyone);
            assert!(ex.intersection(&not_x).next().is_none());
        }
    }
}

#[test]
fn a_term_never_meets_its_own_complement() {
    let nouns = ["p".into(), "q".into()];
    let verbs = ["r".into()];
    for seed in 0..100 {
        let m = random_model(&nouns, &verbs, 4, seed);
        for x in law_pool() {
            let (s, _) = Sentence::empty_meet(vec![x.clone(), Term::not(x)]);
            assert!(m.satisfies(&s).unwrap());
        }
    }
}
