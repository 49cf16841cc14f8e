//! Parsing, printing, term closures, and fragment detection.

use indexmap::IndexSet;
use proptest::prelude::*;
use relsyl::saturation::{all_of_extension, occurring_verbs, subterm_closure};
use relsyl::syntax::{
    parse_sentence, parse_term, parse_theory, Features, Fragment, Ident, ParseOptions, Sentence,
    Term, Theory,
};

fn opts() -> ParseOptions {
    ParseOptions::default()
}

fn sentence(src: &str) -> Sentence {
    parse_sentence(src, opts()).expect(src)
}

fn term(src: &str) -> Term {
    parse_term(src, opts()).expect(src)
}

fn theory(src: &str) -> Theory {
    let (t, warnings) = parse_theory(src, opts()).expect(src);
    assert!(warnings.is_empty(), "unexpected warnings: {warnings:?}");
    t
}

fn term_set(srcs: &[&str]) -> IndexSet<Term> {
    srcs.iter().map(|s| term(s)).collect()
}

// ---------------------------------------------------------------------------
// Parsing theories
// ---------------------------------------------------------------------------

#[test]
fn parses_a_single_all_sentence_theory() {
    let t = theory("nouns: p q\nverbs: r\nall (r all p) q");
    assert_eq!(t.nouns.len(), 2);
    assert_eq!(t.verbs.len(), 1);
    assert_eq!(
        t.sentences,
        vec![Sentence::all(
            Term::all_of("r", Term::noun("p")),
            Term::noun("q")
        )]
    );
}

#[test]
fn parses_the_seed_sentence_of_the_chain_family() {
    let t = theory("nouns: a b\nverbs: r1 r2\nsome (r1 all (r1 all a)) (r1 all (r1 all a))");
    let inner = Term::all_of("r1", Term::all_of("r1", Term::noun("a")));
    assert_eq!(
        t.sentences,
        vec![Sentence::some(inner.clone(), inner)]
    );
    // Declared-but-unused identifiers are retained.
    assert!(t.verbs.contains(&Ident::from("r2")));
    assert!(t.nouns.contains(&Ident::from("b")));
}

#[test]
fn rejects_undeclared_identifiers() {
    let err = parse_theory("nouns: p\nall p q", opts()).unwrap_err();
    assert_eq!(err.line, 2);
    assert!(err.msg.contains('q'), "error should name the culprit: {err}");
}

#[test]
fn reports_lexical_and_structural_errors_with_positions() {
    for bad in [
        "nouns: p\nall p",           // missing second term
        "nouns: p\nall p p extra",   // trailing garbage
        "nouns: p\nverbs: r\n(r all p)", // bare term is not a sentence
        "nouns: p\nall p (r any p)", // unknown quantifier word
        "nouns: p\n[ ]",             // empty meet list
    ] {
        let err = parse_theory(bad, opts()).unwrap_err();
        assert!(err.line >= 1 && err.col >= 1, "{bad:?} -> {err:?}");
    }
}

#[test]
fn drops_duplicate_sentences_with_a_warning() {
    let (t, warnings) = parse_theory("nouns: p q\nall p q\nall p q", opts()).unwrap();
    assert_eq!(t.sentences.len(), 1);
    assert_eq!(warnings.len(), 1);
    assert_eq!(warnings[0].line, 3);
}

#[test]
fn accepts_comments_and_blank_lines() {
    let t = theory("# vocabulary\nnouns: p q\n\nverbs: r # trailing\nsome p (r some q)");
    assert_eq!(t.sentences.len(), 1);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

#[test]
fn prints_sentences_in_concrete_syntax() {
    let s = Sentence::all(Term::noun("p"), Term::all_of("r", Term::noun("q")));
    assert_eq!(s.to_string(), "all p (r all q)");

    let meet = Sentence::EmptyMeet(vec![Term::noun("p"), Term::not(Term::noun("q"))]);
    assert_eq!(meet.to_string(), "[ p (not q) ]");

    // The checked constructor sorts literals into canonical (printed) order.
    let (canonical, dropped) =
        Sentence::empty_meet(vec![Term::noun("p"), Term::not(Term::noun("q"))]);
    assert_eq!(dropped, 0);
    assert_eq!(canonical.to_string(), "[ (not q) p ]");

    let four = Sentence::all_or_some(
        Term::noun("a"),
        Term::noun("b"),
        Term::noun("x"),
        Term::noun("y"),
    );
    assert_eq!(four.to_string(), "all a b or some x y");
}

#[test]
fn complex_terms_print_fully_parenthesized() {
    assert_eq!(
        term("(r all (s some (not p)))").to_string(),
        "(r all (s some (not p)))"
    );
    assert_eq!(
        sentence("< p (r some q) >").to_string(),
        "< (r some q) p >",
        "parsing canonicalizes meet literal order"
    );
}

// ---------------------------------------------------------------------------
// Term closures
// ---------------------------------------------------------------------------

#[test]
fn subterm_closure_collects_all_subterms() {
    let delta = vec![
        sentence("all x y"),
        sentence("all y z"),
        sentence("all (r all z) (r all x)"),
    ];
    let got = subterm_closure(&delta);
    assert_eq!(got, term_set(&["x", "y", "z", "(r all z)", "(r all x)"]));
}

#[test]
fn subterm_closure_of_nothing_is_empty() {
    assert!(subterm_closure(&[]).is_empty());
}

#[test]
fn subterm_closure_handles_negated_bodies() {
    let delta = vec![sentence("some p (r some (not q))")];
    let got = subterm_closure(&delta);
    assert_eq!(got, term_set(&["p", "q", "(not q)", "(r some (not q))"]));
}

#[test]
fn all_of_extension_restores_missing_one_step_terms() {
    let delta = vec![
        sentence("all x y"),
        sentence("all y z"),
        sentence("all (r all z) (r all x)"),
    ];
    let t = subterm_closure(&delta);
    let plus = all_of_extension(&t, &occurring_verbs(&delta));
    assert!(plus.contains(&term("(r all y)")));
    assert!(t.iter().all(|u| plus.contains(u)));
    assert_eq!(
        plus,
        term_set(&[
            "x",
            "y",
            "z",
            "(r all z)",
            "(r all x)",
            "(r all y)",
            "(r all (r all z))",
            "(r all (r all x))",
        ])
    );
}

#[test]
fn all_of_extension_without_verbs_is_identity() {
    let delta = vec![sentence("all p q"), sentence("some q p")];
    let t = subterm_closure(&delta);
    assert_eq!(all_of_extension(&t, &occurring_verbs(&delta)), t);
}

#[test]
fn all_of_extension_applies_the_definition_once() {
    let delta = vec![sentence("all p (r all p)")];
    let t = subterm_closure(&delta);
    let plus = all_of_extension(&t, &occurring_verbs(&delta));
    assert_eq!(plus, term_set(&["p", "(r all p)", "(r all (r all p))"]));
}

// ---------------------------------------------------------------------------
// Fragment detection
// ---------------------------------------------------------------------------

#[test]
fn fragment_names_round_trip_and_ignore_dots() {
    for fr in Fragment::ALL {
        assert_eq!(Fragment::parse_name(fr.name()), Some(fr));
    }
    assert_eq!(Fragment::parse_name("L3.5"), Some(Fragment::L3Half));
    assert_eq!(Fragment::parse_name("l35"), Some(Fragment::L3Half));
    assert_eq!(Fragment::parse_name("L4.5plus"), Some(Fragment::L4HalfPlus));
    assert_eq!(Fragment::parse_name("l45plus"), Some(Fragment::L4HalfPlus));
    assert_eq!(Fragment::parse_name("nope"), None);
}

#[test]
fn detects_the_least_fragment_of_a_theory() {
    let cases = [
        ("nouns: p q\nall p q", Fragment::L1),
        ("nouns: p q\nsome p q", Fragment::L2),
        ("nouns: p q\nall p p or some q q", Fragment::L2Plus),
        ("nouns: p\nverbs: r\nall p (r some p)", Fragment::L3),
        ("nouns: p\nverbs: r\nsome p (r some p)", Fragment::L3Half),
        ("nouns: p\nall p (not p)", Fragment::L4),
        ("nouns: p\nsome p (not p)", Fragment::L4Half),
        ("nouns: p\n[ p (not p) ]", Fragment::L4Plus),
        ("nouns: p\n< p (not p) >", Fragment::L4HalfPlus),
        ("nouns: p\nverbs: r\nall p (not (r some p))", Fragment::L5),
        ("nouns: p\nverbs: r\nsome p (not (r some p))", Fragment::L5Half),
    ];
    for (src, want) in cases {
        let t = theory(src);
        assert_eq!(t.fragment().unwrap(), want, "{src}");
    }
}

#[test]
fn fragment_override_must_cover_the_theory() {
    let t = theory("nouns: p q\nsome p q");
    assert_eq!(
        t.fragment_with_override(Some(Fragment::L3Half)).unwrap(),
        Fragment::L3Half
    );
    assert!(t.fragment_with_override(Some(Fragment::L1)).is_err());
    assert!(t.fragment_with_override(Some(Fragment::L3)).is_err());
    assert_eq!(t.fragment_with_override(None).unwrap(), Fragment::L2);
}

#[test]
fn empty_meets_have_no_home_below_l4plus() {
    let t = theory("nouns: p q\n[ p q ]\nsome p q");
    assert_eq!(t.fragment().unwrap(), Fragment::L4HalfPlus);
}

#[test]
fn four_place_sentences_do_not_mix_with_meets() {
    let t = theory("nouns: p q\nall p p or some q q\n[ p q ]");
    assert!(t.fragment().is_err());
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

fn arb_ident() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("p".to_string()),
        Just("q".to_string()),
        Just("x0".to_string()),
        Just("long_name".to_string()),
    ]
}

fn arb_verb() -> impl Strategy<Value = String> {
    prop_oneof![Just("r".to_string()), Just("s2".to_string())]
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = arb_ident().prop_map(Term::noun);
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (arb_verb(), inner.clone()).prop_map(|(r, t)| Term::all_of(r, t)),
            (arb_verb(), inner.clone()).prop_map(|(r, t)| Term::some_of(r, t)),
            inner.prop_map(Term::not),
        ]
    })
}

fn arb_sentence() -> impl Strategy<Value = Sentence> {
    prop_oneof![
        (arb_term(), arb_term()).prop_map(|(x, y)| Sentence::all(x, y)),
        (arb_term(), arb_term()).prop_map(|(x, y)| Sentence::some(x, y)),
        (arb_term(), arb_term(), arb_term(), arb_term())
            .prop_map(|(a, b, x, y)| Sentence::all_or_some(a, b, x, y)),
        prop::collection::vec(arb_term(), 1..4)
            .prop_map(|ts| Sentence::empty_meet(ts).0),
        prop::collection::vec(arb_term(), 1..4)
            .prop_map(|ts| Sentence::nonempty_meet(ts).0),
    ]
}

proptest! {
    #[test]
    fn printed_sentences_parse_back_to_themselves(s in arb_sentence()) {
        let reopts = ParseOptions::default();
        let back = parse_sentence(&s.to_string(), reopts).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn subterm_closure_is_subterm_closed(ss in prop::collection::vec(arb_sentence(), 0..5)) {
        let t = subterm_closure(&ss);
        for u in &t {
            for sub in u.subterms() {
                prop_assert!(t.contains(sub), "{} missing subterm {}", u, sub);
            }
        }
    }

    #[test]
    fn all_of_extension_is_bounded(ss in prop::collection::vec(arb_sentence(), 0..5)) {
        let t = subterm_closure(&ss);
        let verbs = occurring_verbs(&ss);
        let plus = all_of_extension(&t, &verbs);
        prop_assert!(t.iter().all(|u| plus.contains(u)));
        prop_assert!(plus.len() <= t.len() * (1 + verbs.len()));
    }

    #[test]
    fn adding_a_sentence_never_lowers_the_fragment(
        base in prop::collection::vec(arb_sentence(), 1..4),
        extra in arb_sentence(),
    ) {
        let features = |ss: &[Sentence]| {
            ss.iter().fold(Features::default(), |acc, s| acc.union(s.features()))
        };
        let before = Fragment::least_covering(features(&base));
        let mut grown = base.clone();
        grown.push(extra);
        let after = Fragment::least_covering(features(&grown));
        if let (Some(b), Some(a)) = (before, after) {
            prop_assert!(a.includes(b), "{} does not include {}", a, b);
        }
    }
}
