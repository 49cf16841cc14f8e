//! Rule-instance matching, the proof checker, chain systems, and verb-image
//! construction.

use relsyl::proofs::{
    anti_image, check_chain_system, check_proof, pair_missing_links, ProofError, ProofNode,
};
use relsyl::rules::{match_instance, rule_set, DischargeKind, RuleSetName};
use relsyl::syntax::{parse_sentence, parse_term, Ident, ParseOptions, Sentence, Term};

fn sentence(src: &str) -> Sentence {
    parse_sentence(src, ParseOptions::default()).expect(src)
}

fn term(src: &str) -> Term {
    parse_term(src, ParseOptions::default()).expect(src)
}

fn sentences(srcs: &[&str]) -> Vec<Sentence> {
    srcs.iter().map(|s| sentence(s)).collect()
}

fn premise(src: &str) -> ProofNode {
    ProofNode::premise(sentence(src))
}

fn hyp(src: &str) -> ProofNode {
    ProofNode::hyp(sentence(src))
}

fn step(rule: &str, children: Vec<ProofNode>, conclusion: &str) -> ProofNode {
    ProofNode::step(rule, children, sentence(conclusion))
}

// ---------------------------------------------------------------------------
// Instance matching
// ---------------------------------------------------------------------------

#[test]
fn transitivity_matches_with_the_identity_substitution() {
    let rules = rule_set(RuleSetName::Base0);
    let barbara = rules.template("BARBARA").unwrap();
    let p1 = sentence("all x y");
    let p2 = sentence("all y z");
    let concl = sentence("all x z");
    let su = match_instance(barbara, &[&p1, &p2], &concl).unwrap();
    assert_eq!(su.terms["x"], term("x"));
    assert_eq!(su.terms["y"], term("y"));
    assert_eq!(su.terms["z"], term("z"));
    assert!(su.verbs.is_empty());

    // Premises are matched as a set: swapped order also matches.
    assert!(match_instance(barbara, &[&p2, &p1], &concl).is_some());
}

#[test]
fn antitonicity_matches_and_binds_the_verb() {
    let rules = rule_set(RuleSetName::Base0);
    let anti = rules.template("ANTI").unwrap();
    let p = sentence("all x y");
    let concl = sentence("all (r all y) (r all x)");
    let su = match_instance(anti, &[&p], &concl).unwrap();
    assert_eq!(su.verbs["r"], Ident::from("r"));

    // The un-flipped conclusion is not an instance.
    let wrong = sentence("all (r all x) (r all y)");
    assert!(match_instance(anti, &[&p], &wrong).is_none());
}

#[test]
fn existential_syllogism_rejects_a_universal_conclusion() {
    let rules = rule_set(RuleSetName::Base0);
    let darii = rules.template("DARII").unwrap();
    let p1 = sentence("some x y");
    let p2 = sentence("all y z");
    assert!(match_instance(darii, &[&p1, &p2], &sentence("all x z")).is_none());
    assert!(match_instance(darii, &[&p1, &p2], &sentence("some x z")).is_some());
}

#[test]
fn matching_requires_consistent_variable_bindings() {
    let rules = rule_set(RuleSetName::Base0);
    let barbara = rules.template("BARBARA").unwrap();
    let p1 = sentence("all x y");
    let p2 = sentence("all w z");
    assert!(match_instance(barbara, &[&p1, &p2], &sentence("all x z")).is_none());
}

#[test]
fn axioms_match_with_no_premises() {
    let rules = rule_set(RuleSetName::Base0);
    let axiom = rules.template("AXIOM").unwrap();
    assert!(match_instance(axiom, &[], &sentence("all (r all p) (r all p)")).is_some());
    assert!(match_instance(axiom, &[], &sentence("all p q")).is_none());
}

// ---------------------------------------------------------------------------
// The proof checker
// ---------------------------------------------------------------------------

/// Theory of the worked two-case derivation: `some x y` follows by splitting
/// on whether `a` is inhabited.
fn case_split_theory() -> Vec<Sentence> {
    sentences(&[
        "some c d",
        "all a x",
        "all a y",
        "all (r all a) x",
        "all (r all a) y",
    ])
}

/// The worked derivation itself: both branches conclude `some x y`, the
/// left from the hypothesis `some a a`, the right from `all c (r all a)`.
fn case_split_proof() -> ProofNode {
    let left = step(
        "DARII",
        vec![
            step(
                "SOME2",
                vec![step(
                    "DARII",
                    vec![hyp("some a a"), premise("all a x")],
                    "some a x",
                )],
                "some x a",
            ),
            premise("all a y"),
        ],
        "some x y",
    );

    let all_c_x = step(
        "BARBARA",
        vec![hyp("all c (r all a)"), premise("all (r all a) x")],
        "all c x",
    );
    let some_c_x = step(
        "DARII",
        vec![
            step("SOME1", vec![premise("some c d")], "some c c"),
            all_c_x,
        ],
        "some c x",
    );
    let all_c_y = step(
        "BARBARA",
        vec![hyp("all c (r all a)"), premise("all (r all a) y")],
        "all c y",
    );
    let right = step(
        "DARII",
        vec![step("SOME2", vec![some_c_x], "some x c"), all_c_y],
        "some x y",
    );

    ProofNode::discharge(
        DischargeKind::Cases,
        vec![left, right],
        sentences(&["some a a", "all c (r all a)"]),
        sentence("some x y"),
    )
}

#[test]
fn the_two_case_derivation_checks_out() {
    let gamma = case_split_theory();
    let proof = case_split_proof();
    check_proof(&gamma, rule_set(RuleSetName::L35), &proof).unwrap();
    assert_eq!(proof.size(), 18);
    assert!(proof.rules_used().contains("CASES"));
}

#[test]
fn premise_leaves_must_come_from_the_theory() {
    let gamma = sentences(&["all x y"]);
    let proof = step(
        "BARBARA",
        vec![premise("all x y"), premise("all y z")],
        "all x z",
    );
    let err = check_proof(&gamma, rule_set(RuleSetName::L1Core), &proof).unwrap_err();
    assert!(matches!(err, ProofError::PremiseNotFound { .. }), "{err}");
}

#[test]
fn hypotheses_must_be_bound_by_an_ancestor() {
    let gamma = sentences(&["all a x"]);
    let proof = step(
        "DARII",
        vec![hyp("some a a"), premise("all a x")],
        "some a x",
    );
    let err = check_proof(&gamma, rule_set(RuleSetName::L35), &proof).unwrap_err();
    assert!(matches!(err, ProofError::HypothesisNotBound { .. }), "{err}");
}

#[test]
fn contradiction_discharge_requires_one_shared_hypothesis() {
    let gamma = sentences(&["< s t >", "[ s t ]"]);
    let rules = rule_set(RuleSetName::Clausal);
    let accept = ProofNode::discharge(
        DischargeKind::Raa,
        vec![premise("< s t >"), premise("[ s t ]")],
        sentences(&["[ p q ]", "[ p q ]"]),
        sentence("< p q >"),
    );
    check_proof(&gamma, rules, &accept).unwrap();

    let mismatch = ProofNode::discharge(
        DischargeKind::Raa,
        vec![premise("< s t >"), premise("[ s t ]")],
        sentences(&["[ p q ]", "[ p r ]"]),
        sentence("< p q >"),
    );
    let err = check_proof(&gamma, rules, &mismatch).unwrap_err();
    assert!(matches!(err, ProofError::BadStep { .. }), "{err}");
}

#[test]
fn case_split_hypotheses_must_share_the_split_term() {
    let gamma = case_split_theory();
    let mut proof = case_split_proof();
    // Replace the right-hand hypothesis with one about a different term.
    proof.discharged[1] = sentence("all c (r all b)");
    let err = check_proof(&gamma, rule_set(RuleSetName::L35), &proof).unwrap_err();
    assert!(matches!(err, ProofError::BadStep { .. }), "{err}");
}

#[test]
fn rules_outside_the_active_set_are_rejected_by_name() {
    let gamma = sentences(&["some x y", "all y z"]);
    let proof = step(
        "DARII",
        vec![premise("some x y"), premise("all y z")],
        "some x z",
    );
    check_proof(&gamma, rule_set(RuleSetName::Base0), &proof).unwrap();
    let err = check_proof(&gamma, rule_set(RuleSetName::L1Core), &proof).unwrap_err();
    assert!(matches!(err, ProofError::RuleNotInSet { .. }), "{err}");

    let unknown = step(
        "FOO",
        vec![premise("some x y")],
        "some x x",
    );
    let err = check_proof(&gamma, rule_set(RuleSetName::Base0), &unknown).unwrap_err();
    assert!(matches!(err, ProofError::UnknownRule { .. }), "{err}");
}

#[test]
fn wrong_instances_and_arities_are_rejected() {
    let gamma = sentences(&["all x y", "all y z"]);
    let bad_instance = step(
        "BARBARA",
        vec![premise("all x y"), premise("all y z")],
        "all z x",
    );
    let err = check_proof(&gamma, rule_set(RuleSetName::L1Core), &bad_instance).unwrap_err();
    assert!(matches!(err, ProofError::BadInstance { .. }), "{err}");

    let bad_arity = step("BARBARA", vec![premise("all x y")], "all x y");
    let err = check_proof(&gamma, rule_set(RuleSetName::L1Core), &bad_arity).unwrap_err();
    assert!(matches!(err, ProofError::Arity { .. }), "{err}");
}

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

#[test]
fn decomposition_candidates_come_from_peeling_shared_prefixes() {
    // No shared prefix: only the right-hand body qualifies.
    assert_eq!(
        pair_missing_links(&term("z"), &term("(r all t)")),
        vec![term("t")]
    );
    // One shared layer: the right body at depth 0, the left body at depth 1.
    assert_eq!(
        pair_missing_links(&term("(r1 all (r1 all a))"), &term("(r1 all b)")),
        vec![term("b"), term("a")]
    );
    // Plain nouns decompose nowhere.
    assert!(pair_missing_links(&term("y"), &term("z")).is_empty());
}

/// The two-verb instance of the recurring chain system: C₁ = (all a a) and
/// C₂ running from the doubled universal term down to `a`.
fn chain_system_n2() -> (Vec<Sentence>, Vec<Sentence>) {
    let c1 = sentences(&["all a a"]);
    let c2 = sentences(&[
        "all (r1 all (r1 all a)) (r1 all (r1 all a))",
        "all (r1 all b) (r2 all (r2 all a))",
        "all (r2 all b) a",
    ]);
    (c1, c2)
}

#[test]
fn the_recurring_chain_system_validates() {
    let (c1, c2) = chain_system_n2();
    let x = term("a");
    let seed = term("(r1 all (r1 all a))");
    check_chain_system(&x, &x, &seed, &seed, &[c1, c2]).unwrap();
}

#[test]
fn a_first_chain_with_a_missing_link_is_rejected() {
    let (_, c2) = chain_system_n2();
    let x = term("a");
    let seed = term("(r1 all (r1 all a))");
    let err = check_chain_system(&x, &x, &seed, &seed, &[c2]).unwrap_err();
    assert!(err.contains("chain 1"), "{err}");
}

#[test]
fn both_seed_terms_must_be_linked_to_the_goal() {
    let c = sentences(&["all a x"]);
    let err =
        check_chain_system(&term("x"), &term("y"), &term("a"), &term("b"), &[c]).unwrap_err();
    assert!(err.contains('y'), "{err}");
}

#[test]
fn single_sentence_chains_link_their_endpoints() {
    // A one-sentence chain has no consecutive pairs, hence no missing links.
    let c = sentences(&["all a b"]);
    check_chain_system(&term("b"), &term("b"), &term("a"), &term("a"), &[c]).unwrap();
}

#[test]
fn chain_nodes_check_inside_proofs() {
    let gamma = sentences(&[
        "some (r1 all (r1 all a)) (r1 all (r1 all a))",
        "all (r1 all b) (r2 all (r2 all a))",
        "all (r2 all b) a",
    ]);
    let (c1, c2) = chain_system_n2();
    let mut children = vec![premise("some (r1 all (r1 all a)) (r1 all (r1 all a))")];
    children.push(step("AXIOM", vec![], "all a a"));
    children.push(step(
        "AXIOM",
        vec![],
        "all (r1 all (r1 all a)) (r1 all (r1 all a))",
    ));
    children.push(premise("all (r1 all b) (r2 all (r2 all a))"));
    children.push(premise("all (r2 all b) a"));
    let node = ProofNode::chains_node(children, vec![c1, c2], sentence("some a a"));

    check_proof(&gamma, rule_set(RuleSetName::Base0Chains), &node).unwrap();

    // The same node is rejected where the schema is not admitted.
    let err = check_proof(&gamma, rule_set(RuleSetName::Base0), &node).unwrap_err();
    assert!(matches!(err, ProofError::RuleNotInSet { .. }), "{err}");
}

#[test]
fn chain_payload_must_match_the_subproofs() {
    let gamma = sentences(&["some a a", "all a b"]);
    // chains claim (all a b) but the subproof list omits it
    let node = ProofNode::chains_node(
        vec![premise("some a a")],
        vec![sentences(&["all a b"])],
        sentence("some b b"),
    );
    let err = check_proof(&gamma, rule_set(RuleSetName::Base0Chains), &node).unwrap_err();
    assert!(matches!(err, ProofError::Chains { .. }), "{err}");
}

// ---------------------------------------------------------------------------
// Verb-sequence images of All-sentences
// ---------------------------------------------------------------------------

#[test]
fn empty_verb_sequences_leave_the_sentence_alone() {
    let psi = sentence("all u v");
    assert_eq!(anti_image(&[], &psi), Some(psi));
}

#[test]
fn odd_length_sequences_flip_the_inclusion() {
    let psi = sentence("all u v");
    assert_eq!(
        anti_image(&[Ident::from("r")], &psi),
        Some(sentence("all (r all v) (r all u)"))
    );
}

#[test]
fn even_length_sequences_keep_the_orientation() {
    let psi = sentence("all u v");
    assert_eq!(
        anti_image(&[Ident::from("r"), Ident::from("s")], &psi),
        Some(sentence("all (r all (s all u)) (r all (s all v))"))
    );
}

#[test]
fn only_universal_sentences_have_images() {
    assert_eq!(anti_image(&[Ident::from("r")], &sentence("some u v")), None);
}

#[test]
fn images_are_what_iterated_antitonicity_derives() {
    let psi = sentence("all u v");
    let rules = rule_set(RuleSetName::L1Core);
    for rvec_len in 0..=4 {
        let rvec: Vec<Ident> = (0..rvec_len)
            .map(|i| Ident::from(format!("r{i}")))
            .collect();
        let expected = anti_image(&rvec, &psi).unwrap();

        // Apply the one-step rule innermost-verb-first.
        let mut node = ProofNode::premise(psi.clone());
        for r in rvec.iter().rev() {
            let (x, y) = match &node.conclusion {
                Sentence::All(x, y) => (x.clone(), y.clone()),
                _ => unreachable!(),
            };
            let concl = Sentence::all(
                Term::all_of(r.clone(), y),
                Term::all_of(r.clone(), x),
            );
            node = ProofNode::step("ANTI", vec![node], concl);
        }
        assert_eq!(node.conclusion, expected, "length {rvec_len}");
        check_proof(&[psi.clone()], rules, &node).unwrap();
        assert_eq!(node.size(), rvec_len + 1);
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[test]
fn proofs_round_trip_through_json() {
    let proof = case_split_proof();
    let json = proof.to_json();
    assert_eq!(ProofNode::from_json(&json).unwrap(), proof);

    let text = serde_json::to_string_pretty(&json).unwrap();
    assert_eq!(ProofNode::from_json_str(&text).unwrap(), proof);
}

#[test]
fn json_uses_concrete_sentence_syntax() {
    let proof = step(
        "DARII",
        vec![premise("some x y"), premise("all y z")],
        "some x z",
    );
    let json = proof.to_json();
    assert_eq!(json["conclusion"], "some x z");
    assert_eq!(json["rule"], "DARII");
    assert_eq!(json["children"][0]["conclusion"], "some x y");
    assert_eq!(json["children"][0]["rule"], "PREMISE");
    // Leaves omit the empty structural fields.
    assert!(json["children"][0].get("children").is_none());
    assert!(json.get("discharged").is_none());
    assert!(json.get("chains").is_none());
}

#[test]
fn malformed_json_is_rejected_with_a_reason() {
    assert!(matches!(
        ProofNode::from_json_str("{\"rule\": \"AXIOM\"}"),
        Err(ProofError::Json(_))
    ));
    assert!(matches!(
        ProofNode::from_json_str("{\"conclusion\": \"all p\", \"rule\": \"AXIOM\"}"),
        Err(ProofError::Json(_))
    ));
}
