//! Decider for the All-only fragment.
//!
//! Positive answers come from bounded saturation with the core rules over
//! the subterm universe; negative answers are certified by the canonical
//! term-domain countermodel, whose elements are the subterms of the input.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use indexmap::IndexSet;

use super::{DecideError, DecideOptions};
use crate::decision::{Certificate, Decision, DecisionStats};
use crate::proofs::check_proof;
use crate::rules::{rule_set, RuleSetName};
use crate::saturation::{g1, saturate, subterm_closure, SaturationOptions, SaturationResult};
use crate::semantics::{is_countermodel, FiniteModel};
use crate::syntax::{Fragment, Ident, Sentence, Term, Theory};

/// Decides `theory ⊨ goal` in the All-only fragment.
///
/// Saturates the theory under the core rules inside the bounded sentence
/// universe of the input.  If the goal is derived, the answer is `yes` with
/// an extracted proof; otherwise the answer is `no` with the term-domain
/// countermodel: the domain is the set of subterms of the input, an element
/// `t` falls under a noun `p` exactly when `all t p` is derivable, and `t`
/// is `r`-related to `u` exactly when `all t (r all u)` is derivable.
pub fn decide_l1(
    theory: &Theory,
    goal: &Sentence,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    super::require_within(theory, goal, Fragment::L1)?;
    let start = Instant::now();

    let mut delta = theory.sentences.clone();
    delta.push(goal.clone());
    let universe = g1(&delta);
    let rules = rule_set(RuleSetName::L1Core);
    let sat_opts = SaturationOptions {
        universe_cap: opts.universe_cap,
        stop_at: Some(goal.clone()),
    };
    let sat = saturate(&theory.sentences, rules, &universe, &sat_opts)?;

    let mut stats = DecisionStats {
        universe_size: Some(sat.universe_size()),
        rounds: Some(sat.rounds()),
        elapsed_ms: 0,
        ..DecisionStats::default()
    };

    if sat.contains(goal) {
        let proof = sat
            .extract_proof(goal)
            .ok_or_else(|| DecideError::Internal("derived goal has no proof".into()))?;
        check_proof(&theory.sentences, rules, &proof)
            .map_err(|e| DecideError::Internal(format!("extracted proof failed its check: {e}")))?;
        stats.elapsed_ms = start.elapsed().as_millis() as u64;
        return Ok(Decision::yes(Certificate::Proof(proof), stats));
    }

    let model = term_domain_model(theory, goal, &delta, &sat);
    if !is_countermodel(&model, theory, goal)? {
        return Err(DecideError::Internal(
            "term-domain countermodel failed its model check".into(),
        ));
    }
    stats.models_checked = Some(1);
    stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(Decision::no(model, stats))
}

/// The canonical countermodel over the subterms of the input: derivability
/// of `all t p` fixes noun membership and derivability of `all t (r all u)`
/// fixes the verb relations.
fn term_domain_model(
    theory: &Theory,
    goal: &Sentence,
    delta: &[Sentence],
    sat: &SaturationResult,
) -> FiniteModel {
    let mut terms: Vec<Term> = subterm_closure(delta).into_iter().collect();
    terms.sort();

    let (goal_nouns, goal_verbs) = goal.symbols();
    let mut nouns: IndexSet<Ident> = theory.nouns.clone();
    nouns.extend(goal_nouns);
    let mut verbs: IndexSet<Ident> = theory.verbs.clone();
    verbs.extend(goal_verbs);

    let domain: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
    let mut noun_map: BTreeMap<Ident, BTreeSet<String>> = BTreeMap::new();
    for p in &nouns {
        let pt = Term::Noun(p.clone());
        let ext: BTreeSet<String> = terms
            .iter()
            .filter(|t| sat.le(t, &pt))
            .map(|t| t.to_string())
            .collect();
        noun_map.insert(p.clone(), ext);
    }
    let mut verb_map: BTreeMap<Ident, BTreeSet<(String, String)>> = BTreeMap::new();
    for r in &verbs {
        let mut ext = BTreeSet::new();
        for t in &terms {
            for u in &terms {
                if sat.le(t, &Term::AllOf(r.clone(), Box::new(u.clone()))) {
                    ext.insert((t.to_string(), u.to_string()));
                }
            }
        }
        verb_map.insert(r.clone(), ext);
    }
    FiniteModel {
        domain,
        nouns: noun_map,
        verbs: verb_map,
    }
}
