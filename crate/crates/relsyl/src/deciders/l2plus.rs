//! Decider for the All/Some fragment with four-place disjunctive sentences,
//! plus the canonical pair-model constructions it is built on.
//!
//! Countermodels live on unordered pairs of input subterms.  For a
//! Some-style goal with existential pair `(x, y)`, the model keeps only
//! pairs none of whose members provably satisfies `all v z or some x y` for
//! a fixed disjunction side `z ∈ {x, y}`; for an All goal the disjunctive
//! sentences play no role and every pair is kept.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use indexmap::IndexSet;

use super::{DecideError, DecideOptions};
use crate::decision::{CaseFlavor, Certificate, Decision, DecisionStats, Witness};
use crate::proofs::check_proof;
use crate::rules::{rule_set, RuleSetName};
use crate::saturation::{
    branch_universe, g2plus, g_all_some, saturate, subterm_closure, SaturationOptions,
    SaturationResult,
};
use crate::semantics::{is_countermodel, FiniteModel};
use crate::syntax::{Fragment, Ident, Sentence, Term, Theory};

/// Decides `theory ⊨ goal` in the All/Some fragment with four-place
/// sentences.
///
/// Positive answers extract a proof from the bounded saturation.  Negative
/// answers build a countermodel over unordered pairs of input subterms: for
/// an All goal the full pair model (disjunctive sentences ignored), for a
/// Some or four-place goal the pair model restricted by underivability of
/// the goal-directed disjunctions.
pub fn decide_l2plus(
    theory: &Theory,
    goal: &Sentence,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    super::require_within(theory, goal, Fragment::L2Plus)?;
    let start = Instant::now();

    let mut delta = theory.sentences.clone();
    delta.push(goal.clone());
    let universe = g2plus(&delta);
    let rules = rule_set(RuleSetName::L2Plus);
    let sat_opts = SaturationOptions {
        universe_cap: opts.universe_cap,
        stop_at: Some(goal.clone()),
    };
    let sat = saturate(&theory.sentences, rules, &universe, &sat_opts)?;

    let mut stats = DecisionStats {
        universe_size: Some(sat.universe_size()),
        rounds: Some(sat.rounds()),
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

    // The goal was not derived, so the saturation ran to its fixpoint and
    // can back the countermodel.
    let mut terms: Vec<Term> = subterm_closure(&delta).into_iter().collect();
    terms.sort();
    let (nouns, verbs) = model_vocabulary(theory, goal);

    let model = match goal {
        Sentence::Some(x, y) | Sentence::AllOrSome(_, _, x, y) => {
            goal_directed_pair_model(&terms, &nouns, &verbs, &sat, x, y)
        }
        Sentence::All(..) => assemble_pair_model(
            &terms,
            all_pairs(terms.len()),
            &nouns,
            &verbs,
            |t, p| sat.le(t, &Term::Noun(p.clone())),
            |c, d, r| sat.le(c, &Term::all_of(r.clone(), d.clone())),
        ),
        _ => {
            return Err(DecideError::Internal(
                "goal shape outside the fragment slipped past the feature check".into(),
            ))
        }
    };

    if !is_countermodel(&model, theory, goal)? {
        return Err(DecideError::Internal(
            "pair countermodel failed its model check".into(),
        ));
    }
    stats.models_checked = Some(1);
    stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(Decision::no(model, stats))
}

/// The pair model for a Some-style goal with existential pair `(x, y)`: a
/// pair `{t, u}` is kept when for some side `z ∈ {x, y}` neither
/// `all t z or some x y` nor `all u z or some x y` is derivable, noun
/// membership and verb edges read the derivable disjunctive sentences.
fn goal_directed_pair_model(
    terms: &[Term],
    nouns: &IndexSet<Ident>,
    verbs: &IndexSet<Ident>,
    sat: &SaturationResult,
    x: &Term,
    y: &Term,
) -> FiniteModel {
    let aos = |v: &Term, z: &Term| {
        sat.contains(&Sentence::AllOrSome(
            v.clone(),
            z.clone(),
            x.clone(),
            y.clone(),
        ))
    };
    let sides: Vec<&Term> = if x == y { vec![x] } else { vec![x, y] };
    let mut pairs = Vec::new();
    for i in 0..terms.len() {
        for j in i..terms.len() {
            let admitted = sides
                .iter()
                .any(|z| !aos(&terms[i], z) && !aos(&terms[j], z));
            if admitted {
                pairs.push((i, j));
            }
        }
    }
    assemble_pair_model(
        terms,
        pairs,
        nouns,
        verbs,
        |t, p| aos(t, &Term::Noun(p.clone())),
        |c, d, r| aos(c, &Term::all_of(r.clone(), d.clone())),
    )
}

/// Builds the canonical pair model of a theory over a term set: domain
/// elements are the unordered pairs `{t, u}` of terms from `terms`
/// (singletons included), a pair falls under a noun `p` when `all t p` is
/// derivable for one of its members, and `{t, u}` is `r`-related to
/// `{v, w}` when `all c (r all d)` is derivable for some `c ∈ {t, u}`,
/// `d ∈ {v, w}`.  Derivability means bounded saturation of `theory` under
/// the All/Some rules over the subterms of the theory and `terms`.
pub fn build_pair_model(
    theory: &Theory,
    terms: &[Term],
    opts: &DecideOptions,
) -> Result<FiniteModel, DecideError> {
    let (sat, sorted) = pair_model_saturation(theory, terms, opts)?;
    let (nouns, verbs) = pool_vocabulary(theory, &sorted);
    Ok(assemble_pair_model(
        &sorted,
        all_pairs(sorted.len()),
        &nouns,
        &verbs,
        |t, p| sat.le(t, &Term::Noun(p.clone())),
        |c, d, r| sat.le(c, &Term::all_of(r.clone(), d.clone())),
    ))
}

/// Like [`build_pair_model`], but the domain keeps only the pairs `{t, u}`
/// whose existence is provable: `some t u` must be derivable.
pub fn build_pair_model_restricted(
    theory: &Theory,
    terms: &[Term],
    opts: &DecideOptions,
) -> Result<FiniteModel, DecideError> {
    let (sat, sorted) = pair_model_saturation(theory, terms, opts)?;
    let (nouns, verbs) = pool_vocabulary(theory, &sorted);
    let mut pairs = Vec::new();
    for i in 0..sorted.len() {
        for j in i..sorted.len() {
            if sat.contains(&Sentence::Some(sorted[i].clone(), sorted[j].clone())) {
                pairs.push((i, j));
            }
        }
    }
    Ok(assemble_pair_model(
        &sorted,
        pairs,
        &nouns,
        &verbs,
        |t, p| sat.le(t, &Term::Noun(p.clone())),
        |c, d, r| sat.le(c, &Term::all_of(r.clone(), d.clone())),
    ))
}

/// Tests whether a theory settles, for every term in `terms`, either that
/// the term is provably inhabited or that it is provably empty in the sense
/// appropriate to the chosen flavor.  Returns the first failing instance as
/// a witness when the answer is negative.
///
/// * [`CaseFlavor::ExistentialImport`]: `some x x` is derivable, or
///   `all y (r all x)` is derivable for every `y` in `terms` and verb `r`
///   (All/Some rules).
/// * [`CaseFlavor::EffectiveNonemptiness`]: `all (r all x) (r some x)` is
///   derivable for every verb `r`, or both `all x y` and `all y (r all x)`
///   are derivable for every `y` in `terms` and verb `r` (All-only rules
///   with the relational term postulates).
pub fn determines_existentials(
    theory: &Theory,
    terms: &[Term],
    flavor: CaseFlavor,
    opts: &DecideOptions,
) -> Result<(bool, Option<Witness>), DecideError> {
    let mut sorted: Vec<Term> = terms.iter().cloned().collect::<IndexSet<_>>().into_iter().collect();
    sorted.sort();
    let seed = seeded_delta(theory, &sorted);
    let sat_opts = SaturationOptions {
        universe_cap: opts.universe_cap,
        stop_at: None,
    };
    match flavor {
        CaseFlavor::ExistentialImport => {
            let universe = g_all_some(&seed);
            let sat = saturate(
                &theory.sentences,
                rule_set(RuleSetName::Base0),
                &universe,
                &sat_opts,
            )?;
            let verbs = crate::saturation::occurring_verbs(&seed);
            for x in &sorted {
                if sat.contains(&Sentence::Some(x.clone(), x.clone())) {
                    continue;
                }
                for y in &sorted {
                    for r in &verbs {
                        if !sat.le(y, &Term::all_of(r.clone(), x.clone())) {
                            return Ok((
                                false,
                                Some(Witness {
                                    x: x.clone(),
                                    y: y.clone(),
                                    verb: Some(r.clone()),
                                }),
                            ));
                        }
                    }
                }
            }
            Ok((true, None))
        }
        CaseFlavor::EffectiveNonemptiness => {
            let universe = branch_universe(&seed, opts.depth_slack, false, true);
            let sat = saturate(
                &theory.sentences,
                rule_set(RuleSetName::L3),
                &universe,
                &sat_opts,
            )?;
            let verbs = crate::saturation::occurring_verbs(&seed);
            for x in &sorted {
                let nonempty = verbs.iter().all(|r| {
                    sat.contains(&Sentence::All(
                        Term::all_of(r.clone(), x.clone()),
                        Term::some_of(r.clone(), x.clone()),
                    ))
                });
                if nonempty {
                    continue;
                }
                let mut failing = None;
                'empty: for y in &sorted {
                    if !sat.le(x, y) {
                        failing = Some(Witness {
                            x: x.clone(),
                            y: y.clone(),
                            verb: None,
                        });
                        break 'empty;
                    }
                    for r in &verbs {
                        if !sat.le(y, &Term::all_of(r.clone(), x.clone())) {
                            failing = Some(Witness {
                                x: x.clone(),
                                y: y.clone(),
                                verb: Some(r.clone()),
                            });
                            break 'empty;
                        }
                    }
                }
                if let Some(w) = failing {
                    return Ok((false, Some(w)));
                }
            }
            Ok((true, None))
        }
    }
}

/// Full saturation backing the pair models: All/Some rules over the
/// subterms of the theory and the given terms.
fn pair_model_saturation(
    theory: &Theory,
    terms: &[Term],
    opts: &DecideOptions,
) -> Result<(SaturationResult, Vec<Term>), DecideError> {
    let mut sorted: Vec<Term> = terms.iter().cloned().collect::<IndexSet<_>>().into_iter().collect();
    sorted.sort();
    let seed = seeded_delta(theory, &sorted);
    let universe = g_all_some(&seed);
    let sat_opts = SaturationOptions {
        universe_cap: opts.universe_cap,
        stop_at: None,
    };
    let sat = saturate(
        &theory.sentences,
        rule_set(RuleSetName::Base0),
        &universe,
        &sat_opts,
    )?;
    Ok((sat, sorted))
}

/// Sentences whose subterm closure covers both the theory and the extra
/// terms (the extra terms ride along as trivial `all t t` sentences).
fn seeded_delta(theory: &Theory, terms: &[Term]) -> Vec<Sentence> {
    let mut seed = theory.sentences.clone();
    for t in terms {
        seed.push(Sentence::All(t.clone(), t.clone()));
    }
    seed
}

/// Vocabulary for the countermodels produced by [`decide_l2plus`]: every
/// declared symbol plus anything occurring in the goal.
fn model_vocabulary(theory: &Theory, goal: &Sentence) -> (IndexSet<Ident>, IndexSet<Ident>) {
    let (goal_nouns, goal_verbs) = goal.symbols();
    let mut nouns = theory.nouns.clone();
    nouns.extend(goal_nouns);
    let mut verbs = theory.verbs.clone();
    verbs.extend(goal_verbs);
    (nouns, verbs)
}

/// Vocabulary for the standalone pair models: declared symbols plus
/// anything occurring in the term pool.
fn pool_vocabulary(theory: &Theory, terms: &[Term]) -> (IndexSet<Ident>, IndexSet<Ident>) {
    let mut nouns = theory.nouns.clone();
    let mut verbs = theory.verbs.clone();
    let probe: Vec<Sentence> = terms
        .iter()
        .map(|t| Sentence::All(t.clone(), t.clone()))
        .collect();
    for s in &probe {
        let (ns, vs) = s.symbols();
        nouns.extend(ns);
        verbs.extend(vs);
    }
    (nouns, verbs)
}

/// Every unordered pair of indices (singletons included).
fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push((i, j));
        }
    }
    out
}

/// Printed name of the unordered pair `{terms[i], terms[j]}`.
fn pair_name(terms: &[Term], i: usize, j: usize) -> String {
    if i == j {
        format!("{{{}}}", terms[i])
    } else {
        format!("{{{}, {}}}", terms[i], terms[j])
    }
}

/// Assembles a finite model on the given unordered pairs.  `noun_test`
/// decides whether a single member term puts its pair under a noun, and
/// `edge_test` whether a member `c` of the source and a member `d` of the
/// target put an `r`-edge between their pairs; pairs inherit both by
/// disjunction over their members.
fn assemble_pair_model(
    terms: &[Term],
    pairs: Vec<(usize, usize)>,
    nouns: &IndexSet<Ident>,
    verbs: &IndexSet<Ident>,
    noun_test: impl Fn(&Term, &Ident) -> bool,
    edge_test: impl Fn(&Term, &Term, &Ident) -> bool,
) -> FiniteModel {
    let domain: Vec<String> = pairs.iter().map(|&(i, j)| pair_name(terms, i, j)).collect();
    let members = |&(i, j): &(usize, usize)| -> Vec<&Term> {
        if i == j {
            vec![&terms[i]]
        } else {
            vec![&terms[i], &terms[j]]
        }
    };

    let mut noun_map: BTreeMap<Ident, BTreeSet<String>> = BTreeMap::new();
    for p in nouns {
        let ext: BTreeSet<String> = pairs
            .iter()
            .enumerate()
            .filter(|(_, pair)| members(pair).iter().any(|t| noun_test(t, p)))
            .map(|(k, _)| domain[k].clone())
            .collect();
        noun_map.insert(p.clone(), ext);
    }

    let mut verb_map: BTreeMap<Ident, BTreeSet<(String, String)>> = BTreeMap::new();
    for r in verbs {
        let mut ext = BTreeSet::new();
        for (k1, p1) in pairs.iter().enumerate() {
            for (k2, p2) in pairs.iter().enumerate() {
                let related = members(p1)
                    .iter()
                    .any(|c| members(p2).iter().any(|d| edge_test(c, d, r)));
                if related {
                    ext.insert((domain[k1].clone(), domain[k2].clone()));
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
