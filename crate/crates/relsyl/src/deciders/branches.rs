//! Case-split deciders for the fragments with relational terms.
//!
//! Neither fragment with `(r some t)` terms admits a one-pass bounded
//! saturation: whether a term is inhabited changes what follows.  The
//! deciders here enumerate existence assignments over the subterms of the
//! input as a binary tree (inhabited branch first), add the corresponding
//! existence package to the theory on each branch, and saturate.  If every
//! branch derives the goal the split itself is the certificate; otherwise
//! the first failing full assignment induces a canonical countermodel.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use indexmap::IndexSet;

use super::{decide_l1, DecideError, DecideOptions};
use crate::decision::{
    CaseBranch, CaseCertificate, CaseFlavor, Certificate, Decision, DecisionStats, ExistFlag,
};
use crate::proofs::check_proof;
use crate::rules::{rule_set, RuleSet, RuleSetName};
use crate::saturation::{
    branch_universe, occurring_verbs, saturate, subterm_closure, SaturationOptions,
    SaturationResult, SentenceUniverse,
};
use crate::semantics::{is_countermodel, FiniteModel};
use crate::syntax::{Fragment, Ident, Sentence, Term, Theory};

/// Decides `theory ⊨ goal` in the All/Some fragment with relational terms.
///
/// Splits on which subterms are inhabited: the inhabited flag contributes
/// `some t t`, the empty flag contributes `all t u` for every subterm `u`
/// together with `all u (r all t)` for every subterm and verb.  Positive
/// answers carry a case certificate; negative answers carry a countermodel
/// whose elements are the provably inhabited pairs of the first failing
/// branch, tagged with a universal or existential marker.
pub fn decide_l35(
    theory: &Theory,
    goal: &Sentence,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    super::require_within(theory, goal, Fragment::L3Half)?;
    let start = Instant::now();
    let ctx = BranchCtx::new(
        theory,
        goal,
        CaseFlavor::ExistentialImport,
        rule_set(RuleSetName::L35),
        true,
        opts,
    )?;
    match ctx.search()? {
        SearchOutcome::AllDerive {
            branches,
            visits,
            max_rounds,
        } => {
            let cert = CaseCertificate {
                flavor: CaseFlavor::ExistentialImport,
                terms: ctx.terms.clone(),
                goal: goal.clone(),
                branches,
            };
            validate_case_certificate(theory, goal, &cert, opts)
                .map_err(|e| DecideError::Internal(format!("case certificate invalid: {e}")))?;
            let stats = ctx.stats(&start, visits, max_rounds, None);
            Ok(Decision::yes(Certificate::Cases(cert), stats))
        }
        SearchOutcome::Failing {
            sat,
            visits,
            max_rounds,
        } => {
            let model = triple_model(&ctx, &sat);
            if !is_countermodel(&model, theory, goal)? {
                return Err(DecideError::Internal(
                    "pair-tag countermodel failed its model check".into(),
                ));
            }
            let stats = ctx.stats(&start, visits, max_rounds, Some(1));
            Ok(Decision::no(model, stats))
        }
    }
}

/// Decides `theory ⊨ goal` in the All-only fragment with relational terms.
///
/// Splits on which subterms are effectively inhabited: the inhabited flag
/// contributes `all (r all t) (r some t)` per verb, the empty flag the same
/// package as [`decide_l35`].  When no verb occurs the fragment collapses to
/// the All-only core and the query is settled by plain saturation.  Negative
/// answers carry a countermodel whose elements are the effectively inhabited
/// terms of the first failing branch, tagged with a universal or existential
/// marker.
pub fn decide_l3(
    theory: &Theory,
    goal: &Sentence,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    super::require_within(theory, goal, Fragment::L3)?;
    let mut delta = theory.sentences.clone();
    delta.push(goal.clone());
    if occurring_verbs(&delta).is_empty() {
        // Verb-free inputs never split: the case packages would be empty or
        // pure All-sentences, and the core rules already decide the query.
        return decide_l1(theory, goal, opts);
    }
    let start = Instant::now();
    let ctx = BranchCtx::new(
        theory,
        goal,
        CaseFlavor::EffectiveNonemptiness,
        rule_set(RuleSetName::L3),
        false,
        opts,
    )?;
    match ctx.search()? {
        SearchOutcome::AllDerive {
            branches,
            visits,
            max_rounds,
        } => {
            let cert = CaseCertificate {
                flavor: CaseFlavor::EffectiveNonemptiness,
                terms: ctx.terms.clone(),
                goal: goal.clone(),
                branches,
            };
            validate_case_certificate(theory, goal, &cert, opts)
                .map_err(|e| DecideError::Internal(format!("case certificate invalid: {e}")))?;
            let stats = ctx.stats(&start, visits, max_rounds, None);
            Ok(Decision::yes(Certificate::Cases(cert), stats))
        }
        SearchOutcome::Failing {
            sat,
            visits,
            max_rounds,
        } => {
            let model = tagged_term_model(&ctx, &sat);
            if !is_countermodel(&model, theory, goal)? {
                return Err(DecideError::Internal(
                    "tagged-term countermodel failed its model check".into(),
                ));
            }
            let stats = ctx.stats(&start, visits, max_rounds, Some(1));
            Ok(Decision::no(model, stats))
        }
    }
}

/// Checks a case certificate against a theory and goal: the term list must
/// be the subterm closure of the input in canonical order, the branch
/// assignments must tile the full assignment space, each branch theory must
/// be exactly the existence package of its assignment, and each derivation
/// must prove the goal from the theory extended by that package in the
/// flavor's rule system.
pub fn validate_case_certificate(
    theory: &Theory,
    goal: &Sentence,
    cert: &CaseCertificate,
    _opts: &DecideOptions,
) -> Result<(), DecideError> {
    let malformed = |msg: String| DecideError::Internal(msg);
    if cert.goal != *goal {
        return Err(malformed(format!(
            "certificate goal `{}` differs from the queried goal `{}`",
            cert.goal, goal
        )));
    }
    let mut delta = theory.sentences.clone();
    delta.push(goal.clone());
    let mut expected_terms: Vec<Term> = subterm_closure(&delta).into_iter().collect();
    expected_terms.sort();
    if cert.terms != expected_terms {
        return Err(malformed(
            "certificate terms differ from the subterm closure of the input".into(),
        ));
    }
    let verbs = occurring_verbs(&delta);
    cert.check_coverage().map_err(malformed)?;

    let rules = match cert.flavor {
        CaseFlavor::ExistentialImport => rule_set(RuleSetName::L35),
        CaseFlavor::EffectiveNonemptiness => rule_set(RuleSetName::L3),
    };
    for (k, branch) in cert.branches.iter().enumerate() {
        if branch.assignment.len() > cert.terms.len() {
            return Err(malformed(format!(
                "branch {k} assigns more flags than there are terms"
            )));
        }
        let expected: IndexSet<Sentence> = branch
            .assignment
            .iter()
            .zip(&cert.terms)
            .flat_map(|(&flag, t)| package(cert.flavor, flag, t, &cert.terms, &verbs))
            .collect();
        let actual: IndexSet<Sentence> = branch.branch_theory.iter().cloned().collect();
        if expected != actual {
            return Err(malformed(format!(
                "branch {k} theory differs from the existence package of its assignment"
            )));
        }
        if branch.derivation.conclusion != *goal {
            return Err(malformed(format!(
                "branch {k} derivation concludes `{}` instead of the goal",
                branch.derivation.conclusion
            )));
        }
        let mut premises = theory.sentences.clone();
        premises.extend(branch.branch_theory.iter().cloned());
        check_proof(&premises, rules, &branch.derivation)
            .map_err(|e| malformed(format!("branch {k} derivation fails its check: {e}")))?;
    }
    Ok(())
}

/// The existence package a flag contributes for one term.
fn package(
    flavor: CaseFlavor,
    flag: ExistFlag,
    t: &Term,
    terms: &[Term],
    verbs: &IndexSet<Ident>,
) -> Vec<Sentence> {
    match flag {
        ExistFlag::Nonempty => match flavor {
            CaseFlavor::ExistentialImport => {
                vec![Sentence::Some(t.clone(), t.clone())]
            }
            CaseFlavor::EffectiveNonemptiness => verbs
                .iter()
                .map(|r| {
                    Sentence::All(
                        Term::all_of(r.clone(), t.clone()),
                        Term::some_of(r.clone(), t.clone()),
                    )
                })
                .collect(),
        },
        ExistFlag::Empty => {
            let mut out: Vec<Sentence> = terms
                .iter()
                .map(|u| Sentence::All(t.clone(), u.clone()))
                .collect();
            for u in terms {
                for r in verbs {
                    out.push(Sentence::All(u.clone(), Term::all_of(r.clone(), t.clone())));
                }
            }
            out
        }
    }
}

/// Shared state of a case-split run.
struct BranchCtx<'a> {
    theory: &'a Theory,
    goal: &'a Sentence,
    terms: Vec<Term>,
    verbs: IndexSet<Ident>,
    universe: SentenceUniverse,
    rules: &'static RuleSet,
    flavor: CaseFlavor,
    universe_cap: u64,
    branch_cap: u64,
}

/// Result of exploring the assignment tree.
enum SearchOutcome {
    AllDerive {
        branches: Vec<CaseBranch>,
        visits: u64,
        max_rounds: usize,
    },
    Failing {
        sat: SaturationResult,
        visits: u64,
        max_rounds: usize,
    },
}

impl<'a> BranchCtx<'a> {
    fn new(
        theory: &'a Theory,
        goal: &'a Sentence,
        flavor: CaseFlavor,
        rules: &'static RuleSet,
        include_some: bool,
        opts: &DecideOptions,
    ) -> Result<Self, DecideError> {
        let mut delta = theory.sentences.clone();
        delta.push(goal.clone());
        let mut terms: Vec<Term> = subterm_closure(&delta).into_iter().collect();
        terms.sort();
        let universe = branch_universe(&delta, opts.depth_slack, include_some, true);
        Ok(BranchCtx {
            theory,
            goal,
            terms,
            verbs: occurring_verbs(&delta),
            universe,
            rules,
            flavor,
            universe_cap: opts.universe_cap,
            branch_cap: opts.branch_cap,
        })
    }

    /// Depth-first walk of the assignment tree in canonical order
    /// (inhabited before empty), pruning a subtree as soon as its partial
    /// package already yields the goal.
    fn search(&self) -> Result<SearchOutcome, DecideError> {
        let mut branches = Vec::new();
        let mut prefix = Vec::new();
        let mut visits = 0u64;
        let mut max_rounds = 0usize;
        let failing = self.dfs(&mut prefix, &mut branches, &mut visits, &mut max_rounds)?;
        Ok(match failing {
            Some(sat) => SearchOutcome::Failing {
                sat,
                visits,
                max_rounds,
            },
            None => SearchOutcome::AllDerive {
                branches,
                visits,
                max_rounds,
            },
        })
    }

    fn dfs(
        &self,
        prefix: &mut Vec<ExistFlag>,
        branches: &mut Vec<CaseBranch>,
        visits: &mut u64,
        max_rounds: &mut usize,
    ) -> Result<Option<SaturationResult>, DecideError> {
        *visits += 1;
        if *visits > self.branch_cap {
            return Err(DecideError::BranchBudget {
                terms: self.terms.len(),
                cap: self.branch_cap,
            });
        }
        let pkg: Vec<Sentence> = prefix
            .iter()
            .zip(&self.terms)
            .flat_map(|(&flag, t)| package(self.flavor, flag, t, &self.terms, &self.verbs))
            .collect();
        let mut gamma = self.theory.sentences.clone();
        gamma.extend(pkg.iter().cloned());
        let sat_opts = SaturationOptions {
            universe_cap: self.universe_cap,
            stop_at: Some(self.goal.clone()),
        };
        let sat = saturate(&gamma, self.rules, &self.universe, &sat_opts)?;
        *max_rounds = (*max_rounds).max(sat.rounds());
        if sat.contains(self.goal) {
            let derivation = sat
                .extract_proof(self.goal)
                .ok_or_else(|| DecideError::Internal("derived goal has no proof".into()))?;
            branches.push(CaseBranch {
                assignment: prefix.clone(),
                branch_theory: pkg,
                derivation,
            });
            return Ok(None);
        }
        if prefix.len() == self.terms.len() {
            return Ok(Some(sat));
        }
        for flag in [ExistFlag::Nonempty, ExistFlag::Empty] {
            prefix.push(flag);
            let failing = self.dfs(prefix, branches, visits, max_rounds)?;
            prefix.pop();
            if failing.is_some() {
                return Ok(failing);
            }
        }
        Ok(None)
    }

    fn stats(
        &self,
        start: &Instant,
        visits: u64,
        max_rounds: usize,
        models_checked: Option<u64>,
    ) -> DecisionStats {
        DecisionStats {
            universe_size: Some(self.universe.len()),
            rounds: Some(max_rounds),
            branches: Some(visits as usize),
            models_checked,
            elapsed_ms: start.elapsed().as_millis() as u64,
            ..DecisionStats::default()
        }
    }

    /// Declared vocabulary plus anything in the goal.
    fn vocabulary(&self) -> (IndexSet<Ident>, IndexSet<Ident>) {
        let (goal_nouns, goal_verbs) = self.goal.symbols();
        let mut nouns = self.theory.nouns.clone();
        nouns.extend(goal_nouns);
        let mut verbs = self.theory.verbs.clone();
        verbs.extend(goal_verbs);
        (nouns, verbs)
    }
}

/// Quantity tags for the countermodel elements of the case-split deciders.
const TAGS: [&str; 2] = ["all", "some"];

/// Countermodel from a failing branch of the All/Some split: elements are
/// tagged pairs `(x, y, q)` with `some x y` derivable in the branch; a pair
/// falls under a noun when either component provably falls under it, and an
/// `r`-edge holds when some component `z` of the source has `all z (r all w)`
/// for a component `w` of the target, or the target is an existentially
/// tagged diagonal pair `(w, w, some)` and `all z (r some w)` is derivable.
fn triple_model(ctx: &BranchCtx<'_>, sat: &SaturationResult) -> FiniteModel {
    let (nouns, verbs) = ctx.vocabulary();
    let mut elements: Vec<(usize, usize, usize)> = Vec::new();
    for (i, x) in ctx.terms.iter().enumerate() {
        for (j, y) in ctx.terms.iter().enumerate() {
            if sat.contains(&Sentence::Some(x.clone(), y.clone())) {
                for q in 0..2 {
                    elements.push((i, j, q));
                }
            }
        }
    }
    let name =
        |&(i, j, q): &(usize, usize, usize)| format!("({}, {}, {})", ctx.terms[i], ctx.terms[j], TAGS[q]);
    let domain: Vec<String> = elements.iter().map(|e| name(e)).collect();

    let mut noun_map: BTreeMap<Ident, BTreeSet<String>> = BTreeMap::new();
    for p in &nouns {
        let pt = Term::Noun(p.clone());
        let ext: BTreeSet<String> = elements
            .iter()
            .enumerate()
            .filter(|(_, &(i, j, _))| sat.le(&ctx.terms[i], &pt) || sat.le(&ctx.terms[j], &pt))
            .map(|(k, _)| domain[k].clone())
            .collect();
        noun_map.insert(p.clone(), ext);
    }

    let mut verb_map: BTreeMap<Ident, BTreeSet<(String, String)>> = BTreeMap::new();
    for r in &verbs {
        let mut ext = BTreeSet::new();
        for (k1, &(i1, j1, _)) in elements.iter().enumerate() {
            for (k2, &(i2, j2, q2)) in elements.iter().enumerate() {
                let sources = [&ctx.terms[i1], &ctx.terms[j1]];
                let targets = [&ctx.terms[i2], &ctx.terms[j2]];
                let related = sources.iter().any(|z| {
                    targets
                        .iter()
                        .any(|w| sat.le(z, &Term::all_of(r.clone(), (*w).clone())))
                        || (q2 == 1
                            && i2 == j2
                            && sat.le(z, &Term::some_of(r.clone(), ctx.terms[i2].clone())))
                });
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

/// Countermodel from a failing branch of the All-only split: elements are
/// tagged terms `(x, q)` with `all (r all x) (r some x)` derivable for every
/// verb in the branch; `(x, q)` falls under a noun `p` when `all x p` is
/// derivable, and an `r`-edge from `(x, q)` to `(y, q')` holds when
/// `all x (r all y)` is derivable, or `q'` is the existential tag and
/// `all x (r some y)` is derivable.
fn tagged_term_model(ctx: &BranchCtx<'_>, sat: &SaturationResult) -> FiniteModel {
    let (nouns, verbs) = ctx.vocabulary();
    let effectively_inhabited = |x: &Term| {
        ctx.verbs.iter().all(|r| {
            sat.contains(&Sentence::All(
                Term::all_of(r.clone(), x.clone()),
                Term::some_of(r.clone(), x.clone()),
            ))
        })
    };
    let mut elements: Vec<(usize, usize)> = Vec::new();
    for (i, x) in ctx.terms.iter().enumerate() {
        if effectively_inhabited(x) {
            for q in 0..2 {
                elements.push((i, q));
            }
        }
    }
    let name = |&(i, q): &(usize, usize)| format!("({}, {})", ctx.terms[i], TAGS[q]);
    let domain: Vec<String> = elements.iter().map(|e| name(e)).collect();

    let mut noun_map: BTreeMap<Ident, BTreeSet<String>> = BTreeMap::new();
    for p in &nouns {
        let pt = Term::Noun(p.clone());
        let ext: BTreeSet<String> = elements
            .iter()
            .enumerate()
            .filter(|(_, &(i, _))| sat.le(&ctx.terms[i], &pt))
            .map(|(k, _)| domain[k].clone())
            .collect();
        noun_map.insert(p.clone(), ext);
    }

    let mut verb_map: BTreeMap<Ident, BTreeSet<(String, String)>> = BTreeMap::new();
    for r in &verbs {
        let mut ext = BTreeSet::new();
        for (k1, &(i1, _)) in elements.iter().enumerate() {
            for (k2, &(i2, q2)) in elements.iter().enumerate() {
                let x = &ctx.terms[i1];
                let y = &ctx.terms[i2];
                let related = sat.le(x, &Term::all_of(r.clone(), y.clone()))
                    || (q2 == 1 && sat.le(x, &Term::some_of(r.clone(), y.clone())));
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
