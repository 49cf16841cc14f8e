//! Clause-level reasoning: embedding, rule-step validation, bounded
//! saturation, and the decision procedures for the clausal fragments.
//!
//! Clauses are the two meet sentences: `[ x1 .. xn ]` ("the xs have empty
//! meet") and `< x1 .. xn >` ("the xs have nonempty meet"). `all x y` embeds
//! as `[ x (not y) ]` and `some x y` as `< x y >`; decisions and emitted
//! proofs are relative to the embedded theory and goal.
//!
//! Literal handling is syntactic except for complement detection, which
//! ignores top-level double complements: `(not (not x))` complements
//! `(not x)`. The search is deliberately bounded (literal depth and clause
//! budgets) and never answers `no` without an explicit countermodel; when
//! neither a derivation nor a countermodel is found within bounds the answer
//! is `unknown`.

use std::collections::HashSet;
use std::time::Instant;

use thiserror::Error;

use crate::decision::{Certificate, Decision, DecisionStats};
use crate::proofs::{check_proof, ProofNode};
use crate::rules::{rule_set, ClausalKind, DischargeKind, RuleSetName};
use crate::semantics::{
    is_countermodel, oracle_consequence, oracle_max_feasible_size, OracleOutcome, SemanticsError,
    DEFAULT_ORACLE_CAP,
};
use crate::syntax::{Ident, Sentence, Term, Theory};

/// Default bound on the number of stored clauses during saturation.
pub const DEFAULT_MAX_CLAUSES: usize = 20_000;
/// Default largest domain size tried during countermodel search.
pub const DEFAULT_COUNTERMODEL_SIZE: usize = 4;
/// Slack added to the maximum input literal depth to bound derived literals.
pub const DEPTH_SLACK: usize = 2;

/// Errors from the clause engine.
#[derive(Debug, Error)]
pub enum ClausalError {
    #[error("sentence not supported by the clause engine: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("internal error: {0}")]
    Internal(String),
}

// ---------------------------------------------------------------------------
// Literals
// ---------------------------------------------------------------------------

/// Strip top-level double complements: `(not (not t))` reduces to `t`,
/// repeatedly. Complements inside a term are untouched.
pub fn strip_double_not(t: &Term) -> Term {
    let mut cur = t;
    loop {
        if let Term::Not(b) = cur {
            if let Term::Not(inner) = &**b {
                cur = inner;
                continue;
            }
        }
        return cur.clone();
    }
}

/// The complementary literal of `t`, modulo top-level double complements.
pub fn complement(t: &Term) -> Term {
    match strip_double_not(t) {
        Term::Not(b) => *b,
        other => Term::not(other),
    }
}

/// Are `a` and `b` complementary literals? Symmetric.
pub fn complements(a: &Term, b: &Term) -> bool {
    complement(a) == strip_double_not(b)
}

fn is_positive(t: &Term) -> bool {
    !matches!(t, Term::Not(_))
}

fn lit_depth(lits: &[Term]) -> usize {
    lits.iter().map(Term::depth).max().unwrap_or(0)
}

fn canonical(mut lits: Vec<Term>) -> Vec<Term> {
    lits.sort();
    lits.dedup();
    lits
}

/// Does every literal of `a` occur in `b` (syntactically)?
pub fn subsumes(a: &[Term], b: &[Term]) -> bool {
    a.iter().all(|t| b.contains(t))
}

fn has_some_of(lits: &[Term]) -> bool {
    lits.iter()
        .any(|t| t.subterms().iter().any(|s| matches!(s, Term::SomeOf(..))))
}

// ---------------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------------

/// Clause-embed a sentence: `all x y` becomes `[ x (not y) ]`, `some x y`
/// becomes `< x y >`; clause sentences pass through unchanged. Four-place
/// sentences are outside the clausal fragments.
pub fn embed_l45(s: &Sentence) -> Result<Sentence, ClausalError> {
    Ok(match s {
        Sentence::All(x, y) => {
            Sentence::empty_meet(vec![x.clone(), Term::not(y.clone())]).0
        }
        Sentence::Some(x, y) => Sentence::nonempty_meet(vec![x.clone(), y.clone()]).0,
        Sentence::EmptyMeet(_) | Sentence::NonemptyMeet(_) => s.clone(),
        Sentence::AllOrSome(..) => return Err(ClausalError::Unsupported(s.to_string())),
    })
}

/// Embed every sentence of a theory.
pub fn embed_theory(gamma: &[Sentence]) -> Result<Vec<Sentence>, ClausalError> {
    gamma.iter().map(embed_l45).collect()
}

// ---------------------------------------------------------------------------
// Rule primitives
// ---------------------------------------------------------------------------

/// The admissible literal selection of a clause for the verb-introduction
/// rule: the unique complement-free literal, provided every other literal is
/// complement-headed (both judged modulo double complements). Returns
/// `(complement bodies of the other literals, selected literal)`.
pub fn rel_selection(lits: &[Term]) -> Option<(Vec<Term>, Term)> {
    let normalized: Vec<Term> = lits.iter().map(strip_double_not).collect();
    let positives: Vec<usize> = normalized
        .iter()
        .enumerate()
        .filter(|(_, t)| is_positive(t))
        .map(|(i, _)| i)
        .collect();
    if positives.len() != 1 {
        return None;
    }
    let pivot = normalized[positives[0]].clone();
    let others: Vec<Term> = normalized
        .into_iter()
        .enumerate()
        .filter(|(i, _)| *i != positives[0])
        .map(|(_, t)| match t {
            Term::Not(b) => *b,
            _ => unreachable!("non-selected literals are complement-headed"),
        })
        .collect();
    Some((others, pivot))
}

/// The verb-introduction conclusion for a selection and verb: each side
/// literal `x` becomes `(r all x)` and the selected literal `p` becomes
/// `(not (r all p))`.
pub fn rel_output(others: &[Term], pivot: &Term, verb: &Ident) -> Vec<Term> {
    let mut lits: Vec<Term> = others
        .iter()
        .map(|t| Term::all_of(verb.clone(), t.clone()))
        .collect();
    lits.push(Term::not(Term::all_of(verb.clone(), pivot.clone())));
    canonical(lits)
}

/// All resolvents of two clauses: for every complementary literal pair with
/// both residuals nonempty, the merged residual clause. Unit-against-unit
/// resolution is excluded (contradictions are routed through the
/// absurdity rule instead, so the empty clause never arises).
pub fn resolvents(c1: &[Term], c2: &[Term]) -> Vec<Vec<Term>> {
    let mut out = Vec::new();
    for (i, p) in c1.iter().enumerate() {
        for (j, q) in c2.iter().enumerate() {
            if !complements(p, q) {
                continue;
            }
            let r1: Vec<Term> = c1
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, t)| t.clone())
                .collect();
            let r2: Vec<Term> = c2
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, t)| t.clone())
                .collect();
            if r1.is_empty() || r2.is_empty() {
                continue;
            }
            let merged = canonical(r1.into_iter().chain(r2).collect());
            if !out.contains(&merged) {
                out.push(merged);
            }
        }
    }
    out
}

fn empty_lits(s: &Sentence) -> Option<&[Term]> {
    match s {
        Sentence::EmptyMeet(lits) => Some(lits),
        _ => None,
    }
}

fn nonempty_lits(s: &Sentence) -> Option<&[Term]> {
    match s {
        Sentence::NonemptyMeet(lits) => Some(lits),
        _ => None,
    }
}

/// Validate one clause-rule application: do the children's conclusions
/// justify `concl` under `kind`? Used by the proof checker.
pub fn check_clause_step(
    kind: ClausalKind,
    children: &[&Sentence],
    concl: &Sentence,
) -> Result<(), String> {
    match kind {
        ClausalKind::Claxiom => {
            if !children.is_empty() {
                return Err("axiom takes no subproofs".into());
            }
            let lits = empty_lits(concl).ok_or("conclusion must be a `[ .. ]` sentence")?;
            if lits.len() == 2 && complements(&lits[0], &lits[1]) {
                Ok(())
            } else {
                Err("conclusion must consist of exactly one complementary literal pair".into())
            }
        }
        ClausalKind::Res => {
            if children.len() != 2 {
                return Err("expected exactly two subproofs".into());
            }
            let c1 = empty_lits(children[0]).ok_or("subproofs must conclude `[ .. ]` sentences")?;
            let c2 = empty_lits(children[1]).ok_or("subproofs must conclude `[ .. ]` sentences")?;
            let target = empty_lits(concl).ok_or("conclusion must be a `[ .. ]` sentence")?;
            if resolvents(c1, c2).iter().any(|r| r == target) {
                Ok(())
            } else {
                Err("conclusion is not a resolvent of the subproofs (on a complementary \
                     pair with both residuals nonempty)"
                    .into())
            }
        }
        ClausalKind::Rel => {
            if children.len() != 1 {
                return Err("expected exactly one subproof".into());
            }
            let c = empty_lits(children[0]).ok_or("subproof must conclude a `[ .. ]` sentence")?;
            let target = empty_lits(concl).ok_or("conclusion must be a `[ .. ]` sentence")?;
            let (others, pivot) = rel_selection(c).ok_or(
                "premise clause admits no literal selection (need exactly one \
                 complement-free literal)",
            )?;
            let mut verbs: Vec<&Ident> = Vec::new();
            for t in target {
                for sub in t.subterms() {
                    if let Term::AllOf(r, _) = sub {
                        if !verbs.contains(&r) {
                            verbs.push(r);
                        }
                    }
                }
            }
            if verbs
                .iter()
                .any(|r| rel_output(&others, &pivot, r) == *target)
            {
                Ok(())
            } else {
                Err("conclusion does not match the verb-introduction image of the premise \
                     clause for any verb"
                    .into())
            }
        }
        ClausalKind::Structural => {
            if children.len() != 1 {
                return Err("expected exactly one subproof".into());
            }
            let c = empty_lits(children[0]).ok_or("subproof must conclude a `[ .. ]` sentence")?;
            let target = empty_lits(concl).ok_or("conclusion must be a `[ .. ]` sentence")?;
            if subsumes(c, target) {
                Ok(())
            } else {
                Err("every literal of the subproof's clause must occur in the conclusion".into())
            }
        }
        ClausalKind::Efq => {
            if children.len() != 2 {
                return Err("expected exactly two subproofs".into());
            }
            if empty_lits(concl).is_none() {
                return Err("conclusion must be a `[ .. ]` sentence".into());
            }
            let ok = |pos: &Sentence, neg: &Sentence| {
                matches!(
                    (nonempty_lits(pos), empty_lits(neg)),
                    (Some(a), Some(b)) if a == b
                )
            };
            if ok(children[0], children[1]) || ok(children[1], children[0]) {
                Ok(())
            } else {
                Err("subproofs must conclude `< xs >` and `[ xs ]` over the same literals".into())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Saturation
// ---------------------------------------------------------------------------

/// Provenance of a stored clause.
#[derive(Debug, Clone)]
enum How {
    /// An embedded input sentence; `hyp` marks the withdrawn hypothesis
    /// introduced when refuting a `< .. >` goal.
    Given { sentence: Sentence, hyp: bool },
    Res(usize, usize),
    Rel(usize, Ident),
}

#[derive(Debug, Clone)]
struct ClauseEntry {
    lits: Vec<Term>,
    how: How,
}

/// What the saturation loop is looking for.
struct Targets {
    /// Literals of a `[ .. ]` goal: stop when a stored clause subsumes them.
    goal_lits: Option<Vec<Term>>,
    /// The `< .. >` inputs: stop when a stored clause subsumes one of them
    /// (the theory, plus hypothesis if any, is then inconsistent).
    pos: Vec<(Sentence, Vec<Term>)>,
}

enum Found {
    /// `entries[i]` subsumes the goal literals.
    GoalSubsumed(usize),
    /// `entries[i]` subsumes the literals of `pos[p]`.
    Contradiction { neg: usize, pos: usize },
}

struct Saturator {
    entries: Vec<ClauseEntry>,
    seen: HashSet<Vec<Term>>,
    verbs: Vec<Ident>,
    depth_bound: usize,
    max_clauses: usize,
    exhausted: bool,
    skip_rel_with_some_of: bool,
}

impl Saturator {
    fn add(&mut self, lits: Vec<Term>, how: How, given: bool, targets: &Targets) -> Option<Found> {
        if self.seen.contains(&lits) {
            return None;
        }
        if !given {
            if lit_depth(&lits) > self.depth_bound {
                self.exhausted = true;
                return None;
            }
            if self.entries.iter().any(|e| subsumes(&e.lits, &lits)) {
                return None;
            }
            if self.entries.len() >= self.max_clauses {
                self.exhausted = true;
                return None;
            }
        }
        self.seen.insert(lits.clone());
        self.entries.push(ClauseEntry { lits, how });
        let i = self.entries.len() - 1;
        let lits = &self.entries[i].lits;
        if let Some(goal) = &targets.goal_lits {
            if subsumes(lits, goal) {
                return Some(Found::GoalSubsumed(i));
            }
        }
        for (p, (_, plits)) in targets.pos.iter().enumerate() {
            if subsumes(lits, plits) {
                return Some(Found::Contradiction { neg: i, pos: p });
            }
        }
        None
    }

    /// Exhaust resolution and verb introduction (subject to bounds), FIFO
    /// over stored clauses. Returns the first target hit, if any.
    fn run(&mut self, targets: &Targets) -> Option<Found> {
        let mut next = 0;
        while next < self.entries.len() {
            let i = next;
            next += 1;
            for j in 0..=i {
                let (c1, c2) = (self.entries[i].lits.clone(), self.entries[j].lits.clone());
                for merged in resolvents(&c1, &c2) {
                    if let Some(found) = self.add(merged, How::Res(i, j), false, targets) {
                        return Some(found);
                    }
                }
            }
            let lits = self.entries[i].lits.clone();
            if self.skip_rel_with_some_of && has_some_of(&lits) {
                continue;
            }
            if let Some((others, pivot)) = rel_selection(&lits) {
                for r in self.verbs.clone() {
                    let out = rel_output(&others, &pivot, &r);
                    if let Some(found) = self.add(out, How::Rel(i, r), false, targets) {
                        return Some(found);
                    }
                }
            }
        }
        None
    }

    fn clause_sentence(&self, i: usize) -> Sentence {
        Sentence::empty_meet(self.entries[i].lits.clone()).0
    }

    /// Rebuild the recorded derivation of `entries[i]` as a proof tree.
    fn reconstruct(&self, i: usize) -> ProofNode {
        match &self.entries[i].how {
            How::Given { sentence, hyp } => {
                if *hyp {
                    ProofNode::hyp(sentence.clone())
                } else {
                    ProofNode::premise(sentence.clone())
                }
            }
            How::Res(a, b) => ProofNode::step(
                ClausalKind::Res.name(),
                vec![self.reconstruct(*a), self.reconstruct(*b)],
                self.clause_sentence(i),
            ),
            How::Rel(a, r) => {
                let (others, pivot) = rel_selection(&self.entries[*a].lits)
                    .expect("selection existed when the clause was derived");
                let concl = Sentence::empty_meet(rel_output(&others, &pivot, r)).0;
                ProofNode::step(ClausalKind::Rel.name(), vec![self.reconstruct(*a)], concl)
            }
        }
    }
}

/// Widen a `[ .. ]` conclusion to a superset clause, when needed.
fn widen_to(node: ProofNode, target: &[Term]) -> ProofNode {
    match &node.conclusion {
        Sentence::EmptyMeet(lits) if lits == target => node,
        _ => {
            let concl = Sentence::empty_meet(target.to_vec()).0;
            ProofNode::step(ClausalKind::Structural.name(), vec![node], concl)
        }
    }
}

/// A complementary literal pair inside a clause, if any.
fn internal_pair(lits: &[Term]) -> Option<(Term, Term)> {
    for (i, p) in lits.iter().enumerate() {
        for q in &lits[i + 1..] {
            if complements(p, q) {
                return Some((p.clone(), q.clone()));
            }
        }
    }
    None
}

fn claxiom_node(p: Term, q: Term) -> ProofNode {
    let concl = Sentence::empty_meet(vec![p, q]).0;
    ProofNode::step(ClausalKind::Claxiom.name(), Vec::new(), concl)
}

// ---------------------------------------------------------------------------
// Decision procedures
// ---------------------------------------------------------------------------

/// Knobs for the clausal deciders.
#[derive(Debug, Clone)]
pub struct ClausalOptions {
    /// Bound on derived literal depth; `None` means the maximum input
    /// literal depth plus [`DEPTH_SLACK`]. Input clauses are kept regardless.
    pub depth_bound: Option<usize>,
    /// Bound on stored clauses.
    pub max_clauses: usize,
    /// Largest domain size attempted during countermodel search (further
    /// limited by the oracle's candidate cap).
    pub countermodel_size: usize,
    /// Candidate cap handed to the countermodel oracle.
    pub oracle_cap: u128,
}

impl Default for ClausalOptions {
    fn default() -> Self {
        ClausalOptions {
            depth_bound: None,
            max_clauses: DEFAULT_MAX_CLAUSES,
            countermodel_size: DEFAULT_COUNTERMODEL_SIZE,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }
}

/// Decide `gamma ⊨ goal` for clausal theories (complement-free literals are
/// not required; four-place sentences are rejected). Yes answers carry a
/// proof over the embedded theory, no answers a countermodel; within
/// exhausted bounds the answer is `unknown`.
pub fn decide_clausal(
    gamma: &[Sentence],
    goal: &Sentence,
    opts: &ClausalOptions,
) -> Result<Decision, ClausalError> {
    decide_clauses(gamma, goal, opts, false)
}

/// The same engine with verb introduction restricted to clauses free of
/// `(r some t)` terms: a deliberately incomplete search for the richest
/// term language, still sound and still countermodel-backed on `no`.
pub fn decide_l5(
    gamma: &[Sentence],
    goal: &Sentence,
    opts: &ClausalOptions,
) -> Result<Decision, ClausalError> {
    decide_clauses(gamma, goal, opts, true)
}

fn decide_clauses(
    gamma: &[Sentence],
    goal: &Sentence,
    opts: &ClausalOptions,
    skip_rel_with_some_of: bool,
) -> Result<Decision, ClausalError> {
    let start = Instant::now();
    let embedded = embed_theory(gamma)?;
    let goal_embedded = embed_l45(goal)?;

    // Verbs available to verb introduction: those occurring in the inputs.
    let mut verbs: Vec<Ident> = Vec::new();
    for s in gamma.iter().chain(std::iter::once(goal)) {
        let (_, vs) = s.symbols();
        for v in vs {
            if !verbs.contains(&v) {
                verbs.push(v);
            }
        }
    }

    let mut max_input_depth = 0;
    for s in embedded.iter().chain(std::iter::once(&goal_embedded)) {
        max_input_depth = max_input_depth.max(lit_depth(
            &s.top_terms().into_iter().cloned().collect::<Vec<_>>(),
        ));
    }
    let depth_bound = opts.depth_bound.unwrap_or(max_input_depth + DEPTH_SLACK);

    let mut sat = Saturator {
        entries: Vec::new(),
        seen: HashSet::new(),
        verbs,
        depth_bound,
        max_clauses: opts.max_clauses,
        exhausted: false,
        skip_rel_with_some_of,
    };

    let (goal_lits, hyp_clause) = match &goal_embedded {
        Sentence::EmptyMeet(lits) => (Some(lits.clone()), None),
        Sentence::NonemptyMeet(lits) => {
            (None, Some(Sentence::empty_meet(lits.clone()).0))
        }
        _ => unreachable!("embedding yields meet sentences only"),
    };

    let mut targets = Targets {
        goal_lits: goal_lits.clone(),
        pos: Vec::new(),
    };
    for s in &embedded {
        if let Sentence::NonemptyMeet(lits) = s {
            targets.pos.push((s.clone(), lits.clone()));
        }
    }

    // Immediate wins that need no stored clause: a directly contradictory
    // `[ .. ]` goal, or a `< .. >` input containing a complementary pair.
    let mut found_proof: Option<ProofNode> = None;
    if let Some(goal) = &goal_lits {
        if let Some((p, q)) = internal_pair(goal) {
            found_proof = Some(widen_to(claxiom_node(p, q), goal));
        }
    }
    if found_proof.is_none() {
        for (pos_sentence, plits) in &targets.pos {
            if let Some((p, q)) = internal_pair(plits) {
                let neg = widen_to(claxiom_node(p, q), plits);
                let pos = ProofNode::premise(pos_sentence.clone());
                found_proof = Some(conclude_from_contradiction(
                    &goal_embedded,
                    hyp_clause.as_ref(),
                    pos,
                    neg,
                ));
                break;
            }
        }
    }

    if found_proof.is_none() {
        // Seed the stored clauses: embedded `[ .. ]` inputs, plus the
        // withdrawn goal complement when refuting a `< .. >` goal.
        let mut found = None;
        for s in &embedded {
            if let Sentence::EmptyMeet(lits) = s {
                let how = How::Given {
                    sentence: s.clone(),
                    hyp: false,
                };
                if let Some(f) = sat.add(lits.clone(), how, true, &targets) {
                    found = Some(f);
                    break;
                }
            }
        }
        if found.is_none() {
            if let Some(hc) = &hyp_clause {
                if let Sentence::EmptyMeet(lits) = hc {
                    let how = How::Given {
                        sentence: hc.clone(),
                        hyp: true,
                    };
                    found = sat.add(lits.clone(), how, true, &targets);
                }
            }
        }
        if found.is_none() {
            found = sat.run(&targets);
        }
        if let Some(f) = found {
            found_proof = Some(match f {
                Found::GoalSubsumed(i) => {
                    let goal = goal_lits.as_ref().expect("goal-subsumption target");
                    widen_to(sat.reconstruct(i), goal)
                }
                Found::Contradiction { neg, pos } => {
                    let (pos_sentence, plits) = &targets.pos[pos];
                    let neg_node = widen_to(sat.reconstruct(neg), plits);
                    let pos_node = ProofNode::premise(pos_sentence.clone());
                    conclude_from_contradiction(
                        &goal_embedded,
                        hyp_clause.as_ref(),
                        pos_node,
                        neg_node,
                    )
                }
            });
        }
    }

    let mut stats = DecisionStats {
        clauses: Some(sat.entries.len()),
        elapsed_ms: 0,
        ..Default::default()
    };

    if let Some(proof) = found_proof {
        if proof.conclusion != goal_embedded {
            return Err(ClausalError::Internal(
                "constructed proof concludes the wrong sentence".into(),
            ));
        }
        check_proof(&embedded, rule_set(RuleSetName::Clausal), &proof)
            .map_err(|e| ClausalError::Internal(format!("emitted proof failed validation: {e}")))?;
        stats.elapsed_ms = start.elapsed().as_millis() as u64;
        return Ok(Decision::yes(Certificate::Proof(proof), stats));
    }

    // No derivation within bounds: look for a countermodel to the original
    // entailment.
    let mut theory = Theory::new();
    for s in gamma.iter().chain(std::iter::once(goal)) {
        let (nouns, vs) = s.symbols();
        for n in nouns {
            theory.declare_noun(n);
        }
        for v in vs {
            theory.declare_verb(v);
        }
    }
    for s in gamma {
        theory.push_sentence(s.clone());
    }
    let m = oracle_max_feasible_size(&theory, opts.oracle_cap, opts.countermodel_size);
    match oracle_consequence(&theory, goal, m, opts.oracle_cap)? {
        OracleOutcome::Countermodel(model) => {
            if !is_countermodel(&model, &theory, goal)? {
                return Err(ClausalError::Internal(
                    "countermodel failed re-validation".into(),
                ));
            }
            stats.elapsed_ms = start.elapsed().as_millis() as u64;
            stats.bounds_exhausted = sat.exhausted;
            Ok(Decision::no(model, stats))
        }
        OracleOutcome::NoCounterexampleUpTo(_) => {
            stats.elapsed_ms = start.elapsed().as_millis() as u64;
            stats.bounds_exhausted = true;
            Ok(Decision::unknown(stats))
        }
    }
}

/// Wrap an inconsistency (`pos` concludes `< xs >`, `neg` concludes
/// `[ xs ]`) into a proof of the goal: absurdity for a `[ .. ]` goal, or a
/// discharge of the withdrawn complement for a `< .. >` goal.
fn conclude_from_contradiction(
    goal_embedded: &Sentence,
    hyp_clause: Option<&Sentence>,
    pos: ProofNode,
    neg: ProofNode,
) -> ProofNode {
    match goal_embedded {
        Sentence::EmptyMeet(_) => ProofNode::step(
            ClausalKind::Efq.name(),
            vec![pos, neg],
            goal_embedded.clone(),
        ),
        Sentence::NonemptyMeet(_) => {
            let hyp = hyp_clause.expect("refutation goals carry a withdrawn clause");
            ProofNode::discharge(
                DischargeKind::Raa,
                vec![pos, neg],
                vec![hyp.clone(), hyp.clone()],
                goal_embedded.clone(),
            )
        }
        _ => unreachable!("embedded goals are meet sentences"),
    }
}
