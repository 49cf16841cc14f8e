//! Finite models and evaluation, plus a brute-force consequence oracle.
//!
//! A [`FiniteModel`] interprets nouns as subsets of a finite domain and verbs
//! as binary relations over it. Term evaluation follows the constructors:
//!
//! * `(r all t)` denotes the elements related by `r` to *every* element of `t`
//! * `(r some t)` denotes the elements related by `r` to *at least one*
//! * `(not t)` denotes the complement
//!
//! and sentence satisfaction reads `all` as inclusion, `some` as nonempty
//! intersection, the four-place form as the disjunction of the two, `[..]`
//! as empty common meet and `<..>` as nonempty common meet. The empty domain
//! is a legitimate model.
//!
//! The oracle enumerates *every* interpretation over the declared vocabulary
//! up to a domain size bound, with no isomorphism reduction, in a fixed
//! deterministic order; it is meant as an independent cross-check for the
//! decision procedures, not as a performant solver.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::syntax::{Ident, Sentence, Term, Theory};

/// Default cap on the number of candidate interpretations the oracle will
/// enumerate before giving up with a budget error.
pub const DEFAULT_ORACLE_CAP: u128 = 1 << 24;

/// Errors from evaluation or oracle search.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("model interprets `{symbol}` over unknown element `{element}`")]
    UnknownElement { symbol: String, element: String },
    #[error("model has no interpretation for {role} `{symbol}`")]
    MissingSymbol { symbol: String, role: &'static str },
    #[error("oracle budget exceeded: {candidates} candidate models, cap {cap}")]
    Budget { candidates: u128, cap: u128 },
}

/// A finite interpretation of a vocabulary.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteModel {
    /// Domain elements, in a fixed order.
    pub domain: Vec<String>,
    /// Noun name to set of elements.
    #[serde(default)]
    pub nouns: BTreeMap<Ident, BTreeSet<String>>,
    /// Verb name to set of (subject, object) pairs.
    #[serde(default)]
    pub verbs: BTreeMap<Ident, BTreeSet<(String, String)>>,
}

impl FiniteModel {
    /// An empty-domain model interpreting the given vocabulary.
    pub fn empty(nouns: impl IntoIterator<Item = Ident>, verbs: impl IntoIterator<Item = Ident>) -> Self {
        FiniteModel {
            domain: Vec::new(),
            nouns: nouns.into_iter().map(|n| (n, BTreeSet::new())).collect(),
            verbs: verbs.into_iter().map(|v| (v, BTreeSet::new())).collect(),
        }
    }

    /// Check internal consistency: every interpreted element is in the domain.
    pub fn validate(&self) -> Result<(), SemanticsError> {
        let dom: BTreeSet<&String> = self.domain.iter().collect();
        for (n, set) in &self.nouns {
            for e in set {
                if !dom.contains(e) {
                    return Err(SemanticsError::UnknownElement {
                        symbol: n.clone(),
                        element: e.clone(),
                    });
                }
            }
        }
        for (v, rel) in &self.verbs {
            for (a, b) in rel {
                for e in [a, b] {
                    if !dom.contains(e) {
                        return Err(SemanticsError::UnknownElement {
                            symbol: v.clone(),
                            element: e.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluate a term to the set of elements it denotes.
    pub fn eval_term(&self, t: &Term) -> Result<BTreeSet<String>, SemanticsError> {
        match t {
            Term::Noun(p) => self
                .nouns
                .get(p)
                .cloned()
                .ok_or_else(|| SemanticsError::MissingSymbol {
                    symbol: p.clone(),
                    role: "noun",
                }),
            Term::AllOf(r, body) => {
                let b = self.eval_term(body)?;
                let rel = self.relation(r)?;
                Ok(self
                    .domain
                    .iter()
                    .filter(|m| b.iter().all(|n| rel.contains(&((*m).clone(), n.clone()))))
                    .cloned()
                    .collect())
            }
            Term::SomeOf(r, body) => {
                let b = self.eval_term(body)?;
                let rel = self.relation(r)?;
                Ok(self
                    .domain
                    .iter()
                    .filter(|m| b.iter().any(|n| rel.contains(&((*m).clone(), n.clone()))))
                    .cloned()
                    .collect())
            }
            Term::Not(body) => {
                let b = self.eval_term(body)?;
                Ok(self
                    .domain
                    .iter()
                    .filter(|m| !b.contains(*m))
                    .cloned()
                    .collect())
            }
        }
    }

    fn relation(&self, r: &str) -> Result<&BTreeSet<(String, String)>, SemanticsError> {
        self.verbs.get(r).ok_or_else(|| SemanticsError::MissingSymbol {
            symbol: r.to_string(),
            role: "verb",
        })
    }

    /// Does the model satisfy the sentence?
    pub fn satisfies(&self, s: &Sentence) -> Result<bool, SemanticsError> {
        match s {
            Sentence::All(x, y) => {
                let xs = self.eval_term(x)?;
                let ys = self.eval_term(y)?;
                Ok(xs.is_subset(&ys))
            }
            Sentence::Some(x, y) => {
                let xs = self.eval_term(x)?;
                let ys = self.eval_term(y)?;
                Ok(!xs.is_disjoint(&ys))
            }
            Sentence::AllOrSome(a, b, x, y) => {
                let all_part = {
                    let asx = self.eval_term(a)?;
                    let bs = self.eval_term(b)?;
                    asx.is_subset(&bs)
                };
                if all_part {
                    return Ok(true);
                }
                let xs = self.eval_term(x)?;
                let ys = self.eval_term(y)?;
                Ok(!xs.is_disjoint(&ys))
            }
            Sentence::EmptyMeet(ts) => Ok(self.meet(ts)?.is_empty()),
            Sentence::NonemptyMeet(ts) => Ok(!self.meet(ts)?.is_empty()),
        }
    }

    fn meet(&self, ts: &[Term]) -> Result<BTreeSet<String>, SemanticsError> {
        let mut iter = ts.iter();
        let first = iter
            .next()
            .expect("clause sentences are never empty");
        let mut acc = self.eval_term(first)?;
        for t in iter {
            let next = self.eval_term(t)?;
            acc = acc.intersection(&next).cloned().collect();
        }
        Ok(acc)
    }
}

/// Per-sentence outcome of checking a theory in a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelCheckReport {
    /// `(sentence, satisfied)` in theory order; sentences rendered on demand.
    pub results: Vec<(String, bool)>,
    pub all_satisfied: bool,
}

/// Check every sentence of the theory in the model.
pub fn model_check(model: &FiniteModel, theory: &Theory) -> Result<ModelCheckReport, SemanticsError> {
    model.validate()?;
    let mut results = Vec::with_capacity(theory.sentences.len());
    let mut all = true;
    for s in &theory.sentences {
        let ok = model.satisfies(s)?;
        all &= ok;
        results.push((s.to_string(), ok));
    }
    Ok(ModelCheckReport {
        results,
        all_satisfied: all,
    })
}

/// Is `model` a countermodel to the claim that `theory` entails `goal`?
pub fn is_countermodel(
    model: &FiniteModel,
    theory: &Theory,
    goal: &Sentence,
) -> Result<bool, SemanticsError> {
    Ok(model_check(model, theory)?.all_satisfied && !model.satisfies(goal)?)
}

/// Result of an oracle run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    /// A model of the theory falsifying the goal, found at the smallest
    /// domain size (and earliest enumeration position) possible.
    Countermodel(FiniteModel),
    /// No countermodel exists with domain size up to the bound.
    NoCounterexampleUpTo(usize),
}

/// How many candidate interpretations the oracle would enumerate for domain
/// sizes `0..=max_size` over the theory's declared vocabulary.
pub fn oracle_candidates(theory: &Theory, max_size: usize) -> u128 {
    let n = theory.nouns.len() as u32;
    let v = theory.verbs.len() as u32;
    let mut total: u128 = 0;
    for m in 0..=(max_size as u32) {
        let bits = m * n + m * m * v;
        if bits >= 127 {
            return u128::MAX;
        }
        total = total.saturating_add(1u128 << bits);
    }
    total
}

/// Largest `m <= limit` for which enumerating sizes `0..=m` stays within
/// `cap` candidates.
pub fn oracle_max_feasible_size(theory: &Theory, cap: u128, limit: usize) -> usize {
    let mut best = 0;
    for m in 0..=limit {
        if oracle_candidates(theory, m) <= cap {
            best = m;
        } else {
            break;
        }
    }
    best
}

/// Exhaustively search for a countermodel to `theory |= goal` over all
/// interpretations of the declared vocabulary with domain size `0..=max_size`.
///
/// Enumeration is in a fixed deterministic order (domain size ascending, then
/// an odometer over noun masks in declaration order followed by verb
/// relation matrices in declaration order), so the first countermodel found
/// is stable across runs. Errors with [`SemanticsError::Budget`] if the
/// total candidate count exceeds `cap`.
pub fn oracle_consequence(
    theory: &Theory,
    goal: &Sentence,
    max_size: usize,
    cap: u128,
) -> Result<OracleOutcome, SemanticsError> {
    let candidates = oracle_candidates(theory, max_size);
    if candidates > cap {
        return Err(SemanticsError::Budget { candidates, cap });
    }
    // Word-level packing limits each interpretation component to 64 bits;
    // anything larger would be far beyond any feasible cap anyway.
    let n = theory.nouns.len();
    let v = theory.verbs.len();
    for m in 0..=max_size {
        if m >= 64 || (v > 0 && m * m >= 64) || (n > 0 && m >= 64) {
            return Err(SemanticsError::Budget { candidates, cap });
        }
    }
    // Every symbol used by the problem must be declared, otherwise packed
    // evaluation has nothing to interpret it by.
    for s in theory.sentences.iter().chain(std::iter::once(goal)) {
        let (ns, vs) = s.symbols();
        for p in ns {
            if !theory.nouns.contains(&p) {
                return Err(SemanticsError::MissingSymbol { symbol: p, role: "noun" });
            }
        }
        for r in vs {
            if !theory.verbs.contains(&r) {
                return Err(SemanticsError::MissingSymbol { symbol: r, role: "verb" });
            }
        }
    }
    let nouns: Vec<&Ident> = theory.nouns.iter().collect();
    let verbs: Vec<&Ident> = theory.verbs.iter().collect();
    for m in 0..=max_size {
        if let Some(model) = search_at_size(theory, goal, &nouns, &verbs, m) {
            return Ok(OracleOutcome::Countermodel(model));
        }
    }
    Ok(OracleOutcome::NoCounterexampleUpTo(max_size))
}

/// Packed interpretation at a fixed domain size: noun extents and verb
/// relations as bitmasks (`bit i*m+j` of a verb word means `ei r ej`).
struct Packed {
    m: usize,
    noun_masks: Vec<u64>,
    verb_masks: Vec<u64>,
}

impl Packed {
    fn full(&self) -> u64 {
        if self.m == 0 {
            0
        } else {
            (1u64 << self.m) - 1
        }
    }

    fn eval(&self, t: &Term, nouns: &[&Ident], verbs: &[&Ident]) -> u64 {
        match t {
            Term::Noun(p) => {
                let i = nouns.iter().position(|n| *n == p).expect("validated noun");
                self.noun_masks[i]
            }
            Term::Not(b) => !self.eval(b, nouns, verbs) & self.full(),
            Term::AllOf(r, b) | Term::SomeOf(r, b) => {
                let bm = self.eval(b, nouns, verbs);
                let ri = verbs.iter().position(|v| *v == r).expect("validated verb");
                let rel = self.verb_masks[ri];
                let mut out = 0u64;
                for i in 0..self.m {
                    let row = (rel >> (i * self.m)) & self.full();
                    let hit = match t {
                        Term::AllOf(..) => row & bm == bm,
                        _ => row & bm != 0,
                    };
                    if hit {
                        out |= 1 << i;
                    }
                }
                out
            }
        }
    }

    fn satisfies(&self, s: &Sentence, nouns: &[&Ident], verbs: &[&Ident]) -> bool {
        match s {
            Sentence::All(x, y) => {
                let a = self.eval(x, nouns, verbs);
                a & self.eval(y, nouns, verbs) == a
            }
            Sentence::Some(x, y) => self.eval(x, nouns, verbs) & self.eval(y, nouns, verbs) != 0,
            Sentence::AllOrSome(a, b, x, y) => {
                let am = self.eval(a, nouns, verbs);
                (am & self.eval(b, nouns, verbs) == am)
                    || (self.eval(x, nouns, verbs) & self.eval(y, nouns, verbs) != 0)
            }
            Sentence::EmptyMeet(ts) => self.meet(ts, nouns, verbs) == 0,
            Sentence::NonemptyMeet(ts) => self.meet(ts, nouns, verbs) != 0,
        }
    }

    fn meet(&self, ts: &[Term], nouns: &[&Ident], verbs: &[&Ident]) -> u64 {
        let mut acc = self.full();
        for t in ts {
            acc &= self.eval(t, nouns, verbs);
        }
        acc
    }

    fn unpack(&self, nouns: &[&Ident], verbs: &[&Ident]) -> FiniteModel {
        let names: Vec<String> = (0..self.m).map(|i| format!("e{i}")).collect();
        let mut model = FiniteModel {
            domain: names.clone(),
            nouns: BTreeMap::new(),
            verbs: BTreeMap::new(),
        };
        for (i, n) in nouns.iter().enumerate() {
            let set = (0..self.m)
                .filter(|j| self.noun_masks[i] & (1 << j) != 0)
                .map(|j| names[j].clone())
                .collect();
            model.nouns.insert((*n).clone(), set);
        }
        for (i, v) in verbs.iter().enumerate() {
            let mut rel = BTreeSet::new();
            for a in 0..self.m {
                for b in 0..self.m {
                    if self.verb_masks[i] & (1 << (a * self.m + b)) != 0 {
                        rel.insert((names[a].clone(), names[b].clone()));
                    }
                }
            }
            model.verbs.insert((*v).clone(), rel);
        }
        model
    }
}

fn search_at_size(
    theory: &Theory,
    goal: &Sentence,
    nouns: &[&Ident],
    verbs: &[&Ident],
    m: usize,
) -> Option<FiniteModel> {
    let mut packed = Packed {
        m,
        noun_masks: vec![0; nouns.len()],
        verb_masks: vec![0; verbs.len()],
    };
    let noun_limit: u64 = 1 << m;
    let verb_limit: u64 = if m == 0 || verbs.is_empty() {
        1
    } else {
        1u64 << (m * m)
    };
    loop {
        let theory_ok = theory
            .sentences
            .iter()
            .all(|s| packed.satisfies(s, nouns, verbs));
        if theory_ok && !packed.satisfies(goal, nouns, verbs) {
            return Some(packed.unpack(nouns, verbs));
        }
        // Odometer step over (noun_masks ++ verb_masks).
        let mut carried = true;
        for slot in packed
            .noun_masks
            .iter_mut()
            .map(|s| (s, noun_limit))
            .chain(packed.verb_masks.iter_mut().map(|s| (s, verb_limit)))
        {
            let (word, limit) = slot;
            *word += 1;
            if *word < limit {
                carried = false;
                break;
            }
            *word = 0;
        }
        if carried {
            return None;
        }
    }
}

/// A pseudo-random model over the given vocabulary, reproducible from the
/// seed. The domain size is drawn uniformly from `0..=max_domain`; each noun
/// membership and each verb pair is an independent fair coin flip.
pub fn random_model(
    nouns: &[Ident],
    verbs: &[Ident],
    max_domain: usize,
    seed: u64,
) -> FiniteModel {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(0..=max_domain);
    let domain: Vec<String> = (0..m).map(|i| format!("e{i}")).collect();
    let mut model = FiniteModel {
        domain: domain.clone(),
        nouns: BTreeMap::new(),
        verbs: BTreeMap::new(),
    };
    for n in nouns {
        let set = domain.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        model.nouns.insert(n.clone(), set);
    }
    for v in verbs {
        let mut rel = BTreeSet::new();
        for a in &domain {
            for b in &domain {
                if rng.gen_bool(0.5) {
                    rel.insert((a.clone(), b.clone()));
                }
            }
        }
        model.verbs.insert(v.clone(), rel);
    }
    model
}
