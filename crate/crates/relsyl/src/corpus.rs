//! Instance families, fixture models, hardness reductions, and brute-force
//! oracles.
//!
//! Three kinds of material live here:
//!
//! * the chain family `gen_gamma_n` / `gen_delta_ni` — theories over two
//!   nouns and `n` verbs whose positive queries need ever-wider case
//!   analyses, together with the four hand-built fixture models used to
//!   refute everything the family does not entail;
//! * encoders that turn one-in-three-SAT and 3-SAT instances into entailment
//!   queries of the relational fragments (`encode_one_in_three`,
//!   `encode_3sat`);
//! * exhaustive truth-table oracles (`brute_sat`, `one_in_three_check`) for
//!   cross-checking the encoders at desk scale, plus small text-format
//!   readers for instances.
//!
//! All generated names are deterministic functions of the input, so corpora
//! and certificates are reproducible byte for byte.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexSet;

use crate::semantics::FiniteModel;
use crate::syntax::{Ident, Sentence, Term, Theory};

/// Errors from the generators, encoders, and oracles.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CorpusError {
    /// A family parameter is outside the range the construction covers.
    #[error("parameter out of range: {0}")]
    Range(String),
    /// Fixture-model parameters do not describe any construction case.
    #[error("fixture parameters match no construction case: {0}")]
    Fixture(String),
    /// A clause or variable of an instance is malformed.
    #[error("invalid clause: {0}")]
    Clause(String),
    /// The exhaustive oracles refuse instances beyond the variable cap.
    #[error("brute-force search is capped at {cap} variables, instance has {have}")]
    TooManyVariables {
        /// Hard cap on variables for truth-table search.
        cap: usize,
        /// Number of variables in the offending instance.
        have: usize,
    },
    /// An instance file could not be read.
    #[error("cannot read instance: {0}")]
    Parse(String),
}

/// Variable cap for the truth-table oracles.
pub const BRUTE_FORCE_VARIABLE_CAP: usize = 20;

// ---------------------------------------------------------------------------
// The chain family and its fixture models
// ---------------------------------------------------------------------------

/// Name of the `i`-th chain verb (1-based).
fn verb_r(i: usize) -> Ident {
    format!("r{i}")
}

/// The nested universal term `(s₁ all (s₂ all (… (sₖ all base)…)))` for a
/// sequence of 1-based chain-verb indices.
pub fn nested_all(indices: &[usize], base: Term) -> Term {
    indices
        .iter()
        .rev()
        .fold(base, |acc, &i| Term::all_of(verb_r(i), acc))
}

/// The sentences of the `n`-th chain theory, in display order: the seed
/// `some (r1 all (r1 all a)) (r1 all (r1 all a))`, the links
/// `all (ri all b) (ri+1 all (ri+1 all a))` for `1 ≤ i ≤ n-1`, and the cap
/// `all (rn all b) a`.
fn chain_sentences(n: usize) -> Vec<Sentence> {
    let a = Term::noun("a");
    let b = Term::noun("b");
    let seed = nested_all(&[1, 1], a.clone());
    let mut out = vec![Sentence::Some(seed.clone(), seed)];
    for i in 1..n {
        out.push(Sentence::All(
            nested_all(&[i], b.clone()),
            nested_all(&[i + 1, i + 1], a.clone()),
        ));
    }
    out.push(Sentence::All(nested_all(&[n], b.clone()), a));
    out
}

/// The `n`-th chain theory: nouns `a`, `b`; verbs `r1 … rn`; `n + 1`
/// sentences (seed, `n - 1` links, cap). Every model satisfying it has a
/// nonempty `a`-or-king witness, so it entails `some a a`.
pub fn gen_gamma_n(n: usize) -> Result<Theory, CorpusError> {
    if n == 0 {
        return Err(CorpusError::Range(
            "the chain family needs at least one verb (n ≥ 1)".into(),
        ));
    }
    let mut th = Theory::new();
    th.declare_noun("a");
    th.declare_noun("b");
    for i in 1..=n {
        th.declare_verb(verb_r(i));
    }
    for s in chain_sentences(n) {
        th.push_sentence(s);
    }
    Ok(th)
}

/// The `n`-th chain theory with its `i`-th link removed: for `i < n` the
/// sentence `all (ri all b) (ri+1 all (ri+1 all a))` is dropped, for `i = n`
/// the cap `all (rn all b) a` is dropped. The vocabulary is unchanged. Each
/// such theory no longer entails `some a a`.
pub fn gen_delta_ni(n: usize, i: usize) -> Result<Theory, CorpusError> {
    if i == 0 || i > n {
        return Err(CorpusError::Range(format!(
            "link index must satisfy 1 ≤ i ≤ n, got i = {i}, n = {n}"
        )));
    }
    let mut th = gen_gamma_n(n)?;
    // Sentence positions: seed at 0, link i at position i, cap at position n.
    // Dropping the i-th link and dropping the cap are both "remove position
    // i" thanks to the cap sitting at position n.
    th.sentences.remove(i);
    Ok(th)
}

/// Which hand-built countermodel of the chain family to materialize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fixture {
    /// One point named `*`; both nouns full; every verb empty.
    M1,
    /// Like [`Fixture::M1`] but with `b` empty.
    M2,
    /// One point; `a` empty, `b` full; verbs `r1 … ri` full, the rest empty.
    M3 {
        /// Index of the last full verb (`1 ≤ i ≤ n`).
        i: usize,
    },
    /// Four points `w`, `x`, `y`, `z`; `a = {w}`, `b` full; a sparse edge set
    /// chosen so the nested universal term over `svec` denotes nothing.
    M4 {
        /// Even-length, nonempty sequence of 1-based verb indices, not the
        /// two-step repetition `[1, 1]`.
        svec: Vec<usize>,
        /// Which edge layout the sequence calls for; must agree with `svec`.
        subcase: Subcase,
    },
}

/// Edge layouts of the four-point fixture, keyed by how the verb sequence
/// ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcase {
    /// Last verb is not `r1`: edges `x r1 w`, `y r1 x`, `z sₖ w`.
    A,
    /// Last verb is `r1`, the one before is not: edges `x r1 w`, `y r1 x`.
    B,
    /// Last two verbs are `r1` and the sequence is longer than two:
    /// edges `x r1 w`, `y r1 x`, `z sₖ₋₂ y`.
    C,
}

/// Builds one of the four fixture models for the chain family with `n`
/// verbs. The model interprets exactly the family vocabulary (`a`, `b`,
/// `r1 … rn`); parameters that match no construction case are errors.
pub fn fixture_model(n: usize, which: &Fixture) -> Result<FiniteModel, CorpusError> {
    if n == 0 {
        return Err(CorpusError::Range(
            "the chain family needs at least one verb (n ≥ 1)".into(),
        ));
    }
    let point = || vec!["*".to_string()];
    let full_nouns = |a: bool, b: bool| {
        let mut m: BTreeMap<Ident, BTreeSet<String>> = BTreeMap::new();
        m.insert("a".into(), if a { point().into_iter().collect() } else { BTreeSet::new() });
        m.insert("b".into(), if b { point().into_iter().collect() } else { BTreeSet::new() });
        m
    };
    let verbs_where = |full_upto: usize| {
        let mut m: BTreeMap<Ident, BTreeSet<(String, String)>> = BTreeMap::new();
        for j in 1..=n {
            let mut ext = BTreeSet::new();
            if j <= full_upto {
                ext.insert(("*".to_string(), "*".to_string()));
            }
            m.insert(verb_r(j), ext);
        }
        m
    };
    match which {
        Fixture::M1 => Ok(FiniteModel {
            domain: point(),
            nouns: full_nouns(true, true),
            verbs: verbs_where(0),
        }),
        Fixture::M2 => Ok(FiniteModel {
            domain: point(),
            nouns: full_nouns(true, false),
            verbs: verbs_where(0),
        }),
        Fixture::M3 { i } => {
            if *i == 0 || *i > n {
                return Err(CorpusError::Fixture(format!(
                    "the one-point layout needs 1 ≤ i ≤ n, got i = {i}, n = {n}"
                )));
            }
            Ok(FiniteModel {
                domain: point(),
                nouns: full_nouns(false, true),
                verbs: verbs_where(*i),
            })
        }
        Fixture::M4 { svec, subcase } => four_point_model(n, svec, *subcase),
    }
}

/// The four-point fixture: validates the verb sequence against the claimed
/// subcase and lays out the matching edges.
fn four_point_model(
    n: usize,
    svec: &[usize],
    subcase: Subcase,
) -> Result<FiniteModel, CorpusError> {
    let bad = |msg: String| Err(CorpusError::Fixture(msg));
    let k = svec.len();
    if k == 0 || k % 2 != 0 {
        return bad(format!(
            "the four-point layout needs a nonempty even-length verb sequence, got length {k}"
        ));
    }
    if let Some(&j) = svec.iter().find(|&&j| j == 0 || j > n) {
        return bad(format!(
            "verb index {j} is outside the vocabulary r1 … r{n}"
        ));
    }
    if svec == [1, 1] {
        return bad("the sequence [1, 1] denotes the seed term, which is provably inhabited".into());
    }
    let last = svec[k - 1];
    let second_last = svec[k - 2];
    let expected = if last != 1 {
        Subcase::A
    } else if second_last != 1 {
        Subcase::B
    } else {
        Subcase::C
    };
    if subcase != expected {
        return bad(format!(
            "sequence ends with {:?}, which calls for subcase {expected:?}, not {subcase:?}",
            &svec[k.saturating_sub(2)..]
        ));
    }
    if subcase == Subcase::C && k <= 2 {
        return bad("the doubled-tail layout needs a sequence longer than two".into());
    }

    let names = ["w", "x", "y", "z"].map(str::to_string);
    let [w, x, y, z] = names.clone();
    let mut nouns: BTreeMap<Ident, BTreeSet<String>> = BTreeMap::new();
    nouns.insert("a".into(), std::iter::once(w.clone()).collect());
    nouns.insert("b".into(), names.iter().cloned().collect());

    let mut verbs: BTreeMap<Ident, BTreeSet<(String, String)>> = BTreeMap::new();
    for j in 1..=n {
        verbs.insert(verb_r(j), BTreeSet::new());
    }
    let mut edge = |verb: usize, from: &String, to: &String| {
        verbs
            .get_mut(&verb_r(verb))
            .expect("verb index validated above")
            .insert((from.clone(), to.clone()));
    };
    edge(1, &x, &w);
    edge(1, &y, &x);
    match subcase {
        Subcase::A => edge(last, &z, &w),
        Subcase::B => {}
        Subcase::C => edge(svec[k - 3], &z, &y),
    }

    Ok(FiniteModel {
        domain: names.to_vec(),
        nouns,
        verbs,
    })
}

// ---------------------------------------------------------------------------
// Instance types
// ---------------------------------------------------------------------------

/// Words the theory syntax reserves outright.
const KEYWORDS: [&str; 6] = ["all", "some", "not", "or", "nouns", "verbs"];

/// Names the one-in-three encoder mints, so its instance variables must
/// avoid them (two exact nouns plus the generated-noun/verb prefixes).
const CHAIN_ENCODER_NAMES: [&str; 2] = ["start", "finish"];
const CHAIN_ENCODER_PREFIXES: [&str; 7] = ["y_c", "z_c", "r1_c", "r2_c", "r3_c", "r_", "rp_"];

/// Checks that a name is a plain identifier and not a keyword.
fn check_ident(name: &str) -> Result<(), CorpusError> {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let tail_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !head_ok || !tail_ok {
        return Err(CorpusError::Clause(format!(
            "variable `{name}` is not a plain identifier"
        )));
    }
    if KEYWORDS.contains(&name) {
        return Err(CorpusError::Clause(format!(
            "variable `{name}` is a reserved word"
        )));
    }
    Ok(())
}

/// Checks that a variable can become a noun of the one-in-three encoding
/// without touching the generated vocabulary.
fn check_one_in_three_variable(name: &str) -> Result<(), CorpusError> {
    check_ident(name)?;
    if CHAIN_ENCODER_NAMES.contains(&name) {
        return Err(CorpusError::Clause(format!(
            "variable `{name}` collides with a generated noun"
        )));
    }
    if let Some(p) = CHAIN_ENCODER_PREFIXES
        .iter()
        .find(|p| name.starts_with(**p))
    {
        return Err(CorpusError::Clause(format!(
            "variable `{name}` collides with generated vocabulary (prefix `{p}`)"
        )));
    }
    Ok(())
}

/// A conjunction of clauses, each asking that exactly one of three distinct
/// variables be true.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneInThreeInstance {
    /// Variables in order of first occurrence.
    pub variables: Vec<String>,
    /// Clauses as triples of distinct variables.
    pub clauses: Vec<[String; 3]>,
}

impl OneInThreeInstance {
    /// Builds an instance from clauses, computing the variable list in order
    /// of first occurrence and validating every clause.
    pub fn new(clauses: Vec<[String; 3]>) -> Result<Self, CorpusError> {
        let mut variables: Vec<String> = Vec::new();
        for clause in &clauses {
            for v in clause {
                if !variables.contains(v) {
                    variables.push(v.clone());
                }
            }
        }
        let inst = OneInThreeInstance { variables, clauses };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks the clause discipline: distinct variables within each clause,
    /// every clause variable listed, every name usable as a noun.
    pub fn validate(&self) -> Result<(), CorpusError> {
        for v in &self.variables {
            check_one_in_three_variable(v)?;
        }
        for clause in &self.clauses {
            let [u, v, w] = clause;
            if u == v || u == w || v == w {
                return Err(CorpusError::Clause(format!(
                    "clause ({u} ∨ {v} ∨ {w}) repeats a variable; the three must be distinct"
                )));
            }
            for name in clause {
                if !self.variables.contains(name) {
                    return Err(CorpusError::Clause(format!(
                        "clause variable `{name}` is missing from the variable list"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A signed variable of a CNF clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfLit {
    /// Variable name.
    pub var: String,
    /// Whether the literal is the variable's negation.
    pub negated: bool,
}

impl CnfLit {
    /// A positive literal.
    pub fn pos(var: impl Into<String>) -> Self {
        CnfLit {
            var: var.into(),
            negated: false,
        }
    }

    /// A negated literal.
    pub fn neg(var: impl Into<String>) -> Self {
        CnfLit {
            var: var.into(),
            negated: true,
        }
    }
}

/// A 3-CNF formula: clauses of exactly three signed variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    /// Variables in order of first occurrence.
    pub variables: Vec<String>,
    /// Clauses as triples of literals.
    pub clauses: Vec<[CnfLit; 3]>,
}

impl CnfInstance {
    /// Builds an instance from clauses, computing the variable list in order
    /// of first occurrence and validating the names.
    pub fn new(clauses: Vec<[CnfLit; 3]>) -> Result<Self, CorpusError> {
        let mut variables: Vec<String> = Vec::new();
        for clause in &clauses {
            for l in clause {
                if !variables.contains(&l.var) {
                    variables.push(l.var.clone());
                }
            }
        }
        let inst = CnfInstance { variables, clauses };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks that every literal's variable is listed and usable as a noun
    /// once lowercased.
    pub fn validate(&self) -> Result<(), CorpusError> {
        for v in &self.variables {
            check_ident(&v.to_ascii_lowercase())?;
        }
        for clause in &self.clauses {
            for l in clause {
                if !self.variables.contains(&l.var) {
                    return Err(CorpusError::Clause(format!(
                        "literal variable `{}` is missing from the variable list",
                        l.var
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Encoders
// ---------------------------------------------------------------------------

/// Canonical unordered-pair key: the two names in lexicographic order.
fn pair_key(p: &str, q: &str) -> (String, String) {
    if p <= q {
        (p.to_string(), q.to_string())
    } else {
        (q.to_string(), p.to_string())
    }
}

/// Encodes a one-in-three instance as an entailment query in the All-only
/// relational fragment.
///
/// Per clause `c` on variables `(u, v, w)` (1-based index `i`), six
/// sentences thread a chain from `start` to `finish` through fresh nouns
/// `y_c<i>`, `z_c<i>` and fresh verbs `r1_c<i>`, `r2_c<i>`, `r3_c<i>`; the
/// chain advances past a variable exactly when that variable's noun is
/// inhabited. Per unordered pair of distinct variables `{p, q}` that share a
/// clause, two sentences over the shared verbs `r_<p>_<q>`, `rp_<p>_<q>`
/// force the whole domain empty when both nouns are empty. The goal is
/// `all start finish`: it fails exactly when some assignment makes exactly
/// one variable of every clause true (true = empty noun).
pub fn encode_one_in_three(
    instance: &OneInThreeInstance,
) -> Result<(Theory, Sentence), CorpusError> {
    instance.validate()?;
    let mut th = Theory::new();
    for v in &instance.variables {
        th.declare_noun(v.clone());
    }
    th.declare_noun("start");
    th.declare_noun("finish");

    let start = Term::noun("start");
    let finish = Term::noun("finish");
    let mut pairs: IndexSet<(String, String)> = IndexSet::new();

    for (idx, clause) in instance.clauses.iter().enumerate() {
        let i = idx + 1;
        let [u, v, w] = clause;
        let y = format!("y_c{i}");
        let z = format!("z_c{i}");
        th.declare_noun(y.clone());
        th.declare_noun(z.clone());
        let r1 = format!("r1_c{i}");
        let r2 = format!("r2_c{i}");
        let r3 = format!("r3_c{i}");
        for r in [&r1, &r2, &r3] {
            th.declare_verb(r.clone());
        }
        let yt = Term::noun(y);
        let zt = Term::noun(z);
        th.push_sentence(Sentence::All(
            start.clone(),
            Term::all_of(r1.clone(), Term::noun(u.clone())),
        ));
        th.push_sentence(Sentence::All(
            Term::some_of(r1, Term::noun(u.clone())),
            yt.clone(),
        ));
        th.push_sentence(Sentence::All(
            yt,
            Term::all_of(r2.clone(), Term::noun(v.clone())),
        ));
        th.push_sentence(Sentence::All(
            Term::some_of(r2, Term::noun(v.clone())),
            zt.clone(),
        ));
        th.push_sentence(Sentence::All(
            zt,
            Term::all_of(r3.clone(), Term::noun(w.clone())),
        ));
        th.push_sentence(Sentence::All(
            Term::some_of(r3, Term::noun(w.clone())),
            finish.clone(),
        ));
        for (p, q) in [(u, v), (u, w), (v, w)] {
            pairs.insert(pair_key(p, q));
        }
    }

    for (p, q) in &pairs {
        let r = format!("r_{p}_{q}");
        let rp = format!("rp_{p}_{q}");
        th.declare_verb(r.clone());
        th.declare_verb(rp.clone());
        // Both directions over the shared verb pair: if either noun is empty
        // while the other is not, one of the two sentences forces the
        // domain's collapse used in the hardness argument.
        th.push_sentence(Sentence::All(
            Term::all_of(r.clone(), Term::noun(p.clone())),
            Term::some_of(rp.clone(), Term::noun(q.clone())),
        ));
        th.push_sentence(Sentence::All(
            Term::all_of(r, Term::noun(q.clone())),
            Term::some_of(rp, Term::noun(p.clone())),
        ));
    }

    let goal = Sentence::All(start, finish);
    Ok((th, goal))
}

/// Encodes a 3-CNF instance as an entailment query in the All-only fragment
/// with complemented terms.
///
/// Variables become nouns (lowercased); a clause with literal terms
/// `(u, v, w)` and 1-based index `i` contributes
/// `all (not u) (r<i> all y<i>)`, `all (not v) (r<i> all (not y<i>))`, and
/// `all (r<i> all z<i>) w` over fresh nouns `y<i>`, `z<i>` and a fresh verb
/// `r<i>`. The goal `all q (not q)` over the fresh noun `q` holds exactly
/// when the theory has no nonempty model, i.e. when the formula is
/// unsatisfiable. A generated name that a variable already claims gets the
/// first free underscore suffix (`q_1`, `y2_1`, …) instead.
pub fn encode_3sat(instance: &CnfInstance) -> Result<(Theory, Sentence), CorpusError> {
    instance.validate()?;
    let noun_of = |var: &str| var.to_ascii_lowercase();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    for v in &instance.variables {
        if !taken.insert(noun_of(v)) {
            return Err(CorpusError::Clause(format!(
                "variable `{v}` and another differ only by case"
            )));
        }
    }
    // Generated bases are pairwise distinct and contain no underscore, so
    // suffixing against the variable nouns alone keeps them all distinct.
    let fresh = |base: String, taken: &BTreeSet<String>| {
        if !taken.contains(&base) {
            return base;
        }
        (1..)
            .map(|k| format!("{base}_{k}"))
            .find(|cand| !taken.contains(cand))
            .expect("some suffix is free")
    };

    let mut th = Theory::new();
    for v in &instance.variables {
        th.declare_noun(noun_of(v));
    }
    let q = fresh("q".into(), &taken);
    th.declare_noun(q.clone());

    let lit_term = |l: &CnfLit| {
        let base = Term::noun(noun_of(&l.var));
        if l.negated {
            Term::not(base)
        } else {
            base
        }
    };

    for (idx, clause) in instance.clauses.iter().enumerate() {
        let i = idx + 1;
        let y = fresh(format!("y{i}"), &taken);
        let z = fresh(format!("z{i}"), &taken);
        let r = fresh(format!("r{i}"), &taken);
        th.declare_noun(y.clone());
        th.declare_noun(z.clone());
        th.declare_verb(r.clone());
        let [u, v, w] = clause;
        th.push_sentence(Sentence::All(
            Term::not(lit_term(u)),
            Term::all_of(r.clone(), Term::noun(y.clone())),
        ));
        th.push_sentence(Sentence::All(
            Term::not(lit_term(v)),
            Term::all_of(r.clone(), Term::not(Term::noun(y))),
        ));
        th.push_sentence(Sentence::All(Term::all_of(r, Term::noun(z)), lit_term(w)));
    }

    let goal = Sentence::All(Term::noun(q.clone()), Term::not(Term::noun(q)));
    Ok((th, goal))
}

// ---------------------------------------------------------------------------
// Brute-force oracles
// ---------------------------------------------------------------------------

/// Guard shared by the truth-table oracles.
fn check_variable_cap(n: usize) -> Result<(), CorpusError> {
    if n > BRUTE_FORCE_VARIABLE_CAP {
        Err(CorpusError::TooManyVariables {
            cap: BRUTE_FORCE_VARIABLE_CAP,
            have: n,
        })
    } else {
        Ok(())
    }
}

/// Enumerates assignments in counting order (variable `k` is bit `k`) and
/// returns the first one the predicate accepts.
fn first_assignment(
    variables: &[String],
    accepts: impl Fn(&BTreeMap<String, bool>) -> bool,
) -> Option<BTreeMap<String, bool>> {
    let n = variables.len();
    for mask in 0u64..(1u64 << n) {
        let assignment: BTreeMap<String, bool> = variables
            .iter()
            .enumerate()
            .map(|(k, v)| (v.clone(), mask & (1 << k) != 0))
            .collect();
        if accepts(&assignment) {
            return Some(assignment);
        }
    }
    None
}

/// Exhaustive satisfiability check for a 3-CNF instance: the first
/// satisfying assignment in counting order, or `None` when unsatisfiable.
pub fn brute_sat(
    instance: &CnfInstance,
) -> Result<Option<BTreeMap<String, bool>>, CorpusError> {
    instance.validate()?;
    check_variable_cap(instance.variables.len())?;
    Ok(first_assignment(&instance.variables, |assignment| {
        instance.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|l| assignment[&l.var] != l.negated)
        })
    }))
}

/// Exhaustive one-in-three check: the first assignment in counting order
/// making exactly one variable of every clause true, or `None`.
pub fn one_in_three_check(
    instance: &OneInThreeInstance,
) -> Result<Option<BTreeMap<String, bool>>, CorpusError> {
    instance.validate()?;
    check_variable_cap(instance.variables.len())?;
    Ok(first_assignment(&instance.variables, |assignment| {
        instance.clauses.iter().all(|clause| {
            clause.iter().filter(|v| assignment[v.as_str()]).count() == 1
        })
    }))
}

// ---------------------------------------------------------------------------
// Instance readers
// ---------------------------------------------------------------------------

/// Splits instance text into payload lines: comment lines (`c …`) are
/// skipped, an optional `p cnf <vars> <clauses>` header is returned
/// separately.
fn instance_lines(input: &str) -> Result<(Option<(usize, usize)>, Vec<&str>), CorpusError> {
    let mut header = None;
    let mut lines = Vec::new();
    for raw in input.lines() {
        let line = raw.trim();
        // A comment is `c` alone or `c` followed by whitespace; a bare word
        // starting with `c` may be a variable name and is kept.
        if line.is_empty() || line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", vars, clauses] => {
                    let v = vars.parse::<usize>();
                    let c = clauses.parse::<usize>();
                    match (v, c) {
                        (Ok(v), Ok(c)) => header = Some((v, c)),
                        _ => {
                            return Err(CorpusError::Parse(format!(
                                "malformed problem header: `{line}`"
                            )))
                        }
                    }
                }
                _ => {
                    return Err(CorpusError::Parse(format!(
                        "malformed problem header: `{line}`"
                    )))
                }
            }
            continue;
        }
        lines.push(line);
    }
    Ok((header, lines))
}

/// Reads a 3-CNF instance in DIMACS-like form: optional comments (`c`),
/// optional `p cnf <vars> <clauses>` header, then one clause per line as
/// three nonzero integers with an optional trailing `0`. Variable `k` is
/// named `p<k>`. Exactly three literals per clause are enforced.
pub fn parse_dimacs(input: &str) -> Result<CnfInstance, CorpusError> {
    let (header, lines) = instance_lines(input)?;
    let mut clauses = Vec::new();
    let mut max_var = 0usize;
    for line in lines {
        let mut lits = Vec::new();
        for tok in line.split_whitespace() {
            let n: i64 = tok.parse().map_err(|_| {
                CorpusError::Parse(format!("expected an integer literal, found `{tok}`"))
            })?;
            if n == 0 {
                break;
            }
            let var = n.unsigned_abs() as usize;
            max_var = max_var.max(var);
            lits.push(CnfLit {
                var: format!("p{var}"),
                negated: n < 0,
            });
        }
        let [u, v, w]: [CnfLit; 3] = lits.try_into().map_err(|bad: Vec<CnfLit>| {
            CorpusError::Parse(format!(
                "each clause needs exactly three literals, found {} in `{line}`",
                bad.len()
            ))
        })?;
        clauses.push([u, v, w]);
    }
    if let Some((vars, count)) = header {
        if max_var > vars {
            return Err(CorpusError::Parse(format!(
                "header declares {vars} variables but a literal mentions variable {max_var}"
            )));
        }
        if clauses.len() != count {
            return Err(CorpusError::Parse(format!(
                "header declares {count} clauses but {} were read",
                clauses.len()
            )));
        }
    }
    CnfInstance::new(clauses)
}

/// Reads a one-in-three instance: optional comments (`c`), then one clause
/// per line as three whitespace-separated variable names (or positive
/// integers, named `p<k>`), with an optional trailing `0`.
pub fn parse_triples(input: &str) -> Result<OneInThreeInstance, CorpusError> {
    let (header, lines) = instance_lines(input)?;
    if header.is_some() {
        return Err(CorpusError::Parse(
            "one-in-three instances take no problem header".into(),
        ));
    }
    let mut clauses = Vec::new();
    for line in lines {
        let mut vars = Vec::new();
        for tok in line.split_whitespace() {
            if tok == "0" {
                break;
            }
            if tok.chars().all(|c| c.is_ascii_digit()) {
                vars.push(format!("p{tok}"));
            } else {
                vars.push(tok.to_string());
            }
        }
        let [u, v, w]: [String; 3] = vars.try_into().map_err(|bad: Vec<String>| {
            CorpusError::Parse(format!(
                "each clause needs exactly three variables, found {} in `{line}`",
                bad.len()
            ))
        })?;
        clauses.push([u, v, w]);
    }
    OneInThreeInstance::new(clauses)
}
