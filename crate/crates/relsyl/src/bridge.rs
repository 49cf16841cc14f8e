//! Translations between the nested term language and a flat language with
//! complemented nouns and verbs.
//!
//! The flat language has no term nesting: a term is a noun `p`, a
//! complemented noun `~p`, or a one-step constructor `(r all p)` /
//! `(r some p)` whose verb literal may itself be complemented (`~r`).
//! Complements are read against the whole domain: `⟦~p⟧ = M ∖ ⟦p⟧` and
//! `⟦~r⟧ = (M × M) ∖ ⟦r⟧`.
//!
//! Two translations connect the languages:
//!
//! * [`star_translate`] maps flat sentences into the nested language by
//!   rewriting complemented constructs — `(~r all p)` becomes
//!   `(not (r some p))`, `(~r some p)` becomes `(not (r all p))`, and `~p`
//!   becomes `(not p)` — preserving satisfaction in every model.
//! * [`flatten`] maps a nested theory and goal into the flat language by
//!   introducing one machine-generated noun per subterm, together with
//!   defining sentences that force each generated noun to denote exactly
//!   what its term denotes. Countermodels transfer in both directions:
//!   [`expand_model`] extends a countermodel of the nested input to one of
//!   the flat output, and [`restrict_model`] drops the generated nouns
//!   again.
//!
//! Generated nouns start with [`RESERVED_SIGIL`], which ordinary parsing
//! rejects in user identifiers, so they can never collide with user
//! vocabulary. They *can* collide with each other when underscore-bearing
//! identifiers make two distinct terms print to the same mangled name;
//! [`flatten`] checks injectivity and reports such collisions as errors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::saturation::subterm_closure;
use crate::semantics::{FiniteModel, ModelCheckReport, SemanticsError};
use crate::syntax::{
    tokenize_all, tokenize_line, Cursor, Ident, ParseError, ParseOptions, Sentence, Spanned, Term,
    Theory, Tok, Warning, RESERVED_SIGIL,
};

/// Errors from the flattening translation.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BridgeError {
    /// The input uses a sentence form the flat language cannot express.
    #[error("flattening handles only plain all/some sentences; found `{0}`")]
    Unsupported(String),
    /// Two distinct terms mangled to the same generated noun.
    #[error("generated noun `{name}` collides: `{first}` vs `{second}`")]
    NameCollision {
        name: Ident,
        first: String,
        second: String,
    },
}

// ---------------------------------------------------------------------------
// Flat-language syntax
// ---------------------------------------------------------------------------

/// A verb or its complement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VerbLit {
    pub verb: Ident,
    pub complemented: bool,
}

impl VerbLit {
    pub fn plain(verb: impl Into<Ident>) -> Self {
        VerbLit {
            verb: verb.into(),
            complemented: false,
        }
    }

    pub fn complement(verb: impl Into<Ident>) -> Self {
        VerbLit {
            verb: verb.into(),
            complemented: true,
        }
    }
}

impl fmt::Display for VerbLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complemented {
            write!(f, "~{}", self.verb)
        } else {
            f.write_str(&self.verb)
        }
    }
}

/// A flat term: no recursion, bodies of constructors are bare nouns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RStarTerm {
    /// A noun `p`.
    Noun(Ident),
    /// A complemented noun `~p`.
    NounBar(Ident),
    /// `(r all p)` or `(~r all p)`.
    AllOfLit(VerbLit, Ident),
    /// `(r some p)` or `(~r some p)`.
    SomeOfLit(VerbLit, Ident),
}

impl RStarTerm {
    fn visit_symbols(&self, nouns: &mut IndexSet<Ident>, verbs: &mut IndexSet<Ident>) {
        match self {
            RStarTerm::Noun(p) | RStarTerm::NounBar(p) => {
                nouns.insert(p.clone());
            }
            RStarTerm::AllOfLit(lit, p) | RStarTerm::SomeOfLit(lit, p) => {
                verbs.insert(lit.verb.clone());
                nouns.insert(p.clone());
            }
        }
    }
}

impl fmt::Display for RStarTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RStarTerm::Noun(p) => f.write_str(p),
            RStarTerm::NounBar(p) => write!(f, "~{p}"),
            RStarTerm::AllOfLit(lit, p) => write!(f, "({lit} all {p})"),
            RStarTerm::SomeOfLit(lit, p) => write!(f, "({lit} some {p})"),
        }
    }
}

/// A flat sentence: `all x y` or `some x y` over flat terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RStarSentence {
    All(RStarTerm, RStarTerm),
    Some(RStarTerm, RStarTerm),
}

impl RStarSentence {
    pub fn terms(&self) -> [&RStarTerm; 2] {
        match self {
            RStarSentence::All(x, y) | RStarSentence::Some(x, y) => [x, y],
        }
    }

    /// Nouns and verbs occurring in the sentence, in first-occurrence order.
    pub fn symbols(&self) -> (IndexSet<Ident>, IndexSet<Ident>) {
        let mut nouns = IndexSet::new();
        let mut verbs = IndexSet::new();
        for t in self.terms() {
            t.visit_symbols(&mut nouns, &mut verbs);
        }
        (nouns, verbs)
    }
}

impl fmt::Display for RStarSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RStarSentence::All(x, y) => write!(f, "all {x} {y}"),
            RStarSentence::Some(x, y) => write!(f, "some {x} {y}"),
        }
    }
}

/// A flat theory: declared vocabulary plus a duplicate-free sentence list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RStarTheory {
    pub nouns: IndexSet<Ident>,
    pub verbs: IndexSet<Ident>,
    pub sentences: Vec<RStarSentence>,
}

impl RStarTheory {
    pub fn new() -> Self {
        RStarTheory::default()
    }

    pub fn declare_noun(&mut self, n: impl Into<Ident>) {
        self.nouns.insert(n.into());
    }

    pub fn declare_verb(&mut self, v: impl Into<Ident>) {
        self.verbs.insert(v.into());
    }

    /// Add a sentence unless it is already present. Returns whether it was
    /// added.
    pub fn push_sentence(&mut self, s: RStarSentence) -> bool {
        if self.sentences.contains(&s) {
            false
        } else {
            self.sentences.push(s);
            true
        }
    }
}

impl fmt::Display for RStarTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.nouns.is_empty() {
            f.write_str("nouns:")?;
            for n in &self.nouns {
                write!(f, " {n}")?;
            }
            f.write_str("\n")?;
        }
        if !self.verbs.is_empty() {
            f.write_str("verbs:")?;
            for v in &self.verbs {
                write!(f, " {v}")?;
            }
            f.write_str("\n")?;
        }
        for s in &self.sentences {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Flat-language parsing
// ---------------------------------------------------------------------------

fn rstar_term(cur: &mut Cursor) -> Result<RStarTerm, ParseError> {
    match cur.peek() {
        Some(Spanned {
            tok: Tok::Tilde, ..
        }) => {
            cur.bump();
            Ok(RStarTerm::NounBar(cur.ident("a noun")?))
        }
        Some(Spanned {
            tok: Tok::LParen, ..
        }) => {
            cur.bump();
            let complemented = matches!(
                cur.peek(),
                Some(Spanned {
                    tok: Tok::Tilde,
                    ..
                })
            );
            if complemented {
                cur.bump();
            }
            let verb = cur.ident("a verb")?;
            let lit = VerbLit { verb, complemented };
            let t = if cur.at_keyword("all") {
                cur.bump();
                RStarTerm::AllOfLit(lit, cur.ident("a noun")?)
            } else if cur.at_keyword("some") {
                cur.bump();
                RStarTerm::SomeOfLit(lit, cur.ident("a noun")?)
            } else {
                return Err(cur.error_here("expected `all` or `some` after verb literal"));
            };
            cur.expect(&Tok::RParen, "`)`")?;
            Ok(t)
        }
        Some(Spanned {
            tok: Tok::Word(_), ..
        }) => Ok(RStarTerm::Noun(cur.ident("a noun")?)),
        _ => Err(cur.error_here("expected a flat term")),
    }
}

fn rstar_sentence(cur: &mut Cursor) -> Result<RStarSentence, ParseError> {
    if cur.at_keyword("all") {
        cur.bump();
        let x = rstar_term(cur)?;
        let y = rstar_term(cur)?;
        Ok(RStarSentence::All(x, y))
    } else if cur.at_keyword("some") {
        cur.bump();
        let x = rstar_term(cur)?;
        let y = rstar_term(cur)?;
        Ok(RStarSentence::Some(x, y))
    } else {
        Err(cur.error_here("expected a sentence (`all` or `some` at start)"))
    }
}

/// Parse a single flat sentence.
pub fn parse_rstar_sentence(src: &str, opts: ParseOptions) -> Result<RStarSentence, ParseError> {
    let toks = tokenize_all(src)?;
    let mut cur = Cursor::new(&toks, 1, opts);
    let s = rstar_sentence(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error_here("unexpected trailing tokens after sentence"));
    }
    Ok(s)
}

/// Parse a flat theory file: the same line format as nested theory files,
/// with `~` marking complemented nouns and verb literals.
pub fn parse_rstar_theory(
    src: &str,
    opts: ParseOptions,
) -> Result<(RStarTheory, Vec<Warning>), ParseError> {
    let mut theory = RStarTheory::new();
    let mut warnings = Vec::new();
    let mut sentence_lines: Vec<(usize, usize)> = Vec::new(); // (index, line)

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize_line(raw, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, line_no, opts);
        if cur.at_keyword("nouns") || cur.at_keyword("verbs") {
            let is_nouns = cur.at_keyword("nouns");
            cur.bump();
            cur.expect(&Tok::Colon, "`:` after header keyword")?;
            while !cur.at_end() {
                let role = if is_nouns { "a noun" } else { "a verb" };
                let id = cur.ident(role)?;
                let clash = if is_nouns {
                    theory.verbs.contains(&id)
                } else {
                    theory.nouns.contains(&id)
                };
                if clash {
                    return Err(ParseError::new(
                        line_no,
                        1,
                        format!("`{id}` is declared both as a noun and as a verb"),
                    ));
                }
                if is_nouns {
                    theory.declare_noun(id);
                } else {
                    theory.declare_verb(id);
                }
            }
        } else {
            let s = rstar_sentence(&mut cur)?;
            if !cur.at_end() {
                return Err(cur.error_here("unexpected trailing tokens after sentence"));
            }
            if theory.push_sentence(s) {
                sentence_lines.push((theory.sentences.len() - 1, line_no));
            } else {
                warnings.push(Warning {
                    line: line_no,
                    msg: "duplicate sentence dropped".into(),
                });
            }
        }
    }

    for (idx, line) in &sentence_lines {
        let (ns, vs) = theory.sentences[*idx].symbols();
        for n in ns {
            if !theory.nouns.contains(&n) {
                return Err(ParseError::new(
                    *line,
                    1,
                    format!("`{n}` is used as a noun but not declared as one"),
                ));
            }
        }
        for v in vs {
            if !theory.verbs.contains(&v) {
                return Err(ParseError::new(
                    *line,
                    1,
                    format!("`{v}` is used as a verb but not declared as one"),
                ));
            }
        }
    }
    Ok((theory, warnings))
}

// ---------------------------------------------------------------------------
// Flat-language semantics
// ---------------------------------------------------------------------------

/// Evaluate a flat term: complemented nouns denote the set complement,
/// complemented verb literals the relational complement over the domain.
pub fn eval_rstar(m: &FiniteModel, t: &RStarTerm) -> Result<BTreeSet<String>, SemanticsError> {
    let noun = |p: &Ident| -> Result<&BTreeSet<String>, SemanticsError> {
        m.nouns.get(p).ok_or_else(|| SemanticsError::MissingSymbol {
            symbol: p.clone(),
            role: "noun",
        })
    };
    let rel = |lit: &VerbLit| -> Result<&BTreeSet<(String, String)>, SemanticsError> {
        m.verbs
            .get(&lit.verb)
            .ok_or_else(|| SemanticsError::MissingSymbol {
                symbol: lit.verb.clone(),
                role: "verb",
            })
    };
    // (a, b) related under the literal, complement taken over domain².
    let holds = |lit: &VerbLit, rel: &BTreeSet<(String, String)>, a: &String, b: &String| {
        rel.contains(&(a.clone(), b.clone())) != lit.complemented
    };
    match t {
        RStarTerm::Noun(p) => Ok(noun(p)?.clone()),
        RStarTerm::NounBar(p) => {
            let b = noun(p)?;
            Ok(m.domain.iter().filter(|e| !b.contains(*e)).cloned().collect())
        }
        RStarTerm::AllOfLit(lit, p) => {
            let b = noun(p)?;
            let r = rel(lit)?;
            Ok(m.domain
                .iter()
                .filter(|a| b.iter().all(|e| holds(lit, r, a, e)))
                .cloned()
                .collect())
        }
        RStarTerm::SomeOfLit(lit, p) => {
            let b = noun(p)?;
            let r = rel(lit)?;
            Ok(m.domain
                .iter()
                .filter(|a| b.iter().any(|e| holds(lit, r, a, e)))
                .cloned()
                .collect())
        }
    }
}

/// Does the model satisfy the flat sentence?
pub fn rstar_satisfies(m: &FiniteModel, s: &RStarSentence) -> Result<bool, SemanticsError> {
    match s {
        RStarSentence::All(x, y) => {
            let xs = eval_rstar(m, x)?;
            let ys = eval_rstar(m, y)?;
            Ok(xs.is_subset(&ys))
        }
        RStarSentence::Some(x, y) => {
            let xs = eval_rstar(m, x)?;
            let ys = eval_rstar(m, y)?;
            Ok(xs.intersection(&ys).next().is_some())
        }
    }
}

/// Check every sentence of the flat theory against the model.
pub fn rstar_model_check(
    m: &FiniteModel,
    theory: &RStarTheory,
) -> Result<ModelCheckReport, SemanticsError> {
    m.validate()?;
    let mut results = Vec::with_capacity(theory.sentences.len());
    let mut all = true;
    for s in &theory.sentences {
        let ok = rstar_satisfies(m, s)?;
        all &= ok;
        results.push((s.to_string(), ok));
    }
    Ok(ModelCheckReport {
        results,
        all_satisfied: all,
    })
}

/// Does `m` satisfy the whole theory while refuting the goal?
pub fn is_rstar_countermodel(
    m: &FiniteModel,
    theory: &RStarTheory,
    goal: &RStarSentence,
) -> Result<bool, SemanticsError> {
    Ok(rstar_model_check(m, theory)?.all_satisfied && !rstar_satisfies(m, goal)?)
}

// ---------------------------------------------------------------------------
// Star translation: flat → nested
// ---------------------------------------------------------------------------

/// Translate a flat term into the nested language: `(~r all p)` becomes
/// `(not (r some p))`, `(~r some p)` becomes `(not (r all p))`, `~p` becomes
/// `(not p)`, and complement-free terms map across unchanged.
pub fn star_term(t: &RStarTerm) -> Term {
    match t {
        RStarTerm::Noun(p) => Term::noun(p.clone()),
        RStarTerm::NounBar(p) => Term::not(Term::noun(p.clone())),
        RStarTerm::AllOfLit(lit, p) => {
            if lit.complemented {
                Term::not(Term::some_of(lit.verb.clone(), Term::noun(p.clone())))
            } else {
                Term::all_of(lit.verb.clone(), Term::noun(p.clone()))
            }
        }
        RStarTerm::SomeOfLit(lit, p) => {
            if lit.complemented {
                Term::not(Term::all_of(lit.verb.clone(), Term::noun(p.clone())))
            } else {
                Term::some_of(lit.verb.clone(), Term::noun(p.clone()))
            }
        }
    }
}

/// Translate a flat sentence into the nested language, preserving
/// satisfaction in every model.
pub fn star_translate(s: &RStarSentence) -> Sentence {
    match s {
        RStarSentence::All(x, y) => Sentence::all(star_term(x), star_term(y)),
        RStarSentence::Some(x, y) => Sentence::some(star_term(x), star_term(y)),
    }
}

/// Translate a whole flat theory into the nested language.
pub fn star_theory(theory: &RStarTheory) -> Theory {
    let mut out = Theory::new();
    for n in &theory.nouns {
        out.declare_noun(n.clone());
    }
    for v in &theory.verbs {
        out.declare_verb(v.clone());
    }
    for s in &theory.sentences {
        out.push_sentence(star_translate(s));
    }
    out
}

// ---------------------------------------------------------------------------
// Flattening: nested → flat
// ---------------------------------------------------------------------------

/// Result of [`flatten`]: the flat theory, the flat goal, and the map from
/// each subterm of the input to its generated noun.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flattened {
    pub theory: RStarTheory,
    pub goal: RStarSentence,
    pub name_map: BTreeMap<Term, Ident>,
}

/// The generated noun standing for `t`: the reserved sigil followed by the
/// printed term with parentheses dropped and spaces turned into underscores.
pub fn flat_name(t: &Term) -> Ident {
    let mut out = String::new();
    out.push(RESERVED_SIGIL);
    for c in t.to_string().chars() {
        match c {
            '(' | ')' => {}
            ' ' => out.push('_'),
            other => out.push(other),
        }
    }
    out
}

/// One defining row pair for a subterm: sentences forcing the generated noun
/// `x_t` to denote exactly what `t` denotes, given that the generated nouns
/// of `t`'s immediate subterm already do.
fn defining_rows(t: &Term, names: &BTreeMap<Term, Ident>) -> [RStarSentence; 2] {
    let x = |u: &Term| RStarTerm::Noun(names[u].clone());
    let me = x(t);
    let body = match t {
        Term::Noun(p) => RStarTerm::Noun(p.clone()),
        Term::AllOf(r, u) => RStarTerm::AllOfLit(VerbLit::plain(r.clone()), names[u.as_ref()].clone()),
        Term::SomeOf(r, u) => {
            RStarTerm::SomeOfLit(VerbLit::plain(r.clone()), names[u.as_ref()].clone())
        }
        Term::Not(inner) => match inner.as_ref() {
            Term::Noun(p) => RStarTerm::NounBar(p.clone()),
            Term::AllOf(r, u) => {
                RStarTerm::SomeOfLit(VerbLit::complement(r.clone()), names[u.as_ref()].clone())
            }
            Term::SomeOf(r, u) => {
                RStarTerm::AllOfLit(VerbLit::complement(r.clone()), names[u.as_ref()].clone())
            }
            Term::Not(u) => x(u.as_ref()),
        },
    };
    [
        RStarSentence::All(me.clone(), body.clone()),
        RStarSentence::All(body, me),
    ]
}

fn renamed(s: &Sentence, names: &BTreeMap<Term, Ident>) -> Result<RStarSentence, BridgeError> {
    let x = |t: &Term| RStarTerm::Noun(names[t].clone());
    match s {
        Sentence::All(t, u) => Ok(RStarSentence::All(x(t), x(u))),
        Sentence::Some(t, u) => Ok(RStarSentence::Some(x(t), x(u))),
        other => Err(BridgeError::Unsupported(other.to_string())),
    }
}

/// Flatten a nested theory and goal into the flat language.
///
/// Every subterm `t` of the input gets a generated noun `x_t` (named by
/// [`flat_name`]); the output theory contains, per subterm, the two
/// defining sentences tying `x_t` to `t`'s one-step unfolding, followed by
/// each input sentence with its terms renamed to their generated nouns.
/// The goal is renamed the same way. Output size is linear in the number of
/// subterms plus sentences.
pub fn flatten(gamma: &Theory, goal: &Sentence) -> Result<Flattened, BridgeError> {
    let mut sentences: Vec<Sentence> = gamma.sentences.clone();
    sentences.push(goal.clone());
    for s in &sentences {
        if !matches!(s, Sentence::All(..) | Sentence::Some(..)) {
            return Err(BridgeError::Unsupported(s.to_string()));
        }
    }

    // Subterm closure in canonical (printed-form) order, so the name map and
    // the emitted sentence order depend only on the input's printed terms.
    let mut terms: Vec<Term> = subterm_closure(&sentences).into_iter().collect();
    terms.sort();

    let mut name_map: BTreeMap<Term, Ident> = BTreeMap::new();
    let mut owner: BTreeMap<Ident, Term> = BTreeMap::new();
    for t in &terms {
        let name = flat_name(t);
        if let Some(prev) = owner.get(&name) {
            return Err(BridgeError::NameCollision {
                name,
                first: prev.to_string(),
                second: t.to_string(),
            });
        }
        owner.insert(name.clone(), t.clone());
        name_map.insert(t.clone(), name);
    }

    let mut theory = RStarTheory::new();
    for n in gamma.nouns.iter().cloned() {
        theory.declare_noun(n);
    }
    for v in gamma.verbs.iter().cloned() {
        theory.declare_verb(v);
    }
    // Goal symbols may go beyond the theory's declarations.
    let (gn, gv) = goal.symbols();
    for n in gn {
        theory.declare_noun(n);
    }
    for v in gv {
        theory.declare_verb(v);
    }
    for t in &terms {
        theory.declare_noun(name_map[t].clone());
    }

    for t in &terms {
        for row in defining_rows(t, &name_map) {
            theory.push_sentence(row);
        }
    }
    for s in &gamma.sentences {
        theory.push_sentence(renamed(s, &name_map)?);
    }
    let goal = renamed(goal, &name_map)?;

    Ok(Flattened {
        theory,
        goal,
        name_map,
    })
}

/// Extend a model of the original vocabulary to the flattened one: same
/// domain, each generated noun interpreted as the denotation of its term.
pub fn expand_model(
    m: &FiniteModel,
    name_map: &BTreeMap<Term, Ident>,
) -> Result<FiniteModel, SemanticsError> {
    let mut out = m.clone();
    for (t, name) in name_map {
        let denotation = m.eval_term(t)?;
        out.nouns.insert(name.clone(), denotation);
    }
    Ok(out)
}

/// Drop the generated nouns again, leaving the original vocabulary.
pub fn restrict_model(m: &FiniteModel, name_map: &BTreeMap<Term, Ident>) -> FiniteModel {
    let generated: BTreeSet<&Ident> = name_map.values().collect();
    let mut out = m.clone();
    out.nouns.retain(|n, _| !generated.contains(n));
    out
}
