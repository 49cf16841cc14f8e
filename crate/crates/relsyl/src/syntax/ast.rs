//! Core abstract syntax: terms, sentences, theories, and the fragment lattice.
//!
//! Terms are built from nouns by three constructors: `(r all t)` ("everything
//! that r's all t's"), `(r some t)` ("everything that r's at least one t"),
//! and `(not t)` (complement). Sentences come in five shapes:
//!
//! * `all x y` — every x is a y
//! * `some x y` — some x is a y
//! * `all a b or some x y` — a four-place disjunction, taken as one unit
//! * `[ x1 .. xn ]` — the xs have empty common intersection
//! * `< x1 .. xn >` — the xs have nonempty common intersection
//!
//! A [`Theory`] is a declared vocabulary (nouns and verbs, disjoint) plus an
//! ordered, duplicate-free list of sentences. Which constructors occur
//! determines the [`Fragment`] a theory lives in; fragments form a partial
//! order by syntax inclusion and drive the choice of decision procedure.

use std::cmp::Ordering;
use std::fmt;

use indexmap::IndexSet;

/// Symbol name for nouns and verbs.
pub type Ident = String;

/// Reserved leading character for machine-generated nouns (see the bridge
/// module's flattening translation). User identifiers may not start with it
/// unless a parser is explicitly told to allow reserved names.
pub const RESERVED_SIGIL: char = '$';

/// A set term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    /// A bare noun.
    Noun(Ident),
    /// `(r all t)`: the things that relate by `r` to every `t`.
    AllOf(Ident, Box<Term>),
    /// `(r some t)`: the things that relate by `r` to at least one `t`.
    SomeOf(Ident, Box<Term>),
    /// `(not t)`: complement.
    Not(Box<Term>),
}

impl Term {
    pub fn noun(name: impl Into<Ident>) -> Self {
        Term::Noun(name.into())
    }

    pub fn all_of(verb: impl Into<Ident>, body: Term) -> Self {
        Term::AllOf(verb.into(), Box::new(body))
    }

    pub fn some_of(verb: impl Into<Ident>, body: Term) -> Self {
        Term::SomeOf(verb.into(), Box::new(body))
    }

    pub fn not(body: Term) -> Self {
        Term::Not(Box::new(body))
    }

    /// Constructor nesting depth: nouns are 0, each constructor adds 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Noun(_) => 0,
            Term::AllOf(_, t) | Term::SomeOf(_, t) | Term::Not(t) => 1 + t.depth(),
        }
    }

    /// This term followed by all proper subterms, outermost first.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            match t {
                Term::Noun(_) => {}
                Term::AllOf(_, b) | Term::SomeOf(_, b) | Term::Not(b) => stack.push(b),
            }
        }
        out
    }

    /// Total order used everywhere a canonical order is needed: lexicographic
    /// on the printed form.
    pub fn canonical_cmp(&self, other: &Term) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }

    fn visit_symbols(&self, nouns: &mut IndexSet<Ident>, verbs: &mut IndexSet<Ident>) {
        match self {
            Term::Noun(p) => {
                nouns.insert(p.clone());
            }
            Term::AllOf(r, b) | Term::SomeOf(r, b) => {
                verbs.insert(r.clone());
                b.visit_symbols(nouns, verbs);
            }
            Term::Not(b) => b.visit_symbols(nouns, verbs),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

/// A sentence. Clause-shaped sentences (`EmptyMeet`, `NonemptyMeet`) keep
/// their terms as a canonically sorted, duplicate-free, nonempty list; use
/// [`Sentence::empty_meet`] / [`Sentence::nonempty_meet`] to build them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sentence {
    All(Term, Term),
    Some(Term, Term),
    /// `all a b or some x y`, stored as (a, b, x, y).
    AllOrSome(Term, Term, Term, Term),
    EmptyMeet(Vec<Term>),
    NonemptyMeet(Vec<Term>),
}

impl Sentence {
    pub fn all(x: Term, y: Term) -> Self {
        Sentence::All(x, y)
    }

    pub fn some(x: Term, y: Term) -> Self {
        Sentence::Some(x, y)
    }

    pub fn all_or_some(a: Term, b: Term, x: Term, y: Term) -> Self {
        Sentence::AllOrSome(a, b, x, y)
    }

    /// Build `[ ts ]`, sorting and deduplicating. Returns the sentence plus
    /// the number of duplicate literals dropped. Panics on an empty list;
    /// empty clauses are deliberately unrepresentable.
    pub fn empty_meet(ts: Vec<Term>) -> (Self, usize) {
        let (lits, dropped) = canonical_literals(ts);
        (Sentence::EmptyMeet(lits), dropped)
    }

    /// Build `< ts >`; same conventions as [`Sentence::empty_meet`].
    pub fn nonempty_meet(ts: Vec<Term>) -> (Self, usize) {
        let (lits, dropped) = canonical_literals(ts);
        (Sentence::NonemptyMeet(lits), dropped)
    }

    /// All terms appearing directly in the sentence.
    pub fn top_terms(&self) -> Vec<&Term> {
        match self {
            Sentence::All(x, y) | Sentence::Some(x, y) => vec![x, y],
            Sentence::AllOrSome(a, b, x, y) => vec![a, b, x, y],
            Sentence::EmptyMeet(ts) | Sentence::NonemptyMeet(ts) => ts.iter().collect(),
        }
    }

    /// Canonical order: lexicographic on the printed form.
    pub fn canonical_cmp(&self, other: &Sentence) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }

    /// Nouns and verbs occurring in the sentence, in first-occurrence order.
    pub fn symbols(&self) -> (IndexSet<Ident>, IndexSet<Ident>) {
        let mut nouns = IndexSet::new();
        let mut verbs = IndexSet::new();
        for t in self.top_terms() {
            t.visit_symbols(&mut nouns, &mut verbs);
        }
        (nouns, verbs)
    }

    /// Syntactic features used for fragment classification.
    pub fn features(&self) -> Features {
        let mut f = Features::default();
        match self {
            Sentence::All(..) => {}
            Sentence::Some(..) => f.some_sentence = true,
            Sentence::AllOrSome(..) => f.four_place = true,
            Sentence::EmptyMeet(..) => f.empty_meet = true,
            Sentence::NonemptyMeet(..) => f.nonempty_meet = true,
        }
        for t in self.top_terms() {
            for s in t.subterms() {
                match s {
                    Term::SomeOf(..) => f.some_term = true,
                    Term::Not(..) => f.not_term = true,
                    _ => {}
                }
            }
        }
        f
    }
}

impl PartialOrd for Sentence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sentence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

fn canonical_literals(ts: Vec<Term>) -> (Vec<Term>, usize) {
    assert!(!ts.is_empty(), "clause sentences must have at least one term");
    let n = ts.len();
    let mut lits = ts;
    lits.sort();
    lits.dedup();
    let dropped = n - lits.len();
    (lits, dropped)
}

/// Syntactic constructor usage of a sentence or theory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Features {
    pub some_sentence: bool,
    pub some_term: bool,
    pub not_term: bool,
    pub four_place: bool,
    pub empty_meet: bool,
    pub nonempty_meet: bool,
}

impl Features {
    pub fn union(self, other: Features) -> Features {
        Features {
            some_sentence: self.some_sentence || other.some_sentence,
            some_term: self.some_term || other.some_term,
            not_term: self.not_term || other.not_term,
            four_place: self.four_place || other.four_place,
            empty_meet: self.empty_meet || other.empty_meet,
            nonempty_meet: self.nonempty_meet || other.nonempty_meet,
        }
    }

    /// Componentwise inclusion.
    pub fn within(self, other: Features) -> bool {
        (!self.some_sentence || other.some_sentence)
            && (!self.some_term || other.some_term)
            && (!self.not_term || other.not_term)
            && (!self.four_place || other.four_place)
            && (!self.empty_meet || other.empty_meet)
            && (!self.nonempty_meet || other.nonempty_meet)
    }
}

/// The named language fragments, ordered by syntax inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// `all` sentences over nouns and `(r all t)`.
    L1,
    /// L1 plus `some` sentences.
    L2,
    /// L2 plus the four-place `all .. or some ..` former.
    L2Plus,
    /// `all` sentences over nouns, `(r all t)`, `(r some t)`.
    L3,
    /// L3 plus `some` sentences.
    L3Half,
    /// `all` sentences over nouns, `(r all t)`, `(not t)`.
    L4,
    /// L4 plus `some` sentences.
    L4Half,
    /// L4 plus `[ .. ]` clause sentences.
    L4Plus,
    /// L4Plus plus `some` sentences and `< .. >` clauses.
    L4HalfPlus,
    /// `all` sentences over nouns, `(r all t)`, `(r some t)`, `(not t)`.
    L5,
    /// L5 plus `some` sentences.
    L5Half,
    /// The flat relational language with complemented verbs (bridge module).
    RStar,
}

impl Fragment {
    /// Every fragment in a fixed presentation order.
    pub const ALL: [Fragment; 12] = [
        Fragment::L1,
        Fragment::L2,
        Fragment::L2Plus,
        Fragment::L3,
        Fragment::L3Half,
        Fragment::L4,
        Fragment::L4Half,
        Fragment::L4Plus,
        Fragment::L4HalfPlus,
        Fragment::L5,
        Fragment::L5Half,
        Fragment::RStar,
    ];

    /// The maximal feature set the fragment's syntax permits. `RStar` is a
    /// separate flat language and has no feature set here.
    pub fn allowed_features(self) -> Option<Features> {
        let f = |ss, st, nt, fp, em, nm| Features {
            some_sentence: ss,
            some_term: st,
            not_term: nt,
            four_place: fp,
            empty_meet: em,
            nonempty_meet: nm,
        };
        match self {
            Fragment::L1 => Some(f(false, false, false, false, false, false)),
            Fragment::L2 => Some(f(true, false, false, false, false, false)),
            Fragment::L2Plus => Some(f(true, false, false, true, false, false)),
            Fragment::L3 => Some(f(false, true, false, false, false, false)),
            Fragment::L3Half => Some(f(true, true, false, false, false, false)),
            Fragment::L4 => Some(f(false, false, true, false, false, false)),
            Fragment::L4Half => Some(f(true, false, true, false, false, false)),
            Fragment::L4Plus => Some(f(false, false, true, false, true, false)),
            Fragment::L4HalfPlus => Some(f(true, false, true, false, true, true)),
            Fragment::L5 => Some(f(false, true, true, false, false, false)),
            Fragment::L5Half => Some(f(true, true, true, false, false, false)),
            Fragment::RStar => None,
        }
    }

    /// Syntax inclusion: does `self` accept everything `other` accepts?
    pub fn includes(self, other: Fragment) -> bool {
        match (self.allowed_features(), other.allowed_features()) {
            (Some(a), Some(b)) => b.within(a),
            _ => self == other,
        }
    }

    /// The least fragment whose syntax covers the given features, if any.
    /// "Least" is strict: a fragment qualifies only if every other covering
    /// fragment includes it.
    pub fn least_covering(features: Features) -> Option<Fragment> {
        let covering: Vec<Fragment> = Fragment::ALL
            .into_iter()
            .filter(|fr| {
                fr.allowed_features()
                    .is_some_and(|allowed| features.within(allowed))
            })
            .collect();
        covering
            .iter()
            .copied()
            .find(|cand| covering.iter().all(|other| other.includes(*cand)))
    }

    pub fn name(self) -> &'static str {
        match self {
            Fragment::L1 => "l1",
            Fragment::L2 => "l2",
            Fragment::L2Plus => "l2plus",
            Fragment::L3 => "l3",
            Fragment::L3Half => "l3.5",
            Fragment::L4 => "l4",
            Fragment::L4Half => "l4.5",
            Fragment::L4Plus => "l4plus",
            Fragment::L4HalfPlus => "l4.5plus",
            Fragment::L5 => "l5",
            Fragment::L5Half => "l5.5",
            Fragment::RStar => "rstar",
        }
    }

    pub fn parse_name(s: &str) -> Option<Fragment> {
        let key = s.trim().to_ascii_lowercase();
        Fragment::ALL
            .into_iter()
            .find(|fr| fr.name() == key || fr.name().replace('.', "") == key.replace('.', ""))
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A declared vocabulary plus sentences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    pub nouns: IndexSet<Ident>,
    pub verbs: IndexSet<Ident>,
    pub sentences: Vec<Sentence>,
}

/// Problems a theory can have beyond pure syntax errors.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum TheoryError {
    #[error("`{0}` is declared both as a noun and as a verb")]
    NounVerbClash(Ident),
    #[error("`{0}` is used as a {1} but not declared as one")]
    Undeclared(Ident, &'static str),
    #[error("no fragment accommodates the sentence mix: {0}")]
    NoFragment(String),
    #[error("theory does not fit requested fragment {requested}: {offending}")]
    FragmentMismatch { requested: Fragment, offending: String },
}

impl Theory {
    pub fn new() -> Self {
        Theory::default()
    }

    pub fn declare_noun(&mut self, n: impl Into<Ident>) {
        self.nouns.insert(n.into());
    }

    pub fn declare_verb(&mut self, v: impl Into<Ident>) {
        self.verbs.insert(v.into());
    }

    /// Append a sentence unless an identical one is already present.
    /// Returns false (and leaves the theory unchanged) on a duplicate.
    pub fn push_sentence(&mut self, s: Sentence) -> bool {
        if self.sentences.contains(&s) {
            false
        } else {
            self.sentences.push(s);
            true
        }
    }

    /// Check vocabulary discipline: nouns and verbs disjoint, every symbol
    /// used in a sentence declared with the right role.
    pub fn validate(&self) -> Result<(), TheoryError> {
        for n in &self.nouns {
            if self.verbs.contains(n) {
                return Err(TheoryError::NounVerbClash(n.clone()));
            }
        }
        for s in &self.sentences {
            let (ns, vs) = s.symbols();
            for n in ns {
                if !self.nouns.contains(&n) {
                    return Err(TheoryError::Undeclared(n, "noun"));
                }
            }
            for v in vs {
                if !self.verbs.contains(&v) {
                    return Err(TheoryError::Undeclared(v, "verb"));
                }
            }
        }
        Ok(())
    }

    /// Nouns actually occurring in some sentence, in first-use order.
    pub fn occurring_nouns(&self) -> IndexSet<Ident> {
        let mut out = IndexSet::new();
        for s in &self.sentences {
            out.extend(s.symbols().0);
        }
        out
    }

    /// Verbs actually occurring in some sentence, in first-use order.
    pub fn occurring_verbs(&self) -> IndexSet<Ident> {
        let mut out = IndexSet::new();
        for s in &self.sentences {
            out.extend(s.symbols().1);
        }
        out
    }

    pub fn features(&self) -> Features {
        self.sentences
            .iter()
            .fold(Features::default(), |acc, s| acc.union(s.features()))
    }

    /// The least fragment containing every sentence of the theory.
    pub fn fragment(&self) -> Result<Fragment, TheoryError> {
        Fragment::least_covering(self.features())
            .ok_or_else(|| TheoryError::NoFragment(describe_features(self.features())))
    }

    /// Like [`Theory::fragment`], but honours an explicit override: the
    /// override wins if the theory fits inside it, and mismatches are errors
    /// rather than silent coercions.
    pub fn fragment_with_override(
        &self,
        requested: Option<Fragment>,
    ) -> Result<Fragment, TheoryError> {
        let detected = self.fragment()?;
        match requested {
            None => Ok(detected),
            Some(want) => {
                if want.includes(detected) {
                    Ok(want)
                } else {
                    Err(TheoryError::FragmentMismatch {
                        requested: want,
                        offending: format!("theory is {detected}"),
                    })
                }
            }
        }
    }
}

fn describe_features(f: Features) -> String {
    let mut parts = Vec::new();
    if f.some_sentence {
        parts.push("some-sentences");
    }
    if f.four_place {
        parts.push("all-or-some sentences");
    }
    if f.empty_meet {
        parts.push("[..] clauses");
    }
    if f.nonempty_meet {
        parts.push("<..> clauses");
    }
    if f.some_term {
        parts.push("(r some t) terms");
    }
    if f.not_term {
        parts.push("(not t) terms");
    }
    parts.join(", ")
}
