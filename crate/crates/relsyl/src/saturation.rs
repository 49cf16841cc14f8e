//! Bounded forward-chaining saturation over a finite sentence universe.
//!
//! The engine computes the least set of sentences X ⊆ A with Γ ∩ A ⊆ X that
//! is closed under every schematic rule instance whose premises lie in X and
//! whose conclusion lies in A. Universes are kept symbolic (as term pools per
//! sentence shape) so that very large A — the four-place family alone is
//! cubic in the term count — are never materialized; membership tests are
//! O(1).
//!
//! The first derivation of each sentence is recorded (round order, then
//! rule-name order, then premise order), so proofs can be extracted and
//! re-checked. Only the schematic templates of a rule set participate here;
//! discharge rules, clause rules and chain systems never fire inside
//! saturation.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use indexmap::IndexSet;
use thiserror::Error;

use crate::proofs::ProofNode;
use crate::rules::{RuleSet, RuleTemplate, SentencePat, TermPat};
use crate::syntax::{Ident, Sentence, Term};

/// Default cap on the universe size accepted by [`saturate`].
pub const DEFAULT_UNIVERSE_CAP: u64 = 5_000_000;

/// All subterms of the sentences in `delta` (outermost first per sentence),
/// deduplicated in first-occurrence order.
pub fn subterm_closure(delta: &[Sentence]) -> IndexSet<Term> {
    let mut out = IndexSet::new();
    for s in delta {
        for t in s.top_terms() {
            for sub in t.subterms() {
                out.insert(sub.clone());
            }
        }
    }
    out
}

/// Verbs occurring anywhere in `delta`, in first-occurrence order.
pub fn occurring_verbs(delta: &[Sentence]) -> IndexSet<Ident> {
    let mut out = IndexSet::new();
    for s in delta {
        let (_, verbs) = s.symbols();
        for v in verbs {
            out.insert(v);
        }
    }
    out
}

/// `pool` extended by `(r all w)` for every `w ∈ pool` and verb `r`.
pub fn all_of_extension(pool: &IndexSet<Term>, verbs: &IndexSet<Ident>) -> IndexSet<Term> {
    let mut out = pool.clone();
    for w in pool {
        for r in verbs {
            out.insert(Term::all_of(r.clone(), w.clone()));
        }
    }
    out
}

/// `pool` closed under `depth` rounds of applying `(r all ·)` — and
/// `(r some ·)` when `include_some_of` — for every verb.
pub fn term_pool_with_slack(
    pool: &IndexSet<Term>,
    verbs: &IndexSet<Ident>,
    depth: usize,
    include_some_of: bool,
) -> IndexSet<Term> {
    let mut out = pool.clone();
    let mut frontier: Vec<Term> = out.iter().cloned().collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for r in verbs {
                let a = Term::all_of(r.clone(), w.clone());
                if out.insert(a.clone()) {
                    next.push(a);
                }
                if include_some_of {
                    let s = Term::some_of(r.clone(), w.clone());
                    if out.insert(s.clone()) {
                        next.push(s);
                    }
                }
            }
        }
        frontier = next;
    }
    out
}

/// A finite sentence universe, represented symbolically by term pools per
/// sentence shape plus an optional explicit member list.
#[derive(Debug, Clone, Default)]
pub struct SentenceUniverse {
    tag: String,
    /// `all u v` with u ∈ .0, v ∈ .1.
    all: Option<(IndexSet<Term>, IndexSet<Term>)>,
    /// `some u v` with u ∈ .0, v ∈ .1.
    some: Option<(IndexSet<Term>, IndexSet<Term>)>,
    /// Four-place sentences with the i-th position drawn from the i-th pool.
    four: Option<[IndexSet<Term>; 4]>,
    /// Extra members listed explicitly (tests, ad-hoc universes).
    explicit: IndexSet<Sentence>,
}

impl SentenceUniverse {
    /// Which builder produced this universe.
    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Membership test.
    pub fn contains(&self, s: &Sentence) -> bool {
        let pools = |t: &Term, pool: &IndexSet<Term>| pool.contains(t);
        let ok = match s {
            Sentence::All(x, y) => self
                .all
                .as_ref()
                .is_some_and(|(l, r)| pools(x, l) && pools(y, r)),
            Sentence::Some(x, y) => self
                .some
                .as_ref()
                .is_some_and(|(l, r)| pools(x, l) && pools(y, r)),
            Sentence::AllOrSome(a, b, x, y) => self.four.as_ref().is_some_and(|p| {
                pools(a, &p[0]) && pools(b, &p[1]) && pools(x, &p[2]) && pools(y, &p[3])
            }),
            _ => false,
        };
        ok || self.explicit.contains(s)
    }

    /// Exact number of members (the shape families are pairwise disjoint and
    /// free of internal duplicates; explicit members already covered by a
    /// pool family are not double-counted).
    pub fn len(&self) -> u64 {
        let mut n: u64 = 0;
        if let Some((l, r)) = &self.all {
            n = n.saturating_add(l.len() as u64 * r.len() as u64);
        }
        if let Some((l, r)) = &self.some {
            n = n.saturating_add(l.len() as u64 * r.len() as u64);
        }
        if let Some(p) = &self.four {
            n = n.saturating_add(
                p[0].len() as u64 * p[1].len() as u64 * p[2].len() as u64 * p[3].len() as u64,
            );
        }
        for s in &self.explicit {
            let covered = match s {
                Sentence::All(..) | Sentence::Some(..) | Sentence::AllOrSome(..) => {
                    let mut probe = self.clone();
                    probe.explicit = IndexSet::new();
                    probe.contains(s)
                }
                _ => false,
            };
            if !covered {
                n = n.saturating_add(1);
            }
        }
        n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Union of every pool plus the subterms of explicit members; the term
    /// supply for free-variable enumeration.
    pub fn term_pool(&self) -> IndexSet<Term> {
        let mut out = IndexSet::new();
        let mut add = |pool: &IndexSet<Term>| {
            for t in pool {
                out.insert(t.clone());
            }
        };
        if let Some((l, r)) = &self.all {
            add(l);
            add(r);
        }
        if let Some((l, r)) = &self.some {
            add(l);
            add(r);
        }
        if let Some(p) = &self.four {
            for pool in p {
                add(pool);
            }
        }
        for s in &self.explicit {
            for t in s.top_terms() {
                for sub in t.subterms() {
                    out.insert(sub.clone());
                }
            }
        }
        out
    }

    /// Pools constraining a bare variable at the given top-level position of
    /// a conclusion with the given shape (0-based position).
    fn position_pool(&self, shape: u8, position: usize) -> Option<&IndexSet<Term>> {
        match shape {
            0 => self.all.as_ref().map(|(l, r)| if position == 0 { l } else { r }),
            1 => self.some.as_ref().map(|(l, r)| if position == 0 { l } else { r }),
            2 => self.four.as_ref().map(|p| &p[position]),
            _ => None,
        }
    }
}

/// The universe of all sentences `all u v` with `u ∈ T(Δ)` and `v ∈ T⁺(Δ)`,
/// where T(Δ) collects the subterms of Δ and T⁺ additionally applies one
/// `(r all ·)` per occurring verb.
pub fn g1(delta: &[Sentence]) -> SentenceUniverse {
    let t = subterm_closure(delta);
    let tplus = all_of_extension(&t, &occurring_verbs(delta));
    SentenceUniverse {
        tag: "g1".into(),
        all: Some((t, tplus)),
        ..Default::default()
    }
}

/// The three-family universe for the four-place fragment: `all u v`
/// (u ∈ T, v ∈ T⁺), `some u v` (u, v ∈ T), and four-place sentences with
/// positions in T × T⁺ × T × T.
pub fn g2plus(delta: &[Sentence]) -> SentenceUniverse {
    let t = subterm_closure(delta);
    let tplus = all_of_extension(&t, &occurring_verbs(delta));
    SentenceUniverse {
        tag: "g2plus".into(),
        all: Some((t.clone(), tplus.clone())),
        some: Some((t.clone(), t.clone())),
        four: Some([t.clone(), tplus, t.clone(), t]),
        ..Default::default()
    }
}

/// `all u v` (u ∈ T, v ∈ T⁺) plus `some u v` (u, v ∈ T): the universe
/// backing the pair-model provability queries.
pub fn g_all_some(delta: &[Sentence]) -> SentenceUniverse {
    let t = subterm_closure(delta);
    let tplus = all_of_extension(&t, &occurring_verbs(delta));
    SentenceUniverse {
        tag: "g-all-some".into(),
        all: Some((t.clone(), tplus)),
        some: Some((t.clone(), t)),
        ..Default::default()
    }
}

/// All/Some sentences over the subterm pool extended by `slack` rounds of
/// `(r all ·)`/`(r some ·)` applications (the branch-saturation universe).
/// With `include_some` false only All-sentences are admitted, and only
/// `(r all ·)` extends the pool when `include_some_of` is false.
pub fn branch_universe(
    delta: &[Sentence],
    slack: usize,
    include_some: bool,
    include_some_of: bool,
) -> SentenceUniverse {
    let t = subterm_closure(delta);
    let verbs = occurring_verbs(delta);
    let u = term_pool_with_slack(&t, &verbs, slack, include_some_of);
    SentenceUniverse {
        tag: "branch".into(),
        all: Some((u.clone(), u.clone())),
        some: if include_some {
            Some((u.clone(), u))
        } else {
            None
        },
        ..Default::default()
    }
}

/// A universe given by an explicit member list.
pub fn explicit_universe(members: impl IntoIterator<Item = Sentence>) -> SentenceUniverse {
    SentenceUniverse {
        tag: "explicit".into(),
        explicit: members.into_iter().collect(),
        ..Default::default()
    }
}

/// Saturation failures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SaturationError {
    #[error("sentence universe has {size} members, exceeding the cap of {cap}")]
    UniverseTooLarge { size: u64, cap: u64 },
}

/// Knobs for [`saturate`].
#[derive(Debug, Clone)]
pub struct SaturationOptions {
    /// Maximum accepted universe size.
    pub universe_cap: u64,
    /// Stop as soon as this sentence is derived (sound for positive
    /// queries; the result is then a possibly-proper subset of the fixpoint).
    pub stop_at: Option<Sentence>,
}

impl Default for SaturationOptions {
    fn default() -> Self {
        SaturationOptions {
            universe_cap: DEFAULT_UNIVERSE_CAP,
            stop_at: None,
        }
    }
}

// ---------------------------------------------------------------------------
// Interned representation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum TNode {
    Noun(u32),
    AllOf(u32, u32),
    SomeOf(u32, u32),
    Not(u32),
}

#[derive(Debug, Default)]
struct Arena {
    syms: IndexSet<String>,
    terms: IndexSet<TNode>,
}

impl Arena {
    fn sym(&mut self, s: &str) -> u32 {
        self.syms.insert_full(s.to_string()).0 as u32
    }

    fn lookup_sym(&self, s: &str) -> Option<u32> {
        self.syms.get_index_of(s).map(|i| i as u32)
    }

    fn node(&mut self, n: TNode) -> u32 {
        self.terms.insert_full(n).0 as u32
    }

    fn intern(&mut self, t: &Term) -> u32 {
        let node = match t {
            Term::Noun(p) => TNode::Noun(self.sym(p)),
            Term::AllOf(r, b) => {
                let b = self.intern(b);
                TNode::AllOf(self.sym(r), b)
            }
            Term::SomeOf(r, b) => {
                let b = self.intern(b);
                TNode::SomeOf(self.sym(r), b)
            }
            Term::Not(b) => {
                let b = self.intern(b);
                TNode::Not(b)
            }
        };
        self.node(node)
    }

    /// Read-only lookup; `None` when the term was never interned.
    fn find(&self, t: &Term) -> Option<u32> {
        let node = match t {
            Term::Noun(p) => TNode::Noun(self.lookup_sym(p)?),
            Term::AllOf(r, b) => TNode::AllOf(self.lookup_sym(r)?, self.find(b)?),
            Term::SomeOf(r, b) => TNode::SomeOf(self.lookup_sym(r)?, self.find(b)?),
            Term::Not(b) => TNode::Not(self.find(b)?),
        };
        self.terms.get_index_of(&node).map(|i| i as u32)
    }

    fn term_of(&self, id: u32) -> Term {
        match self.terms[id as usize] {
            TNode::Noun(p) => Term::Noun(self.syms[p as usize].clone()),
            TNode::AllOf(r, b) => {
                Term::all_of(self.syms[r as usize].clone(), self.term_of(b))
            }
            TNode::SomeOf(r, b) => {
                Term::some_of(self.syms[r as usize].clone(), self.term_of(b))
            }
            TNode::Not(b) => Term::not(self.term_of(b)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum FactKey {
    All(u32, u32),
    Some(u32, u32),
    Four(u32, u32, u32, u32),
}

impl FactKey {
    fn shape(self) -> u8 {
        match self {
            FactKey::All(..) => 0,
            FactKey::Some(..) => 1,
            FactKey::Four(..) => 2,
        }
    }
}

fn intern_sentence(arena: &mut Arena, s: &Sentence) -> Option<FactKey> {
    Some(match s {
        Sentence::All(x, y) => FactKey::All(arena.intern(x), arena.intern(y)),
        Sentence::Some(x, y) => FactKey::Some(arena.intern(x), arena.intern(y)),
        Sentence::AllOrSome(a, b, x, y) => FactKey::Four(
            arena.intern(a),
            arena.intern(b),
            arena.intern(x),
            arena.intern(y),
        ),
        _ => return None,
    })
}

fn find_sentence(arena: &Arena, s: &Sentence) -> Option<FactKey> {
    Some(match s {
        Sentence::All(x, y) => FactKey::All(arena.find(x)?, arena.find(y)?),
        Sentence::Some(x, y) => FactKey::Some(arena.find(x)?, arena.find(y)?),
        Sentence::AllOrSome(a, b, x, y) => FactKey::Four(
            arena.find(a)?,
            arena.find(b)?,
            arena.find(x)?,
            arena.find(y)?,
        ),
        _ => return None,
    })
}

fn sentence_of(arena: &Arena, key: FactKey) -> Sentence {
    match key {
        FactKey::All(x, y) => Sentence::All(arena.term_of(x), arena.term_of(y)),
        FactKey::Some(x, y) => Sentence::Some(arena.term_of(x), arena.term_of(y)),
        FactKey::Four(a, b, x, y) => Sentence::AllOrSome(
            arena.term_of(a),
            arena.term_of(b),
            arena.term_of(x),
            arena.term_of(y),
        ),
    }
}

/// Interned universe with O(1) membership.
#[derive(Debug, Default)]
struct IUniverse {
    all: Option<(HashSet<u32>, HashSet<u32>)>,
    some: Option<(HashSet<u32>, HashSet<u32>)>,
    four: Option<[HashSet<u32>; 4]>,
    explicit: HashSet<FactKey>,
}

impl IUniverse {
    fn build(arena: &mut Arena, u: &SentenceUniverse) -> IUniverse {
        let pool = |arena: &mut Arena, p: &IndexSet<Term>| -> HashSet<u32> {
            p.iter().map(|t| arena.intern(t)).collect()
        };
        IUniverse {
            all: u
                .all
                .as_ref()
                .map(|(l, r)| (pool(arena, l), pool(arena, r))),
            some: u
                .some
                .as_ref()
                .map(|(l, r)| (pool(arena, l), pool(arena, r))),
            four: u.four.as_ref().map(|p| {
                [
                    pool(arena, &p[0]),
                    pool(arena, &p[1]),
                    pool(arena, &p[2]),
                    pool(arena, &p[3]),
                ]
            }),
            explicit: u
                .explicit
                .iter()
                .filter_map(|s| intern_sentence(arena, s))
                .collect(),
        }
    }

    fn contains(&self, key: FactKey) -> bool {
        let ok = match key {
            FactKey::All(x, y) => self
                .all
                .as_ref()
                .is_some_and(|(l, r)| l.contains(&x) && r.contains(&y)),
            FactKey::Some(x, y) => self
                .some
                .as_ref()
                .is_some_and(|(l, r)| l.contains(&x) && r.contains(&y)),
            FactKey::Four(a, b, x, y) => self.four.as_ref().is_some_and(|p| {
                p[0].contains(&a) && p[1].contains(&b) && p[2].contains(&x) && p[3].contains(&y)
            }),
        };
        ok || self.explicit.contains(&key)
    }
}

// ---------------------------------------------------------------------------
// Compiled rules
// ---------------------------------------------------------------------------

const MAX_TVARS: usize = 8;
const MAX_VVARS: usize = 4;

#[derive(Debug, Clone)]
enum CTermPat {
    Var(u8),
    AllOf(u8, Box<CTermPat>),
    SomeOf(u8, Box<CTermPat>),
}

#[derive(Debug, Clone)]
struct CSentPat {
    shape: u8,
    parts: Vec<CTermPat>,
}

#[derive(Debug, Clone)]
struct CRule {
    name: &'static str,
    premises: Vec<CSentPat>,
    conclusion: CSentPat,
    /// Term variables free in the conclusion (not bound by any premise),
    /// with their enumeration pools filled in at engine setup.
    free_tvars: Vec<u8>,
    /// Verb variables free in the conclusion.
    free_vvars: Vec<u8>,
    n_tvars: usize,
    n_vvars: usize,
}

#[derive(Default)]
struct VarNames {
    tvars: Vec<&'static str>,
    vvars: Vec<&'static str>,
}

impl VarNames {
    fn tvar(&mut self, name: &'static str) -> u8 {
        if let Some(i) = self.tvars.iter().position(|n| *n == name) {
            i as u8
        } else {
            self.tvars.push(name);
            (self.tvars.len() - 1) as u8
        }
    }

    fn vvar(&mut self, name: &'static str) -> u8 {
        if let Some(i) = self.vvars.iter().position(|n| *n == name) {
            i as u8
        } else {
            self.vvars.push(name);
            (self.vvars.len() - 1) as u8
        }
    }
}

fn compile_tpat(p: &TermPat, names: &mut VarNames) -> CTermPat {
    match p {
        TermPat::Var(v) => CTermPat::Var(names.tvar(v)),
        TermPat::AllOfV(r, b) => CTermPat::AllOf(names.vvar(r), Box::new(compile_tpat(b, names))),
        TermPat::SomeOfV(r, b) => {
            CTermPat::SomeOf(names.vvar(r), Box::new(compile_tpat(b, names)))
        }
    }
}

fn compile_spat(p: &SentencePat, names: &mut VarNames) -> CSentPat {
    match p {
        SentencePat::All(a, b) => CSentPat {
            shape: 0,
            parts: vec![compile_tpat(a, names), compile_tpat(b, names)],
        },
        SentencePat::Some(a, b) => CSentPat {
            shape: 1,
            parts: vec![compile_tpat(a, names), compile_tpat(b, names)],
        },
        SentencePat::AllOrSome(a, b, c, d) => CSentPat {
            shape: 2,
            parts: vec![
                compile_tpat(a, names),
                compile_tpat(b, names),
                compile_tpat(c, names),
                compile_tpat(d, names),
            ],
        },
    }
}

fn tpat_tvars(p: &CTermPat, out: &mut Vec<u8>) {
    match p {
        CTermPat::Var(v) => {
            if !out.contains(v) {
                out.push(*v);
            }
        }
        CTermPat::AllOf(_, b) | CTermPat::SomeOf(_, b) => tpat_tvars(b, out),
    }
}

fn tpat_vvars(p: &CTermPat, out: &mut Vec<u8>) {
    match p {
        CTermPat::Var(_) => {}
        CTermPat::AllOf(r, b) | CTermPat::SomeOf(r, b) => {
            if !out.contains(r) {
                out.push(*r);
            }
            tpat_vvars(b, out);
        }
    }
}

fn spat_tvars(p: &CSentPat) -> Vec<u8> {
    let mut out = Vec::new();
    for part in &p.parts {
        tpat_tvars(part, &mut out);
    }
    out
}

fn spat_vvars(p: &CSentPat) -> Vec<u8> {
    let mut out = Vec::new();
    for part in &p.parts {
        tpat_vvars(part, &mut out);
    }
    out
}

fn compile_rule(t: &RuleTemplate) -> CRule {
    let mut names = VarNames::default();
    let premises: Vec<CSentPat> = t.premises.iter().map(|p| compile_spat(p, &mut names)).collect();
    let conclusion = compile_spat(&t.conclusion, &mut names);
    let mut premise_tvars: Vec<u8> = Vec::new();
    let mut premise_vvars: Vec<u8> = Vec::new();
    for p in &premises {
        for v in spat_tvars(p) {
            if !premise_tvars.contains(&v) {
                premise_tvars.push(v);
            }
        }
        for v in spat_vvars(p) {
            if !premise_vvars.contains(&v) {
                premise_vvars.push(v);
            }
        }
    }
    let free_tvars = spat_tvars(&conclusion)
        .into_iter()
        .filter(|v| !premise_tvars.contains(v))
        .collect();
    let free_vvars = spat_vvars(&conclusion)
        .into_iter()
        .filter(|v| !premise_vvars.contains(v))
        .collect();
    CRule {
        name: t.name,
        premises,
        conclusion,
        free_tvars,
        free_vvars,
        n_tvars: names.tvars.len(),
        n_vvars: names.vvars.len(),
    }
}

type TBind = [Option<u32>; MAX_TVARS];
type VBind = [Option<u32>; MAX_VVARS];

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum Rec {
    Seed,
    Derived { rule: usize, premises: Vec<u32> },
}

/// Join index over committed facts: for a given (rule, premise, bound
/// variable set), maps the bound variables' values to the facts matching the
/// premise pattern standalone with those values.
#[derive(Default)]
struct IdxState {
    cursor: usize,
    map: HashMap<Vec<u32>, Vec<u32>>,
}

type IdxId = (u16, u8, u16, u8); // rule, premise, term-var mask, verb-var mask

struct Engine {
    arena: Arena,
    facts: IndexSet<FactKey>,
    recs: Vec<Rec>,
    rules: Vec<CRule>,
    uni: IUniverse,
    /// Enumeration pools for free conclusion variables, per rule per var.
    free_pools: Vec<Vec<Vec<u32>>>,
    verbs: Vec<u32>,
    indexes: HashMap<IdxId, IdxState>,
    stop: Option<FactKey>,
    stopped: bool,
    rounds: usize,
}

impl Engine {
    fn match_tpat(&self, pat: &CTermPat, id: u32, tb: &mut TBind, vb: &mut VBind) -> bool {
        match pat {
            CTermPat::Var(v) => match tb[*v as usize] {
                Some(old) => old == id,
                None => {
                    tb[*v as usize] = Some(id);
                    true
                }
            },
            CTermPat::AllOf(rv, body) => match self.arena.terms[id as usize] {
                TNode::AllOf(r, b) => {
                    (match vb[*rv as usize] {
                        Some(old) => old == r,
                        None => {
                            vb[*rv as usize] = Some(r);
                            true
                        }
                    }) && self.match_tpat(body, b, tb, vb)
                }
                _ => false,
            },
            CTermPat::SomeOf(rv, body) => match self.arena.terms[id as usize] {
                TNode::SomeOf(r, b) => {
                    (match vb[*rv as usize] {
                        Some(old) => old == r,
                        None => {
                            vb[*rv as usize] = Some(r);
                            true
                        }
                    }) && self.match_tpat(body, b, tb, vb)
                }
                _ => false,
            },
        }
    }

    fn match_spat(&self, pat: &CSentPat, key: FactKey, tb: &mut TBind, vb: &mut VBind) -> bool {
        if pat.shape != key.shape() {
            return false;
        }
        let args: [u32; 4] = match key {
            FactKey::All(a, b) | FactKey::Some(a, b) => [a, b, 0, 0],
            FactKey::Four(a, b, c, d) => [a, b, c, d],
        };
        pat.parts
            .iter()
            .enumerate()
            .all(|(i, p)| self.match_tpat(p, args[i], tb, vb))
    }

    fn build_tpat(&mut self, pat: &CTermPat, tb: &TBind, vb: &VBind) -> u32 {
        match pat {
            CTermPat::Var(v) => tb[*v as usize].expect("conclusion variable bound"),
            CTermPat::AllOf(rv, body) => {
                let b = self.build_tpat(body, tb, vb);
                let r = vb[*rv as usize].expect("conclusion verb bound");
                self.arena.node(TNode::AllOf(r, b))
            }
            CTermPat::SomeOf(rv, body) => {
                let b = self.build_tpat(body, tb, vb);
                let r = vb[*rv as usize].expect("conclusion verb bound");
                self.arena.node(TNode::SomeOf(r, b))
            }
        }
    }

    fn build_conclusion(&mut self, rule: usize, tb: &TBind, vb: &VBind) -> FactKey {
        let pat = self.rules[rule].conclusion.clone();
        let mut args = [0u32; 4];
        for (i, p) in pat.parts.iter().enumerate() {
            args[i] = self.build_tpat(p, tb, vb);
        }
        match pat.shape {
            0 => FactKey::All(args[0], args[1]),
            1 => FactKey::Some(args[0], args[1]),
            _ => FactKey::Four(args[0], args[1], args[2], args[3]),
        }
    }

    /// Bound-variable key for a premise under the current bindings; the
    /// variables (term then verb, ascending) that are already bound.
    fn premise_bound_vars(&self, rule: usize, premise: usize, tb: &TBind, vb: &VBind) -> (u16, u8) {
        let p = &self.rules[rule].premises[premise];
        let mut tmask: u16 = 0;
        for v in spat_tvars(p) {
            if tb[v as usize].is_some() {
                tmask |= 1 << v;
            }
        }
        let mut vmask: u8 = 0;
        for v in spat_vvars(p) {
            if vb[v as usize].is_some() {
                vmask |= 1 << v;
            }
        }
        (tmask, vmask)
    }

    fn index_key(tmask: u16, vmask: u8, tb: &TBind, vb: &VBind) -> Vec<u32> {
        let mut key = Vec::new();
        for v in 0..MAX_TVARS {
            if tmask & (1 << v) != 0 {
                key.push(tb[v].expect("masked var bound"));
            }
        }
        for v in 0..MAX_VVARS {
            if vmask & (1 << v) != 0 {
                key.push(vb[v].expect("masked verb bound"));
            }
        }
        key
    }

    /// Facts (committed) matching premise `premise` of `rule` whose bound
    /// variables take the values in the current bindings.
    fn query_index(
        &mut self,
        rule: usize,
        premise: usize,
        tmask: u16,
        vmask: u8,
        tb: &TBind,
        vb: &VBind,
    ) -> Vec<u32> {
        let id: IdxId = (rule as u16, premise as u8, tmask, vmask);
        let committed = self.facts.len();
        if !self.indexes.contains_key(&id) {
            self.indexes.insert(id, IdxState::default());
        }
        // Extend the index over facts committed since the last query.
        let mut state = self.indexes.remove(&id).unwrap();
        if state.cursor < committed {
            let pat = self.rules[rule].premises[premise].clone();
            for fi in state.cursor..committed {
                let key = *self.facts.get_index(fi).unwrap();
                let mut ftb: TBind = [None; MAX_TVARS];
                let mut fvb: VBind = [None; MAX_VVARS];
                if self.match_spat(&pat, key, &mut ftb, &mut fvb) {
                    let k = Self::index_key(tmask, vmask, &ftb, &fvb);
                    state.map.entry(k).or_default().push(fi as u32);
                }
            }
            state.cursor = committed;
        }
        let key = Self::index_key(tmask, vmask, tb, vb);
        let out = state.map.get(&key).cloned().unwrap_or_default();
        self.indexes.insert(id, state);
        out
    }

    /// Greedy join order over the remaining premises: most bound variables
    /// first, ties by premise position.
    fn next_premise(&self, rule: usize, remaining: &[usize], tb: &TBind, vb: &VBind) -> usize {
        let mut best = remaining[0];
        let mut best_score = -1i32;
        for &p in remaining {
            let (tmask, vmask) = self.premise_bound_vars(rule, p, tb, vb);
            let score = tmask.count_ones() as i32 + vmask.count_ones() as i32;
            if score > best_score {
                best = p;
                best_score = score;
            }
        }
        best
    }

    fn emit(&mut self, rule: usize, tb: &TBind, vb: &VBind, premises: &[u32], buf: &mut RoundBuf) {
        // Enumerate any conclusion variables not bound by the premises.
        let free_t = self.rules[rule].free_tvars.clone();
        let free_v = self.rules[rule].free_vvars.clone();
        self.emit_enum(rule, *tb, *vb, &free_t, &free_v, premises, buf);
    }

    fn emit_enum(
        &mut self,
        rule: usize,
        tb: TBind,
        vb: VBind,
        free_t: &[u8],
        free_v: &[u8],
        premises: &[u32],
        buf: &mut RoundBuf,
    ) {
        if self.stopped {
            return;
        }
        if let Some((&v, rest)) = free_t.split_first() {
            let pos = self.rules[rule]
                .free_tvars
                .iter()
                .position(|x| *x == v)
                .unwrap();
            let pool = self.free_pools[rule][pos].clone();
            for id in pool {
                let mut tb2 = tb;
                tb2[v as usize] = Some(id);
                self.emit_enum(rule, tb2, vb, rest, free_v, premises, buf);
                if self.stopped {
                    return;
                }
            }
            return;
        }
        if let Some((&v, rest)) = free_v.split_first() {
            let verbs = self.verbs.clone();
            for r in verbs {
                let mut vb2 = vb;
                vb2[v as usize] = Some(r);
                self.emit_enum(rule, tb, vb2, &[], rest, premises, buf);
                if self.stopped {
                    return;
                }
            }
            return;
        }
        let key = self.build_conclusion(rule, &tb, &vb);
        if !self.uni.contains(key) {
            return;
        }
        if self.facts.contains(&key) || !buf.keys.insert(key) {
            return;
        }
        buf.recs.push(Rec::Derived {
            rule,
            premises: premises.to_vec(),
        });
        if self.stop == Some(key) {
            self.stopped = true;
        }
    }

    fn join(
        &mut self,
        rule: usize,
        remaining: Vec<usize>,
        tb: TBind,
        vb: VBind,
        picked: &mut Vec<(usize, u32)>,
        buf: &mut RoundBuf,
    ) {
        if self.stopped {
            return;
        }
        if remaining.is_empty() {
            // Record premise facts in template order.
            let mut ordered = picked.clone();
            ordered.sort_by_key(|(slot, _)| *slot);
            let facts: Vec<u32> = ordered.into_iter().map(|(_, fi)| fi).collect();
            self.emit(rule, &tb, &vb, &facts, buf);
            return;
        }
        let p = self.next_premise(rule, &remaining, &tb, &vb);
        let rest: Vec<usize> = remaining.into_iter().filter(|x| *x != p).collect();
        let (tmask, vmask) = self.premise_bound_vars(rule, p, &tb, &vb);
        let bucket = self.query_index(rule, p, tmask, vmask, &tb, &vb);
        let pat = self.rules[rule].premises[p].clone();
        for fi in bucket {
            let key = *self.facts.get_index(fi as usize).unwrap();
            let mut tb2 = tb;
            let mut vb2 = vb;
            if self.match_spat(&pat, key, &mut tb2, &mut vb2) {
                picked.push((p, fi));
                self.join(rule, rest.clone(), tb2, vb2, picked, buf);
                picked.pop();
                if self.stopped {
                    return;
                }
            }
        }
    }
}

#[derive(Default)]
struct RoundBuf {
    keys: IndexSet<FactKey>,
    recs: Vec<Rec>,
}

/// Result of a saturation run; queries reconstruct sentences on demand.
#[derive(Debug)]
pub struct SaturationResult {
    arena: Arena,
    facts: IndexSet<FactKey>,
    recs: Vec<Rec>,
    rule_names: Vec<&'static str>,
    rounds: usize,
    universe_size: u64,
    seed_count: usize,
    stopped_early: bool,
}

impl SaturationResult {
    /// Whether the sentence was derived (or is a seed).
    pub fn contains(&self, s: &Sentence) -> bool {
        match find_sentence(&self.arena, s) {
            Some(key) => self.facts.contains(&key),
            None => false,
        }
    }

    /// Convenience: whether `all x y` was derived.
    pub fn le(&self, x: &Term, y: &Term) -> bool {
        self.contains(&Sentence::All(x.clone(), y.clone()))
    }

    /// Number of derived sentences (seeds included).
    pub fn derived_count(&self) -> usize {
        self.facts.len()
    }

    /// Number of seed sentences (Γ ∩ A).
    pub fn seed_count(&self) -> usize {
        self.seed_count
    }

    /// Materialize every derived sentence, in derivation order.
    pub fn derived_sentences(&self) -> Vec<Sentence> {
        self.facts
            .iter()
            .map(|k| sentence_of(&self.arena, *k))
            .collect()
    }

    /// Fixpoint rounds executed.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Size of the sentence universe.
    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    /// True when the run stopped at the requested goal before reaching the
    /// full fixpoint.
    pub fn stopped_early(&self) -> bool {
        self.stopped_early
    }

    /// The recorded derivation step for a sentence: rule name and premises.
    /// Seeds yield rule name "PREMISE" with no premises.
    pub fn derivation_of(&self, s: &Sentence) -> Option<(String, Vec<Sentence>)> {
        let key = find_sentence(&self.arena, s)?;
        let i = self.facts.get_index_of(&key)?;
        Some(match &self.recs[i] {
            Rec::Seed => (crate::proofs::RULE_PREMISE.to_string(), Vec::new()),
            Rec::Derived { rule, premises } => (
                self.rule_names[*rule].to_string(),
                premises
                    .iter()
                    .map(|p| sentence_of(&self.arena, *self.facts.get_index(*p as usize).unwrap()))
                    .collect(),
            ),
        })
    }

    /// Extract the recorded proof tree for a derived sentence.
    pub fn extract_proof(&self, s: &Sentence) -> Option<ProofNode> {
        let key = find_sentence(&self.arena, s)?;
        let i = self.facts.get_index_of(&key)?;
        Some(self.extract_idx(i))
    }

    fn extract_idx(&self, i: usize) -> ProofNode {
        let sentence = sentence_of(&self.arena, *self.facts.get_index(i).unwrap());
        match &self.recs[i] {
            Rec::Seed => ProofNode::premise(sentence),
            Rec::Derived { rule, premises } => {
                let children = premises
                    .iter()
                    .map(|p| self.extract_idx(*p as usize))
                    .collect();
                ProofNode::step(self.rule_names[*rule], children, sentence)
            }
        }
    }
}

/// Compute the bounded closure of `gamma` under the schematic templates of
/// `rules` inside `universe`.
pub fn saturate(
    gamma: &[Sentence],
    rules: &RuleSet,
    universe: &SentenceUniverse,
    opts: &SaturationOptions,
) -> Result<SaturationResult, SaturationError> {
    let universe_size = universe.len();
    if universe_size > opts.universe_cap {
        return Err(SaturationError::UniverseTooLarge {
            size: universe_size,
            cap: opts.universe_cap,
        });
    }

    let mut arena = Arena::default();
    let uni = IUniverse::build(&mut arena, universe);

    // Deterministic rule order: by name (the template lists are small).
    let mut templates: Vec<&RuleTemplate> = rules.templates.iter().collect();
    templates.sort_by_key(|t| t.name);
    let compiled: Vec<CRule> = templates.iter().map(|t| compile_rule(t)).collect();
    for r in &compiled {
        debug_assert!(r.n_tvars <= MAX_TVARS && r.n_vvars <= MAX_VVARS);
    }
    let rule_names: Vec<&'static str> = compiled.iter().map(|r| r.name).collect();

    // Free-variable enumeration pools: intersect the universe pools at the
    // positions where the variable occurs bare in the conclusion; fall back
    // to the full term pool for variables occurring only under a verb
    // constructor.
    let full_pool: Vec<Term> = universe.term_pool().into_iter().collect();
    let full_pool_ids: Vec<u32> = full_pool.iter().map(|t| arena.intern(t)).collect();
    let mut free_pools: Vec<Vec<Vec<u32>>> = Vec::with_capacity(compiled.len());
    for rule in &compiled {
        let mut pools = Vec::new();
        for &v in &rule.free_tvars {
            let mut constraint: Option<IndexSet<Term>> = None;
            for (i, part) in rule.conclusion.parts.iter().enumerate() {
                if let CTermPat::Var(pv) = part {
                    if *pv == v {
                        if let Some(pool) = universe.position_pool(rule.conclusion.shape, i) {
                            constraint = Some(match constraint {
                                None => pool.clone(),
                                Some(c) => c.intersection(pool).cloned().collect(),
                            });
                        }
                    }
                }
            }
            let ids: Vec<u32> = match constraint {
                Some(set) => set.iter().map(|t| arena.intern(t)).collect(),
                None => full_pool_ids.clone(),
            };
            pools.push(ids);
        }
        free_pools.push(pools);
    }

    // Verb candidates for free verb variables.
    let mut verb_names: IndexSet<Ident> = IndexSet::new();
    for t in &full_pool {
        for sub in t.subterms() {
            if let Term::AllOf(r, _) | Term::SomeOf(r, _) = sub {
                verb_names.insert(r.clone());
            }
        }
    }
    for v in occurring_verbs(gamma) {
        verb_names.insert(v);
    }
    if let Some(s) = &opts.stop_at {
        for v in occurring_verbs(std::slice::from_ref(s)) {
            verb_names.insert(v);
        }
    }
    let verbs: Vec<u32> = verb_names.iter().map(|v| arena.sym(v)).collect();

    let stop = opts
        .stop_at
        .as_ref()
        .and_then(|s| intern_sentence(&mut arena, s));

    let mut engine = Engine {
        arena,
        facts: IndexSet::new(),
        recs: Vec::new(),
        rules: compiled,
        uni,
        free_pools,
        verbs,
        indexes: HashMap::new(),
        stop,
        stopped: false,
        rounds: 0,
    };

    // Seeds: Γ ∩ A, in theory order.
    for s in gamma {
        if let Some(key) = intern_sentence(&mut engine.arena, s) {
            if engine.uni.contains(key) && engine.facts.insert(key) {
                engine.recs.push(Rec::Seed);
                if engine.stop == Some(key) {
                    engine.stopped = true;
                }
            }
        }
    }

    let mut delta: Range<usize> = 0..engine.facts.len();
    let n_rules = engine.rules.len();
    while !engine.stopped {
        engine.rounds += 1;
        let mut buf = RoundBuf::default();
        for rule in 0..n_rules {
            if engine.stopped {
                break;
            }
            let k = engine.rules[rule].premises.len();
            if !engine.uni.has_shape_for(&engine.rules[rule].conclusion) {
                continue;
            }
            if k == 0 {
                if engine.rounds == 1 {
                    let tb: TBind = [None; MAX_TVARS];
                    let vb: VBind = [None; MAX_VVARS];
                    engine.emit(rule, &tb, &vb, &[], &mut buf);
                }
                continue;
            }
            for seed_pos in 0..k {
                if engine.stopped {
                    break;
                }
                let pat = engine.rules[rule].premises[seed_pos].clone();
                for fi in delta.clone() {
                    if engine.stopped {
                        break;
                    }
                    let key = *engine.facts.get_index(fi).unwrap();
                    let mut tb: TBind = [None; MAX_TVARS];
                    let mut vb: VBind = [None; MAX_VVARS];
                    if !engine.match_spat(&pat, key, &mut tb, &mut vb) {
                        continue;
                    }
                    let remaining: Vec<usize> = (0..k).filter(|p| *p != seed_pos).collect();
                    let mut picked = vec![(seed_pos, fi as u32)];
                    engine.join(rule, remaining, tb, vb, &mut picked, &mut buf);
                }
            }
        }
        if buf.keys.is_empty() {
            break;
        }
        let start = engine.facts.len();
        for (key, rec) in buf.keys.iter().zip(buf.recs.into_iter()) {
            engine.facts.insert(*key);
            engine.recs.push(rec);
        }
        delta = start..engine.facts.len();
    }

    Ok(SaturationResult {
        seed_count: engine.recs.iter().filter(|r| matches!(r, Rec::Seed)).count(),
        arena: engine.arena,
        facts: engine.facts,
        recs: engine.recs,
        rule_names,
        rounds: engine.rounds,
        universe_size,
        stopped_early: engine.stopped,
    })
}

impl IUniverse {
    /// Whether conclusions of this shape can ever be members.
    fn has_shape_for(&self, pat: &CSentPat) -> bool {
        match pat.shape {
            0 => self.all.is_some() || self.explicit.iter().any(|k| k.shape() == 0),
            1 => self.some.is_some() || self.explicit.iter().any(|k| k.shape() == 1),
            _ => self.four.is_some() || self.explicit.iter().any(|k| k.shape() == 2),
        }
    }
}
