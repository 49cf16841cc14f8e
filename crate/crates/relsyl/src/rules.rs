//! Inference rules: schematic templates, named rule sets, and instance
//! matching.
//!
//! A [`RuleTemplate`] is a sentence schema with term variables and verb
//! variables; an *instance* is any substitution of concrete terms/verbs.
//! Rule sets bundle the templates with the discharge rules, clause rules and
//! chain schema they admit:
//!
//! * `l1core` — AXIOM, BARBARA, ANTI
//! * `base0` — l1core plus SOME1, SOME2, DARII
//! * `base0+chains` — base0 plus the CHAINS schema (see the proofs module)
//! * `l2plus` — base0 plus the ten rules for the four-place
//!   `all .. or some ..` sentences
//! * `l3.5` — base0 plus R1, R2, R3 and the discharge rules CASES, CASES1
//! * `l3` — AXIOM, BARBARA, ANTI, R1, MIX and the discharge rules CASES3,
//!   CASES2
//! * `clausal` — CLAXIOM, RES, REL, STRUCTURAL, EFQ and the discharge rule
//!   RAA over `[..]` / `<..>` sentences

use std::collections::BTreeMap;

use itertools::Itertools;
use once_cell::sync::Lazy;

use crate::syntax::{Ident, Sentence, Term};

/// A term schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermPat {
    /// A term variable.
    Var(&'static str),
    /// `(R all pat)` with `R` a verb variable.
    AllOfV(&'static str, Box<TermPat>),
    /// `(R some pat)` with `R` a verb variable.
    SomeOfV(&'static str, Box<TermPat>),
}

/// A sentence schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SentencePat {
    All(TermPat, TermPat),
    Some(TermPat, TermPat),
    AllOrSome(TermPat, TermPat, TermPat, TermPat),
}

/// A named premises-to-conclusion schema.
#[derive(Debug, Clone)]
pub struct RuleTemplate {
    pub name: &'static str,
    pub premises: Vec<SentencePat>,
    pub conclusion: SentencePat,
}

/// Discharge (hypothetical-reasoning) rules; their premise/withdrawal shapes
/// are enforced by the proof checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DischargeKind {
    /// Two subproofs of the same conclusion, withdrawing `some x x` on the
    /// left and `all y (r all x)` on the right (same `x`).
    Cases,
    /// As `Cases`, but the right side withdraws `all x y`.
    Cases1,
    /// Two subproofs, withdrawing `all (r all x) (r some x)` on the left and
    /// `all x y` on the right.
    Cases2,
    /// As `Cases2`, but the right side withdraws `all y (s all x)`.
    Cases3,
    /// Two subproofs concluding `< ys >` and `[ ys ]`, both withdrawing
    /// `[ xs ]`; concludes `< xs >`.
    Raa,
}

impl DischargeKind {
    pub fn name(self) -> &'static str {
        match self {
            DischargeKind::Cases => "CASES",
            DischargeKind::Cases1 => "CASES1",
            DischargeKind::Cases2 => "CASES2",
            DischargeKind::Cases3 => "CASES3",
            DischargeKind::Raa => "RAA",
        }
    }
}

/// Clause-sentence rules; variadic, so matched by dedicated checkers in the
/// clausal module rather than by templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClausalKind {
    Claxiom,
    Res,
    Rel,
    Structural,
    Efq,
}

impl ClausalKind {
    pub fn name(self) -> &'static str {
        match self {
            ClausalKind::Claxiom => "CLAXIOM",
            ClausalKind::Res => "RES",
            ClausalKind::Rel => "REL",
            ClausalKind::Structural => "STRUCTURAL",
            ClausalKind::Efq => "EFQ",
        }
    }
}

/// A named collection of rules.
#[derive(Debug, Clone)]
pub struct RuleSet {
    pub name: &'static str,
    pub templates: Vec<RuleTemplate>,
    pub discharge: Vec<DischargeKind>,
    pub clausal: Vec<ClausalKind>,
    /// Whether CHAINS nodes are admitted.
    pub chains: bool,
}

impl RuleSet {
    pub fn template(&self, name: &str) -> Option<&RuleTemplate> {
        self.templates.iter().find(|t| t.name == name)
    }

    pub fn discharge_kind(&self, name: &str) -> Option<DischargeKind> {
        self.discharge.iter().copied().find(|d| d.name() == name)
    }

    pub fn clausal_kind(&self, name: &str) -> Option<ClausalKind> {
        self.clausal.iter().copied().find(|c| c.name() == name)
    }
}

/// The available rule sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleSetName {
    L1Core,
    Base0,
    Base0Chains,
    L2Plus,
    L35,
    L3,
    Clausal,
}

impl RuleSetName {
    pub const ALL: [RuleSetName; 7] = [
        RuleSetName::L1Core,
        RuleSetName::Base0,
        RuleSetName::Base0Chains,
        RuleSetName::L2Plus,
        RuleSetName::L35,
        RuleSetName::L3,
        RuleSetName::Clausal,
    ];

    pub fn id(self) -> &'static str {
        match self {
            RuleSetName::L1Core => "l1core",
            RuleSetName::Base0 => "base0",
            RuleSetName::Base0Chains => "base0+chains",
            RuleSetName::L2Plus => "l2plus",
            RuleSetName::L35 => "l3.5",
            RuleSetName::L3 => "l3",
            RuleSetName::Clausal => "clausal",
        }
    }

    pub fn parse(s: &str) -> Option<RuleSetName> {
        let key = s.trim().to_ascii_lowercase();
        RuleSetName::ALL
            .into_iter()
            .find(|n| n.id() == key || n.id().replace('.', "") == key.replace('.', ""))
    }
}

fn tv(name: &'static str) -> TermPat {
    TermPat::Var(name)
}

fn av(verb: &'static str, body: TermPat) -> TermPat {
    TermPat::AllOfV(verb, Box::new(body))
}

fn sv(verb: &'static str, body: TermPat) -> TermPat {
    TermPat::SomeOfV(verb, Box::new(body))
}

fn rule(
    name: &'static str,
    premises: Vec<SentencePat>,
    conclusion: SentencePat,
) -> RuleTemplate {
    RuleTemplate {
        name,
        premises,
        conclusion,
    }
}

fn l1core_templates() -> Vec<RuleTemplate> {
    use SentencePat::*;
    vec![
        rule("AXIOM", vec![], All(tv("x"), tv("x"))),
        rule(
            "BARBARA",
            vec![All(tv("x"), tv("y")), All(tv("y"), tv("z"))],
            All(tv("x"), tv("z")),
        ),
        rule(
            "ANTI",
            vec![All(tv("x"), tv("y"))],
            All(av("r", tv("y")), av("r", tv("x"))),
        ),
    ]
}

fn base0_templates() -> Vec<RuleTemplate> {
    use SentencePat::*;
    let mut out = l1core_templates();
    out.extend([
        rule("SOME1", vec![Some(tv("x"), tv("y"))], Some(tv("x"), tv("x"))),
        rule("SOME2", vec![Some(tv("x"), tv("y"))], Some(tv("y"), tv("x"))),
        rule(
            "DARII",
            vec![Some(tv("x"), tv("y")), All(tv("y"), tv("z"))],
            Some(tv("x"), tv("z")),
        ),
    ]);
    out
}

fn l2plus_templates() -> Vec<RuleTemplate> {
    use SentencePat::*;
    let mut out = base0_templates();
    out.extend([
        rule("EMPTY1", vec![], AllOrSome(tv("a"), tv("b"), tv("a"), tv("a"))),
        rule(
            "EMPTY2",
            vec![],
            AllOrSome(tv("b"), av("r", tv("a")), tv("a"), tv("a")),
        ),
        rule(
            "LWEAK",
            vec![All(tv("a"), tv("b"))],
            AllOrSome(tv("a"), tv("b"), tv("x"), tv("y")),
        ),
        rule(
            "RWEAK",
            vec![Some(tv("x"), tv("y"))],
            AllOrSome(tv("a"), tv("b"), tv("x"), tv("y")),
        ),
        rule(
            "NEWSOME1",
            vec![AllOrSome(tv("a"), tv("b"), tv("x"), tv("y"))],
            AllOrSome(tv("a"), tv("b"), tv("x"), tv("x")),
        ),
        rule(
            "NEWSOME2",
            vec![AllOrSome(tv("a"), tv("b"), tv("x"), tv("y"))],
            AllOrSome(tv("a"), tv("b"), tv("y"), tv("x")),
        ),
        rule(
            "NEWBARBARA",
            vec![
                AllOrSome(tv("a"), tv("b"), tv("x"), tv("y")),
                AllOrSome(tv("b"), tv("c"), tv("x"), tv("y")),
            ],
            AllOrSome(tv("a"), tv("c"), tv("x"), tv("y")),
        ),
        rule(
            "NEWANTI",
            vec![AllOrSome(tv("a"), tv("b"), tv("x"), tv("y"))],
            AllOrSome(av("r", tv("b")), av("r", tv("a")), tv("x"), tv("y")),
        ),
        rule(
            "NEWDARII",
            vec![
                Some(tv("t"), tv("u")),
                AllOrSome(tv("t"), tv("x"), tv("x"), tv("y")),
                AllOrSome(tv("u"), tv("y"), tv("x"), tv("y")),
            ],
            Some(tv("x"), tv("y")),
        ),
        rule(
            "NEWNEWDARII",
            vec![
                AllOrSome(tv("a"), tv("b"), tv("t"), tv("u")),
                AllOrSome(tv("t"), tv("x"), tv("x"), tv("y")),
                AllOrSome(tv("u"), tv("y"), tv("x"), tv("y")),
            ],
            AllOrSome(tv("a"), tv("b"), tv("x"), tv("y")),
        ),
    ]);
    out
}

fn l35_templates() -> Vec<RuleTemplate> {
    use SentencePat::*;
    let mut out = base0_templates();
    out.extend([
        rule(
            "R1",
            vec![All(tv("x"), tv("y"))],
            All(sv("r", tv("x")), sv("r", tv("y"))),
        ),
        rule(
            "R2",
            vec![Some(tv("x"), tv("y"))],
            All(av("r", tv("x")), sv("r", tv("y"))),
        ),
        rule(
            "R3",
            vec![Some(tv("x"), sv("r", tv("y")))],
            Some(tv("y"), tv("y")),
        ),
    ]);
    out
}

fn l3_templates() -> Vec<RuleTemplate> {
    use SentencePat::*;
    let mut out = l1core_templates();
    out.extend([
        rule(
            "R1",
            vec![All(tv("x"), tv("y"))],
            All(sv("r", tv("x")), sv("r", tv("y"))),
        ),
        rule(
            "MIX",
            vec![
                All(av("r", tv("y")), sv("r", tv("y"))),
                All(tv("y"), sv("r", tv("x"))),
            ],
            All(av("s", tv("x")), sv("s", tv("x"))),
        ),
    ]);
    out
}

static L1CORE: Lazy<RuleSet> = Lazy::new(|| RuleSet {
    name: "l1core",
    templates: l1core_templates(),
    discharge: vec![],
    clausal: vec![],
    chains: false,
});

static BASE0: Lazy<RuleSet> = Lazy::new(|| RuleSet {
    name: "base0",
    templates: base0_templates(),
    discharge: vec![],
    clausal: vec![],
    chains: false,
});

static BASE0_CHAINS: Lazy<RuleSet> = Lazy::new(|| RuleSet {
    name: "base0+chains",
    templates: base0_templates(),
    discharge: vec![],
    clausal: vec![],
    chains: true,
});

static L2PLUS: Lazy<RuleSet> = Lazy::new(|| RuleSet {
    name: "l2plus",
    templates: l2plus_templates(),
    discharge: vec![],
    clausal: vec![],
    chains: false,
});

static L35: Lazy<RuleSet> = Lazy::new(|| RuleSet {
    name: "l3.5",
    templates: l35_templates(),
    discharge: vec![DischargeKind::Cases, DischargeKind::Cases1],
    clausal: vec![],
    chains: false,
});

static L3: Lazy<RuleSet> = Lazy::new(|| RuleSet {
    name: "l3",
    templates: l3_templates(),
    discharge: vec![DischargeKind::Cases3, DischargeKind::Cases2],
    clausal: vec![],
    chains: false,
});

static CLAUSAL: Lazy<RuleSet> = Lazy::new(|| RuleSet {
    name: "clausal",
    templates: vec![],
    discharge: vec![DischargeKind::Raa],
    clausal: vec![
        ClausalKind::Claxiom,
        ClausalKind::Res,
        ClausalKind::Rel,
        ClausalKind::Structural,
        ClausalKind::Efq,
    ],
    chains: false,
});

/// Look up a rule set by name.
pub fn rule_set(name: RuleSetName) -> &'static RuleSet {
    match name {
        RuleSetName::L1Core => &L1CORE,
        RuleSetName::Base0 => &BASE0,
        RuleSetName::Base0Chains => &BASE0_CHAINS,
        RuleSetName::L2Plus => &L2PLUS,
        RuleSetName::L35 => &L35,
        RuleSetName::L3 => &L3,
        RuleSetName::Clausal => &CLAUSAL,
    }
}

/// A substitution binding term variables to terms and verb variables to
/// verbs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst {
    pub terms: BTreeMap<&'static str, Term>,
    pub verbs: BTreeMap<&'static str, Ident>,
}

impl Subst {
    fn bind_term(&mut self, var: &'static str, t: &Term) -> bool {
        match self.terms.get(var) {
            Some(old) => old == t,
            None => {
                self.terms.insert(var, t.clone());
                true
            }
        }
    }

    fn bind_verb(&mut self, var: &'static str, v: &Ident) -> bool {
        match self.verbs.get(var) {
            Some(old) => old == v,
            None => {
                self.verbs.insert(var, v.clone());
                true
            }
        }
    }
}

/// Match a term pattern against a concrete term, extending `su`.
pub fn match_term(pat: &TermPat, t: &Term, su: &mut Subst) -> bool {
    match (pat, t) {
        (TermPat::Var(v), _) => su.bind_term(v, t),
        (TermPat::AllOfV(rv, body), Term::AllOf(r, b)) => {
            su.bind_verb(rv, r) && match_term(body, b, su)
        }
        (TermPat::SomeOfV(rv, body), Term::SomeOf(r, b)) => {
            su.bind_verb(rv, r) && match_term(body, b, su)
        }
        _ => false,
    }
}

/// Match a sentence pattern against a concrete sentence, extending `su`.
pub fn match_sentence(pat: &SentencePat, s: &Sentence, su: &mut Subst) -> bool {
    match (pat, s) {
        (SentencePat::All(p1, p2), Sentence::All(t1, t2))
        | (SentencePat::Some(p1, p2), Sentence::Some(t1, t2)) => {
            match_term(p1, t1, su) && match_term(p2, t2, su)
        }
        (SentencePat::AllOrSome(p1, p2, p3, p4), Sentence::AllOrSome(t1, t2, t3, t4)) => {
            match_term(p1, t1, su)
                && match_term(p2, t2, su)
                && match_term(p3, t3, su)
                && match_term(p4, t4, su)
        }
        _ => false,
    }
}

/// Instantiate a term pattern; `None` if a variable is unbound.
pub fn instantiate_term(pat: &TermPat, su: &Subst) -> Option<Term> {
    match pat {
        TermPat::Var(v) => su.terms.get(v).cloned(),
        TermPat::AllOfV(rv, body) => Some(Term::AllOf(
            su.verbs.get(rv)?.clone(),
            Box::new(instantiate_term(body, su)?),
        )),
        TermPat::SomeOfV(rv, body) => Some(Term::SomeOf(
            su.verbs.get(rv)?.clone(),
            Box::new(instantiate_term(body, su)?),
        )),
    }
}

/// Instantiate a sentence pattern; `None` if a variable is unbound.
pub fn instantiate_sentence(pat: &SentencePat, su: &Subst) -> Option<Sentence> {
    Some(match pat {
        SentencePat::All(p1, p2) => {
            Sentence::All(instantiate_term(p1, su)?, instantiate_term(p2, su)?)
        }
        SentencePat::Some(p1, p2) => {
            Sentence::Some(instantiate_term(p1, su)?, instantiate_term(p2, su)?)
        }
        SentencePat::AllOrSome(p1, p2, p3, p4) => Sentence::AllOrSome(
            instantiate_term(p1, su)?,
            instantiate_term(p2, su)?,
            instantiate_term(p3, su)?,
            instantiate_term(p4, su)?,
        ),
    })
}

/// Check whether `premises |- conclusion` is an instance of `template`.
/// Premises are matched against the template's premise list under
/// permutation; the first successful substitution (conclusion first, then
/// premise permutations in lexicographic index order) is returned.
pub fn match_instance(
    template: &RuleTemplate,
    premises: &[&Sentence],
    conclusion: &Sentence,
) -> Option<Subst> {
    if premises.len() != template.premises.len() {
        return None;
    }
    let k = premises.len();
    for perm in (0..k).permutations(k) {
        let mut su = Subst::default();
        if !match_sentence(&template.conclusion, conclusion, &mut su) {
            return None;
        }
        let ok = template
            .premises
            .iter()
            .zip(perm.iter())
            .all(|(pat, &i)| match_sentence(pat, premises[i], &mut su));
        if ok {
            return Some(su);
        }
    }
    // Zero-premise rules still need the conclusion matched.
    if k == 0 {
        let mut su = Subst::default();
        if match_sentence(&template.conclusion, conclusion, &mut su) {
            return Some(su);
        }
    }
    None
}

/// Term and verb variables of a template, in first-occurrence order
/// (premises first, then conclusion). Used by the fuzzing harness.
pub fn template_variables(t: &RuleTemplate) -> (Vec<&'static str>, Vec<&'static str>) {
    let mut terms = Vec::new();
    let mut verbs = Vec::new();
    let visit_term = |pat: &TermPat, terms: &mut Vec<&'static str>, verbs: &mut Vec<&'static str>| {
        let mut stack = vec![pat];
        while let Some(p) = stack.pop() {
            match p {
                TermPat::Var(v) => {
                    if !terms.contains(v) {
                        terms.push(v);
                    }
                }
                TermPat::AllOfV(rv, b) | TermPat::SomeOfV(rv, b) => {
                    if !verbs.contains(rv) {
                        verbs.push(rv);
                    }
                    stack.push(b);
                }
            }
        }
    };
    let visit_sentence = |pat: &SentencePat,
                              terms: &mut Vec<&'static str>,
                              verbs: &mut Vec<&'static str>| match pat {
        SentencePat::All(a, b) | SentencePat::Some(a, b) => {
            visit_term(a, terms, verbs);
            visit_term(b, terms, verbs);
        }
        SentencePat::AllOrSome(a, b, c, d) => {
            for p in [a, b, c, d] {
                visit_term(p, terms, verbs);
            }
        }
    };
    for p in &t.premises {
        visit_sentence(p, &mut terms, &mut verbs);
    }
    visit_sentence(&t.conclusion, &mut terms, &mut verbs);
    (terms, verbs)
}
