//! Proof trees and the proof checker.
//!
//! A proof is a tree of named rule applications. Leaves are `PREMISE`
//! (sentence stated in the theory) or `HYP` (hypothesis withdrawn by an
//! enclosing discharge step). Inner nodes are instances of schematic rules,
//! clause rules, discharge rules, or the `CHAINS` schema, depending on the
//! rule set the proof is checked against.
//!
//! Proofs serialize to JSON with sentences in concrete syntax:
//!
//! ```json
//! {
//!   "conclusion": "some x z",
//!   "rule": "DARII",
//!   "children": [
//!     { "conclusion": "some x y", "rule": "PREMISE" },
//!     { "conclusion": "all y z", "rule": "PREMISE" }
//!   ]
//! }
//! ```
//!
//! Discharge nodes carry a `discharged` list aligned with `children`
//! (entry *i* is the hypothesis available inside child *i*); `CHAINS` nodes
//! carry a `chains` list grouping the chain sentences, whose flattening must
//! equal the conclusions of `children[1..]`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clausal;
use crate::rules::{match_instance, DischargeKind, RuleSet};
use crate::syntax::{parse_sentence, Ident, ParseOptions, Sentence, Term};

/// Rule name for leaves justified by the theory.
pub const RULE_PREMISE: &str = "PREMISE";
/// Rule name for leaves justified by a withdrawn hypothesis.
pub const RULE_HYP: &str = "HYP";
/// Rule name for chain-system nodes.
pub const RULE_CHAINS: &str = "CHAINS";

/// A node of a proof tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub conclusion: Sentence,
    pub rule: String,
    pub children: Vec<ProofNode>,
    /// For discharge rules: hypothesis withdrawn in each child, aligned with
    /// `children`. Empty otherwise.
    pub discharged: Vec<Sentence>,
    /// For `CHAINS` nodes: the chain system, grouped chain by chain. The
    /// flattened list must equal the conclusions of `children[1..]`.
    pub chains: Vec<Vec<Sentence>>,
}

impl ProofNode {
    /// Leaf justified by a stated premise.
    pub fn premise(conclusion: Sentence) -> ProofNode {
        ProofNode {
            conclusion,
            rule: RULE_PREMISE.to_string(),
            children: Vec::new(),
            discharged: Vec::new(),
            chains: Vec::new(),
        }
    }

    /// Leaf justified by a withdrawn hypothesis.
    pub fn hyp(conclusion: Sentence) -> ProofNode {
        ProofNode {
            conclusion,
            rule: RULE_HYP.to_string(),
            children: Vec::new(),
            discharged: Vec::new(),
            chains: Vec::new(),
        }
    }

    /// Inner node applying a named rule.
    pub fn step(
        rule: impl Into<String>,
        children: Vec<ProofNode>,
        conclusion: Sentence,
    ) -> ProofNode {
        ProofNode {
            conclusion,
            rule: rule.into(),
            children,
            discharged: Vec::new(),
            chains: Vec::new(),
        }
    }

    /// Discharge node: `discharged[i]` is available as a hypothesis in
    /// `children[i]`.
    pub fn discharge(
        kind: DischargeKind,
        children: Vec<ProofNode>,
        discharged: Vec<Sentence>,
        conclusion: Sentence,
    ) -> ProofNode {
        ProofNode {
            conclusion,
            rule: kind.name().to_string(),
            children,
            discharged,
            chains: Vec::new(),
        }
    }

    /// Chain-system node. `children[0]` derives the seed `some a b`; the
    /// remaining children derive the chain sentences, flattened in order.
    pub fn chains_node(
        children: Vec<ProofNode>,
        chains: Vec<Vec<Sentence>>,
        conclusion: Sentence,
    ) -> ProofNode {
        ProofNode {
            conclusion,
            rule: RULE_CHAINS.to_string(),
            children,
            discharged: Vec::new(),
            chains,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }

    /// Height of the tree (a leaf has depth 1).
    pub fn depth(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(ProofNode::depth)
            .max()
            .unwrap_or(0)
    }

    /// Names of all rules used anywhere in the tree.
    pub fn rules_used(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.insert(n.rule.clone());
            stack.extend(n.children.iter());
        }
        out
    }
}

/// Why a proof was rejected.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofError {
    #[error("unknown rule `{rule}` at node `{at}`")]
    UnknownRule { rule: String, at: String },
    #[error("rule `{rule}` is not part of rule set `{set}` (node `{at}`)")]
    RuleNotInSet {
        rule: String,
        set: String,
        at: String,
    },
    #[error("premise `{at}` is not among the stated premises")]
    PremiseNotFound { at: String },
    #[error("hypothesis `{at}` is not withdrawn by any enclosing discharge step")]
    HypothesisNotBound { at: String },
    #[error("rule `{rule}` expects {expected} subproofs, found {got} (node `{at}`)")]
    Arity {
        rule: String,
        expected: usize,
        got: usize,
        at: String,
    },
    #[error("`{at}` does not follow from the subproof conclusions by rule `{rule}`")]
    BadInstance { rule: String, at: String },
    #[error("invalid {rule} step at node `{at}`: {msg}")]
    BadStep {
        rule: String,
        at: String,
        msg: String,
    },
    #[error("invalid chain system at node `{at}`: {msg}")]
    Chains { at: String, msg: String },
    #[error("malformed proof JSON: {0}")]
    Json(String),
}

/// Check a proof of `root.conclusion` from `premises` in the given rule set.
pub fn check_proof(
    premises: &[Sentence],
    rules: &RuleSet,
    root: &ProofNode,
) -> Result<(), ProofError> {
    let mut hyps: Vec<Sentence> = Vec::new();
    check_node(premises, rules, root, &mut hyps)
}

fn check_node(
    premises: &[Sentence],
    rules: &RuleSet,
    node: &ProofNode,
    hyps: &mut Vec<Sentence>,
) -> Result<(), ProofError> {
    let at = || node.conclusion.to_string();
    let rule = node.rule.as_str();

    if rule != RULE_CHAINS
        && !rules
            .discharge
            .iter()
            .any(|d| d.name() == rule)
        && !node.discharged.is_empty()
    {
        return Err(ProofError::BadStep {
            rule: rule.to_string(),
            at: at(),
            msg: "only discharge rules may withdraw hypotheses".into(),
        });
    }
    if rule != RULE_CHAINS && !node.chains.is_empty() {
        return Err(ProofError::BadStep {
            rule: rule.to_string(),
            at: at(),
            msg: "only CHAINS nodes may carry a chain system".into(),
        });
    }

    match rule {
        RULE_PREMISE => {
            expect_arity(node, 0)?;
            if premises.contains(&node.conclusion) {
                Ok(())
            } else {
                Err(ProofError::PremiseNotFound { at: at() })
            }
        }
        RULE_HYP => {
            expect_arity(node, 0)?;
            if hyps.contains(&node.conclusion) {
                Ok(())
            } else {
                Err(ProofError::HypothesisNotBound { at: at() })
            }
        }
        RULE_CHAINS => {
            if !rules.chains {
                return Err(ProofError::RuleNotInSet {
                    rule: rule.to_string(),
                    set: rules.name.to_string(),
                    at: at(),
                });
            }
            check_chains_node(node)?;
            for child in &node.children {
                check_node(premises, rules, child, hyps)?;
            }
            Ok(())
        }
        _ => {
            if let Some(kind) = rules.discharge_kind(rule) {
                check_discharge_node(node, kind)?;
                for (child, hyp) in node.children.iter().zip(node.discharged.iter()) {
                    hyps.push(hyp.clone());
                    let res = check_node(premises, rules, child, hyps);
                    hyps.pop();
                    res?;
                }
                return Ok(());
            }
            if let Some(kind) = rules.clausal_kind(rule) {
                let child_concls: Vec<&Sentence> =
                    node.children.iter().map(|c| &c.conclusion).collect();
                clausal::check_clause_step(kind, &child_concls, &node.conclusion).map_err(
                    |msg| ProofError::BadStep {
                        rule: rule.to_string(),
                        at: at(),
                        msg,
                    },
                )?;
                for child in &node.children {
                    check_node(premises, rules, child, hyps)?;
                }
                return Ok(());
            }
            if let Some(template) = rules.template(rule) {
                expect_arity(node, template.premises.len())?;
                let child_concls: Vec<&Sentence> =
                    node.children.iter().map(|c| &c.conclusion).collect();
                if match_instance(template, &child_concls, &node.conclusion).is_none() {
                    return Err(ProofError::BadInstance {
                        rule: rule.to_string(),
                        at: at(),
                    });
                }
                for child in &node.children {
                    check_node(premises, rules, child, hyps)?;
                }
                return Ok(());
            }
            let known_elsewhere = crate::rules::RuleSetName::ALL
                .iter()
                .map(|n| crate::rules::rule_set(*n))
                .any(|rs| {
                    rs.template(rule).is_some()
                        || rs.discharge_kind(rule).is_some()
                        || rs.clausal_kind(rule).is_some()
                        || (rule == RULE_CHAINS && rs.chains)
                });
            if known_elsewhere {
                Err(ProofError::RuleNotInSet {
                    rule: rule.to_string(),
                    set: rules.name.to_string(),
                    at: at(),
                })
            } else {
                Err(ProofError::UnknownRule {
                    rule: rule.to_string(),
                    at: at(),
                })
            }
        }
    }
}

fn expect_arity(node: &ProofNode, expected: usize) -> Result<(), ProofError> {
    if node.children.len() == expected {
        Ok(())
    } else {
        Err(ProofError::Arity {
            rule: node.rule.clone(),
            expected,
            got: node.children.len(),
            at: node.conclusion.to_string(),
        })
    }
}

fn check_discharge_node(node: &ProofNode, kind: DischargeKind) -> Result<(), ProofError> {
    let at = || node.conclusion.to_string();
    let bad = |msg: &str| ProofError::BadStep {
        rule: kind.name().to_string(),
        at: at(),
        msg: msg.to_string(),
    };
    if node.children.len() != 2 || node.discharged.len() != 2 {
        return Err(bad("expected exactly two subproofs and two withdrawn hypotheses"));
    }
    let d0 = &node.discharged[0];
    let d1 = &node.discharged[1];
    match kind {
        DischargeKind::Raa => {
            let goal_lits = match &node.conclusion {
                Sentence::NonemptyMeet(lits) => lits,
                _ => return Err(bad("conclusion must be a `< .. >` sentence")),
            };
            for d in [d0, d1] {
                match d {
                    Sentence::EmptyMeet(lits) if lits == goal_lits => {}
                    _ => {
                        return Err(bad(
                            "both subproofs must withdraw the `[ .. ]` sentence over the \
                             conclusion's terms",
                        ))
                    }
                }
            }
            let (c0, c1) = (&node.children[0].conclusion, &node.children[1].conclusion);
            let pair = match (c0, c1) {
                (Sentence::NonemptyMeet(a), Sentence::EmptyMeet(b)) => Some((a, b)),
                (Sentence::EmptyMeet(b), Sentence::NonemptyMeet(a)) => Some((a, b)),
                _ => None,
            };
            match pair {
                Some((a, b)) if a == b => Ok(()),
                Some(_) => Err(bad(
                    "the two subproofs must conclude `< ys >` and `[ ys ]` over the same terms",
                )),
                None => Err(bad(
                    "the two subproofs must conclude one `< .. >` and one `[ .. ]` sentence",
                )),
            }
        }
        DischargeKind::Cases
        | DischargeKind::Cases1
        | DischargeKind::Cases2
        | DischargeKind::Cases3 => {
            for child in &node.children {
                if child.conclusion != node.conclusion {
                    return Err(bad("both subproofs must conclude the node's own conclusion"));
                }
            }
            let x: &Term = match kind {
                DischargeKind::Cases | DischargeKind::Cases1 => match d0 {
                    Sentence::Some(a, b) if a == b => a,
                    _ => return Err(bad("left withdrawn hypothesis must have form `some x x`")),
                },
                _ => match d0 {
                    Sentence::All(Term::AllOf(r, a), Term::SomeOf(s, b))
                        if r == s && a == b =>
                    {
                        a
                    }
                    _ => {
                        return Err(bad(
                            "left withdrawn hypothesis must have form `all (r all x) (r some x)`",
                        ))
                    }
                },
            };
            match kind {
                DischargeKind::Cases | DischargeKind::Cases3 => match d1 {
                    Sentence::All(_, Term::AllOf(_, b)) if b.as_ref() == x => Ok(()),
                    _ => Err(bad(
                        "right withdrawn hypothesis must have form `all y (s all x)` with the \
                         same x",
                    )),
                },
                DischargeKind::Cases1 | DischargeKind::Cases2 => match d1 {
                    Sentence::All(a, _) if a == x => Ok(()),
                    _ => Err(bad(
                        "right withdrawn hypothesis must have form `all x y` with the same x",
                    )),
                },
                DischargeKind::Raa => unreachable!(),
            }
        }
    }
}

/// Missing-link candidates of a consecutive pair `(u, v)` inside a chain:
/// every `t` such that, after peeling a shared all-term prefix of length `k`
/// off both `u` and `v`, the remainder of `v` (for even `k`) or of `u` (for
/// odd `k`) has the form `(r all t)`.
pub fn pair_missing_links(u: &Term, v: &Term) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    let mut uu = u;
    let mut vv = v;
    let mut k = 0usize;
    loop {
        let side = if k % 2 == 0 { vv } else { uu };
        if let Term::AllOf(_, t) = side {
            if !out.contains(t) {
                out.push((**t).clone());
            }
        }
        match (uu, vv) {
            (Term::AllOf(r1, b1), Term::AllOf(r2, b2)) if r1 == r2 => {
                uu = b1;
                vv = b2;
                k += 1;
            }
            _ => break,
        }
    }
    out
}

fn check_chains_node(node: &ProofNode) -> Result<(), ProofError> {
    let at = || node.conclusion.to_string();
    let err = |msg: String| ProofError::Chains { at: at(), msg };
    let (x, y) = match &node.conclusion {
        Sentence::Some(x, y) => (x, y),
        _ => return Err(err("conclusion must be a `some` sentence".into())),
    };
    if node.chains.is_empty() {
        return Err(err("chain system must be nonempty".into()));
    }
    if node.children.is_empty() {
        return Err(err("expected a subproof of a seed `some` sentence".into()));
    }
    let (a, b) = match &node.children[0].conclusion {
        Sentence::Some(a, b) => (a, b),
        _ => {
            return Err(err(
                "first subproof must conclude a `some` sentence".into(),
            ))
        }
    };

    // The remaining subproofs derive the chain sentences, flattened in order.
    let flat: Vec<&Sentence> = node.chains.iter().flatten().collect();
    let derived: Vec<&Sentence> = node.children[1..].iter().map(|c| &c.conclusion).collect();
    if flat != derived {
        return Err(err(
            "subproofs after the first must conclude the chain sentences, flattened in order"
                .into(),
        ));
    }

    check_chain_system(x, y, a, b, &node.chains).map_err(err)
}

/// Validate a chain system for concluding `some x y` from `some a b`.
///
/// Each chain `(all a0 u1, all v1 u2, .., all vm b0)` *links* `a0` to `b0`.
/// Every consecutive pair must admit a decomposition whose missing link `t`
/// is linked to `x` by some earlier chain and to `y` by some earlier chain;
/// finally some chain must link `a` to `x` and some chain `b` to `y`.
pub fn check_chain_system(
    x: &Term,
    y: &Term,
    a: &Term,
    b: &Term,
    chains: &[Vec<Sentence>],
) -> Result<(), String> {
    let mut prior: Vec<(Term, Term)> = Vec::new();
    for (n, chain) in chains.iter().enumerate() {
        if chain.is_empty() {
            return Err(format!("chain {} is empty", n + 1));
        }
        let mut sides: Vec<(&Term, &Term)> = Vec::with_capacity(chain.len());
        for s in chain {
            match s {
                Sentence::All(l, r) => sides.push((l, r)),
                other => {
                    return Err(format!(
                        "chain {} contains the non-`all` sentence `{}`",
                        n + 1,
                        other
                    ))
                }
            }
        }
        for i in 1..sides.len() {
            let u = sides[i - 1].1;
            let v = sides[i].0;
            let cands = pair_missing_links(u, v);
            if cands.is_empty() {
                return Err(format!(
                    "chain {}: consecutive terms `{}` and `{}` admit no decomposition",
                    n + 1,
                    u,
                    v
                ));
            }
            let ok = cands.iter().any(|t| {
                prior.iter().any(|(f, g)| f == t && g == x)
                    && prior.iter().any(|(f, g)| f == t && g == y)
            });
            if !ok {
                return Err(format!(
                    "chain {}: no missing link of `{}` / `{}` is linked to both goal terms by \
                     earlier chains",
                    n + 1,
                    u,
                    v
                ));
            }
        }
        prior.push((sides[0].0.clone(), sides[sides.len() - 1].1.clone()));
    }
    if !prior.iter().any(|(f, g)| f == a && g == x) {
        return Err(format!("no chain links `{}` to `{}`", a, x));
    }
    if !prior.iter().any(|(f, g)| f == b && g == y) {
        return Err(format!("no chain links `{}` to `{}`", b, y));
    }
    Ok(())
}

/// The anti-image of an All-sentence under a sequence of verbs.
///
/// `all u v` maps to `all (r⃗ all u) (r⃗ all v)` when the sequence has even
/// length and to the flipped `all (r⃗ all v) (r⃗ all u)` when odd, where
/// `(r⃗ all x)` nests the verbs with the first one outermost.  The result is
/// exactly what `|r⃗|` antitonicity steps derive from the input, applied
/// with the innermost verb first.  Returns `None` unless `psi` is an
/// All-sentence.
pub fn anti_image(rvec: &[Ident], psi: &Sentence) -> Option<Sentence> {
    let (u, v) = match psi {
        Sentence::All(u, v) => (u.clone(), v.clone()),
        _ => return None,
    };
    let wrap = |x: Term| {
        rvec.iter()
            .rev()
            .fold(x, |acc, r| Term::all_of(r.clone(), acc))
    };
    let (l, r) = if rvec.len() % 2 == 0 { (u, v) } else { (v, u) };
    Some(Sentence::All(wrap(l), wrap(r)))
}

#[derive(Debug, Serialize, Deserialize)]
struct ProofJson {
    conclusion: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<ProofJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    discharged: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    chains: Vec<Vec<String>>,
}

fn to_proof_json(node: &ProofNode) -> ProofJson {
    ProofJson {
        conclusion: node.conclusion.to_string(),
        rule: node.rule.clone(),
        children: node.children.iter().map(to_proof_json).collect(),
        discharged: node.discharged.iter().map(|s| s.to_string()).collect(),
        chains: node
            .chains
            .iter()
            .map(|c| c.iter().map(|s| s.to_string()).collect())
            .collect(),
    }
}

fn parse_proof_sentence(text: &str) -> Result<Sentence, ProofError> {
    // Proofs over flattened theories mention machine-generated nouns, so the
    // reserved sigil is allowed here.
    parse_sentence(text, ParseOptions { allow_reserved: true })
        .map_err(|e| ProofError::Json(format!("bad sentence `{}`: {}", text, e)))
}

fn from_proof_json(pj: &ProofJson) -> Result<ProofNode, ProofError> {
    Ok(ProofNode {
        conclusion: parse_proof_sentence(&pj.conclusion)?,
        rule: pj.rule.clone(),
        children: pj
            .children
            .iter()
            .map(from_proof_json)
            .collect::<Result<_, _>>()?,
        discharged: pj
            .discharged
            .iter()
            .map(|s| parse_proof_sentence(s))
            .collect::<Result<_, _>>()?,
        chains: pj
            .chains
            .iter()
            .map(|c| c.iter().map(|s| parse_proof_sentence(s)).collect())
            .collect::<Result<_, _>>()?,
    })
}

impl ProofNode {
    /// Serialize to the JSON proof format.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(to_proof_json(self)).expect("proof serialization cannot fail")
    }

    /// Parse a proof from its JSON format.
    pub fn from_json(value: &serde_json::Value) -> Result<ProofNode, ProofError> {
        let pj: ProofJson = serde_json::from_value(value.clone())
            .map_err(|e| ProofError::Json(e.to_string()))?;
        from_proof_json(&pj)
    }

    /// Parse a proof from JSON text.
    pub fn from_json_str(text: &str) -> Result<ProofNode, ProofError> {
        let pj: ProofJson =
            serde_json::from_str(text).map_err(|e| ProofError::Json(e.to_string()))?;
        from_proof_json(&pj)
    }
}
