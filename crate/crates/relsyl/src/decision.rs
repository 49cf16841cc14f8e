//! Decision outcomes and checkable certificates.
//!
//! Every decision procedure in this crate returns a [`Decision`]: a `yes`,
//! `no` or `unknown` answer, a certificate backing the answer whenever one is
//! claimed (a proof tree, a case analysis, or a finite countermodel), and
//! run statistics. Certificates are plain data: they can be serialized,
//! shipped elsewhere, and re-validated independently of the search that
//! produced them.

use serde_json::{json, Value};

use crate::proofs::{ProofError, ProofNode};
use crate::semantics::FiniteModel;
use crate::syntax::{Ident, ParseOptions, Sentence, Term};

/// Three-valued decision answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Existence flag attached to a term in a case split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExistFlag {
    Nonempty,
    Empty,
}

impl ExistFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ExistFlag::Nonempty => "nonempty",
            ExistFlag::Empty => "empty",
        }
    }

    pub fn parse(s: &str) -> Option<ExistFlag> {
        match s {
            "nonempty" => Some(ExistFlag::Nonempty),
            "empty" => Some(ExistFlag::Empty),
            _ => None,
        }
    }
}

/// Which case-split discipline a case certificate uses: existential import
/// splits on `some t t`, effective nonemptiness on `all (r all t) (r some t)`
/// for every verb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseFlavor {
    ExistentialImport,
    EffectiveNonemptiness,
}

impl CaseFlavor {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseFlavor::ExistentialImport => "existential-import",
            CaseFlavor::EffectiveNonemptiness => "effective-nonemptiness",
        }
    }

    pub fn parse(s: &str) -> Option<CaseFlavor> {
        match s {
            "existential-import" => Some(CaseFlavor::ExistentialImport),
            "effective-nonemptiness" => Some(CaseFlavor::EffectiveNonemptiness),
            _ => None,
        }
    }
}

/// One leaf of a case analysis: the (possibly partial) existence assignment
/// over the split terms, the theory extension it induces, and a proof of the
/// goal from the extended theory.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseBranch {
    /// Flags for the first `assignment.len()` terms of the certificate's
    /// term list; shorter than the full list when the remaining splits were
    /// pruned because the goal already followed.
    pub assignment: Vec<ExistFlag>,
    /// The sentences the assignment contributes on top of the input theory
    /// (the existence package); the input theory itself is not repeated.
    pub branch_theory: Vec<Sentence>,
    /// Proof of the goal from the input theory extended by `branch_theory`.
    pub derivation: ProofNode,
}

/// A case-analysis certificate: a covering set of existence assignments over
/// the listed terms with a goal proof per branch.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseCertificate {
    pub flavor: CaseFlavor,
    /// Terms split over, in split order.
    pub terms: Vec<Term>,
    pub goal: Sentence,
    pub branches: Vec<CaseBranch>,
}

impl CaseCertificate {
    /// Check that the branch assignments tile the full assignment space:
    /// every total assignment over `terms` extends exactly one branch.
    pub fn check_coverage(&self) -> Result<(), String> {
        fn cover(branches: &[&CaseBranch], prefix_len: usize, terms_len: usize) -> Result<(), String> {
            if branches.is_empty() {
                return Err(format!(
                    "no branch covers an assignment extending a prefix of length {prefix_len}"
                ));
            }
            if let Some(exact) = branches.iter().find(|b| b.assignment.len() == prefix_len) {
                if branches.len() > 1 {
                    return Err(format!(
                        "branch with assignment {:?} overlaps {} deeper branch(es)",
                        exact.assignment.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
                        branches.len() - 1
                    ));
                }
                return Ok(());
            }
            if prefix_len >= terms_len {
                return Err("assignment longer than the term list".to_string());
            }
            for flag in [ExistFlag::Nonempty, ExistFlag::Empty] {
                let side: Vec<&CaseBranch> = branches
                    .iter()
                    .copied()
                    .filter(|b| b.assignment.get(prefix_len) == Some(&flag))
                    .collect();
                cover(&side, prefix_len + 1, terms_len)?;
            }
            Ok(())
        }
        let all: Vec<&CaseBranch> = self.branches.iter().collect();
        for b in &all {
            if b.assignment.len() > self.terms.len() {
                return Err("assignment longer than the term list".to_string());
            }
        }
        cover(&all, 0, self.terms.len())
    }
}

/// A decision certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Proof(ProofNode),
    Cases(CaseCertificate),
    Model(FiniteModel),
}

/// Search statistics attached to a decision.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecisionStats {
    /// Size of the bounded sentence universe, when one was used.
    pub universe_size: Option<u64>,
    /// Saturation rounds (largest run, for branch searches).
    pub rounds: Option<usize>,
    /// Case branches explored.
    pub branches: Option<usize>,
    /// Clauses generated, for clause-based searches.
    pub clauses: Option<usize>,
    /// Candidate models checked during countermodel search.
    pub models_checked: Option<u64>,
    /// Wall-clock time.
    pub elapsed_ms: u64,
    /// True when a search bound (depth, clause or model budget) was hit
    /// without settling the query.
    pub bounds_exhausted: bool,
}

/// The outcome of a decision procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub answer: Answer,
    pub certificate: Option<Certificate>,
    pub stats: DecisionStats,
}

impl Decision {
    pub fn yes(certificate: Certificate, stats: DecisionStats) -> Decision {
        Decision {
            answer: Answer::Yes,
            certificate: Some(certificate),
            stats,
        }
    }

    pub fn no(model: FiniteModel, stats: DecisionStats) -> Decision {
        Decision {
            answer: Answer::No,
            certificate: Some(Certificate::Model(model)),
            stats,
        }
    }

    pub fn unknown(stats: DecisionStats) -> Decision {
        Decision {
            answer: Answer::Unknown,
            certificate: None,
            stats,
        }
    }

    /// JSON rendering: `{"answer": ..., "certificate": ..., "stats": ...}`.
    pub fn to_json(&self) -> Value {
        json!({
            "answer": self.answer.as_str(),
            "certificate": self.certificate.as_ref().map(certificate_to_json),
            "stats": stats_to_json(&self.stats),
        })
    }
}

/// Witness returned when a theory fails to determine existentials: the pair
/// (and verb, where the criterion mentions one) at which the dichotomy
/// breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: Term,
    pub y: Term,
    pub verb: Option<Ident>,
}

impl Witness {
    pub fn to_json(&self) -> Value {
        json!({
            "x": self.x.to_string(),
            "y": self.y.to_string(),
            "verb": self.verb.clone(),
        })
    }
}

pub fn stats_to_json(stats: &DecisionStats) -> Value {
    let mut map = serde_json::Map::new();
    if let Some(u) = stats.universe_size {
        map.insert("universeSize".into(), json!(u));
    }
    if let Some(r) = stats.rounds {
        map.insert("rounds".into(), json!(r));
    }
    if let Some(b) = stats.branches {
        map.insert("branches".into(), json!(b));
    }
    if let Some(c) = stats.clauses {
        map.insert("clauses".into(), json!(c));
    }
    if let Some(m) = stats.models_checked {
        map.insert("modelsChecked".into(), json!(m));
    }
    map.insert("elapsedMs".into(), json!(stats.elapsed_ms));
    map.insert("boundsExhausted".into(), json!(stats.bounds_exhausted));
    Value::Object(map)
}

/// Tagged JSON rendering of a certificate.
pub fn certificate_to_json(cert: &Certificate) -> Value {
    match cert {
        Certificate::Proof(p) => json!({
            "type": "proof",
            "proof": p.to_json(),
        }),
        Certificate::Cases(c) => json!({
            "type": "cases",
            "flavor": c.flavor.as_str(),
            "terms": c.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "goal": c.goal.to_string(),
            "branches": c.branches.iter().map(|b| json!({
                "assignment": b.assignment.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
                "branchTheory": b.branch_theory.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "derivation": b.derivation.to_json(),
            })).collect::<Vec<_>>(),
        }),
        Certificate::Model(m) => json!({
            "type": "model",
            "model": serde_json::to_value(m).unwrap_or(Value::Null),
        }),
    }
}

/// Errors raised when re-reading a certificate from JSON.
#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    #[error("certificate JSON is malformed: {0}")]
    Malformed(String),
    #[error("certificate proof is malformed: {0}")]
    Proof(#[from] ProofError),
}

/// Parse a tagged certificate produced by [`certificate_to_json`].
pub fn certificate_from_json(v: &Value) -> Result<Certificate, CertificateError> {
    let opts = ParseOptions {
        allow_reserved: true,
    };
    let tag = v
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| CertificateError::Malformed("missing \"type\" tag".into()))?;
    match tag {
        "proof" => {
            let p = v
                .get("proof")
                .ok_or_else(|| CertificateError::Malformed("missing \"proof\" field".into()))?;
            Ok(Certificate::Proof(ProofNode::from_json_str(&p.to_string())?))
        }
        "model" => {
            let m = v
                .get("model")
                .ok_or_else(|| CertificateError::Malformed("missing \"model\" field".into()))?;
            let model: FiniteModel = serde_json::from_value(m.clone())
                .map_err(|e| CertificateError::Malformed(e.to_string()))?;
            Ok(Certificate::Model(model))
        }
        "cases" => {
            let flavor = v
                .get("flavor")
                .and_then(Value::as_str)
                .and_then(CaseFlavor::parse)
                .ok_or_else(|| CertificateError::Malformed("bad \"flavor\" field".into()))?;
            let parse_term = |s: &str| -> Result<Term, CertificateError> {
                crate::syntax::parse_term(s, opts)
                    .map_err(|e| CertificateError::Malformed(e.to_string()))
            };
            let parse_sentence = |s: &str| -> Result<Sentence, CertificateError> {
                crate::syntax::parse_sentence(s, opts)
                    .map_err(|e| CertificateError::Malformed(e.to_string()))
            };
            let terms = v
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| CertificateError::Malformed("bad \"terms\" field".into()))?
                .iter()
                .map(|t| {
                    t.as_str()
                        .ok_or_else(|| CertificateError::Malformed("non-string term".into()))
                        .and_then(parse_term)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let goal = parse_sentence(
                v.get("goal")
                    .and_then(Value::as_str)
                    .ok_or_else(|| CertificateError::Malformed("bad \"goal\" field".into()))?,
            )?;
            let branches = v
                .get("branches")
                .and_then(Value::as_array)
                .ok_or_else(|| CertificateError::Malformed("bad \"branches\" field".into()))?
                .iter()
                .map(|b| -> Result<CaseBranch, CertificateError> {
                    let assignment = b
                        .get("assignment")
                        .and_then(Value::as_array)
                        .ok_or_else(|| {
                            CertificateError::Malformed("bad \"assignment\" field".into())
                        })?
                        .iter()
                        .map(|f| {
                            f.as_str().and_then(ExistFlag::parse).ok_or_else(|| {
                                CertificateError::Malformed("bad existence flag".into())
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let branch_theory = b
                        .get("branchTheory")
                        .and_then(Value::as_array)
                        .ok_or_else(|| {
                            CertificateError::Malformed("bad \"branchTheory\" field".into())
                        })?
                        .iter()
                        .map(|s| {
                            s.as_str()
                                .ok_or_else(|| {
                                    CertificateError::Malformed("non-string sentence".into())
                                })
                                .and_then(parse_sentence)
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let derivation = b
                        .get("derivation")
                        .ok_or_else(|| {
                            CertificateError::Malformed("missing \"derivation\" field".into())
                        })?;
                    Ok(CaseBranch {
                        assignment,
                        branch_theory,
                        derivation: ProofNode::from_json_str(&derivation.to_string())?,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Certificate::Cases(CaseCertificate {
                flavor,
                terms,
                goal,
                branches,
            }))
        }
        other => Err(CertificateError::Malformed(format!(
            "unknown certificate type {other:?}"
        ))),
    }
}
