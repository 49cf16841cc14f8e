//! Decision procedures for the syllogistic fragments.
//!
//! Each fragment gets a dedicated decider that answers consequence queries
//! `Γ ⊨ φ` with a checkable certificate: a proof (or case certificate) for
//! positive answers, a finite countermodel for negative ones.  The top-level
//! [`decide`] entry point inspects the syntactic features of the input and
//! routes the query to the appropriate decider:
//!
//! * All-sentences only: bounded saturation with the core rules, canonical
//!   term-domain countermodels ([`decide_l1`]).
//! * All/Some sentences, optionally with four-place disjunctive sentences:
//!   bounded saturation with the extended rule set, pair-model countermodels
//!   ([`decide_l2plus`]).
//! * Sentences built from `(r all t)` / `(r some t)` under `all`/`some`:
//!   case-split deciders that enumerate existence packages per term
//!   ([`decide_l3`], [`decide_l35`]).
//! * Sentences with complemented terms: clausal saturation
//!   ([`crate::clausal::decide_clausal`], [`crate::clausal::decide_l5`]).
//!
//! The module also exposes the canonical pair-model constructions
//! ([`build_pair_model`], [`build_pair_model_restricted`]) and the
//! existence-determination test ([`determines_existentials`]) used in the
//! completeness arguments behind the countermodels.

mod branches;
mod l1;
mod l2plus;

pub use branches::{decide_l3, decide_l35, validate_case_certificate};
pub use l1::decide_l1;
pub use l2plus::{
    build_pair_model, build_pair_model_restricted, decide_l2plus, determines_existentials,
};

use crate::clausal::{decide_clausal, decide_l5, ClausalError, ClausalOptions};
use crate::decision::Decision;
use crate::saturation::{SaturationError, DEFAULT_UNIVERSE_CAP};
use crate::semantics::SemanticsError;
use crate::syntax::{Fragment, Sentence, Theory};
use thiserror::Error;

/// Default cap on the number of case branches explored by the case-split
/// deciders (each branch costs one bounded saturation).
pub const DEFAULT_BRANCH_CAP: u64 = 1 << 16;

/// Default extra nesting depth allowed when the case-split deciders extend
/// the sentence universe beyond the subterms of the input.
pub const DEFAULT_DEPTH_SLACK: usize = 1;

/// Errors reported by the decision procedures.
#[derive(Debug, Error)]
pub enum DecideError {
    /// The input does not lie in the fragment handled by the chosen decider.
    #[error("input outside the {expected} fragment: {msg}")]
    Fragment {
        /// Name of the fragment the decider handles.
        expected: &'static str,
        /// Human-readable description of the offending feature.
        msg: String,
    },
    /// The bounded sentence universe exceeded its cap.
    #[error(transparent)]
    Saturation(#[from] SaturationError),
    /// The case split visited more branch nodes than the configured cap.
    #[error("case split over {terms} terms exceeded the branch budget ({cap})")]
    BranchBudget {
        /// Number of terms the existence assignment ranges over.
        terms: usize,
        /// Configured branch budget.
        cap: u64,
    },
    /// Model evaluation failed (undeclared symbol or malformed model).
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    /// The clausal decider reported an error.
    #[error(transparent)]
    Clausal(#[from] ClausalError),
    /// An internal consistency check failed; this indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Tunable resource limits for the decision procedures.
#[derive(Debug, Clone)]
pub struct DecideOptions {
    /// Cap on the size of the bounded sentence universe.
    pub universe_cap: u64,
    /// Cap on the number of branches explored by the case-split deciders.
    pub branch_cap: u64,
    /// Extra nesting depth for the case-split sentence universe.
    pub depth_slack: usize,
    /// Limits forwarded to the clausal decider.
    pub clausal: ClausalOptions,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            universe_cap: DEFAULT_UNIVERSE_CAP,
            branch_cap: DEFAULT_BRANCH_CAP,
            depth_slack: DEFAULT_DEPTH_SLACK,
            clausal: ClausalOptions::default(),
        }
    }
}

/// Decides `theory ⊨ goal`, routing to the decider for the smallest fragment
/// containing both.
///
/// Returns a [`Decision`] whose certificate is a proof or case certificate
/// for positive answers and a finite countermodel for negative ones; the
/// clausal deciders may also answer `unknown` when their bounds run out.
pub fn decide(
    theory: &Theory,
    goal: &Sentence,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    let features = theory.features().union(goal.features());
    let fragment = Fragment::least_covering(features).ok_or_else(|| DecideError::Fragment {
        expected: "supported",
        msg: "no fragment covers the combined features of the theory and goal".into(),
    })?;
    decide_in(fragment, theory, goal, opts)
}

/// Decides `theory ⊨ goal` with the decider for `fragment`.
///
/// The input must actually lie inside `fragment`; use this to force a larger
/// fragment than the syntactic minimum (for example, running an All-only
/// query through the case-split decider).
pub fn decide_in(
    fragment: Fragment,
    theory: &Theory,
    goal: &Sentence,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    require_within(theory, goal, fragment)?;
    match fragment {
        Fragment::L1 => decide_l1(theory, goal, opts),
        Fragment::L2 | Fragment::L2Plus => decide_l2plus(theory, goal, opts),
        Fragment::L3 => decide_l3(theory, goal, opts),
        Fragment::L3Half => decide_l35(theory, goal, opts),
        Fragment::L4
        | Fragment::L4Half
        | Fragment::L4Plus
        | Fragment::L4HalfPlus => {
            Ok(decide_clausal(&theory.sentences, goal, &opts.clausal)?)
        }
        Fragment::L5 | Fragment::L5Half => Ok(decide_l5(&theory.sentences, goal, &opts.clausal)?),
        // `require_within` already rejected the flat relational language.
        Fragment::RStar => Err(DecideError::Internal(
            "unreachable fragment dispatch".into(),
        )),
    }
}

/// Checks that the combined features of `theory` and `goal` fit inside the
/// given fragment.
pub(crate) fn require_within(
    theory: &Theory,
    goal: &Sentence,
    fragment: Fragment,
) -> Result<(), DecideError> {
    let allowed = fragment.allowed_features().ok_or(DecideError::Fragment {
        expected: "syllogistic",
        msg: "the flat relational language has no direct decider; translate it first".into(),
    })?;
    let features = theory.features().union(goal.features());
    if features.within(allowed) {
        Ok(())
    } else {
        Err(DecideError::Fragment {
            expected: fragment.name(),
            msg: format!("theory or goal uses features outside {}", fragment.name()),
        })
    }
}
