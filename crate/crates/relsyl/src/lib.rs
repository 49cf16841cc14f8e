//! A workbench for relational syllogistic logics.
//!
//! The library covers a family of term languages built from nouns, relational
//! verbs (`(r all t)`, `(r some t)`), complements, four-place
//! `all .. or some ..` sentences, and clause-shaped meet sentences — together
//! with:
//!
//! - parsing and printing ([`syntax`]);
//! - finite-model evaluation and an exhaustive consequence oracle
//!   ([`semantics`]);
//! - schematic rule sets and proof-tree checking, including
//!   hypothesis-discharging rules and chain-system nodes ([`rules`],
//!   [`proofs`]);
//! - bounded saturation over symbolic sentence universes ([`saturation`]);
//! - clause-level resolution with certificate-backed decisions ([`clausal`]);
//! - decision procedures per fragment, returning proofs, case analyses, or
//!   countermodels ([`deciders`], [`decision`]);
//! - generators for calibrated instance families and hardness reductions
//!   ([`corpus`]);
//! - translations between the flat complemented language and the relational
//!   languages ([`bridge`]).

pub mod bridge;
pub mod clausal;
pub mod corpus;
pub mod deciders;
pub mod decision;
pub mod proofs;
pub mod rules;
pub mod saturation;
pub mod semantics;
pub mod syntax;
