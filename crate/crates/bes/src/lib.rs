//! Base-extension semantics for intuitionistic propositional logic.
//!
//! The crate decides support-in-a-base judgments by translating formulas
//! into general atomic clauses and running a derivability engine over the
//! resulting clause systems. An independent sequent-calculus prover and a
//! small Kripke countermodel search cross-check every verdict.

pub mod base;
pub mod bes;
pub mod clauses;
pub mod corpus;
pub mod prover;
pub mod syntax;
pub mod trace;

pub use base::{derives, parse_base, print_base, AtomicRule, Base, Derivation, RulePremise};
pub use bes::{
    bounded_eval, crosscheck, support_atomic, supports, supports_padded, valid, BoundedError,
    BoundedEvaluator, Bounds, CrosscheckRecord, CrosscheckReport, PremiseDepth, SupportQuery,
    SupportResult,
};
pub use corpus::{curated, random_formulas, CuratedEntry};
pub use clauses::{
    base_to_clauses, classify, clause_to_rule, flatten, instantiate_system, mints_system,
    modified_system, rule_to_clause, ClauseSystem, FlatMap, GeneralClause, MintsClassification,
};
pub use prover::{clause_derives, decide_goal, kripke_refute, oracle_prove, KripkeModel, Sequent};
pub use syntax::{
    normalize_bot, parse_formula, print_formula, subformulas, substitute_bot, weight, Atom,
    Context, Formula,
};
