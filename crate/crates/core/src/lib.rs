//! Sequent calculus for first-order logic over variable-only terms, with
//! de Bruijn binding, and a constructive Craig interpolation procedure.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, printing and the
//! command line live in the `craig` crate.
//!
//! * [`formula`]: formulae, renaming, binders, free variables, polarity.
//! * [`calculus`]: sequents, derivation trees and the wellformedness checker.
//! * [`interpolation`]: the strengthened interpolation algorithm and its
//!   independent verifier.
//! * [`oracle`]: truth-table semantics and random derivation generation,
//!   used as ground truth in tests.
#![no_std]

extern crate alloc;

pub mod calculus;
pub mod formula;
pub mod interpolation;
pub mod oracle;

pub use calculus::{Derivation, FormulaSet, RuleInstance, RuleKind, Sequent};
pub use formula::{Formula, Polarity, PredId, Quantifier, VarId};
pub use interpolation::{
    interpolate, interpolate_strong, verify, InterpolationError, InterpolationResult, SplitSequent,
    VerifyReport,
};
