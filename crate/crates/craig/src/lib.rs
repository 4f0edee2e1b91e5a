//! Text formats and command-line front end for the `craig-core` sequent
//! calculus and interpolation procedure.

pub mod cli;
pub mod problem;
pub mod syntax;

pub use problem::{
    parse_problem, parse_result, print_problem, print_result, ProblemError, ProblemFile,
};
pub use syntax::{
    parse_derivation, parse_formula, parse_sequent, print_derivation, print_formula, print_sequent,
    ParseError,
};
