//! Expectation-based minimalist grammars: a grammar format, the structure
//! building operations, resumable top-down derivations, an incremental
//! parser with exhaustive and beam search, dependency and trace output, and
//! the `emg` command line.

pub mod cli;
pub mod derivation;
pub mod error;
pub mod grammar;
pub mod ops;
pub mod output;
pub mod parsing;
