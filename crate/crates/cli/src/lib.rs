//! Text DSL for declaring maps, sequences, sets and queries over exact
//! piecewise-linear interval dynamics, a deterministic runner producing JSON
//! or CSV reports, and the bundled `verify-paper` fixture audit.

pub mod ast;
pub mod fixtures;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod report;
pub mod runner;

pub use ast::{Diagnostic, SystemSpec};
pub use parser::parse;
pub use runner::{run, RunConfig};
