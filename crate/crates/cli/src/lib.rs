//! A text format for finite sites and presheaves, and the checks behind the
//! `toposkit` command.

pub mod ast;
pub mod commands;
pub mod diag;
pub mod elaborate;
pub mod export;
pub mod lexer;
pub mod parser;
pub mod print;

pub use ast::Document;
pub use commands::{run_command, Command, Flags, Format, Input, Outcome, Report, Scope};
pub use diag::{Diagnostic, Stage};
pub use elaborate::{elaborate, Elaborated};
pub use parser::parse;
pub use print::print;
