//! Toy imperative language: syntax tree, parser, printer and static checks.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod typeck;

pub use ast::*;
pub use parser::{parse_expr, parse_formula_expr, parse_program};
pub use printer::{print_program, ProgramDisplay};
pub use typeck::{free_vars, infer_sorts, validate_program, Signature};
