//! Dynamic-logic layer: terms, formulas with box modalities, updates and sequents.

pub mod convert;
pub mod formula;
pub mod sequent;
pub mod update;

pub use convert::{expr_to_formula, expr_to_term, parse_formula};
pub use formula::{free_prog_vars, ArithOp, Formula, Rel, Term};
pub use sequent::Sequent;
pub use update::{apply_to_term, apply_update, parallel_compose, Update};
