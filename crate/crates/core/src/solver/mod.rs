//! Goal discharge: simplification, bounded enumeration and SMT-LIB export.

pub mod bounded;
pub mod simplify;
pub mod smt;

pub use bounded::{bounded_valid, symbol_sort, BoundedConfig, ClosureMethod, ClosureResult, ClosureStatus};
pub use simplify::{simplify, simplify_term};
pub use smt::emit_smt;
