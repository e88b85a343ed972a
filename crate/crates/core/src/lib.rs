//! Loop-scope verification for a small imperative language.
//!
//! The crate is `no_std` (with `alloc`): it contains the syntax, the
//! dynamic-logic layer, the sequent calculus with its loop-scope rules, the
//! reference interpreter and the bounded goal checker. File handling and the
//! command line live in the `loopscope` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod annotated;
pub mod calculus;
pub mod dl;
pub mod error;
pub mod fuzz;
pub mod gen;
pub mod interp;
pub mod prover;
pub mod semantics;
pub mod solver;
pub mod syntax;
