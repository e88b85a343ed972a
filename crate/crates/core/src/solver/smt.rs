use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::bounded::symbol_sort;
use crate::dl::{ArithOp, Formula, Rel, Sequent, Term};
use crate::syntax::{Signature, Sort};

fn sym(name: &str) -> String {
    format!("|{name}|")
}

fn term(t: &Term) -> String {
    match t {
        Term::Int(v) if *v < 0 => format!("(- {})", v.unsigned_abs()),
        Term::Int(v) => format!("{v}"),
        Term::Bool(b) => format!("{b}"),
        Term::Var(v) | Term::Fresh(v) => sym(v),
        Term::Arith(op, l, r) => {
            let op = match op {
                ArithOp::Add => "+",
                ArithOp::Sub => "-",
                ArithOp::Mul => "*",
            };
            format!("({op} {} {})", term(l), term(r))
        }
    }
}

fn formula(f: &Formula) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(rel, l, r) => {
            let rel = match rel {
                Rel::Eq => "=",
                Rel::Lt => "<",
                Rel::Le => "<=",
            };
            format!("({rel} {} {})", term(l), term(r))
        }
        Formula::Not(a) => format!("(not {})", formula(a)),
        Formula::And(a, b) => format!("(and {} {})", formula(a), formula(b)),
        Formula::Or(a, b) => format!("(or {} {})", formula(a), formula(b)),
        Formula::Imp(a, b) => format!("(=> {} {})", formula(a), formula(b)),
        Formula::Box(..) | Formula::Upd(..) => unreachable!("modality in SMT export"),
    }
}

/// SMT-LIB 2 script asserting the negation of `seq`: `unsat` means the
/// sequent is valid. `None` if a modality or pending update remains.
pub fn emit_smt(seq: &Sequent, sig: &Signature) -> Option<String> {
    let plain = |f: &Formula| !f.has_modality() && !matches!(f, Formula::Upd(..));
    if !seq.antecedent.iter().chain(&seq.succedent).all(plain) {
        return None;
    }
    let f = seq.as_formula();
    let mut syms = BTreeSet::new();
    f.symbols_into(&mut syms);
    let mut out = String::from("(set-logic ALL)\n");
    for s in &syms {
        let sort = match symbol_sort(s, sig) {
            Sort::Int => "Int",
            Sort::Bool => "Bool",
        };
        let _ = writeln!(out, "(declare-const {} {sort})", sym(s));
    }
    for a in &seq.antecedent {
        let _ = writeln!(out, "(assert {})", formula(a));
    }
    for s in &seq.succedent {
        let _ = writeln!(out, "(assert (not {}))", formula(s));
    }
    out.push_str("(check-sat)\n");
    Some(out)
}
