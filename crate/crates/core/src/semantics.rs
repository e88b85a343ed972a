//! Concrete meaning of formulas: evaluation under a valuation, with box
//! modalities evaluated by running the reference interpreter.

use alloc::collections::BTreeMap;

use crate::dl::{Formula, Rel, Term};
use crate::interp::{run_owned, ConcreteState, Outcome, Value};
use crate::syntax::Ident;

/// Values for program variables and fresh constants.
pub type Valuation = BTreeMap<Ident, Value>;

pub fn eval_term(t: &Term, val: &Valuation) -> Option<Value> {
    Some(match t {
        Term::Int(v) => Value::Int(*v),
        Term::Bool(b) => Value::Bool(*b),
        Term::Var(v) | Term::Fresh(v) => *val.get(v)?,
        Term::Arith(op, l, r) => match (eval_term(l, val)?, eval_term(r, val)?) {
            (Value::Int(a), Value::Int(b)) => Value::Int(op.eval(a, b)),
            _ => return None,
        },
    })
}

fn state_of(val: &Valuation) -> ConcreteState {
    ConcreteState::from_globals(val.iter().filter(|(k, _)| !k.contains('#')).map(|(k, v)| (k.clone(), *v)).collect())
}

/// Truth value of `f`; `None` when a symbol is unbound, sorts clash, or a box
/// program runs out of fuel.
///
/// Box modalities have partial-correctness meaning: only normal termination
/// constrains the postcondition.
pub fn eval_formula(f: &Formula, val: &Valuation, fuel: u64) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Atom(rel, l, r) => {
            let (a, b) = (eval_term(l, val)?, eval_term(r, val)?);
            match (rel, a, b) {
                (Rel::Eq, a, b) if a.sort() == b.sort() => Some(a == b),
                (Rel::Lt, Value::Int(a), Value::Int(b)) => Some(a < b),
                (Rel::Le, Value::Int(a), Value::Int(b)) => Some(a <= b),
                _ => None,
            }
        }
        Formula::Not(a) => eval_formula(a, val, fuel).map(|b| !b),
        Formula::And(a, b) => match (eval_formula(a, val, fuel), eval_formula(b, val, fuel)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Formula::Or(a, b) => match (eval_formula(a, val, fuel), eval_formula(b, val, fuel)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        Formula::Imp(a, b) => match (eval_formula(a, val, fuel), eval_formula(b, val, fuel)) {
            (Some(false), _) | (_, Some(true)) => Some(true),
            (Some(true), Some(false)) => Some(false),
            _ => None,
        },
        Formula::Upd(u, inner) => {
            let mut next = val.clone();
            for (v, t) in u.elems() {
                next.insert(v.clone(), eval_term(t, val)?);
            }
            eval_formula(inner, &next, fuel)
        }
        Formula::Box(prog, post) => match run_owned(prog, state_of(val), fuel).ok()? {
            Outcome::Normal(end) => {
                // globals survive a run, so only the fresh constants need carrying over
                let mut next = end.into_globals();
                next.extend(val.iter().filter(|(k, _)| k.contains('#')).map(|(k, v)| (k.clone(), *v)));
                eval_formula(post, &next, fuel)
            }
            Outcome::FuelExhausted => None,
            _ => Some(true),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxVerdict {
    Holds,
    Fails,
    Unknown,
}

/// Decides `f` (typically `[p]post`) in the state `init` by running the program.
pub fn check_box_semantics(f: &Formula, init: &ConcreteState, fuel: u64) -> BoxVerdict {
    let val: Valuation = init.globals().clone();
    match eval_formula(f, &val, fuel) {
        Some(true) => BoxVerdict::Holds,
        Some(false) => BoxVerdict::Fails,
        None => BoxVerdict::Unknown,
    }
}

/// Truth of a sequent: some antecedent formula false or some succedent formula true.
pub fn eval_sequent(s: &crate::dl::Sequent, val: &Valuation, fuel: u64) -> Option<bool> {
    let mut unknown = false;
    for f in &s.antecedent {
        match eval_formula(f, val, fuel) {
            Some(false) => return Some(true),
            Some(true) => {}
            None => unknown = true,
        }
    }
    for f in &s.succedent {
        match eval_formula(f, val, fuel) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}
