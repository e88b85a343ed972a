//! Validity-preserving rewriting of formulas to a fixpoint.

use alloc::boxed::Box;

use crate::dl::{apply_update, ArithOp, Formula, Rel, Term};

fn split_const(t: &Term) -> (Option<Term>, i64) {
    match t {
        Term::Int(c) => (None, *c),
        Term::Arith(ArithOp::Add, a, c) => match **c {
            Term::Int(c) => ((**a).clone().into(), c),
            _ => (Some(t.clone()), 0),
        },
        Term::Arith(ArithOp::Sub, a, c) => match **c {
            Term::Int(c) => ((**a).clone().into(), c.wrapping_neg()),
            _ => (Some(t.clone()), 0),
        },
        _ => (Some(t.clone()), 0),
    }
}

fn with_offset(base: Option<Term>, c: i64) -> Term {
    match base {
        None => Term::Int(c),
        Some(b) if c == 0 => b,
        Some(b) if c < 0 && c != i64::MIN => Term::arith(ArithOp::Sub, b, Term::Int(-c)),
        Some(b) => Term::arith(ArithOp::Add, b, Term::Int(c)),
    }
}

pub fn simplify_term(t: &Term) -> Term {
    let Term::Arith(op, l, r) = t else {
        return t.clone();
    };
    let (l, r) = (simplify_term(l), simplify_term(r));
    match (op, &l, &r) {
        (_, Term::Int(a), Term::Int(b)) => Term::Int(op.eval(*a, *b)),
        (ArithOp::Add, Term::Int(0), x) | (ArithOp::Add | ArithOp::Sub, x, Term::Int(0)) => x.clone(),
        (ArithOp::Mul, Term::Int(1), x) | (ArithOp::Mul, x, Term::Int(1)) => x.clone(),
        (ArithOp::Mul, Term::Int(0), _) | (ArithOp::Mul, _, Term::Int(0)) => Term::Int(0),
        (ArithOp::Add, _, Term::Int(d)) => {
            let (base, c) = split_const(&l);
            with_offset(base, c.wrapping_add(*d))
        }
        (ArithOp::Sub, _, Term::Int(d)) => {
            let (base, c) = split_const(&l);
            with_offset(base, c.wrapping_sub(*d))
        }
        (ArithOp::Sub, x, y) if x == y => Term::Int(0),
        _ => Term::arith(*op, l, r),
    }
}

fn atom(rel: Rel, l: &Term, r: &Term) -> Formula {
    let (l, r) = (simplify_term(l), simplify_term(r));
    if l == r {
        return if rel == Rel::Lt { Formula::False } else { Formula::True };
    }
    match (rel, &l, &r) {
        (Rel::Eq, Term::Int(a), Term::Int(b)) => bool_formula(a == b),
        (Rel::Eq, Term::Bool(a), Term::Bool(b)) => bool_formula(a == b),
        (Rel::Lt, Term::Int(a), Term::Int(b)) => bool_formula(a < b),
        (Rel::Le, Term::Int(a), Term::Int(b)) => bool_formula(a <= b),
        _ => Formula::Atom(rel, l, r),
    }
}

fn bool_formula(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

fn step(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(rel, l, r) => atom(*rel, l, r),
        Formula::Not(a) => match step(a) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            a => Formula::Not(Box::new(a)),
        },
        Formula::And(a, b) => match (step(a), step(b)) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, x) | (x, Formula::True) => x,
            (x, y) if x == y => x,
            (x, y) => Formula::and(x, y),
        },
        Formula::Or(a, b) => match (step(a), step(b)) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, x) | (x, Formula::False) => x,
            (x, y) if x == y => x,
            (x, y) => Formula::or(x, y),
        },
        Formula::Imp(a, b) => match (step(a), step(b)) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, x) => x,
            (x, Formula::False) => Formula::not(x),
            (x, y) if x == y => Formula::True,
            (x, y) => Formula::imp(x, y),
        },
        Formula::Box(p, post) if p.is_empty() => step(post),
        Formula::Box(p, post) => Formula::Box(p.clone(), Box::new(step(post))),
        Formula::Upd(u, inner) => match **inner {
            Formula::Box(ref p, ref post) if p.is_empty() => step(&apply_update(u, post)),
            Formula::Box(ref p, ref post) => {
                Formula::Upd(u.clone(), Box::new(Formula::Box(p.clone(), Box::new(step(post)))))
            }
            _ => step(&apply_update(u, inner)),
        },
    }
}

/// Applies update application, constant folding and the unit laws of the
/// connectives until nothing changes. Pending updates in front of non-empty
/// boxes stay; an empty box `[]post` is `post`.
pub fn simplify(f: &Formula) -> Formula {
    let mut cur = f.clone();
    for _ in 0..64 {
        let next = step(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::{parse_formula, Update};
    use crate::syntax::{Signature, Sort};
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn conditional_postcondition_collapses_to_invariant() {
        let mut sig = Signature::new();
        sig.insert("x", Sort::Bool);
        sig.insert("b", Sort::Bool);
        let post = parse_formula("(x == true -> i == 1) && (x == false -> i >= 0)", &sig).unwrap();
        let u = Update::from_elems(vec![("b".into(), Term::Bool(false)), ("x".into(), Term::Bool(false))]);
        let out = simplify(&Formula::upd(u, post));
        assert_eq!(out.to_string(), "0 <= i");
    }

    #[test]
    fn unit_laws_and_folding() {
        let f = Formula::imp(Formula::eq(Term::Bool(false), Term::Bool(true)), Formula::is_true("p"));
        assert_eq!(simplify(&f), Formula::True);
        let t = Term::arith(
            ArithOp::Add,
            Term::arith(ArithOp::Add, Term::var("i"), Term::Int(1)),
            Term::Int(1),
        );
        assert_eq!(simplify_term(&t).to_string(), "i + 2");
        let t = Term::arith(ArithOp::Sub, Term::var("i"), Term::Int(3));
        assert_eq!(simplify_term(&Term::arith(ArithOp::Add, t, Term::Int(1))).to_string(), "i - 2");
        let clash = Update::from_elems(vec![("i".into(), Term::Int(3)), ("i".into(), Term::Int(5))]);
        assert_eq!(simplify(&Formula::upd(clash, Formula::eq(Term::var("i"), Term::Int(5)))), Formula::True);
    }
}
