//! Translation of typed expressions into terms and formulas.

use alloc::format;

use super::formula::{ArithOp, Formula, Rel, Term};
use crate::error::SyntaxError;
use crate::syntax::{infer_sorts, parse_formula_expr, BinOp, Expr, Signature, Sort, UnOp};

fn sort_of(e: &Expr, sig: &Signature) -> Sort {
    match e {
        Expr::Int(_) | Expr::Unary(UnOp::Neg, _) => Sort::Int,
        Expr::Bool(_) | Expr::Unary(UnOp::Not, _) => Sort::Bool,
        Expr::Var(v) => sig.sort_of(v),
        Expr::Binary(op, ..) => match op {
            BinOp::Add | BinOp::Sub | BinOp::Mul => Sort::Int,
            _ => Sort::Bool,
        },
    }
}

/// Integer expression as a term, or a boolean literal/variable as a term.
/// Returns `None` for compound boolean expressions, which have no term form.
pub fn expr_to_term(e: &Expr) -> Option<Term> {
    Some(match e {
        Expr::Int(v) => Term::Int(*v),
        Expr::Bool(b) => Term::Bool(*b),
        Expr::Var(v) => Term::Var(v.clone()),
        Expr::Unary(UnOp::Neg, a) => Term::arith(ArithOp::Sub, Term::Int(0), expr_to_term(a)?),
        Expr::Binary(op @ (BinOp::Add | BinOp::Sub | BinOp::Mul), l, r) => {
            let op = match op {
                BinOp::Add => ArithOp::Add,
                BinOp::Sub => ArithOp::Sub,
                _ => ArithOp::Mul,
            };
            Term::arith(op, expr_to_term(l)?, expr_to_term(r)?)
        }
        _ => return None,
    })
}

fn int_term(e: &Expr) -> Term {
    expr_to_term(e).expect("integer expression has a term form")
}

/// Boolean expression as a formula.
pub fn expr_to_formula(e: &Expr, sig: &Signature) -> Formula {
    match e {
        Expr::Bool(true) => Formula::True,
        Expr::Bool(false) => Formula::False,
        Expr::Var(v) => Formula::is_true(v),
        Expr::Unary(UnOp::Not, a) => Formula::not(expr_to_formula(a, sig)),
        Expr::Binary(op, l, r) => match op {
            BinOp::And => Formula::and(expr_to_formula(l, sig), expr_to_formula(r, sig)),
            BinOp::Or => Formula::or(expr_to_formula(l, sig), expr_to_formula(r, sig)),
            BinOp::Implies => Formula::imp(expr_to_formula(l, sig), expr_to_formula(r, sig)),
            BinOp::Lt => Formula::Atom(Rel::Lt, int_term(l), int_term(r)),
            BinOp::Le => Formula::Atom(Rel::Le, int_term(l), int_term(r)),
            BinOp::Gt => Formula::Atom(Rel::Lt, int_term(r), int_term(l)),
            BinOp::Ge => Formula::Atom(Rel::Le, int_term(r), int_term(l)),
            BinOp::Eq | BinOp::Ne => {
                let eq = if sort_of(l, sig) == Sort::Int {
                    Formula::eq(int_term(l), int_term(r))
                } else {
                    match (expr_to_term(l), expr_to_term(r)) {
                        (Some(a), Some(b)) => Formula::eq(a, b),
                        _ => {
                            let (a, b) = (expr_to_formula(l, sig), expr_to_formula(r, sig));
                            Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
                        }
                    }
                };
                if *op == BinOp::Eq {
                    eq
                } else {
                    Formula::not(eq)
                }
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul => unreachable!("integer expression in formula position"),
        },
        Expr::Int(_) | Expr::Unary(UnOp::Neg, _) => unreachable!("integer expression in formula position"),
    }
}

/// Parses and types a formula in surface syntax against `sig` (unknown names default to int).
pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    let e = parse_formula_expr(src)?;
    let sig = infer_sorts(&[], &[&e], sig)
        .map_err(|err| SyntaxError::Type(format!("in formula `{src}`: {err}")))?;
    Ok(expr_to_formula(&e, &sig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn relations_normalise_to_eq_lt_le() {
        let sig = Signature::new();
        let f = parse_formula("a > b && c >= 1 -> d != 2", &sig).unwrap();
        assert_eq!(f.to_string(), "b < a && 1 <= c -> !(d == 2)");
        assert_eq!(parse_formula(&f.to_string(), &sig).unwrap(), f);
    }

    #[test]
    fn bare_boolean_variable_is_equality_with_true() {
        let f = parse_formula("b && x == false", &Signature::new()).unwrap();
        assert_eq!(f, Formula::and(Formula::is_true("b"), Formula::is_false("x")));
        assert_eq!(f.to_string(), "b == true && x == false");
    }

    #[test]
    fn ill_typed_formula_is_rejected() {
        assert!(matches!(parse_formula("i + 1", &Signature::new()), Err(SyntaxError::Type(_))));
        assert!(matches!(parse_formula("i <", &Signature::new()), Err(SyntaxError::Parse { .. })));
    }
}
