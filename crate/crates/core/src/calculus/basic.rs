//! Symbolic execution of straight-line statements, conditionals and abrupt
//! completion.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::names::*;
use super::{focus_and_decompose, program_premise, single, Decomposition, Focus, FrameKind, Goal, RuleApplication, RuleContext};
use crate::dl::{apply_update, expr_to_formula, expr_to_term, Formula, Term, Update};
use crate::error::RuleError;
use crate::solver::simplify;
use crate::syntax::{BinOp, Expr, Ident, Sort, Stmt, UpdateExpr};

/// `U` followed by `target := value`, with overridden elements dropped.
fn assign_update(u: &Update, target: &Ident, value: Term) -> Update {
    u.then(&Update::elem(target.clone(), value)).normalized()
}

fn with_rest(first: Vec<Stmt>, rest: &[Stmt]) -> Vec<Stmt> {
    let mut v = first;
    v.extend(rest.iter().cloned());
    v
}

/// Applies the basic symbolic-execution rule matching the active statement.
/// Loops, empty loop scopes and unlabeled `break`/`continue` directly inside
/// a loop scope are left to the loop rules.
pub fn apply_basic_se(ctx: &mut RuleContext, goal: &Goal) -> Result<RuleApplication, RuleError> {
    let (f, d) = focus_and_decompose(goal, "basicSE")?;
    let u = &f.update;
    let step = |rule, update: Update, seq: Vec<Stmt>| {
        Ok(single(rule, goal, program_premise(goal, rule, &f, update, d.rebuild(seq))))
    };
    match &d.active {
        Stmt::Skip => step(SKIP, u.clone(), d.rest.clone()),
        Stmt::Assign(t, e) | Stmt::VarDecl(_, t, e) => {
            let rule = if matches!(d.active, Stmt::Assign(..)) { ASSIGN } else { VAR_DECL };
            match term_of(ctx, t, e) {
                Some(v) => step(rule, assign_update(u, t, v), d.rest.clone()),
                None => {
                    // compound boolean right-hand side: branch on it
                    let set = |b| Box::new(Stmt::Assign(t.clone(), Expr::Bool(b)));
                    let mut seq = Vec::new();
                    if let Stmt::VarDecl(s, ..) = d.active {
                        seq.push(Stmt::VarDecl(s, t.clone(), Expr::Bool(false)));
                        seq.push(Stmt::If(e.clone(), set(true), None));
                    } else {
                        seq.push(Stmt::If(e.clone(), set(true), Some(set(false))));
                    }
                    step(BOOLEAN_ASSIGN, u.clone(), with_rest(seq, &d.rest))
                }
            }
        }
        Stmt::ExprStmt(ue) => {
            let (t, e) = match ue {
                UpdateExpr::Assign(t, e) => (t, e.clone()),
                UpdateExpr::Incr(t) => (t, Expr::bin(BinOp::Add, Expr::var(t), Expr::Int(1))),
                UpdateExpr::Decr(t) => (t, Expr::bin(BinOp::Sub, Expr::var(t), Expr::Int(1))),
            };
            match term_of(ctx, t, &e) {
                Some(v) => step(EXPR_STMT, assign_update(u, t, v), d.rest.clone()),
                None => step(EXPR_STMT, u.clone(), with_rest(vec![Stmt::Assign(t.clone(), e)], &d.rest)),
            }
        }
        Stmt::If(c, t, e) => {
            let cond = simplify(&apply_update(u, &expr_to_formula(c, &ctx.sig)));
            let then_seq = with_rest(vec![(**t).clone()], &d.rest);
            let else_seq = with_rest(e.iter().map(|e| (**e).clone()).collect(), &d.rest);
            match cond {
                Formula::True => step(IF_THEN_ELSE, u.clone(), then_seq),
                Formula::False => step(IF_THEN_ELSE, u.clone(), else_seq),
                cond => {
                    let mut p1 = program_premise(goal, IF_THEN_ELSE, &f, u.clone(), d.rebuild(then_seq));
                    p1.sequent.antecedent.push(cond.clone());
                    let mut p2 = program_premise(goal, IF_THEN_ELSE, &f, u.clone(), d.rebuild(else_seq));
                    p2.sequent.antecedent.push(simplify(&Formula::not(cond)));
                    Ok(RuleApplication { rule: IF_THEN_ELSE, conclusion: goal.clone(), premises: vec![p1, p2] })
                }
            }
        }
        Stmt::Block(b) if b.is_empty() => step(DISSOLVE_BLOCK, u.clone(), d.rest.clone()),
        Stmt::Labeled(_, b) if **b == Stmt::Block(Vec::new()) => {
            step(DISSOLVE_LABELED, u.clone(), d.rest.clone())
        }
        Stmt::TryCatch(t, ..) if t.is_empty() => step(DISSOLVE_TRY, u.clone(), d.rest.clone()),
        Stmt::Break(_) | Stmt::Continue(_) | Stmt::Throw(_) => abrupt(goal, &f, &d),
        other => Err(RuleError::not_applicable("basicSE", format!("active statement `{}`", crate::syntax::ProgramDisplay(core::slice::from_ref(other))))),
    }
}

/// The value assigned to `target`, if it has a term form.
fn term_of(ctx: &RuleContext, target: &Ident, e: &Expr) -> Option<Term> {
    match ctx.sig.sort_of(target) {
        Sort::Int => expr_to_term(e),
        Sort::Bool => match e {
            Expr::Bool(_) | Expr::Var(_) => expr_to_term(e),
            _ => None,
        },
    }
}

fn abrupt(goal: &Goal, f: &Focus, d: &Decomposition) -> Result<RuleApplication, RuleError> {
    let s = d.active.clone();
    let u = &f.update;
    let block_rule = match s {
        Stmt::Break(_) => BLOCK_BREAK,
        Stmt::Continue(_) => BLOCK_CONTINUE,
        _ => BLOCK_THROW,
    };
    let inner = d.innermost();
    if matches!(s, Stmt::Break(None) | Stmt::Continue(None))
        && matches!(inner.map(|fr| &fr.kind), Some(FrameKind::LoopScope(_)))
    {
        return Err(RuleError::not_applicable("basicSE", "loop-scope rule applies"));
    }
    let step = |rule, program| Ok(single(rule, goal, program_premise(goal, rule, f, u.clone(), program)));
    if !d.rest.is_empty() {
        return step(block_rule, d.rebuild(vec![s]));
    }
    let Some(frame) = inner else {
        return match s {
            Stmt::Throw(_) => Ok(RuleApplication { rule: THROW_UNCAUGHT, conclusion: goal.clone(), premises: vec![] }),
            other => Err(RuleError::IllFormed(format!(
                "`{}` outside any loop",
                crate::syntax::ProgramDisplay(core::slice::from_ref(&other))
            ))),
        };
    };
    match (&frame.kind, &s) {
        (FrameKind::Block, _) => step(block_rule, d.rebuild_outside(vec![s])),
        (FrameKind::Labeled { labels, .. }, Stmt::Break(Some(l))) if labels.contains(l) => {
            step(LABELED_BREAK, d.rebuild_outside(vec![]))
        }
        (FrameKind::Labeled { labels, .. }, Stmt::Continue(Some(l))) if labels.contains(l) => {
            step(LABELED_CONTINUE, d.rebuild_outside(vec![Stmt::Continue(None)]))
        }
        (FrameKind::Labeled { .. }, _) => step(LABELED_PROPAGATE, d.rebuild_outside(vec![s])),
        (FrameKind::Try { var, catch }, Stmt::Throw(e)) => {
            // the thrown value is bound by the update: `e` may mention try-local names
            let value = expr_to_term(e)
                .ok_or_else(|| RuleError::IllFormed(format!("thrown value `{e}` is not an integer")))?;
            let program = d.rebuild_outside(vec![Stmt::Block(catch.clone())]);
            let premise = program_premise(goal, TRY_CATCH, f, assign_update(u, var, value), program);
            Ok(single(TRY_CATCH, goal, premise))
        }
        (FrameKind::Try { .. }, _) => step(TRY_PROPAGATE, d.rebuild_outside(vec![s])),
        (FrameKind::LoopScope(_), _) => step(LOOP_SCOPE_PROPAGATE, d.rebuild_outside(vec![s])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::{parse_formula, Sequent};
    use crate::syntax::{infer_sorts, parse_program, Signature};
    use alloc::string::ToString;

    fn goal(update: Update, src: &str, post: &str) -> (RuleContext, Goal) {
        let p = parse_program(src).unwrap();
        let sig = infer_sorts(&p, &[], &Signature::new()).unwrap();
        let post = parse_formula(post, &sig).unwrap();
        let seq = Sequent::new(vec![], vec![Focus::formula(update, p, post)]);
        (RuleContext::for_sequent(&seq, sig.clone()), Goal::new(seq))
    }

    fn step(src: &str) -> RuleApplication {
        let (mut ctx, g) = goal(Update::empty(), src, "true");
        apply_basic_se(&mut ctx, &g).unwrap()
    }

    fn shown(app: &RuleApplication) -> Vec<alloc::string::String> {
        app.premises.iter().map(|p| p.sequent.to_string()).collect()
    }

    #[test]
    fn assignment_extends_update() {
        let app = step("i = 3; j = i;");
        assert_eq!(app.rule, ASSIGN);
        assert_eq!(shown(&app), ["==> {i := 3}[j = i;](true)"]);
        let app = step("i++;");
        assert_eq!(shown(&app), ["==> {i := i + 1}[](true)"]);
        let app = step("boolean b = i < 2;");
        assert_eq!(app.rule, BOOLEAN_ASSIGN);
        assert_eq!(shown(&app), ["==> [boolean b = false; if (i < 2) b = true;](true)"]);
    }

    #[test]
    fn conditional_splits() {
        let app = step("if (b) i = 1; else i = 2;");
        assert_eq!(shown(&app), ["b == true ==> [i = 1;](true)", "!(b == true) ==> [i = 2;](true)"]);
        let (mut ctx, g) = goal(Update::elem("b", Term::Bool(false)), "if (b) { i = 1; }", "true");
        let app = apply_basic_se(&mut ctx, &g).unwrap();
        assert_eq!(shown(&app), ["==> {b := false}[](true)"]);
    }

    #[test]
    fn abrupt_completion() {
        assert_eq!(shown(&step("l1: { continue l1; i = 1; } j = 2;")), ["==> [l1: { continue l1; } j = 2;](true)"]);
        assert_eq!(shown(&step("l1: { continue l1; } j = 2;")), ["==> [continue; j = 2;](true)"]);
        assert_eq!(shown(&step("l1: { break l1; } j = 2;")), ["==> [j = 2;](true)"]);
        assert_eq!(shown(&step("try { throw 3; } catch (e) { i = e; }")), ["==> {e := 3}[{ i = e; }](true)"]);
        let app = step("throw 1;");
        assert_eq!(app.rule, THROW_UNCAUGHT);
        assert!(app.premises.is_empty());
        let (mut ctx, g) = goal(Update::empty(), "loop-scope(x) { continue; }", "true");
        assert!(matches!(apply_basic_se(&mut ctx, &g), Err(RuleError::NotApplicable { .. })));
    }
}
