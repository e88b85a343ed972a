//! Loop-scope rules, initializer pull-out, invariant and unwinding rules.

use alloc::vec;
use alloc::vec::Vec;

use super::names::*;
use super::{focus_and_decompose, program_premise, single, Decomposition, Fault, Focus, FrameKind, Goal, RuleApplication, RuleContext};
use crate::analysis::{anonymizing_update, assigned_vars, guard_or_true, init_to_stmts, update_list_to_stmts};
use crate::dl::{expr_to_formula, parallel_compose, Formula, Term, Update};
use crate::error::RuleError;
use crate::syntax::{Expr, ForInit, Ident, Sort, Stmt};

fn in_loop_scope(d: &Decomposition) -> Option<&Ident> {
    match d.innermost().map(|fr| &fr.kind) {
        Some(FrameKind::LoopScope(x)) => Some(x),
        _ => None,
    }
}

pub fn empty_indexed_loop_scope(_: &mut RuleContext, goal: &Goal) -> Result<RuleApplication, RuleError> {
    let rule = EMPTY_INDEXED_LOOP_SCOPE;
    let (f, d) = focus_and_decompose(goal, rule)?;
    let Stmt::LoopScope(x, body) = &d.active else {
        return Err(RuleError::not_applicable(rule, "active statement is not a loop scope"));
    };
    debug_assert!(body.is_empty());
    let resume = Formula::modality(d.rebuild(d.rest.clone()), f.post.clone());
    let branches = Formula::and(
        Formula::imp(Formula::is_true(x), resume),
        Formula::imp(Formula::is_false(x), f.post.clone()),
    );
    let seq = f.replace(&goal.sequent, Formula::upd(f.update.clone(), branches));
    Ok(single(rule, goal, goal.derive(rule, seq)))
}

pub fn continue_indexed_loop_scope(_: &mut RuleContext, goal: &Goal) -> Result<RuleApplication, RuleError> {
    let rule = CONTINUE_INDEXED_LOOP_SCOPE;
    let (f, d) = focus_and_decompose(goal, rule)?;
    let x = match (&d.active, in_loop_scope(&d)) {
        (Stmt::Continue(None), Some(x)) => x.clone(),
        _ => return Err(RuleError::not_applicable(rule, "no `continue` directly inside a loop scope")),
    };
    let mut seq = vec![Stmt::Assign(x, Expr::Bool(false))];
    seq.extend(d.rest.iter().cloned());
    Ok(single(rule, goal, program_premise(goal, rule, &f, f.update.clone(), d.rebuild(seq))))
}

pub fn break_indexed_loop_scope(_: &mut RuleContext, goal: &Goal) -> Result<RuleApplication, RuleError> {
    let rule = BREAK_INDEXED_LOOP_SCOPE;
    let (f, d) = focus_and_decompose(goal, rule)?;
    if !matches!((&d.active, in_loop_scope(&d)), (Stmt::Break(None), Some(_))) {
        return Err(RuleError::not_applicable(rule, "no `break` directly inside a loop scope"));
    }
    Ok(single(rule, goal, program_premise(goal, rule, &f, f.update.clone(), d.rebuild_outside(vec![]))))
}

/// The active loop split into labels and loop, with the full active statement.
fn active_loop<'a>(d: &'a Decomposition, rule: &'static str) -> Result<(Vec<Ident>, &'a Stmt), RuleError> {
    d.active
        .as_labeled_loop()
        .map(|(ls, l)| (ls.to_vec(), l))
        .ok_or_else(|| RuleError::not_applicable(rule, "active statement is not a loop"))
}

struct ForParts<'a> {
    guard: Expr,
    update: Vec<Stmt>,
    body: &'a Stmt,
}

fn for_parts<'a>(lp: &'a Stmt, rule: &'static str) -> Result<ForParts<'a>, RuleError> {
    match lp {
        Stmt::For { init: ForInit::Empty, guard, update, body } => Ok(ForParts {
            guard: guard_or_true(guard.as_ref()),
            update: update_list_to_stmts(update),
            body,
        }),
        Stmt::For { .. } => Err(RuleError::not_applicable(rule, "loop has an initializer; pull it out first")),
        _ => Err(RuleError::not_applicable(rule, "active statement is not a for loop")),
    }
}

fn while_parts<'a>(lp: &'a Stmt, rule: &'static str) -> Result<(&'a Expr, &'a Stmt), RuleError> {
    match lp {
        Stmt::While(c, body) => Ok((c, body)),
        _ => Err(RuleError::not_applicable(rule, "active statement is not a while loop")),
    }
}

pub fn pull_out_loop_initializer(_: &mut RuleContext, goal: &Goal) -> Result<RuleApplication, RuleError> {
    let rule = PULL_OUT_LOOP_INITIALIZER;
    let (f, d) = focus_and_decompose(goal, rule)?;
    let (ls, lp) = active_loop(&d, rule)?;
    let Stmt::For { init, guard, update, body } = lp else {
        return Err(RuleError::not_applicable(rule, "active statement is not a for loop"));
    };
    if init.is_empty() {
        return Err(RuleError::not_applicable(rule, "loop has no initializer"));
    }
    let bare = Stmt::For { init: ForInit::Empty, guard: guard.clone(), update: update.clone(), body: body.clone() };
    let mut block = init_to_stmts(init);
    block.push(Stmt::labeled(ls, bare));
    let mut seq = vec![Stmt::Block(block)];
    seq.extend(d.rest.iter().cloned());
    Ok(single(rule, goal, program_premise(goal, rule, &f, f.update.clone(), d.rebuild(seq))))
}

fn fresh_flag(ctx: &mut RuleContext, base: &str) -> Ident {
    let x = ctx.pool.fresh_var(base);
    ctx.sig.insert(x.clone(), Sort::Bool);
    x
}

fn set(x: &Ident, b: bool) -> Stmt {
    Stmt::Assign(x.clone(), Expr::Bool(b))
}

/// `if (guard) l1: ... ln: { p x = false; }`
fn guarded_body(guard: &Expr, labels: &[Ident], body: &Stmt, x: &Ident) -> Stmt {
    let mut stmts = match body {
        Stmt::Block(b) => b.clone(),
        other => vec![other.clone()],
    };
    stmts.push(set(x, false));
    Stmt::if_then(guard.clone(), Stmt::labeled(labels.to_vec(), Stmt::Block(stmts)))
}

fn not_var(x: &Ident) -> Expr {
    Expr::not(Expr::var(x))
}

/// Premises shared by both invariant rules; `scope` is the loop scope that
/// replaces the loop and `extra_assigned` adds to the havocked variables.
#[allow(clippy::too_many_arguments)]
fn invariant_premises(
    ctx: &mut RuleContext,
    goal: &Goal,
    rule: &'static str,
    f: &Focus,
    d: &Decomposition,
    x: &Ident,
    scope: Stmt,
    extra_assigned: &[Stmt],
    inv: &Formula,
) -> RuleApplication {
    let initially = goal.derive(rule, f.replace(&goal.sequent, Formula::upd(f.update.clone(), inv.clone())));
    let mut vars = assigned_vars(&d.active);
    for s in extra_assigned {
        vars.extend(assigned_vars(s));
    }
    let anon = anonymizing_update(&f.update, &vars, &mut ctx.pool);
    let entry = parallel_compose(&anon, &Update::elem(x.clone(), Term::Bool(true)));
    let post = Formula::and(
        Formula::imp(Formula::is_true(x), f.post.clone()),
        Formula::imp(Formula::is_false(x), inv.clone()),
    );
    let mut seq = vec![scope];
    seq.extend(d.rest.iter().cloned());
    let body = Focus::formula(entry, d.rebuild(seq), post);
    let mut preserved = f.replace(&goal.sequent, body);
    preserved.antecedent.push(Formula::upd(anon, inv.clone()));
    let preserved = goal.derive(rule, preserved);
    RuleApplication { rule, conclusion: goal.clone(), premises: vec![initially, preserved] }
}

pub fn loop_invariant_while(ctx: &mut RuleContext, goal: &Goal, inv: &Formula) -> Result<RuleApplication, RuleError> {
    let rule = LOOP_INVARIANT_WHILE;
    let (f, d) = focus_and_decompose(goal, rule)?;
    let (ls, lp) = active_loop(&d, rule)?;
    let (c, body) = while_parts(lp, rule)?;
    let x = fresh_flag(ctx, "x");
    let scope = Stmt::LoopScope(x.clone(), vec![guarded_body(c, &ls, body, &x)]);
    Ok(invariant_premises(ctx, goal, rule, &f, &d, &x, scope, &[], inv))
}

pub fn loop_invariant_for(ctx: &mut RuleContext, goal: &Goal, inv: &Formula) -> Result<RuleApplication, RuleError> {
    loop_invariant_for_with_update(ctx, goal, inv, None)
}

/// `loopInvariantFor` with `upd'` replaced by `update` when given; lets tests
/// use update lists that the surface language cannot express, such as one
/// that throws.
pub fn loop_invariant_for_with_update(
    ctx: &mut RuleContext,
    goal: &Goal,
    inv: &Formula,
    update: Option<Vec<Stmt>>,
) -> Result<RuleApplication, RuleError> {
    let rule = LOOP_INVARIANT_FOR;
    let (f, d) = focus_and_decompose(goal, rule)?;
    let (ls, lp) = active_loop(&d, rule)?;
    let parts = for_parts(lp, rule)?;
    let upd = update.unwrap_or(parts.update);
    let x = fresh_flag(ctx, "x");
    let wrapped = if ctx.options.fault == Some(Fault::DropInvariantForWrapper) {
        upd.clone()
    } else {
        let mut w = vec![set(&x, true)];
        w.extend(upd.iter().cloned());
        w.push(set(&x, false));
        w
    };
    let scope = Stmt::LoopScope(
        x.clone(),
        vec![guarded_body(&parts.guard, &ls, parts.body, &x), Stmt::if_then(not_var(&x), Stmt::Block(wrapped))],
    );
    Ok(invariant_premises(ctx, goal, rule, &f, &d, &x, scope, &upd, inv))
}

#[allow(clippy::too_many_arguments)]
fn unwind_premise(
    goal: &Goal,
    rule: &'static str,
    f: &Focus,
    d: &Decomposition,
    x: Ident,
    iteration: Stmt,
    continuation: Vec<Stmt>,
    cont: Ident,
) -> RuleApplication {
    let scope = Stmt::LoopScope(x.clone(), vec![iteration, Stmt::if_then(not_var(&x), Stmt::Block(continuation))]);
    let mut seq = vec![scope, Stmt::if_then(Expr::var(&cont), d.active.clone())];
    seq.extend(d.rest.iter().cloned());
    let flags = Update::from_elems(vec![(x, Term::Bool(true)), (cont, Term::Bool(false))]);
    let update = parallel_compose(&f.update, &flags);
    single(rule, goal, program_premise(goal, rule, f, update, d.rebuild(seq)))
}

pub fn unwind_while_loop(ctx: &mut RuleContext, goal: &Goal) -> Result<RuleApplication, RuleError> {
    let rule = UNWIND_WHILE_LOOP;
    let (f, d) = focus_and_decompose(goal, rule)?;
    let (ls, lp) = active_loop(&d, rule)?;
    let (c, body) = while_parts(lp, rule)?;
    let x = fresh_flag(ctx, "x");
    let cont = fresh_flag(ctx, "cont");
    let iteration = guarded_body(c, &ls, body, &x);
    let continuation = vec![set(&x, true), set(&cont, true)];
    Ok(unwind_premise(goal, rule, &f, &d, x, iteration, continuation, cont))
}

pub fn unwind_for_loop(ctx: &mut RuleContext, goal: &Goal) -> Result<RuleApplication, RuleError> {
    unwind_for_loop_with_update(ctx, goal, None)
}

/// `unwindForLoop` with `upd'` replaced by `update` when given.
pub fn unwind_for_loop_with_update(
    ctx: &mut RuleContext,
    goal: &Goal,
    update: Option<Vec<Stmt>>,
) -> Result<RuleApplication, RuleError> {
    let rule = UNWIND_FOR_LOOP;
    let (f, d) = focus_and_decompose(goal, rule)?;
    let (ls, lp) = active_loop(&d, rule)?;
    let parts = for_parts(lp, rule)?;
    let upd = update.unwrap_or(parts.update);
    let x = fresh_flag(ctx, "x");
    let cont = fresh_flag(ctx, "cont");
    let iteration = guarded_body(&parts.guard, &ls, parts.body, &x);
    let mut continuation = vec![set(&x, true)];
    if ctx.options.fault == Some(Fault::SwapUnwindForUpdateAndCont) {
        continuation.push(set(&cont, true));
        continuation.extend(upd);
    } else {
        continuation.extend(upd);
        continuation.push(set(&cont, true));
    }
    Ok(unwind_premise(goal, rule, &f, &d, x, iteration, continuation, cont))
}

/// Ends unwinding: the loop must not run again. The first premise demands
/// that the guard is false; the second continues after the loop under that
/// assumption.
pub fn unwind_bound_check(ctx: &mut RuleContext, goal: &Goal) -> Result<RuleApplication, RuleError> {
    let rule = UNWIND_BOUND_CHECK;
    let (f, d) = focus_and_decompose(goal, rule)?;
    let (_, lp) = active_loop(&d, rule)?;
    let guard = match lp {
        Stmt::While(c, _) => c.clone(),
        other => for_parts(other, rule)?.guard,
    };
    let exited = Formula::upd(f.update.clone(), Formula::not(expr_to_formula(&guard, &ctx.sig)));
    let mut check = goal.derive(rule, f.replace(&goal.sequent, exited.clone()));
    check.bound_check = true;
    let mut after = goal.derive(rule, f.replace(&goal.sequent, Focus::formula(f.update.clone(), d.rebuild(d.rest.clone()), f.post.clone())));
    after.sequent.antecedent.push(exited);
    Ok(RuleApplication { rule, conclusion: goal.clone(), premises: vec![check, after] })
}
