//! Single rule applications as source-to-source rewrites of one loop.

use anyhow::{anyhow, bail, Result};
use loopscope_core::calculus::names::{PULL_OUT_LOOP_INITIALIZER, UNWIND_FOR_LOOP, UNWIND_WHILE_LOOP};
use loopscope_core::calculus::{
    focus, pull_out_loop_initializer, unwind_for_loop, unwind_while_loop, Goal, RuleApplication, RuleContext,
};
use loopscope_core::dl::{Formula, Sequent, Term};
use loopscope_core::error::RuleError;
use loopscope_core::syntax::{Expr, Signature, Sort, Stmt};

type Rule = fn(&mut RuleContext, &Goal) -> Result<RuleApplication, RuleError>;

pub const DESUGAR_RULES: [&str; 3] = [PULL_OUT_LOOP_INITIALIZER, UNWIND_WHILE_LOOP, UNWIND_FOR_LOOP];

fn rule_fn(name: &str) -> Option<Rule> {
    match name {
        PULL_OUT_LOOP_INITIALIZER => Some(pull_out_loop_initializer),
        UNWIND_WHILE_LOOP => Some(unwind_while_loop),
        UNWIND_FOR_LOOP => Some(unwind_for_loop),
        _ => None,
    }
}

/// Applies `rule` to the `occurrence`-th loop (1-based, pre-order) and
/// returns the whole program with that loop replaced by the premise program.
/// Flags the rule sets through its update become local declarations.
pub fn desugar(prog: &[Stmt], sig: &Signature, rule: &str, occurrence: usize) -> Result<Vec<Stmt>> {
    let apply = rule_fn(rule)
        .ok_or_else(|| anyhow!("unknown rule `{rule}`; expected one of {}", DESUGAR_RULES.join(", ")))?;
    if occurrence == 0 {
        bail!("occurrences are numbered from 1");
    }
    let whole = Sequent::new(vec![], vec![Formula::modality(prog.to_vec(), Formula::True)]);
    let mut ctx = RuleContext::for_sequent(&whole, sig.clone());
    let mut rewrite = |lp: &Stmt| -> Result<Stmt> {
        let goal = Goal::new(Sequent::new(vec![], vec![Formula::modality(vec![lp.clone()], Formula::True)]));
        let app = apply(&mut ctx, &goal)?;
        let [premise] = &app.premises[..] else { bail!("{rule} has more than one premise") };
        let f = focus(&premise.sequent).ok_or_else(|| anyhow!("premise has no program"))?;
        let mut out = Vec::new();
        for (v, t) in f.update.elems() {
            let (sort, init) = match t {
                Term::Bool(b) => (Sort::Bool, Expr::Bool(*b)),
                Term::Int(i) => (Sort::Int, Expr::Int(*i)),
                other => bail!("cannot declare `{v}` with value {other}"),
            };
            out.push(Stmt::VarDecl(sort, v.clone(), init));
        }
        out.extend(f.program);
        Ok(match <[Stmt; 1]>::try_from(out) {
            Ok([single]) => single,
            Err(many) => Stmt::Block(many),
        })
    };
    let mut prog = prog.to_vec();
    let mut n = occurrence - 1;
    if !visit_all(&mut prog, &mut n, &mut rewrite)? {
        bail!("the program has only {} loop(s)", occurrence - 1 - n);
    }
    Ok(prog)
}

fn visit_all(b: &mut [Stmt], n: &mut usize, f: &mut dyn FnMut(&Stmt) -> Result<Stmt>) -> Result<bool> {
    for s in b {
        if visit(s, n, f)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn visit(s: &mut Stmt, n: &mut usize, f: &mut dyn FnMut(&Stmt) -> Result<Stmt>) -> Result<bool> {
    if s.as_labeled_loop().is_some() {
        if *n == 0 {
            *s = f(s)?;
            return Ok(true);
        }
        *n -= 1;
        let lp = match s {
            Stmt::Labeled(_, l) => &mut **l,
            l => l,
        };
        return match lp {
            Stmt::While(_, b) | Stmt::For { body: b, .. } => visit(b, n, f),
            _ => Ok(false),
        };
    }
    match s {
        Stmt::Block(b) | Stmt::LoopScope(_, b) => visit_all(b, n, f),
        Stmt::Labeled(_, b) => visit(b, n, f),
        Stmt::If(_, t, e) => Ok(visit(t, n, f)? || e.as_mut().map_or(Ok(false), |e| visit(e, n, f))?),
        Stmt::TryCatch(t, _, c) => Ok(visit_all(t, n, f)? || visit_all(c, n, f)?),
        _ => Ok(false),
    }
}
