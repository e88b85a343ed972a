//! Sequent-calculus rules for symbolic execution with loop scopes.
//!
//! Every rule works on the first succedent formula of the shape `{U}[p]post`
//! (the focus) and returns its premises; the prover decides which rule to try.

mod basic;
pub mod decompose;
mod loops;
mod prop;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

pub use basic::apply_basic_se;
pub use decompose::{locate_active_statement, rebuild, Decomposition, Frame, FrameKind};
pub use loops::{
    break_indexed_loop_scope, continue_indexed_loop_scope, empty_indexed_loop_scope,
    loop_invariant_for, loop_invariant_for_with_update, loop_invariant_while,
    pull_out_loop_initializer, unwind_bound_check, unwind_for_loop, unwind_for_loop_with_update,
    unwind_while_loop,
};
pub use prop::{normalize_step, NormalStep};

use crate::analysis::{program_idents, FreshNamePool};
use crate::annotated::LoopKey;
use crate::dl::{Formula, Sequent, Update};
use crate::error::RuleError;
use crate::syntax::{Signature, Stmt};

/// Stable rule names, as used in traces, reports and `--rule` filters.
pub mod names {
    pub const ASSIGN: &str = "assign";
    pub const BOOLEAN_ASSIGN: &str = "booleanAssign";
    pub const VAR_DECL: &str = "varDecl";
    pub const EXPR_STMT: &str = "exprStmt";
    pub const IF_THEN_ELSE: &str = "ifThenElse";
    pub const SKIP: &str = "skip";
    pub const DISSOLVE_BLOCK: &str = "dissolveBlock";
    pub const DISSOLVE_LABELED: &str = "dissolveLabeled";
    pub const DISSOLVE_TRY: &str = "dissolveTry";
    pub const BLOCK_BREAK: &str = "blockBreak";
    pub const BLOCK_CONTINUE: &str = "blockContinue";
    pub const BLOCK_THROW: &str = "blockThrow";
    pub const LABELED_BREAK: &str = "labeledBreak";
    pub const LABELED_CONTINUE: &str = "labeledContinue";
    pub const LABELED_PROPAGATE: &str = "labeledPropagate";
    pub const TRY_CATCH: &str = "tryCatch";
    pub const TRY_PROPAGATE: &str = "tryPropagate";
    pub const LOOP_SCOPE_PROPAGATE: &str = "loopScopePropagate";
    pub const THROW_UNCAUGHT: &str = "throwUncaught";

    pub const EMPTY_INDEXED_LOOP_SCOPE: &str = "emptyIndexedLoopScope";
    pub const CONTINUE_INDEXED_LOOP_SCOPE: &str = "continueIndexedLoopScope";
    pub const BREAK_INDEXED_LOOP_SCOPE: &str = "breakIndexedLoopScope";
    pub const PULL_OUT_LOOP_INITIALIZER: &str = "pullOutLoopInitializer";
    pub const LOOP_INVARIANT_WHILE: &str = "loopInvariantWhile";
    pub const LOOP_INVARIANT_FOR: &str = "loopInvariantFor";
    pub const UNWIND_WHILE_LOOP: &str = "unwindWhileLoop";
    pub const UNWIND_FOR_LOOP: &str = "unwindForLoop";
    pub const UNWIND_BOUND_CHECK: &str = "unwindBoundCheck";

    pub const SIMPLIFY: &str = "simplify";
    pub const AND_LEFT: &str = "andLeft";
    pub const NOT_LEFT: &str = "notLeft";
    pub const AND_RIGHT: &str = "andRight";
    pub const OR_RIGHT: &str = "orRight";
    pub const IMP_RIGHT: &str = "impRight";
    pub const NOT_RIGHT: &str = "notRight";

    /// Rules of basic symbolic execution.
    pub const BASIC_SE: &[&str] = &[
        ASSIGN, BOOLEAN_ASSIGN, VAR_DECL, EXPR_STMT, IF_THEN_ELSE, SKIP, DISSOLVE_BLOCK,
        DISSOLVE_LABELED, DISSOLVE_TRY, BLOCK_BREAK, BLOCK_CONTINUE, BLOCK_THROW, LABELED_BREAK,
        LABELED_CONTINUE, LABELED_PROPAGATE, TRY_CATCH, TRY_PROPAGATE, LOOP_SCOPE_PROPAGATE,
        THROW_UNCAUGHT,
    ];
}

/// Deliberate rule defects, used to check that the test suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// `unwindForLoop` sets `cont = true` before running the update list.
    SwapUnwindForUpdateAndCont,
    /// `loopInvariantFor` runs the update list without the `x = true; ... x = false;` wrapper.
    DropInvariantForWrapper,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleOptions {
    pub fault: Option<Fault>,
}

/// Proof obligation plus the bookkeeping the strategy keeps along a branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub sequent: Sequent,
    pub trace: Vec<&'static str>,
    /// Unwindings performed per loop on this branch.
    pub unwinds: BTreeMap<LoopKey, u32>,
    /// Premise asserting that an unwound loop is left; failure means "unknown".
    pub bound_check: bool,
}

impl Goal {
    pub fn new(sequent: Sequent) -> Goal {
        Goal { sequent, trace: Vec::new(), unwinds: BTreeMap::new(), bound_check: false }
    }

    pub(crate) fn derive(&self, rule: &'static str, sequent: Sequent) -> Goal {
        let mut trace = self.trace.clone();
        trace.push(rule);
        Goal { sequent, trace, unwinds: self.unwinds.clone(), bound_check: self.bound_check }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: &'static str,
    pub conclusion: Goal,
    /// Empty when the rule closes the goal.
    pub premises: Vec<Goal>,
}

/// Proof-wide state shared by rule applications.
#[derive(Debug, Clone)]
pub struct RuleContext {
    pub pool: FreshNamePool,
    pub sig: Signature,
    pub options: RuleOptions,
}

impl RuleContext {
    /// Context whose name pool already holds every name in `seq`.
    pub fn for_sequent(seq: &Sequent, sig: Signature) -> RuleContext {
        let mut pool = FreshNamePool::new();
        pool.reserve(sig.iter().map(|(n, _)| n.clone()));
        for f in seq.antecedent.iter().chain(&seq.succedent) {
            pool.reserve(formula_idents(f));
        }
        RuleContext { pool, sig, options: RuleOptions::default() }
    }
}

fn formula_idents(f: &Formula) -> BTreeSet<crate::syntax::Ident> {
    let mut out = BTreeSet::new();
    f.symbols_into(&mut out);
    let mut progs = Vec::new();
    collect_programs(f, &mut progs);
    for p in progs {
        out.extend(program_idents(p));
    }
    out
}

fn collect_programs<'a>(f: &'a Formula, out: &mut Vec<&'a [Stmt]>) {
    match f {
        Formula::Box(p, post) => {
            out.push(p);
            collect_programs(post, out);
        }
        Formula::Not(a) | Formula::Upd(_, a) => collect_programs(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            collect_programs(a, out);
            collect_programs(b, out);
        }
        _ => {}
    }
}

/// The formula symbolic execution works on: `{update}[program]post` at
/// succedent position `index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Focus {
    pub index: usize,
    pub update: Update,
    pub program: Vec<Stmt>,
    pub post: Formula,
}

pub fn focus(seq: &Sequent) -> Option<Focus> {
    seq.succedent.iter().enumerate().find_map(|(index, f)| {
        let (update, inner) = match f {
            Formula::Upd(u, inner) => (u.clone(), &**inner),
            other => (Update::empty(), other),
        };
        match inner {
            Formula::Box(p, post) => {
                Some(Focus { index, update, program: p.clone(), post: (**post).clone() })
            }
            _ => None,
        }
    })
}

impl Focus {
    pub fn formula(update: Update, program: Vec<Stmt>, post: Formula) -> Formula {
        Formula::upd(update, Formula::modality(program, post))
    }

    /// `seq` with the focus replaced by `f`.
    pub fn replace(&self, seq: &Sequent, f: Formula) -> Sequent {
        let mut out = seq.clone();
        out.succedent[self.index] = f;
        out
    }
}

type RuleFn = fn(&mut RuleContext, &Goal) -> Result<RuleApplication, RuleError>;

/// Rules applied whenever they match, in priority order: basic symbolic
/// execution, the loop-scope rules, then the initializer pull-out.
const EAGER: [RuleFn; 5] = [
    apply_basic_se,
    empty_indexed_loop_scope,
    continue_indexed_loop_scope,
    break_indexed_loop_scope,
    pull_out_loop_initializer,
];

/// The first eager rule that applies to `goal`, if any. Errors other than
/// "not applicable" are returned as they are.
pub fn apply_eager(ctx: &mut RuleContext, goal: &Goal) -> Result<Option<RuleApplication>, RuleError> {
    for rule in EAGER {
        match rule(ctx, goal) {
            Ok(app) => return Ok(Some(app)),
            Err(RuleError::NotApplicable { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Focus and decomposition of a goal, or the reason no program rule applies.
pub(crate) fn focus_and_decompose(
    goal: &Goal,
    rule: &'static str,
) -> Result<(Focus, Decomposition), RuleError> {
    let f = focus(&goal.sequent).ok_or_else(|| RuleError::not_applicable(rule, "no modality"))?;
    let d = locate_active_statement(&f.program)
        .ok_or_else(|| RuleError::not_applicable(rule, "empty program"))?;
    Ok((f, d))
}

/// A premise of `goal` in which the focus becomes `{update}[program]post`.
pub(crate) fn program_premise(
    goal: &Goal,
    rule: &'static str,
    f: &Focus,
    update: Update,
    program: Vec<Stmt>,
) -> Goal {
    let formula = Focus::formula(update, program, f.post.clone());
    goal.derive(rule, f.replace(&goal.sequent, formula))
}

pub(crate) fn single(rule: &'static str, goal: &Goal, premise: Goal) -> RuleApplication {
    RuleApplication { rule, conclusion: goal.clone(), premises: alloc::vec![premise] }
}
