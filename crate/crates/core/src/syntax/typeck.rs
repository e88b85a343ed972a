//! Sort inference and well-formedness checks (labels, declaration scoping).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::ast::*;
use crate::error::SyntaxError;

/// Sorts of program variables (and, inside the prover, of fresh constants).
///
/// Variables are typed by name: one sort per identifier across the whole program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature(pub BTreeMap<Ident, Sort>);

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<Sort> {
        self.0.get(name).copied()
    }

    pub fn insert(&mut self, name: impl Into<Ident>, sort: Sort) {
        self.0.insert(name.into(), sort);
    }

    pub fn sort_of(&self, name: &str) -> Sort {
        self.get(name).unwrap_or(Sort::Int)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, Sort)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }
}

struct Infer {
    sig: BTreeMap<Ident, Sort>,
    changed: bool,
    strict: bool,
}

impl Infer {
    fn bind(&mut self, v: &str, s: Sort) -> Result<(), SyntaxError> {
        match self.sig.get(v) {
            Some(&old) if old != s => Err(SyntaxError::Type(format!(
                "variable `{v}` used as {} and {}",
                old.keyword(),
                s.keyword()
            ))),
            Some(_) => Ok(()),
            None => {
                self.sig.insert(v.into(), s);
                self.changed = true;
                Ok(())
            }
        }
    }

    fn synth(&self, e: &Expr) -> Option<Sort> {
        match e {
            Expr::Int(_) => Some(Sort::Int),
            Expr::Bool(_) => Some(Sort::Bool),
            Expr::Var(v) => self.sig.get(v).copied(),
            Expr::Unary(UnOp::Neg, _) => Some(Sort::Int),
            Expr::Unary(UnOp::Not, _) => Some(Sort::Bool),
            Expr::Binary(op, ..) => Some(match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul => Sort::Int,
                _ => Sort::Bool,
            }),
        }
    }

    fn expect(&mut self, e: &Expr, want: Sort) -> Result<(), SyntaxError> {
        let mismatch = |found: Sort| {
            Err(SyntaxError::Type(format!(
                "expected {} expression, found {} in `{e}`",
                want.keyword(),
                found.keyword()
            )))
        };
        match e {
            Expr::Int(_) if want != Sort::Int => mismatch(Sort::Int),
            Expr::Bool(_) if want != Sort::Bool => mismatch(Sort::Bool),
            Expr::Int(_) | Expr::Bool(_) => Ok(()),
            Expr::Var(v) => self.bind(v, want),
            Expr::Unary(op, arg) => {
                let s = if *op == UnOp::Neg { Sort::Int } else { Sort::Bool };
                if s != want {
                    return mismatch(s);
                }
                self.expect(arg, s)
            }
            Expr::Binary(op, l, r) => {
                let (operand, result) = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => (Some(Sort::Int), Sort::Int),
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => (Some(Sort::Int), Sort::Bool),
                    BinOp::And | BinOp::Or | BinOp::Implies => (Some(Sort::Bool), Sort::Bool),
                    BinOp::Eq | BinOp::Ne => (None, Sort::Bool),
                };
                if result != want {
                    return mismatch(result);
                }
                let operand = operand.or_else(|| self.synth(l)).or_else(|| self.synth(r));
                match operand {
                    Some(s) => {
                        self.expect(l, s)?;
                        self.expect(r, s)
                    }
                    None if self.strict => {
                        Err(SyntaxError::Type(format!("cannot determine operand sort in `{e}`")))
                    }
                    None => Ok(()),
                }
            }
        }
    }

    fn assign(&mut self, target: &str, rhs: &Expr) -> Result<(), SyntaxError> {
        match self.sig.get(target).copied().or_else(|| self.synth(rhs)) {
            Some(s) => {
                self.bind(target, s)?;
                self.expect(rhs, s)
            }
            None => Ok(()),
        }
    }

    fn update(&mut self, u: &UpdateExpr) -> Result<(), SyntaxError> {
        match u {
            UpdateExpr::Assign(t, e) => self.assign(t, e),
            UpdateExpr::Incr(t) | UpdateExpr::Decr(t) => self.bind(t, Sort::Int),
        }
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), SyntaxError> {
        match s {
            Stmt::Skip | Stmt::Break(_) | Stmt::Continue(_) => Ok(()),
            Stmt::VarDecl(sort, n, e) => {
                self.bind(n, *sort)?;
                self.expect(e, *sort)
            }
            Stmt::Assign(t, e) => self.assign(t, e),
            Stmt::ExprStmt(u) => self.update(u),
            Stmt::Block(b) => self.stmts(b),
            Stmt::Labeled(_, b) => self.stmt(b),
            Stmt::If(c, t, e) => {
                self.expect(c, Sort::Bool)?;
                self.stmt(t)?;
                if let Some(e) = e {
                    self.stmt(e)?;
                }
                Ok(())
            }
            Stmt::While(c, b) => {
                self.expect(c, Sort::Bool)?;
                self.stmt(b)
            }
            Stmt::For { init, guard, update, body } => {
                match init {
                    ForInit::Empty => {}
                    ForInit::Decls(ds) => {
                        for d in ds {
                            self.bind(&d.name, d.sort)?;
                            self.expect(&d.init, d.sort)?;
                        }
                    }
                    ForInit::Exprs(us) => us.iter().try_for_each(|u| self.update(u))?,
                }
                if let Some(g) = guard {
                    self.expect(g, Sort::Bool)?;
                }
                update.iter().try_for_each(|u| self.update(u))?;
                self.stmt(body)
            }
            Stmt::Throw(e) => self.expect(e, Sort::Int),
            Stmt::TryCatch(t, v, c) => {
                self.bind(v, Sort::Int)?;
                self.stmts(t)?;
                self.stmts(c)
            }
            Stmt::LoopScope(x, b) => {
                self.bind(x, Sort::Bool)?;
                self.stmts(b)
            }
        }
    }

    fn stmts(&mut self, b: &[Stmt]) -> Result<(), SyntaxError> {
        b.iter().try_for_each(|s| self.stmt(s))
    }
}

/// Infers a sort for every variable of `program` and of the boolean `formulas`.
/// Variables whose sort is never constrained default to `int`.
pub fn infer_sorts(
    program: &[Stmt],
    formulas: &[&Expr],
    known: &Signature,
) -> Result<Signature, SyntaxError> {
    let mut inf = Infer { sig: known.0.clone(), changed: true, strict: false };
    while inf.changed {
        inf.changed = false;
        inf.stmts(program)?;
        for f in formulas {
            inf.expect(f, Sort::Bool)?;
        }
    }
    let mut all = BTreeSet::new();
    for v in crate::analysis::program_vars(program) {
        all.insert(v);
    }
    for f in formulas {
        f.vars_into(&mut all);
    }
    for v in all {
        inf.sig.entry(v).or_insert(Sort::Int);
    }
    inf.strict = true;
    inf.stmts(program)?;
    for f in formulas {
        inf.expect(f, Sort::Bool)?;
    }
    Ok(Signature(inf.sig))
}

#[derive(Clone)]
struct LabelFrame {
    label: Ident,
    on_loop: bool,
    loop_depth: usize,
}

#[derive(Default)]
struct Validator {
    labels: Vec<LabelFrame>,
    loop_depth: usize,
    scopes: Vec<BTreeSet<Ident>>,
    free: BTreeSet<Ident>,
    declared: BTreeSet<Ident>,
}

impl Validator {
    fn use_expr(&mut self, e: &Expr) {
        let mut vs = BTreeSet::new();
        e.vars_into(&mut vs);
        for v in vs {
            self.use_var(&v);
        }
    }

    fn use_var(&mut self, v: &str) {
        if !self.scopes.iter().any(|s| s.contains(v)) {
            self.free.insert(v.into());
        }
    }

    fn declare(&mut self, v: &str) -> Result<(), SyntaxError> {
        if self.scopes.iter().any(|s| s.contains(v)) {
            return Err(SyntaxError::Type(format!("variable `{v}` is already declared in this scope")));
        }
        self.declared.insert(v.into());
        self.scopes.last_mut().expect("scope").insert(v.into());
        Ok(())
    }

    fn seq(&mut self, body: &[Stmt]) -> Result<(), SyntaxError> {
        self.scopes.push(BTreeSet::new());
        for s in body {
            self.stmt(s, true)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn update(&mut self, u: &UpdateExpr) {
        if let UpdateExpr::Assign(_, e) = u {
            self.use_expr(e);
        }
        self.use_var(u.target());
    }

    fn stmt(&mut self, s: &Stmt, in_seq: bool) -> Result<(), SyntaxError> {
        match s {
            Stmt::Skip => {}
            Stmt::VarDecl(_, n, e) => {
                if !in_seq {
                    return Err(SyntaxError::Type(format!(
                        "declaration of `{n}` must appear directly in a block"
                    )));
                }
                self.use_expr(e);
                self.declare(n)?;
            }
            Stmt::Assign(t, e) => {
                self.use_expr(e);
                self.use_var(t);
            }
            Stmt::ExprStmt(u) => self.update(u),
            Stmt::Block(b) => self.seq(b)?,
            Stmt::Labeled(ls, body) => {
                let mut seen = BTreeSet::new();
                for l in ls {
                    if !seen.insert(l) || self.labels.iter().any(|f| &f.label == l) {
                        return Err(SyntaxError::DuplicateLabel(l.clone()));
                    }
                }
                if matches!(**body, Stmt::Labeled(..)) {
                    return Err(SyntaxError::Label("nested label lists must be merged".into()));
                }
                let n = self.labels.len();
                for l in ls {
                    self.labels.push(LabelFrame {
                        label: l.clone(),
                        on_loop: body.is_loop(),
                        loop_depth: self.loop_depth,
                    });
                }
                self.stmt(body, false)?;
                self.labels.truncate(n);
            }
            Stmt::If(c, t, e) => {
                self.use_expr(c);
                self.stmt(t, false)?;
                if let Some(e) = e {
                    self.stmt(e, false)?;
                }
            }
            Stmt::While(c, body) => {
                self.use_expr(c);
                self.loop_depth += 1;
                self.stmt(body, false)?;
                self.loop_depth -= 1;
            }
            Stmt::For { init, guard, update, body } => {
                self.scopes.push(BTreeSet::new());
                match init {
                    ForInit::Empty => {}
                    ForInit::Decls(ds) => {
                        for d in ds {
                            self.use_expr(&d.init);
                            self.declare(&d.name)?;
                        }
                    }
                    ForInit::Exprs(us) => us.iter().for_each(|u| self.update(u)),
                }
                if let Some(g) = guard {
                    self.use_expr(g);
                }
                update.iter().for_each(|u| self.update(u));
                self.loop_depth += 1;
                self.stmt(body, false)?;
                self.loop_depth -= 1;
                self.scopes.pop();
            }
            Stmt::Break(None) | Stmt::Continue(None) => {
                if self.loop_depth == 0 {
                    let kw = if matches!(s, Stmt::Break(_)) { "break" } else { "continue" };
                    return Err(SyntaxError::Label(format!("`{kw}` outside of a loop")));
                }
            }
            Stmt::Break(Some(l)) => {
                if !self.labels.iter().any(|f| &f.label == l) {
                    return Err(SyntaxError::Label(format!("undefined label `{l}`")));
                }
            }
            Stmt::Continue(Some(l)) => match self.labels.iter().find(|f| &f.label == l) {
                None => return Err(SyntaxError::Label(format!("undefined label `{l}`"))),
                Some(f) if !f.on_loop && f.loop_depth == 0 => {
                    return Err(SyntaxError::Label(format!("`continue {l}` does not target a loop")))
                }
                Some(_) => {}
            },
            Stmt::Throw(e) => self.use_expr(e),
            Stmt::TryCatch(t, v, c) => {
                self.seq(t)?;
                self.scopes.push(BTreeSet::new());
                self.declare(v)?;
                for s in c {
                    self.stmt(s, true)?;
                }
                self.scopes.pop();
            }
            Stmt::LoopScope(x, body) => {
                self.use_var(x);
                self.loop_depth += 1;
                self.seq(body)?;
                self.loop_depth -= 1;
            }
        }
        Ok(())
    }
}

/// Checks label scoping, break/continue targets and declaration scoping.
///
/// A declared name may not be declared again while in scope, and may not be used
/// outside the scope of its declarations.
pub fn validate_program(prog: &[Stmt]) -> Result<(), SyntaxError> {
    let mut v = Validator::default();
    v.scopes.push(BTreeSet::new());
    for s in prog {
        v.stmt(s, true)?;
    }
    if let Some(name) = v.free.intersection(&v.declared).next() {
        return Err(SyntaxError::Type(format!(
            "variable `{name}` is used outside the scope of its declaration"
        )));
    }
    Ok(())
}

/// Variables used by `prog` outside any declaration (the program's inputs/outputs).
pub fn free_vars(prog: &[Stmt]) -> BTreeSet<Ident> {
    let mut v = Validator::default();
    v.scopes.push(BTreeSet::new());
    v.loop_depth = 1;
    for s in prog {
        let _ = v.stmt(s, true);
    }
    v.free
}
