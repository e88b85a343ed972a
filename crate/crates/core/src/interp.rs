//! Big-step reference semantics with fuel, including operational loop scopes.
//!
//! Loop scope `loop-scope(x) { s1 ... sn }`: the statements run in order; an
//! unlabeled `continue` from `si` sets `x` to false and resumes with `si+1`; an
//! unlabeled `break` leaves the scope with `x` unchanged; labeled signals and
//! exceptions propagate unchanged.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Display, Formatter};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{init_to_stmts, update_list_to_stmts};
use crate::error::RunError;
use crate::syntax::{BinOp, Expr, Ident, Sort, Stmt, UnOp, UpdateExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn sort(self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
        }
    }

    pub fn parse(s: &str) -> Option<Value> {
        match s.trim() {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            other => other.parse().ok().map(Value::Int),
        }
    }
}

impl Display for Value {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Variable environment; the first scope is the global one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteState {
    scopes: Vec<BTreeMap<Ident, Value>>,
}

impl Default for ConcreteState {
    fn default() -> Self {
        ConcreteState { scopes: alloc::vec![BTreeMap::new()] }
    }
}

impl ConcreteState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, K>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, Value)>,
        K: Into<Ident>,
    {
        let mut s = Self::new();
        for (k, v) in pairs {
            s.scopes[0].insert(k.into(), v);
        }
        s
    }

    /// Parses `b=true,i=0`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut s = Self::new();
        for item in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected name=value, found `{item}`"))?;
            let v = Value::parse(v).ok_or_else(|| format!("bad value in `{item}`"))?;
            s.scopes[0].insert(k.trim().into(), v);
        }
        Ok(s)
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    /// Sets a global binding, creating it if needed.
    pub fn set_global(&mut self, name: &str, v: Value) {
        self.scopes[0].insert(name.into(), v);
    }

    pub fn globals(&self) -> &BTreeMap<Ident, Value> {
        &self.scopes[0]
    }

    pub fn from_globals(globals: BTreeMap<Ident, Value>) -> Self {
        ConcreteState { scopes: alloc::vec![globals] }
    }

    pub fn into_globals(mut self) -> BTreeMap<Ident, Value> {
        self.scopes.swap_remove(0)
    }

    /// Global bindings restricted to `vars`.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Ident>) -> BTreeMap<Ident, Value> {
        vars.into_iter().filter_map(|v| self.get(v).map(|x| (v.clone(), x))).collect()
    }

    fn assign(&mut self, name: &str, v: Value) -> Result<(), RunError> {
        for scope in self.scopes.iter_mut().rev() {
            if let Some(slot) = scope.get_mut(name) {
                if slot.sort() != v.sort() {
                    return Err(RunError::SortMismatch(format!("assigning {v} to `{name}`")));
                }
                *slot = v;
                return Ok(());
            }
        }
        Err(RunError::Undeclared(name.into()))
    }
}

impl Display for ConcreteState {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.scopes[0].iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// Termination mode of a run together with the final global state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Normal(ConcreteState),
    Break(Option<Ident>, ConcreteState),
    Continue(Option<Ident>, ConcreteState),
    Exception(i64, ConcreteState),
    FuelExhausted,
}

impl Outcome {
    pub fn state(&self) -> Option<&ConcreteState> {
        match self {
            Outcome::Normal(s)
            | Outcome::Break(_, s)
            | Outcome::Continue(_, s)
            | Outcome::Exception(_, s) => Some(s),
            Outcome::FuelExhausted => None,
        }
    }

    /// Termination mode without the state, e.g. `normal` or `exception(1)`.
    pub fn kind(&self) -> String {
        match self {
            Outcome::Normal(_) => "normal".into(),
            Outcome::Break(None, _) => "break".into(),
            Outcome::Break(Some(l), _) => format!("break({l})"),
            Outcome::Continue(None, _) => "continue".into(),
            Outcome::Continue(Some(l), _) => format!("continue({l})"),
            Outcome::Exception(v, _) => format!("exception({v})"),
            Outcome::FuelExhausted => "fuel-exhausted".into(),
        }
    }
}

impl Display for Outcome {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.state() {
            Some(s) => write!(f, "{} {s}", self.kind()),
            None => f.write_str(&self.kind()),
        }
    }
}

enum Signal {
    Normal,
    Break(Option<Ident>),
    Continue(Option<Ident>),
    Throw(i64),
}

enum Halt {
    Fuel,
    Error(RunError),
}

impl From<RunError> for Halt {
    fn from(e: RunError) -> Self {
        Halt::Error(e)
    }
}

type Exec = Result<Signal, Halt>;

struct Machine {
    state: ConcreteState,
    fuel: u64,
}

pub fn eval_expr(e: &Expr, state: &ConcreteState) -> Result<Value, RunError> {
    let int = |e: &Expr| match eval_expr(e, state)? {
        Value::Int(v) => Ok(v),
        Value::Bool(_) => Err(RunError::SortMismatch(format!("expected int in `{e}`"))),
    };
    let boolean = |e: &Expr| match eval_expr(e, state)? {
        Value::Bool(b) => Ok(b),
        Value::Int(_) => Err(RunError::SortMismatch(format!("expected boolean in `{e}`"))),
    };
    Ok(match e {
        Expr::Int(v) => Value::Int(*v),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Var(v) => state.get(v).ok_or_else(|| RunError::Undeclared(v.clone()))?,
        Expr::Unary(UnOp::Neg, a) => Value::Int(int(a)?.wrapping_neg()),
        Expr::Unary(UnOp::Not, a) => Value::Bool(!boolean(a)?),
        Expr::Binary(op, l, r) => match op {
            BinOp::Add => Value::Int(int(l)?.wrapping_add(int(r)?)),
            BinOp::Sub => Value::Int(int(l)?.wrapping_sub(int(r)?)),
            BinOp::Mul => Value::Int(int(l)?.wrapping_mul(int(r)?)),
            BinOp::Lt => Value::Bool(int(l)? < int(r)?),
            BinOp::Le => Value::Bool(int(l)? <= int(r)?),
            BinOp::Gt => Value::Bool(int(l)? > int(r)?),
            BinOp::Ge => Value::Bool(int(l)? >= int(r)?),
            BinOp::And => Value::Bool(boolean(l)? && boolean(r)?),
            BinOp::Or => Value::Bool(boolean(l)? || boolean(r)?),
            BinOp::Implies => Value::Bool(!boolean(l)? || boolean(r)?),
            BinOp::Eq | BinOp::Ne => {
                let (a, b) = (eval_expr(l, state)?, eval_expr(r, state)?);
                if a.sort() != b.sort() {
                    return Err(RunError::SortMismatch(format!("comparing {a} and {b}")));
                }
                Value::Bool((a == b) == (*op == BinOp::Eq))
            }
        },
    })
}

impl Machine {
    fn tick(&mut self) -> Result<(), Halt> {
        if self.fuel == 0 {
            return Err(Halt::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn cond(&self, e: &Expr) -> Result<bool, Halt> {
        match eval_expr(e, &self.state)? {
            Value::Bool(b) => Ok(b),
            Value::Int(_) => Err(RunError::SortMismatch(format!("guard `{e}` is not boolean")).into()),
        }
    }

    fn scoped(&mut self, f: impl FnOnce(&mut Self) -> Exec) -> Exec {
        self.state.scopes.push(BTreeMap::new());
        let r = f(self);
        self.state.scopes.pop();
        r
    }

    fn seq(&mut self, body: &[Stmt]) -> Exec {
        for s in body {
            match self.exec(s)? {
                Signal::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Signal::Normal)
    }

    fn update(&mut self, u: &UpdateExpr) -> Exec {
        let (t, v) = match u {
            UpdateExpr::Assign(t, e) => (t, eval_expr(e, &self.state)?),
            UpdateExpr::Incr(t) | UpdateExpr::Decr(t) => {
                let cur = match self.state.get(t) {
                    Some(Value::Int(v)) => v,
                    Some(_) => return Err(RunError::SortMismatch(format!("`{t}` is not int")).into()),
                    None => return Err(RunError::Undeclared(t.clone()).into()),
                };
                let d = if matches!(u, UpdateExpr::Incr(_)) { 1 } else { -1 };
                (t, Value::Int(cur.wrapping_add(d)))
            }
        };
        self.state.assign(t, v)?;
        Ok(Signal::Normal)
    }

    fn run_loop(&mut self, labels: &[Ident], guard: Option<&Expr>, update: &[Stmt], body: &Stmt) -> Exec {
        loop {
            self.tick()?;
            if let Some(g) = guard {
                if !self.cond(g)? {
                    return Ok(Signal::Normal);
                }
            }
            match self.exec(body)? {
                Signal::Normal | Signal::Continue(None) => {}
                Signal::Continue(Some(l)) if labels.contains(&l) => {}
                Signal::Break(None) => return Ok(Signal::Normal),
                Signal::Break(Some(l)) if labels.contains(&l) => return Ok(Signal::Normal),
                other => return Ok(other),
            }
            match self.seq(update)? {
                Signal::Normal => {}
                other => return Ok(other),
            }
        }
    }

    fn looping(&mut self, labels: &[Ident], s: &Stmt) -> Exec {
        match s {
            Stmt::While(c, body) => self.run_loop(labels, Some(c), &[], body),
            Stmt::For { init, guard, update, body } => self.scoped(|m| {
                match m.seq(&init_to_stmts(init))? {
                    Signal::Normal => {}
                    other => return Ok(other),
                }
                m.run_loop(labels, guard.as_ref(), &update_list_to_stmts(update), body)
            }),
            _ => unreachable!("not a loop"),
        }
    }

    fn exec(&mut self, s: &Stmt) -> Exec {
        self.tick()?;
        match s {
            Stmt::Skip => Ok(Signal::Normal),
            Stmt::VarDecl(sort, n, e) => {
                let v = eval_expr(e, &self.state)?;
                if v.sort() != *sort {
                    return Err(RunError::SortMismatch(format!("initializing `{n}` with {v}")).into());
                }
                self.state.scopes.last_mut().expect("scope").insert(n.clone(), v);
                Ok(Signal::Normal)
            }
            Stmt::Assign(t, e) => {
                let v = eval_expr(e, &self.state)?;
                self.state.assign(t, v)?;
                Ok(Signal::Normal)
            }
            Stmt::ExprStmt(u) => self.update(u),
            Stmt::Block(b) => self.scoped(|m| m.seq(b)),
            Stmt::Labeled(ls, body) => {
                let sig = if body.is_loop() { self.looping(ls, body)? } else { self.exec(body)? };
                Ok(match sig {
                    Signal::Break(Some(l)) if ls.contains(&l) => Signal::Normal,
                    Signal::Continue(Some(l)) if ls.contains(&l) => Signal::Continue(None),
                    other => other,
                })
            }
            Stmt::If(c, t, e) => {
                if self.cond(c)? {
                    self.exec(t)
                } else if let Some(e) = e {
                    self.exec(e)
                } else {
                    Ok(Signal::Normal)
                }
            }
            Stmt::While(..) | Stmt::For { .. } => self.looping(&[], s),
            Stmt::Break(l) => Ok(Signal::Break(l.clone())),
            Stmt::Continue(l) => Ok(Signal::Continue(l.clone())),
            Stmt::Throw(e) => match eval_expr(e, &self.state)? {
                Value::Int(v) => Ok(Signal::Throw(v)),
                v => Err(RunError::SortMismatch(format!("throwing {v}")).into()),
            },
            Stmt::TryCatch(t, var, c) => match self.scoped(|m| m.seq(t))? {
                Signal::Throw(v) => self.scoped(|m| {
                    m.state.scopes.last_mut().expect("scope").insert(var.clone(), Value::Int(v));
                    m.seq(c)
                }),
                other => Ok(other),
            },
            Stmt::LoopScope(x, body) => self.scoped(|m| {
                for s in body {
                    match m.exec(s)? {
                        Signal::Normal => {}
                        Signal::Continue(None) => m.state.assign(x, Value::Bool(false))?,
                        Signal::Break(None) => return Ok(Signal::Normal),
                        other => return Ok(other),
                    }
                }
                Ok(Signal::Normal)
            }),
        }
    }
}

/// Runs `program` from `init` with at most `fuel` statement executions.
pub fn run(program: &[Stmt], init: &ConcreteState, fuel: u64) -> Result<Outcome, RunError> {
    run_owned(program, init.clone(), fuel)
}

/// [`run`] taking ownership of the initial state.
pub fn run_owned(program: &[Stmt], init: ConcreteState, fuel: u64) -> Result<Outcome, RunError> {
    let mut m = Machine { state: init, fuel };
    m.state.scopes.truncate(1);
    let sig = match m.seq(program) {
        Ok(sig) => sig,
        Err(Halt::Fuel) => return Ok(Outcome::FuelExhausted),
        Err(Halt::Error(e)) => return Err(e),
    };
    let st = m.state;
    Ok(match sig {
        Signal::Normal => Outcome::Normal(st),
        Signal::Break(l) => Outcome::Break(l, st),
        Signal::Continue(l) => Outcome::Continue(l, st),
        Signal::Throw(v) => Outcome::Exception(v, st),
    })
}

/// Result of differential comparison of two programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    EquivalentOnTested { tested: usize, skipped: usize },
    Counterexample { state: ConcreteState, first: Outcome, second: Outcome },
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivVerdict::EquivalentOnTested { .. })
    }
}

const EXHAUSTIVE_LIMIT: u64 = 10_000;

/// Initial states over `vars`: every combination when there are at most 10^4 of
/// them, otherwise `trials` states drawn with `seed`.
pub fn test_states(vars: &[(Ident, Sort)], lo: i64, hi: i64, trials: usize, seed: u64) -> Vec<ConcreteState> {
    let width = (hi - lo + 1).max(1) as u64;
    let total = vars.iter().try_fold(1u64, |acc, (_, s)| {
        acc.checked_mul(if *s == Sort::Bool { 2 } else { width })
    });
    let value_at = |sort: Sort, k: u64| match sort {
        Sort::Bool => Value::Bool(k == 1),
        Sort::Int => Value::Int(lo + k as i64),
    };
    match total {
        Some(n) if n <= EXHAUSTIVE_LIMIT => (0..n)
            .map(|mut idx| {
                let mut st = ConcreteState::new();
                for (v, s) in vars.iter().rev() {
                    let w = if *s == Sort::Bool { 2 } else { width };
                    st.set_global(v, value_at(*s, idx % w));
                    idx /= w;
                }
                st
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..trials)
                .map(|_| {
                    let mut st = ConcreteState::new();
                    for (v, s) in vars {
                        let w = if *s == Sort::Bool { 2 } else { width };
                        st.set_global(v, value_at(*s, rng.gen_range(0..w)));
                    }
                    st
                })
                .collect()
        }
    }
}

fn same_outcome(a: &Outcome, b: &Outcome, vars: &[(Ident, Sort)]) -> bool {
    let names = vars.iter().map(|(v, _)| v);
    a.kind() == b.kind()
        && match (a.state(), b.state()) {
            (Some(x), Some(y)) => x.restrict(names.clone()) == y.restrict(names),
            _ => true,
        }
}

/// Runs both programs from identical initial states and compares termination
/// mode and the final values of `vars`. Runs that exhaust fuel are skipped.
pub fn equiv_check(
    first: &[Stmt],
    second: &[Stmt],
    vars: &[(Ident, Sort)],
    domain: (i64, i64),
    trials: usize,
    seed: u64,
    fuel: u64,
) -> Result<EquivVerdict, RunError> {
    let (mut tested, mut skipped) = (0, 0);
    for st in test_states(vars, domain.0, domain.1, trials, seed) {
        let a = run(first, &st, fuel)?;
        let b = run(second, &st, fuel)?;
        if matches!(a, Outcome::FuelExhausted) || matches!(b, Outcome::FuelExhausted) {
            skipped += 1;
            continue;
        }
        if !same_outcome(&a, &b, vars) {
            return Ok(EquivVerdict::Counterexample { state: st, first: a, second: b });
        }
        tested += 1;
    }
    Ok(EquivVerdict::EquivalentOnTested { tested, skipped })
}
