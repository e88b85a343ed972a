//! Random well-formed programs for differential testing.
//!
//! Generated programs are type-correct and label-valid: declarations are
//! only read inside their scope, `break`/`continue` only occur where a
//! target exists, and every fresh local, catch variable and label name is
//! unique within the program.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::syntax::{BinOp, Declarator, Expr, ForInit, Ident, Sort, Stmt, UnOp, UpdateExpr};

#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Maximum nesting of compound statements.
    pub max_depth: u32,
    /// Maximum statements per block.
    pub max_block: usize,
    pub int_vars: Vec<Ident>,
    pub bool_vars: Vec<Ident>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 4,
            max_block: 3,
            int_vars: vec!["i".into(), "j".into()],
            bool_vars: vec!["b".into(), "c".into()],
        }
    }
}

impl GenConfig {
    pub fn globals(&self) -> Vec<(Ident, Sort)> {
        let ints = self.int_vars.iter().map(|v| (v.clone(), Sort::Int));
        ints.chain(self.bool_vars.iter().map(|v| (v.clone(), Sort::Bool))).collect()
    }
}

pub fn random_program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Vec<Stmt> {
    let mut g = Gen {
        rng,
        ints: cfg.int_vars.clone(),
        bools: cfg.bool_vars.clone(),
        labels: Vec::new(),
        loops: 0,
        next: 0,
        max_block: cfg.max_block.max(1),
    };
    g.block(cfg.max_depth)
}

struct Gen<'a, R> {
    rng: &'a mut R,
    ints: Vec<Ident>,
    bools: Vec<Ident>,
    /// Enclosing labels; the flag marks labeled loops.
    labels: Vec<(Ident, bool)>,
    loops: u32,
    next: u32,
    max_block: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn name(&mut self, base: &str) -> Ident {
        self.next += 1;
        format!("{base}{}", self.next)
    }

    fn pick(&mut self, from: &[Ident]) -> Ident {
        from[self.rng.gen_range(0..from.len())].clone()
    }

    fn int_expr(&mut self, depth: u32) -> Expr {
        match self.rng.gen_range(0..if depth == 0 { 2 } else { 6 }) {
            0 => Expr::Int(self.rng.gen_range(-2..=2)),
            1 => Expr::Var(self.pick(&self.ints.clone())),
            2 => Expr::bin(BinOp::Add, self.int_expr(depth - 1), self.int_expr(depth - 1)),
            3 => Expr::bin(BinOp::Sub, self.int_expr(depth - 1), self.int_expr(depth - 1)),
            4 => Expr::bin(BinOp::Mul, self.int_expr(depth - 1), self.int_expr(0)),
            _ => Expr::Unary(UnOp::Neg, Box::new(self.int_expr(depth - 1))),
        }
    }

    fn bool_expr(&mut self, depth: u32) -> Expr {
        match self.rng.gen_range(0..if depth == 0 { 3 } else { 6 }) {
            0 => Expr::Bool(self.rng.gen_bool(0.5)),
            1 => Expr::Var(self.pick(&self.bools.clone())),
            2 => {
                let ops = [BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge];
                let op = ops[self.rng.gen_range(0..ops.len())];
                Expr::bin(op, self.int_expr(depth.min(1)), self.int_expr(0))
            }
            3 => Expr::not(self.bool_expr(depth - 1)),
            4 => Expr::bin(BinOp::And, self.bool_expr(depth - 1), self.bool_expr(depth - 1)),
            _ => Expr::bin(BinOp::Or, self.bool_expr(depth - 1), self.bool_expr(depth - 1)),
        }
    }

    fn update_expr(&mut self) -> UpdateExpr {
        let t = self.pick(&self.ints.clone());
        match self.rng.gen_range(0..3) {
            0 => UpdateExpr::Incr(t),
            1 => UpdateExpr::Decr(t),
            _ => UpdateExpr::Assign(t, self.int_expr(1)),
        }
    }

    /// A statement list in a fresh scope; declarations are allowed here.
    fn block(&mut self, depth: u32) -> Vec<Stmt> {
        let (ni, nb) = (self.ints.len(), self.bools.len());
        let n = self.rng.gen_range(1..=self.max_block);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            if self.rng.gen_ratio(1, 6) {
                out.push(self.decl());
            } else {
                out.push(self.stmt(depth));
            }
        }
        self.ints.truncate(ni);
        self.bools.truncate(nb);
        out
    }

    fn decl(&mut self) -> Stmt {
        if self.rng.gen_bool(0.7) {
            let e = self.int_expr(1);
            let k = self.name("k");
            self.ints.push(k.clone());
            Stmt::VarDecl(Sort::Int, k, e)
        } else {
            let e = self.bool_expr(1);
            let d = self.name("d");
            self.bools.push(d.clone());
            Stmt::VarDecl(Sort::Bool, d, e)
        }
    }

    fn stmt(&mut self, depth: u32) -> Stmt {
        if depth == 0 || self.rng.gen_ratio(1, 2) {
            return self.simple();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..8) {
            0 | 1 => {
                let c = self.bool_expr(2);
                let then = self.branch(d);
                if self.rng.gen_bool(0.5) {
                    // a then-branch ending in an open `if` would capture the else
                    let then = if ends_open(&then) { Stmt::Block(vec![then]) } else { then };
                    Stmt::If(c, Box::new(then), Some(Box::new(self.branch(d))))
                } else {
                    Stmt::If(c, Box::new(then), None)
                }
            }
            2 => Stmt::Block(self.block(d)),
            3..=5 => {
                let label = if self.rng.gen_ratio(1, 3) { Some(self.name("l")) } else { None };
                self.any_loop(d, label)
            }
            6 => {
                let l = self.name("l");
                self.labels.push((l.clone(), false));
                let body = self.block(d);
                self.labels.pop();
                Stmt::labeled(vec![l], Stmt::Block(body))
            }
            _ => {
                let body = self.block(d);
                let e = self.name("e");
                self.ints.push(e.clone());
                let handler = self.block(d);
                self.ints.pop();
                Stmt::TryCatch(body, e, handler)
            }
        }
    }

    fn branch(&mut self, depth: u32) -> Stmt {
        if self.rng.gen_bool(0.6) {
            Stmt::Block(self.block(depth))
        } else {
            self.stmt(depth)
        }
    }

    fn simple(&mut self) -> Stmt {
        let jump = self.loops > 0 || !self.labels.is_empty();
        match self.rng.gen_range(0..if jump { 10 } else { 7 }) {
            0 | 1 => {
                let t = self.pick(&self.ints.clone());
                Stmt::Assign(t, self.int_expr(2))
            }
            2 => {
                let t = self.pick(&self.bools.clone());
                Stmt::Assign(t, self.bool_expr(2))
            }
            3 | 4 => match self.update_expr() {
                UpdateExpr::Assign(t, e) => Stmt::Assign(t, e),
                u => Stmt::ExprStmt(u),
            },
            5 => Stmt::Skip,
            6 => Stmt::Throw(self.int_expr(1)),
            _ => self.jump(),
        }
    }

    fn jump(&mut self) -> Stmt {
        let labels: Vec<(Ident, bool)> = self.labels.clone();
        let want_label = labels.is_empty() || self.loops == 0 || self.rng.gen_bool(0.4);
        if want_label && !labels.is_empty() {
            let (l, is_loop) = labels[self.rng.gen_range(0..labels.len())].clone();
            if is_loop && self.rng.gen_bool(0.5) {
                return Stmt::Continue(Some(l));
            }
            return Stmt::Break(Some(l));
        }
        if self.rng.gen_bool(0.5) {
            Stmt::Break(None)
        } else {
            Stmt::Continue(None)
        }
    }

    /// A while or for loop. Most loops carry a hidden counter that bounds the
    /// number of iterations, incremented before anything can `continue`; the
    /// counter is declared in a block around the loop and never assigned by
    /// the body.
    fn any_loop(&mut self, depth: u32, label: Option<Ident>) -> Stmt {
        let counter = if self.rng.gen_bool(0.9) { Some(self.name("n")) } else { None };
        let bounded = |g: &mut Self, k: &Ident, guard: Option<Expr>| {
            let limit = Expr::bin(BinOp::Lt, Expr::var(k), Expr::Int(g.rng.gen_range(1..=3)));
            match guard {
                Some(c) if g.rng.gen_bool(0.7) => Expr::bin(BinOp::And, limit, c),
                _ => limit,
            }
        };
        let lp = if self.rng.gen_bool(0.5) {
            let mut guard = self.bool_expr(2);
            if let Some(k) = &counter {
                guard = bounded(self, k, Some(guard));
            }
            let mut body = self.loop_body(depth, label.as_ref());
            if let Some(k) = &counter {
                let mut stmts = vec![Stmt::ExprStmt(UpdateExpr::Incr(k.clone()))];
                match body {
                    Stmt::Block(b) => stmts.extend(b),
                    other => stmts.push(other),
                }
                body = Stmt::Block(stmts);
            }
            Stmt::While(guard, Box::new(body))
        } else {
            let mut lp = self.for_loop(depth, label.as_ref());
            if let (Some(k), Stmt::For { guard, update, .. }) = (&counter, &mut lp) {
                *guard = Some(bounded(self, k, guard.take()));
                update.push(UpdateExpr::Incr(k.clone()));
            }
            lp
        };
        let lp = Stmt::labeled(label.into_iter().collect(), lp);
        match counter {
            Some(k) => Stmt::Block(vec![Stmt::VarDecl(Sort::Int, k, Expr::Int(0)), lp]),
            None => lp,
        }
    }

    fn loop_body(&mut self, depth: u32, label: Option<&Ident>) -> Stmt {
        if let Some(l) = label {
            self.labels.push((l.clone(), true));
        }
        self.loops += 1;
        let mut body = self.block(depth);
        if self.rng.gen_bool(0.5) {
            let c = self.bool_expr(1);
            body.push(Stmt::if_then(c, Stmt::Break(None)));
        }
        self.loops -= 1;
        if label.is_some() {
            self.labels.pop();
        }
        if body.len() == 1 && !matches!(body[0], Stmt::VarDecl(..)) && self.rng.gen_bool(0.3) {
            body.pop().expect("one statement")
        } else {
            Stmt::Block(body)
        }
    }

    fn for_loop(&mut self, depth: u32, label: Option<&Ident>) -> Stmt {
        let ni = self.ints.len();
        let (init, guard, update) = match self.rng.gen_range(0..3) {
            0 => {
                let k = self.name("k");
                let start = self.int_expr(1);
                self.ints.push(k.clone());
                let bound = Expr::Int(self.rng.gen_range(-1..=3));
                let init = ForInit::Decls(vec![Declarator { sort: Sort::Int, name: k.clone(), init: start }]);
                (init, Some(Expr::bin(BinOp::Lt, Expr::var(&k), bound)), vec![UpdateExpr::Incr(k)])
            }
            1 => {
                let n = self.rng.gen_range(1..=2);
                let init = ForInit::Exprs((0..n).map(|_| self.update_expr()).collect());
                let update = (0..self.rng.gen_range(0..=2)).map(|_| self.update_expr()).collect();
                (init, Some(self.bool_expr(2)), update)
            }
            _ => {
                let guard = if self.rng.gen_bool(0.8) { Some(self.bool_expr(2)) } else { None };
                let update = (0..self.rng.gen_range(0..=2)).map(|_| self.update_expr()).collect();
                (ForInit::Empty, guard, update)
            }
        };
        let body = Box::new(self.loop_body(depth, label));
        self.ints.truncate(ni);
        Stmt::For { init, guard, update, body }
    }
}

/// Whether a trailing `else` printed after `s` would attach inside `s`.
pub fn ends_open(s: &Stmt) -> bool {
    match s {
        Stmt::If(_, _, None) => true,
        Stmt::If(_, _, Some(e)) => ends_open(e),
        Stmt::While(_, body) | Stmt::Labeled(_, body) => ends_open(body),
        Stmt::For { body, .. } => ends_open(body),
        _ => false,
    }
}
