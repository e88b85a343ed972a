//! Abstract syntax of the toy imperative language.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub type Ident = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Int,
    Bool,
}

impl Sort {
    pub fn keyword(self) -> &'static str {
        match self {
            Sort::Int => "int",
            Sort::Bool => "boolean",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    /// Only produced by the formula parser; program expressions never contain it.
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "->",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Implies => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne => 4,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul => 7,
        }
    }

    pub fn is_right_assoc(self) -> bool {
        matches!(self, BinOp::Implies)
    }
}

/// Side-effect-free expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(Ident),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(e))
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn vars_into(&self, out: &mut alloc::collections::BTreeSet<Ident>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Unary(_, e) => e.vars_into(out),
            Expr::Binary(_, l, r) => {
                l.vars_into(out);
                r.vars_into(out);
            }
        }
    }
}

/// The side-effecting expression forms admitted in for-loop update lists
/// and expression statements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UpdateExpr {
    Assign(Ident, Expr),
    Incr(Ident),
    Decr(Ident),
}

impl UpdateExpr {
    pub fn target(&self) -> &Ident {
        match self {
            UpdateExpr::Assign(t, _) | UpdateExpr::Incr(t) | UpdateExpr::Decr(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Declarator {
    pub sort: Sort,
    pub name: Ident,
    pub init: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ForInit {
    Decls(Vec<Declarator>),
    Exprs(Vec<UpdateExpr>),
    Empty,
}

impl ForInit {
    pub fn is_empty(&self) -> bool {
        matches!(self, ForInit::Empty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stmt {
    Skip,
    VarDecl(Sort, Ident, Expr),
    Assign(Ident, Expr),
    ExprStmt(UpdateExpr),
    Block(Vec<Stmt>),
    /// `l1: ... ln: body`; the label list is never empty and `body` is never itself `Labeled`.
    Labeled(Vec<Ident>, Box<Stmt>),
    If(Expr, Box<Stmt>, Option<Box<Stmt>>),
    While(Expr, Box<Stmt>),
    For {
        init: ForInit,
        guard: Option<Expr>,
        update: Vec<UpdateExpr>,
        body: Box<Stmt>,
    },
    Break(Option<Ident>),
    Continue(Option<Ident>),
    Throw(Expr),
    TryCatch(Vec<Stmt>, Ident, Vec<Stmt>),
    /// Indexed loop scope with its boolean index variable.
    LoopScope(Ident, Vec<Stmt>),
}

impl Stmt {
    pub fn block(body: Vec<Stmt>) -> Stmt {
        Stmt::Block(body)
    }

    pub fn assign(target: &str, rhs: Expr) -> Stmt {
        Stmt::Assign(target.into(), rhs)
    }

    pub fn if_then(cond: Expr, then: Stmt) -> Stmt {
        Stmt::If(cond, Box::new(then), None)
    }

    /// Wraps `body` in a `Labeled` node, or returns it unchanged for an empty label list.
    /// Nested label lists are merged.
    pub fn labeled(labels: Vec<Ident>, body: Stmt) -> Stmt {
        if labels.is_empty() {
            return body;
        }
        match body {
            Stmt::Labeled(inner, b) => {
                let mut all = labels;
                all.extend(inner);
                Stmt::Labeled(all, b)
            }
            other => Stmt::Labeled(labels, Box::new(other)),
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(self, Stmt::While(..) | Stmt::For { .. })
    }

    /// Splits an optionally labeled loop into its labels and the loop itself.
    pub fn as_labeled_loop(&self) -> Option<(&[Ident], &Stmt)> {
        match self {
            Stmt::Labeled(ls, body) if body.is_loop() => Some((ls.as_slice(), body)),
            s if s.is_loop() => Some((&[], s)),
            _ => None,
        }
    }

    /// Calls `f` on every statement in pre-order, including `self`.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match self {
            Stmt::Block(b) | Stmt::LoopScope(_, b) => b.iter().for_each(|s| s.walk(f)),
            Stmt::Labeled(_, s) | Stmt::While(_, s) => s.walk(f),
            Stmt::For { body, .. } => body.walk(f),
            Stmt::If(_, t, e) => {
                t.walk(f);
                if let Some(e) = e {
                    e.walk(f);
                }
            }
            Stmt::TryCatch(t, _, c) => {
                t.iter().for_each(|s| s.walk(f));
                c.iter().for_each(|s| s.walk(f));
            }
            _ => {}
        }
    }
}

pub fn walk_all<'a>(prog: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
    for s in prog {
        s.walk(f);
    }
}
