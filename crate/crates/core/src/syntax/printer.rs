//! Single-line concrete syntax; output reparses to the same tree.

use alloc::string::{String, ToString};
use core::fmt::{self, Display, Formatter, Write};

use super::ast::*;

const UNARY_PREC: u8 = 8;

fn write_expr(f: &mut dyn Write, e: &Expr, min_prec: u8) -> fmt::Result {
    match e {
        Expr::Int(v) => write!(f, "{v}"),
        Expr::Bool(b) => write!(f, "{b}"),
        Expr::Var(v) => f.write_str(v),
        Expr::Unary(UnOp::Not, arg) => {
            f.write_char('!')?;
            write_expr(f, arg, UNARY_PREC)
        }
        Expr::Unary(UnOp::Neg, arg) => match **arg {
            Expr::Int(_) | Expr::Unary(UnOp::Neg, _) => {
                f.write_str("-(")?;
                write_expr(f, arg, 0)?;
                f.write_char(')')
            }
            _ => {
                f.write_char('-')?;
                write_expr(f, arg, UNARY_PREC)
            }
        },
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            let paren = p < min_prec;
            if paren {
                f.write_char('(')?;
            }
            let (lp, rp) = if op.is_right_assoc() { (p + 1, p) } else { (p, p + 1) };
            write_expr(f, l, lp)?;
            write!(f, " {} ", op.symbol())?;
            write_expr(f, r, rp)?;
            if paren {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

impl Display for UpdateExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            UpdateExpr::Assign(t, e) => write!(f, "{t} = {e}"),
            UpdateExpr::Incr(t) => write!(f, "{t}++"),
            UpdateExpr::Decr(t) => write!(f, "{t}--"),
        }
    }
}

fn write_list<T: Display>(f: &mut Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

fn write_block(f: &mut Formatter<'_>, body: &[Stmt]) -> fmt::Result {
    if body.is_empty() {
        return f.write_str("{ }");
    }
    f.write_str("{ ")?;
    write_list(f, body, " ")?;
    f.write_str(" }")
}

impl Display for Stmt {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Skip => f.write_str(";"),
            Stmt::VarDecl(s, n, e) => write!(f, "{} {n} = {e};", s.keyword()),
            Stmt::Assign(t, e) => write!(f, "{t} = {e};"),
            Stmt::ExprStmt(u) => write!(f, "{u};"),
            Stmt::Block(b) => write_block(f, b),
            Stmt::Labeled(ls, body) => {
                for l in ls {
                    write!(f, "{l}: ")?;
                }
                write!(f, "{body}")
            }
            Stmt::If(c, t, None) => write!(f, "if ({c}) {t}"),
            Stmt::If(c, t, Some(e)) => write!(f, "if ({c}) {t} else {e}"),
            Stmt::While(c, body) => write!(f, "while ({c}) {body}"),
            Stmt::For { init, guard, update, body } => {
                f.write_str("for (")?;
                match init {
                    ForInit::Empty => {}
                    ForInit::Exprs(items) => write_list(f, items, ", ")?,
                    ForInit::Decls(decls) => {
                        let mut last = None;
                        for (i, d) in decls.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            if last != Some(d.sort) {
                                write!(f, "{} ", d.sort.keyword())?;
                                last = Some(d.sort);
                            }
                            write!(f, "{} = {}", d.name, d.init)?;
                        }
                    }
                }
                f.write_char(';')?;
                if let Some(g) = guard {
                    write!(f, " {g}")?;
                }
                f.write_char(';')?;
                if !update.is_empty() {
                    f.write_char(' ')?;
                    write_list(f, update, ", ")?;
                }
                write!(f, ") {body}")
            }
            Stmt::Break(None) => f.write_str("break;"),
            Stmt::Break(Some(l)) => write!(f, "break {l};"),
            Stmt::Continue(None) => f.write_str("continue;"),
            Stmt::Continue(Some(l)) => write!(f, "continue {l};"),
            Stmt::Throw(e) => write!(f, "throw {e};"),
            Stmt::TryCatch(t, v, c) => {
                f.write_str("try ")?;
                write_block(f, t)?;
                write!(f, " catch ({v}) ")?;
                write_block(f, c)
            }
            Stmt::LoopScope(x, body) => {
                write!(f, "loop-scope({x}) ")?;
                write_block(f, body)
            }
        }
    }
}

/// Displays a statement list separated by single spaces.
pub struct ProgramDisplay<'a>(pub &'a [Stmt]);

impl Display for ProgramDisplay<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_list(f, self.0, " ")
    }
}

pub fn print_program(prog: &[Stmt]) -> String {
    ProgramDisplay(prog).to_string()
}
