use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt::{self, Display, Formatter};

use super::update::Update;
use crate::syntax::{Ident, ProgramDisplay, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 6,
            ArithOp::Mul => 7,
        }
    }

    pub fn eval(self, a: i64, b: i64) -> i64 {
        match self {
            ArithOp::Add => a.wrapping_add(b),
            ArithOp::Sub => a.wrapping_sub(b),
            ArithOp::Mul => a.wrapping_mul(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(i64),
    Bool(bool),
    /// Program variable; denotes its value in the state the formula is evaluated in.
    Var(Ident),
    /// Skolem constant introduced by anonymization; names contain `#`.
    Fresh(Ident),
    Arith(ArithOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.into())
    }

    pub fn arith(op: ArithOp, l: Term, r: Term) -> Term {
        Term::Arith(op, Box::new(l), Box::new(r))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Int(_) | Term::Bool(_) => true,
            Term::Var(_) | Term::Fresh(_) => false,
            Term::Arith(_, l, r) => l.is_ground() && r.is_ground(),
        }
    }

    pub fn symbols_into(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Term::Var(v) | Term::Fresh(v) => {
                out.insert(v.clone());
            }
            Term::Arith(_, l, r) => {
                l.symbols_into(out);
                r.symbols_into(out);
            }
            _ => {}
        }
    }
}

fn write_term(f: &mut Formatter<'_>, t: &Term, min_prec: u8) -> fmt::Result {
    match t {
        Term::Int(v) if *v < 0 && min_prec > 0 => write!(f, "({v})"),
        Term::Int(v) => write!(f, "{v}"),
        Term::Bool(b) => write!(f, "{b}"),
        Term::Var(v) | Term::Fresh(v) => f.write_str(v),
        Term::Arith(op, l, r) => {
            let p = op.precedence();
            if p < min_prec {
                f.write_str("(")?;
            }
            write_term(f, l, p)?;
            write!(f, " {} ", op.symbol())?;
            write_term(f, r, p + 1)?;
            if p < min_prec {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Lt,
    Le,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "==",
            Rel::Lt => "<",
            Rel::Le => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Rel, Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// Box modality `[program]post`.
    Box(Vec<Stmt>, Box<Formula>),
    /// Pending update `{u}f`.
    Upd(Update, Box<Formula>),
}

impl Formula {
    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Atom(Rel::Eq, l, r)
    }

    /// `v == TRUE` for a boolean program variable.
    pub fn is_true(v: &str) -> Formula {
        Formula::eq(Term::var(v), Term::Bool(true))
    }

    pub fn is_false(v: &str) -> Formula {
        Formula::eq(Term::var(v), Term::Bool(false))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn modality(program: Vec<Stmt>, post: Formula) -> Formula {
        Formula::Box(program, Box::new(post))
    }

    pub fn upd(u: Update, f: Formula) -> Formula {
        if u.is_empty() {
            f
        } else {
            Formula::Upd(u, Box::new(f))
        }
    }

    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    pub fn has_modality(&self) -> bool {
        match self {
            Formula::Box(..) => true,
            Formula::True | Formula::False | Formula::Atom(..) => false,
            Formula::Not(a) => a.has_modality(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.has_modality() || b.has_modality()
            }
            Formula::Upd(_, f) => f.has_modality(),
        }
    }

    /// Number of box modalities occurring anywhere in the formula.
    pub fn modality_count(&self) -> usize {
        match self {
            Formula::Box(_, post) => 1 + post.modality_count(),
            Formula::True | Formula::False | Formula::Atom(..) => 0,
            Formula::Not(a) | Formula::Upd(_, a) => a.modality_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.modality_count() + b.modality_count()
            }
        }
    }

    /// Program variables and fresh constants of a modality-free formula.
    pub fn symbols_into(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, l, r) => {
                l.symbols_into(out);
                r.symbols_into(out);
            }
            Formula::Not(a) => a.symbols_into(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.symbols_into(out);
                b.symbols_into(out);
            }
            Formula::Box(p, post) => {
                out.extend(crate::analysis::program_vars(p));
                post.symbols_into(out);
            }
            Formula::Upd(u, f) => {
                for (v, t) in u.elems() {
                    out.insert(v.clone());
                    t.symbols_into(out);
                }
                f.symbols_into(out);
            }
        }
    }

    /// Replaces every occurrence of `marker` (outside updates' value terms) by `with`.
    pub fn replace(&self, marker: &Formula, with: &Formula) -> Formula {
        if self == marker {
            return with.clone();
        }
        let r = |f: &Formula| Box::new(f.replace(marker, with));
        match self {
            Formula::Not(a) => Formula::Not(r(a)),
            Formula::And(a, b) => Formula::And(r(a), r(b)),
            Formula::Or(a, b) => Formula::Or(r(a), r(b)),
            Formula::Imp(a, b) => Formula::Imp(r(a), r(b)),
            Formula::Box(p, post) => Formula::Box(p.clone(), r(post)),
            Formula::Upd(u, f) => Formula::Upd(u.clone(), r(f)),
            other => other.clone(),
        }
    }
}

/// Program variables occurring in `f`, including inside box programs and update targets.
pub fn free_prog_vars(f: &Formula) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    f.symbols_into(&mut out);
    out.retain(|s| !s.contains('#'));
    out
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 9,
    }
}

fn write_formula(f: &mut Formatter<'_>, fm: &Formula, min_prec: u8) -> fmt::Result {
    let p = prec(fm);
    let paren = p < min_prec;
    if paren {
        f.write_str("(")?;
    }
    match fm {
        Formula::True => f.write_str("true")?,
        Formula::False => f.write_str("false")?,
        Formula::Atom(rel, l, r) => {
            write_term(f, l, 5)?;
            write!(f, " {} ", rel.symbol())?;
            write_term(f, r, 5)?;
        }
        Formula::Not(a) => {
            f.write_str("!(")?;
            write_formula(f, a, 0)?;
            f.write_str(")")?;
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            write_formula(f, a, p)?;
            f.write_str(if matches!(fm, Formula::And(..)) { " && " } else { " || " })?;
            write_formula(f, b, p + 1)?;
        }
        Formula::Imp(a, b) => {
            write_formula(f, a, p + 1)?;
            f.write_str(" -> ")?;
            write_formula(f, b, p)?;
        }
        Formula::Box(prog, post) => {
            write!(f, "[{}](", ProgramDisplay(prog))?;
            write_formula(f, post, 0)?;
            f.write_str(")")?;
        }
        Formula::Upd(u, inner) => {
            write!(f, "{u}")?;
            match **inner {
                Formula::Box(..) | Formula::Upd(..) => write_formula(f, inner, 0)?,
                _ => {
                    f.write_str("(")?;
                    write_formula(f, inner, 0)?;
                    f.write_str(")")?;
                }
            }
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}
