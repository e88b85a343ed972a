//! Parallel updates with last-wins clash resolution.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt::{self, Display, Formatter};

use super::formula::{Formula, Term};
use crate::syntax::Ident;

/// Flat parallel update `v1 := t1 || ... || vn := tn`.
///
/// All value terms are evaluated in the pre-state; on duplicate targets the
/// rightmost element wins.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Update(Vec<(Ident, Term)>);

impl Update {
    pub fn empty() -> Self {
        Update(Vec::new())
    }

    pub fn elem(var: impl Into<Ident>, value: Term) -> Self {
        Update(alloc::vec![(var.into(), value)])
    }

    pub fn from_elems(elems: Vec<(Ident, Term)>) -> Self {
        Update(elems)
    }

    pub fn elems(&self) -> &[(Ident, Term)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The effective binding of `var` (rightmost element).
    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.iter().rev().find(|(v, _)| v == var).map(|(_, t)| t)
    }

    /// Drops elements overridden by a later element with the same target.
    pub fn normalized(&self) -> Update {
        let mut out: Vec<(Ident, Term)> = Vec::new();
        for (i, (v, t)) in self.0.iter().enumerate() {
            if !self.0[i + 1..].iter().any(|(w, _)| w == v) {
                out.push((v.clone(), t.clone()));
            }
        }
        Update(out)
    }

    /// Sequential composition: `{self}{then}` as one update.
    pub fn then(&self, then: &Update) -> Update {
        let mut out = self.0.clone();
        for (v, t) in &then.0 {
            out.push((v.clone(), apply_to_term(self, t)));
        }
        Update(out)
    }
}

/// `u1 || u2`: u1's elements followed by u2's.
pub fn parallel_compose(u1: &Update, u2: &Update) -> Update {
    let mut elems = u1.0.clone();
    elems.extend(u2.0.iter().cloned());
    Update(elems)
}

pub fn apply_to_term(u: &Update, t: &Term) -> Term {
    match t {
        Term::Var(v) => u.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Arith(op, l, r) => Term::arith(*op, apply_to_term(u, l), apply_to_term(u, r)),
        other => other.clone(),
    }
}

/// Applies `u` to `f`: substitutes into modality-free parts and leaves
/// `{u}[p]post` pending in front of every box.
pub fn apply_update(u: &Update, f: &Formula) -> Formula {
    if u.is_empty() {
        return f.clone();
    }
    let rec = |g: &Formula| Box::new(apply_update(u, g));
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(rel, l, r) => Formula::Atom(*rel, apply_to_term(u, l), apply_to_term(u, r)),
        Formula::Not(a) => Formula::Not(rec(a)),
        Formula::And(a, b) => Formula::And(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
        Formula::Imp(a, b) => Formula::Imp(rec(a), rec(b)),
        Formula::Box(..) => Formula::Upd(u.clone(), Box::new(f.clone())),
        Formula::Upd(inner, g) => match **g {
            Formula::Box(..) => Formula::Upd(u.then(inner), g.clone()),
            _ => apply_update(u, &apply_update(inner, g)),
        },
    }
}

impl Display for Update {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            write!(f, "{v} := {t}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn substitution_and_last_wins() {
        let u = Update::elem("b", Term::Bool(true));
        assert_eq!(
            apply_update(&u, &Formula::is_true("b")),
            Formula::eq(Term::Bool(true), Term::Bool(true))
        );
        let clash = parallel_compose(&Update::elem("i", Term::Int(3)), &Update::elem("i", Term::Int(5)));
        assert_eq!(clash.to_string(), "{i := 3 || i := 5}");
        assert_eq!(clash.get("i"), Some(&Term::Int(5)));
        assert_eq!(clash.normalized().to_string(), "{i := 5}");
    }

    #[test]
    fn boxes_keep_update_pending() {
        let u = Update::elem("x", Term::Bool(true));
        let b = Formula::modality(alloc::vec![], Formula::is_true("x"));
        assert_eq!(apply_update(&u, &b), Formula::Upd(u.clone(), Box::new(b.clone())));
        let inner = Update::elem("y", Term::var("x"));
        let nested = Formula::Upd(inner, Box::new(b.clone()));
        match apply_update(&u, &nested) {
            Formula::Upd(c, _) => assert_eq!(c.to_string(), "{x := true || y := true}"),
            other => panic!("{other}"),
        }
    }
}
