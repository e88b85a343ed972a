//! Simplification and propositional splitting of formulas around modalities.

use alloc::vec;
use alloc::vec::Vec;

use super::names::*;
use super::{Goal, RuleApplication};
use crate::dl::{Formula, Sequent};
use crate::solver::simplify;

/// Outcome of [`normalize_step`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalStep {
    Applied(RuleApplication),
    /// The sequent is in the form the program rules expect.
    Normal,
}

fn simplified(seq: &Sequent) -> Sequent {
    let mut ante: Vec<Formula> = Vec::new();
    for f in seq.antecedent.iter().map(simplify) {
        if f != Formula::True && !ante.contains(&f) {
            ante.push(f);
        }
    }
    let mut succ: Vec<Formula> = Vec::new();
    for f in seq.succedent.iter().map(simplify) {
        if f != Formula::False && !succ.contains(&f) {
            succ.push(f);
        }
    }
    Sequent::new(ante, succ)
}

/// One normalization step: simplification of the whole sequent, then the
/// propositional right rules on succedent formulas that still contain a
/// modality but are not of the form `{U}[p]post`.
pub fn normalize_step(goal: &Goal) -> NormalStep {
    let seq = &goal.sequent;
    let simple = simplified(seq);
    let apply = |rule, premises| NormalStep::Applied(RuleApplication { rule, conclusion: goal.clone(), premises });
    if simple != *seq {
        return apply(SIMPLIFY, vec![goal.derive(SIMPLIFY, simple)]);
    }
    if seq.is_axiom() {
        return NormalStep::Normal;
    }
    for (i, f) in seq.antecedent.iter().enumerate() {
        let mut out = seq.clone();
        match f {
            Formula::And(a, b) => {
                out.antecedent.splice(i..=i, [(**a).clone(), (**b).clone()]);
                return apply(AND_LEFT, vec![goal.derive(AND_LEFT, out)]);
            }
            Formula::Not(a) if a.has_modality() => {
                out.antecedent.remove(i);
                out.succedent.push((**a).clone());
                return apply(NOT_LEFT, vec![goal.derive(NOT_LEFT, out)]);
            }
            _ => {}
        }
    }
    for (i, f) in seq.succedent.iter().enumerate() {
        if !f.has_modality() {
            continue;
        }
        let mut out = seq.clone();
        match f {
            Formula::And(a, b) => {
                let mut left = seq.clone();
                left.succedent[i] = (**a).clone();
                out.succedent[i] = (**b).clone();
                return apply(AND_RIGHT, vec![goal.derive(AND_RIGHT, left), goal.derive(AND_RIGHT, out)]);
            }
            Formula::Or(a, b) => {
                out.succedent.splice(i..=i, [(**a).clone(), (**b).clone()]);
                return apply(OR_RIGHT, vec![goal.derive(OR_RIGHT, out)]);
            }
            Formula::Imp(a, b) => {
                out.antecedent.push((**a).clone());
                out.succedent[i] = (**b).clone();
                return apply(IMP_RIGHT, vec![goal.derive(IMP_RIGHT, out)]);
            }
            Formula::Not(a) => {
                out.succedent.remove(i);
                out.antecedent.push((**a).clone());
                return apply(NOT_RIGHT, vec![goal.derive(NOT_RIGHT, out)]);
            }
            _ => {}
        }
    }
    NormalStep::Normal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::{Term, Update};
    use alloc::string::ToString;

    #[test]
    fn splits_loop_scope_exit() {
        let post = Formula::eq(Term::var("i"), Term::Int(1));
        let f = Formula::upd(
            Update::elem("i", Term::Int(0)),
            Formula::and(
                Formula::imp(Formula::is_true("x"), Formula::modality(vec![], post.clone())),
                Formula::imp(Formula::is_false("x"), post),
            ),
        );
        let mut g = Goal::new(Sequent::new(vec![], vec![f]));
        let mut rules = Vec::new();
        while let NormalStep::Applied(app) = normalize_step(&g) {
            rules.push(app.rule);
            g = app.premises.last().unwrap().clone();
        }
        assert_eq!(rules, [SIMPLIFY]);
        assert_eq!(g.sequent.to_string(), "==> !(x == true) && !(x == false)");
    }
}
