use alloc::vec::Vec;
use core::fmt::{self, Display, Formatter};

use super::formula::Formula;

/// `antecedent ==> succedent`: the conjunction of the antecedent implies the
/// disjunction of the succedent.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Vec<Formula>,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Vec<Formula>) -> Self {
        Sequent { antecedent, succedent }
    }

    pub fn has_modality(&self) -> bool {
        self.antecedent.iter().chain(&self.succedent).any(Formula::has_modality)
    }

    /// Syntactic closure: `true` on the right, `false` on the left, or a formula on both sides.
    pub fn is_axiom(&self) -> bool {
        self.succedent.contains(&Formula::True)
            || self.antecedent.contains(&Formula::False)
            || self.antecedent.iter().any(|a| self.succedent.contains(a))
    }

    /// The sequent as a single formula `/\ante -> \/succ`.
    pub fn as_formula(&self) -> Formula {
        let ante = Formula::conj(self.antecedent.iter().cloned());
        let succ = self.succedent.iter().cloned().reduce(Formula::or).unwrap_or(Formula::False);
        Formula::imp(ante, succ)
    }
}

impl Display for Sequent {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (i, a) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(if self.antecedent.is_empty() { "==> " } else { " ==> " })?;
        for (i, s) in self.succedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}
