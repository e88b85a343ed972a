use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Display, Formatter};

use crate::dl::{Formula, Rel, Sequent, Term};
use crate::interp::Value;
use crate::semantics::{eval_formula, Valuation};
use crate::syntax::{Ident, Signature, Sort};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureStatus {
    ClosedValid,
    Open,
    /// A falsifying assignment to every symbol of the sequent.
    Refuted(Valuation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClosureMethod {
    Syntactic,
    Bounded(i64),
    External,
}

impl Display for ClosureMethod {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ClosureMethod::Syntactic => f.write_str("syntactic"),
            ClosureMethod::Bounded(b) => write!(f, "bounded({b})"),
            ClosureMethod::External => f.write_str("external"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureResult {
    pub status: ClosureStatus,
    pub method: ClosureMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundedConfig {
    pub bound: i64,
    /// Maximum number of assignments enumerated before giving up.
    pub budget: u64,
}

impl Default for BoundedConfig {
    fn default() -> Self {
        BoundedConfig { bound: 4, budget: 1_000_000 }
    }
}

/// Sort of a symbol; fresh constants `v#k` take the sort of `v`.
pub fn symbol_sort(sym: &str, sig: &Signature) -> Sort {
    sig.sort_of(sym.split('#').next().unwrap_or(sym))
}

fn pinned(seq: &Sequent) -> BTreeMap<Ident, Value> {
    let mut out = BTreeMap::new();
    for f in &seq.antecedent {
        if let Formula::Atom(Rel::Eq, l, r) = f {
            let (sym, c) = match (l, r) {
                (Term::Var(s) | Term::Fresh(s), c) | (c, Term::Var(s) | Term::Fresh(s)) => (s, c),
                _ => continue,
            };
            let v = match c {
                Term::Int(i) => Value::Int(*i),
                Term::Bool(b) => Value::Bool(*b),
                _ => continue,
            };
            out.entry(sym.clone()).or_insert(v);
        }
    }
    out
}

/// Decides a modality-free sequent by enumerating every assignment of
/// `[-bound, bound]` to integer symbols and both truth values to boolean ones.
///
/// A symbol fixed by a top-level antecedent equation `s == c` is only tried at
/// `c`; every other value falsifies the antecedent anyway. Assignments are
/// visited in lexicographic order over the sorted symbol names, so a refutation
/// carries the least counterexample.
pub fn bounded_valid(seq: &Sequent, sig: &Signature, cfg: BoundedConfig) -> ClosureResult {
    let method = ClosureMethod::Bounded(cfg.bound);
    if seq.is_axiom() {
        return ClosureResult { status: ClosureStatus::ClosedValid, method: ClosureMethod::Syntactic };
    }
    if seq.has_modality() {
        return ClosureResult { status: ClosureStatus::Open, method };
    }
    let formula = seq.as_formula();
    let mut syms = BTreeSet::new();
    formula.symbols_into(&mut syms);
    let pins = pinned(seq);
    let domains: Vec<(Ident, Vec<Value>)> = syms
        .into_iter()
        .map(|s| {
            let dom = match pins.get(&s) {
                Some(v) => vec![*v],
                None => match symbol_sort(&s, sig) {
                    Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
                    Sort::Int => (-cfg.bound..=cfg.bound).map(Value::Int).collect(),
                },
            };
            (s, dom)
        })
        .collect();
    let total = domains.iter().try_fold(1u64, |acc, (_, d)| acc.checked_mul(d.len() as u64));
    if total.is_none_or(|t| t > cfg.budget) {
        return ClosureResult { status: ClosureStatus::Open, method };
    }
    let mut idx = vec![0usize; domains.len()];
    loop {
        let val: Valuation = domains.iter().zip(&idx).map(|((s, d), &i)| (s.clone(), d[i])).collect();
        if eval_formula(&formula, &val, 0) == Some(false) {
            return ClosureResult { status: ClosureStatus::Refuted(val), method };
        }
        // odometer with the last symbol varying fastest
        let mut k = idx.len();
        loop {
            if k == 0 {
                return ClosureResult { status: ClosureStatus::ClosedValid, method };
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].1.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::parse_formula;

    fn seq(ante: &[&str], succ: &[&str]) -> Sequent {
        let sig = Signature::new();
        let p = |s: &&str| parse_formula(s, &sig).unwrap();
        Sequent::new(ante.iter().map(p).collect(), succ.iter().map(p).collect())
    }

    #[test]
    fn reflexive_equality_is_valid() {
        let r = bounded_valid(&seq(&[], &["i == i"]), &Signature::new(), BoundedConfig { bound: 2, budget: 100 });
        assert_eq!(r.status, ClosureStatus::ClosedValid);
    }

    #[test]
    fn least_counterexample() {
        let cfg = BoundedConfig { bound: 5, budget: 1000 };
        let r = bounded_valid(&seq(&[], &["i < 5"]), &Signature::new(), cfg);
        let ClosureStatus::Refuted(v) = r.status else { panic!("{r:?}") };
        assert_eq!(v["i"], Value::Int(5));
        let r = bounded_valid(&seq(&[], &["i < 5"]), &Signature::new(), BoundedConfig::default());
        assert_eq!(r.status, ClosureStatus::ClosedValid);
        let r = bounded_valid(&seq(&["0 <= i"], &["i < j"]), &Signature::new(), BoundedConfig { bound: 1, budget: 10 });
        let ClosureStatus::Refuted(v) = r.status else { panic!() };
        assert_eq!((v["i"], v["j"]), (Value::Int(0), Value::Int(-1)));
    }

    #[test]
    fn budget_and_pins() {
        let s = seq(&[], &["a + b + c + d + e + f + g + h + k == 0"]);
        let r = bounded_valid(&s, &Signature::new(), BoundedConfig::default());
        assert_eq!(r.status, ClosureStatus::Open);
        let s = seq(&["n == 3", "s == i", "i <= n", "!(i < n)"], &["s == n"]);
        let r = bounded_valid(&s, &Signature::new(), BoundedConfig::default());
        assert_eq!(r, ClosureResult { status: ClosureStatus::ClosedValid, method: ClosureMethod::Bounded(4) });
    }
}
