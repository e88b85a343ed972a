use std::collections::BTreeMap;

use loopscope_core::dl::{apply_update, ArithOp, Formula, Rel, Sequent, Term, Update};
use loopscope_core::interp::Value;
use loopscope_core::semantics::{eval_formula, eval_sequent, Valuation};
use loopscope_core::solver::{bounded_valid, emit_smt, simplify, BoundedConfig, ClosureStatus};
use loopscope_core::syntax::{Signature, Sort};
use proptest::prelude::*;

const INTS: [&str; 3] = ["i", "j", "k"];
const BOOLS: [&str; 2] = ["b", "c"];

fn sig() -> Signature {
    let mut s = Signature::new();
    for v in INTS {
        s.insert(v, Sort::Int);
    }
    for v in BOOLS {
        s.insert(v, Sort::Bool);
    }
    s
}

fn term_over(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(-3i64..=3).prop_map(Term::Int), prop::sample::select(vars).prop_map(Term::var)];
    leaf.prop_recursive(2, 8, 2, |inner| {
        (prop::sample::select(&[ArithOp::Add, ArithOp::Sub, ArithOp::Mul][..]), inner.clone(), inner)
            .prop_map(|(op, l, r)| Term::arith(op, l, r))
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let int_atom = (prop::sample::select(&[Rel::Eq, Rel::Lt, Rel::Le][..]), term_over(&INTS), term_over(&INTS))
        .prop_map(|(r, a, b)| Formula::Atom(r, a, b));
    let bool_atom = (prop::sample::select(&BOOLS[..]), prop_oneof![
        any::<bool>().prop_map(Term::Bool),
        prop::sample::select(&BOOLS[..]).prop_map(Term::var),
    ])
    .prop_map(|(v, t)| Formula::eq(Term::var(v), t));
    let leaf = prop_oneof![4 => int_atom, 2 => bool_atom, 1 => Just(Formula::True), 1 => Just(Formula::False)];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)),
        ]
    })
}

fn sequent() -> impl Strategy<Value = Sequent> {
    (prop::collection::vec(formula(), 0..3), prop::collection::vec(formula(), 1..3))
        .prop_map(|(a, s)| Sequent::new(a, s))
}

fn all_states(vars: &[&str], lo: i64, hi: i64) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|st| {
                (lo..=hi).map(move |x| {
                    let mut st = st.clone();
                    st.insert((*v).into(), Value::Int(x));
                    st
                })
            })
            .collect();
    }
    out
}

fn eval_int(t: &Term, st: &Valuation) -> i64 {
    match t {
        Term::Int(v) => *v,
        Term::Var(v) => match st[v] {
            Value::Int(x) => x,
            Value::Bool(_) => panic!("sort"),
        },
        Term::Arith(op, l, r) => op.eval(eval_int(l, st), eval_int(r, st)),
        _ => panic!("unexpected term {t:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Simultaneous reading with rightmost override equals sequential assignment
    // when no value term reads a target.
    #[test]
    fn last_wins_matches_sequential_assignment(
        elems in prop::collection::vec((prop::sample::select(&["i", "j", "k"][..]), term_over(&["m", "n"])), 1..5)
    ) {
        let u = Update::from_elems(elems.iter().map(|(v, t)| ((*v).into(), t.clone())).collect());
        for st in all_states(&["i", "j", "k", "m", "n"], -2, 2).into_iter().step_by(7) {
            let mut seq = st.clone();
            for (v, t) in &elems {
                let x = eval_int(t, &seq);
                seq.insert((*v).into(), Value::Int(x));
            }
            for v in INTS {
                let expect = Formula::eq(Term::var(v), Term::Int(match seq[v] { Value::Int(x) => x, _ => unreachable!() }));
                prop_assert_eq!(eval_formula(&Formula::upd(u.clone(), expect), &st, 10), Some(true));
            }
        }
    }

    #[test]
    fn update_application_is_idempotent(
        elems in prop::collection::vec((prop::sample::select(&["i", "j"][..]), term_over(&["k"])), 0..4),
        f in formula(),
    ) {
        let u = Update::from_elems(elems.into_iter().map(|(v, t)| (v.into(), t)).collect());
        let once = apply_update(&u, &f);
        prop_assert_eq!(apply_update(&u, &once), once);
    }

    #[test]
    fn axiom_sequents_close(mut s in sequent(), left in any::<bool>()) {
        if left {
            s.antecedent.push(Formula::False);
        } else {
            s.succedent.push(Formula::True);
        }
        let r = bounded_valid(&s, &sig(), BoundedConfig { bound: 2, ..BoundedConfig::default() });
        prop_assert_eq!(r.status, ClosureStatus::ClosedValid);
        prop_assert_eq!(eval_sequent(&s, &Valuation::new(), 10), Some(true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn simplification_keeps_bounded_verdict(s in sequent()) {
        let cfg = BoundedConfig { bound: 2, ..BoundedConfig::default() };
        let simple = Sequent::new(
            s.antecedent.iter().map(simplify).collect(),
            s.succedent.iter().map(simplify).collect(),
        );
        let valid = |q: &Sequent| match bounded_valid(q, &sig(), cfg).status {
            ClosureStatus::ClosedValid => true,
            ClosureStatus::Refuted(_) => false,
            ClosureStatus::Open => panic!("budget exceeded"),
        };
        prop_assert_eq!(valid(&s), valid(&simple));
    }

    #[test]
    fn refutations_falsify_and_satisfy_the_smt_script(s in sequent()) {
        let cfg = BoundedConfig { bound: 2, ..BoundedConfig::default() };
        if let ClosureStatus::Refuted(cex) = bounded_valid(&s, &sig(), cfg).status {
            prop_assert_eq!(eval_sequent(&s, &cex, 10), Some(false));
            let script = emit_smt(&s, &sig()).unwrap();
            prop_assert!(smt::model_satisfies(&script, &cex), "{}", script);
        }
    }
}

/// Just enough SMT-LIB to check a model against the exported scripts.
mod smt {
    use super::*;

    #[derive(Debug)]
    enum Sx {
        Atom(String),
        List(Vec<Sx>),
    }

    fn parse(text: &str) -> Vec<Sx> {
        let mut toks = Vec::new();
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '(' | ')' => toks.push(c.to_string()),
                '|' => {
                    let name: String = chars.by_ref().take_while(|&c| c != '|').collect();
                    toks.push(format!("|{name}"));
                }
                c if c.is_whitespace() => {}
                c => {
                    let mut s = c.to_string();
                    while let Some(&n) = chars.peek() {
                        if n == '(' || n == ')' || n.is_whitespace() {
                            break;
                        }
                        s.push(n);
                        chars.next();
                    }
                    toks.push(s);
                }
            }
        }
        let mut stack = vec![Vec::new()];
        for t in toks {
            match t.as_str() {
                "(" => stack.push(Vec::new()),
                ")" => {
                    let l = stack.pop().unwrap();
                    stack.last_mut().unwrap().push(Sx::List(l));
                }
                _ => stack.last_mut().unwrap().push(Sx::Atom(t)),
            }
        }
        stack.pop().unwrap()
    }

    fn eval(e: &Sx, m: &BTreeMap<String, Value>) -> Value {
        let int = |e: &Sx| match eval(e, m) {
            Value::Int(x) => x,
            v => panic!("expected int, got {v:?}"),
        };
        let boolean = |e: &Sx| match eval(e, m) {
            Value::Bool(x) => x,
            v => panic!("expected bool, got {v:?}"),
        };
        match e {
            Sx::Atom(a) if a == "true" => Value::Bool(true),
            Sx::Atom(a) if a == "false" => Value::Bool(false),
            Sx::Atom(a) if a.starts_with('|') => m[&a[1..]],
            Sx::Atom(a) => Value::Int(a.parse().unwrap()),
            Sx::List(l) => {
                let Sx::Atom(op) = &l[0] else { panic!("head") };
                let args = &l[1..];
                match (op.as_str(), args.len()) {
                    ("-", 1) => Value::Int(-int(&args[0])),
                    ("+", 2) => Value::Int(int(&args[0]) + int(&args[1])),
                    ("-", 2) => Value::Int(int(&args[0]) - int(&args[1])),
                    ("*", 2) => Value::Int(int(&args[0]) * int(&args[1])),
                    ("<", 2) => Value::Bool(int(&args[0]) < int(&args[1])),
                    ("<=", 2) => Value::Bool(int(&args[0]) <= int(&args[1])),
                    ("=", 2) => Value::Bool(eval(&args[0], m) == eval(&args[1], m)),
                    ("not", 1) => Value::Bool(!boolean(&args[0])),
                    ("and", 2) => Value::Bool(boolean(&args[0]) && boolean(&args[1])),
                    ("or", 2) => Value::Bool(boolean(&args[0]) || boolean(&args[1])),
                    ("=>", 2) => Value::Bool(!boolean(&args[0]) || boolean(&args[1])),
                    _ => panic!("unsupported {op}"),
                }
            }
        }
    }

    /// Every assertion of `script` holds under `model`, so the script is sat.
    pub fn model_satisfies(script: &str, model: &BTreeMap<String, Value>) -> bool {
        let mut declared = Vec::new();
        let mut ok = true;
        for cmd in parse(script) {
            let Sx::List(l) = cmd else { panic!("top-level atom") };
            match &l[..] {
                [Sx::Atom(c), Sx::Atom(name), _] if c == "declare-const" => declared.push(name[1..].to_string()),
                [Sx::Atom(c), body] if c == "assert" => ok &= eval(body, model) == Value::Bool(true),
                _ => {}
            }
        }
        ok && declared.iter().all(|d| model.contains_key(d))
    }
}
