//! Differential soundness testing of the program-rewriting rules.
//!
//! Random programs are symbolically executed along random paths. Each rule
//! application met on the way is checked against the interpreter: for every
//! test state, the conclusion and the conjunction of the premises must agree
//! when the postcondition is replaced by "the final state equals the one the
//! conclusion's program reaches", and again when it is replaced by `false`
//! (which separates normal from abrupt termination).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::names::*;
use crate::calculus::{
    apply_eager, focus, normalize_step, unwind_for_loop, unwind_while_loop, Fault, Goal,
    NormalStep, RuleApplication, RuleContext,
};
use crate::dl::{Formula, Sequent, Term};
use crate::gen::{random_program, GenConfig};
use crate::interp::{run_owned, ConcreteState, Outcome, Value};
use crate::semantics::{eval_sequent, eval_term, Valuation};
use crate::syntax::{infer_sorts, print_program, validate_program, Expr, Ident, Signature, Sort, Stmt};

/// Name under which all basic symbolic-execution rules are counted.
pub const BASIC_SE_GROUP: &str = "basicSE";

/// The rule groups a full run must cover.
pub const RULE_GROUPS: [&str; 7] = [
    BASIC_SE_GROUP,
    EMPTY_INDEXED_LOOP_SCOPE,
    CONTINUE_INDEXED_LOOP_SCOPE,
    BREAK_INDEXED_LOOP_SCOPE,
    PULL_OUT_LOOP_INITIALIZER,
    UNWIND_WHILE_LOOP,
    UNWIND_FOR_LOOP,
];

pub fn group_of(rule: &str) -> Option<&'static str> {
    if BASIC_SE.contains(&rule) {
        return Some(BASIC_SE_GROUP);
    }
    RULE_GROUPS.iter().copied().find(|g| *g == rule)
}

const THREW: &str = "threw";
const EXVAL: &str = "exval";
const UNWINDS_PER_WALK: u32 = 4;
const STEPS_PER_WALK: u32 = 400;
const WALKS_PER_PROGRAM: u32 = 3;
const CHECKS_PER_WALK: u32 = 4;

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub seed: u64,
    /// Checked applications wanted per rule group.
    pub trials: u64,
    /// Restricts checking to one rule, or to all basic rules with `basicSE`.
    pub rule: Option<String>,
    /// Exhaustive test states use integers in `[-domain_bound, domain_bound]`.
    pub domain_bound: i64,
    /// Additional random states per application, drawn from a wider range.
    pub random_states: usize,
    pub fuel: u64,
    /// Gives up after this many programs even if some group is short of trials.
    pub max_programs: u64,
    pub fault: Option<Fault>,
    pub gen: GenConfig,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 42,
            trials: 1000,
            rule: None,
            domain_bound: 2,
            random_states: 16,
            fuel: 300,
            max_programs: 200_000,
            fault: None,
            gen: GenConfig::default(),
        }
    }
}

impl FuzzConfig {
    fn selects(&self, rule: &str) -> bool {
        match &self.rule {
            None => group_of(rule).is_some(),
            Some(r) => r == rule || (r == BASIC_SE_GROUP && BASIC_SE.contains(&rule)),
        }
    }

    /// Groups whose trial counts decide when the run is done.
    pub fn target_groups(&self) -> Vec<&'static str> {
        match &self.rule {
            None => RULE_GROUPS.to_vec(),
            Some(r) => group_of(r).into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleStats {
    /// Checked applications.
    pub trials: u64,
    /// States on which conclusion and premises were compared.
    pub states: u64,
    /// States skipped because a run ran out of fuel.
    pub skipped: u64,
    pub counterexamples: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzCounterexample {
    pub rule: &'static str,
    pub program: String,
    pub state: Valuation,
    pub conclusion: String,
    pub premises: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub programs: u64,
    /// Per rule name.
    pub rules: BTreeMap<&'static str, RuleStats>,
    pub counterexamples: Vec<FuzzCounterexample>,
}

impl FuzzReport {
    pub fn group_trials(&self, group: &str) -> u64 {
        self.rules.iter().filter(|(r, _)| group_of(r) == Some(group) || **r == group).map(|(_, s)| s.trials).sum()
    }
}

/// The formula standing for the postcondition while a path is explored.
fn marker() -> Formula {
    Formula::eq(Term::var("post@"), Term::Int(0))
}

/// `try { P } catch (ex) { threw = true; exval = ex; }`: every exception ends up in the state.
pub fn wrap(program: Vec<Stmt>) -> Vec<Stmt> {
    let handler = vec![Stmt::assign(THREW, Expr::Bool(true)), Stmt::assign(EXVAL, Expr::var("ex"))];
    vec![Stmt::TryCatch(program, "ex".into(), handler)]
}

pub fn fuzz_rules(cfg: &FuzzConfig) -> FuzzReport {
    let mut report = FuzzReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let targets = cfg.target_groups();
    let mut reported: Vec<&'static str> = Vec::new();
    while report.programs < cfg.max_programs && targets.iter().any(|g| report.group_trials(g) < cfg.trials) {
        report.programs += 1;
        let program = random_program(&mut rng, &cfg.gen);
        let walk_seed: u64 = rng.gen();
        // every rule keeps being checked until it has its own quota
        let need = |rule: &str, report: &FuzzReport| report.rules.get(rule).map_or(0, |s| s.trials) < cfg.trials;
        let found = run_trial(cfg, &program, walk_seed, &mut report, &need);
        for (rule, cx) in found {
            if reported.contains(&rule) {
                continue;
            }
            reported.push(rule);
            report.counterexamples.push(minimize(cfg, program.clone(), walk_seed, rule).unwrap_or(cx));
        }
    }
    report
}

type Need<'a> = dyn Fn(&str, &FuzzReport) -> bool + 'a;

/// Walks `program` and checks the selected rule applications; returns the
/// first counterexample per rule.
fn run_trial(
    cfg: &FuzzConfig,
    program: &[Stmt],
    walk_seed: u64,
    report: &mut FuzzReport,
    need: &Need<'_>,
) -> Vec<(&'static str, FuzzCounterexample)> {
    let Some(setup) = Setup::new(cfg, program) else { return Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
    let mut found: Vec<(&'static str, FuzzCounterexample)> = Vec::new();
    for _ in 0..WALKS_PER_PROGRAM {
        let mut ctx = RuleContext::for_sequent(&setup.root.sequent, setup.sig.clone());
        ctx.options.fault = cfg.fault;
        let mut goal = setup.root.clone();
        let (mut unwinds, mut checks) = (0, BTreeMap::<&'static str, u32>::new());
        for _ in 0..STEPS_PER_WALK {
            if let NormalStep::Applied(app) = normalize_step(&goal) {
                goal = app.premises[rng.gen_range(0..app.premises.len())].clone();
                continue;
            }
            if !goal.sequent.has_modality() {
                break;
            }
            let app = match apply_eager(&mut ctx, &goal) {
                Ok(Some(app)) => app,
                Ok(None) if unwinds < UNWINDS_PER_WALK => {
                    unwinds += 1;
                    match unwind_while_loop(&mut ctx, &goal).or_else(|_| unwind_for_loop(&mut ctx, &goal)) {
                        Ok(app) => app,
                        Err(_) => break,
                    }
                }
                _ => break,
            };
            let count = checks.entry(app.rule).or_insert(0);
            if cfg.selects(app.rule) && *count < CHECKS_PER_WALK && need(app.rule, report) {
                *count += 1;
                let stats = report.rules.entry(app.rule).or_default();
                stats.trials += 1;
                let states = setup.states(&mut rng);
                match check_application(&app, &states, cfg.fuel, stats) {
                    None => {}
                    Some(state) => {
                        stats.counterexamples += 1;
                        if !found.iter().any(|(r, _)| *r == app.rule) {
                            found.push((app.rule, counterexample(&app, program, state)));
                        }
                    }
                }
            }
            if app.premises.is_empty() {
                break;
            }
            goal = app.premises[rng.gen_range(0..app.premises.len())].clone();
        }
    }
    found
}

struct Setup {
    root: Goal,
    sig: Signature,
    exhaustive: Vec<Valuation>,
    globals: Vec<(Ident, Sort)>,
    bound: i64,
    random_states: usize,
}

impl Setup {
    fn new(cfg: &FuzzConfig, program: &[Stmt]) -> Option<Setup> {
        let wrapped = wrap(program.to_vec());
        validate_program(&wrapped).ok()?;
        let globals = cfg.gen.globals();
        let mut known = Signature::new();
        for (v, s) in &globals {
            known.insert(v.clone(), *s);
        }
        known.insert(THREW, Sort::Bool);
        known.insert(EXVAL, Sort::Int);
        let sig = infer_sorts(&wrapped, &[], &known).ok()?;
        let root = Goal::new(Sequent::new(vec![], vec![Formula::modality(wrapped, marker())]));
        let bound = cfg.domain_bound;
        let exhaustive = crate::interp::test_states(&globals, -bound, bound, 0, 0)
            .iter()
            .map(|st| with_handler_vars(st.globals().clone()))
            .collect();
        Some(Setup { root, sig, exhaustive, globals, bound, random_states: cfg.random_states })
    }

    fn states(&self, rng: &mut ChaCha8Rng) -> Vec<Valuation> {
        let wide = self.bound + 3;
        let mut out = self.exhaustive.clone();
        for _ in 0..self.random_states {
            let val = self
                .globals
                .iter()
                .map(|(v, s)| {
                    let value = match s {
                        Sort::Int => Value::Int(rng.gen_range(-wide..=wide)),
                        Sort::Bool => Value::Bool(rng.gen_bool(0.5)),
                    };
                    (v.clone(), value)
                })
                .collect();
            out.push(with_handler_vars(val));
        }
        out
    }
}

fn with_handler_vars(mut val: Valuation) -> Valuation {
    val.insert(THREW.into(), Value::Bool(false));
    val.insert(EXVAL.into(), Value::Int(0));
    val
}

fn with_post(seq: &Sequent, post: &Formula) -> Sequent {
    let m = marker();
    let map = |fs: &[Formula]| fs.iter().map(|f| f.replace(&m, post)).collect();
    Sequent::new(map(&seq.antecedent), map(&seq.succedent))
}

/// Name under which a state's expected final value of `v` is passed.
fn expected(v: &str) -> Ident {
    format!("{v}@end")
}

/// "The final state agrees with the expected values on `vars`."
fn state_formula(vars: &[Ident]) -> Formula {
    Formula::conj(vars.iter().map(|v| Formula::eq(Term::var(v), Term::var(&expected(v)))))
}

/// The state on which premises and conclusion disagree, if any.
fn check_application(
    app: &RuleApplication,
    states: &[Valuation],
    fuel: u64,
    stats: &mut RuleStats,
) -> Option<Valuation> {
    let conclusion = &app.conclusion.sequent;
    let f = focus(conclusion)?;
    let vars: Vec<Ident> = states.first()?.keys().cloned().collect();
    let star = state_formula(&vars);
    let context = with_post(&Sequent::new(
        conclusion.antecedent.clone(),
        conclusion.succedent.iter().enumerate().filter(|(i, _)| *i != f.index).map(|(_, g)| g.clone()).collect(),
    ), &Formula::False);
    let on_false: Vec<Sequent> = app.premises.iter().map(|p| with_post(&p.sequent, &Formula::False)).collect();
    let on_star: Vec<Sequent> = app.premises.iter().map(|p| with_post(&p.sequent, &star)).collect();
    'states: for val in states {
        // states where the conclusion holds for reasons other than its focus say nothing
        match eval_sequent(&context, val, fuel) {
            Some(false) => {}
            Some(true) => continue,
            None => {
                stats.skipped += 1;
                continue;
            }
        }
        let mut start = val.clone();
        for (v, t) in f.update.elems() {
            match eval_term(t, val) {
                Some(x) => start.insert(v.clone(), x),
                None => continue 'states,
            };
        }
        start.retain(|k, _| !k.contains('#'));
        let outcome = match run_owned(&f.program, ConcreteState::from_globals(start), fuel) {
            Ok(Outcome::FuelExhausted) => {
                stats.skipped += 1;
                continue;
            }
            Ok(o) => o,
            Err(_) => return Some(val.clone()),
        };
        let cases: Vec<(&[Sequent], Valuation, bool)> = match &outcome {
            Outcome::Normal(end) => {
                let mut with_end = val.clone();
                for v in &vars {
                    match end.get(v) {
                        Some(x) => with_end.insert(expected(v), x),
                        None => return Some(val.clone()),
                    };
                }
                vec![(&on_false, val.clone(), false), (&on_star, with_end, true)]
            }
            _ => vec![(&on_false, val.clone(), true)],
        };
        for (premises, at, want) in cases {
            let mut all = true;
            for p in premises {
                match eval_sequent(p, &at, fuel) {
                    Some(b) => all &= b,
                    None => {
                        stats.skipped += 1;
                        continue 'states;
                    }
                }
            }
            if all != want {
                return Some(val.clone());
            }
        }
        stats.states += 1;
    }
    None
}

fn counterexample(app: &RuleApplication, program: &[Stmt], state: Valuation) -> FuzzCounterexample {
    FuzzCounterexample {
        rule: app.rule,
        program: print_program(program),
        state,
        conclusion: app.conclusion.sequent.to_string(),
        premises: app.premises.iter().map(|p| p.sequent.to_string()).collect(),
    }
}

/// Counterexample for `rule` on `program` alone, with every rule of the
/// walk still applied but only `rule` checked.
fn reproduce(cfg: &FuzzConfig, program: &[Stmt], walk_seed: u64, rule: &'static str) -> Option<FuzzCounterexample> {
    let single = FuzzConfig { rule: Some(rule.to_string()), ..cfg.clone() };
    let mut scratch = FuzzReport::default();
    let found = run_trial(&single, program, walk_seed, &mut scratch, &|_, _| true);
    found.into_iter().find(|(r, _)| *r == rule).map(|(_, cx)| cx)
}

/// Greedy statement deletion while the counterexample persists.
fn minimize(cfg: &FuzzConfig, mut program: Vec<Stmt>, walk_seed: u64, rule: &'static str) -> Option<FuzzCounterexample> {
    let mut best = reproduce(cfg, &program, walk_seed, rule)?;
    'outer: loop {
        for candidate in deletions(&program) {
            if let Some(cx) = reproduce(cfg, &candidate, walk_seed, rule) {
                program = candidate;
                best = cx;
                continue 'outer;
            }
        }
        return Some(best);
    }
}

/// Every program obtained by deleting one statement, at any depth.
fn deletions(prog: &[Stmt]) -> Vec<Vec<Stmt>> {
    let mut out = Vec::new();
    for i in 0..prog.len() {
        let mut v = prog.to_vec();
        v.remove(i);
        out.push(v);
        for s in stmt_deletions(&prog[i]) {
            let mut v = prog.to_vec();
            v[i] = s;
            out.push(v);
        }
    }
    out
}

fn stmt_deletions(s: &Stmt) -> Vec<Stmt> {
    use alloc::boxed::Box;
    let inner = |body: &Stmt, make: &dyn Fn(Stmt) -> Stmt| -> Vec<Stmt> {
        let mut v: Vec<Stmt> = stmt_deletions(body).into_iter().map(make).collect();
        if !matches!(body, Stmt::Skip | Stmt::Block(_)) {
            v.push(make(Stmt::Skip));
        }
        v
    };
    match s {
        Stmt::Block(b) => deletions(b).into_iter().map(Stmt::Block).collect(),
        Stmt::Labeled(ls, body) => inner(body, &|b| Stmt::Labeled(ls.clone(), Box::new(b))),
        Stmt::If(c, t, e) => {
            let mut v = inner(t, &|t| Stmt::If(c.clone(), Box::new(t), e.clone()));
            if let Some(e) = e {
                v.push(Stmt::If(c.clone(), t.clone(), None));
                v.extend(inner(e, &|e| Stmt::If(c.clone(), t.clone(), Some(Box::new(e)))));
            }
            v
        }
        Stmt::While(c, body) => inner(body, &|b| Stmt::While(c.clone(), Box::new(b))),
        Stmt::For { init, guard, update, body } => inner(body, &|b| Stmt::For {
            init: init.clone(),
            guard: guard.clone(),
            update: update.clone(),
            body: Box::new(b),
        }),
        Stmt::TryCatch(t, v, c) => {
            let mut out: Vec<Stmt> = deletions(t).into_iter().map(|t| Stmt::TryCatch(t, v.clone(), c.clone())).collect();
            out.extend(deletions(c).into_iter().map(|c| Stmt::TryCatch(t.clone(), v.clone(), c)));
            out
        }
        _ => Vec::new(),
    }
}

/// Renders a valuation as `k=v, ...`.
pub fn render_state(val: &Valuation) -> String {
    let parts: Vec<String> = val.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.join(", ")
}
