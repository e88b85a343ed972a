//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//! Set `BLESS=1` to rewrite the golden proof trees.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use loopscope::{load, prove_program, ProveOptions};
use loopscope_core::annotated::AnnotatedProgram;
use loopscope_core::calculus::names::*;
use loopscope_core::calculus::{
    apply_eager, focus, loop_invariant_for_with_update, normalize_step, unwind_for_loop_with_update, Fault, Goal,
    NormalStep, RuleContext,
};
use loopscope_core::dl::{Formula, Rel, Sequent, Term, Update};
use loopscope_core::fuzz::{fuzz_rules, FuzzConfig, RULE_GROUPS};
use loopscope_core::interp::{equiv_check, run, ConcreteState, EquivVerdict, Outcome, Value};
use loopscope_core::prover::{ProofTree, Prover, ProverConfig, Verdict};
use loopscope_core::semantics::{eval_formula, eval_sequent, Valuation};
use loopscope_core::syntax::{parse_program, Expr, Signature, Sort, Stmt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CHAIN_LIMIT: Duration = Duration::from_secs(1);
const EQUIV_LIMIT: Duration = Duration::from_secs(1);
const FUZZ_LIMIT: Duration = Duration::from_secs(60);
const FAULT_LIMIT: Duration = Duration::from_secs(5);
const PROOF_LIMIT: Duration = Duration::from_secs(5);
const UNWIND_LIMIT: Duration = Duration::from_secs(5);
const ORACLE_LIMIT: Duration = Duration::from_secs(10);

const FUZZ_SEED: u64 = 42;
const FUZZ_TRIALS: u64 = 1000;
const DOMAIN_BOUND: i64 = 2;
const PROOF_BOUND: i64 = 4;
const ORACLE_SAMPLES: usize = 200;
const FUEL: u64 = 10_000;

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn example(name: &str) -> PathBuf {
    manifest().join("programs").join(name)
}

fn prove_file(name: &str) -> Result<(AnnotatedProgram, ProofTree), String> {
    let ap = load(&example(name)).map_err(|e| format!("{e:#}"))?;
    let opts = ProveOptions { bound: Some(PROOF_BOUND), ..ProveOptions::default() };
    let (tree, _) = prove_program(&ap, name, &opts).map_err(|e| format!("{e:#}"))?;
    Ok((ap, tree))
}

fn expect_proved(name: &str, tree: &ProofTree) -> Result<(), String> {
    ensure(tree.verdict == Verdict::Proved, || format!("{name}: {:?}\n{}", tree.verdict, tree.render()))
}

fn uses(tree: &ProofTree, rules: &[&str]) -> Result<(), String> {
    let counts = tree.rule_counts();
    let missing: Vec<_> = rules.iter().filter(|r| !counts.contains_key(*r)).collect();
    ensure(missing.is_empty(), || format!("rules not applied: {missing:?}"))
}

// Loop-scope chain: the flag-clearing and `continue` variants of one loop
// iteration, and their simplified forms.

fn chain_sig() -> Signature {
    let mut sig = Signature::new();
    sig.insert("b", Sort::Bool);
    sig.insert("x", Sort::Bool);
    sig.insert("i", Sort::Int);
    sig
}

fn chain_root(b: bool, x: bool, src: &str) -> Sequent {
    let u = Update::from_elems(vec![
        ("b".into(), Term::Bool(b)),
        ("x".into(), Term::Bool(x)),
        ("i".into(), Term::Int(0)),
    ]);
    let post = Formula::eq(Term::var("i"), Term::Int(1));
    Sequent::new(vec![], vec![Formula::upd(u, Formula::modality(parse_program(src).unwrap(), post))])
}

const CHAIN: [(&str, bool, bool, &str); 4] = [
    ("flag_exit", true, true, "loop-scope(x) { if (b) { b = false; x = false; } if (!x) { i = i + 1; } }"),
    ("continue_exit", true, true, "loop-scope(x) { if (b) { b = false; continue; } if (!x) { i = i + 1; } }"),
    ("flag_simplified", false, false, "if (!x) { i = i + 1; }"),
    ("continue_simplified", false, true, "loop-scope(x) { continue; if (!x) { i = i + 1; } }"),
];

fn chain_tree(b: bool, x: bool, src: &str) -> ProofTree {
    let root = chain_root(b, x, src);
    Prover::new(&root, chain_sig(), BTreeMap::new(), ProverConfig::default()).run(Goal::new(root))
}

fn golden(name: &str, rendered: &str) -> Result<(), String> {
    let path = manifest().join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&path, rendered).map_err(|e| e.to_string())?;
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    ensure(want == rendered, || format!("{name}: proof tree differs from golden file\n{rendered}"))
}

fn leaf_set(t: &ProofTree) -> BTreeSet<String> {
    t.leaves().map(|n| n.goal.sequent.to_string()).collect()
}

fn chain() -> Result<String, String> {
    let trees: Vec<ProofTree> = CHAIN.iter().map(|(_, b, x, src)| chain_tree(*b, *x, src)).collect();
    for ((name, ..), t) in CHAIN.iter().zip(&trees) {
        expect_proved(name, t)?;
        golden(name, &t.render())?;
    }
    ensure(leaf_set(&trees[0]) == leaf_set(&trees[1]), || "final goal sets differ".into())?;
    for t in &trees[..2] {
        let after_if = t
            .nodes
            .iter()
            .filter_map(|n| focus(&n.goal.sequent))
            .find(|f| loopscope_core::syntax::print_program(&f.program) == "loop-scope(x) { if (!x) { i = i + 1; } }")
            .ok_or("no goal after the if-branch")?;
        let u = after_if.update.normalized();
        let binds: BTreeMap<&str, String> = u.elems().iter().map(|(v, t)| (v.as_str(), t.to_string())).collect();
        let want: BTreeMap<&str, String> =
            [("b", "false"), ("i", "0"), ("x", "false")].into_iter().map(|(k, v)| (k, v.into())).collect();
        ensure(binds == want, || format!("update after the if-branch is {u}"))?;
    }
    Ok(format!("4 goldens match, {} shared final goal(s), b and x bound to false after the branch", leaf_set(&trees[0]).len()))
}

// Flag loop with and without `continue`.

fn flag_loops() -> Result<String, String> {
    let plain = parse_program("b = true; for (; b; i = i + 1) { b = false; }").unwrap();
    let cont = parse_program("b = true; for (; b; i = i + 1) { b = false; continue; }").unwrap();
    let vars = [("b".into(), Sort::Bool), ("i".into(), Sort::Int)];
    let v = equiv_check(&plain, &cont, &vars, (-DOMAIN_BOUND, DOMAIN_BOUND), 0, 0, FUEL).map_err(|e| e.to_string())?;
    ensure(matches!(v, EquivVerdict::EquivalentOnTested { tested: 10, skipped: 0 }), || format!("{v:?}"))?;
    for b in [false, true] {
        for i in -DOMAIN_BOUND..=DOMAIN_BOUND {
            let st = ConcreteState::from_pairs([("b", Value::Bool(b)), ("i", Value::Int(i))]);
            for p in [&plain, &cont] {
                let out = run(p, &st, FUEL).map_err(|e| e.to_string())?;
                let Outcome::Normal(end) = &out else { return Err(format!("from {st}: {out}")) };
                ensure(end.get("b") == Some(Value::Bool(false)) && end.get("i") == Some(Value::Int(i + 1)), || {
                    format!("from {st}: {out}")
                })?;
            }
        }
    }
    Ok("equivalent on all 10 states, both end normally with b = false and i + 1".into())
}

// Rule soundness fuzzing.

fn fuzz() -> Result<String, String> {
    let cfg = FuzzConfig { seed: FUZZ_SEED, trials: FUZZ_TRIALS, domain_bound: DOMAIN_BOUND, ..FuzzConfig::default() };
    let r = fuzz_rules(&cfg);
    if let Some(c) = r.counterexamples.first() {
        return Err(format!("{} counterexample(s); first for {}: {}", r.counterexamples.len(), c.rule, c.program));
    }
    let short: Vec<_> = RULE_GROUPS.iter().filter(|g| r.group_trials(g) < FUZZ_TRIALS).collect();
    ensure(short.is_empty(), || format!("groups short of {FUZZ_TRIALS} trials: {short:?}"))?;
    let least = RULE_GROUPS.iter().map(|g| r.group_trials(g)).min().unwrap_or(0);
    Ok(format!("{} programs, 0 counterexamples, every rule group >= {least} trials", r.programs))
}

// Rule defects around exceptions in the update list.

fn throw_seven() -> Vec<Stmt> {
    vec![Stmt::Throw(Expr::Int(7))]
}

/// Runs the unwinding premise for a loop whose update list throws and returns
/// the flags `(x, cont)` the exception leaves behind.
fn unwind_flags(fault: Option<Fault>) -> Result<(Value, Value), String> {
    let prog = parse_program("for (; b; ) { b = false; }").unwrap();
    let root = Sequent::new(vec![], vec![Formula::modality(prog, Formula::True)]);
    let mut sig = Signature::new();
    sig.insert("b", Sort::Bool);
    let mut ctx = RuleContext::for_sequent(&root, sig);
    ctx.options.fault = fault;
    let app = unwind_for_loop_with_update(&mut ctx, &Goal::new(root), Some(throw_seven())).map_err(|e| e.to_string())?;
    let f = focus(&app.premises[0].sequent).ok_or("no program in premise")?;
    let mut st = ConcreteState::from_pairs([("b", Value::Bool(true))]);
    for (v, t) in f.update.elems() {
        let Term::Bool(val) = t else { return Err(format!("unexpected update {}", f.update)) };
        st.set_global(v, Value::Bool(*val));
    }
    match run(&f.program, &st, FUEL).map_err(|e| e.to_string())? {
        Outcome::Exception(7, end) => Ok((end.get("x").ok_or("x unset")?, end.get("cont").ok_or("cont unset")?)),
        other => Err(format!("expected the update's exception, got {other}")),
    }
}

/// Proves `i == 0` after a loop whose update list throws into a handler that
/// sets `i = 1`; the claim is false.
fn throwing_update_proved(fault: Option<Fault>) -> Result<bool, String> {
    let prog = parse_program("i = 0; try { for (; true; ) { } } catch (e) { i = 1; }").unwrap();
    let root = Sequent::new(vec![], vec![Formula::modality(prog, Formula::eq(Term::var("i"), Term::Int(0)))]);
    let mut sig = Signature::new();
    sig.insert("i", Sort::Int);
    sig.insert("e", Sort::Int);
    let mut prover = Prover::new(&root, sig, BTreeMap::new(), ProverConfig::default());
    prover.ctx.options.fault = fault;
    let mut goal = Goal::new(root);
    loop {
        goal = match normalize_step(&goal) {
            NormalStep::Applied(app) => app.premises[0].clone(),
            NormalStep::Normal => match apply_eager(&mut prover.ctx, &goal).map_err(|e| e.to_string())? {
                Some(app) => app.premises[0].clone(),
                None => break,
            },
        };
    }
    let app = loop_invariant_for_with_update(&mut prover.ctx, &goal, &Formula::True, Some(throw_seven()))
        .map_err(|e| e.to_string())?;
    Ok(app.premises.into_iter().all(|p| prover.run(p).verdict == Verdict::Proved))
}

fn faults() -> Result<String, String> {
    let t = Value::Bool(true);
    let f = Value::Bool(false);
    ensure(unwind_flags(None)? == (t, f), || "correct unwinding does not leave x true and cont false".into())?;
    let swapped = unwind_flags(Some(Fault::SwapUnwindForUpdateAndCont))?;
    ensure(swapped.1 == t, || format!("swapped unwinding undetected: flags {swapped:?}"))?;
    ensure(!throwing_update_proved(None)?, || "correct invariant rule proves a false claim".into())?;
    ensure(throwing_update_proved(Some(Fault::DropInvariantForWrapper))?, || {
        "dropping the update wrapper went unnoticed".into()
    })?;
    Ok("swapped order leaves cont = true after the throw; unwrapped invariant rule proves a false claim".into())
}

// End-to-end proofs of the example programs.

fn sum_while() -> Result<String, String> {
    let (_, t) = prove_file("sum_while.imp")?;
    expect_proved("sum_while", &t)?;
    uses(&t, &[LOOP_INVARIANT_WHILE])?;
    Ok(format!("proved at bound {PROOF_BOUND} in {} steps", t.steps))
}

fn sum_for() -> Result<String, String> {
    let (_, w) = prove_file("sum_while.imp")?;
    let (_, t) = prove_file("sum_for.imp")?;
    ensure(t.verdict == w.verdict, || format!("{:?} vs {:?}", t.verdict, w.verdict))?;
    uses(&t, &[PULL_OUT_LOOP_INITIALIZER, LOOP_INVARIANT_FOR])?;
    Ok(format!("same verdict ({}) via pull-out and the for invariant rule", t.verdict.name()))
}

fn while_break() -> Result<String, String> {
    let (_, t) = prove_file("while_break.imp")?;
    expect_proved("while_break", &t)?;
    uses(&t, &[LOOP_INVARIANT_WHILE, BREAK_INDEXED_LOOP_SCOPE])?;
    // Only closes if the break exit demands the postcondition, not the invariant.
    let (_, t) = prove_file("break_exit.imp")?;
    expect_proved("break_exit", &t)?;
    uses(&t, &[LOOP_INVARIANT_WHILE, BREAK_INDEXED_LOOP_SCOPE])?;
    Ok("proved; a break that violates the invariant still meets the postcondition".into())
}

fn labeled_continue() -> Result<String, String> {
    let (_, t) = prove_file("labeled_continue.imp")?;
    expect_proved("labeled_continue", &t)?;
    uses(&t, &[LOOP_INVARIANT_WHILE, LABELED_CONTINUE, CONTINUE_INDEXED_LOOP_SCOPE])?;
    Ok("proved; the labeled continue reached the loop scope".into())
}

fn end_to_end() -> Result<String, String> {
    let mut parts = Vec::new();
    for (tag, check) in [("a", sum_while as Check), ("b", sum_for), ("c", while_break), ("d", labeled_continue)] {
        let start = Instant::now();
        let msg = check().map_err(|e| format!("({tag}) {e}"))?;
        let took = start.elapsed();
        ensure(took < PROOF_LIMIT, || format!("({tag}) took {took:?}"))?;
        parts.push(format!("({tag}) {msg}"));
    }
    Ok(parts.join("; "))
}

// Unwinding bounded loops without nested modalities.

fn unwinding() -> Result<String, String> {
    for (file, rule) in [("unwind_for.imp", UNWIND_FOR_LOOP), ("unwind_while.imp", UNWIND_WHILE_LOOP)] {
        let (_, t) = prove_file(file)?;
        expect_proved(file, &t)?;
        let n = t.rule_counts().get(rule).copied().unwrap_or(0);
        ensure(n == 2, || format!("{file}: {n} applications of {rule}"))?;
        ensure(t.max_modalities() <= 1, || format!("{file}: a goal holds {} boxes", t.max_modalities()))?;
    }
    Ok("both loops proved with two unwindings, at most one box per goal".into())
}

// Verdicts against the interpreter.

/// Top-level `v == c` conjuncts of a precondition.
fn pins(f: &Formula, out: &mut Valuation) {
    match f {
        Formula::And(a, b) => {
            pins(a, out);
            pins(b, out);
        }
        Formula::Atom(Rel::Eq, Term::Var(v), Term::Int(c)) => {
            out.insert(v.clone(), Value::Int(*c));
        }
        Formula::Atom(Rel::Eq, Term::Var(v), Term::Bool(c)) => {
            out.insert(v.clone(), Value::Bool(*c));
        }
        _ => {}
    }
}

/// `ORACLE_SAMPLES` states drawn from `[-DOMAIN_BOUND, DOMAIN_BOUND]` that
/// satisfy the antecedent; variables the antecedent pins to a constant take
/// that constant.
fn pre_states(root: &Sequent, sig: &Signature, seed: u64) -> Result<Vec<Valuation>, String> {
    let mut pinned = Valuation::new();
    root.antecedent.iter().for_each(|f| pins(f, &mut pinned));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..100 * ORACLE_SAMPLES {
        let mut st: Valuation = sig
            .iter()
            .map(|(v, s)| {
                let val = match s {
                    Sort::Int => Value::Int(rng.gen_range(-DOMAIN_BOUND..=DOMAIN_BOUND)),
                    Sort::Bool => Value::Bool(rng.gen()),
                };
                (v.clone(), val)
            })
            .collect();
        st.extend(pinned.clone());
        if root.antecedent.iter().all(|f| eval_formula(f, &st, FUEL) == Some(true)) {
            out.push(st);
            if out.len() == ORACLE_SAMPLES {
                return Ok(out);
            }
        }
    }
    Err(format!("only {} pre-satisfying states found", out.len()))
}

fn oracle() -> Result<String, String> {
    let mut examples: Vec<(String, Sequent, Signature, ProofTree)> = Vec::new();
    for (name, b, x, src) in CHAIN {
        examples.push((name.into(), chain_root(b, x, src), chain_sig(), chain_tree(b, x, src)));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(manifest().join("programs"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let (ap, tree) = prove_file(&name)?;
        let root = loopscope_core::prover::root_sequent(&ap);
        examples.push((name, root, ap.signature.clone(), tree));
    }
    let (mut proved, mut refuted) = (0, 0);
    for (k, (name, root, sig, tree)) in examples.iter().enumerate() {
        match &tree.verdict {
            Verdict::Proved => {
                proved += 1;
                for st in pre_states(root, sig, k as u64)? {
                    let holds = eval_sequent(root, &st, FUEL);
                    ensure(holds != Some(false), || format!("{name}: proved but fails from {st:?}"))?;
                }
            }
            Verdict::Refuted { path, counterexample } => {
                refuted += 1;
                let leaf = tree.nodes.iter().find(|n| &n.path == path && n.children.is_empty()).ok_or("no leaf")?;
                let v = eval_sequent(&leaf.goal.sequent, counterexample, FUEL);
                ensure(v == Some(false), || format!("{name}: counterexample evaluates to {v:?}"))?;
            }
            Verdict::Unknown => {}
        }
    }
    ensure(proved > 0 && refuted > 0, || "suite lacks proved or refuted examples".into())?;
    Ok(format!("{proved} proved examples hold on {ORACLE_SAMPLES} states each; {refuted} refutation(s) re-evaluate to false"))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, Duration, Check); 7] = [
        (1, "loop-scope chain converges", CHAIN_LIMIT, chain),
        (2, "flag loop with and without continue", EQUIV_LIMIT, flag_loops),
        (3, "rule soundness fuzzing", FUZZ_LIMIT, fuzz),
        (4, "exception-ordering defects detected", FAULT_LIMIT, faults),
        (5, "end-to-end invariant proofs", 4 * PROOF_LIMIT, end_to_end),
        (6, "unwinding bounded loops", UNWIND_LIMIT, unwinding),
        (7, "verdicts agree with the interpreter", ORACLE_LIMIT, oracle),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|m| if took < limit { Ok(m) } else { Err(format!("{m}; over the {limit:?} limit")) });
        match result {
            Ok(m) => println!("criterion {id} PASS {name} ({:.2}s < {}s): {m}", took.as_secs_f64(), limit.as_secs()),
            Err(e) => {
                failed += 1;
                println!("criterion {id} FAIL {name} ({:.2}s): {e}", took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
