//! Proof search: normalization, symbolic execution, annotation-driven loop
//! handling and leaf closure.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::annotated::{AnnotatedProgram, LoopAnnotation, LoopKey};
use crate::calculus::{
    apply_eager, focus, locate_active_statement, loop_invariant_for, loop_invariant_while, normalize_step,
    unwind_bound_check, unwind_for_loop, unwind_while_loop, Goal, NormalStep, RuleApplication, RuleContext,
    RuleOptions,
};
use crate::dl::{Formula, Sequent};
use crate::semantics::Valuation;
use crate::solver::{bounded_valid, BoundedConfig, ClosureMethod, ClosureResult, ClosureStatus};
use crate::syntax::{Signature, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProverConfig {
    pub bounded: BoundedConfig,
    /// Maximum number of rule applications.
    pub max_steps: usize,
    pub options: RuleOptions,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig { bounded: BoundedConfig::default(), max_steps: 10_000, options: RuleOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Proved,
    /// Path of the first refuted leaf and its counterexample.
    Refuted { path: String, counterexample: Valuation },
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Proved => "proved",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    /// Dotted branch path; it only grows where a rule has several premises.
    pub path: String,
    pub goal: Goal,
    pub rule: Option<&'static str>,
    pub children: Vec<usize>,
    /// Set on every node without children.
    pub closure: Option<ClosureResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    /// Root first; children follow their parent but are not contiguous.
    pub nodes: Vec<ProofNode>,
    pub steps: usize,
    pub verdict: Verdict,
}

impl ProofTree {
    /// Node indices in pre-order.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            out.push(i);
            stack.extend(self.nodes[i].children.iter().rev());
        }
        out
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ProofNode> {
        self.preorder().into_iter().map(move |i| &self.nodes[i]).filter(|n| n.children.is_empty()).collect::<Vec<_>>().into_iter()
    }

    /// Applications per rule name.
    pub fn rule_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for n in &self.nodes {
            if let Some(r) = n.rule {
                *out.entry(r).or_insert(0) += 1;
            }
        }
        out
    }

    /// Closed leaves per closure method, plus `open` and `refuted` counts.
    pub fn closed_by(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for n in self.leaves() {
            let key = match &n.closure {
                Some(ClosureResult { status: ClosureStatus::ClosedValid, method }) => method.to_string(),
                Some(ClosureResult { status: ClosureStatus::Refuted(_), .. }) => "refuted".into(),
                _ => "open".into(),
            };
            *out.entry(key).or_insert(0) += 1;
        }
        out
    }

    /// Largest number of box modalities in any goal.
    pub fn max_modalities(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.goal.sequent.antecedent.iter().chain(&n.goal.sequent.succedent).map(Formula::modality_count).sum())
            .max()
            .unwrap_or(0)
    }

    /// Indented text rendering: one line per node, nested by branch path.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for i in self.preorder() {
            let n = &self.nodes[i];
            let pad = "  ".repeat(n.path.matches('.').count());
            let _ = writeln!(out, "{pad}[{}] {}", n.path, n.goal.sequent);
            if let Some(r) = n.rule {
                let _ = writeln!(out, "{pad}  by {r}");
            }
            if let Some(c) = &n.closure {
                let status = match &c.status {
                    ClosureStatus::ClosedValid => format!("closed {}", c.method),
                    ClosureStatus::Open => format!("open {}", c.method),
                    ClosureStatus::Refuted(v) => format!("refuted {} {}", c.method, render_valuation(v)),
                };
                let _ = writeln!(out, "{pad}  {status}");
            }
            if let Some(note) = &n.note {
                let _ = writeln!(out, "{pad}  note: {note}");
            }
        }
        out
    }
}

pub fn render_valuation(v: &Valuation) -> String {
    let items: Vec<String> = v.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", items.join(", "))
}

enum Step {
    Rule(RuleApplication),
    Leaf(ClosureResult, Option<String>),
}

/// Proof search state: the rule context plus loop annotations.
pub struct Prover {
    pub ctx: RuleContext,
    annotations: BTreeMap<LoopKey, LoopAnnotation>,
    cfg: ProverConfig,
}

fn open(note: impl Into<String>) -> Step {
    Step::Leaf(ClosureResult { status: ClosureStatus::Open, method: ClosureMethod::Syntactic }, Some(note.into()))
}

fn nested_loops(s: &Stmt) -> Vec<LoopKey> {
    let mut out = Vec::new();
    let body = match s.as_labeled_loop() {
        Some((_, Stmt::While(_, b))) | Some((_, Stmt::For { body: b, .. })) => b,
        _ => return out,
    };
    body.walk(&mut |t| {
        if t.is_loop() {
            out.push(LoopKey::of(t));
        }
    });
    out
}

impl Prover {
    pub fn new(
        root: &Sequent,
        sig: Signature,
        annotations: BTreeMap<LoopKey, LoopAnnotation>,
        cfg: ProverConfig,
    ) -> Prover {
        let mut ctx = RuleContext::for_sequent(root, sig);
        ctx.options = cfg.options;
        Prover { ctx, annotations, cfg }
    }

    fn leaf(&self, goal: &Goal) -> Step {
        Step::Leaf(bounded_valid(&goal.sequent, &self.ctx.sig, self.cfg.bounded), None)
    }

    fn step(&mut self, goal: &Goal) -> Step {
        if let NormalStep::Applied(app) = normalize_step(goal) {
            return Step::Rule(app);
        }
        if goal.sequent.is_axiom() || !goal.sequent.has_modality() {
            return self.leaf(goal);
        }
        let Some(f) = focus(&goal.sequent) else {
            return open("modality outside the succedent");
        };
        let Some(d) = locate_active_statement(&f.program) else {
            return open("empty program");
        };
        match apply_eager(&mut self.ctx, goal) {
            Ok(Some(app)) => return Step::Rule(app),
            Ok(None) => {}
            Err(e) => return open(e.to_string()),
        }
        let Some((_, lp)) = d.active.as_labeled_loop() else {
            return open("no rule applies");
        };
        let key = LoopKey::of(&d.active);
        let is_while = matches!(lp, Stmt::While(..));
        let result = match self.annotations.get(&key).cloned() {
            None => return open("missing loop annotation"),
            Some(LoopAnnotation::Invariant(inv)) if is_while => loop_invariant_while(&mut self.ctx, goal, &inv),
            Some(LoopAnnotation::Invariant(inv)) => loop_invariant_for(&mut self.ctx, goal, &inv),
            Some(LoopAnnotation::Unwind(k)) => {
                let done = goal.unwinds.get(&key).copied().unwrap_or(0);
                if done >= k {
                    unwind_bound_check(&mut self.ctx, goal)
                } else {
                    let r = if is_while { unwind_while_loop(&mut self.ctx, goal) } else { unwind_for_loop(&mut self.ctx, goal) };
                    r.map(|mut app| {
                        let inner = nested_loops(&d.active);
                        for p in &mut app.premises {
                            for k in &inner {
                                p.unwinds.remove(k);
                            }
                            p.unwinds.insert(key.clone(), done + 1);
                        }
                        app
                    })
                }
            }
        };
        match result {
            Ok(app) => Step::Rule(app),
            Err(e) => open(e.to_string()),
        }
    }

    /// Builds the proof tree below `root`.
    pub fn run(&mut self, root: Goal) -> ProofTree {
        let mut nodes = vec![ProofNode {
            path: "0".into(),
            goal: root,
            rule: None,
            children: vec![],
            closure: None,
            note: None,
        }];
        let mut stack = vec![0usize];
        let mut steps = 0;
        while let Some(i) = stack.pop() {
            if steps >= self.cfg.max_steps {
                nodes[i].closure = Some(ClosureResult { status: ClosureStatus::Open, method: ClosureMethod::Syntactic });
                nodes[i].note = Some("step budget exhausted".into());
                continue;
            }
            let goal = nodes[i].goal.clone();
            match self.step(&goal) {
                Step::Leaf(c, note) => {
                    nodes[i].closure = Some(c);
                    nodes[i].note = note;
                }
                Step::Rule(app) => {
                    steps += 1;
                    nodes[i].rule = Some(app.rule);
                    if app.premises.is_empty() {
                        nodes[i].closure =
                            Some(ClosureResult { status: ClosureStatus::ClosedValid, method: ClosureMethod::Syntactic });
                    }
                    let branching = app.premises.len() > 1;
                    let mut kids = Vec::new();
                    for (k, p) in app.premises.into_iter().enumerate() {
                        let path = if branching { format!("{}.{k}", nodes[i].path) } else { nodes[i].path.clone() };
                        kids.push(nodes.len());
                        nodes.push(ProofNode { path, goal: p, rule: None, children: vec![], closure: None, note: None });
                    }
                    stack.extend(kids.iter().rev());
                    nodes[i].children = kids;
                }
            }
        }
        let mut tree = ProofTree { nodes, steps, verdict: Verdict::Unknown };
        tree.verdict = verdict_of(&tree);
        tree
    }
}

fn verdict_of(tree: &ProofTree) -> Verdict {
    let mut all_closed = true;
    for n in tree.leaves() {
        match &n.closure {
            Some(ClosureResult { status: ClosureStatus::Refuted(v), .. }) if !n.goal.bound_check => {
                return Verdict::Refuted { path: n.path.clone(), counterexample: v.clone() }
            }
            Some(ClosureResult { status: ClosureStatus::ClosedValid, .. }) => {}
            _ => all_closed = false,
        }
    }
    if all_closed {
        Verdict::Proved
    } else {
        Verdict::Unknown
    }
}

/// The root obligation `pre ==> [program]post`.
pub fn root_sequent(ap: &AnnotatedProgram) -> Sequent {
    Sequent::new(vec![ap.pre.clone()], vec![Formula::modality(ap.program.clone(), ap.post.clone())])
}

pub fn prove(ap: &AnnotatedProgram, cfg: ProverConfig) -> ProofTree {
    let root = root_sequent(ap);
    let mut prover = Prover::new(&root, ap.signature.clone(), ap.annotations.clone(), cfg);
    prover.run(Goal::new(root))
}
