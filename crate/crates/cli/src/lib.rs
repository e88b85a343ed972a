//! File handling, reports and the subcommands behind the `loopscope` binary.

pub mod desugar;
pub mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use loopscope_core::annotated::{parse_annotated_file, AnnotatedProgram};
use loopscope_core::prover::{prove, ProofTree, ProverConfig, Verdict};
use loopscope_core::solver::{emit_smt, BoundedConfig, ClosureStatus};
use serde_json::Value;

pub const EXIT_PROVED: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

pub fn exit_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Proved => EXIT_PROVED,
        Verdict::Refuted { .. } => EXIT_REFUTED,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProveOptions {
    pub bound: Option<i64>,
    pub max_steps: Option<usize>,
    pub emit_smt: Option<PathBuf>,
    pub proof_out: Option<PathBuf>,
}

impl ProveOptions {
    pub fn config(&self) -> ProverConfig {
        let d = ProverConfig::default();
        ProverConfig {
            bounded: BoundedConfig { bound: self.bound.unwrap_or(d.bounded.bound), ..d.bounded },
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            ..d
        }
    }
}

pub fn load(path: &Path) -> Result<AnnotatedProgram> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_annotated_file(&src).with_context(|| format!("parsing {}", path.display()))
}

/// Proves `ap`, writes the requested artifacts and returns the tree with its report.
pub fn prove_program(ap: &AnnotatedProgram, label: &str, opts: &ProveOptions) -> Result<(ProofTree, Value)> {
    let tree = prove(ap, opts.config());
    let mut artifacts = Vec::new();
    if let Some(dir) = &opts.emit_smt {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for n in tree.leaves() {
            let closed = matches!(n.closure.as_ref().map(|c| &c.status), Some(ClosureStatus::ClosedValid));
            if closed && n.goal.sequent.is_axiom() {
                continue;
            }
            if let Some(script) = emit_smt(&n.goal.sequent, &ap.signature) {
                let file = dir.join(format!("goal-{}.smt2", n.path));
                fs::write(&file, script).with_context(|| format!("writing {}", file.display()))?;
                artifacts.push(file.display().to_string());
            }
        }
    }
    if let Some(out) = &opts.proof_out {
        let text = if out.extension().is_some_and(|e| e == "dot") { to_dot(&tree) } else { tree.render() };
        fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
        artifacts.push(out.display().to_string());
    }
    let report = report::prove_report(label, &tree, &artifacts);
    Ok((tree, report))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of a proof tree; nodes are named by branch path and index.
pub fn to_dot(tree: &ProofTree) -> String {
    let mut out = String::from("digraph proof {\n  node [shape=box, fontname=monospace];\n");
    for i in tree.preorder() {
        let n = &tree.nodes[i];
        let mut label = format!("[{}] {}", n.path, n.goal.sequent);
        if let Some(r) = n.rule {
            let _ = write!(label, "\nby {r}");
        }
        if let Some(c) = &n.closure {
            let status = match &c.status {
                ClosureStatus::ClosedValid => "closed",
                ClosureStatus::Open => "open",
                ClosureStatus::Refuted(_) => "refuted",
            };
            let _ = write!(label, "\n{status} {}", c.method);
        }
        let _ = writeln!(out, "  n{i} [label=\"{}\"];", dot_escape(&label));
        for c in &n.children {
            let _ = writeln!(out, "  n{i} -> n{c};");
        }
    }
    out.push_str("}\n");
    out
}
