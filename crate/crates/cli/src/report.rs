//! Machine-readable reports. Each report is a JSON object with sorted keys;
//! the text form flattens it to one `key: value` line per scalar.

use std::fmt::Write;

use loopscope_core::fuzz::{group_of, render_state, FuzzConfig, FuzzReport, RULE_GROUPS};
use loopscope_core::interp::Outcome;
use loopscope_core::prover::{render_valuation, ProofTree, Verdict};
use loopscope_core::solver::ClosureStatus;
use serde_json::{json, Map, Value};

pub fn prove_report(file: &str, tree: &ProofTree, artifacts: &[String]) -> Value {
    let mut open = Map::new();
    for n in tree.leaves() {
        if matches!(n.closure.as_ref().map(|c| &c.status), Some(ClosureStatus::Open)) {
            open.insert(n.path.clone(), json!(n.note.clone().unwrap_or_default()));
        }
    }
    let mut out = json!({
        "file": file,
        "verdict": tree.verdict.name(),
        "steps": tree.steps,
        "stats": {
            "rule_applications": tree.rule_counts(),
            "leaves": tree.leaves().count(),
            "closed_by": tree.closed_by(),
            "max_modalities": tree.max_modalities(),
        },
        "open_leaves": open,
        "artifacts": artifacts,
    });
    if let Verdict::Refuted { path, counterexample } = &tree.verdict {
        out["refuted"] = json!({ "path": path, "counterexample": render_valuation(counterexample) });
    }
    out
}

pub fn run_report(file: &str, outcome: &Outcome) -> Value {
    let state = outcome.state().map(|s| s.to_string());
    json!({ "file": file, "outcome": outcome.kind(), "state": state })
}

pub fn fuzz_report(cfg: &FuzzConfig, r: &FuzzReport) -> Value {
    let mut rules = Map::new();
    for (name, s) in &r.rules {
        rules.insert(
            name.to_string(),
            json!({
                "group": group_of(name),
                "trials": s.trials,
                "states": s.states,
                "skipped_states": s.skipped,
                "counterexamples": s.counterexamples,
            }),
        );
    }
    let groups: Map<String, Value> = RULE_GROUPS
        .iter()
        .filter(|g| cfg.target_groups().contains(g))
        .map(|g| (g.to_string(), json!(r.group_trials(g))))
        .collect();
    let cexs: Vec<Value> = r
        .counterexamples
        .iter()
        .map(|c| {
            json!({
                "rule": c.rule,
                "program": c.program,
                "state": render_state(&c.state),
                "conclusion": c.conclusion,
                "premises": c.premises,
            })
        })
        .collect();
    json!({
        "verdict": if cexs.is_empty() { "passed" } else { "failed" },
        "seed": cfg.seed,
        "trials": cfg.trials,
        "rule": cfg.rule,
        "domain_bound": cfg.domain_bound,
        "programs": r.programs,
        "group_trials": groups,
        "rules": rules,
        "counterexamples": cexs,
    })
}

/// One `key: value` line per scalar, nested keys joined with `.`.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    flatten(&mut out, "", v);
    out
}

fn flatten(out: &mut String, key: &str, v: &Value) {
    let join = |k: &str| if key.is_empty() { k.to_string() } else { format!("{key}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(out, &join(k), v)),
        Value::Array(a) if !a.is_empty() => a.iter().enumerate().for_each(|(i, v)| flatten(out, &join(&i.to_string()), v)),
        Value::Array(_) => {}
        Value::Null => {}
        Value::String(s) => {
            let _ = writeln!(out, "{key}: {s}");
        }
        other => {
            let _ = writeln!(out, "{key}: {other}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattening_is_sorted_and_dotted() {
        let v = json!({ "b": { "y": 1, "x": "s" }, "a": [true, null], "c": [] });
        assert_eq!(render_text(&v), "a.0: true\nb.x: s\nb.y: 1\n");
    }
}
