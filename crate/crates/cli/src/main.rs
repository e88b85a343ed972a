use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use loopscope::desugar::desugar;
use loopscope::report::{fuzz_report, render_text, run_report};
use loopscope::{exit_code, load, prove_program, ProveOptions, EXIT_REFUTED, EXIT_USAGE};
use loopscope_core::fuzz::{fuzz_rules, group_of, FuzzConfig};
use loopscope_core::interp::{run, ConcreteState};
use loopscope_core::syntax::print_program;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "loopscope", version, about = "Loop-scope verifier for a small imperative language")]
struct Cli {
    /// Print the report as JSON instead of `key: value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prove `pre ==> [program]post` for an annotated file.
    Prove {
        file: PathBuf,
        /// Integer range [-N, N] for bounded closure of leaves.
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Write an SMT-LIB script per open or bounded leaf into DIR.
        #[arg(long, value_name = "DIR")]
        emit_smt: Option<PathBuf>,
        /// Write the proof tree; a `.dot` extension selects Graphviz output.
        #[arg(long, value_name = "FILE")]
        proof_out: Option<PathBuf>,
    },
    /// Run a program with the reference interpreter.
    Run {
        file: PathBuf,
        /// Initial values, e.g. `i=0,b=true`.
        #[arg(long, default_value = "")]
        state: String,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
    },
    /// Print the program after one rule application at a loop.
    Desugar {
        file: PathBuf,
        #[arg(long)]
        rule: String,
        /// Which loop, counting from 1 in source order.
        #[arg(long, default_value_t = 1)]
        occurrence: usize,
    },
    /// Check program-rewriting rules against the interpreter on random programs.
    FuzzRules {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Checked applications per rule group.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// A single rule name, or `basicSE` for all basic rules.
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value_t = 2)]
        domain_bound: i64,
    },
}

fn print(report: &Value, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    } else {
        print!("{}", render_text(report));
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Prove { file, bound, max_steps, emit_smt, proof_out } => {
            let ap = load(&file)?;
            let opts = ProveOptions { bound, max_steps, emit_smt, proof_out };
            let (tree, report) = prove_program(&ap, &file.display().to_string(), &opts)?;
            print(&report, cli.json);
            Ok(exit_code(&tree.verdict))
        }
        Command::Run { file, state, fuel } => {
            let ap = load(&file)?;
            let init = ConcreteState::parse(&state).map_err(anyhow::Error::msg).context("parsing --state")?;
            let outcome = run(&ap.program, &init, fuel)?;
            print(&run_report(&file.display().to_string(), &outcome), cli.json);
            Ok(0)
        }
        Command::Desugar { file, rule, occurrence } => {
            let ap = load(&file)?;
            let out = desugar(&ap.program, &ap.signature, &rule, occurrence)?;
            println!("{}", print_program(&out));
            Ok(0)
        }
        Command::FuzzRules { seed, trials, rule, domain_bound } => {
            if let Some(r) = &rule {
                if group_of(r).is_none() {
                    bail!("`{r}` is not a program-rewriting rule");
                }
            }
            let cfg = FuzzConfig { seed, trials, rule, domain_bound, ..FuzzConfig::default() };
            let report = fuzz_rules(&cfg);
            let failed = !report.counterexamples.is_empty();
            print(&fuzz_report(&cfg, &report), cli.json);
            Ok(if failed { EXIT_REFUTED } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
