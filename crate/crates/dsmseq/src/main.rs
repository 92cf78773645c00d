use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dsmseq::eval::{check_sequence, feedback_count, feedforward_count, Sequence};
use dsmseq::ga::{ga_run, GaPreset};
use dsmseq::harness::{emit_table, emit_traces, run_plan, ExperimentPlan, MethodSpec};
use dsmseq::llm::{BackendProfile, HttpBackend, Transcript};
use dsmseq::metrics::network_metrics;
use dsmseq::optimizer::{optimize, LoopConfig};
use dsmseq::rankers::{rank, RankerKind};
use dsmseq::{brute_force_optimum, load_case, DEFAULT_NODE_LIMIT};

/// Dependency-structure sequencing toolkit: rankers, a genetic algorithm,
/// an LLM-guided search loop, and an experiment runner.
#[derive(Parser)]
#[command(name = "dsmseq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment plan and write tables and traces.
    Run(RunArgs),
    /// Score a comma-separated sequence against a case.
    Eval(EvalArgs),
    /// Print structural metrics of a case network.
    Metrics(CaseArg),
    /// Order a case with one deterministic ranker.
    Rank(RankArgs),
    /// Run the genetic algorithm on a case.
    Ga(GaArgs),
    /// Run the LLM-guided loop against a provider profile.
    Llm(LlmArgs),
    /// Exhaustively find one optimal order (small cases only).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Plan JSON; case paths inside resolve against its directory.
    #[arg(long)]
    plan: PathBuf,
    /// Output directory for table.csv/table.txt, traces/, transcripts/.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CaseArg {
    #[arg(long)]
    case: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    case: PathBuf,
    /// Comma-separated node ids, e.g. "a, b, c".
    #[arg(long)]
    sequence: String,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    case: PathBuf,
    /// out-in-degree | eigenvector | walk-exponential | walk-resolvent | visibility
    #[arg(long, value_parser = parse_ranker)]
    method: RankerKind,
    /// Damping for walk-resolvent (default 0.025).
    #[arg(long)]
    delta: Option<f64>,
    /// Seed for residual tie shuffling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GaArgs {
    #[arg(long)]
    case: PathBuf,
    /// exploration | exploitation | balanced
    #[arg(long, value_parser = parse_preset)]
    preset: GaPreset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    generations: Option<usize>,
}

#[derive(Args)]
struct LlmArgs {
    #[arg(long)]
    case: PathBuf,
    /// Provider profile JSON (endpoint, model, auth env var name).
    #[arg(long)]
    backend: PathBuf,
    /// on = include node names/descriptions in prompts, off = ids only.
    #[arg(long, value_parser = parse_on_off, action = clap::ArgAction::Set, value_name = "on|off")]
    knowledge: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    iterations: Option<usize>,
    /// Write a JSON-lines transcript of every model call here.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    case: PathBuf,
    /// Raise the safety limit on exhaustive search size.
    #[arg(long)]
    node_limit: Option<usize>,
}

fn parse_ranker(s: &str) -> Result<RankerKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown ranker '{s}' (try one of: out-in-degree, eigenvector, walk-exponential, walk-resolvent, visibility)"))
}

fn parse_preset(s: &str) -> Result<GaPreset, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown preset '{s}' (try: exploration, exploitation, balanced)"))
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(format!("expected 'on' or 'off', got '{other}'")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Run(args) => cmd_run(&args),
        Command::Eval(args) => {
            let case = load_case(&args.case).map_err(|e| e.to_string())?;
            let sequence = Sequence::parse(&args.sequence);
            check_sequence(&sequence, &case).map_err(|e| e.to_string())?;
            let feedback = feedback_count(&case, &sequence).map_err(|e| e.to_string())?;
            let feedforward = feedforward_count(&case, &sequence).map_err(|e| e.to_string())?;
            println!("feedback: {feedback}");
            println!("feedforward: {feedforward}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Metrics(args) => {
            let case = load_case(&args.case).map_err(|e| e.to_string())?;
            let metrics = network_metrics(&case);
            let json = serde_json::to_string_pretty(&metrics).map_err(|e| e.to_string())?;
            println!("{json}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Rank(args) => {
            let case = load_case(&args.case).map_err(|e| e.to_string())?;
            let order =
                rank(&case, args.method, args.delta, args.seed).map_err(|e| e.to_string())?;
            let score = feedback_count(&case, &order).map_err(|e| e.to_string())?;
            println!("order: {order}");
            println!("feedback: {score}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Ga(args) => {
            let case = load_case(&args.case).map_err(|e| e.to_string())?;
            let mut config = args.preset.config(args.seed);
            if let Some(generations) = args.generations {
                config.generations = generations;
            }
            let (best, trace) = ga_run(&case, &config).map_err(|e| e.to_string())?;
            println!("order: {}", best.sequence);
            println!("feedback: {}", best.score);
            println!(
                "unique solutions evaluated: {}",
                trace.points.last().map_or(0, |p| p.unique_solutions)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Llm(args) => cmd_llm(&args),
        Command::Oracle(args) => {
            let case = load_case(&args.case).map_err(|e| e.to_string())?;
            let limit = args.node_limit.unwrap_or(DEFAULT_NODE_LIMIT);
            let (order, score) = brute_force_optimum(&case, limit).map_err(|e| e.to_string())?;
            println!("order: {order}");
            println!("feedback: {score}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode, String> {
    let plan = ExperimentPlan::load(&args.plan).map_err(|e| e.to_string())?;
    let base_dir = args
        .plan
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let has_llm = plan
        .methods
        .iter()
        .any(|m| matches!(m, MethodSpec::Llm { .. }));
    let transcript_dir = has_llm.then(|| args.out.join("transcripts"));
    let outcome =
        run_plan(&plan, &base_dir, transcript_dir.as_deref()).map_err(|e| e.to_string())?;

    if outcome.traces.is_empty() {
        eprintln!("warning: no traces produced; skipping trace emission");
    } else {
        let written =
            emit_traces(&outcome.traces, &args.out.join("traces")).map_err(|e| e.to_string())?;
        println!("wrote {} trace files under {}", written.len(), args.out.join("traces").display());
    }
    let (csv, txt) = emit_table(&outcome.stats, &args.out.join("table.csv"))
        .map_err(|e| e.to_string())?;
    println!("wrote {} and {}", csv.display(), txt.display());
    print!("{}", std::fs::read_to_string(&txt).map_err(|e| e.to_string())?);

    if outcome.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        let mut report = String::new();
        for f in &outcome.failures {
            report.push_str(&format!(
                "{} / {} / seed {}: {}\n",
                f.method, f.case, f.seed, f.message
            ));
        }
        std::fs::write(args.out.join("failures.txt"), &report).map_err(|e| e.to_string())?;
        eprintln!(
            "{} of the plan's cells failed (details in {}):",
            outcome.failures.len(),
            args.out.join("failures.txt").display()
        );
        eprint!("{report}");
        Ok(ExitCode::from(2))
    }
}

fn cmd_llm(args: &LlmArgs) -> Result<ExitCode, String> {
    let case = load_case(&args.case).map_err(|e| e.to_string())?;
    let profile = BackendProfile::load(&args.backend).map_err(|e| e.to_string())?;
    let mut backend = HttpBackend::from_profile(profile).map_err(|e| e.to_string())?;
    let mut config = LoopConfig::new(args.knowledge, args.seed);
    if let Some(iterations) = args.iterations {
        config.max_iterations = iterations;
    }
    let mut transcript = match &args.transcript {
        Some(path) => Some(
            Transcript::to_file(format!("cli-seed{}", args.seed), path)
                .map_err(|e| e.to_string())?,
        ),
        None => None,
    };
    let run = optimize(&case, &mut backend, &config, transcript.as_mut())
        .map_err(|e| e.to_string())?;
    println!("order: {}", run.best.sequence);
    println!("feedback: {}", run.best.score);
    println!("proposals kept: {}", run.base.len());
    if !run.skipped_iterations.is_empty() {
        println!(
            "iterations skipped after invalid responses: {:?}",
            run.skipped_iterations
        );
    }
    Ok(ExitCode::SUCCESS)
}
