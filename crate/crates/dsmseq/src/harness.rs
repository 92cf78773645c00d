//! Experiment runner: executes method x case x seed grids described by a plan
//! file, aggregates mean±std tables, and emits convergence-trace CSVs.
//!
//! All output is deterministic for deterministic methods/backends: no
//! timestamps in CSVs, fixed iteration order (plan order), and seeded RNG
//! everywhere, so re-running a plan reproduces files byte for byte.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::case::{load_case, CaseError, DsmCase, NodeId};
use crate::eval::feedback_count;
use crate::ga::{ga_run, GaPreset, DEFAULT_GENERATIONS};
use crate::llm::{Backend, BackendProfile, HttpBackend, ScriptedBackend, Transcript};
use crate::optimizer::{optimize, LoopConfig, LoopError, SamplingParams, DEFAULT_MAX_ITERATIONS};
use crate::rankers::{rank, RankerKind};
use crate::trace::{RunTrace, TRACE_TRUNCATION_LIMIT};

pub const ALLOWED_TRIAL_COUNTS: [usize; 3] = [1, 5, 20];

fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

fn default_trial_counts() -> Vec<usize> {
    ALLOWED_TRIAL_COUNTS.to_vec()
}

fn default_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}

fn default_generations() -> usize {
    DEFAULT_GENERATIONS
}

/// Where an LLM method's completions come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PlanBackend {
    /// Live provider profile (JSON file path, resolved against the plan dir).
    Profile { path: String },
    /// Fixed response list replayed per cell.
    Script { responses: Vec<String> },
    /// Per-cell scripted backend of `count` random valid orders, derived
    /// deterministically from (case, seed): a stand-in for live models in
    /// demos and reproducibility tests.
    SyntheticRandom { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodSpec {
    Llm {
        knowledge: bool,
        backend: PlanBackend,
        #[serde(default = "default_iterations")]
        iterations: usize,
        #[serde(default)]
        sampling: SamplingParams,
    },
    Ga {
        preset: GaPreset,
        #[serde(default = "default_generations")]
        generations: usize,
    },
    Ranker {
        method: RankerKind,
        #[serde(default)]
        delta: Option<f64>,
    },
}

impl MethodSpec {
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Llm { knowledge, .. } => if *knowledge {
                "llm-with-knowledge"
            } else {
                "llm-without-knowledge"
            }
            .to_string(),
            MethodSpec::Ga { preset, .. } => preset.label().to_string(),
            MethodSpec::Ranker { method, .. } => method.label().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub cases: Vec<String>,
    pub methods: Vec<MethodSpec>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_trial_counts")]
    pub trial_counts: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("plan {path}: {message}")]
    Plan { path: PathBuf, message: String },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("case {path}: {source}")]
    Case {
        path: PathBuf,
        #[source]
        source: CaseError,
    },
}

impl ExperimentPlan {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let plan: ExperimentPlan =
            serde_json::from_str(&text).map_err(|e| HarnessError::Plan {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.cases.is_empty() {
            return Err(HarnessError::InvalidPlan("no cases listed".to_string()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::InvalidPlan("no methods listed".to_string()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::InvalidPlan("no seeds listed".to_string()));
        }
        if self.trial_counts.is_empty() {
            return Err(HarnessError::InvalidPlan("no trial counts".to_string()));
        }
        for &k in &self.trial_counts {
            if !ALLOWED_TRIAL_COUNTS.contains(&k) {
                return Err(HarnessError::InvalidPlan(format!(
                    "trial count {k} is not one of {ALLOWED_TRIAL_COUNTS:?}"
                )));
            }
        }
        Ok(())
    }
}

/// One aggregated table cell: mean±std of best scores over the plan's seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatRow {
    pub method: String,
    pub case: String,
    pub trial_count: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub method: String,
    pub case: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct PlanOutcome {
    pub traces: Vec<RunTrace>,
    pub stats: Vec<StatRow>,
    pub failures: Vec<CellFailure>,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Deterministic stand-in for a live model: `count` uniformly random valid
/// orders keyed by (case, seed, knowledge flag).
fn synthetic_script(case: &DsmCase, count: usize, seed: u64, knowledge: bool) -> Vec<String> {
    let key = format!("{}|{}|{}", case.name, seed, knowledge);
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a64(key.as_bytes()) ^ seed);
    (0..count)
        .map(|_| {
            let mut ids: Vec<&str> = case.node_ids().map(NodeId::as_str).collect();
            ids.shuffle(&mut rng);
            format!("<order> {} </order>", ids.join(", "))
        })
        .collect()
}

fn population_mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Round half-up to one decimal (0.05 -> 0.1, 4.75 -> 4.8). Scores are
/// nonnegative, so the naive floor form is exact enough here.
pub fn round_half_up_1dp(x: f64) -> f64 {
    (x * 10.0 + 0.5).floor() / 10.0
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Execute every (method, case, seed) cell of the plan. Case paths resolve
/// against `base_dir`. When `transcript_dir` is set, each LLM cell streams
/// its calls to one JSON-lines file there.
pub fn run_plan(
    plan: &ExperimentPlan,
    base_dir: &Path,
    transcript_dir: Option<&Path>,
) -> Result<PlanOutcome, HarnessError> {
    plan.validate()?;
    let mut cases = Vec::with_capacity(plan.cases.len());
    for rel in &plan.cases {
        let path = if Path::new(rel).is_absolute() {
            PathBuf::from(rel)
        } else {
            base_dir.join(rel)
        };
        let case = load_case(&path).map_err(|source| HarnessError::Case {
            path: path.clone(),
            source,
        })?;
        cases.push(case);
    }
    if let Some(dir) = transcript_dir {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }

    let mut outcome = PlanOutcome::default();
    for method in &plan.methods {
        let label = method.label();
        for case in &cases {
            match method {
                MethodSpec::Ranker { method: kind, delta } => {
                    let mut values = Vec::new();
                    for &seed in &plan.seeds {
                        match rank(case, *kind, *delta, seed) {
                            Ok(seq) => {
                                let score =
                                    feedback_count(case, &seq).expect("ranker output is valid");
                                let mut trace =
                                    RunTrace::new(label.clone(), case.name.clone(), seed);
                                trace.record(1, score);
                                outcome.traces.push(trace);
                                values.push(score as f64);
                            }
                            Err(e) => outcome.failures.push(CellFailure {
                                method: label.clone(),
                                case: case.name.clone(),
                                seed,
                                message: e.to_string(),
                            }),
                        }
                    }
                    if !values.is_empty() {
                        let (mean, std) = population_mean_std(&values);
                        outcome.stats.push(StatRow {
                            method: label.clone(),
                            case: case.name.clone(),
                            trial_count: 1,
                            mean,
                            std,
                        });
                    }
                }
                MethodSpec::Ga { preset, generations } => {
                    let mut values = Vec::new();
                    for &seed in &plan.seeds {
                        let mut config = preset.config(seed);
                        config.generations = *generations;
                        match ga_run(case, &config) {
                            Ok((_, trace)) => {
                                let mut truncated = trace.truncated(TRACE_TRUNCATION_LIMIT);
                                truncated.method = label.clone();
                                values.push(
                                    truncated.final_best().expect("ga evaluates its population")
                                        as f64,
                                );
                                outcome.traces.push(truncated);
                            }
                            Err(e) => outcome.failures.push(CellFailure {
                                method: label.clone(),
                                case: case.name.clone(),
                                seed,
                                message: e.to_string(),
                            }),
                        }
                    }
                    if !values.is_empty() {
                        let (mean, std) = population_mean_std(&values);
                        outcome.stats.push(StatRow {
                            method: label.clone(),
                            case: case.name.clone(),
                            trial_count: 1,
                            mean,
                            std,
                        });
                    }
                }
                MethodSpec::Llm {
                    knowledge,
                    backend,
                    iterations,
                    sampling,
                } => {
                    let mut per_trial: Vec<Vec<f64>> =
                        vec![Vec::new(); plan.trial_counts.len()];
                    for &seed in &plan.seeds {
                        let mut instance: Box<dyn Backend> = match backend {
                            PlanBackend::Profile { path } => {
                                let p = if Path::new(path).is_absolute() {
                                    PathBuf::from(path)
                                } else {
                                    base_dir.join(path)
                                };
                                match BackendProfile::load(&p)
                                    .and_then(HttpBackend::from_profile)
                                {
                                    Ok(b) => Box::new(b),
                                    Err(e) => {
                                        outcome.failures.push(CellFailure {
                                            method: label.clone(),
                                            case: case.name.clone(),
                                            seed,
                                            message: e.to_string(),
                                        });
                                        continue;
                                    }
                                }
                            }
                            PlanBackend::Script { responses } => {
                                Box::new(ScriptedBackend::new(responses.clone()))
                            }
                            PlanBackend::SyntheticRandom { count } => Box::new(
                                ScriptedBackend::new(synthetic_script(
                                    case, *count, seed, *knowledge,
                                )),
                            ),
                        };
                        let config = LoopConfig {
                            max_iterations: *iterations,
                            sampling: *sampling,
                            with_knowledge: *knowledge,
                            seed,
                            ..LoopConfig::new(*knowledge, seed)
                        };
                        let run_id = format!(
                            "{}__{}__seed{}",
                            sanitize(&label),
                            sanitize(&case.name),
                            seed
                        );
                        let mut transcript = match transcript_dir {
                            Some(dir) => {
                                match Transcript::to_file(&run_id, dir.join(format!("{run_id}.jsonl"))) {
                                    Ok(t) => Some(t),
                                    Err(source) => {
                                        return Err(HarnessError::Io {
                                            path: dir.join(format!("{run_id}.jsonl")),
                                            source,
                                        })
                                    }
                                }
                            }
                            None => None,
                        };
                        match optimize(case, instance.as_mut(), &config, transcript.as_mut()) {
                            Ok(run) => {
                                outcome
                                    .traces
                                    .push(run.trace.truncated(TRACE_TRUNCATION_LIMIT));
                                for (slot, &k) in plan.trial_counts.iter().enumerate() {
                                    let idx = k.min(run.iteration_best.len());
                                    per_trial[slot].push(run.iteration_best[idx - 1] as f64);
                                }
                            }
                            Err(LoopError::Llm {
                                iteration,
                                source,
                                partial,
                            }) => {
                                outcome.failures.push(CellFailure {
                                    method: label.clone(),
                                    case: case.name.clone(),
                                    seed,
                                    message: format!("iteration {iteration}: {source}"),
                                });
                                outcome
                                    .traces
                                    .push(partial.trace.truncated(TRACE_TRUNCATION_LIMIT));
                            }
                            Err(e @ LoopError::InvalidConfig(_)) => {
                                return Err(HarnessError::InvalidPlan(e.to_string()))
                            }
                        }
                    }
                    for (slot, &k) in plan.trial_counts.iter().enumerate() {
                        if per_trial[slot].is_empty() {
                            continue;
                        }
                        let (mean, std) = population_mean_std(&per_trial[slot]);
                        outcome.stats.push(StatRow {
                            method: label.clone(),
                            case: case.name.clone(),
                            trial_count: k,
                            mean,
                            std,
                        });
                    }
                }
            }
        }
    }
    Ok(outcome)
}

fn write_file(path: &Path, content: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| HarnessError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, content).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One CSV per (method, case) with every seed's points, plus a mean-over-seeds
/// CSV on the union x-grid (step interpolation: last observation carried
/// forward). Returns written paths; an empty trace list writes nothing.
pub fn emit_traces(traces: &[RunTrace], out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut groups: Vec<((String, String), Vec<&RunTrace>)> = Vec::new();
    for trace in traces {
        let key = (trace.method.clone(), trace.case.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(trace),
            None => groups.push((key, vec![trace])),
        }
    }
    let mut written = Vec::new();
    for ((method, case), mut members) in groups {
        members.sort_by_key(|t| t.seed);
        let stem = format!("{}__{}", sanitize(&method), sanitize(&case));

        let mut csv = String::from("unique_solutions,best_score,seed\n");
        for trace in &members {
            for p in &trace.points {
                let _ = writeln!(csv, "{},{},{}", p.unique_solutions, p.best_score, trace.seed);
            }
        }
        let path = out_dir.join(format!("{stem}.csv"));
        write_file(&path, &csv)?;
        written.push(path);

        let grid: BTreeSet<u64> = members
            .iter()
            .flat_map(|t| t.points.iter().map(|p| p.unique_solutions))
            .collect();
        let mut mean_csv = String::from("unique_solutions,mean_best_score\n");
        for &x in &grid {
            let values: Vec<f64> = members
                .iter()
                .filter_map(|t| t.best_at(x))
                .map(|b| b as f64)
                .collect();
            // LOCF is undefined before a run's first observation; hold the
            // grid point until every run has started
            if values.len() != members.len() {
                continue;
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let _ = writeln!(mean_csv, "{x},{mean}");
        }
        let mean_path = out_dir.join(format!("{stem}__mean.csv"));
        write_file(&mean_path, &mean_csv)?;
        written.push(mean_path);
    }
    Ok(written)
}

fn format_cell(mean: f64, std: f64) -> String {
    format!(
        "{:.1}\u{b1}{:.1}",
        round_half_up_1dp(mean),
        round_half_up_1dp(std)
    )
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Methods as rows, cases as columns, cells `mean±std` to one decimal.
/// Writes a CSV at `out_path` and an aligned text table next to it.
pub fn emit_table(stats: &[StatRow], out_path: &Path) -> Result<(PathBuf, PathBuf), HarnessError> {
    let mut case_order: Vec<String> = Vec::new();
    let mut row_order: Vec<(String, usize)> = Vec::new();
    for s in stats {
        if !case_order.contains(&s.case) {
            case_order.push(s.case.clone());
        }
        let key = (s.method.clone(), s.trial_count);
        if !row_order.contains(&key) {
            row_order.push(key);
        }
    }
    let multi_trial = |method: &str| {
        stats
            .iter()
            .filter(|s| s.method == method)
            .map(|s| s.trial_count)
            .collect::<BTreeSet<_>>()
            .len()
            > 1
    };
    let row_label = |method: &str, k: usize| {
        if multi_trial(method) {
            format!("{method} (trial {k})")
        } else {
            method.to_string()
        }
    };
    let cell = |method: &str, k: usize, case: &str| {
        stats
            .iter()
            .find(|s| s.method == method && s.trial_count == k && s.case == case)
            .map(|s| format_cell(s.mean, s.std))
            .unwrap_or_else(|| "-".to_string())
    };

    let mut csv = String::from("method");
    for c in &case_order {
        csv.push(',');
        csv.push_str(&csv_quote(c));
    }
    csv.push('\n');
    for (method, k) in &row_order {
        csv.push_str(&csv_quote(&row_label(method, *k)));
        for c in &case_order {
            csv.push(',');
            csv.push_str(&cell(method, *k, c));
        }
        csv.push('\n');
    }
    write_file(out_path, &csv)?;

    // aligned text rendering of the same grid
    let mut header: Vec<String> = vec!["method".to_string()];
    header.extend(case_order.iter().cloned());
    let mut rows: Vec<Vec<String>> = vec![header];
    for (method, k) in &row_order {
        let mut row = vec![row_label(method, *k)];
        for c in &case_order {
            row.push(cell(method, *k, c));
        }
        rows.push(row);
    }
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
        .collect();
    let mut txt = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, cell)| format!("{:<width$}", cell, width = widths[i]))
            .collect();
        txt.push_str(line.join("  ").trim_end());
        txt.push('\n');
    }
    let txt_path = out_path.with_extension("txt");
    write_file(&txt_path, &txt)?;
    Ok((out_path.to_path_buf(), txt_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_matches_half_up_convention() {
        assert_eq!(round_half_up_1dp(6.0), 6.0);
        assert_eq!(round_half_up_1dp(4.75), 4.8);
        assert_eq!(round_half_up_1dp(0.05), 0.1);
        assert_eq!(round_half_up_1dp(0.04), 0.0);
        assert_eq!(round_half_up_1dp(3.649), 3.6);
    }

    #[test]
    fn cell_formatting() {
        assert_eq!(format_cell(6.0, 0.0), "6.0±0.0");
        assert_eq!(format_cell(4.75, 0.55), "4.8±0.6");
        assert_eq!(format_cell(3.6448, 0.4899), "3.6±0.5");
    }

    #[test]
    fn population_std_divides_by_n() {
        let (mean, std) = population_mean_std(&[1.0, 3.0]);
        assert_eq!(mean, 2.0);
        assert_eq!(std, 1.0); // sample std would be sqrt(2)
    }

    #[test]
    fn synthetic_script_is_deterministic_per_key() {
        let case = crate::case::DsmCase::from_json(
            r#"{"name":"s","network_description":"","nodes":[
                {"id":"a","name":"A"},{"id":"b","name":"B"},{"id":"c","name":"C"}],
               "edges":[{"dependent":"b","predecessor":"a"}]}"#,
        )
        .unwrap();
        let one = synthetic_script(&case, 5, 3, true);
        let two = synthetic_script(&case, 5, 3, true);
        assert_eq!(one, two);
        let other_seed = synthetic_script(&case, 5, 4, true);
        assert_ne!(one, other_seed);
        let other_arm = synthetic_script(&case, 5, 3, false);
        assert_ne!(one, other_arm);
        for resp in &one {
            let seq = crate::optimizer::parse_order(resp).unwrap();
            crate::eval::check_sequence(&seq, &case).unwrap();
        }
    }

    #[test]
    fn plan_validation_rejects_gaps() {
        let plan = ExperimentPlan {
            cases: vec![],
            methods: vec![MethodSpec::Ranker {
                method: RankerKind::Visibility,
                delta: None,
            }],
            seeds: vec![0],
            trial_counts: vec![1],
        };
        assert!(matches!(plan.validate(), Err(HarnessError::InvalidPlan(_))));
        let plan = ExperimentPlan {
            cases: vec!["x.json".to_string()],
            methods: vec![],
            seeds: vec![0],
            trial_counts: vec![1],
        };
        assert!(plan.validate().is_err());
        let plan = ExperimentPlan {
            cases: vec!["x.json".to_string()],
            methods: vec![MethodSpec::Ranker {
                method: RankerKind::Visibility,
                delta: None,
            }],
            seeds: vec![0],
            trial_counts: vec![7],
        };
        assert!(plan.validate().is_err());
    }

    #[test]
    fn plan_json_shape_roundtrips() {
        let json = r#"{
            "cases": ["cases/a.json"],
            "methods": [
                {"ranker": {"method": "out-in-degree"}},
                {"ranker": {"method": "walk-resolvent", "delta": 0.025}},
                {"ga": {"preset": "balanced", "generations": 100}},
                {"llm": {"knowledge": true, "backend": {"synthetic-random": {"count": 20}}}},
                {"llm": {"knowledge": false, "backend": {"script": {"responses": ["<order>a,b</order>"]}},
                          "iterations": 5, "sampling": {"k_top": 2, "k_random": 1}}}
            ],
            "seeds": [0, 1],
            "trial_counts": [1, 5, 20]
        }"#;
        let plan: ExperimentPlan = serde_json::from_str(json).unwrap();
        assert_eq!(plan.methods.len(), 5);
        assert_eq!(plan.methods[0].label(), "out-in-degree");
        assert_eq!(plan.methods[2].label(), "ga-balanced");
        assert_eq!(plan.methods[3].label(), "llm-with-knowledge");
        match &plan.methods[4] {
            MethodSpec::Llm {
                iterations,
                sampling,
                ..
            } => {
                assert_eq!(*iterations, 5);
                assert_eq!(sampling.k_top, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        // defaults fill in when omitted
        let plan: ExperimentPlan = serde_json::from_str(
            r#"{"cases":["c.json"],"methods":[{"ga":{"preset":"balanced"}}]}"#,
        )
        .unwrap();
        assert_eq!(plan.seeds, (0..10).collect::<Vec<u64>>());
        assert_eq!(plan.trial_counts, vec![1, 5, 20]);
        match &plan.methods[0] {
            MethodSpec::Ga { generations, .. } => assert_eq!(*generations, 2000),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn table_formatting_grid() {
        let stats = vec![
            StatRow {
                method: "llm-with-knowledge".into(),
                case: "alpha".into(),
                trial_count: 1,
                mean: 8.05,
                std: 0.0,
            },
            StatRow {
                method: "llm-with-knowledge".into(),
                case: "alpha".into(),
                trial_count: 20,
                mean: 6.0,
                std: 0.0,
            },
            StatRow {
                method: "visibility".into(),
                case: "alpha".into(),
                trial_count: 1,
                mean: 0.0,
                std: 0.0,
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("table.csv");
        let (csv_path, txt_path) = emit_table(&stats, &out).unwrap();
        let csv = std::fs::read_to_string(csv_path).unwrap();
        assert!(csv.starts_with("method,alpha\n"));
        assert!(csv.contains("llm-with-knowledge (trial 1),8.1±0.0"));
        assert!(csv.contains("llm-with-knowledge (trial 20),6.0±0.0"));
        assert!(csv.contains("\nvisibility,0.0±0.0"));
        let txt = std::fs::read_to_string(txt_path).unwrap();
        assert!(txt.lines().next().unwrap().starts_with("method"));
    }

    #[test]
    fn empty_stats_yield_header_only_table() {
        let dir = tempfile::tempdir().unwrap();
        let (csv_path, _) = emit_table(&[], &dir.path().join("t.csv")).unwrap();
        assert_eq!(std::fs::read_to_string(csv_path).unwrap(), "method\n");
    }

    #[test]
    fn trace_emission_groups_and_means() {
        let mut t0 = RunTrace::new("m", "c", 0);
        t0.record(1, 10);
        t0.record(4, 2);
        let mut t1 = RunTrace::new("m", "c", 1);
        t1.record(1, 8);
        t1.record(3, 6);
        let dir = tempfile::tempdir().unwrap();
        let written = emit_traces(&[t0, t1], dir.path()).unwrap();
        assert_eq!(written.len(), 2);
        let per_seed = std::fs::read_to_string(&written[0]).unwrap();
        assert_eq!(
            per_seed,
            "unique_solutions,best_score,seed\n1,10,0\n4,2,0\n1,8,1\n3,6,1\n"
        );
        let mean = std::fs::read_to_string(&written[1]).unwrap();
        // x-grid 1,3,4 with LOCF: (10,8) -> 9, (10,6) -> 8, (2,6) -> 4
        assert_eq!(mean, "unique_solutions,mean_best_score\n1,9\n3,8\n4,4\n");
    }

    #[test]
    fn empty_trace_list_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let written = emit_traces(&[], dir.path()).unwrap();
        assert!(written.is_empty());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
