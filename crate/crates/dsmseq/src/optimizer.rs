//! The iterative LLM-driven optimizer: keep a base of scored solutions,
//! sample a mix of best and random entries, show them to the model
//! worst-to-best, ask for a better order, check it, score it, append it.
//!
//! One proposal per iteration; invalid responses are re-prompted a bounded
//! number of times, then the iteration is recorded as skipped so a fixed
//! iteration budget stays comparable across runs.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::case::DsmCase;
use crate::eval::{check_sequence, Evaluator, ScoredSolution, Sequence};
use crate::llm::{Backend, LlmError, LlmRequest, Transcript};
use crate::trace::{RunTrace, UniqueCounter};

pub const DEFAULT_MAX_ITERATIONS: usize = 20;
pub const DEFAULT_INVALID_RESPONSE_RETRIES: usize = 3;

/// How many historical solutions each prompt shows: the `k_top` best plus
/// `k_random` drawn from the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingParams {
    pub k_top: usize,
    pub k_random: usize,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            k_top: 5,
            k_random: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopConfig {
    pub max_iterations: usize,
    pub sampling: SamplingParams,
    pub with_knowledge: bool,
    pub invalid_response_retries: usize,
    pub seed: u64,
    pub max_output_tokens: u32,
    pub temperature_override: Option<f64>,
}

impl LoopConfig {
    pub fn new(with_knowledge: bool, seed: u64) -> Self {
        LoopConfig {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            sampling: SamplingParams::default(),
            with_knowledge,
            invalid_response_retries: DEFAULT_INVALID_RESPONSE_RETRIES,
            seed,
            max_output_tokens: 2048,
            temperature_override: None,
        }
    }

    pub fn method_label(&self) -> &'static str {
        if self.with_knowledge {
            "llm-with-knowledge"
        } else {
            "llm-without-knowledge"
        }
    }
}

/// Append-only store of every solution the run has scored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolutionBase {
    entries: Vec<ScoredSolution>,
}

impl SolutionBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, solution: ScoredSolution) {
        self.entries.push(solution);
    }

    pub fn entries(&self) -> &[ScoredSolution] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lowest score; earliest insertion wins ties.
    pub fn best(&self) -> Option<&ScoredSolution> {
        self.entries.iter().min_by_key(|s| s.score)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot sample from an empty solution base")]
pub struct EmptyBase;

/// Uniform random permutation of the case's nodes, scored. The seed-keyed
/// start of every optimizer run.
pub fn init_solution(case: &DsmCase, rng_seed: u64) -> ScoredSolution {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut order: Vec<_> = case.node_ids().cloned().collect();
    order.shuffle(&mut rng);
    let sequence = Sequence { order };
    let score = Evaluator::new(case).score_sequence(&sequence);
    ScoredSolution {
        sequence,
        score,
        provenance: "initial".to_string(),
    }
}

/// The `k_top` best entries (earlier insertion wins ties) plus up to
/// `k_random` drawn uniformly without replacement from the remainder,
/// returned worst-to-best for prompt presentation.
pub fn sample_solutions(
    base: &SolutionBase,
    params: &SamplingParams,
    rng_seed: u64,
) -> Result<Vec<ScoredSolution>, EmptyBase> {
    if base.is_empty() {
        return Err(EmptyBase);
    }
    let entries = base.entries();
    let mut by_score: Vec<usize> = (0..entries.len()).collect();
    by_score.sort_by_key(|&i| (entries[i].score, i));
    let top_len = params.k_top.min(entries.len());
    let top: Vec<usize> = by_score[..top_len].to_vec();
    let mut in_top = vec![false; entries.len()];
    for &i in &top {
        in_top[i] = true;
    }
    let remainder: Vec<usize> = (0..entries.len()).filter(|&i| !in_top[i]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let drawn: Vec<usize> = remainder
        .choose_multiple(&mut rng, params.k_random.min(remainder.len()))
        .copied()
        .collect();
    let mut picked: Vec<usize> = top.into_iter().chain(drawn).collect();
    // worst-to-best: descending score, earlier insertion first within a score
    picked.sort_by(|&a, &b| {
        entries[b]
            .score
            .cmp(&entries[a].score)
            .then(a.cmp(&b))
    });
    Ok(picked.into_iter().map(|i| entries[i].clone()).collect())
}

#[derive(Debug, Clone)]
pub struct PromptBundle {
    pub text: String,
    pub with_knowledge: bool,
    /// The sampled solutions in the order the prompt presents them.
    pub shown_solutions: Vec<ScoredSolution>,
}

fn py_str(s: &str) -> String {
    format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
}

fn render_node_list_with_descriptions(case: &DsmCase) -> String {
    let body = case
        .nodes
        .iter()
        .map(|n| {
            let mut entry = format!(
                "{{'id': {}, 'name': {}}}",
                py_str(n.id.as_str()),
                py_str(&n.name)
            );
            if let Some(desc) = &n.description {
                entry.truncate(entry.len() - 1);
                entry.push_str(&format!(", 'description': {}}}", py_str(desc)));
            }
            entry
        })
        .collect::<Vec<_>>()
        .join(",\n");
    format!("[\n{body}\n]")
}

fn render_node_ids(case: &DsmCase) -> String {
    let body = case
        .nodes
        .iter()
        .map(|n| py_str(n.id.as_str()))
        .collect::<Vec<_>>()
        .join(", ");
    format!("[{body}]")
}

fn render_edges(case: &DsmCase, order: &[usize]) -> String {
    let body = order
        .iter()
        .map(|&i| {
            let e = &case.edges[i];
            format!(
                "{{'dependent': {}, 'predecessor': {}}}",
                py_str(e.dependent.as_str()),
                py_str(e.predecessor.as_str())
            )
        })
        .collect::<Vec<_>>()
        .join(",\n");
    format!("[\n{body}\n]")
}

fn render_history(samples: &[ScoredSolution]) -> String {
    let body = samples
        .iter()
        .map(|s| {
            format!(
                "{{'solution': {}, 'score': {:.1}}}",
                py_str(&s.sequence.to_comma_string()),
                s.score as f64
            )
        })
        .collect::<Vec<_>>()
        .join(",\n");
    format!("[\n{body}\n]")
}

/// Instantiate the prompt template. The edge list is freshly shuffled under
/// `shuffle_seed` so no listing order can leak a hint; everything else is
/// fixed text. `samples` must already be worst-to-best.
pub fn build_prompt(
    case: &DsmCase,
    samples: &[ScoredSolution],
    with_knowledge: bool,
    shuffle_seed: u64,
) -> PromptBundle {
    debug_assert!(
        samples.windows(2).all(|w| w[0].score >= w[1].score),
        "samples must be ordered worst-to-best"
    );
    let mut edge_order: Vec<usize> = (0..case.edges.len()).collect();
    edge_order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
    let edges = render_edges(case, &edge_order);
    let history = render_history(samples);

    let mut text = String::new();
    text.push_str("You are an expert in the domain of combinational optimization.\n\n");
    text.push_str(
        "Please assist me to find an optimal sequential order that minimizes feedback cycles \
         in the dependency network described below. Your task is to propose a new order that \
         differs from previous attempts and has fewer feedback cycles than any listed.\n\n",
    );
    if with_knowledge {
        text.push_str(&format!(
            "<Description of the entire Network> {} </Description of the entire Network>\n",
            case.network_description
        ));
        text.push_str(&format!(
            "<Nodes with Descriptions> {} </Nodes with Descriptions>\n",
            render_node_list_with_descriptions(case)
        ));
    } else {
        text.push_str(&format!("<Nodes> {} </Nodes>\n", render_node_ids(case)));
    }
    text.push_str(&format!("<Edges> {edges} </Edges>\n\n"));
    text.push_str(&format!(
        "Below are some previous sequential orders arranged in descending order of feedback \
         cycles (lower is better): {history}\n\n"
    ));
    text.push_str("Please suggest a new order that:\n");
    text.push_str("- Is different from all prior orders.\n");
    text.push_str("- Has fewer feedback cycles than any previous order.\n");
    text.push_str("- Covers all nodes exactly once.\n");
    text.push_str("- Starts with <order> and ends with </order>.\n");
    if with_knowledge {
        text.push_str(
            "- You can use the descriptions of nodes and networks to support your suggestion.\n",
        );
    }
    text.push_str("\nOutput Format:\n<order> ...... </order>\n\n");
    text.push_str("Please provide only the order and nothing else.");

    PromptBundle {
        text,
        with_knowledge,
        shown_solutions: samples.to_vec(),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseOrderError {
    #[error("response contains no <order> tag")]
    MissingOpenTag,
    #[error("response has an <order> tag but no closing </order>")]
    MissingCloseTag,
    #[error("order tags are present but empty")]
    EmptyOrder,
}

/// Extract the id list between the first `<order>...</order>` pair.
/// Surrounding prose is ignored; validation against a case happens in
/// [`check_sequence`].
pub fn parse_order(raw_response: &str) -> Result<Sequence, ParseOrderError> {
    const OPEN: &str = "<order>";
    const CLOSE: &str = "</order>";
    let start = raw_response
        .find(OPEN)
        .ok_or(ParseOrderError::MissingOpenTag)?
        + OPEN.len();
    let end = raw_response[start..]
        .find(CLOSE)
        .ok_or(ParseOrderError::MissingCloseTag)?
        + start;
    let seq = Sequence::parse(&raw_response[start..end]);
    if seq.is_empty() {
        return Err(ParseOrderError::EmptyOrder);
    }
    Ok(seq)
}

/// Everything a finished (or aborted) run produced.
#[derive(Debug, Clone)]
pub struct LoopRun {
    pub best: ScoredSolution,
    pub base: SolutionBase,
    pub trace: RunTrace,
    /// Best score after iteration k lives at index k-1 (prefix semantics for
    /// k-trial reporting).
    pub iteration_best: Vec<u32>,
    /// 1-based iterations whose retry budget was exhausted by invalid
    /// responses.
    pub skipped_iterations: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("invalid loop config: {0}")]
    InvalidConfig(String),
    #[error("llm failure at iteration {iteration}: {source}")]
    Llm {
        iteration: usize,
        #[source]
        source: LlmError,
        /// State up to the failure; the base keeps all scored entries.
        partial: Box<LoopRun>,
    },
}

/// Run the full optimize loop against `backend`. Each iteration: sample,
/// build prompt, query, parse, check, score, append. Invalid responses are
/// re-prompted up to `invalid_response_retries` times, then the iteration is
/// skipped. Transport failures abort with partial results attached.
pub fn optimize(
    case: &DsmCase,
    backend: &mut dyn Backend,
    config: &LoopConfig,
    mut transcript: Option<&mut Transcript>,
) -> Result<LoopRun, LoopError> {
    if config.max_iterations < 1 {
        return Err(LoopError::InvalidConfig(
            "max_iterations must be at least 1".to_string(),
        ));
    }
    if config.sampling.k_top + config.sampling.k_random < 1 {
        return Err(LoopError::InvalidConfig(
            "sampling must request at least one solution".to_string(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let eval = Evaluator::new(case);
    let mut base = SolutionBase::new();
    let mut uniques = UniqueCounter::new();
    let mut trace = RunTrace::new(config.method_label(), case.name.clone(), config.seed);
    let mut iteration_best = Vec::with_capacity(config.max_iterations);
    let mut skipped_iterations = Vec::new();

    let init = init_solution(case, rng.gen());
    let mut best_score = init.score;
    uniques.observe(&eval.perm_of(&init.sequence));
    trace.record(uniques.count(), best_score);
    base.push(init);

    let snapshot = |base: &SolutionBase,
                    trace: &RunTrace,
                    iteration_best: &[u32],
                    skipped: &[usize]| LoopRun {
        best: base.best().expect("base holds the initial solution").clone(),
        base: base.clone(),
        trace: trace.clone(),
        iteration_best: iteration_best.to_vec(),
        skipped_iterations: skipped.to_vec(),
    };

    for iteration in 1..=config.max_iterations {
        let samples = sample_solutions(&base, &config.sampling, rng.gen())
            .expect("base is never empty after initialization");
        let bundle = build_prompt(case, &samples, config.with_knowledge, rng.gen());

        let mut accepted: Option<Sequence> = None;
        for _attempt in 0..=config.invalid_response_retries {
            let request = LlmRequest {
                prompt: bundle.text.clone(),
                model_name: backend.name().to_string(),
                max_output_tokens: config.max_output_tokens,
                temperature_override: config.temperature_override,
            };
            match backend.complete(&request) {
                Ok(response) => {
                    if let Some(t) = transcript.as_deref_mut() {
                        t.log(iteration as u64, &bundle.text, &response.text, response.latency);
                    }
                    let candidate = parse_order(&response.text)
                        .ok()
                        .filter(|seq| check_sequence(seq, case).is_ok());
                    if let Some(seq) = candidate {
                        accepted = Some(seq);
                        break;
                    }
                }
                Err(source) => {
                    if let Some(t) = transcript.as_deref_mut() {
                        t.log(
                            iteration as u64,
                            &bundle.text,
                            &format!("[error] {source}"),
                            std::time::Duration::ZERO,
                        );
                    }
                    return Err(LoopError::Llm {
                        iteration,
                        source,
                        partial: Box::new(snapshot(
                            &base,
                            &trace,
                            &iteration_best,
                            &skipped_iterations,
                        )),
                    });
                }
            }
        }

        match accepted {
            Some(sequence) => {
                let perm = eval.perm_of(&sequence);
                let score = eval.score_perm(&perm);
                base.push(ScoredSolution {
                    sequence,
                    score,
                    provenance: format!("iteration {iteration}"),
                });
                best_score = best_score.min(score);
                if uniques.observe(&perm) {
                    trace.record(uniques.count(), best_score);
                }
            }
            None => skipped_iterations.push(iteration),
        }
        iteration_best.push(best_score);
    }

    Ok(snapshot(&base, &trace, &iteration_best, &skipped_iterations))
}
