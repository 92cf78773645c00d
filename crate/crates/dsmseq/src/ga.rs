//! Permutation genetic algorithm: tournament selection with replacement,
//! order crossover on pairs, shuffle-indexes mutation, elitism of one.
//! Operator semantics mirror the common evolutionary-computation library
//! conventions so preset parameters carry their usual meaning.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::case::DsmCase;
use crate::eval::{sequence_from_perm, Evaluator, ScoredSolution};
use crate::trace::{RunTrace, UniqueCounter};

pub const DEFAULT_GENERATIONS: usize = 2000;

pub use crate::trace::truncate_trace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    /// Probability that an individual is mutated at all.
    pub mutation_prob: f64,
    /// Within a mutated individual, per-position probability of swapping with
    /// a random other position.
    pub per_index_shuffle_prob: f64,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum GaConfigError {
    #[error("{field} must be a probability in [0,1], got {value}")]
    ProbabilityOutOfRange { field: &'static str, value: f64 },
    #[error("population_size must be at least 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("tournament_size must be at least 1")]
    EmptyTournament,
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaConfigError> {
        let probs = [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("per_index_shuffle_prob", self.per_index_shuffle_prob),
        ];
        for (field, value) in probs {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(GaConfigError::ProbabilityOutOfRange { field, value });
            }
        }
        if self.population_size < 2 {
            return Err(GaConfigError::PopulationTooSmall(self.population_size));
        }
        if self.tournament_size == 0 {
            return Err(GaConfigError::EmptyTournament);
        }
        // tournament_size > population_size is fine: aspirants are drawn with
        // replacement
        Ok(())
    }
}

/// The three published parameterizations, as
/// (population, per-index prob, tournament, crossover, mutation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaPreset {
    #[serde(alias = "exploration")]
    ExplorationFocused,
    #[serde(alias = "exploitation")]
    ExploitationFocused,
    Balanced,
}

impl GaPreset {
    pub const ALL: [GaPreset; 3] = [
        GaPreset::ExplorationFocused,
        GaPreset::ExploitationFocused,
        GaPreset::Balanced,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            GaPreset::ExplorationFocused => "ga-exploration",
            GaPreset::ExploitationFocused => "ga-exploitation",
            GaPreset::Balanced => "ga-balanced",
        }
    }

    pub fn config(&self, seed: u64) -> GaConfig {
        let (population_size, per_index_shuffle_prob, tournament_size, crossover_prob, mutation_prob) =
            match self {
                GaPreset::ExplorationFocused => (50, 0.05, 5, 0.6, 0.4),
                GaPreset::ExploitationFocused => (10, 0.01, 20, 0.9, 0.1),
                GaPreset::Balanced => (20, 0.02, 10, 0.7, 0.3),
            };
        GaConfig {
            population_size,
            generations: DEFAULT_GENERATIONS,
            tournament_size,
            crossover_prob,
            mutation_prob,
            per_index_shuffle_prob,
            seed,
        }
    }
}

/// Draw two distinct values: `a` uniform in 0..n, `b` uniform among the rest.
fn distinct_pair(rng: &mut impl Rng, n: usize) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// Order crossover: each child keeps one parent's segment [a..=b] and fills
/// the remaining slots with the other parent's missing values in rotated
/// order starting after the segment. Closed over permutations.
fn order_crossover(ind1: &mut [u32], ind2: &mut [u32], rng: &mut impl Rng) {
    let size = ind1.len();
    debug_assert!(size >= 2);
    let (mut a, mut b) = distinct_pair(rng, size);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    // holes1[v]: v sits inside ind2's segment (must be re-filled into ind1)
    let mut holes1 = vec![true; size];
    let mut holes2 = vec![true; size];
    for i in 0..size {
        if i < a || i > b {
            holes1[ind2[i] as usize] = false;
            holes2[ind1[i] as usize] = false;
        }
    }
    let temp1 = ind1.to_vec();
    let temp2 = ind2.to_vec();
    let (mut k1, mut k2) = (b + 1, b + 1);
    for i in 0..size {
        let v1 = temp1[(i + b + 1) % size];
        if !holes1[v1 as usize] {
            ind1[k1 % size] = v1;
            k1 += 1;
        }
        let v2 = temp2[(i + b + 1) % size];
        if !holes2[v2 as usize] {
            ind2[k2 % size] = v2;
            k2 += 1;
        }
    }
    for i in a..=b {
        std::mem::swap(&mut ind1[i], &mut ind2[i]);
    }
}

/// Per position: with probability `indpb`, swap with a uniformly chosen
/// *other* position.
fn shuffle_indexes(ind: &mut [u32], indpb: f64, rng: &mut impl Rng) {
    let size = ind.len();
    debug_assert!(size >= 2);
    for i in 0..size {
        if rng.gen::<f64>() < indpb {
            let mut j = rng.gen_range(0..size - 1);
            if j >= i {
                j += 1;
            }
            ind.swap(i, j);
        }
    }
}

/// Index of the tournament winner: lowest score among `k` aspirants drawn
/// with replacement; the earliest-drawn aspirant wins ties.
fn tournament(scores: &[u32], k: usize, rng: &mut impl Rng) -> usize {
    let mut winner = rng.gen_range(0..scores.len());
    for _ in 1..k {
        let challenger = rng.gen_range(0..scores.len());
        if scores[challenger] < scores[winner] {
            winner = challenger;
        }
    }
    winner
}

/// Evolve and return the best-ever solution plus a trace keyed by unique
/// solutions explored (initial population included). Deterministic per seed.
pub fn ga_run(case: &DsmCase, config: &GaConfig) -> Result<(ScoredSolution, RunTrace), GaConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let eval = Evaluator::new(case);
    let n = eval.node_count();

    let mut trace = RunTrace::new("ga", case.name.clone(), config.seed);
    let mut uniques = UniqueCounter::new();
    let mut best_perm: Vec<u32> = Vec::new();
    let mut best_score = u32::MAX;

    let observe = |perm: &[u32],
                       score: u32,
                       best_perm: &mut Vec<u32>,
                       best_score: &mut u32,
                       uniques: &mut UniqueCounter,
                       trace: &mut RunTrace| {
        if score < *best_score {
            *best_score = score;
            *best_perm = perm.to_vec();
        }
        if uniques.observe(perm) {
            trace.record(uniques.count(), *best_score);
        }
    };

    let mut population: Vec<Vec<u32>> = (0..config.population_size)
        .map(|_| {
            let mut perm: Vec<u32> = (0..n as u32).collect();
            perm.shuffle(&mut rng);
            perm
        })
        .collect();
    let mut scores: Vec<u32> = population.iter().map(|p| eval.score_perm(p)).collect();
    for (perm, &score) in population.iter().zip(&scores) {
        observe(perm, score, &mut best_perm, &mut best_score, &mut uniques, &mut trace);
    }

    for _gen in 0..config.generations {
        let mut offspring: Vec<Vec<u32>> = (0..config.population_size)
            .map(|_| population[tournament(&scores, config.tournament_size, &mut rng)].clone())
            .collect();
        for i in (1..config.population_size).step_by(2) {
            if rng.gen::<f64>() < config.crossover_prob {
                let (left, right) = offspring.split_at_mut(i);
                order_crossover(&mut left[i - 1], &mut right[0], &mut rng);
            }
        }
        for ind in offspring.iter_mut() {
            if rng.gen::<f64>() < config.mutation_prob {
                shuffle_indexes(ind, config.per_index_shuffle_prob, &mut rng);
            }
        }
        let mut offspring_scores: Vec<u32> = offspring.iter().map(|p| eval.score_perm(p)).collect();
        // elitism: reinstate the best-ever individual over the worst offspring
        if best_score < *offspring_scores.iter().max().expect("population non-empty") {
            let worst = offspring_scores
                .iter()
                .enumerate()
                .max_by_key(|&(i, &s)| (s, i))
                .map(|(i, _)| i)
                .expect("population non-empty");
            offspring[worst] = best_perm.clone();
            offspring_scores[worst] = best_score;
        }
        for (perm, &score) in offspring.iter().zip(&offspring_scores) {
            observe(perm, score, &mut best_perm, &mut best_score, &mut uniques, &mut trace);
        }
        population = offspring;
        scores = offspring_scores;
    }

    let best = ScoredSolution {
        sequence: sequence_from_perm(case, &best_perm),
        score: best_score,
        provenance: "ga".to_string(),
    };
    Ok((best, trace))
}
