use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{avg_power, random_dataset};
use super::SearchError;
use crate::isa_sim::{Benchmark, BenchmarkProgram, InputDataset, PowerModelParams};
use crate::rng::{child_seed, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means one flip per chromosome on
    /// average.
    pub mutation_rate: Option<f64>,
    pub objective: Objective,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 64,
            generations: 100,
            tournament_size: 4,
            crossover_rate: 0.9,
            mutation_rate: None,
            objective: Objective::Maximize,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidConfig(m));
        if self.population < 2 {
            return bad(format!("population {} < 2", self.population));
        }
        if self.tournament_size == 0 || self.tournament_size > self.population {
            return bad(format!("tournament size {} not in 1..=population", self.tournament_size));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover rate {}", self.crossover_rate));
        }
        if let Some(m) = self.mutation_rate {
            if !(0.0..=1.0).contains(&m) {
                return bad(format!("mutation rate {m}"));
            }
        }
        Ok(())
    }

    pub fn mutation_rate_for(&self, bytes: usize) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / (8 * bytes.max(1)) as f64)
    }

    /// Simulations a run performs: the initial population plus every
    /// non-elite child.
    pub fn evaluations(&self) -> usize {
        self.population + self.generations * (self.population - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best average power in the population, mW.
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best: InputDataset,
    /// Average power of `best`, mW.
    pub best_fitness: f64,
    pub trace: Vec<GenerationStats>,
    pub evaluations: usize,
}

impl GaResult {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("generation,best,mean\n");
        for g in &self.trace {
            out.push_str(&format!("{},{},{}\n", g.generation, g.best, g.mean));
        }
        out
    }
}

const GA_STREAM: u64 = 0x6761;

/// Noise seed tied to the chromosome, so a dataset always measures the same
/// within one run and clones of an individual cannot win on noise alone.
fn measurement_seed(seed: u64, bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(child_seed(seed, GA_STREAM), |h, &b| child_seed(h, u64::from(b)))
}

pub fn ga_optimize(benchmark: Benchmark, params: &PowerModelParams, config: &GaConfig) -> Result<GaResult, SearchError> {
    config.validate()?;
    let layout = benchmark.layout();
    let mut rng = seeded(config.seed, GA_STREAM);
    let initial = (0..config.population)
        .map(|_| random_dataset(layout, &mut rng))
        .collect();
    evolve(benchmark, params, config, initial, rng)
}

/// Runs the GA from a caller-supplied first generation.
pub fn ga_optimize_from(
    benchmark: Benchmark,
    params: &PowerModelParams,
    config: &GaConfig,
    initial: Vec<InputDataset>,
) -> Result<GaResult, SearchError> {
    config.validate()?;
    if initial.len() != config.population {
        return Err(SearchError::InvalidConfig(format!(
            "{} initial chromosomes for population {}",
            initial.len(),
            config.population
        )));
    }
    if let Some(d) = initial.iter().find(|d| d.layout() != benchmark.layout()) {
        return Err(SearchError::InvalidConfig(format!("initial dataset has layout {:?}", d.layout())));
    }
    let rng = seeded(config.seed, GA_STREAM);
    evolve(benchmark, params, config, initial, rng)
}

fn evolve(
    benchmark: Benchmark,
    params: &PowerModelParams,
    config: &GaConfig,
    initial: Vec<InputDataset>,
    mut rng: rand_chacha::ChaCha8Rng,
) -> Result<GaResult, SearchError> {
    let prog = benchmark.compile();
    let bytes = benchmark.layout().byte_len();
    let mutation = config.mutation_rate_for(bytes);
    let sign = match config.objective {
        Objective::Maximize => 1.0,
        Objective::Minimize => -1.0,
    };
    let eval = |prog: &BenchmarkProgram, pop: &[InputDataset]| -> Vec<f64> {
        pop.par_iter()
            .map(|d| avg_power(prog, d, params, measurement_seed(config.seed, d.bytes())))
            .collect()
    };

    let mut pop = initial;
    let mut power = eval(&prog, &pop);
    let mut evaluations = pop.len();
    let mut trace = Vec::with_capacity(config.generations + 1);
    let elite_of = |power: &[f64]| -> usize {
        (0..power.len())
            .max_by(|&a, &b| (sign * power[a]).total_cmp(&(sign * power[b])).then(b.cmp(&a)))
            .unwrap()
    };

    for generation in 0..=config.generations {
        let elite = elite_of(&power);
        trace.push(GenerationStats {
            generation,
            best: power[elite],
            mean: power.iter().sum::<f64>() / power.len() as f64,
        });
        if generation == config.generations {
            break;
        }

        let tournament = |rng: &mut rand_chacha::ChaCha8Rng| -> usize {
            (0..config.tournament_size)
                .map(|_| rng.random_range(0..pop.len()))
                .max_by(|&a, &b| (sign * power[a]).total_cmp(&(sign * power[b])))
                .unwrap()
        };
        let mut children = Vec::with_capacity(pop.len() - 1);
        for _ in 1..pop.len() {
            let (pa, pb) = (tournament(&mut rng), tournament(&mut rng));
            let mut child = pop[pa].clone();
            if rng.random_bool(config.crossover_rate) {
                for (c, &o) in child.bytes_mut().iter_mut().zip(pop[pb].bytes()) {
                    let mask: u8 = rng.random();
                    *c = (*c & mask) | (o & !mask);
                }
            }
            if mutation > 0.0 {
                for c in child.bytes_mut() {
                    for bit in 0..8 {
                        if rng.random_bool(mutation) {
                            *c ^= 1 << bit;
                        }
                    }
                }
            }
            children.push(child);
        }
        let child_power = eval(&prog, &children);
        evaluations += children.len();

        let elite_data = pop.swap_remove(elite);
        let elite_power = power.swap_remove(elite);
        pop = std::iter::once(elite_data).chain(children).collect();
        power = std::iter::once(elite_power).chain(child_power).collect();
    }

    let elite = elite_of(&power);
    Ok(GaResult {
        best: pop[elite].clone(),
        best_fitness: power[elite],
        trace,
        evaluations,
    })
}
