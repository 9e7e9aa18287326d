//! Segmented fitness evaluation and the reinforced genetic programming loop.

use std::collections::HashMap;
use std::path::{Path as FsPath, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::benchmark::BenchmarkSet;
use super::metrics::{evaluate_planner, RunMetrics};
use super::score::{clamp_total, fitness, total_score, RewardConfig};
use crate::error::{contract, Result};
use crate::gp::{init_population, point_mutate, subtree_crossover, tournament_select, ExprIndividual, GpParams};
use crate::planner::{PlannerConfig, PlannerKey};
use crate::world::ProblemInstance;

/// Baseline-key metrics for every problem of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineMetrics {
    pub fingerprint: u64,
    pub seed_base: u64,
    pub metrics: Vec<RunMetrics>,
}

impl BaselineMetrics {
    pub fn compute(set: &BenchmarkSet, planner: &PlannerConfig, seed_base: u64) -> Result<Self> {
        let instances = set.instances()?;
        let metrics = set
            .problems
            .par_iter()
            .zip(instances.par_iter())
            .map(|(spec, problem)| {
                let config = PlannerConfig { budget: spec.budget()?, ..planner.clone() };
                evaluate_planner(problem, &PlannerKey::Baseline, &config, spec.runs, seed_base)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BaselineMetrics { fingerprint: set.fingerprint(), seed_base, metrics })
    }

    /// Reads `path` when it holds metrics for this benchmark and seed base,
    /// otherwise computes them and writes `path`.
    pub fn load_or_compute(
        path: &FsPath,
        set: &BenchmarkSet,
        planner: &PlannerConfig,
        seed_base: u64,
    ) -> Result<Self> {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(cached) = serde_json::from_str::<BaselineMetrics>(&text) {
                if cached.fingerprint == set.fingerprint()
                    && cached.seed_base == seed_base
                    && cached.metrics.len() == set.problems.len()
                {
                    return Ok(cached);
                }
            }
        }
        let fresh = Self::compute(set, planner, seed_base)?;
        std::fs::write(path, serde_json::to_string_pretty(&fresh)?)?;
        Ok(fresh)
    }
}

/// Fitness of one individual.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub rho: f64,
    /// Totals of the problems actually run, in segment order.
    pub totals: Vec<f64>,
    /// Index of the segment after which evaluation stopped early.
    pub aborted_after: Option<usize>,
    /// Totals that hit the floor.
    pub clamped: usize,
}

/// Scores individuals on a fixed benchmark against cached baseline metrics.
pub struct Evaluator {
    set: BenchmarkSet,
    instances: Vec<ProblemInstance>,
    baseline: BaselineMetrics,
    baseline_self: Vec<f64>,
    reward: RewardConfig,
    planner: PlannerConfig,
}

impl Evaluator {
    pub fn new(set: BenchmarkSet, baseline: BaselineMetrics, reward: RewardConfig, planner: PlannerConfig) -> Result<Self> {
        set.validate()?;
        reward.validate()?;
        if baseline.metrics.len() != set.problems.len() {
            return Err(contract("baseline metrics do not match the benchmark"));
        }
        let instances = set.instances()?;
        let baseline_self = baseline.metrics.iter().map(|m| total_score(m, m, &reward)).collect();
        Ok(Evaluator { set, instances, baseline, baseline_self, reward, planner })
    }

    pub fn baseline(&self) -> &BaselineMetrics {
        &self.baseline
    }

    fn problem_total(&self, ind: &ExprIndividual, i: usize) -> Result<f64> {
        let spec = &self.set.problems[i];
        let config = PlannerConfig { budget: spec.budget()?, ..self.planner.clone() };
        let key = PlannerKey::Evolved(ind.clone());
        let m = evaluate_planner(&self.instances[i], &key, &config, spec.runs, self.baseline.seed_base)?;
        Ok(total_score(&m, &self.baseline.metrics[i], &self.reward))
    }

    /// Evaluates segment by segment. After each segment but the last, an
    /// individual whose partial fitness, measured above the initial score,
    /// exceeds the abort margin times the baseline's keeps its partial
    /// fitness: the unseen problems are assumed to score like the seen ones.
    pub fn evaluate(&self, ind: &ExprIndividual) -> Result<Evaluation> {
        let segments = self.set.segment_order();
        let baseline_size = ExprIndividual::baseline().size();
        let mut totals = Vec::new();
        let mut reference = Vec::new();
        let mut clamped = 0;
        for (k, segment) in segments.iter().enumerate() {
            for &i in segment {
                let t = self.problem_total(ind, i)?;
                clamped += usize::from(clamp_total(t).1);
                totals.push(t);
                reference.push(self.baseline_self[i]);
            }
            let rho = fitness(&totals, ind.size(), &self.reward)?;
            if k + 1 < segments.len() {
                let floor = self.reward.initial_score;
                let bound = fitness(&reference, baseline_size, &self.reward)? - floor;
                if rho - floor > self.reward.abort_margin * bound {
                    return Ok(Evaluation { rho, totals, aborted_after: Some(k), clamped });
                }
            }
        }
        let rho = fitness(&totals, ind.size(), &self.reward)?;
        Ok(Evaluation { rho, totals, aborted_after: None, clamped })
    }
}

/// Per-generation fitness summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub min_rho: f64,
    pub mean_rho: f64,
    pub max_rho: f64,
    pub best_so_far: f64,
    /// Individuals evaluated this generation (cache misses).
    pub evaluated: usize,
    pub aborted: usize,
    pub clamped: usize,
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    /// Seeds the genetic operators.
    pub seed: u64,
    /// First planner seed of every evaluation.
    pub eval_seed_base: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Individuals placed at the front of the initial population.
    pub inject: Vec<ExprIndividual>,
    /// Receives `generations.csv`, `winner.heuristic` and the baseline cache.
    pub out_dir: Option<PathBuf>,
    pub planner: PlannerConfig,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            seed: 0,
            eval_seed_base: 0,
            jobs: None,
            inject: Vec::new(),
            out_dir: None,
            planner: PlannerConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Lowest-fitness individual over all generations.
    pub best: ExprIndividual,
    pub generations: Vec<GenerationStats>,
    /// Fitness of the baseline key scored like any individual.
    pub baseline_rho: f64,
    /// Fitness of every distinct genotype evaluated, keyed by genotype.
    pub evaluated: HashMap<String, f64>,
}

/// Evolves G-heuristics on `set`. Each generation is evaluated, summarised,
/// and bred into the next by tournament selection, subtree crossover and
/// gated point mutation, with the best individual carried over unchanged.
/// Fitness is a function of genotype, so repeated genotypes are not rerun.
pub fn train_rgp(set: &BenchmarkSet, params: &GpParams, reward: &RewardConfig, opts: &TrainOptions) -> Result<TrainOutcome> {
    params.validate()?;
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let baseline = match &opts.out_dir {
        Some(dir) => {
            let path = dir.join(format!("baseline-{:016x}.json", set.fingerprint()));
            BaselineMetrics::load_or_compute(&path, set, &opts.planner, opts.eval_seed_base)?
        }
        None => BaselineMetrics::compute(set, &opts.planner, opts.eval_seed_base)?,
    };
    let evaluator = Evaluator::new(set.clone(), baseline, reward.clone(), opts.planner.clone())?;
    let pool = match opts.jobs {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| contract(format!("worker pool: {e}")))?,
        ),
        None => None,
    };
    let run_parallel = |batch: &[ExprIndividual]| -> Result<Vec<Evaluation>> {
        let work = || batch.par_iter().map(|ind| evaluator.evaluate(ind)).collect::<Result<Vec<_>>>();
        match &pool {
            Some(p) => p.install(work),
            None => work(),
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut population = init_population(params.population, params.max_depth, &mut rng)?;
    for (slot, ind) in population.iter_mut().zip(&opts.inject) {
        *slot = ExprIndividual { fitness: None, ..ind.clone() };
    }

    let mut cache: HashMap<String, Evaluation> = HashMap::new();
    let mut best: Option<ExprIndividual> = None;
    let mut generations = Vec::with_capacity(params.generations);
    for generation in 0..params.generations {
        let mut missing: Vec<ExprIndividual> = Vec::new();
        for ind in &population {
            let g = ind.genotype();
            if !cache.contains_key(&g) && !missing.iter().any(|m| m.genotype() == g) {
                missing.push(ind.clone());
            }
        }
        let fresh = run_parallel(&missing)?;
        let (mut aborted, mut clamped) = (0, 0);
        for (ind, eval) in missing.iter().zip(fresh) {
            aborted += usize::from(eval.aborted_after.is_some());
            clamped += eval.clamped;
            cache.insert(ind.genotype(), eval);
        }
        for ind in &mut population {
            ind.fitness = Some(cache[&ind.genotype()].rho);
        }

        let rhos: Vec<f64> = population.iter().map(|i| i.fitness.unwrap_or(f64::INFINITY)).collect();
        let gen_best = (0..population.len())
            .min_by(|&a, &b| rhos[a].total_cmp(&rhos[b]).then(population[a].size().cmp(&population[b].size())))
            .expect("population is non-empty");
        if best.as_ref().map_or(true, |b| rhos[gen_best] < b.fitness.unwrap_or(f64::INFINITY)) {
            best = Some(population[gen_best].clone());
        }
        let best_so_far = best.as_ref().and_then(|b| b.fitness).unwrap_or(f64::INFINITY);
        generations.push(GenerationStats {
            generation,
            min_rho: rhos[gen_best],
            mean_rho: rhos.iter().sum::<f64>() / rhos.len() as f64,
            max_rho: rhos.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            best_so_far,
            evaluated: missing.len(),
            aborted,
            clamped,
        });
        if generation + 1 == params.generations {
            break;
        }

        let mut next = Vec::with_capacity(params.population);
        next.push(population[gen_best].clone());
        while next.len() < params.population {
            let a = tournament_select(&population, params.tournament_size, &mut rng)?;
            let b = tournament_select(&population, params.tournament_size, &mut rng)?;
            let mut child =
                subtree_crossover(&population[a], &population[b], params.crossover_rate, params.max_depth, &mut rng);
            if rng.gen::<f64>() < params.mutation_rate {
                child = point_mutate(&child, params.mutation_rate, &mut rng);
            }
            next.push(child);
        }
        population = next;
    }

    let best = best.expect("at least one generation ran");
    let baseline_rho = evaluator.evaluate(&ExprIndividual::baseline())?.rho;
    if let Some(dir) = &opts.out_dir {
        write_generations_csv(&dir.join("generations.csv"), &generations)?;
        best.save(dir.join("winner.heuristic"))?;
    }
    let evaluated = cache.into_iter().map(|(g, e)| (g, e.rho)).collect();
    Ok(TrainOutcome { best, generations, baseline_rho, evaluated })
}

/// Writes `gen, min_rho, mean_rho, max_rho`, one row per generation.
pub fn write_generations_csv(path: &FsPath, generations: &[GenerationStats]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["gen", "min_rho", "mean_rho", "max_rho"])?;
    for g in generations {
        w.write_record([
            g.generation.to_string(),
            g.min_rho.to_string(),
            g.mean_rho.to_string(),
            g.max_rho.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
