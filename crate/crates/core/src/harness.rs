//! Run records, benchmark execution and result export.
//!
//! Raw runs are JSON lines with `null` standing for an infinite value.
//! Summaries are CSV with the literal `inf`. Every summary value can be
//! recomputed from the raw lines.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path as FsPath;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::planner::{plan, PlanOutcome, PlannerConfig, PlannerKey, TimeUnit};
use crate::reward::{BenchmarkSet, RunMetrics};
use crate::world::ProblemInstance;

/// Serializes a non-finite `f64` as `null` and reads `null` back as `+inf`.
pub(crate) mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Renders a value for CSV and summaries: non-finite values become `inf`.
pub fn fmt_value(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "inf".to_string()
    }
}

/// One planning query and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub planner: String,
    pub problem: String,
    pub seed: u64,
    pub success: bool,
    #[serde(with = "inf_as_null")]
    pub t_init: f64,
    #[serde(with = "inf_as_null")]
    pub c_init: f64,
    #[serde(with = "inf_as_null")]
    pub c_final: f64,
    /// Strictly improving `(time, cost)` pairs.
    pub improvements: Vec<(f64, f64)>,
    pub time_unit: TimeUnit,
    pub samples: u64,
    pub collision_checks: u64,
}

impl RunRecord {
    pub fn from_outcome(planner: &str, problem: &str, seed: u64, out: &PlanOutcome) -> Self {
        RunRecord {
            planner: planner.to_string(),
            problem: problem.to_string(),
            seed,
            success: out.success(),
            t_init: out.t_init(),
            c_init: out.c_init(),
            c_final: out.c_final(),
            improvements: out.improvements.iter().map(|i| (i.time, i.cost)).collect(),
            time_unit: out.time_unit,
            samples: out.stats.samples,
            collision_checks: out.stats.collision_checks,
        }
    }

    /// A run that could not be carried out at all.
    pub fn failed(planner: &str, problem: &str, seed: u64, time_unit: TimeUnit) -> Self {
        RunRecord {
            planner: planner.to_string(),
            problem: problem.to_string(),
            seed,
            success: false,
            t_init: f64::INFINITY,
            c_init: f64::INFINITY,
            c_final: f64::INFINITY,
            improvements: Vec::new(),
            time_unit,
            samples: 0,
            collision_checks: 0,
        }
    }

    /// Checks that a successful record carries finite values and a series.
    pub fn validate(&self) -> Result<()> {
        if self.success {
            let finite = self.t_init.is_finite() && self.c_init.is_finite() && self.c_final.is_finite();
            if !finite || self.improvements.is_empty() {
                return Err(contract(format!(
                    "successful run {} / {} / {} lacks finite results",
                    self.planner, self.problem, self.seed
                )));
            }
        }
        Ok(())
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn summary(&self) -> String {
        format!(
            "t_init={} c_init={} c_final={} success={}",
            fmt_value(self.t_init),
            fmt_value(self.c_init),
            fmt_value(self.c_final),
            u8::from(self.success)
        )
    }
}

fn time_unit(config: &PlannerConfig) -> TimeUnit {
    if config.budget.is_deterministic() {
        TimeUnit::Checks
    } else {
        TimeUnit::Seconds
    }
}

/// Runs one planning query.
pub fn run_once(
    problem: &ProblemInstance,
    key: &PlannerKey,
    planner: &str,
    config: &PlannerConfig,
    seed: u64,
) -> Result<RunRecord> {
    let out = plan(problem, config.clone(), key.clone(), seed)?;
    Ok(RunRecord::from_outcome(planner, &problem.label(), seed, &out))
}

/// Runs seeds `seed_base..seed_base + runs` one after another.
pub fn run_many(
    problem: &ProblemInstance,
    key: &PlannerKey,
    planner: &str,
    config: &PlannerConfig,
    runs: usize,
    seed_base: u64,
) -> Result<Vec<RunRecord>> {
    (0..runs as u64)
        .map(|i| run_once(problem, key, planner, config, seed_base + i))
        .collect()
}

pub fn write_jsonl(path: impl AsRef<FsPath>, records: &[RunRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in records {
        writeln!(out, "{}", r.to_json_line()?)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl(path: impl AsRef<FsPath>) -> Result<Vec<RunRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            records.push(serde_json::from_str(&line)?);
        }
    }
    Ok(records)
}

/// Summary of one planner on one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub planner: String,
    pub problem: String,
    pub metrics: RunMetrics,
}

pub const CSV_HEADER: [&str; 12] = [
    "planner", "problem", "t_init_min", "t_init_med", "t_init_max", "c_init_min", "c_init_med",
    "c_init_max", "c_final_min", "c_final_med", "c_final_max", "success",
];

pub fn write_metrics_csv<W: Write>(out: W, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let mut fields = vec![row.planner.clone(), row.problem.clone()];
        fields.extend(row.metrics.values().iter().map(|v| fmt_value(*v)));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Percentage by which `candidate` lowers the median initial-solution time
/// of `reference`. `None` when either median is infinite or the reference
/// is zero.
pub fn t_init_improvement_pct(reference: &RunMetrics, candidate: &RunMetrics) -> Option<f64> {
    let (r, c) = (reference.t_init.med, candidate.t_init.med);
    (r.is_finite() && c.is_finite() && r != 0.0).then(|| (r - c) / r * 100.0)
}

/// Writes `planner, problem, reference, t_init_med_improvement_pct` for
/// every non-reference row.
pub fn write_improvement_csv<W: Write>(out: W, rows: &[MetricsRow], reference: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["planner", "problem", "reference", "t_init_med_improvement_pct"])?;
    for row in rows.iter().filter(|r| r.planner != reference) {
        let base = rows.iter().find(|r| r.planner == reference && r.problem == row.problem);
        let pct = base.and_then(|b| t_init_improvement_pct(&b.metrics, &row.metrics));
        w.write_record([
            row.planner.as_str(),
            row.problem.as_str(),
            reference,
            &pct.map_or_else(|| "nan".to_string(), |p| p.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Raw records and per-(planner, problem) summaries of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<RunRecord>,
    pub rows: Vec<MetricsRow>,
    /// Runs that raised an error; they are recorded as failures.
    pub warnings: Vec<String>,
}

/// Runs every planner on every benchmark problem. `budget_override`
/// replaces each problem's own budget. Output is ordered by planner, then
/// problem, then seed.
pub fn run_benchmark(
    set: &BenchmarkSet,
    planners: &[(String, PlannerKey)],
    base_config: &PlannerConfig,
    budget_override: Option<crate::planner::Budget>,
    seed_base: u64,
    jobs: Option<usize>,
) -> Result<BenchReport> {
    let instances = set.instances()?;
    let mut tasks = Vec::new();
    for (pi, _) in planners.iter().enumerate() {
        for (qi, spec) in set.problems.iter().enumerate() {
            for r in 0..spec.runs as u64 {
                tasks.push((pi, qi, seed_base + r));
            }
        }
    }
    let run_task = |&(pi, qi, seed): &(usize, usize, u64)| {
        let (label, key) = &planners[pi];
        let config = PlannerConfig {
            budget: budget_override.unwrap_or(set.problems[qi].budget()?),
            ..base_config.clone()
        };
        let problem = &instances[qi];
        Ok::<_, crate::Error>(match run_once(problem, key, label, &config, seed) {
            Ok(rec) => (rec, None),
            Err(e) => (
                RunRecord::failed(label, &problem.label(), seed, time_unit(&config)),
                Some(format!("{label} on {} seed {seed}: {e}", problem.label())),
            ),
        })
    };
    let results: Vec<(RunRecord, Option<String>)> = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| contract(format!("worker pool: {e}")))?
            .install(|| tasks.par_iter().map(run_task).collect::<Result<_>>())?,
        None => tasks.par_iter().map(run_task).collect::<Result<_>>()?,
    };
    let mut records = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for (rec, warn) in results {
        records.push(rec);
        warnings.extend(warn);
    }
    let mut rows = Vec::new();
    for (label, _) in planners {
        for problem in &instances {
            let id = problem.label();
            let runs: Vec<RunRecord> = records
                .iter()
                .filter(|r| &r.planner == label && r.problem == id)
                .cloned()
                .collect();
            rows.push(MetricsRow {
                planner: label.clone(),
                problem: id,
                metrics: RunMetrics::from_records(&runs)?,
            });
        }
    }
    Ok(BenchReport { records, rows, warnings })
}
