//! Aggregated performance of one planner on one problem.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::harness::{inf_as_null, run_many, RunRecord};
use crate::planner::{PlannerConfig, PlannerKey};
use crate::world::ProblemInstance;

/// Median of `values` with `+inf` ordered last. An even count averages the
/// two middle values, so a middle pair touching `inf` yields `inf`.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Minimum, median and maximum of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    #[serde(with = "inf_as_null")]
    pub min: f64,
    #[serde(with = "inf_as_null")]
    pub med: f64,
    #[serde(with = "inf_as_null")]
    pub max: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Self {
        Spread {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            med: median(values),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// The ten scored metrics plus the run count. Failed runs count as `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub t_init: Spread,
    pub c_init: Spread,
    pub c_final: Spread,
    /// Fraction of successful runs.
    pub success: f64,
    pub runs: usize,
}

/// Metric names in scoring order.
pub const METRIC_NAMES: [&str; 10] = [
    "t_init_min", "t_init_med", "t_init_max", "c_init_min", "c_init_med", "c_init_max",
    "c_final_min", "c_final_med", "c_final_max", "success",
];

impl RunMetrics {
    pub fn from_records(records: &[RunRecord]) -> Result<Self> {
        if records.is_empty() {
            return Err(contract("metrics need at least one run"));
        }
        let pick = |f: fn(&RunRecord) -> f64| -> Vec<f64> {
            records.iter().map(|r| if r.success { f(r) } else { f64::INFINITY }).collect()
        };
        let successes = records.iter().filter(|r| r.success).count();
        Ok(RunMetrics {
            t_init: Spread::of(&pick(|r| r.t_init)),
            c_init: Spread::of(&pick(|r| r.c_init)),
            c_final: Spread::of(&pick(|r| r.c_final)),
            success: successes as f64 / records.len() as f64,
            runs: records.len(),
        })
    }

    /// Builds a record directly from the ten values in [`METRIC_NAMES`] order.
    pub fn from_values(v: [f64; 10], runs: usize) -> Self {
        RunMetrics {
            t_init: Spread { min: v[0], med: v[1], max: v[2] },
            c_init: Spread { min: v[3], med: v[4], max: v[5] },
            c_final: Spread { min: v[6], med: v[7], max: v[8] },
            success: v[9],
            runs,
        }
    }

    /// The ten values in [`METRIC_NAMES`] order.
    pub fn values(&self) -> [f64; 10] {
        [
            self.t_init.min,
            self.t_init.med,
            self.t_init.max,
            self.c_init.min,
            self.c_init.med,
            self.c_init.max,
            self.c_final.min,
            self.c_final.med,
            self.c_final.max,
            self.success,
        ]
    }
}

/// Runs `key` on `problem` with seeds `seed_base..seed_base + runs` and
/// aggregates the outcome.
pub fn evaluate_planner(
    problem: &ProblemInstance,
    key: &PlannerKey,
    config: &PlannerConfig,
    runs: usize,
    seed_base: u64,
) -> Result<RunMetrics> {
    if runs == 0 {
        return Err(contract("runs must be at least 1"));
    }
    RunMetrics::from_records(&run_many(problem, key, key.label(), config, runs, seed_base)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{Budget, TimeUnit};
    use crate::world::{generate_scenario, open_world, ScenarioKind, ScenarioParams, StateVec};

    const INF: f64 = f64::INFINITY;

    #[test]
    fn median_rules() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[1.0, INF]), INF);
        assert_eq!(median(&[1.0, 2.0, INF, INF]), INF);
        assert_eq!(median(&[1.0, 2.0, 3.0, INF]), 2.5);
    }

    fn success_pattern(successes: usize, runs: usize) -> Vec<RunRecord> {
        (0..runs)
            .map(|i| {
                let mut r = RunRecord::failed("x", "p", i as u64, TimeUnit::Seconds);
                if i < successes {
                    r.success = true;
                    r.t_init = 0.1 + i as f64 * 0.01;
                    r.c_init = 2.0;
                    r.c_final = 1.5;
                    r.improvements = vec![(r.t_init, 2.0), (1.0, 1.5)];
                }
                r
            })
            .collect()
    }

    #[test]
    fn fewer_than_half_successes_give_infinite_medians() {
        let m = RunMetrics::from_records(&success_pattern(48, 100)).unwrap();
        assert_eq!(m.success, 0.48);
        assert!((m.t_init.min - 0.1).abs() < 1e-12);
        assert_eq!(m.t_init.med, INF);
        assert_eq!(m.t_init.max, INF);
        assert_eq!(m.c_final.med, INF);
    }

    #[test]
    fn spreads_are_ordered() {
        let m = RunMetrics::from_records(&success_pattern(7, 10)).unwrap();
        for s in [m.t_init, m.c_init, m.c_final] {
            assert!(s.min <= s.med && s.med <= s.max);
        }
        assert_eq!(m.runs, 10);
    }

    #[test]
    fn values_round_trip() {
        let v = [0.19, INF, INF, 2.5, INF, INF, 2.5, INF, INF, 0.48];
        assert_eq!(RunMetrics::from_values(v, 100).values(), v);
        let m = RunMetrics::from_values(v, 100);
        let back: RunMetrics = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn all_failures() {
        let p = generate_scenario(ScenarioKind::GoalEnclosure, 2, 1, &ScenarioParams { sealed: true, ..Default::default() })
            .unwrap();
        let cfg = PlannerConfig::with_budget(Budget::Batches(2));
        let m = evaluate_planner(&p, &PlannerKey::GitStar, &cfg, 3, 0).unwrap();
        assert_eq!(m.success, 0.0);
        assert!(m.values()[..9].iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn free_world_reaches_near_optimum() {
        let p = open_world(StateVec::splat(2, 0.1), StateVec::splat(2, 0.9), 0.01).unwrap();
        let cfg = PlannerConfig::with_budget(Budget::Batches(20));
        let m = evaluate_planner(&p, &PlannerKey::GitStar, &cfg, 5, 0).unwrap();
        assert_eq!(m.success, 1.0);
        assert!(m.c_final.med <= p.straight_line_cost() * 1.05);
        assert_eq!(evaluate_planner(&p, &PlannerKey::GitStar, &cfg, 5, 0).unwrap(), m);
        assert!(evaluate_planner(&p, &PlannerKey::GitStar, &cfg, 0, 0).is_err());
    }
}
