//! Performance measurement, reward scoring against the baseline key, and
//! the training loop that evolves G-heuristics.

mod benchmark;
mod metrics;
mod score;
mod train;

pub use benchmark::{BenchmarkProblem, BenchmarkSet};
pub use metrics::{evaluate_planner, median, RunMetrics, Spread, METRIC_NAMES};
pub use score::{
    base_score, clamp_total, fitness, literal_base_score, success_bonus, total_score, RewardConfig,
    DEFAULT_WEIGHTS, EPS_DEN, TOTAL_FLOOR,
};
pub use train::{
    train_rgp, write_generations_csv, BaselineMetrics, Evaluation, Evaluator, GenerationStats, TrainOptions,
    TrainOutcome,
};
