//! Anytime sampling-based path planning with evolved edge-ordering
//! heuristics, and the reinforced genetic programming trainer that evolves
//! them.

pub mod error;
pub mod gp;
pub mod harness;
pub mod heuristics;
pub mod planner;
pub mod reward;
pub mod sampling;
pub mod world;

pub use error::{Error, Result};
pub use gp::{EdgeContext, ExprIndividual, ExprTree, GpParams};
pub use heuristics::ApfConfig;
pub use harness::RunRecord;
pub use planner::{plan, Budget, Improvement, PlanOutcome, Planner, PlannerConfig, PlannerKey};
pub use world::{generate_scenario, AxisBox, Path, ProblemInstance, ScenarioKind, ScenarioParams, StateVec};
pub use reward::{BenchmarkSet, RewardConfig, RunMetrics};
