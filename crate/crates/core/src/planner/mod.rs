//! The GIT* planner.

pub mod config;
pub mod key;
pub mod queue;
pub mod search;
pub mod tree;

pub use config::{Budget, PlannerConfig};
pub use key::{baseline_key, git_key, inflation_factor, truncation_factor, Key, KeyFunction, PlannerKey};
pub use queue::EdgeQueue;
pub use search::{plan, Improvement, PlanOutcome, PlanStats, Planner, TimeUnit};
pub use tree::{EdgeSet, SearchTree};
