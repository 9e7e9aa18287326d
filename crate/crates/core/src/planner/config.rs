//! Planner configuration.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::heuristics::ApfConfig;
use crate::sampling::{RggParams, DEFAULT_BATCH_SIZE, INVALID_SAMPLE_CAP};
use crate::world::default_resolution;

/// When a planning query stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// Wall-clock seconds.
    Seconds(f64),
    /// Number of sampling batches. Runs are then machine independent and
    /// reported times are collision-check counts.
    Batches(u64),
}

impl Budget {
    pub fn is_deterministic(&self) -> bool {
        matches!(self, Budget::Batches(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub batch_size: usize,
    pub rgg_eta: f64,
    pub rewire_factor: f64,
    /// `None` selects the default for the problem dimension.
    pub edge_resolution: Option<f64>,
    pub apf: ApfConfig,
    /// Recompute inflation and truncation from the sample count each batch.
    pub use_adaptive_factors: bool,
    /// Fixed factors used when adaptive factors are off.
    pub inflation: f64,
    pub truncation: f64,
    pub invalid_sample_cap: usize,
    pub budget: Budget,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            batch_size: DEFAULT_BATCH_SIZE,
            rgg_eta: 1.001,
            rewire_factor: 1.2,
            edge_resolution: None,
            apf: ApfConfig::default(),
            use_adaptive_factors: true,
            inflation: 1.0,
            truncation: 1.0,
            invalid_sample_cap: INVALID_SAMPLE_CAP,
            budget: Budget::Seconds(1.0),
        }
    }
}

impl PlannerConfig {
    pub fn with_budget(budget: Budget) -> Self {
        PlannerConfig { budget, ..Self::default() }
    }

    pub fn resolution(&self, dimension: usize) -> f64 {
        self.edge_resolution.unwrap_or_else(|| default_resolution(dimension))
    }

    pub fn rgg(&self) -> RggParams {
        RggParams { eta: self.rgg_eta, rewire_factor: self.rewire_factor }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.invalid_sample_cap == 0 {
            return Err(contract("batch size and invalid-sample cap must be positive"));
        }
        let positive = [self.rgg_eta, self.rewire_factor, self.inflation, self.truncation];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(contract("RGG constants and search factors must be positive"));
        }
        if self.inflation < 1.0 || self.truncation < 1.0 {
            return Err(contract("inflation and truncation factors must be at least 1"));
        }
        if let Some(r) = self.edge_resolution {
            if !(r.is_finite() && r > 0.0) {
                return Err(contract("edge resolution must be positive"));
            }
        }
        match self.budget {
            Budget::Seconds(s) if !(s.is_finite() && s > 0.0) => {
                return Err(contract("time limit must be positive"))
            }
            Budget::Batches(0) => return Err(contract("batch budget must be positive")),
            _ => {}
        }
        self.apf.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = PlannerConfig::default();
        c.validate().unwrap();
        assert_eq!(c.batch_size, 100);
        assert_eq!(c.resolution(4), 0.004);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            PlannerConfig { batch_size: 0, ..Default::default() },
            PlannerConfig { budget: Budget::Batches(0), ..Default::default() },
            PlannerConfig { budget: Budget::Seconds(-1.0), ..Default::default() },
            PlannerConfig { inflation: 0.5, ..Default::default() },
            PlannerConfig { edge_resolution: Some(0.0), ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn json_round_trip() {
        let c = PlannerConfig::with_budget(Budget::Batches(7));
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<PlannerConfig>(&text).unwrap(), c);
    }
}
