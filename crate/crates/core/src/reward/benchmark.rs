//! Benchmark sets: generated problems, their budgets and difficulty segments.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path as FsPath;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{contract, Result};
use crate::planner::Budget;
use crate::world::{generate_scenario, ProblemInstance, ScenarioKind, ScenarioParams};

fn kind_from_str<'de, D: Deserializer<'de>>(d: D) -> Result<ScenarioKind, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

fn kind_to_str<S: Serializer>(k: &ScenarioKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(k.short_name())
}

/// One benchmark problem. Exactly one of `time_limit_s` and `batch_budget`
/// must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkProblem {
    #[serde(deserialize_with = "kind_from_str", serialize_with = "kind_to_str")]
    pub scenario: ScenarioKind,
    pub dimension: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_budget: Option<u64>,
    pub runs: usize,
}

impl BenchmarkProblem {
    pub fn budget(&self) -> Result<Budget> {
        match (self.time_limit_s, self.batch_budget) {
            (Some(t), None) if t > 0.0 => Ok(Budget::Seconds(t)),
            (None, Some(b)) if b > 0 => Ok(Budget::Batches(b)),
            _ => Err(contract("a benchmark problem needs exactly one positive budget")),
        }
    }

    pub fn instance(&self) -> Result<ProblemInstance> {
        generate_scenario(self.scenario, self.dimension, self.seed, &ScenarioParams::default())
    }
}

/// Problems plus a partition of their indices into segments of increasing
/// difficulty. An empty segment list means one segment holding everything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSet {
    pub problems: Vec<BenchmarkProblem>,
    #[serde(default)]
    pub segments: Vec<Vec<usize>>,
}

impl BenchmarkSet {
    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(contract("benchmark has no problems"));
        }
        for p in &self.problems {
            p.budget()?;
            if p.runs == 0 {
                return Err(contract("every benchmark problem needs at least one run"));
            }
        }
        let mut seen = vec![false; self.problems.len()];
        for &i in self.segments.iter().flatten() {
            match seen.get_mut(i) {
                Some(s) if !*s => *s = true,
                Some(_) => return Err(contract(format!("problem {i} appears in two segments"))),
                None => return Err(contract(format!("segment index {i} is out of range"))),
            }
        }
        if !self.segments.is_empty() && seen.iter().any(|s| !s) {
            return Err(contract("segments must cover every problem"));
        }
        if self.segments.iter().any(Vec::is_empty) {
            return Err(contract("segments must be non-empty"));
        }
        Ok(())
    }

    /// Segments in evaluation order.
    pub fn segment_order(&self) -> Vec<Vec<usize>> {
        if self.segments.is_empty() {
            vec![(0..self.problems.len()).collect()]
        } else {
            self.segments.clone()
        }
    }

    pub fn instances(&self) -> Result<Vec<ProblemInstance>> {
        self.problems.iter().map(BenchmarkProblem::instance).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: BenchmarkSet = serde_json::from_str(text)?;
        set.validate()?;
        Ok(set)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Identifier for caches. Stable within one build of the library.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        serde_json::to_string(self).unwrap_or_default().hash(&mut h);
        h.finish()
    }

    /// Four two-dimensional problems in two segments, sized for a desktop.
    pub fn desk() -> Self {
        let problem = |scenario, seed| BenchmarkProblem {
            scenario,
            dimension: 2,
            seed,
            time_limit_s: None,
            batch_budget: Some(3),
            runs: 5,
        };
        BenchmarkSet {
            problems: vec![
                problem(ScenarioKind::RandomRectangles, 1),
                problem(ScenarioKind::RandomRectangles, 2),
                problem(ScenarioKind::DividingWalls, 1),
                problem(ScenarioKind::GoalEnclosure, 1),
            ],
            segments: vec![vec![0, 1], vec![2, 3]],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_with_short_names() {
        let text = r#"{"problems":[{"scenario":"dw","dimension":2,"seed":3,"batch_budget":5,"runs":2},
            {"scenario":"rr","dimension":3,"seed":1,"time_limit_s":0.1,"runs":4}],"segments":[[1],[0]]}"#;
        let set = BenchmarkSet::from_json(text).unwrap();
        assert_eq!(set.problems[0].scenario, ScenarioKind::DividingWalls);
        assert_eq!(set.problems[1].budget().unwrap(), Budget::Seconds(0.1));
        assert_eq!(BenchmarkSet::from_json(&set.to_json().unwrap()).unwrap(), set);
        assert_eq!(set.segment_order(), vec![vec![1], vec![0]]);
    }

    #[test]
    fn bad_sets_are_rejected() {
        let mut set = BenchmarkSet::desk();
        set.validate().unwrap();
        set.segments = vec![vec![0, 1], vec![1, 2, 3]];
        assert!(set.validate().is_err());
        set.segments = vec![vec![0, 1]];
        assert!(set.validate().is_err());
        set.segments = vec![vec![0, 1, 2, 3, 4]];
        assert!(set.validate().is_err());
        let mut both = BenchmarkSet::desk();
        both.problems[0].time_limit_s = Some(1.0);
        assert!(both.validate().is_err());
        assert!(BenchmarkSet { problems: vec![], segments: vec![] }.validate().is_err());
    }

    #[test]
    fn default_segment_covers_all() {
        let mut set = BenchmarkSet::desk();
        set.segments.clear();
        assert_eq!(set.segment_order(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(set.instances().unwrap().len(), 4);
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = BenchmarkSet::desk();
        let mut b = a.clone();
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.problems[0].runs += 1;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
