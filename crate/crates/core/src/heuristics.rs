//! Cost and effort estimates, the artificial potential field and dynamic
//! importance: the signals a G-heuristic reads from an edge.

use kdtree::distance::squared_euclidean;
use kdtree::KdTree;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::planner::tree::SearchTree;
use crate::world::{distance, ProblemInstance, StateVec};

/// Admissible cost estimates for an edge `(x_s, x_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimates {
    /// Straight-line cost from the start to `x_t`.
    pub g_hat: f64,
    /// Straight-line cost from `x_t` to the goal box, zero inside it.
    pub h_hat: f64,
    /// Length of the edge.
    pub c_hat: f64,
}

pub fn cost_heuristics(problem: &ProblemInstance, x_s: &[f64], x_t: &[f64]) -> CostEstimates {
    CostEstimates {
        g_hat: distance(x_t, problem.start.coords()),
        h_hat: problem.goal_box.distance_to(x_t),
        c_hat: distance(x_s, x_t),
    }
}

/// Number of collision checks needed to validate a segment of this length.
pub fn edge_effort(a: &[f64], b: &[f64], resolution: f64) -> f64 {
    (distance(a, b) / resolution).ceil()
}

/// Effort estimates for an edge `(x_s, x_t)` of the reverse search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffortEstimates {
    /// Checks along the reverse-tree branch from `x_s` to the goal.
    pub e_source: f64,
    /// Checks to validate the edge itself.
    pub e_edge: f64,
    /// Checks along the straight line from `x_t` to the start.
    pub d_target: f64,
}

/// `x_s` must be a vertex of `reverse`, whose edge efforts are check counts.
pub fn effort_estimates(
    reverse: &SearchTree,
    s: usize,
    x_s: &[f64],
    x_t: &[f64],
    start: &[f64],
    resolution: f64,
) -> Result<EffortEstimates> {
    if !reverse.contains(s) {
        return Err(contract(format!("vertex {s} is not in the reverse tree")));
    }
    Ok(EffortEstimates {
        e_source: reverse.effort(s),
        e_edge: edge_effort(x_s, x_t, resolution),
        d_target: edge_effort(x_t, start, resolution),
    })
}

/// Which endpoint generates the attractive energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Attractor {
    #[default]
    Start,
    Goal,
}

/// Gains of the artificial potential field. Charges are folded into the
/// gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApfConfig {
    pub k_r: f64,
    pub k_a: f64,
    pub rho0: f64,
    pub r_min: f64,
    pub attractor: Attractor,
}

impl Default for ApfConfig {
    fn default() -> Self {
        ApfConfig {
            k_r: 1e-3,
            k_a: 1e-2,
            rho0: 0.1,
            r_min: 1e-6,
            attractor: Attractor::Start,
        }
    }
}

impl ApfConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [self.k_r, self.k_a, self.rho0, self.r_min];
        if fields.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(contract("APF gains and distances must be positive and finite"));
        }
        if self.r_min >= self.rho0 {
            return Err(contract("r_min must be below rho0"));
        }
        Ok(())
    }

    pub fn anchor(&self, problem: &ProblemInstance) -> StateVec {
        match self.attractor {
            Attractor::Start => problem.start.clone(),
            Attractor::Goal => problem.goal_box.center(),
        }
    }

    pub fn attractive_energy(&self, x: &[f64], anchor: &[f64]) -> f64 {
        self.k_a / distance(x, anchor).max(self.r_min)
    }

    /// Repulsive energy magnitude of one invalid sample at distance `r`.
    pub fn repulsive_energy(&self, r: f64) -> f64 {
        if r <= self.rho0 {
            self.k_r / r.max(self.r_min)
        } else {
            0.0
        }
    }

    /// Repulsive force magnitude at distance `r`.
    pub fn repulsive_force(&self, r: f64) -> f64 {
        if r <= self.rho0 {
            self.k_r / r.max(self.r_min).powi(2)
        } else {
            0.0
        }
    }

    /// Attractive force magnitude at distance `r`.
    pub fn attractive_force(&self, r: f64) -> f64 {
        self.k_a / r.max(self.r_min).powi(2)
    }
}

/// Potential energy of `x` by direct summation over every invalid sample.
pub fn potential_energy<'a>(
    x: &[f64],
    invalid: impl IntoIterator<Item = &'a StateVec>,
    anchor: &[f64],
    cfg: &ApfConfig,
) -> f64 {
    let repulsive: f64 = invalid
        .into_iter()
        .map(|obs| cfg.repulsive_energy(distance(x, obs.coords())))
        .sum();
    cfg.attractive_energy(x, anchor) + repulsive
}

/// Potential energy backed by a k-d tree over the invalid samples, so each
/// query only visits samples within `rho0`.
pub struct PotentialField {
    index: KdTree<f64, (), Vec<f64>>,
    len: usize,
    anchor: StateVec,
    cfg: ApfConfig,
}

impl PotentialField {
    pub fn build<'a>(
        dim: usize,
        invalid: impl IntoIterator<Item = &'a StateVec>,
        anchor: StateVec,
        cfg: ApfConfig,
    ) -> Self {
        let mut index = KdTree::with_capacity(dim, 16);
        let mut len = 0;
        for obs in invalid {
            index
                .add(obs.coords().to_vec(), ())
                .expect("invalid samples are finite and of the field dimension");
            len += 1;
        }
        PotentialField { index, len, anchor, cfg }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        let mut repulsive = 0.0;
        if self.len > 0 {
            let found = self
                .index
                .within(x, self.cfg.rho0 * self.cfg.rho0, &squared_euclidean)
                .unwrap_or_default();
            for (d2, _) in found {
                repulsive += self.cfg.repulsive_energy(d2.sqrt());
            }
        }
        self.cfg.attractive_energy(x, self.anchor.coords()) + repulsive
    }
}

/// Number of `nbrs` that are vertices of the reverse tree.
pub fn dynamic_importance(nbrs: &[usize], reverse: &SearchTree) -> usize {
    nbrs.iter().filter(|&&v| reverse.contains(v)).count()
}
