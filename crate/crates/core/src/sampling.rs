//! Batch sampling, the RGG rewiring radius and exact radius queries.

use std::collections::VecDeque;
use std::f64::consts::PI;

use kdtree::distance::squared_euclidean;
use kdtree::KdTree;
use rand::Rng;

use crate::error::{contract, Error, Result};
use crate::planner::tree::{EdgeSet, SearchTree};
use crate::world::{ProblemInstance, StateVec};

/// Vertex id of the start state in every [`SampleStore`].
pub const START_ID: usize = 0;
/// Vertex id of the goal-box center in every [`SampleStore`].
pub const GOAL_ID: usize = 1;

pub const DEFAULT_BATCH_SIZE: usize = 100;
pub const INVALID_SAMPLE_CAP: usize = 50_000;
pub const MAX_DRAWS_PER_BATCH: u64 = 1_000_000;

/// Valid and invalid samples drawn so far.
///
/// Valid samples are append-only so their index doubles as a stable vertex
/// id; pruning flips the `live` flag instead of removing entries. Ids 0 and 1
/// hold the start and the goal-box center.
#[derive(Debug, Clone)]
pub struct SampleStore {
    valid: Vec<StateVec>,
    live: Vec<bool>,
    invalid: VecDeque<StateVec>,
    invalid_cap: usize,
    batch_size: usize,
    drawn: u64,
}

/// Bookkeeping for one call to [`sample_batch`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchStats {
    pub accepted: usize,
    pub rejected_invalid: usize,
    pub rejected_informed: u64,
    /// Validity checks performed (informed rejections are not checked).
    pub checks: u64,
}

impl SampleStore {
    pub fn new(problem: &ProblemInstance, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(contract("batch size must be positive"));
        }
        Ok(SampleStore {
            valid: vec![problem.start.clone(), problem.goal_box.center()],
            live: vec![true, true],
            invalid: VecDeque::new(),
            invalid_cap: INVALID_SAMPLE_CAP,
            batch_size,
            drawn: 0,
        })
    }

    pub fn with_invalid_cap(mut self, cap: usize) -> Self {
        self.invalid_cap = cap.max(1);
        self
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    /// Total number of vertex ids ever handed out (live or pruned).
    pub fn len(&self) -> usize {
        self.valid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid.is_empty()
    }

    pub fn state(&self, id: usize) -> &StateVec {
        &self.valid[id]
    }

    pub fn is_live(&self, id: usize) -> bool {
        self.live[id]
    }

    /// Ids of every live valid vertex, in ascending order.
    pub fn live_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.then_some(i))
    }

    pub fn live_count(&self) -> usize {
        self.live.iter().filter(|l| **l).count()
    }

    pub fn invalid_samples(&self) -> &VecDeque<StateVec> {
        &self.invalid
    }

    /// Valid plus invalid draws, excluding informed rejections.
    pub fn samples_drawn(&self) -> u64 {
        self.drawn
    }

    pub fn push_valid(&mut self, x: StateVec) -> usize {
        self.valid.push(x);
        self.live.push(true);
        self.valid.len() - 1
    }

    pub fn push_invalid(&mut self, x: StateVec) {
        if self.invalid.len() == self.invalid_cap {
            self.invalid.pop_front();
        }
        self.invalid.push_back(x);
    }

    /// Marks every live sample matching `pred` as pruned, never touching the
    /// start or goal center. Returns the number removed.
    pub fn prune_where(&mut self, mut pred: impl FnMut(usize, &StateVec) -> bool) -> usize {
        let mut removed = 0;
        for id in 2..self.valid.len() {
            if self.live[id] && pred(id, &self.valid[id]) {
                self.live[id] = false;
                removed += 1;
            }
        }
        removed
    }
}

/// Draws one batch of uniform samples.
///
/// Draws continue until `batch_size` valid samples are accepted. Draws in
/// collision go to the invalid list. When `incumbent` is finite, draws with
/// `g_hat + h_hat >= incumbent` are discarded before any validity check.
pub fn sample_batch<R: Rng + ?Sized>(
    problem: &ProblemInstance,
    store: &mut SampleStore,
    rng: &mut R,
    incumbent: f64,
) -> Result<BatchStats> {
    let n = problem.dimension;
    let mut stats = BatchStats::default();
    let mut draws = 0u64;
    while stats.accepted < store.batch_size {
        if draws >= MAX_DRAWS_PER_BATCH {
            return Err(Error::SamplingExhausted { draws });
        }
        draws += 1;
        let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        if incumbent.is_finite() {
            let g_hat = crate::world::distance(&x, problem.start.coords());
            let h_hat = problem.goal_box.distance_to(&x);
            if g_hat + h_hat >= incumbent {
                stats.rejected_informed += 1;
                continue;
            }
        }
        stats.checks += 1;
        store.drawn += 1;
        if problem.state_free(&x) {
            store.push_valid(StateVec::new(x));
            stats.accepted += 1;
        } else {
            store.push_invalid(StateVec::new(x));
            stats.rejected_invalid += 1;
        }
    }
    Ok(stats)
}

/// Lebesgue measure of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}

/// Measure of the informed set for a solution of cost `cost` when the
/// straight-line lower bound is `min_cost`, capped at the unit cube.
pub fn informed_measure(cost: f64, min_cost: f64, d: usize) -> f64 {
    if !cost.is_finite() {
        return 1.0;
    }
    let transverse = cost / 2.0;
    let conjugate = (cost * cost - min_cost * min_cost).max(0.0).sqrt() / 2.0;
    let volume = unit_ball_volume(d) * transverse * conjugate.powi(d as i32 - 1);
    volume.clamp(1e-12, 1.0)
}

/// Constants of the rewiring radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RggParams {
    pub eta: f64,
    pub rewire_factor: f64,
}

impl Default for RggParams {
    fn default() -> Self {
        RggParams {
            eta: 1.001,
            rewire_factor: 1.2,
        }
    }
}

/// Lower bound on the rewiring radius for `q` samples in an informed set of
/// measure `informed_measure`, before the rewire factor.
pub fn rgg_lower_bound(q: usize, d: usize, informed_measure: f64, eta: f64) -> Result<f64> {
    if q < 2 {
        return Err(contract("rewiring radius needs at least two samples"));
    }
    if d == 0 || informed_measure <= 0.0 {
        return Err(contract("dimension and informed measure must be positive"));
    }
    let q = q as f64;
    let d_f = d as f64;
    let inner = 2.0 * (1.0 + 1.0 / d_f) * (informed_measure / unit_ball_volume(d)) * (q.ln() / q);
    Ok(eta * inner.powf(1.0 / d_f))
}

/// Rewiring radius used by the planner: the lower bound times the rewire
/// factor.
pub fn rgg_radius(q: usize, d: usize, informed_measure: f64, params: &RggParams) -> Result<f64> {
    Ok(rgg_lower_bound(q, d, informed_measure, params.eta)? * params.rewire_factor)
}

/// Exact Euclidean radius queries over the live vertices of a sample store.
pub struct NeighborIndex {
    tree: KdTree<f64, usize, Vec<f64>>,
    dim: usize,
    len: usize,
}

impl NeighborIndex {
    pub fn build<'a>(dim: usize, points: impl IntoIterator<Item = (usize, &'a StateVec)>) -> Self {
        let mut tree = KdTree::with_capacity(dim, 16);
        let mut len = 0;
        for (id, x) in points {
            tree.add(x.coords().to_vec(), id)
                .expect("sample coordinates are finite and of the index dimension");
            len += 1;
        }
        NeighborIndex { tree, dim, len }
    }

    pub fn from_store(store: &SampleStore) -> Self {
        let dim = store.state(START_ID).dim();
        Self::build(dim, store.live_ids().map(|id| (id, store.state(id))))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Ids within `radius` of `x`, ascending. Includes a point equal to `x`.
    pub fn within(&self, x: &[f64], radius: f64) -> Vec<usize> {
        if self.len == 0 {
            return Vec::new();
        }
        debug_assert_eq!(x.len(), self.dim);
        let mut ids: Vec<usize> = self
            .tree
            .within(x, radius * radius, &squared_euclidean)
            .map(|found| found.into_iter().map(|(_, id)| *id).collect())
            .unwrap_or_default();
        ids.sort_unstable();
        ids
    }

    /// Ids within `radius` of vertex `id`, excluding `id` itself.
    pub fn query(&self, id: usize, x: &[f64], radius: f64) -> Vec<usize> {
        let mut ids = self.within(x, radius);
        ids.retain(|&other| other != id);
        ids
    }
}

/// Neighbors of `x_t` in the RGG: everything within `radius`, plus its tree
/// parent and children, minus every state whose edge to `x_t` is known to be
/// invalid.
pub fn neighbors(
    x_t: usize,
    store: &SampleStore,
    index: &NeighborIndex,
    radius: f64,
    tree: &SearchTree,
    invalid_edges: &EdgeSet,
) -> Vec<usize> {
    let mut out = index.query(x_t, store.state(x_t).coords(), radius);
    let linked = tree.parent(x_t).into_iter().chain(tree.children(x_t).iter().copied());
    for v in linked {
        if store.is_live(v) && !out.contains(&v) {
            out.push(v);
        }
    }
    out.retain(|&x_s| !invalid_edges.contains(x_s, x_t));
    out
}
