//! State spaces, box obstacles, validity checking and the benchmark scenario
//! generators.
//!
//! Every world lives in the unit hypercube `[0, 1]^n`. Obstacles are closed
//! axis-aligned boxes, so a state on an obstacle face is in collision.

use std::fmt;
use std::ops::Index;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// A configuration in the unit hypercube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVec(Vec<f64>);

impl StateVec {
    pub fn new(coords: Vec<f64>) -> Self {
        StateVec(coords)
    }

    /// A state with every coordinate set to `value`.
    pub fn splat(dim: usize, value: f64) -> Self {
        StateVec(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn distance(&self, other: &StateVec) -> f64 {
        distance(&self.0, &other.0)
    }

    /// Point at fraction `t` along the segment from `self` to `other`.
    pub fn lerp(&self, other: &StateVec, t: f64) -> StateVec {
        StateVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + (b - a) * t)
                .collect(),
        )
    }

    pub fn in_unit_cube(&self) -> bool {
        self.0.iter().all(|c| (0.0..=1.0).contains(c))
    }
}

impl Index<usize> for StateVec {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for StateVec {
    fn from(v: Vec<f64>) -> Self {
        StateVec(v)
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Closed axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: StateVec,
    pub hi: StateVec,
}

impl AxisBox {
    pub fn new(lo: StateVec, hi: StateVec) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                actual: hi.dim(),
            });
        }
        if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
            return Err(contract("box lower corner exceeds upper corner"));
        }
        Ok(AxisBox { lo, hi })
    }

    /// Box centered at `center` with the given half-width on every axis.
    pub fn centered(center: &StateVec, half_width: f64) -> Self {
        AxisBox {
            lo: StateVec(center.coords().iter().map(|c| c - half_width).collect()),
            hi: StateVec(center.coords().iter().map(|c| c + half_width).collect()),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn center(&self) -> StateVec {
        self.lo.lerp(&self.hi, 0.5)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.coords().iter().zip(self.hi.coords()))
            .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .coords()
            .iter()
            .zip(self.hi.coords())
            .map(|(l, h)| h - l)
            .product()
    }

    /// Euclidean distance from `x` to the box, zero inside.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lo.coords().iter().zip(self.hi.coords()))
            .map(|(v, (l, h))| {
                let d = (l - v).max(v - h).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Closest point of the box to `x`.
    pub fn clamp(&self, x: &[f64]) -> StateVec {
        StateVec(
            x.iter()
                .zip(self.lo.coords().iter().zip(self.hi.coords()))
                .map(|(v, (l, h))| v.clamp(*l, *h))
                .collect(),
        )
    }

    pub fn intersects(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= other.hi[i] && other.lo[i] <= self.hi[i])
    }

    /// Exact test of whether the closed segment `a -> b` touches the box
    /// (slab method).
    pub fn segment_intersects(&self, a: &[f64], b: &[f64]) -> bool {
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        for i in 0..a.len() {
            let d = b[i] - a[i];
            let (lo, hi) = (self.lo[i], self.hi[i]);
            if d.abs() < 1e-15 {
                if a[i] < lo || a[i] > hi {
                    return false;
                }
                continue;
            }
            let (mut ta, mut tb) = ((lo - a[i]) / d, (hi - a[i]) / d);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    DividingWalls,
    RandomRectangles,
    GoalEnclosure,
    Custom,
}

impl ScenarioKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ScenarioKind::DividingWalls => "dw",
            ScenarioKind::RandomRectangles => "rr",
            ScenarioKind::GoalEnclosure => "ge",
            ScenarioKind::Custom => "custom",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dw" | "dividing_walls" | "dividingwalls" => Ok(ScenarioKind::DividingWalls),
            "rr" | "random_rectangles" | "randomrectangles" => Ok(ScenarioKind::RandomRectangles),
            "ge" | "goal_enclosure" | "goalenclosure" => Ok(ScenarioKind::GoalEnclosure),
            other => Err(contract(format!("unknown scenario kind `{other}`"))),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// A single-query planning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub dimension: usize,
    pub obstacles: Vec<AxisBox>,
    pub start: StateVec,
    pub goal_box: AxisBox,
    pub scenario_id: ScenarioKind,
    pub seed: u64,
}

/// Outcome of a discretised edge check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCheck {
    pub valid: bool,
    /// Number of interpolated states that were collision checked.
    pub checks: u64,
}

/// Default edge-check resolution for an `n`-dimensional unit cube.
pub fn default_resolution(n: usize) -> f64 {
    0.002 * (n as f64).sqrt()
}

impl ProblemInstance {
    /// Builds an instance and checks its invariants.
    pub fn new(
        obstacles: Vec<AxisBox>,
        start: StateVec,
        goal_box: AxisBox,
        scenario_id: ScenarioKind,
        seed: u64,
    ) -> Result<Self> {
        let problem = ProblemInstance {
            dimension: start.dim(),
            obstacles,
            start,
            goal_box,
            scenario_id,
            seed,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Checks the structural invariants (used after deserialisation too).
    pub fn validate(&self) -> Result<()> {
        let n = self.dimension;
        if n < 2 {
            return Err(contract("problem dimension must be at least 2"));
        }
        let dims = std::iter::once(self.start.dim())
            .chain([self.goal_box.lo.dim(), self.goal_box.hi.dim()])
            .chain(self.obstacles.iter().flat_map(|b| [b.lo.dim(), b.hi.dim()]));
        for d in dims {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: d,
                });
            }
        }
        for b in self.obstacles.iter().chain(std::iter::once(&self.goal_box)) {
            if (0..n).any(|i| b.lo[i] > b.hi[i]) {
                return Err(contract("box lower corner exceeds upper corner"));
            }
        }
        if !self.is_state_valid(&self.start)? {
            return Err(contract("start state is in collision or out of bounds"));
        }
        if !self.is_state_valid(&self.goal_box.center())? {
            return Err(contract("goal center is in collision or out of bounds"));
        }
        if self.goal_box.contains(self.start.coords()) {
            return Err(contract("start lies inside the goal box"));
        }
        Ok(())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Whether `x` is inside the unit cube and outside every obstacle.
    pub fn is_state_valid(&self, x: &StateVec) -> Result<bool> {
        self.check_dim(x.coords())?;
        Ok(self.state_free(x.coords()))
    }

    /// Unchecked validity test on a raw coordinate slice.
    pub fn state_free(&self, x: &[f64]) -> bool {
        x.iter().all(|c| (0.0..=1.0).contains(c)) && !self.obstacles.iter().any(|b| b.contains(x))
    }

    pub fn in_goal(&self, x: &[f64]) -> bool {
        self.goal_box.contains(x)
    }

    /// Straight-line edge validation.
    ///
    /// Walks the `ceil(len / resolution) + 1` evenly spaced states from `a`
    /// to `b`, stopping at the first collision, then confirms a clean walk
    /// with an exact segment/box test. A `true` result therefore holds at
    /// every resolution.
    pub fn check_edge(&self, a: &StateVec, b: &StateVec, resolution: f64) -> Result<EdgeCheck> {
        self.check_dim(a.coords())?;
        self.check_dim(b.coords())?;
        if resolution <= 0.0 || !resolution.is_finite() {
            return Err(contract("edge resolution must be positive"));
        }
        Ok(self.check_edge_unchecked(a.coords(), b.coords(), resolution))
    }

    pub(crate) fn check_edge_unchecked(&self, a: &[f64], b: &[f64], resolution: f64) -> EdgeCheck {
        let steps = interpolation_steps(distance(a, b), resolution);
        let mut point = vec![0.0; a.len()];
        let mut checks = 0;
        for i in 0..=steps {
            let t = if steps == 0 { 0.0 } else { i as f64 / steps as f64 };
            for (p, (x, y)) in point.iter_mut().zip(a.iter().zip(b)) {
                *p = x + (y - x) * t;
            }
            checks += 1;
            if !self.state_free(&point) {
                return EdgeCheck {
                    valid: false,
                    checks,
                };
            }
        }
        let valid = !self.obstacles.iter().any(|o| o.segment_intersects(a, b));
        EdgeCheck { valid, checks }
    }

    pub fn is_edge_valid(&self, a: &StateVec, b: &StateVec, resolution: f64) -> Result<bool> {
        Ok(self.check_edge(a, b, resolution)?.valid)
    }

    /// Purely discrete edge test: every interpolated state is free. Used as
    /// an independent re-validation route.
    pub fn interpolated_states_free(&self, a: &StateVec, b: &StateVec, resolution: f64) -> bool {
        let steps = interpolation_steps(a.distance(b), resolution);
        (0..=steps).all(|i| {
            let t = if steps == 0 { 0.0 } else { i as f64 / steps as f64 };
            self.state_free(a.lerp(b, t).coords())
        })
    }

    /// Distance from the start to the nearest goal state, ignoring obstacles.
    pub fn straight_line_cost(&self) -> f64 {
        self.goal_box.distance_to(self.start.coords())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let problem: ProblemInstance = serde_json::from_str(text)?;
        problem.validate()?;
        Ok(problem)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    /// Short identifier such as `dw-4-7`.
    pub fn label(&self) -> String {
        format!("{}-{}-{}", self.scenario_id, self.dimension, self.seed)
    }
}

fn interpolation_steps(length: f64, resolution: f64) -> usize {
    (length / resolution).ceil() as usize
}

/// A solution path from the start into the goal box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub states: Vec<StateVec>,
    pub cost: f64,
}

impl Path {
    pub fn new(states: Vec<StateVec>) -> Self {
        let cost = path_length(&states);
        Path { states, cost }
    }

    /// Checks the endpoint, cost and per-edge invariants.
    pub fn validate(&self, problem: &ProblemInstance, resolution: f64) -> Result<()> {
        let (first, last) = match (self.states.first(), self.states.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(contract("empty path")),
        };
        if first != &problem.start {
            return Err(contract("path does not begin at the start state"));
        }
        if !problem.in_goal(last.coords()) {
            return Err(contract("path does not end in the goal box"));
        }
        let recomputed = path_length(&self.states);
        if (recomputed - self.cost).abs() > 1e-9 * recomputed.max(1.0) {
            return Err(contract("stored path cost disagrees with its segments"));
        }
        for pair in self.states.windows(2) {
            if !problem.is_edge_valid(&pair[0], &pair[1], resolution)? {
                return Err(contract("path segment in collision"));
            }
        }
        Ok(())
    }
}

pub fn path_length(states: &[StateVec]) -> f64 {
    states.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Tunables for the scenario generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    /// Half-width of the goal box on every axis.
    pub goal_half_width: f64,
    /// Random-rectangle obstacle count; `None` means `10 * n`.
    pub obstacle_count: Option<usize>,
    pub width_min: f64,
    pub width_max: f64,
    /// Redraw cap for rejected random rectangles.
    pub max_redraws: usize,
    /// Close the open face of the goal enclosure.
    pub sealed: bool,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            goal_half_width: 0.01,
            obstacle_count: None,
            width_min: 0.05,
            width_max: 0.15,
            max_redraws: 1000,
            sealed: false,
        }
    }
}

impl ScenarioParams {
    fn check(&self) -> Result<()> {
        if !(self.goal_half_width > 0.0 && self.goal_half_width < 0.05) {
            return Err(Error::Generation("goal_half_width must lie in (0, 0.05)".into()));
        }
        if !(self.width_min > 0.0 && self.width_min <= self.width_max && self.width_max <= 1.0) {
            return Err(Error::Generation(
                "rectangle widths must satisfy 0 < width_min <= width_max <= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Builds one of the benchmark worlds. Pure in all of its arguments.
pub fn generate_scenario(
    kind: ScenarioKind,
    dimension: usize,
    seed: u64,
    params: &ScenarioParams,
) -> Result<ProblemInstance> {
    if dimension < 2 {
        return Err(Error::Generation("dimension must be at least 2".into()));
    }
    params.check()?;
    let problem = match kind {
        ScenarioKind::DividingWalls => dividing_walls(dimension, seed, params),
        ScenarioKind::RandomRectangles => random_rectangles(dimension, seed, params)?,
        ScenarioKind::GoalEnclosure => goal_enclosure(dimension, seed, params),
        ScenarioKind::Custom => {
            return Err(Error::Generation(
                "custom worlds are loaded from JSON, not generated".into(),
            ))
        }
    };
    problem
        .validate()
        .map_err(|e| Error::Generation(format!("generated instance is invalid: {e}")))?;
    Ok(problem)
}

/// Box spanning `[lo0, hi0] x [lo1, hi1]` on the first two axes and the
/// whole unit interval on the rest.
fn extruded(n: usize, x: (f64, f64), y: (f64, f64)) -> AxisBox {
    let mut lo = vec![0.0; n];
    let mut hi = vec![1.0; n];
    lo[0] = x.0;
    hi[0] = x.1;
    lo[1] = y.0;
    hi[1] = y.1;
    AxisBox {
        lo: StateVec(lo),
        hi: StateVec(hi),
    }
}

/// Wall x-extent and its gaps as (center, height) on the second axis.
const DIVIDING_WALLS: [((f64, f64), &[(f64, f64)]); 3] = [
    ((0.145, 0.195), &[(0.72, 0.03), (0.93, 0.12)]),
    ((0.36, 0.46), &[(0.38, 0.125), (0.64, 0.01)]),
    ((0.835, 0.885), &[(0.25, 0.1), (0.86, 0.05)]),
];

fn dividing_walls(n: usize, seed: u64, params: &ScenarioParams) -> ProblemInstance {
    let mut obstacles = Vec::new();
    for (xs, gaps) in DIVIDING_WALLS {
        let mut y = 0.0;
        for &(center, height) in gaps {
            let gap_lo = center - height / 2.0;
            if gap_lo > y {
                obstacles.push(extruded(n, xs, (y, gap_lo)));
            }
            y = center + height / 2.0;
        }
        if y < 1.0 {
            obstacles.push(extruded(n, xs, (y, 1.0)));
        }
    }
    let mut start = vec![0.5; n];
    start[0] = 0.05;
    let mut goal = vec![0.5; n];
    goal[0] = 0.95;
    ProblemInstance {
        dimension: n,
        obstacles,
        start: StateVec(start),
        goal_box: AxisBox::centered(&StateVec(goal), params.goal_half_width),
        scenario_id: ScenarioKind::DividingWalls,
        seed,
    }
}

fn random_rectangles(n: usize, seed: u64, params: &ScenarioParams) -> Result<ProblemInstance> {
    let start = StateVec::splat(n, 0.4);
    let goal_box = AxisBox::centered(&StateVec::splat(n, 0.9), params.goal_half_width);
    let count = params.obstacle_count.unwrap_or(10 * n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut obstacles = Vec::with_capacity(count);
    let mut redraws = 0;
    while obstacles.len() < count {
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for _ in 0..n {
            let w = if params.width_max > params.width_min {
                rng.gen_range(params.width_min..params.width_max)
            } else {
                params.width_min
            };
            let l = rng.gen_range(0.0..=(1.0 - w));
            lo.push(l);
            hi.push(l + w);
        }
        let candidate = AxisBox {
            lo: StateVec(lo),
            hi: StateVec(hi),
        };
        if candidate.contains(start.coords()) || candidate.intersects(&goal_box) {
            redraws += 1;
            if redraws > params.max_redraws {
                return Err(Error::Generation(format!(
                    "could not place {count} rectangles clear of start and goal within {} redraws",
                    params.max_redraws
                )));
            }
            continue;
        }
        obstacles.push(candidate);
    }
    Ok(ProblemInstance {
        dimension: n,
        obstacles,
        start,
        goal_box,
        scenario_id: ScenarioKind::RandomRectangles,
        seed,
    })
}

fn goal_enclosure(n: usize, seed: u64, params: &ScenarioParams) -> ProblemInstance {
    const OUTER: (f64, f64) = (0.3, 0.7);
    const X_OUTER: (f64, f64) = (0.4, 0.8);
    const WALL: f64 = 0.1;

    let slab = |axis: usize, range: (f64, f64), x: (f64, f64)| {
        let mut lo = vec![OUTER.0; n];
        let mut hi = vec![OUTER.1; n];
        lo[0] = x.0;
        hi[0] = x.1;
        lo[axis] = range.0;
        hi[axis] = range.1;
        AxisBox {
            lo: StateVec(lo),
            hi: StateVec(hi),
        }
    };

    // Back wall faces the start; side walls close every other axis.
    let mut obstacles = vec![slab(1, OUTER, (X_OUTER.0, X_OUTER.0 + WALL))];
    for axis in 1..n {
        obstacles.push(slab(axis, (OUTER.0, OUTER.0 + WALL), X_OUTER));
        obstacles.push(slab(axis, (OUTER.1 - WALL, OUTER.1), X_OUTER));
    }
    if params.sealed {
        obstacles.push(slab(1, OUTER, (X_OUTER.1 - WALL, X_OUTER.1)));
    }

    let mut start = vec![0.5; n];
    start[0] = 0.1;
    let mut goal = vec![0.5; n];
    goal[0] = 0.6;
    ProblemInstance {
        dimension: n,
        obstacles,
        start: StateVec(start),
        goal_box: AxisBox::centered(&StateVec(goal), params.goal_half_width),
        scenario_id: ScenarioKind::GoalEnclosure,
        seed,
    }
}

/// Obstacle-free world from `start` to a small box around `goal`.
pub fn open_world(start: StateVec, goal: StateVec, goal_half_width: f64) -> Result<ProblemInstance> {
    ProblemInstance::new(
        Vec::new(),
        start,
        AxisBox::centered(&goal, goal_half_width),
        ScenarioKind::Custom,
        0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_2d() -> ProblemInstance {
        open_world(
            StateVec::new(vec![0.1, 0.1]),
            StateVec::new(vec![0.9, 0.9]),
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn obstacle_center_is_invalid() {
        let p = generate_scenario(ScenarioKind::DividingWalls, 2, 0, &ScenarioParams::default())
            .unwrap();
        let center = p.obstacles[0].center();
        assert!(!p.is_state_valid(&center).unwrap());
    }

    #[test]
    fn origin_valid_in_empty_world() {
        let p = free_2d();
        assert!(p.is_state_valid(&StateVec::splat(2, 0.0)).unwrap());
    }

    #[test]
    fn boundary_counts_as_collision() {
        let b = AxisBox::new(StateVec::new(vec![0.4, 0.4]), StateVec::new(vec![0.6, 0.6])).unwrap();
        let mut p = free_2d();
        p.obstacles.push(b);
        assert!(!p.is_state_valid(&StateVec::new(vec![0.4, 0.5])).unwrap());
        assert!(p.is_state_valid(&StateVec::new(vec![0.39999, 0.5])).unwrap());
    }

    #[test]
    fn dividing_walls_start_is_valid() {
        let p = generate_scenario(ScenarioKind::DividingWalls, 2, 3, &ScenarioParams::default())
            .unwrap();
        assert_eq!(p.start.coords(), &[0.05, 0.5]);
        assert!(p.is_state_valid(&p.start).unwrap());
        assert_eq!(p.goal_box.center().coords(), &[0.95, 0.5]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = free_2d();
        let err = p.is_state_valid(&StateVec::splat(3, 0.5)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, actual: 3 }));
    }

    #[test]
    fn zero_length_edge() {
        let p = free_2d();
        let a = StateVec::new(vec![0.3, 0.3]);
        let check = p.check_edge(&a, &a, 0.01).unwrap();
        assert!(check.valid);
        assert_eq!(check.checks, 1);
    }

    #[test]
    fn edge_through_thick_obstacle_fails() {
        let mut p = free_2d();
        p.obstacles.push(
            AxisBox::new(StateVec::new(vec![0.45, 0.0]), StateVec::new(vec![0.55, 1.0])).unwrap(),
        );
        let a = StateVec::new(vec![0.1, 0.5]);
        let b = StateVec::new(vec![0.9, 0.5]);
        assert!(!p.is_edge_valid(&a, &b, 0.05).unwrap());
        assert!(!p.interpolated_states_free(&a, &b, 0.05));
    }

    #[test]
    fn edge_through_gap_is_valid() {
        // Wall at x in [0.45, 0.55] with a gap for y in (0.4, 0.6).
        let mut p = free_2d();
        p.obstacles.push(
            AxisBox::new(StateVec::new(vec![0.45, 0.0]), StateVec::new(vec![0.55, 0.4])).unwrap(),
        );
        p.obstacles.push(
            AxisBox::new(StateVec::new(vec![0.45, 0.6]), StateVec::new(vec![0.55, 1.0])).unwrap(),
        );
        let a = StateVec::new(vec![0.1, 0.45]);
        let b = StateVec::new(vec![0.9, 0.55]);
        assert!(p.is_edge_valid(&a, &b, 0.01).unwrap());
        assert!(p.interpolated_states_free(&a, &b, 0.001));
    }

    #[test]
    fn thin_corner_clip_is_caught_by_exact_confirmation() {
        // A tiny box clipped between interpolation points.
        let mut p = free_2d();
        p.obstacles.push(
            AxisBox::new(StateVec::new(vec![0.55, 0.55]), StateVec::new(vec![0.551, 0.551])).unwrap(),
        );
        let a = StateVec::new(vec![0.1, 0.1]);
        let b = StateVec::new(vec![0.9, 0.9]);
        assert!(p.interpolated_states_free(&a, &b, 0.3));
        assert!(!p.is_edge_valid(&a, &b, 0.3).unwrap());
    }

    #[test]
    fn generation_is_deterministic() {
        for kind in [
            ScenarioKind::DividingWalls,
            ScenarioKind::RandomRectangles,
            ScenarioKind::GoalEnclosure,
        ] {
            let params = ScenarioParams::default();
            let a = generate_scenario(kind, 3, 42, &params).unwrap();
            let b = generate_scenario(kind, 3, 42, &params).unwrap();
            assert_eq!(a, b);
        }
        let a = generate_scenario(ScenarioKind::RandomRectangles, 2, 1, &ScenarioParams::default());
        let b = generate_scenario(ScenarioKind::RandomRectangles, 2, 2, &ScenarioParams::default());
        assert_ne!(a.unwrap().obstacles, b.unwrap().obstacles);
    }

    #[test]
    fn zero_rectangles_gives_free_world() {
        let params = ScenarioParams {
            obstacle_count: Some(0),
            ..Default::default()
        };
        let p = generate_scenario(ScenarioKind::RandomRectangles, 4, 9, &params).unwrap();
        assert!(p.obstacles.is_empty());
        assert!(p.is_edge_valid(&p.start, &p.goal_box.center(), 0.01).unwrap());
    }

    #[test]
    fn random_rectangles_clear_start_and_goal() {
        for seed in 0..20 {
            let p = generate_scenario(ScenarioKind::RandomRectangles, 2, seed, &Default::default())
                .unwrap();
            assert_eq!(p.obstacles.len(), 20);
            for o in &p.obstacles {
                assert!(!o.contains(p.start.coords()));
                assert!(!o.intersects(&p.goal_box));
                for i in 0..2 {
                    let w = o.hi[i] - o.lo[i];
                    assert!((0.05..=0.15).contains(&w));
                }
            }
        }
    }

    #[test]
    fn crowded_rectangles_fail_generation() {
        let params = ScenarioParams {
            obstacle_count: Some(50),
            width_min: 0.99,
            width_max: 1.0,
            max_redraws: 100,
            ..Default::default()
        };
        let err = generate_scenario(ScenarioKind::RandomRectangles, 2, 0, &params).unwrap_err();
        assert!(matches!(err, Error::Generation(_)));
    }

    #[test]
    fn goal_enclosure_only_opens_on_far_face() {
        for n in 2..=4 {
            let p = generate_scenario(ScenarioKind::GoalEnclosure, n, 0, &Default::default())
                .unwrap();
            let goal = p.goal_box.center();
            for axis in 0..n {
                for dir in [-1.0, 1.0] {
                    let mut out = goal.coords().to_vec();
                    out[axis] = if dir < 0.0 { 0.0 } else { 1.0 };
                    let exit = StateVec::new(out);
                    let open = p.is_edge_valid(&goal, &exit, 0.005).unwrap();
                    assert_eq!(open, axis == 0 && dir > 0.0, "n={n} axis={axis} dir={dir}");
                }
            }
        }
    }

    #[test]
    fn sealed_enclosure_blocks_far_face() {
        let params = ScenarioParams {
            sealed: true,
            ..Default::default()
        };
        let p = generate_scenario(ScenarioKind::GoalEnclosure, 2, 0, &params).unwrap();
        let goal = p.goal_box.center();
        assert!(!p
            .is_edge_valid(&goal, &StateVec::new(vec![1.0, 0.5]), 0.005)
            .unwrap());
    }

    #[test]
    fn json_round_trip() {
        let p = generate_scenario(ScenarioKind::RandomRectangles, 3, 5, &Default::default())
            .unwrap();
        let back = ProblemInstance::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(p, back);
        let v: serde_json::Value = serde_json::from_str(&p.to_json().unwrap()).unwrap();
        assert_eq!(v["scenario_id"], "random_rectangles");
        assert!(v["goal_box"]["lo"].is_array());
    }

    #[test]
    fn path_validation_catches_bad_cost() {
        let p = free_2d();
        let mut path = Path::new(vec![p.start.clone(), p.goal_box.center()]);
        path.validate(&p, 0.01).unwrap();
        path.cost += 0.1;
        assert!(path.validate(&p, 0.01).is_err());
    }
}
