//! Reward scoring of a candidate against the baseline, and fitness.
//!
//! Scores follow a minimisation convention: outperforming the baseline on a
//! metric contributes a negative amount, falling behind a positive one.

use serde::{Deserialize, Serialize};

use super::metrics::RunMetrics;
use crate::error::{contract, Result};

/// Default metric weights in [`super::METRIC_NAMES`] order.
pub const DEFAULT_WEIGHTS: [f64; 10] = [1.0, 3.5, 0.5, 1.0, 2.5, 1.0, 1.0, 2.5, 1.0, 3.0];
/// Stand-in denominator when the baseline value is exactly zero.
pub const EPS_DEN: f64 = 1e-9;
/// Totals below this are clamped so fitness stays positive.
pub const TOTAL_FLOOR: f64 = -790.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    pub initial_score: f64,
    pub delta: f64,
    pub weights: [f64; 10],
    /// Success-rate gains above the first threshold earn `delta`, at or
    /// above the second `2 * delta`.
    pub bonus_thresholds: (f64, f64),
    /// Variance coefficient.
    pub c1: f64,
    /// Size coefficient.
    pub c2: f64,
    /// A segment aborts evaluation once partial fitness exceeds the
    /// baseline's partial fitness by this factor.
    pub abort_margin: f64,
    /// Score as `delta + delta * alpha` with signed alpha instead of the
    /// signed-magnitude rule.
    pub literal_sign: bool,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            initial_score: 800.0,
            delta: 10.0,
            weights: DEFAULT_WEIGHTS,
            bonus_thresholds: (0.05, 0.15),
            c1: 0.1,
            c2: 1.0,
            abort_margin: 1.5,
            literal_sign: false,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(contract("delta must be positive"));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(contract("weights must be non-negative"));
        }
        let (lo, hi) = self.bonus_thresholds;
        if !(0.0 <= lo && lo <= hi) {
            return Err(contract("bonus thresholds must satisfy 0 <= low <= high"));
        }
        if self.abort_margin.is_nan() || self.abort_margin <= 0.0 {
            return Err(contract("abort margin must be positive"));
        }
        Ok(())
    }
}

/// Score of one metric. Both infinite gives 0; exactly one infinite gives
/// `-2 delta` when the candidate is the finite side and `+2 delta`
/// otherwise. Finite values give `s * delta * (1 + |alpha|)` with
/// `s = -1` when the candidate is strictly better.
pub fn base_score(v_git: f64, v_eit: f64, lower_is_better: bool, delta: f64) -> f64 {
    match (v_git.is_infinite(), v_eit.is_infinite()) {
        (true, true) => 0.0,
        (false, true) => -2.0 * delta,
        (true, false) => 2.0 * delta,
        (false, false) => {
            let superior = if lower_is_better { v_git < v_eit } else { v_git > v_eit };
            let sign = if superior { -1.0 } else { 1.0 };
            sign * delta * (1.0 + relative_gap(v_git, v_eit).abs())
        }
    }
}

/// The unsigned-rule variant: `delta + delta * alpha` with signed alpha;
/// a single infinite side gives `2 delta`.
pub fn literal_base_score(v_git: f64, v_eit: f64, delta: f64) -> f64 {
    match (v_git.is_infinite(), v_eit.is_infinite()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 2.0 * delta,
        (false, false) => delta + delta * relative_gap(v_git, v_eit),
    }
}

/// `(v_git - v_eit) / v_eit`, with a zero baseline replaced by [`EPS_DEN`].
fn relative_gap(v_git: f64, v_eit: f64) -> f64 {
    let den = if v_eit == 0.0 { EPS_DEN } else { v_eit };
    (v_git - v_eit) / den
}

/// Bonus for a success-rate gain `d`: `-delta` for `lo < d < hi`,
/// `-2 delta` for `d >= hi`, otherwise 0.
pub fn success_bonus(succ_git: f64, succ_eit: f64, delta: f64, thresholds: (f64, f64)) -> f64 {
    let d = succ_git - succ_eit;
    let (lo, hi) = thresholds;
    if d >= hi {
        -2.0 * delta
    } else if d > lo {
        -delta
    } else {
        0.0
    }
}

/// Weighted sum of base scores and the success bonus over the ten metrics.
pub fn total_score(git: &RunMetrics, eit: &RunMetrics, cfg: &RewardConfig) -> f64 {
    let (g, e) = (git.values(), eit.values());
    let last = g.len() - 1;
    (0..g.len())
        .map(|i| {
            let base = if cfg.literal_sign {
                literal_base_score(g[i], e[i], cfg.delta)
            } else {
                base_score(g[i], e[i], i != last, cfg.delta)
            };
            let bonus = if i == last {
                success_bonus(g[i], e[i], cfg.delta, cfg.bonus_thresholds)
            } else {
                0.0
            };
            (base + bonus) * cfg.weights[i]
        })
        .sum()
}

/// Clamps a total at [`TOTAL_FLOOR`]; the flag reports whether it was hit.
pub fn clamp_total(total: f64) -> (f64, bool) {
    if total < TOTAL_FLOOR {
        (TOTAL_FLOOR, true)
    } else {
        (total, false)
    }
}

/// `initial + mean + c1 * variance + c2 * size` over clamped totals, with
/// the population variance.
pub fn fitness(totals: &[f64], size: usize, cfg: &RewardConfig) -> Result<f64> {
    if totals.is_empty() {
        return Err(contract("fitness needs at least one total"));
    }
    let clamped: Vec<f64> = totals.iter().map(|t| clamp_total(*t).0).collect();
    let n = clamped.len() as f64;
    let mean = clamped.iter().sum::<f64>() / n;
    let variance = clamped.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
    Ok(cfg.initial_score + mean + cfg.c1 * variance + cfg.c2 * size as f64)
}
