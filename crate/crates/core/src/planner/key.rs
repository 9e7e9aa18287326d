//! Queue keys: the GIT* key, the effort-aware baseline key and the
//! adaptive inflation and truncation factors.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::gp::{EdgeContext, ExprIndividual};

/// Lexicographically ordered pair. Ordering is total (`f64::total_cmp`).
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub primary: f64,
    pub tiebreak: f64,
}

impl Key {
    pub const fn new(primary: f64, tiebreak: f64) -> Self {
        Key { primary, tiebreak }
    }

    /// Largest key a truncated search may still expand when the best key
    /// reaching the start is `self`: each component is loosened by
    /// `(factor - 1) * |component|`, which keeps the bound above the key
    /// for either sign.
    pub fn loosened(self, factor: f64) -> Key {
        let slack = factor - 1.0;
        Key {
            primary: self.primary + slack * self.primary.abs(),
            tiebreak: self.tiebreak + slack * self.tiebreak.abs(),
        }
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.primary
            .total_cmp(&other.primary)
            .then_with(|| self.tiebreak.total_cmp(&other.tiebreak))
    }
}

/// Orders reverse-search edges.
pub trait KeyFunction: Send + Sync {
    fn key(&self, ctx: &EdgeContext) -> Key;
}

/// The evolved GIT* key.
pub fn git_key(ctx: &EdgeContext) -> Key {
    let primary = (ctx.g_hat_t - PI) * (ctx.u_t - ctx.u_s).abs().ln_1p() / (1.0 + ctx.w_dyn);
    let tiebreak = (ctx.e_bar_s + ctx.e_bar_edge).sqrt() * ctx.d_bar_t.max(1.0).ln();
    Key::new(primary, tiebreak)
}

/// Cost-to-come plus cost-to-go through the edge, then effort.
pub fn baseline_key(ctx: &EdgeContext) -> Key {
    Key::new(
        ctx.g_hat_t + ctx.c_hat + ctx.h_hat_t,
        ctx.e_bar_s + ctx.e_bar_edge,
    )
}

/// Inflation for dimension `d` after `n` samples; tends to 1 as `n` grows.
pub fn inflation_factor(d: usize, n: u64) -> f64 {
    let d = d as f64;
    let n = n.max(1) as f64;
    1.0 + (d.ln() + d.sqrt()) / (n.sqrt() + n.ln() + 1.0)
}

/// Truncation after `n` samples; tends to 1 as `n` grows.
pub fn truncation_factor(n: u64) -> f64 {
    1.0 + 3.0 * PI / n.max(1) as f64
}

/// The key a planner orders its reverse queue with.
#[derive(Debug, Clone)]
pub enum PlannerKey {
    GitStar,
    Baseline,
    Evolved(ExprIndividual),
}

impl PlannerKey {
    pub fn label(&self) -> &'static str {
        match self {
            PlannerKey::GitStar => "git",
            PlannerKey::Baseline => "baseline",
            PlannerKey::Evolved(_) => "evolved",
        }
    }
}

impl KeyFunction for PlannerKey {
    fn key(&self, ctx: &EdgeContext) -> Key {
        match self {
            PlannerKey::GitStar => git_key(ctx),
            PlannerKey::Baseline => baseline_key(ctx),
            PlannerKey::Evolved(ind) => ind.key(ctx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn worked() -> EdgeContext {
        EdgeContext {
            g_hat_t: 5.0,
            u_s: 0.0,
            u_t: E - 1.0,
            w_dyn: 0.0,
            e_bar_s: 4.0,
            e_bar_edge: 5.0,
            d_bar_t: E,
            ..Default::default()
        }
    }

    #[test]
    fn worked_git_key() {
        let k = git_key(&worked());
        assert!((k.primary - 1.8584).abs() < 1e-4);
        assert!((k.primary - (5.0 - PI)).abs() < 1e-12);
        assert!((k.tiebreak - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equal_potentials_zero_the_primary() {
        for g in [0.0, 1.0, 7.5] {
            let ctx = EdgeContext { g_hat_t: g, u_s: 0.3, u_t: 0.3, w_dyn: 4.0, ..Default::default() };
            assert_eq!(git_key(&ctx).primary, 0.0);
        }
    }

    #[test]
    fn importance_shrinks_the_primary() {
        let mut last = f64::INFINITY;
        for w in 0..50 {
            let ctx = EdgeContext { w_dyn: w as f64, ..worked() };
            let p = git_key(&ctx).primary;
            assert!(p > 0.0 && p < last);
            last = p;
        }
    }

    #[test]
    fn short_effort_guard() {
        let ctx = EdgeContext { d_bar_t: 0.0, ..worked() };
        assert_eq!(git_key(&ctx).tiebreak, 0.0);
    }

    #[test]
    fn baseline_key_values() {
        let ctx = EdgeContext { g_hat_t: 0.0, c_hat: 0.0, h_hat_t: 0.8, ..Default::default() };
        assert_eq!(baseline_key(&ctx).primary, 0.8);
        let a = baseline_key(&EdgeContext { c_hat: 0.1, ..worked() });
        let b = baseline_key(&EdgeContext { c_hat: 0.2, ..worked() });
        assert!(a < b);
        assert_eq!(baseline_key(&worked()).tiebreak, 9.0);
    }

    #[test]
    fn factor_values() {
        assert!((inflation_factor(4, 100) - 1.2170).abs() < 1e-4);
        assert!((truncation_factor(100) - 1.09425).abs() < 1e-4);
        assert!((inflation_factor(1_000, 10u64.pow(15)) - 1.0).abs() < 1e-5);
        assert!(inflation_factor(5, 100) > inflation_factor(4, 100));
    }

    #[test]
    fn key_ordering_is_lexicographic() {
        assert!(Key::new(1.0, 9.0) < Key::new(2.0, 0.0));
        assert!(Key::new(1.0, 1.0) < Key::new(1.0, 2.0));
        assert_eq!(Key::new(1.0, 1.0), Key::new(1.0, 1.0));
    }

    #[test]
    fn loosened_bound_dominates_for_any_sign() {
        for k in [Key::new(-2.0, 3.0), Key::new(2.0, -3.0), Key::new(0.0, 0.0)] {
            assert!(k.loosened(1.1) >= k);
            assert_eq!(k.loosened(1.0), k);
        }
    }
}
