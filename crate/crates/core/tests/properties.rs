use gitstar_core::gp::{point_mutate, random_tree, subtree_crossover, MAX_DEPTH};
use gitstar_core::reward::{base_score, median, total_score};
use gitstar_core::{AxisBox, EdgeContext, ExprIndividual, ExprTree, RewardConfig, RunMetrics, StateVec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn individual(seed: u64) -> ExprIndividual {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primary = random_tree(&mut rng, (seed % 5) as usize, seed % 2 == 0);
    let tiebreak = random_tree(&mut rng, ((seed / 5) % 5) as usize, seed % 3 == 0);
    ExprIndividual::new(primary, tiebreak).unwrap()
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -1e9..1e9f64, -1.0..1.0f64, -1e-9..1e-9f64]
}

fn context() -> impl Strategy<Value = EdgeContext> {
    proptest::collection::vec(finite(), 11).prop_map(|v| EdgeContext {
        g_hat_t: v[0],
        h_hat_t: v[1],
        c_hat: v[2],
        e_bar_s: v[3],
        e_bar_edge: v[4],
        d_bar_t: v[5],
        dim: v[6],
        u_s: v[7],
        u_t: v[8],
        w_dyn: v[9],
        n_samples: v[10],
    })
}

/// Ten metric values with positive finite spreads and a success rate.
fn metric_values() -> impl Strategy<Value = [f64; 10]> {
    (proptest::collection::vec(0.01..10.0f64, 9), 0.0..=1.0f64).prop_map(|(v, s)| {
        let mut out = [0.0; 10];
        out[..9].copy_from_slice(&v);
        out[9] = s;
        out
    })
}

fn unit_point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0..1.0f64, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trees_evaluate_finite(seed in any::<u64>(), ctx in context()) {
        let ind = individual(seed);
        let k = ind.key(&ctx);
        prop_assert!(k.primary.is_finite() && k.tiebreak.is_finite());
    }

    #[test]
    fn heuristic_text_round_trips(seed in any::<u64>()) {
        let ind = individual(seed);
        let back = ExprIndividual::from_heuristic_text(&ind.to_heuristic_text()).unwrap();
        prop_assert_eq!(back.genotype(), ind.genotype());
        let tree: ExprTree = ind.primary.to_string().parse().unwrap();
        prop_assert_eq!(tree, ind.primary);
    }

    #[test]
    fn operators_respect_depth(a in any::<u64>(), b in any::<u64>(), pc in 0.0..=1.0f64, pm in 0.0..=1.0f64, s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let child = subtree_crossover(&individual(a), &individual(b), pc, MAX_DEPTH, &mut rng);
        let mutant = point_mutate(&child, pm, &mut rng);
        for ind in [&child, &mutant] {
            prop_assert!(ind.primary.depth() <= MAX_DEPTH && ind.tiebreak.depth() <= MAX_DEPTH);
        }
        prop_assert_eq!(mutant.primary.size(), child.primary.size());
        prop_assert_eq!(mutant.tiebreak.size(), child.tiebreak.size());
    }

    #[test]
    fn zero_rate_operators_are_identities(a in any::<u64>(), b in any::<u64>(), s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let p = individual(a);
        prop_assert_eq!(&subtree_crossover(&p, &individual(b), 0.0, MAX_DEPTH, &mut rng), &p);
        prop_assert_eq!(&point_mutate(&p, 0.0, &mut rng), &p);
    }

    /// Lowering a cost-like metric, or raising the success rate, never
    /// raises the total.
    #[test]
    fn sign_coherence(eit in metric_values(), git in metric_values(), i in 0usize..10, factor in 0.0..1.0f64) {
        let cfg = RewardConfig::default();
        let reference = RunMetrics::from_values(eit, 100);
        let before = total_score(&RunMetrics::from_values(git, 100), &reference, &cfg);
        let mut better = git;
        better[i] = if i == 9 { git[9] + (1.0 - git[9]) * factor } else { git[i] * factor.max(1e-3) };
        let after = total_score(&RunMetrics::from_values(better, 100), &reference, &cfg);
        prop_assert!(after <= before + 1e-9, "metric {i}: {before} -> {after}");
    }

    /// Without infinities and with equal success rates the total scales
    /// with delta.
    #[test]
    fn total_is_linear_in_delta(eit in metric_values(), git in metric_values(), k in 0.1..10.0f64) {
        let mut git = git;
        git[9] = eit[9];
        let (g, e) = (RunMetrics::from_values(git, 10), RunMetrics::from_values(eit, 10));
        let one = total_score(&g, &e, &RewardConfig::default());
        let scaled = total_score(&g, &e, &RewardConfig { delta: 10.0 * k, ..Default::default() });
        prop_assert!((scaled - k * one).abs() <= 1e-9 * scaled.abs().max(1.0));
    }

    #[test]
    fn base_score_sign_matches_direction(g in 0.01..10.0f64, e in 0.01..10.0f64) {
        let s = base_score(g, e, true, 10.0);
        prop_assert!(s.abs() >= 10.0);
        prop_assert_eq!(s < 0.0, g < e);
    }

    #[test]
    fn median_lies_between_extremes(v in proptest::collection::vec(-1e6..1e6f64, 1..40)) {
        let m = median(&v);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= m && m <= hi);
    }

    /// The exact segment test agrees with dense sampling whenever sampling
    /// finds a hit, and a miss leaves every sample outside the box.
    #[test]
    fn segment_box_test_matches_sampling(lo in unit_point(3), size in unit_point(3), a in unit_point(3), b in unit_point(3)) {
        let hi: Vec<f64> = lo.iter().zip(&size).map(|(l, s)| (l + 0.3 * s).min(1.0)).collect();
        let bx = AxisBox::new(StateVec::new(lo), StateVec::new(hi)).unwrap();
        let sampled = (0..=2000).any(|k| {
            let t = k as f64 / 2000.0;
            let x: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + t * (q - p)).collect();
            bx.contains(&x)
        });
        let exact = bx.segment_intersects(&a, &b);
        prop_assert!(!sampled || exact);
    }
}
