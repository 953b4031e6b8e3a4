//! Frontier invariants on small random models.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vaxfront_core::frontier::{optimal_loss_max, FrontierCurve};
use vaxfront_core::{
    anti_pareto_frontier, effective_re, feasible_region_sample, fixtures, generate,
    is_disconnecting, pareto_frontier, CostFunction, FrontierOptions, MetapopModel, Strategy,
};

fn opts(resolution: usize) -> FrontierOptions {
    FrontierOptions { resolution, ..FrontierOptions::default() }
}

fn slack(curves: &[&FrontierCurve]) -> f64 {
    let l = curves.iter().map(|c| c.lipschitz()).fold(0.0, f64::max);
    let h = curves.iter().map(|c| c.max_step()).fold(0.0, f64::max);
    l * h
}

fn upper(anti: &FrontierCurve, c: f64) -> f64 {
    if c <= anti.critical_cost {
        anti.r0
    } else {
        anti.loss_at(c)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn samples_lie_between_frontiers(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = generate::random_nonnegative(&mut rng, n, 0.7);
        let m = MetapopModel::new(k, generate::random_weights(&mut rng, n), None).unwrap();
        let cost = CostFunction::Uniform;
        let p = pareto_frontier(&m, &cost, &opts(8)).unwrap();
        let a = anti_pareto_frontier(&m, &cost, &opts(8)).unwrap();
        let tol = slack(&[&p, &a]) + 1e-8;
        for (c, l) in feasible_region_sample(&m, &cost, 200, seed).unwrap() {
            prop_assert!(l >= p.loss_at(c) - tol, "below Pareto at c={c}: {l} < {}", p.loss_at(c));
            prop_assert!(l <= upper(&a, c) + tol, "above anti-Pareto at c={c}: {l} > {}", upper(&a, c));
        }
    }

    #[test]
    fn pareto_inverse_relation(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = generate::random_convex_model(&mut rng, n);
        let p = pareto_frontier(&m, &CostFunction::Uniform, &opts(8)).unwrap();
        let tol = 2.0 * slack(&[&p]) + 1e-12;
        for k in 0..=16 {
            let l = p.r0 * k as f64 / 16.0;
            prop_assert!((p.loss_at(p.cost_for_loss(l)) - l).abs() <= tol);
        }
    }

    #[test]
    fn cordons_sit_below_the_anti_frontier(seed in any::<u64>(), n in 6usize..=12) {
        let m = fixtures::cycle_model(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.2..=1.0) })
            .collect();
        let eta = Strategy::new(eta).unwrap();
        prop_assume!(is_disconnecting(&m, &eta).unwrap());
        let cost = CostFunction::Uniform;
        let c = cost.evaluate(&m, &eta).unwrap();
        let re = effective_re(&m, &eta).unwrap();
        let best = optimal_loss_max(&m, &cost, c).unwrap();
        prop_assert!(re < best.loss - 1e-6, "cordon {re} vs anti {}", best.loss);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn convex_tail_is_linear(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = generate::random_convex_model(&mut rng, n);
        prop_assume!((0..n).all(|i| m.matrix()[(i, i)] > 0.0));
        let p = pareto_frontier(&m, &CostFunction::Uniform, &opts(16)).unwrap();
        let start = p
            .points
            .iter()
            .position(|q| q.loss > 1e-9 && q.strategy.max() < 1.0 - 1e-9);
        prop_assume!(start.is_some());
        let s = &p.points[start.unwrap()];
        let slope = s.loss / (p.c_max - s.cost);
        for q in &p.points[start.unwrap()..] {
            prop_assert!((q.loss - slope * (p.c_max - q.cost)).abs() <= 1e-6);
        }
    }
}

#[test]
fn psd_fixture_tail_is_linear() {
    let m = MetapopModel::uniform(fixtures::psd_example()).unwrap();
    let p = pareto_frontier(&m, &CostFunction::Uniform, &opts(16)).unwrap();
    assert_eq!(p.critical_cost, p.c_max);
    let first = p.points.iter().position(|q| q.loss > 1e-9 && q.strategy.max() < 1.0 - 1e-9).unwrap();
    let s = &p.points[first];
    for q in &p.points[first..] {
        let line = s.loss * (p.c_max - q.cost) / (p.c_max - s.cost);
        assert!((q.loss - line).abs() <= 1e-6);
    }
}

#[test]
fn feasible_samples_on_cycle_are_sandwiched() {
    let m = fixtures::cycle_model(12);
    let cost = CostFunction::Uniform;
    let p = pareto_frontier(&m, &cost, &opts(16)).unwrap();
    let a = anti_pareto_frontier(&m, &cost, &opts(16)).unwrap();
    let tol = slack(&[&p, &a]) + 1e-8;
    let samples = feasible_region_sample(&m, &cost, 2_000, 1).unwrap();
    let below = samples.iter().filter(|(c, l)| *l < p.loss_at(*c) - tol).count();
    let above = samples.iter().filter(|(c, l)| *l > upper(&a, *c) + tol).count();
    assert_eq!((below, above), (0, 0));
}
