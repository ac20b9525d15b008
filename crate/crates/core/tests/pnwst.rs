use priority_steiner::generators::{gen_random_pnwst, gen_tightness_pnwst, RandomSpec};
use priority_steiner::harmonic;
use priority_steiner::oracle::exact_pnwst;
use priority_steiner::pnwst::{
    alg3_pnwst, apply_merge, candidate_cost, minimize_gamma, Alg3Config, CostMode, RateForest,
};
use priority_steiner::{Level, PnwstInstance, PriorityProblem};

fn faithful() -> Alg3Config {
    Alg3Config {
        cost_mode: CostMode::Faithful,
        prefer_larger_h: false,
    }
}

#[test]
fn tightness_family_hits_harmonic_weight() {
    for t in 2..=10 {
        let inst = gen_tightness_pnwst(t).unwrap();
        let r = alg3_pnwst(&inst, Alg3Config::default()).unwrap();
        let expected = 2.0 * (harmonic(t + 1) - 1.0);
        assert!(
            (r.weight - expected).abs() < 1e-9,
            "t={t}: {} vs {expected}",
            r.weight
        );
        assert_eq!(r.iterations.len(), t);
        assert_eq!(inst.check_feasible(&r.solution), Ok(()));
    }
}

#[test]
fn tightness_first_iteration_ties_hub_and_pair() {
    let inst = gen_tightness_pnwst(3).unwrap();
    let forest = RateForest::new(&inst);
    let cand = minimize_gamma(&inst, &forest, Alg3Config::default()).unwrap();
    assert_eq!(cand.gamma, 0.25);
    assert_eq!(cand.h, 2);
    // Centered at s, reaching t_1 through the cheapest top vertex.
    assert_eq!(cand.center, 0);
    assert_eq!(cand.legs[0].0, vec![0, 5, 1]);
    let hub = candidate_cost(
        &inst,
        &forest,
        CostMode::Residual,
        0,
        4,
        Level(1),
        &[1, 2, 3],
    )
    .unwrap();
    assert_eq!(hub / 4.0, 0.25);

    let mut forest = forest;
    let delta = apply_merge(&inst, &mut forest, &cand);
    assert_eq!(delta, 0.5);
    assert_eq!(forest.trees.len(), 3);
}

#[test]
fn faithful_charging_on_tightness_family() {
    let inst = gen_tightness_pnwst(3).unwrap();
    let r = alg3_pnwst(&inst, faithful()).unwrap();
    assert_eq!(r.weight, 1.5);
}

#[test]
fn tightness_optimum_is_one() {
    for t in 2..=5 {
        let inst = gen_tightness_pnwst(t).unwrap();
        assert_eq!(exact_pnwst(&inst).unwrap().opt_weight, 1.0);
    }
}

/// Minimum γ over every root tree, center, rate and subset.
fn brute_force_gamma(inst: &PnwstInstance, forest: &RateForest, mode: CostMode) -> f64 {
    let f = forest.trees.len();
    let mut best = f64::INFINITY;
    for i in 0..f {
        let pr = inst.root_priority(forest.trees[i].root);
        for v in 0..inst.graph().n() {
            for b in inst.graph().levels().filter(|&b| b <= pr) {
                let others: Vec<usize> = (0..f)
                    .filter(|&j| j != i && inst.root_priority(forest.trees[j].root) <= b)
                    .collect();
                for mask in 1u32..(1 << others.len()) {
                    let subset: Vec<usize> = others
                        .iter()
                        .enumerate()
                        .filter(|(x, _)| mask & (1 << x) != 0)
                        .map(|(_, &j)| j)
                        .collect();
                    if let Some(c) = candidate_cost(inst, forest, mode, i, v, b, &subset) {
                        best = best.min(c / (subset.len() + 1) as f64);
                    }
                }
            }
        }
    }
    best
}

#[test]
fn prefix_scan_matches_subset_enumeration() {
    for seed in 0..40 {
        let spec = RandomSpec::new(7, 0.45, 2, 0.5, seed);
        let inst = gen_random_pnwst(&spec).unwrap();
        for mode in [CostMode::Faithful, CostMode::Residual] {
            let config = Alg3Config {
                cost_mode: mode,
                prefer_larger_h: false,
            };
            let mut forest = RateForest::new(&inst);
            while forest.trees.len() > 1 {
                let cand = minimize_gamma(&inst, &forest, config).unwrap();
                let brute = brute_force_gamma(&inst, &forest, mode);
                assert!(
                    (cand.gamma - brute).abs() < 1e-9,
                    "seed {seed} {mode:?}: scan {} brute {brute}",
                    cand.gamma
                );
                apply_merge(&inst, &mut forest, &cand);
            }
        }
    }
}

#[test]
fn merge_never_costs_more_than_its_candidate() {
    for seed in 0..60 {
        let inst = gen_random_pnwst(&RandomSpec::new(9, 0.35, 3, 0.5, seed)).unwrap();
        for mode in [CostMode::Faithful, CostMode::Residual] {
            let config = Alg3Config {
                cost_mode: mode,
                prefer_larger_h: false,
            };
            let mut forest = RateForest::new(&inst);
            let mut total = 0.0;
            while forest.trees.len() > 1 {
                let cand = minimize_gamma(&inst, &forest, config).unwrap();
                let delta = apply_merge(&inst, &mut forest, &cand);
                assert!(delta <= cand.h as f64 * cand.gamma + 1e-9, "seed {seed}");
                total += delta;
            }
            assert!((forest.rate_weight(&inst) - total).abs() < 1e-9);
        }
    }
}

#[test]
fn run_report_accounting() {
    for seed in 0..60 {
        let inst = gen_random_pnwst(&RandomSpec::new(10, 0.3, 3, 0.4, seed)).unwrap();
        for prefer_larger_h in [false, true] {
            let config = Alg3Config {
                cost_mode: CostMode::Residual,
                prefer_larger_h,
            };
            let r = alg3_pnwst(&inst, config).unwrap();
            assert_eq!(inst.check_feasible(&r.solution), Ok(()));
            assert!((r.raw_weight - r.total_delta_c()).abs() < 1e-9);
            assert!(r.weight <= r.total_delta_c() + 1e-9);
            assert!(r.iterations.len() <= inst.terminals().len());
            let mut size = inst.terminals().len() + 1;
            for it in &r.iterations {
                assert_eq!(it.forest_size, size);
                size = size + 1 - it.h;
            }
            assert_eq!(size, 1);
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    let inst = gen_random_pnwst(&RandomSpec::new(12, 0.3, 3, 0.5, 99)).unwrap();
    let a = alg3_pnwst(&inst, Alg3Config::default()).unwrap();
    let b = alg3_pnwst(&inst, Alg3Config::default()).unwrap();
    assert_eq!(a, b);
}
