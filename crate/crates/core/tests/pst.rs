use priority_steiner::generators::{gen_proportional_pst, gen_random_pst, RandomSpec};
use priority_steiner::oracle::{exact_pst, exact_steiner};
use priority_steiner::paths::weighted_search;
use priority_steiner::pst::{alg1_qosmt, alg2_parallel, best_of, k_rho_solver, remove_cycles};
use priority_steiner::steiner::steiner_2approx;
use priority_steiner::{
    log2_ratio_bound, EdgeRateSolution, Level, PriorityGraph, PriorityProblem, PstInstance,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small(seed: u64) -> PstInstance {
    gen_random_pst(&RandomSpec::new(8, 0.4, 3, 0.5, seed)).unwrap()
}

#[test]
fn shared_prefix_optimum_is_four() {
    let g = PriorityGraph::new(4, vec![(0, 1), (1, 2), (1, 3)], 2).unwrap();
    let inst = PstInstance::new(
        g,
        0,
        &[(2, Level(2)), (3, Level(1))],
        vec![vec![1.0, 2.0], vec![1.0, 1.0], vec![1.0, 1.0]],
    )
    .unwrap();
    assert_eq!(exact_pst(&inst).unwrap().opt_weight, 4.0);
    assert_eq!(alg1_qosmt(&inst).unwrap().weight, 4.0);
}

#[test]
fn every_solver_output_is_feasible_and_above_optimum() {
    for seed in 0..80 {
        let inst = small(seed);
        let opt = exact_pst(&inst).unwrap().opt_weight;
        let bound = log2_ratio_bound(inst.terminals().len());
        for r in [
            alg1_qosmt(&inst).unwrap(),
            alg2_parallel(&inst).unwrap(),
            k_rho_solver(&inst).unwrap(),
            best_of(&inst).unwrap(),
        ] {
            assert_eq!(
                inst.check_feasible(&r.solution),
                Ok(()),
                "seed {seed} {}",
                r.tag
            );
            assert!(r.weight >= opt, "seed {seed} {}", r.tag);
            for (e, rate) in r.solution.rates().iter().enumerate() {
                if !rate.is_absent() {
                    assert!(
                        inst.terminals().iter().any(|&t| inst.priority(t) == *rate),
                        "seed {seed}: edge {e} rate {rate} is no terminal's priority"
                    );
                }
            }
        }
        assert!(alg1_qosmt(&inst).unwrap().weight <= bound * opt);
        assert!(alg2_parallel(&inst).unwrap().weight <= bound * opt);
    }
}

#[test]
fn connection_costs_cover_weight() {
    for seed in 0..80 {
        let inst = small(seed);
        for r in [alg1_qosmt(&inst).unwrap(), alg2_parallel(&inst).unwrap()] {
            let total: f64 = r.connection_costs().iter().sum();
            assert!(total >= r.weight, "seed {seed} {}", r.tag);
        }
    }
}

#[test]
fn single_terminal_solvers_agree() {
    for seed in 0..30 {
        let inst = gen_random_pst(&RandomSpec {
            terminals: priority_steiner::generators::TerminalBudget::Count(1),
            ..RandomSpec::new(9, 0.4, 3, 0.0, seed)
        })
        .unwrap();
        assert_eq!(
            alg1_qosmt(&inst).unwrap().solution,
            alg2_parallel(&inst).unwrap().solution
        );
    }
}

/// The parallel solver's result does not depend on which order the
/// per-terminal searches are merged in.
#[test]
fn alg2_merge_is_order_free() {
    for seed in 0..40 {
        let inst = small(seed);
        let r = alg2_parallel(&inst).unwrap();
        let mut rates = vec![Level::ABSENT; inst.graph().m()];
        for a in r.attachments.iter().rev() {
            for &e in &a.path_edges {
                rates[e] = rates[e].max(inst.priority(a.terminal));
            }
        }
        assert_eq!(remove_cycles(&inst, &rates).unwrap(), r.solution);
    }
}

#[test]
fn remove_cycles_on_random_path_unions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..100 {
        let inst = gen_random_pst(&RandomSpec::new(10, 0.4, 3, 0.4, seed)).unwrap();
        let g = inst.graph();
        // Each terminal reaches the source along a path that is shortest
        // under its own random weights, so the union is full of cycles.
        let mut rates = vec![Level::ABSENT; g.m()];
        for &t in inst.terminals() {
            let noise: Vec<f64> = (0..g.m()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let search = weighted_search(g, &[inst.source()], |e| noise[e]);
            for e in search.path_edges(t).unwrap() {
                rates[e] = rates[e].max(inst.priority(t));
            }
        }
        let union = EdgeRateSolution::new(rates.clone());
        let before = inst.solution_weight(&union).unwrap();
        let sol = remove_cycles(&inst, &rates).unwrap();
        assert_eq!(inst.check_feasible(&sol), Ok(()), "seed {seed}");
        assert!(inst.solution_weight(&sol).unwrap() <= before);
    }
}

#[test]
fn k_rho_within_bound() {
    for seed in 0..80 {
        let inst = small(seed);
        let opt = exact_pst(&inst).unwrap().opt_weight;
        let k = inst.demands().distinct_priorities().len() as f64;
        let r = k_rho_solver(&inst).unwrap();
        assert!(r.weight <= 2.0 * k * opt + 1e-9, "seed {seed}");
    }
}

#[test]
fn k_rho_single_level_is_a_steiner_approximation() {
    for seed in 0..40 {
        let inst = gen_random_pst(&RandomSpec::new(8, 0.45, 1, 0.5, seed)).unwrap();
        let opt = exact_pst(&inst).unwrap().opt_weight;
        assert!(k_rho_solver(&inst).unwrap().weight <= 2.0 * opt);
    }
}

#[test]
fn best_of_is_the_minimum() {
    for seed in 0..60 {
        let inst = gen_proportional_pst(&RandomSpec::new(8, 0.45, 3, 0.5, seed)).unwrap();
        let r = best_of(&inst).unwrap();
        let weights = [
            alg1_qosmt(&inst).unwrap().weight,
            alg2_parallel(&inst).unwrap().weight,
            k_rho_solver(&inst).unwrap().weight,
        ];
        let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(r.weight, min);
        let first = weights.iter().position(|&w| w == min).unwrap();
        assert_eq!(r.tag, r.candidates[first].0);
    }
}

#[test]
fn steiner_ratio_against_exact() {
    for seed in 0..60 {
        let inst = gen_random_pst(&RandomSpec::new(8, 0.4, 1, 0.5, seed)).unwrap();
        let mut terms = inst.terminals().to_vec();
        terms.push(inst.source());
        let w = |e: usize| inst.weight(e, Level(1));
        let approx = steiner_2approx(inst.graph(), &terms, w).unwrap();
        let exact = exact_steiner(inst.graph(), &terms, w).unwrap();
        let q = terms.len() as f64;
        assert!(approx.weight >= exact.opt_weight);
        assert!(
            approx.weight <= 2.0 * (1.0 - 1.0 / q) * exact.opt_weight + 1e-9,
            "seed {seed}"
        );
    }
}

#[test]
fn steiner_four_cycle_with_shortcut() {
    // 4-cycle 0-1-2-3 of weight 2 edges plus a hub 4 joined to all with weight 1.
    let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
    edges.extend((0..4).map(|v| (v, 4)));
    let g = PriorityGraph::new(5, edges, 1).unwrap();
    let w = |e: usize| if e < 4 { 2.0 } else { 1.0 };
    let approx = steiner_2approx(&g, &[0, 1, 2, 3], w).unwrap();
    let exact = exact_steiner(&g, &[0, 1, 2, 3], w).unwrap();
    assert_eq!(exact.opt_weight, 4.0);
    assert!(approx.weight <= 2.0 * exact.opt_weight);
}

#[test]
fn logarithmic_solvers_are_deterministic() {
    let inst = gen_random_pst(&RandomSpec::with_counts(200, 800, 4, 60, 3)).unwrap();
    assert_eq!(alg1_qosmt(&inst).unwrap(), alg1_qosmt(&inst).unwrap());
    assert_eq!(alg2_parallel(&inst).unwrap(), alg2_parallel(&inst).unwrap());
    assert_eq!(k_rho_solver(&inst).unwrap(), k_rho_solver(&inst).unwrap());
}
