use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssdo_te::dense::{apply_sd_update, background_traffic, compute_utilization, SplitTensor};
use ssdo_te::oracle::{grid_global_optimum, path_walk_utilization, relay_sum_utilization};
use ssdo_te::path::{path_utilization, pb_bbsm, PathSplit};
use ssdo_te::ssdo::{self, SolverConfig};
use ssdo_te::subproblem::{bbsm, feasibility_check, residual_ratios, Feasibility};
use ssdo_te::topology::fixtures::ring_deadlock_fixture;
use ssdo_te::topology::{
    apply_failures, brute_force_paths, complete_dcn_topology, sample_failures, yen_k_shortest_paths, Capacity, PathSet,
    Topology,
};
use ssdo_te::traffic::{gravity_demands, perturb_series, DemandMatrix, DemandSeries};

/// Random digraph on `n` nodes with finite capacities.
fn arb_topology(nodes: std::ops::RangeInclusive<usize>, density: f64) -> impl Strategy<Value = Topology> {
    nodes
        .prop_flat_map(move |n| {
            let slots = n * (n - 1);
            (
                Just(n),
                prop::collection::vec((prop::bool::weighted(density), 1.0f64..10.0), slots),
            )
        })
        .prop_filter_map("needs an edge", |(n, slots)| {
            let pairs = (0..n).flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| (s, d)));
            let edges: Vec<_> = pairs
                .zip(slots)
                .filter(|(_, (keep, _))| *keep)
                .map(|((s, d), (_, c))| (s, d, Capacity::Finite(c)))
                .collect();
            Topology::with_numbered_nodes(n, edges).ok()
        })
}

/// Complete graph with random capacities, candidate paths and demands.
fn arb_dense_instance() -> impl Strategy<Value = (Topology, PathSet, DemandMatrix, u64)> {
    (3usize..=6, 2usize..=3, any::<u64>()).prop_map(|(n, k, seed)| {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<_> = (0..n)
            .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| (s, d)))
            .map(|(s, d)| (s, d, Capacity::Finite(rng.random_range(1.0..10.0))))
            .collect();
        let topology = Topology::with_numbered_nodes(n, edges).unwrap();
        let paths = PathSet::k_shortest(&topology, k).unwrap();
        let mut demands = DemandMatrix::zeros(n);
        for s in 0..n {
            for d in 0..n {
                if s != d && rng.random_bool(0.6) {
                    demands.set(s, d, rng.random_range(0.1..5.0));
                }
            }
        }
        (topology, paths, demands, seed)
    })
}

fn random_path_split(paths: &PathSet, seed: u64) -> PathSplit {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut split = PathSplit::first_path(paths);
    for ((s, d), ps) in paths.pairs() {
        let raw: Vec<f64> = (0..ps.len()).map(|_| rng.random::<f64>() + 1e-3).collect();
        let sum: f64 = raw.iter().sum();
        split.set(s, d, raw.iter().map(|r| r / sum).collect());
    }
    split
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn yen_matches_brute_force(topology in arb_topology(2..=6, 0.5), k in 1usize..6) {
        let n = topology.node_count();
        for s in 0..n {
            for d in 0..n {
                if s == d {
                    continue;
                }
                let mut all = brute_force_paths(&topology, s, d);
                all.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
                all.truncate(k);
                let yen = match yen_k_shortest_paths(&topology, s, d, k) {
                    Ok(p) => p,
                    Err(_) => {
                        prop_assert!(all.is_empty());
                        continue;
                    }
                };
                for p in &yen {
                    let mut seen = p.clone();
                    seen.sort_unstable();
                    seen.dedup();
                    prop_assert_eq!(seen.len(), p.len(), "loop in {:?}", p);
                    prop_assert!(p.windows(2).all(|w| topology.has_edge(w[0], w[1])));
                }
                prop_assert!(yen.windows(2).all(|w| w[0].len() <= w[1].len()));
                prop_assert_eq!(yen, all);
            }
        }
    }

    #[test]
    fn recomputed_paths_avoid_failed_edges(seed in any::<u64>(), count in 1usize..6) {
        let topology = complete_dcn_topology(5, 1.0).unwrap();
        let demands = gravity_demands(&topology, 10.0, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scenario = sample_failures(&topology, count, &mut rng).unwrap();
        if let Ok(damaged) = apply_failures(&topology, &scenario, &demands) {
            let paths = PathSet::k_shortest(&damaged, 4).unwrap();
            for (_, ps) in paths.pairs() {
                for p in ps {
                    for w in p.windows(2) {
                        prop_assert!(!scenario.removed_edges.contains(&(w[0], w[1])));
                    }
                }
            }
        }
    }

    #[test]
    fn ring_fixture_utilizations(n in 5usize..12) {
        let fx = ring_deadlock_fixture(n).unwrap();
        let inst = &fx.instance;
        let detour = path_utilization(&inst.topology, &inst.demands, &inst.paths, &fx.all_detour).unwrap();
        let direct = path_utilization(&inst.topology, &inst.demands, &inst.paths, &fx.all_direct).unwrap();
        prop_assert!((detour.mlu() - 1.0).abs() <= 1e-12);
        prop_assert!((direct.mlu() - 1.0 / (n - 3) as f64).abs() <= 1e-12);
    }

    #[test]
    fn gravity_volume_and_diagonal(topology in arb_topology(2..=8, 0.6), total in 1.0f64..1e6, seed in any::<u64>()) {
        if let Ok(m) = gravity_demands(&topology, total, seed) {
            prop_assert!((m.total() - total).abs() <= 1e-9 * total);
            for i in 0..topology.node_count() {
                prop_assert_eq!(m.get(i, i), 0.0);
            }
        }
    }

    #[test]
    fn perturbation_keeps_shape(seed in any::<u64>(), scale in 0.0f64..50.0) {
        let topology = complete_dcn_topology(5, 1.0).unwrap();
        let snaps: Vec<_> = (0..4)
            .map(|i| {
                let opts = ssdo_te::traffic::GravityOptions { noise_sigma: Some(0.8), ..Default::default() };
                ssdo_te::traffic::gravity_demands_with(&topology, 100.0, seed.wrapping_add(i), &opts).unwrap()
            })
            .collect();
        let series = DemandSeries::new("1s", snaps).unwrap();
        let out = perturb_series(&series, scale, seed).unwrap();
        let tiny = perturb_series(&series, 1e-12, seed).unwrap();
        for ((o, t), base) in out.snapshots.iter().zip(&tiny.snapshots).zip(&series.snapshots) {
            for i in 0..5 {
                prop_assert_eq!(o.get(i, i), 0.0);
                for j in 0..5 {
                    prop_assert!(o.get(i, j) >= 0.0);
                    prop_assert!((t.get(i, j) - base.get(i, j)).abs() <= 1e-4 * (1.0 + base.get(i, j)));
                }
            }
        }
    }

    #[test]
    fn feasibility_is_monotone_and_bbsm_never_raises_mlu((topology, paths, demands, seed) in arb_dense_instance()) {
        let cs = paths.candidate_set().unwrap();
        let split = random_path_split(&paths, seed).to_tensor(&cs);
        let mut state = compute_utilization(&topology, &demands, &split).unwrap();
        for (sd, _) in demands.demanded().collect::<Vec<_>>() {
            let view = background_traffic(&mut state, &split, &demands, &cs, sd);
            let sol = bbsm(&view, 1e-6).unwrap();
            prop_assert!(view.mlu_with(&sol.ratios) <= view.u_ub + 1e-6);
            let grid: Vec<f64> = (0..=40).map(|i| view.u_ub * i as f64 / 20.0).collect();
            let feasible: Vec<bool> = grid
                .iter()
                .map(|&u| matches!(feasibility_check(&residual_ratios(&view, u).unwrap()), Feasibility::Feasible(_)))
                .collect();
            if let Some(first) = feasible.iter().position(|&f| f) {
                prop_assert!(feasible[first..].iter().all(|&f| f));
            }
        }
    }

    #[test]
    fn incremental_loads_match_recomputation((topology, paths, demands, seed) in arb_dense_instance(), updates in 1usize..200) {
        use rand::Rng;
        let cs = paths.candidate_set().unwrap();
        let mut split = random_path_split(&paths, seed).to_tensor(&cs);
        let mut state = compute_utilization(&topology, &demands, &split).unwrap();
        let pairs: Vec<_> = demands.demanded().map(|(sd, _)| sd).collect();
        prop_assume!(!pairs.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..updates {
            let sd = pairs[rng.random_range(0..pairs.len())];
            let k = cs.get(sd.0, sd.1).len();
            let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-6).collect();
            let sum: f64 = raw.iter().sum();
            let r: Vec<f64> = raw.iter().map(|x| x / sum).collect();
            apply_sd_update(&mut state, &mut split, &demands, &cs, sd, &r).unwrap();
        }
        let fresh = compute_utilization(&topology, &demands, &split).unwrap();
        for s in 0..topology.node_count() {
            for d in 0..topology.node_count() {
                prop_assert!((state.load(s, d) - fresh.load(s, d)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn pb_bbsm_keeps_ratios_normalized((topology, paths, demands, seed) in arb_dense_instance()) {
        let split = random_path_split(&paths, seed);
        let mut state = path_utilization(&topology, &demands, &paths, &split).unwrap();
        for (sd, _) in demands.demanded().collect::<Vec<_>>() {
            let sol = pb_bbsm(&mut state, &split, &demands, &paths, sd, 1e-6).unwrap();
            prop_assert!(sol.ratios.iter().all(|&r| r >= 0.0));
            prop_assert!((sol.ratios.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn solves_are_monotone_and_dominate_hot_starts((topology, paths, demands, seed) in arb_dense_instance()) {
        let config = SolverConfig::default();
        let start = random_path_split(&paths, seed);
        let cs = paths.candidate_set().unwrap();
        let (_, dense) = ssdo::run(&topology, &demands, &paths, &config, Some(&start.to_tensor(&cs))).unwrap();
        let (_, path) = ssdo::path_ssdo(&topology, &demands, &paths, &config, Some(&start)).unwrap();
        for report in [dense, path] {
            prop_assert!(report.final_mlu <= report.initial_mlu + config.epsilon);
            prop_assert!(report.mlu_trajectory.windows(2).all(|w| w[1].mlu <= w[0].mlu + config.epsilon));
        }
    }

    #[test]
    fn oracle_evaluators_agree_with_solver_loads((topology, paths, demands, seed) in arb_dense_instance()) {
        let split = random_path_split(&paths, seed);
        let cs = paths.candidate_set().unwrap();
        let tensor: SplitTensor = split.to_tensor(&cs);
        let state = compute_utilization(&topology, &demands, &tensor).unwrap();
        let relay = relay_sum_utilization(&topology, &demands, &tensor);
        let walk = path_walk_utilization(&topology, &demands, &paths, &split);
        let n = topology.node_count();
        for s in 0..n {
            for d in 0..n {
                let u = state.util(s, d);
                prop_assert!((relay[s * n + d] - u).abs() <= 1e-12);
                prop_assert!((walk[s * n + d] - u).abs() <= 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn finer_grids_never_report_worse(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topology = complete_dcn_topology(3, 2.0).unwrap();
        let paths = PathSet::k_shortest(&topology, 2).unwrap();
        let mut demands = DemandMatrix::zeros(3);
        demands.set(0, 1, rng.random_range(0.1..3.0));
        demands.set(0, 2, rng.random_range(0.1..3.0));
        demands.set(1, 2, rng.random_range(0.1..3.0));
        let coarse = grid_global_optimum(&topology, &demands, &paths, 0.1).unwrap();
        let fine = grid_global_optimum(&topology, &demands, &paths, 0.05).unwrap();
        prop_assert!(fine.optimal_mlu <= coarse.optimal_mlu);
    }
}
