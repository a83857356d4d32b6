//! Property tests for the inner search, the selectors and the engine.

mod common;

use std::collections::BTreeSet;

use lazysp::selectors::{select_simple, SelectorContext, SimpleKind};
use lazysp::{
    all_shortest_paths, build_selector, path_length, run_lazysp, shortest_path, Directedness, EngineOptions, Graph,
    LazyWeightState, Path, ProblemInstance, Query, SelectorKind, SelectorSettings, WeightOracle, INF,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_optimum, brute_force_shortest, random_instance};

fn directedness(directed: bool) -> Directedness {
    if directed {
        Directedness::Directed
    } else {
        Directedness::Undirected
    }
}

/// A graph with small integer weights, so equal-length paths are common.
fn tied_graph(rng: &mut ChaCha8Rng, n: usize, directed: bool) -> (Graph, Vec<f64>, Query) {
    let inst = random_instance(rng, n, 0.45, directedness(directed), 0.0, 1.0);
    let weights = (0..inst.graph.num_edges())
        .map(|_| if rng.gen::<f64>() < 0.2 { INF } else { f64::from(rng.gen_range(1..=3u8)) })
        .collect();
    (inst.graph, weights, inst.query.unwrap())
}

fn settings() -> SelectorSettings {
    // Weights are at least 1 and degrees below 8, so beta = 3 keeps the
    // partition function convergent.
    SelectorSettings { beta: Some(3.0), ws_samples: 40, seed: 9, ..SelectorSettings::default() }
}

fn run(inst: &ProblemInstance, kind: SelectorKind) -> (lazysp::SearchResult, lazysp::RunTrace, WeightOracle) {
    let mut selector = build_selector(kind, &settings()).unwrap();
    let mut oracle = inst.oracle();
    let q = inst.query.unwrap();
    let (result, trace) =
        run_lazysp(&inst.graph, q, &mut oracle, &inst.estimates, selector.as_mut(), EngineOptions::default())
            .unwrap();
    (result, trace, oracle)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shortest_path_matches_brute_force(seed in any::<u64>(), n in 2usize..=7, directed in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (graph, weights, q) = tied_graph(&mut rng, n, directed);
        let result = shortest_path(&graph, q, &weights).unwrap();
        prop_assert_eq!(result.length, brute_force_optimum(&graph, q, &weights));
        let expected = brute_force_shortest(&graph, q, &weights);
        let all: BTreeSet<Vec<usize>> =
            all_shortest_paths(&graph, q, &weights).unwrap().iter().map(|p| p.edges().to_vec()).collect();
        prop_assert_eq!(&all, &expected);
        match &result.path {
            Some(path) => {
                prop_assert!(path.connects(q));
                prop_assert_eq!(path.length(&weights), result.length);
                prop_assert!(expected.contains(path.edges()));
            }
            None => prop_assert!(expected.is_empty()),
        }
    }

    #[test]
    fn shortest_length_is_invariant_under_relabeling(seed in any::<u64>(), n in 2usize..=8, directed in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (graph, weights, q) = tied_graph(&mut rng, n, directed);
        let mut vperm: Vec<usize> = (0..n).collect();
        vperm.shuffle(&mut rng);
        let mut eperm: Vec<usize> = (0..graph.num_edges()).collect();
        eperm.shuffle(&mut rng);
        // Edge `e` becomes edge `eperm[e]`.
        let mut endpoints = vec![(0, 0); graph.num_edges()];
        let mut permuted = vec![0.0; graph.num_edges()];
        for (e, edge) in graph.edges().iter().enumerate() {
            endpoints[eperm[e]] = (vperm[edge.source], vperm[edge.target]);
            permuted[eperm[e]] = weights[e];
        }
        let relabeled = Graph::new(n, graph.directedness(), endpoints).unwrap();
        let rq = Query { start: vperm[q.start], goal: vperm[q.goal] };
        prop_assert_eq!(
            shortest_path(&graph, q, &weights).unwrap().length,
            shortest_path(&relabeled, rq, &permuted).unwrap().length
        );
    }

    #[test]
    fn lazysp_evaluations_are_invariant_under_relabeling(seed in any::<u64>(), n in 2usize..=9) {
        // Generic weights: every candidate is unique, so tie-breaking never
        // depends on labels.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, n, 0.4, Directedness::Undirected, 0.4, 1.0);
        let q = inst.query.unwrap();
        let mut vperm: Vec<usize> = (0..n).collect();
        vperm.shuffle(&mut rng);
        let m = inst.graph.num_edges();
        let mut eperm: Vec<usize> = (0..m).collect();
        eperm.shuffle(&mut rng);
        let mut endpoints = vec![(0, 0); m];
        let (mut est, mut truth) = (vec![0.0; m], vec![0.0; m]);
        for (e, edge) in inst.graph.edges().iter().enumerate() {
            endpoints[eperm[e]] = (vperm[edge.source], vperm[edge.target]);
            est[eperm[e]] = inst.estimates[e];
            truth[eperm[e]] = inst.true_weights[e];
        }
        let graph = Graph::new(n, Directedness::Undirected, endpoints).unwrap();
        let rq = Query { start: vperm[q.start], goal: vperm[q.goal] };
        let relabeled = ProblemInstance::new(graph, Some(rq), est, truth).unwrap();
        for kind in [SelectorKind::Forward, SelectorKind::Reverse, SelectorKind::Bisection, SelectorKind::Partition] {
            let (_, a, _) = run(&inst, kind);
            let (_, b, _) = run(&relabeled, kind);
            let mapped: Vec<usize> = a.evaluated_edges().iter().map(|&e| eperm[e]).collect();
            prop_assert_eq!(mapped, b.evaluated_edges(), "{}", kind);
        }
    }

    #[test]
    fn forward_mirrors_reverse(seed in any::<u64>(), n in 2usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, n, 0.35, Directedness::Directed, 0.4, 1.0);
        let q = inst.query.unwrap();
        let flipped: Vec<(usize, usize)> = inst.graph.edges().iter().map(|e| (e.target, e.source)).collect();
        let mirror = ProblemInstance::new(
            Graph::new(n, Directedness::Directed, flipped).unwrap(),
            Some(q.reversed()),
            inst.estimates.clone(),
            inst.true_weights.clone(),
        )
        .unwrap();
        let (_, forward, _) = run(&mirror, SelectorKind::Forward);
        let (_, reverse, _) = run(&inst, SelectorKind::Reverse);
        prop_assert_eq!(forward.evaluated_edges(), reverse.evaluated_edges());
    }

    #[test]
    fn bisection_ignores_off_path_evaluations(seed in any::<u64>(), k in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // A line 0 - 1 - ... - k plus random chords.
        let mut endpoints: Vec<(usize, usize)> = (0..k).map(|i| (i, i + 1)).collect();
        for _ in 0..rng.gen_range(0..=k) {
            let u = rng.gen_range(0..=k);
            let v = rng.gen_range(0..=k);
            if u != v {
                endpoints.push((u, v));
            }
        }
        let graph = Graph::new(k + 1, Directedness::Undirected, endpoints).unwrap();
        let q = Query { start: 0, goal: k };
        let line: Vec<usize> = (0..k).collect();
        let candidate = Path::from_edges(&graph, 0, &line).unwrap();
        let mut on_path = LazyWeightState::new(&vec![1.0; graph.num_edges()]);
        for &e in &line {
            if rng.gen::<f64>() < 0.4 {
                on_path.record(e, 1.0);
            }
        }
        prop_assume!(!on_path.is_fully_evaluated(&line));
        let mut with_off_path = on_path.clone();
        for e in k..graph.num_edges() {
            if rng.gen::<bool>() {
                with_off_path.record(e, if rng.gen::<bool>() { INF } else { 2.0 });
            }
        }
        let pick = |state: &LazyWeightState| {
            let ctx = SelectorContext { graph: &graph, query: q, candidate: &candidate, state, iteration: 1 };
            select_simple(SimpleKind::Bisection, &ctx).unwrap()
        };
        prop_assert_eq!(pick(&on_path), pick(&with_off_path));
    }

    #[test]
    fn evaluation_bookkeeping_is_consistent(seed in any::<u64>(), n in 2usize..=8, directed in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, n, 0.4, directedness(directed), 0.4, 1.0);
        for kind in SelectorKind::ALL {
            let (result, trace, oracle) = run(&inst, kind);
            let evaluated = trace.evaluated_edges();
            let distinct: BTreeSet<usize> = evaluated.iter().copied().collect();
            prop_assert_eq!(oracle.evaluation_count(), evaluated.len());
            prop_assert_eq!(distinct.len(), evaluated.len());
            prop_assert!(evaluated.len() <= inst.graph.num_edges());
            if let Some(path) = &result.path {
                prop_assert!(path.edges().iter().all(|e| distinct.contains(e)), "{}", kind);
            }
            for &e in &evaluated {
                prop_assert!(oracle.is_evaluated(e));
            }
        }
    }

    #[test]
    fn exact_estimates_give_optimal_paths(seed in any::<u64>(), n in 2usize..=9, directed in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = random_instance(&mut rng, n, 0.4, directedness(directed), 0.4, 1.0);
        inst.estimates = inst.true_weights.clone();
        let q = inst.query.unwrap();
        let optimum = shortest_path(&inst.graph, q, &inst.true_weights).unwrap().length;
        for kind in SelectorKind::ALL {
            let (result, _, _) = run(&inst, kind);
            let length = result.path.as_ref().map_or(INF, |p| p.length(&inst.true_weights));
            prop_assert_eq!(length, optimum, "{}", kind);
        }
    }

    #[test]
    fn path_length_never_decreases_when_extended(weights in prop::collection::vec(0.0f64..10.0, 1..20), inf_at in any::<prop::sample::Index>()) {
        let edges: Vec<usize> = (0..weights.len()).collect();
        for cut in 0..edges.len() {
            prop_assert!(path_length(&edges[..cut], &weights) <= path_length(&edges[..=cut], &weights));
        }
        let mut with_inf = weights.clone();
        with_inf[inf_at.index(weights.len())] = INF;
        prop_assert_eq!(path_length(&edges, &with_inf), INF);
    }

    #[test]
    fn oracle_counts_first_requests_only(requests in prop::collection::vec(0usize..6, 0..30)) {
        let truth = vec![1.0, 2.0, INF, 0.5, 3.0, 1.5];
        let mut oracle = WeightOracle::from_weights(truth.clone());
        let mut state = LazyWeightState::new(&[1.0; 6]);
        for &e in &requests {
            prop_assert_eq!(state.evaluate_edge(&mut oracle, e), truth[e]);
            prop_assert_eq!(state.lazy_weight(e), truth[e]);
            prop_assert_eq!(oracle.evaluation_count(), state.num_evaluated());
        }
        let distinct: BTreeSet<usize> = requests.iter().copied().collect();
        prop_assert_eq!(oracle.evaluation_count(), distinct.len());
    }

    #[test]
    fn graph_files_round_trip(seed in any::<u64>(), n in 2usize..=10, directed in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, n, 0.4, directedness(directed), 0.3, 1.5);
        prop_assert_eq!(ProblemInstance::parse(&inst.to_text()).unwrap(), inst);
    }
}

#[test]
fn grid_corners_have_two_shortest_paths() {
    // 0 - 1
    // |   |
    // 2 - 3
    let g = Graph::new(4, Directedness::Undirected, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
    let q = Query { start: 0, goal: 3 };
    let paths = all_shortest_paths(&g, q, &[1.0; 4]).unwrap();
    assert_eq!(paths.len(), 2);
    assert_eq!(brute_force_shortest(&g, q, &[1.0; 4]).len(), 2);
}
