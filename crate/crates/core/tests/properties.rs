use fpplab::genmodels::{delta_law, ColoredWilson, LabeledTree};
use fpplab::graphcore::{kappa, kappa_oracle, kappa_with_per_vertex, read_edge_list, write_edge_list, RootedGraph};
use fpplab::harness::{run_ensemble, Ensemble, GraphSource, Process};
use fpplab::randsrc::{RngStream, WeightLaw};
use fpplab::spread::{run_delayed, run_spread, Arrival, SpreadTrace};
use fpplab::urn::UrnState;
use proptest::prelude::*;

/// Random connected simple graph: a random recursive tree plus extra edges.
fn connected_graph(max_n: usize, extra: f64) -> impl Strategy<Value = RootedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<u32>(), n - 1),
            proptest::collection::vec(prop::bool::weighted(extra), pairs),
            0..n,
        )
            .prop_map(move |(parents, keep, root)| {
                let mut edges: Vec<(u32, u32)> = parents
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| ((i + 1) as u32, p % (i as u32 + 1)))
                    .collect();
                let mut idx = 0;
                for u in 0..n as u32 {
                    for v in u + 1..n as u32 {
                        let taken = edges.iter().any(|&(a, b)| (a.min(b), a.max(b)) == (u, v));
                        if keep[idx] && !taken {
                            edges.push((u, v));
                        }
                        idx += 1;
                    }
                }
                RootedGraph::new(n, edges, root).unwrap()
            })
    })
}

/// Random tree given as a breadth-first parent array.
fn bfs_tree(max_n: usize) -> impl Strategy<Value = LabeledTree> {
    proptest::collection::vec(0u32..4, 0..max_n).prop_map(|children| {
        // `children[i]` is the offspring count of vertex `i`, truncated to what the
        // remaining budget allows.
        let mut parents = vec![None];
        let mut v = 0;
        while v < parents.len() && v < children.len() {
            for _ in 0..children[v] {
                parents.push(Some(v));
            }
            v += 1;
        }
        LabeledTree::from_parents(&parents).unwrap()
    })
}

fn check_trace(t: &SpreadTrace, g: &RootedGraph) {
    let n = g.n();
    assert_eq!(t.times[0], Arrival::At(0.0));
    assert!(t.times.iter().all(|a| !a.is_never()));
    assert!(t.times.windows(2).all(|w| w[0] <= w[1]));
    let mut seen = vec![false; n];
    for &v in &t.order {
        assert!(!std::mem::replace(&mut seen[v as usize], true));
    }
    assert_eq!(t.order.len(), n);
    assert_eq!(t.order[0] as usize, g.root());
    // Every vertex but the root is infected through an edge to an earlier one.
    let mut rank = vec![0; n];
    for (i, &v) in t.order.iter().enumerate() {
        rank[v as usize] = i;
    }
    for &v in &t.order[1..] {
        let e = t.infector_edge[v as usize].expect("reached vertex has an infector") as usize;
        let u = g.other(e, v as usize);
        assert!(rank[u] < rank[v as usize]);
    }
    for k in 1..=n {
        let inside: Vec<bool> = (0..n).map(|v| rank[v] < k).collect();
        let front = g.edges().iter().filter(|&&(a, b)| inside[a as usize] != inside[b as usize]).count();
        assert_eq!(t.front_sizes[k - 1] as usize, front);
    }
    if let Some(k) = t.first_bottleneck {
        assert!(k >= kappa(g).kappa_at_root && t.front_sizes[k - 1] <= 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn kappa_matches_oracle(g in connected_graph(9, 0.25)) {
        prop_assert_eq!(kappa(&g).kappa_at_root, kappa_oracle(&g).unwrap());
    }

    #[test]
    fn per_vertex_kappa_matches_rerooting(g in connected_graph(12, 0.15)) {
        let per = kappa_with_per_vertex(&g).kappa_per_vertex.unwrap();
        for (v, &k) in per.iter().enumerate() {
            prop_assert_eq!(k, kappa(&g.with_root(v).unwrap()).kappa_at_root);
        }
    }

    #[test]
    fn bridge_sides_partition(g in connected_graph(12, 0.1)) {
        let p = kappa(&g);
        for b in &p.bridges {
            prop_assert_eq!(b.root_side + b.far_side, g.n());
            prop_assert!(b.root_side >= p.kappa_at_root);
        }
        prop_assert_eq!(p.bridges.is_empty(), p.kappa_at_root == g.n());
    }

    #[test]
    fn edge_list_round_trip(g in connected_graph(12, 0.3)) {
        prop_assert_eq!(read_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn spread_traces_are_consistent(g in connected_graph(10, 0.2), seed in any::<u64>(), alpha in 0.55f64..0.95) {
        let law = WeightLaw::power(alpha, 1.0).unwrap();
        check_trace(&run_spread(&g, law, &mut RngStream::new(seed, 0)), &g);
        check_trace(&run_delayed(&g, law, &mut RngStream::new(seed, 1)), &g);
    }

    #[test]
    fn ensemble_means_are_monotone(g in connected_graph(10, 0.2), seed in any::<u64>()) {
        let spec = Ensemble {
            source: GraphSource::Given(g),
            law: WeightLaw::shifted(0.8).unwrap(),
            runs: 40,
            batches: 10,
            master_seed: seed,
            process: Process::Spread,
        };
        let stats = run_ensemble(&spec).unwrap();
        prop_assert!(stats.means().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(stats.rows.iter().all(|r| r.never == 0 && r.n_runs == 40));
    }

    #[test]
    fn tree_kappa_agrees_with_graph_kappa(t in bfs_tree(60)) {
        let g = t.to_rooted_graph().unwrap();
        prop_assert_eq!(t.kappa_at_root(), kappa(&g).kappa_at_root);
    }

    #[test]
    fn wilson_output_is_a_unicyclic_spanning_graph(n in 3usize..80, seed in any::<u64>()) {
        let r = ColoredWilson::new(n).unwrap().sample(&mut RngStream::new(seed, 0));
        let g = r.graph().unwrap();
        prop_assert_eq!(g.m(), if r.parallel_extra_edge { n - 1 } else { n });
        prop_assert_eq!(r.red_count + r.blue_count, n);
        prop_assert_eq!(1 + r.increment_sizes.iter().map(|&d| d as usize).sum::<usize>(), n);
        if !r.parallel_extra_edge {
            prop_assert_eq!(r.kappa_at_root(), kappa(&g).kappa_at_root);
        }
    }

    #[test]
    fn urn_conserves_balls(red in 1u64..50, blue in 1u64..50, incs in proptest::collection::vec(1u64..20, 1..60), seed in any::<u64>()) {
        let mut s = UrnState::new(red, blue).unwrap();
        let mut rng = RngStream::new(seed, 0);
        for &d in &incs {
            s.step(d, &mut rng).unwrap();
        }
        prop_assert_eq!(s.total(), red + blue + incs.iter().sum::<u64>());
        prop_assert!(s.red() >= red && s.blue() >= blue);
        prop_assert!(s.ratio() > 0.0 && s.ratio() < 1.0);
    }

    #[test]
    fn delta_law_sums_to_one(n in 3usize..400, c_frac in 0.0f64..1.0) {
        let c = 1 + ((n - 2) as f64 * c_frac) as usize;
        let total: f64 = (1..=n - c).map(|k| delta_law(n, c, k).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_and_inverse_agree(alpha in 0.51f64..0.99, u in 1e-9f64..1.0, shifted in any::<bool>()) {
        let law = if shifted { WeightLaw::shifted(alpha).unwrap() } else { WeightLaw::power(alpha, 1.0).unwrap() };
        let t = law.inverse_tail(u);
        prop_assert!(t >= 0.0);
        prop_assert!((law.tail(t) - u).abs() <= 1e-9 * u);
    }

    #[test]
    fn residuals_are_finite_and_nonnegative(alpha in 0.51f64..0.99, age in 0.0f64..1e4, seed in any::<u64>()) {
        let law = WeightLaw::power(alpha, 1.0).unwrap();
        let mut rng = RngStream::new(seed, 0);
        for _ in 0..20 {
            let r = law.sample_residual(age, &mut rng).unwrap();
            prop_assert!(r >= 0.0 && r.is_finite());
        }
    }
}
