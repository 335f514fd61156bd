mod common;

use common::*;
use lowtw_core::energy::{decide_energy, energy_values};
use lowtw_core::energy_tw::{energy_values_tw, scan_walk, triple_plus};
use lowtw_core::graph::{parse_graph, tarjan_scc, Format};
use lowtw_core::mincycle::min_cycle;
use lowtw_core::oracles::{bellman_ford, energy_fixpoint, karp_mean, per_node_min, reachability};
use lowtw_core::ratio::{compare_ratio, mean_values_all_nodes, ratio_value, ratio_values_all_nodes};
use lowtw_core::treedec::{build_decomposition, validate, Heuristic, TreeDecomposition};
use lowtw_core::{NodeId, Rational, WeightedDigraph};
use proptest::prelude::*;

type EdgeTuple = (usize, usize, i64, i64);

fn graph_strategy(max_n: usize, max_m: usize, w: i64) -> impl Strategy<Value = WeightedDigraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n, -w..=w, 1i64..=4), 0..=max_m)
            .prop_map(move |es: Vec<EdgeTuple>| WeightedDigraph::from_edges(n, &es))
    })
}

fn edge_tuples(g: &WeightedDigraph) -> Vec<EdgeTuple> {
    g.edges().iter().map(|e| (e.source.index(), e.target.index(), e.weight, e.transit)).collect()
}

fn decomposition(g: &WeightedDigraph) -> TreeDecomposition {
    build_decomposition(g, Heuristic::MinDegree)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_formats_round_trip(g in graph_strategy(9, 20, 50)) {
        let d = parse_graph(&g.to_dimacs(), Format::Dimacs).unwrap();
        prop_assert_eq!(d.node_count(), g.node_count());
        prop_assert_eq!(edge_tuples(&d), edge_tuples(&g));
        let dot = parse_graph(&g.to_dot(), Format::Dot).unwrap();
        prop_assert_eq!(dot.node_count(), g.node_count());
        prop_assert_eq!(edge_tuples(&dot), edge_tuples(&g));
        let el = parse_graph(&g.to_edgelist(), Format::EdgeList).unwrap();
        prop_assert_eq!(edge_tuples(&el), edge_tuples(&g));
        prop_assert_eq!(Format::sniff(&g.to_dimacs()), Format::Dimacs);
    }

    #[test]
    fn components_are_mutual_reachability(g in graph_strategy(10, 25, 5)) {
        let scc = tarjan_scc(&g);
        let reach = reachability(&g);
        let n = g.node_count();
        for u in 0..n {
            for v in 0..n {
                let same = scc.component_of[u] == scc.component_of[v];
                let mutual = u == v || (reach[u][v] && reach[v][u]);
                prop_assert_eq!(same, mutual, "nodes {} {}", u, v);
            }
        }
        for &(a, b) in &scc.condensation {
            prop_assert!(a > b, "condensation edge {} -> {} is not sink-first", a, b);
        }
    }

    #[test]
    fn decompositions_are_valid_and_separate(g in graph_strategy(12, 30, 5), fill in any::<bool>()) {
        let h = if fill { Heuristic::MinFill } else { Heuristic::MinDegree };
        let t = build_decomposition(&g, h);
        prop_assert!(validate(&t, &g).is_ok(), "{:?}", validate(&t, &g));
        prop_assert!(separators_hold(&t, &g));
        let text = t.to_text(g.labels());
        let back = TreeDecomposition::from_text(&text, g.labels()).unwrap();
        prop_assert_eq!(back.to_text(g.labels()), text);
    }

    #[test]
    fn min_cycle_matches_enumeration(g in graph_strategy(8, 20, 10)) {
        let t = decomposition(&g);
        let mc = min_cycle(&g, &t).unwrap();
        let exact = min_weight(&cycles(&g));
        prop_assert!(mc.peak_tables <= mc.height + 1);
        match (mc.value, exact) {
            (None, None) => {}
            (Some(c), Some(s)) if s >= 0 => prop_assert_eq!(c, s),
            (Some(c), Some(s)) => prop_assert!(c <= s && c.abs() <= s.abs() * g.edge_count() as i128 * (1i128 << mc.height)),
            other => prop_assert!(false, "mismatch {:?}", other),
        }
    }

    #[test]
    fn ratio_matches_enumeration(g in graph_strategy(8, 20, 20)) {
        let cs = cycles(&g);
        let (ratios, _) = ratio_values_all_nodes(&g, Heuristic::MinDegree).unwrap();
        prop_assert_eq!(ratios, per_node_min(&g, &cs, |c| c.ratio()));
        let (means, _) = mean_values_all_nodes(&g, Heuristic::MinDegree).unwrap();
        prop_assert_eq!(means, per_node_min(&g, &cs, |c| c.mean()));
    }

    #[test]
    fn karp_matches_enumeration(g in graph_strategy(8, 20, 20)) {
        prop_assert_eq!(karp_mean(&g).ok(), min_mean(&cycles(&g)));
    }

    #[test]
    fn threshold_comparison_is_monotone(g in graph_strategy(7, 16, 10), p in -30i64..30, q in 1i64..6) {
        let t = decomposition(&g);
        let Ok((exact, _)) = ratio_value(&g, &t) else { return Ok(()) };
        let threshold = Rational::new(p.into(), q.into());
        prop_assert_eq!(compare_ratio(&g, &t, &threshold).unwrap(), exact.cmp(&threshold));
    }

    #[test]
    fn energy_decision_is_monotone(g in graph_strategy(7, 16, 8), u in 0usize..7) {
        let u = NodeId::new(u % g.node_count());
        let cap = g.node_count() as i128 * g.max_abs_weight() as i128 + 2;
        let answers: Vec<bool> = (0..=cap).map(|c| decide_energy(&g, u, c).unwrap()).collect();
        prop_assert!(answers.windows(2).all(|w| w[0] <= w[1]), "{:?}", answers);
        let first_yes = answers.iter().position(|&a| a).map(|c| c as i128);
        prop_assert_eq!(first_yes, energy_fixpoint(&g)[u.index()]);
    }

    #[test]
    fn energy_algorithms_agree(g in graph_strategy(10, 25, 10)) {
        let fix = energy_fixpoint(&g);
        prop_assert_eq!(&energy_values(&g).unwrap().0, &fix);
        prop_assert_eq!(&energy_values_tw(&g, Heuristic::MinDegree).unwrap().0, &fix);
        prop_assert_eq!(&energy_values_tw(&g, Heuristic::MinFill).unwrap().0, &fix);
    }

    #[test]
    fn bellman_ford_matches_floyd_warshall(g in graph_strategy(8, 20, 10)) {
        let n = g.node_count();
        let inf = i128::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (u, row) in d.iter_mut().enumerate() {
            row[u] = 0;
        }
        for e in g.edges() {
            let cell = &mut d[e.source.index()][e.target.index()];
            *cell = (*cell).min(e.weight as i128);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] < inf && d[k][j] < inf && d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        let negative = (0..n).any(|u| d[u][u] < 0);
        let sp = bellman_ford(&g, None, |e| e.weight as i128).unwrap();
        prop_assert_eq!(sp.negative_cycle.is_some(), negative);
        if let Some(cyc) = &sp.negative_cycle {
            let total: i128 = cyc.iter().map(|&e| g.edge(e).weight as i128).sum();
            prop_assert!(total < 0);
            for w in cyc.windows(2) {
                prop_assert_eq!(g.edge(w[0]).target, g.edge(w[1]).source);
            }
            prop_assert_eq!(g.edge(*cyc.last().unwrap()).target, g.edge(cyc[0]).source);
        } else {
            for s in 0..n {
                let sp = bellman_ford(&g, Some(NodeId::new(s)), |e| e.weight as i128).unwrap();
                for v in 0..n {
                    let want = (d[s][v] < inf).then_some(d[s][v]);
                    prop_assert_eq!(sp.dist[v], want);
                }
            }
        }
    }

    #[test]
    fn walk_summaries_compose(
        walk in prop::collection::vec((0u32..10, -9i64..=9), 1..15),
        first in 0u32..10,
        cut in any::<prop::sample::Index>(),
    ) {
        let mut nodes = vec![NodeId(first)];
        nodes.extend(walk.iter().map(|&(v, _)| NodeId(v)));
        let weights: Vec<i64> = walk.iter().map(|&(_, w)| w).collect();
        let cut = cut.index(weights.len() + 1);
        let whole = scan_walk(&nodes, &weights);
        let left = scan_walk(&nodes[..=cut], &weights[..cut]);
        let right = scan_walk(&nodes[cut..], &weights[cut..]);
        prop_assert_eq!(triple_plus(Some(left), Some(right)).unwrap(), Some(whole));
    }
}

#[test]
fn strong_ktrees_are_strongly_connected() {
    for seed in 0..20 {
        let (g, _) = strong_ktree(seed, 10, (-5, 5), (1, 3));
        assert_eq!(tarjan_scc(&g).len(), 1);
    }
}
