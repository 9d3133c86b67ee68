use proptest::prelude::*;

use stochgraph::graph::{from_text, sample_realization, to_text};
use stochgraph::matching::{
    matching_from_partners, matching_polyeps_pipeline, run_polyeps, two_round_matching_protocol, PolyEpsConfig,
};
use stochgraph::mds::{check_domination, classify_bad_costly, rank_vertices, run_mds, DiagnosticLogs};
use stochgraph::oracles::brute::{
    max_matching_size, min_dominating_set_size, min_half_integral_cover_doubled, min_vertex_cover_size,
};
use stochgraph::oracles::{
    estimate_conditional_f, exact_min_dominating_set, exact_min_vertex_cover, is_matching, is_vertex_cover,
    max_matching, optimal_fractional_vertex_cover, OracleLimits,
};
use stochgraph::vc::{
    build_edge_association, check_cover, default_ordering, nocomm_vc_protocol, ordering_cover, run_waterfill_vc,
    VCConstants, WaterfillVc,
};
use stochgraph::{Simulator, StochasticGraph};

fn graph_with(n: usize, probs: impl Strategy<Value = f64> + Clone) -> impl Strategy<Value = StochasticGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    proptest::collection::vec(proptest::option::weighted(0.35, probs), pairs.len()).prop_map(move |slots| {
        let edges = pairs.iter().zip(slots).filter_map(|(&(u, v), p)| p.map(|p| (u, v, p)));
        StochasticGraph::from_edges(n, edges).unwrap()
    })
}

fn stochastic_graph() -> impl Strategy<Value = StochasticGraph> {
    (1usize..11).prop_flat_map(|n| graph_with(n, 0.05f64..=1.0))
}

fn uniform_graph() -> impl Strategy<Value = StochasticGraph> {
    (2usize..14, 0.2f64..=1.0).prop_flat_map(|(n, p)| graph_with(n, Just(p)))
}

fn mask(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(sg in stochastic_graph()) {
        prop_assert_eq!(from_text(&to_text(&sg)).unwrap(), sg);
    }

    #[test]
    fn realizations_are_seeded(sg in stochastic_graph(), seed in any::<u64>()) {
        let a = sample_realization(&sg, seed);
        let b = sample_realization(&sg, seed);
        prop_assert_eq!(a.bits(), b.bits());
        for e in a.realized_edges() {
            prop_assert!(sg.p(e) > 0.0);
        }
        let (g, ids) = a.realized_graph(sg.graph());
        prop_assert_eq!(g.m(), a.count());
        prop_assert_eq!(ids.len(), a.count());
    }

    #[test]
    fn oracles_agree_with_brute_force(sg in stochastic_graph(), seed in any::<u64>()) {
        let (g, _) = sample_realization(&sg, seed).realized_graph(sg.graph());
        let limits = OracleLimits::default();
        let vc = exact_min_vertex_cover(&g, &limits).unwrap();
        let ds = exact_min_dominating_set(&g, &limits).unwrap();
        let mm = max_matching(&g);
        let frac = optimal_fractional_vertex_cover(&g);
        prop_assert!(is_vertex_cover(&g, &mask(g.n(), &vc)));
        prop_assert!(is_matching(&g, &mm.edges));
        prop_assert!(frac.is_feasible(&g));
        prop_assert_eq!(vc.len(), min_vertex_cover_size(&g));
        prop_assert_eq!(ds.len(), min_dominating_set_size(&g));
        prop_assert_eq!(mm.len(), max_matching_size(&g));
        prop_assert!((2.0 * frac.total - min_half_integral_cover_doubled(&g) as f64).abs() < 1e-6);
        // matching <= fractional cover <= cover <= 2 * matching
        prop_assert!(mm.len() as f64 <= frac.total + 1e-6);
        prop_assert!(frac.total <= vc.len() as f64 + 1e-6);
        prop_assert!(vc.len() <= 2 * mm.len());
    }

    #[test]
    fn covers_cover_every_realized_edge(sg in stochastic_graph(), seed in any::<u64>()) {
        let real = sample_realization(&sg, seed);
        let g = sg.graph();

        let order = default_ordering(&sg);
        check_cover(g, &real, &mask(sg.n(), &ordering_cover(&sg, &order, &real).unwrap())).unwrap();

        let assoc = build_edge_association(&sg, &estimate_conditional_f(&sg, 50, seed)).unwrap();
        let res = Simulator::new(&sg, &nocomm_vc_protocol(assoc)).run(&real, seed, 0).unwrap();
        check_cover(g, &real, &res.outputs).unwrap();

        let proto = WaterfillVc::new(&sg, VCConstants::new(0.25).unwrap());
        let run = run_waterfill_vc(&sg, &real, &proto, seed).unwrap();
        check_cover(g, &real, &run.cover).unwrap();
        prop_assert!(run.trace.max_payload_bits <= 1);
    }

    #[test]
    fn two_round_output_is_a_matching(sg in stochastic_graph(), seed in any::<u64>()) {
        let real = sample_realization(&sg, seed);
        let proto = two_round_matching_protocol(0.442854).unwrap();
        let res = Simulator::new(&sg, &proto).run(&real, seed, 2).unwrap();
        let m = matching_from_partners(&sg, &real, &res.outputs).unwrap();
        let (g, ids) = real.realized_graph(sg.graph());
        prop_assert!(m.len() <= max_matching(&g).len());
        prop_assert!(m.iter().all(|e| ids.contains(e)));
    }

    #[test]
    fn polyeps_output_is_a_matching(sg in uniform_graph(), seed in any::<u64>()) {
        let cfg = PolyEpsConfig { theta: Some(6.0), seed, ..PolyEpsConfig::new(0.4) };
        let proto = matching_polyeps_pipeline(&sg, &cfg).unwrap();
        let real = sample_realization(&sg, seed);
        let run = run_polyeps(&sg, &real, &proto, seed).unwrap();
        prop_assert!(is_matching(sg.graph(), &run.matching));
        prop_assert!(run.matching.iter().all(|&e| real.is_present(e) && proto.q()[e]));
        prop_assert_eq!(run.trace.rounds, proto.schedule().total_rounds());
    }

    #[test]
    fn dominating_set_dominates(sg in stochastic_graph(), seed in any::<u64>()) {
        let real = sample_realization(&sg, seed);
        let rk = rank_vertices(&sg);
        let run = run_mds(&sg, &real, &rk, seed).unwrap();
        check_domination(&sg, &real, &mask(sg.n(), &run.set)).unwrap();
        let diag = classify_bad_costly(&sg, &rk, &real, DiagnosticLogs::default());
        prop_assert_eq!(diag.realized.iter().sum::<usize>(), sg.n());
        let mut order = rk.order.clone();
        order.sort_unstable();
        prop_assert_eq!(order, (0..sg.n()).collect::<Vec<_>>());
    }
}
