//! Matching in two rounds.
//!
//! Active vertices hallucinate the edges they cannot see, compute a maximum
//! matching of that private graph and propose along it to passive
//! neighbors; passive vertices accept one proposal.
//!
//! Run with `cargo run --release --example two_round_matching`.

use stochgraph::engine::{self, Workers};
use stochgraph::graph::{generate, GeneratorKind, ProbModel};
use stochgraph::matching::{
    bipartite_two_round_protocol, matching_from_partners, optimal_alpha, ratio_fn, two_round_matching_protocol,
    TwoRoundMatching,
};
use stochgraph::oracles::max_matching;
use stochgraph::stats::PairedEstimate;
use stochgraph::StochasticGraph;

fn ratio(sg: &StochasticGraph, proto: &TwoRoundMatching) -> Result<PairedEstimate, Box<dyn std::error::Error>> {
    let pairs = engine::run_trials(sg, proto, 3000, 1, 2, Workers::Global, |t| {
        let m = matching_from_partners(sg, &t.realization, &t.outputs).expect("valid matching");
        let (g, _) = t.realization.realized_graph(sg.graph());
        (m.len() as f64, max_matching(&g).len() as f64)
    })?;
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(PairedEstimate::from_pairs(&a, &b))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha = optimal_alpha();
    println!("alpha = {alpha:.6}, guarantee {:.6}", ratio_fn(alpha));

    let sg = generate(
        GeneratorKind::ErdosRenyi { n: 30, density: 0.12 },
        ProbModel::UniformRange(0.2, 0.9),
        8,
    )?;
    let est = ratio(&sg, &two_round_matching_protocol(alpha)?)?;
    println!("general: E|M| / E|M(G*)| = {:.4} ± {:.4}", est.ratio, est.ratio_stderr);

    let bip = generate(
        GeneratorKind::RandomBipartite {
            left: 15,
            right: 15,
            density: 0.2,
        },
        ProbModel::UniformRange(0.2, 0.9),
        8,
    )?;
    let est = ratio(&bip, &bipartite_two_round_protocol(&bip)?)?;
    println!(
        "bipartite: E|M| / E|M(G*)| = {:.4} ± {:.4} (1 - 1/e = 0.6321)",
        est.ratio, est.ratio_stderr
    );
    Ok(())
}
