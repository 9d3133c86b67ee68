//! Exact baselines on a realization and their Monte-Carlo expectations.
//!
//! Run with `cargo run --release --example exact_oracles`.

use stochgraph::graph::{generate, sample_realization, GeneratorKind, ProbModel};
use stochgraph::oracles::{
    estimate_match_marginals, exact_min_dominating_set, exact_min_vertex_cover, max_matching,
    optimal_fractional_vertex_cover, OracleLimits,
};
use stochgraph::MCEstimate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sg = generate(
        GeneratorKind::ErdosRenyi { n: 18, density: 0.25 },
        ProbModel::UniformRange(0.3, 0.9),
        4,
    )?;
    let limits = OracleLimits::default();

    let real = sample_realization(&sg, 1);
    let (g, _) = real.realized_graph(sg.graph());
    let frac = optimal_fractional_vertex_cover(&g);
    println!("one realization with {} edges:", g.m());
    println!("  maximum matching      {}", max_matching(&g).len());
    println!("  fractional cover      {}", frac.total);
    println!("  minimum vertex cover  {}", exact_min_vertex_cover(&g, &limits)?.len());
    println!(
        "  minimum dominating    {}",
        exact_min_dominating_set(&g, &limits)?.len()
    );

    // expectations over G*
    let sizes: Vec<f64> = (0..2000)
        .map(|t| {
            let (g, _) = sample_realization(&sg, t).realized_graph(sg.graph());
            exact_min_vertex_cover(&g, &limits).map(|c| c.len() as f64)
        })
        .collect::<Result<_, _>>()?;
    let est = MCEstimate::from_samples(&sizes);
    println!("E|MVC(G*)| = {:.3} ± {:.3}", est.mean, est.stderr);

    let marg = estimate_match_marginals(&sg, 2000, 9);
    println!("E|M(G*)| = {:.3} ± {:.3}", marg.size.mean, marg.size.stderr);
    let busiest = (0..sg.n())
        .max_by(|&a, &b| marg.vertex[a].total_cmp(&marg.vertex[b]))
        .unwrap();
    println!(
        "vertex {busiest} is matched with probability {:.3}",
        marg.vertex[busiest]
    );
    Ok(())
}
