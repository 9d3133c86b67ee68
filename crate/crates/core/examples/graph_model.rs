//! Base graphs, realization probabilities and sampled realizations.
//!
//! Run with `cargo run --example graph_model`.

use stochgraph::graph::{from_text, generate, sample_realization, to_text, GeneratorKind, ProbModel};
use stochgraph::StochasticGraph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a triangle with a pendant vertex, written out by hand
    let sg = StochasticGraph::from_edges(4, [(0, 1, 0.9), (1, 2, 0.5), (0, 2, 0.5), (2, 3, 0.2)])?;
    println!("expected degrees: {:?}", sg.expected_degrees());
    println!("max expected degree: {}", sg.max_expected_degree());

    // realizations are reproducible from a seed
    for seed in 0..3 {
        let r = sample_realization(&sg, seed);
        let edges: Vec<_> = r.realized_edges().map(|e| sg.graph().endpoints(e)).collect();
        println!("seed {seed}: realized {edges:?}");
    }

    // generators and the text format round-trip
    let er = generate(
        GeneratorKind::ErdosRenyi { n: 8, density: 0.4 },
        ProbModel::UniformRange(0.2, 0.8),
        7,
    )?;
    let text = to_text(&er);
    print!("{text}");
    assert_eq!(from_text(&text)?, er);

    let bip = generate(
        GeneratorKind::RandomBipartite {
            left: 3,
            right: 4,
            density: 0.6,
        },
        ProbModel::Uniform(0.5),
        1,
    )?;
    let left: Vec<_> = bip
        .bipartition()
        .expect("bipartite generator records sides")
        .left()
        .collect();
    println!("bipartite: m = {}, left side {left:?}", bip.m());
    Ok(())
}
