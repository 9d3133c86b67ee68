//! The cover induced by a vertex ordering.
//!
//! A vertex joins when it has a realized neighbor later in the order, so
//! `Pr(v ∈ C)` has a closed form. The sequential random matching along the
//! same order is the quantity used to bound that cover.
//!
//! Run with `cargo run --release --example ordering_cover`.

use stochgraph::graph::{generate, sample_realization, GeneratorKind, ProbModel};
use stochgraph::vc::{default_ordering, ordering_cover, ordering_cover_probabilities, sequential_random_matching};
use stochgraph::MCEstimate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sg = generate(
        GeneratorKind::ErdosRenyi { n: 25, density: 0.2 },
        ProbModel::UniformRange(0.1, 0.9),
        3,
    )?;
    let order = default_ordering(&sg);
    let r = ordering_cover_probabilities(&sg, &order)?;
    println!("first five in order: {:?}", &order[..5]);
    println!(
        "their R_v: {:?}",
        r[..5].iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>()
    );

    let mut cover = Vec::new();
    let mut matched = Vec::new();
    for t in 0..10_000 {
        let real = sample_realization(&sg, t);
        cover.push(ordering_cover(&sg, &order, &real)?.len() as f64);
        matched.push(sequential_random_matching(&sg, &order, &real, t)?.edges.len() as f64);
    }
    let c = MCEstimate::from_samples(&cover);
    let m = MCEstimate::from_samples(&matched);
    println!(
        "E|C| = {:.3} ± {:.3}, sum R_v = {:.3}",
        c.mean,
        c.stderr,
        r.iter().sum::<f64>()
    );
    println!("3·E|M_seq| = {:.3}", 3.0 * m.mean);
    Ok(())
}
