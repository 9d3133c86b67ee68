//! Dominating set in one round.
//!
//! Vertices are ranked by expected newly covered vertices. After realization
//! each vertex selects the best-ranked vertex it can see, itself included.
//!
//! Run with `cargo run --release --example dominating_set`.

use stochgraph::graph::{generate, sample_realization, GeneratorKind, ProbModel};
use stochgraph::mds::{classify_bad_costly, rank_vertices, run_mds, DiagnosticLogs};
use stochgraph::oracles::{exact_min_dominating_set, OracleLimits};
use stochgraph::stats::PairedEstimate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sg = generate(
        GeneratorKind::ErdosRenyi { n: 16, density: 0.3 },
        ProbModel::UniformRange(0.3, 0.9),
        5,
    )?;
    let rk = rank_vertices(&sg);
    println!("top ranks: {:?}", &rk.order[..4]);
    println!(
        "expected gains: {:?}",
        rk.gain[..4].iter().map(|w| format!("{w:.2}")).collect::<Vec<_>>()
    );

    let limits = OracleLimits::default();
    let (mut alg, mut opt) = (Vec::new(), Vec::new());
    for t in 0..3000 {
        let real = sample_realization(&sg, t);
        alg.push(run_mds(&sg, &real, &rk, t)?.set.len() as f64);
        let (g, _) = real.realized_graph(sg.graph());
        opt.push(exact_min_dominating_set(&g, &limits)?.len() as f64);
    }
    let est = PairedEstimate::from_pairs(&alg, &opt);
    let dbar = sg.max_expected_degree();
    println!(
        "E|S| / E|S*| = {:.3} ± {:.3}; ln(dbar + 2) = {:.3}",
        est.ratio,
        est.ratio_stderr,
        (dbar + 2.0).ln()
    );

    let diag = classify_bad_costly(&sg, &rk, &sample_realization(&sg, 0), DiagnosticLogs::default());
    println!(
        "bad {}, costly {}; per-rank table:",
        diag.bad_count(),
        diag.costly_count()
    );
    diag.write_csv(&rk, std::io::stdout())?;
    Ok(())
}
