//! Sparsify, prune, then match locally.
//!
//! Preprocessing keeps a random subgraph `Q` of bounded degree. After
//! realization vertices with `Q*`-degree at least `θ` drop out, and the rest
//! run propose/grant phases followed by short augmenting-path rounds. The
//! round count depends on `ε` and `θ` only.
//!
//! Run with `cargo run --release --example polyeps_matching`.

use stochgraph::graph::{generate, sample_realization, GeneratorKind, ProbModel};
use stochgraph::matching::{matching_polyeps_pipeline, run_polyeps, PolyEpsConfig};
use stochgraph::oracles::max_matching;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PolyEpsConfig {
        theta: Some(12.0),
        ..PolyEpsConfig::new(0.3)
    };
    for n in [100, 400] {
        let sg = generate(
            GeneratorKind::ErdosRenyi {
                n,
                density: 10.0 / n as f64,
            },
            ProbModel::Uniform(0.6),
            n as u64,
        )?;
        let proto = matching_polyeps_pipeline(&sg, &cfg)?;
        let kept = proto.q().iter().filter(|&&b| b).count();
        println!("n = {n}: cap {:?}, Q keeps {kept} of {} edges", proto.cap(), sg.m());
        let s = proto.schedule();
        println!(
            "  schedule: {} phases, paths up to length {}, {} rounds",
            s.phases,
            2 * s.k + 1,
            s.total_rounds()
        );

        let real = sample_realization(&sg, 1);
        let run = run_polyeps(&sg, &real, &proto, 1)?;
        let (g, _) = real.realized_graph(sg.graph());
        println!(
            "  |M| = {}, |M(G*)| = {}, |V_bad| = {}, rounds {}",
            run.matching.len(),
            max_matching(&g).len(),
            run.pruned.bad_count(),
            run.trace.rounds
        );
    }
    Ok(())
}
