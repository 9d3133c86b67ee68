//! The `(2 + ε)` vertex cover with single-bit messages.
//!
//! Preprocessing water-fills a fractional matching proportional to `p_e`;
//! after realization the vertices finish a discretized water-filling over
//! the leftover edges, one bit per edge per round.
//!
//! Run with `cargo run --release --example waterfill_cover`.

use stochgraph::graph::{generate, sample_realization, GeneratorKind, ProbModel};
use stochgraph::oracles::{exact_min_vertex_cover, OracleLimits};
use stochgraph::stats::PairedEstimate;
use stochgraph::vc::{run_waterfill_vc, VCConstants, WaterfillVc};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sg = generate(
        GeneratorKind::ErdosRenyi { n: 20, density: 0.25 },
        ProbModel::UniformRange(0.2, 1.0),
        6,
    )?;
    let consts = VCConstants::new(0.25)?;
    println!(
        "eps1 = {}, xi = {:.1}, round bound {}, final slack {:.3}",
        consts.eps1,
        consts.xi,
        consts.round_bound(),
        consts.eps_final
    );
    let proto = WaterfillVc::new(&sg, consts);
    println!("frozen in preprocessing: {:?}", proto.state().f_set());

    let limits = OracleLimits::default();
    let (mut alg, mut opt, mut rounds) = (Vec::new(), Vec::new(), 0);
    for t in 0..2000 {
        let real = sample_realization(&sg, t);
        let run = run_waterfill_vc(&sg, &real, &proto, t)?;
        rounds = rounds.max(run.trace.rounds);
        assert!(run.witness_total() <= run.size() as f64 + 1e-9);
        alg.push(run.size() as f64);
        let (g, _) = real.realized_graph(sg.graph());
        opt.push(exact_min_vertex_cover(&g, &limits)?.len() as f64);
    }
    let est = PairedEstimate::from_pairs(&alg, &opt);
    println!(
        "E|C| / E|MVC| = {:.4} ± {:.4}, at most {rounds} rounds",
        est.ratio, est.ratio_stderr
    );
    Ok(())
}
