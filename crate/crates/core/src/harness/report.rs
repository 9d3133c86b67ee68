use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use super::config::{Algorithm, Baseline, ExperimentConfig, Problem};
use super::HarnessError;
use crate::engine::{self, trial_seeds, RunTrace, Workers};
use crate::graph::{sample_realization, Realization, StochasticGraph, VertexId};
use crate::matching::{
    bipartite_two_round_protocol, matching_from_partners, matching_polyeps_pipeline, run_polyeps,
    two_round_matching_protocol, PolyEpsConfig, PolyEpsMatching, TwoRoundMatching,
};
use crate::mds::{rank_vertices, run_mds, Ranking};
use crate::oracles::{
    estimate_conditional_f, exact_min_dominating_set, exact_min_vertex_cover, max_matching,
    optimal_fractional_vertex_cover, OracleLimits,
};
use crate::rng::derive_seed;
use crate::stats::PairedEstimate;
use crate::vc::{
    build_edge_association, check_cover, default_ordering, nocomm_vc_protocol, ordering_cover, run_waterfill_vc,
    NoCommVc, VCConstants, WaterfillVc,
};

/// One line of a ratio table. Solution and baseline are measured on the same
/// realizations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub instance: String,
    pub algorithm: String,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub baseline_mean: f64,
    pub baseline_stderr: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
    /// Standard error of the paired difference `solution - baseline`.
    pub difference_stderr: f64,
    /// Largest round count over the trials.
    pub rounds: usize,
    pub max_bits: u32,
    pub wall_ms: f64,
}

pub fn write_rows_csv<W: Write>(rows: &[ResultRow], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// An algorithm with its preprocessing done.
pub enum Prepared {
    NoComm(NoCommVc),
    Ordering(Vec<VertexId>),
    Waterfill(WaterfillVc),
    TwoRound(TwoRoundMatching),
    PolyEps(PolyEpsMatching),
    Mds(Ranking),
    Oracle(Problem),
}

/// Runs the preprocessing of `cfg.algorithm` on instance number `index`.
pub fn prepare(cfg: &ExperimentConfig, sg: &StochasticGraph, index: usize) -> Result<Prepared, HarnessError> {
    Ok(match cfg.algorithm {
        Algorithm::NoCommVc => {
            let f = estimate_conditional_f(sg, cfg.oracle_trials, derive_seed(cfg.seed, "oracle", index as u64));
            Prepared::NoComm(nocomm_vc_protocol(build_edge_association(sg, &f)?))
        }
        Algorithm::OrderingVc => Prepared::Ordering(default_ordering(sg)),
        Algorithm::WaterfillVc => Prepared::Waterfill(WaterfillVc::new(sg, VCConstants::new(cfg.eps_bar)?)),
        Algorithm::TwoRound => Prepared::TwoRound(two_round_matching_protocol(cfg.alpha)?),
        Algorithm::BipartiteTwoRound => Prepared::TwoRound(bipartite_two_round_protocol(sg)?),
        Algorithm::PolyEps => {
            let pc = PolyEpsConfig {
                theta: cfg.theta,
                cap: cfg.cap,
                seed: derive_seed(cfg.seed, "sparsify", index as u64),
                ..PolyEpsConfig::new(cfg.eps)
            };
            Prepared::PolyEps(matching_polyeps_pipeline(sg, &pc)?)
        }
        Algorithm::Mds => Prepared::Mds(rank_vertices(sg)),
        Algorithm::OracleVc | Algorithm::OracleMatching | Algorithm::OracleMds => {
            Prepared::Oracle(cfg.algorithm.problem())
        }
    })
}

/// Solution size and trace of one run. The oracle pseudo-algorithms return
/// `None` and are scored by the baseline.
pub fn solve(
    prep: &Prepared,
    sg: &StochasticGraph,
    real: &Realization,
    seed: u64,
) -> Result<Option<(usize, RunTrace)>, HarnessError> {
    Ok(Some(match prep {
        Prepared::NoComm(p) => {
            let r = engine::run(sg, real, p, seed, 0)?;
            check_cover(sg.graph(), real, &r.outputs)?;
            (r.outputs.iter().filter(|&&b| b).count(), r.trace)
        }
        Prepared::Ordering(order) => {
            let c = ordering_cover(sg, order, real)?;
            (
                c.len(),
                RunTrace {
                    sent_per_vertex: vec![0; sg.n()],
                    ..RunTrace::default()
                },
            )
        }
        Prepared::Waterfill(p) => {
            let r = run_waterfill_vc(sg, real, p, seed)?;
            (r.size(), r.trace)
        }
        Prepared::TwoRound(p) => {
            let r = engine::run(sg, real, p, seed, 2)?;
            (matching_from_partners(sg, real, &r.outputs)?.len(), r.trace)
        }
        Prepared::PolyEps(p) => {
            let r = run_polyeps(sg, real, p, seed)?;
            (r.matching.len(), r.trace)
        }
        Prepared::Mds(rk) => {
            let r = run_mds(sg, real, rk, seed)?;
            (r.set.len(), r.trace)
        }
        Prepared::Oracle(_) => return Ok(None),
    }))
}

/// The baseline value on one realization.
pub fn baseline_value(
    problem: Problem,
    baseline: Baseline,
    sg: &StochasticGraph,
    real: &Realization,
    limits: &OracleLimits,
) -> Result<f64, HarnessError> {
    let (g, _) = real.realized_graph(sg.graph());
    Ok(match (problem, baseline) {
        (Problem::VertexCover, Baseline::Exact) => exact_min_vertex_cover(&g, limits)?.len() as f64,
        (Problem::VertexCover, Baseline::Fractional) => optimal_fractional_vertex_cover(&g).total,
        (Problem::Matching, _) => max_matching(&g).len() as f64,
        (Problem::DominatingSet, _) => exact_min_dominating_set(&g, limits)?.len() as f64,
    })
}

/// Ratio rows for every instance of `cfg`. Trial `t` of instance `i` uses
/// the seeds `trial_seeds(derive(seed, "instance", i), t)` for both the
/// algorithm and the baseline.
pub fn ratio_report(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let limits = OracleLimits::default();
    let workers = cfg.workers.map_or(Workers::Global, Workers::Fixed);
    let mut rows = Vec::new();
    for (index, (instance, sg)) in cfg.source.load()?.into_iter().enumerate() {
        let start = Instant::now();
        let prep = prepare(cfg, &sg, index)?;
        let master = derive_seed(cfg.seed, "instance", index as u64);
        let problem = cfg.algorithm.problem();
        let per_trial = engine::map_trials(cfg.trials, workers, |t| -> Result<_, HarnessError> {
            let (rseed, pseed) = trial_seeds(master, t);
            let real = sample_realization(&sg, rseed);
            let base = baseline_value(problem, cfg.baseline, &sg, &real, &limits)?;
            let (size, trace) = match solve(&prep, &sg, &real, pseed)? {
                Some((s, tr)) => (s as f64, tr),
                None => (base, RunTrace::default()),
            };
            Ok((size, base, trace.rounds, trace.max_payload_bits))
        });
        let per_trial: Vec<_> = per_trial.into_iter().collect::<Result<_, _>>()?;
        let a: Vec<f64> = per_trial.iter().map(|x| x.0).collect();
        let b: Vec<f64> = per_trial.iter().map(|x| x.1).collect();
        let est = PairedEstimate::from_pairs(&a, &b);
        rows.push(ResultRow {
            instance,
            algorithm: cfg.algorithm.name().into(),
            trials: cfg.trials,
            mean: est.numerator.mean,
            stderr: est.numerator.stderr,
            baseline_mean: est.denominator.mean,
            baseline_stderr: est.denominator.stderr,
            ratio: est.ratio,
            ratio_stderr: est.ratio_stderr,
            difference_stderr: est.difference_stderr,
            rounds: per_trial.iter().map(|x| x.2).max().unwrap_or(0),
            max_bits: per_trial.iter().map(|x| x.3).max().unwrap_or(0),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn oracle_against_itself() {
        for algo in ["oracle-vc", "oracle-matching", "oracle-mds"] {
            let rows = ratio_report(&cfg(&format!(
                "generator = er\nn = 12\ndensity = 0.3\nalgorithm = {algo}\nseed = 3\ntrials = 50\n"
            )))
            .unwrap();
            assert_eq!(rows[0].ratio, 1.0);
            assert_eq!(rows[0].difference_stderr, 0.0);
        }
    }

    #[test]
    fn reruns_are_identical_across_workers() {
        let text = "generator = er\nn = 15\ndensity = 0.3\np_min = 0.3\np_max = 0.9\nalgorithm = vc-nocomm\nseed = 11\ntrials = 200\noracle_trials = 200\ninstances = 2\n";
        let mut a = ratio_report(&cfg(&format!("{text}workers = 1\n"))).unwrap();
        let mut b = ratio_report(&cfg(&format!("{text}workers = 3\n"))).unwrap();
        for r in a.iter_mut().chain(b.iter_mut()) {
            r.wall_ms = 0.0;
        }
        assert_eq!(a, b);
        assert!(a[0].ratio >= 1.0 - 1e-12);
    }

    #[test]
    fn every_algorithm_runs() {
        let general = "generator = er\nn = 12\ndensity = 0.3\nseed = 2\ntrials = 20\noracle_trials = 50\n";
        for algo in Algorithm::ALL {
            let text = match algo {
                Algorithm::BipartiteTwoRound => {
                    "generator = bipartite\nleft = 6\nright = 6\ndensity = 0.4\nseed = 2\ntrials = 20\n".to_string()
                }
                Algorithm::PolyEps => format!("{general}theta = 6\n"),
                _ => general.to_string(),
            };
            let rows = ratio_report(&cfg(&format!("{text}algorithm = {algo}\n"))).unwrap();
            let r = &rows[0];
            assert!(r.mean >= 0.0 && r.ratio.is_finite(), "{algo}: {r:?}");
            match algo.problem() {
                Problem::VertexCover | Problem::DominatingSet => assert!(r.ratio >= 1.0 - 1e-12, "{algo}"),
                Problem::Matching => assert!(r.ratio <= 1.0 + 1e-12, "{algo}"),
            }
        }
    }

    #[test]
    fn exact_baseline_refused_when_too_large() {
        let c = cfg("generator = er\nn = 60\ndensity = 0.5\nalgorithm = mds\nseed = 1\ntrials = 2\n");
        assert!(matches!(ratio_report(&c), Err(HarnessError::Refused(_))));
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_rows_csv(
            &ratio_report(&cfg(
                "generator = path\nn = 4\nalgorithm = oracle-matching\nseed = 1\ntrials = 3\n",
            ))
            .unwrap(),
            &mut buf,
        )
        .unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with(
            "instance,algorithm,trials,mean,stderr,baseline_mean,baseline_stderr,ratio,ratio_stderr,difference_stderr,rounds,max_bits,wall_ms\n"
        ));
    }
}
