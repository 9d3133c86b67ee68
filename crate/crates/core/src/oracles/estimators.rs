use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::matching::max_matching;
use super::vertex_cover::optimal_fractional_vertex_cover;
use super::OracleError;
use crate::engine::trial_seeds;
use crate::graph::{sample_realization, sample_with, EdgeId, StochasticGraph, VertexId};
use crate::rng;
use crate::stats::MCEstimate;

/// Paired estimates of `f_vu = E[F_v | vu realized]` for both orientations of
/// every edge, where `F` is the optimal fractional cover of the realization.
///
/// For edge `e = (u, v)` with `u < v`, slot 0 holds sums of `F_u` and slot 1
/// sums of `F_v`. Both orientations are summed over the same trials, and every
/// sample is a multiple of 1/2, so the sums are exact.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalF {
    pub trials: usize,
    sum: Vec<[f64; 2]>,
    sum_sq: Vec<[f64; 2]>,
}

impl ConditionalF {
    pub fn m(&self) -> usize {
        self.sum.len()
    }

    fn slot(sg: &StochasticGraph, e: EdgeId, v: VertexId) -> usize {
        let (a, b) = sg.graph().endpoints(e);
        assert!(v == a || v == b, "vertex {v} not on edge {e}");
        usize::from(v == b)
    }

    /// `f̂` for vertex `v` conditioned on its incident edge `e`.
    pub fn f(&self, sg: &StochasticGraph, v: VertexId, e: EdgeId) -> f64 {
        self.sum[e][Self::slot(sg, e, v)] / self.trials as f64
    }

    pub fn estimate(&self, sg: &StochasticGraph, v: VertexId, e: EdgeId) -> MCEstimate {
        let s = Self::slot(sg, e, v);
        let t = self.trials as f64;
        let mean = self.sum[e][s] / t;
        let var = if self.trials > 1 {
            ((self.sum_sq[e][s] - t * mean * mean) / (t - 1.0)).max(0.0)
        } else {
            0.0
        };
        MCEstimate {
            mean,
            stderr: (var / t).sqrt(),
            trials: self.trials,
        }
    }

    /// Exact sums `(Σ F_u, Σ F_v)` over the trials for edge `(u, v)`.
    pub fn sums(&self, e: EdgeId) -> [f64; 2] {
        self.sum[e]
    }

    /// `f̂_vu + f̂_uv >= 1`, checked on the exact trial sums.
    pub fn pair_feasible(&self, e: EdgeId) -> bool {
        self.sum[e][0] + self.sum[e][1] >= self.trials as f64
    }

    /// One row per directed edge: `vertex,neighbor,edge,mean,stderr`.
    pub fn write_csv<W: Write>(&self, sg: &StochasticGraph, w: W) -> csv::Result<()> {
        #[derive(Serialize)]
        struct Row {
            vertex: VertexId,
            neighbor: VertexId,
            edge: EdgeId,
            mean: f64,
            stderr: f64,
        }
        let mut wr = csv::Writer::from_writer(w);
        for (e, &(u, v)) in sg.graph().edges().iter().enumerate() {
            for (a, b) in [(u, v), (v, u)] {
                let est = self.estimate(sg, a, e);
                wr.serialize(Row {
                    vertex: a,
                    neighbor: b,
                    edge: e,
                    mean: est.mean,
                    stderr: est.stderr,
                })?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// Estimates `f_vu` and `f_uv` for every edge from `trials` realizations with
/// that edge forced present. Edge `e` draws from stream `(master, "cond-f", e)`.
pub fn estimate_conditional_f(sg: &StochasticGraph, trials: usize, master_seed: u64) -> ConditionalF {
    assert!(trials >= 1, "at least one trial is required");
    let g = sg.graph();
    let per_edge: Vec<([f64; 2], [f64; 2])> = (0..g.m())
        .into_par_iter()
        .map(|e| {
            let (u, v) = g.endpoints(e);
            let mut rng = rng::stream(master_seed, "cond-f", e as u64);
            let mut s = [0.0; 2];
            let mut sq = [0.0; 2];
            for _ in 0..trials {
                let real = sample_with(sg, &mut rng, Some(e));
                let (h, _) = real.realized_graph(g);
                let fc = optimal_fractional_vertex_cover(&h);
                for (k, x) in [fc.value[u], fc.value[v]].into_iter().enumerate() {
                    s[k] += x;
                    sq[k] += x * x;
                }
            }
            (s, sq)
        })
        .collect();
    let (sum, sum_sq) = per_edge.into_iter().unzip();
    ConditionalF { trials, sum, sum_sq }
}

/// Per-edge and per-vertex probabilities of being matched by the maximum
/// matching oracle on `G*`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchMarginals {
    /// `Pr(e ∈ M(G*))` per edge.
    pub edge: Vec<f64>,
    /// `c_v`, the sum of the marginals of the edges at `v`.
    pub vertex: Vec<f64>,
    /// `|M(G*)|` over the sample set.
    pub size: MCEstimate,
}

impl MatchMarginals {
    /// One row per vertex (`kind = vertex`) then per edge (`kind = edge`).
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        #[derive(Serialize)]
        struct Row {
            kind: &'static str,
            id: usize,
            mean: f64,
            stderr: f64,
        }
        let t = self.size.trials as f64;
        let se = |p: f64| {
            if t > 1.0 {
                (p * (1.0 - p) / (t - 1.0)).max(0.0).sqrt()
            } else {
                0.0
            }
        };
        let mut wr = csv::Writer::from_writer(w);
        for (id, &c) in self.vertex.iter().enumerate() {
            wr.serialize(Row {
                kind: "vertex",
                id,
                mean: c,
                stderr: se(c.min(1.0)),
            })?;
        }
        for (id, &p) in self.edge.iter().enumerate() {
            wr.serialize(Row {
                kind: "edge",
                id,
                mean: p,
                stderr: se(p),
            })?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Trial `t` uses the realization seed of engine trial `t`, so marginals pair
/// with protocol runs on the same `master_seed`.
pub fn estimate_match_marginals(sg: &StochasticGraph, trials: usize, master_seed: u64) -> MatchMarginals {
    assert!(trials >= 1, "at least one trial is required");
    let g = sg.graph();
    let matched: Vec<Vec<EdgeId>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let real = sample_realization(sg, trial_seeds(master_seed, t).0);
            let (h, map) = real.realized_graph(g);
            max_matching(&h).edges.into_iter().map(|e| map[e]).collect()
        })
        .collect();
    let mut count = vec![0usize; g.m()];
    let sizes: Vec<f64> = matched
        .iter()
        .map(|m| {
            for &e in m {
                count[e] += 1;
            }
            m.len() as f64
        })
        .collect();
    let edge: Vec<f64> = count.iter().map(|&c| c as f64 / trials as f64).collect();
    let vertex = (0..g.n())
        .map(|v| g.neighbors(v).iter().map(|&(_, e)| edge[e]).sum())
        .collect();
    MatchMarginals {
        edge,
        vertex,
        size: MCEstimate::from_samples(&sizes),
    }
}

/// Both sides of `E[X·1{X≥ℓ}] = Σ_{ℓ'≥ℓ} Pr(X>ℓ') + ℓ·Pr(X≥ℓ)` evaluated on
/// the empirical distribution of `samples`.
pub fn tail_expectation_check(samples: &[i64], ell: i64) -> Result<(f64, f64), OracleError> {
    if samples.is_empty() {
        return Err(OracleError::EmptySample);
    }
    if let Some(&x) = samples.iter().find(|&&x| x < 0) {
        return Err(OracleError::NegativeSupport(x));
    }
    if ell < 0 {
        return Err(OracleError::NegativeSupport(ell));
    }
    let t = samples.len() as f64;
    let lhs = samples.iter().filter(|&&x| x >= ell).map(|&x| x as f64).sum::<f64>() / t;
    let max = *samples.iter().max().unwrap();
    let mut rhs = 0.0;
    for l in ell..max {
        rhs += samples.iter().filter(|&&x| x > l).count() as f64 / t;
    }
    rhs += ell as f64 * samples.iter().filter(|&&x| x >= ell).count() as f64 / t;
    Ok((lhs, rhs))
}
