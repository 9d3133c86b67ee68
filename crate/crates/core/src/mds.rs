//! Greedy-rank dominating set.
//!
//! Preprocessing ranks vertices greedily by the expected number of newly
//! covered vertices. After realization every vertex picks the lowest-rank
//! vertex in its closed realized neighborhood and tells it, in one round of
//! 1-bit messages.

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{self, Bits, EngineError, Incoming, NodeProgram, NodeView, Outgoing, Protocol, RunTrace};
use crate::graph::{Realization, StochasticGraph, VertexId};

#[derive(Debug, Error)]
pub enum MdsError {
    #[error("vertex {0} is not dominated")]
    Undominated(VertexId),
    #[error("ranking built for {expected} vertices, graph has {got}")]
    RankingMismatch { expected: usize, got: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Greedy order `v_1, …, v_n` with the expected gains `w̃_i(v_i)`.
///
/// Ranks are 0-based in the API.
#[derive(Clone, Debug, PartialEq)]
pub struct Ranking {
    pub order: Vec<VertexId>,
    /// `w̃_i(v_i)`, indexed by rank.
    pub gain: Vec<f64>,
    /// Rank of each vertex.
    pub rank: Vec<usize>,
}

/// `w̃(v)` given the uncovered probabilities `r` and the chosen set.
fn expected_gain(sg: &StochasticGraph, r: &[f64], chosen: &[bool], v: VertexId) -> f64 {
    let mut w = r[v];
    for &(u, e) in sg.graph().neighbors(v) {
        if !chosen[u] {
            w += sg.p(e) * r[u];
        }
    }
    w
}

/// Builds the greedy ranking. Ties go to the smaller id.
///
/// `r_u` is the probability that `u` is not yet covered by the chosen
/// vertices; after each choice only gains within distance two change.
pub fn rank_vertices(sg: &StochasticGraph) -> Ranking {
    let g = sg.graph();
    let n = g.n();
    let mut r = vec![1.0f64; n];
    let mut chosen = vec![false; n];
    let mut w: Vec<f64> = (0..n).map(|v| expected_gain(sg, &r, &chosen, v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut gain = Vec::with_capacity(n);
    let mut stamp = vec![usize::MAX; n];
    for i in 0..n {
        let mut best = usize::MAX;
        for v in (0..n).filter(|&v| !chosen[v]) {
            if best == usize::MAX || w[v] > w[best] {
                best = v;
            }
        }
        order.push(best);
        gain.push(w[best]);
        chosen[best] = true;
        for &(u, e) in g.neighbors(best) {
            r[u] *= 1.0 - sg.p(e);
        }
        for &(u, _) in g.neighbors(best) {
            for v in std::iter::once(u).chain(g.neighbors(u).iter().map(|&(x, _)| x)) {
                if !chosen[v] && stamp[v] != i {
                    stamp[v] = i;
                    w[v] = expected_gain(sg, &r, &chosen, v);
                }
            }
        }
    }
    let mut rank = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    Ranking { order, gain, rank }
}

/// Lowest-rank vertex of the closed realized neighborhood of `v`.
fn choice(sg: &StochasticGraph, ranking: &Ranking, real: &Realization, v: VertexId) -> VertexId {
    real.realized_neighbors(sg.graph(), v)
        .map(|(u, _)| u)
        .chain(std::iter::once(v))
        .min_by_key(|&u| ranking.rank[u])
        .unwrap()
}

/// The selected set computed centrally, sorted by id.
pub fn greedy_rank_selection(sg: &StochasticGraph, ranking: &Ranking, real: &Realization) -> Vec<VertexId> {
    let mut s = vec![false; sg.n()];
    for v in 0..sg.n() {
        s[choice(sg, ranking, real, v)] = true;
    }
    (0..sg.n()).filter(|&v| s[v]).collect()
}

/// The one-round protocol. Every vertex receives the full ranking.
#[derive(Clone, Debug)]
pub struct MdsProtocol {
    rank: Arc<Vec<usize>>,
}

pub fn mds_protocol(ranking: &Ranking) -> MdsProtocol {
    MdsProtocol {
        rank: Arc::new(ranking.rank.clone()),
    }
}

pub struct MdsNode {
    target: Option<(VertexId, usize)>,
    selected: bool,
    done: bool,
}

impl Protocol for MdsProtocol {
    type Payload = Arc<Vec<usize>>;
    type Node = MdsNode;

    fn message_budget_bits(&self, _: usize) -> u32 {
        1
    }

    fn preprocess(&self, sg: &StochasticGraph, _: u64) -> Vec<Arc<Vec<usize>>> {
        assert_eq!(self.rank.len(), sg.n(), "ranking built for another graph");
        vec![Arc::clone(&self.rank); sg.n()]
    }

    fn start(&self, view: NodeView, rank: Arc<Vec<usize>>) -> MdsNode {
        let v = view.vertex;
        let best = view
            .neighbors
            .iter()
            .map(|&(u, e)| (rank[u], u, e))
            .min()
            .filter(|&(r, _, _)| r < rank[v]);
        MdsNode {
            target: best.map(|(_, u, e)| (u, e)),
            selected: best.is_none(),
            done: false,
        }
    }
}

impl NodeProgram for MdsNode {
    type Output = bool;

    fn wants_round(&self) -> bool {
        !self.done
    }

    fn send(&mut self, _: usize, out: &mut Vec<Outgoing>) {
        if let Some((_, edge)) = self.target {
            out.push(Outgoing {
                edge,
                payload: Bits::bit(true),
            });
        }
    }

    fn receive(&mut self, _: usize, inbox: &[Incoming]) {
        self.done = true;
        self.selected |= !inbox.is_empty();
    }

    fn finish(self) -> bool {
        self.selected
    }
}

#[derive(Clone, Debug)]
pub struct MdsRun {
    pub set: Vec<VertexId>,
    pub trace: RunTrace,
}

/// Runs the protocol and checks that the output dominates the realization,
/// equals the central selection, and used one round with at most one 1-bit
/// message per vertex.
pub fn run_mds(sg: &StochasticGraph, real: &Realization, ranking: &Ranking, seed: u64) -> Result<MdsRun, MdsError> {
    if ranking.rank.len() != sg.n() {
        return Err(MdsError::RankingMismatch {
            expected: ranking.rank.len(),
            got: sg.n(),
        });
    }
    let res = engine::run(sg, real, &mds_protocol(ranking), seed, 1)?;
    let set: Vec<VertexId> = (0..sg.n()).filter(|&v| res.outputs[v]).collect();
    check_domination(sg, real, &res.outputs)?;
    if set != greedy_rank_selection(sg, ranking, real) {
        return Err(MdsError::Invariant("distributed selection differs from central".into()));
    }
    let t = &res.trace;
    if t.rounds != usize::from(sg.n() > 0) || t.max_payload_bits > 1 || t.sent_per_vertex.iter().any(|&s| s > 1) {
        return Err(MdsError::Invariant(format!("unexpected trace {}", t.to_json())));
    }
    Ok(MdsRun { set, trace: res.trace })
}

pub fn check_domination(sg: &StochasticGraph, real: &Realization, in_set: &[bool]) -> Result<(), MdsError> {
    for v in 0..sg.n() {
        if !in_set[v] && !real.realized_neighbors(sg.graph(), v).any(|(u, _)| in_set[u]) {
            return Err(MdsError::Undominated(v));
        }
    }
    Ok(())
}

/// Thresholds of the bad and costly tests. The bad test uses `ln Δ̄`, the
/// costly test `log₂ Δ̄`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticLogs {
    pub bad_log_base: f64,
    pub costly_log_base: f64,
}

impl Default for DiagnosticLogs {
    fn default() -> Self {
        DiagnosticLogs {
            bad_log_base: std::f64::consts::E,
            costly_log_base: 2.0,
        }
    }
}

/// Realized gains and bad/costly flags of one realization, indexed by rank.
#[derive(Clone, Debug, PartialEq)]
pub struct MdsDiagnostics {
    /// `Δ̄` after clamping to at least `e`.
    pub delta_bar: f64,
    pub clamped: bool,
    /// `w_i(v_i)`.
    pub realized: Vec<usize>,
    pub bad: Vec<bool>,
    pub costly: Vec<bool>,
    /// Smallest witnessing rank `ν_i` of a costly vertex.
    pub nu: Vec<Option<usize>>,
    /// Realized degrees by rank.
    pub degree: Vec<usize>,
}

impl MdsDiagnostics {
    pub fn bad_count(&self) -> usize {
        self.bad.iter().filter(|&&b| b).count()
    }

    pub fn costly_count(&self) -> usize {
        self.costly.iter().filter(|&&b| b).count()
    }

    /// `Σ_{v ∈ C} d_v`.
    pub fn costly_degree_sum(&self) -> usize {
        self.costly
            .iter()
            .zip(&self.degree)
            .filter(|(c, _)| **c)
            .map(|(_, d)| d)
            .sum()
    }

    pub fn write_csv<W: Write>(&self, ranking: &Ranking, w: W) -> csv::Result<()> {
        #[derive(Serialize)]
        struct Row {
            rank: usize,
            vertex: VertexId,
            expected: f64,
            realized: usize,
            bad: bool,
            costly: bool,
            nu: Option<usize>,
        }
        let mut wr = csv::Writer::from_writer(w);
        for i in 0..self.realized.len() {
            wr.serialize(Row {
                rank: i + 1,
                vertex: ranking.order[i],
                expected: ranking.gain[i],
                realized: self.realized[i],
                bad: self.bad[i],
                costly: self.costly[i],
                nu: self.nu[i].map(|j| j + 1),
            })?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Replays the ranking on `real`.
///
/// With `c(u)` the lowest rank in the closed realized neighborhood of `u`,
/// `w_{i'}(v) = |{u ∈ N*[v] : c(u) ≥ i'}|`, so each `v_i` needs only its
/// sorted `c` values and a search over the thresholds.
pub fn classify_bad_costly(
    sg: &StochasticGraph,
    ranking: &Ranking,
    real: &Realization,
    logs: DiagnosticLogs,
) -> MdsDiagnostics {
    let g = sg.graph();
    let n = g.n();
    let raw = sg.max_expected_degree();
    let clamped = raw < std::f64::consts::E;
    let delta_bar = raw.max(std::f64::consts::E);
    let first: Vec<usize> = (0..n).map(|u| ranking.rank[choice(sg, ranking, real, u)]).collect();
    let mut realized = vec![0usize; n];
    for &c in &first {
        realized[c] += 1;
    }
    let bad_shift = 8.0 * delta_bar.log(logs.bad_log_base);
    let bad = (0..n)
        .map(|i| (realized[i] as f64) < (ranking.gain[i] - bad_shift) / 4.0)
        .collect();
    let costly_log = delta_bar.log(logs.costly_log_base);
    let threshold: Vec<f64> = ranking.gain.iter().map(|w| 6.0 * (w.ceil() + costly_log)).collect();
    let monotone = threshold.windows(2).all(|t| t[0] >= t[1]);
    let mut costly = vec![false; n];
    let mut nu = vec![None; n];
    let mut degree = vec![0usize; n];
    let mut cs = Vec::new();
    for i in 0..n {
        let v = ranking.order[i];
        cs.clear();
        cs.push(first[v]);
        cs.extend(real.realized_neighbors(g, v).map(|(u, _)| first[u]));
        degree[i] = cs.len() - 1;
        cs.sort_unstable();
        // count(i') is constant on (cs[j-1], cs[j]]
        let mut lo = 0usize;
        for (j, &c) in cs.iter().enumerate() {
            let hi = c.min(i.saturating_sub(1));
            if i == 0 || lo > hi {
                lo = lo.max(c + 1);
                continue;
            }
            let count = (cs.len() - j) as f64;
            let hit = if monotone {
                let k = lo + threshold[lo..=hi].partition_point(|&t| t >= count);
                (k <= hi).then_some(k)
            } else {
                (lo..=hi).find(|&k| count > threshold[k])
            };
            if let Some(k) = hit {
                costly[i] = true;
                nu[i] = Some(k);
                break;
            }
            lo = c + 1;
        }
    }
    MdsDiagnostics {
        delta_bar,
        clamped,
        realized,
        bad,
        costly,
        nu,
        degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, sample_realization, GeneratorKind, ProbModel};

    /// `w̃_i(v)` straight from the formula.
    fn formula(sg: &StochasticGraph, prefix: &[VertexId], v: VertexId) -> f64 {
        let g = sg.graph();
        let in_prefix = |x: VertexId| prefix.contains(&x);
        let miss = |u: VertexId| -> f64 {
            g.neighbors(u)
                .iter()
                .filter(|&&(w, _)| in_prefix(w))
                .map(|&(_, e)| 1.0 - sg.p(e))
                .product()
        };
        miss(v)
            + g.neighbors(v)
                .iter()
                .filter(|&&(u, _)| !in_prefix(u))
                .map(|&(u, e)| sg.p(e) * miss(u))
                .sum::<f64>()
    }

    fn brute_costly(sg: &StochasticGraph, rk: &Ranking, real: &Realization, log2d: f64) -> Vec<Option<usize>> {
        let g = sg.graph();
        let n = sg.n();
        let closed = |v: VertexId| -> Vec<VertexId> {
            let mut c: Vec<VertexId> = real.realized_neighbors(g, v).map(|(u, _)| u).collect();
            c.push(v);
            c
        };
        (0..n)
            .map(|i| {
                (0..i).find(|&ip| {
                    let prev = &rk.order[..ip];
                    let w = closed(rk.order[i])
                        .into_iter()
                        .filter(|&u| !prev.iter().any(|&x| x == u || closed(x).contains(&u)))
                        .count();
                    w as f64 > 6.0 * (rk.gain[ip].ceil() + log2d)
                })
            })
            .collect()
    }

    #[test]
    fn ranking_matches_formula() {
        for seed in 0..5 {
            let sg = generate(
                GeneratorKind::ErdosRenyi { n: 25, density: 0.2 },
                ProbModel::UniformRange(0.1, 0.9),
                seed,
            )
            .unwrap();
            let rk = rank_vertices(&sg);
            for i in 0..sg.n() {
                let prefix = &rk.order[..i];
                let best = (0..sg.n())
                    .filter(|v| !prefix.contains(v))
                    .map(|v| formula(&sg, prefix, v))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!((rk.gain[i] - best).abs() < 1e-9);
                assert!((formula(&sg, prefix, rk.order[i]) - best).abs() < 1e-9);
                if i > 0 {
                    assert!(rk.gain[i] <= rk.gain[i - 1] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn star_and_edgeless_rankings() {
        let sg = generate(GeneratorKind::Star { n: 6 }, ProbModel::Uniform(0.5), 0).unwrap();
        let rk = rank_vertices(&sg);
        assert_eq!(rk.order[0], 0);
        assert!((rk.gain[0] - 3.5).abs() < 1e-12);
        let empty = StochasticGraph::from_edges(4, []).unwrap();
        let rk = rank_vertices(&empty);
        assert_eq!(rk.order, vec![0, 1, 2, 3]);
        assert!(rk.gain.iter().all(|&w| w == 1.0));
    }

    #[test]
    fn protocol_outputs() {
        let sg = generate(GeneratorKind::Star { n: 6 }, ProbModel::Uniform(0.5), 0).unwrap();
        let rk = rank_vertices(&sg);
        let run = run_mds(&sg, &Realization::full(sg.graph()), &rk, 0).unwrap();
        assert_eq!(run.set, vec![0]);
        assert_eq!(run.trace.total_messages, 5);
        let none = Realization::from_bits(sg.graph(), vec![false; sg.m()]).unwrap();
        let run = run_mds(&sg, &none, &rk, 0).unwrap();
        assert_eq!(run.set.len(), 6);
        assert_eq!(run.trace.total_messages, 0);
    }

    #[test]
    fn random_runs_dominate() {
        let sg = generate(
            GeneratorKind::ErdosRenyi { n: 50, density: 0.1 },
            ProbModel::UniformRange(0.2, 0.8),
            3,
        )
        .unwrap();
        let rk = rank_vertices(&sg);
        for t in 0..30 {
            run_mds(&sg, &sample_realization(&sg, t), &rk, t).unwrap();
        }
    }

    #[test]
    fn diagnostics_match_definitions() {
        for seed in 0..4 {
            let sg = generate(
                GeneratorKind::ErdosRenyi { n: 30, density: 0.3 },
                ProbModel::UniformRange(0.3, 1.0),
                seed,
            )
            .unwrap();
            let rk = rank_vertices(&sg);
            for t in 0..10 {
                let real = sample_realization(&sg, t);
                let d = classify_bad_costly(&sg, &rk, &real, DiagnosticLogs::default());
                assert_eq!(d.realized.iter().sum::<usize>(), sg.n());
                assert_eq!(d.nu, brute_costly(&sg, &rk, &real, d.delta_bar.log2()));
                assert_eq!(d.costly, d.nu.iter().map(Option::is_some).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn deterministic_realizations_have_no_bad_vertices() {
        let sg = generate(
            GeneratorKind::ErdosRenyi { n: 40, density: 0.2 },
            ProbModel::Uniform(1.0),
            1,
        )
        .unwrap();
        let rk = rank_vertices(&sg);
        let d = classify_bad_costly(&sg, &rk, &Realization::full(sg.graph()), DiagnosticLogs::default());
        for i in 0..sg.n() {
            assert_eq!(d.realized[i] as f64, rk.gain[i]);
        }
        assert_eq!(d.bad_count(), 0);
        let empty = StochasticGraph::from_edges(3, []).unwrap();
        let rk = rank_vertices(&empty);
        let d = classify_bad_costly(
            &empty,
            &rk,
            &Realization::full(empty.graph()),
            DiagnosticLogs::default(),
        );
        assert!(d.clamped);
        assert_eq!(d.realized, vec![1, 1, 1]);
        assert_eq!(d.costly_count(), 0);
        let mut buf = Vec::new();
        d.write_csv(&rk, &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("rank,vertex,expected,realized,bad,costly,nu\n1,0,1.0,1,false,false,\n"));
    }
}
