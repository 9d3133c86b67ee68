//! Round-synchronous executor for the distributed stochastic model.
//!
//! Preprocessing runs centrally with full knowledge of `G` and every `p_e`.
//! After the realization is drawn each vertex sees only its realized incident
//! edges, and messages may only cross realized edges. Messages sent in round
//! `r` are delivered before any node acts in round `r + 1`. Only rounds after
//! the realization are counted.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{sample_realization, EdgeId, Realization, StochasticGraph, VertexId};
use crate::rng::{self, StreamRng};
use crate::stats::MCEstimate;

/// A message payload of 1 to 64 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bits {
    value: u64,
    len: u32,
}

impl Bits {
    pub fn bit(b: bool) -> Self {
        Bits {
            value: u64::from(b),
            len: 1,
        }
    }

    /// Panics unless `1 <= len <= 64` and `value` fits in `len` bits.
    pub fn new(value: u64, len: u32) -> Self {
        assert!((1..=64).contains(&len), "payload length {len} out of range");
        assert!(
            len == 64 || value >> len == 0,
            "value {value} does not fit in {len} bits"
        );
        Bits { value, len }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn len(self) -> u32 {
        self.len
    }

    pub fn as_bool(self) -> bool {
        self.value != 0
    }
}

/// Bits needed to name one of `n` vertices, at least 1.
pub fn id_bits(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outgoing {
    pub edge: EdgeId,
    pub payload: Bits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incoming {
    pub edge: EdgeId,
    pub from: VertexId,
    pub payload: Bits,
}

/// What a vertex knows when the distributed phase starts.
#[derive(Debug)]
pub struct NodeView {
    pub vertex: VertexId,
    pub n: usize,
    /// Realized incident `(neighbor, edge)` pairs, in edge-id order.
    pub neighbors: Vec<(VertexId, EdgeId)>,
    /// The vertex's private random stream.
    pub rng: StreamRng,
}

/// A distributed algorithm: central preprocessing plus one program per vertex.
pub trait Protocol: Sync {
    type Payload: Send;
    type Node: NodeProgram;

    /// Largest payload, in bits, the algorithm may send on an `n`-vertex
    /// graph. The engine rejects larger messages.
    fn message_budget_bits(&self, n: usize) -> u32;

    /// Per-vertex preprocessing payloads. May use all of `G` and `p`; `seed`
    /// feeds any randomness the preprocessing stage draws.
    fn preprocess(&self, sg: &StochasticGraph, seed: u64) -> Vec<Self::Payload>;

    fn start(&self, view: NodeView, payload: Self::Payload) -> Self::Node;
}

/// Per-vertex state machine. Its state may only change inside `send` and
/// `receive`, so a node that does not want a round and receives nothing is
/// left alone.
pub trait NodeProgram {
    type Output;

    /// Whether this node wants another round. The run ends when no node does.
    fn wants_round(&self) -> bool;

    fn send(&mut self, round: usize, out: &mut Vec<Outgoing>);

    fn receive(&mut self, round: usize, inbox: &[Incoming]);

    fn finish(self) -> Self::Output;
}

pub type OutputOf<P> = <<P as Protocol>::Node as NodeProgram>::Output;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("model violation: vertex {vertex} sent over edge {edge}: {reason}")]
    ModelViolation {
        vertex: VertexId,
        edge: EdgeId,
        reason: &'static str,
    },
    #[error("vertex {vertex} sent {bits} bits over edge {edge}, budget is {budget}")]
    BudgetExceeded {
        vertex: VertexId,
        edge: EdgeId,
        bits: u32,
        budget: u32,
    },
    #[error("round limit {max_rounds} reached before all nodes finished")]
    RoundLimit { max_rounds: usize },
    #[error("preprocessing produced {got} payloads for {expected} vertices")]
    PayloadCount { expected: usize, got: usize },
    #[error("realization has {got} bits but the graph has {expected} edges")]
    RealizationMismatch { expected: usize, got: usize },
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<EngineError>,
    },
}

/// Resource accounting for one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunTrace {
    pub rounds: usize,
    pub max_payload_bits: u32,
    pub total_messages: usize,
    pub per_round: Vec<usize>,
    #[serde(skip)]
    pub sent_per_vertex: Vec<usize>,
}

impl RunTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

#[derive(Clone, Debug)]
pub struct RunResult<O> {
    pub outputs: Vec<O>,
    pub trace: RunTrace,
}

/// Seeds used by trial `t` of a Monte-Carlo experiment:
/// `(realization seed, protocol seed)`.
pub fn trial_seeds(master_seed: u64, t: usize) -> (u64, u64) {
    (
        rng::derive_seed(master_seed, "real", t as u64),
        rng::derive_seed(master_seed, "proto", t as u64),
    )
}

/// The private stream of vertex `v` in a run with protocol seed `seed`.
pub fn node_stream(seed: u64, v: VertexId) -> StreamRng {
    rng::stream(seed, "node", v as u64)
}

/// Runs `protocol` once on `realization`.
pub fn run<P: Protocol>(
    sg: &StochasticGraph,
    realization: &Realization,
    protocol: &P,
    seed: u64,
    max_rounds: usize,
) -> Result<RunResult<OutputOf<P>>, EngineError> {
    let g = sg.graph();
    let n = g.n();
    if realization.len() != g.m() {
        return Err(EngineError::RealizationMismatch {
            expected: g.m(),
            got: realization.len(),
        });
    }
    let payloads = protocol.preprocess(sg, rng::derive_seed(seed, "pre", 0));
    if payloads.len() != n {
        return Err(EngineError::PayloadCount {
            expected: n,
            got: payloads.len(),
        });
    }
    let mut nodes: Vec<P::Node> = payloads
        .into_iter()
        .enumerate()
        .map(|(v, payload)| {
            let view = NodeView {
                vertex: v,
                n,
                neighbors: realization.realized_neighbors(g, v).collect(),
                rng: node_stream(seed, v),
            };
            protocol.start(view, payload)
        })
        .collect();

    let budget = protocol.message_budget_bits(n);
    let mut trace = RunTrace {
        sent_per_vertex: vec![0; n],
        ..RunTrace::default()
    };
    let mut used_edges = vec![false; g.m()];
    let mut inboxes: Vec<Vec<Incoming>> = vec![Vec::new(); n];
    let mut touched = vec![false; n];
    let mut out = Vec::new();
    let mut live: Vec<VertexId> = (0..n).filter(|&v| nodes[v].wants_round()).collect();
    let mut next: Vec<VertexId> = Vec::new();

    while !live.is_empty() {
        if trace.rounds == max_rounds {
            return Err(EngineError::RoundLimit { max_rounds });
        }
        trace.rounds += 1;
        let round = trace.rounds;
        let mut count = 0;
        for &v in &live {
            out.clear();
            nodes[v].send(round, &mut out);
            for msg in &out {
                let e = msg.edge;
                if e >= g.m() {
                    return Err(EngineError::ModelViolation {
                        vertex: v,
                        edge: e,
                        reason: "no such edge",
                    });
                }
                let (a, b) = g.endpoints(e);
                if a != v && b != v {
                    return Err(EngineError::ModelViolation {
                        vertex: v,
                        edge: e,
                        reason: "edge is not incident to the sender",
                    });
                }
                if !realization.is_present(e) {
                    return Err(EngineError::ModelViolation {
                        vertex: v,
                        edge: e,
                        reason: "edge is not realized",
                    });
                }
                let bits = msg.payload.len();
                if bits > budget {
                    return Err(EngineError::BudgetExceeded {
                        vertex: v,
                        edge: e,
                        bits,
                        budget,
                    });
                }
                let to = if a == v { b } else { a };
                inboxes[to].push(Incoming {
                    edge: e,
                    from: v,
                    payload: msg.payload,
                });
                touched[to] = true;
                used_edges[e] = true;
                trace.max_payload_bits = trace.max_payload_bits.max(bits);
                trace.sent_per_vertex[v] += 1;
                count += 1;
            }
        }
        trace.per_round.push(count);
        trace.total_messages += count;

        for &v in &live {
            touched[v] = true;
        }
        next.clear();
        for v in 0..n {
            if touched[v] {
                touched[v] = false;
                nodes[v].receive(round, &inboxes[v]);
                inboxes[v].clear();
                if nodes[v].wants_round() {
                    next.push(v);
                }
            }
        }
        std::mem::swap(&mut live, &mut next);
    }

    // post-run audit
    if let Some(e) = (0..g.m()).find(|&e| used_edges[e] && !realization.is_present(e)) {
        let (a, _) = g.endpoints(e);
        return Err(EngineError::ModelViolation {
            vertex: a,
            edge: e,
            reason: "edge is not realized",
        });
    }

    Ok(RunResult {
        outputs: nodes.into_iter().map(NodeProgram::finish).collect(),
        trace,
    })
}

/// One completed Monte-Carlo trial.
#[derive(Clone, Debug)]
pub struct Trial<O> {
    pub index: usize,
    pub realization: Realization,
    pub outputs: Vec<O>,
    pub trace: RunTrace,
}

/// Where trials execute. Results never depend on this choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Workers {
    /// Rayon's global pool.
    #[default]
    Global,
    /// A dedicated pool with this many threads; 1 runs inline.
    Fixed(usize),
}

/// Maps `f` over `0..trials` on `workers`, keeping trial order.
pub fn map_trials<T, F>(trials: usize, workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match workers {
        Workers::Fixed(1) => (0..trials).map(f).collect(),
        Workers::Global => (0..trials).into_par_iter().map(f).collect(),
        Workers::Fixed(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
            .install(|| (0..trials).into_par_iter().map(f).collect()),
    }
}

/// Runs `trials` independent trials and maps each through `f`, in trial
/// order. Trial `t` uses the seeds from [`trial_seeds`].
pub fn run_trials<P, T, F>(
    sg: &StochasticGraph,
    protocol: &P,
    trials: usize,
    master_seed: u64,
    max_rounds: usize,
    workers: Workers,
    f: F,
) -> Result<Vec<T>, EngineError>
where
    P: Protocol,
    OutputOf<P>: Send,
    T: Send,
    F: Fn(&Trial<OutputOf<P>>) -> T + Sync + Send,
{
    let results = map_trials(trials, workers, |t| {
        let (rseed, pseed) = trial_seeds(master_seed, t);
        let realization = sample_realization(sg, rseed);
        run(sg, &realization, protocol, pseed, max_rounds)
            .map(|r| {
                f(&Trial {
                    index: t,
                    realization,
                    outputs: r.outputs,
                    trace: r.trace,
                })
            })
            .map_err(|e| EngineError::Trial {
                trial: t,
                source: Box::new(e),
            })
    });
    results.into_iter().collect()
}

/// Mean and standard error of `statistic` over `trials` runs.
pub fn monte_carlo<P, F>(
    sg: &StochasticGraph,
    protocol: &P,
    statistic: F,
    trials: usize,
    master_seed: u64,
    max_rounds: usize,
    workers: Workers,
) -> Result<MCEstimate, EngineError>
where
    P: Protocol,
    OutputOf<P>: Send,
    F: Fn(&Trial<OutputOf<P>>) -> f64 + Sync + Send,
{
    assert!(trials >= 1, "at least one trial is required");
    let samples = run_trials(sg, protocol, trials, master_seed, max_rounds, workers, statistic)?;
    Ok(MCEstimate::from_samples(&samples))
}

/// Wraps a protocol together with its graph.
pub struct Simulator<'a, P> {
    pub sg: &'a StochasticGraph,
    pub protocol: &'a P,
}

impl<'a, P: Protocol> Simulator<'a, P> {
    pub fn new(sg: &'a StochasticGraph, protocol: &'a P) -> Self {
        Simulator { sg, protocol }
    }

    pub fn run(
        &self,
        realization: &Realization,
        seed: u64,
        max_rounds: usize,
    ) -> Result<RunResult<OutputOf<P>>, EngineError> {
        run(self.sg, realization, self.protocol, seed, max_rounds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BaseGraph, StochasticGraph};

    /// Outputs the realized degree without communicating.
    struct Silent;
    struct SilentNode(usize);
    impl Protocol for Silent {
        type Payload = ();
        type Node = SilentNode;
        fn message_budget_bits(&self, _: usize) -> u32 {
            1
        }
        fn preprocess(&self, sg: &StochasticGraph, _: u64) -> Vec<()> {
            vec![(); sg.n()]
        }
        fn start(&self, view: NodeView, _: ()) -> SilentNode {
            SilentNode(view.neighbors.len())
        }
    }
    impl NodeProgram for SilentNode {
        type Output = usize;
        fn wants_round(&self) -> bool {
            false
        }
        fn send(&mut self, _: usize, _: &mut Vec<Outgoing>) {}
        fn receive(&mut self, _: usize, _: &[Incoming]) {}
        fn finish(self) -> usize {
            self.0
        }
    }

    /// Sends one bit to every realized neighbor in round 1 and counts what
    /// arrives.
    struct Ping;
    struct PingNode {
        nbrs: Vec<(VertexId, EdgeId)>,
        sent: bool,
        got: usize,
    }
    impl Protocol for Ping {
        type Payload = ();
        type Node = PingNode;
        fn message_budget_bits(&self, _: usize) -> u32 {
            1
        }
        fn preprocess(&self, sg: &StochasticGraph, _: u64) -> Vec<()> {
            vec![(); sg.n()]
        }
        fn start(&self, view: NodeView, _: ()) -> PingNode {
            PingNode {
                nbrs: view.neighbors,
                sent: false,
                got: 0,
            }
        }
    }
    impl NodeProgram for PingNode {
        type Output = usize;
        fn wants_round(&self) -> bool {
            !self.sent
        }
        fn send(&mut self, _: usize, out: &mut Vec<Outgoing>) {
            out.extend(self.nbrs.iter().map(|&(_, e)| Outgoing {
                edge: e,
                payload: Bits::bit(true),
            }));
            self.sent = true;
        }
        fn receive(&mut self, _: usize, inbox: &[Incoming]) {
            self.got += inbox.len();
        }
        fn finish(self) -> usize {
            self.got
        }
    }

    /// Tries to use a fixed edge regardless of the realization.
    struct Rogue {
        edge: EdgeId,
        sender: VertexId,
    }
    struct RogueNode {
        v: VertexId,
        edge: EdgeId,
        sender: VertexId,
        done: bool,
    }
    impl Protocol for Rogue {
        type Payload = ();
        type Node = RogueNode;
        fn message_budget_bits(&self, _: usize) -> u32 {
            1
        }
        fn preprocess(&self, sg: &StochasticGraph, _: u64) -> Vec<()> {
            vec![(); sg.n()]
        }
        fn start(&self, view: NodeView, _: ()) -> RogueNode {
            RogueNode {
                v: view.vertex,
                edge: self.edge,
                sender: self.sender,
                done: false,
            }
        }
    }
    impl NodeProgram for RogueNode {
        type Output = ();
        fn wants_round(&self) -> bool {
            !self.done
        }
        fn send(&mut self, _: usize, out: &mut Vec<Outgoing>) {
            if self.v == self.sender {
                out.push(Outgoing {
                    edge: self.edge,
                    payload: Bits::bit(true),
                });
            }
            self.done = true;
        }
        fn receive(&mut self, _: usize, _: &[Incoming]) {}
        fn finish(self) {}
    }

    fn path3() -> StochasticGraph {
        StochasticGraph::from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)]).unwrap()
    }

    #[test]
    fn silent_protocol_uses_zero_rounds() {
        let sg = path3();
        let r = Realization::from_bits(sg.graph(), vec![true, false]).unwrap();
        let res = run(&sg, &r, &Silent, 1, 10).unwrap();
        assert_eq!(res.trace.rounds, 0);
        assert_eq!(res.trace.total_messages, 0);
        assert_eq!(res.outputs, vec![1, 1, 0]);
    }

    #[test]
    fn one_bit_ping_uses_one_round() {
        let sg = path3();
        let r = Realization::full(sg.graph());
        let res = run(&sg, &r, &Ping, 1, 10).unwrap();
        assert_eq!(res.trace.rounds, 1);
        assert_eq!(res.trace.max_payload_bits, 1);
        assert_eq!(res.trace.total_messages, 4);
        assert_eq!(res.trace.per_round, vec![4]);
        assert_eq!(res.outputs, vec![1, 2, 1]);
        assert_eq!(
            res.trace.to_json(),
            r#"{"rounds":1,"max_payload_bits":1,"total_messages":4,"per_round":[4]}"#
        );
    }

    #[test]
    fn sending_over_unrealized_edge_is_a_violation() {
        let sg = path3();
        let r = Realization::from_bits(sg.graph(), vec![true, false]).unwrap();
        let err = run(&sg, &r, &Rogue { edge: 1, sender: 1 }, 0, 10).unwrap_err();
        assert_eq!(
            err,
            EngineError::ModelViolation {
                vertex: 1,
                edge: 1,
                reason: "edge is not realized"
            }
        );
    }

    #[test]
    fn sending_over_foreign_edge_is_a_violation() {
        let sg = path3();
        let r = Realization::full(sg.graph());
        let err = run(&sg, &r, &Rogue { edge: 1, sender: 0 }, 0, 10).unwrap_err();
        assert!(matches!(err, EngineError::ModelViolation { vertex: 0, edge: 1, .. }));
    }

    #[test]
    fn round_limit_is_reported() {
        let sg = path3();
        let r = Realization::full(sg.graph());
        assert_eq!(
            run(&sg, &r, &Ping, 0, 0).unwrap_err(),
            EngineError::RoundLimit { max_rounds: 0 }
        );
    }

    #[test]
    fn id_bit_widths() {
        assert_eq!(id_bits(1), 1);
        assert_eq!(id_bits(2), 1);
        assert_eq!(id_bits(3), 2);
        assert_eq!(id_bits(4), 2);
        assert_eq!(id_bits(5), 3);
        assert_eq!(id_bits(1024), 10);
        assert_eq!(id_bits(1025), 11);
    }

    #[test]
    fn constant_statistic() {
        let sg = path3();
        let est = monte_carlo(&sg, &Silent, |_| 1.0, 100, 3, 0, Workers::Fixed(1)).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.trials, 100);
    }

    #[test]
    fn monte_carlo_is_worker_count_independent() {
        let sg = StochasticGraph::from_edges(4, [(0, 1, 0.3), (1, 2, 0.6), (2, 3, 0.9), (0, 3, 0.5)]).unwrap();
        let stat = |t: &Trial<usize>| t.outputs.iter().sum::<usize>() as f64 + t.realization.count() as f64;
        let a = monte_carlo(&sg, &Ping, stat, 500, 11, 5, Workers::Fixed(1)).unwrap();
        let b = monte_carlo(&sg, &Ping, stat, 500, 11, 5, Workers::Fixed(3)).unwrap();
        let c = monte_carlo(&sg, &Ping, stat, 500, 11, 5, Workers::Global).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn trial_errors_carry_index() {
        let sg = StochasticGraph::new(BaseGraph::new(2, [(0, 1)]).unwrap(), vec![1.0]).unwrap();
        let err = monte_carlo(&sg, &Ping, |_| 0.0, 3, 0, 0, Workers::Fixed(1)).unwrap_err();
        assert!(matches!(err, EngineError::Trial { trial: 0, .. }));
    }
}
