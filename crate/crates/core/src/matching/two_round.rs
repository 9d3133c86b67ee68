use std::sync::Arc;

use rand::Rng;

use super::MatchingError;
use crate::engine::{Bits, Incoming, NodeProgram, NodeView, Outgoing, Protocol};
use crate::graph::{Bipartition, EdgeId, StochasticGraph, VertexId};
use crate::oracles::{max_bipartite_matching, max_matching};
use crate::rng::{self, StreamRng};

/// How vertices split into active and passive.
#[derive(Clone, Debug, PartialEq)]
pub enum SideRule {
    /// Each vertex is active with probability `α`, drawn per run.
    Random { alpha: f64 },
    /// Left side active, right side passive.
    Bipartite(Bipartition),
    /// A fixed labelling, mainly for tests and walkthroughs.
    Fixed(Vec<bool>),
}

/// Per-vertex labels of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideAssignment {
    pub active: Vec<bool>,
}

impl SideRule {
    pub fn assign(&self, n: usize, seed: u64) -> SideAssignment {
        let active = match self {
            SideRule::Random { alpha } => {
                let mut rng = rng::stream(seed, "sides", 0);
                (0..n).map(|_| rng.random::<f64>() < *alpha).collect()
            }
            SideRule::Bipartite(b) => (0..n).map(|v| b.is_left(v)).collect(),
            SideRule::Fixed(a) => {
                assert_eq!(a.len(), n, "side labels for another graph");
                a.clone()
            }
        };
        SideAssignment { active }
    }
}

/// `2(1 - α)(1 - e^{-α})`, the guaranteed fraction of `E[|M(G*)|]`.
pub fn ratio_fn(alpha: f64) -> f64 {
    2.0 * (1.0 - alpha) * -(-alpha).exp_m1()
}

/// The maximizer of [`ratio_fn`] on `[0, 1]`, by golden-section search.
pub fn optimal_alpha() -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    while b - a > 1e-12 {
        if ratio_fn(c) > ratio_fn(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    0.5 * (a + b)
}

/// A private realization for active vertex `v`: edges from `v` to passive
/// neighbors follow the true realization (`realized_incident`, sorted), and
/// every other edge is drawn with probability `p_e` from `rng`.
///
/// One draw is consumed per edge in id order, whether or not it is used.
pub fn hallucination(
    sg: &StochasticGraph,
    v: VertexId,
    realized_incident: &[EdgeId],
    active: &[bool],
    rng: &mut StreamRng,
) -> Vec<bool> {
    let g = sg.graph();
    (0..g.m())
        .map(|e| {
            let u: f64 = rng.random();
            let (a, b) = g.endpoints(e);
            if (a == v && !active[b]) || (b == v && !active[a]) {
                realized_incident.binary_search(&e).is_ok()
            } else {
                u < sg.p(e)
            }
        })
        .collect()
}

/// The two-round protocol. Side labels are drawn during preprocessing of
/// each run; every vertex learns its neighbors' labels there.
#[derive(Clone, Debug)]
pub struct TwoRoundMatching {
    rule: SideRule,
}

pub fn two_round_matching_protocol(alpha: f64) -> Result<TwoRoundMatching, MatchingError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(MatchingError::Alpha(alpha));
    }
    Ok(TwoRoundMatching {
        rule: SideRule::Random { alpha },
    })
}

/// The bipartite variant: every left vertex is active and the oracle is the
/// bipartite matcher under `sg`'s bipartition.
pub fn bipartite_two_round_protocol(sg: &StochasticGraph) -> Result<TwoRoundMatching, MatchingError> {
    let b = sg
        .bipartition()
        .cloned()
        .or_else(|| sg.graph().bipartition())
        .ok_or_else(|| MatchingError::Invalid("graph is not bipartite".into()))?;
    b.validate(sg.graph())?;
    Ok(TwoRoundMatching {
        rule: SideRule::Bipartite(b),
    })
}

impl TwoRoundMatching {
    pub fn with_sides(rule: SideRule) -> Self {
        TwoRoundMatching { rule }
    }

    pub fn rule(&self) -> &SideRule {
        &self.rule
    }
}

pub struct RunContext {
    sg: StochasticGraph,
    active: Vec<bool>,
    bipartition: Option<Bipartition>,
}

pub struct TwoRoundNode {
    active: bool,
    target: Option<(VertexId, EdgeId)>,
    accepted: Option<(VertexId, EdgeId)>,
    partner: Option<(VertexId, EdgeId)>,
    round: usize,
}

impl Protocol for TwoRoundMatching {
    type Payload = Arc<RunContext>;
    type Node = TwoRoundNode;

    fn message_budget_bits(&self, _: usize) -> u32 {
        1
    }

    fn preprocess(&self, sg: &StochasticGraph, seed: u64) -> Vec<Arc<RunContext>> {
        let sides = self.rule.assign(sg.n(), seed);
        let bipartition = match &self.rule {
            SideRule::Bipartite(b) => Some(b.clone()),
            _ => None,
        };
        let ctx = Arc::new(RunContext {
            sg: sg.clone(),
            active: sides.active,
            bipartition,
        });
        vec![ctx; sg.n()]
    }

    fn start(&self, mut view: NodeView, ctx: Arc<RunContext>) -> TwoRoundNode {
        let v = view.vertex;
        let active = ctx.active[v];
        let mut target = None;
        if active && !view.neighbors.is_empty() {
            let mut realized: Vec<EdgeId> = view.neighbors.iter().map(|&(_, e)| e).collect();
            realized.sort_unstable();
            let h = hallucination(&ctx.sg, v, &realized, &ctx.active, &mut view.rng);
            let (hg, map) = ctx.sg.graph().subgraph(|e| h[e]);
            let m = match &ctx.bipartition {
                Some(b) => max_bipartite_matching(&hg, b).expect("subgraph of a bipartite graph"),
                None => max_matching(&hg),
            };
            target = m
                .edges
                .iter()
                .map(|&e| map[e])
                .find(|&e| {
                    let (a, b) = ctx.sg.graph().endpoints(e);
                    a == v || b == v
                })
                .map(|e| (ctx.sg.graph().other(e, v), e))
                .filter(|&(u, e)| !ctx.active[u] && realized.binary_search(&e).is_ok());
        }
        TwoRoundNode {
            active,
            target,
            accepted: None,
            partner: None,
            round: 0,
        }
    }
}

impl NodeProgram for TwoRoundNode {
    type Output = Option<(VertexId, EdgeId)>;

    fn wants_round(&self) -> bool {
        self.round < 2
    }

    fn send(&mut self, round: usize, out: &mut Vec<Outgoing>) {
        let to = match round {
            1 => self.target,
            2 => self.accepted,
            _ => None,
        };
        if let Some((_, edge)) = to {
            out.push(Outgoing {
                edge,
                payload: Bits::bit(true),
            });
        }
    }

    fn receive(&mut self, round: usize, inbox: &[Incoming]) {
        self.round = round;
        match round {
            1 if !self.active => {
                self.accepted = inbox.iter().map(|m| (m.from, m.edge)).min();
                self.partner = self.accepted;
            }
            2 if self.active => {
                if let Some((u, _)) = self.target {
                    if inbox.iter().any(|m| m.from == u) {
                        self.partner = self.target;
                    }
                }
            }
            _ => {}
        }
    }

    fn finish(self) -> Option<(VertexId, EdgeId)> {
        self.partner
    }
}
