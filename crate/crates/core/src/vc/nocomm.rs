use super::VcError;
use crate::engine::{Incoming, NodeProgram, NodeView, Outgoing, Protocol};
use crate::graph::{EdgeId, StochasticGraph, VertexId};
use crate::oracles::ConditionalF;

/// Which endpoint covers each edge if it is realized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeAssociation {
    /// Owner of each edge.
    pub owner: Vec<VertexId>,
    /// `E_v` for every vertex, in increasing edge id.
    pub sets: Vec<Vec<EdgeId>>,
}

impl EdgeAssociation {
    pub fn from_owners(sg: &StochasticGraph, owner: Vec<VertexId>) -> Self {
        let mut sets = vec![Vec::new(); sg.n()];
        for (e, &v) in owner.iter().enumerate() {
            let (a, b) = sg.graph().endpoints(e);
            assert!(v == a || v == b, "edge {e} assigned to non-endpoint {v}");
            sets[v].push(e);
        }
        EdgeAssociation { owner, sets }
    }
}

/// `uv` goes to `v` iff `f̂_vu > f̂_uv`, ties to the smaller id.
///
/// The comparison uses the paired trial sums, so it is exact.
pub fn build_edge_association(sg: &StochasticGraph, f: &ConditionalF) -> Result<EdgeAssociation, VcError> {
    if f.m() != sg.m() {
        return Err(VcError::MissingEstimate {
            expected: sg.m(),
            got: f.m(),
        });
    }
    let owner = sg
        .graph()
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            let [fu, fv] = f.sums(e);
            // u < v, so u wins ties
            if fv > fu {
                v
            } else {
                u
            }
        })
        .collect();
    Ok(EdgeAssociation::from_owners(sg, owner))
}

/// `Pr(v ∈ C) = 1 - Π_{e ∈ E_v} (1 - p_e)`.
pub fn cover_probability_closed_form(sg: &StochasticGraph, assoc: &EdgeAssociation, v: VertexId) -> f64 {
    1.0 - assoc.sets[v].iter().map(|&e| 1.0 - sg.p(e)).product::<f64>()
}

/// Zero-round cover: `v` joins iff one of its associated edges is realized.
#[derive(Clone, Debug)]
pub struct NoCommVc {
    assoc: EdgeAssociation,
}

pub fn nocomm_vc_protocol(assoc: EdgeAssociation) -> NoCommVc {
    NoCommVc { assoc }
}

impl NoCommVc {
    pub fn association(&self) -> &EdgeAssociation {
        &self.assoc
    }
}

pub struct NoCommNode {
    in_cover: bool,
}

impl Protocol for NoCommVc {
    type Payload = Vec<EdgeId>;
    type Node = NoCommNode;

    fn message_budget_bits(&self, _: usize) -> u32 {
        1
    }

    fn preprocess(&self, sg: &StochasticGraph, _: u64) -> Vec<Vec<EdgeId>> {
        assert_eq!(self.assoc.owner.len(), sg.m(), "association built for another graph");
        self.assoc.sets.clone()
    }

    fn start(&self, view: NodeView, owned: Vec<EdgeId>) -> NoCommNode {
        let in_cover = view.neighbors.iter().any(|&(_, e)| owned.binary_search(&e).is_ok());
        NoCommNode { in_cover }
    }
}

impl NodeProgram for NoCommNode {
    type Output = bool;

    fn wants_round(&self) -> bool {
        false
    }

    fn send(&mut self, _: usize, _: &mut Vec<Outgoing>) {}

    fn receive(&mut self, _: usize, _: &[Incoming]) {}

    fn finish(self) -> bool {
        self.in_cover
    }
}
