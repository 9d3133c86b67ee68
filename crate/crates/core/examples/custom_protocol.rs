//! Writing a protocol for the round engine.
//!
//! Every vertex learns the smallest id in its realized component within `k`
//! rounds by flooding. The engine delivers messages only over realized
//! edges, meters message sizes against the declared budget and rejects
//! anything else.
//!
//! Run with `cargo run --example custom_protocol`.

use stochgraph::engine::{id_bits, Bits, Incoming, Outgoing};
use stochgraph::graph::{generate, sample_realization, EdgeId, GeneratorKind, ProbModel};
use stochgraph::{NodeProgram, NodeView, Protocol, Simulator, StochasticGraph, VertexId};

struct MinFlood {
    rounds: usize,
}

struct FloodNode {
    best: VertexId,
    edges: Vec<EdgeId>,
    rounds_left: usize,
    n: usize,
}

impl Protocol for MinFlood {
    type Payload = ();
    type Node = FloodNode;

    fn message_budget_bits(&self, n: usize) -> u32 {
        id_bits(n)
    }

    fn preprocess(&self, sg: &StochasticGraph, _: u64) -> Vec<()> {
        vec![(); sg.n()]
    }

    fn start(&self, view: NodeView, _: ()) -> FloodNode {
        FloodNode {
            best: view.vertex,
            edges: view.neighbors.iter().map(|&(_, e)| e).collect(),
            rounds_left: self.rounds,
            n: view.n,
        }
    }
}

impl NodeProgram for FloodNode {
    type Output = VertexId;

    fn wants_round(&self) -> bool {
        self.rounds_left > 0
    }

    fn send(&mut self, _: usize, out: &mut Vec<Outgoing>) {
        let payload = Bits::new(self.best as u64, id_bits(self.n));
        out.extend(self.edges.iter().map(|&edge| Outgoing { edge, payload }));
    }

    fn receive(&mut self, _: usize, inbox: &[Incoming]) {
        self.rounds_left = self.rounds_left.saturating_sub(1);
        for m in inbox {
            self.best = self.best.min(m.payload.value() as VertexId);
        }
    }

    fn finish(self) -> VertexId {
        self.best
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sg = generate(GeneratorKind::Path { n: 8 }, ProbModel::Uniform(0.8), 0)?;
    let real = sample_realization(&sg, 3);
    let proto = MinFlood { rounds: 7 };
    let res = Simulator::new(&sg, &proto).run(&real, 0, 10)?;
    println!("component minima: {:?}", res.outputs);
    println!("trace: {}", res.trace.to_json());

    // too few rounds allowed: the engine stops with RoundLimit
    let err = Simulator::new(&sg, &proto).run(&real, 0, 3).unwrap_err();
    println!("with max_rounds = 3: {err}");
    Ok(())
}
