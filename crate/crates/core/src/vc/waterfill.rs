use std::sync::Arc;

use super::{check_cover, VcError};
use crate::engine::{self, Bits, Incoming, NodeProgram, NodeView, Outgoing, Protocol, RunTrace};
use crate::graph::{EdgeId, Realization, StochasticGraph, VertexId};

/// Vertices with `φ_v` at least this close to 1 count as saturated.
const SATURATION_TOL: f64 = 1e-9;
/// Event tolerance inside the water-filling loop.
const EVENT_TOL: f64 = 1e-12;

/// Derived constants for a given `ε̄ ∈ (0, 1/4]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VCConstants {
    pub eps: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub xi: f64,
    pub eps4: f64,
    pub eps5: f64,
    /// The final approximation slack: the cover is a `(2 + eps_final)`
    /// approximation.
    pub eps_final: f64,
}

impl VCConstants {
    pub fn new(eps: f64) -> Result<Self, VcError> {
        if !(eps > 0.0 && eps <= 0.25) {
            return Err(VcError::Epsilon(eps));
        }
        let eps1 = eps.powi(3);
        let eps2 = eps + eps1;
        let eps3 = eps - eps1;
        Ok(VCConstants {
            eps,
            eps1,
            eps2,
            eps3,
            xi: (1.0 + eps2) / eps1,
            eps4: 2.0 * eps,
            eps5: eps,
            eps_final: (2.0 + eps) * (1.0 + 2.0 * eps) / (1.0 - eps) - 2.0,
        })
    }

    /// Weight added to an active edge per distributed iteration.
    pub fn increment(&self) -> f64 {
        self.eps3 / self.xi
    }

    /// Iterations after which every vertex is inactive.
    pub fn iterations(&self) -> usize {
        (self.xi / self.eps3).ceil() as usize
    }

    /// One announcement round plus one round per iteration.
    pub fn round_bound(&self) -> usize {
        1 + self.iterations()
    }
}

/// Output of the preprocessing water-filling.
#[derive(Clone, Debug, PartialEq)]
pub struct WaterfillState {
    pub phi: Vec<f64>,
    pub phi_v: Vec<f64>,
    pub in_f: Vec<bool>,
    /// Final global scale; active edges end at `scale · p_e`.
    pub scale: f64,
}

impl WaterfillState {
    pub fn f_set(&self) -> Vec<VertexId> {
        (0..self.in_f.len()).filter(|&v| self.in_f[v]).collect()
    }

    /// `φ_e <= ε1·p_e` everywhere, with equality on edges that avoid `F`,
    /// and `φ_v <= 1`.
    pub fn check(&self, sg: &StochasticGraph, c: &VCConstants) -> Result<(), VcError> {
        for (e, &(u, v)) in sg.graph().edges().iter().enumerate() {
            let cap = c.eps1 * sg.p(e);
            if self.phi[e] > cap * (1.0 + 1e-12) {
                return Err(VcError::Invariant(format!(
                    "φ_{e} = {} exceeds ε1·p = {cap}",
                    self.phi[e]
                )));
            }
            if !self.in_f[u] && !self.in_f[v] && (self.phi[e] - cap).abs() > 1e-12 * cap.max(1e-300) + 1e-15 {
                return Err(VcError::Invariant(format!(
                    "φ_{e} = {} below ε1·p = {cap} off F",
                    self.phi[e]
                )));
            }
        }
        if let Some(v) = (0..self.phi_v.len()).find(|&v| self.phi_v[v] > 1.0 + SATURATION_TOL) {
            return Err(VcError::Invariant(format!("φ_{v} = {} exceeds 1", self.phi_v[v])));
        }
        Ok(())
    }
}

/// Raises every active edge at rate `p_e` until each vertex saturates or the
/// global scale reaches `ε1`.
///
/// Event driven: each step advances the scale to the next saturation or to
/// the budget, so there are at most `n + 1` steps.
pub fn waterfilling(sg: &StochasticGraph, c: &VCConstants) -> WaterfillState {
    let g = sg.graph();
    let n = g.n();
    let mut active_v = vec![true; n];
    let mut frozen: Vec<Option<f64>> = vec![None; g.m()];
    let mut phi_v = vec![0.0; n];
    let mut s = 0.0f64;
    loop {
        // rate of each vertex from its active edges
        let mut rate = vec![0.0; n];
        let mut any = false;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if frozen[e].is_none() && active_v[u] && active_v[v] {
                rate[u] += sg.p(e);
                rate[v] += sg.p(e);
                any = true;
            }
        }
        if !any || s >= c.eps1 {
            break;
        }
        let mut delta = c.eps1 - s;
        let mut budget_binds = true;
        for v in 0..n {
            if active_v[v] && rate[v] > 0.0 {
                let d = (1.0 - phi_v[v]) / rate[v];
                if d < delta {
                    delta = d;
                    budget_binds = false;
                }
            }
        }
        s = if budget_binds { c.eps1 } else { s + delta };
        for v in 0..n {
            if rate[v] > 0.0 {
                phi_v[v] += delta * rate[v];
            }
        }
        let saturated: Vec<VertexId> = (0..n)
            .filter(|&v| active_v[v] && rate[v] > 0.0 && 1.0 - phi_v[v] <= EVENT_TOL)
            .collect();
        for &v in &saturated {
            active_v[v] = false;
        }
        for &v in &saturated {
            for &(w, e) in g.neighbors(v) {
                if frozen[e].is_none() && (active_v[w] || saturated.contains(&w)) {
                    frozen[e] = Some(s * sg.p(e));
                }
            }
        }
    }
    let phi: Vec<f64> = (0..g.m()).map(|e| frozen[e].unwrap_or(s * sg.p(e))).collect();
    let mut phi_v = vec![0.0; n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        phi_v[u] += phi[e];
        phi_v[v] += phi[e];
    }
    let in_f = phi_v.iter().map(|&x| x >= 1.0 - SATURATION_TOL).collect();
    WaterfillState {
        phi,
        phi_v,
        in_f,
        scale: s,
    }
}

/// Realization-dependent quantities of the distributed phase.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiSets {
    /// `χ_e = φ_e / p_e` on realized edges, else 0.
    pub chi: Vec<f64>,
    pub chi_v: Vec<f64>,
    /// `χ_v >= φ_v + ε2`.
    pub b: Vec<bool>,
    /// `χ_v >= φ_v + ε2 - ε1`.
    pub b_plus: Vec<bool>,
}

pub fn realize_chi(
    state: &WaterfillState,
    sg: &StochasticGraph,
    realization: &Realization,
    c: &VCConstants,
) -> ChiSets {
    let g = sg.graph();
    let chi: Vec<f64> = (0..g.m())
        .map(|e| {
            if realization.is_present(e) {
                state.phi[e] / sg.p(e)
            } else {
                0.0
            }
        })
        .collect();
    let mut chi_v = vec![0.0; g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        chi_v[u] += chi[e];
        chi_v[v] += chi[e];
    }
    let b = (0..g.n()).map(|v| chi_v[v] >= state.phi_v[v] + c.eps2).collect();
    let b_plus = (0..g.n())
        .map(|v| chi_v[v] >= state.phi_v[v] + c.eps2 - c.eps1)
        .collect();
    ChiSets { chi, chi_v, b, b_plus }
}

/// `y_e = (χ_e + ψ_e) / (1 + ε4)` on edges avoiding `B`, else 0. Fails
/// naming the first vertex whose load exceeds `1 + 1e-9`.
pub fn witness_fractional_matching(
    sg: &StochasticGraph,
    chi: &[f64],
    psi: &[f64],
    b: &[bool],
    c: &VCConstants,
) -> Result<Vec<f64>, VcError> {
    let g = sg.graph();
    let y: Vec<f64> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            if b[u] || b[v] {
                0.0
            } else {
                (chi[e] + psi[e]) / (1.0 + c.eps4)
            }
        })
        .collect();
    let mut load = vec![0.0; g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        load[u] += y[e];
        load[v] += y[e];
    }
    match (0..g.n()).find(|&v| load[v] > 1.0 + 1e-9) {
        Some(vertex) => Err(VcError::WitnessInfeasible {
            vertex,
            load: load[vertex],
        }),
        None => Ok(y),
    }
}

/// The `(2 + ε)` cover protocol. Preprocessing output is computed once and
/// shared by every run.
#[derive(Clone, Debug)]
pub struct WaterfillVc {
    consts: VCConstants,
    state: Arc<WaterfillState>,
}

pub fn distributed_waterfilling_protocol(state: WaterfillState, consts: VCConstants) -> WaterfillVc {
    WaterfillVc {
        consts,
        state: Arc::new(state),
    }
}

impl WaterfillVc {
    /// Runs the preprocessing water-filling on `sg`.
    pub fn new(sg: &StochasticGraph, consts: VCConstants) -> Self {
        distributed_waterfilling_protocol(waterfilling(sg, &consts), consts)
    }

    pub fn state(&self) -> &WaterfillState {
        &self.state
    }

    pub fn consts(&self) -> &VCConstants {
        &self.consts
    }
}

/// What a vertex knows before the realization.
pub struct WaterfillPayload {
    phi_v: f64,
    in_f: bool,
    /// `(edge, φ_e / p_e)` over incident base edges, by edge id.
    scaled: Vec<(EdgeId, f64)>,
    consts: VCConstants,
}

/// Per-vertex result of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct WaterfillOutput {
    pub in_cover: bool,
    pub in_b: bool,
    pub chi_v: f64,
    /// Incident `Q*` edges with the number of increments each received.
    pub q_edges: Vec<(EdgeId, u32)>,
    pub psi_v: f64,
}

pub struct WaterfillNode {
    phi_v: f64,
    in_f: bool,
    in_b: bool,
    chi_v: f64,
    inc: f64,
    realized: Vec<(VertexId, EdgeId)>,
    announced: bool,
    /// `(neighbor, edge, increments, possibly active)` over `Q*`.
    q: Vec<(VertexId, EdgeId, u32, bool)>,
    total: u64,
    sent: bool,
}

impl WaterfillNode {
    fn psi_v(&self) -> f64 {
        self.total as f64 * self.inc
    }

    fn active(&self) -> bool {
        !self.in_f && !self.in_b && self.psi_v() < 1.0 - self.phi_v
    }
}

impl Protocol for WaterfillVc {
    type Payload = WaterfillPayload;
    type Node = WaterfillNode;

    fn message_budget_bits(&self, _: usize) -> u32 {
        1
    }

    fn preprocess(&self, sg: &StochasticGraph, _: u64) -> Vec<WaterfillPayload> {
        let g = sg.graph();
        (0..g.n())
            .map(|v| {
                let mut scaled: Vec<(EdgeId, f64)> = g
                    .neighbors(v)
                    .iter()
                    .map(|&(_, e)| (e, self.state.phi[e] / sg.p(e)))
                    .collect();
                scaled.sort_unstable_by_key(|&(e, _)| e);
                WaterfillPayload {
                    phi_v: self.state.phi_v[v],
                    in_f: self.state.in_f[v],
                    scaled,
                    consts: self.consts,
                }
            })
            .collect()
    }

    fn start(&self, view: NodeView, pl: WaterfillPayload) -> WaterfillNode {
        let chi_v: f64 = view
            .neighbors
            .iter()
            .map(|&(_, e)| {
                let i = pl.scaled.binary_search_by_key(&e, |&(x, _)| x).expect("incident edge");
                pl.scaled[i].1
            })
            .sum();
        WaterfillNode {
            phi_v: pl.phi_v,
            in_f: pl.in_f,
            in_b: chi_v >= pl.phi_v + pl.consts.eps2,
            chi_v,
            inc: pl.consts.increment(),
            realized: view.neighbors,
            announced: false,
            q: Vec::new(),
            total: 0,
            sent: false,
        }
    }
}

impl NodeProgram for WaterfillNode {
    type Output = WaterfillOutput;

    fn wants_round(&self) -> bool {
        if !self.announced {
            return !self.realized.is_empty();
        }
        self.active() && self.q.iter().any(|x| x.3)
    }

    fn send(&mut self, _: usize, out: &mut Vec<Outgoing>) {
        if !self.announced {
            let flag = Bits::bit(self.in_f || self.in_b);
            out.extend(self.realized.iter().map(|&(_, edge)| Outgoing { edge, payload: flag }));
            return;
        }
        self.sent = self.active();
        if self.sent {
            out.extend(self.q.iter().filter(|x| x.3).map(|x| Outgoing {
                edge: x.1,
                payload: Bits::bit(true),
            }));
        }
    }

    fn receive(&mut self, _: usize, inbox: &[Incoming]) {
        if !self.announced {
            self.announced = true;
            if !(self.in_f || self.in_b) {
                // realized neighbors that announced 0 span Q*
                self.q = inbox
                    .iter()
                    .filter(|m| !m.payload.as_bool())
                    .map(|m| (m.from, m.edge, 0, true))
                    .collect();
                self.q.sort_unstable_by_key(|x| x.1);
            }
            return;
        }
        if !std::mem::take(&mut self.sent) {
            // inactive: a neighbor's last activity bit crossed our silence
            return;
        }
        for x in self.q.iter_mut().filter(|x| x.3) {
            if inbox.iter().any(|m| m.edge == x.1) {
                x.2 += 1;
                self.total += 1;
            } else {
                x.3 = false;
            }
        }
    }

    fn finish(self) -> WaterfillOutput {
        let psi_v = self.psi_v();
        WaterfillOutput {
            in_cover: self.in_f || self.in_b || psi_v >= 1.0 - self.phi_v,
            in_b: self.in_b,
            chi_v: self.chi_v,
            q_edges: self.q.iter().map(|x| (x.1, x.2)).collect(),
            psi_v,
        }
    }
}

/// A checked run of the cover pipeline.
#[derive(Clone, Debug)]
pub struct WaterfillRun {
    pub cover: Vec<bool>,
    pub trace: RunTrace,
    pub sets: ChiSets,
    /// Realized edges with no endpoint in `F ∪ B`.
    pub q_star: Vec<EdgeId>,
    pub max_q_degree: usize,
    pub psi: Vec<f64>,
    /// Witness fractional matching of the realization.
    pub y: Vec<f64>,
}

impl WaterfillRun {
    pub fn size(&self) -> usize {
        self.cover.iter().filter(|&&b| b).count()
    }

    pub fn witness_total(&self) -> f64 {
        self.y.iter().sum()
    }
}

/// Runs the protocol on one realization and checks it against a central
/// recomputation: `B` agrees with the local view, `Q*` has degree at most
/// `ξ`, both endpoints agree on `ψ`, the witness is feasible, the cover is
/// valid, and the trace stays within the round and bit budgets.
pub fn run_waterfill_vc(
    sg: &StochasticGraph,
    realization: &Realization,
    protocol: &WaterfillVc,
    seed: u64,
) -> Result<WaterfillRun, VcError> {
    let c = protocol.consts;
    let res = engine::run(sg, realization, protocol, seed, c.round_bound())?;
    let g = sg.graph();
    let sets = realize_chi(&protocol.state, sg, realization, &c);
    let mut psi_count: Vec<Option<u32>> = vec![None; g.m()];
    let mut max_q_degree = 0;
    for (v, out) in res.outputs.iter().enumerate() {
        if out.in_b != sets.b[v] {
            return Err(VcError::Invariant(format!("vertex {v} disagrees on B membership")));
        }
        max_q_degree = max_q_degree.max(out.q_edges.len());
        for &(e, k) in &out.q_edges {
            match psi_count[e] {
                None => psi_count[e] = Some(k),
                Some(k0) if k0 == k => {}
                Some(k0) => {
                    return Err(VcError::Invariant(format!(
                        "edge {e}: endpoints count {k0} and {k} increments"
                    )));
                }
            }
        }
    }
    let fb = |v: VertexId| protocol.state.in_f[v] || sets.b[v];
    let q_star: Vec<EdgeId> = realization
        .realized_edges()
        .filter(|&e| {
            let (u, v) = g.endpoints(e);
            !fb(u) && !fb(v)
        })
        .collect();
    if q_star.len() != psi_count.iter().filter(|x| x.is_some()).count() {
        return Err(VcError::Invariant("local Q* differs from the central one".into()));
    }
    if max_q_degree as f64 > c.xi {
        return Err(VcError::Invariant(format!(
            "Q* degree {max_q_degree} exceeds ξ = {}",
            c.xi
        )));
    }
    let psi: Vec<f64> = psi_count
        .iter()
        .map(|k| f64::from(k.unwrap_or(0)) * c.increment())
        .collect();
    let cover: Vec<bool> = res.outputs.iter().map(|o| o.in_cover).collect();
    check_cover(g, realization, &cover)?;
    let y = witness_fractional_matching(sg, &sets.chi, &psi, &sets.b, &c)?;
    if res.trace.rounds > c.round_bound() || res.trace.max_payload_bits > 1 {
        return Err(VcError::Invariant(format!(
            "trace {} rounds / {} bits over budget",
            res.trace.rounds, res.trace.max_payload_bits
        )));
    }
    Ok(WaterfillRun {
        cover,
        trace: res.trace,
        sets,
        q_star,
        max_q_degree,
        psi,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, sample_realization, GeneratorKind, ProbModel};
    use crate::stats::MCEstimate;

    #[test]
    fn constants() {
        let c = VCConstants::new(0.25).unwrap();
        assert_eq!(c.eps1, 1.0 / 64.0);
        assert!((c.xi - 81.0).abs() < 1e-12);
        assert_eq!(c.iterations(), 346);
        assert!(c.eps_final <= 10.0 * c.eps);
        let c = VCConstants::new(0.1).unwrap();
        assert!((c.xi - 1101.0).abs() < 1e-9);
        assert_eq!(c.iterations(), 11122);
        assert!(VCConstants::new(0.3).is_err());
        assert!(VCConstants::new(0.0).is_err());
    }

    #[test]
    fn single_edge_budget_binds() {
        let sg = StochasticGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let c = VCConstants::new(0.25).unwrap();
        let st = waterfilling(&sg, &c);
        assert_eq!(st.phi, vec![1.0 / 64.0]);
        assert!(st.f_set().is_empty());
        st.check(&sg, &c).unwrap();
    }

    #[test]
    fn heavy_vertex_saturates() {
        // Σ p at the center = 100 > 1/ε1 = 64
        let sg = StochasticGraph::from_edges(101, (1..101).map(|v| (0, v, 1.0))).unwrap();
        let c = VCConstants::new(0.25).unwrap();
        let st = waterfilling(&sg, &c);
        assert_eq!(st.f_set(), vec![0]);
        assert!((st.phi_v[0] - 1.0).abs() < 1e-9);
        st.check(&sg, &c).unwrap();
        let empty = waterfilling(&StochasticGraph::from_edges(3, []).unwrap(), &c);
        assert!(empty.phi.is_empty() && empty.f_set().is_empty());
    }

    #[test]
    fn waterfilling_invariants_random() {
        let c = VCConstants::new(0.25).unwrap();
        for seed in 0..20 {
            let sg = generate(
                GeneratorKind::ErdosRenyi { n: 60, density: 0.9 },
                ProbModel::UniformRange(0.2, 1.0),
                seed,
            )
            .unwrap();
            let st = waterfilling(&sg, &c);
            st.check(&sg, &c).unwrap();
        }
    }

    #[test]
    fn deterministic_realization_has_no_bad_vertices() {
        let sg = generate(
            GeneratorKind::ErdosRenyi { n: 30, density: 0.3 },
            ProbModel::Uniform(1.0),
            4,
        )
        .unwrap();
        let c = VCConstants::new(0.25).unwrap();
        let st = waterfilling(&sg, &c);
        let sets = realize_chi(&st, &sg, &Realization::full(sg.graph()), &c);
        assert!(sets.b.iter().all(|&b| !b));
        let none = Realization::from_bits(sg.graph(), vec![false; sg.m()]).unwrap();
        let sets = realize_chi(&st, &sg, &none, &c);
        assert!(sets.chi.iter().all(|&x| x == 0.0) && sets.b.iter().all(|&b| !b));
    }

    #[test]
    fn chi_is_unbiased() {
        let sg = StochasticGraph::from_edges(3, [(0, 1, 0.3), (1, 2, 0.6), (0, 2, 0.8)]).unwrap();
        let c = VCConstants::new(0.25).unwrap();
        let st = waterfilling(&sg, &c);
        let samples: Vec<f64> = (0..20_000)
            .map(|t| realize_chi(&st, &sg, &sample_realization(&sg, t), &c).chi_v[1])
            .collect();
        let est = MCEstimate::from_samples(&samples);
        assert!((est.mean - st.phi_v[1]).abs() <= 4.0 * est.stderr);
    }

    #[test]
    fn single_edge_runs_to_saturation() {
        let sg = StochasticGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let c = VCConstants::new(0.25).unwrap();
        let proto = WaterfillVc::new(&sg, c);
        let run = run_waterfill_vc(&sg, &Realization::full(sg.graph()), &proto, 0).unwrap();
        // both sides need ⌈(1 - 1/64)/increment⌉ increments
        let k = ((1.0 - 1.0 / 64.0) / c.increment()).ceil();
        assert!((run.psi[0] - k * c.increment()).abs() < 1e-12);
        assert!(run.psi[0] + 1.0 / 64.0 >= 1.0);
        assert_eq!(run.trace.rounds, 1 + k as usize);
        assert_eq!(run.size(), 2);
        assert_eq!(run.trace.max_payload_bits, 1);
    }

    #[test]
    fn f_touching_realization_needs_one_round() {
        let sg = StochasticGraph::from_edges(101, (1..101).map(|v| (0, v, 1.0))).unwrap();
        let proto = WaterfillVc::new(&sg, VCConstants::new(0.25).unwrap());
        let run = run_waterfill_vc(&sg, &Realization::full(sg.graph()), &proto, 0).unwrap();
        assert_eq!(run.trace.rounds, 1);
        assert!(run.psi.iter().all(|&x| x == 0.0));
        assert!(run.cover[0]);
    }

    #[test]
    fn random_runs_are_checked() {
        for (eps, n) in [(0.25, 40), (0.1, 20)] {
            let c = VCConstants::new(eps).unwrap();
            let sg = generate(
                GeneratorKind::ErdosRenyi { n, density: 0.3 },
                ProbModel::UniformRange(0.2, 0.9),
                9,
            )
            .unwrap();
            let proto = WaterfillVc::new(&sg, c);
            for t in 0..20 {
                let r = sample_realization(&sg, t);
                let run = run_waterfill_vc(&sg, &r, &proto, t).unwrap();
                assert!(run.trace.rounds <= c.round_bound());
            }
        }
    }
}
