use std::sync::Arc;

use rand::Rng;

use super::{matching_from_partners, MatchingError};
use crate::engine::{self, id_bits, Bits, Incoming, NodeProgram, NodeView, Outgoing, Protocol, RunTrace};
use crate::graph::{shuffled, BaseGraph, EdgeId, Realization, StochasticGraph, VertexId};
use crate::rng::{self, StreamRng};

/// Keeps edges in a random order while both endpoints have fewer than `cap`
/// kept edges. Returns the kept-edge mask.
pub fn degree_cap_sparsifier(sg: &StochasticGraph, cap: usize, seed: u64) -> Result<Vec<bool>, MatchingError> {
    if cap == 0 {
        return Err(MatchingError::Cap);
    }
    let g = sg.graph();
    let mut rng = rng::stream(seed, "sparsify", 0);
    let mut deg = vec![0usize; g.n()];
    let mut keep = vec![false; g.m()];
    for e in shuffled(g.m(), &mut rng) {
        let (u, v) = g.endpoints(e);
        if deg[u] < cap && deg[v] < cap {
            deg[u] += 1;
            deg[v] += 1;
            keep[e] = true;
        }
    }
    Ok(keep)
}

/// `Q*` with the vertices of realized `Q`-degree at least `θ` removed.
#[derive(Clone, Debug, PartialEq)]
pub struct PrunedInstance {
    pub theta: f64,
    /// Realized edges of `Q`.
    pub q_star: Vec<EdgeId>,
    pub degree: Vec<usize>,
    pub v_bad: Vec<bool>,
    /// Edges of `Q*[V \ V_bad]`.
    pub kept: Vec<EdgeId>,
}

impl PrunedInstance {
    pub fn bad_count(&self) -> usize {
        self.v_bad.iter().filter(|&&b| b).count()
    }

    /// Degrees in `Q*[V \ V_bad]`.
    pub fn kept_degrees(&self, g: &BaseGraph) -> Vec<usize> {
        let mut d = vec![0usize; g.n()];
        for &e in &self.kept {
            let (u, v) = g.endpoints(e);
            d[u] += 1;
            d[v] += 1;
        }
        d
    }
}

pub fn prune_high_degree(
    sg: &StochasticGraph,
    q: &[bool],
    realization: &Realization,
    theta: f64,
) -> Result<PrunedInstance, MatchingError> {
    if !(theta >= 1.0) {
        return Err(MatchingError::Theta(theta));
    }
    let g = sg.graph();
    let q_star: Vec<EdgeId> = realization.realized_edges().filter(|&e| q[e]).collect();
    let mut degree = vec![0usize; g.n()];
    for &e in &q_star {
        let (u, v) = g.endpoints(e);
        degree[u] += 1;
        degree[v] += 1;
    }
    let v_bad: Vec<bool> = degree.iter().map(|&d| d as f64 >= theta).collect();
    let kept = q_star
        .iter()
        .copied()
        .filter(|&e| {
            let (u, v) = g.endpoints(e);
            !v_bad[u] && !v_bad[v]
        })
        .collect();
    Ok(PrunedInstance {
        theta,
        q_star,
        degree,
        v_bad,
        kept,
    })
}

/// Repetitions of each augmenting-path length.
const AUG_REPEATS: usize = 4;

/// The fixed round plan: one announcement round, `phases` propose/grant
/// phases of 4 rounds, then for `j = 1..=k` and each repetition a spread,
/// confirm and commit window of `2j + 1` rounds each.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub theta: f64,
    /// Maximum degree of the pruned graph, `⌈θ⌉ - 1`.
    pub max_degree: usize,
    pub phases: usize,
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Announce,
    Match { step: usize },
    Spread { s: usize, len: usize },
    Confirm { s: usize, len: usize },
    Commit { s: usize, len: usize },
    Done,
}

impl Schedule {
    /// `phase_const` scales the number of propose/grant phases,
    /// `⌈c·log₂ D + c⌉`.
    pub fn new(theta: f64, delta: f64, phase_const: f64) -> Self {
        let max_degree = (theta.ceil() as usize).saturating_sub(1);
        let phases = (phase_const * (max_degree.max(1) as f64).log2() + phase_const).ceil() as usize;
        let k = ((1.0 / delta).ceil() as usize).saturating_sub(1);
        Schedule {
            theta,
            max_degree,
            phases,
            k,
        }
    }

    pub fn matching_rounds(&self) -> usize {
        4 * self.phases
    }

    pub fn augmentation_rounds(&self) -> usize {
        (1..=self.k).map(|j| AUG_REPEATS * 3 * (2 * j + 1)).sum()
    }

    pub fn total_rounds(&self) -> usize {
        1 + self.matching_rounds() + self.augmentation_rounds()
    }

    fn stage(&self, round: usize) -> Stage {
        if round == 1 {
            return Stage::Announce;
        }
        let r = round - 2;
        if r < self.matching_rounds() {
            return Stage::Match { step: r % 4 };
        }
        let mut r = r - self.matching_rounds();
        for j in 1..=self.k {
            let len = 2 * j + 1;
            for _ in 0..AUG_REPEATS {
                if r < 3 * len {
                    let s = r % len + 1;
                    return match r / len {
                        0 => Stage::Spread { s, len },
                        1 => Stage::Confirm { s, len },
                        _ => Stage::Commit { s, len },
                    };
                }
                r -= 3 * len;
            }
        }
        Stage::Done
    }
}

/// Matching on `Q*[V \ V_bad]` with `Q` fixed in preprocessing.
#[derive(Clone, Debug)]
pub struct PolyEpsMatching {
    q: Arc<Vec<bool>>,
    schedule: Schedule,
    cap: Option<usize>,
}

/// The distributed stage on its own, over the base edges marked in `q`.
pub fn distributed_matching_approx_protocol(q: Vec<bool>, theta: f64, delta: f64, phase_const: f64) -> PolyEpsMatching {
    PolyEpsMatching {
        q: Arc::new(q),
        schedule: Schedule::new(theta, delta, phase_const),
        cap: None,
    }
}

/// Parameters of the full pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyEpsConfig {
    pub eps: f64,
    /// Pruning threshold; defaults to `ε^-10`.
    pub theta: Option<f64>,
    /// Sparsifier cap; defaults to `⌈c_a / (ε^5 p)⌉`.
    pub cap: Option<usize>,
    pub c_a: f64,
    pub phase_const: f64,
    /// Seed of the preprocessing sparsifier.
    pub seed: u64,
}

impl PolyEpsConfig {
    pub fn new(eps: f64) -> Self {
        PolyEpsConfig {
            eps,
            theta: None,
            cap: None,
            c_a: 8.0,
            phase_const: 4.0,
            seed: 0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or_else(|| self.eps.powi(-10))
    }
}

/// Sparsifies `sg` (uniform `p` required) and builds the protocol with
/// `δ = ε/2`.
pub fn matching_polyeps_pipeline(sg: &StochasticGraph, cfg: &PolyEpsConfig) -> Result<PolyEpsMatching, MatchingError> {
    if !(cfg.eps > 0.0 && cfg.eps < 0.5) {
        return Err(MatchingError::Epsilon(cfg.eps));
    }
    let p = match sg.uniform_probability() {
        Some(p) => p,
        None if sg.m() == 0 => 1.0,
        None => return Err(MatchingError::NonUniform),
    };
    let theta = cfg.theta();
    if !(theta >= 1.0) {
        return Err(MatchingError::Theta(theta));
    }
    let cap = match cfg.cap {
        Some(c) => c,
        None => {
            let c = (cfg.c_a / (cfg.eps.powi(5) * p)).ceil();
            if c >= usize::MAX as f64 {
                usize::MAX
            } else {
                c as usize
            }
        }
    };
    let q = degree_cap_sparsifier(sg, cap, cfg.seed)?;
    let mut proto = distributed_matching_approx_protocol(q, theta, cfg.eps / 2.0, cfg.phase_const);
    proto.cap = Some(cap);
    Ok(proto)
}

impl PolyEpsMatching {
    pub fn q(&self) -> &[bool] {
        &self.q
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }
}

pub struct PolyEpsPayload {
    q: Arc<Vec<bool>>,
    schedule: Schedule,
}

/// Per-vertex result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyEpsOutput {
    pub partner: Option<(VertexId, EdgeId)>,
    pub bad: bool,
    /// Degree in `Q*`.
    pub q_degree: usize,
    /// Degree in `Q*[V \ V_bad]`.
    pub live_degree: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Idle,
    Origin,
    Terminal,
}

#[derive(Clone, Copy, Debug)]
struct Token {
    origin: VertexId,
    parent: usize,
    odd: bool,
}

pub struct PolyEpsNode {
    v: VertexId,
    n: usize,
    schedule: Schedule,
    rng: StreamRng,
    round: usize,
    /// `Q*` neighbors, then after the announcement the live ones.
    q_nbrs: Vec<(VertexId, EdgeId)>,
    q_degree: usize,
    bad: bool,
    live: Vec<(VertexId, EdgeId)>,
    free_nbr: Vec<bool>,
    mate: Option<usize>,
    // propose/grant state
    target: Option<usize>,
    proposers: Vec<usize>,
    granted: Option<usize>,
    target_granted: bool,
    newly_matched: bool,
    // augmentation state
    role: Role,
    token: Option<Token>,
    forward: bool,
    claimed: bool,
    child: Option<usize>,
    pass_on: bool,
}

impl Protocol for PolyEpsMatching {
    type Payload = PolyEpsPayload;
    type Node = PolyEpsNode;

    fn message_budget_bits(&self, n: usize) -> u32 {
        id_bits(n)
    }

    fn preprocess(&self, sg: &StochasticGraph, _: u64) -> Vec<PolyEpsPayload> {
        assert_eq!(self.q.len(), sg.m(), "sparsifier built for another graph");
        (0..sg.n())
            .map(|_| PolyEpsPayload {
                q: Arc::clone(&self.q),
                schedule: self.schedule,
            })
            .collect()
    }

    fn start(&self, view: NodeView, pl: PolyEpsPayload) -> PolyEpsNode {
        let mut q_nbrs: Vec<(VertexId, EdgeId)> = view.neighbors.iter().copied().filter(|&(_, e)| pl.q[e]).collect();
        q_nbrs.sort_unstable();
        let q_degree = q_nbrs.len();
        PolyEpsNode {
            v: view.vertex,
            n: view.n,
            schedule: pl.schedule,
            rng: view.rng,
            round: 0,
            bad: q_degree as f64 >= pl.schedule.theta,
            q_nbrs,
            q_degree,
            live: Vec::new(),
            free_nbr: Vec::new(),
            mate: None,
            target: None,
            proposers: Vec::new(),
            granted: None,
            target_granted: false,
            newly_matched: false,
            role: Role::Idle,
            token: None,
            forward: false,
            claimed: false,
            child: None,
            pass_on: false,
        }
    }
}

impl PolyEpsNode {
    fn bit(&self, i: usize, out: &mut Vec<Outgoing>) {
        out.push(Outgoing {
            edge: self.live[i].1,
            payload: Bits::bit(true),
        });
    }

    fn index_of(&self, from: VertexId) -> usize {
        self.live
            .binary_search_by_key(&from, |&(u, _)| u)
            .expect("message from a live neighbor")
    }

    fn token_bits(&self, origin: VertexId) -> Bits {
        Bits::new(origin as u64, id_bits(self.n))
    }

    fn send_match(&mut self, step: usize, out: &mut Vec<Outgoing>) {
        match step {
            0 => {
                self.target = None;
                self.proposers.clear();
                self.granted = None;
                self.target_granted = false;
                self.newly_matched = false;
                if self.mate.is_none() {
                    let free: Vec<usize> = (0..self.live.len()).filter(|&i| self.free_nbr[i]).collect();
                    if !free.is_empty() {
                        let t = free[self.rng.random_range(0..free.len())];
                        self.target = Some(t);
                        self.bit(t, out);
                    }
                }
            }
            1 => {
                if self.mate.is_none() && !self.proposers.is_empty() {
                    let g = match self.target {
                        Some(t) if self.proposers.contains(&t) => t,
                        _ => *self.proposers.iter().min().unwrap(),
                    };
                    self.granted = Some(g);
                    self.bit(g, out);
                }
            }
            2 => {
                if let Some(t) = self.target {
                    if self.target_granted && (self.granted.is_none() || self.granted == Some(t)) {
                        self.mate = Some(t);
                        self.newly_matched = true;
                        if self.granted.is_none() {
                            self.bit(t, out);
                        }
                    }
                }
            }
            _ => {
                if self.newly_matched {
                    for i in 0..self.live.len() {
                        self.bit(i, out);
                    }
                }
            }
        }
    }

    fn receive_match(&mut self, step: usize, inbox: &[Incoming]) {
        let from: Vec<usize> = inbox.iter().map(|m| self.index_of(m.from)).collect();
        match step {
            0 => self.proposers = from,
            1 => self.target_granted = self.target.is_some_and(|t| from.contains(&t)),
            2 => {
                if let Some(g) = self.granted {
                    if self.mate.is_none() && from.contains(&g) {
                        self.mate = Some(g);
                        self.newly_matched = true;
                    }
                }
            }
            _ => {
                for i in from {
                    self.free_nbr[i] = false;
                }
                if let Some(m) = self.mate {
                    self.free_nbr[m] = false;
                }
            }
        }
    }

    fn send_aug(&mut self, stage: Stage, out: &mut Vec<Outgoing>) {
        match stage {
            Stage::Spread { s: 1, .. } => {
                self.role = Role::Idle;
                self.token = None;
                self.forward = false;
                self.claimed = false;
                self.child = None;
                self.pass_on = false;
                if self.mate.is_none() && !self.live.is_empty() {
                    self.role = if self.rng.random::<bool>() {
                        Role::Origin
                    } else {
                        Role::Terminal
                    };
                }
                if self.role == Role::Origin {
                    let b = self.token_bits(self.v);
                    out.extend(self.live.iter().map(|&(_, edge)| Outgoing { edge, payload: b }));
                }
            }
            Stage::Spread { .. } => {
                if std::mem::take(&mut self.forward) {
                    let t = self.token.expect("forwarding requires a token");
                    let b = self.token_bits(t.origin);
                    if t.odd {
                        let m = self.mate.expect("odd-depth forwarding vertex is matched");
                        out.push(Outgoing {
                            edge: self.live[m].1,
                            payload: b,
                        });
                    } else {
                        for i in 0..self.live.len() {
                            if Some(i) != self.mate {
                                out.push(Outgoing {
                                    edge: self.live[i].1,
                                    payload: b,
                                });
                            }
                        }
                    }
                }
            }
            Stage::Confirm { s, .. } => {
                let go = if s == 1 {
                    self.claimed
                } else {
                    std::mem::take(&mut self.pass_on)
                };
                if go {
                    let t = self.token.expect("confirming vertex holds a token");
                    self.bit(t.parent, out);
                }
            }
            Stage::Commit { s, .. } => {
                let go = if s == 1 {
                    self.role == Role::Origin && self.child.is_some()
                } else {
                    std::mem::take(&mut self.pass_on)
                };
                if go {
                    let c = self.child.expect("committing vertex has a child");
                    if s == 1 {
                        self.mate = Some(c);
                    }
                    self.bit(c, out);
                }
            }
            _ => {}
        }
    }

    fn receive_aug(&mut self, stage: Stage, inbox: &[Incoming]) {
        match stage {
            Stage::Spread { s, len } => {
                if self.role == Role::Origin || self.token.is_some() || inbox.is_empty() {
                    return;
                }
                let (origin, from) = inbox
                    .iter()
                    .map(|m| (m.payload.value() as VertexId, m.from))
                    .min()
                    .unwrap();
                let parent = self.index_of(from);
                let odd = s % 2 == 1;
                debug_assert_eq!(odd, Some(parent) != self.mate);
                self.token = Some(Token { origin, parent, odd });
                if odd && self.role == Role::Terminal {
                    self.claimed = true;
                } else if s < len && (!odd || self.mate.is_some()) {
                    self.forward = true;
                }
            }
            Stage::Confirm { s, len } => {
                if self.child.is_some() || inbox.is_empty() {
                    return;
                }
                let c = inbox.iter().map(|m| self.index_of(m.from)).min().unwrap();
                self.child = Some(c);
                self.pass_on = self.role != Role::Origin && s < len;
            }
            Stage::Commit { .. } => {
                if inbox.is_empty() {
                    return;
                }
                let t = self.token.expect("commit reaches token holders only");
                self.mate = Some(if t.odd {
                    t.parent
                } else {
                    self.child.expect("even-depth vertex has a child")
                });
                self.pass_on = self.child.is_some();
            }
            _ => {}
        }
    }
}

impl NodeProgram for PolyEpsNode {
    type Output = PolyEpsOutput;

    fn wants_round(&self) -> bool {
        self.round < self.schedule.total_rounds()
    }

    fn send(&mut self, round: usize, out: &mut Vec<Outgoing>) {
        match self.schedule.stage(round) {
            Stage::Announce => {
                let b = Bits::bit(self.bad);
                out.extend(self.q_nbrs.iter().map(|&(_, edge)| Outgoing { edge, payload: b }));
            }
            Stage::Match { step } => self.send_match(step, out),
            Stage::Done => {}
            st => self.send_aug(st, out),
        }
    }

    fn receive(&mut self, round: usize, inbox: &[Incoming]) {
        self.round = round;
        match self.schedule.stage(round) {
            Stage::Announce => {
                if !self.bad {
                    self.live = inbox
                        .iter()
                        .filter(|m| !m.payload.as_bool())
                        .map(|m| (m.from, m.edge))
                        .collect();
                    self.live.sort_unstable();
                }
                self.free_nbr = vec![true; self.live.len()];
            }
            Stage::Match { step } => self.receive_match(step, inbox),
            Stage::Done => {}
            st => self.receive_aug(st, inbox),
        }
    }

    fn finish(self) -> PolyEpsOutput {
        PolyEpsOutput {
            partner: self.mate.map(|i| self.live[i]),
            bad: self.bad,
            q_degree: self.q_degree,
            live_degree: self.live.len(),
        }
    }
}

/// A checked run of the pipeline.
#[derive(Clone, Debug)]
pub struct PolyEpsRun {
    pub matching: Vec<EdgeId>,
    pub trace: RunTrace,
    pub pruned: PrunedInstance,
}

/// Runs the protocol and checks the output against a central pruning:
/// local and central `V_bad` agree, pruned degrees stay below `θ`, the
/// output is a matching of `Q*[V \ V_bad]`, and the trace follows the
/// schedule exactly.
pub fn run_polyeps(
    sg: &StochasticGraph,
    realization: &Realization,
    proto: &PolyEpsMatching,
    seed: u64,
) -> Result<PolyEpsRun, MatchingError> {
    let sched = proto.schedule;
    let res = engine::run(sg, realization, proto, seed, sched.total_rounds())?;
    let pruned = prune_high_degree(sg, &proto.q, realization, sched.theta)?;
    for (v, o) in res.outputs.iter().enumerate() {
        if o.bad != pruned.v_bad[v] || o.q_degree != pruned.degree[v] {
            return Err(MatchingError::Invalid(format!("vertex {v} disagrees on pruning")));
        }
        if o.live_degree > sched.max_degree {
            return Err(MatchingError::Invalid(format!(
                "vertex {v} keeps degree {} >= θ = {}",
                o.live_degree, sched.theta
            )));
        }
    }
    let partners: Vec<_> = res.outputs.iter().map(|o| o.partner).collect();
    let matching = matching_from_partners(sg, realization, &partners)?;
    if let Some(&e) = matching.iter().find(|&&e| pruned.kept.binary_search(&e).is_err()) {
        return Err(MatchingError::Invalid(format!("edge {e} is outside the pruned graph")));
    }
    if res.trace.rounds != sched.total_rounds() {
        return Err(MatchingError::Invalid(format!(
            "{} rounds, schedule has {}",
            res.trace.rounds,
            sched.total_rounds()
        )));
    }
    Ok(PolyEpsRun {
        matching,
        trace: res.trace,
        pruned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, sample_realization, GeneratorKind, ProbModel};
    use crate::oracles::max_matching;

    fn full_proto(sg: &StochasticGraph, theta: f64, eps: f64) -> PolyEpsMatching {
        distributed_matching_approx_protocol(vec![true; sg.m()], theta, eps / 2.0, 4.0)
    }

    #[test]
    fn schedule_layout() {
        let s = Schedule::new(10.0, 0.25, 4.0);
        assert_eq!(s.max_degree, 9);
        assert_eq!(s.k, 3);
        assert_eq!(s.augmentation_rounds(), 4 * 3 * (3 + 5 + 7));
        assert_eq!(s.stage(1), Stage::Announce);
        assert_eq!(s.stage(2), Stage::Match { step: 0 });
        let a = 2 + s.matching_rounds();
        assert_eq!(s.stage(a), Stage::Spread { s: 1, len: 3 });
        assert_eq!(s.stage(a + 3), Stage::Confirm { s: 1, len: 3 });
        assert_eq!(s.stage(a + 8), Stage::Commit { s: 3, len: 3 });
        assert_eq!(s.stage(a + 9), Stage::Spread { s: 1, len: 3 });
        assert_eq!(s.stage(s.total_rounds()), Stage::Commit { s: 7, len: 7 });
        assert_eq!(s.stage(s.total_rounds() + 1), Stage::Done);
    }

    #[test]
    fn single_edge_is_matched() {
        let sg = StochasticGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let proto = full_proto(&sg, 4.0, 0.3);
        for seed in 0..10 {
            let r = run_polyeps(&sg, &Realization::full(sg.graph()), &proto, seed).unwrap();
            assert_eq!(r.matching, vec![0]);
        }
    }

    #[test]
    fn short_augmenting_paths_are_found() {
        // 0-1-2-3: picking the middle edge first is fixed by a length-3 path
        let sg = generate(GeneratorKind::Path { n: 4 }, ProbModel::Uniform(1.0), 0).unwrap();
        let proto = full_proto(&sg, 4.0, 0.3);
        let full = Realization::full(sg.graph());
        let two = (0..100)
            .filter(|&s| run_polyeps(&sg, &full, &proto, s).unwrap().matching.len() == 2)
            .count();
        assert!(two >= 90, "{two}");
    }

    #[test]
    fn maximal_and_near_optimal_on_random_graphs() {
        let sg = generate(
            GeneratorKind::ErdosRenyi { n: 60, density: 0.1 },
            ProbModel::Uniform(0.7),
            4,
        )
        .unwrap();
        let proto = full_proto(&sg, 1e6, 0.3);
        for t in 0..20 {
            let real = sample_realization(&sg, t);
            let r = run_polyeps(&sg, &real, &proto, t).unwrap();
            let mut matched = vec![false; sg.n()];
            for &e in &r.matching {
                let (u, v) = sg.graph().endpoints(e);
                matched[u] = true;
                matched[v] = true;
            }
            for &e in &r.pruned.kept {
                let (u, v) = sg.graph().endpoints(e);
                assert!(matched[u] || matched[v], "edge {e} could be added");
            }
            let opt = max_matching(&real.realized_graph(sg.graph()).0).edges.len();
            assert!(r.matching.len() as f64 >= 0.7 * opt as f64);
            assert!(r.trace.max_payload_bits <= id_bits(sg.n()));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let sg = generate(
            GeneratorKind::ErdosRenyi { n: 30, density: 0.2 },
            ProbModel::Uniform(0.5),
            1,
        )
        .unwrap();
        let proto = matching_polyeps_pipeline(&sg, &PolyEpsConfig::new(0.3)).unwrap();
        let real = sample_realization(&sg, 9);
        let a = run_polyeps(&sg, &real, &proto, 5).unwrap();
        let b = run_polyeps(&sg, &real, &proto, 5).unwrap();
        assert_eq!(a.matching, b.matching);
    }

    #[test]
    fn rounds_do_not_depend_on_n() {
        let mut cfg = PolyEpsConfig::new(0.3);
        cfg.theta = Some(20.0);
        let rounds: Vec<usize> = [10, 40, 160]
            .iter()
            .map(|&n| {
                let sg = generate(
                    GeneratorKind::ErdosRenyi { n, density: 0.1 },
                    ProbModel::Uniform(0.5),
                    2,
                )
                .unwrap();
                let proto = matching_polyeps_pipeline(&sg, &cfg).unwrap();
                run_polyeps(&sg, &sample_realization(&sg, 0), &proto, 0)
                    .unwrap()
                    .trace
                    .rounds
            })
            .collect();
        assert!(rounds.windows(2).all(|w| w[0] == w[1]), "{rounds:?}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let sg = StochasticGraph::from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        assert!(matching_polyeps_pipeline(&sg, &PolyEpsConfig::new(0.5)).is_err());
        assert!(matching_polyeps_pipeline(&sg, &PolyEpsConfig::new(0.0)).is_err());
        let mixed = StochasticGraph::from_edges(3, [(0, 1, 0.5), (1, 2, 0.6)]).unwrap();
        assert!(matches!(
            matching_polyeps_pipeline(&mixed, &PolyEpsConfig::new(0.3)),
            Err(MatchingError::NonUniform)
        ));
        assert!(degree_cap_sparsifier(&sg, 0, 0).is_err());
    }

    #[test]
    fn sparsifier_caps_degrees() {
        let sg = generate(GeneratorKind::Complete { n: 12 }, ProbModel::Uniform(0.5), 0).unwrap();
        let all = degree_cap_sparsifier(&sg, 11, 3).unwrap();
        assert!(all.iter().all(|&b| b));
        for cap in [1, 3] {
            let q = degree_cap_sparsifier(&sg, cap, 3).unwrap();
            let mut d = vec![0; sg.n()];
            for e in (0..sg.m()).filter(|&e| q[e]) {
                let (u, v) = sg.graph().endpoints(e);
                d[u] += 1;
                d[v] += 1;
            }
            assert!(d.iter().all(|&x| x <= cap));
        }
    }

    #[test]
    fn star_center_is_pruned() {
        let sg = generate(GeneratorKind::Star { n: 11 }, ProbModel::Uniform(1.0), 0).unwrap();
        let full = Realization::full(sg.graph());
        let pruned = prune_high_degree(&sg, &vec![true; sg.m()], &full, 5.0).unwrap();
        assert_eq!(pruned.bad_count(), 1);
        assert!(pruned.v_bad[0]);
        assert!(pruned.kept.is_empty());
        let r = run_polyeps(&sg, &full, &full_proto(&sg, 5.0, 0.3), 0).unwrap();
        assert!(r.matching.is_empty());
    }
}
