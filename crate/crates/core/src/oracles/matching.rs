use std::collections::VecDeque;

use crate::graph::{BaseGraph, Bipartition, EdgeId, GraphError, VertexId};

/// A set of vertex-disjoint edges, sorted by edge id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<EdgeId>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn from_mates(g: &BaseGraph, mate: &[Option<VertexId>]) -> Self {
        let mut edges: Vec<EdgeId> = (0..g.n())
            .filter_map(|u| match mate[u] {
                Some(w) if u < w => g.find_edge(u, w),
                _ => None,
            })
            .collect();
        edges.sort_unstable();
        Matching { edges }
    }

    /// Per-vertex partner.
    pub fn mates(&self, g: &BaseGraph) -> Vec<Option<VertexId>> {
        let mut mate = vec![None; g.n()];
        for &e in &self.edges {
            let (u, v) = g.endpoints(e);
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
        mate
    }
}

/// Whether `edges` are distinct, vertex-disjoint edges of `g`.
pub fn is_matching(g: &BaseGraph, edges: &[EdgeId]) -> bool {
    let mut used = vec![false; g.n()];
    let mut seen = std::collections::HashSet::new();
    for &e in edges {
        if e >= g.m() || !seen.insert(e) {
            return false;
        }
        let (u, v) = g.endpoints(e);
        if used[u] || used[v] {
            return false;
        }
        used[u] = true;
        used[v] = true;
    }
    true
}

/// A maximum-cardinality matching.
///
/// Bipartite inputs use augmenting-path search from the left side; other
/// graphs use Edmonds' blossom contraction. Both start from a greedy matching
/// in vertex-id order and then augment from the lowest free vertex, so the
/// result is a deterministic function of the graph.
pub fn max_matching(g: &BaseGraph) -> Matching {
    match g.bipartition() {
        Some(b) => max_bipartite_matching(g, &b).expect("bipartition computed from g"),
        None => Matching::from_mates(g, &blossom(g)),
    }
}

/// Maximum matching of a bipartite graph under the given partition.
pub fn max_bipartite_matching(g: &BaseGraph, b: &Bipartition) -> Result<Matching, GraphError> {
    b.validate(g)?;
    let n = g.n();
    let left: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            if b.is_left(u) {
                g.neighbors(u).iter().map(|&(w, _)| w).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let (mate_left, _) = bipartite_matching_lists(&left, n);
    let mut mate = vec![None; n];
    for u in 0..n {
        if let Some(w) = mate_left[u] {
            mate[u] = Some(w);
            mate[w] = Some(u);
        }
    }
    Ok(Matching::from_mates(g, &mate))
}

/// Kuhn's augmenting paths. `left[u]` lists right-side neighbors of left
/// vertex `u`, right ids in `0..n_right`. Returns `(mate_left, mate_right)`.
pub(crate) fn bipartite_matching_lists(
    left: &[Vec<usize>],
    n_right: usize,
) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut mate_left = vec![None; left.len()];
    let mut mate_right: Vec<Option<usize>> = vec![None; n_right];
    for (u, nbrs) in left.iter().enumerate() {
        if let Some(&w) = nbrs.iter().find(|&&w| mate_right[w].is_none()) {
            mate_left[u] = Some(w);
            mate_right[w] = Some(u);
        }
    }
    let mut visited = vec![0usize; n_right];
    let mut stamp = 0;
    for u in 0..left.len() {
        if mate_left[u].is_some() || left[u].is_empty() {
            continue;
        }
        stamp += 1;
        augment_from(u, left, &mut mate_left, &mut mate_right, &mut visited, stamp);
    }
    (mate_left, mate_right)
}

fn augment_from(
    root: usize,
    left: &[Vec<usize>],
    mate_left: &mut [Option<usize>],
    mate_right: &mut [Option<usize>],
    visited: &mut [usize],
    stamp: usize,
) -> bool {
    // iterative DFS: stack of (left vertex, next neighbor index)
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    let mut via: Vec<usize> = Vec::new();
    while let Some(&mut (u, ref mut i)) = stack.last_mut() {
        if *i >= left[u].len() {
            stack.pop();
            via.pop();
            continue;
        }
        let w = left[u][*i];
        *i += 1;
        if visited[w] == stamp {
            continue;
        }
        visited[w] = stamp;
        via.push(w);
        match mate_right[w] {
            None => {
                // flip the path root .. u - w
                for (k, &(x, _)) in stack.iter().enumerate() {
                    let y = via[k];
                    mate_left[x] = Some(y);
                    mate_right[y] = Some(x);
                }
                return true;
            }
            Some(u2) => stack.push((u2, 0)),
        }
    }
    false
}

const NONE: usize = usize::MAX;

/// Edmonds' blossom algorithm; returns per-vertex partners.
fn blossom(g: &BaseGraph) -> Vec<Option<VertexId>> {
    let n = g.n();
    let mut mate = vec![NONE; n];
    for u in 0..n {
        if mate[u] != NONE {
            continue;
        }
        if let Some(&(w, _)) = g.neighbors(u).iter().find(|&&(w, _)| mate[w] == NONE) {
            mate[u] = w;
            mate[w] = u;
        }
    }
    let mut st = BlossomState {
        parent: vec![NONE; n],
        base: vec![0; n],
        used: vec![false; n],
        in_blossom: vec![false; n],
        on_path: vec![false; n],
        queue: VecDeque::new(),
    };
    for root in 0..n {
        if mate[root] != NONE || g.degree(root) == 0 {
            continue;
        }
        let end = st.find_path(g, &mate, root);
        let mut v = end;
        while v != NONE {
            let pv = st.parent[v];
            let ppv = mate[pv];
            mate[v] = pv;
            mate[pv] = v;
            v = ppv;
        }
    }
    mate.into_iter().map(|m| (m != NONE).then_some(m)).collect()
}

struct BlossomState {
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    on_path: Vec<bool>,
    queue: VecDeque<usize>,
}

impl BlossomState {
    fn lca(&mut self, mate: &[usize], mut a: usize, mut b: usize) -> usize {
        self.on_path.fill(false);
        loop {
            a = self.base[a];
            self.on_path[a] = true;
            if mate[a] == NONE {
                break;
            }
            a = self.parent[mate[a]];
        }
        loop {
            b = self.base[b];
            if self.on_path[b] {
                return b;
            }
            b = self.parent[mate[b]];
        }
    }

    fn mark_path(&mut self, mate: &[usize], mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[mate[v]]] = true;
            self.parent[v] = child;
            child = mate[v];
            v = self.parent[mate[v]];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free end or NONE.
    fn find_path(&mut self, g: &BaseGraph, mate: &[usize], root: usize) -> usize {
        let n = g.n();
        self.used.fill(false);
        self.parent.fill(NONE);
        for i in 0..n {
            self.base[i] = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &(to, _) in g.neighbors(v) {
                if self.base[v] == self.base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != NONE && self.parent[mate[to]] != NONE) {
                    let cur = self.lca(mate, v, to);
                    self.in_blossom.fill(false);
                    self.mark_path(mate, v, cur, to);
                    self.mark_path(mate, to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if mate[to] == NONE {
                        return to;
                    }
                    let m = mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        NONE
    }
}
