use super::matching::bipartite_matching_lists;
use super::{bits_of, OracleError, OracleLimits};
use crate::graph::{BaseGraph, VertexId};

pub fn is_vertex_cover(g: &BaseGraph, in_cover: &[bool]) -> bool {
    g.edges().iter().all(|&(u, v)| in_cover[u] || in_cover[v])
}

/// A minimum vertex cover by branch and bound, sorted by vertex id.
///
/// Each connected component is solved separately on bitmasks. Branches on a
/// maximum-degree vertex (take it, or take all its neighbors) after forcing
/// the neighbor of every degree-1 vertex; components of degree-2 vertices are
/// cycles and are closed directly. A greedy maximal matching gives the lower
/// bound.
pub fn exact_min_vertex_cover(g: &BaseGraph, limits: &OracleLimits) -> Result<Vec<VertexId>, OracleError> {
    if g.n() > limits.vc_max_n && g.m() > limits.vc_max_m {
        return Err(OracleError::Budget {
            what: "exact vertex cover",
            n: g.n(),
            m: g.m(),
        });
    }
    let mut cover = Vec::new();
    for comp in components(g) {
        if comp.len() < 2 {
            continue;
        }
        if comp.len() > 128 {
            return Err(OracleError::Budget {
                what: "exact vertex cover (component)",
                n: g.n(),
                m: g.m(),
            });
        }
        let mut local = vec![usize::MAX; g.n()];
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i;
        }
        let adj: Vec<u128> = comp
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .fold(0u128, |acc, &(w, _)| acc | (1u128 << local[w]))
            })
            .collect();
        let all = if comp.len() == 128 {
            u128::MAX
        } else {
            (1u128 << comp.len()) - 1
        };
        let mut solver = VcSolver {
            adj,
            best: comp.len() as u32,
            best_set: all,
        };
        solver.search(all, 0, 0);
        cover.extend(bits_of(solver.best_set).map(|i| comp[i]));
    }
    cover.sort_unstable();
    Ok(cover)
}

pub(crate) fn components(g: &BaseGraph) -> Vec<Vec<VertexId>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &(w, _) in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

struct VcSolver {
    adj: Vec<u128>,
    best: u32,
    best_set: u128,
}

impl VcSolver {
    fn search(&mut self, mut alive: u128, mut chosen: u128, mut size: u32) {
        // degree-0 removal and degree-1 forcing until stable
        loop {
            let mut changed = false;
            for v in bits_of(alive) {
                if alive & (1u128 << v) == 0 {
                    continue;
                }
                let nb = self.adj[v] & alive;
                match nb.count_ones() {
                    0 => alive &= !(1u128 << v),
                    1 => {
                        chosen |= nb;
                        size += 1;
                        alive &= !(nb | (1u128 << v));
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        if size >= self.best {
            return;
        }
        if alive == 0 {
            self.best = size;
            self.best_set = chosen;
            return;
        }
        // greedy maximal matching lower bound
        let mut free = alive;
        let mut lb = 0;
        for v in bits_of(alive) {
            if free & (1u128 << v) == 0 {
                continue;
            }
            let nb = self.adj[v] & free;
            if nb != 0 {
                free &= !((1u128 << v) | (1u128 << nb.trailing_zeros()));
                lb += 1;
            }
        }
        if size + lb >= self.best {
            return;
        }
        let (v, deg) = bits_of(alive)
            .map(|v| (v, (self.adj[v] & alive).count_ones()))
            .max_by_key(|&(v, d)| (d, std::cmp::Reverse(v)))
            .unwrap();
        if deg == 2 {
            // every remaining vertex has degree 2: disjoint cycles
            let mut rest = alive;
            while rest != 0 {
                let s = rest.trailing_zeros() as usize;
                let mut cyc = vec![s];
                let mut prev = s;
                let mut cur = (self.adj[s] & alive).trailing_zeros() as usize;
                while cur != s {
                    cyc.push(cur);
                    let nb = self.adj[cur] & alive & !(1u128 << prev);
                    prev = cur;
                    cur = nb.trailing_zeros() as usize;
                }
                for (i, &c) in cyc.iter().enumerate() {
                    rest &= !(1u128 << c);
                    if i % 2 == 0 {
                        chosen |= 1u128 << c;
                    }
                }
                size += (cyc.len() as u32).div_ceil(2);
            }
            if size < self.best {
                self.best = size;
                self.best_set = chosen;
            }
            return;
        }
        let bit = 1u128 << v;
        self.search(alive & !bit, chosen | bit, size + 1);
        let nb = self.adj[v] & alive;
        self.search(alive & !(nb | bit), chosen | nb, size + nb.count_ones());
    }
}

/// Vertex weights in `[0, 1]` with `F_u + F_v >= 1` on every covered edge.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalVertexCover {
    pub value: Vec<f64>,
    pub total: f64,
}

impl FractionalVertexCover {
    pub fn is_feasible(&self, g: &BaseGraph) -> bool {
        self.value.iter().all(|&x| (0.0..=1.0).contains(&x))
            && g.edges().iter().all(|&(u, v)| self.value[u] + self.value[v] >= 1.0)
    }
}

/// A half-integral optimal fractional vertex cover.
///
/// On the bipartite double cover (`(u,0)-(v,1)` and `(v,0)-(u,1)` for every
/// edge `uv`) a maximum matching gives a König minimum vertex cover `x`;
/// `F_v = (x_{v,0} + x_{v,1}) / 2` and the total is half the double cover's
/// minimum cover size.
pub fn optimal_fractional_vertex_cover(g: &BaseGraph) -> FractionalVertexCover {
    let n = g.n();
    let left: Vec<Vec<usize>> = (0..n)
        .map(|u| g.neighbors(u).iter().map(|&(w, _)| w).collect())
        .collect();
    let (mate_left, mate_right) = bipartite_matching_lists(&left, n);

    // alternating reachability from free left vertices
    let mut z_left = vec![false; n];
    let mut z_right = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&u| mate_left[u].is_none()).collect();
    for &u in &stack {
        z_left[u] = true;
    }
    while let Some(u) = stack.pop() {
        for &w in &left[u] {
            if z_right[w] || mate_left[u] == Some(w) {
                continue;
            }
            z_right[w] = true;
            if let Some(u2) = mate_right[w] {
                if !z_left[u2] {
                    z_left[u2] = true;
                    stack.push(u2);
                }
            }
        }
    }
    let value: Vec<f64> = (0..n)
        .map(|v| {
            let x0 = u8::from(!z_left[v]);
            let x1 = u8::from(z_right[v]);
            f64::from(x0 + x1) / 2.0
        })
        .collect();
    let total = value.iter().sum();
    FractionalVertexCover { value, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::brute;

    fn cycle(n: usize) -> BaseGraph {
        BaseGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn small_cases() {
        let lim = OracleLimits::default();
        let edge = BaseGraph::new(2, [(0, 1)]).unwrap();
        assert_eq!(exact_min_vertex_cover(&edge, &lim).unwrap().len(), 1);
        assert_eq!(exact_min_vertex_cover(&BaseGraph::empty(5), &lim).unwrap().len(), 0);
        // C5: brute force over all 32 subsets gives 3
        let c5 = cycle(5);
        assert_eq!(brute::min_vertex_cover_size(&c5), 3);
        let cov = exact_min_vertex_cover(&c5, &lim).unwrap();
        assert_eq!(cov.len(), 3);
        let mut mask = vec![false; 5];
        cov.iter().for_each(|&v| mask[v] = true);
        assert!(is_vertex_cover(&c5, &mask));
    }

    #[test]
    fn cycles_closed_directly_are_valid() {
        let lim = OracleLimits::default();
        for n in 3..12 {
            let g = cycle(n);
            let cov = exact_min_vertex_cover(&g, &lim).unwrap();
            assert_eq!(cov.len(), n.div_ceil(2));
            let mut mask = vec![false; n];
            cov.iter().for_each(|&v| mask[v] = true);
            assert!(is_vertex_cover(&g, &mask), "C{n}: {cov:?}");
        }
    }

    #[test]
    fn size_guard() {
        let lim = OracleLimits {
            vc_max_n: 3,
            vc_max_m: 2,
            ..OracleLimits::default()
        };
        assert!(matches!(
            exact_min_vertex_cover(&cycle(5), &lim),
            Err(OracleError::Budget { .. })
        ));
    }

    #[test]
    fn fractional_examples() {
        let edge = BaseGraph::new(2, [(0, 1)]).unwrap();
        let f = optimal_fractional_vertex_cover(&edge);
        assert_eq!(f.value, vec![0.5, 0.5]);
        assert_eq!(f.total, 1.0);

        let tri = cycle(3);
        let f = optimal_fractional_vertex_cover(&tri);
        assert_eq!(f.value, vec![0.5; 3]);
        assert_eq!(f.total, 1.5);

        let f = optimal_fractional_vertex_cover(&BaseGraph::empty(3));
        assert_eq!(f.value, vec![0.0; 3]);
    }

    #[test]
    fn star_fractional_cover_picks_center() {
        let star = BaseGraph::new(5, (1..5).map(|v| (0, v))).unwrap();
        let f = optimal_fractional_vertex_cover(&star);
        assert_eq!(f.total, 1.0);
        assert_eq!(f.value[0], 1.0);
        assert!(f.is_feasible(&star));
    }
}
