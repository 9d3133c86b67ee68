//! Exhaustive reference searches for cross-checking the exact oracles on tiny
//! graphs. These share no code with the branch-and-bound and blossom
//! implementations. All of them panic above 20 vertices.

use crate::graph::BaseGraph;

fn check(g: &BaseGraph) {
    assert!(g.n() <= 20, "exhaustive search limited to 20 vertices");
}

/// Minimum vertex cover size over all `2^n` subsets.
pub fn min_vertex_cover_size(g: &BaseGraph) -> usize {
    check(g);
    let n = g.n();
    (0u32..1 << n)
        .filter(|&s| g.edges().iter().all(|&(u, v)| s >> u & 1 == 1 || s >> v & 1 == 1))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Minimum dominating set size over all `2^n` subsets.
pub fn min_dominating_set_size(g: &BaseGraph) -> usize {
    check(g);
    let n = g.n();
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 1 || g.neighbors(v).iter().any(|&(w, _)| s >> w & 1 == 1)))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Maximum matching size by enumerating edge subsets: each edge is either
/// skipped or taken when both endpoints are free.
pub fn max_matching_size(g: &BaseGraph) -> usize {
    check(g);
    fn rec(g: &BaseGraph, e: usize, used: u32) -> usize {
        if e == g.m() {
            return 0;
        }
        let skip = rec(g, e + 1, used);
        let (u, v) = g.endpoints(e);
        if used >> u & 1 == 0 && used >> v & 1 == 0 {
            skip.max(1 + rec(g, e + 1, used | 1 << u | 1 << v))
        } else {
            skip
        }
    }
    rec(g, 0, 0)
}

/// Optimal fractional vertex cover value by enumerating half-integral
/// assignments in `{0, 1/2, 1}^n`, returned doubled (an integer).
pub fn min_half_integral_cover_doubled(g: &BaseGraph) -> usize {
    let n = g.n();
    assert!(n <= 12, "half-integral enumeration limited to 12 vertices");
    let mut best = usize::MAX;
    let total = 3usize.pow(n as u32);
    let mut x = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for xi in x.iter_mut() {
            *xi = c % 3;
            c /= 3;
        }
        if g.edges().iter().all(|&(u, v)| x[u] + x[v] >= 2) {
            best = best.min(x.iter().sum());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_checked() {
        let c5 = BaseGraph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert_eq!(min_vertex_cover_size(&c5), 3);
        assert_eq!(max_matching_size(&c5), 2);
        assert_eq!(min_dominating_set_size(&c5), 2);
        assert_eq!(min_half_integral_cover_doubled(&c5), 5);
        let empty = BaseGraph::empty(3);
        assert_eq!(min_vertex_cover_size(&empty), 0);
        assert_eq!(min_dominating_set_size(&empty), 3);
        assert_eq!(max_matching_size(&empty), 0);
    }
}
