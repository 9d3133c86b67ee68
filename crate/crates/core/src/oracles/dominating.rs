use super::{OracleError, OracleLimits};
use crate::graph::{BaseGraph, VertexId};

/// A minimum dominating set by branch and bound over undominated vertices,
/// sorted by vertex id. Isolated vertices dominate themselves.
pub fn exact_min_dominating_set(g: &BaseGraph, limits: &OracleLimits) -> Result<Vec<VertexId>, OracleError> {
    let n = g.n();
    if n > limits.mds_max_n || n > 64 {
        return Err(OracleError::Budget {
            what: "exact dominating set",
            n,
            m: g.m(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let closed: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u64 << v, |acc, &(w, _)| acc | (1u64 << w)))
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    // greedy upper bound
    let mut undominated = all;
    let mut greedy = 0u64;
    while undominated != 0 {
        let v = (0..n)
            .max_by_key(|&v| ((closed[v] & undominated).count_ones(), std::cmp::Reverse(v)))
            .unwrap();
        greedy |= 1u64 << v;
        undominated &= !closed[v];
    }
    let mut solver = MdsSolver {
        closed,
        best: greedy.count_ones(),
        best_set: greedy,
    };
    solver.search(all, 0, 0);
    Ok((0..n).filter(|&v| solver.best_set >> v & 1 == 1).collect())
}

struct MdsSolver {
    closed: Vec<u64>,
    best: u32,
    best_set: u64,
}

impl MdsSolver {
    fn search(&mut self, undominated: u64, chosen: u64, size: u32) {
        if undominated == 0 {
            if size < self.best {
                self.best = size;
                self.best_set = chosen;
            }
            return;
        }
        if size + 1 >= self.best {
            return;
        }
        let max_cover = self
            .closed
            .iter()
            .map(|&c| (c & undominated).count_ones())
            .max()
            .unwrap();
        let lb = undominated.count_ones().div_ceil(max_cover);
        if size + lb >= self.best {
            return;
        }
        // the undominated vertex with the fewest ways to be dominated
        let mut pick = 0;
        let mut fewest = u32::MAX;
        let mut rest = undominated;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let c = self.closed[u].count_ones();
            if c < fewest {
                fewest = c;
                pick = u;
            }
        }
        let mut cands: Vec<usize> = Vec::with_capacity(fewest as usize);
        let mut c = self.closed[pick];
        while c != 0 {
            cands.push(c.trailing_zeros() as usize);
            c &= c - 1;
        }
        cands.sort_by_key(|&w| std::cmp::Reverse((self.closed[w] & undominated).count_ones()));
        for w in cands {
            self.search(undominated & !self.closed[w], chosen | (1u64 << w), size + 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::brute;

    #[test]
    fn examples() {
        let lim = OracleLimits::default();
        let star = BaseGraph::new(5, (1..5).map(|v| (0, v))).unwrap();
        assert_eq!(exact_min_dominating_set(&star, &lim).unwrap(), vec![0]);
        assert_eq!(exact_min_dominating_set(&BaseGraph::empty(3), &lim).unwrap().len(), 3);
        let p6 = BaseGraph::new(6, (1..6).map(|v| (v - 1, v))).unwrap();
        assert_eq!(brute::min_dominating_set_size(&p6), 2);
        assert_eq!(exact_min_dominating_set(&p6, &lim).unwrap().len(), 2);
    }

    #[test]
    fn guard() {
        let lim = OracleLimits {
            mds_max_n: 4,
            ..OracleLimits::default()
        };
        assert!(exact_min_dominating_set(&BaseGraph::empty(5), &lim).is_err());
    }
}
