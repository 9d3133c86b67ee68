use rand::Rng;

use super::VcError;
use crate::graph::{EdgeId, Realization, StochasticGraph, VertexId};
use crate::rng;

fn positions(n: usize, order: &[VertexId]) -> Result<Vec<usize>, VcError> {
    let mut pos = vec![usize::MAX; n];
    if order.len() != n {
        return Err(VcError::NotPermutation { n });
    }
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(VcError::NotPermutation { n });
        }
        pos[v] = i;
    }
    Ok(pos)
}

/// Vertices by decreasing expected degree, ties by id.
///
/// A convenient input for [`ordering_cover`]; it carries no approximation
/// guarantee.
pub fn default_ordering(sg: &StochasticGraph) -> Vec<VertexId> {
    let d = sg.expected_degrees();
    let mut order: Vec<VertexId> = (0..sg.n()).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    order
}

/// Vertices with a realized neighbor later in `order`, sorted by id.
pub fn ordering_cover(
    sg: &StochasticGraph,
    order: &[VertexId],
    realization: &Realization,
) -> Result<Vec<VertexId>, VcError> {
    let pos = positions(sg.n(), order)?;
    Ok((0..sg.n())
        .filter(|&v| {
            realization
                .realized_neighbors(sg.graph(), v)
                .any(|(w, _)| pos[w] > pos[v])
        })
        .collect())
}

/// `R_v`: the probability that `v` has a realized later neighbor.
pub fn ordering_cover_probabilities(sg: &StochasticGraph, order: &[VertexId]) -> Result<Vec<f64>, VcError> {
    let pos = positions(sg.n(), order)?;
    Ok((0..sg.n())
        .map(|v| {
            let miss: f64 = sg
                .graph()
                .neighbors(v)
                .iter()
                .filter(|&&(w, _)| pos[w] > pos[v])
                .map(|&(_, e)| 1.0 - sg.p(e))
                .product();
            1.0 - miss
        })
        .collect())
}

/// `E[|C|] = Σ_v R_v`.
pub fn ordering_cover_expectation(sg: &StochasticGraph, order: &[VertexId]) -> Result<f64, VcError> {
    Ok(ordering_cover_probabilities(sg, order)?.iter().sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentialMatching {
    pub edges: Vec<EdgeId>,
    /// Matched to a vertex earlier in the order.
    pub matched_to_earlier: Vec<bool>,
    /// Matched to a vertex later in the order.
    pub matched_to_later: Vec<bool>,
}

/// Scans `order`; an unmatched vertex with unmatched realized later
/// neighbors is matched to one of them uniformly at random.
pub fn sequential_random_matching(
    sg: &StochasticGraph,
    order: &[VertexId],
    realization: &Realization,
    seed: u64,
) -> Result<SequentialMatching, VcError> {
    let n = sg.n();
    let pos = positions(n, order)?;
    let mut rng = rng::from_seed(seed);
    let mut mate: Vec<Option<VertexId>> = vec![None; n];
    let mut out = SequentialMatching {
        edges: Vec::new(),
        matched_to_earlier: vec![false; n],
        matched_to_later: vec![false; n],
    };
    let mut options = Vec::new();
    for &v in order {
        if mate[v].is_some() {
            continue;
        }
        options.clear();
        options.extend(
            realization
                .realized_neighbors(sg.graph(), v)
                .filter(|&(w, _)| pos[w] > pos[v] && mate[w].is_none()),
        );
        if options.is_empty() {
            continue;
        }
        let (w, e) = options[rng.random_range(0..options.len())];
        mate[v] = Some(w);
        mate[w] = Some(v);
        out.matched_to_later[v] = true;
        out.matched_to_earlier[w] = true;
        out.edges.push(e);
    }
    out.edges.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_realization, Realization};
    use crate::stats::MCEstimate;

    fn path3() -> StochasticGraph {
        StochasticGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn rejects_non_permutations() {
        let sg = path3();
        let r = Realization::full(sg.graph());
        assert!(ordering_cover(&sg, &[0, 1], &r).is_err());
        assert!(ordering_cover(&sg, &[0, 1, 1], &r).is_err());
        assert!(ordering_cover(&sg, &[0, 1, 3], &r).is_err());
    }

    #[test]
    fn small_covers() {
        let sg = StochasticGraph::from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let none = Realization::from_bits(sg.graph(), vec![false, false]).unwrap();
        assert!(ordering_cover(&sg, &[2, 1, 0], &none).unwrap().is_empty());
        let one = Realization::from_bits(sg.graph(), vec![true, false]).unwrap();
        assert_eq!(ordering_cover(&sg, &[2, 1, 0], &one).unwrap(), vec![1]);
        assert_eq!(ordering_cover(&sg, &[0, 1, 2], &one).unwrap(), vec![0]);
    }

    #[test]
    fn path_matching_is_forced() {
        let sg = path3();
        let r = Realization::full(sg.graph());
        for seed in 0..20 {
            let m = sequential_random_matching(&sg, &[0, 1, 2], &r, seed).unwrap();
            assert_eq!(m.edges, vec![0]);
            assert_eq!(m.matched_to_later, vec![true, false, false]);
            assert_eq!(m.matched_to_earlier, vec![false, true, false]);
        }
    }

    #[test]
    fn default_ordering_by_expected_degree() {
        let sg = StochasticGraph::from_edges(4, [(0, 1, 0.1), (1, 2, 0.9), (2, 3, 0.9)]).unwrap();
        assert_eq!(default_ordering(&sg), vec![2, 1, 3, 0]);
    }

    #[test]
    fn expectation_matches_monte_carlo() {
        let sg = StochasticGraph::from_edges(
            5,
            [
                (0, 1, 0.3),
                (1, 2, 0.6),
                (2, 3, 0.5),
                (3, 4, 0.9),
                (0, 4, 0.4),
                (1, 4, 0.7),
            ],
        )
        .unwrap();
        let order = default_ordering(&sg);
        let samples: Vec<f64> = (0..20_000)
            .map(|t| {
                let r = sample_realization(&sg, t);
                let c = ordering_cover(&sg, &order, &r).unwrap();
                let m = sequential_random_matching(&sg, &order, &r, t).unwrap();
                assert_eq!(m.matched_to_earlier.iter().filter(|&&b| b).count(), m.edges.len());
                assert_eq!(m.matched_to_later.iter().filter(|&&b| b).count(), m.edges.len());
                c.len() as f64
            })
            .collect();
        let est = MCEstimate::from_samples(&samples);
        let exact = ordering_cover_expectation(&sg, &order).unwrap();
        assert!((est.mean - exact).abs() <= 4.0 * est.stderr);
    }
}
