use rand::seq::SliceRandom;
use rand::Rng;

use super::{BaseGraph, Bipartition, GraphError, StochasticGraph};
use crate::rng;

/// Base graph families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeneratorKind {
    /// `G(n, density)`.
    ErdosRenyi {
        n: usize,
        density: f64,
    },
    /// Left side `0..left`, right side `left..left+right`, each cross pair
    /// present with probability `density`.
    RandomBipartite {
        left: usize,
        right: usize,
        density: f64,
    },
    /// `K_{1,n-1}` centered at vertex 0.
    Star {
        n: usize,
    },
    Path {
        n: usize,
    },
    Complete {
        n: usize,
    },
}

/// How realization probabilities are assigned to generated edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbModel {
    Uniform(f64),
    /// Each edge draws `p` uniformly from `[lo, hi]`.
    UniformRange(f64, f64),
}

fn check_p(p: f64) -> Result<(), GraphError> {
    if p.is_finite() && p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(format!(
            "edge probability {p} not in (0, 1]"
        )))
    }
}

fn check_density(d: f64) -> Result<(), GraphError> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(format!("density {d} not in [0, 1]")))
    }
}

/// Generates a stochastic graph. Identical arguments give identical graphs.
pub fn generate(kind: GeneratorKind, prob: ProbModel, seed: u64) -> Result<StochasticGraph, GraphError> {
    match prob {
        ProbModel::Uniform(p) => check_p(p)?,
        ProbModel::UniformRange(lo, hi) => {
            check_p(lo)?;
            check_p(hi)?;
            if lo > hi {
                return Err(GraphError::InvalidParameter(format!(
                    "empty probability range [{lo}, {hi}]"
                )));
            }
        }
    }
    let mut topo = rng::stream(seed, "gen-topology", 0);
    let mut bip = None;
    let (n, pairs): (usize, Vec<(usize, usize)>) = match kind {
        GeneratorKind::ErdosRenyi { n, density } => {
            check_n(n)?;
            check_density(density)?;
            let mut pairs = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if topo.random::<f64>() < density {
                        pairs.push((u, v));
                    }
                }
            }
            (n, pairs)
        }
        GeneratorKind::RandomBipartite { left, right, density } => {
            if left == 0 || right == 0 {
                return Err(GraphError::InvalidParameter(
                    "both sides of a bipartite graph must be non-empty".into(),
                ));
            }
            check_density(density)?;
            let mut pairs = Vec::new();
            for u in 0..left {
                for v in left..left + right {
                    if topo.random::<f64>() < density {
                        pairs.push((u, v));
                    }
                }
            }
            bip = Some(Bipartition::from_left(left + right, 0..left)?);
            (left + right, pairs)
        }
        GeneratorKind::Star { n } => {
            check_n(n)?;
            bip = Some(Bipartition::from_left(n, [0])?);
            (n, (1..n).map(|v| (0, v)).collect())
        }
        GeneratorKind::Path { n } => {
            check_n(n)?;
            bip = Some(Bipartition::from_left(n, (0..n).step_by(2))?);
            (n, (1..n).map(|v| (v - 1, v)).collect())
        }
        GeneratorKind::Complete { n } => {
            check_n(n)?;
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            (n, pairs)
        }
    };
    let graph = BaseGraph::new(n, pairs)?;
    let mut prng = rng::stream(seed, "gen-prob", 0);
    let probs = (0..graph.m())
        .map(|_| match prob {
            ProbModel::Uniform(p) => p,
            ProbModel::UniformRange(lo, hi) if lo == hi => lo,
            ProbModel::UniformRange(lo, hi) => prng.random_range(lo..=hi),
        })
        .collect();
    let sg = StochasticGraph::new(graph, probs)?;
    match bip {
        Some(b) => sg.with_bipartition(b),
        None => Ok(sg),
    }
}

fn check_n(n: usize) -> Result<(), GraphError> {
    if n == 0 {
        Err(GraphError::InvalidParameter("vertex count must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// A uniformly random permutation of `0..n` from the given stream.
pub(crate) fn shuffled(n: usize, rng: &mut crate::rng::StreamRng) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_with_probability_one() {
        let sg = generate(GeneratorKind::Star { n: 5 }, ProbModel::Uniform(1.0), 0).unwrap();
        assert_eq!(sg.m(), 4);
        assert_eq!(sg.graph().degree(0), 4);
        assert!(sg.probabilities().iter().all(|&p| p == 1.0));
        assert!(sg.bipartition().is_some());
    }

    #[test]
    fn empty_vertex_set_rejected() {
        let r = generate(
            GeneratorKind::ErdosRenyi { n: 0, density: 0.5 },
            ProbModel::Uniform(0.5),
            1,
        );
        assert!(matches!(r, Err(GraphError::InvalidParameter(_))));
    }

    #[test]
    fn deterministic_given_seed() {
        let kind = GeneratorKind::ErdosRenyi { n: 30, density: 0.2 };
        let pm = ProbModel::UniformRange(0.2, 0.8);
        let a = generate(kind, pm, 7).unwrap();
        let b = generate(kind, pm, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.probabilities().iter().all(|&p| (0.2..=0.8).contains(&p)));
    }

    #[test]
    fn parameter_ranges_checked() {
        let er = GeneratorKind::ErdosRenyi { n: 5, density: 1.5 };
        assert!(generate(er, ProbModel::Uniform(0.5), 0).is_err());
        let ok = GeneratorKind::Path { n: 4 };
        assert!(generate(ok, ProbModel::Uniform(0.0), 0).is_err());
        assert!(generate(ok, ProbModel::UniformRange(0.6, 0.4), 0).is_err());
    }

    #[test]
    fn bipartite_generator_carries_partition() {
        let sg = generate(
            GeneratorKind::RandomBipartite {
                left: 4,
                right: 5,
                density: 0.6,
            },
            ProbModel::Uniform(0.5),
            3,
        )
        .unwrap();
        let b = sg.bipartition().unwrap();
        b.validate(sg.graph()).unwrap();
        assert_eq!(b.left().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }
}
