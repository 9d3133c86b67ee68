use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::HarnessError;
use crate::graph::{self, generate, GeneratorKind, ProbModel, StochasticGraph};

/// Where instances come from.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    /// `instances` graphs are drawn with seeds `graph_seed + i`.
    Generator {
        kind: GeneratorKind,
        prob: ProbModel,
        graph_seed: u64,
        instances: usize,
    },
}

impl GraphSource {
    /// Reads `graph` or `generator` with its parameters from config pairs.
    pub fn from_pairs(map: &BTreeMap<String, String>) -> Result<Self, HarnessError> {
        Ok(match (map.get("graph"), map.get("generator")) {
            (Some(_), Some(_)) => return Err(HarnessError::Usage("give either graph or generator, not both".into())),
            (Some(p), None) => GraphSource::File(p.into()),
            (None, Some(g)) => {
                let density: f64 = get(map, "density")?.unwrap_or(0.2);
                let kind = match g.as_str() {
                    "er" => GeneratorKind::ErdosRenyi {
                        n: need(map, "n")?,
                        density,
                    },
                    "bipartite" => GeneratorKind::RandomBipartite {
                        left: need(map, "left")?,
                        right: need(map, "right")?,
                        density,
                    },
                    "star" => GeneratorKind::Star { n: need(map, "n")? },
                    "path" => GeneratorKind::Path { n: need(map, "n")? },
                    "complete" => GeneratorKind::Complete { n: need(map, "n")? },
                    _ => return Err(HarnessError::Usage(format!("unknown generator '{g}'"))),
                };
                let prob = match (get(map, "p")?, get(map, "p_min")?, get(map, "p_max")?) {
                    (Some(p), None, None) => ProbModel::Uniform(p),
                    (None, Some(lo), Some(hi)) => ProbModel::UniformRange(lo, hi),
                    (None, None, None) => ProbModel::Uniform(0.5),
                    _ => return Err(HarnessError::Usage("give either p or both p_min and p_max".into())),
                };
                GraphSource::Generator {
                    kind,
                    prob,
                    graph_seed: get(map, "graph_seed")?.unwrap_or(0),
                    instances: get(map, "instances")?.unwrap_or(1),
                }
            }
            (None, None) => return Err(HarnessError::Usage("missing graph or generator".into())),
        })
    }

    /// `(instance id, graph)` pairs.
    pub fn load(&self) -> Result<Vec<(String, StochasticGraph)>, HarnessError> {
        match self {
            GraphSource::File(p) => {
                let sg = graph::load(p)?;
                let id = p
                    .file_stem()
                    .map_or_else(|| "graph".into(), |s| s.to_string_lossy().into_owned());
                Ok(vec![(id, sg)])
            }
            GraphSource::Generator {
                kind,
                prob,
                graph_seed,
                instances,
            } => (0..*instances as u64)
                .map(|i| {
                    let seed = graph_seed + i;
                    Ok((format!("{}-s{seed}", kind_name(kind)), generate(*kind, *prob, seed)?))
                })
                .collect(),
        }
    }
}

fn kind_name(kind: &GeneratorKind) -> &'static str {
    match kind {
        GeneratorKind::ErdosRenyi { .. } => "er",
        GeneratorKind::RandomBipartite { .. } => "bipartite",
        GeneratorKind::Star { .. } => "star",
        GeneratorKind::Path { .. } => "path",
        GeneratorKind::Complete { .. } => "complete",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    NoCommVc,
    OrderingVc,
    WaterfillVc,
    TwoRound,
    BipartiteTwoRound,
    PolyEps,
    Mds,
    OracleVc,
    OracleMatching,
    OracleMds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    VertexCover,
    Matching,
    DominatingSet,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::NoCommVc,
        Algorithm::OrderingVc,
        Algorithm::WaterfillVc,
        Algorithm::TwoRound,
        Algorithm::BipartiteTwoRound,
        Algorithm::PolyEps,
        Algorithm::Mds,
        Algorithm::OracleVc,
        Algorithm::OracleMatching,
        Algorithm::OracleMds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NoCommVc => "vc-nocomm",
            Algorithm::OrderingVc => "vc-ordering",
            Algorithm::WaterfillVc => "vc-waterfill",
            Algorithm::TwoRound => "matching-two-round",
            Algorithm::BipartiteTwoRound => "matching-bipartite",
            Algorithm::PolyEps => "matching-polyeps",
            Algorithm::Mds => "mds",
            Algorithm::OracleVc => "oracle-vc",
            Algorithm::OracleMatching => "oracle-matching",
            Algorithm::OracleMds => "oracle-mds",
        }
    }

    pub fn problem(self) -> Problem {
        match self {
            Algorithm::NoCommVc | Algorithm::OrderingVc | Algorithm::WaterfillVc | Algorithm::OracleVc => {
                Problem::VertexCover
            }
            Algorithm::TwoRound | Algorithm::BipartiteTwoRound | Algorithm::PolyEps | Algorithm::OracleMatching => {
                Problem::Matching
            }
            Algorithm::Mds | Algorithm::OracleMds => Problem::DominatingSet,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| HarnessError::Usage(format!("unknown algorithm '{s}'")))
    }
}

/// What the solution size is compared against on each realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    /// Exact optimum of the problem on `G*`, refused above the oracle size
    /// guards.
    Exact,
    /// Optimal fractional vertex cover of `G*`; vertex cover only.
    Fractional,
}

impl FromStr for Baseline {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "exact" => Ok(Baseline::Exact),
            "fractional" => Ok(Baseline::Fractional),
            _ => Err(HarnessError::Usage(format!("unknown baseline '{s}'"))),
        }
    }
}

/// One experiment: instances, an algorithm with its parameters, and the
/// Monte-Carlo plan.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub source: GraphSource,
    pub algorithm: Algorithm,
    /// `ε̄` of the water-filling cover.
    pub eps_bar: f64,
    pub alpha: f64,
    /// `ε` of the poly(1/ε) matching.
    pub eps: f64,
    pub theta: Option<f64>,
    pub cap: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Trials per edge for the conditional estimates of the zero-round cover.
    pub oracle_trials: usize,
    pub baseline: Baseline,
    pub output: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

const KEYS: &[&str] = &[
    "graph",
    "generator",
    "n",
    "left",
    "right",
    "density",
    "p",
    "p_min",
    "p_max",
    "graph_seed",
    "instances",
    "algorithm",
    "eps_bar",
    "alpha",
    "eps",
    "theta",
    "cap",
    "trials",
    "seed",
    "oracle_trials",
    "baseline",
    "output",
    "workers",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Usage(format!("line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, HarnessError> {
    map.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| HarnessError::Usage(format!("invalid value '{v}' for {key}")))
        })
        .transpose()
}

fn need<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T, HarnessError> {
    get(map, key)?.ok_or_else(|| HarnessError::Usage(format!("missing required key '{key}'")))
}

impl ExperimentConfig {
    /// Reads a config file and applies `key=value` overrides on top.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, HarnessError> {
        let mut map = match path {
            Some(p) => parse_pairs(
                &std::fs::read_to_string(p).map_err(|e| HarnessError::Usage(format!("{}: {e}", p.display())))?,
            )?,
            None => BTreeMap::new(),
        };
        for o in overrides {
            map.extend(parse_pairs(o)?);
        }
        Self::from_pairs(&map)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    pub fn from_pairs(map: &BTreeMap<String, String>) -> Result<Self, HarnessError> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(HarnessError::Usage(format!("unknown key '{k}'")));
        }
        let source = GraphSource::from_pairs(map)?;
        let algorithm: Algorithm = need(map, "algorithm")?;
        let default_baseline = if algorithm == Algorithm::NoCommVc {
            Baseline::Fractional
        } else {
            Baseline::Exact
        };
        let cfg = ExperimentConfig {
            source,
            algorithm,
            eps_bar: get(map, "eps_bar")?.unwrap_or(0.25),
            alpha: get(map, "alpha")?.unwrap_or_else(crate::matching::optimal_alpha),
            eps: get(map, "eps")?.unwrap_or(0.3),
            theta: get(map, "theta")?,
            cap: get(map, "cap")?,
            trials: get(map, "trials")?.unwrap_or(1000),
            seed: need(map, "seed")?,
            oracle_trials: get(map, "oracle_trials")?.unwrap_or(2000),
            baseline: get(map, "baseline")?.unwrap_or(default_baseline),
            output: map.get("output").map(PathBuf::from),
            workers: get(map, "workers")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the algorithm preconditions that do not need the graph.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Usage(m));
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if let GraphSource::Generator { instances: 0, .. } = self.source {
            return bad("instances must be positive".into());
        }
        match self.algorithm {
            Algorithm::WaterfillVc if !(self.eps_bar > 0.0 && self.eps_bar <= 0.25) => {
                bad(format!("eps_bar must lie in (0, 1/4], got {}", self.eps_bar))
            }
            Algorithm::TwoRound if !(self.alpha > 0.0 && self.alpha < 1.0) => {
                bad(format!("alpha must lie in (0, 1), got {}", self.alpha))
            }
            Algorithm::PolyEps if !(self.eps > 0.0 && self.eps < 0.5) => {
                bad(format!("eps must lie in (0, 1/2), got {}", self.eps))
            }
            Algorithm::NoCommVc if self.oracle_trials == 0 => bad("oracle_trials must be positive".into()),
            a if self.baseline == Baseline::Fractional && a.problem() != Problem::VertexCover => {
                bad("the fractional baseline applies to vertex cover only".into())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_generator_config() {
        let cfg = ExperimentConfig::parse(
            "# demo\ngenerator = er\nn = 20\ndensity = 0.3\np_min = 0.2\np_max = 0.8\nalgorithm = vc-nocomm\nseed = 7\ninstances = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.algorithm, Algorithm::NoCommVc);
        assert_eq!(cfg.baseline, Baseline::Fractional);
        assert_eq!(cfg.seed, 7);
        let inst = cfg.source.load().unwrap();
        assert_eq!(inst.len(), 3);
        assert_eq!(inst[0].0, "er-s0");
    }

    #[test]
    fn rejects_bad_configs() {
        let base = "generator = er\nn = 10\nalgorithm = vc-waterfill\n";
        assert!(matches!(ExperimentConfig::parse(base), Err(HarnessError::Usage(m)) if m.contains("seed")));
        let err = ExperimentConfig::parse(&format!("{base}seed = 1\neps_bar = 0.3\n")).unwrap_err();
        assert!(err.to_string().contains("eps_bar"));
        assert!(ExperimentConfig::parse(&format!("{base}seed = 1\nbogus = 2\n")).is_err());
        assert!(
            ExperimentConfig::parse("generator = er\nn = 10\nalgorithm = mds\nseed = 1\nbaseline = fractional\n")
                .is_err()
        );
        assert!(ExperimentConfig::parse("generator = er\nn = 10\nalgorithm = nope\nseed = 1\n").is_err());
    }

    #[test]
    fn overrides_win() {
        let dir = std::env::temp_dir().join(format!("stochgraph-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("exp.cfg");
        std::fs::write(
            &path,
            "generator = path\nn = 5\nalgorithm = mds\nseed = 1\ntrials = 10\n",
        )
        .unwrap();
        let cfg = ExperimentConfig::load(Some(&path), &["trials=20".into(), "seed = 4".into()]).unwrap();
        assert_eq!((cfg.trials, cfg.seed), (20, 4));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
