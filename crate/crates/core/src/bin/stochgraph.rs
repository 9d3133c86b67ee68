use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stochgraph::engine::{trial_seeds, Workers};
use stochgraph::graph::{self, sample_realization};
use stochgraph::harness::{
    baseline_value, exit, parse_pairs, prepare, ratio_report, run_acceptance, solve, write_rows_csv, AcceptOptions,
    Baseline, ExperimentConfig, GraphSource, HarnessError, Problem,
};
use stochgraph::oracles::{estimate_conditional_f, estimate_match_marginals, OracleLimits};
use stochgraph::poisson::{minimize_ratio, ratio_curve, write_curve_csv};
use stochgraph::rng::derive_seed;
use stochgraph::stats::MCEstimate;

/// Distributed algorithms on stochastic graphs.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write generated graphs, e.g. `gen --out g.txt generator=er n=30 p=0.4`.
    Gen {
        /// Output file; with several instances, `<stem>-<i>.<ext>`.
        #[arg(long)]
        out: PathBuf,
        /// Generator settings as key=value pairs.
        pairs: Vec<String>,
    },
    /// Run one experiment config and print ratio rows as CSV.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the trace of trial 0 of each instance as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// key=value overrides.
        overrides: Vec<String>,
    },
    /// Exact or Monte-Carlo baselines of one graph.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: OracleKind,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// The Poisson ratio curve as CSV, or its minimum with `--min`.
    Poisson {
        #[arg(long)]
        min: bool,
        #[arg(long, default_value_t = 2000)]
        points: usize,
        #[arg(long, default_value_t = 20.0)]
        lambda_max: f64,
    },
    /// Run the acceptance suite.
    Accept {
        /// Multiplies every trial count.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Trials per second of one experiment config.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        overrides: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    /// Expected minimum vertex cover of `G*`.
    Vc,
    /// Expected optimal fractional vertex cover.
    FracVc,
    /// Expected maximum matching.
    Matching,
    /// Expected minimum dominating set.
    Mds,
    /// Conditional fractional-cover estimates per edge endpoint.
    CondF,
    /// Matching marginals per edge and vertex.
    Marginals,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn gen(out: &Path, pairs: &[String]) -> Result<(), HarnessError> {
    let mut map = parse_pairs(&pairs.join("\n"))?;
    map.entry("generator".into()).or_insert_with(|| "er".into());
    let instances = GraphSource::from_pairs(&map)?.load()?;
    let many = instances.len() > 1;
    for (i, (id, sg)) in instances.iter().enumerate() {
        let path = if many {
            let stem = out.file_stem().unwrap_or_default().to_string_lossy();
            let ext = out
                .extension()
                .map_or(String::new(), |e| format!(".{}", e.to_string_lossy()));
            out.with_file_name(format!("{stem}-{i}{ext}"))
        } else {
            out.to_path_buf()
        };
        graph::save(sg, &path)?;
        eprintln!("{id}: n = {}, m = {} -> {}", sg.n(), sg.m(), path.display());
    }
    Ok(())
}

fn run(config: Option<&Path>, trace: Option<&Path>, overrides: &[String]) -> Result<(), HarnessError> {
    let cfg = ExperimentConfig::load(config, overrides)?;
    let rows = ratio_report(&cfg)?;
    write_rows_csv(&rows, output(cfg.output.as_deref())?)?;
    if let Some(path) = trace {
        let mut w = File::create(path)?;
        for (i, (_, sg)) in cfg.source.load()?.iter().enumerate() {
            let prep = prepare(&cfg, sg, i)?;
            let (rs, ps) = trial_seeds(derive_seed(cfg.seed, "instance", i as u64), 0);
            if let Some((_, t)) = solve(&prep, sg, &sample_realization(sg, rs), ps)? {
                writeln!(w, "{}", t.to_json())?;
            }
        }
    }
    Ok(())
}

fn oracle(path: &Path, kind: OracleKind, trials: usize, seed: u64) -> Result<(), HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Usage("trials must be positive".into()));
    }
    let sg = graph::load(path)?;
    let out = output(None)?;
    let (problem, baseline) = match kind {
        OracleKind::CondF => return Ok(estimate_conditional_f(&sg, trials, seed).write_csv(&sg, out)?),
        OracleKind::Marginals => return Ok(estimate_match_marginals(&sg, trials, seed).write_csv(out)?),
        OracleKind::Vc => (Problem::VertexCover, Baseline::Exact),
        OracleKind::FracVc => (Problem::VertexCover, Baseline::Fractional),
        OracleKind::Matching => (Problem::Matching, Baseline::Exact),
        OracleKind::Mds => (Problem::DominatingSet, Baseline::Exact),
    };
    let limits = OracleLimits::default();
    let samples = (0..trials)
        .map(|t| {
            baseline_value(
                problem,
                baseline,
                &sg,
                &sample_realization(&sg, trial_seeds(seed, t).0),
                &limits,
            )
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let mut wr = csv::Writer::from_writer(out);
    wr.serialize(MCEstimate::from_samples(&samples))?;
    wr.flush()?;
    Ok(())
}

fn poisson(min: bool, points: usize, lambda_max: f64) -> Result<(), HarnessError> {
    if min {
        let m = minimize_ratio();
        println!("lambda = {:.6}", m.lambda);
        println!("ratio = {:.8} = 1/{:.5}", m.ratio, 1.0 / m.ratio);
        return Ok(());
    }
    if points == 0 || !(lambda_max > 0.0) {
        return Err(HarnessError::Usage("points and lambda-max must be positive".into()));
    }
    Ok(write_curve_csv(&ratio_curve(points, lambda_max), output(None)?)?)
}

fn accept(scale: f64, workers: Option<usize>) -> Result<bool, HarnessError> {
    if !(scale > 0.0) || workers == Some(0) {
        return Err(HarnessError::Usage("scale and workers must be positive".into()));
    }
    let opts = AcceptOptions {
        scale,
        workers: workers.map_or(Workers::Global, Workers::Fixed),
        ..AcceptOptions::default()
    };
    let mut all = true;
    for (c, res) in run_acceptance(&opts) {
        let (ok, text) = match res {
            Ok(o) => (o.passed, format!("({:.1} s) {}", o.elapsed.as_secs_f64(), o.summary)),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= ok;
        println!("{:>2} {:<34} {} {text}", c.id, c.name, if ok { "PASS" } else { "FAIL" });
    }
    Ok(all)
}

#[derive(Serialize)]
struct BenchRow {
    instance: String,
    algorithm: String,
    trials: usize,
    seconds: f64,
    trials_per_second: f64,
}

fn bench(config: Option<&Path>, overrides: &[String]) -> Result<(), HarnessError> {
    let cfg = ExperimentConfig::load(config, overrides)?;
    let mut wr = csv::Writer::from_writer(output(None)?);
    for (i, (id, sg)) in cfg.source.load()?.iter().enumerate() {
        let prep = prepare(&cfg, sg, i)?;
        let start = Instant::now();
        for t in 0..cfg.trials {
            let (rs, ps) = trial_seeds(cfg.seed, t);
            solve(&prep, sg, &sample_realization(sg, rs), ps)?;
        }
        let secs = start.elapsed().as_secs_f64();
        wr.serialize(BenchRow {
            instance: id.clone(),
            algorithm: cfg.algorithm.name().into(),
            trials: cfg.trials,
            seconds: secs,
            trials_per_second: cfg.trials as f64 / secs,
        })?;
    }
    wr.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let res = match cli.cmd {
        Cmd::Gen { out, pairs } => gen(&out, &pairs),
        Cmd::Run {
            config,
            trace,
            overrides,
        } => run(config.as_deref(), trace.as_deref(), &overrides),
        Cmd::Oracle {
            graph,
            kind,
            trials,
            seed,
        } => oracle(&graph, kind, trials, seed),
        Cmd::Poisson {
            min,
            points,
            lambda_max,
        } => poisson(min, points, lambda_max),
        Cmd::Accept { scale, workers } => match accept(scale, workers) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(exit::ACCEPTANCE as u8),
            Err(e) => Err(e),
        },
        Cmd::Bench { config, overrides } => bench(config.as_deref(), &overrides),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stochgraph: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
