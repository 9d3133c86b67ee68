//! Config-driven paired ratio tables, as used by `stochgraph run`.
//!
//! Run with `cargo run --release --example experiment_config`.

use stochgraph::harness::{ratio_report, write_rows_csv, ExperimentConfig};

const CONFIG: &str = "
# three random graphs, mixed probabilities
generator = er
n = 16
density = 0.25
p_min = 0.2
p_max = 0.9
instances = 3
trials = 1000
seed = 42
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for algo in ["vc-nocomm", "vc-waterfill", "matching-two-round", "mds", "oracle-vc"] {
        let cfg = ExperimentConfig::parse(&format!("{CONFIG}algorithm = {algo}\noracle_trials = 500\n"))?;
        let rows = ratio_report(&cfg)?;
        write_rows_csv(&rows, std::io::stdout())?;
    }
    // preconditions are checked before anything runs
    let err = ExperimentConfig::parse(&format!("{CONFIG}algorithm = vc-waterfill\neps_bar = 0.3\n")).unwrap_err();
    println!("{err} (exit code {})", err.exit_code());
    Ok(())
}
