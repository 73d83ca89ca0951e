//! Command-line front end for the experiment harness.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use netexp::harness::{self, io, ExperimentConfig};

#[derive(Parser)]
#[command(name = "netexp", version)]
#[command(about = "Simulate randomized experiments on networks under interference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override the output directory from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute only the ground-truth table.
    Truth {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute summaries and plot data from a results directory.
    Report { results_dir: PathBuf },
    /// Validate a config file and describe the grid it spans.
    Validate { config: PathBuf },
}

fn load_config(path: &PathBuf, out: Option<PathBuf>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    Ok(cfg)
}

fn print_summary_digest(summaries: &[harness::SummaryRow]) {
    println!(
        "{:<12} {:>7} {:>6} {:>6}  {:<10} {:<26} {:>12} {:>12} {:>12} {:>10}",
        "graph",
        "param",
        "beta",
        "gamma",
        "design",
        "estimator",
        "truth",
        "bias",
        "rmse",
        "d_rmse_%"
    );
    for r in summaries {
        let fmt = |v: Option<f64>| v.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<12} {:>7} {:>6} {:>6}  {:<10} {:<26} {:>12.5} {:>12} {:>12} {:>10}",
            r.graph_kind,
            r.graph_param,
            r.beta,
            r.gamma,
            r.design,
            r.estimator,
            r.truth,
            fmt(r.bias),
            fmt(r.rmse),
            r.pct_change_rmse
                .map(|v| format!("{v:.1}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config, out)?;
            let output = harness::run_experiment(&cfg)?;
            io::write_run_output(&cfg, &output)?;
            print_summary_digest(&output.summaries);
            eprintln!(
                "wrote {} replication rows, {} truth rows to {}",
                output.replications.len(),
                output.truths.len(),
                cfg.output.dir.display()
            );
        }
        Command::Truth { config, out } => {
            let cfg = load_config(&config, out)?;
            let truths = harness::compute_truth(&cfg)?;
            std::fs::create_dir_all(&cfg.output.dir)?;
            io::write_truth_csv(&truths, &cfg.output.dir.join(io::TRUTH_FILE))?;
            io::write_metadata(&cfg, &cfg.output.dir.join(io::METADATA_FILE))?;
            for t in &truths {
                println!(
                    "{} p={} beta={} gamma={}: ate={:.6} se={:.6} ({} reps)",
                    t.cell.graph_kind,
                    t.cell.graph_param,
                    t.cell.beta,
                    t.cell.gamma,
                    t.ate,
                    t.se,
                    t.replications
                );
            }
        }
        Command::Report { results_dir } => {
            let summaries = io::report_from_dir(&results_dir)?;
            print_summary_digest(&summaries);
        }
        Command::Validate { config } => {
            let cfg = load_config(&config, None)?;
            cfg.validate()?;
            let cells = cfg.cells();
            let estimators = cfg.estimator_instances();
            println!("config OK");
            println!(
                "grid: {} cells x {} designs x {} estimators, {} replications each",
                cells.len(),
                cfg.designs.len(),
                estimators.len(),
                cfg.replications
            );
            println!(
                "total estimator evaluations: {}",
                cells.len() * cfg.designs.len() * estimators.len() * cfg.replications
            );
        }
    }
    Ok(())
}
