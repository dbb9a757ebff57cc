use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use holder_lab::experiments::{describe, run_experiment, ExperimentConfig, EXPERIMENTS};

#[derive(Parser)]
#[command(name = "holder-lab", version, about = "Distance, volume and trace experiments on sequences of surface metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the named experiments.
    List,
    /// Run one experiment and write report.csv / report.json.
    Run {
        name: String,
        /// TOML config; its `experiment` key must match NAME.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: reports/NAME).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Nodes per axis of the main grid.
        #[arg(long)]
        grid: Option<usize>,
    },
}

fn run(name: String, config: Option<PathBuf>, out: Option<PathBuf>, seed: Option<u64>, grid: Option<usize>) -> anyhow::Result<bool> {
    let mut cfg = match &config {
        Some(path) => {
            let cfg = ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?;
            if cfg.experiment != name {
                bail!("config is for `{}`, not `{name}`", cfg.experiment);
            }
            cfg
        }
        None => ExperimentConfig::new(&name),
    };
    if seed.is_some() {
        cfg.seed = seed;
    }
    if grid.is_some() {
        cfg.grid = grid;
    }
    if let Some(dir) = out {
        cfg.out = Some(dir);
    } else if cfg.out.is_none() {
        cfg.out = Some(PathBuf::from("reports").join(&name));
    }
    cfg.validate()?;
    let report = run_experiment(&cfg)?;
    for row in &report.rows {
        let status = match (row.reference, row.pass) {
            (None, _) => "info",
            (Some(_), true) => "PASS",
            (Some(_), false) => "FAIL",
        };
        let reference = row.reference.map(|r| format!(" ref {r:.6}")).unwrap_or_default();
        println!("{status:4}  {:<40} {:<44} {:.6}{reference}", row.case, row.quantity, row.computed);
    }
    let dir = cfg.out.as_ref().expect("output directory set above");
    println!("wrote {}", dir.display());
    Ok(report.all_checks_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            for name in EXPERIMENTS {
                println!("{name:<22} {}", describe(name).unwrap_or(""));
            }
            Ok(true)
        }
        Command::Run { name, config, out, seed, grid } => run(name, config, out, seed, grid),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
