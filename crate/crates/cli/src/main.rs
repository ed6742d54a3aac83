use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use bgrecon_cli::{run_experiment, CliError, ExperimentConfig, ExperimentId, Overrides};
use clap::Parser;

/// Run one reconstruction experiment and write its CSV, SVG and manifest.
#[derive(Debug, Parser)]
#[command(name = "bgrecon", version)]
struct Args {
    /// fig1 … fig6, table1 or hadamard.
    experiment: String,
    /// Grid intervals (k_max for hadamard).
    #[arg(long)]
    n: Option<usize>,
    /// Weight of the quadratic term.
    #[arg(long)]
    nu: Option<f64>,
    /// Relative noise level.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default out/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of key=value lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), CliError> {
    let id: ExperimentId = args.experiment.parse()?;
    let file = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Overrides::parse(&text)?
        }
        None => Overrides::default(),
    };
    let flags = Overrides { n: args.n, nu: args.nu, eps: args.eps, seed: args.seed, out: args.out };
    let cfg = ExperimentConfig::new(id, file.merged_with(flags))?;
    let report = run_experiment(&cfg)?;
    for line in &report.summary {
        println!("{line}");
    }
    println!("wrote {} files to {}", report.files.len() + 1, report.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bgrecon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
