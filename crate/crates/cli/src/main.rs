use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use phs_cli::{parse_config, run_command, Command, RunOptions};
use phs_core::Tolerances;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Check,
    Simulate,
    Spectrum,
    Deficiency,
    Green,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Check => Command::Check,
            Cmd::Simulate => Command::Simulate,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Deficiency => Command::Deficiency,
            Cmd::Green => Command::Green,
        }
    }
}

/// Classify and simulate 1-D port-Hamiltonian systems with boundary control.
#[derive(Debug, Parser)]
#[command(name = "phs", version)]
struct Args {
    command: Cmd,
    /// JSON system configuration.
    config: PathBuf,
    /// Number of grid cells.
    #[arg(long)]
    n: Option<usize>,
    /// Time step (default h/2).
    #[arg(long, value_parser = positive)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long = "T", id = "T", value_parser = positive)]
    t_end: Option<f64>,
    /// CSV output path (default <command>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative singular value cutoff for rank decisions.
    #[arg(long, value_parser = positive, default_value_t = Tolerances::default().rank_rel)]
    tol_rank: f64,
    /// Absolute slack for positive semidefiniteness.
    #[arg(long, value_parser = positive, default_value_t = Tolerances::default().psd_abs)]
    tol_psd: f64,
    /// Absolute slack for equality checks.
    #[arg(long, value_parser = positive, default_value_t = Tolerances::default().eq_abs)]
    tol_eq: f64,
    /// Include the flattened state in simulate output.
    #[arg(long)]
    with_state: bool,
    /// Random input pairs for green.
    #[arg(long, default_value_t = 8)]
    trials: usize,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        Ok(x) => Err(format!("expected a positive finite number, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

fn run(args: Args) -> Result<String, String> {
    let tol =
        Tolerances::new(args.tol_rank, args.tol_psd, args.tol_eq).map_err(|e| e.to_string())?;
    let text = std::fs::read(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let cfg = parse_config(&text).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let opts = RunOptions {
        n: args.n,
        dt: args.dt,
        t_end: args.t_end,
        out: args.out,
        seed: args.seed,
        tol,
        with_state: args.with_state,
        trials: args.trials,
    };
    let rec = run_command(args.command.into(), &cfg, &opts).map_err(|e| e.to_string())?;
    Ok(rec.to_json())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(json) => {
            // Broken pipes are ignored.
            let _ = writeln!(std::io::stdout().lock(), "{json}");
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
