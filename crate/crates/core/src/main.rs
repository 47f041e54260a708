use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twisted_tube::cli::{exit_code, parse_config, run, Command, EnergySpec, Format, RunConfig};
use twisted_tube::Error;

/// Effective dynamics of a particle in a slightly transformed twisted tube.
#[derive(Parser)]
#[command(name = "twisted-tube", version)]
struct Args {
    /// JSON run configuration; the built-in helix example when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<Format>,
    /// number of axial grid points
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// energy, or "auto"
    #[arg(long, global = true)]
    energy: Option<EnergySpec>,
    /// more log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// transverse modes and <L>
    Modes,
    /// closed-form metric against finite differences
    GeometryCheck,
    /// coefficients of the effective Hamiltonian along s
    Effective,
    /// lowest levels and the counter-propagating splitting
    Spectrum,
    /// integrate the coupled equations from s = 0
    Propagate,
    /// semiclassical branches
    Wkb,
    /// cross-section snapshots of the + branch
    FieldScan,
    /// quantum geometric tensor over (omega, f) and along the tube
    Qgt,
    /// Berry phase around a loop, area against line integral
    BerryLoop,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Modes => Command::Modes,
            Cmd::GeometryCheck => Command::GeometryCheck,
            Cmd::Effective => Command::Effective,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Propagate => Command::Propagate,
            Cmd::Wkb => Command::Wkb,
            Cmd::FieldScan => Command::FieldScan,
            Cmd::Qgt => Command::Qgt,
            Cmd::BerryLoop => Command::BerryLoop,
        }
    }
}

fn execute(args: &Args) -> Result<bool, Error> {
    let mut cfg = match &args.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::example(),
    };
    if let Some(dir) = &args.out {
        cfg.outputs.dir = dir.clone();
    }
    if let Some(f) = args.format {
        cfg.outputs.format = f;
    }
    if let Some(n) = args.grid {
        cfg.grid.points = n;
    }
    if let Some(e) = args.energy {
        cfg.energy = e;
    }
    let report = run(args.command.into(), &cfg)?;
    println!("{}", report.line);
    Ok(report.passed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: check failed");
            ExitCode::from(exit_code(&Error::CheckFailed(String::new())))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
