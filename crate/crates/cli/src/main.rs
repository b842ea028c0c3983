//! `dnls simulate|normal-form|measure|sweep|verify --config <file> --out <dir>`.
//!
//! Exit codes: 0 pass, 1 certificate failure, 2 config error, 3 numerical abort.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dnls_core::exec::with_threads;
use dnls_core::harness::{
    run_measure, run_normal_form_mode, run_simulate, run_sweep, run_verify, write_measure, write_simulate,
    write_sweep, write_verify, ExperimentConfig, HarnessError, SeedSpec,
};

#[derive(Parser)]
#[command(name = "dnls", version, about = "Disordered nonlinear lattice: normal forms, measure estimates, dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate accepted seeds to the localization time.
    Simulate(Common),
    /// Normal form and certificates per accepted seed.
    NormalForm(Common),
    /// Acceptable-set measure battery.
    Measure(Common),
    /// Grid of simulate or verify runs.
    Sweep(Common),
    /// Normal form, conjugacy and sensitivity certificates.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, env = "OUT_DIR")]
    out: PathBuf,
    /// Seeds `a..b` (end exclusive); overrides the config.
    #[arg(long)]
    seed_range: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "THREADS", default_value_t = 0)]
    threads: usize,
}

fn run(command: Command) -> Result<i32, HarnessError> {
    let (Command::Simulate(c) | Command::NormalForm(c) | Command::Measure(c) | Command::Sweep(c) | Command::Verify(c)) =
        &command;
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(r) = &c.seed_range {
        SeedSpec::parse_range(r)?;
        cfg.seeds = SeedSpec::Range(r.clone());
    }
    let out = c.out.clone();
    with_threads(c.threads, move || match command {
        Command::Simulate(_) => {
            let r = run_simulate(&cfg)?;
            write_simulate(&out, &r)?;
            Ok(r.exit_code())
        }
        Command::NormalForm(_) => {
            let r = run_normal_form_mode(&cfg)?;
            write_verify(&out, &r)?;
            Ok(r.exit_code())
        }
        Command::Verify(_) => {
            let r = run_verify(&cfg)?;
            write_verify(&out, &r)?;
            Ok(r.exit_code())
        }
        Command::Measure(_) => {
            let r = run_measure(&cfg)?;
            write_measure(&out, &r)?;
            Ok(r.exit_code())
        }
        Command::Sweep(_) => {
            let r = run_sweep(&cfg)?;
            write_sweep(&out, &r)?;
            Ok(r.exit_code())
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("dnls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
