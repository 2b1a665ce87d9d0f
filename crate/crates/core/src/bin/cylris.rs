use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cylris::harness::{
    benchmark_iterations, load_config, sweep_ring_size, sweep_uav_azimuth, validate_bounds,
    ScenarioConfig, Table,
};
use cylris::Error;

const EXIT_INPUT: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_VALIDATION: u8 = 5;

#[derive(Parser)]
#[command(name = "cylris", version, about = "Cylindrical RIS phase-shift experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the `seed` key of the scenario file
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sum-SE bounds versus UAV azimuth for each layer count
    SweepAzimuth(Common),
    /// Sum-SE bounds versus elements per ring
    SweepNr(Common),
    /// Gradient iteration counts of the UCA and UPA optimizers
    BenchIters {
        #[command(flatten)]
        common: Common,
        /// Random starts per azimuth
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Monte Carlo check of the SE bound and second moments
    Validate {
        #[command(flatten)]
        common: Common,
        /// Channel realizations per user
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Print the default scenario file
    DefaultConfig,
}

fn load(common: &Common) -> Result<(ScenarioConfig, u64), Error> {
    let cfg = match &common.config {
        Some(p) => load_config(p)?,
        None => ScenarioConfig::default(),
    };
    let seed = common.seed.unwrap_or(cfg.seed);
    Ok((cfg, seed))
}

fn write(table: &Table, out: &Path) -> Result<(), Error> {
    table.write(out)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::SweepAzimuth(c) => {
            let (cfg, seed) = load(&c)?;
            write(&sweep_uav_azimuth(&cfg, &cfg.azimuth_sweep_deg, &cfg.layer_sweep, seed)?, &c.out)?;
        }
        Command::SweepNr(c) => {
            let (cfg, seed) = load(&c)?;
            write(&sweep_ring_size(&cfg, &cfg.ring_sweep, seed)?, &c.out)?;
        }
        Command::BenchIters { common, trials } => {
            let (cfg, seed) = load(&common)?;
            let trials = trials.unwrap_or(cfg.bench_trials);
            write(&benchmark_iterations(&cfg, &cfg.bench_azimuth_deg, trials, seed)?, &common.out)?;
        }
        Command::Validate { common, trials } => {
            let (cfg, seed) = load(&common)?;
            let report = validate_bounds(&cfg, trials.unwrap_or(cfg.mc_trials), seed)?;
            write(&report.table, &common.out)?;
            print!("{}", report.summary);
            if !report.all_pass {
                return Ok(EXIT_VALIDATION);
            }
        }
        Command::DefaultConfig => print!("{}", ScenarioConfig::default().emit()),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_INPUT,
            })
        }
    }
}
