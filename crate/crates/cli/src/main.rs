mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coverage_core::{AlphaDomain, Error, Overrides};

#[derive(Parser, Debug)]
#[command(
    name = "coverage",
    version,
    about = "Coverage placement with line-of-sight sensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Objective value of the positions in a CSV file.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// CSV with header `agent,x,y`.
        #[arg(long)]
        positions: PathBuf,
    },
    /// Greedy placement on the candidate lattice.
    Greedy(Common),
    /// Greedy placement refined by gradient ascent.
    Gga(Common),
    /// Curvatures and the bounds they certify for the greedy placement.
    Bounds(Common),
    /// Bounds over a range of one sensing parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `<lambda|delta>:<start>:<stop>:<steps>`
        #[arg(long)]
        sweep: String,
    },
    /// Exhaustive optimum over the candidate lattice.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Largest number of subsets to enumerate.
        #[arg(long, default_value_t = 2_000_000)]
        cap: u128,
    },
    /// Randomized submodularity, definition-equivalence and curvature checks.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Joint detection probability over the grid after refinement.
    Heatmap {
        #[command(flatten)]
        common: Common,
        /// Use these positions instead of running the optimizer.
        #[arg(long)]
        positions: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario JSON file.
    #[arg(value_name = "SCENARIO", required_unless_present = "scenario_flag")]
    scenario: Option<PathBuf>,
    #[arg(long = "scenario", value_name = "PATH", conflicts_with = "scenario")]
    scenario_flag: Option<PathBuf>,
    /// Directory for CSV/PGM artifacts; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_h: Option<f64>,
    #[arg(long)]
    candidates_spacing: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value = "feasible", value_parser = parse_domain)]
    alpha_domain: AlphaDomain,
}

fn parse_domain(s: &str) -> Result<AlphaDomain, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn scenario_path(&self) -> &PathBuf {
        self.scenario
            .as_ref()
            .or(self.scenario_flag.as_ref())
            .expect("clap requires one of the two")
    }

    fn overrides(&self) -> Overrides {
        Overrides {
            grid_h: self.grid_h,
            candidate_spacing: self.candidates_spacing,
            agents: self.n,
            lambda: self.lambda,
            delta: self.delta,
            seed: self.seed,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InstanceTooLarge { .. } => 3,
        e if e.is_validation() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
