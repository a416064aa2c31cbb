//! `ahlfors`: analytic capacity, conformal maps and capacity sweeps from the command line.

mod commands;
mod svg;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use ahlfors_core::experiments::{KoebeFamily, DEFAULT_DELTA_LADDER, DEFAULT_GAPS, DEFAULT_KOEBE_LADDER};
use ahlfors_core::WiggleVariant;
use clap::{Args, Parser, Subcommand, ValueEnum};

const SCHEMA_HELP: &str = "\
Output formats:
  csv   header row, then one line per row; '.' decimal point, empty cells for missing values.
  json  {\"meta\": {...}, \"rows\": [{column: value, ...}, ...]}. meta holds every option
        (defaults included), the command name and the column list; missing values are null.
  svg   static drawing of the scene (not available for sweeps).

Columns:
  gamma      method, gamma, nodes, error_estimate, relative_difference
  gammac     method, value, lp_value, observed_sup, certification, rounds, ratio_to_gamma
  ahlfors    x, y, re, im, abs
  koebe      curve, center_x, center_y, radius
  slitmap    slit, lo, hi, length
  painleve   eps, cycle_length, total_variation, bound, mass_re, mass_im, identity_error, error
  sweep      <parameter>, gamma_szego, gamma_slit, gamma_c_lp, <experiment columns>, error

Scenes are JSON scene files, or built-in wiggle sets written wiggle:<thm0|thm1>:<k>:<eps>.

Exit status: 0 on success, 1 on solver failure, 2 on usage or input errors.";

#[derive(Parser, Debug)]
#[command(name = "ahlfors", version, about = "Analytic capacity and conformal maps of finitely connected domains", after_help = SCHEMA_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GammaMethod {
    Szego,
    Slit,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analytic capacity by the Szegő route, the slit-map route, or both.
    Gamma {
        #[command(flatten)]
        scene: SceneArg,
        /// Starting nodes per curve; the solver doubles until converged.
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(16..=8192))]
        nodes: u64,
        #[arg(long, value_enum, default_value_t = GammaMethod::Szego)]
        method: GammaMethod,
    },
    /// Certified lower bounds for the Cauchy capacity and for gamma-plus.
    Gammac {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(8..=4096))]
        support_nodes: u64,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(8..=1024))]
        angles: u64,
        /// Constraint points per support-node spacing.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=64))]
        colloc: u64,
    },
    /// Ahlfors function values on a grid around the scene.
    Ahlfors {
        #[command(flatten)]
        scene: SceneArg,
        /// Grid points along the longer side of the bounding box.
        #[arg(long, default_value_t = 41, value_parser = clap::value_parser!(u64).range(2..=2000))]
        eval_grid: u64,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(16..=8192))]
        nodes: u64,
    },
    /// Circle-domain uniformization by Koebe iteration.
    Koebe {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
    },
    /// Horizontal slit map of a two-component scene.
    Slitmap {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Painlevé measures on outward offset cycles.
    Painleve {
        #[command(flatten)]
        scene: SceneArg,
        /// Offsets, strictly decreasing.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025])]
        eps_ladder: Vec<f64>,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(16..=8192))]
        nodes: u64,
    },
    /// Scripted experiment sweeps.
    Sweep {
        #[command(subcommand)]
        sweep: Sweep,
    },
}

#[derive(Args, Debug)]
pub struct SceneArg {
    /// Scene file, or wiggle:<thm0|thm1>:<k>:<eps>.
    #[arg(long)]
    pub scene: String,
}

#[derive(Subcommand, Debug)]
pub enum Sweep {
    /// Two disks closing to tangency.
    Tangency {
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GAPS)]
        gaps: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Capacities of the fattened x sin(1/x) truncations.
    PaperE {
        #[arg(long, default_value_t = WiggleVariant::Thm1)]
        variant: WiggleVariant,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.02])]
        eps_ladder: Vec<f64>,
    },
    /// Total variation of the boundary-jump measure on the hook set.
    JumpGrowth {
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DELTA_LADDER)]
        deltas: Vec<f64>,
    },
    /// Small disks at low-discrepancy points of the unit disk.
    Counterexample {
        #[arg(long, default_value_t = 20)]
        k_max: usize,
    },
    /// Koebe maps, inverses and Ahlfors functions along a shrinking family.
    KoebeConvergence {
        #[arg(long, default_value_t = KoebeFamily::Elongated)]
        family: KoebeFamily,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_KOEBE_LADDER)]
        deltas: Vec<f64>,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Solver(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}\n\nFor more information, try '--help'."),
                Failure::Solver(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
