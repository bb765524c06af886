use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permris::metrics::{Ensemble, DEFAULT_N_STARTS};
use permris::Direction;

use crate::perm_spec::PermSpec;

#[derive(Parser, Debug)]
#[command(name = "permris", version, about = "Gain and selectivity of permuted reflecting surfaces")]
pub struct Cli {
    /// Worker threads for parallel sweeps (default: available parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; scalar commands default to text, tables to csv
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Surface {
    /// Side length M of the M x M surface
    #[arg(long = "m", value_parser = clap::value_parser!(u32).range(1..))]
    pub m: u32,

    /// identity | random[:SEED] | symmetric[:SEED] | separable:FILE | explicit:FILE
    #[arg(long, default_value = "identity")]
    pub perm: PermSpec,

    /// Seed for random permutations without an inline seed and for the optimizer
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConfigKind {
    /// Full gain from the configured incoming to the configured outgoing direction
    Optimal,
    /// Weighted mix of both link directions, see --alpha
    Split,
    /// One phase per connected pair (needs an involution)
    Pair,
    /// All phases zero
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertifyMethod {
    Exact,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleArg {
    General,
    Separable,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::General => Ensemble::General,
            EnsembleArg::Separable => Ensemble::Separable,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gain for one incoming/outgoing pair
    Gain {
        #[command(flatten)]
        surface: Surface,
        /// Incoming direction `kx,ky`
        #[arg(long = "in", allow_hyphen_values = true)]
        incoming: Direction,
        /// Outgoing direction `kx,ky`
        #[arg(long = "to", allow_hyphen_values = true)]
        outgoing: Direction,
        #[arg(long, value_enum, default_value = "optimal")]
        config: ConfigKind,
        /// Configured incoming direction (default: --in)
        #[arg(long, allow_hyphen_values = true)]
        k: Option<Direction>,
        /// Configured outgoing direction (default: --to)
        #[arg(long, allow_hyphen_values = true)]
        ktilde: Option<Direction>,
        /// Forward weight of the split configuration
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Outgoing directions reaching full gain on a standard surface
    SolveDirection {
        /// Incoming direction `kx,ky` (visible)
        #[arg(long, allow_hyphen_values = true)]
        t: Direction,
        /// Configuration direction `kx,ky`: phases are s(r)
        #[arg(long, allow_hyphen_values = true)]
        r: Direction,
    },
    /// Decide spatial selectivity
    Certify {
        #[command(flatten)]
        surface: Surface,
        /// Row factor, 1-based, e.g. 4,3,1,2 (overrides --perm)
        #[arg(long, value_delimiter = ',', requires = "cols")]
        rows: Option<Vec<usize>>,
        /// Column factor, 1-based
        #[arg(long, value_delimiter = ',', requires = "rows")]
        cols: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "exact")]
        method: CertifyMethod,
        /// Exclusion radius around the configured pair (grid method)
        #[arg(long, default_value_t = 0.3)]
        exclusion: f64,
        /// Grid step (grid method)
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Cap on grid evaluations
        #[arg(long, env = "PERMRIS_BUDGET", default_value_t = permris::selectivity::DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Main-lobe floor beta for one or more radii
    Beta {
        #[command(flatten)]
        surface: Surface,
        /// Ball radii, comma separated and increasing (default by M: 5 -> 0.3, 10 -> 0.15, 20 -> 0.08)
        #[arg(long, value_delimiter = ',')]
        delta: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_N_STARTS)]
        n_starts: usize,
    },
    /// Out-of-lobe peak tau
    Tau {
        #[command(flatten)]
        surface: Surface,
        /// Exclusion radius (default by M: 5 -> 0.3, 10 -> 0.15, 20 -> 0.08)
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_N_STARTS)]
        n_starts: usize,
    },
    /// Empirical CDF of tau over random permutations
    TauCdf {
        #[arg(long = "m", value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 100)]
        n_perms: usize,
        #[arg(long, default_value_t = DEFAULT_N_STARTS)]
        n_starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "general")]
        ensemble: EnsembleArg,
    },
    /// Normalized gain on the slice Delta = rho_x (1,1), Delta~ = rho_y (1,1)
    Pattern {
        #[command(flatten)]
        surface: Surface,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        rho_min: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        rho_max: f64,
        /// Grid points per axis
        #[arg(long, default_value_t = 101)]
        rho_steps: usize,
    },
    /// Monte-Carlo mean of the split-configuration gain
    SplitCheck {
        #[arg(long = "m", value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte-Carlo mean of the shared-pair gain on symmetric permutations
    SymCheck {
        #[arg(long = "m", value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}
