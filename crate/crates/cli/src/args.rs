use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "rigidity", version, about = "Projective rigidity rel cusp for once-punctured torus bundles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full pipeline and verdict for a monodromy word such as LLRR or -RRL.
    Certify {
        monodromy: String,
        /// JSON file with explicit a, b, x matrices ("sl2" or "so31") instead of solving.
        #[arg(long)]
        holonomy: Option<PathBuf>,
    },
    /// Trace solutions with their SL(2,C) and SO(3,1) matrices.
    Holonomy { monodromy: String },
    /// Twisted Alexander polynomial of a presentation file.
    Alexander {
        file: PathBuf,
        /// Generator whose column is removed (default: first admissible).
        #[arg(long)]
        column: Option<usize>,
    },
    /// Trace equations and their solutions only.
    TraceSolve { monodromy: String },
    /// Monodromy action on ker res_l and its characteristic polynomials.
    Action {
        monodromy: String,
        #[arg(long, value_enum, default_value_t = DirectionArg::Inverse)]
        direction: DirectionArg,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Inverse,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Relative residual allowed in determinant interpolation and exact division.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_det: f64,
    /// Relative remainder allowed when deflating roots and rounding to integers.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_root: f64,
    /// Relative singular-value cutoff for nullspaces.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_null: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Newton starting points.
    #[arg(long, global = true, default_value_t = 64)]
    pub starts: usize,
    /// Comma-separated subset of sl4, v, gl16.
    #[arg(long, global = true, default_value = "sl4,v,gl16")]
    pub reps: String,
    /// Only this trace solution.
    #[arg(long, global = true)]
    pub solution: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}
