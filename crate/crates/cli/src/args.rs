use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "freudlab", version, about = "Recurrence coefficients from discrete Painlevé maps and moments")]
pub struct Cli {
    /// Significant decimal digits (default: config `digits`, then FREUDLAB_DIGITS, then the command default).
    #[arg(long, global = true)]
    pub digits: Option<u32>,

    /// TOML file with flat keys mirroring the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, conflicts_with_all = ["json", "text"])]
    pub csv: bool,

    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,

    #[arg(long, global = true)]
    pub text: bool,

    /// Write to this file instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default, Clone)]
pub struct FamilyArgs {
    /// hermite, freud4, freud6, circle, charlier, gcharlier, qhermite, qfreud, qfreud-gen
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub rho: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate a family's recurrence (or tabulate its closed form).
    #[command(allow_negative_numbers = true)]
    Compute {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: Option<i64>,
    },
    /// Coefficients from moments at adaptive precision.
    #[command(allow_negative_numbers = true)]
    Oracle {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: Option<i64>,
    },
    /// Forward iteration against the moment oracle.
    #[command(allow_negative_numbers = true)]
    Compare {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: Option<i64>,
        /// Relative deviation counted as divergence.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Symbolic singularity-confinement report.
    #[command(allow_negative_numbers = true)]
    Confine {
        /// dp1, dp2, qp1, qp1-gen
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        n0: Option<i64>,
        /// zero, plus-one, minus-one
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        delta: Option<String>,
        /// dp2: alpha = 1/sqrt(a); a must be a rational square.
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        c: Option<String>,
        /// Also replay numerically with small epsilon.
        #[arg(long)]
        shadow: bool,
    },
    /// Data behind the three instability figures.
    #[command(allow_negative_numbers = true)]
    Figures {
        #[arg(long)]
        which: Option<u8>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        q: Option<String>,
    },
    /// Scaled coefficients against their large-n limit.
    #[command(allow_negative_numbers = true)]
    Asymptotics {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: Option<i64>,
    },
    /// List the equation catalog.
    Catalog,
    /// Breakdown index of forward iteration across precisions.
    #[command(allow_negative_numbers = true)]
    Frontier {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long, value_delimiter = ',')]
        precisions: Option<Vec<u32>>,
    },
}
