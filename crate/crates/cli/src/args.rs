use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "signject", version, about = "Exact sign-vector tests for injectivity of generalized polynomial maps")]
pub struct Cli {
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,

    /// Working precision in bits for non-integral exponents.
    #[arg(
        long,
        global = true,
        env = "SIGNJECT_PRECISION_BITS",
        default_value_t = 256,
        value_parser = clap::value_parser!(u32).range(64..)
    )]
    pub precision: u32,

    /// Seed for randomized oracles.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SubsetArgs {
    /// S = im(C), C given as a matrix file.
    #[arg(long = "S-image", value_name = "FILE")]
    pub image: Option<PathBuf>,
    /// S = ker(Z).
    #[arg(long = "S-kernel", value_name = "FILE")]
    pub kernel: Option<PathBuf>,
    /// S = union of the orthants with the listed sign vectors.
    #[arg(long = "S-signs", value_name = "FILE")]
    pub signs: Option<PathBuf>,
    /// S = R^n.
    #[arg(long = "full-space")]
    pub full_space: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RouteArg {
    Auto,
    Minors,
    DetPoly,
    SignSearch,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Injectivity of A diag(k) x^B with respect to S, for all k > 0.
    Injectivity {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
        /// Skip building (kappa, x, y) when injectivity fails.
        #[arg(long)]
        no_counterexample: bool,
    },
    /// Sign agreement of the paired s x s minors of Ã and B.
    Minors {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Coefficients of the symbolic determinant of [Z; A' diag(k) B diag(l)].
    GammaDet {
        #[arg(long = "Aprime", value_name = "FILE")]
        aprime: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[arg(long = "Z", value_name = "FILE")]
        z: Option<PathBuf>,
    },
    /// Signs of the maximal minors of A.
    Chirotope {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
    },
    /// Cocircuits of the columns of A.
    Cocircuits {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
    },
    /// Covectors σ(im Aᵀ).
    Covectors {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
    },
    /// Hypotheses for at most / exactly one positive solution.
    Descartes {
        #[command(subcommand)]
        command: DescartesCommand,
    },
    /// Reaction networks.
    Crn {
        #[command(subcommand)]
        command: CrnCommand,
    },
    #[command(hide = true)]
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum DescartesCommand {
    Bnd {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
    },
    Ex {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
    },
    /// Is y in the interior of the cone spanned by the columns of A?
    Cone {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long, value_name = "FILE")]
        y: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CrnCommand {
    /// Injectivity of the network on every compatibility class.
    Preclude {
        network: PathBuf,
        /// JSON overrides {"label": {"species": "p/q"}}.
        #[arg(long, value_name = "FILE")]
        kinetic_orders: Option<PathBuf>,
        #[arg(long)]
        no_counterexample: bool,
    },
    /// Uniqueness of special steady states for the exponent matrix M.
    Special {
        network: PathBuf,
        #[arg(long = "M", value_name = "FILE")]
        m: PathBuf,
        /// Assert that every positive point is a special steady state for
        /// some rate constants.
        #[arg(long)]
        assume_coset: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SignSetArg {
    Kernel,
    Image,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Randomized search for a violation of injectivity.
    Sample {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// det Γ by permutation expansion.
    GammaDet {
        #[arg(long = "Aprime", value_name = "FILE")]
        aprime: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[arg(long = "Z", value_name = "FILE")]
        z: Option<PathBuf>,
    },
    /// Gale dual Z of C and the constant relating their maximal minors.
    Gale {
        #[arg(long = "C", value_name = "FILE")]
        c: PathBuf,
    },
    /// Sign set by exhaustive feasibility checks.
    SignSet {
        #[arg(long = "M", value_name = "FILE")]
        m: PathBuf,
        #[arg(long, value_enum)]
        mode: SignSetArg,
    },
}
