mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sdg_core::Error;

#[derive(Debug, Parser)]
#[command(
    name = "sdg",
    version,
    about = "Combinatorial differential forms, distributions and connections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Input program (.sdg).
    #[arg(long, global = true)]
    pub file: Option<PathBuf>,
    /// Points as `x1,x2,...;y1,y2,...`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub at: Option<String>,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Number of quasi-random sample points when `--at` is absent.
    #[arg(long, global = true, default_value_t = 20)]
    pub samples: usize,
    /// Sampling box, `lo..hi` for every axis or `lo..hi,lo..hi,...`.
    #[arg(
        long = "box",
        global = true,
        default_value = "-1..1",
        allow_hyphen_values = true
    )]
    pub bounds: String,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sample-parallel checks.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    General,
    So,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Combinatorial d against the classical exterior derivative.
    D {
        #[arg(long)]
        form: String,
    },
    /// Combinatorial wedge against the classical wedge.
    Wedge {
        /// Two form names: `--form a --form b`.
        #[arg(long = "form", required = true, num_args = 1)]
        forms: Vec<String>,
    },
    /// A form on displacement vectors at a base point.
    Eval {
        #[arg(long)]
        form: String,
        /// Vectors as `u1,u2,...;v1,v2,...`.
        #[arg(long, allow_hyphen_values = true)]
        vectors: Option<String>,
    },
    /// Combinatorial and classical involutivity tests.
    CheckInvolutive {
        #[arg(long)]
        dist: String,
    },
    /// Whether a patch is an integral manifold of a distribution.
    CheckIntegral {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        patch: String,
        #[arg(long, value_enum, default_value_t = Mode::Weak)]
        mode: Mode,
    },
    /// Coboundary curvature against the classical curvature.
    Curvature {
        #[arg(long)]
        conn: String,
        #[arg(long, value_enum, default_value_t = Group::General)]
        group: Group,
    },
    /// Parallel transport along a loop or a one-parameter patch.
    Holonomy {
        #[arg(long)]
        conn: String,
        /// `circle cx,cy,r`.
        #[arg(long = "loop", allow_hyphen_values = true)]
        loop_spec: Option<String>,
        /// Name of a one-parameter patch.
        #[arg(long)]
        curve: Option<String>,
        #[arg(long, default_value = "0..1", allow_hyphen_values = true)]
        t_range: String,
        #[arg(long, value_enum, default_value_t = Group::General)]
        group: Group,
    },
    /// Log-holonomies against the curvature-generated Lie algebra.
    AmbroseSinger {
        #[arg(long)]
        conn: String,
        #[arg(long = "loop", allow_hyphen_values = true)]
        loops: Vec<String>,
        #[arg(long = "curve")]
        curves: Vec<String>,
        #[arg(long, default_value = "0..1", allow_hyphen_values = true)]
        t_range: String,
        #[arg(long, value_enum, default_value_t = Group::General)]
        group: Group,
    },
    /// Numeric leaf through `--at` by RK4.
    Leaf {
        #[arg(long)]
        dist: String,
        /// Span coefficients, or an ambient vector projected onto the fiber.
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        #[arg(long, default_value_t = 1e-2)]
        step_size: f64,
    },
}

/// Failures and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.common.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok((report, ok)) => {
            print!("{}", report.render(cli.common.format == Format::Json));
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
