//! `skewrh`: moments, skew-orthogonal polynomials, zeros, Riemann-Hilbert and
//! Pfaff-lattice checks from the command line.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for numerical
//! failures.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skewrh::moments::Beta;
use skewrh::potweights::Potential;
use skewrh::PrecisionContext;

const VERIFY_TOL: f64 = 1e-20;

#[derive(Parser)]
#[command(
    name = "skewrh",
    version,
    about = "Skew-orthogonal polynomials at arbitrary precision"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Potential coefficients "c0,c1,...,cd" (lowest degree first).
    #[arg(long, global = true)]
    potential: Option<String>,
    /// 1 (orthogonal) or 4 (symplectic).
    #[arg(long, global = true, default_value_t = 1)]
    beta: u32,
    #[arg(long, global = true, default_value_t = 4)]
    kmax: usize,
    #[arg(
        long = "precision-bits",
        global = true,
        env = "SKEWRH_PRECISION_BITS",
        default_value_t = 256
    )]
    precision_bits: u32,
    #[arg(long = "quad-tol", global = true, default_value_t = 1e-30)]
    quad_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Even,
    Odd,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Skew moment matrix and one-dimensional moments.
    Moments {
        /// Matrix size (default 2 kmax + 2).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Monic skew-orthogonal polynomials p_0 .. p_{2 kmax + 1} and norms.
    Polys,
    /// Gram matrix of the family under the skew inner product.
    Gram,
    /// Roots, interlacing and a root histogram.
    Zeros {
        #[arg(long, default_value_t = 40)]
        bins: usize,
        #[arg(long, value_enum, default_value_t = Family::All)]
        family: Family,
        /// Histogram file (default: next to --out).
        #[arg(long = "hist-out")]
        hist_out: Option<PathBuf>,
    },
    /// Build and verify the Riemann-Hilbert solution (JSON report).
    RhVerify {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "even")]
        parity: String,
        /// Odd problem parameters "a_k,b_0,...,b_{d-1}", each like "0.5-1.5i".
        #[arg(long = "free-params")]
        free_params: Option<String>,
        /// Ray angles in radians.
        #[arg(long, default_value = "1.0471975511965976,2.0943951023931957")]
        rays: String,
        #[arg(long, default_value = "100,1000,10000")]
        radii: String,
        /// Number of jump sample points on [-2, 2].
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Pfaff-lattice flow residuals against the step size.
    PfaffCheck {
        #[arg(long, default_value_t = 2)]
        j: usize,
        /// Largest step, as a decimal string.
        #[arg(long = "t-step", default_value = "1e-3")]
        t_step: String,
        #[arg(long, default_value_t = 3)]
        halvings: usize,
        #[arg(long, default_value_t = 4)]
        window: usize,
    },
    /// Pfaffians and determinants of the leading even minors.
    Pfaffian {
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(skewrh::Error),
    Io(String),
}

impl From<skewrh::Error> for CliError {
    fn from(e: skewrh::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Numeric(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(s) => write!(f, "output error: {s}"),
        }
    }
}

/// Validated global settings.
pub struct RunConfig {
    pub potential: Potential,
    pub potential_text: String,
    pub beta: Beta,
    pub kmax: usize,
    pub ctx: PrecisionContext,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn from_global(g: &Global) -> Result<Self, CliError> {
        let ctx = PrecisionContext::new(g.precision_bits, g.quad_tol, VERIFY_TOL)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let text = g
            .potential
            .clone()
            .ok_or_else(|| CliError::Config("--potential is required".into()))?;
        let potential =
            Potential::parse(&text, &ctx).map_err(|e| CliError::Config(e.to_string()))?;
        let beta = Beta::from_u32(g.beta).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(RunConfig {
            potential,
            potential_text: text,
            beta,
            kmax: g.kmax,
            ctx,
            format: g.format,
            out: g.out.clone(),
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_global(&cli.global)?;
    let outputs = match cli.cmd {
        Cmd::Moments { n } => commands::moments(&cfg, n)?,
        Cmd::Polys => commands::polys(&cfg)?,
        Cmd::Gram => commands::gram(&cfg)?,
        Cmd::Zeros {
            bins,
            family,
            hist_out,
        } => commands::zeros(&cfg, bins, family, hist_out)?,
        Cmd::RhVerify {
            k,
            parity,
            free_params,
            rays,
            radii,
            points,
        } => commands::rh_verify(
            &cfg,
            k,
            &parity,
            free_params.as_deref(),
            &rays,
            &radii,
            points,
        )?,
        Cmd::PfaffCheck {
            j,
            t_step,
            halvings,
            window,
        } => commands::pfaff_check(&cfg, j, &t_step, halvings, window)?,
        Cmd::Pfaffian { n } => commands::pfaffian(&cfg, n)?,
    };
    outputs.commit()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("skewrh: {e}");
            ExitCode::from(e.code())
        }
    }
}
