//! `expoweb`: pictures, certificates and self-checks for `e^z + a` and
//! Fatou's function.

mod check;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{parse_complex, parse_view, JobConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<expoweb_core::Error> for CliError {
    fn from(e: expoweb_core::Error) -> Self {
        use expoweb_core::Error as E;
        match e {
            E::InvalidInput(_) | E::Precondition(_) | E::Unsupported(_) => CliError::Config(e.to_string()),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "expoweb", version, about = "Dynamics of e^z + a: renders, separation certificates, hairs, self-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Parameter a as re,im.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    a: Option<[f64; 2]>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    /// Pixel grid, WxH.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file; its values override flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render basin and Julia set classes to PPM or PNG.
    Render {
        #[command(flatten)]
        common: Common,
        /// re_min,re_max,im_min,im_max
        #[arg(long, value_parser = parse_view, allow_hyphen_values = true)]
        view: Option<[f64; 4]>,
        /// phase or mono.
        #[arg(long)]
        palette: Option<String>,
        #[arg(long)]
        r: Option<f64>,
        /// Overlay the hair with this address, e.g. "1,(0)". Repeatable.
        #[arg(long = "hair", allow_hyphen_values = true)]
        hairs: Vec<String>,
        /// Also write the A_R-or-basin mask as PGM.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Build and re-verify a separation certificate.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: Option<[f64; 2]>,
        /// Raster resolution per side.
        #[arg(long)]
        samples: Option<usize>,
        /// Overlay image of rectangle, trap, discs and samples.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    /// Trace hairs and export them as JSON.
    Hairs {
        #[command(flatten)]
        common: Common,
        /// External address such as "(0)" or "1,(0)". Repeatable.
        #[arg(long = "address", allow_hyphen_values = true)]
        addresses: Vec<String>,
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// Fast-escape membership for Fatou's function.
    Fatou {
        #[command(flatten)]
        common: Common,
        /// Point re,im. Repeatable.
        #[arg(long = "z", value_parser = parse_complex, allow_hyphen_values = true)]
        points: Vec<[f64; 2]>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        n0_max: Option<usize>,
    },
    /// Run invariant suites and emit a JSON report.
    Check {
        #[command(flatten)]
        common: Common,
        /// Comma-separated: growth, r_zero, residuals, raster. Empty selects none.
        #[arg(long)]
        suites: Option<String>,
        /// Additive constant for the growth suite.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn flags(common: Common) -> (JobConfig, Option<PathBuf>) {
    let Common { a, eps, depth, grid, out, config } = common;
    (JobConfig { a, eps, depth, grid, out, ..Default::default() }, config)
}

fn resolve(common: Common, extra: JobConfig) -> Result<JobConfig, CliError> {
    let (base, path) = flags(common);
    let from_flags = extra.over(base);
    match path {
        Some(p) => Ok(JobConfig::load(&p)?.over(from_flags)),
        None => Ok(from_flags),
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("EXPOWEB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("EXPOWEB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Render { common, view, palette, r, hairs, mask } => {
            let addresses = (!hairs.is_empty()).then_some(hairs);
            let cfg = resolve(common, JobConfig { view, palette, r, addresses, mask, ..Default::default() })?;
            commands::render(&cfg)
        }
        Command::Certify { common, z0, samples, overlay } => {
            let cfg = resolve(common, JobConfig { z0, samples, overlay, ..Default::default() })?;
            commands::certify(&cfg)
        }
        Command::Hairs { common, addresses, t_max } => {
            let addresses = (!addresses.is_empty()).then_some(addresses);
            let cfg = resolve(common, JobConfig { addresses, t_max, ..Default::default() })?;
            commands::hairs(&cfg)
        }
        Command::Fatou { common, points, t, n0_max } => {
            let points = (!points.is_empty()).then_some(points);
            let cfg = resolve(common, JobConfig { points, t, n0_max, ..Default::default() })?;
            commands::fatou(&cfg)
        }
        Command::Check { common, suites, k, samples, seed } => {
            let suites = suites.map(|s| s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect());
            let cfg = resolve(common, JobConfig { suites, k, samples, seed, ..Default::default() })?;
            check::run(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("expoweb: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
