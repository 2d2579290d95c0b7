use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use tailrisk::orders::{
    check_icx, check_p0_tvar, min_p0, parametric_p0, quantile_crossings, MinP0, OrderConfig,
};
use tailrisk::risk::{tvar, var};
use tailrisk::{CrossingReport, Error, OrderCertificate};

mod analyze;
mod law;

use law::{parse_law, parse_levels};

/// Tail value at risk, p0-tvar order certificates and return-series analysis.
#[derive(Parser)]
#[command(name = "tailrisk", version, about)]
struct Cli {
    /// Seed recorded in reports for reproducibility
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Slack allowed on each order inequality
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Base number of grid points for order checks
    #[arg(long, global = true, default_value_t = 400)]
    grid: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print VaR and TVaR of one law as CSV
    Tvar {
        /// `family(a,b)` or `empirical:<csv>`
        #[arg(long)]
        dist: String,
        /// A level, a comma list, or `start:end:count`
        #[arg(long)]
        p: String,
    },
    /// Certify the p0-tvar order of X below Y
    Compare {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Level to certify; defaults to the smallest admissible one
        #[arg(long)]
        p0: Option<f64>,
    },
    /// Test, fit and compare two price series
    Analyze {
        #[arg(long)]
        prices_x: PathBuf,
        #[arg(long)]
        prices_y: PathBuf,
        /// Families to fit, comma separated
        #[arg(long, default_value = "normal,logistic")]
        fit: String,
        /// Directory for plot-ready CSV files
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    InfiniteMean(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::InfiniteMean(_) => 3,
            CliError::Runtime(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) | CliError::InfiniteMean(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InfiniteMean(_) => CliError::InfiniteMean(e.to_string()),
            Error::Domain(_) | Error::InvalidParameter(_) | Error::Ingestion { .. } => {
                CliError::Parse(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = OrderConfig {
        tolerance: cli.tolerance,
        grid_points: cli.grid,
    };
    let result = match &cli.command {
        Command::Tvar { dist, p } => run_tvar(dist, p),
        Command::Compare { x, y, p0 } => run_compare(x, y, *p0, &cfg),
        Command::Analyze {
            prices_x,
            prices_y,
            fit,
            plot_dir,
        } => analyze::run(prices_x, prices_y, fit, plot_dir.as_deref(), &cfg, cli.seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("tailrisk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run_tvar(dist: &str, p: &str) -> Result<u8, CliError> {
    let law = parse_law(dist)?;
    let levels = parse_levels(p)?;
    let mut out = String::from("p,var,tvar\n");
    for p in levels {
        let v = var(law.as_law(), p)?;
        let t = tvar(law.as_law(), p)?;
        out.push_str(&format!("{p},{v},{t}\n"));
    }
    print!("{out}");
    Ok(0)
}

#[derive(Serialize)]
#[serde(untagged)]
enum Outcome<T> {
    Value(T),
    Error { error: String },
}

impl<T> From<tailrisk::Result<T>> for Outcome<T> {
    fn from(r: tailrisk::Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Value(v),
            Err(e) => Outcome::Error {
                error: e.to_string(),
            },
        }
    }
}

#[derive(Serialize)]
struct CompareReport {
    x: String,
    y: String,
    min_p0: MinP0,
    requested_p0: f64,
    ordered: bool,
    certificates: Vec<OrderCertificate>,
    crossings: Outcome<CrossingReport>,
    parametric_p0: Option<Outcome<f64>>,
    tolerance: f64,
    grid: usize,
}

fn run_compare(x: &str, y: &str, p0: Option<f64>, cfg: &OrderConfig) -> Result<u8, CliError> {
    let lx = parse_law(x)?;
    let ly = parse_law(y)?;
    let (x_law, y_law) = (lx.as_law(), ly.as_law());
    let minimal = min_p0(x_law, y_law, cfg)?;
    let requested = match (p0, minimal) {
        (Some(p), _) => p,
        (None, MinP0::Ordered(p)) => p,
        (None, MinP0::NotOrdered) => 0.0,
    };
    let p0_cert = check_p0_tvar(x_law, y_law, requested, cfg)?;
    let icx = check_icx(x_law, y_law, cfg)?;
    let ordered = p0_cert.holds() && (p0.is_some() || minimal != MinP0::NotOrdered);
    let parametric = match (lx.distribution(), ly.distribution()) {
        (Some(dx), Some(dy)) => Some(parametric_p0(dx, dy).into()),
        _ => None,
    };
    let report = CompareReport {
        x: x_law.label(),
        y: y_law.label(),
        min_p0: minimal,
        requested_p0: requested,
        ordered,
        certificates: vec![p0_cert, icx],
        crossings: quantile_crossings(x_law, y_law).into(),
        parametric_p0: parametric,
        tolerance: cfg.tolerance,
        grid: cfg.grid_points,
    };
    emit_json(&report)?;
    Ok(if ordered { 0 } else { 1 })
}

pub(crate) fn emit_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}").map_err(|e| CliError::Runtime(e.to_string()))
}
