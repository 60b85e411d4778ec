use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use switchwave_core::fd::CrossParams;
use switchwave_core::{EnergySeries, Preset};

use crate::io::{fmt_f64, write_series_csv, write_summary_json, Summary};
use crate::pipeline::{self, RegionRow};

#[derive(Debug, Parser)]
#[command(
    name = "switchwave",
    version,
    about = "Switched and delayed feedback for the 1-D wave equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interior point feedback at xi = ell/2, solved along characteristics.
    SimulatePointwise(PointwiseArgs),
    /// Switched feedback at the right end, solved along characteristics.
    SimulateBoundary(BoundaryArgs),
    /// Switched internal damping on (0, ell), leapfrog finite differences.
    SimulateInternal(InternalArgs),
    /// Stability verdicts over a parameter grid.
    StabilityRegion(RegionArgs),
    /// Spectral radius and predicted energy slope, without simulating.
    PredictRate(PredictArgs),
    /// Finite-difference energy against the characteristic solution.
    CrossValidate(CrossArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    Pointwise,
    Boundary,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    /// Nodes per half length (characteristic solvers) or intervals (finite differences).
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 100.0)]
    pub tmax: f64,
    #[arg(long, default_value = "sine", value_parser = parse_preset)]
    pub ic: Preset,
    /// Energy series CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON. Printed to stdout when absent.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointwiseArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    /// Damper position; only ell/2 is supported.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: f64,
}

#[derive(Debug, Args)]
pub struct InternalArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1.0)]
    pub b1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 4.0)]
    pub tstar: f64,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, value_enum)]
    pub system: System,
    /// lo:hi:step
    #[arg(long, allow_hyphen_values = true)]
    pub a_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2_range: Option<String>,
    /// Distance from the region edges inside which the predicate is not compared.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_enum)]
    pub system: System,
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CrossArgs {
    #[arg(long, value_enum)]
    pub system: System,
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    /// Nodes per half length of the characteristic reference.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value = "sine", value_parser = parse_preset)]
    pub ic: Preset,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: Option<f64>,
    /// Finite-difference interval counts.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    pub resolutions: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: switchwave_core::Error| e.to_string())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn emit(series: &EnergySeries, summary: &Summary, common: &Common) -> anyhow::Result<()> {
    if let Some(path) = &common.out {
        write_series_csv(create(path)?, series)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    match &common.json {
        Some(path) => write_summary_json(create(path)?, summary)?,
        None => write_summary_json(std::io::stdout().lock(), summary)?,
    }
    Ok(())
}

fn emit_summary(summary: &Summary, json: &Option<PathBuf>) -> anyhow::Result<()> {
    match json {
        Some(path) => write_summary_json(create(path)?, summary),
        None => write_summary_json(std::io::stdout().lock(), summary),
    }
}

fn require(value: Option<f64>, flag: &str) -> anyhow::Result<f64> {
    value.with_context(|| format!("--{flag} is required for this system"))
}

fn write_region<W: Write>(mut w: W, system: System, rows: &[RegionRow]) -> std::io::Result<()> {
    let (head, radius) = match system {
        System::Pointwise => ("a", "rho"),
        System::Boundary => ("mu1,mu2", "abs_lambda2"),
    };
    writeln!(w, "# system={}", system_name(system))?;
    writeln!(w, "{head},{radius},stable,predicate")?;
    for row in rows {
        let mut line = fmt_f64(row.x);
        if let Some(y) = row.y {
            line.push(',');
            line.push_str(&fmt_f64(y));
        }
        let predicate = row
            .predicate
            .map_or("excluded", |p| if p { "true" } else { "false" });
        writeln!(
            w,
            "{line},{},{},{predicate}",
            fmt_f64(row.radius),
            row.stable
        )?;
    }
    w.flush()
}

fn system_name(system: System) -> &'static str {
    match system {
        System::Pointwise => "pointwise",
        System::Boundary => "boundary",
    }
}

fn stability_region(args: &RegionArgs) -> anyhow::Result<()> {
    let rows = match args.system {
        System::Pointwise => {
            let range = args.a_range.as_deref().unwrap_or("-0.5:2.5:0.05");
            pipeline::pointwise_region(&pipeline::parse_range(range)?, args.eps)
        }
        System::Boundary => {
            let mu1s = pipeline::parse_range(args.mu1_range.as_deref().unwrap_or("-4:4:0.1"))?;
            let mu2s = pipeline::parse_range(args.mu2_range.as_deref().unwrap_or("-4:4:0.1"))?;
            pipeline::boundary_region(&mu1s, &mu2s, args.eps)?
        }
    };
    if let Some(path) = &args.out {
        write_region(create(path)?, args.system, &rows)?;
    }
    let compared = rows.iter().filter(|r| r.predicate.is_some()).count();
    let disagreements = rows.iter().filter(|r| !r.agrees()).count();
    println!(
        "{} points, {} compared, {} disagreements",
        rows.len(),
        compared,
        disagreements
    );
    Ok(())
}

fn cross_validate(args: &CrossArgs) -> anyhow::Result<()> {
    let params = match args.system {
        System::Pointwise => CrossParams::Pointwise {
            a: require(args.a, "a")?,
        },
        System::Boundary => CrossParams::Boundary {
            mu1: require(args.mu1, "mu1")?,
            mu2: require(args.mu2, "mu2")?,
        },
    };
    let report = pipeline::cross_validate(params, args.ic, args.ell, args.grid, &args.resolutions)?;
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(out, "# system={}", system_name(args.system))?;
    writeln!(out, "nx,rel_diff")?;
    for (nx, rel) in &report.rows {
        writeln!(out, "{nx},{}", fmt_f64(*rel))?;
    }
    out.flush()?;
    if args.out.is_some() {
        println!("monotone={}", report.monotone);
    }
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::SimulatePointwise(args) => {
            let c = &args.common;
            pipeline::check_xi(c.ell, args.xi)?;
            let o = pipeline::simulate_pointwise(c.ell, c.grid, args.a, c.ic, c.tmax)?;
            emit(&o.series, &o.summary, c)
        }
        Command::SimulateBoundary(args) => {
            let c = &args.common;
            let o = pipeline::simulate_boundary(c.ell, c.grid, args.mu1, args.mu2, c.ic, c.tmax)?;
            emit(&o.series, &o.summary, c)
        }
        Command::SimulateInternal(args) => {
            let c = &args.common;
            let r = pipeline::simulate_internal(
                c.ell, c.grid, args.b1, args.b2, args.tau, args.tstar, c.ic, c.tmax,
            )?;
            emit(&r.outcome.series, &r.outcome.summary, c)
        }
        Command::StabilityRegion(args) => stability_region(&args),
        Command::PredictRate(args) => {
            let summary = match args.system {
                System::Pointwise => pipeline::predict_pointwise(args.ell, require(args.a, "a")?),
                System::Boundary => pipeline::predict_boundary(
                    args.ell,
                    require(args.mu1, "mu1")?,
                    require(args.mu2, "mu2")?,
                )?,
            };
            emit_summary(&summary, &args.json)
        }
        Command::CrossValidate(args) => cross_validate(&args),
    }
}

/// Parses `argv` and runs it, returning the process exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
