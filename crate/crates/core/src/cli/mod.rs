//! Command-line front-end.
//!
//! Exit codes: 0 success or stable, 1 unstable, 2 usage, 3 I/O failure,
//! 4 invalid input data.

mod number;
pub mod reproduce;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::regionscan::{
    emit_csv, emit_svg, scan, AxisRange, Classification, RegionGrid, ScanError, ScanSpec, SvgStyle,
};
use crate::scheme::{build_relaxation_matrix, SchemeError, SchemeParameters};
use crate::simulator::{run as run_simulation, write_snapshots, Grid1D, InitialProfile, ProfileKind, SimulationError};
use crate::stability::{
    alpha_feasibility, gamma_feasible_interval, matrix_entries, nine_inequalities, reduced_condition,
    relaxation_closed_form, AlphaFeasibility, StabilityVerdict, REDUCED_MARGIN_NAMES,
};

pub use number::{parse_number, parse_relative_velocity, parse_u_list};

/// Undershoot above which a run is reported as oscillating.
pub const OSCILLATION_THRESHOLD: f64 = 1e-3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSTABLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INVALID_INPUT: i32 = 4;

/// Environment variable capping the number of region-scan threads.
pub const THREADS_ENV: &str = "D1Q3_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::InvalidInput(_) => EXIT_INVALID_INPUT,
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Io(io) => CliError::Io(io),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::Io(io) => CliError::Io(io),
            SimulationError::NegativeDensity { .. } | SimulationError::ProfileLength { .. } => {
                CliError::InvalidInput(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn number(text: &str) -> Result<f64, String> {
    parse_number(text)
}

#[derive(Debug, Parser)]
#[command(
    name = "d1q3",
    version,
    about = "D1Q3 lattice Boltzmann scheme with relative velocity: non-negativity regions and advection runs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the relaxation matrix, its closed form and the nine entry slacks.
    Matrix(MatrixArgs),
    /// Decide non-negativity, or the admissible alpha range when --alpha is omitted.
    Check(CheckArgs),
    /// Classify an (s, s') grid and write CSV/SVG region maps.
    Region(RegionArgs),
    /// Run an advection simulation and report diagnostics.
    Simulate(SimulateArgs),
    /// Rerun the four reference cases on the three profiles.
    Reproduce,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long = "V", value_parser = number, allow_hyphen_values = true)]
    pub v: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0")]
    pub u: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long = "sp", value_parser = number, allow_hyphen_values = true)]
    pub s_prime: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_parser = number, default_value = "1")]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long = "V", value_parser = number, allow_hyphen_values = true)]
    pub v: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0")]
    pub u: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long = "sp", value_parser = number, allow_hyphen_values = true)]
    pub s_prime: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long = "V", value_parser = number, allow_hyphen_values = true)]
    pub v: f64,
    /// Comma-separated relative velocities; multiples of V such as `-2V` or
    /// `V/2` are accepted. Defaults to -2V,-V,0,V/2,V,2V.
    #[arg(long = "u-list", allow_hyphen_values = true)]
    pub u_list: Option<String>,
    /// Points per axis, `N` or `NxM` (s by s').
    #[arg(long, default_value = "221")]
    pub grid: String,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0")]
    pub min: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "2.2")]
    pub max: f64,
    /// CSV destination; `-` or omitted writes to standard output.
    #[arg(long = "out-csv")]
    pub out_csv: Option<PathBuf>,
    /// SVG destination; with several u values a `_u<k>` suffix is added.
    #[arg(long = "out-svg")]
    pub out_svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Smooth,
    Hat,
    Step,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "step")]
    pub profile: ProfileArg,
    #[arg(long = "V", value_parser = number, allow_hyphen_values = true)]
    pub v: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0")]
    pub u: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long = "sp", value_parser = number, allow_hyphen_values = true)]
    pub s_prime: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_parser = number, default_value = "1")]
    pub lambda: f64,
    #[arg(long, default_value_t = 200)]
    pub ncells: usize,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long = "snap-every")]
    pub snap_every: Option<usize>,
    /// Pulse center, as a fraction of the domain.
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0.25")]
    pub center: f64,
    /// Pulse half-width, as a fraction of the domain.
    #[arg(long, value_parser = number, default_value = "0.1")]
    pub width: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0")]
    pub low: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "1")]
    pub high: f64,
    /// Output directory for `diagnostics.csv` and `snapshots.csv`; without
    /// it the diagnostics go to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing to
/// `out`/`err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Matrix(a) => cmd_matrix(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Region(a) => cmd_region(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Reproduce => cmd_reproduce(out),
    }
}

fn params_line(p: &SchemeParameters) -> String {
    format!(
        "lambda = {}, V = {}, u = {}, s = {}, s' = {}, alpha = {}",
        p.lambda, p.v, p.u, p.s, p.s_prime, p.alpha
    )
}

pub fn cmd_matrix(a: &MatrixArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let p = SchemeParameters::new(a.lambda, a.v, a.u, a.s, a.s_prime, a.alpha)?;
    let product = build_relaxation_matrix(&p);
    let closed = relaxation_closed_form(&p);
    writeln!(out, "{}", params_line(&p))?;
    writeln!(out, "R (matrix product):\n{product}")?;
    writeln!(out, "R (closed form):\n{closed}")?;
    writeln!(out, "max |product - closed form| = {:e}", product.max_abs_diff(&closed))?;
    let sums = product.column_sums();
    writeln!(out, "column sums: {} {} {}", sums[0], sums[1], sums[2])?;
    let verdict = nine_inequalities(&p);
    writeln!(out, "slacks (R[i][j] >= 0):")?;
    for (k, r) in verdict.slacks.iter().enumerate() {
        writeln!(
            out,
            "  R[{}][{}] = {:>24.17e}{}",
            k / 3,
            k % 3,
            r,
            if *r < 0.0 { "  < 0" } else { "" }
        )?;
    }
    writeln!(out, "non-negative: {}", if verdict.stable { "yes" } else { "no" })?;
    Ok(EXIT_OK)
}

fn describe(verdict: &StabilityVerdict, names: &dyn Fn(usize) -> String) -> String {
    let violated: Vec<String> = verdict
        .slacks
        .iter()
        .enumerate()
        .filter(|(_, r)| **r < -crate::stability::TAU_STAB)
        .map(|(k, _)| names(k))
        .collect();
    let binding: Vec<String> = verdict.binding.iter().map(|&k| names(k)).collect();
    format!(
        "{:<18} {:<8} min slack {:>12.5e}; violated [{}]; binding [{}]",
        verdict.route.name(),
        if verdict.stable { "stable" } else { "unstable" },
        verdict.min_slack,
        violated.join(", "),
        binding.join(", ")
    )
}

pub fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (v, u, s, sp) = (a.v, a.u, a.s, a.s_prime);
    if let Some(alpha) = a.alpha {
        let p = SchemeParameters::unit(v, u, s, sp, alpha)?;
        writeln!(out, "{}", params_line(&p))?;
        let entry = |k: usize| format!("R[{}][{}]", k / 3, k % 3);
        let margin = |k: usize| REDUCED_MARGIN_NAMES[k].to_string();
        let routes = [matrix_entries(&p), nine_inequalities(&p), reduced_condition(&p)];
        writeln!(out, "{}", describe(&routes[0], &entry))?;
        writeln!(out, "{}", describe(&routes[1], &entry))?;
        writeln!(out, "{}", describe(&routes[2], &margin))?;
        if routes.iter().any(|r| r.stable != routes[1].stable) {
            writeln!(out, "warning: routes disagree (sample lies on a region boundary)")?;
        }
        let stable = routes[1].stable;
        writeln!(out, "verdict: {}", if stable { "stable" } else { "unstable" })?;
        return Ok(if stable { EXIT_OK } else { EXIT_UNSTABLE });
    }
    writeln!(out, "V = {v}, u = {u}, s = {s}, s' = {sp}")?;
    let g = gamma_feasible_interval(v, u, s, sp);
    writeln!(
        out,
        "gamma interval: [{}, {}]{}",
        g.lower,
        g.upper,
        if g.empty { " (empty)" } else { "" }
    )?;
    let feasibility = alpha_feasibility(v, u, s, sp);
    match feasibility {
        AlphaFeasibility::Interval(iv) => writeln!(out, "alpha interval: [{}, {}]", iv.lower, iv.upper)?,
        AlphaFeasibility::Empty => writeln!(out, "alpha interval: empty")?,
        AlphaFeasibility::Unconstrained { pinned_gamma, feasible } => writeln!(
            out,
            "alpha-unconstrained: s' = 0 pins gamma to {pinned_gamma}, which is {} the interval",
            if feasible { "inside" } else { "outside" }
        )?,
    }
    let ok = feasibility.is_feasible();
    writeln!(out, "verdict: {}", if ok { "feasible" } else { "infeasible" })?;
    Ok(if ok { EXIT_OK } else { EXIT_UNSTABLE })
}

fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--grid expects N or NxM, got `{text}`"));
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match text.split_once('x') {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(text)?;
            Ok((n, n))
        }
    }
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn svg_path(base: &Path, index: usize, count: usize) -> PathBuf {
    if count == 1 {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = base
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}_u{index}{ext}"))
}

fn summary_line(grid: &RegionGrid) -> String {
    format!(
        "V = {} u = {}: feasible {} necessary-only {} outside {} (feasible fraction {:.4})",
        grid.v,
        grid.u,
        grid.count(Classification::Feasible),
        grid.count(Classification::NecessaryOnly),
        grid.count(Classification::Outside),
        grid.feasible_fraction()
    )
}

pub fn cmd_region(a: &RegionArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let (ns, nsp) = parse_grid(&a.grid)?;
    let u_list = match &a.u_list {
        Some(text) => parse_u_list(text, a.v).map_err(CliError::Usage)?,
        None => crate::regionscan::default_u_list(a.v),
    };
    let spec = ScanSpec::new(a.v)
        .with_u_list(u_list)
        .with_grid(AxisRange::new(a.min, a.max, ns), AxisRange::new(a.min, a.max, nsp));
    spec.validate()?;
    let grids = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| scan(&spec))?,
        None => scan(&spec)?,
    };

    let csv_to_stdout = a.out_csv.as_deref().is_none_or(|p| p == Path::new("-"));
    if csv_to_stdout {
        emit_csv(&grids, &mut *out)?;
    } else {
        let path = a.out_csv.as_ref().unwrap();
        emit_csv(&grids, BufWriter::new(File::create(path)?))?;
    }
    // Keep standard output parseable when it carries the CSV.
    let summary: &mut dyn Write = if csv_to_stdout { err } else { out };
    if let Some(base) = &a.out_svg {
        for (k, grid) in grids.iter().enumerate() {
            let path = svg_path(base, k, grids.len());
            emit_svg(grid, &SvgStyle::default(), BufWriter::new(File::create(&path)?))?;
            writeln!(summary, "wrote {}", path.display())?;
        }
    }
    for grid in &grids {
        writeln!(summary, "{}", summary_line(grid))?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let p = SchemeParameters::new(a.lambda, a.v, a.u, a.s, a.s_prime, a.alpha)?;
    if a.snap_every.is_some() && a.out.is_none() {
        return Err(CliError::Usage("--snap-every needs --out".into()));
    }
    let kind = match a.profile {
        ProfileArg::Smooth => ProfileKind::Smooth,
        ProfileArg::Hat => ProfileKind::Hat,
        ProfileArg::Step => ProfileKind::Step,
    };
    let profile = InitialProfile {
        kind,
        center: a.center,
        width: a.width,
        low: a.low,
        high: a.high,
    };
    let grid = Grid1D::with_length(a.ncells, 1.0, &p)?;
    let result = run_simulation(&profile, &grid, &p, a.steps, a.snap_every)?;
    let d = &result.diagnostics;

    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            d.write_csv(BufWriter::new(File::create(dir.join("diagnostics.csv"))?))?;
            if a.snap_every.is_some() {
                write_snapshots(
                    &result.snapshots,
                    &grid,
                    BufWriter::new(File::create(dir.join("snapshots.csv"))?),
                )?;
            }
        }
        None => d.write_csv(&mut *out)?,
    }

    let verdict = nine_inequalities(&p);
    let flagged = d.undershoot > OSCILLATION_THRESHOLD;
    writeln!(
        out,
        "verdict: R non-negative = {} (min entry {:.6e}); undershoot = {:.6e}, overshoot = {:.6e}, min f = {:.6e}, mass drift = {:.3e}; oscillations {}",
        if verdict.stable { "yes" } else { "no" },
        verdict.min_slack,
        d.undershoot,
        d.overshoot,
        d.min_f_over_run,
        d.mass_drift,
        if flagged { format!("FLAGGED (undershoot > {OSCILLATION_THRESHOLD:e})") } else { "not flagged".to_string() }
    )?;
    Ok(EXIT_OK)
}

pub fn cmd_reproduce(out: &mut dyn Write) -> Result<i32, CliError> {
    let text = reproduce::report()?;
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}
