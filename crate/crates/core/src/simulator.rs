//! Periodic D1Q3 advection runs.
//!
//! A step is a cellwise collision `F ← R F` followed by streaming: `f₁`
//! moves one cell left, `f₂` stays, `f₃` moves one cell right. Runs start
//! at equilibrium and track running extrema rather than full histories.

use std::io::{self, Write};

use log::warn;
use thiserror::Error;

use crate::matrix::Matrix3;
use crate::regionscan::fmt_sig17;
use crate::scheme::{
    build_relaxation_matrix, equilibrium_distributions, equilibrium_weights, Distribution, SchemeParameters,
};

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("grid needs at least one cell")]
    EmptyGrid,
    #[error("invalid space step {0}")]
    InvalidSpaceStep(f64),
    #[error("initial density is negative ({value} at cell {cell})")]
    NegativeDensity { cell: usize, value: f64 },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("custom profile has {got} samples for {expected} cells")]
    ProfileLength { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Periodic lattice `x_k = kΔx`, `k = 0..n_cells`, with `Δt = Δx/λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub n_cells: usize,
    pub dx: f64,
    pub dt: f64,
}

impl Grid1D {
    pub fn new(n_cells: usize, dx: f64, lambda: f64) -> Result<Self, SimulationError> {
        if n_cells == 0 {
            return Err(SimulationError::EmptyGrid);
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(SimulationError::InvalidSpaceStep(dx));
        }
        Ok(Self {
            n_cells,
            dx,
            dt: dx / lambda,
        })
    }

    /// `n_cells` cells on a domain of length `length`, time step from the
    /// lattice velocity of `p`.
    pub fn with_length(n_cells: usize, length: f64, p: &SchemeParameters) -> Result<Self, SimulationError> {
        if n_cells == 0 {
            return Err(SimulationError::EmptyGrid);
        }
        Self::new(n_cells, length / n_cells as f64, p.lambda)
    }

    pub fn length(&self) -> f64 {
        self.n_cells as f64 * self.dx
    }

    pub fn x(&self, k: usize) -> f64 {
        k as f64 * self.dx
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind {
    /// `low + (high − low)·exp(−d²/w²)`.
    Smooth,
    /// Triangle of half-width `w`: continuous with kinks.
    Hat,
    /// Rectangular pulse of half-width `w`.
    Step,
    /// One density sample per cell.
    Custom(Vec<f64>),
}

/// Initial density on the periodic domain. `center` and `width` are
/// fractions of the domain length; `d` is the periodic distance to the center.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialProfile {
    pub kind: ProfileKind,
    pub center: f64,
    pub width: f64,
    pub low: f64,
    pub high: f64,
}

impl InitialProfile {
    pub fn new(kind: ProfileKind) -> Self {
        Self {
            kind,
            center: 0.25,
            width: 0.1,
            low: 0.0,
            high: 1.0,
        }
    }

    pub fn smooth() -> Self {
        Self::new(ProfileKind::Smooth)
    }

    pub fn hat() -> Self {
        Self::new(ProfileKind::Hat)
    }

    pub fn step() -> Self {
        Self::new(ProfileKind::Step)
    }

    pub fn custom(samples: Vec<f64>) -> Self {
        Self::new(ProfileKind::Custom(samples))
    }

    pub fn validate(&self, grid: &Grid1D) -> Result<(), SimulationError> {
        if let ProfileKind::Custom(samples) = &self.kind {
            if samples.len() != grid.n_cells {
                return Err(SimulationError::ProfileLength {
                    expected: grid.n_cells,
                    got: samples.len(),
                });
            }
            if let Some((cell, &value)) = samples.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
                return Err(SimulationError::NegativeDensity { cell, value });
            }
            return Ok(());
        }
        if !(self.width > 0.0 && self.width.is_finite()) || !self.center.is_finite() {
            return Err(SimulationError::InvalidProfile(format!(
                "center {} and width {} must be finite, width positive",
                self.center, self.width
            )));
        }
        for value in [self.low, self.high] {
            if value < 0.0 || !value.is_finite() {
                return Err(SimulationError::NegativeDensity { cell: 0, value });
            }
        }
        Ok(())
    }

    /// Density at position `x` (any real; wrapped onto the domain).
    pub fn density_at(&self, x: f64, grid: &Grid1D) -> f64 {
        let length = grid.length();
        match &self.kind {
            ProfileKind::Custom(samples) => {
                // Periodic linear interpolation between cell samples.
                let n = samples.len();
                let pos = x.rem_euclid(length) / grid.dx;
                let k = (pos.floor() as usize) % n;
                let t = pos - pos.floor();
                (1.0 - t) * samples[k] + t * samples[(k + 1) % n]
            }
            _ => self.density_at_fraction(x.rem_euclid(length) / length),
        }
    }

    /// Density at `xr·L` for `xr` in `[0, 1)`; not meaningful for custom
    /// profiles.
    fn density_at_fraction(&self, xr: f64) -> f64 {
        let raw = (xr - self.center.rem_euclid(1.0)).abs();
        let d = raw.min(1.0 - raw);
        let amp = self.high - self.low;
        match &self.kind {
            ProfileKind::Smooth => self.low + amp * (-(d / self.width).powi(2)).exp(),
            ProfileKind::Hat => self.low + amp * (1.0 - d / self.width).max(0.0),
            ProfileKind::Step => {
                if d <= self.width {
                    self.high
                } else {
                    self.low
                }
            }
            ProfileKind::Custom(_) => f64::NAN,
        }
    }

    /// Values at the lattice points, located as exact fractions `k/n` of
    /// the domain so that pulse edges on lattice points are kept
    /// symmetrically.
    pub fn sample(&self, grid: &Grid1D) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Custom(samples) => samples.clone(),
            _ => (0..grid.n_cells)
                .map(|k| self.density_at_fraction(k as f64 / grid.n_cells as f64))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    pub f: Vec<Distribution>,
    pub step_count: usize,
}

impl LatticeState {
    pub fn densities(&self) -> Vec<f64> {
        self.f.iter().map(|c| c[0] + c[1] + c[2]).collect()
    }

    pub fn mass(&self) -> f64 {
        self.f.iter().map(|c| c[0] + c[1] + c[2]).sum()
    }

    pub fn min_f(&self) -> f64 {
        self.f.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Equilibrium initialization `f(k) = f^eq(ρ₀(x_k))`.
pub fn init_state(
    profile: &InitialProfile,
    grid: &Grid1D,
    p: &SchemeParameters,
) -> Result<LatticeState, SimulationError> {
    profile.validate(grid)?;
    let rho = profile.sample(grid);
    if let Some((cell, &value)) = rho.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(SimulationError::NegativeDensity { cell, value });
    }
    let w = equilibrium_weights(p);
    if w.iter().any(|x| *x < 0.0) {
        warn!(
            "equilibrium weights {w:?} have a negative entry for V = {}, alpha = {}",
            p.v, p.alpha
        );
    }
    Ok(LatticeState {
        f: rho.iter().map(|&r| equilibrium_distributions(r, p)).collect(),
        step_count: 0,
    })
}

pub fn relax(state: &mut LatticeState, r: &Matrix3) {
    for cell in &mut state.f {
        *cell = r.mul_vec(*cell);
    }
}

/// Streams `f₁` left and `f₃` right by one cell, periodically.
pub fn stream(state: &mut LatticeState) {
    let n = state.f.len();
    if n < 2 {
        return;
    }
    let first_left = state.f[0][0];
    for k in 0..n - 1 {
        state.f[k][0] = state.f[k + 1][0];
    }
    state.f[n - 1][0] = first_left;
    let last_right = state.f[n - 1][2];
    for k in (1..n).rev() {
        state.f[k][2] = state.f[k - 1][2];
    }
    state.f[0][2] = last_right;
}

/// Undoes [`stream`].
pub fn stream_inverse(state: &mut LatticeState) {
    for cell in &mut state.f {
        cell.swap(0, 2);
    }
    stream(state);
    for cell in &mut state.f {
        cell.swap(0, 2);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunDiagnostics {
    pub min_f_over_run: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    /// Largest `|mass(tⁿ) − mass(0)| / mass(0)` over the run (absolute
    /// change when the initial mass is zero).
    pub mass_drift: f64,
    pub l1_error: f64,
    pub overshoot: f64,
    pub undershoot: f64,
}

pub const DIAGNOSTICS_HEADER: &str = "min_f_over_run,min_rho,max_rho,mass_drift,l1_error,overshoot,undershoot";

impl RunDiagnostics {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{DIAGNOSTICS_HEADER}")?;
        let fields = [
            self.min_f_over_run,
            self.min_rho,
            self.max_rho,
            self.mass_drift,
            self.l1_error,
            self.overshoot,
            self.undershoot,
        ];
        let row: Vec<String> = fields.iter().map(|v| fmt_sig17(*v)).collect();
        writeln!(out, "{}", row.join(","))?;
        out.flush()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub f: Vec<Distribution>,
}

pub const SNAPSHOT_HEADER: &str = "step,cell,x,f1,f2,f3,rho";

pub fn write_snapshots<W: Write>(snapshots: &[Snapshot], grid: &Grid1D, mut out: W) -> io::Result<()> {
    writeln!(out, "{SNAPSHOT_HEADER}")?;
    for snap in snapshots {
        for (k, c) in snap.f.iter().enumerate() {
            writeln!(
                out,
                "{},{k},{},{},{},{},{}",
                snap.step,
                fmt_sig17(grid.x(k)),
                fmt_sig17(c[0]),
                fmt_sig17(c[1]),
                fmt_sig17(c[2]),
                fmt_sig17(c[0] + c[1] + c[2])
            )?;
        }
    }
    out.flush()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub diagnostics: RunDiagnostics,
    pub final_state: LatticeState,
    pub snapshots: Vec<Snapshot>,
}

/// A lattice state together with the relaxation matrix and running
/// diagnostics.
pub struct Simulation {
    grid: Grid1D,
    params: SchemeParameters,
    relaxation: Matrix3,
    state: LatticeState,
    initial_mass: f64,
    initial_min_rho: f64,
    initial_max_rho: f64,
    min_f: f64,
    min_rho: f64,
    max_rho: f64,
    mass_drift: f64,
}

impl Simulation {
    pub fn new(profile: &InitialProfile, grid: Grid1D, params: SchemeParameters) -> Result<Self, SimulationError> {
        let state = init_state(profile, &grid, &params)?;
        let rho = state.densities();
        let lo = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            grid,
            params,
            relaxation: build_relaxation_matrix(&params),
            initial_mass: state.mass(),
            initial_min_rho: lo,
            initial_max_rho: hi,
            min_f: state.min_f(),
            min_rho: lo,
            max_rho: hi,
            mass_drift: 0.0,
            state,
        })
    }

    pub fn state(&self) -> &LatticeState {
        &self.state
    }

    pub fn relaxation_matrix(&self) -> &Matrix3 {
        &self.relaxation
    }

    pub fn step(&mut self) {
        relax(&mut self.state, &self.relaxation);
        // Streaming permutes values, so this is also the post-step minimum.
        self.min_f = self.min_f.min(self.state.min_f());
        stream(&mut self.state);
        self.state.step_count += 1;

        let mut mass = 0.0;
        for c in &self.state.f {
            let rho = c[0] + c[1] + c[2];
            mass += rho;
            self.min_rho = self.min_rho.min(rho);
            self.max_rho = self.max_rho.max(rho);
        }
        let change = (mass - self.initial_mass).abs();
        let drift = if self.initial_mass != 0.0 {
            change / self.initial_mass.abs()
        } else {
            change
        };
        self.mass_drift = self.mass_drift.max(drift);
    }

    /// `∫|ρ − ρ_exact|` at the current time, with the exact solution the
    /// initial profile translated by `λV t`.
    pub fn l1_error(&self, profile: &InitialProfile) -> f64 {
        let shift = self.params.lambda * self.params.v * self.state.step_count as f64 * self.grid.dt;
        let shift_cells = shift / self.grid.dx;
        let n = self.grid.n_cells as i64;
        // Whole-cell shifts reuse the initial samples so that pulse edges
        // lying on lattice points are not re-evaluated with rounding.
        let aligned = (shift_cells - shift_cells.round()).abs() < 1e-9;
        let initial = if aligned {
            profile.sample(&self.grid)
        } else {
            Vec::new()
        };
        self.state
            .densities()
            .iter()
            .enumerate()
            .map(|(k, rho)| {
                let exact = if aligned {
                    initial[(k as i64 - shift_cells.round() as i64).rem_euclid(n) as usize]
                } else {
                    profile.density_at(self.grid.x(k) - shift, &self.grid)
                };
                (rho - exact).abs()
            })
            .sum::<f64>()
            * self.grid.dx
    }

    pub fn diagnostics(&self, profile: &InitialProfile) -> RunDiagnostics {
        RunDiagnostics {
            min_f_over_run: self.min_f,
            min_rho: self.min_rho,
            max_rho: self.max_rho,
            mass_drift: self.mass_drift,
            l1_error: self.l1_error(profile),
            overshoot: (self.max_rho - self.initial_max_rho).max(0.0),
            undershoot: (self.initial_min_rho - self.min_rho).max(0.0),
        }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            step: self.state.step_count,
            f: self.state.f.clone(),
        }
    }
}

/// Runs `n_steps` collide-and-stream steps. With `snapshot_every = Some(k)`
/// the state is recorded at step 0, every `k` steps and at the end.
pub fn run(
    profile: &InitialProfile,
    grid: &Grid1D,
    p: &SchemeParameters,
    n_steps: usize,
    snapshot_every: Option<usize>,
) -> Result<RunOutput, SimulationError> {
    let mut sim = Simulation::new(profile, *grid, *p)?;
    let every = snapshot_every.filter(|k| *k > 0);
    let mut snapshots = Vec::new();
    if every.is_some() {
        snapshots.push(sim.snapshot());
    }
    for n in 1..=n_steps {
        sim.step();
        if let Some(k) = every {
            if n % k == 0 || n == n_steps {
                snapshots.push(sim.snapshot());
            }
        }
    }
    Ok(RunOutput {
        diagnostics: sim.diagnostics(profile),
        final_state: sim.state.clone(),
        snapshots,
    })
}
