//! Region maps in the `(s, s')` plane.
//!
//! For fixed `(V, u)` every grid point is classified as
//! [`Classification::Feasible`] (some `α` makes `R` non-negative),
//! [`Classification::NecessaryOnly`] (inside the necessary polytope but with
//! no admissible `α`) or [`Classification::Outside`].

mod svg;

use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::stability::{alpha_feasibility, gamma_feasible_interval, necessary_margins, AlphaFeasibility, TAU_STAB};

pub use svg::{emit_svg, SvgStyle};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("axis `{axis}` needs at least 2 points, got {points}")]
    TooFewPoints { axis: &'static str, points: usize },
    #[error("axis `{axis}` range [{min}, {max}] is degenerate")]
    DegenerateRange { axis: &'static str, min: f64, max: f64 },
    #[error("scan needs at least one relative velocity")]
    NoRelativeVelocity,
    #[error("non-finite scan parameter")]
    NonFinite,
    #[error("malformed region CSV at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    fn validate(&self, axis: &'static str) -> Result<(), ScanError> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(ScanError::NonFinite);
        }
        if self.points < 2 {
            return Err(ScanError::TooFewPoints {
                axis,
                points: self.points,
            });
        }
        if self.max <= self.min {
            return Err(ScanError::DegenerateRange {
                axis,
                min: self.min,
                max: self.max,
            });
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + i as f64 * step
                }
            })
            .collect()
    }
}

impl Default for AxisRange {
    fn default() -> Self {
        Self::new(0.0, 2.2, 221)
    }
}

/// `-2V, -V, 0, V/2, V, 2V` with duplicates dropped (all six coincide at
/// `V = 0`).
pub fn default_u_list(v: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(6);
    for u in [-2.0 * v, -v, 0.0, 0.5 * v, v, 2.0 * v] {
        // Adding +0 turns -0 into +0.
        let u = u + 0.0;
        if !out.contains(&u) {
            out.push(u);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanSpec {
    pub v: f64,
    pub u_list: Vec<f64>,
    pub s_range: AxisRange,
    pub s_prime_range: AxisRange,
    /// Tolerance applied to the necessary-region margins.
    pub guard: f64,
}

impl ScanSpec {
    pub fn new(v: f64) -> Self {
        Self {
            v,
            u_list: default_u_list(v),
            s_range: AxisRange::default(),
            s_prime_range: AxisRange::default(),
            guard: TAU_STAB,
        }
    }

    pub fn with_u_list(mut self, u_list: Vec<f64>) -> Self {
        self.u_list = u_list;
        self
    }

    pub fn with_grid(mut self, s_range: AxisRange, s_prime_range: AxisRange) -> Self {
        self.s_range = s_range;
        self.s_prime_range = s_prime_range;
        self
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        self.s_range.validate("s")?;
        self.s_prime_range.validate("s_prime")?;
        if self.u_list.is_empty() {
            return Err(ScanError::NoRelativeVelocity);
        }
        if !self.v.is_finite() || !self.guard.is_finite() || self.u_list.iter().any(|u| !u.is_finite()) {
            return Err(ScanError::NonFinite);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Feasible,
    NecessaryOnly,
    Outside,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Feasible => "FEASIBLE",
            Classification::NecessaryOnly => "NECESSARY_ONLY",
            Classification::Outside => "OUTSIDE",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "FEASIBLE" => Some(Classification::Feasible),
            "NECESSARY_ONLY" => Some(Classification::NecessaryOnly),
            "OUTSIDE" => Some(Classification::Outside),
            _ => None,
        }
    }

    /// Inside the necessary region (feasible cells included).
    pub fn is_necessary(&self) -> bool {
        !matches!(self, Classification::Outside)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionCell {
    pub s: f64,
    pub s_prime: f64,
    pub classification: Classification,
    /// `(γ_lower, γ_upper)`, present iff feasible.
    pub gamma: Option<(f64, f64)>,
}

/// Classification of one grid at fixed `(V, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid {
    pub v: f64,
    pub u: f64,
    pub s_values: Vec<f64>,
    pub s_prime_values: Vec<f64>,
    /// Row-major, `s` outer and `s'` inner.
    pub cells: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn cell(&self, i_s: usize, i_sp: usize) -> &RegionCell {
        &self.cells[i_s * self.s_prime_values.len() + i_sp]
    }

    pub fn count(&self, class: Classification) -> usize {
        self.cells.iter().filter(|c| c.classification == class).count()
    }

    /// Area fraction of the scanned rectangle covered by feasible cells.
    pub fn feasible_fraction(&self) -> f64 {
        self.count(Classification::Feasible) as f64 / self.cells.len() as f64
    }
}

pub fn classify(v: f64, u: f64, s: f64, s_prime: f64, guard: f64) -> RegionCell {
    let feasible = alpha_feasibility(v, u, s, s_prime);
    let (classification, gamma) = match feasible {
        AlphaFeasibility::Interval(_) | AlphaFeasibility::Unconstrained { feasible: true, .. } => {
            let g = gamma_feasible_interval(v, u, s, s_prime);
            (Classification::Feasible, Some((g.lower, g.upper)))
        }
        _ if necessary_margins(v, s, s_prime).iter().all(|m| *m >= -guard) => (Classification::NecessaryOnly, None),
        _ => (Classification::Outside, None),
    };
    RegionCell {
        s,
        s_prime,
        classification,
        gamma,
    }
}

/// Classifies every grid point for every `u` of the spec.
pub fn scan(spec: &ScanSpec) -> Result<Vec<RegionGrid>, ScanError> {
    spec.validate()?;
    let s_values = spec.s_range.values();
    let s_prime_values = spec.s_prime_range.values();
    let points: Vec<(f64, f64)> = s_values
        .iter()
        .flat_map(|&s| s_prime_values.iter().map(move |&sp| (s, sp)))
        .collect();
    Ok(spec
        .u_list
        .iter()
        .map(|&u| RegionGrid {
            v: spec.v,
            u,
            s_values: s_values.clone(),
            s_prime_values: s_prime_values.clone(),
            cells: points
                .par_iter()
                .map(|&(s, sp)| classify(spec.v, u, s, sp, spec.guard))
                .collect(),
        })
        .collect())
}

pub const CSV_HEADER: &str = "V,u,s,s_prime,class,gamma_lower,gamma_upper";

/// 17 significant digits, round-trips through `f64::from_str`.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One header, then one row per cell of each grid in order.
pub fn emit_csv<W: Write>(grids: &[RegionGrid], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for grid in grids {
        let (v, u) = (fmt_sig17(grid.v), fmt_sig17(grid.u));
        for cell in &grid.cells {
            let (lo, hi) = match cell.gamma {
                Some((lo, hi)) => (fmt_sig17(lo), fmt_sig17(hi)),
                None => (String::new(), String::new()),
            };
            writeln!(
                out,
                "{v},{u},{},{},{},{lo},{hi}",
                fmt_sig17(cell.s),
                fmt_sig17(cell.s_prime),
                cell.classification.label()
            )?;
        }
    }
    out.flush()
}

/// Reads back the output of [`emit_csv`]. Consecutive rows sharing `(V, u)`
/// form one grid.
pub fn parse_csv<R: BufRead>(input: R) -> Result<Vec<RegionGrid>, ScanError> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim_end) != Some(CSV_HEADER) {
        return Err(ScanError::Parse {
            line: 1,
            reason: "missing header".into(),
        });
    }
    let mut grouped: Vec<(f64, f64, Vec<RegionCell>)> = Vec::new();
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let err = |reason: &str| ScanError::Parse {
            line: line_no,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(err("expected 7 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
        let (v, u, s, sp) = (num(fields[0])?, num(fields[1])?, num(fields[2])?, num(fields[3])?);
        let classification = Classification::from_label(fields[4]).ok_or_else(|| err("bad class"))?;
        let gamma = match (fields[5], fields[6]) {
            ("", "") => None,
            (lo, hi) => Some((num(lo)?, num(hi)?)),
        };
        if gamma.is_some() != (classification == Classification::Feasible) {
            return Err(err("gamma bounds present iff FEASIBLE"));
        }
        let cell = RegionCell {
            s,
            s_prime: sp,
            classification,
            gamma,
        };
        match grouped.last_mut() {
            Some((gv, gu, cells)) if gv.to_bits() == v.to_bits() && gu.to_bits() == u.to_bits() => cells.push(cell),
            _ => grouped.push((v, u, vec![cell])),
        }
    }
    grouped
        .into_iter()
        .map(|(v, u, cells)| {
            let mut s_values: Vec<f64> = Vec::new();
            for c in &cells {
                if s_values.last().is_none_or(|last| last.to_bits() != c.s.to_bits()) {
                    s_values.push(c.s);
                }
            }
            let n_sp = cells.len() / s_values.len();
            if n_sp * s_values.len() != cells.len() {
                return Err(ScanError::Parse {
                    line: 0,
                    reason: "grid is not rectangular".into(),
                });
            }
            let s_prime_values = cells[..n_sp].iter().map(|c| c.s_prime).collect();
            Ok(RegionGrid {
                v,
                u,
                s_values,
                s_prime_values,
                cells,
            })
        })
        .collect()
}
