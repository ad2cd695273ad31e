//! The four reference advection cases, each run on the three profiles.

use std::fmt::Write as _;

use crate::scheme::SchemeParameters;
use crate::simulator::{run, Grid1D, InitialProfile, RunDiagnostics, SimulationError};
use crate::stability::{gamma_feasible_interval, nine_inequalities, reduced_condition};

use super::OSCILLATION_THRESHOLD;

/// One reference parameter row and the stability label it came with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceCase {
    pub label: &'static str,
    pub reported_stable: bool,
    pub v: f64,
    pub u: f64,
    pub s: f64,
    pub s_prime: f64,
    pub alpha: f64,
}

/// Values kept verbatim, including the 17-digit alphas.
pub const REFERENCE_CASES: [ReferenceCase; 4] = [
    ReferenceCase {
        label: "left (stable)",
        reported_stable: true,
        v: 0.25,
        u: 0.0,
        s: 1.6,
        s_prime: 1.3,
        alpha: 0.3076923076923076,
    },
    ReferenceCase {
        label: "left (stable)",
        reported_stable: true,
        v: 0.25,
        u: 0.25,
        s: 1.6,
        s_prime: 1.3,
        alpha: -0.17548076923076938,
    },
    ReferenceCase {
        label: "right (unstable)",
        reported_stable: false,
        v: 0.25,
        u: 0.0,
        s: 1.9,
        s_prime: 1.4,
        alpha: 0.14285714285714302,
    },
    ReferenceCase {
        label: "right (unstable)",
        reported_stable: false,
        v: 0.25,
        u: 0.25,
        s: 1.9,
        s_prime: 1.4,
        alpha: -0.10491071428571441,
    },
];

pub const DEFAULT_CELLS: usize = 200;
pub const DEFAULT_STEPS: usize = 1000;

impl ReferenceCase {
    pub fn params(&self) -> SchemeParameters {
        SchemeParameters::unit(self.v, self.u, self.s, self.s_prime, self.alpha).expect("finite table values")
    }
}

pub fn profiles() -> [(&'static str, InitialProfile); 3] {
    [
        ("smooth", InitialProfile::smooth()),
        ("hat", InitialProfile::hat()),
        ("step", InitialProfile::step()),
    ]
}

pub fn run_case(case: &ReferenceCase, profile: &InitialProfile) -> Result<RunDiagnostics, SimulationError> {
    let p = case.params();
    let grid = Grid1D::with_length(DEFAULT_CELLS, 1.0, &p)?;
    Ok(run(profile, &grid, &p, DEFAULT_STEPS, None)?.diagnostics)
}

fn entry_name(k: usize) -> String {
    format!("R[{}][{}]", k / 3, k % 3)
}

/// Text report: per case the label, computed verdicts and γ-interval
/// status, then one `result` line per profile.
pub fn report() -> Result<String, SimulationError> {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        "reference cases: {DEFAULT_CELLS} cells, {DEFAULT_STEPS} steps, lambda = 1, equilibrium initialization"
    );
    let mut discrepancies = 0;
    for (n, case) in REFERENCE_CASES.iter().enumerate() {
        let p = case.params();
        let nine = nine_inequalities(&p);
        let reduced = reduced_condition(&p);
        let interval = gamma_feasible_interval(p.v, p.u, p.s, p.s_prime);
        let worst = nine
            .slacks
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, &r)| if r < acc.1 { (k, r) } else { acc });
        let _ = writeln!(
            w,
            "case {}/{}: reported {} | V = {} u = {} s = {} s' = {} alpha = {}",
            n + 1,
            REFERENCE_CASES.len(),
            case.label,
            case.v,
            case.u,
            case.s,
            case.s_prime,
            case.alpha
        );
        let _ = writeln!(
            w,
            "  computed: nine inequalities {} (min {} = {:.6}), reduced condition {}, gamma interval [{:.6}, {:.6}] {}",
            if nine.stable { "stable" } else { "unstable" },
            entry_name(worst.0),
            worst.1,
            if reduced.stable { "stable" } else { "unstable" },
            interval.lower,
            interval.upper,
            if interval.empty { "empty" } else { "nonempty" }
        );
        if nine.stable != case.reported_stable {
            discrepancies += 1;
            let _ = writeln!(
                w,
                "  DISCREPANCY: reported {} but computed {}: {} = {:.6} < 0",
                if case.reported_stable { "stable" } else { "unstable" },
                if nine.stable { "stable" } else { "unstable" },
                entry_name(worst.0),
                worst.1
            );
        }
        for (name, profile) in profiles() {
            let d = run_case(case, &profile)?;
            let _ = writeln!(
                w,
                "result case={} profile={:<6} R>=0={:<3} undershoot={:.6e} overshoot={:.6e} min_f={:.6e} mass_drift={:.3e} oscillations={}",
                n + 1,
                name,
                if nine.stable { "yes" } else { "no" },
                d.undershoot,
                d.overshoot,
                d.min_f_over_run,
                d.mass_drift,
                if d.undershoot > OSCILLATION_THRESHOLD { "observed" } else { "none" }
            );
        }
    }
    let _ = writeln!(w, "label/verdict discrepancies: {discrepancies}");
    Ok(out)
}
