//! Non-negativity of the relaxation matrix.
//!
//! The collision `F* = R F` keeps every distribution non-negative exactly
//! when all nine entries of `R` are `≥ 0`. Three routes decide this:
//!
//! * [`matrix_entries`]: the entries of the assembled product,
//! * [`nine_inequalities`]: the entries in closed polynomial form,
//! * [`reduced_condition`]: the single chain
//!   `max(s' − 1, |ū|) ≤ 2γ ≤ min(2 − s − |ū − sV|, s − |ū + sV|, s' − |sV|)`
//!   in the reduced parameters `ū = 2u(s − s')`, `γ = (s'/6)(1 − α) − u(s − s')V`.
//!
//! Regions are closed: a verdict is stable when its smallest slack is
//! `≥ −TAU_STAB`.

use thiserror::Error;

use crate::matrix::Matrix3;
use crate::scheme::{build_relaxation_matrix, SchemeParameters};

/// Tolerance on slacks for a stable verdict.
pub const TAU_STAB: f64 = 1e-11;

/// Width of the band around region boundaries treated as ambiguous when
/// comparing routes.
pub const GUARD_BAND: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    /// With `s' = 0`, `γ = −usV` whatever `α` is.
    #[error("alpha-unconstrained: s' = 0 pins gamma to {pinned_gamma}")]
    AlphaUnconstrained { pinned_gamma: f64 },
    #[error("no admissible alpha: (V, s, s') = ({v}, {s}, {s_prime}) lies outside the u = 0 region")]
    OutsideRegion { v: f64, s: f64, s_prime: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    MatrixEntries,
    NineInequalities,
    ReducedCondition,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::MatrixEntries => "matrix entries",
            Route::NineInequalities => "nine inequalities",
            Route::ReducedCondition => "reduced condition",
        }
    }
}

/// Names of the five margins reported by [`reduced_condition`].
pub const REDUCED_MARGIN_NAMES: [&str; 5] = [
    "2γ ≥ s' − 1",
    "2γ ≥ |ū|",
    "2γ ≤ 2 − s − |ū − sV|",
    "2γ ≤ s − |ū + sV|",
    "2γ ≤ s' − |sV|",
];

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityVerdict {
    pub route: Route,
    pub stable: bool,
    /// Signed residuals; nine entries of `R` (row-major) for the matrix
    /// routes, the five chain margins for the reduced route.
    pub slacks: Vec<f64>,
    pub min_slack: f64,
    /// Indices of slacks within [`GUARD_BAND`] of zero.
    pub binding: Vec<usize>,
}

impl StabilityVerdict {
    pub fn from_slacks(route: Route, slacks: Vec<f64>) -> Self {
        let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
        let binding = slacks
            .iter()
            .enumerate()
            .filter(|(_, r)| r.abs() <= GUARD_BAND)
            .map(|(k, _)| k)
            .collect();
        Self {
            route,
            stable: min_slack >= -TAU_STAB,
            slacks,
            min_slack,
            binding,
        }
    }

    /// Smallest `|slack|`: distance of the sample from the boundary of any
    /// single constraint.
    pub fn min_abs_slack(&self) -> f64 {
        self.slacks.iter().fold(f64::INFINITY, |m, r| m.min(r.abs()))
    }

    /// True when some slack lies within `guard` of zero.
    pub fn near_boundary(&self, guard: f64) -> bool {
        self.min_abs_slack() < guard
    }
}

/// Entries of `R` as explicit polynomials in `(V, u, s, s', α)`.
pub fn relaxation_closed_form(p: &SchemeParameters) -> Matrix3 {
    let SchemeParameters {
        v,
        u,
        s,
        s_prime: sp,
        alpha: a,
        ..
    } = *p;
    // Shared parts of rows 0 and 2, and of row 1.
    let outer = v * s * u - v * sp * u + a * sp / 6.0;
    let half_vs = 0.5 * v * s;
    let middle = -2.0 * v * s * u + 2.0 * v * sp * u - a * sp / 3.0;
    let su = s * u - sp * u;
    Matrix3::new([
        [
            outer - half_vs + su - 0.5 * s - sp / 6.0 + 1.0,
            outer - half_vs + sp / 3.0,
            outer - half_vs - su + 0.5 * s - sp / 6.0,
        ],
        [
            middle - 2.0 * su + sp / 3.0,
            middle - 2.0 * sp / 3.0 + 1.0,
            middle + 2.0 * su + sp / 3.0,
        ],
        [
            outer + half_vs + su + 0.5 * s - sp / 6.0,
            outer + half_vs + sp / 3.0,
            outer + half_vs - su - 0.5 * s - sp / 6.0 + 1.0,
        ],
    ])
}

/// Verdict from the closed-form entries of `R`.
pub fn nine_inequalities(p: &SchemeParameters) -> StabilityVerdict {
    StabilityVerdict::from_slacks(Route::NineInequalities, relaxation_closed_form(p).entries().to_vec())
}

/// Verdict from the entries of the assembled product `M⁻¹T⁻¹(…)TM`.
pub fn matrix_entries(p: &SchemeParameters) -> StabilityVerdict {
    StabilityVerdict::from_slacks(Route::MatrixEntries, build_relaxation_matrix(p).entries().to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedParameters {
    pub u_bar: f64,
    pub gamma: f64,
}

pub fn reduced_parameters(p: &SchemeParameters) -> ReducedParameters {
    let d = p.s - p.s_prime;
    ReducedParameters {
        u_bar: 2.0 * p.u * d,
        gamma: p.s_prime / 6.0 * (1.0 - p.alpha) - p.u * d * p.v,
    }
}

/// Lower and upper terms of the chain bounding `2γ`.
fn chain_terms(v: f64, u: f64, s: f64, s_prime: f64) -> ([f64; 2], [f64; 3]) {
    let u_bar = 2.0 * u * (s - s_prime);
    let sv = s * v;
    (
        [s_prime - 1.0, u_bar.abs()],
        [2.0 - s - (u_bar - sv).abs(), s - (u_bar + sv).abs(), s_prime - sv.abs()],
    )
}

pub fn reduced_condition(p: &SchemeParameters) -> StabilityVerdict {
    let two_gamma = 2.0 * reduced_parameters(p).gamma;
    let (lower, upper) = chain_terms(p.v, p.u, p.s, p.s_prime);
    let slacks = vec![
        two_gamma - lower[0],
        two_gamma - lower[1],
        upper[0] - two_gamma,
        upper[1] - two_gamma,
        upper[2] - two_gamma,
    ];
    StabilityVerdict::from_slacks(Route::ReducedCondition, slacks)
}

/// Feasible values of `γ` at fixed `(V, u, s, s')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaInterval {
    pub lower: f64,
    pub upper: f64,
    pub empty: bool,
}

impl GammaInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, gamma: f64) -> bool {
        !self.empty && gamma >= self.lower - TAU_STAB / 2.0 && gamma <= self.upper + TAU_STAB / 2.0
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

pub fn gamma_feasible_interval(v: f64, u: f64, s: f64, s_prime: f64) -> GammaInterval {
    let (lower, upper) = chain_terms(v, u, s, s_prime);
    let lower = 0.5 * lower[0].max(lower[1]);
    let upper = 0.5 * upper[0].min(upper[1]).min(upper[2]);
    GammaInterval {
        lower,
        upper,
        empty: lower > upper + TAU_STAB,
    }
}

/// Inverts `γ = (s'/6)(1 − α) − u(s − s')V` for `α`.
pub fn alpha_from_gamma(gamma: f64, v: f64, u: f64, s: f64, s_prime: f64) -> Result<f64, StabilityError> {
    if s_prime == 0.0 {
        return Err(StabilityError::AlphaUnconstrained {
            pinned_gamma: pinned_gamma(v, u, s),
        });
    }
    Ok(1.0 - 6.0 * (gamma + u * (s - s_prime) * v) / s_prime)
}

/// The value of `γ` when `s' = 0`.
pub fn pinned_gamma(v: f64, u: f64, s: f64) -> f64 {
    -u * s * v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaInterval {
    pub lower: f64,
    pub upper: f64,
}

impl AlphaInterval {
    pub fn contains(&self, alpha: f64) -> bool {
        alpha >= self.lower - TAU_STAB && alpha <= self.upper + TAU_STAB
    }
}

/// Which values of `α` make `R` non-negative at fixed `(V, u, s, s')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaFeasibility {
    Interval(AlphaInterval),
    Empty,
    /// `s' = 0`: every `α` gives the same `γ`.
    Unconstrained {
        pinned_gamma: f64,
        feasible: bool,
    },
}

impl AlphaFeasibility {
    pub fn is_feasible(&self) -> bool {
        match self {
            AlphaFeasibility::Interval(_) => true,
            AlphaFeasibility::Empty => false,
            AlphaFeasibility::Unconstrained { feasible, .. } => *feasible,
        }
    }
}

pub fn alpha_feasibility(v: f64, u: f64, s: f64, s_prime: f64) -> AlphaFeasibility {
    let interval = gamma_feasible_interval(v, u, s, s_prime);
    if s_prime == 0.0 {
        let pinned = pinned_gamma(v, u, s);
        return AlphaFeasibility::Unconstrained {
            pinned_gamma: pinned,
            feasible: interval.contains(pinned),
        };
    }
    if interval.empty {
        return AlphaFeasibility::Empty;
    }
    // α is affine and decreasing in γ when s' > 0.
    let a = alpha_from_gamma(interval.lower, v, u, s, s_prime).expect("s' != 0");
    let b = alpha_from_gamma(interval.upper, v, u, s, s_prime).expect("s' != 0");
    AlphaFeasibility::Interval(AlphaInterval {
        lower: a.min(b),
        upper: a.max(b),
    })
}

/// True when some `α` puts `(V, u, s, s', α)` in the non-negativity region.
pub fn is_alpha_feasible(v: f64, u: f64, s: f64, s_prime: f64) -> bool {
    alpha_feasibility(v, u, s, s_prime).is_feasible()
}

/// Names of the margins returned by [`u_zero_margins`].
pub const U_ZERO_CONDITION_NAMES: [&str; 9] = [
    "s ≥ 0",
    "s ≤ 2",
    "s' ≥ 0",
    "s' ≤ 2",
    "s' ≥ sV",
    "s ≤ 2/(1+V)",
    "s' ≤ 3 − (1+V)s",
    "s' ≤ 1 + (1−V)s",
    "V ≤ 1",
];

/// Margins of the explicit `u = 0` conditions, for `V` replaced by `|V|`.
pub fn u_zero_margins(v: f64, s: f64, s_prime: f64) -> [f64; 9] {
    let v = v.abs();
    [
        s,
        2.0 - s,
        s_prime,
        2.0 - s_prime,
        s_prime - s * v,
        2.0 / (1.0 + v) - s,
        3.0 - (1.0 + v) * s - s_prime,
        1.0 + (1.0 - v) * s - s_prime,
        1.0 - v,
    ]
}

/// Explicit description of the `u = 0` region in the `(s, s')` plane.
pub fn u_zero_region(v: f64, s: f64, s_prime: f64) -> bool {
    u_zero_margins(v, s, s_prime).iter().all(|m| *m >= -TAU_STAB)
}

/// Admissible `α` at `u = 0`, from
/// `max(s' − 1, 0) ≤ (s'/3)(1 − α) ≤ min(2 − s − s|V|, s − s|V|, s' − s|V|)`.
pub fn u_zero_alpha_bounds(v: f64, s: f64, s_prime: f64) -> Result<AlphaInterval, StabilityError> {
    if s_prime == 0.0 {
        return Err(StabilityError::AlphaUnconstrained { pinned_gamma: 0.0 });
    }
    let outside = StabilityError::OutsideRegion { v, s, s_prime };
    if !u_zero_region(v, s, s_prime) || s_prime < 0.0 {
        return Err(outside);
    }
    let sv = s * v.abs();
    let low = (s_prime - 1.0).max(0.0);
    let high = (2.0 - s - sv).min(s - sv).min(s_prime - sv);
    if low > high + TAU_STAB {
        return Err(outside);
    }
    let high = high.max(low);
    Ok(AlphaInterval {
        lower: 1.0 - 3.0 * high / s_prime,
        upper: 1.0 - 3.0 * low / s_prime,
    })
}

pub const NECESSARY_CONDITION_NAMES: [&str; 10] = [
    "sV ≥ 0",
    "s' ≥ sV",
    "s' ≤ 2",
    "sV ≤ 1",
    "s ≥ 0",
    "s ≤ 2",
    "s' ≤ 2 − sV",
    "s' ≤ s + 1",
    "s' ≤ 3 − s",
    "s ≤ 2/(1+V)",
];

/// Margins of the necessary conditions, for `V` replaced by `|V|`.
pub fn necessary_margins(v: f64, s: f64, s_prime: f64) -> [f64; 10] {
    let v = v.abs();
    let sv = s * v;
    [
        sv,
        s_prime - sv,
        2.0 - s_prime,
        1.0 - sv,
        s,
        2.0 - s,
        2.0 - sv - s_prime,
        s + 1.0 - s_prime,
        3.0 - s - s_prime,
        2.0 / (1.0 + v) - s,
    ]
}

/// Polytope in `(s, s')` containing every stable point for any `u` and `α`.
pub fn necessary_region(v: f64, s: f64, s_prime: f64) -> bool {
    necessary_margins(v, s, s_prime).iter().all(|m| *m >= -TAU_STAB)
}

/// Stable points satisfy `|ū| ≤ 1/2`; returns whether that implication
/// holds at `p`.
pub fn u_bar_bound_check(p: &SchemeParameters) -> bool {
    !reduced_condition(p).stable || reduced_parameters(p).u_bar.abs() <= 0.5 + TAU_STAB
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(v: f64, u: f64, s: f64, sp: f64, alpha: f64) -> SchemeParameters {
        SchemeParameters::unit(v, u, s, sp, alpha).unwrap()
    }

    #[test]
    fn closed_form_matches_product() {
        let p = params(0.37, -0.62, 1.3, 0.45, -0.8).with_lambda(2.2).unwrap();
        assert!(relaxation_closed_form(&p).approx_eq(&build_relaxation_matrix(&p), 1e-13));
    }

    #[test]
    fn nine_inequalities_examples() {
        let v = nine_inequalities(&params(0.25, 0.0, 1.0, 1.0, 0.0));
        assert!(v.stable);
        assert!((v.min_slack - 5.0 / 24.0).abs() < 1e-15);
        assert_eq!(v.slacks.len(), 9);

        let v = nine_inequalities(&params(0.25, 0.0, 1.6, 1.3, 4.0 / 13.0));
        assert!(!v.stable);
        assert!((v.slacks[0] + 0.15).abs() < 1e-14);

        let v = nine_inequalities(&params(0.6, 0.2, 0.0, 0.0, 0.3));
        assert!(v.stable);
        assert_eq!(v.slacks, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(v.binding, vec![1, 2, 3, 5, 6, 7]);
    }

    #[test]
    fn reduced_parameter_examples() {
        let r = reduced_parameters(&params(0.4, 0.0, 1.2, 0.9, 0.3));
        assert_eq!(r.u_bar, 0.0);
        assert!((r.gamma - 0.9 * 0.7 / 6.0).abs() < 1e-16);
        let r = reduced_parameters(&params(0.4, 0.7, 1.1, 1.1, 0.3));
        assert_eq!(r.u_bar, 0.0);
        assert!((r.gamma - 1.1 * 0.7 / 6.0).abs() < 1e-16);
        let r = reduced_parameters(&params(0.25, 0.25, 1.6, 1.3, -0.17548076923076938));
        assert!((r.u_bar - 0.15).abs() < 1e-15);
        assert!((r.gamma - 0.2359375).abs() < 1e-15);
    }

    #[test]
    fn reduced_condition_examples() {
        let v = reduced_condition(&params(0.25, 0.0, 1.0, 1.0, 0.0));
        assert!(v.stable);
        assert_eq!(v.slacks.len(), 5);
        let v = reduced_condition(&params(0.25, 0.0, 1.6, 1.3, 4.0 / 13.0));
        assert!(!v.stable);
        // 2γ = 0.3 sits on the lower bound, the upper bound is 0.
        assert!(v.slacks[0].abs() < 1e-15);
        assert!((v.slacks[2] + 0.3).abs() < 1e-15);
        for (v_adv, u) in [(0.3, 0.5), (-0.8, 1.2), (0.0, 0.0)] {
            let v = reduced_condition(&params(v_adv, u, 0.0, 0.0, 0.7));
            assert!(v.stable);
            assert!(v.min_slack.abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_interval_examples() {
        let g = gamma_feasible_interval(0.25, 0.0, 1.0, 1.0);
        assert!(!g.empty);
        assert_eq!((g.lower, g.upper), (0.0, 0.375));
        let g = gamma_feasible_interval(1.0, 0.0, 1.0, 1.0);
        assert!(!g.empty);
        assert_eq!((g.lower, g.upper), (0.0, 0.0));
        let g = gamma_feasible_interval(0.25, 0.0, 1.6, 1.3);
        assert!(g.empty);
        assert!((g.lower - 0.15).abs() < 1e-15);
    }

    #[test]
    fn alpha_gamma_inversion() {
        for alpha in [-1.5, 0.0, 0.3, 0.99] {
            let p = params(0.3, 0.0, 1.4, 0.8, alpha);
            let g = reduced_parameters(&p).gamma;
            assert!((alpha_from_gamma(g, p.v, p.u, p.s, p.s_prime).unwrap() - alpha).abs() < 1e-14);
        }
        let p = params(0.3, -0.4, 1.4, 0.8, 0.2);
        let g = reduced_parameters(&p).gamma;
        assert!((alpha_from_gamma(g, p.v, p.u, p.s, p.s_prime).unwrap() - 0.2).abs() < 1e-14);

        let a = alpha_from_gamma(0.15, 0.25, 0.0, 1.6, 1.3).unwrap();
        assert!((a - 4.0 / 13.0).abs() < 1e-15);

        assert_eq!(
            alpha_from_gamma(0.2, 0.5, 0.4, 1.0, 0.0),
            Err(StabilityError::AlphaUnconstrained { pinned_gamma: -0.2 })
        );
    }

    #[test]
    fn pinned_gamma_decides_degenerate_rate() {
        // s' = 0, u = 0 and s = 0: γ = 0 is the whole interval.
        assert!(is_alpha_feasible(0.4, 0.0, 0.0, 0.0));
        assert!(matches!(
            alpha_feasibility(0.4, 0.0, 0.0, 0.0),
            AlphaFeasibility::Unconstrained { feasible: true, .. }
        ));
        // s > 0 with V > 0 forces s' ≥ sV > 0.
        assert!(!is_alpha_feasible(0.4, 0.0, 1.0, 0.0));
        for alpha in [-3.0, 0.0, 5.0] {
            assert!(nine_inequalities(&params(0.4, 0.0, 0.0, 0.0, alpha)).stable);
        }
    }

    #[test]
    fn alpha_feasibility_interval_maps_back() {
        let (v, u, s, sp) = (0.3, 0.2, 1.2, 1.0);
        let AlphaFeasibility::Interval(iv) = alpha_feasibility(v, u, s, sp) else {
            panic!("expected a nonempty interval");
        };
        for t in [0.0, 0.25, 0.5, 1.0] {
            let alpha = iv.lower + t * (iv.upper - iv.lower);
            assert!(reduced_condition(&params(v, u, s, sp, alpha)).stable);
        }
        assert!(!reduced_condition(&params(v, u, s, sp, iv.upper + 1e-6)).stable);
        assert!(!reduced_condition(&params(v, u, s, sp, iv.lower - 1e-6)).stable);
    }

    #[test]
    fn u_zero_region_examples() {
        assert!(u_zero_region(2.0 / 3.0, 1.0, 1.0));
        assert!(!u_zero_region(2.0 / 3.0, 1.5, 1.0));
        assert!(!u_zero_region(0.0, 2.0, 2.0));
        for (s, sp) in [(0.1, 0.5), (1.0, 1.0), (0.5, 1.8)] {
            assert!(!u_zero_region(1.2, s, sp));
        }
        // Symmetry in V.
        assert_eq!(u_zero_region(-2.0 / 3.0, 1.0, 1.0), u_zero_region(2.0 / 3.0, 1.0, 1.0));
    }

    #[test]
    fn u_zero_alpha_bounds_examples() {
        let iv = u_zero_alpha_bounds(0.0, 1.0, 1.0).unwrap();
        assert!((iv.lower + 2.0).abs() < 1e-15 && iv.upper == 1.0);
        let iv = u_zero_alpha_bounds(0.25, 1.0, 1.0).unwrap();
        assert!((iv.lower + 1.25).abs() < 1e-15 && iv.upper == 1.0);
        assert!(matches!(
            u_zero_alpha_bounds(0.25, 1.0, 0.0),
            Err(StabilityError::AlphaUnconstrained { .. })
        ));
        assert!(matches!(
            u_zero_alpha_bounds(0.25, 1.6, 1.3),
            Err(StabilityError::OutsideRegion { .. })
        ));
        // s' > 1: the upper end is 3/s' − 2.
        let iv = u_zero_alpha_bounds(0.25, 1.0, 1.2).unwrap();
        assert!((iv.upper - (3.0 / 1.2 - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn necessary_region_examples() {
        assert!(necessary_region(0.5, 1.0, 1.0));
        assert!(!necessary_region(0.5, 1.5, 2.0));
        // V = 0: 0 ≤ s ≤ 2, 0 ≤ s' ≤ min(2, s + 1, 3 − s).
        assert!(necessary_region(0.0, 0.5, 1.5));
        assert!(!necessary_region(0.0, 0.5, 1.6));
        assert!(necessary_region(0.0, 1.8, 1.2));
        assert!(!necessary_region(0.0, 1.8, 1.3));
        assert!(!necessary_region(0.0, 2.1, 0.5));
    }

    #[test]
    fn u_bar_bound_examples() {
        assert!(u_bar_bound_check(&params(0.25, 0.0, 1.0, 1.0, 0.0)));
        // ū = 2·1·0.4 = 0.8 with an unstable tuple.
        let p = params(0.25, 1.0, 1.4, 1.0, 0.0);
        assert!((reduced_parameters(&p).u_bar - 0.8).abs() < 1e-15);
        assert!(!reduced_condition(&p).stable);
        assert!(u_bar_bound_check(&p));
    }
}
