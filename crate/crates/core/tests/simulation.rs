mod common;

use d1q3::scheme::SchemeParameters;
use d1q3::simulator::{run, Grid1D, InitialProfile, RunDiagnostics};
use d1q3::stability::nine_inequalities;

fn diagnostics(p: &SchemeParameters, profile: &InitialProfile, n: usize, steps: usize) -> RunDiagnostics {
    let grid = Grid1D::with_length(n, 1.0, p).unwrap();
    run(profile, &grid, p, steps, None).unwrap().diagnostics
}

#[test]
fn projection_scheme_keeps_step_bounds() {
    let p = SchemeParameters::unit(0.25, 0.0, 1.0, 1.0, 0.0).unwrap();
    assert!(nine_inequalities(&p).stable);
    let d = diagnostics(&p, &InitialProfile::step(), 200, 1000);
    assert!(d.min_f_over_run >= -1e-14, "{d:?}");
    assert!(d.undershoot <= 1e-12 && d.overshoot <= 1e-12, "{d:?}");
    assert!(d.min_rho >= -1e-13);
    assert!(d.mass_drift <= 1e-12);

    let o = common::simulate(
        &common::step_profile(200, 0.25, 0.1),
        &common::Params::unit(0.25, 0.0, 1.0, 1.0, 0.0),
        1000,
    );
    assert!(o.undershoot <= 1e-12 && o.min_f >= -1e-14);
}

#[test]
fn final_densities_match_oracle_on_reference_rows() {
    let rows = [
        (0.25, 0.0, 1.6, 1.3, 0.3076923076923076),
        (0.25, 0.25, 1.6, 1.3, -0.17548076923076938),
        (0.25, 0.0, 1.9, 1.4, 0.14285714285714302),
        (0.25, 0.25, 1.9, 1.4, -0.10491071428571441),
    ];
    for (v, u, s, sp, alpha) in rows {
        let p = SchemeParameters::unit(v, u, s, sp, alpha).unwrap();
        let grid = Grid1D::with_length(200, 1.0, &p).unwrap();
        let out = run(&InitialProfile::step(), &grid, &p, 1000, None).unwrap();
        let o = common::simulate(
            &common::step_profile(200, 0.25, 0.1),
            &common::Params::unit(v, u, s, sp, alpha),
            1000,
        );
        let worst = out
            .final_state
            .densities()
            .iter()
            .zip(&o.final_rho)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "row {:?}: {worst:e}", (v, u, s, sp, alpha));
        assert!((out.diagnostics.min_f_over_run - o.min_f).abs() < 1e-12);
    }
}

#[test]
fn mirrored_problem_gives_mirrored_solution() {
    let n = 64;
    let base: Vec<f64> = (0..n)
        .map(|k| {
            if (10..23).contains(&k) {
                1.0 + 0.01 * k as f64
            } else {
                0.2
            }
        })
        .collect();
    let mirrored: Vec<f64> = (0..n).map(|k| base[(n - k) % n]).collect();
    let p = SchemeParameters::unit(0.3, 0.1, 1.7, 1.2, -0.2).unwrap();
    let q = SchemeParameters::unit(-0.3, -0.1, 1.7, 1.2, -0.2).unwrap();
    let grid = Grid1D::with_length(n, 1.0, &p).unwrap();
    let a = run(&InitialProfile::custom(base), &grid, &p, 150, None)
        .unwrap()
        .final_state
        .densities();
    let b = run(&InitialProfile::custom(mirrored), &grid, &q, 150, None)
        .unwrap()
        .final_state
        .densities();
    for k in 0..n {
        assert!((a[k] - b[(n - k) % n]).abs() < 1e-13, "cell {k}");
    }
}

#[test]
fn unit_velocity_transport_is_exact() {
    let p = SchemeParameters::unit(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
    for profile in [InitialProfile::smooth(), InitialProfile::hat(), InitialProfile::step()] {
        for steps in [0, 1, 33, 200, 1000] {
            // Zero up to the rounding left in R (entries off by ~3e-17),
            // which accumulates once per step.
            let e = diagnostics(&p, &profile, 200, steps).l1_error;
            assert!(e <= 1e-16 * (steps as f64 + 1.0), "{profile:?} after {steps}: {e}");
        }
    }
}

#[test]
fn smooth_error_decreases_with_refinement() {
    // Inside the region the scheme is consistent: refining the lattice at a
    // fixed final time lowers the error.
    let p = SchemeParameters::unit(0.25, 0.0, 1.2, 1.1, 0.0).unwrap();
    assert!(nine_inequalities(&p).stable);
    let e100 = diagnostics(&p, &InitialProfile::smooth(), 100, 200).l1_error;
    let e400 = diagnostics(&p, &InitialProfile::smooth(), 400, 800).l1_error;
    assert!(e400 < 0.5 * e100, "{e100} -> {e400}");
}
