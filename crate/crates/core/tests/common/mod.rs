//! Reference implementation used as an oracle by the integration tests.
//!
//! Works directly in moment space: compute `(ρ, q, ε)`, shift to the frame
//! moving at `λu`, relax `q` and `ε` toward their equilibria, shift back
//! and reconstruct. Nothing here calls into the library.

#![allow(dead_code)]

#[derive(Clone, Copy, Debug)]
pub struct Params {
    pub lambda: f64,
    pub v: f64,
    pub u: f64,
    pub s: f64,
    pub sp: f64,
    pub alpha: f64,
}

impl Params {
    pub fn unit(v: f64, u: f64, s: f64, sp: f64, alpha: f64) -> Self {
        Self {
            lambda: 1.0,
            v,
            u,
            s,
            sp,
            alpha,
        }
    }
}

/// One collision on a single cell, distributions ordered by velocity
/// `-1, 0, 1`.
///
/// The relaxed quantities are the flux about `λu` and
/// `3·Σ(c − λu)²f − 2λ²ρ`, each pulled toward its value at equilibrium.
pub fn collide(f: [f64; 3], p: &Params) -> [f64; 3] {
    let l = p.lambda;
    let l2 = l * l;
    let lu = l * p.u;
    let c = [-l, 0.0, l];
    let rho = f[0] + f[1] + f[2];
    let q: f64 = (0..3).map(|j| c[j] * f[j]).sum();
    let e2: f64 = (0..3).map(|j| c[j] * c[j] * f[j]).sum();

    let feq = equilibrium(rho, p);
    let q_eq: f64 = (0..3).map(|j| c[j] * feq[j]).sum();
    let e2_eq: f64 = (0..3).map(|j| c[j] * c[j] * feq[j]).sum();

    let central = |q: f64, e2: f64| e2 - 2.0 * lu * q + lu * lu * rho;
    let eps = 3.0 * central(q, e2) - 2.0 * l2 * rho;
    let eps_eq = 3.0 * central(q_eq, e2_eq) - 2.0 * l2 * rho;

    let q_rel = q - lu * rho;
    let q_rel_new = q_rel + p.s * ((q_eq - lu * rho) - q_rel);
    let eps_new = eps + p.sp * (eps_eq - eps);

    let q_new = q_rel_new + lu * rho;
    let central_new = (eps_new + 2.0 * l2 * rho) / 3.0;
    let e2_new = central_new + 2.0 * lu * q_new - lu * lu * rho;
    reconstruct(rho, q_new, e2_new, l)
}

/// Distributions with prescribed `ρ`, `Σcf` and `Σc²f`.
fn reconstruct(rho: f64, q: f64, e2: f64, l: f64) -> [f64; 3] {
    let a = e2 / (l * l);
    let b = q / l;
    [0.5 * (a - b), rho - a, 0.5 * (a + b)]
}

/// Columns of `R`, obtained by colliding the unit distributions.
pub fn relaxation_matrix(p: &Params) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut e = [0.0; 3];
        e[j] = 1.0;
        let col = collide(e, p);
        for i in 0..3 {
            r[i][j] = col[i];
        }
    }
    r
}

pub fn equilibrium(rho: f64, p: &Params) -> [f64; 3] {
    let w = |c: f64| rho * (2.0 + 3.0 * c * p.v + (3.0 * c * c - 2.0) * p.alpha) / 6.0;
    [w(-1.0), w(0.0), w(1.0)]
}

pub struct OracleRun {
    pub min_f: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    pub undershoot: f64,
    pub overshoot: f64,
    pub final_rho: Vec<f64>,
}

/// Periodic run from equilibrium data `rho0`: collide, then shift the
/// `+1` population right and the `-1` population left.
pub fn simulate(rho0: &[f64], p: &Params, steps: usize) -> OracleRun {
    let n = rho0.len();
    let mut f: Vec<[f64; 3]> = rho0.iter().map(|&r| equilibrium(r, p)).collect();
    let lo0 = rho0.iter().copied().fold(f64::INFINITY, f64::min);
    let hi0 = rho0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut min_f, mut min_rho, mut max_rho) = (f64::INFINITY, lo0, hi0);
    for cell in &f {
        min_f = cell.iter().copied().fold(min_f, f64::min);
    }
    for _ in 0..steps {
        for cell in f.iter_mut() {
            *cell = collide(*cell, p);
            min_f = cell.iter().copied().fold(min_f, f64::min);
        }
        let mut next = vec![[0.0; 3]; n];
        for k in 0..n {
            next[(k + n - 1) % n][0] = f[k][0];
            next[k][1] = f[k][1];
            next[(k + 1) % n][2] = f[k][2];
        }
        f = next;
        for cell in &f {
            let rho = cell[0] + cell[1] + cell[2];
            min_rho = min_rho.min(rho);
            max_rho = max_rho.max(rho);
        }
    }
    OracleRun {
        min_f,
        min_rho,
        max_rho,
        undershoot: (lo0 - min_rho).max(0.0),
        overshoot: (max_rho - hi0).max(0.0),
        final_rho: f.iter().map(|c| c[0] + c[1] + c[2]).collect(),
    }
}

/// Step pulse of height 1 and half-width `width` centered at `center`, both
/// as fractions of the periodic unit domain, sampled at `x_k = k/n`.
pub fn step_profile(n: usize, center: f64, width: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let raw = (k as f64 / n as f64 - center).abs();
            if raw.min(1.0 - raw) <= width {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

pub fn smooth_profile(n: usize, center: f64, width: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let raw = (k as f64 / n as f64 - center).abs();
            let d = raw.min(1.0 - raw);
            (-(d / width).powi(2)).exp()
        })
        .collect()
}

pub fn max_abs_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}
