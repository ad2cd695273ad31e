//! D1Q3 scheme with relative velocity.
//!
//! Three velocities `c = (-1, 0, 1)` (in units of the lattice velocity λ),
//! moments `ρ`, `q(u)`, `ε(u)` built from the polynomials `1`, `λX`,
//! `λ²(3X² − 2)` evaluated at `c_j − u`, equilibria that depend only on `ρ`,
//! and two relaxation rates `s` (for `q`) and `s'` (for `ε`).
//!
//! One collision is the linear map `F* = R F` with
//!
//! ```text
//! R = M⁻¹ T⁻¹ (I + S (T E T⁻¹ − I)) T M
//! ```
//!
//! Distribution triples and matrix indices are ordered `(f₁, f₂, f₃)`,
//! i.e. index 0 is the velocity `−1`.

use thiserror::Error;

use crate::matrix::{Matrix3, TAU_MAT};

/// Discrete velocities in lattice units, index 0 ↔ `−1`.
pub const VELOCITIES: [f64; 3] = [-1.0, 0.0, 1.0];

/// Distribution values `(f₁, f₂, f₃)` on one lattice node.
pub type Distribution = [f64; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("lattice velocity must be positive and finite, got {0}")]
    InvalidLatticeVelocity(f64),
    #[error("parameter `{name}` is not finite")]
    NonFinite { name: &'static str },
    #[error("basis change must preserve the density moment: first row is {0:?}, expected [1, 0, 0]")]
    DensityRowNotPreserved([f64; 3]),
    #[error("basis change matrix is singular (det = {0:e})")]
    SingularBasis(f64),
}

/// The tuple `(λ, V, u, s, s', α)` defining one scheme instance.
///
/// Only λ is constrained at construction; admissibility of the other
/// parameters is the stability module's business.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeParameters {
    pub lambda: f64,
    pub v: f64,
    pub u: f64,
    pub s: f64,
    pub s_prime: f64,
    pub alpha: f64,
}

impl SchemeParameters {
    pub fn new(lambda: f64, v: f64, u: f64, s: f64, s_prime: f64, alpha: f64) -> Result<Self, SchemeError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(SchemeError::InvalidLatticeVelocity(lambda));
        }
        for (name, x) in [("V", v), ("u", u), ("s", s), ("s_prime", s_prime), ("alpha", alpha)] {
            if !x.is_finite() {
                return Err(SchemeError::NonFinite { name });
            }
        }
        Ok(Self {
            lambda,
            v,
            u,
            s,
            s_prime,
            alpha,
        })
    }

    /// Parameters with unit lattice velocity.
    pub fn unit(v: f64, u: f64, s: f64, s_prime: f64, alpha: f64) -> Result<Self, SchemeError> {
        Self::new(1.0, v, u, s, s_prime, alpha)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self, SchemeError> {
        Self::new(lambda, self.v, self.u, self.s, self.s_prime, self.alpha)
    }
}

/// Moments `(ρ, q(u), ε(u))` of a distribution triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentVector {
    pub rho: f64,
    pub q: f64,
    pub eps: f64,
}

impl MomentVector {
    pub fn as_array(&self) -> [f64; 3] {
        [self.rho, self.q, self.eps]
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Moment matrix `M_{k,j} = P_k(c_j)`.
pub fn build_m(p: &SchemeParameters) -> Matrix3 {
    let l = p.lambda;
    let l2 = l * l;
    Matrix3::new([[1.0, 1.0, 1.0], [-l, 0.0, l], [l2, -2.0 * l2, l2]])
}

/// Analytic inverse of [`build_m`]; `det M = 6λ³`.
pub fn build_m_inverse(p: &SchemeParameters) -> Matrix3 {
    let l = p.lambda;
    let l2 = l * l;
    let third = 1.0 / 3.0;
    Matrix3::new([
        [third, -0.5 / l, 1.0 / (6.0 * l2)],
        [third, 0.0, -1.0 / (3.0 * l2)],
        [third, 0.5 / l, 1.0 / (6.0 * l2)],
    ])
}

/// Shift from the moments at `u = 0` to the moments relative to `u`.
pub fn build_t(p: &SchemeParameters) -> Matrix3 {
    let lu = p.lambda * p.u;
    Matrix3::new([[1.0, 0.0, 0.0], [-lu, 1.0, 0.0], [3.0 * lu * lu, -6.0 * lu, 1.0]])
}

pub fn build_t_inverse(p: &SchemeParameters) -> Matrix3 {
    build_t(p).unit_lower_inverse()
}

/// Relaxation rates `diag(0, s, s')`.
pub fn build_s(p: &SchemeParameters) -> Matrix3 {
    Matrix3::diag(0.0, p.s, p.s_prime)
}

/// Equilibrium map on the `u = 0` moments: only the first column,
/// `(1, Vλ, αλ²)`, is nonzero.
pub fn build_e(p: &SchemeParameters) -> Matrix3 {
    let l = p.lambda;
    Matrix3::new([[1.0, 0.0, 0.0], [p.v * l, 0.0, 0.0], [p.alpha * l * l, 0.0, 0.0]])
}

/// `R = M⁻¹ T⁻¹ (I + S (T E T⁻¹ − I)) T M`.
pub fn build_relaxation_matrix(p: &SchemeParameters) -> Matrix3 {
    let m = build_m(p);
    let m_inv = build_m_inverse(p);
    let t = build_t(p);
    let t_inv = build_t_inverse(p);
    let id = Matrix3::identity();
    let inner = id + build_s(p) * (t * build_e(p) * t_inv - id);
    m_inv * t_inv * inner * t * m
}

/// Equilibrium weights `(1/6)(2 + 3c_jV + (3c_j² − 2)α)`, i.e. `f^eq` for `ρ = 1`.
pub fn equilibrium_weights(p: &SchemeParameters) -> Distribution {
    VELOCITIES.map(|c| (2.0 + 3.0 * c * p.v + (3.0 * c * c - 2.0) * p.alpha) / 6.0)
}

pub fn equilibrium_distributions(rho: f64, p: &SchemeParameters) -> Distribution {
    equilibrium_weights(p).map(|w| rho * w)
}

/// Moments by direct summation over the velocities.
pub fn moments_from_distributions(f: &Distribution, p: &SchemeParameters) -> MomentVector {
    let l = p.lambda;
    let mut rho = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for (c, fj) in VELOCITIES.iter().zip(f) {
        let rel = c - p.u;
        rho += fj;
        first += rel * fj;
        second += rel * rel * fj;
    }
    MomentVector {
        rho,
        q: l * first,
        eps: 3.0 * l * l * second - 2.0 * l * l * rho,
    }
}

fn check_basis(c: &Matrix3) -> Result<(), SchemeError> {
    let first = c.row(0);
    let expected = [1.0, 0.0, 0.0];
    if first.iter().zip(expected).any(|(a, b)| (a - b).abs() > TAU_MAT) {
        return Err(SchemeError::DensityRowNotPreserved(first));
    }
    Ok(())
}

/// `(S C − C S) T (E − I)` for a moment basis change `C`.
///
/// This vanishes for every `(s, s')` exactly when `C[1][2] = C[2][1] = 0`;
/// explicitly it equals
///
/// ```text
/// (s − s') [[0, 0, 0],
///           [c₂₃λ²(α − 6uV), 6c₂₃λu, −c₂₃],
///           [−c₃₂λV,          c₃₂,     0  ]]
/// ```
/// with `c₂₃ = C[1][2]`, `c₃₂ = C[2][1]`.
pub fn basis_commutator(c: &Matrix3, p: &SchemeParameters) -> Result<Matrix3, SchemeError> {
    check_basis(c)?;
    let s = build_s(p);
    let id = Matrix3::identity();
    Ok((s * *c - *c * s) * build_t(p) * (build_e(p) - id))
}

/// Relaxation matrix of the scheme whose moments are `C M F` instead of
/// `M F`, with the same equilibria (`Ê = C E`) and the same rates `S`
/// applied to the new moments.
pub fn change_basis_relaxation_matrix(c: &Matrix3, p: &SchemeParameters) -> Result<Matrix3, SchemeError> {
    check_basis(c)?;
    let det = c.determinant();
    let c_inv = match c.inverse() {
        Some(inv) if det.abs() > TAU_MAT => inv,
        _ => return Err(SchemeError::SingularBasis(det)),
    };
    let t = build_t(p);
    let t_inv = build_t_inverse(p);
    let m_hat = *c * build_m(p);
    let m_hat_inv = build_m_inverse(p) * c_inv;
    let t_hat = *c * t * c_inv;
    let t_hat_inv = *c * t_inv * c_inv;
    let e_hat = *c * build_e(p);
    let id = Matrix3::identity();
    let inner = id + build_s(p) * (t_hat * e_hat * t_hat_inv - id);
    Ok(m_hat_inv * t_hat_inv * inner * t_hat * m_hat)
}
