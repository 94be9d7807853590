//! SL(2) with the `k ⊕ z` sub-Riemannian structure.
//!
//! Covectors are `λ0 = u0 X1 + v0 X2 + w0 X0` with `H = (u^2 + v^2)/2`; the
//! scalar `r = w0^2 - u0^2 - v0^2` plays the role of the frame curvature.

use serde::Serialize;

use crate::contact::{self, strata_values};
use crate::error::{Error, Result};
use crate::jacobi::{integrate_jacobi, JacobiCoords};
use crate::numeric::linalg::Matrix;
use crate::numeric::ode::{integrate, integrate_to_end, OdeProblem};

pub use crate::contact::sc_functions;

/// Relative residual below which a covector is accepted as conjugate.
pub const DEFAULT_CONJ_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sl2Matrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Sl2Matrix {
    pub const IDENTITY: Sl2Matrix = Sl2Matrix { m11: 1.0, m12: 0.0, m21: 0.0, m22: 1.0 };

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn mul(&self, o: &Sl2Matrix) -> Sl2Matrix {
        Sl2Matrix {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sl2Covector {
    pub u0: f64,
    pub v0: f64,
    pub w0: f64,
}

impl Sl2Covector {
    pub fn new(u0: f64, v0: f64, w0: f64) -> Self {
        Self { u0, v0, w0 }
    }

    pub fn from_slice(c: &[f64]) -> Self {
        Self { u0: c[0], v0: c[1], w0: c[2] }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.u0, self.v0, self.w0]
    }

    /// `r = w0^2 - (u0^2 + v0^2)`.
    pub fn r(&self) -> f64 {
        self.w0 * self.w0 - (self.u0 * self.u0 + self.v0 * self.v0)
    }

    pub fn hamiltonian(&self) -> f64 {
        0.5 * (self.u0 * self.u0 + self.v0 * self.v0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sl2State {
    pub matrix: Sl2Matrix,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

/// Geodesic from the identity with initial covector `cov`.
pub fn sl2_exp(cov: Sl2Covector, t: f64) -> Sl2State {
    let Sl2Covector { u0, v0, w0 } = cov;
    let (s, c) = sc_functions(cov.r(), 0.5 * t);
    let (sw, cw) = (0.5 * w0 * t).sin_cos();
    let matrix = Sl2Matrix {
        m11: s * (u0 * cw + (w0 - v0) * sw) + c * cw,
        m12: s * ((v0 - w0) * cw + u0 * sw) + c * sw,
        m21: s * ((v0 + w0) * cw + u0 * sw) - c * sw,
        m22: s * (-u0 * cw + (v0 + w0) * sw) + c * cw,
    };
    let (s1, c1) = (w0 * t).sin_cos();
    Sl2State { matrix, u: u0 * c1 - v0 * s1, v: v0 * c1 + u0 * s1, w: w0 }
}

/// Numeric solution of `g' = g (u X1 + v X2)`, `u' = -w v`, `v' = w u`.
pub fn sl2_exp_numeric(cov: Sl2Covector, t: f64) -> Result<Sl2State> {
    if t == 0.0 {
        return Ok(sl2_exp(cov, 0.0));
    }
    if t < 0.0 {
        return Err(Error::InvalidInput("numeric SL(2) flow runs forward in time".into()));
    }
    let field = flow_field(cov.w0);
    let y = integrate_to_end(&field, vec![1.0, 0.0, 0.0, 1.0, cov.u0, cov.v0], (0.0, t), 1e-12, 1e-14)?;
    Ok(Sl2State { matrix: Sl2Matrix { m11: y[0], m12: y[1], m21: y[2], m22: y[3] }, u: y[4], v: y[5], w: cov.w0 })
}

fn flow_field(w: f64) -> impl Fn(f64, &[f64], &mut [f64]) + Sync {
    move |_s: f64, y: &[f64], dy: &mut [f64]| {
        // g (u X1 + v X2) with X1 = diag(1, -1)/2, X2 = [[0, 1], [1, 0]]/2
        let (a, b) = (0.5 * y[4], 0.5 * y[5]);
        dy[0] = y[0] * a + y[1] * b;
        dy[1] = y[0] * b - y[1] * a;
        dy[2] = y[2] * a + y[3] * b;
        dy[3] = y[2] * b - y[3] * a;
        dy[4] = -w * y[5];
        dy[5] = w * y[4];
    }
}

/// Numeric states at each of `times` (all `>= 0`) from a single integration
/// with dense output.
pub fn sl2_exp_numeric_path(cov: Sl2Covector, times: &[f64]) -> Result<Vec<Sl2State>> {
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("path times must be finite and non-negative".into()));
    }
    let t_end = times.iter().copied().fold(0.0, f64::max);
    if t_end == 0.0 {
        return Ok(vec![sl2_exp(cov, 0.0); times.len()]);
    }
    let field = flow_field(cov.w0);
    let problem = OdeProblem::new(&field, vec![1.0, 0.0, 0.0, 1.0, cov.u0, cov.v0], (0.0, t_end))?;
    let path = integrate(&problem, 1e-12, 1e-14)?;
    Ok(times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return sl2_exp(cov, 0.0);
            }
            let y = path.eval(t);
            Sl2State { matrix: Sl2Matrix { m11: y[0], m12: y[1], m21: y[2], m22: y[3] }, u: y[4], v: y[5], w: cov.w0 }
        })
        .collect())
}

/// Jacobi field in the canonical frame at time `t`; any sign of `r`.
pub fn sl2_jacobi(cov: Sl2Covector, init: &JacobiCoords, t: f64) -> Result<JacobiCoords> {
    if init.dim() != 3 {
        return Err(Error::InvalidInput("SL(2) Jacobi data are 3 + 3 dimensional".into()));
    }
    Ok(contact::frame_jacobi(cov.r(), init, t))
}

/// Numeric integration of the frame Jacobi system.
pub fn sl2_jacobi_numeric(cov: Sl2Covector, init: &JacobiCoords, t: f64) -> Result<JacobiCoords> {
    let r = cov.r();
    integrate_jacobi(|_, j, dj| contact::frame_jacobi_rhs(r, j, dj), init, t)
}

/// Endpoint `x(1)` of the vertical Jacobi data.
pub fn sl2_conj_matrix(cov: Sl2Covector) -> Matrix {
    contact::frame_conj_matrix(cov.r())
}

/// Stratum values `(r, f0, f1)`.
///
/// For `r > 0`: `f0 = √r cos(√r/2) - 2 sin(√r/2)`, `f1 = sin(√r/2)`.
/// For `r <= 0`, with `ρ = √(-r)`, the hyperbolic analogues normalized to stay
/// finite at `ρ = 0`: `f0 = (ρ cosh(ρ/2) - 2 sinh(ρ/2)) / ρ^3 >= 1/12` and
/// `f1 = sinh(ρ/2) / ρ >= 1/2`. Neither vanishes, so such covectors are never
/// conjugate.
pub fn sl2_conj_f(cov: Sl2Covector) -> Result<(f64, f64, f64)> {
    if cov.hamiltonian() == 0.0 {
        return Err(Error::DegenerateCovector("H = 0"));
    }
    let r = cov.r();
    if r > 0.0 {
        let (f0, f1) = strata_values(r.sqrt());
        return Ok((r, f0, f1));
    }
    let rho = (-r).sqrt();
    let x = 0.5 * rho;
    if x < 1e-3 {
        let x2 = x * x;
        return Ok((r, 1.0 / 12.0 + x2 / 60.0, 0.5 * (1.0 + x2 / 6.0)));
    }
    Ok((r, (rho * x.cosh() - 2.0 * x.sinh()) / rho.powi(3), x.sinh() / rho))
}

/// Unnormalized kernel `√r cos(√r/2) (u0 ∂v - v0 ∂u) - 4 sin(√r/2) ∂w`.
pub fn sl2_kernel_direction(cov: Sl2Covector) -> [f64; 3] {
    let rho = cov.r().max(0.0).sqrt();
    let (s, c) = (0.5 * rho).sin_cos();
    [-rho * c * cov.v0, rho * c * cov.u0, -4.0 * s]
}

/// Relative distance of `cov` from each stratum (infinite when `r <= 0`).
pub fn sl2_residuals(cov: Sl2Covector) -> Result<(f64, f64)> {
    let (r, f0, f1) = sl2_conj_f(cov)?;
    if r <= 0.0 {
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    Ok((f0.abs() / (r.sqrt() + 2.0), f1.abs()))
}

/// Unit kernel vector of `d exp` in `(∂u, ∂v, ∂w)`.
pub fn sl2_kernel(cov: Sl2Covector, tol: f64) -> Result<Vec<f64>> {
    let (r0, r1) = sl2_residuals(cov)?;
    let residual = r0.min(r1);
    if residual > tol {
        return Err(Error::NotConjugate { residual });
    }
    let k = sl2_kernel_direction(cov);
    let n = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    Ok(k.iter().map(|x| x / n).collect())
}

/// `(df0, df1)` in `(du, dv, dw)`; requires `r > 0`.
pub fn sl2_conj_grad(cov: Sl2Covector) -> Result<([f64; 3], [f64; 3])> {
    if cov.hamiltonian() == 0.0 {
        return Err(Error::DegenerateCovector("H = 0"));
    }
    let r = cov.r();
    if r <= 0.0 {
        return Err(Error::DegenerateCovector("r <= 0"));
    }
    let rho = r.sqrt();
    let (s, c) = (0.5 * rho).sin_cos();
    let l = [cov.u0, cov.v0, -cov.w0];
    Ok((l.map(|x| 0.5 * s * x), l.map(|x| -0.5 * c / rho * x)))
}

/// Vertical canonical frame `E_a, E_b, E_c` at `t = 0` in `(∂u, ∂v, ∂w)`.
pub fn sl2_vertical_frame(cov: Sl2Covector) -> Matrix {
    contact::vertical_frame(cov.u0, cov.v0, cov.w0, -1.0)
}
