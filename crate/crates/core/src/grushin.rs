//! The α-Grushin plane: `X = ∂x`, `Y = |x|^α ∂y` on `R^2`, Hamiltonian
//! `H = (u^2 + v^2 |x|^{2α}) / 2`.
//!
//! Geodesics are written with the generalized trigonometric functions as
//! `x = A sin_α(ωt + φ)`, `u = Aω cos_α(ωt + φ)`, `v = v0`.
//! Jacobi fields use the Cartesian frame `(∂u, ∂v, ∂x, ∂y)`, in which they are
//! exactly the linearized flow.

use std::sync::Arc;

use serde::Serialize;

use crate::alpha_trig::{self, even_power, odd_power, AlphaTrigTable};
use crate::error::{Error, Result};
use crate::jacobi::{integrate_jacobi, JacobiCoords};
use crate::numeric::linalg::Matrix;
use crate::numeric::ode::{integrate, integrate_to_end, OdeProblem};

/// Relative residual below which a covector is accepted as conjugate.
pub const DEFAULT_CONJ_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct GrushinBase {
    pub alpha: f64,
    pub x0: f64,
    pub y0: f64,
    trig: Arc<AlphaTrigTable>,
}

impl GrushinBase {
    pub fn new(alpha: f64, x0: f64, y0: f64) -> Result<Self> {
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(Error::InvalidInput("base point must be finite".into()));
        }
        let trig = alpha_trig::table(alpha)?;
        Ok(Self { alpha, x0, y0, trig })
    }

    pub fn trig(&self) -> &AlphaTrigTable {
        &self.trig
    }

    /// `H` at the base point.
    pub fn hamiltonian(&self, cov: GrushinCovector) -> f64 {
        0.5 * (cov.u0 * cov.u0 + cov.v0 * cov.v0 * even_power(self.x0, self.alpha))
    }

    /// Conjugate covectors require `v0 != 0` and `H != 0`.
    pub fn conjugacy_possible(&self, cov: GrushinCovector) -> bool {
        cov.v0 != 0.0 && self.hamiltonian(cov) > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrushinCovector {
    pub u0: f64,
    pub v0: f64,
}

impl GrushinCovector {
    pub fn new(u0: f64, v0: f64) -> Self {
        Self { u0, v0 }
    }

    pub fn from_slice(c: &[f64]) -> Self {
        Self { u0: c[0], v0: c[1] }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.u0, self.v0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrushinState {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrushinAmplitude {
    pub a: f64,
    pub omega: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrushinJacobiCoeffs {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

/// `(A, ω, φ)` with `A >= 0`, `ω = v0 A^{α-1}` and `φ ∈ [0, 2π_α)`.
pub fn amplitude(base: &GrushinBase, cov: GrushinCovector) -> Result<GrushinAmplitude> {
    let h2 = 2.0 * base.hamiltonian(cov);
    if h2 == 0.0 {
        return Err(Error::DegenerateCovector("H = 0"));
    }
    if cov.v0 == 0.0 {
        return Err(Error::DegenerateCovector("v0 = 0 has no amplitude form"));
    }
    let alpha = base.alpha;
    let a = (h2 / (cov.v0 * cov.v0)).powf(0.5 / alpha);
    let omega = cov.v0 * a.powf(alpha - 1.0);
    let phi = base.trig.phase(base.x0 / a, cov.u0 / (a * omega));
    Ok(GrushinAmplitude { a, omega, phi })
}

/// Normal extremal from `(base, cov)` at time `t`.
///
/// For `0 < |v0| << |u0|` the `y` formula loses roughly `eps / v0^2` relative
/// accuracy; [`grushin_exp_numeric`] is the better tool there.
pub fn grushin_exp(base: &GrushinBase, cov: GrushinCovector, t: f64) -> GrushinState {
    let GrushinCovector { u0, v0 } = cov;
    let h2 = 2.0 * base.hamiltonian(cov);
    if h2 == 0.0 {
        return GrushinState { x: base.x0, y: base.y0, u: u0, v: v0 };
    }
    if v0 == 0.0 {
        return GrushinState { x: base.x0 + u0 * t, y: base.y0, u: u0, v: 0.0 };
    }
    let amp = amplitude(base, cov).expect("H != 0 and v0 != 0");
    let (s, c) = base.trig.sin_cos(amp.omega * t + amp.phi);
    let x = amp.a * s;
    let u = amp.a * amp.omega * c;
    let y = base.y0 + (h2 * t + u0 * base.x0 - u * x) / (v0 * (base.alpha + 1.0));
    GrushinState { x, y, u, v: v0 }
}

/// Endpoint `(x, y)` at `t = 1`.
pub fn grushin_exp_point(base: &GrushinBase, cov: GrushinCovector) -> [f64; 2] {
    let s = grushin_exp(base, cov, 1.0);
    [s.x, s.y]
}

/// Numeric solution of the Hamiltonian system, independent of the closed form.
pub fn grushin_exp_numeric(base: &GrushinBase, cov: GrushinCovector, t: f64) -> Result<GrushinState> {
    if t == 0.0 {
        return Ok(GrushinState { x: base.x0, y: base.y0, u: cov.u0, v: cov.v0 });
    }
    let alpha = base.alpha;
    let v = cov.v0;
    let sign = t.signum();
    let field = move |_s: f64, y: &[f64], dy: &mut [f64]| {
        // y = (u, x, y)
        dy[0] = sign * (-alpha * v * v * odd_power(y[1], alpha));
        dy[1] = sign * y[0];
        dy[2] = sign * v * even_power(y[1], alpha);
    };
    let end = integrate_to_end(&field, vec![cov.u0, base.x0, base.y0], (0.0, t.abs()), 1e-12, 1e-14)?;
    Ok(GrushinState { x: end[1], y: end[2], u: end[0], v })
}

/// Numeric states at each of `times` (all `>= 0`) from a single integration
/// with dense output.
pub fn grushin_exp_numeric_path(base: &GrushinBase, cov: GrushinCovector, times: &[f64]) -> Result<Vec<GrushinState>> {
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("path times must be finite and non-negative".into()));
    }
    let start = GrushinState { x: base.x0, y: base.y0, u: cov.u0, v: cov.v0 };
    let t_end = times.iter().copied().fold(0.0, f64::max);
    if t_end == 0.0 {
        return Ok(vec![start; times.len()]);
    }
    let alpha = base.alpha;
    let v = cov.v0;
    let field = move |_s: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = -alpha * v * v * odd_power(y[1], alpha);
        dy[1] = y[0];
        dy[2] = v * even_power(y[1], alpha);
    };
    let problem = OdeProblem::new(&field, vec![cov.u0, base.x0, base.y0], (0.0, t_end))?;
    let path = integrate(&problem, 1e-12, 1e-14)?;
    Ok(times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return start;
            }
            let y = path.eval(t);
            GrushinState { x: y[1], y: y[2], u: y[0], v }
        })
        .collect())
}

/// First partial derivatives of the flow with respect to `(u0, v0)`.
#[derive(Debug, Clone, Copy)]
struct FiberPartials {
    state: GrushinState,
    x_u: f64,
    x_v: f64,
    u_u: f64,
    u_v: f64,
    y_u: f64,
    y_v: f64,
}

fn fiber_partials(base: &GrushinBase, cov: GrushinCovector, t: f64) -> Result<FiberPartials> {
    let GrushinCovector { u0, v0 } = cov;
    let alpha = base.alpha;
    let x0 = base.x0;
    let h2 = 2.0 * base.hamiltonian(cov);
    if h2 == 0.0 {
        return Err(Error::DegenerateCovector("H = 0"));
    }
    let state = grushin_exp(base, cov, t);
    if v0 == 0.0 {
        // straight line x = x0 + u0 t; only y feels v0, through ∫|x|^{2α}
        let x1 = x0 + u0 * t;
        let y_v = (even_power(x1, alpha) * x1 - even_power(x0, alpha) * x0) / ((2.0 * alpha + 1.0) * u0);
        return Ok(FiberPartials { state, x_u: t, x_v: 0.0, u_u: 1.0, u_v: 0.0, y_u: 0.0, y_v });
    }
    let GrushinState { x, y, u, .. } = state;
    let u_dot = -alpha * v0 * v0 * odd_power(x, alpha);
    let a_u = (alpha - 1.0) * t * u0 - x0;
    let b_v = t * (alpha * (h2 - u0 * u0) + u0 * u0) + u0 * x0;
    let x_u = (a_u * u + u0 * x) / (h2 * alpha);
    let x_v = (b_v * u - u0 * u0 * x) / (h2 * alpha * v0);
    let u_u = (alpha * u0 * u + a_u * u_dot) / (h2 * alpha);
    let u_v = (alpha * (h2 - u0 * u0) * u + b_v * u_dot) / (h2 * alpha * v0);
    let denom = v0 * (alpha + 1.0);
    let y_u = (2.0 * t * u0 + x0 - u_u * x - u * x_u) / denom;
    let y_v = (2.0 * t * v0 * even_power(x0, alpha) - u_v * x - u * x_v) / denom - (y - base.y0) / v0;
    Ok(FiberPartials { state, x_u, x_v, u_u, u_v, y_u, y_v })
}

/// Analytic `∂(x, y)(t) / ∂(u0, v0)`.
pub fn grushin_dexp_at(base: &GrushinBase, cov: GrushinCovector, t: f64) -> Result<Matrix> {
    let p = fiber_partials(base, cov, t)?;
    Ok(Matrix::from_rows(&[vec![p.x_u, p.x_v], vec![p.y_u, p.y_v]]))
}

/// Analytic differential of the exponential map on the fiber, at `t = 1`.
pub fn grushin_dexp(base: &GrushinBase, cov: GrushinCovector) -> Result<Matrix> {
    grushin_dexp_at(base, cov, 1.0)
}

/// `(∂x(t)/∂x0, ∂u(t)/∂x0)`; defined for `x0 != 0` and `v0 != 0`.
pub fn grushin_d_x0(base: &GrushinBase, cov: GrushinCovector, t: f64) -> Result<(f64, f64)> {
    let GrushinCovector { u0, v0 } = cov;
    let (alpha, x0) = (base.alpha, base.x0);
    if x0 == 0.0 {
        return Err(Error::DegenerateCovector("x0 = 0"));
    }
    if v0 == 0.0 {
        return Err(Error::DegenerateCovector("v0 = 0"));
    }
    let h2 = 2.0 * base.hamiltonian(cov);
    let GrushinState { x, u, .. } = grushin_exp(base, cov, t);
    let u_dot = -alpha * v0 * v0 * odd_power(x, alpha);
    let rest = h2 - u0 * u0;
    let c = (alpha - 1.0) * t * rest + u0 * x0;
    Ok(((c * u + rest * x) / (h2 * x0), (alpha * rest * u + c * u_dot) / (h2 * x0)))
}

/// `k1, k2, k3` of the Jacobi ansatz `x_a = k1 x + (k2 + k3 t) u`.
pub fn jacobi_coeffs(base: &GrushinBase, cov: GrushinCovector, init: &JacobiCoords) -> Result<GrushinJacobiCoeffs> {
    let GrushinCovector { u0, v0 } = cov;
    let (alpha, x0) = (base.alpha, base.x0);
    let h2 = 2.0 * base.hamiltonian(cov);
    if h2 == 0.0 || v0 == 0.0 {
        return Err(Error::DegenerateCovector("closed form needs H != 0 and v0 != 0"));
    }
    let (pa, pb, xa) = (init.p[0], init.p[1], init.x[0]);
    let denom = alpha * v0 * h2;
    let k1 = (alpha * xa * v0.powi(3) * odd_power(x0, alpha) + pa * u0 * v0 - pb * u0 * u0) / denom;
    let k2 = (alpha * xa * u0 * v0 - pa * v0 * x0 + pb * u0 * x0) / denom;
    let k3 = (alpha - 1.0) * k1 + pb / v0;
    Ok(GrushinJacobiCoeffs { k1, k2, k3 })
}

/// Right-hand side of the Jacobi equation along the geodesic, state
/// `(p_a, p_b, x_a, x_b)`.
pub fn grushin_jacobi_rhs(base: &GrushinBase, cov: GrushinCovector, t: f64, j: &[f64], dj: &mut [f64]) {
    let alpha = base.alpha;
    let v0 = cov.v0;
    let x = grushin_exp(base, cov, t).x;
    let xp = odd_power(x, alpha);
    let xp2 = if alpha == 1.0 { 1.0 } else { x.abs().powf(2.0 * alpha - 2.0) };
    dj[0] = -2.0 * alpha * v0 * xp * j[1] - alpha * (2.0 * alpha - 1.0) * v0 * v0 * xp2 * j[2];
    dj[1] = 0.0;
    dj[2] = j[0];
    dj[3] = even_power(x, alpha) * j[1] + 2.0 * alpha * v0 * xp * j[2];
}

/// Jacobi field with initial datum `init = ((p_a0, p_b0), (x_a0, x_b0))` at
/// time `t`. Closed form when `v0 != 0` and `H != 0`, numeric otherwise.
pub fn grushin_jacobi(base: &GrushinBase, cov: GrushinCovector, init: &JacobiCoords, t: f64) -> Result<JacobiCoords> {
    if init.dim() != 2 {
        return Err(Error::InvalidInput("Grushin Jacobi data are 2 + 2 dimensional".into()));
    }
    let k = match jacobi_coeffs(base, cov, init) {
        Ok(k) => k,
        Err(_) => return grushin_jacobi_numeric(base, cov, init, t),
    };
    let GrushinCovector { u0, v0 } = cov;
    let (alpha, x0) = (base.alpha, base.x0);
    let h2 = 2.0 * base.hamiltonian(cov);
    let pb = init.p[1];
    let GrushinState { x, u, .. } = grushin_exp(base, cov, t);
    let u_dot = -alpha * v0 * v0 * odd_power(x, alpha);
    let xa = k.k1 * x + (k.k2 + k.k3 * t) * u;
    let pa = (k.k1 + k.k3) * u + (k.k2 + k.k3 * t) * u_dot;
    let denom = v0 * (alpha + 1.0);
    let int_u_udot = 0.5 * (u * u - u0 * u0);
    let int_s_u_udot = (u0 * x0 - alpha * t * h2 + (alpha + 1.0) * t * u * u - u * x) / (2.0 * (alpha + 1.0));
    let xb = init.x[1] + (pb / v0 + 2.0 * alpha * k.k1) * (h2 * t + u0 * x0 - u * x) / denom
        - 2.0 * k.k2 / v0 * int_u_udot
        - 2.0 * k.k3 / v0 * int_s_u_udot;
    Ok(JacobiCoords::new(vec![pa, pb], vec![xa, xb]))
}

/// Numeric integration of the Jacobi equation.
pub fn grushin_jacobi_numeric(
    base: &GrushinBase,
    cov: GrushinCovector,
    init: &JacobiCoords,
    t: f64,
) -> Result<JacobiCoords> {
    integrate_jacobi(|s, j, dj| grushin_jacobi_rhs(base, cov, s, j, dj), init, t)
}

/// `f_{x0}(u0, v0) = u1 (u0 + x0) - u0 x1`.
pub fn grushin_conj_f(base: &GrushinBase, cov: GrushinCovector) -> Result<f64> {
    if base.hamiltonian(cov) == 0.0 {
        return Err(Error::DegenerateCovector("H = 0"));
    }
    let s = grushin_exp(base, cov, 1.0);
    Ok(s.u * (cov.u0 + base.x0) - cov.u0 * s.x)
}

fn conj_scale(base: &GrushinBase, cov: GrushinCovector) -> f64 {
    let s = grushin_exp(base, cov, 1.0);
    ((cov.u0.abs() + base.x0.abs()) * (s.u.abs() + s.x.abs())).max(f64::MIN_POSITIVE)
}

/// Gradient `(∂f/∂u0, ∂f/∂v0)` by the chain rule through the analytic
/// partials; valid at every covector with `H != 0`.
pub fn grushin_conj_grad(base: &GrushinBase, cov: GrushinCovector) -> Result<(f64, f64)> {
    let p = fiber_partials(base, cov, 1.0)?;
    let s = p.state;
    let w = cov.u0 + base.x0;
    Ok((p.u_u * w + s.u - s.x - cov.u0 * p.x_u, p.u_v * w - cov.u0 * p.x_v))
}

/// Gradient through the simplified expressions that hold on the conjugate
/// locus, with the split on `u0 + x0 = 0`.
pub fn grushin_conj_grad_on_locus(base: &GrushinBase, cov: GrushinCovector) -> Result<(f64, f64)> {
    let GrushinCovector { u0, v0 } = cov;
    let (alpha, x0) = (base.alpha, base.x0);
    let h2 = 2.0 * base.hamiltonian(cov);
    if h2 == 0.0 {
        return Err(Error::DegenerateCovector("H = 0"));
    }
    if v0 == 0.0 {
        return Err(Error::DegenerateCovector("v0 = 0"));
    }
    let s = grushin_exp(base, cov, 1.0);
    let (x1, u1) = (s.x, s.u);
    let x2a = even_power(x0, alpha);
    let w = u0 + x0;
    if w == 0.0 {
        return Ok((u1 * v0 * v0 * x2a / h2, u1 * v0 * x2a * x0 / h2));
    }
    let u1_dot = -alpha * v0 * v0 * odd_power(x1, alpha);
    let du = (u1_dot * w * w * ((alpha - 1.0) * u0 - x0) - alpha * v0 * v0 * x1 * x2a * x0) / (alpha * w * h2);
    let dv = (u1_dot * w * w * (u0 * u0 + alpha * v0 * v0 * x2a + u0 * x0) + alpha * u0 * v0 * v0 * x1 * x2a * x0)
        / (alpha * v0 * w * h2);
    Ok((du, dv))
}

/// Unnormalized kernel direction `(v0 |x0|^{2α}, -u0)` in `(∂u, ∂v)`.
pub fn grushin_kernel_direction(base: &GrushinBase, cov: GrushinCovector) -> [f64; 2] {
    [cov.v0 * even_power(base.x0, base.alpha), -cov.u0]
}

/// Unit kernel vector of `d exp` at a conjugate covector.
pub fn grushin_kernel(base: &GrushinBase, cov: GrushinCovector, tol: f64) -> Result<Vec<Vec<f64>>> {
    let f = grushin_conj_f(base, cov)?;
    let residual = f.abs() / conj_scale(base, cov);
    if cov.v0 == 0.0 || residual > tol {
        return Err(Error::NotConjugate { residual });
    }
    let [a, b] = grushin_kernel_direction(base, cov);
    let n = a.hypot(b);
    Ok(vec![vec![a / n, b / n]])
}
