//! SU(2) with the `d ⊕ s` sub-Riemannian structure.
//!
//! Group elements are pairs `(α, β)` with `|α|^2 + |β|^2 = 1`. Covectors are
//! `λ0 = u0 X1 + v0 X2 + w0 X0`, `H = (u^2 + v^2)/2`, and geodesics start at
//! the identity.

use num_complex::Complex64;
use serde::Serialize;

use crate::contact::{self, strata_values};
use crate::error::{Error, Result};
use crate::jacobi::{integrate_jacobi, JacobiCoords};
use crate::numeric::linalg::Matrix;
use crate::numeric::ode::{integrate, integrate_to_end, OdeProblem};

/// Relative residual below which a covector is accepted as conjugate.
pub const DEFAULT_CONJ_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Su2Point {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
}

impl Su2Point {
    pub const IDENTITY: Su2Point = Su2Point { alpha_re: 1.0, alpha_im: 0.0, beta_re: 0.0, beta_im: 0.0 };

    pub fn from_complex(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha_re: alpha.re, alpha_im: alpha.im, beta_re: beta.re, beta_im: beta.im }
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha_re, self.alpha_im)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.beta_re, self.beta_im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha().norm_sqr() + self.beta().norm_sqr()
    }

    /// Group product `(α, β)(α', β') = (αα' - β conj(β'), αβ' + conj(α')β)`.
    pub fn mul(&self, other: &Su2Point) -> Su2Point {
        let (a, b) = (self.alpha(), self.beta());
        let (a2, b2) = (other.alpha(), other.beta());
        Su2Point::from_complex(a * a2 - b * b2.conj(), a * b2 + a2.conj() * b)
    }

    pub fn inverse(&self) -> Su2Point {
        Su2Point::from_complex(self.alpha().conj(), -self.beta())
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.alpha_re, self.alpha_im, self.beta_re, self.beta_im]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Su2Covector {
    pub u0: f64,
    pub v0: f64,
    pub w0: f64,
}

impl Su2Covector {
    pub fn new(u0: f64, v0: f64, w0: f64) -> Self {
        Self { u0, v0, w0 }
    }

    pub fn from_slice(c: &[f64]) -> Self {
        Self { u0: c[0], v0: c[1], w0: c[2] }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.u0, self.v0, self.w0]
    }

    /// `|λ0|`.
    pub fn norm(&self) -> f64 {
        (self.u0 * self.u0 + self.v0 * self.v0 + self.w0 * self.w0).sqrt()
    }

    pub fn hamiltonian(&self) -> f64 {
        0.5 * (self.u0 * self.u0 + self.v0 * self.v0)
    }
}

/// Frame curvature of the Jacobi equation, `R_aa = |λ0|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Su2JacobiCoeffs {
    pub r_coeff: f64,
}

impl Su2JacobiCoeffs {
    pub fn new(cov: Su2Covector) -> Self {
        Self { r_coeff: cov.norm().powi(2) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Su2State {
    pub point: Su2Point,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

/// `sin(ρ t / 2) / ρ`, smooth at `ρ = 0`.
fn half_sinc(rho: f64, t: f64) -> f64 {
    let x = 0.5 * rho * t;
    if x.abs() < 1e-4 {
        0.5 * t * (1.0 - x * x / 6.0 + x.powi(4) / 120.0)
    } else {
        x.sin() / rho
    }
}

/// Geodesic from the identity with initial covector `cov`.
pub fn su2_exp(cov: Su2Covector, t: f64) -> Su2State {
    let Su2Covector { u0, v0, w0 } = cov;
    let rho = cov.norm();
    let hs = half_sinc(rho, t);
    let rot = Complex64::from_polar(1.0, 0.5 * w0 * t);
    let alpha = rot.conj() * Complex64::new((0.5 * rho * t).cos(), w0 * hs);
    let beta = Complex64::new(u0, v0) * hs * rot;
    let (s, c) = (w0 * t).sin_cos();
    Su2State { point: Su2Point::from_complex(alpha, beta), u: u0 * c - v0 * s, v: v0 * c + u0 * s, w: w0 }
}

/// Numeric solution of `g' = g (u X1 + v X2)`, `u' = -w v`, `v' = w u`.
pub fn su2_exp_numeric(cov: Su2Covector, t: f64) -> Result<Su2State> {
    let field = flow_field(cov.w0);
    if t == 0.0 {
        return Ok(su2_exp(cov, 0.0));
    }
    if t < 0.0 {
        return Err(Error::InvalidInput("numeric SU(2) flow runs forward in time".into()));
    }
    let y = integrate_to_end(&field, vec![1.0, 0.0, 0.0, 0.0, cov.u0, cov.v0], (0.0, t), 1e-12, 1e-14)?;
    Ok(Su2State {
        point: Su2Point { alpha_re: y[0], alpha_im: y[1], beta_re: y[2], beta_im: y[3] },
        u: y[4],
        v: y[5],
        w: cov.w0,
    })
}

fn flow_field(w: f64) -> impl Fn(f64, &[f64], &mut [f64]) + Sync {
    move |_s: f64, y: &[f64], dy: &mut [f64]| {
        let a = Complex64::new(y[0], y[1]);
        let b = Complex64::new(y[2], y[3]);
        let m = 0.5 * Complex64::new(y[4], y[5]);
        let da = -b * m.conj();
        let db = a * m;
        dy[0] = da.re;
        dy[1] = da.im;
        dy[2] = db.re;
        dy[3] = db.im;
        dy[4] = -w * y[5];
        dy[5] = w * y[4];
    }
}

/// Numeric states at each of `times` (all `>= 0`) from a single integration
/// with dense output.
pub fn su2_exp_numeric_path(cov: Su2Covector, times: &[f64]) -> Result<Vec<Su2State>> {
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("path times must be finite and non-negative".into()));
    }
    let t_end = times.iter().copied().fold(0.0, f64::max);
    if t_end == 0.0 {
        return Ok(vec![su2_exp(cov, 0.0); times.len()]);
    }
    let field = flow_field(cov.w0);
    let problem = OdeProblem::new(&field, vec![1.0, 0.0, 0.0, 0.0, cov.u0, cov.v0], (0.0, t_end))?;
    let path = integrate(&problem, 1e-12, 1e-14)?;
    Ok(times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return su2_exp(cov, 0.0);
            }
            let y = path.eval(t);
            Su2State {
                point: Su2Point { alpha_re: y[0], alpha_im: y[1], beta_re: y[2], beta_im: y[3] },
                u: y[4],
                v: y[5],
                w: cov.w0,
            }
        })
        .collect())
}

/// Jacobi field in the canonical frame at time `t`.
pub fn su2_jacobi(cov: Su2Covector, init: &JacobiCoords, t: f64) -> Result<JacobiCoords> {
    if cov.norm() == 0.0 {
        return Err(Error::DegenerateCovector("|λ0| = 0"));
    }
    if init.dim() != 3 {
        return Err(Error::InvalidInput("SU(2) Jacobi data are 3 + 3 dimensional".into()));
    }
    let r = Su2JacobiCoeffs::new(cov).r_coeff;
    Ok(contact::frame_jacobi(r, init, t))
}

/// Numeric integration of the frame Jacobi system.
pub fn su2_jacobi_numeric(cov: Su2Covector, init: &JacobiCoords, t: f64) -> Result<JacobiCoords> {
    let r = Su2JacobiCoeffs::new(cov).r_coeff;
    integrate_jacobi(|_, j, dj| contact::frame_jacobi_rhs(r, j, dj), init, t)
}

/// `M_r`: endpoint `x(1)` of the vertical Jacobi data, `r = |λ0|`.
pub fn su2_conj_matrix(r: f64) -> Result<Matrix> {
    if r == 0.0 {
        return Err(Error::DegenerateCovector("|λ0| = 0"));
    }
    Ok(contact::frame_conj_matrix(r * r))
}

/// `(f0, f1) = (|λ0| cos(|λ0|/2) - 2 sin(|λ0|/2), sin(|λ0|/2))`.
pub fn su2_conj_f(cov: Su2Covector) -> Result<(f64, f64)> {
    if cov.hamiltonian() == 0.0 {
        return Err(Error::DegenerateCovector("H = 0"));
    }
    Ok(strata_values(cov.norm()))
}

/// Unnormalized kernel `ρ cos(ρ/2) (u0 ∂v - v0 ∂u) - 4 sin(ρ/2) ∂w`.
pub fn su2_kernel_direction(cov: Su2Covector) -> [f64; 3] {
    let rho = cov.norm();
    let (s, c) = (0.5 * rho).sin_cos();
    [-rho * c * cov.v0, rho * c * cov.u0, -4.0 * s]
}

/// Relative distance of `cov` from each stratum.
pub fn su2_residuals(cov: Su2Covector) -> Result<(f64, f64)> {
    let (f0, f1) = su2_conj_f(cov)?;
    Ok((f0.abs() / (cov.norm() + 2.0), f1.abs()))
}

/// Unit kernel vector of `d exp` in `(∂u, ∂v, ∂w)`.
pub fn su2_kernel(cov: Su2Covector, tol: f64) -> Result<Vec<f64>> {
    let (r0, r1) = su2_residuals(cov)?;
    let residual = r0.min(r1);
    if residual > tol {
        return Err(Error::NotConjugate { residual });
    }
    let k = su2_kernel_direction(cov);
    let n = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    Ok(k.iter().map(|x| x / n).collect())
}

/// `(df0, df1)` in `(du, dv, dw)`.
pub fn su2_conj_grad(cov: Su2Covector) -> Result<([f64; 3], [f64; 3])> {
    if cov.hamiltonian() == 0.0 {
        return Err(Error::DegenerateCovector("H = 0"));
    }
    let rho = cov.norm();
    let (s, c) = (0.5 * rho).sin_cos();
    let l = [cov.u0, cov.v0, cov.w0];
    Ok((l.map(|x| -0.5 * s * x), l.map(|x| 0.5 * c / rho * x)))
}

/// Vertical canonical frame `E_a, E_b, E_c` at `t = 0` in `(∂u, ∂v, ∂w)`.
pub fn su2_vertical_frame(cov: Su2Covector) -> Matrix {
    contact::vertical_frame(cov.u0, cov.v0, cov.w0, -1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::diff::fd_jacobian;
    use crate::numeric::linalg::{direction_mismatch, dot, rank_nullspace};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    pub(crate) const C0_RADII: [f64; 2] = [8.986818915818128, 15.450503673875414];

    // chart dropping the largest ambient coordinate of the image of `at`
    fn chart_exp(at: Su2Covector) -> impl Fn(&[f64]) -> Vec<f64> {
        let p = su2_exp(at, 1.0).point.to_array();
        let drop = (0..4).max_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs())).unwrap();
        move |c: &[f64]| {
            let q = su2_exp(Su2Covector::from_slice(c), 1.0).point.to_array();
            (0..4).filter(|&i| i != drop).map(|i| q[i]).collect()
        }
    }

    fn scaled(dir: [f64; 3], radius: f64) -> Su2Covector {
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        Su2Covector::new(dir[0] * radius / n, dir[1] * radius / n, dir[2] * radius / n)
    }

    #[test]
    fn geodesic_examples() {
        let s = su2_exp(Su2Covector::new(0.0, 0.0, 2.7), 1.0);
        assert!((s.point.alpha() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(s.point.beta().norm() < 1e-15);
        let s = su2_exp(Su2Covector::new(PI, 0.0, 0.0), 1.0);
        assert!(s.point.alpha().norm() < 1e-15);
        assert!((s.point.beta() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let s = su2_exp(Su2Covector::new(2.0 * PI, 0.0, 0.0), 1.0);
        assert!((s.point.alpha() + Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let n = su2_exp_numeric(Su2Covector::new(2.0 * PI, 0.0, 0.0), 1.0).unwrap();
        assert!((n.point.alpha() + Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn closed_form_matches_oracle_grid() {
        for dir in [[1.0, 0.0, 0.0], [0.3, -0.8, 0.5], [-1.0, 2.0, -3.0], [0.0, 1.0, 4.0]] {
            for radius in [0.5, 3.0, 7.0, 12.0] {
                let cov = scaled(dir, radius);
                for t in [0.3, 1.0] {
                    let c = su2_exp(cov, t);
                    let n = su2_exp_numeric(cov, t).unwrap();
                    let e = c
                        .point
                        .to_array()
                        .iter()
                        .zip(n.point.to_array())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    assert!(e < 1e-8, "{cov:?} t {t}: {e}");
                    assert!((c.u - n.u).abs() < 1e-8 && (c.v - n.v).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn group_law() {
        let p = su2_exp(Su2Covector::new(0.3, 1.2, -0.7), 1.0).point;
        let q = p.mul(&p.inverse());
        assert!((q.alpha() - 1.0).norm() < 1e-14 && q.beta().norm() < 1e-14);
    }

    #[test]
    fn conj_matrix_examples() {
        assert!(su2_conj_matrix(0.0).is_err());
        let m = su2_conj_matrix(2.0 * PI).unwrap();
        let r = rank_nullspace(&m, 1e-7).unwrap();
        assert_eq!(r.numeric_rank, 2);
        assert!(direction_mismatch(&r.nullspace_basis[0], &[1.0, 0.0, 0.0]) < 1e-10);
        let m = su2_conj_matrix(PI).unwrap();
        assert!(m.determinant().abs() > 1e-3);
        assert_eq!(rank_nullspace(&m, 1e-7).unwrap().numeric_rank, 3);
    }

    #[test]
    fn conj_f_examples() {
        let (_, f1) = su2_conj_f(Su2Covector::new(2.0 * PI, 0.0, 0.0)).unwrap();
        assert!(f1.abs() < 1e-15);
        let (f0, _) = su2_conj_f(scaled([0.2, 0.4, 1.0], 8.986818915818)).unwrap();
        assert!(f0.abs() < 1e-7);
        let (f0, f1) = su2_conj_f(Su2Covector::new(PI, 0.0, 0.0)).unwrap();
        assert!((f0 + 2.0).abs() < 1e-15 && (f1 - 1.0).abs() < 1e-15);
        assert!(su2_conj_f(Su2Covector::new(0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k = su2_kernel(Su2Covector::new(2.0 * PI, 0.0, 0.0), DEFAULT_CONJ_TOL).unwrap();
        assert!(direction_mismatch(&k, &[0.0, 1.0, 0.0]) < 1e-12);
        let k = su2_kernel(scaled([0.6, -0.2, 0.7], C0_RADII[0]), DEFAULT_CONJ_TOL).unwrap();
        assert!(k[2].abs() > 1e-3);
        assert!(matches!(
            su2_kernel(Su2Covector::new(PI, 0.0, 0.0), DEFAULT_CONJ_TOL),
            Err(Error::NotConjugate { .. })
        ));
    }

    #[test]
    fn kernel_matches_fd_and_frame() {
        let radii = [2.0 * PI, C0_RADII[0], 4.0 * PI, C0_RADII[1]];
        for dir in [[1.0, 0.0, 0.0], [0.6, -0.2, 0.7], [-0.3, 0.9, -1.4]] {
            for radius in radii {
                let cov = scaled(dir, radius);
                let c = cov.to_vec();
                let j = fd_jacobian(chart_exp(cov), &c, 1e-5);
                let r = rank_nullspace(&j, 1e-6).unwrap();
                assert_eq!(r.nullity(), 1, "{cov:?} {:?}", r.singular_values);
                let k = su2_kernel(cov, DEFAULT_CONJ_TOL).unwrap();
                assert!(j.mul_vec(&k).iter().all(|x| x.abs() < 1e-6 * j.norm()));
                assert!(direction_mismatch(&k, &r.nullspace_basis[0]) < 1e-5);
                // frame kernel of M mapped through the vertical frame
                let m = su2_conj_matrix(radius).unwrap();
                let pk = rank_nullspace(&m, 1e-7).unwrap().nullspace_basis[0].clone();
                let fiber = su2_vertical_frame(cov).mul_vec(&pk);
                assert!(direction_mismatch(&fiber, &k) < 1e-6, "{cov:?}");
            }
        }
    }

    #[test]
    fn non_conjugate_full_rank() {
        for radius in [1.0, PI, 5.0, 10.5] {
            let cov = scaled([0.4, 0.1, -0.9], radius);
            let j = fd_jacobian(chart_exp(cov), &cov.to_vec(), 1e-5);
            let r = rank_nullspace(&j, 1e-7).unwrap();
            assert_eq!(r.numeric_rank, 3);
        }
    }

    #[test]
    fn gradients_and_pairing() {
        let cov = scaled([0.6, -0.2, 0.7], C0_RADII[0]);
        let (g0, g1) = su2_conj_grad(cov).unwrap();
        let h = 1e-6;
        let c = cov.to_vec();
        let fd = fd_jacobian(
            |p| {
                let (a, b) = su2_conj_f(Su2Covector::from_slice(p)).unwrap();
                vec![a, b]
            },
            &c,
            h,
        );
        for i in 0..3 {
            assert!((fd[(0, i)] - g0[i]).abs() < 1e-6);
            assert!((fd[(1, i)] - g1[i]).abs() < 1e-6);
        }
        let rho = cov.norm();
        let pairing = dot(&g0, &su2_kernel_direction(cov));
        let expected = 2.0 * cov.w0 * (0.5 * rho).sin().powi(2);
        assert!((pairing - expected).abs() < 1e-8);
        // C1: gradient of f1 is orthogonal to the kernel
        let cov = scaled([0.6, -0.2, 0.7], 2.0 * PI);
        let (_, g1) = su2_conj_grad(cov).unwrap();
        assert!(g1.iter().any(|x| x.abs() > 1e-3));
        assert!(dot(&g1, &su2_kernel_direction(cov)).abs() < 1e-12);
    }

    #[test]
    fn jacobi_examples() {
        let cov = Su2Covector::new(1.0, -2.0, 0.5);
        let z = su2_jacobi(cov, &JacobiCoords::zeros(3), 0.7).unwrap();
        assert_eq!(z.to_vec(), vec![0.0; 6]);
        let init = JacobiCoords::new(vec![0.0, 1.3, 0.0], vec![0.0, -0.4, 0.0]);
        for t in [0.0, 0.5, 2.0] {
            let j = su2_jacobi(cov, &init, t).unwrap();
            assert!((j.x[1] - (1.3 * t - 0.4)).abs() < 1e-15);
        }
        assert!(su2_jacobi(Su2Covector::new(0.0, 0.0, 0.0), &init, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn stays_on_group(u in -8.0f64..8.0, v in -8.0f64..8.0, w in -8.0f64..8.0, t in 0.0f64..1.0) {
            let s = su2_exp(Su2Covector::new(u, v, w), t);
            prop_assert!((s.point.norm_sqr() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn strata_are_rotation_invariant(u in -5.0f64..5.0, v in -5.0f64..5.0, w in -5.0f64..5.0,
                                         theta in 0.0f64..6.3) {
            prop_assume!(u * u + v * v > 1e-6);
            let (s, c) = theta.sin_cos();
            let a = su2_conj_f(Su2Covector::new(u, v, w)).unwrap();
            let b = su2_conj_f(Su2Covector::new(c * u - s * v, s * u + c * v, w)).unwrap();
            prop_assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }

        #[test]
        fn jacobi_closed_form(u in -4.0f64..4.0, v in -4.0f64..4.0, w in -4.0f64..4.0,
                              p in prop::array::uniform6(-1.0f64..1.0)) {
            let cov = Su2Covector::new(u, v, w);
            prop_assume!(cov.norm() > 1e-3);
            let init = JacobiCoords::from_slice(&p);
            let c = su2_jacobi(cov, &init, 1.0).unwrap();
            let n = su2_jacobi_numeric(cov, &init, 1.0).unwrap();
            prop_assert!(c.max_abs_diff(&n) < 1e-9);
        }
    }
}
