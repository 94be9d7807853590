//! Canonical-frame Jacobi fields shared by the 3D contact structures.
//!
//! In the canonical frame `(E_a, E_b, E_c, F_a, F_b, F_c)` the Jacobi equation
//! has constant coefficients that only involve one curvature `R`:
//!
//! ```text
//! p_a' = -p_c - R x_a    x_a' = p_a
//! p_b' = 0               x_b' = p_b
//! p_c' = 0               x_c' = x_a
//! ```
//!
//! `R = |λ0|^2` on SU(2) and `R = w0^2 - u0^2 - v0^2` on SL(2).

use crate::jacobi::JacobiCoords;
use crate::numeric::linalg::Matrix;

const SERIES_SWITCH: f64 = 0.1;

/// `s_R(t)`, `c_R(t)` and the two primitives `g1 = ∫_0^t s_R = (1 - c_R)/R`,
/// `g2 = ∫_0^t g1 = (t - s_R)/R`, all analytic in `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTrig {
    pub s: f64,
    pub c: f64,
    pub g1: f64,
    pub g2: f64,
}

/// `(s_a(t), c_a(t))`: `(sin(√a t)/√a, cos(√a t))` for `a > 0`, `(t, 1)` for
/// `a = 0` and the hyperbolic pair for `a < 0`.
pub fn sc_functions(a: f64, t: f64) -> (f64, f64) {
    let x = a * t * t;
    if x.abs() < 1e-6 {
        let s = t * (1.0 - x / 6.0 + x * x / 120.0);
        let c = 1.0 - x / 2.0 + x * x / 24.0;
        return (s, c);
    }
    if a > 0.0 {
        let k = a.sqrt();
        ((k * t).sin() / k, (k * t).cos())
    } else {
        let k = (-a).sqrt();
        ((k * t).sinh() / k, (k * t).cosh())
    }
}

pub fn curvature_trig(r: f64, t: f64) -> CurvatureTrig {
    let (s, c) = sc_functions(r, t);
    let x = r * t * t;
    if x.abs() < SERIES_SWITCH {
        // Taylor series in x = R t^2, eight terms
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        let mut term = 1.0;
        let mut fact_even = 2.0; // (2k+2)!
        let mut fact_odd = 6.0; // (2k+3)!
        for k in 0..8 {
            g1 += term / fact_even;
            g2 += term / fact_odd;
            term *= -x;
            let kf = k as f64;
            fact_even *= (2.0 * kf + 3.0) * (2.0 * kf + 4.0);
            fact_odd *= (2.0 * kf + 4.0) * (2.0 * kf + 5.0);
        }
        return CurvatureTrig { s, c, g1: g1 * t * t, g2: g2 * t * t * t };
    }
    let g1 = if r > 0.0 {
        let h = (0.5 * r.sqrt() * t).sin();
        2.0 * h * h / r
    } else {
        let h = (0.5 * (-r).sqrt() * t).sinh();
        -2.0 * h * h / r
    };
    CurvatureTrig { s, c, g1, g2: (t - s) / r }
}

/// Closed-form Jacobi field at time `t` for curvature `r`.
pub fn frame_jacobi(r: f64, init: &JacobiCoords, t: f64) -> JacobiCoords {
    let k = curvature_trig(r, t);
    let (pa, pb, pc) = (init.p[0], init.p[1], init.p[2]);
    let (xa, xb, xc) = (init.x[0], init.x[1], init.x[2]);
    JacobiCoords::new(
        vec![pa * k.c - (r * xa + pc) * k.s, pb, pc],
        vec![xa * k.c - pc * k.g1 + pa * k.s, pb * t + xb, xc + xa * k.s + pa * k.g1 - pc * k.g2],
    )
}

/// Right-hand side of the frame Jacobi system; state `(p_a, p_b, p_c, x_a, x_b, x_c)`.
pub fn frame_jacobi_rhs(r: f64, j: &[f64], dj: &mut [f64]) {
    dj[0] = -j[2] - r * j[3];
    dj[1] = 0.0;
    dj[2] = 0.0;
    dj[3] = j[0];
    dj[4] = j[1];
    dj[5] = j[3];
}

/// `x(1)` for vertical data `(p0, 0)`: the conjugate matrix `M`.
pub fn frame_conj_matrix(r: f64) -> Matrix {
    let k = curvature_trig(r, 1.0);
    Matrix::from_rows(&[vec![k.s, 0.0, -k.g1], vec![0.0, 1.0, 0.0], vec![k.g1, 0.0, -k.g2]])
}

/// `p(1)` for vertical data `(p0, 0)`.
pub fn frame_momentum_matrix(r: f64) -> Matrix {
    let k = curvature_trig(r, 1.0);
    Matrix::from_rows(&[vec![k.c, 0.0, -k.s], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])
}

/// Stratum functions `(ρ cos(ρ/2) - 2 sin(ρ/2), sin(ρ/2))`.
pub fn strata_values(rho: f64) -> (f64, f64) {
    let (s, c) = (0.5 * rho).sin_cos();
    (rho * c - 2.0 * s, s)
}

/// Vertical frame vectors `E_a, E_b, E_c` at `t = 0` as columns in the fiber
/// coordinates `(∂u, ∂v, ∂w)`. `ec_sign` orients `E_c` along `±∂w`.
pub fn vertical_frame(u0: f64, v0: f64, w0: f64, ec_sign: f64) -> Matrix {
    let n = (u0 * u0 + v0 * v0).sqrt();
    Matrix::from_columns(&[vec![-v0 / n, u0 / n, 0.0], vec![u0 / n, v0 / n, w0 / n], vec![0.0, 0.0, ec_sign / n]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::integrate_jacobi;

    #[test]
    fn sc_examples() {
        assert_eq!(sc_functions(0.0, 0.7), (0.7, 1.0));
        let (s, c) = sc_functions(1.0, std::f64::consts::FRAC_PI_2);
        assert!((s - 1.0).abs() < 1e-15 && c.abs() < 1e-15);
        let (s, c) = sc_functions(-1.0, 0.5);
        assert!((s - 0.5210953).abs() < 1e-7 && (c - 1.1276260).abs() < 1e-7);
    }

    #[test]
    fn sc_continuous_across_zero() {
        for t in [0.1, 1.0, 3.0] {
            let a = 1e-6 / (t * t);
            let below = sc_functions(a * (1.0 - 1e-12), t);
            let above = sc_functions(a * (1.0 + 1e-12), t);
            assert!((below.0 - above.0).abs() < 1e-12 && (below.1 - above.1).abs() < 1e-12);
        }
    }

    #[test]
    fn primitives_are_consistent() {
        for r in [-4.0, -1.0, -1e-9, 0.0, 1e-9, 0.05, 1.0, 39.47841760435743] {
            for t in [0.2, 1.0, 1.3] {
                let k = curvature_trig(r, t);
                // g1' = s, g2' = g1, checked by central differences
                let h = 1e-5;
                let kp = curvature_trig(r, t + h);
                let km = curvature_trig(r, t - h);
                assert!(((kp.g1 - km.g1) / (2.0 * h) - k.s).abs() < 1e-9, "r {r} t {t}");
                assert!(((kp.g2 - km.g2) / (2.0 * h) - k.g1).abs() < 1e-9, "r {r} t {t}");
                // 1 - c = R g1
                assert!((1.0 - k.c - r * k.g1).abs() < 1e-12 * (1.0 + r.abs()));
            }
        }
    }

    #[test]
    fn series_switch_is_seamless() {
        for t in [0.5, 1.0] {
            let r = SERIES_SWITCH / (t * t);
            for sign in [1.0, -1.0] {
                let a = curvature_trig(sign * r * (1.0 - 1e-12), t);
                let b = curvature_trig(sign * r * (1.0 + 1e-12), t);
                assert!((a.g1 - b.g1).abs() < 1e-14 && (a.g2 - b.g2).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn closed_form_matches_integration() {
        let init = JacobiCoords::new(vec![0.3, -0.7, 1.1], vec![-0.4, 0.2, 0.9]);
        for r in [-4.0, -1.0, 0.0, 1.0, 4.0 * std::f64::consts::PI.powi(2)] {
            for t in [0.5, 1.0] {
                let c = frame_jacobi(r, &init, t);
                let n = integrate_jacobi(|_, j, dj| frame_jacobi_rhs(r, j, dj), &init, t).unwrap();
                assert!(c.max_abs_diff(&n) < 1e-9, "r {r} t {t}");
            }
        }
    }

    #[test]
    fn matrices_are_vertical_solutions() {
        for r in [-2.0, 0.0, 3.0] {
            let m = frame_conj_matrix(r);
            let p = frame_momentum_matrix(r);
            for i in 0..3 {
                let mut p0 = vec![0.0; 3];
                p0[i] = 1.0;
                let j = frame_jacobi(r, &JacobiCoords::vertical(&p0), 1.0);
                for k in 0..3 {
                    assert!((m[(k, i)] - j.x[k]).abs() < 1e-15);
                    assert!((p[(k, i)] - j.p[k]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn limit_matrix_at_zero_curvature() {
        let m = frame_conj_matrix(0.0);
        let expected = Matrix::from_rows(&[vec![1.0, 0.0, -0.5], vec![0.0, 1.0, 0.0], vec![0.5, 0.0, -1.0 / 6.0]]);
        assert!(m.max_abs_diff(&expected) < 1e-15);
        assert!(m.determinant().abs() > 1e-3);
    }
}
