//! Jacobi-field coordinates in a symplectic frame `(E_1..E_n, F_1..F_n)`.

use serde::Serialize;

use crate::error::Result;
use crate::numeric::ode::integrate_to_end;

const ORACLE_REL_TOL: f64 = 1e-12;
const ORACLE_ABS_TOL: f64 = 1e-14;

/// A vector `Σ p_i E_i + x_i F_i`; `p` are the vertical and `x` the
/// horizontal components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiCoords {
    pub p: Vec<f64>,
    pub x: Vec<f64>,
}

impl JacobiCoords {
    pub fn new(p: Vec<f64>, x: Vec<f64>) -> Self {
        debug_assert_eq!(p.len(), x.len());
        Self { p, x }
    }

    pub fn zeros(n: usize) -> Self {
        Self { p: vec![0.0; n], x: vec![0.0; n] }
    }

    /// Vertical datum `(p0, 0)`.
    pub fn vertical(p: &[f64]) -> Self {
        Self { p: p.to_vec(), x: vec![0.0; p.len()] }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.p.iter().chain(&self.x).copied().collect()
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let n = v.len() / 2;
        Self { p: v[..n].to_vec(), x: v[n..2 * n].to_vec() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_vec().iter().zip(other.to_vec()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Numerically integrates a Jacobi equation written as the linear system
/// `d/dt (p, x) = rhs(t, (p, x))` from 0 to `t`.
pub fn integrate_jacobi<F>(rhs: F, init: &JacobiCoords, t: f64) -> Result<JacobiCoords>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    if t == 0.0 {
        return Ok(init.clone());
    }
    let (span, sign) = if t > 0.0 { ((0.0, t), 1.0) } else { ((0.0, -t), -1.0) };
    let field = |s: f64, y: &[f64], dy: &mut [f64]| {
        rhs(sign * s, y, dy);
        if sign < 0.0 {
            dy.iter_mut().for_each(|d| *d = -*d);
        }
    };
    let end = integrate_to_end(&field, init.to_vec(), span, ORACLE_REL_TOL, ORACLE_ABS_TOL)?;
    Ok(JacobiCoords::from_slice(&end))
}
