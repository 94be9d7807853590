//! Generalized trigonometric functions `sin_α`, `cos_α` and the half period
//! `π_α`.
//!
//! `sin_α` is the solution of `f'' = -α |f|^{2α-2} f`, `f(0) = 0`, `f'(0) = 1`
//! and `cos_α = sin_α'`. The energy `cos_α^2 + |sin_α|^{2α} = 1` is conserved
//! and the pair is `2π_α` periodic with
//! `π_α = 2 ∫_0^1 (1 - t^{2α})^{-1/2} dt`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::numeric::ode::{integrate, OdeProblem};
use crate::numeric::quad::quad;
use crate::numeric::roots::find_roots;

pub const TABLE_INTERVALS: usize = 2048;
const BUILD_SUBSTEPS: usize = 8;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("alpha must be a finite real >= 1, got {alpha}")))
    }
}

/// `|f|^{2α-2} f`, odd in `f` for every real `α >= 1`.
#[inline]
pub fn odd_power(f: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        f
    } else if alpha == 2.0 {
        f * f * f
    } else {
        f.abs().powf(2.0 * alpha - 2.0) * f
    }
}

/// `|f|^{2α}`.
#[inline]
pub fn even_power(f: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        f * f
    } else if alpha == 2.0 {
        let f2 = f * f;
        f2 * f2
    } else {
        f.abs().powf(2.0 * alpha)
    }
}

/// Half period `π_α` from the integral definition.
///
/// The substitution `t = sin s` turns the integrand into
/// `cos s / sqrt(1 - sin^{2α} s)`, which is smooth on `[0, π/2]` with limit
/// `1/sqrt(α)` at the right end.
pub fn pi_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(std::f64::consts::PI);
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let integrand = |s: f64| {
        let c = s.cos();
        // 1 - sin s = 2 sin^2(π/4 - s/2), kept accurate near s = π/2
        let gap = 2.0 * (0.5 * (half_pi - s)).sin().powi(2);
        let log_sin = (-gap).ln_1p();
        let denom = -(2.0 * alpha * log_sin).exp_m1();
        if denom <= 0.0 {
            1.0 / alpha.sqrt()
        } else {
            c / denom.sqrt()
        }
    };
    Ok(2.0 * quad(integrand, 0.0, half_pi, 1e-14)?)
}

/// Half period measured directly on the ODE: the first positive zero of an
/// adaptive numeric solution. Independent of the table and of [`pi_alpha`].
pub fn pi_alpha_from_ode(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let field = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -alpha * odd_power(y[0], alpha);
    };
    // π_α decreases from π towards 2 as α grows
    let problem = OdeProblem::new(&field, vec![0.0, 1.0], (0.0, 4.0))?;
    let traj = integrate(&problem, 1e-12, 1e-14)?;
    let roots = find_roots(|t| traj.eval(t)[0], 1.0, 4.0, 400, 1e-13);
    roots.first().copied().ok_or_else(|| Error::InvalidInput(format!("no half period found for alpha {alpha}")))
}

#[derive(Debug, Clone, Copy)]
struct Node {
    s: f64,
    c: f64,
}

/// Immutable sample table of `(sin_α, cos_α)` on the quarter period.
#[derive(Debug, Clone)]
pub struct AlphaTrigTable {
    alpha: f64,
    pi_alpha: f64,
    step: f64,
    nodes: Vec<Node>,
}

impl AlphaTrigTable {
    pub fn new(alpha: f64) -> Result<Self> {
        let pi_a = pi_alpha(alpha)?;
        let quarter = 0.5 * pi_a;
        let step = quarter / TABLE_INTERVALS as f64;
        let mut nodes = Vec::with_capacity(TABLE_INTERVALS + 1);
        let mut state = Node { s: 0.0, c: 1.0 };
        nodes.push(state);
        let sub = step / BUILD_SUBSTEPS as f64;
        for _ in 0..TABLE_INTERVALS {
            for _ in 0..BUILD_SUBSTEPS {
                state = rk4(alpha, state, sub);
            }
            nodes.push(state);
        }
        // the last node is the quarter period; pin it to its exact value
        if let Some(last) = nodes.last_mut() {
            *last = Node { s: 1.0, c: 0.0 };
        }
        Ok(Self { alpha, pi_alpha: pi_a, step, nodes })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn pi_alpha(&self) -> f64 {
        self.pi_alpha
    }

    /// Quarter-period sample grid as `(t, sin_α(t))` pairs.
    pub fn quarter_period_samples(&self) -> Vec<(f64, f64)> {
        self.nodes.iter().enumerate().map(|(k, n)| (k as f64 * self.step, n.s)).collect()
    }

    fn quarter(&self, tau: f64) -> Node {
        let k = ((tau / self.step).round() as usize).min(TABLE_INTERVALS);
        let dt = tau - k as f64 * self.step;
        if dt == 0.0 {
            self.nodes[k]
        } else {
            rk4(self.alpha, self.nodes[k], dt)
        }
    }

    /// `(sin_α(t), cos_α(t))`.
    pub fn sin_cos(&self, t: f64) -> (f64, f64) {
        if self.alpha == 1.0 {
            return t.sin_cos();
        }
        let p = self.pi_alpha;
        let mut tau = t.rem_euclid(2.0 * p);
        let mut sign = 1.0;
        if tau >= p {
            tau -= p;
            sign = -1.0;
        }
        let n = if tau <= 0.5 * p {
            self.quarter(tau)
        } else {
            let m = self.quarter(p - tau);
            Node { s: m.s, c: -m.c }
        };
        (sign * n.s, sign * n.c)
    }

    pub fn sin(&self, t: f64) -> f64 {
        self.sin_cos(t).0
    }

    pub fn cos(&self, t: f64) -> f64 {
        self.sin_cos(t).1
    }

    /// `τ ∈ [0, π_α/2]` with `sin_α τ = s_abs` and `cos_α τ = c_abs`.
    ///
    /// Uses whichever coordinate has the larger derivative along the arc.
    fn quarter_inverse(&self, s_abs: f64, c_abs: f64) -> f64 {
        let by_sine = s_abs < 0.7;
        let key = |n: &Node| if by_sine { n.s } else { -n.c };
        let target = if by_sine { s_abs } else { -c_abs };
        let k = self.nodes.partition_point(|n| key(n) < target);
        let mut tau = (k.min(TABLE_INTERVALS) as f64 * self.step).min(0.5 * self.pi_alpha);
        if k > 0 {
            // interpolate inside the bracketing interval for a good start
            let (lo, hi) = (&self.nodes[k - 1], &self.nodes[k.min(TABLE_INTERVALS)]);
            let span = key(hi) - key(lo);
            if span > 0.0 {
                tau = ((k - 1) as f64 + (target - key(lo)) / span) * self.step;
            }
        }
        for _ in 0..6 {
            let n = self.quarter(tau);
            let (resid, slope) =
                if by_sine { (n.s - s_abs, n.c) } else { (-n.c + c_abs, self.alpha * odd_power(n.s, self.alpha)) };
            if slope <= 0.0 {
                break;
            }
            let delta = resid / slope;
            tau = (tau - delta).clamp(0.0, 0.5 * self.pi_alpha);
            if delta.abs() <= 1e-16 * self.pi_alpha {
                break;
            }
        }
        tau
    }

    /// Phase `φ ∈ [0, 2π_α)` of the pair `(s, c)`, which is assumed to lie on
    /// the energy curve `|s|^{2α} + c^2 = 1`.
    pub fn phase(&self, s: f64, c: f64) -> f64 {
        if self.alpha == 1.0 {
            return s.atan2(c).rem_euclid(2.0 * std::f64::consts::PI);
        }
        let p = self.pi_alpha;
        let tau = self.quarter_inverse(s.abs().min(1.0), c.abs().min(1.0));
        let phi = match (s >= 0.0, c >= 0.0) {
            (true, true) => tau,
            (true, false) => p - tau,
            (false, false) => p + tau,
            (false, true) => 2.0 * p - tau,
        };
        if phi >= 2.0 * p {
            0.0
        } else {
            phi
        }
    }

    /// Phase `φ ∈ [0, 2π_α)` with `sin_α φ = s` and `cos_α φ` of sign `c_sign`.
    pub fn arc(&self, s: f64, c_sign: f64) -> Result<f64> {
        if !(s.abs() <= 1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!("arc_alpha needs |s| <= 1, got {s}")));
        }
        let s = s.clamp(-1.0, 1.0);
        let c_abs = (1.0 - even_power(s, self.alpha)).max(0.0).sqrt();
        let c = if c_sign < 0.0 { -c_abs } else { c_abs };
        Ok(self.phase(s, c))
    }
}

fn rk4(alpha: f64, n: Node, h: f64) -> Node {
    let acc = |s: f64| -alpha * odd_power(s, alpha);
    let k1s = n.c;
    let k1c = acc(n.s);
    let k2s = n.c + 0.5 * h * k1c;
    let k2c = acc(n.s + 0.5 * h * k1s);
    let k3s = n.c + 0.5 * h * k2c;
    let k3c = acc(n.s + 0.5 * h * k2s);
    let k4s = n.c + h * k3c;
    let k4c = acc(n.s + h * k3s);
    Node {
        s: n.s + h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s),
        c: n.c + h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c),
    }
}

/// Shared table for `alpha`, built on first use.
pub fn table(alpha: f64) -> Result<Arc<AlphaTrigTable>> {
    check_alpha(alpha)?;
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<AlphaTrigTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&alpha.to_bits()) {
        return Ok(t.clone());
    }
    let built = Arc::new(AlphaTrigTable::new(alpha)?);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Ok(guard.entry(alpha.to_bits()).or_insert(built).clone())
}

/// `(sin_α(t), cos_α(t))`.
pub fn sin_cos_alpha(alpha: f64, t: f64) -> Result<(f64, f64)> {
    if alpha == 1.0 {
        return Ok(t.sin_cos());
    }
    Ok(table(alpha)?.sin_cos(t))
}

/// Phase `φ ∈ [0, 2π_α)` with `sin_α φ = s` and `sign(cos_α φ) = c_sign`.
pub fn arc_alpha(alpha: f64, s: f64, c_sign: f64) -> Result<f64> {
    table(alpha)?.arc(s, c_sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const ALPHAS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

    #[test]
    fn pi_one_is_pi() {
        assert!((pi_alpha(1.0).unwrap() - PI).abs() < 1e-12);
        assert!((AlphaTrigTable::new(1.0).unwrap().pi_alpha() - PI).abs() < 1e-12);
    }

    #[test]
    fn pi_two() {
        assert!((pi_alpha(2.0).unwrap() - 2.6220576).abs() < 1e-6);
    }

    #[test]
    fn pi_matches_ode_half_period() {
        for alpha in [1.0, 1.5, 2.0, 3.0, 4.5] {
            let q = pi_alpha(alpha).unwrap();
            let o = pi_alpha_from_ode(alpha).unwrap();
            assert!((q - o).abs() < 1e-7, "alpha {alpha}: {q} vs {o}");
        }
    }

    #[test]
    fn alpha_below_one_rejected() {
        assert!(pi_alpha(0.5).is_err());
        assert!(sin_cos_alpha(0.9, 1.0).is_err());
    }

    #[test]
    fn classical_values() {
        let (s, c) = sin_cos_alpha(1.0, PI / 2.0).unwrap();
        assert!((s - 1.0).abs() < 1e-15 && c.abs() < 1e-15);
        for alpha in ALPHAS {
            assert_eq!(sin_cos_alpha(alpha, 0.0).unwrap(), (0.0, 1.0));
        }
    }

    #[test]
    fn quarter_period_of_alpha_two() {
        let p = pi_alpha(2.0).unwrap();
        let (s, c) = sin_cos_alpha(2.0, p / 2.0).unwrap();
        assert!((s - 1.0).abs() < 1e-9 && c.abs() < 1e-9);
    }

    #[test]
    fn table_matches_adaptive_ode() {
        for alpha in [1.5, 2.0, 3.0] {
            let field = move |_t: f64, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -alpha * odd_power(y[0], alpha);
            };
            let problem = OdeProblem::new(&field, vec![0.0, 1.0], (0.0, 7.0)).unwrap();
            let traj = integrate(&problem, 1e-12, 1e-14).unwrap();
            let tab = table(alpha).unwrap();
            for i in 0..=140 {
                let t = i as f64 * 0.05;
                let y = traj.eval(t);
                let (s, c) = tab.sin_cos(t);
                assert!((s - y[0]).abs() < 1e-9, "alpha {alpha} t {t}");
                assert!((c - y[1]).abs() < 1e-9, "alpha {alpha} t {t}");
            }
        }
    }

    #[test]
    fn identity_periodicity_and_parity_on_grid() {
        for alpha in ALPHAS {
            let tab = table(alpha).unwrap();
            let p = tab.pi_alpha();
            for i in 0..=1000 {
                let t = -2.0 * p + 4.0 * p * i as f64 / 1000.0;
                let (s, c) = tab.sin_cos(t);
                assert!((even_power(s, alpha) + c * c - 1.0).abs() < 1e-10);
                let (s2, c2) = tab.sin_cos(t + 2.0 * p);
                assert!((s - s2).abs() < 1e-9 && (c - c2).abs() < 1e-9);
                let (sn, cn) = tab.sin_cos(-t);
                assert!((s + sn).abs() < 1e-12 && (c - cn).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn second_difference_matches_field() {
        let h = 2e-4;
        for alpha in ALPHAS {
            let tab = table(alpha).unwrap();
            for i in 0..200 {
                let t = -5.0 + 0.05 * i as f64;
                let d2 = (tab.sin(t + h) - 2.0 * tab.sin(t) + tab.sin(t - h)) / (h * h);
                assert!((d2 + alpha * odd_power(tab.sin(t), alpha)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn samples_monotone() {
        let tab = table(1.5).unwrap();
        let samples = tab.quarter_period_samples();
        assert_eq!(samples.len(), TABLE_INTERVALS + 1);
        assert!(samples.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1));
    }

    #[test]
    fn arc_examples() {
        assert!((arc_alpha(1.0, 1.0, 1.0).unwrap() - PI / 2.0).abs() < 1e-12);
        for alpha in ALPHAS {
            assert_eq!(arc_alpha(alpha, 0.0, 1.0).unwrap(), 0.0);
        }
        let phi = arc_alpha(2.0, 0.5, -1.0).unwrap();
        let (s, c) = sin_cos_alpha(2.0, phi).unwrap();
        assert!((s - 0.5).abs() < 1e-9 && c < 0.0);
        assert!(arc_alpha(2.0, 1.1, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn phase_round_trip(alpha in prop::sample::select(ALPHAS.to_vec()), u in 0.0f64..1.0) {
            let tab = table(alpha).unwrap();
            let phi = u * 2.0 * tab.pi_alpha();
            let (s, c) = tab.sin_cos(phi);
            let back = tab.phase(s, c);
            let (s2, c2) = tab.sin_cos(back);
            prop_assert!((s - s2).abs() < 1e-10 && (c - c2).abs() < 1e-10);
        }

        #[test]
        fn arc_round_trip(alpha in prop::sample::select(ALPHAS.to_vec()),
                          s in -1.0f64..1.0, neg in any::<bool>()) {
            let sign = if neg { -1.0 } else { 1.0 };
            let phi = arc_alpha(alpha, s, sign).unwrap();
            let (s2, c2) = sin_cos_alpha(alpha, phi).unwrap();
            prop_assert!((s2 - s).abs() < 1e-9);
            prop_assert!(c2 * sign >= -1e-12);
        }
    }
}
