//! Frozen reference values from independent sources: 30-digit `mpmath`
//! evaluations of Beta functions and transcendental roots, and brute-force
//! quadrature written out here.

#![allow(clippy::excessive_precision)]

use sr_expmap::alpha_trig::{pi_alpha, pi_alpha_from_ode};
use sr_expmap::numeric::quad::quad;
use sr_expmap::sl2::sc_functions;
use sr_expmap::su2::{su2_conj_f, Su2Covector};

/// `mpmath`: `beta(1/(2a), 1/2) / a`.
const PI_ALPHA: [(f64, f64); 4] = [
    (1.0, std::f64::consts::PI),
    (1.5, 2.80436421065090852235),
    (2.0, 2.62205755429211981046),
    (3.0, 2.42865064788758161182),
];

/// `mpmath.findroot` on `s cos(s/2) - 2 sin(s/2)`.
const TAN_ROOTS: [f64; 2] = [8.98681891581812835062, 15.4505036738754143284];

#[test]
fn pi_alpha_matches_beta_function() {
    for (alpha, expected) in PI_ALPHA {
        let q = pi_alpha(alpha).unwrap();
        let o = pi_alpha_from_ode(alpha).unwrap();
        assert!((q - expected).abs() < 1e-12, "α={alpha}: {q}");
        assert!((o - expected).abs() < 1e-9, "α={alpha}: {o}");
    }
}

#[test]
fn quartic_integral_by_midpoint_rule() {
    // t = sin s removes the endpoint singularity: cos s / sqrt(1 - sin^4 s) = 1 / sqrt(1 + sin^2 s)
    let n = 1 << 22;
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let mid: f64 = (0..n).map(|i| 1.0 / (1.0 + ((i as f64 + 0.5) * h).sin().powi(2)).sqrt()).sum::<f64>() * h;
    assert!((mid - 1.3110287771461).abs() < 1e-11, "{mid}");
    let adaptive = quad(|t| 1.0 / (1.0 - t.powi(4)).sqrt(), 0.0, 1.0, 1e-10).unwrap();
    assert!((adaptive - mid).abs() < 1e-8, "{adaptive} vs {mid}");
    assert!((2.0 * mid - PI_ALPHA[2].1).abs() < 1e-11);
}

#[test]
fn c0_radii_are_roots() {
    for root in TAN_ROOTS {
        let d = [0.36, 0.48, 0.8];
        let cov = Su2Covector::new(d[0] * root, d[1] * root, d[2] * root);
        let (f0, f1) = su2_conj_f(cov).unwrap();
        assert!(f0.abs() < 1e-12, "{f0}");
        assert!(f1.abs() > 0.1);
    }
}

#[test]
fn sc_matches_direct_trig() {
    for (a, t) in [(4.0, 0.3), (0.25, 2.0), (-1.0, 0.5), (-9.0, 0.1)] {
        let (s, c) = sc_functions(a, t);
        let (es, ec) = if a > 0.0 {
            let k: f64 = f64::sqrt(a);
            ((k * t).sin() / k, (k * t).cos())
        } else {
            let k: f64 = f64::sqrt(-a);
            ((k * t).sinh() / k, (k * t).cosh())
        };
        assert!((s - es).abs() < 1e-14 && (c - ec).abs() < 1e-14, "{a} {t}");
    }
}
