//! Root isolation by uniform scanning followed by Brent's method.

pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

/// A located zero. `bracketed` is false for touching (even-order) zeros found
/// by minimizing `|g|` rather than from a sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub value: f64,
    pub bracketed: bool,
}

/// Brent's method on a sign-change bracket `[a, b]`. Returns `(x, g(x))`.
pub fn brent<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut fa = g(a);
    let mut fb = g(b);
    if fa == 0.0 {
        return (a, fa);
    }
    if fb == 0.0 {
        return (b, fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return (b, fb);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
    }
    (b, fb)
}

fn golden_min_abs<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = g(x1).abs();
    let mut f2 = g(x2).abs();
    while (b - a).abs() > tol.max(4.0 * f64::EPSILON * a.abs().max(b.abs())) {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = g(x1).abs();
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = g(x2).abs();
        }
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

/// All zeros of `g` on `[lo, hi]`, sorted ascending.
///
/// Sign changes between `scan_points` equally spaced samples are refined by
/// Brent. A sign change across a pole is discarded because `|g|` stays large
/// at the converged point. Local minima of `|g|` without a sign change are
/// polished by golden-section search and kept when `|g| <= tol`.
pub fn find_roots_detailed<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, scan_points: usize, tol: f64) -> Vec<Root> {
    let n = scan_points.max(2);
    let xs: Vec<f64> =
        (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots: Vec<Root> = Vec::new();

    for i in 0..n {
        if fs[i] == 0.0 {
            roots.push(Root { x: xs[i], value: 0.0, bracketed: true });
        }
    }
    for i in 0..n - 1 {
        let (fa, fb) = (fs[i], fs[i + 1]);
        if !(fa.is_finite() && fb.is_finite()) || fa == 0.0 || fb == 0.0 {
            continue;
        }
        if (fa < 0.0) != (fb < 0.0) {
            let (x, fx) = brent(&g, xs[i], xs[i + 1], tol);
            let scale = 1f64.max(fa.abs()).max(fb.abs());
            if fx.abs() <= tol.sqrt() * scale {
                roots.push(Root { x, value: fx, bracketed: true });
            }
        }
    }
    for i in 1..n - 1 {
        let (fl, fm, fr) = (fs[i - 1], fs[i], fs[i + 1]);
        let same_sign = (fl > 0.0) == (fm > 0.0) && (fm > 0.0) == (fr > 0.0);
        if fm != 0.0 && same_sign && fm.abs() <= fl.abs() && fm.abs() <= fr.abs() {
            let (x, fx) = golden_min_abs(&g, xs[i - 1], xs[i + 1], tol * 1e-2);
            if fx.abs() <= tol {
                roots.push(Root { x, value: fx, bracketed: false });
            }
        }
    }

    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    let merge = 10.0 * tol.max(f64::EPSILON * (hi - lo).abs());
    roots.dedup_by(|later, earlier| (later.x - earlier.x).abs() <= merge);
    roots
}

/// Zeros of `g` on `[lo, hi]`, sorted ascending. See [`find_roots_detailed`].
pub fn find_roots<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, scan_points: usize, tol: f64) -> Vec<f64> {
    find_roots_detailed(g, lo, hi, scan_points, tol).into_iter().map(|r| r.x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let fa = g(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (g(m) < 0.0) == (fa < 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn linear() {
        let r = find_roots(|t| t - 1.0, 0.0, 2.0, 10, 1e-12);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tan_minus_identity_single_root() {
        let r = find_roots(|t| t.tan() - t, 3.0, 6.0, 200, DEFAULT_ROOT_TOL);
        assert_eq!(r.len(), 1, "{r:?}");
        assert!((r[0] - 4.493409458).abs() < 1e-8);
    }

    #[test]
    fn tan_minus_identity_matches_bisection() {
        let g = |t: f64| t.tan() - t;
        let r = find_roots(g, 3.0, 30.0, 2000, DEFAULT_ROOT_TOL);
        // one root in each (k pi, k pi + pi/2)
        assert_eq!(r.len(), 9, "{r:?}");
        for (k, x) in (1..).zip(&r) {
            let lo = k as f64 * PI + 1e-9;
            let hi = k as f64 * PI + PI / 2.0 - 1e-9;
            assert!((x - bisect(g, lo, hi)).abs() < 1e-8);
        }
    }

    #[test]
    fn sine_roots() {
        let r = find_roots(f64::sin, 1.0, 7.0, 50, 1e-12);
        assert_eq!(r.len(), 2);
        assert!((r[0] - PI).abs() < 1e-12);
        assert!((r[1] - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn touching_zero_is_flagged() {
        let r = find_roots_detailed(|t| (t - 0.31).powi(2), 0.0, 1.0, 41, 1e-10);
        assert_eq!(r.len(), 1);
        assert!(!r[0].bracketed);
        assert!((r[0].x - 0.31).abs() < 1e-4);
    }

    #[test]
    fn no_roots() {
        assert!(find_roots(|t| t * t + 1.0, -1.0, 1.0, 20, 1e-10).is_empty());
    }

    #[test]
    fn root_on_grid_is_not_duplicated() {
        let r = find_roots(|t| t - 0.5, 0.0, 1.0, 3, 1e-12);
        assert_eq!(r, vec![0.5]);
    }
}
