//! Adaptive Dormand–Prince 5(4) integrator with PI step-size control and the
//! classical fourth-order continuous extension for dense output.

use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 2_000_000;

/// Right-hand side `dy = f(t, y)`.
pub type VectorField<'a> = dyn Fn(f64, &[f64], &mut [f64]) + Sync + 'a;

/// An initial-value problem on `t_span.0 <= t <= t_span.1`.
pub struct OdeProblem<'a> {
    pub dimension: usize,
    pub vector_field: &'a VectorField<'a>,
    pub initial_state: Vec<f64>,
    pub t_span: (f64, f64),
}

impl<'a> OdeProblem<'a> {
    pub fn new(vector_field: &'a VectorField<'a>, initial_state: Vec<f64>, t_span: (f64, f64)) -> Result<Self> {
        if initial_state.is_empty() {
            return Err(Error::InvalidInput("ODE dimension must be at least 1".into()));
        }
        if !(t_span.0 < t_span.1) {
            return Err(Error::InvalidInput(format!("t_span must be increasing, got {t_span:?}")));
        }
        Ok(Self { dimension: initial_state.len(), vector_field, initial_state, t_span })
    }
}

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// error estimate: 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step together with its interpolation coefficients.
#[derive(Debug, Clone)]
struct DenseStep {
    t: f64,
    h: f64,
    coeffs: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let theta = ((t - self.t) / self.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

/// Dense solution returned by [`integrate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    t_span: (f64, f64),
    steps: Vec<DenseStep>,
    final_state: Vec<f64>,
    rejected: usize,
}

impl Trajectory {
    pub fn t_span(&self) -> (f64, f64) {
        self.t_span
    }

    pub fn final_state(&self) -> &[f64] {
        &self.final_state
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    /// State at `t`; `t` is clamped into the integration interval.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.final_state.len()];
        if t >= self.t_span.1 {
            out.copy_from_slice(&self.final_state);
            return out;
        }
        let idx = self.steps.partition_point(|s| s.t + s.h <= t).min(self.steps.len() - 1);
        self.steps[idx].eval(t, &mut out);
        out
    }
}

fn error_norm(y0: &[f64], y1: &[f64], err: &[f64], rel_tol: f64, abs_tol: f64) -> f64 {
    let n = y0.len() as f64;
    let sum: f64 = y0
        .iter()
        .zip(y1)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = abs_tol + rel_tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step(f: &VectorField, t0: f64, y0: &[f64], f0: &[f64], rel_tol: f64, abs_tol: f64, span: f64) -> f64 {
    let n = y0.len();
    let scale = |y: f64| abs_tol + rel_tol * y.abs();
    let rms = |v: &mut dyn Iterator<Item = f64>| (v.map(|x| x * x).sum::<f64>() / n as f64).sqrt();
    let d0 = rms(&mut y0.iter().map(|y| y / scale(*y)));
    let d1 = rms(&mut f0.iter().zip(y0).map(|(f, y)| f / scale(*y)));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + h0, &y1, &mut f1);
    let d2 = rms(&mut f1.iter().zip(f0).zip(y0).map(|((a, b), y)| (a - b) / scale(*y))) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `problem` over its `t_span` with local error controlled by
/// `rel_tol`/`abs_tol`, returning a dense trajectory.
pub fn integrate(problem: &OdeProblem, rel_tol: f64, abs_tol: f64) -> Result<Trajectory> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-2 && abs_tol > 0.0 && abs_tol <= 1e-2) {
        return Err(Error::InvalidInput(format!(
            "tolerances must lie in (0, 1e-2], got rel {rel_tol:e} abs {abs_tol:e}"
        )));
    }
    if problem.initial_state.len() != problem.dimension {
        return Err(Error::InvalidInput("initial state length mismatch".into()));
    }
    let f = problem.vector_field;
    let n = problem.dimension;
    let (t0, t_end) = problem.t_span;
    let span = t_end - t0;

    let mut t = t0;
    let mut y = problem.initial_state.clone();
    let mut k1 = vec![0.0; n];
    f(t, &y, &mut k1);
    if k1.iter().any(|x| !x.is_finite()) {
        return Err(Error::StepFailure { t, h: 0.0 });
    }
    let mut h = initial_step(f, t, &y, &k1, rel_tol, abs_tol, span);

    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut ytmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];

    let beta = 0.04;
    let expo1 = 0.2 - beta * 0.75;
    let safe = 0.9;
    let mut facold: f64 = 1e-4;
    let mut steps = Vec::new();
    let mut rejected = 0usize;
    let mut last_rejected = false;

    for _ in 0..MAX_STEPS {
        if t >= t_end {
            break;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepFailure { t, h });
        }
        let last = t + 1.01 * h >= t_end;
        if last {
            h = t_end - t;
        }

        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &ytmp, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h, &y_new, &mut k7);
        for i in 0..n {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }

        let e = error_norm(&y, &y_new, &err, rel_tol, abs_tol);
        if !e.is_finite() {
            // field blew up inside the step; retry smaller
            h *= 0.1;
            rejected += 1;
            last_rejected = true;
            continue;
        }
        let fac11 = e.powf(expo1);
        if e <= 1.0 {
            let mut fac = fac11 / facold.powf(beta);
            fac = (fac / safe).clamp(0.1, 5.0);
            let mut h_new = h / fac;
            facold = e.max(1e-4);

            let ydiff: Vec<f64> = y_new.iter().zip(&y).map(|(a, b)| a - b).collect();
            let bspl: Vec<f64> = (0..n).map(|i| h * k1[i] - ydiff[i]).collect();
            let r4: Vec<f64> = (0..n).map(|i| ydiff[i] - h * k7[i] - bspl[i]).collect();
            let r5: Vec<f64> = (0..n)
                .map(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                .collect();
            steps.push(DenseStep { t, h, coeffs: [y.clone(), ydiff, bspl, r4, r5] });

            t = if last { t_end } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            h /= (fac11 / safe).min(5.0);
            rejected += 1;
            last_rejected = true;
        }
    }
    if t < t_end {
        return Err(Error::StepFailure { t, h });
    }
    Ok(Trajectory { t_span: problem.t_span, steps, final_state: y, rejected })
}

/// Convenience wrapper: integrate and return the state at the end of the span.
pub fn integrate_to_end(
    field: &VectorField,
    initial_state: Vec<f64>,
    t_span: (f64, f64),
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Vec<f64>> {
    let problem = OdeProblem::new(field, initial_state, t_span)?;
    Ok(integrate(&problem, rel_tol, abs_tol)?.final_state)
}
