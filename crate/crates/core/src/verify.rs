//! Randomized verification metrics shared by the self-test and the
//! acceptance suite. Every metric is a pure function of its inputs and the
//! RNG state, so a fixed seed reproduces the report exactly.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alpha_trig::{even_power, pi_alpha, pi_alpha_from_ode, table};
use crate::error::{Error, Result};
use crate::grushin::{
    grushin_conj_grad_on_locus, grushin_dexp, grushin_exp, grushin_exp_numeric_path, grushin_exp_point, grushin_jacobi,
    grushin_jacobi_numeric, grushin_kernel_direction, GrushinBase, GrushinCovector,
};
use crate::jacobi::JacobiCoords;
use crate::numeric::diff::fd_jacobian;
use crate::numeric::linalg::{dot, norm, normalized, rank_nullspace};
use crate::singularity::{
    analyze_covector, exp_jacobian, fold_witness_with, scan_ray_with, second_order_along, ConjugateRecord,
    GrushinAdapter, SingularityClass, Sl2Adapter, Stratum, StructureAdapter, Su2Adapter, Tolerances,
};
use crate::sl2::{sl2_exp, sl2_exp_numeric_path, sl2_jacobi, sl2_jacobi_numeric, Sl2Covector};
use crate::su2::{su2_exp, su2_exp_numeric_path, su2_jacobi, su2_jacobi_numeric, Su2Covector};

pub const GRUSHIN_ALPHAS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

/// Conjugate radii on every SU(2) ray up to 20: zeros of `sin(s/2)` and of
/// `s cos(s/2) - 2 sin(s/2)`.
pub const SU2_RADII: [f64; 5] = [
    std::f64::consts::TAU,
    8.986818915818128,
    2.0 * std::f64::consts::TAU,
    15.450503673875414,
    3.0 * std::f64::consts::TAU,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Structure {
    Grushin,
    Su2,
    Sl2,
}

impl Structure {
    pub const ALL: [Structure; 3] = [Structure::Grushin, Structure::Su2, Structure::Sl2];

    pub fn label(self) -> &'static str {
        match self {
            Structure::Grushin => "grushin",
            Structure::Su2 => "su2",
            Structure::Sl2 => "sl2",
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let x = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Grushin base and covector with `H >= 0.05` and `|v0| >= 0.1`.
pub fn random_grushin(rng: &mut ChaCha8Rng) -> Result<(GrushinBase, GrushinCovector)> {
    loop {
        let alpha = GRUSHIN_ALPHAS[rng.gen_range(0..GRUSHIN_ALPHAS.len())];
        let x0 = rng.gen_range(-1.5..1.5);
        let base = GrushinBase::new(alpha, x0, rng.gen_range(-1.0..1.0))?;
        let cov = GrushinCovector::new(rng.gen_range(-3.0..3.0), signed(rng, 0.1, 4.0));
        if base.hamiltonian(cov) >= 0.05 {
            return Ok((base, cov));
        }
    }
}

pub fn random_su2(rng: &mut ChaCha8Rng) -> Su2Covector {
    Su2Covector::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0))
}

pub fn random_sl2(rng: &mut ChaCha8Rng) -> Sl2Covector {
    Sl2Covector::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-6.0..6.0))
}

/// `max |sin_α^{2α} + cos_α^2 - 1|` on `points` equally spaced times in one
/// period.
pub fn alpha_trig_identity_error(alpha: f64, points: usize) -> Result<f64> {
    let tab = table(alpha)?;
    let period = 2.0 * tab.pi_alpha();
    Ok((0..points)
        .map(|i| {
            let (s, c) = tab.sin_cos(period * i as f64 / points as f64);
            (even_power(s, alpha) + c * c - 1.0).abs()
        })
        .fold(0.0, f64::max))
}

/// `|π_α (quadrature) - π_α (ODE half period)|`.
pub fn pi_alpha_gap(alpha: f64) -> Result<f64> {
    Ok((pi_alpha(alpha)? - pi_alpha_from_ode(alpha)?).abs())
}

fn path_times(points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

/// Sup-norm position error of the closed-form geodesics against the
/// Hamiltonian ODE on `101` times in `[0, 1]`, maximized over `samples`
/// random covectors.
pub fn geodesic_oracle_error(structure: Structure, rng: &mut ChaCha8Rng, samples: usize) -> Result<f64> {
    let times = path_times(101);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let err = match structure {
            Structure::Grushin => {
                let (base, cov) = random_grushin(rng)?;
                let path = grushin_exp_numeric_path(&base, cov, &times)?;
                times
                    .iter()
                    .zip(path)
                    .map(|(&t, n)| {
                        let c = grushin_exp(&base, cov, t);
                        (c.x - n.x).abs().max((c.y - n.y).abs())
                    })
                    .fold(0.0, f64::max)
            }
            Structure::Su2 => {
                let cov = random_su2(rng);
                let path = su2_exp_numeric_path(cov, &times)?;
                times
                    .iter()
                    .zip(path)
                    .map(|(&t, n)| {
                        let c = su2_exp(cov, t).point.to_array();
                        c.iter().zip(n.point.to_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                    })
                    .fold(0.0, f64::max)
            }
            Structure::Sl2 => {
                let cov = random_sl2(rng);
                let path = sl2_exp_numeric_path(cov, &times)?;
                times
                    .iter()
                    .zip(path)
                    .map(|(&t, n)| {
                        let c = sl2_exp(cov, t).matrix.to_array();
                        c.iter().zip(n.matrix.to_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                    })
                    .fold(0.0, f64::max)
            }
        };
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Relative Frobenius error between the analytic Grushin `d exp` and a
/// central-difference Jacobian, maximized over `samples` covectors.
pub fn dexp_fd_error(rng: &mut ChaCha8Rng, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (base, cov) = random_grushin(rng)?;
        let analytic = grushin_dexp(&base, cov)?;
        let h = 1e-6 * norm(&cov.to_vec()).max(1.0);
        let fd = fd_jacobian(|c| grushin_exp_point(&base, GrushinCovector::from_slice(c)).to_vec(), &cov.to_vec(), h);
        worst = worst.max(analytic.max_abs_diff(&fd) / analytic.norm());
    }
    Ok(worst)
}

/// A conjugate record together with the adapter that produced it.
#[derive(Clone)]
pub struct Sample {
    pub adapter: Arc<dyn StructureAdapter>,
    pub record: ConjugateRecord,
}

impl Sample {
    pub fn structure_name(&self) -> &'static str {
        self.adapter.name()
    }
}

fn random_grushin_adapter(rng: &mut ChaCha8Rng) -> Result<Arc<dyn StructureAdapter>> {
    let alpha = GRUSHIN_ALPHAS[rng.gen_range(0..GRUSHIN_ALPHAS.len())];
    let x0 = signed(rng, 0.2, 1.5);
    Ok(Arc::new(GrushinAdapter::new(GrushinBase::new(alpha, x0, 0.0)?)))
}

/// Random ray with conjugate covectors, the adapter and a suitable `s_max`.
fn random_conjugate_ray(
    structure: Structure,
    rng: &mut ChaCha8Rng,
) -> Result<(Arc<dyn StructureAdapter>, Vec<f64>, f64)> {
    Ok(match structure {
        Structure::Grushin => {
            let adapter = random_grushin_adapter(rng)?;
            (adapter, vec![rng.gen_range(-1.0..1.0), signed(rng, 0.3, 1.5)], 12.0)
        }
        Structure::Su2 => {
            let d = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            (Arc::new(Su2Adapter), d, 20.0)
        }
        Structure::Sl2 => {
            let (u, v) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let w = signed(rng, 1.2, 3.0);
            let d = vec![u, v, w];
            let root_r = (w * w - u * u - v * v).sqrt() / norm(&d);
            (Arc::new(Sl2Adapter), d, 17.0 / root_r)
        }
    })
}

/// At least `count` conjugate records from random rays, at most two per ray.
pub fn conjugate_samples(
    structure: Structure,
    rng: &mut ChaCha8Rng,
    count: usize,
    tol: &Tolerances,
) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    let mut rays = 0;
    while out.len() < count {
        rays += 1;
        if rays > 50 * count + 50 {
            return Err(Error::InvalidInput(format!(
                "could not collect {count} {} conjugate samples",
                structure.label()
            )));
        }
        let (adapter, dir, s_max) = random_conjugate_ray(structure, rng)?;
        let recs = scan_ray_with(adapter.as_ref(), &dir, s_max, tol)?;
        let skip = if recs.len() > 2 { rng.gen_range(0..recs.len() - 1) } else { 0 };
        for record in recs.into_iter().skip(skip).take(2) {
            if out.len() < count {
                out.push(Sample { adapter: adapter.clone(), record });
            }
        }
    }
    Ok(out)
}

/// Number of samples whose FD nullity differs from one.
pub fn nullity_mismatches(samples: &[Sample]) -> usize {
    samples.iter().filter(|s| s.record.order != 1).count()
}

/// Random covector of `structure` at relative distance at least `margin`
/// from the conjugate locus.
fn random_regular(
    structure: Structure,
    rng: &mut ChaCha8Rng,
    margin: f64,
) -> Result<(Arc<dyn StructureAdapter>, Vec<f64>)> {
    loop {
        match structure {
            Structure::Grushin => {
                let (base, cov) = random_grushin(rng)?;
                let adapter = GrushinAdapter::new(base);
                let c = cov.to_vec();
                let f = adapter.conj_value(Stratum::Other, &c).unwrap_or(f64::INFINITY);
                let s = grushin_exp(&adapter.base, cov, 1.0);
                let scale = (cov.u0.abs() + adapter.base.x0.abs()) * (s.u.abs() + s.x.abs());
                if f.abs() >= margin * scale.max(1e-300) {
                    return Ok((Arc::new(adapter), c));
                }
            }
            Structure::Su2 => {
                let c = random_su2(rng).to_vec();
                let rho = norm(&c);
                let f0 = Su2Adapter.conj_value(Stratum::C0, &c);
                let f1 = Su2Adapter.conj_value(Stratum::C1, &c);
                if let (Some(f0), Some(f1)) = (f0, f1) {
                    if f0.abs() / (rho + 2.0) >= margin && f1.abs() >= margin {
                        return Ok((Arc::new(Su2Adapter), c));
                    }
                }
            }
            Structure::Sl2 => {
                let cov = random_sl2(rng);
                let c = cov.to_vec();
                let r = cov.r();
                let far = match (Sl2Adapter.conj_value(Stratum::C0, &c), Sl2Adapter.conj_value(Stratum::C1, &c)) {
                    (Some(f0), Some(f1)) => r <= 0.0 || (f0.abs() / (r.sqrt() + 2.0) >= margin && f1.abs() >= margin),
                    _ => false,
                };
                if far {
                    return Ok((Arc::new(Sl2Adapter), c));
                }
            }
        }
    }
}

/// Smallest `sigma_min / sigma_max` of the FD Jacobian over `samples` random
/// covectors away from the conjugate locus.
pub fn regular_min_ratio(structure: Structure, rng: &mut ChaCha8Rng, samples: usize) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let (adapter, c) = random_regular(structure, rng, 0.1)?;
        let r = rank_nullspace(&exp_jacobian(adapter.as_ref(), &c), 1e-12)?;
        worst = worst.min(r.smallest() / r.largest());
    }
    Ok(worst)
}

/// Largest `|J k| / |J|` with `k` the unit analytic kernel and `J` the FD
/// Jacobian, over all samples.
pub fn kernel_annihilation(samples: &[Sample]) -> f64 {
    samples
        .iter()
        .map(|s| {
            let Some(k) = s.adapter.kernel(&s.record.covector) else {
                return f64::INFINITY;
            };
            let j = exp_jacobian(s.adapter.as_ref(), &s.record.covector);
            norm(&j.mul_vec(&normalized(&k))) / j.norm()
        })
        .fold(0.0, f64::max)
}

/// Largest deviation of the SU(2) conjugate radii from [`SU2_RADII`] over the
/// given rays with `s_max = 20`; infinite if a ray has the wrong count.
pub fn su2_radii_error(directions: &[Vec<f64>], tol: &Tolerances) -> Result<f64> {
    let mut worst = 0.0f64;
    for d in directions {
        let recs = scan_ray_with(&Su2Adapter, d, 20.0, tol)?;
        if recs.len() != SU2_RADII.len() {
            return Ok(f64::INFINITY);
        }
        for (r, e) in recs.iter().zip(SU2_RADII) {
            worst = worst.max((r.s - e).abs());
        }
    }
    Ok(worst)
}

/// Records found on rays that can carry no conjugate covector: SL(2) rays
/// with `r <= 0` and Grushin rays with `v0 = 0`.
pub fn forbidden_ray_records(rng: &mut ChaCha8Rng, rays: usize, tol: &Tolerances) -> Result<usize> {
    let mut found = 0;
    for _ in 0..rays {
        let (u, v): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let w = rng.gen_range(-1.0..1.0) * (u * u + v * v).sqrt();
        found += scan_ray_with(&Sl2Adapter, &[u, v, w], 60.0, tol)?.len();
        let adapter =
            GrushinAdapter::new(GrushinBase::new(GRUSHIN_ALPHAS[rng.gen_range(0..4)], rng.gen_range(-1.5..1.5), 0.0)?);
        found += scan_ray_with(&adapter, &[signed(rng, 0.1, 1.0), 0.0], 20.0, tol)?.len();
    }
    Ok(found)
}

/// A record together with the class it must receive.
#[derive(Clone)]
pub struct Expected {
    pub sample: Sample,
    pub expected: SingularityClass,
    pub label: String,
}

fn expected_record(
    adapter: Arc<dyn StructureAdapter>,
    cov: Vec<f64>,
    stratum: Stratum,
    expected: SingularityClass,
    label: String,
    tol: &Tolerances,
) -> Expected {
    let record = analyze_covector(adapter.as_ref(), &cov, stratum, tol);
    Expected { sample: Sample { adapter, record }, expected, label }
}

/// Thirty covectors with known classes: ten per structure.
///
/// SU(2) and SL(2) points are placed on a chosen stratum by radius, with
/// `|w0|` bounded away from 0 on SU(2) C0. Grushin points come from scans at
/// `x0 != 0`, keeping those with `u0 != 0` and a transversal pairing of the
/// kernel with the displayed locus gradient.
pub fn classification_sample(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Vec<Expected>> {
    let mut out = Vec::new();
    let c0 = [SU2_RADII[1], SU2_RADII[3]];
    let c1 = [SU2_RADII[0], SU2_RADII[2], SU2_RADII[4]];
    for i in 0..10 {
        let fold = i % 2 == 0;
        let (u, v) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let w = signed(rng, 0.2, 1.0);
        let d = normalized(&[u, v, w]);
        let radius = if fold { c0[i / 2 % 2] } else { c1[i / 2 % 3] };
        let cov: Vec<f64> = d.iter().map(|x| x * radius).collect();
        let (stratum, class) =
            if fold { (Stratum::C0, SingularityClass::Fold) } else { (Stratum::C1, SingularityClass::Tangential) };
        out.push(expected_record(
            Arc::new(Su2Adapter),
            cov,
            stratum,
            class,
            format!("su2 {} |λ|={radius:.6}", stratum.label()),
            tol,
        ));
    }
    for i in 0..10 {
        let fold = i % 2 == 0;
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let h = rng.gen_range(0.3..1.5);
        let root_r = if fold { c0[i / 2 % 2] } else { c1[i / 2 % 2] };
        let w = (root_r * root_r + h * h).sqrt() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let cov = vec![h * theta.cos(), h * theta.sin(), w];
        let (stratum, class) =
            if fold { (Stratum::C0, SingularityClass::Fold) } else { (Stratum::C1, SingularityClass::Tangential) };
        out.push(expected_record(
            Arc::new(Sl2Adapter),
            cov,
            stratum,
            class,
            format!("sl2 {} √r={root_r:.6}", stratum.label()),
            tol,
        ));
    }
    let mut grushin = 0;
    let mut attempts = 0;
    while grushin < 10 {
        attempts += 1;
        if attempts > 500 {
            return Err(Error::InvalidInput("could not collect Grushin fold samples".into()));
        }
        let alpha = GRUSHIN_ALPHAS[rng.gen_range(0..4)];
        let x0 = signed(rng, 0.2, 1.5);
        let base = GrushinBase::new(alpha, x0, 0.0)?;
        let adapter = Arc::new(GrushinAdapter::new(base.clone()));
        let dir = [signed(rng, 0.1, 1.0), signed(rng, 0.3, 1.5)];
        let recs = scan_ray_with(adapter.as_ref(), &dir, 12.0, tol)?;
        let Some(rec) = recs.first() else { continue };
        let cov = GrushinCovector::from_slice(&rec.covector);
        let Ok((gu, gv)) = grushin_conj_grad_on_locus(&base, cov) else { continue };
        let k = grushin_kernel_direction(&base, cov);
        let ratio = dot(&[gu, gv], &k).abs() / (gu.hypot(gv) * norm(&k));
        if cov.u0 == 0.0 || ratio < 1e-3 {
            continue;
        }
        grushin += 1;
        out.push(Expected {
            sample: Sample { adapter, record: rec.clone() },
            expected: SingularityClass::Fold,
            label: format!("grushin α={alpha} x0={x0:.4} s={:.6}", rec.s),
        });
    }
    Ok(out)
}

/// Worst image distance and smallest preimage separation of the fold
/// witnesses at every expected fold; `None` if a witness search failed.
pub fn witness_extremes(sample: &[Expected], delta: f64, tol: &Tolerances) -> Option<(f64, f64)> {
    let mut dist = 0.0f64;
    let mut sep = f64::INFINITY;
    for e in sample.iter().filter(|e| e.expected == SingularityClass::Fold) {
        let w = fold_witness_with(e.sample.adapter.as_ref(), &e.sample.record, delta, tol).ok()?;
        dist = dist.max(w.image_distance);
        sep = sep.min(w.separation);
    }
    Some((dist, sep))
}

/// C1 covectors of SU(2) or SL(2): `(smallest second-order value, largest
/// relative change under k -> -k)`.
pub fn second_order_c1(structure: Structure, rng: &mut ChaCha8Rng, count: usize) -> Result<(f64, f64)> {
    let mut smallest = f64::INFINITY;
    let mut flip = 0.0f64;
    for i in 0..count {
        let radius = SU2_RADII[[0, 2, 4][i % 3]];
        let (adapter, cov): (Arc<dyn StructureAdapter>, Vec<f64>) = match structure {
            Structure::Su2 => {
                let d = normalized(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
                (Arc::new(Su2Adapter), d.iter().map(|x| x * radius).collect())
            }
            Structure::Sl2 => {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                let h = rng.gen_range(0.3..1.5);
                let w = (radius * radius + h * h).sqrt();
                (Arc::new(Sl2Adapter), vec![h * theta.cos(), h * theta.sin(), w])
            }
            Structure::Grushin => return Err(Error::InvalidInput("Grushin has no C1 stratum".into())),
        };
        let k = normalized(&adapter.kernel(&cov).ok_or(Error::DegenerateCovector("no kernel"))?);
        let neg: Vec<f64> = k.iter().map(|x| -x).collect();
        let a = second_order_along(adapter.as_ref(), &cov, &k, 1);
        let b = second_order_along(adapter.as_ref(), &cov, &neg, 1);
        smallest = smallest.min(a);
        flip = flip.max((a - b).abs() / a.max(f64::MIN_POSITIVE));
    }
    Ok((smallest, flip))
}

/// Largest difference between closed-form and integrated Jacobi fields at
/// `t = 1` over `samples` random covectors and initial data.
pub fn jacobi_residual(structure: Structure, rng: &mut ChaCha8Rng, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let err = match structure {
            Structure::Grushin => {
                let (base, cov) = random_grushin(rng)?;
                let init = JacobiCoords::from_slice(&(0..4).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
                grushin_jacobi(&base, cov, &init, 1.0)?.max_abs_diff(&grushin_jacobi_numeric(&base, cov, &init, 1.0)?)
            }
            Structure::Su2 => {
                let cov = random_su2(rng);
                let init = JacobiCoords::from_slice(&(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
                su2_jacobi(cov, &init, 1.0)?.max_abs_diff(&su2_jacobi_numeric(cov, &init, 1.0)?)
            }
            Structure::Sl2 => {
                let cov = random_sl2(rng);
                let init = JacobiCoords::from_slice(&(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
                sl2_jacobi(cov, &init, 1.0)?.max_abs_diff(&sl2_jacobi_numeric(cov, &init, 1.0)?)
            }
        };
        worst = worst.max(err);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, comparison: Comparison::AtMost, passed: value <= threshold }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, comparison: Comparison::AtLeast, passed: value >= threshold }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: format!("{} ({err})", name.into()),
            value: f64::NAN,
            threshold: f64::NAN,
            comparison: Comparison::AtMost,
            passed: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfTestConfig {
    pub seed: u64,
    /// Replaces every upper-bound threshold when set.
    pub tolerance: Option<f64>,
}

impl Default for SelfTestConfig {
    fn default() -> Self {
        Self { seed: 42, tolerance: None }
    }
}

/// Reduced-size run of every metric.
pub fn run_selftest(cfg: &SelfTestConfig) -> Vec<Check> {
    let tol = Tolerances::default();
    let mut rng = rng(cfg.seed);
    let bound = |t: f64| cfg.tolerance.unwrap_or(t);
    let mut checks = Vec::new();
    let mut push = |name: &str, r: Result<Check>| checks.push(r.unwrap_or_else(|e| Check::failed(name, &e)));

    for alpha in GRUSHIN_ALPHAS {
        let name = format!("alpha_trig identity α={alpha}");
        push(&name.clone(), alpha_trig_identity_error(alpha, 1000).map(|v| Check::at_most(name, v, bound(1e-10))));
        let name = format!("π_α quadrature vs ODE α={alpha}");
        push(&name.clone(), pi_alpha_gap(alpha).map(|v| Check::at_most(name, v, bound(1e-7))));
    }
    for s in Structure::ALL {
        let name = format!("{} geodesic vs ODE", s.label());
        push(&name.clone(), geodesic_oracle_error(s, &mut rng, 10).map(|v| Check::at_most(name, v, bound(1e-8))));
    }
    push(
        "grushin d exp vs FD",
        dexp_fd_error(&mut rng, 10).map(|v| Check::at_most("grushin d exp vs FD", v, bound(1e-5))),
    );
    for s in Structure::ALL {
        let samples = conjugate_samples(s, &mut rng, 4, &tol);
        let name = format!("{} conjugate nullity mismatches", s.label());
        push(
            &name.clone(),
            samples
                .as_ref()
                .map(|x| Check::at_most(name, nullity_mismatches(x) as f64, bound(0.0)))
                .map_err(Clone::clone),
        );
        let name = format!("{} kernel annihilation", s.label());
        push(
            &name.clone(),
            samples.as_ref().map(|x| Check::at_most(name, kernel_annihilation(x), bound(1e-6))).map_err(Clone::clone),
        );
        let name = format!("{} regular σmin/σmax", s.label());
        push(&name.clone(), regular_min_ratio(s, &mut rng, 10).map(|v| Check::at_least(name, v, 1e-3)));
    }
    let dirs: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    push("su2 radii", su2_radii_error(&dirs, &tol).map(|v| Check::at_most("su2 radii", v, bound(1e-6))));
    push(
        "forbidden ray records",
        forbidden_ray_records(&mut rng, 3, &tol).map(|n| Check::at_most("forbidden ray records", n as f64, bound(0.0))),
    );
    match classification_sample(&mut rng, &tol) {
        Ok(sample) => {
            let wrong = sample.iter().filter(|e| e.sample.record.class != e.expected).count();
            checks.push(Check::at_most("misclassifications", wrong as f64, bound(0.0)));
            match witness_extremes(&sample, 1e-3, &tol) {
                Some((d, sep)) => {
                    checks.push(Check::at_most("fold witness image distance", d, bound(1e-9)));
                    checks.push(Check::at_least("fold witness separation", sep, 1e-4));
                }
                None => checks.push(Check::failed("fold witness", &Error::WitnessNotFound("search failed".into()))),
            }
        }
        Err(e) => checks.push(Check::failed("classification sample", &e)),
    }
    for s in [Structure::Su2, Structure::Sl2] {
        match second_order_c1(s, &mut rng, 2) {
            Ok((v, flip)) => {
                checks.push(Check::at_least(format!("{} second-order value", s.label()), v, 1e-3));
                checks.push(Check::at_most(format!("{} second-order sign flip", s.label()), flip, bound(1e-4)));
            }
            Err(e) => checks.push(Check::failed(format!("{} second order", s.label()), &e)),
        }
    }
    for s in Structure::ALL {
        let name = format!("{} Jacobi closed form", s.label());
        let mut push = |r: Result<Check>| checks.push(r.unwrap_or_else(|e| Check::failed(name.clone(), &e)));
        push(jacobi_residual(s, &mut rng, 5).map(|v| Check::at_most(name.clone(), v, bound(1e-8))));
    }
    checks
}

/// Wall-clock seconds spent in `f`.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_and_is_deterministic() {
        let a = run_selftest(&SelfTestConfig::default());
        for c in &a {
            assert!(c.passed, "{c:?}");
        }
        let b = run_selftest(&SelfTestConfig::default());
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn injected_tolerance_fails() {
        let checks = run_selftest(&SelfTestConfig { seed: 7, tolerance: Some(1e-15) });
        assert!(checks.iter().any(|c| !c.passed));
    }
}
