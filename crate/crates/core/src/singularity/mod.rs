//! Conjugate-locus scanning and classification of the singularities of the
//! exponential map, for any structure exposed through [`StructureAdapter`].

mod adapters;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::diff::fd_jacobian;
use crate::numeric::linalg::{
    canonical_direction, dot, norm, normalized, rank_nullspace, solve, svd_values_vectors, Matrix,
};
use crate::numeric::roots::find_roots_detailed;

pub use adapters::{GrushinAdapter, Sl2Adapter, Su2Adapter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stratum {
    C0,
    C1,
    Other,
}

impl Stratum {
    pub fn label(self) -> &'static str {
        match self {
            Stratum::C0 => "C0",
            Stratum::C1 => "C1",
            Stratum::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingularityClass {
    NotSingular,
    Fold,
    Tangential,
    Undetermined,
}

impl SingularityClass {
    pub fn label(self) -> &'static str {
        match self {
            SingularityClass::NotSingular => "not_singular",
            SingularityClass::Fold => "fold",
            SingularityClass::Tangential => "tangential",
            SingularityClass::Undetermined => "undetermined",
        }
    }
}

/// Local coordinates on the target near a point: the ambient coordinates
/// with at most one of them removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chart {
    drop: Option<usize>,
}

impl Chart {
    pub fn identity() -> Self {
        Self { drop: None }
    }

    pub fn dropping(index: usize) -> Self {
        Self { drop: Some(index) }
    }

    pub fn apply(&self, ambient: &[f64]) -> Vec<f64> {
        match self.drop {
            None => ambient.to_vec(),
            Some(d) => ambient.iter().enumerate().filter(|&(i, _)| i != d).map(|(_, &x)| x).collect(),
        }
    }
}

/// What the scanner needs to know about a structure. Covectors are given in
/// fiber coordinates of `T*_q M` at the fixed base point.
pub trait StructureAdapter: Send + Sync {
    fn name(&self) -> &'static str;

    fn fiber_dim(&self) -> usize;

    /// Strata scanned for conjugate covectors.
    fn strata(&self) -> &'static [Stratum];

    /// Endpoint of the geodesic at `t = 1` in ambient coordinates.
    fn exp_ambient(&self, cov: &[f64]) -> Vec<f64>;

    /// A chart of the target that is valid near `ambient`.
    fn chart_at(&self, ambient: &[f64]) -> Chart;

    /// Value of the stratum function; `None` where conjugacy is impossible.
    fn conj_value(&self, stratum: Stratum, cov: &[f64]) -> Option<f64>;

    fn conj_grad(&self, stratum: Stratum, cov: &[f64]) -> Option<Vec<f64>>;

    /// Analytic kernel direction of `d exp`, not normalized.
    fn kernel(&self, cov: &[f64]) -> Option<Vec<f64>>;

    /// Stratum function values reported with a record.
    fn f_values(&self, cov: &[f64]) -> Vec<f64>;

    /// Endpoint `(x(1), p(1))` of the Jacobi fields with vertical initial
    /// data, as matrices acting on `p(0)`.
    fn vertical_jacobi(&self, _cov: &[f64]) -> Option<(Matrix, Matrix)> {
        None
    }

    fn exp_chart(&self, chart: Chart, cov: &[f64]) -> Vec<f64> {
        chart.apply(&self.exp_ambient(cov))
    }

    fn chart_for(&self, cov: &[f64]) -> Chart {
        self.chart_at(&self.exp_ambient(cov))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Samples per ray before bracketing.
    pub scan_points: usize,
    pub root_tol: f64,
    /// Relative singular-value cutoff for the FD Jacobian nullity.
    pub rank_tol: f64,
    /// `|<g, k>| / (|g| |k|)` above which a singularity is a fold.
    pub transversality_tol: f64,
    /// Second-order value above which a tangential singularity is certified.
    pub second_order_min: f64,
    /// Image distance accepted for a fold witness.
    pub witness_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            scan_points: 400,
            root_tol: 1e-10,
            rank_tol: 1e-6,
            transversality_tol: 1e-6,
            second_order_min: 1e-3,
            witness_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateRecord {
    /// Position along the scanned ray; `covector = s * direction`.
    pub s: f64,
    pub covector: Vec<f64>,
    pub stratum: Stratum,
    /// Nullity of the finite-difference Jacobian of `exp`.
    pub order: usize,
    /// Orthonormal basis of that null space.
    pub kernel_basis: Vec<Vec<f64>>,
    /// Unit analytic kernel vector, when the structure provides one.
    pub analytic_kernel: Option<Vec<f64>>,
    pub class: SingularityClass,
    pub f_values: Vec<f64>,
}

impl ConjugateRecord {
    /// Analytic kernel if available, else the first FD null vector.
    pub fn kernel(&self) -> Option<Vec<f64>> {
        self.analytic_kernel.clone().or_else(|| self.kernel_basis.first().cloned())
    }
}

fn fd_step(cov: &[f64]) -> f64 {
    1e-6 * norm(cov).max(1.0)
}

/// FD Jacobian of `exp` at `cov` in the chart adapted to its image.
pub fn exp_jacobian<A: StructureAdapter + ?Sized>(adapter: &A, cov: &[f64]) -> Matrix {
    let chart = adapter.chart_for(cov);
    fd_jacobian(|c| adapter.exp_chart(chart, c), cov, fd_step(cov))
}

/// Conjugate covectors on the ray `s -> s * direction`, `0 < s <= s_max`.
pub fn scan_ray<A: StructureAdapter + ?Sized>(
    adapter: &A,
    direction: &[f64],
    s_max: f64,
) -> Result<Vec<ConjugateRecord>> {
    scan_ray_with(adapter, direction, s_max, &Tolerances::default())
}

pub fn scan_ray_with<A: StructureAdapter + ?Sized>(
    adapter: &A,
    direction: &[f64],
    s_max: f64,
    tol: &Tolerances,
) -> Result<Vec<ConjugateRecord>> {
    if direction.len() != adapter.fiber_dim() {
        return Err(Error::InvalidInput(format!(
            "{} covectors have {} coordinates, got {}",
            adapter.name(),
            adapter.fiber_dim(),
            direction.len()
        )));
    }
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::InvalidInput("s_max must be positive".into()));
    }
    let n = norm(direction);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidInput("direction must be nonzero".into()));
    }
    let dir: Vec<f64> = direction.iter().map(|x| x / n).collect();
    let at = |s: f64| dir.iter().map(|x| s * x).collect::<Vec<f64>>();

    let mut records = Vec::new();
    for &stratum in adapter.strata() {
        if adapter.conj_value(stratum, &at(s_max)).is_none() {
            continue;
        }
        let g = |s: f64| adapter.conj_value(stratum, &at(s)).unwrap_or(f64::NAN);
        for root in find_roots_detailed(g, s_max * 1e-6, s_max, tol.scan_points, tol.root_tol) {
            records.push(build_record(adapter, root.x, at(root.x), stratum, tol));
        }
    }
    records.sort_by(|a, b| a.s.total_cmp(&b.s));
    Ok(records)
}

/// Record for a single covector assumed to lie on `stratum`, with
/// `s = |covector|`.
pub fn analyze_covector<A: StructureAdapter + ?Sized>(
    adapter: &A,
    covector: &[f64],
    stratum: Stratum,
    tol: &Tolerances,
) -> ConjugateRecord {
    build_record(adapter, norm(covector), covector.to_vec(), stratum, tol)
}

fn build_record<A: StructureAdapter + ?Sized>(
    adapter: &A,
    s: f64,
    covector: Vec<f64>,
    stratum: Stratum,
    tol: &Tolerances,
) -> ConjugateRecord {
    let jac = exp_jacobian(adapter, &covector);
    let kernel_basis = match rank_nullspace(&jac, tol.rank_tol) {
        Ok(r) => r.nullspace_basis.iter().map(|v| canonical_direction(v)).collect(),
        Err(_) => Vec::new(),
    };
    let analytic_kernel =
        adapter.kernel(&covector).filter(|k| norm(k) > 0.0).map(|k| canonical_direction(&normalized(&k)));
    let mut record = ConjugateRecord {
        s,
        f_values: adapter.f_values(&covector),
        covector,
        stratum,
        order: kernel_basis.len(),
        kernel_basis,
        analytic_kernel,
        class: SingularityClass::Undetermined,
    };
    record.class = classify_with(adapter, &record, tol);
    record
}

fn pairing_ratio<A: StructureAdapter + ?Sized>(adapter: &A, stratum: Stratum, cov: &[f64], k: &[f64]) -> Option<f64> {
    let g = adapter.conj_grad(stratum, cov)?;
    let (ng, nk) = (norm(&g), norm(k));
    if ng == 0.0 || nk == 0.0 {
        return None;
    }
    Some(dot(&g, k).abs() / (ng * nk))
}

/// Moves `cov` back onto the zero set of the stratum function along its
/// gradient.
fn project_to_stratum<A: StructureAdapter + ?Sized>(adapter: &A, stratum: Stratum, cov: &[f64]) -> Option<Vec<f64>> {
    let mut c = cov.to_vec();
    for _ in 0..50 {
        let f = adapter.conj_value(stratum, &c)?;
        let g = adapter.conj_grad(stratum, &c)?;
        let gg = dot(&g, &g);
        if gg == 0.0 {
            return None;
        }
        let step = f / gg;
        c.iter_mut().zip(&g).for_each(|(x, gi)| *x -= step * gi);
        if (step * gg.sqrt()).abs() <= 1e-14 * norm(&c).max(1.0) {
            return Some(c);
        }
    }
    None
}

/// Kernel transversality at a record.
///
/// A fold needs the kernel to be transversal to the stratum. When the pairing
/// vanishes at the record, the tangency must persist at nearby points of the
/// same stratum and the second-order value must exceed its threshold to
/// certify the tangential normal form; an isolated tangency is left
/// undetermined.
pub fn classify<A: StructureAdapter + ?Sized>(adapter: &A, record: &ConjugateRecord) -> SingularityClass {
    classify_with(adapter, record, &Tolerances::default())
}

pub fn classify_with<A: StructureAdapter + ?Sized>(
    adapter: &A,
    record: &ConjugateRecord,
    tol: &Tolerances,
) -> SingularityClass {
    match record.order {
        0 => return SingularityClass::NotSingular,
        1 => {}
        _ => return SingularityClass::Undetermined,
    }
    let Some(k) = record.kernel() else {
        return SingularityClass::Undetermined;
    };
    let Some(ratio) = pairing_ratio(adapter, record.stratum, &record.covector, &k) else {
        return SingularityClass::Undetermined;
    };
    if ratio > tol.transversality_tol {
        return SingularityClass::Fold;
    }
    if !tangency_persists(adapter, record, tol) {
        return SingularityClass::Undetermined;
    }
    if second_order_transversality(adapter, record) > tol.second_order_min {
        SingularityClass::Tangential
    } else {
        SingularityClass::Undetermined
    }
}

fn tangency_persists<A: StructureAdapter + ?Sized>(adapter: &A, record: &ConjugateRecord, tol: &Tolerances) -> bool {
    let cov = &record.covector;
    let Some(g) = adapter.conj_grad(record.stratum, cov) else {
        return false;
    };
    let normal = Matrix::from_rows(&[g]);
    let Ok(tangent) = rank_nullspace(&normal, 1e-12) else {
        return false;
    };
    let offset = 1e-3 * norm(cov).max(1.0);
    for t in &tangent.nullspace_basis {
        for sign in [1.0, -1.0] {
            let moved: Vec<f64> = cov.iter().zip(t).map(|(c, ti)| c + sign * offset * ti).collect();
            let Some(near) = project_to_stratum(adapter, record.stratum, &moved) else {
                return false;
            };
            let Some(k) = adapter.kernel(&near) else {
                return false;
            };
            match pairing_ratio(adapter, record.stratum, &near, &k) {
                Some(r) if r <= tol.transversality_tol => {}
                _ => return false,
            }
        }
    }
    true
}

/// Mixed derivative `∂²/∂s∂r exp((1 + s)(λ0 + r k))` at `(0, 0)`, projected
/// onto the complement of the image of `d exp`, in the chart at the image of
/// `λ0`. Returns 0 when `d exp` has full rank.
pub fn second_order_transversality<A: StructureAdapter + ?Sized>(adapter: &A, record: &ConjugateRecord) -> f64 {
    let Some(k) = record.kernel() else {
        return 0.0;
    };
    second_order_along(adapter, &record.covector, &normalized(&k), record.order)
}

/// [`second_order_transversality`] for an explicit kernel vector `k`.
pub fn second_order_along<A: StructureAdapter + ?Sized>(adapter: &A, cov: &[f64], k: &[f64], order: usize) -> f64 {
    if order == 0 {
        return 0.0;
    }
    let chart = adapter.chart_for(cov);
    let jac = exp_jacobian(adapter, cov);
    let (_, u) = svd_values_vectors(&jac.transpose());
    let m = u.cols();
    let co_image: Vec<Vec<f64>> = (m.saturating_sub(order)..m).map(|j| u.column(j)).collect();

    let h = 1e-4 * norm(cov).max(1.0);
    let hs = 1e-4;
    let eval = |s: f64, r: f64| {
        let c: Vec<f64> = cov.iter().zip(k).map(|(l, ki)| (1.0 + s) * (l + r * ki)).collect();
        adapter.exp_chart(chart, &c)
    };
    let (pp, pm, mp, mm) = (eval(hs, h), eval(hs, -h), eval(-hs, h), eval(-hs, -h));
    let d: Vec<f64> = (0..pp.len()).map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * hs * h)).collect();
    co_image.iter().map(|n| dot(n, &d).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldWitness {
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub image_distance: f64,
    pub separation: f64,
}

/// Two distinct covectors within `delta` of a fold covector with the same
/// image under `exp`.
///
/// `λ1 = λ0 + a k` is fixed and all fiber coordinates of `λ2` are solved for
/// by damped Newton, starting from the reflection `λ0 - a k`.
pub fn fold_witness<A: StructureAdapter + ?Sized>(
    adapter: &A,
    record: &ConjugateRecord,
    delta: f64,
) -> Result<FoldWitness> {
    fold_witness_with(adapter, record, delta, &Tolerances::default())
}

pub fn fold_witness_with<A: StructureAdapter + ?Sized>(
    adapter: &A,
    record: &ConjugateRecord,
    delta: f64,
    tol: &Tolerances,
) -> Result<FoldWitness> {
    if record.class != SingularityClass::Fold {
        return Err(Error::Precondition(format!("fold witness needs a fold record, got {}", record.class.label())));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidInput("delta must be positive".into()));
    }
    let k = normalized(&record.kernel().ok_or(Error::Precondition("record has no kernel".into()))?);
    let l0 = &record.covector;
    let chart = adapter.chart_for(l0);
    let e = |c: &[f64]| adapter.exp_chart(chart, c);
    let h = 1e-7 * norm(l0).max(1.0);

    for factor in [0.4, 0.3, 0.2, 0.15] {
        let a = factor * delta;
        let l1: Vec<f64> = l0.iter().zip(&k).map(|(x, ki)| x + a * ki).collect();
        let target = e(&l1);
        let mut l2: Vec<f64> = l0.iter().zip(&k).map(|(x, ki)| x - a * ki).collect();
        let residual = |c: &[f64]| e(c).iter().zip(&target).map(|(x, y)| x - y).collect::<Vec<f64>>();
        let mut r = residual(&l2);
        for _ in 0..60 {
            if norm(&r) <= 1e-14 {
                break;
            }
            let jac = fd_jacobian(e, &l2, h);
            let Ok(step) = solve(&jac, &r.iter().map(|x| -x).collect::<Vec<f64>>()) else {
                break;
            };
            let mut damping = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial: Vec<f64> = l2.iter().zip(&step).map(|(x, s)| x + damping * s).collect();
                let rt = residual(&trial);
                if norm(&rt) < norm(&r) {
                    l2 = trial;
                    r = rt;
                    improved = true;
                    break;
                }
                damping *= 0.5;
            }
            if !improved {
                break;
            }
        }
        let image_distance = norm(&r);
        let separation = norm(&l1.iter().zip(&l2).map(|(x, y)| x - y).collect::<Vec<f64>>());
        let offset = norm(&l2.iter().zip(l0).map(|(x, y)| x - y).collect::<Vec<f64>>());
        if image_distance <= tol.witness_tol && separation >= 0.25 * delta && offset <= delta {
            return Ok(FoldWitness { lambda1: l1, lambda2: l2, image_distance, separation });
        }
    }
    Err(Error::WitnessNotFound(format!(
        "{} at s = {}: Newton failed for every step in the ladder",
        adapter.name(),
        record.s
    )))
}

/// Checks that `p(1)` of the kernel Jacobi datum is independent of the image
/// of `d exp`, i.e. that `p(0) -> p(1)` is injective modulo that image.
pub fn regularity_isomorphism_check<A: StructureAdapter + ?Sized>(adapter: &A, record: &ConjugateRecord) -> bool {
    let Some((m, p)) = adapter.vertical_jacobi(&record.covector) else {
        return false;
    };
    let (sigma, v) = svd_values_vectors(&m);
    let (_, u) = svd_values_vectors(&m.transpose());
    let n = m.cols();
    let largest = sigma.first().copied().unwrap_or(0.0);
    let order = record.order.max(1);
    if largest == 0.0 || sigma[n - order] > 1e-6 * largest {
        return false;
    }
    (n - order..n).all(|j| {
        let p1 = p.mul_vec(&v.column(j));
        let co: Vec<Vec<f64>> = (n - order..n).map(|i| u.column(i)).collect();
        let proj = co.iter().map(|c| dot(c, &p1).powi(2)).sum::<f64>().sqrt();
        proj > 1e-6 * norm(&p1).max(f64::MIN_POSITIVE)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grushin::GrushinBase;
    use crate::numeric::linalg::direction_mismatch;
    use std::f64::consts::PI;

    const SU2_RADII: [f64; 5] = [2.0 * PI, 8.986818915818128, 4.0 * PI, 15.450503673875414, 6.0 * PI];

    fn grushin(alpha: f64, x0: f64) -> GrushinAdapter {
        GrushinAdapter::new(GrushinBase::new(alpha, x0, 0.0).unwrap())
    }

    fn record_at<A: StructureAdapter>(a: &A, cov: &[f64], stratum: Stratum) -> ConjugateRecord {
        analyze_covector(a, cov, stratum, &Tolerances::default())
    }

    #[test]
    fn su2_radii_on_rays() {
        for dir in [[1.0, 0.0, 0.0], [0.3, -0.2, 0.9], [1.0, 0.0, 0.5], [-2.0, 1.0, -0.1]] {
            let recs = scan_ray(&Su2Adapter, &dir, 20.0).unwrap();
            assert_eq!(recs.len(), 5, "{dir:?}");
            for (r, expected) in recs.iter().zip(SU2_RADII) {
                assert!((r.s - expected).abs() < 1e-8, "{} vs {expected}", r.s);
                assert_eq!(r.order, 1);
            }
            let strata: Vec<Stratum> = recs.iter().map(|r| r.stratum).collect();
            assert_eq!(strata, [Stratum::C1, Stratum::C0, Stratum::C1, Stratum::C0, Stratum::C1]);
        }
    }

    #[test]
    fn empty_scans() {
        assert!(scan_ray(&Sl2Adapter, &[1.0, 0.0, 0.5], 20.0).unwrap().is_empty());
        assert!(scan_ray(&Sl2Adapter, &[1.0, 1.0, 0.0], 50.0).unwrap().is_empty());
        assert!(scan_ray(&grushin(1.0, 0.0), &[1.0, 0.0], 20.0).unwrap().is_empty());
        assert!(scan_ray(&grushin(2.0, 0.5), &[-1.0, 0.0], 20.0).unwrap().is_empty());
    }

    #[test]
    fn invalid_scans() {
        assert!(scan_ray(&Su2Adapter, &[0.0, 0.0, 0.0], 20.0).is_err());
        assert!(scan_ray(&Su2Adapter, &[1.0, 0.0], 20.0).is_err());
        assert!(scan_ray(&Su2Adapter, &[1.0, 0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn su2_classes() {
        let recs = scan_ray(&Su2Adapter, &[0.3, -0.2, 0.9], 20.0).unwrap();
        for r in &recs {
            let expected = match r.stratum {
                Stratum::C0 => SingularityClass::Fold,
                _ => SingularityClass::Tangential,
            };
            assert_eq!(r.class, expected, "{r:?}");
        }
        // C0 with w0 = 0 is an isolated tangency
        let recs = scan_ray(&Su2Adapter, &[1.0, 0.0, 0.0], 10.0).unwrap();
        let c0 = recs.iter().find(|r| r.stratum == Stratum::C0).unwrap();
        assert_eq!(c0.class, SingularityClass::Undetermined);
    }

    #[test]
    fn sl2_classes_and_records() {
        let recs = scan_ray(&Sl2Adapter, &[0.2, 0.1, 1.0], 60.0).unwrap();
        assert!(recs.len() >= 3);
        for r in &recs {
            assert_eq!(r.order, 1);
            let expected = match r.stratum {
                Stratum::C0 => SingularityClass::Fold,
                _ => SingularityClass::Tangential,
            };
            assert_eq!(r.class, expected, "{r:?}");
            let k = r.analytic_kernel.as_ref().unwrap();
            assert!(direction_mismatch(k, &r.kernel_basis[0]) < 1e-5);
        }
    }

    #[test]
    fn grushin_symmetric_point_is_not_generic() {
        // u0 = 0: kernel is ∂u and the locus gradient is ∂v
        let a = grushin(1.0, 1.0);
        let rec = record_at(&a, &[0.0, PI], Stratum::Other);
        assert_eq!(rec.order, 1);
        assert_eq!(rec.class, SingularityClass::Undetermined);
        assert!(matches!(fold_witness(&a, &rec, 1e-3), Err(Error::Precondition(_))));
        assert!(regularity_isomorphism_check(&a, &rec));
        // exp is still not injective there
        let forced = ConjugateRecord { class: SingularityClass::Fold, ..rec };
        let w = fold_witness(&a, &forced, 1e-3).unwrap();
        assert!(w.image_distance <= 1e-9 && w.separation >= 2.5e-4);
    }

    #[test]
    fn grushin_fold_example() {
        let a = grushin(1.0, 1.0);
        let recs = scan_ray(&a, &[0.3, 1.0], 12.0).unwrap();
        for rec in &recs {
            assert_eq!(rec.class, SingularityClass::Fold);
            let w = fold_witness(&a, rec, 1e-3).unwrap();
            assert!(w.image_distance <= 1e-9 && w.separation >= 2.5e-4);
            assert!(regularity_isomorphism_check(&a, rec));
        }
    }

    #[test]
    fn grushin_scan_records_are_order_one() {
        for (alpha, x0, dir) in [(1.0, 1.0, [0.3, 1.0]), (1.5, 0.5, [-0.4, 1.0]), (2.0, 0.0, [1.0, 0.7])] {
            let a = grushin(alpha, x0);
            let recs = scan_ray(&a, &dir, 12.0).unwrap();
            assert!(!recs.is_empty(), "alpha {alpha}");
            for r in &recs {
                assert_eq!(r.order, 1, "{r:?}");
            }
        }
    }

    #[test]
    fn witness_and_second_order_on_su2() {
        let recs = scan_ray(&Su2Adapter, &[0.3, -0.2, 0.9], 20.0).unwrap();
        for r in &recs {
            match r.class {
                SingularityClass::Fold => {
                    let w = fold_witness(&Su2Adapter, r, 1e-3).unwrap();
                    assert!(w.image_distance <= 1e-9 && w.separation >= 2.5e-4);
                    assert!(norm(&w.lambda2.iter().zip(&r.covector).map(|(a, b)| a - b).collect::<Vec<_>>()) <= 1e-3);
                }
                SingularityClass::Tangential => {
                    assert!(matches!(fold_witness(&Su2Adapter, r, 1e-3), Err(Error::Precondition(_))));
                    let k = r.analytic_kernel.clone().unwrap();
                    let plus = second_order_along(&Su2Adapter, &r.covector, &k, 1);
                    let minus =
                        second_order_along(&Su2Adapter, &r.covector, &k.iter().map(|x| -x).collect::<Vec<_>>(), 1);
                    assert!(plus > 1e-3);
                    assert!((plus - minus).abs() <= 1e-4 * plus);
                }
                _ => panic!("{r:?}"),
            }
            assert!(regularity_isomorphism_check(&Su2Adapter, r));
        }
    }

    #[test]
    fn second_order_examples() {
        let rec = record_at(&Su2Adapter, &[2.0 * PI, 0.0, 0.0], Stratum::C1);
        assert!(second_order_transversality(&Su2Adapter, &rec) > 1e-3);
        assert_eq!(rec.class, SingularityClass::Tangential);
        let w = 2.0f64.sqrt() * 2.0 * PI;
        let rec = record_at(&Sl2Adapter, &[2.0 * PI, 0.0, w], Stratum::C1);
        assert!(second_order_transversality(&Sl2Adapter, &rec) > 1e-3);
        let mut plain = record_at(&Su2Adapter, &[PI, 0.0, 0.0], Stratum::C1);
        assert_eq!(plain.order, 0);
        assert_eq!(second_order_transversality(&Su2Adapter, &plain), 0.0);
        plain.class = SingularityClass::NotSingular;
        assert!(fold_witness(&Su2Adapter, &plain, 1e-3).is_err());
    }

    #[test]
    fn classify_ignores_scaling() {
        let w = (8.986818915818128f64.powi(2) - 10.0).sqrt();
        let rec = record_at(&Su2Adapter, &[3.0, 1.0, w], Stratum::C0);
        let mut scaled = rec.clone();
        scaled.analytic_kernel = scaled.analytic_kernel.map(|k| k.iter().map(|x| 7.5 * x).collect());
        assert_eq!(classify(&Su2Adapter, &rec), classify(&Su2Adapter, &scaled));
        assert_eq!(rec.class, SingularityClass::Fold);
    }
}
