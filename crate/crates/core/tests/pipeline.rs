use std::f64::consts::{PI, TAU};

use sr_expmap::batch::{scan_rays, Execution};
use sr_expmap::grushin::{grushin_exp, GrushinBase, GrushinCovector};
use sr_expmap::singularity::{
    fold_witness, scan_ray, ConjugateRecord, GrushinAdapter, SingularityClass, Sl2Adapter, Stratum, StructureAdapter,
    Su2Adapter, Tolerances,
};
use sr_expmap::sl2::{sl2_exp, Sl2Covector};
use sr_expmap::su2::{su2_exp, Su2Covector};

fn classes(recs: &[ConjugateRecord]) -> Vec<(Stratum, SingularityClass)> {
    recs.iter().map(|r| (r.stratum, r.class)).collect()
}

#[test]
fn grushin_geodesic_example() {
    let base = GrushinBase::new(1.0, 0.0, 0.0).unwrap();
    let s = grushin_exp(&base, GrushinCovector::new(1.0, PI), 1.0);
    assert!(s.x.abs() < 1e-12);
    assert!((s.y - 1.0 / (2.0 * PI)).abs() < 1e-12);
}

#[test]
fn group_geodesic_examples() {
    let s = su2_exp(Su2Covector::new(PI, 0.0, 0.0), 1.0);
    assert!(s.point.alpha().norm() < 1e-12);
    assert!((s.point.beta().re - 1.0).abs() < 1e-12);
    let m = sl2_exp(Sl2Covector::new(0.0, 0.0, 5.0), 1.0).matrix;
    assert!((m.m11 - 1.0).abs() < 1e-14 && (m.m22 - 1.0).abs() < 1e-14);
    assert!(m.m12.abs() < 1e-14 && m.m21.abs() < 1e-14);
}

#[test]
fn su2_ray_end_to_end() {
    let recs = scan_ray(&Su2Adapter, &[1.0, 0.0, 0.5], 20.0).unwrap();
    assert_eq!(recs.len(), 5);
    assert!((recs[0].s - TAU).abs() < 1e-8);
    use SingularityClass::*;
    use Stratum::*;
    assert_eq!(classes(&recs), vec![(C1, Tangential), (C0, Fold), (C1, Tangential), (C0, Fold), (C1, Tangential)]);
    for r in recs.iter().filter(|r| r.class == Fold) {
        let w = fold_witness(&Su2Adapter, r, 1e-3).unwrap();
        assert!(w.image_distance < 1e-9 && w.separation > 1e-4);
        let a = Su2Adapter.exp_ambient(&w.lambda1);
        let b = Su2Adapter.exp_ambient(&w.lambda2);
        let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-9);
    }
}

#[test]
fn rays_without_conjugate_points() {
    assert!(scan_ray(&Sl2Adapter, &[1.0, 0.0, 0.5], 20.0).unwrap().is_empty());
    let g = GrushinAdapter::new(GrushinBase::new(2.0, 0.7, 0.0).unwrap());
    assert!(scan_ray(&g, &[1.0, 0.0], 20.0).unwrap().is_empty());
}

#[test]
fn sl2_ray_with_positive_r() {
    // the ray is normalized, so sqrt(r) = s / sqrt(3)
    let recs = scan_ray(&Sl2Adapter, &[0.6, 0.8, 2f64.sqrt()], 28.0).unwrap();
    assert_eq!(recs.len(), 4);
    assert!((recs[0].s - TAU * 3f64.sqrt()).abs() < 1e-8);
    use SingularityClass::*;
    use Stratum::*;
    assert_eq!(classes(&recs), vec![(C1, Tangential), (C0, Fold), (C1, Tangential), (C0, Fold)]);
}

#[test]
fn batch_executions_agree() {
    let g = GrushinAdapter::new(GrushinBase::new(1.5, 1.0, 0.0).unwrap());
    let dirs: Vec<Vec<f64>> = (0..8).map(|i| vec![0.1 * i as f64 - 0.35, 1.0]).collect();
    let tol = Tolerances::default();
    let par = scan_rays(&g, &dirs, 10.0, &tol, Execution::Parallel);
    let seq = scan_rays(&g, &dirs, 10.0, &tol, Execution::Sequential);
    assert_eq!(par, seq);
    assert!(par.iter().all(|r| !r.as_ref().unwrap().is_empty()));
}
