use crate::contact;
use crate::grushin::{
    grushin_conj_f, grushin_conj_grad, grushin_exp_point, grushin_jacobi, grushin_kernel_direction, GrushinBase,
    GrushinCovector,
};
use crate::jacobi::JacobiCoords;
use crate::numeric::linalg::Matrix;
use crate::sl2::{sl2_conj_f, sl2_conj_grad, sl2_exp, sl2_kernel_direction, Sl2Covector};
use crate::su2::{su2_conj_f, su2_conj_grad, su2_exp, su2_kernel_direction, Su2Covector};

use super::{Chart, Stratum, StructureAdapter};

fn argmax_abs(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct GrushinAdapter {
    pub base: GrushinBase,
}

impl GrushinAdapter {
    pub fn new(base: GrushinBase) -> Self {
        Self { base }
    }

    fn cov(c: &[f64]) -> GrushinCovector {
        GrushinCovector::from_slice(c)
    }
}

impl StructureAdapter for GrushinAdapter {
    fn name(&self) -> &'static str {
        "grushin"
    }

    fn fiber_dim(&self) -> usize {
        2
    }

    fn strata(&self) -> &'static [Stratum] {
        &[Stratum::Other]
    }

    fn exp_ambient(&self, cov: &[f64]) -> Vec<f64> {
        grushin_exp_point(&self.base, Self::cov(cov)).to_vec()
    }

    fn chart_at(&self, _ambient: &[f64]) -> Chart {
        Chart::identity()
    }

    fn conj_value(&self, _stratum: Stratum, cov: &[f64]) -> Option<f64> {
        let c = Self::cov(cov);
        if !self.base.conjugacy_possible(c) {
            return None;
        }
        grushin_conj_f(&self.base, c).ok()
    }

    fn conj_grad(&self, _stratum: Stratum, cov: &[f64]) -> Option<Vec<f64>> {
        let (a, b) = grushin_conj_grad(&self.base, Self::cov(cov)).ok()?;
        Some(vec![a, b])
    }

    fn kernel(&self, cov: &[f64]) -> Option<Vec<f64>> {
        let c = Self::cov(cov);
        (c.v0 != 0.0).then(|| grushin_kernel_direction(&self.base, c).to_vec())
    }

    fn f_values(&self, cov: &[f64]) -> Vec<f64> {
        vec![grushin_conj_f(&self.base, Self::cov(cov)).unwrap_or(f64::NAN)]
    }

    fn vertical_jacobi(&self, cov: &[f64]) -> Option<(Matrix, Matrix)> {
        let c = Self::cov(cov);
        let mut xs = Vec::new();
        let mut ps = Vec::new();
        for p0 in [[1.0, 0.0], [0.0, 1.0]] {
            let j = grushin_jacobi(&self.base, c, &JacobiCoords::vertical(&p0), 1.0).ok()?;
            xs.push(j.x);
            ps.push(j.p);
        }
        Some((Matrix::from_columns(&xs), Matrix::from_columns(&ps)))
    }
}

/// SU(2); charts drop the ambient coordinate of `(Re α, Im α, Re β, Im β)`
/// with the largest modulus.
#[derive(Debug, Clone, Copy, Default)]
pub struct Su2Adapter;

impl StructureAdapter for Su2Adapter {
    fn name(&self) -> &'static str {
        "su2"
    }

    fn fiber_dim(&self) -> usize {
        3
    }

    fn strata(&self) -> &'static [Stratum] {
        &[Stratum::C0, Stratum::C1]
    }

    fn exp_ambient(&self, cov: &[f64]) -> Vec<f64> {
        su2_exp(Su2Covector::from_slice(cov), 1.0).point.to_array().to_vec()
    }

    fn chart_at(&self, ambient: &[f64]) -> Chart {
        Chart::dropping(argmax_abs(ambient))
    }

    fn conj_value(&self, stratum: Stratum, cov: &[f64]) -> Option<f64> {
        let (f0, f1) = su2_conj_f(Su2Covector::from_slice(cov)).ok()?;
        match stratum {
            Stratum::C0 => Some(f0),
            Stratum::C1 => Some(f1),
            Stratum::Other => None,
        }
    }

    fn conj_grad(&self, stratum: Stratum, cov: &[f64]) -> Option<Vec<f64>> {
        let (g0, g1) = su2_conj_grad(Su2Covector::from_slice(cov)).ok()?;
        match stratum {
            Stratum::C0 => Some(g0.to_vec()),
            Stratum::C1 => Some(g1.to_vec()),
            Stratum::Other => None,
        }
    }

    fn kernel(&self, cov: &[f64]) -> Option<Vec<f64>> {
        Some(su2_kernel_direction(Su2Covector::from_slice(cov)).to_vec())
    }

    fn f_values(&self, cov: &[f64]) -> Vec<f64> {
        match su2_conj_f(Su2Covector::from_slice(cov)) {
            Ok((f0, f1)) => vec![f0, f1],
            Err(_) => vec![f64::NAN, f64::NAN],
        }
    }

    fn vertical_jacobi(&self, cov: &[f64]) -> Option<(Matrix, Matrix)> {
        let r = Su2Covector::from_slice(cov).norm().powi(2);
        Some((contact::frame_conj_matrix(r), contact::frame_momentum_matrix(r)))
    }
}

/// SL(2); charts drop the matrix entry whose cofactor is largest, so the
/// remaining three entries determine the fourth through `det = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sl2Adapter;

impl StructureAdapter for Sl2Adapter {
    fn name(&self) -> &'static str {
        "sl2"
    }

    fn fiber_dim(&self) -> usize {
        3
    }

    fn strata(&self) -> &'static [Stratum] {
        &[Stratum::C0, Stratum::C1]
    }

    fn exp_ambient(&self, cov: &[f64]) -> Vec<f64> {
        sl2_exp(Sl2Covector::from_slice(cov), 1.0).matrix.to_array().to_vec()
    }

    fn chart_at(&self, ambient: &[f64]) -> Chart {
        let cofactors = [ambient[3], ambient[2], ambient[1], ambient[0]];
        Chart::dropping(argmax_abs(&cofactors))
    }

    fn conj_value(&self, stratum: Stratum, cov: &[f64]) -> Option<f64> {
        let (_, f0, f1) = sl2_conj_f(Sl2Covector::from_slice(cov)).ok()?;
        match stratum {
            Stratum::C0 => Some(f0),
            Stratum::C1 => Some(f1),
            Stratum::Other => None,
        }
    }

    fn conj_grad(&self, stratum: Stratum, cov: &[f64]) -> Option<Vec<f64>> {
        let (g0, g1) = sl2_conj_grad(Sl2Covector::from_slice(cov)).ok()?;
        match stratum {
            Stratum::C0 => Some(g0.to_vec()),
            Stratum::C1 => Some(g1.to_vec()),
            Stratum::Other => None,
        }
    }

    fn kernel(&self, cov: &[f64]) -> Option<Vec<f64>> {
        let c = Sl2Covector::from_slice(cov);
        (c.r() > 0.0).then(|| sl2_kernel_direction(c).to_vec())
    }

    fn f_values(&self, cov: &[f64]) -> Vec<f64> {
        match sl2_conj_f(Sl2Covector::from_slice(cov)) {
            Ok((_, f0, f1)) => vec![f0, f1],
            Err(_) => vec![f64::NAN, f64::NAN],
        }
    }

    fn vertical_jacobi(&self, cov: &[f64]) -> Option<(Matrix, Matrix)> {
        let r = Sl2Covector::from_slice(cov).r();
        Some((contact::frame_conj_matrix(r), contact::frame_momentum_matrix(r)))
    }
}
