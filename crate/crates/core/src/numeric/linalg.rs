//! Small dense matrices: singular values, numeric rank, null spaces and
//! linear solves for the 2x2 to 6x6 systems that appear in this crate.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default relative threshold separating "zero" singular values.
pub const DEFAULT_RANK_TOL: f64 = 1e-7;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs())).unwrap();
            if a[(p, k)] == 0.0 {
                return 0.0;
            }
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            det *= a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= f * akj;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Outcome of [`rank_nullspace`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankResult {
    /// Descending.
    pub singular_values: Vec<f64>,
    pub numeric_rank: usize,
    /// Orthonormal basis of the numerical null space (right singular vectors).
    pub nullspace_basis: Vec<Vec<f64>>,
    /// Absolute threshold that was applied to the singular values.
    pub tolerance_used: f64,
}

impl RankResult {
    pub fn nullity(&self) -> usize {
        self.nullspace_basis.len()
    }

    pub fn smallest(&self) -> f64 {
        *self.singular_values.last().unwrap_or(&0.0)
    }

    pub fn largest(&self) -> f64 {
        *self.singular_values.first().unwrap_or(&0.0)
    }
}

/// Singular values and right singular vectors by one-sided (Hestenes) Jacobi
/// rotations. Returns `(sigma, v)` with `v` holding the right singular vectors
/// as columns, both sorted by descending singular value.
pub fn svd_values_vectors(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.cols;
    // pad to at least n rows; zero rows do not change A^T A
    let rows = m.rows.max(n);
    let mut a = Matrix::zeros(rows, n);
    for i in 0..m.rows {
        for j in 0..n {
            a[(i, j)] = m[(i, j)];
        }
    }
    let mut v = Matrix::identity(n);

    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..rows {
                    let (ap, aq) = (a[(i, p)], a[(i, q)]);
                    alpha += ap * ap;
                    beta += aq * aq;
                    gamma += ap * aq;
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (ap, aq) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = c * ap - s * aq;
                    a[(i, q)] = s * ap + c * aq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| (0..rows).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigma = order.iter().map(|&j| norms[j]).collect();
    let mut vs = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vs[(i, dst)] = v[(i, src)];
        }
    }
    (sigma, vs)
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    svd_values_vectors(m).0
}

/// Numeric rank and null space of `m`: singular values above
/// `tol_factor * sigma_max` count towards the rank, the remaining right
/// singular directions span the null space.
pub fn rank_nullspace(m: &Matrix, tol_factor: f64) -> Result<RankResult> {
    if !(tol_factor > 0.0 && tol_factor < 1.0) {
        return Err(Error::InvalidInput(format!("tol_factor must lie in (0, 1), got {tol_factor}")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let (sigma, v) = svd_values_vectors(m);
    let largest = sigma.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return Err(Error::DegenerateMatrix);
    }
    let tol = tol_factor * largest;
    let numeric_rank = sigma.iter().filter(|&&s| s > tol).count();
    let nullspace_basis = (numeric_rank..m.cols)
        .map(|j| {
            let col = v.column(j);
            let nrm = norm(&col);
            col.iter().map(|x| x / nrm).collect()
        })
        .collect();
    Ok(RankResult { singular_values: sigma, numeric_rank, nullspace_basis, tolerance_used: tol })
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows;
    assert_eq!(a.cols, n, "solve needs a square matrix");
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = m.data.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::SingularSystem);
    }
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[(i, k)].abs().total_cmp(&m[(j, k)].abs())).unwrap();
        if m[(p, k)].abs() <= 1e-14 * scale {
            return Err(Error::SingularSystem);
        }
        if p != k {
            m.swap_rows(p, k);
            rhs.swap(p, k);
        }
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= f * mkj;
            }
            rhs[i] -= f * rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Ok(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

/// Unit vector with the sign fixed so that the largest-magnitude component is
/// positive.
pub fn canonical_direction(a: &[f64]) -> Vec<f64> {
    let mut v = normalized(a);
    let lead = v.iter().copied().max_by(|x, y| x.abs().total_cmp(&y.abs())).unwrap_or(0.0);
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// |sin| of the angle between two nonzero vectors; 0 when parallel or
/// anti-parallel.
pub fn direction_mismatch(a: &[f64], b: &[f64]) -> f64 {
    let c = dot(a, b) / (norm(a) * norm(b));
    (1.0 - c * c).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        let r = rank_nullspace(&Matrix::identity(3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.numeric_rank, 3);
        assert!(r.nullspace_basis.is_empty());
        assert!(r.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-15));
    }

    #[test]
    fn diag_with_zero_has_e3_kernel() {
        let r = rank_nullspace(&Matrix::diag(&[1.0, 1.0, 0.0]), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.numeric_rank, 2);
        assert_eq!(r.nullity(), 1);
        assert!(direction_mismatch(&r.nullspace_basis[0], &[0.0, 0.0, 1.0]) < 1e-14);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        assert_eq!(rank_nullspace(&Matrix::zeros(2, 2), DEFAULT_RANK_TOL), Err(Error::DegenerateMatrix));
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        assert!(matches!(rank_nullspace(&Matrix::identity(2), 1.5), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn singular_values_of_known_matrix() {
        // [[3, 0], [4, 5]] has singular values sqrt(45), sqrt(5)
        let m = Matrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]);
        let s = singular_values(&m);
        assert!((s[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((s[1] - 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn wide_matrix_nullspace() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]);
        let r = rank_nullspace(&m, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.numeric_rank, 1);
        assert_eq!(r.nullity(), 2);
        for k in &r.nullspace_basis {
            assert!(norm(&m.mul_vec(k)) < 1e-14);
        }
    }

    #[test]
    fn solve_and_determinant() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0, -1.0], vec![-3.0, -1.0, 2.0], vec![-2.0, 1.0, 2.0]]);
        let x = solve(&a, &[8.0, -11.0, -3.0]).unwrap();
        for (xi, ei) in x.iter().zip([2.0, 3.0, -1.0]) {
            assert!((xi - ei).abs() < 1e-13);
        }
        assert!((a.determinant() - -1.0).abs() < 1e-13);
        assert_eq!(solve(&Matrix::diag(&[1.0, 0.0]), &[1.0, 1.0]), Err(Error::SingularSystem));
    }

    #[test]
    fn canonical_direction_fixes_sign() {
        assert_eq!(canonical_direction(&[0.0, -2.0, 0.0]), vec![0.0, 1.0, 0.0]);
    }
}
