//! Central finite-difference Jacobians.

use super::linalg::Matrix;

/// Jacobian of `f` at `x` by central differences with absolute step `h`.
///
/// Entry error is `O(h^2)` for smooth `f`; steps in `[1e-8, 1e-3]` are the
/// useful range in double precision.
pub fn fd_jacobian<F>(f: F, x: &[f64], h: f64) -> Matrix
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    try_fd_jacobian(|p| Ok::<_, std::convert::Infallible>(f(p)), x, h).unwrap_or_else(|e| match e {})
}

/// Same as [`fd_jacobian`] for maps that can fail.
pub fn try_fd_jacobian<F, E>(f: F, x: &[f64], h: f64) -> Result<Matrix, E>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, E>,
{
    let n = x.len();
    let mut columns = Vec::with_capacity(n);
    let mut p = x.to_vec();
    for j in 0..n {
        p[j] = x[j] + h;
        let fp = f(&p)?;
        p[j] = x[j] - h;
        let fm = f(&p)?;
        p[j] = x[j];
        columns.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    if columns.is_empty() {
        return Ok(Matrix::zeros(f(x)?.len(), 0));
    }
    Ok(Matrix::from_columns(&columns))
}
