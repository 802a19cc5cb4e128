//! Small helpers over `faer` dense complex matrices.

use faer::linalg::solvers::DenseSolveCore;
use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{get_global_parallelism, Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Mat<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(dim: usize) -> CMat {
    Mat::from_fn(dim, dim, |i, j| if i == j { ONE } else { ZERO })
}

pub fn diag(v: &[Complex64]) -> CMat {
    Mat::from_fn(v.len(), v.len(), |i, j| if i == j { v[i] } else { ZERO })
}

pub fn scale(a: MatRef<'_, Complex64>, c: Complex64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| c * a[(i, j)])
}

pub fn adjoint(a: MatRef<'_, Complex64>) -> CMat {
    a.adjoint().to_owned()
}

pub fn inverse(a: MatRef<'_, Complex64>) -> CMat {
    a.partial_piv_lu().inverse()
}

pub fn max_abs(a: MatRef<'_, Complex64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Max-abs entry over the given rows and columns.
pub fn max_abs_on(a: MatRef<'_, Complex64>, rows: &[usize], cols: &[usize]) -> f64 {
    let mut m: f64 = 0.0;
    for &j in cols {
        for &i in rows {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Columns of the identity at the given coordinates.
pub fn coordinate_embedding(dim: usize, coords: &[usize]) -> CMat {
    Mat::from_fn(dim, coords.len(), |i, k| if coords[k] == i { ONE } else { ZERO })
}

pub fn submatrix(a: MatRef<'_, Complex64>, rows: &[usize], cols: &[usize]) -> CMat {
    Mat::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

pub fn mat_vec(a: MatRef<'_, Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

pub fn hermitian_part(a: MatRef<'_, Complex64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// Singular values above `rel_tol · max(1, σ_max)`.
pub fn numerical_rank(a: MatRef<'_, Complex64>, rel_tol: f64) -> Result<usize> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0);
    }
    let s = a.singular_values().map_err(|e| Error::Numerical(format!("svd failed: {e:?}")))?;
    let top = s.first().copied().unwrap_or(0.0).max(1.0);
    Ok(s.iter().filter(|&&x| x > rel_tol * top).count())
}

/// Power-iteration estimate of the spectral radius.
pub fn spectral_radius(a: MatRef<'_, Complex64>, iterations: usize) -> f64 {
    let dim = a.nrows();
    if dim == 0 {
        return 0.0;
    }
    // fixed, non-symmetric start vector so runs are reproducible
    let mut x: Vec<Complex64> = (0..dim).map(|i| Complex64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05)).collect();
    let norm = |v: &[Complex64]| v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    let n0 = norm(&x);
    x.iter_mut().for_each(|c| *c /= n0);
    let mut log_growth = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let y = mat_vec(a, &x);
        let ny = norm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        log_growth.push(ny.ln());
        x = y.into_iter().map(|c| c / ny).collect();
    }
    let tail = &log_growth[log_growth.len() / 2..];
    (tail.iter().sum::<f64>() / tail.len() as f64).exp()
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky_lower(a: MatRef<'_, Complex64>) -> Option<CMat> {
    a.llt(Side::Lower).ok().map(|f| f.L().to_owned())
}

/// `L⁻¹ B`
pub fn solve_lower(l: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> CMat {
    let mut x = b.to_owned();
    solve_lower_triangular_in_place(l, x.as_mut(), get_global_parallelism());
    x
}

/// `L⁻ᴴ B`
pub fn solve_lower_adjoint(l: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> CMat {
    let mut x = b.to_owned();
    solve_upper_triangular_in_place(l.adjoint(), x.as_mut(), get_global_parallelism());
    x
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: MatRef<'_, Complex64>) -> Result<(Vec<f64>, CMat)> {
    let e = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    let vals = e.S().column_vector().iter().map(|c| c.re).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn hermitian_eigenvalues(a: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))
}

/// Eigenvalues of a general square matrix.
pub fn general_eigenvalues(a: MatRef<'_, Complex64>) -> Result<Vec<Complex64>> {
    a.eigenvalues().map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))
}
