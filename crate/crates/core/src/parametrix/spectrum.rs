//! Spectra of truncated operators, grouped into multiplicity clusters.

use faer::Mat;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::dense::{self, CMat};
use super::matrix::{InnerProductWeight, OperatorMatrix};
use crate::error::{Error, Result};
use crate::exact::GaussRational;
use crate::sphere::basis::BigradedIndex;
use crate::sphere::diagonal::DiagonalOperator;

/// Eigenvalues within this relative distance form one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;
/// `|λ| ≤ KERNEL_THRESHOLD · max(1, max|λ|)` counts as kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-10;
/// Above this dimension the general (non-Hermitian) eigensolve is skipped.
pub const IMAGINARY_CHECK_MAX_DIM: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<GaussRational>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BigradedIndex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub dimension: usize,
    /// Ascending, repeated by multiplicity.
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub kernel_dimension: usize,
    pub smallest_nonzero: Option<f64>,
    /// Largest imaginary part seen by a non-Hermitian eigensolve, when run.
    pub max_imaginary: Option<f64>,
}

pub fn spectrum_diagonal(d: &DiagonalOperator) -> Spectrum {
    let layout = d.layout();
    let mut entries: Vec<(f64, GaussRational, BigradedIndex, usize)> =
        layout.blocks.iter().map(|b| (d.get(b.index).to_c64().re, d.get(b.index).clone(), b.index, b.dim)).collect();
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let mut clusters: Vec<Cluster> = Vec::new();
    for (v, exact, idx, dim) in entries {
        match clusters.last_mut() {
            Some(c) if c.exact.as_ref() == Some(&exact) => {
                c.multiplicity += dim;
                c.blocks.push(idx);
            }
            _ => clusters.push(Cluster { value: v, multiplicity: dim, exact: Some(exact), blocks: vec![idx] }),
        }
    }
    let eigenvalues: Vec<f64> =
        clusters.iter().flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity)).collect();
    let kernel_dimension = clusters.iter().filter(|c| c.exact.as_ref().is_some_and(Zero::is_zero)).map(|c| c.multiplicity).sum();
    let smallest_nonzero =
        clusters.iter().filter(|c| !c.exact.as_ref().is_some_and(Zero::is_zero)).map(|c| c.value.abs()).min_by(f64::total_cmp);
    let max_imaginary = d.table().map(|(_, v)| v.to_c64().im.abs()).fold(0.0, f64::max);
    Spectrum {
        dimension: layout.total,
        eigenvalues,
        clusters,
        kernel_dimension,
        smallest_nonzero,
        max_imaginary: Some(max_imaginary),
    }
}

/// Groups sorted values; values under `zero_threshold` in magnitude are exact zeros.
pub fn cluster_values(sorted: &[f64], zero_threshold: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    let mut first = f64::NAN;
    for &v in sorted {
        let v = if v.abs() <= zero_threshold { 0.0 } else { v };
        match out.last_mut() {
            Some(c) if (v - first).abs() <= CLUSTER_TOLERANCE * v.abs().max(first.abs()) => {
                // running mean keeps the representative centred
                c.value += (v - c.value) / (c.multiplicity + 1) as f64;
                c.multiplicity += 1;
            }
            _ => {
                first = v;
                out.push(Cluster { value: v, multiplicity: 1, exact: None, blocks: Vec::new() });
            }
        }
    }
    out
}

/// Nonzero part of the pencil `Λ x = λ W x` on the `W`-orthogonal complement of the
/// columns of `k0`, with `W`-orthonormal eigenvectors.
pub struct ReducedPencil {
    pub values: Vec<f64>,
    pub vectors: CMat,
    pub threshold: f64,
}

pub fn reduced_pencil(lambda: &CMat, weight: &InnerProductWeight, k0_coords: &[usize]) -> Result<ReducedPencil> {
    let dim = lambda.nrows();
    let w = &weight.gram;
    let rest: Vec<usize> = (0..dim).filter(|i| !k0_coords.contains(i)).collect();
    // x = B x_N with (W x)_K = 0
    let w_kk = dense::submatrix(w.as_ref(), k0_coords, k0_coords);
    let w_kn = dense::submatrix(w.as_ref(), k0_coords, &rest);
    let x_k = if k0_coords.is_empty() {
        Mat::zeros(0, rest.len())
    } else {
        let lu = w_kk.partial_piv_lu();
        use faer::linalg::solvers::Solve;
        dense::scale(lu.solve(&w_kn).as_ref(), Complex64::new(-1.0, 0.0))
    };
    let mut b = Mat::<Complex64>::zeros(dim, rest.len());
    for (r, &i) in rest.iter().enumerate() {
        b[(i, r)] = dense::ONE;
    }
    for (r, &i) in k0_coords.iter().enumerate() {
        for c in 0..rest.len() {
            b[(i, c)] = x_k[(r, c)];
        }
    }
    let bh = b.adjoint().to_owned();
    let lam_c = dense::hermitian_part((&bh * &(lambda * &b)).as_ref());
    let s = dense::hermitian_part((&bh * &(w * &b)).as_ref());
    let l = dense::cholesky_lower(s.as_ref())
        .ok_or_else(|| Error::Numerical("compressed weight is not positive definite".into()))?;
    let x = dense::solve_lower(l.as_ref(), lam_c.as_ref());
    let m = dense::hermitian_part(dense::solve_lower(l.as_ref(), dense::adjoint(x.as_ref()).as_ref()).as_ref());
    let (values, u) = dense::hermitian_eigen(m.as_ref())?;
    let y = dense::solve_lower_adjoint(l.as_ref(), u.as_ref());
    let vectors = &b * &y;
    let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
    Ok(ReducedPencil { values, vectors, threshold: KERNEL_THRESHOLD * scale })
}

/// Spectrum of `P̂` for the weighted inner product; the pluriharmonic
/// coordinates are taken as known kernel and the rest is found numerically.
pub fn spectrum_matrix(p_hat: &OperatorMatrix, weight: &InnerProductWeight) -> Result<Spectrum> {
    let lambda = dense::hermitian_part((&weight.gram * &p_hat.entries).as_ref());
    let k0 = p_hat.layout().coordinates_where(|i| i.is_pluriharmonic());
    let pencil = reduced_pencil(&lambda, weight, &k0)?;
    Ok(spectrum_from_pencil(p_hat, &pencil, k0.len()))
}

pub(crate) fn spectrum_from_pencil(p_hat: &OperatorMatrix, pencil: &ReducedPencil, known_kernel: usize) -> Spectrum {
    let mut values: Vec<f64> = pencil.values.clone();
    values.extend(std::iter::repeat_n(0.0, known_kernel));
    values.sort_by(f64::total_cmp);
    let clusters = cluster_values(&values, pencil.threshold);
    let eigenvalues: Vec<f64> = values.iter().map(|&v| if v.abs() <= pencil.threshold { 0.0 } else { v }).collect();
    let kernel_dimension = eigenvalues.iter().filter(|v| **v == 0.0).count();
    let smallest_nonzero = eigenvalues.iter().filter(|v| **v != 0.0).map(|v| v.abs()).min_by(f64::total_cmp);
    let dim = p_hat.entries.nrows();
    let max_imaginary = (dim <= IMAGINARY_CHECK_MAX_DIM)
        .then(|| dense::general_eigenvalues(p_hat.entries.as_ref()).ok())
        .flatten()
        .map(|ev| ev.iter().map(|c| c.im.abs()).fold(0.0, f64::max));
    Spectrum { dimension: dim, eigenvalues, clusters, kernel_dimension, smallest_nonzero, max_imaginary }
}

/// `index,eigenvalue` rows, then a blank line and `value,multiplicity` cluster rows.
pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in s.eigenvalues.iter().enumerate() {
        out.push_str(&format!("{i},{v:e}\n"));
    }
    out.push_str("\nvalue,multiplicity\n");
    for c in &s.clusters {
        out.push_str(&format!("{:e},{}\n", c.value, c.multiplicity));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::basis::harmonic_dimension;
    use crate::sphere::diagonal::critical_gjms;

    #[test]
    fn diagonal_spectrum_multiplicities() {
        let s = spectrum_diagonal(&critical_gjms(1, 6));
        let c16 = s.clusters.iter().find(|c| c.value == 16.0).unwrap();
        assert_eq!(c16.multiplicity, harmonic_dimension(1, 1, 1));
        let kernel: usize = 2 * (1..=6).map(|d| d + 1).sum::<usize>() + 1;
        assert_eq!(s.kernel_dimension, kernel);
        assert_eq!(s.max_imaginary, Some(0.0));
        assert_eq!(s.eigenvalues.len(), s.dimension);
    }

    #[test]
    fn clustering_merges_split_multiplicities() {
        let c = cluster_values(&[0.0, 1e-14, 2.0, 2.0 + 1e-12, 3.0], 1e-10);
        let m: Vec<usize> = c.iter().map(|c| c.multiplicity).collect();
        assert_eq!(m, vec![2, 2, 1]);
    }
}
