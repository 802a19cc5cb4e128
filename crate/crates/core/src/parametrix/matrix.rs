//! The chain with dense matrices for a weighted inner product `⟨u, v⟩_W = vᴴ W u`.

use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense::{self, CMat};
use super::spectrum::{reduced_pencil, spectrum_from_pencil, Spectrum};
use super::{ChainReport, Diagnostics, Residual, SmoothingReport, INTERIOR_MARGIN};
use crate::error::{Error, Result};
use crate::sphere::basis::{BlockLayout, HarmonicBasis};
use crate::sphere::diagonal::{critical_gjms, DiagonalOperator};
use crate::sphere::moments::{weighted_gram, MomentTable};
use crate::sphere::poly::FloatPoly;

pub const DEFAULT_NEUMANN_DEPTH: usize = 30;
/// Neumann summation is used only when `ρ^{depth+1}` falls below this.
pub const NEUMANN_TAIL_TOLERANCE: f64 = 1e-10;
pub const POWER_ITERATIONS: usize = 200;
pub const RANK_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct InnerProductWeight {
    pub n: usize,
    pub degree: u32,
    pub gram: CMat,
    pub inverse: CMat,
    pub smallest_eigenvalue: f64,
    pub largest_eigenvalue: f64,
    pub description: String,
}

impl InnerProductWeight {
    pub fn standard(n: usize, degree: u32) -> Self {
        let dim = BlockLayout::new(n, degree).total;
        Self {
            n,
            degree,
            gram: dense::identity(dim),
            inverse: dense::identity(dim),
            smallest_eigenvalue: 1.0,
            largest_eigenvalue: 1.0,
            description: "standard".into(),
        }
    }

    pub fn from_gram(n: usize, degree: u32, gram: CMat, description: impl Into<String>) -> Result<Self> {
        let dim = BlockLayout::new(n, degree).total;
        if gram.nrows() != dim || gram.ncols() != dim {
            return Err(Error::InvalidArgument(format!("Gram matrix must be {dim}×{dim}")));
        }
        let scale = dense::max_abs(gram.as_ref()).max(1.0);
        let herm = dense::max_abs((&gram - gram.adjoint()).as_ref());
        if herm > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!("Gram matrix is not Hermitian (defect {herm:e})")));
        }
        let gram = dense::hermitian_part(gram.as_ref());
        let ev = dense::hermitian_eigenvalues(gram.as_ref())?;
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo <= 0.0 || dense::cholesky_lower(gram.as_ref()).is_none() {
            return Err(Error::WeightNotPositive { smallest_eigenvalue: lo });
        }
        let inverse = dense::inverse(gram.as_ref());
        Ok(Self { n, degree, gram, inverse, smallest_eigenvalue: lo, largest_eigenvalue: hi, description: description.into() })
    }

    /// Gram matrix of the normalized basis under the density `E dσ`.
    pub fn from_density(basis: &HarmonicBasis, density: &FloatPoly, description: impl Into<String>) -> Result<Self> {
        let table = MomentTable::new(basis.n, basis.degree, density)?;
        Self::from_gram(basis.n, basis.degree, weighted_gram(basis, &table, true), description)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout::new(self.n, self.degree)
    }

    /// `A♯ = W⁻¹ Aᴴ W`
    pub fn adjoint(&self, a: &CMat) -> CMat {
        &self.inverse * &(a.adjoint() * &self.gram)
    }

    pub fn inner(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let wx = dense::mat_vec(self.gram.as_ref(), x);
        y.iter().zip(&wx).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self, x: &[Complex64]) -> f64 {
        self.inner(x, x).re.max(0.0).sqrt()
    }

    pub fn condition(&self) -> f64 {
        self.largest_eigenvalue / self.smallest_eigenvalue
    }

    /// `W`-orthogonal projection onto the span of the columns of `k`.
    pub fn projector(&self, k: &CMat) -> CMat {
        if k.ncols() == 0 {
            return Mat::zeros(self.dim(), self.dim());
        }
        let kh_w = k.adjoint() * &self.gram;
        let gram_k = &kh_w * k;
        &(k * &dense::inverse(gram_k.as_ref())) * &kh_w
    }
}

/// Dense operator on the truncated basis.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub n: usize,
    pub degree: u32,
    pub label: String,
    pub entries: CMat,
}

impl OperatorMatrix {
    pub fn from_diagonal(d: &DiagonalOperator) -> Self {
        let lam: Vec<Complex64> = d.expanded().iter().map(|v| v.to_c64()).collect();
        Self { n: d.n, degree: d.degree, label: d.label.clone(), entries: dense::diag(&lam) }
    }

    /// `W⁻¹ Λ`: the operator whose weighted form `⟨Au, v⟩_W` equals `⟨Λu, v⟩`.
    pub fn transported(d: &DiagonalOperator, weight: &InnerProductWeight) -> Self {
        let lam: Vec<Complex64> = d.expanded().iter().map(|v| v.to_c64()).collect();
        let entries = Mat::from_fn(weight.dim(), weight.dim(), |i, j| weight.inverse[(i, j)] * lam[j]);
        Self { n: d.n, degree: d.degree, label: format!("{}^", d.label), entries }
    }

    /// The critical operator of the conformally changed form, `e^{−(n+1)Υ} P`.
    pub fn critical_perturbed(weight: &InnerProductWeight) -> Self {
        Self::transported(&critical_gjms(weight.n, weight.degree), weight).with_label("P^")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout::new(self.n, self.degree)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        dense::mat_vec(self.entries.as_ref(), v)
    }

    pub fn weighted_asymmetry(&self, weight: &InnerProductWeight) -> Residual {
        let d = &weight.adjoint(&self.entries) - &self.entries;
        residual(&d, &self.layout().interior(INTERIOR_MARGIN))
    }
}

pub(crate) fn residual(a: &CMat, interior: &[usize]) -> Residual {
    Residual::float(dense::max_abs(a.as_ref()), dense::max_abs_on(a.as_ref(), interior, interior))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum A0Policy {
    Neumann { depth: usize, spectral_radius: f64, tail_bound: f64 },
    DirectInverse { spectral_radius: f64 },
}

#[derive(Clone, Debug)]
pub struct MatrixChain {
    pub n: usize,
    pub degree: u32,
    pub p: CMat,
    pub g0: CMat,
    pub pi0: CMat,
    pub r0: CMat,
    pub a0: CMat,
    pub pi_inf: CMat,
    pub g_inf: CMat,
    pub pi: CMat,
    pub g: CMat,
    /// Columns spanning `Ker P̂`: pluriharmonic coordinates first, then any
    /// numerically detected kernel vectors.
    pub kernel: CMat,
    pub detected_kernel: usize,
    pub a0_policy: A0Policy,
    pub neumann_depth: usize,
    pub diagnostics: Diagnostics,
    pub spectrum: Spectrum,
    pub weight_description: String,
    interior: Vec<usize>,
}

/// `Π̂` and `Ĝ` from the weighted eigendecomposition of `P̂`.
pub struct SpectralInverse {
    pub pi: CMat,
    pub g: CMat,
    pub kernel: CMat,
    pub detected_kernel: usize,
    pub spectrum: Spectrum,
    /// `W P̂`, Hermitian part.
    pub lambda: CMat,
    pub threshold: f64,
}

pub fn spectral_inverse(p_hat: &OperatorMatrix, weight: &InnerProductWeight) -> Result<SpectralInverse> {
    let dim = weight.dim();
    let w = &weight.gram;
    let lambda = dense::hermitian_part((w * &p_hat.entries).as_ref());
    let k0 = p_hat.layout().coordinates_where(|i| i.is_pluriharmonic());
    let pencil = reduced_pencil(&lambda, weight, &k0)?;
    let spectrum = spectrum_from_pencil(p_hat, &pencil, k0.len());
    let (zero, live): (Vec<usize>, Vec<usize>) =
        (0..pencil.values.len()).partition(|&k| pencil.values[k].abs() <= pencil.threshold);
    let mut kernel = Mat::<Complex64>::zeros(dim, k0.len() + zero.len());
    for (c, &i) in k0.iter().enumerate() {
        kernel[(i, c)] = dense::ONE;
    }
    for (c, &k) in zero.iter().enumerate() {
        for i in 0..dim {
            kernel[(i, k0.len() + c)] = pencil.vectors[(i, k)];
        }
    }
    let pi = weight.projector(&kernel);
    let v = Mat::from_fn(dim, live.len(), |i, c| pencil.vectors[(i, live[c])]);
    let v_scaled = Mat::from_fn(dim, live.len(), |i, c| pencil.vectors[(i, live[c])] / pencil.values[live[c]]);
    let g = &v_scaled * &(v.adjoint() * w);
    Ok(SpectralInverse { pi, g, kernel, detected_kernel: zero.len(), spectrum, lambda, threshold: pencil.threshold })
}

pub fn build_chain_matrix(p_hat: &OperatorMatrix, weight: &InnerProductWeight, neumann_depth: usize) -> Result<MatrixChain> {
    let dim = weight.dim();
    if p_hat.dim() != dim || (p_hat.n, p_hat.degree) != (weight.n, weight.degree) {
        return Err(Error::InvalidArgument("operator and weight live on different truncations".into()));
    }
    let layout = p_hat.layout();
    let interior = layout.interior(INTERIOR_MARGIN);
    let p = p_hat.entries.clone();
    let p_scale = dense::max_abs(p.as_ref()).max(1.0);
    let asym = p_hat.weighted_asymmetry(weight);
    if asym.full > 1e-8 * p_scale {
        return Err(Error::InvalidArgument(format!("{} is not self-adjoint for the weight (defect {:e})", p_hat.label, asym.full)));
    }
    let id = dense::identity(dim);
    let w = &weight.gram;

    let SpectralInverse { pi, g, kernel, detected_kernel, spectrum, lambda, threshold } = spectral_inverse(p_hat, weight)?;
    let k0 = layout.coordinates_where(|i| i.is_pluriharmonic());

    // G₀ from the coordinate-diagonal part, Π₀ = Ŝ + S̄̂
    let d_plus: Vec<Complex64> = (0..dim)
        .map(|i| {
            let d = lambda[(i, i)].re;
            if d.abs() <= threshold { dense::ZERO } else { Complex64::new(1.0 / d, 0.0) }
        })
        .collect();
    let g0 = Mat::from_fn(dim, dim, |i, j| d_plus[i] * w[(i, j)]);
    let s = weight.projector(&dense::coordinate_embedding(dim, &layout.coordinates_where(|i| i.q == 0)));
    let s_bar = weight.projector(&dense::coordinate_embedding(dim, &layout.coordinates_where(|i| i.p == 0)));
    let pi0 = &s + &s_bar;
    let r0 = &(&(&p * &g0) + &pi0) - &id;
    let rho = dense::spectral_radius(r0.as_ref(), POWER_ITERATIONS);
    let tail = rho.powi(neumann_depth as i32 + 1);
    let (a0, a0_policy) = if neumann_depth > 0 && rho < 1.0 && tail < NEUMANN_TAIL_TOLERANCE {
        let minus_r0 = dense::scale(r0.as_ref(), Complex64::new(-1.0, 0.0));
        let mut term = id.clone();
        let mut sum = id.clone();
        for _ in 0..neumann_depth {
            term = &term * &minus_r0;
            sum = &sum + &term;
        }
        (sum, A0Policy::Neumann { depth: neumann_depth, spectral_radius: rho, tail_bound: tail / (1.0 - rho) })
    } else {
        (dense::inverse((&id + &r0).as_ref()), A0Policy::DirectInverse { spectral_radius: rho })
    };
    let pi_inf = &pi0 * &a0;
    let g_inf = &(&(&id - &pi_inf) * &g0) * &a0;

    let mut dg = Diagnostics::default();
    let mut rec = |name: &str, a: CMat| dg.record(name, residual(&a, &interior));
    rec("P*G + Pi - I", &(&(&p * &g) + &pi) - &id);
    rec("G*P + Pi - I", &(&(&g * &p) + &pi) - &id);
    rec("Pi^2 - Pi", &(&pi * &pi) - &pi);
    rec("Pi# - Pi", &weight.adjoint(&pi) - &pi);
    rec("G# - G", &weight.adjoint(&g) - &g);
    rec("P# - P", &weight.adjoint(&p) - &p);
    rec("Pi*G", &pi * &g);
    rec("G*Pi", &g * &pi);
    rec("P*Pi", &p * &pi);
    rec("Pi*P", &pi * &p);
    rec("RanP . RanPi", &(pi.adjoint() * w) * &p);
    rec("P*K0", &p * &dense::coordinate_embedding(dim, &k0));
    rec("PiInf^2 - PiInf", &(&pi_inf * &pi_inf) - &pi_inf);
    rec("PiInf# - PiInf", &weight.adjoint(&pi_inf) - &pi_inf);
    rec("P*GInf + PiInf - I", &(&(&p * &g_inf) + &pi_inf) - &id);
    rec("GInf*P + PiInf - I", &(&(&g_inf * &p) + &pi_inf) - &id);
    rec("PiInf*P", &pi_inf * &p);
    rec("P*PiInf", &p * &pi_inf);
    rec("PiInf*GInf", &pi_inf * &g_inf);
    rec("GInf*PiInf", &g_inf * &pi_inf);
    rec("PiInf - Pi", &pi_inf - &pi);
    rec("GInf - G", &g_inf - &g);
    Ok(MatrixChain {
        n: p_hat.n,
        degree: p_hat.degree,
        p,
        g0,
        pi0,
        r0,
        a0,
        pi_inf,
        g_inf,
        pi,
        g,
        kernel,
        detected_kernel,
        a0_policy,
        neumann_depth,
        diagnostics: dg,
        spectrum,
        weight_description: weight.description.clone(),
        interior,
    })
}

impl MatrixChain {
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn smoothing_residual(&self) -> Result<SmoothingReport> {
        let id = dense::identity(self.p.nrows());
        let r_inf = &(&(&self.g_inf * &self.p) + &self.pi_inf) - &id;
        let diff = &self.pi - &self.pi_inf;
        Ok(SmoothingReport {
            r_inf: residual(&r_inf, &self.interior),
            r_inf_rank: dense::numerical_rank(r_inf.as_ref(), RANK_TOLERANCE)?,
            pi_minus_pi_inf: residual(&diff, &self.interior),
            pi_minus_pi_inf_rank: dense::numerical_rank(diff.as_ref(), RANK_TOLERANCE)?,
            r0_rank: dense::numerical_rank(self.r0.as_ref(), RANK_TOLERANCE)?,
        })
    }

    pub fn report(&self) -> Result<ChainReport> {
        let smoothing = self.smoothing_residual()?;
        let mut ranks = BTreeMap::new();
        ranks.insert("R0".to_string(), smoothing.r0_rank);
        ranks.insert("Pi - PiInf".to_string(), smoothing.pi_minus_pi_inf_rank);
        ranks.insert("Ker P".to_string(), self.kernel.ncols());
        ranks.insert("detected kernel".to_string(), self.detected_kernel);
        Ok(ChainReport {
            n: self.n,
            degree: self.degree,
            mode: "float".into(),
            perturbation: self.weight_description.clone(),
            neumann_depth: self.neumann_depth,
            a0_policy: Some(self.a0_policy.clone()),
            ranks,
            residuals: self.diagnostics.clone(),
            smoothing,
            spectrum: self.spectrum.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::diagonal::reeb_field;
    use crate::sphere::frame::frame_t;
    use crate::sphere::poly::{ExactPoly, Monomial};
    use crate::exact::GaussRational;

    fn real_density(n: usize, eps: f64) -> FloatPoly {
        // 1 + ε(z₀z̄₁ + z₁z̄₀) + ε²|z₀|²
        let vars = n + 1;
        let mut f = FloatPoly::one(vars);
        let mut a = [0u8; 4];
        let mut b = [0u8; 4];
        a[0] = 1;
        b[1] = 1;
        f.add_term(Monomial::new(&a[..vars], &b[..vars]), Complex64::new(eps, 0.0));
        f.add_term(Monomial::new(&b[..vars], &a[..vars]), Complex64::new(eps, 0.0));
        f.add_term(Monomial::new(&a[..vars], &a[..vars]), Complex64::new(eps * eps, 0.0));
        f
    }

    #[test]
    fn standard_weight_reproduces_the_diagonal_chain() {
        let w = InnerProductWeight::standard(1, 6);
        let p = OperatorMatrix::from_diagonal(&critical_gjms(1, 6));
        let c = build_chain_matrix(&p, &w, DEFAULT_NEUMANN_DEPTH).unwrap();
        for (name, r) in c.diagnostics.iter() {
            assert!(r.full < 1e-12, "{name}: {}", r.full);
        }
        assert!(matches!(c.a0_policy, A0Policy::DirectInverse { spectral_radius } if (spectral_radius - 1.0).abs() < 1e-9));
        assert_eq!(c.smoothing_residual().unwrap().r0_rank, 1);
        let diag = super::super::spectrum_diagonal(&critical_gjms(1, 6));
        assert_eq!(c.spectrum.kernel_dimension, diag.kernel_dimension);
        for (a, b) in c.spectrum.eigenvalues.iter().zip(&diag.eigenvalues) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn perturbed_chain_identities() {
        let basis = HarmonicBasis::build(1, 8).unwrap();
        let w = InnerProductWeight::from_density(&basis, &real_density(1, 0.08), "test").unwrap();
        let p = OperatorMatrix::critical_perturbed(&w);
        let c = build_chain_matrix(&p, &w, DEFAULT_NEUMANN_DEPTH).unwrap();
        for name in ["P*G + Pi - I", "Pi^2 - Pi", "Pi# - Pi", "G# - G", "RanP . RanPi", "PiInf - Pi", "GInf - G"] {
            let r = c.diagnostics.get(name).unwrap();
            assert!(r.interior < 1e-8, "{name}: {}", r.interior);
        }
        assert!(p.weighted_asymmetry(&w).full < 1e-10);
        assert_eq!(c.detected_kernel, 0);
    }

    #[test]
    fn indefinite_weight_is_rejected() {
        let basis = HarmonicBasis::build(1, 3).unwrap();
        let bad = FloatPoly::one(2).scale(&Complex64::new(-1.0, 0.0));
        assert!(matches!(InnerProductWeight::from_density(&basis, &bad, "neg"), Err(Error::WeightNotPositive { .. })));
    }

    #[test]
    fn reeb_commutator_with_multiplication() {
        // [T, M_f] = M_{Tf}; T preserves every block so nothing leaks
        let basis = HarmonicBasis::build(1, 6).unwrap();
        let mut f = ExactPoly::zero(2);
        f.add_term(Monomial::new(&[1, 0], &[0, 1]), GaussRational::from_ratio(1, 3));
        f.add_term(Monomial::new(&[2, 0], &[0, 0]), GaussRational::from_int(1));
        f.add_term(Monomial::new(&[0, 1], &[1, 1]), GaussRational::from_ratio(-1, 2));
        let tf = frame_t(&f);
        let m = |g: &ExactPoly| weighted_gram(&basis, &MomentTable::new(1, 6, &g.to_float()).unwrap(), false);
        let t = OperatorMatrix::from_diagonal(&reeb_field(1, 6)).entries;
        let lhs = &(&t * &m(&f)) - &(&m(&f) * &t);
        let d = dense::max_abs((&lhs - &m(&tf)).as_ref());
        assert!(d < 1e-12, "{d}");
    }
}
