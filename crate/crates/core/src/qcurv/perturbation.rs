//! Conformal changes `θ̂ = e^Υ θ` of the standard sphere contact form.

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{GaussRational, Rational};
use crate::parametrix::{InnerProductWeight, OperatorMatrix};
use crate::sphere::basis::{BlockLayout, HarmonicBasis};
use crate::sphere::diagonal::critical_gjms;
use crate::sphere::moments::taylor_exp;
use crate::sphere::poly::FloatPoly;
use crate::sphere::spectral::{Coefficients, SpectralFunction, SpectralTerm};

pub const DEFAULT_TAYLOR_DEPTH: u32 = 12;
/// Largest tolerated conjugation defect of a real datum.
pub const REALITY_TOLERANCE: f64 = 1e-12;

/// File format: `ε · Σ c φ_{(p,q),index}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSpec {
    #[serde(default = "unit_epsilon")]
    pub epsilon: f64,
    pub terms: Vec<SpectralTerm>,
}

fn unit_epsilon() -> f64 {
    1.0
}

impl SpectralSpec {
    /// Exact coefficients, with `ε` taken as its exact binary value.
    pub fn to_function(&self, n: usize, degree: u32) -> Result<SpectralFunction> {
        let eps = Rational::from_float(self.epsilon)
            .ok_or_else(|| Error::InvalidArgument(format!("epsilon {} is not finite", self.epsilon)))?;
        let eps = GaussRational::real(eps);
        let terms: Vec<SpectralTerm> =
            self.terms.iter().map(|t| SpectralTerm { coefficient: &t.coefficient * &eps, ..t.clone() }).collect();
        SpectralFunction::from_terms(n, degree, &terms)
    }
}

/// `Υ` together with the Taylor depth used for `e^{(n+1)Υ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactPerturbation {
    pub upsilon: SpectralFunction,
    pub taylor_depth: u32,
}

impl ContactPerturbation {
    pub fn new(upsilon: SpectralFunction, taylor_depth: u32) -> Result<Self> {
        if taylor_depth == 0 {
            return Err(Error::InvalidArgument("Taylor depth must be at least 1".into()));
        }
        let defect = upsilon.real_defect();
        let scale = upsilon.norm_sqr().sqrt().max(1.0);
        if upsilon.is_real_exact() == Some(false) || defect > REALITY_TOLERANCE * scale {
            return Err(Error::InvalidArgument(format!("Υ must be real-valued (conjugation defect {defect:e})")));
        }
        Ok(Self { upsilon, taylor_depth })
    }

    pub fn standard(n: usize, degree: u32, taylor_depth: u32) -> Self {
        Self { upsilon: SpectralFunction::zero_exact(n, degree), taylor_depth }
    }

    pub fn n(&self) -> usize {
        self.upsilon.n
    }

    pub fn degree(&self) -> u32 {
        self.upsilon.degree
    }

    pub fn is_standard(&self) -> bool {
        self.upsilon.to_float_vec().iter().all(|c| c.is_zero())
    }

    /// `(n+1) Υ` as an ambient polynomial.
    fn exponent(&self, basis: &HarmonicBasis) -> FloatPoly {
        self.upsilon.to_poly(basis).scale(&Complex64::new((self.n() + 1) as f64, 0.0))
    }

    /// Upper bound for `‖Υ‖_∞` on the sphere: the ambient coefficient ℓ¹ norm.
    pub fn sup_bound(&self, basis: &HarmonicBasis) -> f64 {
        self.upsilon.to_poly(basis).coefficient_l1()
    }

    /// Lagrange bound on `|e^x − T_K(e^x)|` for `|x| ≤ (n+1)‖Υ‖_∞`.
    pub fn tail_bound(&self, basis: &HarmonicBasis) -> f64 {
        taylor_tail_bound((self.n() + 1) as f64 * self.sup_bound(basis), self.taylor_depth)
    }

    /// `T_K(e^{(n+1)Υ})`
    pub fn density(&self, basis: &HarmonicBasis) -> FloatPoly {
        taylor_exp(&self.exponent(basis), self.taylor_depth)
    }

    pub fn frame(&self, basis: &HarmonicBasis) -> Result<PerturbedFrame> {
        PerturbedFrame::new(self, basis)
    }
}

pub fn taylor_tail_bound(x: f64, depth: u32) -> f64 {
    let mut term = 1.0;
    for k in 1..=depth + 1 {
        term *= x / k as f64;
    }
    term * x.exp()
}

/// Everything derived from a perturbation on a fixed truncation.
#[derive(Clone, Debug)]
pub struct PerturbedFrame {
    pub perturbation: ContactPerturbation,
    pub weight: InnerProductWeight,
    pub p_hat: OperatorMatrix,
    /// Eigenvalues of `P` in coordinate order.
    pub lambda: Vec<f64>,
    pub sup_bound: f64,
    pub tail_bound: f64,
}

impl PerturbedFrame {
    pub fn new(pert: &ContactPerturbation, basis: &HarmonicBasis) -> Result<Self> {
        if (basis.n, basis.degree) != (pert.n(), pert.degree()) {
            return Err(Error::InvalidArgument("perturbation and basis live on different truncations".into()));
        }
        let weight = if pert.is_standard() {
            InnerProductWeight::standard(basis.n, basis.degree)
        } else {
            let desc = format!("exp({}Υ), K = {}", basis.n + 1, pert.taylor_depth);
            InnerProductWeight::from_density(basis, &pert.density(basis), desc)?
        };
        let p_hat = OperatorMatrix::critical_perturbed(&weight);
        let lambda = critical_gjms(basis.n, basis.degree).expanded().iter().map(|v| v.to_c64().re).collect();
        Ok(Self {
            perturbation: pert.clone(),
            sup_bound: pert.sup_bound(basis),
            tail_bound: pert.tail_bound(basis),
            weight,
            p_hat,
            lambda,
        })
    }

    pub fn n(&self) -> usize {
        self.weight.n
    }

    pub fn degree(&self) -> u32 {
        self.weight.degree
    }

    pub fn layout(&self) -> BlockLayout {
        self.weight.layout()
    }

    pub fn is_standard(&self) -> bool {
        self.perturbation.is_standard()
    }

    /// `P u` in standard coordinates.
    pub fn apply_p(&self, u: &[Complex64]) -> Vec<Complex64> {
        u.iter().zip(&self.lambda).map(|(c, l)| c * l).collect()
    }
}

/// Random real `Υ` supported in blocks of degree `1..=max_degree`, scaled so that
/// its ambient coefficient ℓ¹ norm (hence `‖Υ‖_∞`) equals `sup`.
pub fn random_perturbation(basis: &HarmonicBasis, max_degree: u32, sup: f64, rng: &mut impl Rng) -> SpectralFunction {
    let layout = basis.layout();
    let mut v = vec![Complex64::new(0.0, 0.0); layout.total];
    for b in &layout.blocks {
        let (p, q) = (b.index.p, b.index.q);
        if p + q == 0 || p + q > max_degree || p > q {
            continue;
        }
        let other = layout.span(b.index.conj()).unwrap().offset;
        for k in 0..b.dim {
            let re = rng.random_range(-1.0..1.0);
            let im = if p == q { 0.0 } else { rng.random_range(-1.0..1.0) };
            let c = Complex64::new(re, im);
            v[b.offset + k] = c;
            v[other + k] = c.conj();
        }
    }
    let f = SpectralFunction::from_float(basis.n, basis.degree, v);
    let l1 = f.to_poly(basis).coefficient_l1();
    let s = Complex64::new(if l1 > 0.0 { sup / l1 } else { 0.0 }, 0.0);
    SpectralFunction::from_float(basis.n, basis.degree, f.to_float_vec().iter().map(|c| c * s).collect())
}

/// `(v + v̄ᶜ)/2`: the nearest real function, in the conjugation pairing of blocks.
pub fn symmetrize_real(f: &SpectralFunction) -> SpectralFunction {
    let layout = f.layout();
    let v = f.to_float_vec();
    let mut out = v.clone();
    for b in &layout.blocks {
        let other = layout.span(b.index.conj()).unwrap().offset;
        for k in 0..b.dim {
            out[b.offset + k] = (v[b.offset + k] + v[other + k].conj()) * 0.5;
        }
    }
    SpectralFunction { coefficients: Coefficients::Float(out), ..f.clone() }
}
