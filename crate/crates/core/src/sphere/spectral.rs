//! Coefficient vectors over a truncated harmonic basis.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::basis::{BigradedIndex, BlockLayout, HarmonicBasis};
use super::diagonal::DiagonalOperator;
use super::poly::FloatPoly;
use crate::error::{Error, Result};
use crate::exact::GaussRational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "values")]
pub enum Coefficients {
    Exact(Vec<GaussRational>),
    Float(Vec<Complex64>),
}

/// Coefficients with respect to the normalized basis `u_i / ‖u_i‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    pub n: usize,
    pub degree: u32,
    pub coefficients: Coefficients,
}

/// One `(p, q, index, coefficient)` entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralTerm {
    pub p: u32,
    pub q: u32,
    pub index: usize,
    pub coefficient: GaussRational,
}

impl SpectralFunction {
    pub fn zero_exact(n: usize, degree: u32) -> Self {
        let dim = BlockLayout::new(n, degree).total;
        Self { n, degree, coefficients: Coefficients::Exact(vec![GaussRational::zero(); dim]) }
    }

    pub fn from_float(n: usize, degree: u32, v: Vec<Complex64>) -> Self {
        Self { n, degree, coefficients: Coefficients::Float(v) }
    }

    pub fn from_terms(n: usize, degree: u32, terms: &[SpectralTerm]) -> Result<Self> {
        let layout = BlockLayout::new(n, degree);
        let mut c = vec![GaussRational::zero(); layout.total];
        for t in terms {
            let span = layout.span(BigradedIndex::new(t.p, t.q)).ok_or_else(|| {
                Error::InvalidArgument(format!("block ({}, {}) is outside the truncation N = {degree}", t.p, t.q))
            })?;
            if t.index >= span.dim {
                return Err(Error::InvalidArgument(format!(
                    "index {} out of range for H_({},{}) of dimension {}",
                    t.index, t.p, t.q, span.dim
                )));
            }
            c[span.offset + t.index] += &t.coefficient;
        }
        Ok(Self { n, degree, coefficients: Coefficients::Exact(c) })
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout::new(self.n, self.degree)
    }

    pub fn len(&self) -> usize {
        match &self.coefficients {
            Coefficients::Exact(v) => v.len(),
            Coefficients::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_float_vec(&self) -> Vec<Complex64> {
        match &self.coefficients {
            Coefficients::Exact(v) => v.iter().map(GaussRational::to_c64).collect(),
            Coefficients::Float(v) => v.clone(),
        }
    }

    pub fn exact(&self) -> Option<&[GaussRational]> {
        match &self.coefficients {
            Coefficients::Exact(v) => Some(v),
            Coefficients::Float(_) => None,
        }
    }

    /// Conjugation defect: `max |c_{(q,p),k} − conj(c_{(p,q),k})|`, zero for real functions.
    pub fn real_defect(&self) -> f64 {
        let layout = self.layout();
        let v = self.to_float_vec();
        let mut worst: f64 = 0.0;
        for b in &layout.blocks {
            let other = layout.span(b.index.conj()).expect("conjugate block is in the truncation");
            for k in 0..b.dim {
                worst = worst.max((v[other.offset + k] - v[b.offset + k].conj()).norm());
            }
        }
        worst
    }

    pub fn is_real_exact(&self) -> Option<bool> {
        let v = self.exact()?;
        let layout = self.layout();
        Some(layout.blocks.iter().all(|b| {
            let other = layout.span(b.index.conj()).unwrap();
            (0..b.dim).all(|k| v[other.offset + k] == v[b.offset + k].conj())
        }))
    }

    pub fn apply(&self, d: &DiagonalOperator) -> Self {
        let lam = d.expanded();
        let coefficients = match &self.coefficients {
            Coefficients::Exact(v) => Coefficients::Exact(v.iter().zip(&lam).map(|(a, l)| a * l).collect()),
            Coefficients::Float(v) => Coefficients::Float(v.iter().zip(&lam).map(|(a, l)| a * l.to_c64()).collect()),
        };
        Self { coefficients, ..self.clone() }
    }

    /// Standard `L²(dσ)` norm squared.
    pub fn norm_sqr(&self) -> f64 {
        self.to_float_vec().iter().map(Complex64::norm_sqr).sum()
    }

    /// Ambient polynomial `Σ c_i φ_i` (floating).
    pub fn to_poly(&self, basis: &HarmonicBasis) -> FloatPoly {
        let mut out = FloatPoly::zero(self.n + 1);
        for (c, f) in self.to_float_vec().iter().zip(basis.float_elements()) {
            if *c != Complex64::new(0.0, 0.0) {
                out = out.add(&f.scale(c));
            }
        }
        out
    }

    /// Drops everything above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Result<Self> {
        if max_degree > self.degree {
            return Err(Error::InvalidArgument("cannot truncate to a larger degree".into()));
        }
        let k = BlockLayout::new(self.n, max_degree).total;
        let coefficients = match &self.coefficients {
            Coefficients::Exact(v) => Coefficients::Exact(v[..k].to_vec()),
            Coefficients::Float(v) => Coefficients::Float(v[..k].to_vec()),
        };
        Ok(Self { n: self.n, degree: max_degree, coefficients })
    }

    /// Zero-pads to a larger truncation; coordinates of lower blocks are unchanged.
    pub fn extend(&self, degree: u32) -> Result<Self> {
        if degree < self.degree {
            return Err(Error::InvalidArgument("cannot extend to a smaller degree".into()));
        }
        let k = BlockLayout::new(self.n, degree).total;
        let coefficients = match &self.coefficients {
            Coefficients::Exact(v) => {
                let mut w = v.clone();
                w.resize(k, GaussRational::zero());
                Coefficients::Exact(w)
            }
            Coefficients::Float(v) => {
                let mut w = v.clone();
                w.resize(k, Complex64::new(0.0, 0.0));
                Coefficients::Float(w)
            }
        };
        Ok(Self { n: self.n, degree, coefficients })
    }

    /// Highest block degree carrying a nonzero coefficient.
    pub fn effective_degree(&self) -> u32 {
        let v = self.to_float_vec();
        self.layout()
            .blocks
            .iter()
            .filter(|b| v[b.offset..b.offset + b.dim].iter().any(|c| c.norm() > 0.0))
            .map(|b| b.index.degree())
            .max()
            .unwrap_or(0)
    }
}
