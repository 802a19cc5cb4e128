//! Partial inverses, Szegő-type projectors and the parametrix chain
//! `G₀, Π₀, R₀, A₀, Π∞, G∞` with the true partial inverse `G` and kernel
//! projection `Π`, in an exact diagonal regime and a dense weighted regime.

pub mod dense;
pub mod diagonal;
pub mod matrix;
pub mod spectrum;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use diagonal::{build_chain_diagonal, partial_inverse, DiagonalChain};
pub use matrix::{build_chain_matrix, spectral_inverse, A0Policy, InnerProductWeight, MatrixChain, OperatorMatrix, SpectralInverse};
pub use spectrum::{spectrum_diagonal, spectrum_matrix, Cluster, Spectrum};

/// Coordinates within this many degrees of `N` are excluded from interior norms.
pub const INTERIOR_MARGIN: u32 = 4;

/// Max-abs entry norm of an identity residual, over the whole truncation and
/// over interior rows and columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub full: f64,
    pub interior: f64,
    /// Set in exact mode: whether the residual is identically zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_zero: Option<bool>,
}

impl Residual {
    pub fn float(full: f64, interior: f64) -> Self {
        Self { full, interior, exact_zero: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Diagnostics(BTreeMap<String, Residual>);

impl Diagnostics {
    pub fn record(&mut self, name: &str, r: Residual) {
        self.0.insert(name.to_string(), r);
    }

    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Residual)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn all_exact_zero(&self) -> bool {
        self.0.values().all(|r| r.exact_zero == Some(true))
    }

    pub fn max_interior(&self) -> f64 {
        self.0.values().map(|r| r.interior).fold(0.0, f64::max)
    }
}

/// Size of the smoothing remainders `R∞ = G∞P + Π∞ − I` and `Π − Π∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub r_inf: Residual,
    pub r_inf_rank: usize,
    pub pi_minus_pi_inf: Residual,
    pub pi_minus_pi_inf_rank: usize,
    pub r0_rank: usize,
}

/// JSON-facing summary of a chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub n: usize,
    pub degree: u32,
    pub mode: String,
    pub perturbation: String,
    pub neumann_depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0_policy: Option<A0Policy>,
    pub ranks: BTreeMap<String, usize>,
    pub residuals: Diagnostics,
    pub smoothing: SmoothingReport,
    pub spectrum: Spectrum,
}
