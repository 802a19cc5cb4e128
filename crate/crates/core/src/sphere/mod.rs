//! The standard CR sphere `S^{2n+1} ⊂ ℂ^{n+1}` and its bigraded harmonics.

pub mod basis;
pub mod diagnostic;
pub mod diagonal;
pub mod export;
pub mod frame;
pub mod integral;
pub mod moments;
pub mod poly;
pub mod spectral;

pub use basis::{harmonic_dimension, BigradedIndex, BlockLayout, HarmonicBasis};
pub use diagnostic::{order_diagnostic, OrderReport};
pub use diagonal::{
    critical_gjms, kohn_laplacian, l_mu, pluriharmonic_proj, reeb_field, reeb_t, sublaplacian, szego, szego_bar,
    DiagonalOperator, OrderTag,
};
pub use integral::{sphere_integral, sphere_integral_f64};
pub use poly::{ExactPoly, FloatPoly, Monomial};
pub use spectral::{SpectralFunction, SpectralTerm};
