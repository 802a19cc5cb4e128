pub mod error;
pub mod exact;
pub mod heisenberg;
pub mod parametrix;
pub mod qcurv;
pub mod sphere;

pub use error::{Error, Result};
