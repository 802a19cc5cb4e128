//! The Heisenberg group `ℝ × ℂⁿ` and its left-invariant differential operators.

pub mod forms;
pub mod group;
pub mod op;
pub mod poly;
pub mod selftest;

pub use group::{dilate, group_inv, group_mul, Dilation, GroupElement};
pub use op::{
    apply_op, commutator, compose, formal_adjoint, kohn_laplacian, kohn_laplacian_bar, sublaplacian, Generator,
    Homogeneity, LeftInvariantOp, PbwIndex,
};
pub use poly::{Exponent, PolyFunction, Variable};
