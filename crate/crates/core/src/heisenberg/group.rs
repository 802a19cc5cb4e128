use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational_serde, GaussRational, Rational};

/// A point `(t, z) ∈ ℝ × ℂⁿ` of the Heisenberg group with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElement {
    #[serde(with = "rational_serde")]
    pub t: Rational,
    pub z: Vec<GaussRational>,
}

impl GroupElement {
    pub fn new(t: Rational, z: Vec<GaussRational>) -> Self {
        Self { t, z }
    }

    pub fn identity(n: usize) -> Self {
        Self { t: Rational::zero(), z: vec![GaussRational::zero(); n] }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn is_identity(&self) -> bool {
        self.t.is_zero() && self.z.iter().all(Zero::is_zero)
    }
}

/// `2 Im(z · z̄′)`
fn twist(z: &[GaussRational], w: &[GaussRational]) -> Rational {
    let two = Rational::from_integer(2.into());
    z.iter().zip(w).map(|(a, b)| (a * &b.conj()).im).fold(Rational::zero(), |s, x| s + x) * two
}

/// `(t, z) · (t′, z′) = (t + t′ + 2 Im(z · z̄′), z + z′)`
pub fn group_mul(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    if g.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: h.dim() });
    }
    let t = &g.t + &h.t + twist(&g.z, &h.z);
    let z = g.z.iter().zip(&h.z).map(|(a, b)| a + b).collect();
    Ok(GroupElement { t, z })
}

/// `(t, z)⁻¹ = (−t, −z)`; the twist term vanishes because `Im(z · z̄) = 0`.
pub fn group_inv(g: &GroupElement) -> GroupElement {
    GroupElement { t: -g.t.clone(), z: g.z.iter().map(|a| -a).collect() }
}

/// A parabolic dilation `δ_r(t, z) = (r² t, r z)` with `r > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dilation {
    r: Rational,
}

impl Dilation {
    pub fn new(r: Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::InvalidArgument(format!("dilation factor must be positive, got {r}")));
        }
        Ok(Self { r })
    }

    pub fn factor(&self) -> &Rational {
        &self.r
    }

    pub fn then(&self, other: &Dilation) -> Dilation {
        Dilation { r: &self.r * &other.r }
    }

    pub fn is_identity(&self) -> bool {
        self.r.is_one()
    }
}

pub fn dilate(d: &Dilation, g: &GroupElement) -> GroupElement {
    let r = d.factor();
    GroupElement { t: r * r * &g.t, z: g.z.iter().map(|a| a.scale(r)).collect() }
}
