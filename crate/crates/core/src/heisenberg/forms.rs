//! Polynomial-coefficient differential forms in the coordinates
//! `(t, z_1..z_n, z̄_1..z̄_n)`, enough to evaluate the Levi form of `θ⁰`.

use std::collections::BTreeMap;

use super::op::Generator;
use super::poly::{PolyFunction, Variable};
use crate::exact::GaussRational;

fn coordinate(n: usize, k: usize) -> Variable {
    if k == 0 {
        Variable::T
    } else if k <= n {
        Variable::Z(k - 1)
    } else {
        Variable::ZBar(k - 1 - n)
    }
}

/// Coefficients with respect to `∂_t, ∂_{z_α}, ∂_{z̄_α}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub coeffs: Vec<PolyFunction>,
}

impl VectorField {
    pub fn generator(n: usize, g: Generator) -> Self {
        let mut coeffs = vec![PolyFunction::zero(n); 2 * n + 1];
        let one = GaussRational::from_int(1);
        let i = GaussRational::i();
        match g {
            Generator::T => coeffs[0] = PolyFunction::constant(n, one),
            Generator::Z(a) => {
                coeffs[1 + a] = PolyFunction::constant(n, one);
                coeffs[0] = PolyFunction::var(n, Variable::ZBar(a)).scale(&i);
            }
            Generator::ZBar(a) => {
                coeffs[1 + n + a] = PolyFunction::constant(n, one);
                coeffs[0] = PolyFunction::var(n, Variable::Z(a)).scale(&-i);
            }
        }
        Self { coeffs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    pub coeffs: Vec<PolyFunction>,
}

/// `Σ_{k<l} ω_{kl} dx_k ∧ dx_l`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoForm {
    n: usize,
    pub coeffs: BTreeMap<(usize, usize), PolyFunction>,
}

impl OneForm {
    /// `θ⁰ = dt + i Σ (z_α dz̄_α − z̄_α dz_α)`
    pub fn standard_contact(n: usize) -> Self {
        let i = GaussRational::i();
        let mut coeffs = vec![PolyFunction::zero(n); 2 * n + 1];
        coeffs[0] = PolyFunction::constant(n, GaussRational::from_int(1));
        for a in 0..n {
            coeffs[1 + a] = PolyFunction::var(n, Variable::ZBar(a)).scale(&-i.clone());
            coeffs[1 + n + a] = PolyFunction::var(n, Variable::Z(a)).scale(&i);
        }
        Self { coeffs }
    }

    pub fn eval(&self, x: &VectorField) -> PolyFunction {
        let n = (self.coeffs.len() - 1) / 2;
        self.coeffs.iter().zip(&x.coeffs).fold(PolyFunction::zero(n), |s, (a, b)| s + a * b)
    }

    pub fn exterior_derivative(&self) -> TwoForm {
        let m = self.coeffs.len();
        let n = (m - 1) / 2;
        let mut out = TwoForm { n, coeffs: BTreeMap::new() };
        for (l, w) in self.coeffs.iter().enumerate() {
            for k in 0..m {
                if k == l {
                    continue;
                }
                let d = w.derivative(coordinate(n, k));
                if d.is_empty() {
                    continue;
                }
                // ∂_k ω_l dx_k ∧ dx_l
                let (key, d) = if k < l { ((k, l), d) } else { ((l, k), -d) };
                let e = out.coeffs.remove(&key).unwrap_or_else(|| PolyFunction::zero(n));
                let sum = e + d;
                if !sum.is_empty() {
                    out.coeffs.insert(key, sum);
                }
            }
        }
        out
    }
}

impl TwoForm {
    /// `ω(X, Y) = Σ_{k<l} ω_{kl} (X_k Y_l − X_l Y_k)`
    pub fn eval(&self, x: &VectorField, y: &VectorField) -> PolyFunction {
        let mut out = PolyFunction::zero(self.n);
        for (&(k, l), w) in &self.coeffs {
            let det = &x.coeffs[k] * &y.coeffs[l] - &x.coeffs[l] * &y.coeffs[k];
            out = out + w * &det;
        }
        out
    }
}

/// `−i dθ⁰(Z_α, Z̄_β)` as an exact polynomial.
pub fn levi_form_entry(n: usize, alpha: usize, beta: usize) -> PolyFunction {
    let d = OneForm::standard_contact(n).exterior_derivative();
    d.eval(&VectorField::generator(n, Generator::Z(alpha)), &VectorField::generator(n, Generator::ZBar(beta)))
        .scale(&-GaussRational::i())
}
