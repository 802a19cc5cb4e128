//! Explicit CR frame on `S³ ⊂ ℂ²`, applied symbolically to ambient polynomials.
//!
//! `Z = 2(z̄_1 ∂_0 − z̄_0 ∂_1)`, `Z̄ = 2(z_1 ∂̄_0 − z_0 ∂̄_1)`,
//! `T = 2i Σ (z_j ∂_j − z̄_j ∂̄_j)`, for the contact form
//! `θ = (i/4) Σ (z_j dz̄_j − z̄_j dz_j)`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::basis::{BigradedIndex, HarmonicBasis};
use super::poly::{ExactPoly, Monomial};
use crate::exact::{GaussRational, Rational};

fn var(m: Monomial) -> ExactPoly {
    ExactPoly::monomial(2, m, GaussRational::from_int(1))
}

pub fn frame_z(f: &ExactPoly) -> ExactPoly {
    let two = GaussRational::from_int(2);
    f.d_z(0).mul(&var(Monomial::zbar(1))).sub(&f.d_z(1).mul(&var(Monomial::zbar(0)))).scale(&two)
}

pub fn frame_zbar(f: &ExactPoly) -> ExactPoly {
    let two = GaussRational::from_int(2);
    f.d_zbar(0).mul(&var(Monomial::z(1))).sub(&f.d_zbar(1).mul(&var(Monomial::z(0)))).scale(&two)
}

pub fn frame_t(f: &ExactPoly) -> ExactPoly {
    let mut out = ExactPoly::zero(2);
    for j in 0..2 {
        out = out.add(&f.d_z(j).mul(&var(Monomial::z(j))));
        out = out.sub(&f.d_zbar(j).mul(&var(Monomial::zbar(j))));
    }
    out.scale(&GaussRational::imag(Rational::from_integer(2.into())))
}

/// `Δ_b = −½ (Z Z̄ + Z̄ Z)`
pub fn frame_sublaplacian(f: &ExactPoly) -> ExactPoly {
    frame_z(&frame_zbar(f)).add(&frame_zbar(&frame_z(f))).scale(&GaussRational::from_ratio(-1, 2))
}

/// `□_b = −½ Z Z̄`
pub fn frame_kohn(f: &ExactPoly) -> ExactPoly {
    frame_z(&frame_zbar(f)).scale(&GaussRational::from_ratio(-1, 2))
}

/// `L_μ = ½Δ_b + (i/2) μ T`
pub fn frame_l_mu(f: &ExactPoly, mu: &Rational) -> ExactPoly {
    let half = GaussRational::from_ratio(1, 2);
    frame_sublaplacian(f).scale(&half).add(&frame_t(f).scale(&GaussRational::imag(mu / Rational::from_integer(2.into()))))
}

/// The scalar `λ` with `g = λ f`, if there is one.
pub fn eigenvalue_of(f: &ExactPoly, g: &ExactPoly) -> Option<GaussRational> {
    let (m, c) = f.terms().next()?;
    let lambda = &g.coefficient(m) * &c.inv()?;
    (f.scale(&lambda) == *g).then_some(lambda)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameBlockCheck {
    pub index: BigradedIndex,
    pub lambda_deltab: Option<GaussRational>,
    pub lambda_it: Option<GaussRational>,
    pub lambda_kohn: Option<GaussRational>,
    pub l_plus_vanishes: bool,
    pub l_minus_vanishes: bool,
}

/// Applies the frame to every element of every block with `p + q ≤ max_degree`
/// and records the common eigenvalue, or `None` if the elements disagree.
pub fn frame_eigen_check(basis: &HarmonicBasis, max_degree: u32) -> Vec<FrameBlockCheck> {
    assert_eq!(basis.n, 1, "the explicit frame lives on S³");
    let one = Rational::from_integer(1.into());
    let common = |vals: Vec<Option<GaussRational>>| -> Option<GaussRational> {
        let first = vals.first()?.clone()?;
        vals.iter().all(|v| v.as_ref() == Some(&first)).then_some(first)
    };
    basis
        .blocks
        .iter()
        .filter(|b| b.index.degree() <= max_degree)
        .map(|b| {
            let polys: Vec<&ExactPoly> = b.elements.iter().map(|e| &e.poly).collect();
            let it = |f: &ExactPoly| frame_t(f).scale(&GaussRational::i());
            FrameBlockCheck {
                index: b.index,
                lambda_deltab: common(polys.iter().map(|f| eigenvalue_of(f, &frame_sublaplacian(f))).collect()),
                lambda_it: common(polys.iter().map(|f| eigenvalue_of(f, &it(f))).collect()),
                lambda_kohn: common(polys.iter().map(|f| eigenvalue_of(f, &frame_kohn(f))).collect()),
                l_plus_vanishes: polys.iter().all(|f| frame_l_mu(f, &one).is_empty()),
                l_minus_vanishes: polys.iter().all(|f| frame_l_mu(f, &-one.clone()).is_empty()),
            }
        })
        .collect()
}

/// Contact-form and Levi-form normalization of the frame, as polynomials:
/// `θ(T)`, `−i dθ(Z, Z̄)`, `θ(Z)`, `θ(Z̄)`, `dθ(T, Z)`, `dθ(T, Z̄)`.
pub fn frame_normalization() -> [ExactPoly; 6] {
    // vector fields as coefficients on (∂_0, ∂_1, ∂̄_0, ∂̄_1)
    let zero = ExactPoly::zero(2);
    let two = GaussRational::from_int(2);
    let two_i = GaussRational::imag(Rational::from_integer(2.into()));
    let z = [var(Monomial::z(0)), var(Monomial::z(1))];
    let zb = [var(Monomial::zbar(0)), var(Monomial::zbar(1))];
    let fz = [zb[1].scale(&two), zb[0].scale(&-two.clone()), zero.clone(), zero.clone()];
    let fzb = [zero.clone(), zero.clone(), z[1].scale(&two), z[0].scale(&-two.clone())];
    let ft = [z[0].scale(&two_i), z[1].scale(&two_i), zb[0].scale(&-two_i.clone()), zb[1].scale(&-two_i.clone())];
    let quarter_i = GaussRational::imag(crate::exact::rat(1, 4));
    // θ = (i/4) Σ (z_j dz̄_j − z̄_j dz_j)
    let theta = [zb[0].scale(&-quarter_i.clone()), zb[1].scale(&-quarter_i.clone()), z[0].scale(&quarter_i), z[1].scale(&quarter_i)];
    let eval1 = |x: &[ExactPoly; 4]| (0..4).fold(ExactPoly::zero(2), |s, k| s.add(&theta[k].mul(&x[k])));
    // dθ = (i/2) Σ dz_j ∧ dz̄_j
    let half_i = GaussRational::imag(crate::exact::rat(1, 2));
    let eval2 = |x: &[ExactPoly; 4], y: &[ExactPoly; 4]| {
        (0..2)
            .fold(ExactPoly::zero(2), |s, j| s.add(&x[j].mul(&y[2 + j]).sub(&x[2 + j].mul(&y[j]))))
            .scale(&half_i)
    };
    [
        eval1(&ft),
        eval2(&fz, &fzb).scale(&-GaussRational::i()),
        eval1(&fz),
        eval1(&fzb),
        eval2(&ft, &fz),
        eval2(&ft, &fzb),
    ]
}

/// True if `∫ X(h) dσ = 0` for `X ∈ {Z, Z̄}` and every monomial `h` of degree `≤ d`.
pub fn frame_is_divergence_free(d: u32) -> bool {
    use super::basis::bidegree_monomials;
    use super::integral::sphere_integral;
    (0..=d).all(|k| {
        (0..=k).all(|p| {
            bidegree_monomials(2, p, k - p).into_iter().all(|m| {
                let h = var(m);
                sphere_integral(1, &frame_z(&h)).is_zero() && sphere_integral(1, &frame_zbar(&h)).is_zero()
            })
        })
    })
}
