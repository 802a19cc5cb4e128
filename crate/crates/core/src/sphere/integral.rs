//! Normalized integrals over `S^{2n+1} ⊂ ℂ^{n+1}`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use super::poly::{ExactPoly, FloatPoly, Monomial};
use crate::exact::{factorial, GaussRational, Rational};

/// Average of `|z^A|²` over the sphere: `n! A! / (n + |A|)!`.
pub fn monomial_average(n: usize, a: &Monomial) -> Rational {
    let vars = n + 1;
    let mut num = factorial(n as u32);
    let mut total = 0u32;
    for j in 0..vars {
        num *= factorial(a.z[j] as u32);
        total += a.z[j] as u32;
    }
    Rational::new(num, factorial(n as u32 + total))
}

/// Floating form of [`monomial_average`], as a product of factors `≤ 1`.
pub fn monomial_average_f64(n: usize, a: &Monomial) -> f64 {
    let mut v = 1.0;
    let mut k = 0u32;
    for j in 0..=n {
        for c in 1..=a.z[j] as u32 {
            k += 1;
            v *= c as f64 / (n as u32 + k) as f64;
        }
    }
    v
}

/// Normalized sphere average of `f`; only monomials `z^A z̄^A` contribute.
pub fn sphere_integral(n: usize, f: &ExactPoly) -> GaussRational {
    let mut s = GaussRational::zero();
    for (m, c) in f.terms() {
        if m.is_balanced() {
            s += c.scale(&monomial_average(n, m));
        }
    }
    s
}

pub fn sphere_integral_f64(n: usize, f: &FloatPoly) -> Complex64 {
    f.terms().filter(|(m, _)| m.is_balanced()).map(|(m, c)| c * monomial_average_f64(n, m)).sum()
}

/// `⟨f, g⟩ = ∫ f ḡ dσ`
pub fn inner_product(n: usize, f: &ExactPoly, g: &ExactPoly) -> GaussRational {
    // only pairs of terms whose product is balanced contribute
    let mut s = GaussRational::zero();
    let gc = g.conj();
    for (m1, c1) in f.terms() {
        for (m2, c2) in gc.terms() {
            let m = m1.mul(m2);
            if m.is_balanced() {
                s += (c1 * c2).scale(&monomial_average(n, &m));
            }
        }
    }
    s
}

/// Total number of monomials `z^A` with `|A| = d` in `n + 1` variables.
pub fn monomial_count(vars: usize, d: u32) -> BigInt {
    crate::exact::binomial(d + vars as u32 - 1, vars as u32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn normalized_and_selection_rules() {
        assert_eq!(sphere_integral(1, &ExactPoly::one(2)), GaussRational::from_int(1));
        let z1 = ExactPoly::monomial(2, Monomial::z(1), GaussRational::from_int(1));
        assert!(sphere_integral(1, &z1).is_zero());
        let r = ExactPoly::norm_squared(3);
        assert_eq!(sphere_integral(2, &r), GaussRational::from_int(1));
    }

    #[test]
    fn modulus_squared_of_coordinate_by_quadrature() {
        let m = Monomial::new(&[0, 1], &[0, 1]);
        assert_eq!(monomial_average(1, &m), rat(1, 2));
        // S³ in Hopf coordinates: z0 = cos η e^{iφ}, z1 = sin η e^{iψ},
        // measure ∝ sin η cos η dη dφ dψ; the angles integrate out.
        let k = 2000;
        let (mut num, mut den) = (0.0, 0.0);
        for s in 0..k {
            let eta = (s as f64 + 0.5) * std::f64::consts::FRAC_PI_2 / k as f64;
            let w = eta.sin() * eta.cos();
            num += w * eta.sin().powi(2);
            den += w;
        }
        assert!((num / den - 0.5).abs() < 1e-6);
    }

    #[test]
    fn float_average_matches_exact() {
        for (a, b) in [(0u8, 0u8), (3, 2), (7, 9), (1, 16)] {
            let m = Monomial::new(&[a, b], &[a, b]);
            let exact = crate::exact::GaussRational::real(monomial_average(1, &m)).to_c64().re;
            assert!((monomial_average_f64(1, &m) / exact - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn unitary_invariance_sample() {
        // |z0 + z1|² / 2 has the same average as |z0|²
        let h = GaussRational::from_ratio(1, 2);
        let mut f = ExactPoly::zero(2);
        for a in 0..2 {
            for b in 0..2 {
                let mut m = Monomial::ONE;
                m.z[a] += 1;
                m.zbar[b] += 1;
                f.add_term(m, h.clone());
            }
        }
        let g = ExactPoly::monomial(2, Monomial::new(&[1, 0], &[1, 0]), GaussRational::from_int(1));
        assert_eq!(sphere_integral(1, &f), sphere_integral(1, &g));
    }
}
