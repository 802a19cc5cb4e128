use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::group::{Dilation, GroupElement};
use crate::exact::{GaussRational, Rational};

/// Exponents of the monomial `t^t z^z z̄^zbar`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Exponent {
    pub t: u32,
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
}

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Self { t: 0, z: vec![0; n], zbar: vec![0; n] }
    }

    pub fn total_degree(&self) -> u32 {
        self.t + self.z.iter().sum::<u32>() + self.zbar.iter().sum::<u32>()
    }

    /// Degree under the parabolic grading (`t` counts twice).
    pub fn parabolic_degree(&self) -> u32 {
        2 * self.t + self.z.iter().sum::<u32>() + self.zbar.iter().sum::<u32>()
    }

    fn add(&self, other: &Exponent) -> Exponent {
        Exponent {
            t: self.t + other.t,
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
            zbar: self.zbar.iter().zip(&other.zbar).map(|(a, b)| a + b).collect(),
        }
    }
}

/// A polynomial in `(t, z, z̄)` on the Heisenberg group, with `z` and `z̄`
/// treated as independent (Wirtinger) variables. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFunction {
    n: usize,
    terms: BTreeMap<Exponent, GaussRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    T,
    Z(usize),
    ZBar(usize),
}

impl PolyFunction {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: GaussRational) -> Self {
        Self::monomial(Exponent::zero(n), c)
    }

    pub fn monomial(e: Exponent, c: GaussRational) -> Self {
        let n = e.z.len();
        let mut p = Self::zero(n);
        p.add_term(e, c);
        p
    }

    pub fn var(n: usize, v: Variable) -> Self {
        let mut e = Exponent::zero(n);
        match v {
            Variable::T => e.t = 1,
            Variable::Z(a) => e.z[a] = 1,
            Variable::ZBar(a) => e.zbar[a] = 1,
        }
        Self::monomial(e, GaussRational::from_int(1))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &GaussRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &Exponent) -> GaussRational {
        self.terms.get(e).cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn add_term(&mut self, e: Exponent, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self { n: self.n, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn derivative(&self, v: Variable) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = match v {
                Variable::T => &mut e2.t,
                Variable::Z(a) => &mut e2.z[a],
                Variable::ZBar(a) => &mut e2.zbar[a],
            };
            if *k == 0 {
                continue;
            }
            let power = *k as i64;
            *k -= 1;
            out.add_term(e2, c * &GaussRational::from_int(power));
        }
        out
    }

    /// `f ∘ δ_r`
    pub fn compose_dilation(&self, d: &Dilation) -> Self {
        let r = d.factor();
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut s = Rational::from_integer(1.into());
            for _ in 0..e.parabolic_degree() {
                s *= r;
            }
            out.add_term(e.clone(), c.scale(&s));
        }
        out
    }

    /// `f ∘ l_g`, i.e. `(t, z) ↦ f(g · (t, z))`.
    pub fn compose_left_translation(&self, g: &GroupElement) -> Self {
        let n = self.n;
        assert_eq!(g.dim(), n, "translation by an element of the wrong dimension");
        // t ↦ s + t + 2 Im(w · z̄) = s + t − i Σ (w_a z̄_a − w̄_a z_a)
        let mut t_img = Self::var(n, Variable::T) + Self::constant(n, GaussRational::real(g.t.clone()));
        let i = GaussRational::i();
        for a in 0..n {
            t_img = t_img - Self::var(n, Variable::ZBar(a)).scale(&(&i * &g.z[a]))
                + Self::var(n, Variable::Z(a)).scale(&(&i * &g.z[a].conj()));
        }
        let z_img: Vec<Self> =
            (0..n).map(|a| Self::var(n, Variable::Z(a)) + Self::constant(n, g.z[a].clone())).collect();
        let zb_img: Vec<Self> =
            (0..n).map(|a| Self::var(n, Variable::ZBar(a)) + Self::constant(n, g.z[a].conj())).collect();
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let mut term = Self::constant(n, c.clone());
            term = &term * &t_img.pow(e.t);
            for a in 0..n {
                term = &term * &z_img[a].pow(e.z[a]);
                term = &term * &zb_img[a].pow(e.zbar[a]);
            }
            out = out + term;
        }
        out
    }

    /// Complex conjugate: swaps `z` and `z̄` and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(Exponent { t: e.t, z: e.zbar.clone(), zbar: e.z.clone() }, c.conj());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.n, GaussRational::from_int(1));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Every monomial `t^a z^β z̄^γ` of total degree at most `max_degree`.
    pub fn spanning_monomials(n: usize, max_degree: u32) -> Vec<PolyFunction> {
        let mut out = Vec::new();
        let nvars = 2 * n + 1;
        let mut exps = vec![0u32; nvars];
        fn rec(k: usize, left: u32, exps: &mut Vec<u32>, n: usize, out: &mut Vec<PolyFunction>) {
            if k == exps.len() {
                let e = Exponent { t: exps[0], z: exps[1..=n].to_vec(), zbar: exps[n + 1..].to_vec() };
                out.push(PolyFunction::monomial(e, GaussRational::from_int(1)));
                return;
            }
            for d in 0..=left {
                exps[k] = d;
                rec(k + 1, left - d, exps, n, out);
            }
            exps[k] = 0;
        }
        rec(0, max_degree, &mut exps, n, &mut out);
        out
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms.keys().map(Exponent::total_degree).max().unwrap_or(0)
    }
}

impl Add for PolyFunction {
    type Output = PolyFunction;
    fn add(mut self, rhs: PolyFunction) -> PolyFunction {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for PolyFunction {
    type Output = PolyFunction;
    fn sub(mut self, rhs: PolyFunction) -> PolyFunction {
        for (e, c) in rhs.terms {
            self.add_term(e, -c);
        }
        self
    }
}

impl Neg for PolyFunction {
    type Output = PolyFunction;
    fn neg(self) -> PolyFunction {
        PolyFunction { n: self.n, terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl<'a> Mul<&'a PolyFunction> for &'a PolyFunction {
    type Output = PolyFunction;
    fn mul(self, rhs: &PolyFunction) -> PolyFunction {
        let mut out = PolyFunction::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        out
    }
}

/// Serialized form: a list of `{t, z, zbar, coeff}` entries.
#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    t: u32,
    z: Vec<u32>,
    zbar: Vec<u32>,
    coeff: GaussRational,
}

impl Serialize for PolyFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr { t: e.t, z: e.z.clone(), zbar: e.zbar.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        let mut p = PolyFunction::zero(r.n);
        for t in r.terms {
            if t.z.len() != r.n || t.zbar.len() != r.n {
                return Err(serde::de::Error::custom("exponent length does not match n"));
            }
            p.add_term(Exponent { t: t.t, z: t.z, zbar: t.zbar }, t.coeff);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    #[test]
    fn cancellation_keeps_canonical_form() {
        let x = PolyFunction::var(1, Variable::T);
        let p = x.clone() - x;
        assert!(p.is_empty());
    }

    #[test]
    fn product_and_derivative() {
        let t = PolyFunction::var(1, Variable::T);
        let z = PolyFunction::var(1, Variable::Z(0));
        let f = &(&t * &t) * &z;
        let df = f.derivative(Variable::T);
        let mut e = Exponent::zero(1);
        e.t = 1;
        e.z[0] = 1;
        assert_eq!(df, PolyFunction::monomial(e, GaussRational::from_int(2)));
        assert!(f.derivative(Variable::ZBar(0)).is_empty());
    }

    #[test]
    fn dilation_scales_by_parabolic_degree() {
        let t = PolyFunction::var(1, Variable::T);
        let d = Dilation::new(rat_int(3)).unwrap();
        assert_eq!(t.compose_dilation(&d), t.scale(&GaussRational::from_int(9)));
    }

    #[test]
    fn spanning_set_size() {
        // monomials of degree ≤ 2 in 3 variables
        assert_eq!(PolyFunction::spanning_monomials(1, 2).len(), 10);
    }

    #[test]
    fn serde_roundtrip() {
        let f = PolyFunction::var(2, Variable::ZBar(1)).scale(&GaussRational::new(rat_int(1), rat_int(-2)))
            + PolyFunction::constant(2, GaussRational::from_ratio(1, 3));
        let s = serde_json::to_string(&f).unwrap();
        let g: PolyFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
