//! Polynomials in `z_0..z_n, z̄_0..z̄_n` on `ℂ^{n+1}`, with `z` and `z̄` as
//! independent variables.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::BuildHasherDefault;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::exact::{GaussRational, Rational};

/// Complex variables supported by the packed monomial (so `n ≤ 3`).
pub const MAX_VARS: usize = 4;

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial {
    pub z: [u8; MAX_VARS],
    pub zbar: [u8; MAX_VARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { z: [0; MAX_VARS], zbar: [0; MAX_VARS] };

    pub fn new(z: &[u8], zbar: &[u8]) -> Self {
        let mut m = Self::ONE;
        m.z[..z.len()].copy_from_slice(z);
        m.zbar[..zbar.len()].copy_from_slice(zbar);
        m
    }

    pub fn z(j: usize) -> Self {
        let mut m = Self::ONE;
        m.z[j] = 1;
        m
    }

    pub fn zbar(j: usize) -> Self {
        let mut m = Self::ONE;
        m.zbar[j] = 1;
        m
    }

    pub fn holo_degree(&self) -> u32 {
        self.z.iter().map(|&k| k as u32).sum()
    }

    pub fn anti_degree(&self) -> u32 {
        self.zbar.iter().map(|&k| k as u32).sum()
    }

    pub fn degree(&self) -> u32 {
        self.holo_degree() + self.anti_degree()
    }

    /// Torus weight `z-exponent − z̄-exponent`.
    pub fn weight(&self) -> [i16; MAX_VARS] {
        std::array::from_fn(|j| self.z[j] as i16 - self.zbar[j] as i16)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial {
            z: std::array::from_fn(|j| self.z[j] + o.z[j]),
            zbar: std::array::from_fn(|j| self.zbar[j] + o.zbar[j]),
        }
    }

    pub fn conj(&self) -> Monomial {
        Monomial { z: self.zbar, zbar: self.z }
    }

    /// True if `z^A z̄^B` with `A = B`, the only monomials with nonzero sphere average.
    pub fn is_balanced(&self) -> bool {
        self.z == self.zbar
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        (0..MAX_VARS).all(|j| self.z[j] <= o.z[j] && self.zbar[j] <= o.zbar[j])
    }
}

pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_u32(k: u32) -> Self;
}

impl Coeff for GaussRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        GaussRational::conj(self)
    }
    fn from_rational(r: &Rational) -> Self {
        GaussRational::real(r.clone())
    }
    fn from_u32(k: u32) -> Self {
        GaussRational::from_int(k as i64)
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_u32(k: u32) -> Self {
        Complex64::new(k as f64, 0.0)
    }
}

type DetMap<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;

/// Sparse polynomial; zero coefficients are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientPoly<C: Coeff> {
    vars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type ExactPoly = AmbientPoly<GaussRational>;
pub type FloatPoly = AmbientPoly<Complex64>;

impl<C: Coeff> AmbientPoly<C> {
    pub fn zero(vars: usize) -> Self {
        assert!(vars <= MAX_VARS, "at most {MAX_VARS} complex variables are supported");
        Self { vars, terms: BTreeMap::new() }
    }

    pub fn monomial(vars: usize, m: Monomial, c: C) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(m, c);
        p
    }

    pub fn one(vars: usize) -> Self {
        Self::monomial(vars, Monomial::ONE, C::from_u32(1))
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.vars);
        for (m, v) in &self.terms {
            out.add_term(*m, v.mul(c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut acc: DetMap<Monomial, C> = DetMap::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let c = c1.mul(c2);
                acc.entry(m1.mul(m2)).and_modify(|e| e.add_assign(&c)).or_insert(c);
            }
        }
        let mut out = Self::zero(self.vars);
        out.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Self { vars: self.vars, terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    /// Swaps `z` with `z̄` and conjugates coefficients.
    pub fn conj(&self) -> Self {
        Self { vars: self.vars, terms: self.terms.iter().map(|(k, c)| (k.conj(), c.conj())).collect() }
    }

    pub fn d_z(&self, j: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (m, c) in &self.terms {
            if m.z[j] > 0 {
                let mut m2 = *m;
                m2.z[j] -= 1;
                out.add_term(m2, c.mul(&C::from_u32(m.z[j] as u32)));
            }
        }
        out
    }

    pub fn d_zbar(&self, j: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (m, c) in &self.terms {
            if m.zbar[j] > 0 {
                let mut m2 = *m;
                m2.zbar[j] -= 1;
                out.add_term(m2, c.mul(&C::from_u32(m.zbar[j] as u32)));
            }
        }
        out
    }

    /// `Σ_j ∂_{z_j} ∂_{z̄_j}`, a quarter of the real Laplacian.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.vars);
        for j in 0..self.vars {
            out = out.add(&self.d_z(j).d_zbar(j));
        }
        out
    }

    /// `|z|² = Σ z_j z̄_j`
    pub fn norm_squared(vars: usize) -> Self {
        let mut out = Self::zero(vars);
        for j in 0..vars {
            let mut m = Monomial::ONE;
            m.z[j] = 1;
            m.zbar[j] = 1;
            out.add_term(m, C::from_u32(1));
        }
        out
    }

    /// Largest `p` and `q` among the terms.
    pub fn bidegree_bound(&self) -> (u32, u32) {
        self.terms.keys().fold((0, 0), |(p, q), m| (p.max(m.holo_degree()), q.max(m.anti_degree())))
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// True if every term has bidegree `(p, q)`.
    pub fn is_bihomogeneous(&self, p: u32, q: u32) -> bool {
        self.terms.keys().all(|m| m.holo_degree() == p && m.anti_degree() == q)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> AmbientPoly<D> {
        let mut out = AmbientPoly::zero(self.vars);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }
}

impl ExactPoly {
    pub fn to_float(&self) -> FloatPoly {
        self.map_coeffs(GaussRational::to_c64)
    }
}

impl FloatPoly {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = *c;
            for j in 0..self.vars {
                v *= z[j].powu(m.z[j] as u32) * z[j].conj().powu(m.zbar[j] as u32);
            }
            s += v;
        }
        s
    }

    /// `Σ |c|`, an upper bound for the sup norm on the unit sphere.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Largest `|Im c|` paired against conjugate terms, zero for real-valued polynomials.
    pub fn imaginary_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| (c - self.coefficient(&m.conj()).conj()).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct TermRepr<C> {
    z: Vec<u8>,
    zbar: Vec<u8>,
    c: C,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct PolyRepr<C> {
    vars: usize,
    terms: Vec<TermRepr<C>>,
}

impl<C: Coeff + serde::Serialize> serde::Serialize for AmbientPoly<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr { z: m.z[..self.vars].to_vec(), zbar: m.zbar[..self.vars].to_vec(), c: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, C: Coeff + serde::Deserialize<'de>> serde::Deserialize<'de> for AmbientPoly<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::<C>::deserialize(d)?;
        if r.vars == 0 || r.vars > MAX_VARS {
            return Err(serde::de::Error::custom("unsupported number of variables"));
        }
        let mut p = AmbientPoly::zero(r.vars);
        for t in r.terms {
            if t.z.len() != r.vars || t.zbar.len() != r.vars {
                return Err(serde::de::Error::custom("exponent length does not match vars"));
            }
            p.add_term(Monomial::new(&t.z, &t.zbar), t.c);
        }
        Ok(p)
    }
}
