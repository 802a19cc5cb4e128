use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::poly::{PolyFunction, Variable};
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, GaussRational, Rational};

/// PBW multi-index `(a; β; γ)` for `T^a Z^β Z̄^γ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PbwIndex {
    pub a: u32,
    pub beta: Vec<u32>,
    pub gamma: Vec<u32>,
}

impl PbwIndex {
    pub fn identity(n: usize) -> Self {
        Self { a: 0, beta: vec![0; n], gamma: vec![0; n] }
    }

    /// `2a + |β| + |γ|`
    pub fn degree(&self) -> u32 {
        2 * self.a + self.beta.iter().sum::<u32>() + self.gamma.iter().sum::<u32>()
    }

    fn order(&self) -> u32 {
        self.a + self.beta.iter().sum::<u32>() + self.gamma.iter().sum::<u32>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    T,
    Z(usize),
    ZBar(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Homogeneity {
    Degree(u32),
    Inhomogeneous,
    /// The zero operator is homogeneous of every degree.
    ZeroOperator,
}

/// A left-invariant differential operator, stored in PBW normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftInvariantOp {
    n: usize,
    terms: BTreeMap<PbwIndex, GaussRational>,
}

impl LeftInvariantOp {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::term(PbwIndex::identity(n), GaussRational::from_int(1))
    }

    pub fn term(idx: PbwIndex, c: GaussRational) -> Self {
        let mut op = Self::zero(idx.beta.len());
        op.add_term(idx, c);
        op
    }

    pub fn generator(n: usize, g: Generator) -> Self {
        let mut idx = PbwIndex::identity(n);
        match g {
            Generator::T => idx.a = 1,
            Generator::Z(a) => idx.beta[a] = 1,
            Generator::ZBar(a) => idx.gamma[a] = 1,
        }
        Self::term(idx, GaussRational::from_int(1))
    }

    pub fn t(n: usize) -> Self {
        Self::generator(n, Generator::T)
    }

    pub fn z(n: usize, a: usize) -> Self {
        Self::generator(n, Generator::Z(a))
    }

    pub fn zbar(n: usize, a: usize) -> Self {
        Self::generator(n, Generator::ZBar(a))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwIndex, &GaussRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &PbwIndex) -> GaussRational {
        self.terms.get(idx).cloned().unwrap_or_else(GaussRational::zero)
    }

    fn add_term(&mut self, idx: PbwIndex, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
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
        let mut out = Self::zero(self.n);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn homogeneity_degree(&self) -> Homogeneity {
        let mut degs = self.terms.keys().map(PbwIndex::degree);
        match degs.next() {
            None => Homogeneity::ZeroOperator,
            Some(d) if degs.all(|e| e == d) => Homogeneity::Degree(d),
            Some(_) => Homogeneity::Inhomogeneous,
        }
    }

    /// Order as an ordinary differential operator.
    pub fn differential_order(&self) -> u32 {
        self.terms.keys().map(PbwIndex::order).max().unwrap_or(0)
    }
}

impl Add for LeftInvariantOp {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "operator dimensions differ");
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
        self
    }
}

impl Sub for LeftInvariantOp {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for LeftInvariantOp {
    type Output = Self;
    fn neg(self) -> Self {
        Self { n: self.n, terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect() }
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

fn apply_generator(g: Generator, f: &PolyFunction) -> PolyFunction {
    let n = f.dim();
    let i = GaussRational::i();
    match g {
        Generator::T => f.derivative(Variable::T),
        Generator::Z(a) => {
            let ft = f.derivative(Variable::T);
            f.derivative(Variable::Z(a)) + (&PolyFunction::var(n, Variable::ZBar(a)) * &ft).scale(&i)
        }
        Generator::ZBar(a) => {
            let ft = f.derivative(Variable::T);
            f.derivative(Variable::ZBar(a)) - (&PolyFunction::var(n, Variable::Z(a)) * &ft).scale(&i)
        }
    }
}

/// Applies `L` with `T = ∂_t`, `Z_α = ∂_{z_α} + i z̄_α ∂_t`, `Z̄_α = ∂_{z̄_α} − i z_α ∂_t`.
pub fn apply_op(op: &LeftInvariantOp, f: &PolyFunction) -> Result<PolyFunction> {
    check_dims(op.n, f.dim())?;
    let mut out = PolyFunction::zero(op.n);
    for (idx, c) in &op.terms {
        let mut g = f.clone();
        for (a, &k) in idx.gamma.iter().enumerate() {
            for _ in 0..k {
                g = apply_generator(Generator::ZBar(a), &g);
            }
        }
        for (a, &k) in idx.beta.iter().enumerate() {
            for _ in 0..k {
                g = apply_generator(Generator::Z(a), &g);
            }
        }
        for _ in 0..idx.a {
            g = apply_generator(Generator::T, &g);
        }
        out = out + g.scale(c);
    }
    Ok(out)
}

/// `Z̄^g Z^b = Σ_k k! C(g,k) C(b,k) (2iT)^k Z^{b−k} Z̄^{g−k}` for a single index,
/// from `[Z̄_α, Z_α] = 2i T`. Returns `(k, coefficient)` pairs.
fn reorder_coefficients(g: u32, b: u32) -> Vec<(u32, GaussRational)> {
    let two_i = GaussRational::imag(Rational::from_integer(2.into()));
    (0..=g.min(b))
        .map(|k| {
            let c = factorial(k) * binomial(g, k) * binomial(b, k);
            (k, two_i.pow(k).scale(&Rational::from_integer(c)))
        })
        .collect()
}

fn compose_monomials(x: &PbwIndex, y: &PbwIndex, out: &mut LeftInvariantOp, c: &GaussRational) {
    // x = T^a Z^β Z̄^γ, y = T^a' Z^β' Z̄^γ'; only Z̄^γ Z^β' is out of order,
    // and factors with different indices commute.
    let n = x.beta.len();
    let mut partial: Vec<(u32, Vec<u32>, GaussRational)> = vec![(0, Vec::new(), c.clone())];
    for a in 0..n {
        let choices = reorder_coefficients(x.gamma[a], y.beta[a]);
        let mut next = Vec::with_capacity(partial.len() * choices.len());
        for (tk, ks, coef) in &partial {
            for (k, ck) in &choices {
                let mut ks2 = ks.clone();
                ks2.push(*k);
                next.push((tk + k, ks2, coef * ck));
            }
        }
        partial = next;
    }
    for (tk, ks, coef) in partial {
        let idx = PbwIndex {
            a: x.a + y.a + tk,
            beta: (0..n).map(|a| x.beta[a] + y.beta[a] - ks[a]).collect(),
            gamma: (0..n).map(|a| x.gamma[a] - ks[a] + y.gamma[a]).collect(),
        };
        out.add_term(idx, coef);
    }
}

/// PBW normal form of `L1 ∘ L2`.
pub fn compose(l1: &LeftInvariantOp, l2: &LeftInvariantOp) -> Result<LeftInvariantOp> {
    check_dims(l1.n, l2.n)?;
    let mut out = LeftInvariantOp::zero(l1.n);
    for (x, cx) in &l1.terms {
        for (y, cy) in &l2.terms {
            compose_monomials(x, y, &mut out, &(cx * cy));
        }
    }
    Ok(out)
}

/// `[L1, L2]`
pub fn commutator(l1: &LeftInvariantOp, l2: &LeftInvariantOp) -> Result<LeftInvariantOp> {
    Ok(compose(l1, l2)? - compose(l2, l1)?)
}

/// Formal adjoint for Lebesgue measure: `T* = −T`, `Z_α* = −Z̄_α`, reversed
/// products. `(T^a Z^β Z̄^γ)* = (−1)^{a+|β|+|γ|} T^a Z^γ Z̄^β`, already normal.
pub fn formal_adjoint(op: &LeftInvariantOp) -> LeftInvariantOp {
    let mut out = LeftInvariantOp::zero(op.n);
    for (idx, c) in &op.terms {
        let mut c = c.conj();
        if idx.order() % 2 == 1 {
            c = -c;
        }
        out.add_term(PbwIndex { a: idx.a, beta: idx.gamma.clone(), gamma: idx.beta.clone() }, c);
    }
    out
}

fn sum_of_products(n: usize, first_z: bool) -> LeftInvariantOp {
    let mut out = LeftInvariantOp::zero(n);
    for a in 0..n {
        let (x, y) = if first_z {
            (LeftInvariantOp::z(n, a), LeftInvariantOp::zbar(n, a))
        } else {
            (LeftInvariantOp::zbar(n, a), LeftInvariantOp::z(n, a))
        };
        out = out + compose(&x, &y).expect("same dimension");
    }
    out
}

/// `Δ_b = −½ Σ (Z_α Z̄_α + Z̄_α Z_α)`
pub fn sublaplacian(n: usize) -> LeftInvariantOp {
    let half = GaussRational::from_ratio(-1, 2);
    (sum_of_products(n, true) + sum_of_products(n, false)).scale(&half)
}

/// `□_b = −½ Σ Z_α Z̄_α`, which annihilates functions killed by every `Z̄_α`.
pub fn kohn_laplacian(n: usize) -> LeftInvariantOp {
    sum_of_products(n, true).scale(&GaussRational::from_ratio(-1, 2))
}

/// `□̄_b = −½ Σ Z̄_α Z_α`
pub fn kohn_laplacian_bar(n: usize) -> LeftInvariantOp {
    sum_of_products(n, false).scale(&GaussRational::from_ratio(-1, 2))
}

impl fmt::Display for LeftInvariantOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if idx.a > 0 {
                write!(f, " T^{}", idx.a)?;
            }
            for (a, &k) in idx.beta.iter().enumerate() {
                if k > 0 {
                    write!(f, " Z{}^{k}", a + 1)?;
                }
            }
            for (a, &k) in idx.gamma.iter().enumerate() {
                if k > 0 {
                    write!(f, " Zb{}^{k}", a + 1)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct OpRepr {
    n: usize,
    terms: Vec<OpTermRepr>,
}

#[derive(Serialize, Deserialize)]
struct OpTermRepr {
    a: u32,
    beta: Vec<u32>,
    gamma: Vec<u32>,
    coeff: GaussRational,
}

impl Serialize for LeftInvariantOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OpRepr {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| OpTermRepr { a: k.a, beta: k.beta.clone(), gamma: k.gamma.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LeftInvariantOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = OpRepr::deserialize(d)?;
        let mut op = LeftInvariantOp::zero(r.n);
        for t in r.terms {
            if t.beta.len() != r.n || t.gamma.len() != r.n {
                return Err(serde::de::Error::custom("multi-index length does not match n"));
            }
            op.add_term(PbwIndex { a: t.a, beta: t.beta, gamma: t.gamma }, t.coeff);
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::group::{Dilation, GroupElement};
    use crate::exact::{rat, rat_int};
    use proptest::prelude::*;

    fn spanning(n: usize, d: u32) -> Vec<PolyFunction> {
        PolyFunction::spanning_monomials(n, d)
    }

    /// Composition checked against sequential application.
    fn brute_compose_matches(l1: &LeftInvariantOp, l2: &LeftInvariantOp, d: u32) {
        let c = compose(l1, l2).unwrap();
        for f in spanning(l1.dim(), d) {
            let lhs = apply_op(&c, &f).unwrap();
            let rhs = apply_op(l1, &apply_op(l2, &f).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn generators_on_simple_functions() {
        let t = PolyFunction::var(1, Variable::T);
        let zb = PolyFunction::var(1, Variable::ZBar(0));
        assert_eq!(apply_op(&LeftInvariantOp::t(1), &t).unwrap(), PolyFunction::constant(1, GaussRational::from_int(1)));
        assert_eq!(apply_op(&LeftInvariantOp::z(1, 0), &t).unwrap(), zb.scale(&GaussRational::i()));
        assert!(apply_op(&LeftInvariantOp::z(1, 0), &zb).unwrap().is_empty());
    }

    #[test]
    fn commutator_from_frame() {
        // brute force on the frame, independent of the rewriting rule
        for n in 1..=2 {
            for a in 0..n {
                for b in 0..n {
                    let z = LeftInvariantOp::z(n, a);
                    let zb = LeftInvariantOp::zbar(n, b);
                    for f in spanning(n, 4) {
                        let lhs = apply_op(&z, &apply_op(&zb, &f).unwrap()).unwrap()
                            - apply_op(&zb, &apply_op(&z, &f).unwrap()).unwrap();
                        let expect = if a == b {
                            f.derivative(Variable::T).scale(&GaussRational::imag(rat_int(-2)))
                        } else {
                            PolyFunction::zero(n)
                        };
                        assert_eq!(lhs, expect);
                    }
                }
            }
        }
        let c = commutator(&LeftInvariantOp::z(1, 0), &LeftInvariantOp::zbar(1, 0)).unwrap();
        assert_eq!(c, LeftInvariantOp::t(1).scale(&GaussRational::imag(rat_int(-2))));
    }

    #[test]
    fn t_is_central_on_model_operators() {
        let n = 2;
        let t = LeftInvariantOp::t(n);
        for l in [LeftInvariantOp::z(n, 1), LeftInvariantOp::zbar(n, 0), sublaplacian(n)] {
            assert!(commutator(&t, &l).unwrap().is_zero());
        }
    }

    #[test]
    fn kohn_laplacian_identity() {
        for n in 1..=3 {
            let nt = LeftInvariantOp::t(n).scale(&GaussRational::imag(rat(n as i64, 2)));
            let lhs = sublaplacian(n).scale(&GaussRational::from_ratio(1, 2)) + nt - kohn_laplacian(n);
            assert!(lhs.is_zero());
            assert_eq!(kohn_laplacian(n) + kohn_laplacian_bar(n), sublaplacian(n));
        }
    }

    #[test]
    fn composition_matches_application() {
        let n = 1;
        let l1 = compose(&LeftInvariantOp::zbar(n, 0), &LeftInvariantOp::zbar(n, 0)).unwrap();
        let l2 = compose(&LeftInvariantOp::z(n, 0), &LeftInvariantOp::z(n, 0)).unwrap();
        brute_compose_matches(&l1, &l2, 5);
        brute_compose_matches(&sublaplacian(2), &kohn_laplacian(2), 4);
    }

    #[test]
    fn adjoint_rules() {
        assert_eq!(formal_adjoint(&LeftInvariantOp::t(1)), -LeftInvariantOp::t(1));
        assert_eq!(formal_adjoint(&LeftInvariantOp::z(1, 0)), -LeftInvariantOp::zbar(1, 0));
        assert_eq!(formal_adjoint(&sublaplacian(3)), sublaplacian(3));
        let l = compose(&LeftInvariantOp::z(2, 0), &LeftInvariantOp::zbar(2, 1)).unwrap()
            + LeftInvariantOp::t(2).scale(&GaussRational::new(rat(1, 2), rat(3, 1)));
        assert_eq!(formal_adjoint(&formal_adjoint(&l)), l);
    }

    /// Transpose by integration by parts, one first-order factor at a time,
    /// in coordinates `(t, z, z̄)`.
    fn transpose_generator(g: Generator, h: &PolyFunction) -> PolyFunction {
        let n = h.dim();
        let i = GaussRational::i();
        let ht = h.derivative(Variable::T);
        match g {
            Generator::T => -ht,
            Generator::Z(a) => {
                -h.derivative(Variable::Z(a)) - (&PolyFunction::var(n, Variable::ZBar(a)) * &ht).scale(&i)
            }
            Generator::ZBar(a) => {
                -h.derivative(Variable::ZBar(a)) + (&PolyFunction::var(n, Variable::Z(a)) * &ht).scale(&i)
            }
        }
    }

    fn adjoint_oracle(l: &LeftInvariantOp, g: &PolyFunction) -> PolyFunction {
        let mut out = PolyFunction::zero(g.dim());
        for (idx, c) in l.terms() {
            let mut h = g.conj();
            for _ in 0..idx.a {
                h = transpose_generator(Generator::T, &h);
            }
            for (a, &k) in idx.beta.iter().enumerate() {
                for _ in 0..k {
                    h = transpose_generator(Generator::Z(a), &h);
                }
            }
            for (a, &k) in idx.gamma.iter().enumerate() {
                for _ in 0..k {
                    h = transpose_generator(Generator::ZBar(a), &h);
                }
            }
            out = out + h.conj().scale(&c.conj());
        }
        out
    }

    #[test]
    fn adjoint_by_integration_by_parts() {
        let l = compose(&LeftInvariantOp::z(2, 0), &LeftInvariantOp::zbar(2, 1)).unwrap()
            + kohn_laplacian(2).scale(&GaussRational::new(rat(2, 3), rat(1, 1)))
            + LeftInvariantOp::t(2).scale(&GaussRational::i());
        let adj = formal_adjoint(&l);
        for g in spanning(2, 3) {
            assert_eq!(apply_op(&adj, &g).unwrap(), adjoint_oracle(&l, &g));
        }
    }

    #[test]
    fn homogeneity() {
        assert_eq!(LeftInvariantOp::z(1, 0).homogeneity_degree(), Homogeneity::Degree(1));
        assert_eq!(sublaplacian(1).homogeneity_degree(), Homogeneity::Degree(2));
        assert_eq!((sublaplacian(1) + LeftInvariantOp::z(1, 0)).homogeneity_degree(), Homogeneity::Inhomogeneous);
        assert_eq!(LeftInvariantOp::zero(1).homogeneity_degree(), Homogeneity::ZeroOperator);
    }

    #[test]
    fn homogeneity_matches_dilation_behaviour() {
        let d = Dilation::new(rat_int(3)).unwrap();
        let l = compose(&sublaplacian(1), &LeftInvariantOp::t(1)).unwrap();
        let Homogeneity::Degree(m) = l.homogeneity_degree() else { panic!() };
        let rm = GaussRational::from_int(3i64.pow(m));
        for f in spanning(1, 5) {
            let lhs = apply_op(&l, &f.compose_dilation(&d)).unwrap();
            let rhs = apply_op(&l, &f).unwrap().compose_dilation(&d).scale(&rm);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn serde_roundtrip() {
        let l = kohn_laplacian(2) + LeftInvariantOp::t(2).scale(&GaussRational::new(rat(1, 3), rat(-1, 2)));
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(serde_json::from_str::<LeftInvariantOp>(&s).unwrap(), l);
    }

    fn arb_gauss() -> impl Strategy<Value = GaussRational> {
        (-6i64..6, 1i64..5, -6i64..6, 1i64..5).prop_map(|(a, b, c, d)| GaussRational::new(rat(a, b), rat(c, d)))
    }

    fn arb_op() -> impl Strategy<Value = LeftInvariantOp> {
        prop::collection::vec(((0u32..2), (0u32..3), (0u32..3), arb_gauss()), 1..4).prop_map(|ts| {
            let mut op = LeftInvariantOp::zero(1);
            for (a, b, g, c) in ts {
                op.add_term(PbwIndex { a, beta: vec![b], gamma: vec![g] }, c);
            }
            op
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn pbw_soundness(l1 in arb_op(), l2 in arb_op()) {
            let d = l1.differential_order() + l2.differential_order();
            brute_compose_matches(&l1, &l2, d);
        }

        #[test]
        fn t_central_and_adjoint_antihomomorphism(l1 in arb_op(), l2 in arb_op()) {
            prop_assert!(commutator(&LeftInvariantOp::t(1), &l1).unwrap().is_zero());
            let lhs = formal_adjoint(&compose(&l1, &l2).unwrap());
            let rhs = compose(&formal_adjoint(&l2), &formal_adjoint(&l1)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn left_invariance(t in arb_gauss(), w in arb_gauss()) {
            let g = GroupElement::new(t.re.clone(), vec![w]);
            for l in [LeftInvariantOp::t(1), LeftInvariantOp::z(1, 0), LeftInvariantOp::zbar(1, 0)] {
                for f in spanning(1, 3) {
                    let lhs = apply_op(&l, &f.compose_left_translation(&g)).unwrap();
                    let rhs = apply_op(&l, &f).unwrap().compose_left_translation(&g);
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
