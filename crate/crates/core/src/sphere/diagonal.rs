//! Operators acting by a scalar on each `H_{p,q}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::basis::{indices_up_to, BigradedIndex, BlockLayout};
use crate::exact::{rat_int, GaussRational, Rational};

/// Claimed Heisenberg order; finite-rank operators are smoothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderTag {
    Order(i32),
    Smoothing,
}

impl OrderTag {
    fn combine(self, o: OrderTag) -> OrderTag {
        match (self, o) {
            (OrderTag::Order(a), OrderTag::Order(b)) => OrderTag::Order(a + b),
            _ => OrderTag::Smoothing,
        }
    }

    fn max(self, o: OrderTag) -> OrderTag {
        match (self, o) {
            (OrderTag::Order(a), OrderTag::Order(b)) => OrderTag::Order(a.max(b)),
            (OrderTag::Smoothing, x) | (x, OrderTag::Smoothing) => x,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalOperator {
    pub n: usize,
    pub degree: u32,
    pub label: String,
    pub order: OrderTag,
    eigen: BTreeMap<BigradedIndex, GaussRational>,
}

impl DiagonalOperator {
    pub fn from_fn(
        n: usize,
        degree: u32,
        label: impl Into<String>,
        order: OrderTag,
        f: impl Fn(u32, u32) -> GaussRational,
    ) -> Self {
        let eigen = indices_up_to(degree).into_iter().map(|i| (i, f(i.p, i.q))).collect();
        Self { n, degree, label: label.into(), order, eigen }
    }

    fn real_fn(n: usize, degree: u32, label: &str, order: OrderTag, f: impl Fn(i64, i64) -> Rational) -> Self {
        Self::from_fn(n, degree, label, order, |p, q| GaussRational::real(f(p as i64, q as i64)))
    }

    pub fn identity(n: usize, degree: u32) -> Self {
        Self::real_fn(n, degree, "I", OrderTag::Order(0), |_, _| Rational::one())
    }

    pub fn zero(n: usize, degree: u32) -> Self {
        Self::real_fn(n, degree, "0", OrderTag::Smoothing, |_, _| Rational::zero())
    }

    pub fn eigenvalue(&self, p: u32, q: u32) -> &GaussRational {
        &self.eigen[&BigradedIndex::new(p, q)]
    }

    pub fn get(&self, idx: BigradedIndex) -> &GaussRational {
        &self.eigen[&idx]
    }

    pub fn table(&self) -> impl Iterator<Item = (&BigradedIndex, &GaussRational)> {
        self.eigen.iter()
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout::new(self.n, self.degree)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_order(mut self, order: OrderTag) -> Self {
        self.order = order;
        self
    }

    fn zip(&self, o: &Self, f: impl Fn(&GaussRational, &GaussRational) -> GaussRational) -> BTreeMap<BigradedIndex, GaussRational> {
        assert_eq!((self.n, self.degree), (o.n, o.degree), "diagonal operators on different truncations");
        self.eigen.iter().map(|(k, v)| (*k, f(v, &o.eigen[k]))).collect()
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            degree: self.degree,
            label: format!("{}·{}", self.label, o.label),
            order: self.order.combine(o.order),
            eigen: self.zip(o, |a, b| a * b),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            degree: self.degree,
            label: format!("{}+{}", self.label, o.label),
            order: self.order.max(o.order),
            eigen: self.zip(o, |a, b| a + b),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            degree: self.degree,
            label: format!("{}-{}", self.label, o.label),
            order: self.order.max(o.order),
            eigen: self.zip(o, |a, b| a - b),
        }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Self { eigen: self.eigen.iter().map(|(k, v)| (*k, v * c)).collect(), ..self.clone() }
    }

    /// Adjoint for the standard inner product: conjugated eigenvalues.
    pub fn adjoint(&self) -> Self {
        Self { eigen: self.eigen.iter().map(|(k, v)| (*k, v.conj())).collect(), ..self.clone() }
    }

    /// Formally self-adjoint iff every eigenvalue is real.
    pub fn is_self_adjoint(&self) -> bool {
        self.eigen.values().all(GaussRational::is_real)
    }

    pub fn is_zero(&self) -> bool {
        self.eigen.values().all(Zero::is_zero)
    }

    /// `1/λ` off the kernel and `0` on it.
    pub fn partial_inverse(&self) -> Self {
        let order = match self.order {
            OrderTag::Order(m) => OrderTag::Order(-m),
            OrderTag::Smoothing => OrderTag::Smoothing,
        };
        Self {
            label: format!("N[{}]", self.label),
            order,
            eigen: self
                .eigen
                .iter()
                .map(|(k, v)| (*k, v.inv().unwrap_or_else(GaussRational::zero)))
                .collect(),
            ..self.clone()
        }
    }

    /// Blockwise inverse; `None` if some eigenvalue vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let eigen = self.eigen.iter().map(|(k, v)| v.inv().map(|x| (*k, x))).collect::<Option<_>>()?;
        Some(Self { label: format!("({})^-1", self.label), eigen, ..self.clone() })
    }

    pub fn kernel_blocks(&self) -> Vec<BigradedIndex> {
        self.eigen.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| *k).collect()
    }

    /// Rank on the truncation: total dimension of the blocks with `λ ≠ 0`.
    pub fn rank(&self) -> usize {
        self.layout()
            .blocks
            .iter()
            .filter(|b| !self.eigen[&b.index].is_zero())
            .map(|b| b.dim)
            .sum()
    }

    /// Largest `|λ|` over blocks of degree `≤ max_degree`.
    pub fn max_abs_up_to(&self, max_degree: u32) -> f64 {
        self.eigen
            .iter()
            .filter(|(k, _)| k.degree() <= max_degree)
            .map(|(_, v)| v.to_c64().norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues repeated by block dimension, in coordinate order.
    pub fn expanded(&self) -> Vec<GaussRational> {
        self.layout()
            .blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(self.eigen[&b.index].clone(), b.dim))
            .collect()
    }
}

fn nz(n: usize) -> i64 {
    n as i64
}

/// `iT`, eigenvalue `2(q − p)`.
pub fn reeb_t(n: usize, degree: u32) -> DiagonalOperator {
    DiagonalOperator::real_fn(n, degree, "iT", OrderTag::Order(2), |p, q| rat_int(2 * (q - p)))
}

/// `T` itself, eigenvalue `2i(p − q)`; skew-adjoint.
pub fn reeb_field(n: usize, degree: u32) -> DiagonalOperator {
    DiagonalOperator::from_fn(n, degree, "T", OrderTag::Order(2), |p, q| {
        GaussRational::imag(rat_int(2 * (p as i64 - q as i64)))
    })
}

/// `Δ_b`, eigenvalue `4pq + 2n(p + q)`.
pub fn sublaplacian(n: usize, degree: u32) -> DiagonalOperator {
    DiagonalOperator::real_fn(n, degree, "Δb", OrderTag::Order(2), |p, q| rat_int(4 * p * q + 2 * nz(n) * (p + q)))
}

/// `□_b`, eigenvalue `2q(p + n)`.
pub fn kohn_laplacian(n: usize, degree: u32) -> DiagonalOperator {
    DiagonalOperator::real_fn(n, degree, "□b", OrderTag::Order(2), |p, q| rat_int(2 * q * (p + nz(n))))
}

/// `L_μ = ½Δ_b + (i/2)μT`, eigenvalue `2pq + n(p + q) + μ(q − p)`.
pub fn l_mu(n: usize, degree: u32, mu: &Rational) -> DiagonalOperator {
    DiagonalOperator::real_fn(n, degree, &format!("L[{mu}]"), OrderTag::Order(2), |p, q| {
        rat_int(2 * p * q + nz(n) * (p + q)) + mu * rat_int(q - p)
    })
}

/// `P = L_{−n} L_{−n+2} ⋯ L_n`, of order `2n + 2`.
pub fn critical_gjms(n: usize, degree: u32) -> DiagonalOperator {
    let mut out = DiagonalOperator::identity(n, degree);
    for k in 0..=n {
        out = out.compose(&l_mu(n, degree, &rat_int(nz(n) - 2 * k as i64)));
    }
    out.with_label("P").with_order(OrderTag::Order(2 * n as i32 + 2))
}

fn indicator(n: usize, degree: u32, label: &str, f: impl Fn(u32, u32) -> bool) -> DiagonalOperator {
    DiagonalOperator::from_fn(n, degree, label, OrderTag::Order(0), |p, q| {
        GaussRational::from_int(if f(p, q) { 1 } else { 0 })
    })
}

/// Szegő projection onto `Ker □_b` (the `q = 0` blocks).
pub fn szego(n: usize, degree: u32) -> DiagonalOperator {
    indicator(n, degree, "S", |_, q| q == 0)
}

pub fn szego_bar(n: usize, degree: u32) -> DiagonalOperator {
    indicator(n, degree, "S̄", |p, _| p == 0)
}

/// Projection onto the pluriharmonic blocks `p·q = 0`.
pub fn pluriharmonic_proj(n: usize, degree: u32) -> DiagonalOperator {
    indicator(n, degree, "π", |p, q| p * q == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(v: i64) -> GaussRational {
        GaussRational::from_int(v)
    }

    #[test]
    fn sample_eigenvalues() {
        let (n, d) = (1, 6);
        assert_eq!(*sublaplacian(n, d).eigenvalue(1, 1), g(8));
        assert_eq!(*reeb_t(n, d).eigenvalue(1, 0), g(-2));
        assert_eq!(*l_mu(n, d, &rat_int(1)).eigenvalue(1, 0), g(0));
        assert_eq!(*l_mu(n, d, &rat_int(0)).eigenvalue(1, 1), g(4));
        let p = critical_gjms(n, d);
        assert_eq!(*p.eigenvalue(1, 1), g(16));
        assert_eq!(*p.eigenvalue(2, 1), g(48));
        assert_eq!(p.order, OrderTag::Order(4));
        assert_eq!(*p.partial_inverse().eigenvalue(1, 1), GaussRational::from_ratio(1, 16));
    }

    #[test]
    fn kernel_of_p_is_pluriharmonic() {
        for n in 1..=3 {
            let p = critical_gjms(n, 8);
            let mut ker = p.kernel_blocks();
            ker.sort();
            let mut ph: Vec<_> = indices_up_to(8).into_iter().filter(BigradedIndex::is_pluriharmonic).collect();
            ph.sort();
            assert_eq!(ker, ph);
            assert!(p.is_self_adjoint());
        }
    }

    #[test]
    fn projector_relations() {
        let (n, d) = (2, 7);
        let (s, sb, pi) = (szego(n, d), szego_bar(n, d), pluriharmonic_proj(n, d));
        assert!(s.add(&sb).sub(&s.compose(&sb)).table().eq(pi.table()));
        let ssb = s.compose(&sb);
        assert_eq!(ssb.rank(), 1);
        assert_eq!(*ssb.eigenvalue(0, 0), g(1));
        assert_eq!(*s.add(&sb).eigenvalue(0, 0), g(2));
        assert_eq!(*pi.eigenvalue(2, 1), g(0));
    }

    #[test]
    fn kohn_identity_and_symmetry() {
        let (n, d) = (3, 9);
        let half = GaussRational::from_ratio(1, 2);
        let lhs = sublaplacian(n, d).scale(&half).add(&reeb_t(n, d).scale(&GaussRational::from_ratio(n as i64, 2)));
        assert_eq!(lhs.with_label(""), kohn_laplacian(n, d).with_label(""));
        for (k, v) in sublaplacian(n, d).table() {
            assert_eq!(v, sublaplacian(n, d).get(k.conj()));
            assert_eq!(reeb_t(n, d).get(*k), &-reeb_t(n, d).get(k.conj()));
        }
        assert!(!reeb_field(n, d).is_self_adjoint());
        assert_eq!(reeb_field(n, d).adjoint(), reeb_field(n, d).scale(&g(-1)));
    }

    proptest! {
        #[test]
        fn frame_independent_closed_forms(n in 1usize..4, p in 0u32..12, q in 0u32..12) {
            let d = p + q;
            let pval = critical_gjms(n, d).eigenvalue(p, q).clone();
            let prod: Rational = (0..=n as i64)
                .map(|k| rat_int(2 * p as i64 * q as i64 + n as i64 * (p + q) as i64 + (n as i64 - 2 * k) * (q as i64 - p as i64)))
                .product();
            prop_assert_eq!(pval.clone(), GaussRational::real(prod));
            if n == 1 {
                let closed = 4 * p as i64 * q as i64 * (p as i64 + 1) * (q as i64 + 1);
                prop_assert_eq!(pval, g(closed));
            }
            let pop = critical_gjms(n, d);
            let inv = pop.partial_inverse().partial_inverse();
            if p * q != 0 {
                prop_assert_eq!(inv.eigenvalue(p, q).clone(), pop.eigenvalue(p, q).clone());
            }
        }
    }
}
