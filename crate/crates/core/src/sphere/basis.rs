//! Bases of the bigraded spherical harmonics `H_{p,q}` up to a total degree.
//!
//! Each block is built from the bidegree-`(p,q)` monomials not divisible by
//! `z_0 z̄_0`, whose harmonic projections span `H_{p,q}`. Projections with
//! different torus weights are orthogonal, so Gram–Schmidt only runs inside a
//! weight class. Elements are stored orthogonal with their exact squared norm;
//! the floating mirror is normalized.
//!
//! The blocks are arranged so that conjugation is visible on coordinates: the
//! basis of `H_{q,p}` (`q > p`) is the conjugate of the basis of `H_{p,q}` in the
//! same order, and every basis element of `H_{p,p}` is real-valued.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integral::inner_product;
use super::poly::{ExactPoly, FloatPoly, Monomial, MAX_VARS};
use crate::error::{Error, Result};
use crate::exact::{binomial, GaussRational, Rational};

pub const DEFAULT_DIMENSION_CAP: usize = 20_000;

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct BigradedIndex {
    pub p: u32,
    pub q: u32,
}

impl BigradedIndex {
    pub fn new(p: u32, q: u32) -> Self {
        Self { p, q }
    }

    pub fn degree(&self) -> u32 {
        self.p + self.q
    }

    pub fn conj(&self) -> Self {
        Self { p: self.q, q: self.p }
    }

    pub fn is_pluriharmonic(&self) -> bool {
        self.p == 0 || self.q == 0
    }
}

/// Total degree first, then `p`.
impl Ord for BigradedIndex {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.degree(), self.p).cmp(&(o.degree(), o.p))
    }
}

impl PartialOrd for BigradedIndex {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// `dim H_{p,q}(S^{2n+1}) = C(p+n,n) C(q+n,n) − C(p+n−1,n) C(q+n−1,n)`
pub fn harmonic_dimension(n: usize, p: u32, q: u32) -> usize {
    let n = n as u32;
    let all = binomial(p + n, n) * binomial(q + n, n);
    let divisible = if p > 0 && q > 0 { binomial(p + n - 1, n) * binomial(q + n - 1, n) } else { Zero::zero() };
    usize::try_from(all - divisible).expect("dimension fits in usize")
}

/// Every index with `p + q ≤ N`, in canonical order.
pub fn indices_up_to(degree: u32) -> Vec<BigradedIndex> {
    (0..=degree).flat_map(|d| (0..=d).map(move |p| BigradedIndex::new(p, d - p))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpan {
    pub index: BigradedIndex,
    pub offset: usize,
    pub dim: usize,
}

/// Coordinates of the truncated space: blocks in canonical order, each a
/// contiguous range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub n: usize,
    pub degree: u32,
    pub blocks: Vec<BlockSpan>,
    pub total: usize,
}

impl BlockLayout {
    pub fn new(n: usize, degree: u32) -> Self {
        let mut offset = 0;
        let blocks = indices_up_to(degree)
            .into_iter()
            .map(|index| {
                let dim = harmonic_dimension(n, index.p, index.q);
                let s = BlockSpan { index, offset, dim };
                offset += dim;
                s
            })
            .collect();
        Self { n, degree, blocks, total: offset }
    }

    pub fn span(&self, idx: BigradedIndex) -> Option<&BlockSpan> {
        self.blocks.iter().find(|b| b.index == idx)
    }

    pub fn position(&self, idx: BigradedIndex) -> Option<usize> {
        self.blocks.iter().position(|b| b.index == idx)
    }

    /// Block index of every coordinate.
    pub fn coordinate_blocks(&self) -> Vec<BigradedIndex> {
        self.blocks.iter().flat_map(|b| std::iter::repeat_n(b.index, b.dim)).collect()
    }

    /// Coordinates lying in blocks of total degree `≤ max_degree`.
    pub fn coordinates_up_to(&self, max_degree: u32) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| b.index.degree() <= max_degree)
            .flat_map(|b| b.offset..b.offset + b.dim)
            .collect()
    }

    /// Interior coordinates, away from the truncation boundary.
    pub fn interior(&self, margin: u32) -> Vec<usize> {
        match self.degree.checked_sub(margin) {
            Some(d) => self.coordinates_up_to(d),
            None => Vec::new(),
        }
    }

    pub fn coordinates_where(&self, pred: impl Fn(BigradedIndex) -> bool) -> Vec<usize> {
        self.blocks.iter().filter(|b| pred(b.index)).flat_map(|b| b.offset..b.offset + b.dim).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisElement {
    pub poly: ExactPoly,
    #[serde(with = "crate::exact::rational_serde")]
    pub norm_sqr: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub index: BigradedIndex,
    pub elements: Vec<BasisElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicBasis {
    pub n: usize,
    pub degree: u32,
    pub blocks: Vec<Block>,
    #[serde(skip)]
    float: Vec<FloatPoly>,
}

/// Harmonic projection `Σ_k a_k |z|^{2k} Δ^k f` of a bidegree-`(p,q)` polynomial,
/// with `a_0 = 1`, `a_{k+1} = −a_k / ((k+1)(n+p+q−k−1))`.
pub fn harmonic_projection(n: usize, p: u32, q: u32, f: &ExactPoly) -> ExactPoly {
    let vars = n + 1;
    let r = ExactPoly::norm_squared(vars);
    let mut out = ExactPoly::zero(vars);
    let mut a = Rational::one();
    let mut lap = f.clone();
    let mut rk = ExactPoly::one(vars);
    for k in 0..=p.min(q) {
        if lap.is_empty() {
            break;
        }
        out = out.add(&rk.mul(&lap).scale(&GaussRational::real(a.clone())));
        let den = (k + 1) as i64 * (n as i64 + p as i64 + q as i64 - k as i64 - 1);
        if den == 0 {
            break;
        }
        a = -a / Rational::from_integer(den.into());
        lap = lap.laplacian();
        rk = rk.mul(&r);
    }
    out
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u8>> {
    if parts == 1 {
        return vec![vec![total as u8]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first as u8);
            out.push(rest);
        }
    }
    out
}

/// Bidegree-`(p,q)` monomials in `vars` variables.
pub fn bidegree_monomials(vars: usize, p: u32, q: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for a in compositions(p, vars) {
        for b in compositions(q, vars) {
            out.push(Monomial::new(&a, &b));
        }
    }
    out
}

fn gram_schmidt(n: usize, candidates: Vec<ExactPoly>) -> Vec<BasisElement> {
    let mut out: Vec<BasisElement> = Vec::with_capacity(candidates.len());
    for c in candidates {
        let mut u = c.clone();
        for e in &out {
            let coef = inner_product(n, &c, &e.poly) / GaussRational::real(e.norm_sqr.clone());
            u = u.sub(&e.poly.scale(&coef));
        }
        let nu = inner_product(n, &u, &u);
        assert!(!nu.is_zero(), "harmonic projections of the candidate monomials are independent");
        out.push(BasisElement { poly: u, norm_sqr: nu.re });
    }
    out
}

fn weight_positive(w: &[i16; MAX_VARS]) -> bool {
    w.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn weight_classes(n: usize, p: u32, q: u32) -> Vec<([i16; MAX_VARS], Vec<ExactPoly>)> {
    let vars = n + 1;
    let mut classes: std::collections::BTreeMap<[i16; MAX_VARS], Vec<ExactPoly>> = Default::default();
    for m in bidegree_monomials(vars, p, q) {
        if m.z[0] > 0 && m.zbar[0] > 0 {
            continue;
        }
        let f = ExactPoly::monomial(vars, m, GaussRational::one());
        classes.entry(m.weight()).or_default().push(harmonic_projection(n, p, q, &f));
    }
    // descending weights put the z_0-heavy classes first
    classes.into_iter().rev().collect()
}

fn build_block(n: usize, idx: BigradedIndex) -> Block {
    let (p, q) = (idx.p, idx.q);
    if p < q {
        let mut b = build_block(n, idx.conj());
        for e in &mut b.elements {
            e.poly = e.poly.conj();
        }
        b.index = idx;
        return b;
    }
    let mut elements = Vec::new();
    for (w, cands) in weight_classes(n, p, q) {
        if p > q || w.iter().all(|&x| x == 0) {
            elements.extend(gram_schmidt(n, cands));
        } else if weight_positive(&w) {
            let half = GaussRational::from_ratio(1, 2);
            let half_over_i = GaussRational::imag(crate::exact::rat(-1, 2));
            for v in gram_schmidt(n, cands) {
                let vc = v.poly.conj();
                let nu = &v.norm_sqr / Rational::from_integer(2.into());
                elements.push(BasisElement { poly: v.poly.add(&vc).scale(&half), norm_sqr: nu.clone() });
                elements.push(BasisElement { poly: v.poly.sub(&vc).scale(&half_over_i), norm_sqr: nu });
            }
        }
    }
    Block { index: idx, elements }
}

impl HarmonicBasis {
    pub fn build(n: usize, degree: u32) -> Result<Self> {
        Self::build_with_cap(n, degree, DEFAULT_DIMENSION_CAP)
    }

    pub fn build_with_cap(n: usize, degree: u32, cap: usize) -> Result<Self> {
        if n == 0 || n + 1 > MAX_VARS {
            return Err(Error::InvalidArgument(format!("n must be in 1..={}, got {n}", MAX_VARS - 1)));
        }
        if degree > 60 {
            return Err(Error::InvalidArgument(format!("truncation degree {degree} is too large")));
        }
        let layout = BlockLayout::new(n, degree);
        if layout.total > cap {
            return Err(Error::ResourceCap { what: "basis dimension", requested: layout.total, cap });
        }
        let blocks: Vec<Block> = indices_up_to(degree).into_par_iter().map(|idx| build_block(n, idx)).collect();
        let mut b = Self { n, degree, blocks, float: Vec::new() };
        b.refresh_float();
        Ok(b)
    }

    /// Rebuilds the normalized floating mirror (after deserialization).
    pub fn refresh_float(&mut self) {
        self.float = self
            .blocks
            .iter()
            .flat_map(|b| b.elements.iter())
            .map(|e| {
                let s = 1.0 / GaussRational::real(e.norm_sqr.clone()).to_c64().re.sqrt();
                e.poly.to_float().scale(&Complex64::new(s, 0.0))
            })
            .collect();
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout::new(self.n, self.degree)
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.elements.len()).sum()
    }

    pub fn block(&self, idx: BigradedIndex) -> Option<&Block> {
        self.blocks.iter().find(|b| b.index == idx)
    }

    /// Normalized floating basis functions in coordinate order.
    pub fn float_elements(&self) -> &[FloatPoly] {
        &self.float
    }

    pub fn elements(&self) -> impl Iterator<Item = &BasisElement> {
        self.blocks.iter().flat_map(|b| b.elements.iter())
    }
}
