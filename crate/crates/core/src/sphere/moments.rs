//! Weighted moments `m_E(u, v) = ∫ E z^u z̄^v dσ` and the matrices built from
//! them: weighted Gram matrices and multiplication operators on the basis.

use faer::Mat;
use num_complex::Complex64;

use super::basis::HarmonicBasis;
use super::integral::monomial_average_f64;
use super::poly::{FloatPoly, Monomial};
use crate::error::{Error, Result};

/// Default bound on the number of stored moments (16 bytes each).
pub const DEFAULT_MOMENT_CAP: usize = 1 << 23;

/// Dense table of `m_E(u, v)` for `u_j, v_j < radix`, indexed in mixed radix so
/// that `index(u, v) + index(u', v') = index(u + u', v + v')` without carries
/// whenever the sums stay in range.
#[derive(Clone, Debug)]
pub struct MomentTable {
    n: usize,
    radix: usize,
    data: Vec<Complex64>,
}

impl MomentTable {
    /// Covers products of two basis functions of degree `≤ max_degree`.
    pub fn new(n: usize, max_degree: u32, weight: &FloatPoly) -> Result<Self> {
        Self::with_cap(n, max_degree, weight, DEFAULT_MOMENT_CAP)
    }

    pub fn with_cap(n: usize, max_degree: u32, weight: &FloatPoly, cap: usize) -> Result<Self> {
        let vars = n + 1;
        let radix = 2 * max_degree as usize + 1;
        let size = radix.checked_pow(2 * vars as u32).unwrap_or(usize::MAX);
        if size > cap {
            return Err(Error::ResourceCap { what: "moment table entries", requested: size, cap });
        }
        if weight.max_degree() as usize + 2 * radix > u8::MAX as usize {
            return Err(Error::InvalidArgument("weight polynomial degree too large for the moment table".into()));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); size];
        let half = radix.pow(vars as u32);
        for (m, c) in weight.terms() {
            // z^α z̄^β · z^u z̄^v is balanced iff v = u + α − β
            for ui in 0..half {
                let mut rest = ui;
                let mut vi = 0usize;
                let mut scale = 1usize;
                let mut full = Monomial::ONE;
                let mut ok = true;
                for j in 0..vars {
                    let u = rest % radix;
                    rest /= radix;
                    let v = u as i64 + m.z[j] as i64 - m.zbar[j] as i64;
                    if v < 0 || v >= radix as i64 {
                        ok = false;
                        break;
                    }
                    vi += v as usize * scale;
                    scale *= radix;
                    full.z[j] = (u + m.z[j] as usize) as u8;
                    full.zbar[j] = full.z[j];
                }
                if ok {
                    data[ui + half * vi] += c * monomial_average_f64(n, &full);
                }
            }
        }
        Ok(Self { n, radix, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, m: &Monomial, conj_part: bool) -> usize {
        // u-part from z exponents (or z̄ exponents for the conjugated factor)
        let vars = self.n + 1;
        let half = self.radix.pow(vars as u32);
        let (u, v) = if conj_part { (&m.zbar, &m.z) } else { (&m.z, &m.zbar) };
        let mut iu = 0;
        let mut iv = 0;
        let mut s = 1;
        for j in 0..vars {
            iu += u[j] as usize * s;
            iv += v[j] as usize * s;
            s *= self.radix;
        }
        iu + half * iv
    }

    pub fn get(&self, u: &Monomial) -> Complex64 {
        self.data[self.index(u, false)]
    }

    /// `∫ E f dσ` for `f` of degree at most half the table range.
    pub fn integrate(&self, f: &FloatPoly) -> Complex64 {
        f.terms().map(|(m, c)| c * self.data[self.index(m, false)]).sum()
    }
}

struct Packed {
    offsets: Vec<usize>,
    coeffs: Vec<Complex64>,
}

fn pack(table: &MomentTable, f: &FloatPoly, conj_part: bool) -> Packed {
    let (offsets, coeffs) = f
        .terms()
        .map(|(m, c)| (table.index(m, conj_part), if conj_part { c.conj() } else { *c }))
        .unzip();
    Packed { offsets, coeffs }
}

/// `A_ij = ∫ conj(φ_i) φ_j E dσ` over the normalized basis. With `E = 1` this is
/// the identity; with `E = f` it is the matrix of multiplication by `f`.
pub fn weighted_gram(basis: &HarmonicBasis, table: &MomentTable, hermitian: bool) -> Mat<Complex64> {
    let fs = basis.float_elements();
    let left: Vec<Packed> = fs.iter().map(|f| pack(table, f, true)).collect();
    let right: Vec<Packed> = fs.iter().map(|f| pack(table, f, false)).collect();
    let dim = fs.len();
    let mut out = Mat::<Complex64>::zeros(dim, dim);
    let entry = |i: usize, j: usize| {
        let (a, b) = (&left[i], &right[j]);
        let mut s = Complex64::new(0.0, 0.0);
        for (oa, ca) in a.offsets.iter().zip(&a.coeffs) {
            let mut t = Complex64::new(0.0, 0.0);
            for (ob, cb) in b.offsets.iter().zip(&b.coeffs) {
                t += cb * table.data[oa + ob];
            }
            s += ca * t;
        }
        s
    };
    for j in 0..dim {
        let start = if hermitian { j } else { 0 };
        for i in start..dim {
            let v = entry(i, j);
            out[(i, j)] = v;
            if hermitian && i != j {
                out[(j, i)] = v.conj();
            }
        }
        if hermitian {
            out[(j, j)] = Complex64::new(out[(j, j)].re, 0.0);
        }
    }
    out
}

/// `(∫ E φ_i dσ)_i`
pub fn moment_vector(basis: &HarmonicBasis, table: &MomentTable) -> Vec<Complex64> {
    basis.float_elements().iter().map(|f| table.integrate(f)).collect()
}

/// Truncated exponential `Σ_{k ≤ K} a^k / k!` as a polynomial.
pub fn taylor_exp(a: &FloatPoly, depth: u32) -> FloatPoly {
    let vars = a.vars();
    let mut acc = FloatPoly::one(vars);
    for k in (1..=depth).rev() {
        acc = FloatPoly::one(vars).add(&a.mul(&acc).scale(&Complex64::new(1.0 / k as f64, 0.0)));
    }
    acc
}
