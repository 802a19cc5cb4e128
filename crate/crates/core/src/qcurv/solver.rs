//! Q-curvature of `θ̂ = e^Υ θ`, the total-Q check, the kernel obstruction and
//! the zero-Q solve `Υ_sol = −Ĝ Q̂`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::perturbation::{symmetrize_real, taylor_tail_bound, ContactPerturbation, PerturbedFrame, REALITY_TOLERANCE};
use crate::error::{Error, Result};
use crate::exact::{format_rational, GaussRational};
use crate::parametrix::dense;
use crate::parametrix::{spectral_inverse, Residual, SpectralInverse, INTERIOR_MARGIN};
use crate::sphere::basis::HarmonicBasis;
use crate::sphere::diagonal::critical_gjms;
use crate::sphere::spectral::{Coefficients, SpectralFunction};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const TOTAL_Q_TOLERANCE: f64 = 1e-8;
pub const CONDITION_LIMIT: f64 = 1e12;
/// Taylor tail accepted for the weight that measures the final-frame Q.
pub const FINAL_FRAME_TAIL: f64 = 1e-3;
/// Relative size below which coefficients are left out of that weight.
pub const FINAL_FRAME_PRUNE: f64 = 1e-10;
/// Absolute floor added to the solve-then-verify bound.
pub const VERIFY_FLOOR: f64 = 1e-10;

/// Q-curvature coefficients in the basis, living in the frame of some perturbation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QData {
    pub q_hat: SpectralFunction,
    pub standard_frame: bool,
    pub taylor_depth: u32,
    pub tail_bound: f64,
    pub upsilon_sup_bound: f64,
}

impl QData {
    /// Wraps Q-data given directly in the coordinates of `frame`.
    pub fn given(frame: &PerturbedFrame, q: SpectralFunction) -> Result<Self> {
        if q.len() != frame.layout().total {
            return Err(Error::InvalidArgument("Q-data and frame live on different truncations".into()));
        }
        let defect = q.real_defect();
        if q.is_real_exact() == Some(false) || defect > REALITY_TOLERANCE * q.norm_sqr().sqrt().max(1.0) {
            return Err(Error::InvalidArgument(format!("Q-data must be real-valued (conjugation defect {defect:e})")));
        }
        Ok(Self {
            q_hat: q,
            standard_frame: frame.is_standard(),
            taylor_depth: frame.perturbation.taylor_depth,
            tail_bound: frame.tail_bound,
            upsilon_sup_bound: frame.sup_bound,
        })
    }
}

/// `Q̂ = e^{−(n+1)Υ} P Υ` (the standard form has `Q = 0`), via `W Q̂ = Λ Υ`.
pub fn qhat(frame: &PerturbedFrame) -> QData {
    let n = frame.n();
    let degree = frame.degree();
    let q_hat = if frame.is_standard() {
        SpectralFunction::zero_exact(n, degree)
    } else {
        let r = frame.apply_p(&frame.perturbation.upsilon.to_float_vec());
        SpectralFunction::from_float(n, degree, dense::mat_vec(frame.weight.inverse.as_ref(), &r))
    };
    QData {
        q_hat,
        standard_frame: frame.is_standard(),
        taylor_depth: frame.perturbation.taylor_depth,
        tail_bound: frame.tail_bound,
        upsilon_sup_bound: frame.sup_bound,
    }
}

/// Q-data of the perturbed frame whose pairing with every `f` matches `q` in the
/// standard frame: `∫ f Q' dvol̂ = ∫ f Q dvol`, i.e. `W q' = q`.
pub fn transport_standard_data(frame: &PerturbedFrame, q: &SpectralFunction) -> Result<QData> {
    let v = dense::mat_vec(frame.weight.inverse.as_ref(), &q.to_float_vec());
    QData::given(frame, symmetrize_real(&SpectralFunction::from_float(q.n, q.degree, v)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TotalQ {
    pub value: Complex64,
    pub abs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `∫ Q̂ e^{(n+1)Υ} dσ`, the first row of `W` being `∫ φ_j e^{(n+1)Υ} dσ`.
pub fn total_q(frame: &PerturbedFrame, q: &QData) -> TotalQ {
    let value = match q.q_hat.exact() {
        Some(v) if frame.is_standard() => v[0].to_c64(),
        _ => {
            let v = q.q_hat.to_float_vec();
            (0..v.len()).map(|j| frame.weight.gram[(0, j)] * v[j]).sum()
        }
    };
    let abs = value.norm();
    TotalQ { value, abs, tolerance: TOTAL_Q_TOLERANCE, pass: abs <= TOTAL_Q_TOLERANCE }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solvable: bool,
    pub exact: bool,
    pub tolerance: f64,
    /// Weighted norm of the kernel component of the Q-data.
    pub obstruction_norm: f64,
    pub obstruction_interior: f64,
    pub q_norm: f64,
    /// `⟨Q, φ_k⟩` in the frame's inner product, for every pluriharmonic basis function.
    pub kernel_pairings: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SpectralFunction>,
    /// `‖P̂ Υ_sol + Q̂‖`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<Residual>,
    /// `‖P (Υ + Υ_sol)‖` in the standard frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_defect: Option<Residual>,
    /// Norm of the Q-curvature of `e^{Υ_sol} θ̂`, recomputed in that frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_q_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_taylor_depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
}

impl SolveReport {
    /// `‖Q̂_final‖ ≤ 10 · residual + floor`
    pub fn verifies(&self) -> bool {
        match (self.final_q_norm, &self.residual) {
            (Some(f), Some(r)) => f <= 10.0 * r.full + VERIFY_FLOOR,
            _ => false,
        }
    }
}

fn exact_norm(v: &[GaussRational], coords: impl Iterator<Item = usize>) -> f64 {
    let s: GaussRational = coords.map(|i| GaussRational::real(v[i].norm_sqr())).sum();
    s.to_c64().re.sqrt()
}

/// Weighted norm of `v` restricted to the given coordinates.
fn restricted_norm(w: &dense::CMat, v: &[Complex64], coords: &[usize]) -> f64 {
    let mut s = Complex64::zero();
    for &i in coords {
        for &j in coords {
            s += v[i].conj() * w[(i, j)] * v[j];
        }
    }
    s.re.max(0.0).sqrt()
}

/// Holds the spectral partial inverse of a frame so checks and solves share it.
pub struct FrameSolver<'a> {
    pub frame: &'a PerturbedFrame,
    inverse: Option<SpectralInverse>,
    pub tolerance: f64,
}

impl<'a> FrameSolver<'a> {
    pub fn new(frame: &'a PerturbedFrame) -> Result<Self> {
        let inverse = if frame.is_standard() { None } else { Some(spectral_inverse(&frame.p_hat, &frame.weight)?) };
        Ok(Self { frame, inverse, tolerance: DEFAULT_TOLERANCE })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn solvability_check(&self, q: &QData) -> SolveReport {
        let layout = self.frame.layout();
        let k0 = layout.coordinates_where(|i| i.is_pluriharmonic());
        let interior = layout.interior(INTERIOR_MARGIN);
        let (obstruction_norm, obstruction_interior, q_norm, kernel_pairings, exact) =
            match (q.q_hat.exact(), &self.inverse) {
                (Some(v), None) => {
                    let ob = exact_norm(v, k0.iter().copied());
                    let ob_int = exact_norm(v, k0.iter().copied().filter(|i| interior.contains(i)));
                    let pairings = k0.iter().map(|&i| v[i].to_c64()).collect();
                    (ob, ob_int, exact_norm(v, 0..v.len()), pairings, true)
                }
                (_, inv) => {
                    let v = q.q_hat.to_float_vec();
                    let w = &self.frame.weight;
                    let comp = match inv {
                        Some(inv) => dense::mat_vec(inv.pi.as_ref(), &v),
                        None => (0..v.len()).map(|i| if k0.contains(&i) { v[i] } else { Complex64::zero() }).collect(),
                    };
                    let wv = dense::mat_vec(w.gram.as_ref(), &v);
                    let pairings = k0.iter().map(|&i| wv[i]).collect();
                    (w.norm(&comp), restricted_norm(&w.gram, &comp, &interior), w.norm(&v), pairings, false)
                }
            };
        SolveReport {
            solvable: obstruction_norm <= self.tolerance,
            exact,
            tolerance: self.tolerance,
            obstruction_norm,
            obstruction_interior,
            q_norm,
            kernel_pairings,
            solution: None,
            residual: None,
            kernel_defect: None,
            final_q_norm: None,
            final_taylor_depth: None,
            condition: None,
        }
    }

    pub fn solve_zero_q(&self, q: &QData, basis: &HarmonicBasis) -> Result<SolveReport> {
        let mut report = self.solvability_check(q);
        if !report.solvable {
            return Err(Error::NotSolvable { obstruction_norm: report.obstruction_norm });
        }
        match (q.q_hat.exact(), &self.inverse) {
            (Some(v), None) => self.solve_exact(v, &mut report),
            (_, None) => self.solve_float(q, None, basis, &mut report)?,
            (_, Some(inv)) => self.solve_float(q, Some(inv), basis, &mut report)?,
        }
        Ok(report)
    }

    fn solve_exact(&self, q: &[GaussRational], report: &mut SolveReport) {
        let (n, degree) = (self.frame.n(), self.frame.degree());
        let p = critical_gjms(n, degree);
        let lam = p.expanded();
        let g = p.partial_inverse().expanded();
        let u: Vec<GaussRational> = q.iter().zip(&g).map(|(c, l)| -(c * l)).collect();
        let r: Vec<GaussRational> = u.iter().zip(&lam).zip(q).map(|((a, l), c)| &(a * l) + c).collect();
        let interior = self.frame.layout().interior(INTERIOR_MARGIN);
        let res = Residual {
            full: exact_norm(&r, 0..r.len()),
            interior: exact_norm(&r, interior.iter().copied()),
            exact_zero: Some(r.iter().all(Zero::is_zero)),
        };
        let pu: Vec<GaussRational> = u.iter().zip(&lam).map(|(a, l)| a * l).collect();
        report.kernel_defect = Some(Residual {
            full: exact_norm(&pu, 0..pu.len()),
            interior: exact_norm(&pu, interior.iter().copied()),
            exact_zero: Some(pu.iter().all(Zero::is_zero)),
        });
        // the final frame e^{Υ_sol} θ has Q paired as W(q + P̂Υ_sol) = r
        report.final_q_norm = if r.iter().all(Zero::is_zero) { Some(0.0) } else { None };
        report.final_taylor_depth = Some(0);
        report.residual = Some(res);
        let max_l = lam.iter().map(|l| l.to_c64().norm()).fold(0.0, f64::max);
        let min_l = lam.iter().map(|l| l.to_c64().norm()).filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        report.condition = Some(max_l / min_l);
        report.solution = Some(SpectralFunction { n, degree, coefficients: Coefficients::Exact(u) });
    }

    fn solve_float(
        &self,
        q: &QData,
        inv: Option<&SpectralInverse>,
        basis: &HarmonicBasis,
        report: &mut SolveReport,
    ) -> Result<()> {
        let frame = self.frame;
        let (n, degree) = (frame.n(), frame.degree());
        let w = &frame.weight;
        let v = q.q_hat.to_float_vec();
        let (g_v, condition) = match inv {
            Some(inv) => {
                let s = &inv.spectrum;
                let top = s.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
                let cond = s.smallest_nonzero.map_or(f64::INFINITY, |m| top / m);
                (dense::mat_vec(inv.g.as_ref(), &v), cond)
            }
            None => {
                let g = critical_gjms(n, degree).partial_inverse().expanded();
                let cond = frame.lambda.iter().map(|x| x.abs()).fold(0.0, f64::max)
                    / frame.lambda.iter().map(|x| x.abs()).filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
                (v.iter().zip(&g).map(|(c, l)| c * l.to_c64()).collect(), cond)
            }
        };
        report.condition = Some(condition);
        if condition > CONDITION_LIMIT {
            return Err(Error::IllConditioned { condition });
        }
        let u = symmetrize_real(&SpectralFunction::from_float(n, degree, g_v.iter().map(|c| -c).collect()));
        let uv = u.to_float_vec();
        let interior = frame.layout().interior(INTERIOR_MARGIN);
        let r: Vec<Complex64> = frame.p_hat.apply(&uv).iter().zip(&v).map(|(a, b)| a + b).collect();
        report.residual = Some(Residual::float(w.norm(&r), restricted_norm(&w.gram, &r, &interior)));
        let ups = frame.perturbation.upsilon.to_float_vec();
        let total: Vec<Complex64> = uv.iter().zip(&ups).map(|(a, b)| a + b).collect();
        let pt = frame.apply_p(&total);
        let std_norm = |x: &[Complex64], c: &mut dyn Iterator<Item = usize>| c.map(|i| x[i].norm_sqr()).sum::<f64>().sqrt();
        report.kernel_defect = Some(Residual::float(
            std_norm(&pt, &mut (0..pt.len())),
            std_norm(&pt, &mut interior.iter().copied()),
        ));
        let (final_norm, depth) = final_frame_q_norm(frame, &v, &uv, &total, basis)?;
        report.final_q_norm = Some(final_norm);
        report.final_taylor_depth = Some(depth);
        report.solution = Some(u);
        Ok(())
    }
}

/// Q of `e^{Υ_sol} θ̂` measured in its own inner product. Its pairings with the
/// basis are `r = W q + Λ Υ_sol`; the norm is `(rᴴ W_final⁻¹ r)^{1/2}`.
fn final_frame_q_norm(
    frame: &PerturbedFrame,
    q: &[Complex64],
    u: &[Complex64],
    total: &[Complex64],
    basis: &HarmonicBasis,
) -> Result<(f64, u32)> {
    let wq = dense::mat_vec(frame.weight.gram.as_ref(), q);
    let r: Vec<Complex64> = wq.iter().zip(frame.apply_p(u)).map(|(a, b)| a + b).collect();
    if r.iter().all(|c| c.is_zero()) {
        return Ok((0.0, 0));
    }
    let top = total.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let pruned: Vec<Complex64> =
        total.iter().map(|c| if c.norm() <= FINAL_FRAME_PRUNE * top { Complex64::zero() } else { *c }).collect();
    let upsilon = symmetrize_real(&SpectralFunction::from_float(frame.n(), frame.degree(), pruned));
    let probe = ContactPerturbation::new(upsilon.clone(), 1)?;
    let x = (frame.n() + 1) as f64 * probe.sup_bound(basis);
    let max_depth = frame.perturbation.taylor_depth;
    let depth = (1..=max_depth).find(|&k| taylor_tail_bound(x, k) <= FINAL_FRAME_TAIL).unwrap_or(max_depth);
    let final_frame = ContactPerturbation::new(upsilon, depth)?.frame(basis)?;
    let lu = final_frame.weight.inverse.as_ref();
    let s: Complex64 = r.iter().zip(dense::mat_vec(lu, &r)).map(|(a, b)| a.conj() * b).sum();
    Ok((s.re.max(0.0).sqrt(), depth))
}

pub fn solvability_check(frame: &PerturbedFrame, q: &QData) -> Result<SolveReport> {
    Ok(FrameSolver::new(frame)?.solvability_check(q))
}

pub fn solve_zero_q(frame: &PerturbedFrame, q: &QData, basis: &HarmonicBasis) -> Result<SolveReport> {
    FrameSolver::new(frame)?.solve_zero_q(q, basis)
}

/// Q̂ coefficients as CSV: `p,q,index,re,im`.
pub fn q_csv(q: &SpectralFunction) -> String {
    let layout = q.layout();
    let mut out = String::from("p,q,index,re,im\n");
    let exact = q.exact();
    let v = q.to_float_vec();
    for b in &layout.blocks {
        for k in 0..b.dim {
            let i = b.offset + k;
            match exact {
                Some(e) => out.push_str(&format!("{},{},{},{},{}\n", b.index.p, b.index.q, k, format_rational(&e[i].re), format_rational(&e[i].im))),
                None => out.push_str(&format!("{},{},{},{:e},{:e}\n", b.index.p, b.index.q, k, v[i].re, v[i].im)),
            }
        }
    }
    out
}
