//! The chain on the standard sphere, where every member acts by a scalar on
//! each `H_{p,q}` and all identities can be checked exactly.

use std::collections::BTreeMap;

use super::{ChainReport, Diagnostics, Residual, SmoothingReport, INTERIOR_MARGIN};
use crate::exact::{rat_int, GaussRational};
use crate::sphere::diagonal::{critical_gjms, l_mu, pluriharmonic_proj, szego, szego_bar, DiagonalOperator};

/// `1/λ` where `λ ≠ 0`, `0` on the kernel.
pub fn partial_inverse(d: &DiagonalOperator) -> DiagonalOperator {
    d.partial_inverse()
}

#[derive(Clone, Debug)]
pub struct DiagonalChain {
    pub n: usize,
    pub degree: u32,
    pub p: DiagonalOperator,
    pub s: DiagonalOperator,
    pub s_bar: DiagonalOperator,
    pub g0: DiagonalOperator,
    pub pi0: DiagonalOperator,
    pub r0: DiagonalOperator,
    pub a0: DiagonalOperator,
    pub pi_inf: DiagonalOperator,
    pub g_inf: DiagonalOperator,
    pub pi: DiagonalOperator,
    pub g: DiagonalOperator,
    pub diagnostics: Diagnostics,
}

pub(crate) fn residual_of(d: &DiagonalOperator) -> Residual {
    let interior = match d.degree.checked_sub(INTERIOR_MARGIN) {
        Some(m) => d.max_abs_up_to(m),
        None => 0.0,
    };
    Residual { full: d.max_abs_up_to(d.degree), interior, exact_zero: Some(d.is_zero()) }
}

/// Kernel projection of a diagonal operator.
pub fn kernel_projection(d: &DiagonalOperator) -> DiagonalOperator {
    let id = DiagonalOperator::identity(d.n, d.degree);
    id.sub(&d.compose(&d.partial_inverse())).with_label(format!("Π[{}]", d.label))
}

pub fn build_chain_diagonal(n: usize, degree: u32) -> DiagonalChain {
    let p = critical_gjms(n, degree);
    let id = DiagonalOperator::identity(n, degree);
    let (s, s_bar) = (szego(n, degree), szego_bar(n, degree));
    // G₀ = N_n N_{n−2} ⋯ N_{−n}
    let mut g0 = id.clone();
    for k in 0..=n {
        let mu = rat_int(n as i64 - 2 * k as i64);
        g0 = g0.compose(&partial_inverse(&l_mu(n, degree, &mu)));
    }
    let g0 = g0.with_label("G0");
    let pi0 = s.add(&s_bar).with_label("Pi0");
    let r0 = p.compose(&g0).add(&pi0).sub(&id).with_label("R0");
    let a0 = id.add(&r0).inverse().expect("I + R0 is invertible on the sphere").with_label("A0");
    let pi_inf = pi0.compose(&a0).with_label("PiInf");
    let g_inf = id.sub(&pi_inf).compose(&g0).compose(&a0).with_label("GInf");
    let pi = kernel_projection(&p).with_label("Pi");
    let g = partial_inverse(&p).with_label("G");

    let half = GaussRational::from_ratio(1, 2);
    let ssb = s.compose(&s_bar);
    let mut dg = Diagnostics::default();
    let mut rec = |name: &str, d: DiagonalOperator| dg.record(name, residual_of(&d));
    rec("R0 - S*Sbar", r0.sub(&ssb));
    rec("A0 - (I - R0/2)", a0.sub(&id.sub(&r0.scale(&half))));
    rec("PiInf - (S + Sbar - S*Sbar)", pi_inf.sub(&s.add(&s_bar).sub(&ssb)));
    rec("PiInf - Pi", pi_inf.sub(&pi));
    rec("GInf - G", g_inf.sub(&g));
    rec("Pi - pi", pi.sub(&pluriharmonic_proj(n, degree)));
    rec("P*G + Pi - I", p.compose(&g).add(&pi).sub(&id));
    rec("G*P + Pi - I", g.compose(&p).add(&pi).sub(&id));
    rec("Pi^2 - Pi", pi.compose(&pi).sub(&pi));
    rec("Pi* - Pi", pi.adjoint().sub(&pi));
    rec("G* - G", g.adjoint().sub(&g));
    rec("Pi*G", pi.compose(&g));
    rec("G*Pi", g.compose(&pi));
    rec("P*Pi", p.compose(&pi));
    rec("Pi*P", pi.compose(&p));
    rec("PiInf^2 - PiInf", pi_inf.compose(&pi_inf).sub(&pi_inf));
    rec("PiInf* - PiInf", pi_inf.adjoint().sub(&pi_inf));
    rec("P*GInf + PiInf - I", p.compose(&g_inf).add(&pi_inf).sub(&id));
    rec("GInf*P + PiInf - I", g_inf.compose(&p).add(&pi_inf).sub(&id));
    rec("PiInf*P", pi_inf.compose(&p));
    rec("P*PiInf", p.compose(&pi_inf));
    rec("PiInf*GInf", pi_inf.compose(&g_inf));
    rec("GInf*PiInf", g_inf.compose(&pi_inf));
    DiagonalChain { n, degree, p, s, s_bar, g0, pi0, r0, a0, pi_inf, g_inf, pi, g, diagnostics: dg }
}

impl DiagonalChain {
    pub fn smoothing_residual(&self) -> SmoothingReport {
        let id = DiagonalOperator::identity(self.n, self.degree);
        let r_inf = self.g_inf.compose(&self.p).add(&self.pi_inf).sub(&id);
        let diff = self.pi.sub(&self.pi_inf);
        SmoothingReport {
            r_inf: residual_of(&r_inf),
            r_inf_rank: r_inf.rank(),
            pi_minus_pi_inf: residual_of(&diff),
            pi_minus_pi_inf_rank: diff.rank(),
            r0_rank: self.r0.rank(),
        }
    }

    pub fn ranks(&self) -> BTreeMap<String, usize> {
        let mut r = BTreeMap::new();
        r.insert("R0".to_string(), self.r0.rank());
        r.insert("Pi".to_string(), self.pi.rank());
        r.insert("Pi - PiInf".to_string(), self.pi.sub(&self.pi_inf).rank());
        r.insert("Pi - pi".to_string(), self.pi.sub(&pluriharmonic_proj(self.n, self.degree)).rank());
        r.insert("Ker P".to_string(), self.p.layout().total - self.p.rank());
        r
    }

    pub fn report(&self) -> ChainReport {
        ChainReport {
            n: self.n,
            degree: self.degree,
            mode: "exact".into(),
            perturbation: "none".into(),
            neumann_depth: 0,
            a0_policy: None,
            ranks: self.ranks(),
            residuals: self.diagnostics.clone(),
            smoothing: self.smoothing_residual(),
            spectrum: super::spectrum_diagonal(&self.p),
        }
    }
}
