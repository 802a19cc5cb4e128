//! Growth of a diagonal operator along rays of the `(p, q)` lattice, as a
//! finite-truncation stand-in for Heisenberg order.

use serde::{Deserialize, Serialize};

use super::diagonal::{sublaplacian, DiagonalOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ray {
    Diagonal,
    Holomorphic,
    Antiholomorphic,
}

impl Ray {
    pub const ALL: [Ray; 3] = [Ray::Diagonal, Ray::Holomorphic, Ray::Antiholomorphic];

    fn points(self, degree: u32) -> Vec<(u32, u32)> {
        match self {
            Ray::Diagonal => (1..=degree / 2).map(|k| (k, k)).collect(),
            Ray::Holomorphic => (1..=degree).map(|k| (k, 0)).collect(),
            Ray::Antiholomorphic => (1..=degree).map(|k| (0, k)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayReport {
    pub ray: Ray,
    /// `sup |λ| / (1 + λ_Δb)^{m/2}` along the ray.
    pub sup_ratio: f64,
    /// `2 · d log|λ| / d log λ_Δb` fitted over the tail, `None` if the tail vanishes.
    pub fitted_exponent: Option<f64>,
    pub tail_vanishes: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub label: String,
    pub claimed_order: i32,
    pub rays: Vec<RayReport>,
    pub pass: bool,
}

pub const EXPONENT_SLACK: f64 = 0.25;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn order_diagnostic(d: &DiagonalOperator, m: i32) -> OrderReport {
    let db = sublaplacian(d.n, d.degree);
    let rays = Ray::ALL
        .iter()
        .map(|&ray| {
            let pts = ray.points(d.degree);
            let vals: Vec<(f64, f64)> = pts
                .iter()
                .map(|&(p, q)| (d.eigenvalue(p, q).to_c64().norm(), db.eigenvalue(p, q).to_c64().re))
                .collect();
            let sup_ratio = vals.iter().map(|&(l, s)| l / (1.0 + s).powf(m as f64 / 2.0)).fold(0.0, f64::max);
            let tail = &vals[vals.len() / 2..];
            let tail_vanishes = tail.iter().all(|&(l, _)| l == 0.0);
            let nonzero: Vec<(f64, f64)> = tail.iter().copied().filter(|&(l, _)| l > 0.0).collect();
            let fitted_exponent = (nonzero.len() >= 2).then(|| {
                let xs: Vec<f64> = nonzero.iter().map(|&(_, s)| s.ln()).collect();
                let ys: Vec<f64> = nonzero.iter().map(|&(l, _)| l.ln()).collect();
                2.0 * slope(&xs, &ys)
            });
            let pass = tail_vanishes || fitted_exponent.is_some_and(|e| e <= m as f64 + EXPONENT_SLACK);
            RayReport { ray, sup_ratio, fitted_exponent, tail_vanishes, pass }
        })
        .collect::<Vec<_>>();
    let pass = rays.iter().all(|r| r.pass);
    OrderReport { label: d.label.clone(), claimed_order: m, rays, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::diagonal::{critical_gjms, szego, szego_bar};

    #[test]
    fn sublaplacian_has_order_two() {
        let r = order_diagnostic(&sublaplacian(1, 12), 2);
        assert!(r.pass);
        assert!(r.rays.iter().all(|x| x.sup_ratio <= 1.0));
    }

    #[test]
    fn critical_operator_order_and_failure_below_it() {
        for n in 1..=3 {
            assert!(order_diagnostic(&critical_gjms(n, 12), 2 * n as i32 + 2).pass);
            assert!(!order_diagnostic(&critical_gjms(n, 12), 2).pass);
        }
    }

    #[test]
    fn finite_rank_is_smoothing() {
        let r = szego(1, 10).compose(&szego_bar(1, 10));
        for k in [0, 4, 50] {
            assert!(order_diagnostic(&r, -k).pass);
        }
    }
}
