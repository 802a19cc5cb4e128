//! Eigentable export.

use std::fmt::Write;

use super::basis::BlockLayout;
use super::diagonal::{critical_gjms, l_mu, reeb_t, sublaplacian};
use crate::exact::{GaussRational, Rational};

fn cell(v: &GaussRational, exact: bool) -> String {
    if exact {
        v.to_string()
    } else {
        format!("{}", v.to_c64().re)
    }
}

/// CSV with columns `p,q,dim,lambda_deltab,lambda_iT,lambda_P` and, when `mu`
/// is given, `lambda_mu`. Exact values are printed as rationals.
pub fn eigentable_csv(n: usize, degree: u32, mu: Option<&Rational>, exact: bool) -> String {
    let layout = BlockLayout::new(n, degree);
    let (db, it, p) = (sublaplacian(n, degree), reeb_t(n, degree), critical_gjms(n, degree));
    let lm = mu.map(|m| l_mu(n, degree, m));
    let mut out = String::from("p,q,dim,lambda_deltab,lambda_iT,lambda_P");
    if lm.is_some() {
        out.push_str(",lambda_mu");
    }
    out.push('\n');
    for b in &layout.blocks {
        let i = b.index;
        write!(out, "{},{},{},{},{},{}", i.p, i.q, b.dim, cell(db.get(i), exact), cell(it.get(i), exact), cell(p.get(i), exact))
            .unwrap();
        if let Some(l) = &lm {
            write!(out, ",{}", cell(l.get(i), exact)).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_row_present() {
        let csv = eigentable_csv(1, 4, None, true);
        assert!(csv.lines().any(|l| l == "1,1,3,8,0,16"));
        let csv = eigentable_csv(1, 2, Some(&crate::exact::rat(1, 2)), false);
        assert!(csv.lines().next().unwrap().ends_with("lambda_mu"));
        assert!(csv.lines().any(|l| l == "1,0,2,2,-2,0,0.5"));
    }
}
