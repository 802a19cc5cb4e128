//! The exact identity suite for the Heisenberg model, reported per identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forms::levi_form_entry;
use super::group::{dilate, group_inv, group_mul, Dilation, GroupElement};
use super::op::{
    apply_op, commutator, compose, formal_adjoint, kohn_laplacian, kohn_laplacian_bar, sublaplacian, Generator,
    LeftInvariantOp, PbwIndex,
};
use super::poly::PolyFunction;
use crate::exact::{rat, GaussRational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub identity: String,
    pub n: usize,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub dimensions: Vec<usize>,
    pub results: Vec<IdentityResult>,
    pub all_passed: bool,
}

struct Tally {
    checks: usize,
    failures: usize,
}

impl Tally {
    fn new() -> Self {
        Self { checks: 0, failures: 0 }
    }

    fn check(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

fn random_rational(rng: &mut impl Rng) -> crate::exact::Rational {
    rat(rng.random_range(-9..=9), rng.random_range(1..=6))
}

fn random_gauss(rng: &mut impl Rng) -> GaussRational {
    GaussRational::new(random_rational(rng), random_rational(rng))
}

fn random_element(n: usize, rng: &mut impl Rng) -> GroupElement {
    GroupElement::new(random_rational(rng), (0..n).map(|_| random_gauss(rng)).collect())
}

/// A random operator with a few PBW terms of small order.
fn random_op(n: usize, rng: &mut impl Rng) -> LeftInvariantOp {
    let mut op = LeftInvariantOp::zero(n);
    for _ in 0..3 {
        let mut idx = PbwIndex::identity(n);
        idx.a = rng.random_range(0..=1);
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        idx.beta[a] = rng.random_range(0..=2);
        idx.gamma[b] = rng.random_range(0..=2);
        op = op + LeftInvariantOp::term(idx, random_gauss(rng));
    }
    op
}

fn generators(n: usize) -> Vec<Generator> {
    let mut g = vec![Generator::T];
    g.extend((0..n).map(Generator::Z));
    g.extend((0..n).map(Generator::ZBar));
    g
}

fn suite_for(n: usize, rng: &mut ChaCha8Rng) -> Vec<IdentityResult> {
    let mut results = Vec::new();
    let mut push = |name: &str, t: Tally| {
        results.push(IdentityResult {
            identity: name.to_string(),
            n,
            passed: t.failures == 0,
            checks: t.checks,
            failures: t.failures,
        })
    };
    let samples = 8;
    let basis_degree = if n >= 3 { 3 } else { 4 };
    let spanning = PolyFunction::spanning_monomials(n, basis_degree);

    let mut t = Tally::new();
    for _ in 0..samples {
        let (g, h, k) = (random_element(n, rng), random_element(n, rng), random_element(n, rng));
        let e = GroupElement::identity(n);
        t.check(group_mul(&e, &g).unwrap() == g && group_mul(&g, &e).unwrap() == g);
        let lhs = group_mul(&group_mul(&g, &h).unwrap(), &k).unwrap();
        let rhs = group_mul(&g, &group_mul(&h, &k).unwrap()).unwrap();
        t.check(lhs == rhs);
        t.check(group_mul(&g, &group_inv(&g)).unwrap().is_identity());
        t.check(group_inv(&group_inv(&g)) == g);
    }
    push("group_axioms", t);

    let mut t = Tally::new();
    for _ in 0..samples {
        let r = Dilation::new(rat(rng.random_range(1..=7), rng.random_range(1..=5))).unwrap();
        let s = Dilation::new(rat(rng.random_range(1..=7), rng.random_range(1..=5))).unwrap();
        let (g, h) = (random_element(n, rng), random_element(n, rng));
        let lhs = dilate(&r, &group_mul(&g, &h).unwrap());
        let rhs = group_mul(&dilate(&r, &g), &dilate(&r, &h)).unwrap();
        t.check(lhs == rhs);
        t.check(dilate(&r, &dilate(&s, &g)) == dilate(&r.then(&s), &g));
    }
    push("dilation_homomorphism", t);

    let mut t = Tally::new();
    let translation_basis = PolyFunction::spanning_monomials(n, 2);
    for _ in 0..2 {
        let g = random_element(n, rng);
        for gen in generators(n) {
            let l = LeftInvariantOp::generator(n, gen);
            for f in &translation_basis {
                let lhs = apply_op(&l, &f.compose_left_translation(&g)).unwrap();
                let rhs = apply_op(&l, f).unwrap().compose_left_translation(&g);
                t.check(lhs == rhs);
            }
        }
    }
    push("left_invariance", t);

    let mut t = Tally::new();
    let minus_2i_t = LeftInvariantOp::t(n).scale(&GaussRational::imag(rat(-2, 1)));
    for a in 0..n {
        for b in 0..n {
            let z = LeftInvariantOp::z(n, a);
            let zb = LeftInvariantOp::zbar(n, b);
            let c = commutator(&z, &zb).unwrap();
            let expect = if a == b { minus_2i_t.clone() } else { LeftInvariantOp::zero(n) };
            t.check(c == expect);
            for f in &spanning {
                let lhs = apply_op(&z, &apply_op(&zb, f).unwrap()).unwrap()
                    - apply_op(&zb, &apply_op(&z, f).unwrap()).unwrap();
                t.check(lhs == apply_op(&expect, f).unwrap());
            }
        }
    }
    push("frame_commutator", t);

    let mut t = Tally::new();
    for _ in 0..samples {
        let (l1, l2) = (random_op(n, rng), random_op(n, rng));
        let c = compose(&l1, &l2).unwrap();
        for f in &spanning {
            t.check(apply_op(&c, f).unwrap() == apply_op(&l1, &apply_op(&l2, f).unwrap()).unwrap());
        }
    }
    push("pbw_soundness", t);

    let mut t = Tally::new();
    let tt = LeftInvariantOp::t(n);
    for gen in generators(n) {
        t.check(commutator(&tt, &LeftInvariantOp::generator(n, gen)).unwrap().is_zero());
    }
    t.check(commutator(&tt, &sublaplacian(n)).unwrap().is_zero());
    for _ in 0..samples {
        t.check(commutator(&tt, &random_op(n, rng)).unwrap().is_zero());
    }
    push("centrality_of_t", t);

    let mut t = Tally::new();
    t.check(formal_adjoint(&tt) == -tt.clone());
    for a in 0..n {
        t.check(formal_adjoint(&LeftInvariantOp::z(n, a)) == -LeftInvariantOp::zbar(n, a));
        t.check(formal_adjoint(&LeftInvariantOp::zbar(n, a)) == -LeftInvariantOp::z(n, a));
    }
    t.check(formal_adjoint(&sublaplacian(n)) == sublaplacian(n));
    for _ in 0..samples {
        let (l1, l2) = (random_op(n, rng), random_op(n, rng));
        t.check(formal_adjoint(&formal_adjoint(&l1)) == l1);
        let lhs = formal_adjoint(&compose(&l1, &l2).unwrap());
        t.check(lhs == compose(&formal_adjoint(&l2), &formal_adjoint(&l1)).unwrap());
    }
    push("adjoint_rules", t);

    let mut t = Tally::new();
    for a in 0..n {
        for b in 0..n {
            let expect = GaussRational::from_int(if a == b { 2 } else { 0 });
            t.check(levi_form_entry(n, a, b) == PolyFunction::constant(n, expect));
        }
    }
    push("levi_normalization", t);

    let mut t = Tally::new();
    let nt = tt.scale(&GaussRational::imag(rat(n as i64, 2)));
    let half_delta = sublaplacian(n).scale(&GaussRational::from_ratio(1, 2));
    t.check((half_delta + nt - kohn_laplacian(n)).is_zero());
    t.check(kohn_laplacian(n) + kohn_laplacian_bar(n) == sublaplacian(n));
    // □_b kills CR functions of z alone
    for f in &spanning {
        let holomorphic = f.terms().all(|(e, _)| e.t == 0 && e.zbar.iter().all(|&k| k == 0));
        if holomorphic {
            t.check(apply_op(&kohn_laplacian(n), f).unwrap().is_empty());
        }
    }
    push("kohn_laplacian_identity", t);

    results
}

/// Runs the suite for each `n` with inputs drawn from a seeded generator.
pub fn run_selftest(dimensions: &[usize], seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    for &n in dimensions {
        results.extend(suite_for(n, &mut rng));
    }
    let all_passed = results.iter().all(|r| r.passed);
    SelftestReport { seed, dimensions: dimensions.to_vec(), results, all_passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let r = run_selftest(&[1, 2], 7);
        assert!(r.all_passed, "{:?}", r.results.iter().filter(|x| !x.passed).collect::<Vec<_>>());
        assert!(r.results.iter().all(|x| x.checks > 0));
    }

    #[test]
    fn report_is_deterministic_in_seed() {
        assert_eq!(run_selftest(&[1], 3), run_selftest(&[1], 3));
    }
}
