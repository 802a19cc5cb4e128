//! CR Q-curvature under conformal change at the critical weight.

pub mod perturbation;
pub mod solver;

pub use perturbation::{
    random_perturbation, symmetrize_real, ContactPerturbation, PerturbedFrame, SpectralSpec, DEFAULT_TAYLOR_DEPTH,
};
pub use solver::{
    q_csv, qhat, solvability_check, solve_zero_q, total_q, transport_standard_data, FrameSolver, QData, SolveReport,
    TotalQ,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::GaussRational;
    use crate::sphere::basis::HarmonicBasis;
    use crate::sphere::spectral::{SpectralFunction, SpectralTerm};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn phi11(n: usize, degree: u32, c: i64) -> SpectralFunction {
        SpectralFunction::from_terms(n, degree, &[SpectralTerm { p: 1, q: 1, index: 0, coefficient: GaussRational::from_int(c) }])
            .unwrap()
    }

    #[test]
    fn standard_frame_exact_solve() {
        let basis = HarmonicBasis::build(1, 6).unwrap();
        let frame = ContactPerturbation::standard(1, 6, 12).frame(&basis).unwrap();
        let q = QData::given(&frame, phi11(1, 6, 16)).unwrap();
        let rep = solve_zero_q(&frame, &q, &basis).unwrap();
        assert!(rep.exact && rep.solvable);
        assert_eq!(rep.obstruction_norm, 0.0);
        assert_eq!(rep.solution.unwrap(), phi11(1, 6, -1));
        assert_eq!(rep.residual.unwrap().exact_zero, Some(true));
        assert_eq!(rep.final_q_norm, Some(0.0));
        assert_eq!(total_q(&frame, &qhat(&frame)).abs, 0.0);
    }

    #[test]
    fn pluriharmonic_datum_is_obstructed() {
        let basis = HarmonicBasis::build(1, 5).unwrap();
        let frame = ContactPerturbation::standard(1, 5, 12).frame(&basis).unwrap();
        let half = GaussRational::from_ratio(1, 2);
        let f = SpectralFunction::from_terms(
            1,
            5,
            &[
                SpectralTerm { p: 1, q: 0, index: 0, coefficient: half.clone() },
                SpectralTerm { p: 0, q: 1, index: 0, coefficient: half },
            ],
        )
        .unwrap();
        let q = QData::given(&frame, f).unwrap();
        let rep = solvability_check(&frame, &q).unwrap();
        assert!(!rep.solvable);
        assert_eq!(rep.obstruction_norm, rep.q_norm);
        assert!(matches!(solve_zero_q(&frame, &q, &basis), Err(crate::Error::NotSolvable { .. })));
    }

    #[test]
    fn pluriharmonic_upsilon_has_zero_q() {
        let basis = HarmonicBasis::build(1, 6).unwrap();
        let u = SpectralFunction::from_terms(
            1,
            6,
            &[
                SpectralTerm { p: 2, q: 0, index: 1, coefficient: GaussRational::from_ratio(1, 20) },
                SpectralTerm { p: 0, q: 2, index: 1, coefficient: GaussRational::from_ratio(1, 20) },
            ],
        )
        .unwrap();
        let frame = ContactPerturbation::new(u, 12).unwrap().frame(&basis).unwrap();
        let q = qhat(&frame);
        assert!(q.q_hat.to_float_vec().iter().all(|c| *c == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn perturbed_round_trip() {
        let basis = HarmonicBasis::build(1, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_perturbation(&basis, 3, 0.05, &mut rng);
        let frame = ContactPerturbation::new(u, 12).unwrap().frame(&basis).unwrap();
        let q = qhat(&frame);
        assert!(total_q(&frame, &q).abs < 1e-12);
        let solver = FrameSolver::new(&frame).unwrap();
        let rep = solver.solve_zero_q(&q, &basis).unwrap();
        assert!(rep.obstruction_norm < 1e-12, "{}", rep.obstruction_norm);
        assert!(rep.kernel_defect.as_ref().unwrap().full < 1e-10);
        assert!(rep.verifies(), "{:?} {:?}", rep.final_q_norm, rep.residual);
        assert!(rep.solution.unwrap().real_defect() == 0.0);
    }

    #[test]
    fn obstruction_pairings_do_not_depend_on_the_frame() {
        let basis = HarmonicBasis::build(1, 6).unwrap();
        let std = ContactPerturbation::standard(1, 6, 12).frame(&basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_perturbation(&basis, 2, 0.05, &mut rng);
        let pert = ContactPerturbation::new(u, 12).unwrap().frame(&basis).unwrap();
        let data = SpectralFunction::from_terms(
            1,
            6,
            &[
                SpectralTerm { p: 1, q: 1, index: 0, coefficient: GaussRational::from_int(3) },
                SpectralTerm { p: 0, q: 0, index: 0, coefficient: GaussRational::from_int(1) },
            ],
        )
        .unwrap();
        let a = solvability_check(&std, &QData::given(&std, data.clone()).unwrap()).unwrap();
        let b = solvability_check(&pert, &transport_standard_data(&pert, &data).unwrap()).unwrap();
        for (x, y) in a.kernel_pairings.iter().zip(&b.kernel_pairings) {
            assert!((x - y).norm() < 1e-12);
        }
        assert!(!a.solvable && !b.solvable);
    }

    #[test]
    fn negative_density_is_rejected() {
        let basis = HarmonicBasis::build(1, 2).unwrap();
        let u = SpectralFunction::from_terms(1, 2, &[SpectralTerm { p: 0, q: 0, index: 0, coefficient: GaussRational::from_int(-2) }])
            .unwrap();
        let pert = ContactPerturbation::new(u, 1).unwrap();
        assert!(matches!(pert.frame(&basis), Err(crate::Error::WeightNotPositive { .. })));
    }
}
