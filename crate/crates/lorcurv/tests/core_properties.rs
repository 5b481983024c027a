mod common;

use common::{lorentzian_from, FAMILIES};
use lorcurv::core::{
    automorphism_matrix, change_basis, is_automorphism, make_family_algebra, orthonormal_frame,
    pull_back_metric, AutomorphismParams, BasisLabel, MetricTensor, Regime, ToleranceConfig,
};
use lorcurv::linalg::{j21, max_abs, singular_values};
use lorcurv::{Error, FamilyTag};
use nalgebra::Matrix3;
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn family() -> impl Strategy<Value = FamilyTag> {
    prop_oneof![Just(FamilyTag::GI), (-5.0..5.0f64).prop_map(FamilyTag::Gc), Just(FamilyTag::Gc(1.0))]
}

fn metric() -> impl Strategy<Value = Matrix3<f64>> {
    prop::array::uniform9(coeff()).prop_filter_map("ill-conditioned", lorentzian_from)
}

fn bases(tag: FamilyTag) -> Vec<BasisLabel> {
    match tag.regime() {
        Regime::G1 => vec![BasisLabel::Natural, BasisLabel::QAdapted],
        Regime::GcLt1 => vec![BasisLabel::Natural, BasisLabel::PAdapted],
        _ => vec![BasisLabel::Natural],
    }
}

proptest! {
    #![proptest_config(common::config(1000))]

    #[test]
    fn automorphism_params_give_automorphisms(
        fam in 0..FAMILIES.len(),
        x in prop::array::uniform6(coeff()),
    ) {
        let tag = FAMILIES[fam];
        let p = match tag {
            FamilyTag::GI => AutomorphismParams::GI { g: [[x[0], x[1]], [x[2], x[3]]], translation: [x[4], x[5]] },
            FamilyTag::Gc(_) => AutomorphismParams::Gc { alpha: x[0], beta: x[1], translation: [x[4], x[5]] },
        };
        let a = automorphism_matrix(tag, &p);
        let det = match p {
            AutomorphismParams::GI { .. } => x[0] * x[3] - x[1] * x[2],
            AutomorphismParams::Gc { .. } => x[1] * x[1] + (tag.c().unwrap() - 1.0) * x[0] * x[0],
        };
        prop_assume!(det.abs() > 1e-6);
        let alg = make_family_algebra(tag, BasisLabel::Natural).unwrap();
        prop_assert!(is_automorphism(&alg, &a.unwrap()));
    }

    #[test]
    fn pull_back_preserves_signature(h in metric(), s in prop::array::uniform9(coeff())) {
        let s = Matrix3::from_row_slice(&s);
        let sv = singular_values(&s);
        prop_assume!(sv[2] > 0.0 && sv[0] / sv[2] < 1e6);
        let h = MetricTensor::new(h, BasisLabel::Natural, ToleranceConfig::default()).unwrap();
        // Sylvester: the exact signature is always preserved
        let p = s.transpose() * h.matrix() * s;
        let ev = lorcurv::linalg::symmetrize(&p).symmetric_eigenvalues();
        prop_assert_eq!(ev.iter().filter(|x| **x > 0.0).count(), 2);
        prop_assert_eq!(ev.iter().filter(|x| **x < 0.0).count(), 1);
        // the validated pull-back agrees, unless the relative eigenvalue gap
        // falls under classification_tol, which is reported as degenerate
        let spread = ev.amin() / ev.amax();
        match pull_back_metric(&h, &s) {
            Ok(m) => prop_assert!(m.matrix().determinant() < 0.0),
            Err(Error::DegenerateMetric { .. }) => prop_assert!(spread <= h.tolerance.classification_tol),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn orthonormal_frame_satisfies_gram_condition(h in metric()) {
        let h = MetricTensor::new(h, BasisLabel::Natural, ToleranceConfig::default()).unwrap();
        let s = orthonormal_frame(&h).unwrap();
        let m = s.matrix();
        prop_assert!(max_abs(&(m.transpose() * h.matrix() * m - j21())) < 1e-9);
    }
}

proptest! {
    #![proptest_config(common::config(300))]

    #[test]
    fn change_basis_round_trip(tag in family(), s in prop::array::uniform9(coeff())) {
        let s = Matrix3::from_row_slice(&s);
        let sv = singular_values(&s);
        prop_assume!(sv[2] > 1e-2 && sv[0] / sv[2] < 1e3);
        let alg = make_family_algebra(tag, BasisLabel::Natural).unwrap();
        let back = change_basis(&change_basis(&alg, &s).unwrap(), &s.try_inverse().unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    prop_assert!((back.constant(i, j, k) - alg.constant(i, j, k)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn family_algebras_satisfy_jacobi(tag in family()) {
        for b in bases(tag) {
            let alg = make_family_algebra(tag, b).unwrap();
            prop_assert!(alg.jacobi_residual() < 1e-12);
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        prop_assert_eq!(alg.constant(i, j, k), -alg.constant(j, i, k));
                    }
                }
            }
        }
    }
}
