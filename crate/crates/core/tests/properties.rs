use proptest::prelude::*;

use infgroups::gaussint::{quadrature_integrate, wick_integrate, GaussPoly, GaussianIntegrand, Measure, Poly};
use infgroups::gaussrep::{rep_certify_pair, tau_operator, GaussRepParams, Motion, RepGenerator};
use infgroups::groups::{
    build_generator, cq, sample_subgroup, shift_embed, verify_relations, GeneratorSpec, GroupElement,
    GroupKind, Mat, RelationInputs, ShiftMap, CQ,
};
use infgroups::linalg::{c, eye, max_abs_diff, CMat};
use infgroups::matrixfn::{canonical_form, hermitian_calculus, polar_decompose, HermitianFn};
use infgroups::sampling::{self, Rng64};
use infgroups::spherical::{spherical_of_matrix, SphericalParams};
use infgroups::tensorrep::{gk_cocycle, gk_cocycle_residual, GkParams};
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn int_mat(rng: &mut Rng64, r: usize, cols: usize) -> Mat<CQ> {
    Mat::from_fn(r, cols, |_, _| cq(rng.gen_range(-3..=3), 1))
}

fn unimodular(rng: &mut Rng64, m: usize) -> Mat<CQ> {
    let l = Mat::from_fn(m, m, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => cq(1, 1),
        std::cmp::Ordering::Greater => cq(rng.gen_range(-2..=2), 1),
        _ => cq(0, 1),
    });
    l.mul(&l.transpose())
}

const KINDS: [GroupKind; 3] = [GroupKind::GL, GroupKind::Sp, GroupKind::O];

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn subgroup_samples_close_under_products(seed in any::<u64>(), kind_idx in 0usize..3) {
        let kind = KINDS[kind_idx];
        let xs = sample_subgroup(kind, 1, 4, 3, seed).unwrap();
        for g in &xs {
            prop_assert!(g.is_member().unwrap());
            for h in &xs {
                prop_assert!(g.mul(h).unwrap().is_member().unwrap());
            }
            let gi = g.inverse().unwrap();
            prop_assert_eq!(g.mul(&gi).unwrap().max_diff(&GroupElement::identity(kind, 4)).unwrap(), 0.0);
        }
    }

    #[test]
    fn relations_hold_exactly_on_integer_data(seed in any::<u64>(), sp in any::<bool>()) {
        let kind = if sp { GroupKind::Sp } else { GroupKind::O };
        let mut rng = sampling::rng(seed);
        let (m, n) = (4, 2);
        let g = GroupElement::from_matrix(GroupKind::GL, m, unimodular(&mut rng, m)).unwrap();
        let mut inp = RelationInputs::new(
            int_mat(&mut rng, m, n),
            int_mat(&mut rng, m, n),
            int_mat(&mut rng, m, m),
            g,
        );
        inp.second = Some((int_mat(&mut rng, m, n), int_mat(&mut rng, m, n)));
        let cert = verify_relations(&inp, n, kind).unwrap();
        prop_assert_eq!(cert.residual, 0.0);
    }

    #[test]
    fn shifted_elements_commute_with_vacated_block(b in prop::collection::vec(-4i64..=4, 3), v in prop::collection::vec(-4i64..=4, 3)) {
        let sym = |e: &[i64]| Mat::<CQ>::from_i64(2, 2, &[e[0], e[1], e[1], e[2]]);
        let g = build_generator(&GeneratorSpec::GammaU { b: sym(&b), level: 0 }, GroupKind::Sp, 2).unwrap();
        let h = shift_embed(&g, ShiftMap::SigmaLevel { q: 2, n: 0 }).unwrap();
        prop_assert!(h.is_member().unwrap());
        let w = build_generator(&GeneratorSpec::GammaU { b: sym(&v), level: 0 }, GroupKind::Sp, 2).unwrap();
        prop_assert_eq!(h.commutes_with(&w).unwrap(), 0.0);
    }

    #[test]
    fn polar_parts_reconstruct(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = sampling::rng(seed);
        let m = sampling::random_invertible(&mut rng, n, 0.3, 3.0);
        let parts = polar_decompose(&m);
        prop_assert!(max_abs_diff(&(&parts.u * &parts.p), &m) < 1e-10);
        prop_assert!(max_abs_diff(&(&parts.left * &parts.u), &m) < 1e-10);
        prop_assert!(max_abs_diff(&(parts.u.adjoint() * &parts.u), &eye(n)) < 1e-10);
    }

    #[test]
    fn cosh_sinh_identity(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = sampling::rng(seed);
        let h = sampling::random_hermitian(&mut rng, n, 1.5);
        let ch = hermitian_calculus(&h, HermitianFn::Cosh).unwrap();
        let sh = hermitian_calculus(&h, HermitianFn::Sinh).unwrap();
        let diff = &ch * &ch - &sh * &sh;
        prop_assert!(max_abs_diff(&diff, &eye(n)) < 1e-9 * (1.0 + ch.norm().powi(2)));
    }

    #[test]
    fn canonical_form_round_trip(seed in any::<u64>(), sp in any::<bool>()) {
        let mut rng = sampling::rng(seed);
        let (kind, a) = if sp {
            (GroupKind::Sp, sampling::random_sp_hermitian(&mut rng, 4))
        } else {
            (GroupKind::O, sampling::random_o_hermitian(&mut rng, 2))
        };
        let form = canonical_form(&a, kind).unwrap();
        prop_assert!(max_abs_diff(&(form.w.adjoint() * &form.w), &eye(a.nrows())) < 1e-10);
        prop_assert!(max_abs_diff(&(&form.w * &a * form.w.adjoint()), &form.d) < 1e-9);
    }

    #[test]
    fn wick_matches_quadrature(seed in any::<u64>(), p in 1usize..3) {
        let mut rng = sampling::rng(seed);
        let mut f = GaussPoly::polynomial(p, random_poly(&mut rng, p));
        f.add_hermitian(&(sampling::random_hermitian(&mut rng, p, 0.2) + eye(p) * c(0.3, 0.0)));
        let g = GaussianIntegrand::from_gauss_poly(&f, Measure::Nu);
        let exact = wick_integrate(&g).unwrap();
        let quad = quadrature_integrate(&g, 24).unwrap();
        prop_assert!((exact - quad).norm() < 1e-8 * (1.0 + exact.norm()));
    }

    #[test]
    fn nu_is_a_probability_measure(p in 1usize..5) {
        let one = GaussianIntegrand::from_gauss_poly(&GaussPoly::one(p), Measure::Nu);
        prop_assert!((wick_integrate(&one).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn tau_is_multiplicative(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let params = GaussRepParams::gl(CMat::zeros(2, 2), 0.0, 1, 2);
        let basis = params.basis().unwrap();
        let u = sampling::random_unitary(&mut rng, 2);
        let v = sampling::random_unitary(&mut rng, 2);
        let tu = tau_operator(&u, &basis).unwrap().matrix;
        let tv = tau_operator(&v, &basis).unwrap().matrix;
        let tuv = tau_operator(&(&u * &v), &basis).unwrap().matrix;
        prop_assert!(max_abs_diff(&(tu * tv), &tuv) < 1e-10);
    }

    #[test]
    fn alpha_hat_is_a_cocycle(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let a = sampling::random_hermitian(&mut rng, 2, 0.5);
        let lambda = sampling::random_complex(&mut rng, 2, 2, 0.5);
        let g = sampling::random_invertible(&mut rng, 2, 0.6, 1.5);
        let h = sampling::random_invertible(&mut rng, 2, 0.6, 1.5);
        let cert = infgroups::gaussrep::alpha_cocycle_check(&a, &lambda, &g, &h).unwrap();
        prop_assert!(cert.passed(), "{:?}", cert);
    }

    #[test]
    fn spherical_bounded_and_conjugate_on_inverse(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = sampling::rng(seed);
        let params = SphericalParams::new(sampling::random_hermitian(&mut rng, 2, 0.8), rng.gen_range(-1.0..1.0)).unwrap();
        let g = sampling::random_invertible(&mut rng, n, 0.4, 2.5);
        let phi = spherical_of_matrix(&params, &g).unwrap();
        let gi = infgroups::linalg::inverse(&g).unwrap();
        let phi_inv = spherical_of_matrix(&params, &gi).unwrap();
        prop_assert!(phi.norm() <= 1.0 + 1e-12);
        prop_assert!((phi_inv - phi.conj()).norm() < 1e-10);
    }

    #[test]
    fn spherical_multiplicative_on_disjoint_blocks(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let params = SphericalParams::new(sampling::random_hermitian(&mut rng, 1, 0.8), 0.4).unwrap();
        let g1 = sampling::random_invertible(&mut rng, 2, 0.4, 2.5);
        let g2 = sampling::random_invertible(&mut rng, 2, 0.4, 2.5);
        let mut both = eye(4);
        both.view_mut((0, 0), (2, 2)).copy_from(&g1);
        both.view_mut((2, 2), (2, 2)).copy_from(&g2);
        let lhs = spherical_of_matrix(&params, &both).unwrap();
        let rhs = spherical_of_matrix(&params, &g1).unwrap() * spherical_of_matrix(&params, &g2).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn gk_cocycle_identity_and_modulus(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let a = sampling::random_sp_hermitian(&mut rng, 2);
        let z = sampling::random_invertible(&mut rng, 2, 0.7, 1.5);
        let params = GkParams::from_canonical(GroupKind::Sp, a, z, 1, 1).unwrap();
        let y1 = sampling::random_complex(&mut rng, 1, 2, 0.7);
        let y2 = sampling::random_complex(&mut rng, 1, 2, 0.7);
        let lambda = sampling::random_complex(&mut rng, 2, 1, 0.7);
        prop_assert!(gk_cocycle_residual(&params, &y1, &y2, &lambda).unwrap() < 1e-10);
        prop_assert!((gk_cocycle(&params, &y1, &lambda).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(config(4))]

    #[test]
    fn gaussrep_is_a_unitary_homomorphism(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let mut params = GaussRepParams::gl(sampling::random_hermitian(&mut rng, 1, 0.5), 0.3, 2, 2);
        params.n = 1;
        params.z = sampling::random_complex(&mut rng, 1, 1, 0.5);
        let basis = params.basis().unwrap();
        let motion = |rng: &mut Rng64| {
            let g = sampling::random_unitary(rng, 2) * c(rng.gen_range(0.8..1.2), 0.0);
            Motion { h: sampling::random_complex(rng, 2, 1, 0.5), g }
        };
        let (g, h) = (motion(&mut rng), motion(&mut rng));
        let cert = rep_certify_pair(&params, &RepGenerator::Motion(g), &RepGenerator::Motion(h), &basis).unwrap();
        prop_assert!(cert.passed(), "{:?}", cert);
    }
}

fn random_poly(rng: &mut Rng64, p: usize) -> Poly {
    let mut out = Poly::one(2 * p);
    for i in 0..2 * p {
        let coeff = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        out = out.add(&Poly::var(2 * p, i).scale(coeff));
    }
    out.mul(&out)
}
