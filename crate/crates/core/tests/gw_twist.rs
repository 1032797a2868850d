use proptest::prelude::*;
use qrr::gw::{j_reduced, qde_verify, s_matrix};
use qrr::rational::{binomial, int, ratio};
use qrr::ring::{BundleSpec, CohElement, LambdaScalar, RingDescriptor};
use qrr::series::{Convention, ZPoly, ZSeries};
use qrr::twist::{
    b_series, cone_transform, gamma_identity_check, i_function, lambda_limit_mismatch, serre_dual_i, stirling_check,
    TwistError,
};

fn ring(n: usize, floor: i64) -> RingDescriptor {
    RingDescriptor::new(n, floor).unwrap()
}

/// `(P + z)^k` mod `P^n` for any integer `k`, as a finite Laurent polynomial.
fn binomial_power(r: RingDescriptor, k: i64) -> ZPoly {
    let mut out = ZPoly::zero(r);
    for j in 0..r.n() {
        let c = binomial(k, j as u64);
        out.add_term(k - j as i64, CohElement::p_monomial(r, j, LambdaScalar::constant(c)));
    }
    out
}

#[test]
fn frame_columns_at_degree_one_are_binomial_powers() {
    let r = ring(5, 0);
    let (s, report) = s_matrix(&j_reduced(r, 3), 5, 3).unwrap();
    assert!(report.passed());
    for a in 0..5 {
        let col = s.column(a);
        assert_eq!(col.slice(1), &binomial_power(r, a as i64 - 5));
        // q⁰ part is multiplication by P^a
        assert_eq!(col.slice(0), &ZPoly::constant(CohElement::p_power(r, a)));
    }
    assert_eq!(s.column(0), &j_reduced(r, 3));
}

#[test]
fn frame_is_triangular_in_q() {
    let r = ring(4, 0);
    let (s, _) = s_matrix(&j_reduced(r, 4), 4, 4).unwrap();
    assert!(s.max_z_beyond_q0().unwrap() <= 0);
    for a in 0..4 {
        for d in 1..=4 {
            for (e, c) in s.column(a).slice(d).terms() {
                for (k, x) in c.components().iter().enumerate() {
                    if !x.is_zero() {
                        // q^d part of column a is homogeneous of degree a − 4d in (P, z)
                        assert_eq!(k as i64 + e, a as i64 - 4 * d as i64);
                    }
                }
            }
        }
    }
}

#[test]
fn qde_through_degree_eight() {
    for n in 2..=6 {
        for d in [0, 1, 8] {
            assert!(qde_verify(&j_reduced(ring(n, 0), d), n).unwrap().passed(), "n={n} D={d}");
        }
    }
    assert!(qde_verify(&j_reduced(ring(3, 0), 2), 4).is_err());
}

#[test]
fn unitarity_examples() {
    for (n, d) in [(2, 1), (5, 3), (3, 5)] {
        let (_, report) = s_matrix(&j_reduced(ring(n, 0), d), n, d).unwrap();
        assert!(report.passed(), "n={n} D={d}");
    }
}

#[test]
fn b_series_leading_coefficients() {
    let r = ring(3, 5);
    let b = b_series(2, r, 5).unwrap();
    // z¹: (1/12)(λ+ρ)^{-1};  z³: −(1/360)(λ+ρ)^{-3}
    assert_eq!(b.positive_coeff(1).unwrap().component(0).coeff(-1, 0), ratio(1, 12));
    assert_eq!(b.positive_coeff(3).unwrap().component(0).coeff(-3, 0), ratio(-1, 360));
    // (λ + 2P)^{-1} = λ^{-1} − 2Pλ^{-2} + …
    assert_eq!(b.positive_coeff(1).unwrap().component(1).coeff(-2, 0), ratio(-2, 12));
    assert!(b_series(0, r, 4).is_err());
}

#[test]
fn stirling_agreement_for_every_cap() {
    for cap in [1, 3, 5, 7, 9, 11] {
        let report = stirling_check(cap).unwrap();
        assert!(report.passed(), "cap {cap}");
        assert_eq!(report.compared.len(), (cap as usize + 1) / 2);
    }
    assert!(matches!(stirling_check(4), Err(TwistError::InvalidZCap(4))));
}

#[test]
fn quintic_hypergeometric_slice() {
    let r = ring(5, 0);
    let i = i_function(&j_reduced(r, 1), &BundleSpec::new(vec![5], false).unwrap()).unwrap();
    // Π_{k=1}^{5}(5P + kz)·(P+z)^{-5}
    let mut expected = binomial_power(r, -5);
    for k in 1..=5 {
        expected = &expected * &ZPoly::linear(CohElement::p_monomial(r, 1, LambdaScalar::integer(5)), CohElement::constant(r, int(k)));
    }
    assert_eq!(i.slice(1), &expected);
    assert_eq!(i.slice(1).coeff(0).component(0), &LambdaScalar::integer(120));
    assert_eq!(i.slice(1).coeff(-1).component(1), &LambdaScalar::integer(770));
}

#[test]
fn serre_products_all_small_degrees() {
    let j = j_reduced(ring(4, 0), 6);
    for l in 1..=6 {
        let (_, report) = serre_dual_i(&j, &BundleSpec::new(vec![l], true).unwrap()).unwrap();
        assert!(report.passed(), "l={l}");
    }
    let (_, report) = serre_dual_i(&j, &BundleSpec::new(vec![2, 5], true).unwrap()).unwrap();
    assert!(report.passed());
    assert!(serre_dual_i(&j.clone().with_convention(Convention::Raw), &BundleSpec::new(vec![1], true).unwrap()).is_err());
}

#[test]
fn gamma_identity_for_the_quintic() {
    let j = j_reduced(ring(5, 2), 3);
    let report = gamma_identity_check(&j, &BundleSpec::new(vec![5], true).unwrap(), 2).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!(report.degrees.iter().all(|d| d.certified_from <= -2));
    assert!(matches!(
        gamma_identity_check(&j, &BundleSpec::new(vec![5], false).unwrap(), 2),
        Err(TwistError::NotEquivariant)
    ));
}

#[test]
fn cone_transform_is_a_group_action() {
    let r = ring(3, 4);
    let j = j_reduced(r, 2);
    let e1 = BundleSpec::new(vec![1], true).unwrap();
    let e2 = BundleSpec::new(vec![2], true).unwrap();
    let both = e1.direct_sum(&e2).unwrap();
    let stepwise = cone_transform(&cone_transform(&j, &e1, 1, None).unwrap(), &e2, 1, None).unwrap();
    let direct = cone_transform(&j, &both, 1, None).unwrap();
    assert!(stepwise.agrees_with(&direct));
    let back = cone_transform(&direct, &both, -1, None).unwrap();
    assert!(back.agrees_with(&j));
    assert_eq!(cone_transform(&j, &BundleSpec::zero(true), -1, None).unwrap(), j);
    assert!(matches!(cone_transform(&j, &e1, 2, None), Err(TwistError::InvalidSign(2))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equivariant_limit_is_plain_i(n in 2usize..=5, degrees in prop::collection::vec(1u32..=4, 1..=2), d in 0usize..=3) {
        let j = j_reduced(ring(n, 0), d);
        let eq = i_function(&j, &BundleSpec::new(degrees.clone(), true).unwrap()).unwrap();
        let plain = i_function(&j, &BundleSpec::new(degrees, false).unwrap()).unwrap();
        prop_assert_eq!(lambda_limit_mismatch(&eq, &plain).unwrap(), None);
    }

    #[test]
    fn j_slices_are_homogeneous(n in 2usize..=6, d in 1usize..=5) {
        let j: ZSeries = j_reduced(ring(n, 0), d);
        for (e, c) in j.slice(d).terms() {
            for (k, x) in c.components().iter().enumerate() {
                if !x.is_zero() {
                    prop_assert_eq!(k as i64 + e, -(n as i64) * d as i64);
                }
            }
        }
    }
}
