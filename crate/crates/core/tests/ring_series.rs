use proptest::prelude::*;
use qrr::rational::int;
use qrr::ring::{
    euler_expansion_check, integrate, poincare_pairing, twisted_gram, BundleSpec, CohElement, LambdaScalar,
    RingDescriptor,
};
use qrr::series::{project, series_mul, symplectic_form, Convention, Half, ZPoly, ZSeries};
use qrr::verify::gen;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn triple(seed: u64, n: usize, floor: i64) -> (CohElement, CohElement, CohElement) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = RingDescriptor::new(n, floor).unwrap();
    (gen::coh(&mut rng, r), gen::coh(&mut rng, r), gen::coh(&mut rng, r))
}

fn series_pair(seed: u64, n: usize, d: usize) -> (ZSeries, ZSeries) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = RingDescriptor::new(n, 0).unwrap();
    (gen::series(&mut rng, r, d, Convention::Raw), gen::series(&mut rng, r, d, Convention::Raw))
}

fn negated(v: Vec<LambdaScalar>) -> Vec<LambdaScalar> {
    v.iter().map(|x| -x).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), n in 2usize..=5, floor in 0i64..=3) {
        let (a, b, c) = triple(seed, n, floor);
        prop_assert!((&a * &b).agrees_with(&(&b * &a)));
        prop_assert!((&(&a * &b) * &c).agrees_with(&(&a * &(&b * &c))));
        prop_assert!((&a * &(&b + &c)).agrees_with(&(&(&a * &b) + &(&a * &c))));
        prop_assert!((&a * &CohElement::one(a.ring())).agrees_with(&a));
    }

    #[test]
    fn euler_expansion_is_exact(n in 2usize..=8, degrees in prop::collection::vec(1u32..=6, 1..=4)) {
        let ring = RingDescriptor::new(n, n as i64).unwrap();
        let (ok, residual) = euler_expansion_check(&BundleSpec::new(degrees, true).unwrap(), ring).unwrap();
        prop_assert!(ok, "residual {}", residual);
    }

    #[test]
    fn omega_is_antisymmetric_and_z_skew(seed in any::<u64>(), n in 2usize..=4, d in 0usize..=2) {
        let (f, g) = series_pair(seed, n, d);
        prop_assert_eq!(symplectic_form(&f, &g).unwrap(), negated(symplectic_form(&g, &f).unwrap()));
        let z = ZPoly::monomial(1, CohElement::one(f.ring()));
        let a = symplectic_form(&f.mul_zpoly(&z), &g).unwrap();
        let b = symplectic_form(&f, &g.mul_zpoly(&z)).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x + y).is_zero()));
    }

    #[test]
    fn both_halves_are_lagrangian(seed in any::<u64>(), n in 2usize..=4, d in 0usize..=2) {
        let (f, g) = series_pair(seed, n, d);
        for half in [Half::Plus, Half::Minus] {
            let w = symplectic_form(&project(&f, half).unwrap(), &project(&g, half).unwrap()).unwrap();
            prop_assert!(w.iter().all(LambdaScalar::is_zero));
        }
        // the halves pair only with each other
        let plus = project(&f, Half::Plus).unwrap();
        let minus = project(&g, Half::Minus).unwrap();
        let full = symplectic_form(&f, &g).unwrap();
        let cross = symplectic_form(&plus, &minus).unwrap();
        let other = symplectic_form(&project(&f, Half::Minus).unwrap(), &project(&g, Half::Plus).unwrap()).unwrap();
        prop_assert!(full.iter().zip(cross.iter().zip(&other)).all(|(x, (y, w))| (x - &(y + w)).is_zero()));
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), d in 0usize..=3) {
        let (f, _) = series_pair(seed, 3, d);
        let plus = project(&f, Half::Plus).unwrap();
        prop_assert_eq!(project(&plus, Half::Plus).unwrap(), plus.clone());
        prop_assert!(project(&plus, Half::Minus).unwrap().is_zero());
        prop_assert_eq!(plus.try_add(&project(&f, Half::Minus).unwrap()).unwrap(), f);
    }

    #[test]
    fn product_is_associative_and_commutative(seed in any::<u64>(), d in 0usize..=3) {
        let (f, g) = series_pair(seed, 3, d);
        let h = series_pair(seed.wrapping_add(1), 3, d).0;
        prop_assert_eq!(series_mul(&f, &g).unwrap(), series_mul(&g, &f).unwrap());
        prop_assert_eq!(
            series_mul(&series_mul(&f, &g).unwrap(), &h).unwrap(),
            series_mul(&f, &series_mul(&g, &h).unwrap()).unwrap()
        );
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), d in 0usize..=3, floor in 0i64..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = RingDescriptor::new(3, floor).unwrap();
        let f = gen::series(&mut rng, r, d, Convention::Reduced);
        let v = f.to_json();
        let back = ZSeries::from_json(&v).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_json(), v);
    }
}

#[test]
fn poincare_pairing_is_perfect() {
    for n in 2..=8 {
        let r = RingDescriptor::new(n, 0).unwrap();
        for a in 0..n {
            for b in 0..n {
                let v = poincare_pairing(&CohElement::p_power(r, a), &CohElement::p_power(r, b)).unwrap();
                assert_eq!(v.as_rational(), Some(int(i64::from(a + b == n - 1))));
            }
        }
    }
}

#[test]
fn twisted_gram_has_unit_antidiagonal() {
    let r = RingDescriptor::new(5, 0).unwrap();
    let gram = twisted_gram(r, &BundleSpec::new(vec![2, 3], true).unwrap());
    for a in 0..5 {
        // λ^r on the anti-diagonal, nothing beyond it
        assert_eq!(gram[a][4 - a], LambdaScalar::lambda_pow(2));
        for b in 5 - a..5 {
            assert!(gram[a][b].is_zero());
        }
    }
}

#[test]
fn integration_of_products() {
    let r = RingDescriptor::new(5, 0).unwrap();
    let lp = &CohElement::from_scalar(r, LambdaScalar::lambda()) + &CohElement::p_monomial(r, 1, LambdaScalar::integer(5));
    assert_eq!(integrate(&(&lp * &CohElement::p_power(r, 3))), LambdaScalar::integer(5));
    assert!(integrate(&(&CohElement::p_power(r, 2) * &CohElement::p_power(r, 3))).is_zero());
}

#[test]
fn degree_zero_series() {
    let r = RingDescriptor::new(3, 0).unwrap();
    let f = ZSeries::one(r, 0, Convention::Raw);
    let g = ZSeries::monomial(r, 0, Convention::Raw, 0, ZPoly::monomial(-1, CohElement::p_power(r, 2)));
    assert_eq!(symplectic_form(&f, &g).unwrap(), vec![LambdaScalar::one()]);
    assert_eq!(series_mul(&f, &g).unwrap(), g);
}
