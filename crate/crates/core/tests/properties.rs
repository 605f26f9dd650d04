use aqg_core::duality::{fourier, Duality};
use aqg_core::examples::{make_group_algebra, make_suq2, rational, FiniteGroup};
use aqg_core::hopf::random_element;
use aqg_core::modular::ModularMaps;
use aqg_core::{scalar_pow_it, Element, PositiveEigenvalue, Presentation, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn gaussian() -> impl Strategy<Value = Scalar> {
    (-20i64..20, 1i64..9, -20i64..20, 1i64..9).prop_map(|(a, b, c, d)| &Scalar::ratio(a, b) + &(&Scalar::i() * &Scalar::ratio(c, d)))
}

fn suq2() -> &'static Presentation {
    static P: OnceLock<Presentation> = OnceLock::new();
    P.get_or_init(|| make_suq2(&rational(1, 4), 6).unwrap())
}

fn suq2_modular() -> &'static ModularMaps {
    static M: OnceLock<ModularMaps> = OnceLock::new();
    M.get_or_init(|| ModularMaps::derive(suq2(), 2).unwrap())
}

fn suq2_duality() -> &'static Duality {
    static D: OnceLock<Duality> = OnceLock::new();
    D.get_or_init(|| Duality::new(suq2(), 2, 1e-9).unwrap())
}

fn elements(p: &Presentation, degree: usize, seed: u64, k: usize) -> Vec<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| random_element(p, degree, 3, &mut rng)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_scalars_form_a_field(a in gaussian(), b in gaussian(), c in gaussian()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn imaginary_powers_form_a_group(n in 1i64..50, d in 1i64..50, s in -10.0f64..10.0, t in -10.0f64..10.0) {
        let lam = PositiveEigenvalue::certify(Scalar::ratio(n, d), 1e-12).unwrap();
        let ps = scalar_pow_it(&lam, s).unwrap();
        let pt = scalar_pow_it(&lam, t).unwrap();
        let pst = scalar_pow_it(&lam, s + t).unwrap();
        prop_assert!((&ps * &pt).approx_eq(&pst, 1e-10));
        prop_assert!((ps.abs() - 1.0).abs() < 1e-12);
        prop_assert_eq!(scalar_pow_it(&lam, 0.0).unwrap(), Scalar::one());
    }

    #[test]
    fn suq2_products_are_associative_and_compatible(seed in any::<u64>()) {
        let p = suq2();
        let v = elements(p, 1, seed, 3);
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        prop_assert_eq!(&(x * y) * z, x * &(y * z));
        prop_assert_eq!((x * y).comul(), x.comul().mul(&y.comul()));
        prop_assert_eq!((x * y).star(), &y.star() * &x.star());
        prop_assert_eq!((x * y).antipode(), &y.antipode() * &x.antipode());
        prop_assert_eq!(x.antipode().star().antipode().star(), x.clone());
    }

    #[test]
    fn suq2_integrals_are_positive(seed in any::<u64>()) {
        let m = suq2_modular();
        for x in elements(suq2(), 2, seed, 2) {
            prop_assert!(m.positivity_probe(&x).is_ok());
        }
    }

    #[test]
    fn dual_product_is_associative_and_star_reverses_it(seed in any::<u64>()) {
        let g = make_group_algebra(&FiniteGroup::s3());
        let d = Duality::new(&g, 0, 1e-9).unwrap();
        for (p, d) in [(&g, &d), (suq2(), suq2_duality())] {
            let v: Vec<_> = elements(p, 1, seed, 3).into_iter().map(|a| fourier(&a)).collect();
            let (x, y, z) = (&v[0], &v[1], &v[2]);
            let l = d.mul(&d.mul(x, y).unwrap(), z).unwrap();
            let r = d.mul(x, &d.mul(y, z).unwrap()).unwrap();
            prop_assert_eq!(l.preimage, r.preimage);
            let s = d.star(&d.mul(x, y).unwrap()).unwrap();
            let t = d.mul(&d.star(y).unwrap(), &d.star(x).unwrap()).unwrap();
            prop_assert_eq!(s.preimage, t.preimage);
            prop_assert_eq!(d.star(&d.star(x).unwrap()).unwrap().preimage, x.preimage.clone());
        }
    }

    #[test]
    fn plancherel_holds_on_random_elements(seed in any::<u64>()) {
        let d = suq2_duality();
        for a in elements(suq2(), 1, seed, 2) {
            let (l, r) = d.plancherel(&a).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}
