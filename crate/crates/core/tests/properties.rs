use eep_core::distributions::*;
use eep_core::moments::{eep_chf, eep_mgf};
use eep_core::EepParams;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = EepParams> {
    (0.2f64..8.0, 0.1f64..5.0, 0.01f64..25.0).prop_map(|(a, b, l)| EepParams::new(a, b, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cdf_is_monotone_and_complements_survival(p in params(), x in 0.0f64..20.0, dx in 0.0f64..1.0) {
        let (f1, f2) = (eep_cdf(&p, x), eep_cdf(&p, x + dx));
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!(f2 >= f1);
        prop_assert!((f1 + eep_survival(&p, x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quantile_inverts_cdf(p in params(), u in 1e-6f64..(1.0 - 1e-6)) {
        let x = eep_quantile(&p, u).unwrap();
        prop_assert!(x >= 0.0);
        prop_assert!((eep_cdf(&p, x) - u).abs() < 1e-12);
    }

    #[test]
    fn hazard_is_positive(p in params(), x in 1e-3f64..50.0) {
        let h = eep_hazard(&p, x).unwrap();
        prop_assert!(h.value > 0.0 && h.value.is_finite());
    }

    #[test]
    fn chf_is_bounded_and_hermitian(p in params(), t in 0.05f64..20.0) {
        let a = eep_chf(&p, t).unwrap().value;
        let b = eep_chf(&p, -t).unwrap().value;
        prop_assert!(a.norm() < 1.0);
        prop_assert_eq!(b, a.conj());
    }

    #[test]
    fn mgf_is_log_convex(p in params(), s in -0.9f64..3.0, d in 0.05f64..1.0) {
        let b = p.beta();
        let (t1, t2) = (s * b, (s + d) * b);
        let m1 = eep_mgf(&p, t1).unwrap().value;
        let m2 = eep_mgf(&p, t2).unwrap().value;
        let mid = eep_mgf(&p, 0.5 * (t1 + t2)).unwrap().value;
        prop_assert!(m1 > 0.0 && m2 > 0.0);
        prop_assert!(mid.ln() <= 0.5 * (m1.ln() + m2.ln()) + 1e-12);
    }
}

#[test]
fn sampling_is_reproducible_per_stream() {
    let p = EepParams::new(1.5, 2.0, 3.0).unwrap();
    let a = eep_sample(&p, 100, 5, 1);
    let b = eep_sample(&p, 100, 5, 1);
    let c = eep_sample(&p, 100, 5, 2);
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, c.values);
}
