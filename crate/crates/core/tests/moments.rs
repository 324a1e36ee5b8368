use eep_core::distributions::{ee_pdf, eep_pdf};
use eep_core::moments::*;
use eep_core::quadrature::{integrate, QuadOptions};
use eep_core::{EeParams, EepParams};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn ee_real_order_matches_quadrature() {
    let e = EeParams::new(2.5, 1.3).unwrap();
    let opts = QuadOptions::relative(1e-13);
    let q = integrate(|x: f64| x.powf(0.7) * ee_pdf(&e, x), 0.0, 1.0, opts).value
        + integrate(|x: f64| x.powf(0.7) * ee_pdf(&e, x), 1.0, 60.0, opts).value;
    assert!(rel(ee_moment(&e, 0.7).unwrap().value, q) < 1e-8);
}

#[test]
fn gupta_kundu_agrees_for_non_integer_alpha() {
    let e = EeParams::new(3.5, 0.8).unwrap();
    for n in 1..=4 {
        let g = ee_moment_gupta_kundu(&e, n, 10_000_000).unwrap();
        assert!(rel(g.value, ee_moment(&e, n as f64).unwrap().value) < 1e-10);
    }
}

#[test]
fn small_lambda_reduces_to_ee() {
    let p = EepParams::new(2.5, 1.3, 1e-6).unwrap();
    for &nu in &[0.5, 1.0, 2.7] {
        let a = eep_moment(&p, nu).unwrap().value;
        let b = ee_moment(&p.ee(), nu).unwrap().value;
        assert!(rel(a, b) < 1e-5);
    }
    let (m, v) = eep_mean_variance(&EepParams::new(1.0, 1.0, 1e-6).unwrap()).unwrap();
    assert!((m - 1.0).abs() < 1e-5 && (v - 1.0).abs() < 1e-5);
}

#[test]
fn negative_order_moment() {
    let p = EepParams::new(2.0, 1.0, 1.0).unwrap();
    let s = eep_moment(&p, -0.5).unwrap().value;
    let q = eep_moment_quadrature(&p, -0.5).unwrap().value;
    assert!(s > 0.0);
    assert!(rel(s, q) < 1e-8);
}

#[test]
fn double_series_examples() {
    let p = EepParams::new(1.0, 1.0, 1.0).unwrap();
    let d = eep_moment_double_series(&p, 1, 500, 1000).unwrap();
    assert!(d.converged);
    assert!(rel(d.value, eep_moment(&p, 1.0).unwrap().value) < 1e-10);
    let p = EepParams::new(2.0, 0.5, 2.0).unwrap();
    let d = eep_moment_double_series(&p, 2, 500, 1000).unwrap();
    assert!(rel(d.value, eep_moment(&p, 2.0).unwrap().value) < 1e-10);
    // non-integer exponents use the truncated inner series
    let p = EepParams::new(0.7, 1.0, 3.0).unwrap();
    let d = eep_moment_double_series(&p, 2, 500, 100_000).unwrap();
    assert!(rel(d.value, eep_moment(&p, 2.0).unwrap().value) < 1e-10);
    assert!(!eep_moment_double_series(&p, 2, 3, 100_000).unwrap().converged);
}

#[test]
fn mgf_derivatives_give_moments() {
    let p = EepParams::new(2.0, 1.0, 1.0).unwrap();
    let h = 1e-4;
    let m = |t: f64| eep_mgf(&p, t).unwrap().value;
    let d1 = (m(h) - m(-h)) / (2.0 * h);
    let d2 = (m(h) - 2.0 * m(0.0) + m(-h)) / (h * h);
    let m1 = eep_moment(&p, 1.0).unwrap().value;
    let m2 = eep_moment(&p, 2.0).unwrap().value;
    // M(t) = E exp(-t xi)
    assert!(rel(-d1, m1) < 1e-5);
    assert!(rel(d2, m2) < 1e-5);
    let (_, var) = eep_mean_variance(&p).unwrap();
    assert!((d2 - d1 * d1 - var).abs() < 1e-4);
}

#[test]
fn chf_matches_direct_fourier_integral() {
    let p = EepParams::new(0.5, 2.0, 4.0).unwrap();
    let t = 1.7;
    let opts = QuadOptions::relative(1e-13);
    let re = integrate(|x: f64| (t * x).cos() * eep_pdf(&p, x), 0.0, 0.5, opts).value
        + integrate(|x: f64| (t * x).cos() * eep_pdf(&p, x), 0.5, 30.0, opts).value;
    let im = integrate(|x: f64| (t * x).sin() * eep_pdf(&p, x), 0.0, 0.5, opts).value
        + integrate(|x: f64| (t * x).sin() * eep_pdf(&p, x), 0.5, 30.0, opts).value;
    let c = eep_chf(&p, t).unwrap().value;
    assert!((c.re - re).abs() < 1e-9 && (c.im - im).abs() < 1e-9, "{c} {re} {im}");
}
