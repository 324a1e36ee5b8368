//! EE(α, β) and EEP(α, β, λ) distribution functions and sampling.
//!
//! With G(x) = (1 − e^{−βx})^α the EEP distribution function is
//! F(x) = (1 − e^{−λG})/(1 − e^{−λ}). All tail quantities are formed with
//! `expm1`/`ln_1p` so that neither 1 − F nor 1 − G is ever computed by
//! subtraction.

use crate::rng::StreamRng;
use crate::{Error, Result};
use serde::Serialize;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EepParams {
    alpha: f64,
    beta: f64,
    lambda: f64,
}

impl EepParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        check_positive("lambda", lambda)?;
        Ok(EepParams { alpha, beta, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The parent EE(α, β) law.
    pub fn ee(&self) -> EeParams {
        EeParams { alpha: self.alpha, beta: self.beta }
    }

    /// 1 − e^{−λ}
    pub(crate) fn norm(&self) -> f64 {
        -(-self.lambda).exp_m1()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EeParams {
    alpha: f64,
    beta: f64,
}

impl EeParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        Ok(EeParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Lifetimes drawn by [`eep_sample`] with the key that produced them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream_id: u64,
}

/// ln(1 − e^{−βx}) for x > 0.
#[inline]
fn ln_one_minus_exp(bx: f64) -> f64 {
    if bx < std::f64::consts::LN_2 {
        (-(-bx).exp_m1()).ln()
    } else {
        (-(-bx).exp()).ln_1p()
    }
}

/// G(x) = (1 − e^{−βx})^α for x > 0.
#[inline]
fn g_of(alpha: f64, beta: f64, x: f64) -> f64 {
    (alpha * ln_one_minus_exp(beta * x)).exp()
}

/// 1 − G(x) for x > 0, without cancellation.
#[inline]
fn one_minus_g(alpha: f64, beta: f64, x: f64) -> f64 {
    -(alpha * (-(-beta * x).exp()).ln_1p()).exp_m1()
}

pub fn eep_cdf(p: &EepParams, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    let g = g_of(p.alpha, p.beta, x);
    (-(-p.lambda * g).exp_m1() / p.norm()).min(1.0)
}

/// Density. For α < 1 the density is unbounded at the origin and
/// `eep_pdf(p, 0.0)` returns `+∞`.
pub fn eep_pdf(p: &EepParams, x: f64) -> f64 {
    if x < 0.0 || x.is_nan() || x == f64::INFINITY {
        return 0.0;
    }
    let lead = p.alpha * p.beta * p.lambda / p.norm();
    if x == 0.0 {
        return if p.alpha < 1.0 {
            f64::INFINITY
        } else if p.alpha == 1.0 {
            lead
        } else {
            0.0
        };
    }
    let bx = p.beta * x;
    let l1 = ln_one_minus_exp(bx);
    let g = (p.alpha * l1).exp();
    (lead.ln() - bx + (p.alpha - 1.0) * l1 - p.lambda * g).exp()
}

/// Survival function (e^{−λG} − e^{−λ})/(1 − e^{−λ}).
pub fn eep_survival(p: &EepParams, x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    let g = g_of(p.alpha, p.beta, x);
    let h = one_minus_g(p.alpha, p.beta, x);
    (-p.lambda * g).exp() * (-(-p.lambda * h).exp_m1()) / p.norm()
}

/// Hazard rate with a flag set when the deep-tail asymptote β is returned.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Hazard {
    pub value: f64,
    pub tail_asymptote: bool,
}

/// Hazard rate f/S, simplified to αβλ e^{−βx}(1−e^{−βx})^{α−1}/(1 − e^{−λ(1−G)}).
pub fn eep_hazard(p: &EepParams, x: f64) -> Result<Hazard> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("hazard requires x > 0, got x = {x}")));
    }
    let bx = p.beta * x;
    let e = (-bx).exp();
    let h = if x.is_finite() { one_minus_g(p.alpha, p.beta, x) } else { 0.0 };
    let denom = -(-p.lambda * h).exp_m1();
    if e == 0.0 || h == 0.0 || denom == 0.0 {
        return Ok(Hazard { value: p.beta, tail_asymptote: true });
    }
    let ln_h = (p.alpha * p.beta * p.lambda).ln() - bx + (p.alpha - 1.0) * ln_one_minus_exp(bx) - denom.ln();
    Ok(Hazard { value: ln_h.exp(), tail_asymptote: false })
}

/// Closed-form inverse of the distribution function.
pub fn eep_quantile(p: &EepParams, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("u must lie in [0, 1), got u = {u}")));
    }
    if u == 1.0 {
        return Ok(f64::INFINITY);
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let y = -(u * (-p.lambda).exp_m1()).ln_1p() / p.lambda;
    let v = (y.ln() / p.alpha).exp();
    Ok(-(-v).ln_1p() / p.beta)
}

/// Inverse-transform sample of size `n` from the stream `(seed, stream_id)`.
pub fn eep_sample(p: &EepParams, n: usize, seed: u64, stream_id: u64) -> SampleBatch {
    let mut rng = StreamRng::new(seed, stream_id);
    let values = (0..n)
        .map(|_| eep_quantile(p, rng.open01()).expect("open-interval variate"))
        .collect();
    SampleBatch { values, seed, stream_id }
}

pub fn ee_cdf(p: &EeParams, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    g_of(p.alpha, p.beta, x)
}

pub fn ee_pdf(p: &EeParams, x: f64) -> f64 {
    if x < 0.0 || x.is_nan() || x == f64::INFINITY {
        return 0.0;
    }
    if x == 0.0 {
        return if p.alpha < 1.0 {
            f64::INFINITY
        } else if p.alpha == 1.0 {
            p.beta
        } else {
            0.0
        };
    }
    let bx = p.beta * x;
    ((p.alpha * p.beta).ln() - bx + (p.alpha - 1.0) * ln_one_minus_exp(bx)).exp()
}

/// Partial sum of the Poisson-mixture expansion
/// F(x) = (1/(1−e^{−λ})) Σ_{m≥1} (−1)^{m+1}/m! · [λ F_η(x)]^m.
pub fn mixture_cdf_partial(p: &EepParams, x: f64, m_max: usize) -> Result<f64> {
    if m_max < 1 {
        return Err(Error::InvalidParameter("m_max must be at least 1".into()));
    }
    let y = p.lambda * ee_cdf(&p.ee(), x);
    let mut term = 1.0;
    let mut sum = 0.0;
    for m in 1..=m_max {
        term *= y / m as f64;
        if m % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum / p.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, l: f64) -> EepParams {
        EepParams::new(a, b, l).unwrap()
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(EepParams::new(0.0, 1.0, 1.0).is_err());
        assert!(EepParams::new(1.0, -1.0, 1.0).is_err());
        assert!(EepParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(EepParams::new(1.0, 1.0, f64::INFINITY).is_err());
        assert!(EeParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn cdf_hand_value() {
        // α = β = λ = 1, x = 1
        let e1 = (-1f64).exp();
        let expected = (1.0 - (-(1.0 - e1)).exp()) / (1.0 - e1);
        assert!((eep_cdf(&p(1.0, 1.0, 1.0), 1.0) - expected).abs() < 1e-15);
        // 40-digit reference value
        assert!((expected - 0.741_213_662_598_908_95).abs() < 1e-15);
        assert_eq!(eep_cdf(&p(1.0, 1.0, 1.0), 0.0), 0.0);
        assert_eq!(eep_cdf(&p(1.0, 1.0, 1.0), f64::INFINITY), 1.0);
    }

    #[test]
    fn pdf_edges() {
        assert_eq!(eep_pdf(&p(2.0, 1.0, 1.0), -1.0), 0.0);
        assert_eq!(eep_pdf(&p(0.5, 1.0, 1.0), 0.0), f64::INFINITY);
        assert!(eep_pdf(&p(0.5, 1.0, 1.0), 1e-300).is_finite());
        assert_eq!(eep_pdf(&p(2.0, 1.0, 1.0), 0.0), 0.0);
    }

    #[test]
    fn survival_complements_cdf() {
        let q = p(2.0, 1.5, 3.0);
        for &x in &[0.01, 0.3, 1.0, 2.5, 6.0] {
            let s = eep_survival(&q, x);
            assert!((s + eep_cdf(&q, x) - 1.0).abs() < 1e-14);
        }
        assert_eq!(eep_survival(&q, 0.0), 1.0);
        assert!(eep_survival(&q, 400.0) > 0.0);
    }

    #[test]
    fn hazard_limits() {
        let q = p(2.0, 1.5, 3.0);
        let h = eep_hazard(&q, 2000.0).unwrap();
        assert!(h.tail_asymptote && h.value == 1.5);
        let h = eep_hazard(&q, 30.0).unwrap();
        assert!(!h.tail_asymptote && (h.value - 1.5).abs() < 1e-10);
        assert!(eep_hazard(&q, 0.0).is_err());
        // α = 1, tiny λ: exponential hazard β
        let q = p(1.0, 0.7, 1e-9);
        for &x in &[0.1, 1.0, 10.0] {
            assert!((eep_hazard(&q, x).unwrap().value - 0.7).abs() < 1e-8);
        }
    }

    #[test]
    fn quantile_edges() {
        let q = p(1.0, 1.0, 1.0);
        assert_eq!(eep_quantile(&q, 0.0).unwrap(), 0.0);
        assert_eq!(eep_quantile(&q, 1.0).unwrap(), f64::INFINITY);
        assert!(eep_quantile(&q, -0.1).is_err());
        assert!(eep_quantile(&q, 1.1).is_err());
        assert!(eep_quantile(&q, f64::NAN).is_err());
    }

    #[test]
    fn quantile_matches_bisection() {
        let q = p(1.0, 1.0, 1.0);
        let (mut lo, mut hi) = (0.0f64, 50.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if eep_cdf(&q, mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((eep_quantile(&q, 0.5).unwrap() - 0.5 * (lo + hi)).abs() < 1e-10);
    }

    #[test]
    fn ee_functions() {
        let e = EeParams::new(1.0, 2.0).unwrap();
        for &x in &[0.1, 1.0, 3.0] {
            assert!((ee_cdf(&e, x) - (1.0 - (-2.0 * x).exp())).abs() < 1e-15);
            assert!((ee_pdf(&e, x) - 2.0 * (-2.0 * x).exp()).abs() < 1e-15);
        }
        assert_eq!(ee_cdf(&e, 0.0), 0.0);
    }

    #[test]
    fn sample_is_reproducible() {
        let q = p(2.0, 1.0, 1.0);
        assert!(eep_sample(&q, 0, 1, 0).values.is_empty());
        let a = eep_sample(&q, 1000, 11, 2);
        let b = eep_sample(&q, 1000, 11, 2);
        assert_eq!(a, b);
        assert!(a.values.iter().all(|v| *v > 0.0 && v.is_finite()));
        let c = eep_sample(&q, 1000, 11, 3);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn mixture_leading_term_and_limit() {
        let q = p(2.0, 1.0, 1e-4);
        let x = 0.8;
        let f_eta = ee_cdf(&q.ee(), x);
        let m1 = mixture_cdf_partial(&q, x, 1).unwrap();
        assert!((m1 - 1e-4 * f_eta / q.norm()).abs() < 1e-15);
        assert!((m1 - f_eta).abs() < 1e-4);
        let q = p(2.0, 1.0, 5.0);
        let full = mixture_cdf_partial(&q, x, 60).unwrap();
        assert!((full - eep_cdf(&q, x)).abs() < 1e-12);
        assert!(mixture_cdf_partial(&q, x, 0).is_err());
    }
}
