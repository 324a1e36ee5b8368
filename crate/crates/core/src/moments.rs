//! Characteristic function, MGF and moments of EEP(α, β, λ) and EE(α, β).
//!
//! Closed forms:
//!
//! * φ(t) = αλΓ(1 − it/β)/(1 − e^{−λ}) · ₁Ψ₁[(α, α); (1 + α − it/β, α); −λ]
//! * M(t) = αλΓ(1 + t/β)/(1 − e^{−λ}) · ₁Ψ₁[(α, α); (1 + α + t/β, α); −λ], t > −β
//! * E η^ν = αΓ(ν+1)/β^ν · Φ*_{1−α}(1, ν+1, 1), ν > 1 − α
//! * E ξ^ν = αλΓ(ν+1)/(β^ν(1 − e^{−λ})) Σ_m Φ*_{1−α(m+1)}(1, ν+1, 1)(−λ)^m/m!
//!
//! M is obtained from φ by t ↦ it, so M(t) = E e^{−tξ}: it is the Laplace
//! transform of the law, finite exactly for t > −β. Consequently
//! −M′(0) = E ξ and M″(0) = E ξ².
//!
//! Every closed form has a quadrature counterpart. Above λ = 30 the series
//! paths hand over to quadrature.

use crate::bernoulli::rational_to_dd;
use crate::dd::{Dd, DdComplex};
use crate::distributions::{EeParams, EepParams};
use crate::quadrature::{self, QuadOptions, QuadValue};
use crate::special_functions::{self as sf, goyal_laddha_phi_star, HlzStarArgs};
use crate::{Error, EvalResult, Result, LAMBDA_SWITCH};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

const PSI_EPS_REL: f64 = 1e-17;

/// ln(λ/(1 − e^{−λ})) in double-double.
fn ln_lead(lambda: f64) -> Dd {
    Dd::from_f64(lambda).ln() - (-(Dd::from_f64(-lambda).exp_m1())).ln()
}

/// ln(αλ/(1 − e^{−λ})), the prefactor of the ₁Ψ₁ forms.
fn ln_psi_lead(p: &EepParams) -> Dd {
    Dd::from_f64(p.alpha()).ln() + ln_lead(p.lambda())
}

/// E g(ξ) split at u = 1 − e^{−βx} = 1/2.
///
/// Below, v = u^α turns the density into λe^{−λv}/(1 − e^{−λ}) on
/// [0, 2^{−α}]. Above, w = βx with weight αλu^{α−1}e^{−λu^α}e^{−w}/(1 − e^{−λ})
/// on [ln 2, w_max].
fn expectation<T, G>(p: &EepParams, g: G, w_max: f64, opts: QuadOptions) -> EvalResult<T>
where
    T: QuadValue,
    G: Fn(f64) -> T,
{
    let (alpha, beta, lambda) = (p.alpha(), p.beta(), p.lambda());
    let lead = lambda / -(-lambda).exp_m1();
    let lower = quadrature::integrate(
        |v: f64| {
            let u = v.powf(1.0 / alpha);
            let x = -(-u).ln_1p() / beta;
            g(x) * ((-lambda * v).exp() * lead)
        },
        0.0,
        0.5f64.powf(alpha),
        opts,
    );
    let upper = quadrature::integrate(
        |w: f64| {
            let u = -(-w).exp_m1();
            let ln_wt = alpha.ln() + (alpha - 1.0) * u.ln() - lambda * u.powf(alpha) - w;
            g(w / beta) * (ln_wt.exp() * lead)
        },
        std::f64::consts::LN_2,
        w_max,
        opts,
    );
    EvalResult {
        value: lower.value + upper.value,
        abs_error_estimate: lower.abs_error_estimate + upper.abs_error_estimate,
        terms_used: lower.terms_used + upper.terms_used,
        converged: lower.converged && upper.converged,
    }
}

/// φ(t) by the closed form for τ = t/β ≥ 0.
fn chf_series(p: &EepParams, tau: f64) -> Result<EvalResult<Complex64>> {
    let alpha = p.alpha();
    let a = DdComplex::from_real(Dd::from_f64(alpha));
    let b = DdComplex::new(Dd::sum(1.0, alpha), Dd::from_f64(-tau));
    let x = DdComplex::from_real(Dd::from_f64(-p.lambda()));
    let psi = sf::psi11_dd(a, alpha, b, alpha, x, PSI_EPS_REL, sf::DEFAULT_MAX_TERMS)?;
    let ln_g = sf::ln_gamma_dd(DdComplex::new(Dd::ONE, Dd::from_f64(-tau)))?;
    let pref = (ln_g + DdComplex::from_real(ln_psi_lead(p))).exp();
    let v = (pref * psi.sum).to_c64();
    Ok(EvalResult {
        value: v,
        abs_error_estimate: psi.err * pref.abs_f64() + 2.0 * f64::EPSILON * v.norm(),
        terms_used: psi.terms,
        converged: psi.converged,
    })
}

/// Characteristic function E e^{itξ}.
///
/// Uses the ₁Ψ₁ closed form for λ ≤ 30 and [`eep_chf_quadrature`] above.
/// Negative t is mapped to the conjugate, so φ(−t) = conj φ(t) exactly.
pub fn eep_chf(p: &EepParams, t: f64) -> Result<EvalResult<Complex64>> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
    }
    if p.lambda() > LAMBDA_SWITCH {
        return eep_chf_quadrature(p, t);
    }
    let r = chf_series(p, t.abs() / p.beta())?;
    Ok(if t < 0.0 { r.map(|v| v.conj()) } else { r })
}

/// φ(t) = (αλ/(1−e^{−λ})) ∫_0^1 (1−u)^{−it/β} u^{α−1} e^{−λu^α} du by
/// adaptive quadrature.
pub fn eep_chf_quadrature(p: &EepParams, t: f64) -> Result<EvalResult<Complex64>> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
    }
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_panels: 4000 };
    Ok(expectation(p, |x: f64| Complex64::new(0.0, t * x).exp(), 45.0, opts))
}

fn check_mgf_domain(p: &EepParams, t: f64) -> Result<()> {
    if t.is_nan() || t <= -p.beta() {
        return Err(Error::Domain(format!("t must exceed -beta (t = {t}, beta = {})", p.beta())));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
    }
    Ok(())
}

/// M(t) = αλΓ(1+t/β)/(1−e^{−λ}) · ₁Ψ₁[(α,α); (1+α+t/β, α); −λ] for t > −β.
///
/// This is E e^{−tξ}; see the module documentation for the sign.
pub fn eep_mgf(p: &EepParams, t: f64) -> Result<EvalResult<f64>> {
    check_mgf_domain(p, t)?;
    if p.lambda() > LAMBDA_SWITCH {
        return eep_mgf_quadrature(p, t);
    }
    let alpha = p.alpha();
    let tau = t / p.beta();
    let a = DdComplex::from_real(Dd::from_f64(alpha));
    let b = DdComplex::from_real(Dd::sum(1.0, alpha) + tau);
    let x = DdComplex::from_real(Dd::from_f64(-p.lambda()));
    let psi = sf::psi11_dd(a, alpha, b, alpha, x, PSI_EPS_REL, sf::DEFAULT_MAX_TERMS)?;
    let ln_g = sf::ln_gamma_dd(DdComplex::from_real(Dd::sum(1.0, tau)))?;
    let pref = (ln_g.re + ln_psi_lead(p)).exp();
    let v = (pref * psi.sum.re).to_f64();
    Ok(EvalResult {
        value: v,
        abs_error_estimate: psi.err * pref.to_f64() + 2.0 * f64::EPSILON * v.abs(),
        terms_used: psi.terms,
        converged: psi.converged,
    })
}

/// Quadrature of E e^{−tξ} = ∫ e^{−tx} f(x) dx for t > −β.
pub fn eep_mgf_quadrature(p: &EepParams, t: f64) -> Result<EvalResult<f64>> {
    check_mgf_domain(p, t)?;
    let rate = 1.0 + t / p.beta();
    let w_max = std::f64::consts::LN_2 + 45.0 / rate;
    Ok(expectation(p, |x: f64| (-t * x).exp(), w_max, QuadOptions::relative(1e-12)))
}

fn check_series_order(alpha: f64, nu: f64) -> Result<()> {
    if !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("nu must be finite, got {nu}")));
    }
    if !(nu > 1.0 - alpha) {
        return Err(Error::Domain(format!("nu must exceed 1 - alpha (nu = {nu}, 1 - alpha = {})", 1.0 - alpha)));
    }
    Ok(())
}

/// ln Γ(x) for real x > 0 in double-double.
fn ln_gamma_real_dd(x: Dd) -> Result<Dd> {
    Ok(sf::ln_gamma_dd(DdComplex::from_real(x))?.re)
}

/// E η^ν = αΓ(ν+1)/β^ν · Φ*_{1−α}(1, ν+1, 1) for η ~ EE(α, β), ν > 1 − α.
pub fn ee_moment(p: &EeParams, nu: f64) -> Result<EvalResult<f64>> {
    check_series_order(p.alpha(), nu)?;
    let args = HlzStarArgs::new(1.0 - p.alpha(), 1.0, nu + 1.0, 1.0)?;
    let phi = goyal_laddha_phi_star(&args, 1e-16, sf::DEFAULT_MAX_TERMS)?;
    let ln_pref = Dd::from_f64(p.alpha()).ln() + ln_gamma_real_dd(Dd::sum(nu, 1.0))? - Dd::from_f64(p.beta()).ln() * nu;
    let pref = ln_pref.exp().to_f64();
    let v = pref * phi.value;
    Ok(EvalResult {
        value: v,
        abs_error_estimate: pref * phi.abs_error_estimate + 2.0 * f64::EPSILON * v.abs(),
        terms_used: phi.terms_used,
        converged: phi.converged,
    })
}

/// Integer moment of EE(α, β) from the series
/// (α n!/β^n) Σ_k (−1)^k C(α−1, k)/(k+1)^{n+1}, truncated after `k_max`
/// terms. For integer α the series terminates.
pub fn ee_moment_gupta_kundu(p: &EeParams, n: u32, k_max: usize) -> Result<EvalResult<f64>> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be a positive integer".into()));
    }
    let alpha = p.alpha();
    let np1 = n as i32 + 1;
    // c_k = (−1)^k C(α−1, k)
    let mut c = 1.0f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut converged = false;
    let mut tail = 0.0;
    let mut used = 0;
    for k in 0..=k_max {
        used = k + 1;
        let t = c * (k as f64 + 1.0).powi(-np1);
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        c *= (k as f64 + 1.0 - alpha) / (k as f64 + 1.0);
        if c == 0.0 {
            converged = true;
            tail = 0.0;
            break;
        }
        // terms decay like k^{−α−n−1}, so the tail is about |t_k| k/(α+n)
        tail = t.abs() * k as f64 / (alpha + n as f64);
        if k > 8 && tail <= 1e-15 * sum.abs() {
            converged = true;
            break;
        }
    }
    let mut fact = 1.0;
    for i in 2..=n {
        fact *= i as f64;
    }
    let pref = alpha * fact / p.beta().powi(n as i32);
    let v = pref * sum;
    Ok(EvalResult {
        value: v,
        abs_error_estimate: pref * tail + 4.0 * f64::EPSILON * v.abs(),
        terms_used: used,
        converged,
    })
}

/// α(m+1) − 1 as an exact double-double.
fn inner_exponent(alpha: f64, m: usize) -> Dd {
    Dd::prod(alpha, (m + 1) as f64) - 1.0
}

/// Number of outer terms of the λ-series: λ^M/M! < 1e−40.
fn outer_terms(lambda: f64) -> usize {
    let mut w = 1.0f64;
    let mut m = 0usize;
    loop {
        m += 1;
        w *= lambda / m as f64;
        if (m as f64) > lambda && w < 1e-40 {
            return m;
        }
    }
}

/// E ξ^ν = αλΓ(ν+1)/(β^ν(1−e^{−λ})) Σ_m Φ*_{1−α(m+1)}(1, ν+1, 1)(−λ)^m/m!
/// for ν > 1 − α.
///
/// Each Γ(ν+1)Φ*_μ(1, ν+1, 1) is evaluated from its integral form
/// ∫ t^ν e^{−t}(1 − e^{−t})^{−μ} dt in double-double precision, which keeps
/// the alternating outer sum accurate up to λ = 30. Above that the direct
/// quadrature [`eep_moment_quadrature`] is used.
pub fn eep_moment(p: &EepParams, nu: f64) -> Result<EvalResult<f64>> {
    check_series_order(p.alpha(), nu)?;
    if p.lambda() > LAMBDA_SWITCH {
        return eep_moment_quadrature(p, nu);
    }
    let lambda = p.lambda();
    let m_count = outer_terms(lambda);
    let cs: Vec<Dd> = (0..=m_count).map(|m| inner_exponent(p.alpha(), m)).collect();
    let inner = sf::unit_integrals_dd(&cs, nu + 1.0, 1.0);
    let mut sum = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut err = 0.0;
    let mut w = Dd::ONE;
    for (m, (i_m, e_m)) in inner.iter().enumerate() {
        if m > 0 {
            w = w * lambda / m as f64;
        }
        let t = w * *i_m;
        if m % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        abs_sum += t.to_f64().abs();
        err += w.to_f64() * e_m;
    }
    // the omitted terms are bounded by the first of them
    err += w.to_f64() * lambda / (m_count + 1) as f64 * inner[0].0.to_f64();
    let ln_pref = Dd::from_f64(p.alpha()).ln() + ln_lead(lambda) - Dd::from_f64(p.beta()).ln() * nu;
    let pref = ln_pref.exp();
    let v = (pref * sum).to_f64();
    let pf = pref.to_f64();
    Ok(EvalResult {
        value: v,
        abs_error_estimate: pf * (err + 1e-31 * abs_sum) + 2.0 * f64::EPSILON * v.abs(),
        terms_used: inner.len(),
        converged: true,
    })
}

/// Σ_{k=0}^{c} (−1)^k C(c, k)/(k+1)^{s} for integer c ≥ 0 and integer s,
/// exactly in rational arithmetic.
fn terminating_inner_sum(c: u64, s: u32) -> Dd {
    let mut l = BigInt::one();
    for k in 1..=(c + 1) {
        l = l.lcm(&BigInt::from(k));
    }
    let mut num = BigInt::from(0);
    let mut binom = BigInt::one();
    for k in 0..=c {
        let q = (&l / BigInt::from(k + 1)).pow(s);
        if k % 2 == 0 {
            num += &binom * q;
        } else {
            num -= &binom * q;
        }
        binom = binom * BigInt::from(c - k) / BigInt::from(k + 1);
    }
    rational_to_dd(&BigRational::new(num, l.pow(s)))
}

/// Integer moment from the double series
/// (αλ n!/(β^n(1−e^{−λ}))) Σ_{m,k} (−1)^{m+k} λ^m/(m!(k+1)^{n+1}) C(α(m+1)−1, k).
///
/// The inner sum over k terminates when α(m+1) − 1 is an integer and is then
/// summed exactly; otherwise it is summed directly for at most `k_max` terms
/// with an asymptotic expansion of the remainder. The outer sum stops at
/// `m_max`.
pub fn eep_moment_double_series(p: &EepParams, n: u32, m_max: usize, k_max: usize) -> Result<EvalResult<f64>> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be a positive integer".into()));
    }
    let lambda = p.lambda();
    let s = n + 1;
    let mut sum = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut err = 0.0;
    let mut w = Dd::ONE;
    let mut converged = true;
    let mut small_run = 0;
    let mut outer_done = false;
    let mut used = 0;
    for m in 0..=m_max {
        used = m + 1;
        if m > 0 {
            w = w * lambda / m as f64;
        }
        let c = inner_exponent(p.alpha(), m);
        let (inner, inner_err) = if c.lo == 0.0 && c.hi == c.hi.round() && c.hi >= 0.0 {
            (terminating_inner_sum(c.hi as u64, s), 0.0)
        } else {
            let r = sf::phi_star_unit_dd(-c, 1.0, s as f64, 1.0, k_max);
            converged &= r.converged;
            (r.sum, r.err)
        };
        let t = w * inner;
        if m % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        let ta = t.to_f64().abs();
        abs_sum += ta;
        err += w.to_f64() * inner_err;
        if (m as f64) > lambda && ta <= 1e-33 * sum.to_f64().abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            err += ta;
            outer_done = true;
            break;
        }
    }
    if !outer_done {
        converged = false;
    }
    let mut fact = Dd::ONE;
    for i in 2..=n {
        fact = fact * i as f64;
    }
    let ln_pref = Dd::from_f64(p.alpha()).ln() + ln_lead(lambda) - Dd::from_f64(p.beta()).ln() * n as f64;
    let pref = ln_pref.exp() * fact;
    let v = (pref * sum).to_f64();
    let pf = pref.to_f64();
    Ok(EvalResult {
        value: v,
        abs_error_estimate: pf * (err + 1e-31 * abs_sum) + 2.0 * f64::EPSILON * v.abs(),
        terms_used: used,
        converged,
    })
}

/// E ξ^ν = ∫ x^ν f(x) dx by adaptive quadrature, for ν > −α.
pub fn eep_moment_quadrature(p: &EepParams, nu: f64) -> Result<EvalResult<f64>> {
    if !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("nu must be finite, got {nu}")));
    }
    if !(nu > -p.alpha()) {
        return Err(Error::Domain(format!("nu must exceed -alpha (nu = {nu}, -alpha = {})", -p.alpha())));
    }
    let w_max = 50.0 + 5.0 * nu.max(0.0);
    Ok(expectation(p, |x: f64| x.powf(nu), w_max, QuadOptions::relative(1e-12)))
}

/// Mean and variance from the first two moments.
pub fn eep_mean_variance(p: &EepParams) -> Result<(f64, f64)> {
    let m1 = eep_moment(p, 1.0)?;
    let m2 = eep_moment(p, 2.0)?;
    if !(m1.converged && m2.converged) {
        return Err(Error::Domain("moment series did not converge".into()));
    }
    Ok((m1.value, m2.value - m1.value * m1.value))
}
