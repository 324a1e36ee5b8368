//! Maximum-likelihood fitting of EEP(α, β, λ).
//!
//! The simplex search runs over (ln α, ln β, ln λ), which keeps all three
//! parameters positive without constraints.

use crate::distributions::EepParams;
use crate::{Error, Result};
use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use serde::Serialize;

pub const MIN_SAMPLES: usize = 10;
const MAX_ITERS: u64 = 5000;
const HESSIAN_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub params: EepParams,
    pub log_likelihood: f64,
    pub iterations: u64,
    pub converged: bool,
    /// Delta-method standard errors of (α, β, λ), when the observed
    /// information is positive definite.
    pub standard_errors: Option<[f64; 3]>,
}

/// ln f(x) for x > 0, computed without forming the density.
pub fn eep_ln_pdf(p: &EepParams, x: f64) -> f64 {
    let (a, b, l) = (p.alpha(), p.beta(), p.lambda());
    let ln_u = (-(-b * x).exp()).ln_1p();
    let g = (a * ln_u).exp();
    a.ln() + b.ln() + l.ln() - b * x + (a - 1.0) * ln_u - l * g - (-(-l).exp_m1()).ln()
}

pub fn log_likelihood(p: &EepParams, data: &[f64]) -> f64 {
    data.iter().map(|&x| eep_ln_pdf(p, x)).sum()
}

fn from_log(v: &[f64]) -> Option<EepParams> {
    EepParams::new(v[0].exp(), v[1].exp(), v[2].exp()).ok()
}

struct NegLogLik<'a> {
    data: &'a [f64],
}

impl CostFunction for NegLogLik<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, v: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let ll = from_log(v).map(|p| log_likelihood(&p, self.data)).unwrap_or(f64::NAN);
        Ok(if ll.is_finite() { -ll } else { f64::INFINITY })
    }
}

fn validate_data(data: &[f64]) -> Result<()> {
    if data.len() < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_SAMPLES} observations, got {}",
            data.len()
        )));
    }
    if let Some(bad) = data.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("data must be positive and finite, found {bad}")));
    }
    Ok(())
}

/// Starting point: α from the slope of ln F against ln x between the 5% and
/// 25% sample quantiles (F ~ (βx)^α near 0), β = 1/mean, λ = 1.
pub fn initial_guess(data: &[f64]) -> Result<EepParams> {
    validate_data(data)?;
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |u: f64| s[((u * s.len() as f64) as usize).min(s.len() - 1)];
    let (x1, x2) = (q(0.05), q(0.25));
    let alpha = if x2 > x1 { (5.0f64.ln() / (x2 / x1).ln()).clamp(0.05, 50.0) } else { 1.0 };
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    EepParams::new(alpha, 1.0 / mean, 1.0)
}

/// Observed information in log coordinates, inverted and mapped to the
/// natural scale.
fn standard_errors(v: &[f64], data: &[f64]) -> Option<[f64; 3]> {
    let f = |w: &[f64]| from_log(w).map(|p| log_likelihood(&p, data)).unwrap_or(f64::NAN);
    let h = HESSIAN_STEP;
    let mut hess = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let eval = |si: f64, sj: f64| {
                let mut w = v.to_vec();
                w[i] += si * h;
                w[j] += sj * h;
                f(&w)
            };
            let d = if i == j {
                let mut w = v.to_vec();
                let f0 = f(&w);
                w[i] += h;
                let fp = f(&w);
                w[i] -= 2.0 * h;
                let fm = f(&w);
                (fp - 2.0 * f0 + fm) / (h * h)
            } else {
                (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h * h)
            };
            // information is minus the Hessian of the log-likelihood
            hess[i][j] = -d;
            hess[j][i] = -d;
        }
    }
    let m = hess;
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c11 = m[0][0] * m[2][2] - m[0][2] * m[2][0];
    let c22 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let det = m[0][0] * c00 - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if !(det > 0.0 && m[0][0] > 0.0 && c22 > 0.0) {
        return None;
    }
    let var = [c00 / det, c11 / det, c22 / det];
    let mut se = [0.0; 3];
    for k in 0..3 {
        if !(var[k] > 0.0) {
            return None;
        }
        se[k] = v[k].exp() * var[k].sqrt();
    }
    Some(se)
}

/// Maximizes Σ ln f(x_i) with a Nelder–Mead search in log-parameter space.
///
/// On non-convergence the best point found is returned with
/// `converged = false`.
pub fn fit_eep(data: &[f64], initial: Option<EepParams>) -> Result<FitResult> {
    validate_data(data)?;
    let start = match initial {
        Some(p) => p,
        None => initial_guess(data)?,
    };
    let x0 = vec![start.alpha().ln(), start.beta().ln(), start.lambda().ln()];
    let mut simplex = vec![x0.clone()];
    for i in 0..3 {
        let mut v = x0.clone();
        v[i] += 0.5;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-9)
        .map_err(|e| Error::Domain(e.to_string()))?;
    let res = Executor::new(NegLogLik { data }, solver)
        .configure(|s| s.max_iters(MAX_ITERS))
        .run()
        .map_err(|e| Error::Domain(e.to_string()))?;
    let state = res.state();
    let best = state.get_best_param().cloned().unwrap_or(x0);
    let params = from_log(&best).ok_or_else(|| Error::Domain("fit left the parameter space".into()))?;
    let ll = log_likelihood(&params, data);
    let converged = matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::SolverConverged)
    ) && ll.is_finite();
    Ok(FitResult {
        params,
        log_likelihood: ll,
        iterations: state.get_iter(),
        converged,
        standard_errors: standard_errors(&best, data),
    })
}
