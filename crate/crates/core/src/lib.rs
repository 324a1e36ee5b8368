//! Numerics for the exponentiated exponential Poisson distribution
//! EEP(α, β, λ) and its parent, the exponentiated exponential EE(α, β).
//!
//! The crate provides distribution functions and sampling, the closed-form
//! characteristic function and MGF through the confluent Fox–Wright ₁Ψ₁
//! function, real-order moments through the Goyal–Laddha generalized
//! Hurwitz–Lerch zeta function, quadrature counterparts of all closed forms,
//! a Monte Carlo simulator of the series/parallel reliability system that
//! produces the distribution, and maximum-likelihood fitting.

pub mod dd;
pub mod distributions;
pub mod fit;
pub mod moments;
pub mod quadrature;
pub mod rng;
pub mod simulator;
pub mod special_functions;

mod bernoulli;

pub use num_complex::Complex64;

/// Complex number used for characteristic functions and complex log-gamma.
pub type ComplexValue = Complex64;

/// Moment series and the CHF/MGF closed forms hand over to quadrature above
/// this value of λ.
pub const LAMBDA_SWITCH: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of the gamma function at z = {0}")]
    Pole(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A computed value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EvalResult<T> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub terms_used: usize,
    pub converged: bool,
}

impl<T> EvalResult<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> EvalResult<U> {
        EvalResult {
            value: f(self.value),
            abs_error_estimate: self.abs_error_estimate,
            terms_used: self.terms_used,
            converged: self.converged,
        }
    }
}

pub use distributions::{EeParams, EepParams, SampleBatch};
pub use fit::FitResult;
pub use simulator::{KsReport, SystemSpec};
pub use special_functions::{FoxWrightSpec, HlzStarArgs};
