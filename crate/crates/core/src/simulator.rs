//! Monte Carlo model of the failure mechanism behind EEP.
//!
//! A series system holds N ~ ZTP(λ) blocks; each block is a parallel
//! arrangement of `units_per_block` i.i.d. Exp(β) units. The system fails at
//! the first block failure, a block when its last unit fails. For integer α
//! the system lifetime is EEP(α, β, λ). Real α has no such realization, so
//! only integer unit counts are simulated.

use crate::distributions::{eep_cdf, EepParams};
use crate::rng::StreamRng;
use crate::{Error, Result};
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

/// Draws per generator stream in [`run_ks_validation`].
pub const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemSpec {
    pub units_per_block: u32,
    pub unit_rate: f64,
    pub block_count_rate: f64,
}

impl SystemSpec {
    pub fn new(units_per_block: u32, unit_rate: f64, block_count_rate: f64) -> Result<Self> {
        let s = SystemSpec { units_per_block, unit_rate, block_count_rate };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.units_per_block < 1 {
            return Err(Error::InvalidParameter("units_per_block must be at least 1".into()));
        }
        if !(self.unit_rate > 0.0 && self.unit_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("unit_rate must be positive, got {}", self.unit_rate)));
        }
        if !(self.block_count_rate > 0.0 && self.block_count_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "block_count_rate must be positive, got {}",
                self.block_count_rate
            )));
        }
        Ok(())
    }

    /// The EEP law this system realizes.
    pub fn eep_params(&self) -> EepParams {
        EepParams::new(self.units_per_block as f64, self.unit_rate, self.block_count_rate)
            .expect("validated spec")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub n: usize,
    pub ks_distance: f64,
    pub critical_value_1pct: f64,
    pub pass: bool,
}

/// P{N = n} = λ^n/(n!(e^λ − 1)), n ≥ 1.
pub fn ztp_pmf(lambda: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    (n as f64 * lambda.ln() - ln_fact - lambda.exp_m1().ln()).exp()
}

pub(crate) fn ztp_with(rng: &mut StreamRng, lambda: f64) -> u64 {
    if lambda <= crate::LAMBDA_SWITCH {
        let u = rng.open01();
        let mut n = 1u64;
        let mut p = lambda / lambda.exp_m1();
        let mut cum = p;
        while u > cum {
            n += 1;
            p *= lambda / n as f64;
            if p == 0.0 {
                break;
            }
            cum += p;
        }
        n
    } else {
        let pois = Poisson::new(lambda).expect("positive rate");
        loop {
            let k = pois.sample(rng) as u64;
            if k >= 1 {
                return k;
            }
        }
    }
}

/// One zero-truncated Poisson draw.
///
/// Sequential inversion of the pmf for λ ≤ 30, rejection of zeros from an
/// ordinary Poisson generator above.
pub fn sample_ztp(lambda: f64, seed: u64, stream_id: u64) -> Result<u64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(ztp_with(&mut StreamRng::new(seed, stream_id), lambda))
}

fn block_with(rng: &mut StreamRng, units: u32, rate: f64) -> f64 {
    let mut m = 0.0f64;
    for _ in 0..units {
        m = m.max(-rng.open01().ln() / rate);
    }
    m
}

fn system_with(rng: &mut StreamRng, spec: &SystemSpec) -> f64 {
    let n = ztp_with(rng, spec.block_count_rate);
    let mut life = f64::INFINITY;
    for _ in 0..n {
        life = life.min(block_with(rng, spec.units_per_block, spec.unit_rate));
    }
    life
}

/// Lifetime of one parallel block, the maximum of its unit lifetimes.
pub fn sample_block_lifetimes(units: u32, rate: f64, n: usize, seed: u64, stream_id: u64) -> Vec<f64> {
    let mut rng = StreamRng::new(seed, stream_id);
    (0..n).map(|_| block_with(&mut rng, units, rate)).collect()
}

/// A single system lifetime.
pub fn sample_system_lifetime(spec: &SystemSpec, seed: u64, stream_id: u64) -> Result<f64> {
    spec.validate()?;
    Ok(system_with(&mut StreamRng::new(seed, stream_id), spec))
}

/// `n` system lifetimes. Stream `k` produces draws `k·CHUNK ..`, so the
/// output depends only on (spec, n, seed), not on the thread count.
pub fn sample_system_lifetimes(spec: &SystemSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(n - k * CHUNK);
            let mut rng = StreamRng::new(seed, k as u64);
            (0..len).map(|_| system_with(&mut rng, spec)).collect()
        })
        .collect();
    Ok(parts.concat())
}

/// Two-sided Kolmogorov–Smirnov distance of a sample against `cdf`.
/// Sorts `xs` in place.
pub fn ks_distance(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// KS test of `n` simulated lifetimes against the EEP CDF with the
/// parameters in `analytic`, at the 1% level (critical value 1.63/√n).
pub fn run_ks_validation_against(spec: &SystemSpec, analytic: &EepParams, n: usize, seed: u64) -> Result<KsReport> {
    if n < 1000 {
        return Err(Error::InvalidParameter(format!("n must be at least 1000, got {n}")));
    }
    let mut xs = sample_system_lifetimes(spec, n, seed)?;
    let d = ks_distance(&mut xs, |x| eep_cdf(analytic, x));
    let crit = 1.63 / (n as f64).sqrt();
    Ok(KsReport { n, ks_distance: d, critical_value_1pct: crit, pass: d <= crit })
}

pub fn run_ks_validation(spec: &SystemSpec, n: usize, seed: u64) -> Result<KsReport> {
    run_ks_validation_against(spec, &spec.eep_params(), n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_sums_to_one() {
        let s: f64 = (1..=200).map(|n| ztp_pmf(20.0, n)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(ztp_pmf(1.0, 0), 0.0);
    }

    #[test]
    fn ztp_never_zero_and_mean() {
        let mut rng = StreamRng::new(7, 0);
        let n = 200_000;
        let mut sum = 0u64;
        for _ in 0..n {
            let k = ztp_with(&mut rng, 1.0);
            assert!(k >= 1);
            sum += k;
        }
        let mean = sum as f64 / n as f64;
        let expected = 1.0 / -(-1.0f64).exp_m1();
        assert!((mean - expected).abs() < 0.01, "{mean}");
        let mut rng = StreamRng::new(7, 1);
        let big: f64 = (0..20_000).map(|_| ztp_with(&mut rng, 50.0) as f64).sum::<f64>() / 20_000.0;
        assert!((big - 50.0).abs() < 0.3);
    }

    #[test]
    fn tiny_rate_gives_single_block() {
        for s in 0..100 {
            assert_eq!(sample_ztp(1e-6, s, 0).unwrap(), 1);
        }
    }

    #[test]
    fn deterministic() {
        let spec = SystemSpec::new(2, 1.0, 1.0).unwrap();
        let a = sample_system_lifetimes(&spec, 70_000, 3).unwrap();
        let b = sample_system_lifetimes(&spec, 70_000, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ks_passes_and_detects_mismatch() {
        let spec = SystemSpec::new(2, 1.0, 1.0).unwrap();
        let r = run_ks_validation(&spec, 200_000, 11).unwrap();
        assert!(r.pass, "{r:?}");
        let wrong = EepParams::new(2.0, 1.0, 2.0).unwrap();
        let r = run_ks_validation_against(&spec, &wrong, 200_000, 11).unwrap();
        assert!(!r.pass);
        assert!(run_ks_validation(&spec, 999, 1).is_err());
    }

    #[test]
    fn block_maxima_follow_ee() {
        let mut xs = sample_block_lifetimes(3, 0.5, 100_000, 5, 0);
        let ee = crate::EeParams::new(3.0, 0.5).unwrap();
        let d = ks_distance(&mut xs, |x| crate::distributions::ee_cdf(&ee, x));
        assert!(d < 1.63 / (1e5f64).sqrt());
    }
}
