//! Bernoulli numbers as double-double values.

use crate::dd::Dd;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Number of Bernoulli numbers kept, B_0 ..= B_{MAX_INDEX}.
pub const MAX_INDEX: usize = 80;

fn rational_table() -> &'static Vec<BigRational> {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // sum_{k=0}^{m} C(m+1, k) B_k = 0, with B_1 = -1/2
        let mut b: Vec<BigRational> = Vec::with_capacity(MAX_INDEX + 1);
        b.push(BigRational::one());
        for m in 1..=MAX_INDEX {
            let mut acc = BigRational::zero();
            let mut binom = BigInt::one();
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(binom.clone()) * bk;
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    })
}

pub(crate) fn rational_to_dd(r: &BigRational) -> Dd {
    let hi = r.to_f64().unwrap_or(0.0);
    if hi == 0.0 || !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let rest = r - BigRational::from_float(hi).expect("finite");
    Dd::new(hi, rest.to_f64().unwrap_or(0.0))
}

/// Bernoulli numbers B_0 ..= B_80 in double-double precision.
pub fn table() -> &'static [Dd] {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    TABLE.get_or_init(|| rational_table().iter().map(rational_to_dd).collect())
}

/// Bernoulli polynomial B_n(x) = sum_k C(n, k) B_k x^(n-k).
pub fn polynomial(n: usize, x: Dd) -> Dd {
    let b = table();
    // Horner in x over the coefficients C(n, k) B_k, k = n down to 0
    let mut binom = vec![1.0f64; n + 1];
    for k in 1..=n {
        binom[k] = binom[k - 1] * (n + 1 - k) as f64 / k as f64;
    }
    let mut acc = Dd::ZERO;
    for k in 0..=n {
        acc = acc * x + b[k] * binom[k];
    }
    acc
}
