//! Double-double ("twofold") floating point arithmetic.
//!
//! A [`Dd`] value is an unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi)/2`, giving roughly 106 bits of significand. The
//! alternating series evaluated in this crate lose up to ~15 decimal digits
//! to cancellation, so their terms and partial sums are carried in this
//! format and only rounded to `f64` at the end.
//!
//! Algorithms follow the classic Dekker / Knuth error-free transformations
//! and the QD library's elementary-function scheme (argument reduction plus
//! Taylor series, Newton refinement for logarithm and arctangent).

use num_complex::Complex64;
use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const PI: Dd = Dd::new(3.141592653589793, 1.2246467991473532e-16);
pub const FRAC_PI_2: Dd = Dd::new(1.5707963267948966, 6.123233995736766e-17);
pub const LN_2: Dd = Dd::new(0.6931471805599453, 2.3190468138462996e-17);
pub const HALF_LN_2PI: Dd = Dd::new(0.9189385332046728, -3.8782941580672414e-17);
pub const LN_PI: Dd = Dd::new(1.1447298858494002, 1.0265951162707826e-17);

/// Unit roundoff of the format, 2^-104.
pub const EPS: f64 = 4.930380657631324e-32;

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
const SPLIT_THRESHOLD: f64 = 6.696_928_794_914_17e299;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    if a.abs() > SPLIT_THRESHOLD {
        let a = a * 3.725_290_298_461_914e-9; // 2^-28
        let t = SPLITTER * a;
        let hi = t - (t - a);
        let lo = a - hi;
        (hi * 268_435_456.0, lo * 268_435_456.0)
    } else {
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Dd = Dd::new(0.0, 0.0);
    pub const ONE: Dd = Dd::new(1.0, 0.0);

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    #[inline]
    pub fn sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Dd::prod(q1, b);
        let q2 = r.hi / b;
        let r = r - Dd::prod(q2, b);
        let q3 = r.hi / b;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd::new(q1, q2) + Dd::from_f64(q3)
    }

    #[inline]
    pub fn sqr(self) -> Self {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = e + 2.0 * self.hi * self.lo + self.lo * self.lo;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Multiplication by an exact power of two.
    #[inline]
    pub fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        if f.is_finite() && f != 0.0 {
            Dd::new(self.hi * f, self.lo * f)
        } else {
            // split the scaling to avoid intermediate overflow or underflow
            let h = 2f64.powi(k / 2);
            let g = 2f64.powi(k - k / 2);
            Dd::new(self.hi * h * g, self.lo * h * g)
        }
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - Dd::prod(ax, ax)).hi * (x * 0.5);
        Dd::sum(ax, corr)
    }

    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let lo = self.lo.round();
            let (hi, lo) = quick_two_sum(hi, lo);
            Dd::new(hi, lo)
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // hi sits at a half-integer; lo decides the direction
            if self.lo > 0.0 && hi < self.hi {
                Dd::from_f64(hi + 1.0)
            } else if self.lo < 0.0 && hi > self.hi {
                Dd::from_f64(hi - 1.0)
            } else {
                Dd::from_f64(hi)
            }
        } else {
            Dd::from_f64(hi)
        }
    }

    /// `e^x - 1` by reduced-argument Taylor series, for `|x| < ln2/2`.
    fn expm1_reduced(r: Dd) -> Dd {
        // r is further scaled by 2^-9 and the result squared back up
        let r = r.ldexp(-9);
        let mut s = r;
        let mut p = r;
        let mut i = 2.0;
        loop {
            p = (p * r).div_f64(i);
            s += p;
            if p.hi.abs() <= 1e-36 * s.hi.abs().max(1e-300) {
                break;
            }
            i += 1.0;
        }
        for _ in 0..9 {
            s = s.ldexp(1) + s.sqr();
        }
        s
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.782 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let m = (self.hi / LN_2.hi).round();
        let r = self - LN_2.mul_f64(m);
        let s = Dd::expm1_reduced(r) + Dd::ONE;
        s.ldexp(m as i32)
    }

    pub fn exp_m1(self) -> Dd {
        if self.hi.abs() < 0.34 {
            Dd::expm1_reduced(self)
        } else {
            self.exp() - Dd::ONE
        }
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if !self.hi.is_finite() {
            return Dd::from_f64(f64::INFINITY);
        }
        // scale to [1, 2) so that exp(-x) below stays in the normal range
        let k = self.hi.log2().floor() as i32;
        let m = self.ldexp(-k);
        let x = Dd::from_f64(m.hi.ln());
        x + m * (-x).exp() - Dd::ONE + LN_2.mul_f64(k as f64)
    }

    /// `ln(1 + x)` with full relative accuracy for small `x`.
    pub fn ln_1p(self) -> Dd {
        if self.hi.abs() > 0.25 {
            return (Dd::ONE + self).ln();
        }
        let x0 = self.hi.ln_1p();
        let e = Dd::from_f64(-x0).exp_m1();
        // (1+x) e^{-x0} - 1 = e + x + x e
        Dd::from_f64(x0) + (e + self + self * e)
    }

    pub fn powf(self, y: Dd) -> Dd {
        (y * self.ln()).exp()
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = self;
        let mut k = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            k >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// Sine and cosine of a reduced argument `|r| <= pi/4`.
    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r.sqr();
        let mut sin = r;
        let mut term = r;
        let mut k = 1.0;
        loop {
            term = -(term * r2).div_f64((k + 1.0) * (k + 2.0));
            sin += term;
            k += 2.0;
            if term.hi.abs() <= 1e-36 {
                break;
            }
        }
        let mut cos = Dd::ONE;
        let mut term = Dd::ONE;
        let mut k = 0.0;
        loop {
            term = -(term * r2).div_f64((k + 1.0) * (k + 2.0));
            cos += term;
            k += 2.0;
            if term.hi.abs() <= 1e-36 {
                break;
            }
        }
        (sin, cos)
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.hi / FRAC_PI_2.hi).round();
        let r = self - FRAC_PI_2.mul_f64(k);
        let (s, c) = Dd::sin_cos_reduced(r);
        match (k.rem_euclid(4.0)) as i64 {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn atan2(y: Dd, x: Dd) -> Dd {
        if x.hi == 0.0 && y.hi == 0.0 {
            return Dd::ZERO;
        }
        let z = Dd::from_f64(y.hi.atan2(x.hi));
        let r = (x.sqr() + y.sqr()).sqrt();
        let xx = x / r;
        let yy = y / r;
        let (s, c) = z.sin_cos();
        if xx.hi.abs() > yy.hi.abs() {
            z + (yy - s) / c
        } else {
            z - (xx - c) / s
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        self.mul_f64(b)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd::new(q1, q2) + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, b: f64) -> Dd {
        self.div_f64(b)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: DdComplex = DdComplex { re: Dd::ONE, im: Dd::ZERO };

    pub const fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn from_real(re: Dd) -> Self {
        DdComplex { re, im: Dd::ZERO }
    }

    pub fn from_c64(z: Complex64) -> Self {
        DdComplex::new(Dd::from_f64(z.re), Dd::from_f64(z.im))
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Self {
        DdComplex::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    /// Magnitude rounded to `f64`; sufficient for error bookkeeping.
    pub fn abs_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn scale(self, k: Dd) -> Self {
        DdComplex::new(self.re * k, self.im * k)
    }

    pub fn ln(self) -> Self {
        DdComplex::new(self.norm_sqr().ln().ldexp(-1), Dd::atan2(self.im, self.re))
    }

    pub fn exp(self) -> Self {
        let m = self.re.exp();
        if self.im.hi == 0.0 && self.im.lo == 0.0 {
            return DdComplex::from_real(m);
        }
        let (s, c) = self.im.sin_cos();
        DdComplex::new(m * c, m * s)
    }

    pub fn recip(self) -> Self {
        let d = self.norm_sqr();
        DdComplex::new(self.re / d, -self.im / d)
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, b: DdComplex) -> DdComplex {
        DdComplex::new(self.re + b.re, self.im + b.im)
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, b: DdComplex) -> DdComplex {
        DdComplex::new(self.re - b.re, self.im - b.im)
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    fn neg(self) -> DdComplex {
        DdComplex::new(-self.re, -self.im)
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, b: DdComplex) -> DdComplex {
        DdComplex::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, b: DdComplex) -> DdComplex {
        let d = b.norm_sqr();
        DdComplex::new(
            (self.re * b.re + self.im * b.im) / d,
            (self.im * b.re - self.re * b.im) / d,
        )
    }
}

impl AddAssign for DdComplex {
    fn add_assign(&mut self, b: DdComplex) {
        *self = *self + b;
    }
}

impl MulAssign for DdComplex {
    fn mul_assign(&mut self, b: DdComplex) {
        *self = *self * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        ((a - b).to_f64()).abs() <= tol * b.to_f64().abs().max(1e-300)
    }

    #[test]
    fn arithmetic_keeps_extra_digits() {
        // (1 + 2^-80) - 1 survives in double-double but not in f64
        let tiny = 2f64.powi(-80);
        let x = Dd::ONE + tiny;
        assert_eq!((x - Dd::ONE).to_f64(), tiny);
        let third = Dd::ONE / 3.0;
        let back = third * 3.0;
        assert!(((back - Dd::ONE).to_f64()).abs() < 1e-31);
    }

    #[test]
    fn sqrt_squares_back() {
        let two = Dd::from_f64(2.0);
        let r = two.sqrt();
        assert!(((r.sqr() - two).to_f64()).abs() < 1e-31);
    }

    #[test]
    fn exp_ln_are_inverse() {
        for &x in &[-600.0, -30.5, -1.0, -1e-10, 1e-20, 0.3, 1.0, 2.5, 50.0, 700.0] {
            let d = Dd::from_f64(x);
            let back = d.exp().ln();
            assert!(((back - d).to_f64()).abs() <= 1e-30 * x.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn exp_of_one_is_e() {
        let e = Dd::new(2.718281828459045, 1.4456468917292502e-16);
        assert!(close(Dd::ONE.exp(), e, 1e-31));
        assert!(close(LN_2.exp(), Dd::from_f64(2.0), 1e-31));
    }

    #[test]
    fn expm1_and_ln1p_keep_relative_accuracy() {
        let x = Dd::from_f64(1e-20);
        // expm1(x) = x + x^2/2 + ...
        let expected = x + x.sqr().ldexp(-1);
        assert!(close(x.exp_m1(), expected, 1e-30));
        let l = x.ln_1p();
        let expected = x - x.sqr().ldexp(-1);
        assert!(close(l, expected, 1e-30));
        let y = Dd::from_f64(-0.2);
        assert!(close(y.ln_1p().exp_m1(), y, 1e-30));
    }

    #[test]
    fn sin_cos_known_values() {
        let (s, c) = (PI.ldexp(-2)).sin_cos();
        let half_sqrt2 = Dd::from_f64(0.5).sqrt();
        assert!(close(s, half_sqrt2, 1e-30));
        assert!(close(c, half_sqrt2, 1e-30));
        let (s, c) = (PI.mul_f64(7.0) + Dd::from_f64(0.25)).sin_cos();
        let (s0, c0) = Dd::from_f64(0.25).sin_cos();
        assert!(close(s, -s0, 1e-29));
        assert!(close(c, -c0, 1e-29));
        let (s, c) = Dd::from_f64(1.1).sin_cos();
        assert!(((s.sqr() + c.sqr() - Dd::ONE).to_f64()).abs() < 1e-30);
    }

    #[test]
    fn atan2_recovers_angle() {
        for &a in &[-3.0, -1.2, -0.1, 0.0, 0.7, 1.5707, 2.9] {
            let ang = Dd::from_f64(a);
            let (s, c) = ang.sin_cos();
            let r = Dd::from_f64(3.5);
            let back = Dd::atan2(s * r, c * r);
            assert!(((back - ang).to_f64()).abs() < 1e-30, "a = {a}");
        }
    }

    #[test]
    fn complex_ln_exp_roundtrip() {
        let z = DdComplex::new(Dd::from_f64(-2.5), Dd::from_f64(0.75));
        let back = z.ln().exp();
        assert!((back - z).abs_f64() < 1e-30);
    }
}
