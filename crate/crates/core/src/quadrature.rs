//! Adaptive Gauss–Kronrod quadrature and a double-double exp-sinh rule.

use crate::dd::{Dd, FRAC_PI_2};
use crate::EvalResult;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

/// Kronrod abscissae; odd indices are the embedded Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 16] = [
    0.998_002_298_693_397_060_285_172_840_152_271,
    0.987_992_518_020_485_428_489_565_718_586_613,
    0.967_739_075_679_139_134_257_347_978_784_337,
    0.937_273_392_400_705_904_307_758_947_710_209,
    0.897_264_532_344_081_900_882_509_656_454_496,
    0.848_206_583_410_427_216_200_648_320_774_217,
    0.790_418_501_442_465_932_967_649_294_817_947,
    0.724_417_731_360_170_047_416_186_054_613_938,
    0.650_996_741_297_416_970_533_735_895_313_275,
    0.570_972_172_608_538_847_537_226_737_253_911,
    0.485_081_863_640_239_680_693_655_740_232_351,
    0.394_151_347_077_563_369_897_207_370_981_045,
    0.299_180_007_153_168_812_166_780_024_266_389,
    0.201_194_093_997_434_522_300_628_303_394_596,
    0.101_142_066_918_717_499_027_074_231_447_392,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 8] = [
    0.030_753_241_996_117_268_354_628_393_577_204,
    0.070_366_047_488_108_124_709_267_416_450_667,
    0.107_159_220_467_171_935_011_869_546_685_869,
    0.139_570_677_926_154_314_447_804_794_511_028,
    0.166_269_205_816_993_933_553_200_860_481_209,
    0.186_161_000_015_562_211_026_800_561_866_423,
    0.198_431_485_327_111_576_456_118_326_443_839,
    0.202_578_241_925_561_272_880_620_199_967_519,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 16] = [
    0.005_377_479_872_923_348_987_792_051_430_128,
    0.015_007_947_329_316_122_538_374_763_075_807,
    0.025_460_847_326_715_320_186_874_001_019_653,
    0.035_346_360_791_375_846_222_037_948_478_360,
    0.044_589_751_324_764_876_608_227_299_373_280,
    0.053_481_524_690_928_087_265_343_147_239_430,
    0.062_009_567_800_670_640_285_139_230_960_803,
    0.069_854_121_318_728_258_709_520_077_099_147,
    0.076_849_680_757_720_378_894_432_777_482_659,
    0.083_080_502_823_133_021_038_289_247_286_104,
    0.088_564_443_056_211_770_647_275_443_693_774,
    0.093_126_598_170_825_321_225_486_872_747_346,
    0.096_642_726_983_623_678_505_179_907_627_589,
    0.099_173_598_721_791_959_332_393_173_484_603,
    0.100_769_845_523_875_595_044_946_662_617_570,
    0.101_330_007_014_791_549_017_374_792_767_493,
];

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    /// Real and imaginary parts; the error model treats them separately.
    fn parts(self) -> (f64, f64);
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_panels: 2000 }
    }
}

impl QuadOptions {
    /// Relative tolerance only, for integrals of positive functions.
    pub fn relative(rel_tol: f64) -> Self {
        QuadOptions { abs_tol: 0.0, rel_tol, max_panels: 4000 }
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// One 31-point Kronrod panel with its embedded 15-point Gauss estimate.
fn gk31<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[7];
    let mut res_k = fc * WGK[15];
    let mut fv1 = [T::default(); 15];
    let mut fv2 = [T::default(); 15];
    for j in 0..15 {
        let dx = half * XGK[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        let pair = fv1[j] + fv2[j];
        res_k = res_k + pair * WGK[j];
        if j % 2 == 1 {
            res_g = res_g + pair * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut err = 0.0;
    for part in 0..2 {
        let pick = |v: T| if part == 0 { v.parts().0 } else { v.parts().1 };
        let mut abs = pick(fc).abs() * WGK[15];
        let mut asc = (pick(fc) - pick(mean)).abs() * WGK[15];
        for j in 0..15 {
            abs += WGK[j] * (pick(fv1[j]).abs() + pick(fv2[j]).abs());
            asc += WGK[j] * ((pick(fv1[j]) - pick(mean)).abs() + (pick(fv2[j]) - pick(mean)).abs());
        }
        let diff = (pick(res_k) - pick(res_g)) * half;
        err += rescale_error(diff, abs * half.abs(), asc * half.abs());
    }
    (res_k * half, err)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive bisection over a finite interval `[a, b]`.
///
/// The panel with the largest error estimate is split until the summed
/// estimate meets `max(abs_tol, rel_tol * |I|)` or the panel budget runs out.
pub fn integrate<T, F>(f: F, a: f64, b: f64, opts: QuadOptions) -> EvalResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if a == b {
        return EvalResult { value: T::default(), abs_error_estimate: 0.0, terms_used: 0, converged: true };
    }
    let (v, e) = gk31(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    let mut panels = 1;
    let mut evals = 31;
    let converged = loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if total_err <= target {
            break true;
        }
        if panels >= opts.max_panels {
            break false;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // panel cannot be split any further in floating point
            heap.push(worst);
            break false;
        }
        let (v1, e1) = gk31(&f, worst.a, mid);
        let (v2, e2) = gk31(&f, mid, worst.b);
        evals += 62;
        total = total - worst.value + v1 + v2;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        panels += 1;
        // recompute the error sum from scratch to avoid drift
        total_err = heap.iter().map(|p| p.err).sum();
    };
    // resum the panel values to limit accumulated cancellation in `total`
    let mut value = T::default();
    for p in heap.iter() {
        value = value + p.value;
    }
    EvalResult { value, abs_error_estimate: total_err, terms_used: evals, converged }
}

/// Double-double exp-sinh quadrature of several integrands over `(0, ∞)`.
///
/// `f(ln_t, t, out)` writes the integrand values at `t` into `out`. The
/// substitution `t = exp(π/2 · sinh x)` is applied and the step size halved
/// until successive levels agree to `tol` relative for every integrand.
/// Returns the integrals with error estimates.
pub(crate) fn exp_sinh_dd<F>(mut f: F, n_out: usize, tol: f64) -> Vec<(Dd, f64)>
where
    F: FnMut(Dd, Dd, &mut [Dd]),
{
    const X_MAX: f64 = 6.5;
    const MAX_LEVEL: u32 = 9;
    let mut h = 0.5;
    let mut sums = vec![Dd::ZERO; n_out];
    let mut buf = vec![Dd::ZERO; n_out];
    let mut abs_sums = vec![0.0f64; n_out];
    let mut eval_at = |x: f64, sums: &mut [Dd], abs_sums: &mut [f64], buf: &mut [Dd]| {
        let ex = Dd::from_f64(x).exp();
        let emx = ex.recip();
        let sinh = (ex - emx).ldexp(-1);
        let cosh = (ex + emx).ldexp(-1);
        let ln_t = FRAC_PI_2 * sinh;
        if ln_t.hi > 700.0 {
            // integrands are assumed to decay at least exponentially
            return;
        }
        let t = ln_t.exp();
        let w = FRAC_PI_2 * cosh * t;
        for b in buf.iter_mut() {
            *b = Dd::ZERO;
        }
        f(ln_t, t, buf);
        for i in 0..sums.len() {
            let c = buf[i] * w;
            sums[i] += c;
            abs_sums[i] += c.to_f64().abs();
        }
    };
    // level 0: all multiples of h
    let n0 = (X_MAX / h) as i64;
    for k in -n0..=n0 {
        eval_at(k as f64 * h, &mut sums, &mut abs_sums, &mut buf);
    }
    let mut prev: Vec<Dd> = sums.iter().map(|s| s.mul_f64(h)).collect();
    let mut diffs = vec![f64::INFINITY; n_out];
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let n = (X_MAX / h) as i64;
        // new nodes are the odd multiples of the halved step
        let mut k = -n;
        if k % 2 == 0 {
            k += 1;
        }
        while k <= n {
            eval_at(k as f64 * h, &mut sums, &mut abs_sums, &mut buf);
            k += 2;
        }
        let cur: Vec<Dd> = sums.iter().map(|s| s.mul_f64(h)).collect();
        let mut done = true;
        for i in 0..n_out {
            let d = (cur[i] - prev[i]).to_f64().abs();
            diffs[i] = d;
            if d > tol * cur[i].to_f64().abs() {
                done = false;
            }
        }
        prev = cur;
        if done {
            break;
        }
    }
    prev.iter()
        .zip(diffs.iter().zip(abs_sums.iter()))
        .map(|(v, (&d, &abs))| {
            let mag = v.to_f64().abs().max(f64::MIN_POSITIVE);
            // the rule converges quadratically in the number of correct digits
            let err = 10.0 * d * (d / mag).min(1.0) + 1e-30 * abs * h;
            (*v, err)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_weights_sum_to_two() {
        let g: f64 = 2.0 * WG[..7].iter().sum::<f64>() + WG[7];
        let k: f64 = 2.0 * WGK[..15].iter().sum::<f64>() + WGK[15];
        assert!((g - 2.0).abs() < 1e-15);
        assert!((k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_rule_is_exact_for_polynomials() {
        // a 31-point Kronrod rule integrates degree 46 exactly
        for deg in [0, 1, 5, 20, 30, 45] {
            let (v, _) = gk31(&|x: f64| x.powi(deg), -1.0, 1.0);
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn adaptive_handles_smooth_and_singular() {
        let r = integrate(|x: f64| x.exp(), 0.0, 1.0, QuadOptions::default());
        assert!(r.converged);
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-13);
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::relative(1e-10));
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-9);
        assert!(r.abs_error_estimate >= (r.value - 2.0).abs());
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^π e^{ix} dx = 2i
        let r = integrate(|x: f64| Complex64::new(0.0, x).exp(), 0.0, std::f64::consts::PI, QuadOptions::default());
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn exp_sinh_gamma_integrals() {
        // ∫_0^∞ t^{s-1} e^{-t} dt = Γ(s) for s = 1, 2.5, 5
        let svals = [1.0, 2.5, 5.0];
        let out = exp_sinh_dd(
            |ln_t, t, out| {
                for (o, &s) in out.iter_mut().zip(svals.iter()) {
                    *o = (ln_t * (s - 1.0) - t).exp();
                }
            },
            3,
            1e-15,
        );
        let exact = [1.0, 1.329_340_388_179_137, 24.0];
        for i in 0..3 {
            assert!(((out[i].0.to_f64() - exact[i]) / exact[i]).abs() < 1e-15, "{:?}", out[i]);
        }
    }
}
