//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! Subintervals are kept in a max-heap keyed by their error estimate and the
//! worst one is bisected until the summed estimate meets the tolerance.
//! Semi-infinite and infinite ranges are mapped onto finite ones by
//! `x = a + t/(1-t)`, `x = b - (1-t)/t` and the split at zero.

// Node tables are kept at their published precision.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::sum::NeumaierSum;
use crate::{Error, Real, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<F> {
    pub abs: F,
    pub rel: F,
    pub max_subdivisions: usize,
}

impl<F: Real> Default for Tolerance<F> {
    fn default() -> Self {
        Self {
            abs: F::of(1e-10),
            rel: F::zero(),
            max_subdivisions: 5000,
        }
    }
}

/// Result of a quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Integral<F> {
    pub value: F,
    pub abs_error: F,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<F> {
    lo: F,
    hi: F,
    value: F,
    error: F,
}

impl<F: Real> PartialEq for Segment<F> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<F: Real> Eq for Segment<F> {}
impl<F: Real> PartialOrd for Segment<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<F: Real> Ord for Segment<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn finite_or_err<F: Real>(x: F, y: F) -> Result<F> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteIntegrand { x: x.f64() })
    }
}

/// One 15-point Kronrod rule with QUADPACK's error scaling.
fn gk15<F: Real, G: Fn(F) -> F>(f: &G, lo: F, hi: F) -> Result<(F, F)> {
    let half = F::of(0.5);
    let centre = half * (lo + hi);
    let half_len = half * (hi - lo);
    let fc = finite_or_err(centre, f(centre))?;
    let mut res_g = fc * F::of(WG[3]);
    let mut res_k = fc * F::of(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [F::zero(); 7];
    let mut fv2 = [F::zero(); 7];
    for j in 0..7 {
        let x = half_len * F::of(XGK[j]);
        let (xl, xr) = (centre - x, centre + x);
        let f1 = finite_or_err(xl, f(xl))?;
        let f2 = finite_or_err(xr, f(xr))?;
        fv1[j] = f1;
        fv2[j] = f2;
        let w = F::of(WGK[j]);
        res_k += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += F::of(WG[j / 2]) * (f1 + f2);
        }
    }
    let res_kh = res_k * half;
    let mut res_asc = F::of(WGK[7]) * (fc - res_kh).abs();
    for j in 0..7 {
        res_asc += F::of(WGK[j]) * ((fv1[j] - res_kh).abs() + (fv2[j] - res_kh).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs *= scale;
    res_asc *= scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != F::zero() && err != F::zero() {
        let r = (F::of(200.0) * err / res_asc).powf(F::of(1.5));
        err = res_asc * r.min(F::one());
    }
    let eps50 = F::of(50.0) * F::epsilon();
    if res_abs > F::min_positive_value() / eps50 {
        err = err.max(eps50 * res_abs);
    }
    Ok((value, err))
}

/// Adaptive integration of `f` over a finite `[lo, hi]`, starting from the
/// partition induced by `breakpoints` (points outside the range are ignored).
fn integrate_finite<F: Real, G: Fn(F) -> F>(
    f: &G,
    lo: F,
    hi: F,
    breakpoints: &[F],
    tol: &Tolerance<F>,
) -> Result<Integral<F>> {
    let mut cuts: Vec<F> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > lo && b < hi && b.is_finite())
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut left = lo;
    for &c in cuts.iter().chain(std::iter::once(&hi)) {
        let (value, error) = gk15(f, left, c)?;
        evaluations += 15;
        heap.push(Segment {
            lo: left,
            hi: c,
            value,
            error,
        });
        left = c;
    }

    let half = F::of(0.5);
    loop {
        let total: NeumaierSum<F> = heap.iter().map(|s| s.value).collect();
        let err: F = heap.iter().map(|s| s.error).sum();
        let target = tol.abs.max(tol.rel * total.value().abs());
        if err <= target {
            return Ok(Integral {
                value: total.value(),
                abs_error: err,
                evaluations,
            });
        }
        if heap.len() >= tol.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                tolerance: target.f64(),
                subdivisions: heap.len(),
                estimate: err.f64(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = half * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval collapsed to adjacent floats; nothing left to refine.
            return Err(Error::QuadratureNonConvergence {
                tolerance: target.f64(),
                subdivisions: heap.len() + 1,
                estimate: err.f64(),
            });
        }
        for (a, b) in [(worst.lo, mid), (mid, worst.hi)] {
            let (value, error) = gk15(f, a, b)?;
            evaluations += 15;
            heap.push(Segment {
                lo: a,
                hi: b,
                value,
                error,
            });
        }
    }
}

/// Integrates `f` over `[lo, hi]`; either end may be infinite.
///
/// `breakpoints` seed the initial partition and should mark kinks, peaks
/// and scale changes of the integrand.
pub fn integrate<F: Real, G: Fn(F) -> F>(
    f: G,
    lo: F,
    hi: F,
    breakpoints: &[F],
    tol: &Tolerance<F>,
) -> Result<Integral<F>> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidInterval {
            lo: lo.f64(),
            hi: hi.f64(),
        });
    }
    match (lo.is_finite(), hi.is_finite()) {
        (false, false) => {
            let half_tol = Tolerance {
                abs: tol.abs * F::of(0.5),
                ..*tol
            };
            let left = integrate_half(&f, F::neg_infinity(), F::zero(), breakpoints, &half_tol)?;
            let right = integrate_half(&f, F::zero(), F::infinity(), breakpoints, &half_tol)?;
            Ok(Integral {
                value: left.value + right.value,
                abs_error: left.abs_error + right.abs_error,
                evaluations: left.evaluations + right.evaluations,
            })
        }
        _ => integrate_half(&f, lo, hi, breakpoints, tol),
    }
}

/// Ranges with at most one infinite end.
fn integrate_half<F: Real, G: Fn(F) -> F>(
    f: &G,
    lo: F,
    hi: F,
    breakpoints: &[F],
    tol: &Tolerance<F>,
) -> Result<Integral<F>> {
    let one = F::one();
    match (lo.is_finite(), hi.is_finite()) {
        (true, false) => {
            // x = lo + t/(1-t), t in (0, 1)
            let g = |t: F| {
                let s = one - t;
                f(lo + t / s) / (s * s)
            };
            let bps: Vec<F> = breakpoints
                .iter()
                .filter(|&&b| b > lo)
                .map(|&b| (b - lo) / (one + b - lo))
                .collect();
            integrate_finite(&g, F::zero(), one, &bps, tol)
        }
        (false, true) => {
            // x = hi - (1-t)/t, t in (0, 1)
            let g = |t: F| f(hi - (one - t) / t) / (t * t);
            let bps: Vec<F> = breakpoints
                .iter()
                .filter(|&&b| b < hi)
                .map(|&b| one / (one + hi - b))
                .collect();
            integrate_finite(&g, F::zero(), one, &bps, tol)
        }
        _ => integrate_finite(f, lo, hi, breakpoints, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(
            |x: f64| x * x * x - 2.0 * x,
            0.0,
            2.0,
            &[],
            &Tolerance::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn infinite_ranges() {
        let tol = Tolerance::default();
        let gauss = |x: f64| (-x * x).exp();
        let r = integrate(gauss, f64::NEG_INFINITY, f64::INFINITY, &[], &tol).unwrap();
        assert_abs_diff_eq!(r.value, std::f64::consts::PI.sqrt(), epsilon = 1e-10);
        let r = integrate(|x: f64| (-x).exp(), 1.0, f64::INFINITY, &[], &tol).unwrap();
        assert_abs_diff_eq!(r.value, (-1f64).exp(), epsilon = 1e-10);
        let r = integrate(|x: f64| x.exp(), f64::NEG_INFINITY, 0.0, &[], &tol).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn kink_and_endpoint_singularity() {
        let tol = Tolerance::default();
        let r = integrate(|x: f64| x.abs(), -1.0, 2.0, &[0.0], &tol).unwrap();
        assert_abs_diff_eq!(r.value, 2.5, epsilon = 1e-12);
        // ∫₀¹ x^{-1/2} dx = 2; integrable singularity at the left end
        let tol = Tolerance {
            abs: 1e-8,
            ..Tolerance::default()
        };
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &[], &tol).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn reports_non_convergence() {
        let tol = Tolerance {
            abs: 1e-12,
            rel: 0.0,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &[], &tol).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn rejects_bad_range_and_nan() {
        let tol = Tolerance::default();
        assert!(integrate(|x: f64| x, 1.0, 1.0, &[], &tol).is_err());
        let err = integrate(|_x: f64| f64::NAN, 0.0, 1.0, &[], &tol).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }
}
