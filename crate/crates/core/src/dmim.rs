//! DMIM engines.
//!
//! * [`dmim_quadrature`]: adaptive quadrature of `f e^{-f}` with infinite
//!   tails cut where the remaining probability is below `tail_mass`.
//! * [`dmim_series`]: `1 + Σ_{n≥1} (-1)ⁿ/n! · ∫f^{n+1}`, terms in log space,
//!   compensated summation, cancellation diagnostics.
//! * [`dmim_via_renyi`]: the same series with terms `e^{-n h_{n+1}}`.
//! * [`dmim_closed_form`]: uniform, exponential, Laplace.
//!
//! The series is certified through `M = sup f`. Since `∫f^{n+2} ≤ M ∫f^{n+1}`,
//! consecutive terms satisfy `|t_{n+1}| ≤ |t_n|·M/(n+1)`, so once `n + 2 ≥ M`
//! the tail is alternating and decreasing and the next term bounds it. When
//! `M ≤ 1` every power integral is nonincreasing in `n`, which also gives
//! the `e · sup_{k≥m} ∫f^{k+1}` remainder bound.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Family, Interval};
use crate::normal::l_hat;
use crate::quadrature::{integrate, Tolerance};
use crate::special::{ln_beta, ln_gamma};
use crate::sum::NeumaierSum;
use crate::{Error, Real, Result};

/// Cancellation ratio Σ|tₙ| / |Σtₙ| above which a series result is flagged.
pub const CANCELLATION_LIMIT: f64 = 1e6;

/// Engine that produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    Series,
    ClosedForm,
    RenyiSeries,
    /// Small-σ truncated normal series, see [`crate::normal::l_hat`].
    NormalHat,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Series => "series",
            Method::ClosedForm => "closed_form",
            Method::RenyiSeries => "renyi_series",
            Method::NormalHat => "normal_hat",
        }
    }
}

/// A DMIM value with the engine used and an absolute error bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct DmimEstimate<F> {
    pub value: F,
    pub method: Method,
    pub abs_error_bound: F,
    pub terms_used: Option<usize>,
    /// Σ|tₙ| / |Σtₙ| for series engines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cancellation: Option<F>,
    /// Set when the estimate should not be trusted (cancellation above
    /// [`CANCELLATION_LIMIT`]).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unreliable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl<F: Real> DmimEstimate<F> {
    fn new(value: F, method: Method, abs_error_bound: F) -> Self {
        Self {
            value,
            method,
            abs_error_bound,
            terms_used: None,
            cancellation: None,
            unreliable: false,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct SeriesConfig<F> {
    pub max_terms: usize,
    pub rel_tol: F,
}

impl<F: Real> Default for SeriesConfig<F> {
    fn default() -> Self {
        Self {
            max_terms: 200,
            rel_tol: F::of(1e-14),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct QuadratureConfig<F> {
    pub abs_tol: F,
    pub tail_mass: F,
    pub max_subdivisions: usize,
}

impl<F: Real> Default for QuadratureConfig<F> {
    fn default() -> Self {
        Self {
            abs_tol: F::of(1e-10),
            tail_mass: F::of(1e-12),
            max_subdivisions: 5000,
        }
    }
}

fn check_positive<F: Real>(name: &'static str, v: F) -> Result<()> {
    if v.is_finite() && v > F::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v.f64(),
            reason: "must be finite and > 0",
        })
    }
}

/// `ln ∫ f^q` for real `q > 0`.
pub fn ln_power_integral<F: Real>(spec: &DistributionSpec<F>, q: F) -> Result<F> {
    check_positive("exponent", q)?;
    let one = F::one();
    let divergent = |family, reason| Error::DivergentIntegral {
        family,
        exponent: q.f64(),
        reason,
    };
    let v = match spec.family() {
        Family::Uniform { a, b } => (one - q) * (*b - *a).ln(),
        Family::Normal { sigma, .. } => {
            -F::of(0.5) * q.ln() + F::of(0.5) * (one - q) * (F::TAU() * *sigma * *sigma).ln()
        }
        Family::Exponential { lambda } => (q - one) * lambda.ln() - q.ln(),
        Family::Laplace { lambda, .. } => (q - one) * (*lambda * F::of(0.5)).ln() - q.ln(),
        Family::Gamma { alpha, lambda } => {
            let s = q * (*alpha - one) + one;
            if s <= F::zero() {
                return Err(divergent(
                    "gamma",
                    "q(α−1)+1 ≤ 0, the integrand is not integrable at 0",
                ));
            }
            (q - one) * lambda.ln() + ln_gamma(s) - s * q.ln() - q * ln_gamma(*alpha)
        }
        Family::Beta { a, b } => {
            let s1 = q * (*a - one) + one;
            let s2 = q * (*b - one) + one;
            if s1 <= F::zero() {
                return Err(divergent(
                    "beta",
                    "q(a−1)+1 ≤ 0, the integrand is not integrable at 0",
                ));
            }
            if s2 <= F::zero() {
                return Err(divergent(
                    "beta",
                    "q(b−1)+1 ≤ 0, the integrand is not integrable at 1",
                ));
            }
            ln_beta(s1, s2) - q * ln_beta(*a, *b)
        }
        Family::Nakagami { m, omega } => {
            let two = F::of(2.0);
            let ln_k = F::LN_2() + *m * m.ln() - ln_gamma(*m) - *m * omega.ln();
            let s = F::of(0.5) * (q * (two * *m - one) + one);
            q * ln_k + ln_gamma(s) - F::LN_2() - s * (q * *m / *omega).ln()
        }
        Family::Custom(_) => {
            spec.ensure_normalized()?;
            let s = spec.support();
            let tol = Tolerance {
                abs: F::zero(),
                rel: F::of(1e-12).max(F::of(64.0) * F::epsilon()),
                ..Tolerance::default()
            };
            let r = integrate(
                |x| {
                    let f = spec.pdf(x);
                    if f == F::zero() {
                        F::zero()
                    } else {
                        f.powf(q)
                    }
                },
                s.lo,
                s.hi,
                &spec.breakpoints(),
                &tol,
            )
            .map_err(|_| divergent("custom", "numeric quadrature of f^q failed"))?;
            if !(r.value.is_finite() && r.value > F::zero()) {
                return Err(divergent(
                    "custom",
                    "numeric quadrature of f^q is not finite",
                ));
            }
            r.value.ln()
        }
    };
    if v.is_nan() {
        return Err(Error::Overflow {
            what: "power integral",
        });
    }
    Ok(v)
}

/// `∫ f^{n+1} dx`.
pub fn power_integral<F: Real>(spec: &DistributionSpec<F>, n: usize) -> Result<F> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "must be ≥ 1",
        });
    }
    let v = ln_power_integral(spec, F::of_usize(n + 1))?.exp();
    if v.is_infinite() {
        return Err(Error::Overflow {
            what: "power integral",
        });
    }
    Ok(v)
}

/// Rényi entropy `h_α = ln(∫ f^α) / (1 − α)`.
pub fn renyi_entropy<F: Real>(spec: &DistributionSpec<F>, order: F) -> Result<F> {
    check_positive("order", order)?;
    if order == F::one() {
        return Err(Error::InvalidParameter {
            name: "order",
            value: 1.0,
            reason: "order 1 is the Shannon limit, not a Rényi entropy",
        });
    }
    Ok(ln_power_integral(spec, order)? / (F::one() - order))
}

/// Closed form from the table: uniform, exponential and Laplace only.
pub fn dmim_closed_form<F: Real>(spec: &DistributionSpec<F>) -> Result<DmimEstimate<F>> {
    let value = match spec.family() {
        Family::Uniform { a, b } => (-F::one() / (*b - *a)).exp(),
        Family::Exponential { lambda } => -(-*lambda).exp_m1() / *lambda,
        Family::Laplace { lambda, .. } => -F::of(2.0) * (-*lambda * F::of(0.5)).exp_m1() / *lambda,
        _ => {
            return Err(Error::NoClosedForm {
                family: spec.name(),
            })
        }
    };
    let value = value.max(F::zero()).min(F::one());
    Ok(DmimEstimate::new(
        value,
        Method::ClosedForm,
        F::of(8.0) * F::epsilon() * value,
    ))
}

/// Adaptive quadrature of `f e^{-f}` over the support.
pub fn dmim_quadrature<F: Real>(
    spec: &DistributionSpec<F>,
    cfg: &QuadratureConfig<F>,
) -> Result<DmimEstimate<F>> {
    check_positive("abs_tol", cfg.abs_tol)?;
    check_positive("tail_mass", cfg.tail_mass)?;
    spec.ensure_normalized()?;
    let s = spec.support();
    let abs_tol = cfg.abs_tol.max(F::of(64.0) * F::epsilon());
    let is_custom = matches!(spec.family(), Family::Custom(_));

    // f e^{-f} ≤ f, so a tail holding probability τ contributes at most τ.
    let (lo, hi, tail) = if is_custom {
        (s.lo, s.hi, F::zero())
    } else {
        let both = !s.lo.is_finite() && !s.hi.is_finite();
        let share = if both {
            cfg.tail_mass * F::of(0.5)
        } else {
            cfg.tail_mass
        };
        let lo = if s.lo.is_finite() {
            s.lo
        } else {
            spec.lower_tail_point(share)?
        };
        let hi = if s.hi.is_finite() {
            s.hi
        } else {
            spec.upper_tail_point(share)?
        };
        let tail = if s.is_bounded() {
            F::zero()
        } else {
            cfg.tail_mass
        };
        (lo, hi, tail)
    };
    let bps: Vec<F> = spec
        .breakpoints()
        .into_iter()
        .filter(|b| *b > lo && *b < hi)
        .collect();
    let tol = Tolerance {
        abs: abs_tol,
        rel: F::zero(),
        max_subdivisions: cfg.max_subdivisions,
    };
    let r = integrate(
        |x| {
            let f = spec.pdf(x);
            if f.is_finite() {
                f * (-f).exp()
            } else {
                F::zero()
            }
        },
        lo,
        hi,
        &bps,
        &tol,
    )?;
    let value = r.value.max(F::zero()).min(F::one());
    Ok(DmimEstimate::new(value, Method::Quadrature, abs_tol + tail))
}

/// Stream of `ln ∫f^{n+1}` values consumed by the series engine.
trait LnPower<F> {
    fn ln_power(&self, n: usize) -> Result<F>;
}

struct Direct<'a, F>(&'a DistributionSpec<F>);

impl<F: Real> LnPower<F> for Direct<'_, F> {
    fn ln_power(&self, n: usize) -> Result<F> {
        ln_power_integral(self.0, F::of_usize(n + 1))
    }
}

struct ViaRenyi<'a, F>(&'a DistributionSpec<F>);

impl<F: Real> LnPower<F> for ViaRenyi<'_, F> {
    fn ln_power(&self, n: usize) -> Result<F> {
        let h = renyi_entropy(self.0, F::of_usize(n + 1))?;
        Ok(-F::of_usize(n) * h)
    }
}

fn run_series<F: Real>(
    spec: &DistributionSpec<F>,
    cfg: &SeriesConfig<F>,
    source: &impl LnPower<F>,
    method: Method,
) -> Result<DmimEstimate<F>> {
    if cfg.max_terms == 0 {
        return Err(Error::InvalidParameter {
            name: "max_terms",
            value: 0.0,
            reason: "must be ≥ 1",
        });
    }
    check_positive("rel_tol", cfg.rel_tol)?;
    let (zero, one) = (F::zero(), F::one());
    let eps = F::epsilon();

    let mut sum = NeumaierSum::with_initial(one);
    let mut ln_fact = zero;
    let mut rounding = eps;
    let mut max_term = zero;
    let mut last = one;
    let mut prev_mag = one;
    let mut stop = None;
    for n in 1..=cfg.max_terms {
        ln_fact += F::of_usize(n).ln();
        let ln_p = source.ln_power(n)?;
        let ln_mag = ln_p - ln_fact;
        let mag = ln_mag.exp();
        if mag.is_infinite() {
            return Err(Error::Overflow {
                what: "series term",
            });
        }
        let term = if n % 2 == 1 { -mag } else { mag };
        sum.add(term);
        // exp of a log carrying relative error ε·(|ln P| + ln n!)
        rounding += mag * eps * (ln_p.abs() + ln_fact + F::of(2.0));
        max_term = max_term.max(mag);
        last = mag;
        if mag == zero || mag < cfg.rel_tol * sum.value().abs() {
            stop = Some(n);
            break;
        }
        if n == cfg.max_terms && mag >= prev_mag {
            return Err(Error::SeriesNonConvergence {
                terms: n,
                last_term: mag.f64(),
            });
        }
        prev_mag = mag;
    }
    let terms = stop.unwrap_or(cfg.max_terms);
    let mut warnings = Vec::new();
    if stop.is_none() {
        warnings.push(format!(
            "max_terms = {} reached before rel_tol; terms were still decreasing",
            cfg.max_terms
        ));
    }

    // Truncation bound for the tail beyond `terms`.
    let sup = spec.max_density();
    let next_ln_p = source.ln_power(terms + 1)?;
    let next_mag = (next_ln_p - ln_fact - F::of_usize(terms + 1).ln()).exp();
    let mut bound: Option<F> = None;
    if let Some(m) = sup.filter(|m| m.is_finite()) {
        if F::of_usize(terms + 2) >= m {
            bound = Some(next_mag);
        }
        if m <= one {
            let thm = F::E() * next_ln_p.exp();
            bound = Some(bound.map_or(thm, |b| b.min(thm)));
        }
    }
    let truncation = match bound {
        Some(b) => b,
        None => {
            warnings.push(
                "tail monotonicity not certified; error bound is the last term magnitude".into(),
            );
            last
        }
    };

    let value = sum.value();
    let ratio = sum.cancellation_ratio();
    rounding += eps * sum.abs_total();
    if rounding.is_nan() || rounding >= one || !value.is_finite() {
        return Err(Error::Cancellation {
            ratio: ratio.f64(),
            rounding: rounding.f64(),
        });
    }
    let unreliable = ratio > F::of(CANCELLATION_LIMIT);
    if unreliable {
        warnings.push(format!(
            "cancellation ratio {:.3e} exceeds {CANCELLATION_LIMIT:e}; use quadrature",
            ratio.f64()
        ));
    } else if max_term > one {
        warnings.push(format!(
            "terms reach magnitude {:.3e}; partial sums cancel (ratio {:.3e})",
            max_term.f64(),
            ratio.f64()
        ));
    }

    Ok(DmimEstimate {
        value: value.max(zero).min(one),
        method,
        abs_error_bound: truncation + rounding,
        terms_used: Some(terms),
        cancellation: Some(ratio),
        unreliable,
        warnings,
    })
}

/// Alternating power-integral series.
pub fn dmim_series<F: Real>(
    spec: &DistributionSpec<F>,
    cfg: &SeriesConfig<F>,
) -> Result<DmimEstimate<F>> {
    run_series(spec, cfg, &Direct(spec), Method::Series)
}

/// The series with each term written through a Rényi entropy.
pub fn dmim_via_renyi<F: Real>(
    spec: &DistributionSpec<F>,
    cfg: &SeriesConfig<F>,
) -> Result<DmimEstimate<F>> {
    run_series(spec, cfg, &ViaRenyi(spec), Method::RenyiSeries)
}

/// `1 + Σ_{n=1}^{m−1} (−1)ⁿ/n! · ∫f^{n+1}`, the truncation that
/// [`remainder_bound`] controls.
pub fn series_partial_sum<F: Real>(spec: &DistributionSpec<F>, m: usize) -> Result<F> {
    let mut sum = NeumaierSum::with_initial(F::one());
    let mut ln_fact = F::zero();
    for n in 1..m {
        ln_fact += F::of_usize(n).ln();
        let mag = (ln_power_integral(spec, F::of_usize(n + 1))? - ln_fact).exp();
        sum.add(if n % 2 == 1 { -mag } else { mag });
    }
    Ok(sum.value())
}

/// `e · sup_{n≥m} ∫f^{n+1}`, bounding `|l − series_partial_sum(m)|`.
///
/// The supremum is certified only when `sup f ≤ 1`; then the power
/// integrals are nonincreasing and the supremum is attained at `n = m`.
pub fn remainder_bound<F: Real>(spec: &DistributionSpec<F>, m: usize) -> Result<F> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            value: 0.0,
            reason: "must be ≥ 1",
        });
    }
    match spec.max_density() {
        None => Err(Error::UnboundedTail {
            family: spec.name(),
            reason: "sup f is unknown",
        }),
        Some(s) if s > F::one() => Err(Error::UnboundedTail {
            family: spec.name(),
            reason: "sup f > 1, so ∫f^{n+1} grows without bound",
        }),
        Some(_) => Ok(F::E() * power_integral(spec, m)?),
    }
}

/// Midpoint Riemann sum `Σ f(xᵢ) e^{−f(xᵢ)} Δ` over `range`, the
/// quantized counterpart of the DMIM integral.
pub fn quantized_mim_gap<F: Real>(
    spec: &DistributionSpec<F>,
    delta: F,
    range: Interval<F>,
) -> Result<F> {
    check_positive("delta", delta)?;
    if !range.is_bounded() {
        return Err(Error::InvalidInterval {
            lo: range.lo.f64(),
            hi: range.hi.f64(),
        });
    }
    let bins = (range.width() / delta - F::of(1e-9)).ceil();
    let bins = bins
        .to_usize()
        .filter(|b| *b <= 1 << 32)
        .ok_or(Error::InvalidParameter {
            name: "delta",
            value: delta.f64(),
            reason: "too many bins for the range",
        })?;
    let half = F::of(0.5);
    let mut sum = NeumaierSum::new();
    for i in 0..bins.max(1) {
        let x = range.lo + (F::of_usize(i) + half) * delta;
        let f = spec.pdf(x);
        if f.is_finite() {
            sum.add(f * (-f).exp());
        }
    }
    Ok(sum.value() * delta)
}

/// Engine selection used by the command line.
///
/// Closed form where one exists; for the normal family the small-σ
/// approximation when `σ ≤ 0.2` and the series otherwise; for the rest the
/// series when `sup f` is finite and the result is not flagged, else
/// quadrature.
pub fn dmim_auto<F: Real>(
    spec: &DistributionSpec<F>,
    qcfg: &QuadratureConfig<F>,
    scfg: &SeriesConfig<F>,
) -> Result<DmimEstimate<F>> {
    match spec.family() {
        Family::Uniform { .. } | Family::Exponential { .. } | Family::Laplace { .. } => {
            dmim_closed_form(spec)
        }
        Family::Normal { sigma, .. } if *sigma <= F::of(0.2) => {
            let a = l_hat(*sigma)?;
            let mut est = DmimEstimate::new(a.value, Method::NormalHat, a.error_bound);
            est.terms_used = a.n0;
            est.warnings.push(format!(
                "σ ≤ 0.2: truncated small-σ series with bound 3σ/e = {:.6}",
                a.error_bound.f64()
            ));
            est.warnings.extend(a.warnings);
            Ok(est)
        }
        _ => {
            let certified = spec.max_density().is_some_and(|m| m.is_finite());
            let reason = if certified {
                match dmim_series(spec, scfg) {
                    Ok(est) if !est.unreliable => return Ok(est),
                    Ok(_) => "series flagged for cancellation".to_string(),
                    Err(e) => format!("series unavailable ({e})"),
                }
            } else {
                "series convergence not certified (sup f is infinite or unknown)".to_string()
            };
            let mut est = dmim_quadrature(spec, qcfg)?;
            est.warnings
                .push(format!("{reason}; fell back to quadrature"));
            Ok(est)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CustomDensity;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    type S = DistributionSpec<f64>;

    // Oracle values: 50-digit quadrature of f e^{-f}.
    const L_NORMAL_1: f64 = 0.758_997_778_271_017_1;
    const L_NORMAL_05: f64 = 0.583_831_785_197_965;

    #[test]
    fn power_integral_examples() {
        assert_relative_eq!(
            power_integral(&S::exponential(2.0).unwrap(), 3).unwrap(),
            2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            power_integral(&S::uniform(0.0, 1.0).unwrap(), 5).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        let n = S::normal(0.0, 1.0).unwrap();
        let p2 = power_integral(&n, 2).unwrap();
        assert_abs_diff_eq!(p2, 0.091_888_149_236_965_4, epsilon = 1e-15);
        let tol = Tolerance::default();
        let q = integrate(
            |x| n.pdf(x).powi(3),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &[],
            &tol,
        )
        .unwrap();
        assert_abs_diff_eq!(p2, q.value, epsilon = 1e-10);
    }

    #[test]
    fn power_integrals_match_quadrature_for_every_family() {
        let specs = [
            S::gamma(2.5, 1.5).unwrap(),
            S::gamma(0.7, 2.0).unwrap(),
            S::beta(2.0, 3.0).unwrap(),
            S::beta(0.8, 1.5).unwrap(),
            S::laplace(1.0, 3.0).unwrap(),
            S::nakagami(2.0, 10.0).unwrap(),
            S::nakagami(0.5, 2.0).unwrap(),
        ];
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-11,
            max_subdivisions: 5000,
        };
        for spec in &specs {
            let s = spec.support();
            for n in 1..=2 {
                let closed = power_integral(spec, n);
                let Ok(closed) = closed else { continue };
                let q = integrate(
                    |x| spec.pdf(x).powi(n as i32 + 1),
                    s.lo,
                    s.hi,
                    &spec.breakpoints(),
                    &tol,
                )
                .unwrap();
                assert_relative_eq!(closed, q.value, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn divergent_power_integral() {
        let g = S::gamma(0.5, 1.0).unwrap();
        assert!(matches!(
            power_integral(&g, 1),
            Err(Error::DivergentIntegral { .. })
        ));
        let b = S::beta(1.0, 0.4).unwrap();
        assert!(matches!(
            power_integral(&b, 2),
            Err(Error::DivergentIntegral { .. })
        ));
        assert!(power_integral(&g, 0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let u = dmim_closed_form(&S::uniform(0.0, 1e6).unwrap()).unwrap();
        assert_relative_eq!(u.value, (-1e-6f64).exp(), max_relative = 1e-15);
        let e = dmim_closed_form(&S::exponential(1e-8).unwrap()).unwrap();
        assert_abs_diff_eq!(e.value, 1.0, epsilon = 1e-8);
        let l = dmim_closed_form(&S::laplace(0.0, 2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(l.value, 1.0 - (-1f64).exp(), epsilon = 1e-15);
        assert_eq!(l.method, Method::ClosedForm);
        assert!(matches!(
            dmim_closed_form(&S::normal(0.0, 1.0).unwrap()),
            Err(Error::NoClosedForm { .. })
        ));
    }

    #[test]
    fn quadrature_examples() {
        let cfg = QuadratureConfig::default();
        let u = dmim_quadrature(&S::uniform(0.0, 1.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(u.value, (-1f64).exp(), epsilon = 1e-10);
        let l = dmim_quadrature(&S::laplace(0.0, 2.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(l.value, 0.632_120_6, epsilon = 1e-7);
        assert_abs_diff_eq!(l.abs_error_bound, 1e-10 + 1e-12, epsilon = 1e-20);
        let n = dmim_quadrature(&S::normal(0.0, 1.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(n.value, L_NORMAL_1, epsilon = 2e-10);
    }

    #[test]
    fn quadrature_handles_singular_gamma() {
        let g =
            dmim_quadrature(&S::gamma(0.5, 1.0).unwrap(), &QuadratureConfig::default()).unwrap();
        assert_abs_diff_eq!(g.value, GAMMA_HALF_ONE, epsilon = 1e-9);
        assert!(g.value > 0.0 && g.value < 1.0);
    }

    const GAMMA_HALF_ONE: f64 = 0.413_585_526_162_655_5;

    #[test]
    fn series_examples() {
        let cfg = SeriesConfig::default();
        let e = dmim_series(&S::exponential(1.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(e.value, 0.632_120_558_828_557_7, epsilon = 1e-14);
        let n = dmim_series(&S::normal(0.0, 1.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(n.value, L_NORMAL_1, epsilon = 1e-14);
        assert!(n.abs_error_bound < 1e-13);
        let n = dmim_series(&S::normal(0.0, 0.5).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(n.value, L_NORMAL_05, epsilon = 1e-14);
    }

    #[test]
    fn series_flags_small_sigma() {
        let cfg = SeriesConfig::default();
        let n = dmim_series(&S::normal(0.0, 0.05).unwrap(), &cfg).unwrap();
        assert!(!n.warnings.is_empty());
        assert!(n.cancellation.unwrap() > 1e4);
        let n = dmim_series(&S::normal(0.0, 0.02).unwrap(), &cfg).unwrap();
        assert!(n.unreliable);
    }

    #[test]
    fn series_diverges_for_singular_gamma() {
        let r = dmim_series(&S::gamma(0.5, 1.0).unwrap(), &SeriesConfig::default());
        assert!(matches!(r, Err(Error::DivergentIntegral { .. })));
    }

    #[test]
    fn renyi_examples() {
        let n = S::normal(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            renyi_entropy(&n, 2.0).unwrap(),
            1.265_512_123_484_645,
            epsilon = 1e-12
        );
        let u = S::uniform(0.0, 2.0).unwrap();
        assert_abs_diff_eq!(renyi_entropy(&u, 3.0).unwrap(), 2f64.ln(), epsilon = 1e-15);
        let e = S::exponential(1.0).unwrap();
        assert_abs_diff_eq!(renyi_entropy(&e, 2.0).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert!(renyi_entropy(&e, 1.0).is_err());

        let cfg = SeriesConfig::default();
        let n2 = S::normal(0.0, 2.0).unwrap();
        let a = dmim_via_renyi(&n2, &cfg).unwrap();
        let b = dmim_series(&n2, &cfg).unwrap();
        assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-12);
        assert_eq!(a.method, Method::RenyiSeries);
        let u = dmim_via_renyi(&S::uniform(0.0, 1.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(u.value, (-1f64).exp(), epsilon = 1e-14);
        let e = dmim_via_renyi(&e, &cfg).unwrap();
        assert_abs_diff_eq!(e.value, 0.632_120_6, epsilon = 1e-7);
    }

    #[test]
    fn remainder_bound_examples() {
        assert_abs_diff_eq!(
            remainder_bound(&S::normal(0.0, 1.0).unwrap(), 2).unwrap(),
            0.249_777_886_32,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            remainder_bound(&S::uniform(0.0, 2.0).unwrap(), 3).unwrap(),
            std::f64::consts::E / 8.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            remainder_bound(&S::exponential(1.0).unwrap(), 1).unwrap(),
            std::f64::consts::E / 2.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            remainder_bound(&S::normal(0.0, 0.1).unwrap(), 2),
            Err(Error::UnboundedTail { .. })
        ));
    }

    #[test]
    fn remainder_bound_holds_for_partial_sums() {
        let n = S::normal(0.0, 1.0).unwrap();
        for m in 1..=6 {
            let gap = (L_NORMAL_1 - series_partial_sum(&n, m).unwrap()).abs();
            assert!(gap <= remainder_bound(&n, m).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn quantized_sum_examples() {
        let u = S::uniform(0.0, 1.0).unwrap();
        let r = Interval::new(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            quantized_mim_gap(&u, 1e-4, r).unwrap(),
            (-1f64).exp(),
            epsilon = 1e-6
        );
        let n = S::normal(0.0, 1.0).unwrap();
        let r = Interval::new(-8.0, 8.0).unwrap();
        let fine = quantized_mim_gap(&n, 1e-3, r).unwrap();
        let coarse = quantized_mim_gap(&n, 0.5, r).unwrap();
        assert_abs_diff_eq!(fine, L_NORMAL_1, epsilon = 1e-5);
        assert!((coarse - L_NORMAL_1).abs() > (fine - L_NORMAL_1).abs());
        assert!(quantized_mim_gap(&n, 0.0, r).is_err());
    }

    #[test]
    fn custom_density_through_every_engine() {
        let c = CustomDensity::new(
            |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            Interval::real_line(),
        );
        let spec = S::custom(c).unwrap();
        let q = dmim_quadrature(&spec, &QuadratureConfig::default()).unwrap();
        assert_abs_diff_eq!(q.value, L_NORMAL_1, epsilon = 1e-9);
        let s = dmim_series(&spec, &SeriesConfig::default()).unwrap();
        assert_abs_diff_eq!(s.value, L_NORMAL_1, epsilon = 1e-9);
        assert!(s.warnings.iter().any(|w| w.contains("not certified")));
        assert!(remainder_bound(&spec, 2).is_err());

        let bad = S::custom(CustomDensity::new(
            |_x: f64| 0.5,
            Interval::new(0.0, 1.0).unwrap(),
        ))
        .unwrap();
        assert!(matches!(
            dmim_quadrature(&bad, &QuadratureConfig::default()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn auto_engine_choices() {
        let (q, s) = (QuadratureConfig::default(), SeriesConfig::default());
        let pick = |spec: S| dmim_auto(&spec, &q, &s).unwrap().method;
        assert_eq!(pick(S::uniform(0.0, 1.0).unwrap()), Method::ClosedForm);
        assert_eq!(pick(S::normal(0.0, 0.05).unwrap()), Method::NormalHat);
        assert_eq!(pick(S::normal(0.0, 1.0).unwrap()), Method::Series);
        assert_eq!(pick(S::gamma(2.0, 1.0).unwrap()), Method::Series);
        assert_eq!(pick(S::gamma(0.5, 1.0).unwrap()), Method::Quadrature);
    }

    #[test]
    fn estimate_json_shape() {
        let e = dmim_closed_form(&S::uniform(0.0, 1.0).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&e).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 4);
        assert_eq!(v["method"], "closed_form");
        assert!(v["terms_used"].is_null());
    }

    #[test]
    fn works_in_f32() {
        let spec = DistributionSpec::<f32>::normal(0.0, 1.0).unwrap();
        let q = dmim_quadrature(&spec, &QuadratureConfig::default()).unwrap();
        let s = dmim_series(&spec, &SeriesConfig::default()).unwrap();
        assert!((q.value - L_NORMAL_1 as f32).abs() < 1e-5);
        assert!((s.value - L_NORMAL_1 as f32).abs() < 1e-5);
    }
}
