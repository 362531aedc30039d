//! Density families: uniform, normal, exponential, gamma, beta, Laplace,
//! Nakagami-m, and user-supplied densities.
//!
//! A [`DistributionSpec`] is validated on construction; afterwards `pdf` is
//! total and the remaining operations fail only where the family lacks the
//! needed information (a custom density without a variance or quantile).
//!
//! JSON form: `{"family": "<name>", "params": {...}}` with
//!
//! | family | params |
//! |--------|--------|
//! | `uniform` | `a`, `b` |
//! | `normal` | `mu` (default 0), `sigma` |
//! | `exponential` | `lambda` |
//! | `gamma` | `alpha`, `lambda` (rate) |
//! | `beta` | `a`, `b` |
//! | `laplace` | `theta` (default 0), `lambda` |
//! | `nakagami` | `m`, `omega` |

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::quadrature::{integrate, Tolerance};
use crate::rng::Stream;
use crate::special::{
    beta_inc, gamma_p, gamma_q, ln_beta, ln_gamma, norm_cdf, norm_quantile, norm_sf,
};
use crate::{Error, Real, Result};

/// Support interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Real> Interval<F> {
    pub fn new(lo: F, hi: F) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidInterval {
                lo: lo.f64(),
                hi: hi.f64(),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn real_line() -> Self {
        Self {
            lo: F::neg_infinity(),
            hi: F::infinity(),
        }
    }

    pub fn contains(&self, x: F) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> F {
        self.hi - self.lo
    }
}

type RealFn<F> = Arc<dyn Fn(F) -> F + Send + Sync>;

/// A user-supplied density.
///
/// Normalization is checked the first time an operation integrates the
/// density; it must integrate to 1 within `1e-6` over `support`.
#[derive(Clone)]
pub struct CustomDensity<F> {
    density: RealFn<F>,
    support: Interval<F>,
    variance: Option<F>,
    quantile: Option<RealFn<F>>,
    mass: Arc<OnceLock<std::result::Result<F, Error>>>,
}

impl<F: Real> CustomDensity<F> {
    pub fn new(density: impl Fn(F) -> F + Send + Sync + 'static, support: Interval<F>) -> Self {
        Self {
            density: Arc::new(density),
            support,
            variance: None,
            quantile: None,
            mass: Arc::new(OnceLock::new()),
        }
    }

    pub fn with_variance(mut self, variance: F) -> Self {
        self.variance = Some(variance);
        self
    }

    /// Inverse CDF; enables sampling.
    pub fn with_quantile(mut self, quantile: impl Fn(F) -> F + Send + Sync + 'static) -> Self {
        self.quantile = Some(Arc::new(quantile));
        self
    }

    pub fn support(&self) -> Interval<F> {
        self.support
    }

    fn eval(&self, x: F) -> F {
        if self.support.contains(x) {
            (self.density)(x).max(F::zero())
        } else {
            F::zero()
        }
    }

    fn check_mass(&self) -> Result<()> {
        let mass = self.mass.get_or_init(|| {
            let tol = Tolerance {
                abs: F::of(1e-9).max(F::of(64.0) * F::epsilon()),
                ..Tolerance::default()
            };
            integrate(
                |x| self.eval(x),
                self.support.lo,
                self.support.hi,
                &[],
                &tol,
            )
            .map(|r| r.value)
        });
        match mass {
            Ok(m) if (*m - F::one()).abs() <= F::of(1e-6).max(F::of(64.0) * F::epsilon()) => Ok(()),
            Ok(m) => Err(Error::NotNormalized { integral: m.f64() }),
            Err(e) => Err(e.clone()),
        }
    }
}

impl<F: fmt::Debug> fmt::Debug for CustomDensity<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("support", &self.support)
            .field("variance", &self.variance)
            .field("has_quantile", &self.quantile.is_some())
            .finish()
    }
}

/// Parametric family and its parameters.
#[derive(Debug, Clone)]
pub enum Family<F> {
    Uniform {
        a: F,
        b: F,
    },
    Normal {
        mu: F,
        sigma: F,
    },
    Exponential {
        lambda: F,
    },
    /// Shape `alpha`, rate `lambda`.
    Gamma {
        alpha: F,
        lambda: F,
    },
    Beta {
        a: F,
        b: F,
    },
    Laplace {
        theta: F,
        lambda: F,
    },
    Nakagami {
        m: F,
        omega: F,
    },
    Custom(CustomDensity<F>),
}

/// A validated density description.
#[derive(Debug, Clone)]
pub struct DistributionSpec<F> {
    family: Family<F>,
}

fn positive<F: Real>(name: &'static str, v: F) -> Result<()> {
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

fn finite<F: Real>(name: &'static str, v: F) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v.f64(),
            reason: "must be finite",
        })
    }
}

impl<F: Real> DistributionSpec<F> {
    pub fn new(family: Family<F>) -> Result<Self> {
        match &family {
            Family::Uniform { a, b } => {
                finite("a", *a)?;
                finite("b", *b)?;
                if a >= b {
                    return Err(Error::InvalidParameter {
                        name: "b",
                        value: b.f64(),
                        reason: "must exceed a",
                    });
                }
            }
            Family::Normal { mu, sigma } => {
                finite("mu", *mu)?;
                positive("sigma", *sigma)?;
            }
            Family::Exponential { lambda } => positive("lambda", *lambda)?,
            Family::Gamma { alpha, lambda } => {
                positive("alpha", *alpha)?;
                positive("lambda", *lambda)?;
            }
            Family::Beta { a, b } => {
                positive("a", *a)?;
                positive("b", *b)?;
            }
            Family::Laplace { theta, lambda } => {
                finite("theta", *theta)?;
                positive("lambda", *lambda)?;
            }
            Family::Nakagami { m, omega } => {
                if !(m.is_finite() && *m >= F::of(0.5)) {
                    return Err(Error::InvalidParameter {
                        name: "m",
                        value: m.f64(),
                        reason: "must be finite and ≥ 0.5",
                    });
                }
                positive("omega", *omega)?;
            }
            Family::Custom(c) => {
                Interval::new(c.support.lo, c.support.hi)?;
                if let Some(v) = c.variance {
                    positive("variance", v)?;
                }
            }
        }
        Ok(Self { family })
    }

    pub fn uniform(a: F, b: F) -> Result<Self> {
        Self::new(Family::Uniform { a, b })
    }
    pub fn normal(mu: F, sigma: F) -> Result<Self> {
        Self::new(Family::Normal { mu, sigma })
    }
    pub fn exponential(lambda: F) -> Result<Self> {
        Self::new(Family::Exponential { lambda })
    }
    pub fn gamma(alpha: F, lambda: F) -> Result<Self> {
        Self::new(Family::Gamma { alpha, lambda })
    }
    pub fn beta(a: F, b: F) -> Result<Self> {
        Self::new(Family::Beta { a, b })
    }
    pub fn laplace(theta: F, lambda: F) -> Result<Self> {
        Self::new(Family::Laplace { theta, lambda })
    }
    pub fn nakagami(m: F, omega: F) -> Result<Self> {
        Self::new(Family::Nakagami { m, omega })
    }
    pub fn custom(density: CustomDensity<F>) -> Result<Self> {
        Self::new(Family::Custom(density))
    }

    pub fn family(&self) -> &Family<F> {
        &self.family
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Uniform { .. } => "uniform",
            Family::Normal { .. } => "normal",
            Family::Exponential { .. } => "exponential",
            Family::Gamma { .. } => "gamma",
            Family::Beta { .. } => "beta",
            Family::Laplace { .. } => "laplace",
            Family::Nakagami { .. } => "nakagami",
            Family::Custom(_) => "custom",
        }
    }

    pub fn support(&self) -> Interval<F> {
        let (z, inf) = (F::zero(), F::infinity());
        match &self.family {
            Family::Uniform { a, b } => Interval { lo: *a, hi: *b },
            Family::Normal { .. } | Family::Laplace { .. } => Interval::real_line(),
            Family::Exponential { .. } | Family::Gamma { .. } | Family::Nakagami { .. } => {
                Interval { lo: z, hi: inf }
            }
            Family::Beta { .. } => Interval {
                lo: z,
                hi: F::one(),
            },
            Family::Custom(c) => c.support,
        }
    }

    /// Fails with [`Error::NotNormalized`] when a custom density does not
    /// integrate to one. Parametric families always pass.
    pub fn ensure_normalized(&self) -> Result<()> {
        match &self.family {
            Family::Custom(c) => c.check_mass(),
            _ => Ok(()),
        }
    }

    /// Density at `x`; zero outside the support.
    pub fn pdf(&self, x: F) -> F {
        let (z, one, half) = (F::zero(), F::one(), F::of(0.5));
        match &self.family {
            Family::Uniform { a, b } => {
                if x >= *a && x <= *b {
                    one / (*b - *a)
                } else {
                    z
                }
            }
            Family::Normal { mu, sigma } => {
                let t = (x - *mu) / *sigma;
                (-half * t * t).exp() / (*sigma * F::TAU().sqrt())
            }
            Family::Exponential { lambda } => {
                if x < z {
                    z
                } else {
                    *lambda * (-*lambda * x).exp()
                }
            }
            Family::Gamma { alpha, lambda } => {
                if x < z {
                    z
                } else if x == z {
                    if *alpha < one {
                        F::infinity()
                    } else if *alpha == one {
                        *lambda
                    } else {
                        z
                    }
                } else {
                    (lambda.ln() + (*alpha - one) * (*lambda * x).ln()
                        - *lambda * x
                        - ln_gamma(*alpha))
                    .exp()
                }
            }
            Family::Beta { a, b } => {
                if x <= z || x >= one {
                    z
                } else {
                    ((*a - one) * x.ln() + (*b - one) * (-x).ln_1p() - ln_beta(*a, *b)).exp()
                }
            }
            Family::Laplace { theta, lambda } => {
                half * *lambda * (-*lambda * (x - *theta).abs()).exp()
            }
            Family::Nakagami { m, omega } => {
                if x < z {
                    z
                } else if x == z {
                    if *m == half {
                        (F::of(2.0) / (F::PI() * *omega)).sqrt()
                    } else {
                        z
                    }
                } else {
                    (F::LN_2() + *m * m.ln() - ln_gamma(*m) - *m * omega.ln()
                        + (F::of(2.0) * *m - one) * x.ln()
                        - *m * x * x / *omega)
                        .exp()
                }
            }
            Family::Custom(c) => c.eval(x),
        }
    }

    fn custom_tolerance() -> Tolerance<F> {
        Tolerance {
            abs: F::of(1e-12).max(F::of(64.0) * F::epsilon()),
            ..Tolerance::default()
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: F) -> Result<F> {
        let (z, one, half) = (F::zero(), F::one(), F::of(0.5));
        Ok(match &self.family {
            Family::Uniform { a, b } => ((x - *a) / (*b - *a)).max(z).min(one),
            Family::Normal { mu, sigma } => norm_cdf((x - *mu) / *sigma),
            Family::Exponential { lambda } => {
                if x <= z {
                    z
                } else {
                    -(-*lambda * x).exp_m1()
                }
            }
            Family::Gamma { alpha, lambda } => gamma_p(*alpha, *lambda * x.max(z)),
            Family::Beta { a, b } => beta_inc(*a, *b, x),
            Family::Laplace { theta, lambda } => {
                let t = x - *theta;
                if t < z {
                    half * (*lambda * t).exp()
                } else {
                    one - half * (-*lambda * t).exp()
                }
            }
            Family::Nakagami { m, omega } => gamma_p(*m, *m * x.max(z) * x.max(z) / *omega),
            Family::Custom(c) => {
                c.check_mass()?;
                let s = c.support;
                if x <= s.lo {
                    return Ok(z);
                }
                if x >= s.hi {
                    return Ok(one);
                }
                let r = integrate(|t| c.eval(t), s.lo, x, &[], &Self::custom_tolerance()).map_err(
                    |_| Error::Unsupported {
                        family: "custom",
                        what: "cdf (density tail is not integrable)",
                    },
                )?;
                r.value.max(z).min(one)
            }
        })
    }

    /// Survival function 1 − F(x), accurate in the right tail.
    pub fn sf(&self, x: F) -> Result<F> {
        let (z, one, half) = (F::zero(), F::one(), F::of(0.5));
        Ok(match &self.family {
            Family::Normal { mu, sigma } => norm_sf((x - *mu) / *sigma),
            Family::Exponential { lambda } => {
                if x <= z {
                    one
                } else {
                    (-*lambda * x).exp()
                }
            }
            Family::Gamma { alpha, lambda } => gamma_q(*alpha, *lambda * x.max(z)),
            Family::Beta { a, b } => {
                if x <= z {
                    one
                } else if x >= one {
                    z
                } else {
                    beta_inc(*b, *a, one - x)
                }
            }
            Family::Laplace { theta, lambda } => {
                let t = x - *theta;
                if t < z {
                    one - half * (*lambda * t).exp()
                } else {
                    half * (-*lambda * t).exp()
                }
            }
            Family::Nakagami { m, omega } => gamma_q(*m, *m * x.max(z) * x.max(z) / *omega),
            Family::Custom(c) => {
                c.check_mass()?;
                let s = c.support;
                if x <= s.lo {
                    return Ok(one);
                }
                if x >= s.hi {
                    return Ok(z);
                }
                let r = integrate(|t| c.eval(t), x, s.hi, &[], &Self::custom_tolerance()).map_err(
                    |_| Error::Unsupported {
                        family: "custom",
                        what: "survival function (density tail is not integrable)",
                    },
                )?;
                r.value.max(z).min(one)
            }
            Family::Uniform { .. } => one - self.cdf(x)?,
        })
    }

    /// Point `x` with `cdf(x) = p`, for `p` in `[0, 1]`.
    pub fn quantile(&self, p: F) -> Result<F> {
        let (z, one, half) = (F::zero(), F::one(), F::of(0.5));
        if !(p >= z && p <= one) {
            return Err(Error::Domain(format!("quantile level {p} outside [0, 1]")));
        }
        Ok(match &self.family {
            Family::Uniform { a, b } => *a + p * (*b - *a),
            Family::Normal { mu, sigma } => *mu + *sigma * norm_quantile(p),
            Family::Exponential { lambda } => -(-p).ln_1p() / *lambda,
            Family::Laplace { theta, lambda } => {
                if p < half {
                    *theta + (p + p).ln() / *lambda
                } else {
                    *theta - ((one - p) + (one - p)).ln() / *lambda
                }
            }
            Family::Custom(c) if c.quantile.is_some() => (c.quantile.as_ref().unwrap())(p),
            _ => {
                if p == z {
                    return Ok(self.support().lo);
                }
                if p == one {
                    return Ok(self.support().hi);
                }
                if p < half {
                    self.bisect_cdf(p, false)?
                } else {
                    self.bisect_cdf(one - p, true)?
                }
            }
        })
    }

    /// Finds `x` with `cdf(x) = target` (or `sf(x) = target` when `upper`),
    /// returning the bracket end on the far side of the tail.
    fn bisect_cdf(&self, target: F, upper: bool) -> Result<F> {
        let s = self.support();
        let g = |x: F| -> Result<F> {
            if upper {
                self.sf(x)
            } else {
                self.cdf(x)
            }
        };
        // Start inside the bulk and expand outwards until the tail is reached.
        let centre = self.mean().filter(|m| m.is_finite()).unwrap_or_else(|| {
            match (s.lo.is_finite(), s.hi.is_finite()) {
                (true, true) => F::of(0.5) * (s.lo + s.hi),
                (true, false) => s.lo + F::one(),
                (false, true) => s.hi - F::one(),
                (false, false) => F::zero(),
            }
        });
        let mut step = self
            .variance()
            .ok()
            .map(|v| v.sqrt())
            .filter(|v| v.is_finite() && *v > F::zero())
            .unwrap_or(F::one());
        let (mut inner, mut outer);
        if upper {
            inner = if s.lo.is_finite() { s.lo } else { centre };
            outer = centre;
            loop {
                if outer >= s.hi {
                    outer = s.hi;
                    break;
                }
                if g(outer)? <= target {
                    break;
                }
                inner = outer;
                outer += step;
                step = step + step;
                if !outer.is_finite() {
                    return Err(Error::Overflow {
                        what: "quantile bracket",
                    });
                }
            }
        } else {
            inner = if s.hi.is_finite() { s.hi } else { centre };
            outer = centre;
            loop {
                if outer <= s.lo {
                    outer = s.lo;
                    break;
                }
                if g(outer)? <= target {
                    break;
                }
                inner = outer;
                outer -= step;
                step = step + step;
                if !outer.is_finite() {
                    return Err(Error::Overflow {
                        what: "quantile bracket",
                    });
                }
            }
        }
        for _ in 0..200 {
            let mid = F::of(0.5) * (inner + outer);
            if mid == inner || mid == outer {
                break;
            }
            if g(mid)? <= target {
                outer = mid;
            } else {
                inner = mid;
            }
        }
        Ok(outer)
    }

    /// Point beyond which the right tail carries at most `mass`.
    pub fn upper_tail_point(&self, mass: F) -> Result<F> {
        let s = self.support();
        if s.hi.is_finite() {
            return Ok(s.hi);
        }
        match &self.family {
            Family::Normal { mu, sigma } => Ok(*mu - *sigma * norm_quantile(mass)),
            Family::Exponential { lambda } => Ok(-mass.ln() / *lambda),
            Family::Laplace { theta, lambda } => Ok(*theta - (mass + mass).ln() / *lambda),
            _ => self.bisect_cdf(mass, true),
        }
    }

    /// Point below which the left tail carries at most `mass`.
    pub fn lower_tail_point(&self, mass: F) -> Result<F> {
        let s = self.support();
        if s.lo.is_finite() {
            return Ok(s.lo);
        }
        match &self.family {
            Family::Normal { mu, sigma } => Ok(*mu + *sigma * norm_quantile(mass)),
            Family::Laplace { theta, lambda } => Ok(*theta + (mass + mass).ln() / *lambda),
            _ => self.bisect_cdf(mass, false),
        }
    }

    pub fn mean(&self) -> Option<F> {
        let (one, half) = (F::one(), F::of(0.5));
        Some(match &self.family {
            Family::Uniform { a, b } => half * (*a + *b),
            Family::Normal { mu, .. } => *mu,
            Family::Exponential { lambda } => one / *lambda,
            Family::Gamma { alpha, lambda } => *alpha / *lambda,
            Family::Beta { a, b } => *a / (*a + *b),
            Family::Laplace { theta, .. } => *theta,
            Family::Nakagami { m, omega } => {
                (*omega / *m).sqrt() * (ln_gamma(*m + half) - ln_gamma(*m)).exp()
            }
            Family::Custom(_) => return None,
        })
    }

    /// Variance σ² of the distribution.
    pub fn variance(&self) -> Result<F> {
        let (one, two, half) = (F::one(), F::of(2.0), F::of(0.5));
        Ok(match &self.family {
            Family::Uniform { a, b } => (*b - *a) * (*b - *a) / F::of(12.0),
            Family::Normal { sigma, .. } => *sigma * *sigma,
            Family::Exponential { lambda } => one / (*lambda * *lambda),
            Family::Gamma { alpha, lambda } => *alpha / (*lambda * *lambda),
            Family::Beta { a, b } => {
                let s = *a + *b;
                *a * *b / (s * s * (s + one))
            }
            Family::Laplace { lambda, .. } => two / (*lambda * *lambda),
            Family::Nakagami { m, omega } => {
                let r = (two * (ln_gamma(*m + half) - ln_gamma(*m))).exp();
                *omega * (one - r / *m)
            }
            Family::Custom(c) => c
                .variance
                .ok_or(Error::MissingVariance { family: "custom" })?,
        })
    }

    /// sup f. `Some(∞)` for unbounded densities, `None` when unknown.
    pub fn max_density(&self) -> Option<F> {
        let (z, one, two) = (F::zero(), F::one(), F::of(2.0));
        Some(match &self.family {
            Family::Uniform { a, b } => one / (*b - *a),
            Family::Normal { sigma, .. } => one / (*sigma * F::TAU().sqrt()),
            Family::Exponential { lambda } => *lambda,
            Family::Laplace { lambda, .. } => *lambda / two,
            Family::Gamma { alpha, lambda } => {
                if *alpha < one {
                    F::infinity()
                } else if *alpha == one {
                    *lambda
                } else {
                    self.pdf((*alpha - one) / *lambda)
                }
            }
            Family::Beta { a, b } => {
                if *a < one || *b < one {
                    F::infinity()
                } else {
                    // kernel at the mode, endpoints included
                    let mode = if *a + *b > two {
                        (*a - one) / (*a + *b - two)
                    } else {
                        F::of(0.5)
                    };
                    let ln_k = |x: F| {
                        let l = if *a == one { z } else { (*a - one) * x.ln() };
                        let r = if *b == one {
                            z
                        } else {
                            (*b - one) * (-x).ln_1p()
                        };
                        l + r
                    };
                    (ln_k(mode) - ln_beta(*a, *b)).exp()
                }
            }
            Family::Nakagami { m, omega } => {
                let mode = (*omega * (two * *m - one) / (two * *m)).sqrt();
                if mode == z {
                    self.pdf(z)
                } else {
                    self.pdf(mode)
                }
            }
            Family::Custom(_) => return None,
        })
    }

    /// Points where the density has a kink, a peak, or changes scale.
    /// Used to seed adaptive quadrature.
    pub fn breakpoints(&self) -> Vec<F> {
        let mut pts = Vec::new();
        let (one, two) = (F::one(), F::of(2.0));
        match &self.family {
            Family::Laplace { theta, .. } => pts.push(*theta),
            Family::Gamma { alpha, lambda } if *alpha > one => pts.push((*alpha - one) / *lambda),
            Family::Beta { a, b } if *a > one && *b > one => pts.push((*a - one) / (*a + *b - two)),
            Family::Nakagami { m, omega } => {
                pts.push((*omega * (two * *m - one) / (two * *m)).sqrt())
            }
            _ => {}
        }
        if let (Some(mean), Ok(var)) = (self.mean(), self.variance()) {
            let sd = var.sqrt();
            pts.push(mean);
            for k in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
                pts.push(mean - F::of(k) * sd);
                pts.push(mean + F::of(k) * sd);
            }
        }
        // Heavy left edges (gamma/beta with shape < 1) concentrate near 0.
        if let Family::Gamma { lambda, .. } = &self.family {
            for k in [1e-6, 1e-4, 1e-2, 0.1] {
                pts.push(F::of(k) / *lambda);
            }
        }
        if let Family::Beta { .. } = &self.family {
            for k in [1e-6, 1e-4, 1e-2, 0.1] {
                pts.push(F::of(k));
                pts.push(one - F::of(k));
            }
        }
        let s = self.support();
        pts.retain(|p| p.is_finite() && *p > s.lo && *p < s.hi);
        pts
    }

    /// `n` i.i.d. draws from stream `(seed, 0)`. Bit-reproducible.
    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<F>> {
        self.sample_stream(seed, 0, n)
    }

    /// `n` i.i.d. draws from stream `(seed, stream)`.
    pub fn sample_stream(&self, seed: u64, stream: u64, n: usize) -> Result<Vec<F>> {
        if n == 0 {
            return Err(Error::EmptyInput("sample size must be at least 1"));
        }
        Sampler::new(seed, stream).fill(self, n)
    }
}

/// Draws variates from a [`Stream`].
///
/// Uniform, exponential and Laplace use the inverse CDF, the normal uses
/// Marsaglia's polar method, gamma uses Marsaglia–Tsang squeeze rejection
/// (boosted by `U^{1/α}` for shape < 1), beta is `X/(X+Y)` of two gammas and
/// Nakagami is the square root of a Gamma(m, Ω/m) draw.
#[derive(Debug, Clone)]
pub struct Sampler<F> {
    stream: Stream,
    spare_normal: Option<F>,
}

impl<F: Real> Sampler<F> {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            stream: Stream::new(seed, stream),
            spare_normal: None,
        }
    }

    fn uniform(&mut self) -> F {
        self.stream.open01()
    }

    fn std_normal(&mut self) -> F {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let (one, two) = (F::one(), F::of(2.0));
        loop {
            let u = two * self.uniform() - one;
            let v = two * self.uniform() - one;
            let s = u * u + v * v;
            if s > F::zero() && s < one {
                let m = (-two * s.ln() / s).sqrt();
                self.spare_normal = Some(v * m);
                return u * m;
            }
        }
    }

    /// Gamma(shape, 1).
    fn std_gamma(&mut self, shape: F) -> F {
        let one = F::one();
        if shape < one {
            let g = self.std_gamma(shape + one);
            return g * self.uniform().powf(one / shape);
        }
        let d = shape - F::of(1.0 / 3.0);
        let c = one / (F::of(9.0) * d).sqrt();
        loop {
            let x = self.std_normal();
            let t = one + c * x;
            if t <= F::zero() {
                continue;
            }
            let v = t * t * t;
            let u = self.uniform();
            let x2 = x * x;
            if u < one - F::of(0.0331) * x2 * x2 {
                return d * v;
            }
            if u.ln() < F::of(0.5) * x2 + d * (one - v + v.ln()) {
                return d * v;
            }
        }
    }

    pub fn draw(&mut self, spec: &DistributionSpec<F>) -> Result<F> {
        let (one, half) = (F::one(), F::of(0.5));
        Ok(match spec.family() {
            Family::Uniform { a, b } => *a + (*b - *a) * self.uniform(),
            Family::Normal { mu, sigma } => *mu + *sigma * self.std_normal(),
            Family::Exponential { lambda } => -self.uniform().ln() / *lambda,
            Family::Laplace { theta, lambda } => {
                let u = self.uniform();
                if u < half {
                    *theta + (u + u).ln() / *lambda
                } else {
                    *theta - ((one - u) + (one - u)).ln() / *lambda
                }
            }
            Family::Gamma { alpha, lambda } => self.std_gamma(*alpha) / *lambda,
            Family::Beta { a, b } => {
                let x = self.std_gamma(*a);
                let y = self.std_gamma(*b);
                x / (x + y)
            }
            Family::Nakagami { m, omega } => (self.std_gamma(*m) * *omega / *m).sqrt(),
            Family::Custom(c) => match &c.quantile {
                Some(q) => q(self.uniform()),
                None => {
                    return Err(Error::Unsupported {
                        family: "custom",
                        what: "sampling without an inverse-CDF handle",
                    })
                }
            },
        })
    }

    pub fn fill(&mut self, spec: &DistributionSpec<F>, n: usize) -> Result<Vec<F>> {
        (0..n).map(|_| self.draw(spec)).collect()
    }
}

// ---------------------------------------------------------------------------
// JSON representation

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "F: Real")]
struct AbParams<F> {
    a: F,
    b: F,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "F: Real")]
struct NormalParams<F> {
    #[serde(default)]
    mu: F,
    sigma: F,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "F: Real")]
struct RateParams<F> {
    lambda: F,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "F: Real")]
struct GammaParams<F> {
    alpha: F,
    lambda: F,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "F: Real")]
struct LaplaceParams<F> {
    #[serde(default)]
    theta: F,
    lambda: F,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "F: Real")]
struct NakagamiParams<F> {
    m: F,
    omega: F,
}

#[derive(Serialize, Deserialize)]
#[serde(
    tag = "family",
    content = "params",
    rename_all = "lowercase",
    bound = "F: Real"
)]
enum Repr<F> {
    Uniform(AbParams<F>),
    Normal(NormalParams<F>),
    Exponential(RateParams<F>),
    Gamma(GammaParams<F>),
    Beta(AbParams<F>),
    Laplace(LaplaceParams<F>),
    Nakagami(NakagamiParams<F>),
}

impl<F: Real> Serialize for DistributionSpec<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self.family.clone() {
            Family::Uniform { a, b } => Repr::Uniform(AbParams { a, b }),
            Family::Normal { mu, sigma } => Repr::Normal(NormalParams { mu, sigma }),
            Family::Exponential { lambda } => Repr::Exponential(RateParams { lambda }),
            Family::Gamma { alpha, lambda } => Repr::Gamma(GammaParams { alpha, lambda }),
            Family::Beta { a, b } => Repr::Beta(AbParams { a, b }),
            Family::Laplace { theta, lambda } => Repr::Laplace(LaplaceParams { theta, lambda }),
            Family::Nakagami { m, omega } => Repr::Nakagami(NakagamiParams { m, omega }),
            Family::Custom(_) => {
                return Err(serde::ser::Error::custom(
                    "custom densities have no JSON representation",
                ))
            }
        };
        repr.serialize(serializer)
    }
}

impl<'de, F: Real> Deserialize<'de> for DistributionSpec<F> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let family = match Repr::<F>::deserialize(deserializer)? {
            Repr::Uniform(p) => Family::Uniform { a: p.a, b: p.b },
            Repr::Normal(p) => Family::Normal {
                mu: p.mu,
                sigma: p.sigma,
            },
            Repr::Exponential(p) => Family::Exponential { lambda: p.lambda },
            Repr::Gamma(p) => Family::Gamma {
                alpha: p.alpha,
                lambda: p.lambda,
            },
            Repr::Beta(p) => Family::Beta { a: p.a, b: p.b },
            Repr::Laplace(p) => Family::Laplace {
                theta: p.theta,
                lambda: p.lambda,
            },
            Repr::Nakagami(p) => Family::Nakagami {
                m: p.m,
                omega: p.omega,
            },
        };
        DistributionSpec::new(family).map_err(serde::de::Error::custom)
    }
}
