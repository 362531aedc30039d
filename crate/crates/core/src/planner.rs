//! Distribution-free sample-size planning.
//!
//! Sampling `n` points from a density with standard deviation σ, the
//! relative importance of the sample approaches its limit like
//! `γ(n) = e^{−1/(2√(πn) σ)} / l(X)`. Asking for a deviation of at most ε
//! gives `n ≥ 1/(4πσ² ln²(1−ε))`, and at that `n` the Kolmogorov-Smirnov
//! distance obeys `P{Dₙ > d} ≤ β` where
//!
//! ```text
//! β = (19/9) exp(−d² / (2πσ² ln²(1−ε)))
//! ```
//!
//! Any two of `(d, β, ε)` fix the third.

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// `19/9`, the largest β the ternary relation admits.
pub const BETA_MAX: f64 = 19.0 / 9.0;

/// KS threshold used when a plan is requested without one.
pub const DEFAULT_D: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    /// Smallest integer satisfying the inequality.
    #[default]
    Ceil,
    /// Floor, which reproduces the published table exactly.
    PaperFloor,
}

fn check_epsilon<F: Real>(epsilon: F) -> Result<()> {
    if epsilon > F::zero() && epsilon < F::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon.f64(),
            reason: "must lie in (0, 1)",
        })
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

fn check_beta<F: Real>(beta: F) -> Result<()> {
    if beta > F::zero() && beta < F::of(BETA_MAX) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "β = {beta} must lie in (0, 19/9) for ln(19/(9β)) to be positive"
        )))
    }
}

/// Smallest admissible `n` for DMIM deviation ε.
///
/// With `l_of_x` the tighter form `1/(4πσ² ln²(1 − ε·l))` is used; without
/// it `l ≤ 1` is substituted, which is the form the KS guarantee is stated
/// for. Never returns less than 1.
pub fn required_samples<F: Real>(
    epsilon: F,
    sigma: F,
    rounding: Rounding,
    l_of_x: Option<F>,
) -> Result<u64> {
    check_epsilon(epsilon)?;
    check_positive("sigma", sigma)?;
    let shrink = match l_of_x {
        Some(l) => {
            if !(l > F::zero() && l <= F::one()) {
                return Err(Error::InvalidParameter {
                    name: "l_of_x",
                    value: l.f64(),
                    reason: "must lie in (0, 1]",
                });
            }
            epsilon * l
        }
        None => epsilon,
    };
    let ln = (-shrink).ln_1p();
    let x = F::one() / (F::of(4.0) * F::PI() * sigma * sigma * ln * ln);
    let r = match rounding {
        Rounding::Ceil => x.ceil(),
        Rounding::PaperFloor => x.floor(),
    };
    if r.is_nan() || r >= F::of(9.0e18) {
        return Err(Error::Overflow {
            what: "required sample size",
        });
    }
    Ok(r.to_u64().unwrap_or(u64::MAX).max(1))
}

/// `d = √(2πσ² ln(19/(9β))) · ln(1/(1−ε))`.
pub fn d_from<F: Real>(epsilon: F, beta: F, sigma: F) -> Result<F> {
    check_epsilon(epsilon)?;
    check_positive("sigma", sigma)?;
    check_beta(beta)?;
    let ln_b = (F::of(BETA_MAX) / beta).ln();
    Ok((F::TAU() * sigma * sigma * ln_b).sqrt() * -(-epsilon).ln_1p())
}

/// `β = (19/9) e^{−d²/(2πσ² ln²(1−ε))}`.
pub fn beta_from<F: Real>(d: F, epsilon: F, sigma: F) -> Result<F> {
    check_positive("d", d)?;
    check_epsilon(epsilon)?;
    check_positive("sigma", sigma)?;
    let ln = (-epsilon).ln_1p();
    Ok(F::of(BETA_MAX) * (-(d * d) / (F::TAU() * sigma * sigma * ln * ln)).exp())
}

/// `ε = 1 − e^{−d / √(2πσ² ln(19/(9β)))}`.
pub fn epsilon_from<F: Real>(d: F, beta: F, sigma: F) -> Result<F> {
    check_positive("d", d)?;
    check_positive("sigma", sigma)?;
    check_beta(beta)?;
    let ln_b = (F::of(BETA_MAX) / beta).ln();
    Ok(-(-d / (F::TAU() * sigma * sigma * ln_b).sqrt()).exp_m1())
}

/// `2 Σ_{k≥1} (−1)^{k−1} e^{−2nk²d²}`, the asymptotic `P{Dₙ > d}`,
/// clipped to `[0, 1]`.
///
/// Summation runs to at least `k_max` and continues until the next term
/// is below `1e-16`.
pub fn ks_tail_series<F: Real>(n: u64, d: F, k_max: usize) -> Result<F> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "must be ≥ 1",
        });
    }
    check_positive("d", d)?;
    let x = F::of(2.0) * F::of(n as f64) * d * d;
    // Beyond this many terms the sum is at its small-argument limit 1/2.
    let needed = (F::of(37.0) / x)
        .sqrt()
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX);
    if needed > 10_000_000 {
        return Ok(F::one());
    }
    let cut = F::of(1e-16);
    let mut sum = crate::sum::NeumaierSum::new();
    let mut k = 1usize;
    loop {
        let kf = F::of_usize(k);
        let term = (-x * kf * kf).exp();
        sum.add(if k % 2 == 1 { term } else { -term });
        let next = F::of_usize(k + 1);
        if k >= k_max.max(1) && (-x * next * next).exp() < cut {
            break;
        }
        k += 1;
    }
    Ok((F::of(2.0) * sum.value()).max(F::zero()).min(F::one()))
}

/// `2e^{−2nd²} / (1 − e^{−8nd²})`, an upper bound on [`ks_tail_series`]
/// before clipping. Not clipped; exceeds 1 for small `nd²`.
pub fn ks_tail_upper_bound<F: Real>(n: u64, d: F) -> Result<F> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "must be ≥ 1",
        });
    }
    check_positive("d", d)?;
    let x = F::of(2.0) * F::of(n as f64) * d * d;
    Ok(F::of(2.0) * (-x).exp() / -(-F::of(4.0) * x).exp_m1())
}

/// Relative-importance curve `γ(n)` of a density with standard deviation
/// `sigma` and DMIM `l_of_x`.
///
/// The normal approximation behind `γ(n)` carries no error control for
/// small `n`; below [`GammaCurve::SOFT_FLOOR`] samples treat it as
/// indicative only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct GammaCurve<F> {
    pub sigma: F,
    pub l_of_x: F,
}

impl<F: Real> GammaCurve<F> {
    pub const SOFT_FLOOR: u64 = 30;

    pub fn new(sigma: F, l_of_x: F) -> Result<Self> {
        check_positive("sigma", sigma)?;
        if !(l_of_x > F::zero() && l_of_x <= F::one()) {
            return Err(Error::InvalidParameter {
                name: "l_of_x",
                value: l_of_x.f64(),
                reason: "must lie in (0, 1]",
            });
        }
        Ok(Self { sigma, l_of_x })
    }
}

/// `γ(n) = e^{−1/(2√(πn) σ)} / l`.
pub fn gamma_ratio<F: Real>(curve: &GammaCurve<F>, n: u64) -> Result<F> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "must be ≥ 1",
        });
    }
    let root = (F::PI() * F::of(n as f64)).sqrt();
    Ok((-F::one() / (F::of(2.0) * root * curve.sigma)).exp() / curve.l_of_x)
}

/// `γ(∞) = 1 / l`.
pub fn gamma_limit<F: Real>(curve: &GammaCurve<F>) -> F {
    F::one() / curve.l_of_x
}

/// Planner output: sample size and the KS guarantee `P{Dₙ > d} ≤ β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct Plan<F> {
    pub epsilon: F,
    pub sigma: F,
    pub n: u64,
    pub rounding: Rounding,
    pub d: F,
    pub beta: F,
    /// β > 1, so the guarantee says nothing.
    pub vacuous: bool,
}

impl<F: Real> Plan<F> {
    /// Plan for a given KS threshold `d`; β follows from the relation.
    pub fn from_d(epsilon: F, sigma: F, d: F, rounding: Rounding) -> Result<Self> {
        let n = required_samples(epsilon, sigma, rounding, None)?;
        let beta = beta_from(d, epsilon, sigma)?;
        Ok(Self {
            epsilon,
            sigma,
            n,
            rounding,
            d,
            beta,
            vacuous: beta > F::one(),
        })
    }

    /// Plan for a given confidence bound β; `d` follows from the relation.
    pub fn from_beta(epsilon: F, sigma: F, beta: F, rounding: Rounding) -> Result<Self> {
        let n = required_samples(epsilon, sigma, rounding, None)?;
        let d = d_from(epsilon, beta, sigma)?;
        Ok(Self {
            epsilon,
            sigma,
            n,
            rounding,
            d,
            beta,
            vacuous: beta > F::one(),
        })
    }
}
