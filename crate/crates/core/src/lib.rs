//! # dmim
//!
//! Differential message importance measure (DMIM) of continuous densities,
//!
//! ```text
//! l(X) = ∫_S f(x) e^{-f(x)} dx,     0 ≤ l(X) ≤ 1,
//! ```
//!
//! together with the machinery built on it: an alternating power-integral
//! series, Rényi-entropy form, closed forms, truncation bounds, asymptotic
//! approximations for the normal family, and a distribution-free sample-size
//! planner whose Kolmogorov-Smirnov guarantee is checked by Monte Carlo.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`distributions`] | densities, CDFs, variances, seeded sampling |
//! | [`dmim`] | quadrature / series / closed-form / Rényi engines, remainder bounds |
//! | [`normal`] | large-σ approximations `l̃₁`, `l̃₂` and the small-σ truncation `l̂` |
//! | [`planner`] | `γ(n)`, required sample size, `(d, β, ε)` relation, KS tail |
//! | [`simulate`] | ECDF, exact KS statistic, Monte Carlo error probability |
//! | [`reproduce`] | data series for the reference tables and figures |
//!
//! Everything numeric is generic over [`Real`] (`f64` or `f32`). The `*64`
//! aliases below are what most callers want.
//!
//! ```
//! use dmim::{dmim_quadrature, QuadratureConfig, Spec64};
//!
//! let spec = Spec64::uniform(0.0, 1.0).unwrap();
//! let est = dmim_quadrature(&spec, &QuadratureConfig::default()).unwrap();
//! assert!((est.value - (-1.0f64).exp()).abs() < 1e-10);
//! ```

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub mod distributions;
pub mod dmim;
mod error;
pub mod normal;
pub mod planner;
pub mod quadrature;
pub mod reproduce;
pub mod rng;
pub mod simulate;
pub mod special;
pub mod sum;

pub use crate::distributions::{CustomDensity, DistributionSpec, Family, Interval};
pub use crate::dmim::{
    dmim_auto, dmim_closed_form, dmim_quadrature, dmim_series, dmim_via_renyi, power_integral,
    quantized_mim_gap, remainder_bound, renyi_entropy, DmimEstimate, Method, QuadratureConfig,
    SeriesConfig,
};
pub use crate::error::{Error, Result};
pub use crate::normal::{l_hat, l_tilde1, l_tilde2, ApproxKind, NormalApprox};
pub use crate::planner::{
    beta_from, d_from, epsilon_from, gamma_limit, gamma_ratio, ks_tail_series, ks_tail_upper_bound,
    required_samples, GammaCurve, Plan, Rounding,
};
pub use crate::simulate::{
    ecdf, fit_curve, ks_statistic, mc_error_probability, reproduce_table2, Ecdf, FitSeries,
    KsResult, McConfig, McReport, Table2Family, Table2Row,
};

/// Scalar type the library computes in.
///
/// Blanket-implemented for every type with the listed bounds, which in
/// practice means `f32` and `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` constant into this type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Converts a count into this type.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Lossy view as `f64`, used for error payloads and reporting.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + Serialize
        + DeserializeOwned
        + 'static
{
}

pub type Spec64 = DistributionSpec<f64>;
pub type Spec32 = DistributionSpec<f32>;
pub type Interval64 = Interval<f64>;
pub type Estimate64 = DmimEstimate<f64>;
pub type Estimate32 = DmimEstimate<f32>;
pub type NormalApprox64 = NormalApprox<f64>;
pub type Plan64 = Plan<f64>;
pub type KsResult64 = KsResult<f64>;
pub type McReport64 = McReport<f64>;
