//! Data series behind the reference figures, in `f64`.
//!
//! Each function returns plain rows; formatting is left to the caller.

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::dmim::{dmim_closed_form, dmim_quadrature, series_partial_sum, QuadratureConfig};
use crate::normal::{hat_terms, l_tilde1, l_tilde2};
use crate::planner::{beta_from, required_samples, Rounding};
use crate::simulate::{cell_seed, mc_error_probability, McConfig, Table2Family};
use crate::{Result, Spec64};

/// `n` points spaced evenly in `log10` between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

fn normal_l(sigma: f64) -> Result<f64> {
    Ok(dmim_quadrature(&Spec64::normal(0.0, sigma)?, &QuadratureConfig::default())?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalCurveRow {
    pub sigma: f64,
    pub l: f64,
    pub l_tilde1: f64,
    pub l_tilde2: f64,
    pub abs_err_tilde1: f64,
    pub abs_err_tilde2: f64,
    pub rel_err_tilde1: f64,
    pub rel_err_tilde2: f64,
}

/// Normal DMIM against σ with both large-σ approximations and their errors.
pub fn normal_curve(sigmas: &[f64]) -> Result<Vec<NormalCurveRow>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let l = normal_l(sigma)?;
            let t1 = l_tilde1(sigma)?.value;
            let t2 = l_tilde2(sigma)?.value;
            Ok(NormalCurveRow {
                sigma,
                l,
                l_tilde1: t1,
                l_tilde2: t2,
                abs_err_tilde1: (l - t1).abs(),
                abs_err_tilde2: (l - t2).abs(),
                rel_err_tilde1: (l - t1).abs() / l,
                rel_err_tilde2: (l - t2).abs() / l,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationRow {
    pub sigma: f64,
    pub terms: usize,
    pub n0: usize,
    pub abs_error: f64,
}

/// `|l − (1 + Σ_{n≤N} tₙ)|` for `N = 0..=max_terms`.
pub fn truncation_curve(sigmas: &[f64], max_terms: usize) -> Result<Vec<TruncationRow>> {
    let mut rows = Vec::new();
    for &sigma in sigmas {
        let spec = Spec64::normal(0.0, sigma)?;
        let l = normal_l(sigma)?;
        let n0 = hat_terms(sigma)?;
        for terms in 0..=max_terms {
            let partial = series_partial_sum(&spec, terms + 1)?;
            rows.push(TruncationRow {
                sigma,
                terms,
                n0,
                abs_error: (l - partial).abs(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    pub family: String,
    pub variance: f64,
    pub l: f64,
}

/// DMIM against variance for uniform, normal, exponential, Laplace and
/// gamma with shapes `gamma_shapes`.
pub fn variance_curve(variances: &[f64], gamma_shapes: &[f64]) -> Result<Vec<VarianceRow>> {
    let cfg = QuadratureConfig::default();
    let mut rows = Vec::new();
    for &v in variances {
        let sigma = v.sqrt();
        for fam in Table2Family::ALL {
            let spec = fam.spec(sigma)?;
            let l = match dmim_closed_form(&spec) {
                Ok(e) => e.value,
                Err(_) => dmim_quadrature(&spec, &cfg)?.value,
            };
            rows.push(VarianceRow {
                family: fam.name().to_string(),
                variance: v,
                l,
            });
        }
        for &alpha in gamma_shapes {
            let spec = DistributionSpec::gamma(alpha, (alpha / v).sqrt())?;
            rows.push(VarianceRow {
                family: format!("gamma(alpha={alpha})"),
                variance: v,
                l: dmim_quadrature(&spec, &cfg)?.value,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorProbabilityRow {
    pub sigma: f64,
    pub d: f64,
    pub epsilon: f64,
    pub n: u64,
    pub beta: f64,
    pub p_hat: f64,
    pub ci95: f64,
}

/// Monte Carlo `P{Dₙ > d}` for normal samples against ε, with `n` from
/// floor rounding.
pub fn error_probability_curve(
    sigmas: &[f64],
    ds: &[f64],
    epsilons: &[f64],
    cfg: &McConfig,
) -> Result<Vec<ErrorProbabilityRow>> {
    let mut rows = Vec::new();
    for &sigma in sigmas {
        let spec = Spec64::normal(0.0, sigma)?;
        for &d in ds {
            for &epsilon in epsilons {
                let n = required_samples(epsilon, sigma, Rounding::PaperFloor, None)?;
                let seed = cell_seed(cfg.seed ^ d.to_bits(), Table2Family::Normal, epsilon, sigma);
                let mc = mc_error_probability(&spec, n, d, &McConfig { seed, ..*cfg })?;
                rows.push(ErrorProbabilityRow {
                    sigma,
                    d,
                    epsilon,
                    n,
                    beta: beta_from(d, epsilon, sigma)?,
                    p_hat: mc.p_hat,
                    ci95: mc.ci95_halfwidth,
                });
            }
        }
    }
    Ok(rows)
}
