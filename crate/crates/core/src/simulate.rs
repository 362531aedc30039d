//! Empirical CDFs, the exact Kolmogorov-Smirnov statistic and Monte Carlo
//! estimation of `P{Dₙ > d}`.
//!
//! Replication `r` of a Monte Carlo run draws from stream `(seed, r)`, so
//! the result does not depend on the number of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Sampler};
use crate::planner::{beta_from, required_samples, Rounding, DEFAULT_D};
use crate::rng::derive_seed;
use crate::{Error, Real, Result};

pub const DEFAULT_SEED: u64 = 20_180_806;

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf<F> {
    sorted: Vec<F>,
}

impl<F: Real> Ecdf<F> {
    pub fn new(samples: &[F]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("ECDF needs at least one sample"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::NanInput);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { sorted })
    }

    /// Fraction of samples `≤ x`.
    pub fn eval(&self, x: F) -> F {
        let k = self.sorted.partition_point(|v| *v <= x);
        F::of_usize(k) / F::of_usize(self.sorted.len())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[F] {
        &self.sorted
    }
}

pub fn ecdf<F: Real>(samples: &[F]) -> Result<Ecdf<F>> {
    Ecdf::new(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct KsResult<F> {
    pub d_n: F,
    /// Order statistic at which the supremum is attained.
    pub at_x: F,
    pub n: usize,
}

/// `Dₙ` over already sorted samples.
fn ks_sorted<F: Real>(sorted: &[F], spec: &DistributionSpec<F>) -> Result<KsResult<F>> {
    let n = F::of_usize(sorted.len());
    let mut best = KsResult {
        d_n: F::zero(),
        at_x: sorted[0],
        n: sorted.len(),
    };
    for (i, &x) in sorted.iter().enumerate() {
        let f = spec.cdf(x)?;
        let above = F::of_usize(i + 1) / n - f;
        let below = f - F::of_usize(i) / n;
        let gap = above.max(below);
        if gap > best.d_n {
            best.d_n = gap;
            best.at_x = x;
        }
    }
    best.d_n = best.d_n.min(F::one());
    Ok(best)
}

/// Exact `Dₙ = sup_x |F̂ₙ(x) − F(x)|` from the order statistics:
/// `max_i max(i/n − F(x₍ᵢ₎), F(x₍ᵢ₎) − (i−1)/n)`.
pub fn ks_statistic<F: Real>(samples: &[F], spec: &DistributionSpec<F>) -> Result<KsResult<F>> {
    let e = Ecdf::new(samples)?;
    ks_sorted(&e.sorted, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub reps: usize,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            reps: 10_000,
            seed: DEFAULT_SEED,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct McReport<F> {
    pub p_hat: F,
    pub reps: usize,
    /// `1.96 √(p̂(1−p̂)/reps)`.
    pub ci95_halfwidth: F,
    pub d: F,
    pub n: u64,
    pub seed: u64,
}

fn run_on_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Fraction of `cfg.reps` samples of size `n` whose KS distance exceeds `d`.
pub fn mc_error_probability<F: Real>(
    spec: &DistributionSpec<F>,
    n: u64,
    d: F,
    cfg: &McConfig,
) -> Result<McReport<F>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "must be ≥ 1",
        });
    }
    if cfg.reps == 0 {
        return Err(Error::InvalidParameter {
            name: "reps",
            value: 0.0,
            reason: "must be ≥ 1",
        });
    }
    if d.is_nan() || d <= F::zero() {
        return Err(Error::InvalidParameter {
            name: "d",
            value: d.f64(),
            reason: "must be > 0",
        });
    }
    let size = usize::try_from(n).map_err(|_| Error::Overflow {
        what: "sample size",
    })?;
    let exceed: Vec<bool> = run_on_pool(cfg.workers, || {
        (0..cfg.reps)
            .into_par_iter()
            .map_init(
                || Vec::with_capacity(size),
                |buf, r| -> Result<bool> {
                    let mut sampler = Sampler::new(cfg.seed, r as u64);
                    buf.clear();
                    for _ in 0..size {
                        buf.push(sampler.draw(spec)?);
                    }
                    buf.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                    Ok(ks_sorted(buf, spec)?.d_n > d)
                },
            )
            .collect::<Result<Vec<bool>>>()
    })??;
    let hits = exceed.iter().filter(|e| **e).count();
    let reps = F::of_usize(cfg.reps);
    let p = F::of_usize(hits) / reps;
    Ok(McReport {
        p_hat: p,
        reps: cfg.reps,
        ci95_halfwidth: F::of(1.96) * (p * (F::one() - p) / reps).sqrt(),
        d,
        n,
        seed: cfg.seed,
    })
}

/// Families compared in the distribution-free table, each parametrized by
/// its standard deviation σ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Table2Family {
    Normal,
    Exponential,
    Uniform,
    Laplace,
}

impl Table2Family {
    pub const ALL: [Table2Family; 4] = [
        Table2Family::Normal,
        Table2Family::Exponential,
        Table2Family::Uniform,
        Table2Family::Laplace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table2Family::Normal => "normal",
            Table2Family::Exponential => "exponential",
            Table2Family::Uniform => "uniform",
            Table2Family::Laplace => "laplace",
        }
    }

    /// Member with standard deviation `sigma`: N(0, σ²), rate 1/σ, width
    /// 2√3σ, Laplace rate √2/σ.
    pub fn spec<F: Real>(self, sigma: F) -> Result<DistributionSpec<F>> {
        match self {
            Table2Family::Normal => DistributionSpec::normal(F::zero(), sigma),
            Table2Family::Exponential => DistributionSpec::exponential(F::one() / sigma),
            Table2Family::Uniform => {
                let w = F::of(3.0).sqrt() * sigma;
                DistributionSpec::uniform(-w, w)
            }
            Table2Family::Laplace => DistributionSpec::laplace(F::zero(), F::SQRT_2() / sigma),
        }
    }
}

impl std::str::FromStr for Table2Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Table2Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown table family {s:?}")))
    }
}

pub const TABLE2_EPSILONS: [f64; 4] = [0.01, 0.003, 0.002, 0.001];
pub const TABLE2_SIGMAS: [f64; 2] = [1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct Table2Row<F> {
    pub family: Table2Family,
    pub epsilon: F,
    pub sigma: F,
    pub n: u64,
    pub beta: F,
    pub p_hat: F,
    pub ci95: F,
}

/// Seed of one table cell; independent of which other cells are run.
pub fn cell_seed(seed: u64, family: Table2Family, epsilon: f64, sigma: f64) -> u64 {
    let s = derive_seed(seed, family as u64 + 1);
    let s = derive_seed(s, epsilon.to_bits());
    derive_seed(s, sigma.to_bits())
}

/// One row per (family, ε, σ): `n` with floor rounding, β at `d = 0.01`,
/// and the Monte Carlo estimate of `P{Dₙ > 0.01}`.
pub fn reproduce_table2<F: Real>(
    families: &[Table2Family],
    epsilons: &[F],
    sigmas: &[F],
    cfg: &McConfig,
) -> Result<Vec<Table2Row<F>>> {
    let d = F::of(DEFAULT_D);
    let mut rows = Vec::new();
    for &sigma in sigmas {
        for &epsilon in epsilons {
            let n = required_samples(epsilon, sigma, Rounding::PaperFloor, None)?;
            let beta = beta_from(d, epsilon, sigma)?;
            for &family in families {
                let spec = family.spec(sigma)?;
                let cell = McConfig {
                    seed: cell_seed(cfg.seed, family, epsilon.f64(), sigma.f64()),
                    ..*cfg
                };
                let mc = mc_error_probability(&spec, n, d, &cell)?;
                rows.push(Table2Row {
                    family,
                    epsilon,
                    sigma,
                    n,
                    beta,
                    p_hat: mc.p_hat,
                    ci95: mc.ci95_halfwidth,
                });
            }
        }
    }
    Ok(rows)
}

/// ECDF against CDF on a 512-point grid for one DMIM deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct FitSeries<F> {
    pub epsilon: F,
    pub n: u64,
    pub x: Vec<F>,
    pub ecdf: Vec<F>,
    pub cdf: Vec<F>,
    pub abs_gap: Vec<F>,
    /// Exact KS distance of the drawn sample.
    pub ks: F,
}

impl<F: Real> FitSeries<F> {
    pub fn max_gap(&self) -> F {
        self.abs_gap.iter().copied().fold(F::zero(), F::max)
    }
}

pub const FIT_GRID: usize = 512;

/// For each ε, draws `n = required_samples(ε, σ)` points (ceil rounding, σ
/// from the variance) and tabulates ECDF and CDF on an even grid spanning
/// the sample.
pub fn fit_curve<F: Real>(
    spec: &DistributionSpec<F>,
    epsilons: &[F],
    seed: u64,
) -> Result<Vec<FitSeries<F>>> {
    if epsilons.is_empty() {
        return Err(Error::EmptyInput("at least one ε is required"));
    }
    let sigma = spec.variance()?.sqrt();
    epsilons
        .iter()
        .map(|&epsilon| {
            let n = required_samples(epsilon, sigma, Rounding::Ceil, None)?;
            let size = usize::try_from(n).map_err(|_| Error::Overflow {
                what: "sample size",
            })?;
            let samples = spec.sample(derive_seed(seed, epsilon.f64().to_bits()), size)?;
            let e = Ecdf::new(&samples)?;
            let ks = ks_sorted(e.sorted(), spec)?.d_n;
            let (lo, hi) = (e.sorted()[0], e.sorted()[size - 1]);
            let step = (hi - lo) / F::of_usize(FIT_GRID - 1);
            let x: Vec<F> = (0..FIT_GRID)
                .map(|i| {
                    if i == FIT_GRID - 1 {
                        hi
                    } else {
                        lo + step * F::of_usize(i)
                    }
                })
                .collect();
            let ecdf: Vec<F> = x.iter().map(|&v| e.eval(v)).collect();
            let cdf = x.iter().map(|&v| spec.cdf(v)).collect::<Result<Vec<F>>>()?;
            let abs_gap = ecdf
                .iter()
                .zip(&cdf)
                .map(|(a, b)| (*a - *b).abs())
                .collect();
            Ok(FitSeries {
                epsilon,
                n,
                x,
                ecdf,
                cdf,
                abs_gap,
                ks,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type S = DistributionSpec<f64>;

    #[test]
    fn ecdf_examples() {
        let e = ecdf(&[1.0, 2.0, 3.0]).unwrap();
        assert_abs_diff_eq!(e.eval(2.0), 2.0 / 3.0);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(3.0), 1.0);
        let t = ecdf(&[1.0, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(t.eval(1.0), 2.0 / 3.0);
        assert!(matches!(ecdf::<f64>(&[]), Err(Error::EmptyInput(_))));
        assert!(matches!(ecdf(&[1.0, f64::NAN]), Err(Error::NanInput)));
    }

    #[test]
    fn ks_examples() {
        let spec = S::normal(0.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..10)
            .map(|i| spec.quantile((i as f64 + 0.5) / 10.0).unwrap())
            .collect();
        assert_abs_diff_eq!(
            ks_statistic(&grid, &spec).unwrap().d_n,
            0.05,
            epsilon = 1e-12
        );
        let one = ks_statistic(&[0.0], &spec).unwrap();
        assert_eq!(one.d_n, 0.5);
        assert_eq!(one.at_x, 0.0);
    }

    #[test]
    fn ks_at_large_n_below_one_percent_quantile() {
        let spec = S::normal(0.0, 1.0).unwrap();
        let mut below = 0;
        for seed in 0..100 {
            let xs = spec.sample(seed, 10_000).unwrap();
            if ks_statistic(&xs, &spec).unwrap().d_n < 0.0328 {
                below += 1;
            }
        }
        assert!(below >= 95, "{below}/100");
    }

    #[test]
    fn mc_trivial_threshold_and_worker_independence() {
        let spec = S::exponential(1.0).unwrap();
        let cfg = McConfig {
            reps: 200,
            seed: 9,
            workers: 1,
        };
        let r = mc_error_probability(&spec, 50, 1.0, &cfg).unwrap();
        assert_eq!(r.p_hat, 0.0);
        assert_eq!(r.ci95_halfwidth, 0.0);
        let a = mc_error_probability(&spec, 100, 0.1, &cfg).unwrap();
        let b = mc_error_probability(&spec, 100, 0.1, &McConfig { workers: 4, ..cfg }).unwrap();
        assert_eq!(a, b);
        assert!(a.p_hat > 0.0 && a.p_hat < 1.0);
    }

    #[test]
    fn table_family_parametrization_has_requested_sigma() {
        for fam in Table2Family::ALL {
            for s in [0.5, 1.0, 2.0] {
                let v = fam.spec(s).unwrap().variance().unwrap();
                assert_abs_diff_eq!(v, s * s, epsilon = 1e-12);
            }
            assert_eq!(fam.name().parse::<Table2Family>().unwrap(), fam);
        }
    }

    #[test]
    fn table_rows_deterministic_columns() {
        let cfg = McConfig {
            reps: 4,
            seed: 1,
            workers: 1,
        };
        let rows =
            reproduce_table2(&[Table2Family::Uniform], &[0.01f64], &[1.0, 2.0], &cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 787);
        assert_eq!(rows[1].n, 196);
        assert_abs_diff_eq!(rows[0].beta, 1.8034, epsilon = 5e-5);
    }

    #[test]
    fn fit_series_shape() {
        let spec = S::uniform(0.0, 1.0).unwrap();
        let fits = fit_curve(&spec, &[0.01], 5).unwrap();
        let f = &fits[0];
        assert_eq!(f.x.len(), FIT_GRID);
        assert!(f.max_gap() <= f.ks + 1.0 / FIT_GRID as f64);
        assert!(fit_curve(&spec, &[], 5).is_err());
    }
}
