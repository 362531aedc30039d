mod dist;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use dmim::planner::BETA_MAX;
use dmim::reproduce::{
    error_probability_curve, log_grid, normal_curve, truncation_curve, variance_curve,
};
use dmim::simulate::{DEFAULT_SEED, TABLE2_EPSILONS, TABLE2_SIGMAS};
use dmim::{
    beta_from, d_from, dmim_auto, dmim_closed_form, dmim_quadrature, dmim_series, dmim_via_renyi,
    epsilon_from, fit_curve, l_tilde1, l_tilde2, mc_error_probability, reproduce_table2,
    required_samples, Family, McConfig, Plan, QuadratureConfig, Rounding, SeriesConfig, Spec64,
    Table2Family,
};

use crate::dist::parse_dist;
use crate::output::{emit_csv, emit_json, write_csv};

#[derive(Parser)]
#[command(
    name = "dmim",
    version,
    about = "Differential message importance measure and KS sample-size planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate l(X) = ∫ f e^{−f} for one distribution.
    Compute(ComputeArgs),
    /// Sample size for a DMIM deviation ε, with the KS threshold or bound.
    Plan(PlanArgs),
    /// Solve the (d, β, ε) relation for the missing member.
    Relate(RelateArgs),
    /// Monte Carlo estimate of P{Dₙ > d}.
    Mc(McArgs),
    /// Regenerate the sample-size/error-probability table.
    Table2(Table2Args),
    /// ECDF against CDF at the planned sample sizes, one CSV per ε.
    Fit(FitArgs),
    /// Data series for the reference figures.
    Figure(FigureArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Engine {
    Auto,
    Quadrature,
    Series,
    Closed,
    Renyi,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RoundingArg {
    Ceil,
    PaperFloor,
}

impl From<RoundingArg> for Rounding {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::Ceil => Rounding::Ceil,
            RoundingArg::PaperFloor => Rounding::PaperFloor,
        }
    }
}

/// Replication budget: `desk` for quick runs, `paper` for full scale.
#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Profile {
    Desk,
    Paper,
}

impl Profile {
    fn reps(self) -> usize {
        match self {
            Profile::Desk => 1_000,
            Profile::Paper => 10_000,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Serialize)]
struct ComputeArgs {
    /// JSON spec or shorthand such as `normal sigma=1`.
    #[arg(long, num_args = 1.., required = true)]
    dist: Vec<String>,
    #[arg(long, value_enum, default_value_t = Engine::Auto)]
    engine: Engine,
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    tail_mass: f64,
    #[arg(long, default_value_t = 5000)]
    max_subdivisions: usize,
    #[arg(long, default_value_t = 200)]
    max_terms: usize,
    #[arg(long, default_value_t = 1e-14)]
    rel_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct PlanArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long, required_unless_present = "dist", conflicts_with = "dist")]
    sigma: Option<f64>,
    /// Take σ from the variance of this distribution.
    #[arg(long, num_args = 1..)]
    dist: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = RoundingArg::Ceil)]
    rounding: RoundingArg,
    #[arg(long, conflicts_with = "d")]
    beta: Option<f64>,
    /// KS threshold; 0.01 when neither this nor --beta is given.
    #[arg(long)]
    d: Option<f64>,
    /// Known l(X); also reports the n required without the l(X) ≤ 1 relaxation.
    #[arg(long)]
    l_of_x: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct RelateArgs {
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct McArgs {
    #[arg(long, num_args = 1.., required = true)]
    dist: Vec<String>,
    #[arg(long, required_unless_present = "epsilon", conflicts_with = "epsilon")]
    n: Option<u64>,
    /// Plan n from ε with σ taken from the distribution's variance.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = RoundingArg::Ceil)]
    rounding: RoundingArg,
    #[arg(long, default_value_t = 0.01)]
    d: f64,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    #[arg(long, env = "DMIM_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct Table2Args {
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    #[arg(long, env = "DMIM_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "normal,exponential,uniform,laplace"
    )]
    families: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = TABLE2_EPSILONS)]
    epsilons: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = TABLE2_SIGMAS)]
    sigmas: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct FitArgs {
    #[arg(long, num_args = 1.., default_value = "nakagami m=2 omega=10")]
    dist: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.01, 0.001])]
    epsilons: Vec<f64>,
    #[arg(long, env = "DMIM_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Directory for the per-ε CSV files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Summary JSON destination; stdout by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FigureKind {
    /// l(X) against σ with both large-σ approximations.
    NormalCurve,
    /// Truncation error of the normal power series against the term count.
    Truncation,
    /// l(X) against variance for several families.
    Variance,
    /// Monte Carlo P{Dₙ > d} against ε.
    ErrorProbability,
}

#[derive(Args, Serialize)]
struct FigureArgs {
    #[arg(value_enum)]
    kind: FigureKind,
    /// Overrides the default σ grid of the chosen figure.
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 120)]
    max_terms: usize,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    #[arg(long, env = "DMIM_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        bail!("--epsilon must lie in (0, 1), got {epsilon}");
    }
    Ok(())
}

fn sigma_of(spec: &Spec64) -> Result<f64> {
    Ok(spec.variance()?.sqrt())
}

fn compute(args: &ComputeArgs) -> Result<()> {
    let spec = parse_dist(&args.dist)?;
    let qcfg = QuadratureConfig {
        abs_tol: args.abs_tol,
        tail_mass: args.tail_mass,
        max_subdivisions: args.max_subdivisions,
    };
    let scfg = SeriesConfig {
        max_terms: args.max_terms,
        rel_tol: args.rel_tol,
    };
    let est = match args.engine {
        Engine::Auto => dmim_auto(&spec, &qcfg, &scfg),
        Engine::Quadrature => dmim_quadrature(&spec, &qcfg),
        Engine::Series => dmim_series(&spec, &scfg),
        Engine::Closed => dmim_closed_form(&spec),
        Engine::Renyi => dmim_via_renyi(&spec, &scfg),
    };
    let est = match est {
        Ok(e) => e,
        Err(e) => {
            if e.is_numerical() && !matches!(args.engine, Engine::Quadrature) {
                eprintln!("hint: --engine quadrature evaluates the integral directly");
            }
            return Err(e.into());
        }
    };
    let mut results = serde_json::to_value(&est)?;
    results["engine"] = json!(est.method.as_str());
    if let (Engine::Auto, Family::Normal { sigma, .. }) = (args.engine, spec.family()) {
        if *sigma > 0.2 {
            results["approximations"] = json!({
                "tilde1": l_tilde1(*sigma)?,
                "tilde2": l_tilde2(*sigma)?,
            });
        }
    }
    emit_json("compute", args, results, args.out.as_deref())
}

fn plan(args: &PlanArgs) -> Result<()> {
    check_epsilon(args.epsilon)?;
    let sigma = match (&args.dist, args.sigma) {
        (Some(tokens), _) => sigma_of(&parse_dist(tokens)?)?,
        (None, Some(s)) => s,
        (None, None) => bail!("one of --sigma or --dist is required"),
    };
    if let Some(beta) = args.beta {
        if !(beta > 0.0 && beta < BETA_MAX) {
            bail!("--beta must lie in (0, 19/9), got {beta}");
        }
    }
    let rounding = Rounding::from(args.rounding);
    let plan = match (args.beta, args.d) {
        (Some(beta), _) => Plan::from_beta(args.epsilon, sigma, beta, rounding)?,
        (None, d) => Plan::from_d(
            args.epsilon,
            sigma,
            d.unwrap_or(dmim::planner::DEFAULT_D),
            rounding,
        )?,
    };
    let mut results = serde_json::to_value(plan)?;
    if let Some(l) = args.l_of_x {
        results["n_with_l_of_x"] = json!(required_samples(args.epsilon, sigma, rounding, Some(l))?);
    }
    emit_json("plan", args, results, args.out.as_deref())
}

fn relate(args: &RelateArgs) -> Result<()> {
    let s = args.sigma;
    let (epsilon, beta, d) = match (args.epsilon, args.beta, args.d) {
        (Some(e), Some(b), None) => (e, b, d_from(e, b, s)?),
        (Some(e), None, Some(d)) => (e, beta_from(d, e, s)?, d),
        (None, Some(b), Some(d)) => (epsilon_from(d, b, s)?, b, d),
        _ => bail!("give exactly two of --epsilon, --beta, --d"),
    };
    let results = json!({
        "sigma": s,
        "epsilon": epsilon,
        "beta": beta,
        "d": d,
        "vacuous": beta > 1.0,
    });
    emit_json("relate", args, results, args.out.as_deref())
}

fn mc(args: &McArgs) -> Result<()> {
    let spec = parse_dist(&args.dist)?;
    let n = match (args.n, args.epsilon) {
        (Some(n), _) => n,
        (None, Some(e)) => {
            check_epsilon(e)?;
            required_samples(e, sigma_of(&spec)?, args.rounding.into(), None)?
        }
        (None, None) => bail!("one of --n or --epsilon is required"),
    };
    let cfg = McConfig {
        reps: args.reps.unwrap_or(args.profile.reps()),
        seed: args.seed,
        workers: args.workers,
    };
    let report = mc_error_probability(&spec, n, args.d, &cfg)?;
    emit_json("mc", args, report, args.out.as_deref())
}

fn table2(args: &Table2Args) -> Result<()> {
    let families = args
        .families
        .iter()
        .map(|f| f.trim().parse::<Table2Family>())
        .collect::<dmim::Result<Vec<_>>>()?;
    if families.is_empty() || args.epsilons.is_empty() || args.sigmas.is_empty() {
        bail!("families, epsilons and sigmas must be non-empty");
    }
    let cfg = McConfig {
        reps: args.reps.unwrap_or(args.profile.reps()),
        seed: args.seed,
        workers: args.workers,
    };
    let rows = reproduce_table2(&families, &args.epsilons, &args.sigmas, &cfg)?;
    match args.format {
        Format::Csv => emit_csv(&rows, args.out.as_deref()),
        Format::Json => emit_json("table2", args, &rows, args.out.as_deref()),
    }
}

fn fit(args: &FitArgs) -> Result<()> {
    if args.epsilons.is_empty() {
        bail!("--epsilons needs at least one value");
    }
    for &e in &args.epsilons {
        check_epsilon(e)?;
    }
    let spec = parse_dist(&args.dist)?;
    let series = fit_curve(&spec, &args.epsilons, args.seed)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;

    #[derive(Serialize)]
    struct Point {
        x: f64,
        ecdf: f64,
        cdf: f64,
        abs_gap: f64,
    }
    let mut summary = Vec::new();
    for s in &series {
        let path = args.out_dir.join(format!("fit_eps_{}.csv", s.epsilon));
        let points: Vec<Point> = (0..s.x.len())
            .map(|i| Point {
                x: s.x[i],
                ecdf: s.ecdf[i],
                cdf: s.cdf[i],
                abs_gap: s.abs_gap[i],
            })
            .collect();
        let file = std::fs::File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        write_csv(&points, file)?;
        summary.push(json!({
            "epsilon": s.epsilon,
            "n": s.n,
            "ks": s.ks,
            "max_gap": s.max_gap(),
            "path": path.display().to_string(),
        }));
    }
    emit_json("fit", args, summary, args.out.as_deref())
}

fn figure(args: &FigureArgs) -> Result<()> {
    let sigmas = |default: &[f64]| args.sigmas.clone().unwrap_or_else(|| default.to_vec());
    let rows: Value = match args.kind {
        FigureKind::NormalCurve => {
            serde_json::to_value(normal_curve(&sigmas(&log_grid(0.01, 100.0, 81)))?)?
        }
        FigureKind::Truncation => serde_json::to_value(truncation_curve(
            &sigmas(&[0.02, 0.03, 0.05]),
            args.max_terms,
        )?)?,
        FigureKind::Variance => serde_json::to_value(variance_curve(
            &log_grid(0.01, 100.0, 41),
            &[0.5, 1.5, 3.0],
        )?)?,
        FigureKind::ErrorProbability => {
            let cfg = McConfig {
                reps: args.reps.unwrap_or(args.profile.reps()),
                seed: args.seed,
                workers: 0,
            };
            let eps = log_grid(1e-3, 1e-1, 12);
            serde_json::to_value(error_probability_curve(
                &sigmas(&[1.0, 2.0]),
                &[0.01],
                &eps,
                &cfg,
            )?)?
        }
    };
    match args.format {
        Format::Csv => {
            let Value::Array(rows) = rows else {
                unreachable!("figure rows are a list")
            };
            emit_csv(&rows, args.out.as_deref())
        }
        Format::Json => emit_json("figure", args, rows, args.out.as_deref()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Plan(a) => plan(a),
        Command::Relate(a) => relate(a),
        Command::Mc(a) => mc(a),
        Command::Table2(a) => table2(a),
        Command::Fit(a) => fit(a),
        Command::Figure(a) => figure(a),
    }
}

/// 3 for numerical failures of the library, 2 for everything the caller
/// can fix by changing the input.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err.chain().any(|c| {
        c.downcast_ref::<dmim::Error>()
            .is_some_and(dmim::Error::is_numerical)
    });
    if numerical {
        3
    } else {
        2
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<serde_json::Error>()
                .and_then(|j| j.io_error_kind())
                .is_some_and(|k| k == std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // downstream closed early (`| head`); nothing left to report
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
