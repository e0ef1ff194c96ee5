//! `minkmix`: closed-form statistical Minkowski distances between mixture
//! models, with numerical-oracle validation.
//!
//! Exit codes: 0 success, 1 validation failure, 2 spec/usage errors,
//! 3 unsupported exponent without `--oracle`, 4 budget or cancellation
//! errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use minkmix::combinatorics::composition_count_u64;
use minkmix::expfam::{FamilyDescriptor, FamilyKind, SourceParameter};
use minkmix::minkdist::{closed_form_distance, minkowski_diversity, mixture_lp_norm};
use minkmix::oracle::{oracle_distances, OracleConfig, OracleMethod};
use minkmix::specfile::MixtureSpec;
use minkmix::{DistanceKind, EngineOptions, Error, MixtureModel};

use nalgebra::{DMatrix, DVector};

#[derive(Parser)]
#[command(
    name = "minkmix",
    version,
    about = "Statistical Minkowski distances M/D/L, Cauchy-Schwarz divergence and diversity \
             indices for mixtures of conic exponential families, in closed form and against \
             numerical oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    M,
    D,
    L,
    #[value(name = "CS", alias = "cs")]
    Cs,
    #[value(name = "TV", alias = "tv")]
    Tv,
}

impl Metric {
    fn kind(self, alpha: Option<u32>) -> Result<DistanceKind, Error> {
        match self {
            Metric::M => Ok(DistanceKind::Minkowski(alpha.unwrap_or(2))),
            Metric::D => Ok(DistanceKind::Difference(alpha.unwrap_or(2))),
            Metric::L => Ok(DistanceKind::LogRatio(alpha.unwrap_or(2))),
            Metric::Cs => match alpha {
                None | Some(2) => Ok(DistanceKind::CauchySchwarz),
                Some(a) => Err(Error::Spec(format!("CS fixes alpha = 2, got {a}"))),
            },
            Metric::Tv => match alpha {
                None | Some(1) => Ok(DistanceKind::TotalVariation),
                Some(a) => Err(Error::Spec(format!("TV fixes alpha = 1, got {a}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleChoice {
    Exact,
    Quad,
    Mc,
}

impl OracleChoice {
    fn method(self) -> OracleMethod {
        match self {
            OracleChoice::Exact => OracleMethod::ExactEnum,
            OracleChoice::Quad => OracleMethod::Quadrature,
            OracleChoice::Mc => OracleMethod::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Bernoulli,
    Multinoulli,
    Laplacian,
    Gaussian,
    Wishart,
}

#[derive(Debug, Args)]
struct CommonFlags {
    /// Cap on enumerated multinomial-expansion terms per integral.
    #[arg(long, default_value_t = 100_000_000)]
    term_cap: u64,
    /// Worker threads over contiguous composition ranges.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Seed for every stochastic step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Quadrature relative tolerance (also the validation tolerance for
    /// deterministic oracles when set).
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

impl CommonFlags {
    fn engine(&self) -> EngineOptions {
        EngineOptions { term_cap: self.term_cap, workers: self.workers, merge_products: false }
    }

    fn oracle(&self, method: OracleMethod) -> OracleConfig {
        let mut cfg = match method {
            OracleMethod::ExactEnum => OracleConfig::exact(),
            OracleMethod::Quadrature => OracleConfig::quadrature(),
            OracleMethod::MonteCarlo => OracleConfig::monte_carlo(self.samples, self.seed),
        };
        cfg.seed = self.seed;
        cfg.samples = self.samples;
        if let Some(rt) = self.rel_tol {
            cfg.rel_tol = rt;
        }
        cfg
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between the mixtures in two spec files.
    Dist {
        #[arg(long, value_enum)]
        metric: Metric,
        #[arg(long)]
        alpha: Option<u32>,
        /// Route through a numerical oracle instead of the closed form.
        #[arg(long, value_enum)]
        oracle: Option<OracleChoice>,
        spec_a: PathBuf,
        spec_b: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// L_alpha norm of the mixture in a spec file.
    Norm {
        #[arg(long, default_value_t = 2)]
        alpha: u32,
        spec: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Minkowski diversity index of a spec file's weighted components.
    Diversity {
        #[arg(long, default_value_t = 2)]
        alpha: u32,
        spec: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Closed form vs oracle, one PASS/FAIL row per metric and exponent.
    Validate {
        spec_a: PathBuf,
        spec_b: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        alphas: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "M,D,L,CS")]
        metrics: Vec<Metric>,
        /// Oracle method; picked from the family when omitted.
        #[arg(long, value_enum)]
        oracle: Option<OracleChoice>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Term counts and wall time of the norm expansion over a (k, alpha) grid.
    Bench {
        #[arg(long, value_enum, default_value_t = FamilyArg::Gaussian)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long, default_value_t = 2)]
        alpha_min: u32,
        #[arg(long, default_value_t = 6)]
        alpha_max: u32,
        /// Family dimension (categories, support dimension or matrix side).
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        common: CommonFlags,
    },
}

#[derive(Debug, Serialize)]
struct ResultRecord {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<u32>,
    value: f64,
    method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    term_count: Option<u64>,
    wall_time_ms: f64,
    warnings: Vec<String>,
}

impl ResultRecord {
    fn print(&self, format: OutputFormat) {
        match format {
            OutputFormat::Structured => {
                println!("{}", serde_json::to_string(self).expect("record serializes"));
            }
            OutputFormat::Text => {
                if let Some(metric) = &self.metric {
                    let alpha =
                        self.alpha.map(|a| format!(" alpha={a}")).unwrap_or_default();
                    println!("{metric}{alpha}: {:.16e}", self.value);
                } else {
                    println!("value: {:.16e}", self.value);
                }
                println!("method: {}", self.method);
                if let Some(se) = self.stderr {
                    println!("stderr: {se:.16e}");
                }
                if let Some(tc) = self.term_count {
                    println!("terms: {tc}");
                }
                println!("wall_time_ms: {:.3}", self.wall_time_ms);
                for w in &self.warnings {
                    println!("warning: {w}");
                }
            }
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Spec(_)
        | Error::ParameterDomain(_)
        | Error::Support(_)
        | Error::ConeViolation(_)
        | Error::IncompatibleMethod { .. } => 2,
        Error::UnsupportedExponent(_) => 3,
        Error::Budget { .. } | Error::Cancellation { .. } => 4,
        _ => 1,
    }
}

fn load_model(path: &Path) -> Result<MixtureModel, Error> {
    MixtureSpec::from_path(path)?.to_model()
}

fn normalization_warnings(models: &[(&Path, &MixtureModel)], kind: DistanceKind) -> Vec<String> {
    let mut warnings = Vec::new();
    if matches!(kind, DistanceKind::Difference(_) | DistanceKind::LogRatio(_)) {
        for (path, model) in models {
            if !model.is_normalized() {
                warnings.push(format!(
                    "{}: weights sum to {:.6}, not 1; {} is computed on positive densities and \
                     the identity of indiscernibles no longer applies",
                    path.display(),
                    model.total_weight(),
                    kind.label()
                ));
            }
        }
    }
    warnings
}

fn cmd_dist(
    metric: Metric,
    alpha: Option<u32>,
    oracle: Option<OracleChoice>,
    spec_a: &Path,
    spec_b: &Path,
    common: &CommonFlags,
) -> Result<(), Error> {
    let kind = metric.kind(alpha)?;
    let m = load_model(spec_a)?;
    let m2 = load_model(spec_b)?;
    let warnings = normalization_warnings(&[(spec_a, &m), (spec_b, &m2)], kind);
    let start = Instant::now();
    let record = match oracle {
        Some(choice) => {
            let cfg = common.oracle(choice.method());
            let est = oracle_distances(&[kind], &m, &m2, &cfg)?.remove(0);
            ResultRecord {
                command: "dist".into(),
                metric: Some(kind.label()),
                alpha: Some(kind.alpha()),
                value: est.value,
                method: cfg.method.to_string(),
                stderr: (cfg.method == OracleMethod::MonteCarlo).then_some(est.stderr),
                term_count: None,
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                warnings,
            }
        }
        None => {
            let cf = closed_form_distance(kind, &m, &m2, &common.engine())?;
            ResultRecord {
                command: "dist".into(),
                metric: Some(kind.label()),
                alpha: Some(kind.alpha()),
                value: cf.value,
                method: "closed-form".into(),
                stderr: None,
                term_count: Some(cf.terms),
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                warnings,
            }
        }
    };
    record.print(common.output);
    Ok(())
}

fn cmd_norm(alpha: u32, spec: &Path, common: &CommonFlags) -> Result<(), Error> {
    let m = load_model(spec)?;
    let start = Instant::now();
    let cf = mixture_lp_norm(&m, alpha, &common.engine())?;
    ResultRecord {
        command: "norm".into(),
        metric: Some(format!("norm_{alpha}")),
        alpha: Some(alpha),
        value: cf.value,
        method: "closed-form".into(),
        stderr: None,
        term_count: Some(cf.terms),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        warnings: Vec::new(),
    }
    .print(common.output);
    Ok(())
}

fn cmd_diversity(alpha: u32, spec: &Path, common: &CommonFlags) -> Result<(), Error> {
    let m = load_model(spec)?;
    // Each component is one density of the weighted population.
    let densities: Vec<MixtureModel> = m
        .components()
        .map(|(_, theta)| MixtureModel::new(m.family(), vec![(1.0, theta.clone())]))
        .collect::<Result<_, _>>()?;
    let weights: Vec<f64> = m.weights().to_vec();
    let start = Instant::now();
    let cf = minkowski_diversity(&densities, &weights, alpha, &common.engine())?;
    ResultRecord {
        command: "diversity".into(),
        metric: Some(format!("diversity_{alpha}")),
        alpha: Some(alpha),
        value: cf.value,
        method: "closed-form".into(),
        stderr: None,
        term_count: Some(cf.terms),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        warnings: Vec::new(),
    }
    .print(common.output);
    Ok(())
}

#[derive(Debug, Serialize)]
struct ValidationRow {
    metric: String,
    alpha: u32,
    closed_form: f64,
    oracle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
    abs_diff: f64,
    pass: bool,
}

fn cmd_validate(
    spec_a: &Path,
    spec_b: &Path,
    alphas: &[u32],
    metrics: &[Metric],
    oracle: Option<OracleChoice>,
    common: &CommonFlags,
) -> Result<bool, Error> {
    let m = load_model(spec_a)?;
    let m2 = load_model(spec_b)?;
    let method = oracle
        .map(|c| c.method())
        .unwrap_or_else(|| OracleConfig::default_for(m.family()).method);
    let cfg = common.oracle(method);
    let deterministic_tol = common.rel_tol.unwrap_or(match method {
        OracleMethod::ExactEnum => 1e-10,
        _ => 1e-8,
    });

    let mut kinds = Vec::new();
    for &alpha in alphas {
        for metric in metrics {
            let kind = match metric {
                Metric::M if alpha % 2 == 0 && alpha >= 2 => DistanceKind::Minkowski(alpha),
                Metric::M => continue, // no closed form to validate at odd α
                Metric::D => DistanceKind::Difference(alpha),
                Metric::L => DistanceKind::LogRatio(alpha),
                Metric::Cs if alpha == 2 => DistanceKind::CauchySchwarz,
                Metric::Cs => continue,
                Metric::Tv => continue, // oracle-only, nothing to cross-check
            };
            if !kinds.contains(&kind) {
                kinds.push(kind);
            }
        }
    }
    if kinds.is_empty() {
        return Err(Error::Spec("no metric/alpha combination with a closed form".into()));
    }

    let estimates = oracle_distances(&kinds, &m, &m2, &cfg)?;
    let engine = common.engine();
    let mut rows = Vec::with_capacity(kinds.len());
    for (kind, est) in kinds.iter().zip(&estimates) {
        let cf = closed_form_distance(*kind, &m, &m2, &engine)?;
        let abs_diff = (cf.value - est.value).abs();
        let pass = if method == OracleMethod::MonteCarlo {
            abs_diff <= 3.0 * est.stderr + 1e-12
        } else {
            abs_diff <= deterministic_tol * cf.value.abs().max(est.value.abs()).max(1e-300)
        };
        rows.push(ValidationRow {
            metric: kind.label(),
            alpha: kind.alpha(),
            closed_form: cf.value,
            oracle: est.value,
            stderr: (method == OracleMethod::MonteCarlo).then_some(est.stderr),
            abs_diff,
            pass,
        });
    }

    let all_pass = rows.iter().all(|r| r.pass);
    match common.output {
        OutputFormat::Structured => {
            println!(
                "{}",
                serde_json::to_string(&serde_json::json!({
                    "command": "validate",
                    "method": cfg.method.to_string(),
                    "rows": rows,
                    "all_pass": all_pass,
                }))
                .expect("rows serialize")
            );
        }
        OutputFormat::Text => {
            println!(
                "{:<6} {:>5} {:>24} {:>24} {:>12} {:>6}",
                "metric", "alpha", "closed_form", "oracle", "abs_diff", "pass"
            );
            for r in &rows {
                println!(
                    "{:<6} {:>5} {:>24.16e} {:>24.16e} {:>12.3e} {:>6}",
                    r.metric,
                    r.alpha,
                    r.closed_form,
                    r.oracle,
                    r.abs_diff,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            println!("result: {}", if all_pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(all_pass)
}

/// Deterministic mixture for benchmarking, seeded per (family, k).
fn bench_mixture(family: FamilyArg, dim: Option<usize>, k: usize, seed: u64) -> MixtureModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64) << 8);
    let weights: Vec<f64> = {
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    };
    let (fam, comps): (FamilyDescriptor, Vec<(f64, SourceParameter)>) = match family {
        FamilyArg::Bernoulli => (
            FamilyDescriptor::bernoulli(),
            weights
                .iter()
                .map(|&w| (w, SourceParameter::Bernoulli { lambda: rng.random_range(0.05..0.95) }))
                .collect(),
        ),
        FamilyArg::Multinoulli => {
            let d = dim.unwrap_or(3);
            let fam = FamilyDescriptor::multinoulli(d).expect("dim >= 2");
            let comps = weights
                .iter()
                .map(|&w| {
                    let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
                    let t: f64 = raw.iter().sum();
                    (w, SourceParameter::Multinoulli {
                        lambda: raw.into_iter().map(|x| x / t).collect(),
                    })
                })
                .collect();
            (fam, comps)
        }
        FamilyArg::Laplacian => (
            FamilyDescriptor::laplacian(),
            weights
                .iter()
                .map(|&w| (w, SourceParameter::Laplacian { sigma: rng.random_range(0.3..3.0) }))
                .collect(),
        ),
        FamilyArg::Gaussian => {
            let d = dim.unwrap_or(1);
            let fam = FamilyDescriptor::gaussian(d).expect("dim >= 1");
            let comps = weights
                .iter()
                .map(|&w| {
                    let mean = DVector::from_fn(d, |_, _| rng.random_range(-2.0..2.0));
                    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-0.5..0.5));
                    let cov = &a * a.transpose() + DMatrix::identity(d, d);
                    (w, SourceParameter::Gaussian { mean, covariance: cov })
                })
                .collect();
            (fam, comps)
        }
        FamilyArg::Wishart => {
            let d = dim.unwrap_or(2);
            let fam = FamilyDescriptor::wishart(d).expect("dim >= 1");
            let comps = weights
                .iter()
                .map(|&w| {
                    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-0.5..0.5));
                    let scale = &a * a.transpose() + DMatrix::identity(d, d);
                    (w, SourceParameter::Wishart {
                        dof: d as f64 + 1.5 + rng.random_range(0.0..3.0),
                        scale,
                    })
                })
                .collect();
            (fam, comps)
        }
    };
    MixtureModel::from_source(fam, comps).expect("bench mixture is valid")
}

fn cmd_bench(
    family: FamilyArg,
    dim: Option<usize>,
    k_range: (usize, usize),
    alpha_range: (u32, u32),
    common: &CommonFlags,
) -> Result<(), Error> {
    let engine = common.engine();
    let mut rows = Vec::new();
    for k in k_range.0..=k_range.1 {
        let m = bench_mixture(family, dim, k, common.seed);
        for alpha in alpha_range.0..=alpha_range.1 {
            let expected = composition_count_u64(alpha, k);
            let start = Instant::now();
            let cf = mixture_lp_norm(&m, alpha, &engine)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            if expected != Some(cf.terms) {
                return Err(Error::InternalInvariant(format!(
                    "k={k} alpha={alpha}: consumed {} terms, formula says {expected:?}",
                    cf.terms
                )));
            }
            rows.push(serde_json::json!({
                "k": k,
                "alpha": alpha,
                "terms": cf.terms,
                "norm": cf.value,
                "wall_time_ms": ms,
            }));
        }
    }
    match common.output {
        OutputFormat::Structured => {
            println!(
                "{}",
                serde_json::to_string(&serde_json::json!({
                    "command": "bench",
                    "family": format!("{family:?}").to_lowercase(),
                    "rows": rows,
                }))
                .expect("rows serialize")
            );
        }
        OutputFormat::Text => {
            println!("{:>3} {:>5} {:>12} {:>24} {:>12}", "k", "alpha", "terms", "norm", "ms");
            for r in &rows {
                println!(
                    "{:>3} {:>5} {:>12} {:>24.16e} {:>12.3}",
                    r["k"], r["alpha"], r["terms"], r["norm"].as_f64().unwrap(), r["wall_time_ms"]
                );
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Dist { metric, alpha, oracle, spec_a, spec_b, common } => {
            cmd_dist(metric, alpha, oracle, &spec_a, &spec_b, &common)?;
            Ok(true)
        }
        Command::Norm { alpha, spec, common } => {
            cmd_norm(alpha, &spec, &common)?;
            Ok(true)
        }
        Command::Diversity { alpha, spec, common } => {
            cmd_diversity(alpha, &spec, &common)?;
            Ok(true)
        }
        Command::Validate { spec_a, spec_b, alphas, metrics, oracle, common } => {
            cmd_validate(&spec_a, &spec_b, &alphas, &metrics, oracle, &common)
        }
        Command::Bench { family, k_min, k_max, alpha_min, alpha_max, dim, common } => {
            cmd_bench(family, dim, (k_min, k_max), (alpha_min, alpha_max), &common)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
