//! Independent numerical ground truth for every closed-form integral.
//!
//! Three method families, disjoint by support: exact finite-support
//! enumeration (Bernoulli, multinoulli), adaptive quadrature on the real
//! line (zero-centered Laplacian, univariate Gaussian) and importance
//! sampled Monte Carlo (anything, in practice multivariate Gaussian and
//! Wishart). Unlike the closed-form engine, the oracle also handles total
//! variation and arbitrary real exponents α ≥ 1.

pub mod quad;

mod mc;

pub use mc::sample;

use std::collections::HashMap;

use crate::expfam::{self, FamilyDescriptor, FamilyKind, SupportPoint};
use crate::minkdist::{DistanceKind, MixtureModel};
use crate::{Error, Result};

use mc::{PreparedMixture, SuffStats};

/// How an oracle integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    /// Finite-support sum; exact.
    ExactEnum,
    /// Adaptive Gauss-Kronrod quadrature for one-dimensional supports.
    Quadrature,
    /// Importance-sampled Monte Carlo with a mixture proposal.
    MonteCarlo,
}

impl std::fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OracleMethod::ExactEnum => "exact",
            OracleMethod::Quadrature => "quadrature",
            OracleMethod::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub method: OracleMethod,
    /// Monte Carlo sample count (≥ 1000).
    pub samples: u64,
    pub seed: u64,
    /// Quadrature relative tolerance.
    pub rel_tol: f64,
    /// Quadrature absolute tolerance.
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Monte Carlo sub-streams; the estimate is bit-reproducible for a
    /// fixed seed and chunk count, independent of thread count.
    pub chunks: usize,
}

impl OracleConfig {
    pub fn exact() -> Self {
        OracleConfig { method: OracleMethod::ExactEnum, ..Self::base() }
    }

    pub fn quadrature() -> Self {
        OracleConfig { method: OracleMethod::Quadrature, ..Self::base() }
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        OracleConfig { method: OracleMethod::MonteCarlo, samples, seed, ..Self::base() }
    }

    fn base() -> Self {
        OracleConfig {
            method: OracleMethod::MonteCarlo,
            samples: 1_000_000,
            seed: 0,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 4000,
            chunks: 16,
        }
    }

    /// The natural method for a family: exact enumeration on finite
    /// supports, quadrature on one-dimensional continuous ones, Monte
    /// Carlo elsewhere.
    pub fn default_for(fam: FamilyDescriptor) -> Self {
        let method = match fam.kind() {
            FamilyKind::Bernoulli | FamilyKind::Multinoulli => OracleMethod::ExactEnum,
            FamilyKind::ZeroCenteredLaplacian => OracleMethod::Quadrature,
            FamilyKind::MultivariateGaussian if fam.dim() == 1 => OracleMethod::Quadrature,
            _ => OracleMethod::MonteCarlo,
        };
        OracleConfig { method, ..Self::base() }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.method == OracleMethod::MonteCarlo && self.samples < 1000 {
            return Err(Error::ParameterDomain(format!(
                "monte carlo needs at least 1000 samples, got {}",
                self.samples
            )));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::ParameterDomain("oracle tolerances must be positive".into()));
        }
        if self.chunks == 0 {
            return Err(Error::ParameterDomain("oracle needs at least one chunk".into()));
        }
        Ok(())
    }
}

/// An oracle value with its uncertainty: `stderr` is zero for the exact
/// and quadrature methods, a sample standard error for Monte Carlo.
#[derive(Debug, Clone, Copy)]
pub struct OracleEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples_used: u64,
}

impl OracleEstimate {
    fn exact(value: f64, points: u64) -> Self {
        OracleEstimate { value, stderr: 0.0, samples_used: points }
    }
}

fn check_method(fam: FamilyDescriptor, method: OracleMethod) -> Result<()> {
    let compatible = match method {
        OracleMethod::ExactEnum => {
            matches!(fam.kind(), FamilyKind::Bernoulli | FamilyKind::Multinoulli)
        }
        OracleMethod::Quadrature => {
            matches!(fam.kind(), FamilyKind::ZeroCenteredLaplacian)
                || (fam.kind() == FamilyKind::MultivariateGaussian && fam.dim() == 1)
        }
        OracleMethod::MonteCarlo => true,
    };
    if compatible {
        Ok(())
    } else {
        Err(Error::IncompatibleMethod { method: method.to_string(), family: fam.to_string() })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("oracle exponent must be ≥ 1, got {alpha}")))
    }
}

fn check_same_family(m: &MixtureModel, m2: &MixtureModel) -> Result<()> {
    if m.family() != m2.family() {
        return Err(Error::ParameterDomain(format!(
            "mixtures belong to different families: {} vs {}",
            m.family(),
            m2.family()
        )));
    }
    Ok(())
}

/// Half-width of the region holding the mass of every component, for the
/// real-line quadrature fold.
fn line_scale(mixtures: &[&MixtureModel]) -> f64 {
    let mut scale = 1.0_f64;
    for m in mixtures {
        for theta in m.thetas() {
            match m.family().kind() {
                FamilyKind::ZeroCenteredLaplacian => {
                    let sigma = -1.0 / theta.vector_part().unwrap()[0];
                    scale = scale.max(6.0 * sigma);
                }
                FamilyKind::MultivariateGaussian => {
                    let tv = theta.vector_part().unwrap()[0];
                    let tm = theta.matrix_part().unwrap()[(0, 0)];
                    let mu = tv / tm;
                    let sigma = tm.recip().sqrt();
                    scale = scale.max(mu.abs() + 6.0 * sigma);
                }
                _ => {}
            }
        }
    }
    scale
}

fn scalar_point(fam: FamilyDescriptor, x: f64) -> SupportPoint {
    match fam.kind() {
        FamilyKind::MultivariateGaussian => {
            SupportPoint::Vector(nalgebra::DVector::from_element(1, x))
        }
        _ => SupportPoint::Scalar(x),
    }
}

/// `log |e^a − e^b|`; negative infinity when the two agree.
fn log_abs_diff_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == lo {
        return f64::NEG_INFINITY;
    }
    hi + (-((lo - hi).exp())).ln_1p()
}

fn exact_sum<F>(fam: FamilyDescriptor, f: F) -> Result<OracleEstimate>
where
    F: Fn(&SupportPoint) -> Result<f64>,
{
    let points = expfam::support_points(fam)
        .ok_or_else(|| Error::IncompatibleMethod {
            method: OracleMethod::ExactEnum.to_string(),
            family: fam.to_string(),
        })?;
    let mut total = 0.0;
    for p in &points {
        total += f(p)?;
    }
    Ok(OracleEstimate::exact(total, points.len() as u64))
}

fn quadrature_line<F>(m: &[&MixtureModel], f: F, cfg: &OracleConfig) -> Result<OracleEstimate>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let r = quad::integrate_real_line(
        f,
        line_scale(m),
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdivisions,
    )?;
    Ok(OracleEstimate::exact(r.value, r.evaluations))
}

fn integrate_power_offset(
    m: &MixtureModel,
    alpha: f64,
    cfg: &OracleConfig,
    offset: u64,
) -> Result<OracleEstimate> {
    check_alpha(alpha)?;
    check_method(m.family(), cfg.method)?;
    match cfg.method {
        OracleMethod::ExactEnum => {
            exact_sum(m.family(), |x| Ok(m.density(x)?.powf(alpha)))
        }
        OracleMethod::Quadrature => {
            let fam = m.family();
            quadrature_line(
                &[m],
                |x| {
                    let ld = m.log_density(&scalar_point(fam, x)).expect("1-d density");
                    (alpha * ld).exp()
                },
                cfg,
            )
        }
        OracleMethod::MonteCarlo => {
            let prepared = PreparedMixture::new(m)?;
            mc::mc_integrate(
                m,
                |stats: &SuffStats| alpha * prepared.log_density(stats),
                cfg,
                offset,
            )
        }
    }
}

/// Oracle estimate of `∫ m(x)^α dμ(x)` for real α ≥ 1.
///
/// The Monte Carlo proposal is `m` itself, normalized.
pub fn integrate_power(m: &MixtureModel, alpha: f64, cfg: &OracleConfig) -> Result<OracleEstimate> {
    integrate_power_offset(m, alpha, cfg, 0)
}

fn integrate_abs_power_offset(
    m: &MixtureModel,
    m2: &MixtureModel,
    alpha: f64,
    cfg: &OracleConfig,
    offset: u64,
) -> Result<OracleEstimate> {
    check_same_family(m, m2)?;
    check_alpha(alpha)?;
    check_method(m.family(), cfg.method)?;
    match cfg.method {
        OracleMethod::ExactEnum => exact_sum(m.family(), |x| {
            Ok((m.density(x)? - m2.density(x)?).abs().powf(alpha))
        }),
        OracleMethod::Quadrature => {
            let fam = m.family();
            quadrature_line(
                &[m, m2],
                |x| {
                    let p = scalar_point(fam, x);
                    let la = m.log_density(&p).expect("1-d density");
                    let lb = m2.log_density(&p).expect("1-d density");
                    (alpha * log_abs_diff_exp(la, lb)).exp()
                },
                cfg,
            )
        }
        OracleMethod::MonteCarlo => {
            let proposal = m.concat(m2)?;
            let pa = PreparedMixture::new(m)?;
            let pb = PreparedMixture::new(m2)?;
            mc::mc_integrate(
                &proposal,
                |stats: &SuffStats| {
                    alpha * log_abs_diff_exp(pa.log_density(stats), pb.log_density(stats))
                },
                cfg,
                offset,
            )
        }
    }
}

/// Oracle estimate of `∫ |m(x) − m'(x)|^α dμ(x)` for real α ≥ 1.
///
/// The Monte Carlo proposal is the normalized sum mixture `(m + m')/W`,
/// which covers both operands with bounded importance weights.
pub fn integrate_abs_power(
    m: &MixtureModel,
    m2: &MixtureModel,
    alpha: f64,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    integrate_abs_power_offset(m, m2, alpha, cfg, 0)
}

fn inner_product_offset(
    m: &MixtureModel,
    m2: &MixtureModel,
    cfg: &OracleConfig,
    offset: u64,
) -> Result<OracleEstimate> {
    check_same_family(m, m2)?;
    check_method(m.family(), cfg.method)?;
    match cfg.method {
        OracleMethod::ExactEnum => {
            exact_sum(m.family(), |x| Ok(m.density(x)? * m2.density(x)?))
        }
        OracleMethod::Quadrature => {
            let fam = m.family();
            quadrature_line(
                &[m, m2],
                |x| {
                    let p = scalar_point(fam, x);
                    let la = m.log_density(&p).expect("1-d density");
                    let lb = m2.log_density(&p).expect("1-d density");
                    (la + lb).exp()
                },
                cfg,
            )
        }
        OracleMethod::MonteCarlo => {
            let proposal = m.concat(m2)?;
            let pa = PreparedMixture::new(m)?;
            let pb = PreparedMixture::new(m2)?;
            mc::mc_integrate(
                &proposal,
                |stats: &SuffStats| pa.log_density(stats) + pb.log_density(stats),
                cfg,
                offset,
            )
        }
    }
}

/// Oracle estimate of `⟨m, m'⟩ = ∫ m(x) m'(x) dμ(x)`.
pub fn inner_product(
    m: &MixtureModel,
    m2: &MixtureModel,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    inner_product_offset(m, m2, cfg, 0)
}

/// Stream roles keep the ChaCha streams of distinct integrals disjoint
/// under one seed, in a fixed numbering so results do not depend on the
/// order distances are requested in.
fn power_role(alpha: u32, which: u64) -> u64 {
    4 * u64::from(alpha) + which
}
const INNER_PRODUCT_ROLE: u64 = 3;

/// The three power integrals `∫m^α`, `∫m'^α`, `∫(m+m')^α` with their
/// norm transforms `n = I^{1/α}`, `σ_n = σ_I · n / (α I)`.
struct NormTriple {
    norms: [f64; 3],
    errs: [f64; 3],
    samples: u64,
}

fn norm_triple(
    m: &MixtureModel,
    m2: &MixtureModel,
    sum: &MixtureModel,
    alpha: u32,
    cfg: &OracleConfig,
) -> Result<NormTriple> {
    let a = f64::from(alpha);
    let mut norms = [0.0; 3];
    let mut errs = [0.0; 3];
    let mut samples = 0;
    for (i, operand) in [m, m2, sum].into_iter().enumerate() {
        let est = integrate_power_offset(operand, a, cfg, power_role(alpha, i as u64))?;
        norms[i] = est.value.powf(1.0 / a);
        errs[i] = if est.value > 0.0 { est.stderr * norms[i] / (a * est.value) } else { 0.0 };
        samples += est.samples_used;
    }
    Ok(NormTriple { norms, errs, samples })
}

/// Oracle values for several distance kinds at once, sharing the
/// constituent power integrals across kinds (`D_α` and `L_α` use the same
/// three norms; the Cauchy-Schwarz divergence reuses the α = 2 ones).
pub fn oracle_distances(
    kinds: &[DistanceKind],
    m: &MixtureModel,
    m2: &MixtureModel,
    cfg: &OracleConfig,
) -> Result<Vec<OracleEstimate>> {
    check_same_family(m, m2)?;
    let sum = m.concat(m2)?;
    let mut norm_cache: HashMap<u32, NormTriple> = HashMap::new();
    let mut results = Vec::with_capacity(kinds.len());

    for kind in kinds {
        if kind.alpha() < 1 {
            return Err(Error::ParameterDomain(format!(
                "{} needs an exponent ≥ 1",
                kind.label()
            )));
        }
        let estimate = match *kind {
            DistanceKind::Minkowski(alpha) => {
                let a = f64::from(alpha);
                let est =
                    integrate_abs_power_offset(m, m2, a, cfg, power_role(alpha, 3))?;
                let value = if est.value > 0.0 { est.value.powf(1.0 / a) } else { 0.0 };
                let stderr =
                    if est.value > 0.0 { est.stderr * value / (a * est.value) } else { 0.0 };
                OracleEstimate { value, stderr, samples_used: est.samples_used }
            }
            DistanceKind::TotalVariation => {
                let est = integrate_abs_power_offset(m, m2, 1.0, cfg, power_role(1, 3))?;
                OracleEstimate {
                    value: 0.5 * est.value,
                    stderr: 0.5 * est.stderr,
                    samples_used: est.samples_used,
                }
            }
            DistanceKind::Difference(alpha) => {
                let triple = cached_triple(&mut norm_cache, m, m2, &sum, alpha, cfg)?;
                let [na, nb, nc] = triple.norms;
                let [ea, eb, ec] = triple.errs;
                OracleEstimate {
                    value: na + nb - nc,
                    stderr: (ea * ea + eb * eb + ec * ec).sqrt(),
                    samples_used: triple.samples,
                }
            }
            DistanceKind::LogRatio(alpha) => {
                let triple = cached_triple(&mut norm_cache, m, m2, &sum, alpha, cfg)?;
                let [na, nb, nc] = triple.norms;
                let [ea, eb, ec] = triple.errs;
                let var = (ea * ea + eb * eb) / ((na + nb) * (na + nb)) + (ec / nc) * (ec / nc);
                OracleEstimate {
                    value: ((na + nb) / nc).ln(),
                    stderr: var.sqrt(),
                    samples_used: triple.samples,
                }
            }
            DistanceKind::CauchySchwarz => {
                let ip = inner_product_offset(m, m2, cfg, INNER_PRODUCT_ROLE)?;
                let triple = cached_triple(&mut norm_cache, m, m2, &sum, 2, cfg)?;
                let ia = triple.norms[0] * triple.norms[0];
                let ib = triple.norms[1] * triple.norms[1];
                // Back-propagate norm errors to the squared integrals.
                let sa = 2.0 * triple.norms[0] * triple.errs[0];
                let sb = 2.0 * triple.norms[1] * triple.errs[1];
                let var = (ip.stderr / ip.value) * (ip.stderr / ip.value)
                    + 0.25 * (sa / ia) * (sa / ia)
                    + 0.25 * (sb / ib) * (sb / ib);
                OracleEstimate {
                    value: -ip.value.ln() + 0.5 * ia.ln() + 0.5 * ib.ln(),
                    stderr: var.sqrt(),
                    samples_used: ip.samples_used + triple.samples,
                }
            }
        };
        results.push(estimate);
    }
    Ok(results)
}

fn cached_triple<'c>(
    cache: &'c mut HashMap<u32, NormTriple>,
    m: &MixtureModel,
    m2: &MixtureModel,
    sum: &MixtureModel,
    alpha: u32,
    cfg: &OracleConfig,
) -> Result<&'c NormTriple> {
    if !cache.contains_key(&alpha) {
        cache.insert(alpha, norm_triple(m, m2, sum, alpha, cfg)?);
    }
    Ok(&cache[&alpha])
}

/// Oracle counterpart of the closed-form distance, assembled from power
/// integrals with first-order error propagation.
pub fn oracle_distance(
    kind: DistanceKind,
    m: &MixtureModel,
    m2: &MixtureModel,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    Ok(oracle_distances(&[kind], m, m2, cfg)?.pop().expect("one kind in, one estimate out"))
}
