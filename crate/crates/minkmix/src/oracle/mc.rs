//! Importance-sampled Monte Carlo integration.
//!
//! Integrands are products and powers of same-family mixture densities, so
//! a normalized mixture proposal built from the operand components covers
//! the integrand's support with bounded importance weights. Sampling uses
//! ChaCha8 with one stream per chunk: estimates are bit-identical for a
//! fixed seed and chunk count no matter how many threads consume the
//! chunks, because per-chunk moments are merged in chunk order.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};

use crate::expfam::{self, FamilyDescriptor, FamilyKind, NaturalParameter, SupportPoint};
use crate::minkdist::MixtureModel;
use crate::signedlog::log_sum_exp2;
use crate::{Error, Result};

use super::{OracleConfig, OracleEstimate};

/// Sufficient-statistic view of a drawn point: everything a pairing
/// `t(x)·θ` needs, with the expensive pieces (the Wishart log-determinant)
/// computed once per sample instead of once per component.
pub(crate) enum SuffStats<'a> {
    Scalar(f64),
    OneHot(usize),
    Vector(&'a DVector<f64>),
    Matrix { log_det: f64, x: &'a DMatrix<f64> },
}

fn pairing(fam: FamilyDescriptor, theta: &NaturalParameter, stats: &SuffStats) -> f64 {
    match (fam.kind(), stats) {
        (FamilyKind::Bernoulli, SuffStats::Scalar(x)) => x * theta.vector_part().unwrap()[0],
        (FamilyKind::Multinoulli, SuffStats::OneHot(idx)) => {
            let t = theta.vector_part().unwrap();
            if *idx < t.len() {
                t[*idx]
            } else {
                0.0
            }
        }
        (FamilyKind::ZeroCenteredLaplacian, SuffStats::Scalar(x)) => {
            x.abs() * theta.vector_part().unwrap()[0]
        }
        (FamilyKind::MultivariateGaussian, SuffStats::Vector(x)) => {
            let v = theta.vector_part().unwrap();
            let m = theta.matrix_part().unwrap();
            v.dot(x) - 0.5 * x.dot(&(m * *x))
        }
        (FamilyKind::Wishart, SuffStats::Matrix { log_det, x }) => {
            let m = theta.matrix_part().unwrap();
            let trace: f64 = m.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            theta.scalar_part().unwrap() * log_det - 0.5 * trace
        }
        _ => unreachable!("sample statistics always match the family"),
    }
}

/// A mixture with its log-weights and log-partitions precomputed for tight
/// density evaluation loops.
pub(crate) struct PreparedMixture<'m> {
    fam: FamilyDescriptor,
    thetas: &'m [NaturalParameter],
    log_w: Vec<f64>,
    log_partitions: Vec<f64>,
}

impl<'m> PreparedMixture<'m> {
    pub(crate) fn new(m: &'m MixtureModel) -> Result<Self> {
        let fam = m.family();
        let log_partitions = m
            .thetas()
            .iter()
            .map(|t| expfam::log_partition(fam, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedMixture {
            fam,
            thetas: m.thetas(),
            log_w: m.weights().iter().map(|w| w.ln()).collect(),
            log_partitions,
        })
    }

    /// `log m(x)` from precomputed per-component pieces.
    pub(crate) fn log_density(&self, stats: &SuffStats) -> f64 {
        let mut acc = f64::NEG_INFINITY;
        for i in 0..self.thetas.len() {
            let ld = self.log_w[i] + pairing(self.fam, &self.thetas[i], stats)
                - self.log_partitions[i];
            acc = log_sum_exp2(acc, ld);
        }
        acc
    }
}

/// A drawn support point carrying its precomputed statistics.
pub(crate) enum DrawnPoint {
    Scalar(f64),
    OneHot { idx: usize, dim: usize },
    Vector(DVector<f64>),
    Matrix { log_det: f64, x: DMatrix<f64> },
}

impl DrawnPoint {
    pub(crate) fn stats(&self) -> SuffStats<'_> {
        match self {
            DrawnPoint::Scalar(x) => SuffStats::Scalar(*x),
            DrawnPoint::OneHot { idx, .. } => SuffStats::OneHot(*idx),
            DrawnPoint::Vector(v) => SuffStats::Vector(v),
            DrawnPoint::Matrix { log_det, x } => SuffStats::Matrix { log_det: *log_det, x },
        }
    }

    pub(crate) fn into_support_point(self) -> SupportPoint {
        match self {
            DrawnPoint::Scalar(x) => SupportPoint::Scalar(x),
            DrawnPoint::OneHot { idx, dim } => {
                let mut v = DVector::zeros(dim);
                v[idx] = 1.0;
                SupportPoint::Vector(v)
            }
            DrawnPoint::Vector(v) => SupportPoint::Vector(v),
            DrawnPoint::Matrix { x, .. } => SupportPoint::Matrix(x),
        }
    }
}

/// Per-component sampler with factorizations done once at build time.
pub(crate) enum ComponentSampler {
    Bernoulli { lambda: f64 },
    Multinoulli { cumulative: Vec<f64>, dim: usize },
    Laplacian { sigma: f64 },
    Gaussian { mean: DVector<f64>, factor: DMatrix<f64> },
    /// Bartlett construction: `X = (L A)(L A)ᵀ` with `S = L Lᵀ`, `A` lower
    /// triangular, χ² diagonal and standard normal subdiagonal.
    Wishart { scale_factor: DMatrix<f64>, chi: Vec<ChiSquared<f64>>, dim: usize },
}

impl ComponentSampler {
    pub(crate) fn build(fam: FamilyDescriptor, theta: &NaturalParameter) -> Result<Self> {
        if !expfam::in_cone(fam, theta) {
            return Err(Error::ConeViolation(format!("{fam}: sampler parameter")));
        }
        let src = expfam::from_natural(fam, theta)?;
        Ok(match src {
            expfam::SourceParameter::Bernoulli { lambda } => ComponentSampler::Bernoulli { lambda },
            expfam::SourceParameter::Multinoulli { lambda } => {
                let mut cumulative = Vec::with_capacity(lambda.len());
                let mut acc = 0.0;
                for l in &lambda {
                    acc += l;
                    cumulative.push(acc);
                }
                ComponentSampler::Multinoulli { cumulative, dim: fam.dim() }
            }
            expfam::SourceParameter::Laplacian { sigma } => ComponentSampler::Laplacian { sigma },
            expfam::SourceParameter::Gaussian { mean, covariance } => {
                let chol = expfam::spd_cholesky(&covariance)
                    .ok_or_else(|| Error::ConeViolation(format!("{fam}: covariance")))?;
                ComponentSampler::Gaussian { mean, factor: chol.l() }
            }
            expfam::SourceParameter::Wishart { dof, scale } => {
                let d = fam.dim();
                let chol = expfam::spd_cholesky(&scale)
                    .ok_or_else(|| Error::ConeViolation(format!("{fam}: scale matrix")))?;
                let chi = (0..d)
                    .map(|i| {
                        ChiSquared::new(dof - i as f64).map_err(|e| {
                            Error::ParameterDomain(format!(
                                "wishart degrees of freedom {dof}: {e}"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ComponentSampler::Wishart { scale_factor: chol.l(), chi, dim: d }
            }
        })
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> DrawnPoint {
        match self {
            ComponentSampler::Bernoulli { lambda } => {
                let u: f64 = rng.random();
                DrawnPoint::Scalar(if u < *lambda { 1.0 } else { 0.0 })
            }
            ComponentSampler::Multinoulli { cumulative, dim } => {
                let u: f64 = rng.random();
                let idx = cumulative.iter().position(|&c| u < c).unwrap_or(dim - 1);
                DrawnPoint::OneHot { idx, dim: *dim }
            }
            ComponentSampler::Laplacian { sigma } => {
                let magnitude: f64 = Exp1.sample(rng);
                let flip: f64 = rng.random();
                let sign = if flip < 0.5 { -1.0 } else { 1.0 };
                DrawnPoint::Scalar(sign * sigma * magnitude)
            }
            ComponentSampler::Gaussian { mean, factor } => {
                let z = DVector::from_iterator(
                    mean.len(),
                    (0..mean.len()).map(|_| StandardNormal.sample(rng)),
                );
                DrawnPoint::Vector(mean + factor * z)
            }
            ComponentSampler::Wishart { scale_factor, chi, dim } => {
                let d = *dim;
                let mut bartlett = DMatrix::<f64>::zeros(d, d);
                for i in 0..d {
                    let c: f64 = chi[i].sample(rng);
                    bartlett[(i, i)] = c.sqrt();
                    for j in 0..i {
                        bartlett[(i, j)] = StandardNormal.sample(rng);
                    }
                }
                let root = scale_factor * bartlett;
                let log_det = 2.0 * root.diagonal().iter().map(|p| p.ln()).sum::<f64>();
                let x = &root * root.transpose();
                DrawnPoint::Matrix { log_det, x }
            }
        }
    }
}

/// Samples a whole mixture: component by cumulative weight, then the
/// component's sampler.
pub(crate) struct MixtureSampler {
    cumulative: Vec<f64>,
    components: Vec<ComponentSampler>,
}

impl MixtureSampler {
    pub(crate) fn build(m: &MixtureModel) -> Result<Self> {
        let total = m.total_weight();
        let mut cumulative = Vec::with_capacity(m.len());
        let mut acc = 0.0;
        for w in m.weights() {
            acc += w / total;
            cumulative.push(acc);
        }
        let components = m
            .thetas()
            .iter()
            .map(|t| ComponentSampler::build(m.family(), t))
            .collect::<Result<Vec<_>>>()?;
        Ok(MixtureSampler { cumulative, components })
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> DrawnPoint {
        let u: f64 = rng.random();
        let idx = self.cumulative.iter().position(|&c| u < c).unwrap_or(self.components.len() - 1);
        self.components[idx].draw(rng)
    }
}

/// One chunk's moments, merged in chunk order.
#[derive(Debug, Clone, Copy, Default)]
struct ChunkMoments {
    sum: f64,
    sum_sq: f64,
    n: u64,
}

/// Importance-sampled estimate of `∫ f dμ` for a non-negative integrand
/// given through its log, with the normalized `proposal` mixture as the
/// sampling distribution. `stream_offset` separates the ChaCha streams of
/// distinct integrals under one seed.
pub(crate) fn mc_integrate<F>(
    proposal: &MixtureModel,
    log_integrand: F,
    cfg: &OracleConfig,
    stream_offset: u64,
) -> Result<OracleEstimate>
where
    F: Fn(&SuffStats) -> f64 + Sync,
{
    cfg.validate()?;
    let sampler = MixtureSampler::build(proposal)?;
    let prepared = PreparedMixture::new(proposal)?;
    let log_total_w = proposal.total_weight().ln();
    let chunks = cfg.chunks.max(1) as u64;
    let base = cfg.samples / chunks;
    let extra = cfg.samples % chunks;

    let run_chunk = |chunk: u64| -> ChunkMoments {
        let n = base + u64::from(chunk < extra);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream_offset * chunks + chunk);
        let mut moments = ChunkMoments { n, ..Default::default() };
        for _ in 0..n {
            let point = sampler.draw(&mut rng);
            let stats = point.stats();
            let log_q = prepared.log_density(&stats) - log_total_w;
            let ratio = (log_integrand(&stats) - log_q).exp();
            moments.sum += ratio;
            moments.sum_sq += ratio * ratio;
        }
        moments
    };

    let threads = std::thread::available_parallelism().map_or(1, |p| p.get()).min(chunks as usize);
    let per_chunk: Vec<ChunkMoments> = if threads <= 1 {
        (0..chunks).map(run_chunk).collect()
    } else {
        let run_chunk = &run_chunk;
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|tid| {
                    scope.spawn(move || {
                        (0..chunks)
                            .filter(|c| c % threads as u64 == tid)
                            .map(|c| (c, run_chunk(c)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            let mut slots = vec![ChunkMoments::default(); chunks as usize];
            for handle in handles {
                for (c, m) in handle.join().expect("sampling worker panicked") {
                    slots[c as usize] = m;
                }
            }
            slots
        })
    };

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut n = 0u64;
    for m in per_chunk {
        sum += m.sum;
        sum_sq += m.sum_sq;
        n += m.n;
    }
    let mean = sum / n as f64;
    let variance = ((sum_sq - sum * mean).max(0.0)) / (n.saturating_sub(1).max(1)) as f64;
    Ok(OracleEstimate {
        value: mean,
        stderr: (variance / n as f64).sqrt(),
        samples_used: n,
    })
}

/// Draws one point from `p_θ`.
pub fn sample<R: Rng>(
    fam: FamilyDescriptor,
    theta: &NaturalParameter,
    rng: &mut R,
) -> Result<SupportPoint> {
    Ok(ComponentSampler::build(fam, theta)?.draw(rng).into_support_point())
}
