//! Conic exponential families.
//!
//! A family here is a set of densities `p_θ(x) = exp(t(x)·θ − F(θ))` whose
//! natural parameter space `Θ` is a convex cone, so any non-negative
//! combination of natural parameters stays inside `Θ` and weighted
//! geometric integrals of densities stay finite. Five families are
//! provided: Bernoulli, multinoulli (categorical), zero-centered Laplacian,
//! multivariate Gaussian and Wishart.
//!
//! Positive-definiteness is decided by Cholesky factorization success with
//! no extra tolerance; log-determinants come from factor diagonals and all
//! matrix inversions in hot paths are triangular solves.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

const SYMMETRY_REL_TOL: f64 = 1e-12;

/// Which conic exponential family a parameter or mixture belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Bernoulli,
    Multinoulli,
    ZeroCenteredLaplacian,
    MultivariateGaussian,
    Wishart,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            FamilyKind::Bernoulli => "bernoulli",
            FamilyKind::Multinoulli => "multinoulli",
            FamilyKind::ZeroCenteredLaplacian => "laplacian",
            FamilyKind::MultivariateGaussian => "gaussian",
            FamilyKind::Wishart => "wishart",
        };
        f.write_str(name)
    }
}

/// A family together with its dimension.
///
/// `dim` is 1 for Bernoulli and the Laplacian, the number of categories
/// (≥ 2) for the multinoulli, the support dimension for the Gaussian and
/// the matrix side for the Wishart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilyDescriptor {
    kind: FamilyKind,
    dim: usize,
}

impl FamilyDescriptor {
    pub fn new(kind: FamilyKind, dim: usize) -> Result<Self> {
        let ok = match kind {
            FamilyKind::Bernoulli | FamilyKind::ZeroCenteredLaplacian => dim == 1,
            FamilyKind::Multinoulli => dim >= 2,
            FamilyKind::MultivariateGaussian | FamilyKind::Wishart => dim >= 1,
        };
        if !ok {
            return Err(Error::ParameterDomain(format!(
                "dim {dim} is invalid for the {kind} family"
            )));
        }
        Ok(FamilyDescriptor { kind, dim })
    }

    pub fn bernoulli() -> Self {
        FamilyDescriptor { kind: FamilyKind::Bernoulli, dim: 1 }
    }

    pub fn multinoulli(categories: usize) -> Result<Self> {
        Self::new(FamilyKind::Multinoulli, categories)
    }

    pub fn laplacian() -> Self {
        FamilyDescriptor { kind: FamilyKind::ZeroCenteredLaplacian, dim: 1 }
    }

    pub fn gaussian(dim: usize) -> Result<Self> {
        Self::new(FamilyKind::MultivariateGaussian, dim)
    }

    pub fn wishart(dim: usize) -> Result<Self> {
        Self::new(FamilyKind::Wishart, dim)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl std::fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(d={})", self.kind, self.dim)
    }
}

/// Natural parameter θ, housed as scalar/vector/matrix parts; parts a
/// family does not use are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalParameter {
    scalar: Option<f64>,
    vector: Option<DVector<f64>>,
    matrix: Option<DMatrix<f64>>,
}

impl NaturalParameter {
    /// Vector-only parameter (Bernoulli, multinoulli, Laplacian).
    pub fn from_vector(v: DVector<f64>) -> Self {
        NaturalParameter { scalar: None, vector: Some(v), matrix: None }
    }

    /// Gaussian parameter `(θ_v, θ_M)`.
    pub fn from_vector_matrix(v: DVector<f64>, m: DMatrix<f64>) -> Self {
        NaturalParameter { scalar: None, vector: Some(v), matrix: Some(m) }
    }

    /// Wishart parameter `(θ_s, θ_M)`.
    pub fn from_scalar_matrix(s: f64, m: DMatrix<f64>) -> Self {
        NaturalParameter { scalar: Some(s), vector: None, matrix: Some(m) }
    }

    pub fn scalar_part(&self) -> Option<f64> {
        self.scalar
    }

    pub fn vector_part(&self) -> Option<&DVector<f64>> {
        self.vector.as_ref()
    }

    pub fn matrix_part(&self) -> Option<&DMatrix<f64>> {
        self.matrix.as_ref()
    }

    /// True when the housed parts match what `fam` expects, shape-wise.
    pub fn shaped_for(&self, fam: FamilyDescriptor) -> bool {
        let d = fam.dim();
        match fam.kind() {
            FamilyKind::Bernoulli | FamilyKind::ZeroCenteredLaplacian => {
                self.scalar.is_none()
                    && self.matrix.is_none()
                    && self.vector.as_ref().is_some_and(|v| v.len() == 1)
            }
            FamilyKind::Multinoulli => {
                self.scalar.is_none()
                    && self.matrix.is_none()
                    && self.vector.as_ref().is_some_and(|v| v.len() == d - 1)
            }
            FamilyKind::MultivariateGaussian => {
                self.scalar.is_none()
                    && self.vector.as_ref().is_some_and(|v| v.len() == d)
                    && self.matrix.as_ref().is_some_and(|m| m.nrows() == d && m.ncols() == d)
            }
            FamilyKind::Wishart => {
                self.scalar.is_some()
                    && self.vector.is_none()
                    && self.matrix.as_ref().is_some_and(|m| m.nrows() == d && m.ncols() == d)
            }
        }
    }
}

/// Conventional (source) parameters of the five families.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceParameter {
    /// Success probability λ ∈ (0, 1).
    Bernoulli { lambda: f64 },
    /// Category probabilities on the open simplex, length d.
    Multinoulli { lambda: Vec<f64> },
    /// Scale σ > 0 of `p(x) = e^{-|x|/σ} / (2σ)`.
    Laplacian { sigma: f64 },
    /// Mean and positive-definite covariance.
    Gaussian { mean: DVector<f64>, covariance: DMatrix<f64> },
    /// Degrees of freedom and positive-definite scale matrix. The conic
    /// parameter space `θ_s > 0` pins `n > d + 1`.
    Wishart { dof: f64, scale: DMatrix<f64> },
}

/// A point of the family's support.
#[derive(Debug, Clone, PartialEq)]
pub enum SupportPoint {
    Scalar(f64),
    Vector(DVector<f64>),
    Matrix(DMatrix<f64>),
}

impl SupportPoint {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            SupportPoint::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&DVector<f64>> {
        match self {
            SupportPoint::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            SupportPoint::Matrix(m) => Some(m),
            _ => None,
        }
    }
}

/// Largest relative off-diagonal asymmetry of a square matrix.
pub(crate) fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let a = m[(i, j)];
            let b = m[(j, i)];
            let denom = a.abs().max(b.abs()).max(1.0);
            worst = worst.max((a - b).abs() / denom);
        }
    }
    worst
}

pub(crate) fn is_symmetric(m: &DMatrix<f64>) -> bool {
    m.is_square() && symmetry_defect(m) <= SYMMETRY_REL_TOL
}

pub(crate) fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Cholesky of a symmetric positive-definite matrix; `None` when the
/// symmetry test or a factor pivot fails.
pub(crate) fn spd_cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if !is_symmetric(m) {
        return None;
    }
    let chol = Cholesky::new(m.clone())?;
    let healthy = chol.l_dirty().diagonal().iter().all(|&p| p.is_finite() && p > 0.0);
    healthy.then_some(chol)
}

/// `log |M|` from the factor diagonal.
fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|&p| p.ln()).sum::<f64>()
}

/// Multivariate log-Gamma `ln Γ_d(x)` by the product formula.
pub fn mv_ln_gamma(d: usize, x: f64) -> f64 {
    let d_f = d as f64;
    let mut acc = d_f * (d_f - 1.0) / 4.0 * std::f64::consts::PI.ln();
    for j in 1..=d {
        acc += ln_gamma(x + (1.0 - j as f64) / 2.0);
    }
    acc
}

fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Cone membership. Total: malformed shapes simply are not in the cone.
pub fn in_cone(fam: FamilyDescriptor, theta: &NaturalParameter) -> bool {
    if !theta.shaped_for(fam) {
        return false;
    }
    match fam.kind() {
        FamilyKind::Bernoulli | FamilyKind::Multinoulli => all_finite(theta.vector_part().unwrap()),
        FamilyKind::ZeroCenteredLaplacian => {
            let t = theta.vector_part().unwrap()[0];
            t.is_finite() && t < 0.0
        }
        FamilyKind::MultivariateGaussian => {
            all_finite(theta.vector_part().unwrap())
                && spd_cholesky(theta.matrix_part().unwrap()).is_some()
        }
        FamilyKind::Wishart => {
            let s = theta.scalar_part().unwrap();
            s.is_finite() && s > 0.0 && spd_cholesky(theta.matrix_part().unwrap()).is_some()
        }
    }
}

fn cone_error(fam: FamilyDescriptor, what: &str) -> Error {
    Error::ConeViolation(format!("{fam}: {what}"))
}

/// Source → natural conversion. The returned θ always satisfies the cone
/// invariant; a source parameter outside its domain is rejected with an
/// error naming the offending field.
pub fn to_natural(fam: FamilyDescriptor, src: &SourceParameter) -> Result<NaturalParameter> {
    let d = fam.dim();
    match (fam.kind(), src) {
        (FamilyKind::Bernoulli, SourceParameter::Bernoulli { lambda }) => {
            if !(lambda.is_finite() && *lambda > 0.0 && *lambda < 1.0) {
                return Err(Error::ParameterDomain(format!(
                    "lambda must lie in (0,1), got {lambda}"
                )));
            }
            // log(λ / (1−λ))
            let theta = lambda.ln() - (-lambda).ln_1p();
            Ok(NaturalParameter::from_vector(DVector::from_element(1, theta)))
        }
        (FamilyKind::Multinoulli, SourceParameter::Multinoulli { lambda }) => {
            if lambda.len() != d {
                return Err(Error::ParameterDomain(format!(
                    "lambda has {} entries, family has {d} categories",
                    lambda.len()
                )));
            }
            if lambda.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
                return Err(Error::ParameterDomain(
                    "lambda entries must be strictly positive".into(),
                ));
            }
            let total: f64 = lambda.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::ParameterDomain(format!(
                    "lambda must sum to 1, got {total}"
                )));
            }
            let last = lambda[d - 1];
            let theta = DVector::from_iterator(d - 1, lambda[..d - 1].iter().map(|l| (l / last).ln()));
            Ok(NaturalParameter::from_vector(theta))
        }
        (FamilyKind::ZeroCenteredLaplacian, SourceParameter::Laplacian { sigma }) => {
            if !(sigma.is_finite() && *sigma > 0.0) {
                return Err(Error::ParameterDomain(format!("sigma must be > 0, got {sigma}")));
            }
            Ok(NaturalParameter::from_vector(DVector::from_element(1, -1.0 / sigma)))
        }
        (FamilyKind::MultivariateGaussian, SourceParameter::Gaussian { mean, covariance }) => {
            if mean.len() != d {
                return Err(Error::ParameterDomain(format!(
                    "mu has length {}, family dimension is {d}",
                    mean.len()
                )));
            }
            if !all_finite(mean) {
                return Err(Error::ParameterDomain("mu has non-finite entries".into()));
            }
            let chol = spd_cholesky(covariance).ok_or_else(|| {
                Error::ParameterDomain("sigma is not symmetric positive definite".into())
            })?;
            let theta_v = chol.solve(mean);
            let theta_m = symmetrized(&chol.inverse());
            Ok(NaturalParameter::from_vector_matrix(theta_v, theta_m))
        }
        (FamilyKind::Wishart, SourceParameter::Wishart { dof, scale }) => {
            let theta_s = (dof - d as f64 - 1.0) / 2.0;
            if !(dof.is_finite() && theta_s > 0.0) {
                return Err(Error::ParameterDomain(format!(
                    "n must exceed d+1 = {} for the conic parameter space, got {dof}",
                    d + 1
                )));
            }
            let chol = spd_cholesky(scale).ok_or_else(|| {
                Error::ParameterDomain("S is not symmetric positive definite".into())
            })?;
            let theta_m = symmetrized(&chol.inverse());
            Ok(NaturalParameter::from_scalar_matrix(theta_s, theta_m))
        }
        (kind, other) => Err(Error::ParameterDomain(format!(
            "source parameter {other:?} does not belong to the {kind} family"
        ))),
    }
}

/// Natural → source conversion, the inverse of [`to_natural`].
pub fn from_natural(fam: FamilyDescriptor, theta: &NaturalParameter) -> Result<SourceParameter> {
    if !in_cone(fam, theta) {
        return Err(cone_error(fam, "parameter outside the cone"));
    }
    let d = fam.dim();
    match fam.kind() {
        FamilyKind::Bernoulli => {
            let t = theta.vector_part().unwrap()[0];
            // λ = 1 / (1 + e^{-θ})
            let lambda = if t >= 0.0 { 1.0 / (1.0 + (-t).exp()) } else { t.exp() / (1.0 + t.exp()) };
            Ok(SourceParameter::Bernoulli { lambda })
        }
        FamilyKind::Multinoulli => {
            let t = theta.vector_part().unwrap();
            let m = t.iter().copied().fold(0.0_f64, f64::max);
            let denom = (-m).exp() + t.iter().map(|&x| (x - m).exp()).sum::<f64>();
            let mut lambda: Vec<f64> = t.iter().map(|&x| (x - m).exp() / denom).collect();
            lambda.push((-m).exp() / denom);
            Ok(SourceParameter::Multinoulli { lambda })
        }
        FamilyKind::ZeroCenteredLaplacian => {
            Ok(SourceParameter::Laplacian { sigma: -1.0 / theta.vector_part().unwrap()[0] })
        }
        FamilyKind::MultivariateGaussian => {
            let chol = spd_cholesky(theta.matrix_part().unwrap())
                .ok_or_else(|| cone_error(fam, "theta_m is not positive definite"))?;
            let mean = chol.solve(theta.vector_part().unwrap());
            let covariance = symmetrized(&chol.inverse());
            Ok(SourceParameter::Gaussian { mean, covariance })
        }
        FamilyKind::Wishart => {
            let chol = spd_cholesky(theta.matrix_part().unwrap())
                .ok_or_else(|| cone_error(fam, "theta_m is not positive definite"))?;
            let dof = 2.0 * theta.scalar_part().unwrap() + d as f64 + 1.0;
            let scale = symmetrized(&chol.inverse());
            Ok(SourceParameter::Wishart { dof, scale })
        }
    }
}

/// Log-partition function F(θ).
///
/// The Gaussian value is assembled from one factorization of `θ_M`: the
/// quadratic term through a triangular solve and the log-determinant from
/// the factor diagonal.
pub fn log_partition(fam: FamilyDescriptor, theta: &NaturalParameter) -> Result<f64> {
    if !theta.shaped_for(fam) {
        return Err(cone_error(fam, "parameter parts have the wrong shape"));
    }
    let d = fam.dim();
    match fam.kind() {
        FamilyKind::Bernoulli => {
            let t = theta.vector_part().unwrap()[0];
            if !t.is_finite() {
                return Err(cone_error(fam, "theta is not finite"));
            }
            // softplus(θ) = log(1 + e^θ)
            Ok(t.max(0.0) + (-t.abs()).exp().ln_1p())
        }
        FamilyKind::Multinoulli => {
            let t = theta.vector_part().unwrap();
            if !all_finite(t) {
                return Err(cone_error(fam, "theta is not finite"));
            }
            let m = t.iter().copied().fold(0.0_f64, f64::max);
            let sum = (-m).exp() + t.iter().map(|&x| (x - m).exp()).sum::<f64>();
            Ok(m + sum.ln())
        }
        FamilyKind::ZeroCenteredLaplacian => {
            let t = theta.vector_part().unwrap()[0];
            if !(t.is_finite() && t < 0.0) {
                return Err(cone_error(fam, "theta must be negative"));
            }
            Ok(2.0_f64.ln() - (-t).ln())
        }
        FamilyKind::MultivariateGaussian => {
            let v = theta.vector_part().unwrap();
            if !all_finite(v) {
                return Err(cone_error(fam, "theta_v is not finite"));
            }
            let chol = spd_cholesky(theta.matrix_part().unwrap())
                .ok_or_else(|| cone_error(fam, "theta_m is not positive definite"))?;
            let solved = chol.solve(v);
            let quad = v.dot(&solved);
            Ok(0.5 * quad - 0.5 * log_det(&chol)
                + d as f64 / 2.0 * (2.0 * std::f64::consts::PI).ln())
        }
        FamilyKind::Wishart => {
            let s = theta.scalar_part().unwrap();
            if !(s.is_finite() && s > 0.0) {
                return Err(cone_error(fam, "theta_s must be positive"));
            }
            let chol = spd_cholesky(theta.matrix_part().unwrap())
                .ok_or_else(|| cone_error(fam, "theta_m is not positive definite"))?;
            let d_f = d as f64;
            let half = s + (d_f + 1.0) / 2.0;
            Ok((2.0 * s + d_f + 1.0) * d_f / 2.0 * 2.0_f64.ln() - half * log_det(&chol)
                + mv_ln_gamma(d, half))
        }
    }
}

/// Componentwise `Σ α_i θ_i` for non-negative weights, with per-input cone
/// checks and a defensive cone check on the result.
pub fn linear_combination(
    fam: FamilyDescriptor,
    thetas: &[&NaturalParameter],
    alphas: &[f64],
) -> Result<NaturalParameter> {
    if thetas.is_empty() || thetas.len() != alphas.len() {
        return Err(Error::ParameterDomain(
            "linear combination needs equally many parameters and weights, at least one".into(),
        ));
    }
    if alphas.iter().any(|&a| !(a.is_finite() && a >= 0.0)) {
        return Err(Error::ParameterDomain("combination weights must be non-negative".into()));
    }
    if alphas.iter().all(|&a| a == 0.0) {
        return Err(Error::ParameterDomain("combination weights must not all be zero".into()));
    }
    for theta in thetas {
        if !in_cone(fam, theta) {
            return Err(cone_error(fam, "combination input outside the cone"));
        }
    }
    let combined = combine_unchecked(thetas, alphas);
    if !in_cone(fam, &combined) {
        return Err(Error::InternalInvariant(format!(
            "{fam}: cone not closed under a non-negative combination"
        )));
    }
    Ok(combined)
}

/// The raw componentwise combination; callers guarantee the inputs are in
/// the cone. Factorization failures downstream still surface violations.
pub(crate) fn combine_unchecked(thetas: &[&NaturalParameter], alphas: &[f64]) -> NaturalParameter {
    let first = thetas[0];
    let scalar = first.scalar_part().map(|_| {
        thetas
            .iter()
            .zip(alphas)
            .map(|(t, &a)| a * t.scalar_part().unwrap())
            .sum::<f64>()
    });
    let vector = first.vector_part().map(|v0| {
        let mut acc = DVector::zeros(v0.len());
        for (t, &a) in thetas.iter().zip(alphas) {
            if a != 0.0 {
                acc.axpy(a, t.vector_part().unwrap(), 1.0);
            }
        }
        acc
    });
    let matrix = first.matrix_part().map(|m0| {
        let mut acc = DMatrix::zeros(m0.nrows(), m0.ncols());
        for (t, &a) in thetas.iter().zip(alphas) {
            if a != 0.0 {
                acc += t.matrix_part().unwrap() * a;
            }
        }
        acc
    });
    NaturalParameter { scalar, vector, matrix }
}

fn support_error(fam: FamilyDescriptor, what: &str) -> Error {
    Error::Support(format!("{fam}: {what}"))
}

/// Log-density `t(x)·θ − F(θ)` at a support point.
pub fn log_density(
    fam: FamilyDescriptor,
    theta: &NaturalParameter,
    x: &SupportPoint,
) -> Result<f64> {
    let pairing = sufficient_pairing(fam, theta, x)?;
    Ok(pairing - log_partition(fam, theta)?)
}

/// The inner product `t(x)·θ` of the sufficient statistic with θ.
pub(crate) fn sufficient_pairing(
    fam: FamilyDescriptor,
    theta: &NaturalParameter,
    x: &SupportPoint,
) -> Result<f64> {
    if !theta.shaped_for(fam) {
        return Err(cone_error(fam, "parameter parts have the wrong shape"));
    }
    let d = fam.dim();
    match fam.kind() {
        FamilyKind::Bernoulli => {
            let xv = x.as_scalar().ok_or_else(|| support_error(fam, "expected a scalar"))?;
            if xv != 0.0 && xv != 1.0 {
                return Err(support_error(fam, "support is {0, 1}"));
            }
            Ok(xv * theta.vector_part().unwrap()[0])
        }
        FamilyKind::Multinoulli => {
            let xv = x.as_vector().ok_or_else(|| support_error(fam, "expected a vector"))?;
            let one_hot = xv.len() == d
                && xv.iter().all(|&e| e == 0.0 || e == 1.0)
                && xv.iter().sum::<f64>() == 1.0;
            if !one_hot {
                return Err(support_error(fam, "support is the set of one-hot vectors"));
            }
            let t = theta.vector_part().unwrap();
            Ok((0..d - 1).map(|i| xv[i] * t[i]).sum())
        }
        FamilyKind::ZeroCenteredLaplacian => {
            let xv = x.as_scalar().ok_or_else(|| support_error(fam, "expected a scalar"))?;
            if !xv.is_finite() {
                return Err(support_error(fam, "point is not finite"));
            }
            Ok(xv.abs() * theta.vector_part().unwrap()[0])
        }
        FamilyKind::MultivariateGaussian => {
            let xv = x.as_vector().ok_or_else(|| support_error(fam, "expected a vector"))?;
            if xv.len() != d || !all_finite(xv) {
                return Err(support_error(fam, "point must be a finite vector of length d"));
            }
            let v = theta.vector_part().unwrap();
            let m = theta.matrix_part().unwrap();
            Ok(v.dot(xv) - 0.5 * xv.dot(&(m * xv)))
        }
        FamilyKind::Wishart => {
            let xm = x.as_matrix().ok_or_else(|| support_error(fam, "expected a matrix"))?;
            if xm.nrows() != d || xm.ncols() != d {
                return Err(support_error(fam, "matrix has the wrong side"));
            }
            let chol = spd_cholesky(xm)
                .ok_or_else(|| support_error(fam, "support is the positive-definite cone"))?;
            let m = theta.matrix_part().unwrap();
            let trace = m.iter().zip(xm.iter()).map(|(a, b)| a * b).sum::<f64>();
            Ok(theta.scalar_part().unwrap() * log_det(&chol) - 0.5 * trace)
        }
    }
}

/// Every support point of a finite-support family, in a fixed order.
pub fn support_points(fam: FamilyDescriptor) -> Option<Vec<SupportPoint>> {
    match fam.kind() {
        FamilyKind::Bernoulli => {
            Some(vec![SupportPoint::Scalar(0.0), SupportPoint::Scalar(1.0)])
        }
        FamilyKind::Multinoulli => {
            let d = fam.dim();
            Some(
                (0..d)
                    .map(|j| {
                        let mut v = DVector::zeros(d);
                        v[j] = 1.0;
                        SupportPoint::Vector(v)
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}
