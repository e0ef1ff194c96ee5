//! The closed-form engine.
//!
//! Powers of a mixture `m = Σ_i w_i p_{θ_i}` expand by the multinomial
//! theorem into `C(k+α−1, α)` terms, each a weighted geometric integral
//! `I(θs; αs) = exp(F(Σ α_i θ_i) − Σ α_i F(θ_i))` of same-family densities.
//! Everything here — mixture `L_α` norms, the distances `M_α`, `D_α`,
//! `L_α`, the Cauchy-Schwarz divergence and the Minkowski diversity
//! index — is assembled from those terms in signed log-domain arithmetic.
//!
//! `M_α` (even α) additionally rewrites `|m − m'|^α = ((m − m')²)^{α/2}`
//! and expands the square into product densities with signed coefficients,
//! so its accumulation can cancel; the cancellation policy treats a signed
//! result smaller than `1e-10` of the positive mass as an exact zero and
//! anything more negative as an error.

use crate::combinatorics::{
    composition_count, ln_factorial_table, WeakCompositions, DEFAULT_TERM_CAP,
};
use crate::expfam::{self, FamilyDescriptor, NaturalParameter, SourceParameter, SupportPoint};
use crate::signedlog::{log_sum_exp2, SignedLogAccumulator, SignedLogValue};
use crate::{Error, Result};

use num_traits::ToPrimitive;

/// Relative tolerance of the cancellation policy: signed residuals below
/// this fraction of the positive mass collapse to zero, residuals more
/// negative than it raise [`Error::Cancellation`].
pub const CANCELLATION_REL_TOL: f64 = 1e-10;

/// Tolerance on `Σ w_i − 1` for a mixture to count as normalized.
const NORMALIZATION_TOL: f64 = 1e-12;

/// Knobs of the expansion engine.
#[derive(Debug, Clone)]
pub struct EngineOptions {
    /// Hard cap on enumerated expansion terms per integral.
    pub term_cap: u64,
    /// Worker threads consuming contiguous index ranges of the composition
    /// stream. The result is independent of this within 1e-13 relative.
    pub workers: usize,
    /// Merge product components with exactly equal natural parameters
    /// before the `M_α` power expansion.
    pub merge_products: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { term_cap: DEFAULT_TERM_CAP, workers: 1, merge_products: false }
    }
}

/// A closed-form result together with the number of expansion terms it
/// consumed.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForm {
    pub value: f64,
    pub terms: u64,
}

/// A finite positive mixture over one conic exponential family.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    family: FamilyDescriptor,
    weights: Vec<f64>,
    thetas: Vec<NaturalParameter>,
    normalized: bool,
}

impl MixtureModel {
    /// Validates weights (positive, finite) and parameters (in the cone).
    pub fn new(
        family: FamilyDescriptor,
        components: Vec<(f64, NaturalParameter)>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ParameterDomain("a mixture needs at least one component".into()));
        }
        let mut weights = Vec::with_capacity(components.len());
        let mut thetas = Vec::with_capacity(components.len());
        for (i, (w, theta)) in components.into_iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::ParameterDomain(format!(
                    "component {i}: weight must be positive and finite, got {w}"
                )));
            }
            if !expfam::in_cone(family, &theta) {
                return Err(Error::ConeViolation(format!(
                    "component {i} of a {family} mixture"
                )));
            }
            weights.push(w);
            thetas.push(theta);
        }
        let total: f64 = weights.iter().sum();
        let normalized = (total - 1.0).abs() <= NORMALIZATION_TOL;
        Ok(MixtureModel { family, weights, thetas, normalized })
    }

    /// Builds from source parameters.
    pub fn from_source(
        family: FamilyDescriptor,
        components: Vec<(f64, SourceParameter)>,
    ) -> Result<Self> {
        let naturals = components
            .into_iter()
            .map(|(w, src)| Ok((w, expfam::to_natural(family, &src)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(family, naturals)
    }

    pub fn family(&self) -> FamilyDescriptor {
        self.family
    }

    /// Number of components k.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one component
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn thetas(&self) -> &[NaturalParameter] {
        &self.thetas
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, &NaturalParameter)> {
        self.weights.iter().copied().zip(self.thetas.iter())
    }

    /// True iff Σ w_i = 1 within 1e-12.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The positive mixture λ·m.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::ParameterDomain(format!("scale must be positive, got {lambda}")));
        }
        let comps = self.components().map(|(w, t)| (w * lambda, t.clone())).collect();
        Self::new(self.family, comps)
    }

    /// The sum mixture m + m′ (weights concatenated).
    pub fn concat(&self, other: &Self) -> Result<Self> {
        check_same_family(self, other)?;
        let comps = self.components().chain(other.components()).map(|(w, t)| (w, t.clone()));
        Self::new(self.family, comps.collect())
    }

    /// `log m(x)`, a log-sum-exp over component log-densities.
    pub fn log_density(&self, x: &SupportPoint) -> Result<f64> {
        let mut acc = f64::NEG_INFINITY;
        for (w, theta) in self.components() {
            let ld = expfam::log_density(self.family, theta, x)?;
            acc = log_sum_exp2(acc, w.ln() + ld);
        }
        Ok(acc)
    }

    pub fn density(&self, x: &SupportPoint) -> Result<f64> {
        Ok(self.log_density(x)?.exp())
    }
}

fn check_same_family(m: &MixtureModel, m2: &MixtureModel) -> Result<()> {
    if m.family != m2.family {
        return Err(Error::ParameterDomain(format!(
            "mixtures belong to different families: {} vs {}",
            m.family, m2.family
        )));
    }
    Ok(())
}

/// Which statistical distance to compute, with its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    /// `M_α(m, m') = ‖m − m'‖_α`; closed form for even integers α ≥ 2.
    Minkowski(u32),
    /// `D_α(m, m') = ‖m‖_α + ‖m'‖_α − ‖m + m'‖_α`; integers α ≥ 2.
    Difference(u32),
    /// `L_α(m, m') = log((‖m‖_α + ‖m'‖_α) / ‖m + m'‖_α)`; integers α ≥ 2.
    LogRatio(u32),
    /// Cauchy-Schwarz divergence; α fixed at 2.
    CauchySchwarz,
    /// Total variation `½ ∫ |m − m'|`; α fixed at 1, oracle only.
    TotalVariation,
}

impl DistanceKind {
    pub fn alpha(&self) -> u32 {
        match self {
            DistanceKind::Minkowski(a) | DistanceKind::Difference(a) | DistanceKind::LogRatio(a) => {
                *a
            }
            DistanceKind::CauchySchwarz => 2,
            DistanceKind::TotalVariation => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DistanceKind::Minkowski(a) => format!("M_{a}"),
            DistanceKind::Difference(a) => format!("D_{a}"),
            DistanceKind::LogRatio(a) => format!("L_{a}"),
            DistanceKind::CauchySchwarz => "CS".into(),
            DistanceKind::TotalVariation => "TV".into(),
        }
    }

    /// Parity/range rules of the closed-form engine.
    pub fn closed_form_supported(&self) -> bool {
        match self {
            DistanceKind::Minkowski(a) => *a >= 2 && a % 2 == 0,
            DistanceKind::Difference(a) | DistanceKind::LogRatio(a) => *a >= 2,
            DistanceKind::CauchySchwarz => true,
            DistanceKind::TotalVariation => false,
        }
    }

    fn require_closed_form(&self) -> Result<()> {
        if self.closed_form_supported() {
            return Ok(());
        }
        let why = match self {
            DistanceKind::Minkowski(_) => {
                format!("{} needs an even integer exponent ≥ 2", self.label())
            }
            DistanceKind::TotalVariation => "TV has no closed form for mixtures".into(),
            _ => format!("{} needs an integer exponent ≥ 2", self.label()),
        };
        Err(Error::UnsupportedExponent(why))
    }
}

/// One summand of `(m − m')²` written as `coeff · p_θ`: a product of two
/// component densities renormalized to a density of the same family.
#[derive(Debug, Clone)]
pub struct ProductComponent {
    pub coeff: SignedLogValue,
    pub theta: NaturalParameter,
}

/// `log I(θs; αs) = F(Σ α_i θ_i) − Σ α_i F(θ_i)`, the log of the weighted
/// geometric integral `∫ Π p_{θ_i}(x)^{α_i} dμ(x)`.
pub fn log_geometric_integral(
    fam: FamilyDescriptor,
    thetas: &[&NaturalParameter],
    alphas: &[f64],
) -> Result<f64> {
    let combined = expfam::linear_combination(fam, thetas, alphas)?;
    let mut log_i = expfam::log_partition(fam, &combined)?;
    for (theta, &a) in thetas.iter().zip(alphas) {
        if a != 0.0 {
            log_i -= a * expfam::log_partition(fam, theta)?;
        }
    }
    Ok(log_i)
}

/// Jensen diversity `J_F(θs; αs) = Σ α_i F(θ_i) − F(Σ α_i θ_i)`.
///
/// Non-negative when the weights lie on the simplex; the generalized form
/// for arbitrary non-negative weights may be negative.
pub fn jensen_diversity(
    fam: FamilyDescriptor,
    thetas: &[&NaturalParameter],
    alphas: &[f64],
) -> Result<f64> {
    Ok(-log_geometric_integral(fam, thetas, alphas)?)
}

/// Shared scaffolding of every multinomial expansion: enumerate the weak
/// compositions of `alpha` into `k` parts (splitting the stream across
/// workers by contiguous index ranges) and fold the per-term signed
/// log-values into one accumulator, partials merged in worker order.
fn expansion_sum<F>(
    alpha: u32,
    k: usize,
    opts: &EngineOptions,
    term: F,
) -> Result<(SignedLogAccumulator, u64)>
where
    F: Fn(&[u32]) -> Result<SignedLogValue> + Sync,
{
    let count = composition_count(alpha, k);
    if count > num_bigint::BigUint::from(opts.term_cap) {
        return Err(Error::Budget { required: count, cap: opts.term_cap });
    }
    let total = count.to_u64().expect("count fits u64 under the cap");

    const MIN_RANGE: u64 = 64;
    let workers = opts.workers.max(1).min((total / MIN_RANGE).max(1) as usize);
    if workers <= 1 {
        let mut acc = SignedLogAccumulator::new();
        let mut stream = WeakCompositions::new(alpha, k);
        while let Some(parts) = stream.next_parts() {
            acc.add(term(parts)?);
        }
        return Ok((acc, total));
    }

    let term = &term;
    let partials: Vec<Result<SignedLogAccumulator>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                scope.spawn(move || {
                    let start = total * w / workers as u64;
                    let end = total * (w + 1) / workers as u64;
                    let mut acc = SignedLogAccumulator::new();
                    let mut stream = WeakCompositions::range(alpha, k, start, end);
                    while let Some(parts) = stream.next_parts() {
                        acc.add(term(parts)?);
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("expansion worker panicked")).collect()
    });

    let mut merged = SignedLogAccumulator::new();
    for partial in partials {
        merged.merge(&partial?);
    }
    Ok((merged, total))
}

/// `log ∫ m(x)^α dμ(x)` for integer α ≥ 1 by the multinomial expansion,
/// plus the number of composition terms consumed.
pub fn log_mixture_power_integral(
    m: &MixtureModel,
    alpha: u32,
    opts: &EngineOptions,
) -> Result<(f64, u64)> {
    if alpha == 0 {
        return Err(Error::UnsupportedExponent("mixture power needs α ≥ 1".into()));
    }
    let k = m.len();
    if alpha == 1 {
        // Each component integrates to one.
        return Ok((m.total_weight().ln(), k as u64));
    }
    let fam = m.family;
    let log_w: Vec<f64> = m.weights.iter().map(|w| w.ln()).collect();
    let f_theta: Vec<f64> =
        m.thetas.iter().map(|t| expfam::log_partition(fam, t)).collect::<Result<_>>()?;
    let lf = ln_factorial_table(alpha);
    let theta_refs: Vec<&NaturalParameter> = m.thetas.iter().collect();

    let term = |parts: &[u32]| -> Result<SignedLogValue> {
        let mut log_term = lf[alpha as usize];
        let mut alphas = vec![0.0_f64; k];
        for (j, &p) in parts.iter().enumerate() {
            if p > 0 {
                alphas[j] = f64::from(p);
                log_term += f64::from(p) * (log_w[j] - f_theta[j]) - lf[p as usize];
            }
        }
        let combined = expfam::combine_unchecked(&theta_refs, &alphas);
        log_term += expfam::log_partition(fam, &combined)?;
        Ok(SignedLogValue::from_log(log_term))
    };

    let (acc, terms) = expansion_sum(alpha, k, opts, term)?;
    Ok((acc.total().log_mag(), terms))
}

/// `‖m‖_α = (∫ m^α dμ)^{1/α}` for integer α ≥ 1, in closed form.
pub fn mixture_lp_norm(m: &MixtureModel, alpha: u32, opts: &EngineOptions) -> Result<ClosedForm> {
    let (log_integral, terms) = log_mixture_power_integral(m, alpha, opts)?;
    Ok(ClosedForm { value: (log_integral / f64::from(alpha)).exp(), terms })
}

/// `log ⟨m, m'⟩ = log Σ_{i,j} w_i w'_j I(θ_i, θ'_j; 1, 1)`.
pub fn log_inner_product(m: &MixtureModel, m2: &MixtureModel) -> Result<f64> {
    check_same_family(m, m2)?;
    let fam = m.family;
    let f_m: Vec<f64> =
        m.thetas.iter().map(|t| expfam::log_partition(fam, t)).collect::<Result<_>>()?;
    let f_m2: Vec<f64> =
        m2.thetas.iter().map(|t| expfam::log_partition(fam, t)).collect::<Result<_>>()?;
    let mut acc = SignedLogAccumulator::new();
    for (i, (w, theta)) in m.components().enumerate() {
        for (j, (w2, theta2)) in m2.components().enumerate() {
            let combined = expfam::combine_unchecked(&[theta, theta2], &[1.0, 1.0]);
            let log_i = expfam::log_partition(fam, &combined)? - f_m[i] - f_m2[j];
            acc.add_log(1, w.ln() + w2.ln() + log_i);
        }
    }
    Ok(acc.total().log_mag())
}

/// Expands `(m − m')²` into product components `Σ_l c_l p_{θ_l}`: one term
/// per ordered pair over the signed concatenation of the two mixtures,
/// `θ_l` the sum of the pair's parameters and `c_l` carrying the pair's
/// weights, signs and the geometric integral of the two densities.
///
/// With `opts.merge_products`, terms whose parameters compare exactly equal
/// are folded together; sign bookkeeping stays exact either way.
pub fn product_expand(
    m: &MixtureModel,
    m2: &MixtureModel,
    opts: &EngineOptions,
) -> Result<Vec<ProductComponent>> {
    check_same_family(m, m2)?;
    let fam = m.family;
    let signed: Vec<(SignedLogValue, &NaturalParameter)> = m
        .components()
        .map(|(w, t)| (SignedLogValue::from_value(w), t))
        .chain(m2.components().map(|(w, t)| (SignedLogValue::from_value(-w), t)))
        .collect();
    let f_all: Vec<f64> =
        signed.iter().map(|(_, t)| expfam::log_partition(fam, t)).collect::<Result<_>>()?;

    let mut comps: Vec<ProductComponent> = Vec::with_capacity(signed.len() * signed.len());
    for (a, (wa, ta)) in signed.iter().enumerate() {
        for (b, (wb, tb)) in signed.iter().enumerate() {
            let theta = expfam::combine_unchecked(&[ta, tb], &[1.0, 1.0]);
            let log_i = expfam::log_partition(fam, &theta)? - f_all[a] - f_all[b];
            let coeff = wa.mul(wb).mul(&SignedLogValue::from_log(log_i));
            if opts.merge_products {
                if let Some(existing) = comps.iter_mut().find(|c| c.theta == theta) {
                    existing.coeff = existing.coeff.add(&coeff);
                    continue;
                }
            }
            comps.push(ProductComponent { coeff, theta });
        }
    }
    Ok(comps)
}

/// Result of a signed power integral: the signed total, the positive mass
/// it is judged against, and the composition terms consumed.
#[derive(Debug, Clone, Copy)]
pub struct SignedPowerIntegral {
    pub value: SignedLogValue,
    pub log_positive_mass: f64,
    pub terms: u64,
}

/// `∫ (Σ_l c_l p_{θ_l})^β dμ` for integer β ≥ 1 by multinomial expansion
/// over the (not necessarily positive) coefficients.
pub fn signed_power_integral(
    fam: FamilyDescriptor,
    comps: &[ProductComponent],
    beta: u32,
    opts: &EngineOptions,
) -> Result<SignedPowerIntegral> {
    if beta == 0 || comps.is_empty() {
        return Err(Error::UnsupportedExponent("signed power integral needs β ≥ 1".into()));
    }
    let big_k = comps.len();
    let f_theta: Vec<f64> =
        comps.iter().map(|c| expfam::log_partition(fam, &c.theta)).collect::<Result<_>>()?;
    let lf = ln_factorial_table(beta);
    let theta_refs: Vec<&NaturalParameter> = comps.iter().map(|c| &c.theta).collect();

    let term = |parts: &[u32]| -> Result<SignedLogValue> {
        let mut sign: i8 = 1;
        let mut log_term = lf[beta as usize];
        let mut alphas = vec![0.0_f64; big_k];
        for (l, &p) in parts.iter().enumerate() {
            if p == 0 {
                continue;
            }
            alphas[l] = f64::from(p);
            let c = &comps[l].coeff;
            match c.sign() {
                0 => return Ok(SignedLogValue::ZERO),
                -1 if p % 2 == 1 => sign = -sign,
                _ => {}
            }
            log_term += f64::from(p) * (c.log_mag() - f_theta[l]) - lf[p as usize];
        }
        let combined = expfam::combine_unchecked(&theta_refs, &alphas);
        log_term += expfam::log_partition(fam, &combined)?;
        Ok(SignedLogValue::new(sign, log_term))
    };

    let (acc, terms) = expansion_sum(beta, big_k, opts, term)?;
    Ok(SignedPowerIntegral {
        value: acc.total(),
        log_positive_mass: acc.log_positive_mass(),
        terms,
    })
}

/// Clamps a mathematically non-negative value: small negatives (relative to
/// `scale`) are round-off and collapse to zero, large ones are bugs.
fn clamp_non_negative(raw: f64, scale: f64) -> Result<f64> {
    if raw >= 0.0 {
        Ok(raw)
    } else if -raw <= CANCELLATION_REL_TOL * scale {
        Ok(0.0)
    } else {
        Err(Error::Cancellation { residual: raw, positive: scale })
    }
}

/// Closed-form distance between same-family mixtures.
///
/// `D_α`/`L_α` take any integer α ≥ 2, `M_α` even α ≥ 2, `CS` is fixed at
/// α = 2; total variation and odd/real Minkowski exponents are refused and
/// belong to the oracle.
pub fn closed_form_distance(
    kind: DistanceKind,
    m: &MixtureModel,
    m2: &MixtureModel,
    opts: &EngineOptions,
) -> Result<ClosedForm> {
    check_same_family(m, m2)?;
    kind.require_closed_form()?;
    match kind {
        DistanceKind::Minkowski(alpha) => {
            let comps = product_expand(m, m2, opts)?;
            let spi = signed_power_integral(m.family, &comps, alpha / 2, opts)?;
            let value = match spi.value.sign() {
                0 => 0.0,
                sign => {
                    let log_rel = spi.value.log_mag() - spi.log_positive_mass;
                    if log_rel <= CANCELLATION_REL_TOL.ln() {
                        // Below the accumulation noise floor: exactly zero.
                        0.0
                    } else if sign > 0 {
                        (spi.value.log_mag() / f64::from(alpha)).exp()
                    } else {
                        return Err(Error::Cancellation {
                            residual: -spi.value.log_mag().exp(),
                            positive: spi.log_positive_mass.exp(),
                        });
                    }
                }
            };
            Ok(ClosedForm { value, terms: spi.terms })
        }
        DistanceKind::Difference(alpha) => {
            let (log_a, t_a) = log_mixture_power_integral(m, alpha, opts)?;
            let (log_b, t_b) = log_mixture_power_integral(m2, alpha, opts)?;
            let sum = m.concat(m2)?;
            let (log_c, t_c) = log_mixture_power_integral(&sum, alpha, opts)?;
            let a = (log_a / f64::from(alpha)).exp();
            let b = (log_b / f64::from(alpha)).exp();
            let c = (log_c / f64::from(alpha)).exp();
            let value = clamp_non_negative(a + b - c, a + b)?;
            Ok(ClosedForm { value, terms: t_a + t_b + t_c })
        }
        DistanceKind::LogRatio(alpha) => {
            // Stays in the log domain end to end.
            let (log_a, t_a) = log_mixture_power_integral(m, alpha, opts)?;
            let (log_b, t_b) = log_mixture_power_integral(m2, alpha, opts)?;
            let sum = m.concat(m2)?;
            let (log_c, t_c) = log_mixture_power_integral(&sum, alpha, opts)?;
            let inv_alpha = 1.0 / f64::from(alpha);
            let raw = log_sum_exp2(log_a * inv_alpha, log_b * inv_alpha) - log_c * inv_alpha;
            let value = clamp_non_negative(raw, 1.0)?;
            Ok(ClosedForm { value, terms: t_a + t_b + t_c })
        }
        DistanceKind::CauchySchwarz => {
            let log_ip = log_inner_product(m, m2)?;
            let (log_a, t_a) = log_mixture_power_integral(m, 2, opts)?;
            let (log_b, t_b) = log_mixture_power_integral(m2, 2, opts)?;
            let raw = -log_ip + 0.5 * log_a + 0.5 * log_b;
            let value = clamp_non_negative(raw, 1.0)?;
            let terms = (m.len() * m2.len()) as u64 + t_a + t_b;
            Ok(ClosedForm { value, terms })
        }
        DistanceKind::TotalVariation => unreachable!("refused by require_closed_form"),
    }
}

/// Minkowski diversity index `Σ w_i ‖p_i‖_α − ‖Σ w_i p_i‖_α` of a weighted
/// set of same-family densities (each itself a mixture with a closed-form
/// norm), for integer α ≥ 2.
pub fn minkowski_diversity(
    densities: &[MixtureModel],
    weights: &[f64],
    alpha: u32,
    opts: &EngineOptions,
) -> Result<ClosedForm> {
    if densities.is_empty() || densities.len() != weights.len() {
        return Err(Error::ParameterDomain(
            "diversity needs equally many densities and weights, at least one".into(),
        ));
    }
    if alpha < 2 {
        return Err(Error::UnsupportedExponent("diversity index needs integer α ≥ 2".into()));
    }
    if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
        return Err(Error::ParameterDomain("diversity weights must be positive".into()));
    }
    let family = densities[0].family;
    let mut terms = 0u64;
    let mut weighted_norms = 0.0;
    let mut pooled: Vec<(f64, NaturalParameter)> = Vec::new();
    for (density, &w) in densities.iter().zip(weights) {
        if density.family != family {
            return Err(Error::ParameterDomain(
                "diversity densities must share one family".into(),
            ));
        }
        let norm = mixture_lp_norm(density, alpha, opts)?;
        weighted_norms += w * norm.value;
        terms += norm.terms;
        pooled.extend(density.components().map(|(wc, t)| (w * wc, t.clone())));
    }
    let pooled_norm = mixture_lp_norm(&MixtureModel::new(family, pooled)?, alpha, opts)?;
    terms += pooled_norm.terms;
    let value = clamp_non_negative(weighted_norms - pooled_norm.value, weighted_norms)?;
    Ok(ClosedForm { value, terms })
}
