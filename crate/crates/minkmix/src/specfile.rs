//! Mixture specification documents.
//!
//! A mixture is described by one JSON document: the family (kind plus
//! dimension), whether components are given in source or natural
//! parameterization, and the weighted component list. Matrices are
//! row-major nested arrays; asymmetry beyond 1e-12 relative is an error
//! and anything smaller is symmetrized on ingestion. Validation errors
//! name the offending field (`components[2].params.sigma`).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::expfam::{
    self, FamilyDescriptor, FamilyKind, NaturalParameter, SourceParameter,
};
use crate::minkdist::MixtureModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameterization {
    Source,
    Natural,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub weight: f64,
    pub params: Value,
}

/// One mixture per document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub family: FamilySpec,
    pub parameterization: Parameterization,
    pub components: Vec<ComponentSpec>,
}

fn spec_err(field: &str, what: impl std::fmt::Display) -> Error {
    Error::Spec(format!("{field}: {what}"))
}

fn parse_kind(kind: &str) -> Result<FamilyKind> {
    match kind {
        "bernoulli" => Ok(FamilyKind::Bernoulli),
        "multinoulli" => Ok(FamilyKind::Multinoulli),
        "laplacian" => Ok(FamilyKind::ZeroCenteredLaplacian),
        "gaussian" => Ok(FamilyKind::MultivariateGaussian),
        "wishart" => Ok(FamilyKind::Wishart),
        other => Err(spec_err(
            "family.kind",
            format!(
                "unknown kind {other:?}; expected bernoulli, multinoulli, laplacian, gaussian or wishart"
            ),
        )),
    }
}

fn kind_name(kind: FamilyKind) -> &'static str {
    match kind {
        FamilyKind::Bernoulli => "bernoulli",
        FamilyKind::Multinoulli => "multinoulli",
        FamilyKind::ZeroCenteredLaplacian => "laplacian",
        FamilyKind::MultivariateGaussian => "gaussian",
        FamilyKind::Wishart => "wishart",
    }
}

fn field_f64(params: &Value, field: &str, ctx: &str) -> Result<f64> {
    params
        .get(field)
        .ok_or_else(|| spec_err(&format!("{ctx}.{field}"), "missing"))?
        .as_f64()
        .ok_or_else(|| spec_err(&format!("{ctx}.{field}"), "expected a number"))
}

fn field_vector(params: &Value, field: &str, ctx: &str) -> Result<DVector<f64>> {
    let arr = params
        .get(field)
        .ok_or_else(|| spec_err(&format!("{ctx}.{field}"), "missing"))?
        .as_array()
        .ok_or_else(|| spec_err(&format!("{ctx}.{field}"), "expected an array of numbers"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, v) in arr.iter().enumerate() {
        out.push(
            v.as_f64()
                .ok_or_else(|| spec_err(&format!("{ctx}.{field}[{i}]"), "expected a number"))?,
        );
    }
    Ok(DVector::from_vec(out))
}

/// Row-major square matrix; validated symmetric within 1e-12 relative,
/// then exactly symmetrized.
fn field_matrix(params: &Value, field: &str, ctx: &str) -> Result<DMatrix<f64>> {
    let rows = params
        .get(field)
        .ok_or_else(|| spec_err(&format!("{ctx}.{field}"), "missing"))?
        .as_array()
        .ok_or_else(|| spec_err(&format!("{ctx}.{field}"), "expected an array of rows"))?;
    let n = rows.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| spec_err(&format!("{ctx}.{field}[{i}]"), "expected a row array"))?;
        if row.len() != n {
            return Err(spec_err(
                &format!("{ctx}.{field}[{i}]"),
                format!("row has {} entries in a {n}x{n} matrix", row.len()),
            ));
        }
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = v.as_f64().ok_or_else(|| {
                spec_err(&format!("{ctx}.{field}[{i}][{j}]"), "expected a number")
            })?;
        }
    }
    let defect = expfam::symmetry_defect(&m);
    if defect > 1e-12 {
        return Err(spec_err(
            &format!("{ctx}.{field}"),
            format!("matrix asymmetry {defect:.3e} exceeds 1e-12 relative"),
        ));
    }
    Ok(expfam::symmetrized(&m))
}

fn matrix_rows(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| m[(i, j)].into()).collect()))
            .collect(),
    )
}

fn vector_entries(v: &DVector<f64>) -> Value {
    Value::Array(v.iter().map(|&x| x.into()).collect())
}

impl MixtureSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization is infallible")
    }

    /// Infers the family dimension from the first component when the
    /// document leaves it out.
    fn resolve_dim(&self, kind: FamilyKind) -> Result<usize> {
        if let Some(dim) = self.family.dim {
            return Ok(dim);
        }
        let first = self
            .components
            .first()
            .ok_or_else(|| spec_err("components", "at least one component required"))?;
        let ctx = "components[0].params";
        let dim = match (kind, self.parameterization) {
            (FamilyKind::Bernoulli | FamilyKind::ZeroCenteredLaplacian, _) => 1,
            (FamilyKind::Multinoulli, Parameterization::Source) => {
                field_vector(&first.params, "lambda", ctx)?.len()
            }
            (FamilyKind::Multinoulli, Parameterization::Natural) => {
                field_vector(&first.params, "theta_v", ctx)?.len() + 1
            }
            (FamilyKind::MultivariateGaussian, Parameterization::Source) => {
                field_vector(&first.params, "mu", ctx)?.len()
            }
            (FamilyKind::MultivariateGaussian, Parameterization::Natural) => {
                field_vector(&first.params, "theta_v", ctx)?.len()
            }
            (FamilyKind::Wishart, Parameterization::Source) => {
                field_matrix(&first.params, "s", ctx)?.nrows()
            }
            (FamilyKind::Wishart, Parameterization::Natural) => {
                field_matrix(&first.params, "theta_m", ctx)?.nrows()
            }
        };
        Ok(dim)
    }

    /// Validates the document into a [`MixtureModel`].
    pub fn to_model(&self) -> Result<MixtureModel> {
        let kind = parse_kind(&self.family.kind)?;
        let dim = self.resolve_dim(kind)?;
        let fam = FamilyDescriptor::new(kind, dim)?;
        if self.components.is_empty() {
            return Err(spec_err("components", "at least one component required"));
        }
        let mut comps = Vec::with_capacity(self.components.len());
        for (i, comp) in self.components.iter().enumerate() {
            let ctx = format!("components[{i}].params");
            let theta = match self.parameterization {
                Parameterization::Source => {
                    let src = parse_source(kind, &comp.params, &ctx)?;
                    expfam::to_natural(fam, &src)
                        .map_err(|e| spec_err(&format!("components[{i}]"), e))?
                }
                Parameterization::Natural => {
                    let theta = parse_natural(kind, &comp.params, &ctx)?;
                    if !expfam::in_cone(fam, &theta) {
                        return Err(spec_err(
                            &format!("components[{i}].params"),
                            "natural parameter outside the cone",
                        ));
                    }
                    theta
                }
            };
            comps.push((comp.weight, theta));
        }
        MixtureModel::new(fam, comps).map_err(|e| Error::Spec(e.to_string()))
    }

    /// Writes a model back out in the requested parameterization.
    pub fn from_model(m: &MixtureModel, parameterization: Parameterization) -> Result<Self> {
        let fam = m.family();
        let mut components = Vec::with_capacity(m.len());
        for (w, theta) in m.components() {
            let params = match parameterization {
                Parameterization::Natural => emit_natural(fam.kind(), theta),
                Parameterization::Source => {
                    emit_source(&expfam::from_natural(fam, theta)?)
                }
            };
            components.push(ComponentSpec { weight: w, params });
        }
        Ok(MixtureSpec {
            family: FamilySpec { kind: kind_name(fam.kind()).into(), dim: Some(fam.dim()) },
            parameterization,
            components,
        })
    }
}

fn parse_source(kind: FamilyKind, params: &Value, ctx: &str) -> Result<SourceParameter> {
    Ok(match kind {
        FamilyKind::Bernoulli => {
            SourceParameter::Bernoulli { lambda: field_f64(params, "lambda", ctx)? }
        }
        FamilyKind::Multinoulli => SourceParameter::Multinoulli {
            lambda: field_vector(params, "lambda", ctx)?.iter().copied().collect(),
        },
        FamilyKind::ZeroCenteredLaplacian => {
            SourceParameter::Laplacian { sigma: field_f64(params, "sigma", ctx)? }
        }
        FamilyKind::MultivariateGaussian => SourceParameter::Gaussian {
            mean: field_vector(params, "mu", ctx)?,
            covariance: field_matrix(params, "sigma", ctx)?,
        },
        FamilyKind::Wishart => SourceParameter::Wishart {
            dof: field_f64(params, "n", ctx)?,
            scale: field_matrix(params, "s", ctx)?,
        },
    })
}

fn parse_natural(kind: FamilyKind, params: &Value, ctx: &str) -> Result<NaturalParameter> {
    Ok(match kind {
        FamilyKind::Bernoulli | FamilyKind::Multinoulli | FamilyKind::ZeroCenteredLaplacian => {
            NaturalParameter::from_vector(field_vector(params, "theta_v", ctx)?)
        }
        FamilyKind::MultivariateGaussian => NaturalParameter::from_vector_matrix(
            field_vector(params, "theta_v", ctx)?,
            field_matrix(params, "theta_m", ctx)?,
        ),
        FamilyKind::Wishart => NaturalParameter::from_scalar_matrix(
            field_f64(params, "theta_s", ctx)?,
            field_matrix(params, "theta_m", ctx)?,
        ),
    })
}

fn emit_natural(kind: FamilyKind, theta: &NaturalParameter) -> Value {
    let mut obj = serde_json::Map::new();
    match kind {
        FamilyKind::Bernoulli | FamilyKind::Multinoulli | FamilyKind::ZeroCenteredLaplacian => {
            obj.insert("theta_v".into(), vector_entries(theta.vector_part().unwrap()));
        }
        FamilyKind::MultivariateGaussian => {
            obj.insert("theta_v".into(), vector_entries(theta.vector_part().unwrap()));
            obj.insert("theta_m".into(), matrix_rows(theta.matrix_part().unwrap()));
        }
        FamilyKind::Wishart => {
            obj.insert("theta_s".into(), theta.scalar_part().unwrap().into());
            obj.insert("theta_m".into(), matrix_rows(theta.matrix_part().unwrap()));
        }
    }
    Value::Object(obj)
}

fn emit_source(src: &SourceParameter) -> Value {
    let mut obj = serde_json::Map::new();
    match src {
        SourceParameter::Bernoulli { lambda } => {
            obj.insert("lambda".into(), (*lambda).into());
        }
        SourceParameter::Multinoulli { lambda } => {
            obj.insert("lambda".into(), Value::Array(lambda.iter().map(|&l| l.into()).collect()));
        }
        SourceParameter::Laplacian { sigma } => {
            obj.insert("sigma".into(), (*sigma).into());
        }
        SourceParameter::Gaussian { mean, covariance } => {
            obj.insert("mu".into(), vector_entries(mean));
            obj.insert("sigma".into(), matrix_rows(covariance));
        }
        SourceParameter::Wishart { dof, scale } => {
            obj.insert("n".into(), (*dof).into());
            obj.insert("s".into(), matrix_rows(scale));
        }
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const GAUSSIAN_SPEC: &str = r#"{
        "family": {"kind": "gaussian", "dim": 2},
        "parameterization": "source",
        "components": [
            {"weight": 0.6, "params": {"mu": [0.0, 0.0], "sigma": [[1.0, 0.2], [0.2, 1.0]]}},
            {"weight": 0.4, "params": {"mu": [2.0, 1.0], "sigma": [[1.5, 0.0], [0.0, 0.8]]}}
        ]
    }"#;

    #[test]
    fn parses_and_validates_gaussian_mixture() {
        let spec = MixtureSpec::parse(GAUSSIAN_SPEC).unwrap();
        let model = spec.to_model().unwrap();
        assert_eq!(model.len(), 2);
        assert!(model.is_normalized());
    }

    #[test]
    fn dim_is_inferred_when_absent() {
        let text = r#"{
            "family": {"kind": "multinoulli"},
            "parameterization": "source",
            "components": [
                {"weight": 1.0, "params": {"lambda": [0.2, 0.3, 0.5]}}
            ]
        }"#;
        let model = MixtureSpec::parse(text).unwrap().to_model().unwrap();
        assert_eq!(model.family().dim(), 3);
    }

    #[test]
    fn errors_are_field_addressed() {
        let text = r#"{
            "family": {"kind": "gaussian", "dim": 2},
            "parameterization": "source",
            "components": [
                {"weight": 1.0, "params": {"mu": [0.0, 0.0], "sigma": [[1.0, 0.5], [0.1, 1.0]]}}
            ]
        }"#;
        match MixtureSpec::parse(text).unwrap().to_model() {
            Err(Error::Spec(msg)) => {
                assert!(msg.contains("components[0].params.sigma"), "{msg}")
            }
            other => panic!("expected spec error, got {other:?}"),
        }
    }

    #[test]
    fn source_to_natural_round_trip_is_stable() {
        let spec = MixtureSpec::parse(GAUSSIAN_SPEC).unwrap();
        let model = spec.to_model().unwrap();
        let reemitted = MixtureSpec::from_model(&model, Parameterization::Natural).unwrap();
        let again = MixtureSpec::parse(&reemitted.to_json_pretty()).unwrap().to_model().unwrap();
        for ((w1, t1), (w2, t2)) in model.components().zip(again.components()) {
            assert_relative_eq!(w1, w2, max_relative = 1e-12);
            let v1 = t1.vector_part().unwrap();
            let v2 = t2.vector_part().unwrap();
            assert_relative_eq!((v1 - v2).norm(), 0.0, epsilon = 1e-12 * v1.norm().max(1.0));
            let m1 = t1.matrix_part().unwrap();
            let m2 = t2.matrix_part().unwrap();
            assert_relative_eq!((m1 - m2).norm(), 0.0, epsilon = 1e-12 * m1.norm());
        }
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let text = r#"{
            "family": {"kind": "poisson"},
            "parameterization": "source",
            "components": [{"weight": 1.0, "params": {"lambda": 2.0}}]
        }"#;
        assert!(matches!(
            MixtureSpec::parse(text).unwrap().to_model(),
            Err(Error::Spec(msg)) if msg.contains("family.kind")
        ));
    }
}
