//! JSON model document: schema, structure, parameters and fit metadata.
//!
//! Probabilities are written as decimal strings with 17 significant digits,
//! which round-trips every `f64` exactly. Hand-written documents (for
//! example generator specifications for `abn gen`) may use plain JSON numbers
//! instead.

use std::fs;
use std::path::Path;

use abn_core::classifier::{Cpt, FitMeta};
use abn_core::{
    Arc, Attribute, FittedClassifier, LogBase, Mode, NetworkStructure, Schema, Smoothing,
    WeightMode,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    /// Name of the class attribute.
    pub class: String,
    /// Every attribute in column order, class included.
    pub attributes: Vec<AttributeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_mode: Option<String>,
    pub arcs: Vec<ArcDoc>,
    pub class_prior: Vec<Probability>,
    pub cpts: Vec<CptDoc>,
    #[serde(default)]
    pub fit: FitDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mdl_score: Option<Probability>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDoc {
    pub name: String,
    pub domain: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcDoc {
    pub parent: String,
    pub child: String,
}

/// `P(attribute | class, parent)`; row `class * ||parent|| + parent_value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CptDoc {
    pub attribute: String,
    #[serde(default)]
    pub parent: Option<String>,
    pub rows: Vec<Vec<Probability>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDoc {
    pub n_rows: usize,
    pub smoothing: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub log_base: String,
}

impl Default for FitDoc {
    fn default() -> Self {
        Self {
            n_rows: 0,
            smoothing: "mle".to_string(),
            alpha: None,
            log_base: LogBase::Natural.as_str().to_string(),
        }
    }
}

/// A real number stored as 17-significant-digit text; numbers are accepted
/// on input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probability(pub f64);

impl Serialize for Probability {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_real(self.0))
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(Probability(v)),
            Raw::Text(s) => s
                .trim()
                .parse()
                .map(Probability)
                .map_err(|_| serde::de::Error::custom(format!("`{s}` is not a number"))),
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn format_real(value: f64) -> String {
    format!("{value:.16e}")
}

impl ModelDocument {
    pub fn from_classifier(
        model: &FittedClassifier,
        mode: Mode,
        weight_mode: WeightMode,
        mdl_score: Option<f64>,
    ) -> Self {
        let schema = model.schema();
        let name = |i: usize| schema.attribute(i).name.clone();
        let meta = model.meta();
        let (smoothing, alpha) = match meta.smoothing {
            Smoothing::Mle => ("mle", None),
            Smoothing::Laplace(a) => ("laplace", Some(a)),
        };
        Self {
            format_version: FORMAT_VERSION,
            class: schema.class_attribute().name.clone(),
            attributes: schema
                .attributes()
                .iter()
                .map(|a| AttributeDoc {
                    name: a.name.clone(),
                    domain: a.domain.clone(),
                })
                .collect(),
            mode: Some(mode.as_str().to_string()),
            weight_mode: Some(weight_mode.as_str().to_string()),
            arcs: model
                .structure()
                .arcs()
                .iter()
                .map(|a| ArcDoc {
                    parent: name(a.parent),
                    child: name(a.child),
                })
                .collect(),
            class_prior: model.class_prior().iter().map(|&p| Probability(p)).collect(),
            cpts: model
                .cpts()
                .map(|cpt| CptDoc {
                    attribute: name(cpt.attribute),
                    parent: cpt.parent.map(name),
                    rows: cpt
                        .rows()
                        .map(|r| r.iter().map(|&p| Probability(p)).collect())
                        .collect(),
                })
                .collect(),
            fit: FitDoc {
                n_rows: meta.n_rows,
                smoothing: smoothing.to_string(),
                alpha,
                log_base: meta.base.as_str().to_string(),
            },
            parameter_count: Some(model.structure().parameter_count()),
            mdl_score: mdl_score.map(Probability),
        }
    }

    pub fn schema(&self) -> Result<Schema, CliError> {
        let attributes = self
            .attributes
            .iter()
            .map(|a| Attribute::new(a.name.clone(), a.domain.clone()))
            .collect();
        let class_index = self
            .attributes
            .iter()
            .position(|a| a.name == self.class)
            .ok_or_else(|| CliError::Model(format!("class `{}` is not an attribute", self.class)))?;
        Ok(Schema::new(attributes, class_index)?)
    }

    pub fn to_classifier(&self) -> Result<FittedClassifier, CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Model(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let schema = self.schema()?;
        let index = |name: &str| {
            schema
                .index_of(name)
                .ok_or_else(|| CliError::Model(format!("unknown attribute `{name}`")))
        };
        let arcs = self
            .arcs
            .iter()
            .map(|a| Ok(Arc::new(index(&a.parent)?, index(&a.child)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let structure = NetworkStructure::new(schema.clone(), arcs)?;

        let mut cpts = Vec::with_capacity(self.cpts.len());
        for doc in &self.cpts {
            let attribute = index(&doc.attribute)?;
            let parent = doc.parent.as_deref().map(index).transpose()?;
            let cardinality = schema.cardinality(attribute);
            if doc.rows.iter().any(|r| r.len() != cardinality) {
                return Err(CliError::Model(format!(
                    "rows for `{}` must have {cardinality} entries",
                    doc.attribute
                )));
            }
            cpts.push(Cpt {
                attribute,
                parent,
                class_cardinality: schema.class_cardinality(),
                parent_cardinality: parent.map(|p| schema.cardinality(p)).unwrap_or(1),
                cardinality,
                probabilities: doc.rows.iter().flatten().map(|p| p.0).collect(),
            });
        }
        let smoothing = match self.fit.smoothing.as_str() {
            "mle" => Smoothing::Mle,
            "laplace" => Smoothing::Laplace(self.fit.alpha.unwrap_or(1.0)),
            other => return Err(CliError::Model(format!("unknown smoothing `{other}`"))),
        };
        let meta = FitMeta {
            smoothing,
            n_rows: self.fit.n_rows,
            base: self.fit.log_base.parse()?,
        };
        let prior = self.class_prior.iter().map(|p| p.0).collect();
        Ok(FittedClassifier::from_parts(structure, prior, cpts, meta)?)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Model(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("document serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}
