//! Learning MDL-optimal augmented Bayes network (ABN) classifiers from
//! discrete tabular data.
//!
//! An ABN is naive Bayes plus a forest of attribute-to-attribute arcs: every
//! attribute has the class as a parent and at most one other attribute as a
//! parent. The learner scores every attribute pair by its conditional mutual
//! information given the class, drops the pairs whose information does not pay
//! for the extra parameters, and keeps a maximum spanning forest of what is
//! left.
//!
//! The numeric core is generic over the floating point type (see [`Scalar`]);
//! the aliases at the crate root fix it to `f64`, which is what the command
//! line tool uses.

pub mod classifier;
pub mod dataset;
pub mod error;
pub mod forest;
pub mod infotheory;
pub mod learner;
pub mod mdl;
pub mod oracle;
pub mod sampling;
pub mod scalar;

pub use classifier::{Cpt, Evaluation, FitMeta, Prediction, Smoothing};
pub use dataset::{Attribute, ContingencyTable, Dataset, MissingPolicy, Schema};
pub use error::{Error, Result};
pub use infotheory::{Information, LogBase};
pub use learner::{LearnOptions, Mode, WeightMode};
pub use mdl::{Arc, NetworkStructure};
pub use scalar::Scalar;

/// Fitted classifier with double precision parameters.
pub type FittedClassifier = classifier::FittedClassifier<f64>;
/// Fitted classifier with single precision parameters.
pub type FittedClassifierF32 = classifier::FittedClassifier<f32>;
/// Per-pair score record in double precision.
pub type EdgeScore = mdl::EdgeScore<f64>;
/// Per-pair score record in single precision.
pub type EdgeScoreF32 = mdl::EdgeScore<f32>;
/// Complete pair graph in double precision.
pub type WeightedPairGraph = learner::WeightedPairGraph<f64>;
/// Brute-force optimality report in double precision.
pub type OptimalityReport = oracle::OptimalityReport<f64>;
