//! Structure learning: naive Bayes, TAN and MDL-optimal augmented forests.
//!
//! The augmented learner scores every attribute pair by `I(X_i; X_j | C)`,
//! drops pairs whose cost is below their own threshold, runs Kruskal on what
//! is left and roots each resulting tree at its lowest attribute index.

use std::fmt;
use std::str::FromStr;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::forest;
use crate::infotheory::LogBase;
use crate::mdl::{EdgeScore, NetworkStructure};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    Naive,
    Tan,
    #[default]
    Abn,
}

/// Which edge annotation Kruskal maximizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WeightMode {
    /// Conditional mutual information.
    #[default]
    Cost,
    /// Description length decrease, `N * cost - penalty * log N / 2`. Optimal
    /// even when attribute cardinalities differ.
    Gain,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Naive => "naive",
            Mode::Tan => "tan",
            Mode::Abn => "abn",
        }
    }
}

impl WeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::Cost => "cost",
            WeightMode::Gain => "gain",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Mode::Naive),
            "tan" => Ok(Mode::Tan),
            "abn" => Ok(Mode::Abn),
            other => Err(Error::InvalidParameters(format!("unknown mode `{other}`"))),
        }
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cost" => Ok(WeightMode::Cost),
            "gain" => Ok(WeightMode::Gain),
            other => Err(Error::InvalidParameters(format!(
                "unknown weight mode `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LearnOptions {
    pub mode: Mode,
    pub weight_mode: WeightMode,
    pub base: LogBase,
}

impl LearnOptions {
    pub fn new(mode: Mode, weight_mode: WeightMode) -> Self {
        Self {
            mode,
            weight_mode,
            base: LogBase::Natural,
        }
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        self.base = base;
        self
    }
}

/// Complete graph over the non-class attributes, every edge annotated.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPairGraph<T> {
    n_nodes: usize,
    features: Vec<usize>,
    edges: Vec<EdgeScore<T>>,
    weight_mode: WeightMode,
}

impl<T: Scalar> WeightedPairGraph<T> {
    /// Number of non-class attributes.
    pub fn n_attributes(&self) -> usize {
        self.features.len()
    }

    pub fn edges(&self) -> &[EdgeScore<T>] {
        &self.edges
    }

    pub fn weight_mode(&self) -> WeightMode {
        self.weight_mode
    }

    pub fn weight(&self, edge: &EdgeScore<T>) -> T {
        match self.weight_mode {
            WeightMode::Cost => edge.cost,
            WeightMode::Gain => edge.gain,
        }
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&EdgeScore<T>> {
        let (i, j) = (i.min(j), i.max(j));
        self.edges.iter().find(|e| e.i == i && e.j == j)
    }

    /// Keeps the edges whose cost reaches their own threshold. Edges sitting
    /// exactly on the threshold are kept.
    pub fn filtered(&self) -> Self {
        Self {
            edges: self
                .edges
                .iter()
                .filter(|e| e.cost >= e.threshold)
                .copied()
                .collect(),
            ..self.clone()
        }
    }

    /// Undirected `(i, j)` pairs of the maximum weight spanning forest.
    pub fn max_spanning_forest(&self) -> Vec<(usize, usize)> {
        let weighted: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.i, e.j, self.weight(e)))
            .collect();
        forest::max_spanning_forest(&weighted, self.n_nodes)
    }
}

/// Annotates every attribute pair with cost, threshold and gain.
pub fn score_all_pairs<T: Scalar>(
    dataset: &Dataset,
    weight_mode: WeightMode,
    base: LogBase,
) -> Result<WeightedPairGraph<T>> {
    let schema = dataset.schema();
    let features: Vec<usize> = schema.feature_indices().collect();
    let mut edges = Vec::with_capacity(features.len() * features.len().saturating_sub(1) / 2);
    for (a, &i) in features.iter().enumerate() {
        for &j in &features[a + 1..] {
            edges.push(EdgeScore::evaluate(dataset, i, j, base)?);
        }
    }
    Ok(WeightedPairGraph {
        n_nodes: schema.len(),
        features,
        edges,
        weight_mode,
    })
}

/// Learns a structure of the requested family.
///
/// `Tan` spans all attributes with a maximum conditional-information tree and
/// ignores `weight_mode`. `Abn` filters by threshold first, so it may return
/// anything from naive Bayes to a full tree.
pub fn learn_structure<T: Scalar>(
    dataset: &Dataset,
    options: &LearnOptions,
) -> Result<NetworkStructure> {
    let schema = dataset.schema().clone();
    let edges = match options.mode {
        Mode::Naive => return Ok(NetworkStructure::naive(schema)),
        Mode::Tan => score_all_pairs::<T>(dataset, WeightMode::Cost, options.base)?
            .max_spanning_forest(),
        Mode::Abn => score_all_pairs::<T>(dataset, options.weight_mode, options.base)?
            .filtered()
            .max_spanning_forest(),
    };
    NetworkStructure::from_undirected(schema, &edges)
}
