//! Network structure, parameter counts and description length.
//!
//! The full score of a network `B` learned from `N` rows is
//!
//! ```text
//! MDL(B) = |B| log N / 2 - N * sum_i I(X_i; parents(X_i))
//! ```
//!
//! For an augmented naive Bayes structure the information term splits into a
//! part shared by every structure, `sum_i I(X_i; C)`, and one conditional term
//! `I(X_child; X_parent | C)` per augmenting arc. Only the second part and the
//! parameter count depend on the augmenting forest.

use ndarray::IxDyn;

use crate::dataset::{ContingencyTable, Dataset, Schema};
use crate::error::{Error, Result};
use crate::forest;
use crate::infotheory::{conditional_mutual_information, mutual_information, LogBase};
use crate::scalar::Scalar;

/// Augmenting arc between two non-class attributes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub parent: usize,
    pub child: usize,
}

impl Arc {
    pub fn new(parent: usize, child: usize) -> Self {
        Self { parent, child }
    }

    pub fn reversed(self) -> Self {
        Self::new(self.child, self.parent)
    }

    /// Endpoints as `(min, max)`.
    pub fn undirected(self) -> (usize, usize) {
        (self.parent.min(self.child), self.parent.max(self.child))
    }
}

/// Class node, one class arc into every attribute (implicit) and an
/// augmenting forest in which every attribute has at most one attribute
/// parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkStructure {
    schema: Schema,
    arcs: Vec<Arc>,
    parents: Vec<Option<usize>>,
}

impl NetworkStructure {
    pub fn new(schema: Schema, arcs: Vec<Arc>) -> Result<Self> {
        let mut parents = vec![None; schema.len()];
        for arc in &arcs {
            for end in [arc.parent, arc.child] {
                if !schema.is_feature(end) {
                    return Err(Error::InvalidStructure(format!(
                        "arc {} -> {} touches the class or an unknown attribute",
                        arc.parent, arc.child
                    )));
                }
            }
            if parents[arc.child].replace(arc.parent).is_some() {
                return Err(Error::InvalidStructure(format!(
                    "attribute {} has two augmenting parents",
                    arc.child
                )));
            }
        }
        let undirected: Vec<_> = arcs.iter().map(|a| a.undirected()).collect();
        if !forest::is_forest(&undirected, schema.len()) {
            return Err(Error::InvalidStructure(
                "augmenting arcs contain a cycle".to_string(),
            ));
        }
        Ok(Self {
            schema,
            arcs,
            parents,
        })
    }

    /// Naive Bayes: no augmenting arcs.
    pub fn naive(schema: Schema) -> Self {
        let parents = vec![None; schema.len()];
        Self {
            schema,
            arcs: Vec::new(),
            parents,
        }
    }

    /// Orients an undirected forest outward from the lowest index of each tree.
    pub fn from_undirected(schema: Schema, edges: &[(usize, usize)]) -> Result<Self> {
        let undirected: Vec<_> = edges.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
        if undirected.iter().any(|&(i, j)| !schema.is_feature(i) || !schema.is_feature(j)) {
            return Err(Error::InvalidStructure(
                "edge touches the class or an unknown attribute".to_string(),
            ));
        }
        if !forest::is_forest(&undirected, schema.len()) {
            return Err(Error::InvalidStructure("edges contain a cycle".to_string()));
        }
        let arcs = forest::orient_forest(&undirected, schema.len())
            .into_iter()
            .map(|(p, c)| Arc::new(p, c))
            .collect();
        Self::new(schema, arcs)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Augmenting parent of an attribute, if any.
    pub fn parent(&self, attribute: usize) -> Option<usize> {
        self.parents[attribute]
    }

    /// Undirected projection of the augmenting arcs, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self.arcs.iter().map(|a| a.undirected()).collect();
        edges.sort_unstable();
        edges
    }

    pub fn with_arc(&self, arc: Arc) -> Result<Self> {
        let mut arcs = self.arcs.clone();
        arcs.push(arc);
        Self::new(self.schema.clone(), arcs)
    }

    pub fn without_arc(&self, arc: Arc) -> Self {
        let arcs = self.arcs.iter().copied().filter(|&a| a != arc).collect();
        Self::new(self.schema.clone(), arcs).expect("removing an arc keeps the forest legal")
    }

    /// Non-class attributes ordered so every augmenting parent precedes its
    /// children.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self
            .schema
            .feature_indices()
            .filter(|&i| self.parents[i].is_none())
            .collect();
        let mut k = 0;
        while k < order.len() {
            let node = order[k];
            order.extend(self.arcs.iter().filter(|a| a.parent == node).map(|a| a.child));
            k += 1;
        }
        order
    }

    /// Free parameters stored at one attribute:
    /// `||C|| (||X_i|| - 1)`, times `||X_p||` when it has an augmenting parent.
    pub fn attribute_parameter_count(&self, attribute: usize) -> u64 {
        let classes = self.schema.class_cardinality() as u64;
        let own = self.schema.cardinality(attribute) as u64 - 1;
        let parent = self.parents[attribute]
            .map(|p| self.schema.cardinality(p) as u64)
            .unwrap_or(1);
        parent * classes * own
    }

    /// `|B|`: class node's `||C|| - 1` plus every attribute's count.
    pub fn parameter_count(&self) -> u64 {
        let class = self.schema.class_cardinality() as u64 - 1;
        class
            + self
                .schema
                .feature_indices()
                .map(|i| self.attribute_parameter_count(i))
                .sum::<u64>()
    }
}

/// Per-pair annotation of the complete attribute graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeScore<T> {
    pub i: usize,
    pub j: usize,
    /// `I(X_i; X_j | C)`.
    pub cost: T,
    /// Cost at which adding the arc leaves the score unchanged.
    pub threshold: T,
    /// Score decrease from adding the arc in either direction.
    pub gain: T,
}

impl<T: Scalar> EdgeScore<T> {
    pub fn evaluate(dataset: &Dataset, i: usize, j: usize, base: LogBase) -> Result<Self> {
        let (i, j) = (i.min(j), i.max(j));
        let schema = dataset.schema();
        check_pair(schema, i, j)?;
        let table = dataset.joint_counts(&[i, j, schema.class_index()])?;
        let cost = conditional_mutual_information::<T>(&table, base)?.value();
        Self::from_cost(schema, i, j, cost, dataset.n_rows(), base)
    }

    pub fn from_cost(
        schema: &Schema,
        i: usize,
        j: usize,
        cost: T,
        n_rows: usize,
        base: LogBase,
    ) -> Result<Self> {
        let (i, j) = (i.min(j), i.max(j));
        Ok(Self {
            i,
            j,
            cost,
            threshold: edge_threshold(schema, i, j, n_rows, base)?,
            gain: edge_gain(schema, i, j, cost, n_rows, base)?,
        })
    }
}

/// `||C|| (||X_i|| - 1) (||X_j|| - 1)`: parameters added by an arc between
/// `i` and `j`, whichever way it points.
pub fn edge_penalty(schema: &Schema, i: usize, j: usize) -> Result<u64> {
    check_pair(schema, i, j)?;
    let classes = schema.class_cardinality() as u64;
    Ok(classes * (schema.cardinality(i) as u64 - 1) * (schema.cardinality(j) as u64 - 1))
}

/// Smallest cost for which an arc between `i` and `j` does not increase the
/// score: `penalty * log N / (2 N)`.
pub fn edge_threshold<T: Scalar>(
    schema: &Schema,
    i: usize,
    j: usize,
    n_rows: usize,
    base: LogBase,
) -> Result<T> {
    let penalty = T::from_count(edge_penalty(schema, i, j)?);
    let n = T::from_count(n_rows as u64);
    let two = T::one() + T::one();
    Ok(penalty * base.log(n) / (two * n))
}

/// `N * cost - penalty * log N / 2`.
pub fn edge_gain<T: Scalar>(
    schema: &Schema,
    i: usize,
    j: usize,
    cost: T,
    n_rows: usize,
    base: LogBase,
) -> Result<T> {
    let penalty = T::from_count(edge_penalty(schema, i, j)?);
    let n = T::from_count(n_rows as u64);
    let two = T::one() + T::one();
    Ok(n * cost - penalty * base.log(n) / two)
}

fn check_pair(schema: &Schema, i: usize, j: usize) -> Result<()> {
    for k in [i, j] {
        if !schema.is_feature(k) {
            return Err(Error::InvalidAttribute(k));
        }
    }
    if i == j {
        return Err(Error::InvalidAttribute(i));
    }
    Ok(())
}

/// Memoizes the information terms a data set contributes to structure
/// scores, so that many structures over the same data can be scored cheaply.
#[derive(Debug)]
pub struct ScoreContext<'a, T> {
    dataset: &'a Dataset,
    base: LogBase,
    class_information: Vec<Option<T>>,
    pair_cost: Vec<Option<T>>,
}

impl<'a, T: Scalar> ScoreContext<'a, T> {
    pub fn new(dataset: &'a Dataset, base: LogBase) -> Self {
        let width = dataset.schema().len();
        Self {
            dataset,
            base,
            class_information: vec![None; width],
            pair_cost: vec![None; width * width],
        }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    /// `I(X_i; C)`.
    pub fn class_information(&mut self, attribute: usize) -> Result<T> {
        if let Some(v) = self.class_information[attribute] {
            return Ok(v);
        }
        let class = self.dataset.schema().class_index();
        let table = self.dataset.joint_counts(&[attribute, class])?;
        let v = mutual_information::<T>(&table, self.base)?.value();
        self.class_information[attribute] = Some(v);
        Ok(v)
    }

    /// `I(X_i; X_j | C)`, symmetric in `i` and `j`.
    pub fn pair_cost(&mut self, i: usize, j: usize) -> Result<T> {
        let (i, j) = (i.min(j), i.max(j));
        let width = self.dataset.schema().len();
        if let Some(v) = self.pair_cost[i * width + j] {
            return Ok(v);
        }
        let v = EdgeScore::<T>::evaluate(self.dataset, i, j, self.base)?.cost;
        self.pair_cost[i * width + j] = Some(v);
        Ok(v)
    }

    fn log_n(&self) -> T {
        self.base.log(T::from_count(self.dataset.n_rows() as u64))
    }

    /// Full score, with the information term split into class terms plus one
    /// conditional term per augmenting arc.
    pub fn score(&mut self, structure: &NetworkStructure) -> Result<T> {
        check_schema(structure, self.dataset)?;
        let n = T::from_count(self.dataset.n_rows() as u64);
        let two = T::one() + T::one();
        let mut information = T::zero();
        for i in structure.schema().feature_indices() {
            information = information + self.class_information(i)?;
        }
        for arc in structure.arcs() {
            information = information + self.pair_cost(arc.parent, arc.child)?;
        }
        let length = T::from_count(structure.parameter_count()) * self.log_n() / two;
        Ok(length - n * information)
    }

    /// Score without the structure-independent `N * sum_i I(X_i; C)` term.
    pub fn reduced_score(&mut self, structure: &NetworkStructure) -> Result<T> {
        check_schema(structure, self.dataset)?;
        let n = T::from_count(self.dataset.n_rows() as u64);
        let two = T::one() + T::one();
        let mut information = T::zero();
        for arc in structure.arcs() {
            information = information + self.pair_cost(arc.parent, arc.child)?;
        }
        let length = T::from_count(structure.parameter_count()) * self.log_n() / two;
        Ok(length - n * information)
    }
}

fn check_schema(structure: &NetworkStructure, dataset: &Dataset) -> Result<()> {
    if structure.schema() != dataset.schema() {
        return Err(Error::SchemaMismatch(
            "structure and data set were built from different schemas".to_string(),
        ));
    }
    Ok(())
}

/// Description length of `structure` on `dataset`.
pub fn mdl_score<T: Scalar>(
    structure: &NetworkStructure,
    dataset: &Dataset,
    base: LogBase,
) -> Result<T> {
    ScoreContext::new(dataset, base).score(structure)
}

/// Structure-dependent part of the score (diagnostics only).
pub fn reduced_mdl_score<T: Scalar>(
    structure: &NetworkStructure,
    dataset: &Dataset,
    base: LogBase,
) -> Result<T> {
    ScoreContext::new(dataset, base).reduced_score(structure)
}

/// Per-node description length terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTerms<T> {
    /// `(||C|| - 1) log N / 2`.
    pub class_term: T,
    /// `(attribute, |X_i| log N / 2 - N I(X_i; parents))` in column order.
    pub attribute_terms: Vec<(usize, T)>,
}

impl<T: Scalar> ScoreTerms<T> {
    pub fn total(&self) -> T {
        self.class_term + self.attribute_terms.iter().map(|t| t.1).sum::<T>()
    }
}

/// Decomposes the score node by node. Each `I(X_i; parents)` is computed
/// directly against the joint parent configuration rather than through the
/// class/arc split used by [`mdl_score`].
pub fn score_terms<T: Scalar>(
    structure: &NetworkStructure,
    dataset: &Dataset,
    base: LogBase,
) -> Result<ScoreTerms<T>> {
    check_schema(structure, dataset)?;
    let schema = dataset.schema();
    let class = schema.class_index();
    let n = T::from_count(dataset.n_rows() as u64);
    let half_log_n = base.log(n) / (T::one() + T::one());
    let class_term = T::from_count(schema.class_cardinality() as u64 - 1) * half_log_n;
    let mut attribute_terms = Vec::with_capacity(schema.n_features());
    for i in schema.feature_indices() {
        let information = match structure.parent(i) {
            None => mutual_information::<T>(&dataset.joint_counts(&[i, class])?, base)?,
            Some(p) => {
                let table = dataset.joint_counts(&[i, p, class])?;
                let shape = table.shape().to_vec();
                let composite = table
                    .counts()
                    .clone()
                    .into_shape_with_order(IxDyn(&[shape[0], shape[1] * shape[2]]))
                    .expect("standard layout");
                mutual_information::<T>(&ContingencyTable::from_counts(composite), base)?
            }
        };
        let length = T::from_count(structure.attribute_parameter_count(i)) * half_log_n;
        attribute_terms.push((i, length - n * information.value()));
    }
    Ok(ScoreTerms {
        class_term,
        attribute_terms,
    })
}
