//! Conditional probability tables and posterior classification.

use std::fmt;

use crate::dataset::{Dataset, Schema};
use crate::error::{Error, Result};
use crate::infotheory::LogBase;
use crate::mdl::NetworkStructure;
use crate::scalar::Scalar;

/// Parameter estimator for the probability tables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Smoothing {
    /// Relative frequencies; a configuration never observed gets a uniform row.
    Mle,
    /// Adds the pseudo-count to every cell.
    Laplace(f64),
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing::Laplace(1.0)
    }
}

impl Smoothing {
    pub fn pseudo_count(self) -> f64 {
        match self {
            Smoothing::Mle => 0.0,
            Smoothing::Laplace(alpha) => alpha,
        }
    }
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothing::Mle => f.write_str("mle"),
            Smoothing::Laplace(alpha) => write!(f, "laplace({alpha})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitMeta {
    pub smoothing: Smoothing,
    pub n_rows: usize,
    pub base: LogBase,
}

/// `P(X_i | C, X_parent)` for one attribute, one row per parent configuration.
///
/// Row `class * parent_cardinality + parent_value` holds the distribution over
/// the attribute's values; `parent_cardinality` is 1 without an augmenting
/// parent.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt<T> {
    pub attribute: usize,
    pub parent: Option<usize>,
    pub class_cardinality: usize,
    pub parent_cardinality: usize,
    pub cardinality: usize,
    pub probabilities: Vec<T>,
}

impl<T: Scalar> Cpt<T> {
    pub fn n_rows(&self) -> usize {
        self.class_cardinality * self.parent_cardinality
    }

    pub fn row(&self, class: usize, parent_value: usize) -> &[T] {
        let start = (class * self.parent_cardinality + parent_value) * self.cardinality;
        &self.probabilities[start..start + self.cardinality]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.probabilities.chunks(self.cardinality)
    }

    pub fn probability(&self, class: usize, parent_value: usize, value: usize) -> T {
        self.row(class, parent_value)[value]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction<T> {
    pub class_index: usize,
    pub label: String,
    pub posterior: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub correct: usize,
    pub n_rows: usize,
    /// `confusion[actual][predicted]`.
    pub confusion: Vec<Vec<u64>>,
}

/// Network structure with estimated parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedClassifier<T> {
    structure: NetworkStructure,
    class_prior: Vec<T>,
    cpts: Vec<Option<Cpt<T>>>,
    meta: FitMeta,
}

impl<T: Scalar> FittedClassifier<T> {
    pub fn fit(structure: NetworkStructure, dataset: &Dataset, smoothing: Smoothing) -> Result<Self> {
        if structure.schema() != dataset.schema() {
            return Err(Error::SchemaMismatch(
                "structure and data set were built from different schemas".to_string(),
            ));
        }
        if let Smoothing::Laplace(alpha) = smoothing {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::InvalidParameters(format!(
                    "pseudo-count must be positive, got {alpha}"
                )));
            }
        }
        let alpha = T::from_f64_lossy(smoothing.pseudo_count());
        let schema = dataset.schema();
        let class = schema.class_index();
        let class_counts = dataset.joint_counts(&[class])?;
        let class_prior = normalize(class_counts.counts().iter().copied(), alpha);

        let mut cpts = vec![None; schema.len()];
        for i in schema.feature_indices() {
            let parent = structure.parent(i);
            let table = match parent {
                Some(p) => dataset.joint_counts(&[class, p, i])?,
                None => dataset.joint_counts(&[class, i])?,
            };
            let cardinality = schema.cardinality(i);
            let counts: Vec<u64> = table.counts().iter().copied().collect();
            let probabilities = counts
                .chunks(cardinality)
                .flat_map(|row| normalize(row.iter().copied(), alpha))
                .collect();
            cpts[i] = Some(Cpt {
                attribute: i,
                parent,
                class_cardinality: schema.class_cardinality(),
                parent_cardinality: parent.map(|p| schema.cardinality(p)).unwrap_or(1),
                cardinality,
                probabilities,
            });
        }
        Ok(Self {
            structure,
            class_prior,
            cpts,
            meta: FitMeta {
                smoothing,
                n_rows: dataset.n_rows(),
                base: LogBase::Natural,
            },
        })
    }

    /// Assembles a classifier from explicit parameters, checking shapes and
    /// normalization (rows must sum to one within `1e-9`).
    pub fn from_parts(
        structure: NetworkStructure,
        class_prior: Vec<T>,
        cpts: Vec<Cpt<T>>,
        meta: FitMeta,
    ) -> Result<Self> {
        let schema = structure.schema();
        let invalid = |msg: String| Err(Error::InvalidParameters(msg));
        if class_prior.len() != schema.class_cardinality() {
            return invalid(format!(
                "class prior has {} entries, expected {}",
                class_prior.len(),
                schema.class_cardinality()
            ));
        }
        check_distribution(&class_prior, "class prior")?;
        let mut slots = vec![None; schema.len()];
        for cpt in cpts {
            let i = cpt.attribute;
            if !schema.is_feature(i) {
                return Err(Error::InvalidAttribute(i));
            }
            let parent = structure.parent(i);
            let expected_parent = parent.map(|p| schema.cardinality(p)).unwrap_or(1);
            if cpt.parent != parent
                || cpt.cardinality != schema.cardinality(i)
                || cpt.class_cardinality != schema.class_cardinality()
                || cpt.parent_cardinality != expected_parent
                || cpt.probabilities.len() != cpt.n_rows() * cpt.cardinality
            {
                return invalid(format!(
                    "table for `{}` does not match the structure",
                    schema.attribute(i).name
                ));
            }
            for row in cpt.rows() {
                check_distribution(row, &schema.attribute(i).name)?;
            }
            if slots[i].replace(cpt).is_some() {
                return invalid(format!("two tables for `{}`", schema.attribute(i).name));
            }
        }
        if let Some(i) = schema.feature_indices().find(|&i| slots[i].is_none()) {
            return invalid(format!("no table for `{}`", schema.attribute(i).name));
        }
        Ok(Self {
            structure,
            class_prior,
            cpts: slots,
            meta,
        })
    }

    pub fn structure(&self) -> &NetworkStructure {
        &self.structure
    }

    pub fn schema(&self) -> &Schema {
        self.structure.schema()
    }

    pub fn class_prior(&self) -> &[T] {
        &self.class_prior
    }

    pub fn cpt(&self, attribute: usize) -> Option<&Cpt<T>> {
        self.cpts.get(attribute).and_then(Option::as_ref)
    }

    /// Tables of the non-class attributes, in column order.
    pub fn cpts(&self) -> impl Iterator<Item = &Cpt<T>> {
        self.cpts.iter().flatten()
    }

    pub fn meta(&self) -> &FitMeta {
        &self.meta
    }

    /// Free parameters held by the tables; equals the structure's `|B|`.
    pub fn stored_parameter_count(&self) -> u64 {
        let class = self.class_prior.len() as u64 - 1;
        class
            + self
                .cpts()
                .map(|c| (c.n_rows() * (c.cardinality - 1)) as u64)
                .sum::<u64>()
    }

    /// `ln P(c) + sum_i ln P(x_i | c, x_parent)` for every class `c`.
    /// `instance` holds the non-class values in column order.
    pub fn log_joint(&self, instance: &[usize]) -> Result<Vec<T>> {
        let schema = self.schema();
        if instance.len() != schema.n_features() {
            return Err(Error::InstanceLength {
                expected: schema.n_features(),
                found: instance.len(),
            });
        }
        let mut full = vec![0; schema.len()];
        for (slot, &v) in schema.feature_indices().zip(instance) {
            let cardinality = schema.cardinality(slot);
            if v >= cardinality {
                return Err(Error::ValueOutOfRange {
                    attribute: schema.attribute(slot).name.clone(),
                    value: v,
                    cardinality,
                });
            }
            full[slot] = v;
        }
        let scores = (0..schema.class_cardinality())
            .map(|c| {
                self.cpts().fold(self.class_prior[c].ln(), |acc, cpt| {
                    let pv = cpt.parent.map(|p| full[p]).unwrap_or(0);
                    acc + cpt.probability(c, pv, full[cpt.attribute]).ln()
                })
            })
            .collect();
        Ok(scores)
    }

    /// Posterior over the classes and its argmax (lowest index on ties).
    pub fn predict(&self, instance: &[usize]) -> Result<Prediction<T>> {
        let scores = self.log_joint(instance)?;
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = c;
            }
        }
        let max = scores[best];
        let posterior = if max == T::neg_infinity() {
            // Every class has a zero-probability factor.
            let k = T::from_count(scores.len() as u64);
            vec![T::one() / k; scores.len()]
        } else {
            let weights: Vec<T> = scores.iter().map(|&s| (s - max).exp()).collect();
            let total: T = weights.iter().copied().sum();
            weights.into_iter().map(|w| w / total).collect()
        };
        Ok(Prediction {
            class_index: best,
            label: self.schema().class_attribute().domain[best].clone(),
            posterior,
        })
    }

    /// Like [`predict`](Self::predict), with values given as labels.
    pub fn predict_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Prediction<T>> {
        let schema = self.schema();
        if labels.len() != schema.n_features() {
            return Err(Error::InstanceLength {
                expected: schema.n_features(),
                found: labels.len(),
            });
        }
        let instance = schema
            .feature_indices()
            .zip(labels)
            .map(|(i, label)| {
                let attr = schema.attribute(i);
                attr.value_index(label.as_ref()).ok_or_else(|| Error::UnseenValue {
                    attribute: attr.name.clone(),
                    value: label.as_ref().to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.predict(&instance)
    }

    pub fn evaluate(&self, dataset: &Dataset) -> Result<Evaluation> {
        if dataset.schema() != self.schema() {
            return Err(Error::SchemaMismatch(
                "evaluation data does not use the model's schema".to_string(),
            ));
        }
        let k = self.schema().class_cardinality();
        let mut confusion = vec![vec![0u64; k]; k];
        let mut correct = 0;
        for r in 0..dataset.n_rows() {
            let predicted = self.predict(&dataset.instance(r))?.class_index;
            let actual = dataset.class_value(r);
            confusion[actual][predicted] += 1;
            correct += usize::from(actual == predicted);
        }
        Ok(Evaluation {
            accuracy: correct as f64 / dataset.n_rows() as f64,
            correct,
            n_rows: dataset.n_rows(),
            confusion,
        })
    }
}

fn normalize<T: Scalar>(counts: impl Iterator<Item = u64>, alpha: T) -> Vec<T> {
    let counts: Vec<T> = counts.map(|c| T::from_count(c) + alpha).collect();
    let total: T = counts.iter().copied().sum();
    if total == T::zero() {
        let k = T::from_count(counts.len() as u64);
        return vec![T::one() / k; counts.len()];
    }
    counts.into_iter().map(|c| c / total).collect()
}

fn check_distribution<T: Scalar>(row: &[T], what: &str) -> Result<()> {
    let sum: T = row.iter().copied().sum();
    let ok = row.iter().all(|&p| p >= T::zero() && p.is_finite())
        && (sum - T::one()).abs() <= T::from_f64_lossy(1e-9).max(T::epsilon() * T::from_count(16));
    if !ok {
        return Err(Error::InvalidParameters(format!(
            "{what}: probabilities do not form a distribution"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdl::Arc;

    fn dataset(cards: &[usize], rows: Vec<Vec<usize>>) -> Dataset {
        Dataset::new(Schema::synthetic(0, cards).unwrap(), rows).unwrap()
    }

    fn row_sums_are_one(model: &FittedClassifier<f64>) {
        assert!((model.class_prior().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for cpt in model.cpts() {
            for row in cpt.rows() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rows_are_normalized() {
        let d = dataset(&[2, 3, 2], vec![vec![0, 2, 1], vec![1, 0, 0], vec![1, 1, 0]]);
        let s = NetworkStructure::new(d.schema().clone(), vec![Arc::new(1, 2)]).unwrap();
        for smoothing in [Smoothing::Mle, Smoothing::Laplace(1.0), Smoothing::Laplace(0.3)] {
            let m = FittedClassifier::<f64>::fit(s.clone(), &d, smoothing).unwrap();
            row_sums_are_one(&m);
            assert_eq!(m.stored_parameter_count(), s.parameter_count());
        }
    }

    #[test]
    fn laplace_on_unseen_configuration_is_uniform() {
        // Parent value 1 never occurs under class 0.
        let d = dataset(&[2, 2, 2], vec![vec![0, 0, 1], vec![1, 1, 0], vec![1, 0, 0]]);
        let s = NetworkStructure::new(d.schema().clone(), vec![Arc::new(1, 2)]).unwrap();
        let m = FittedClassifier::<f64>::fit(s, &d, Smoothing::Laplace(1.0)).unwrap();
        assert_eq!(m.cpt(2).unwrap().row(0, 1), &[0.5, 0.5]);
    }

    #[test]
    fn mle_frequencies() {
        let rows = vec![vec![0, 0], vec![0, 0], vec![0, 0], vec![0, 1], vec![1, 1]];
        let d = dataset(&[2, 2], rows);
        let m = FittedClassifier::<f64>::fit(
            NetworkStructure::naive(d.schema().clone()),
            &d,
            Smoothing::Mle,
        )
        .unwrap();
        assert_eq!(m.cpt(1).unwrap().row(0, 0), &[0.75, 0.25]);
        assert_eq!(m.class_prior(), &[0.8, 0.2]);
    }

    #[test]
    fn balanced_symmetric_data_ties_to_first_class() {
        let rows = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let d = dataset(&[2, 2], rows);
        let m = FittedClassifier::<f64>::fit(
            NetworkStructure::naive(d.schema().clone()),
            &d,
            Smoothing::default(),
        )
        .unwrap();
        let p = m.predict(&[1]).unwrap();
        assert_eq!(p.posterior, vec![0.5, 0.5]);
        assert_eq!(p.class_index, 0);
    }

    #[test]
    fn dominant_pattern_wins() {
        let mut rows = vec![vec![1, 1, 0]; 8];
        rows.extend(vec![vec![0, 0, 1]; 8]);
        rows.push(vec![0, 1, 0]);
        let d = dataset(&[2, 2, 2], rows);
        let m = FittedClassifier::<f64>::fit(
            NetworkStructure::naive(d.schema().clone()),
            &d,
            Smoothing::default(),
        )
        .unwrap();
        let p = m.predict_labels(&["1", "0"]).unwrap();
        assert_eq!(p.label, "1");
        assert!((p.posterior.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prediction_errors() {
        let d = dataset(&[2, 2, 2], vec![vec![0, 0, 1], vec![1, 1, 0]]);
        let m = FittedClassifier::<f64>::fit(
            NetworkStructure::naive(d.schema().clone()),
            &d,
            Smoothing::default(),
        )
        .unwrap();
        assert!(matches!(m.predict(&[0]), Err(Error::InstanceLength { .. })));
        assert!(matches!(m.predict(&[0, 2]), Err(Error::ValueOutOfRange { .. })));
        assert!(matches!(
            m.predict_labels(&["0", "7"]),
            Err(Error::UnseenValue { .. })
        ));
    }

    #[test]
    fn mle_zero_everywhere_falls_back_to_uniform() {
        let d = dataset(&[2, 3], vec![vec![0, 0], vec![1, 1]]);
        let m = FittedClassifier::<f64>::fit(
            NetworkStructure::naive(d.schema().clone()),
            &d,
            Smoothing::Mle,
        )
        .unwrap();
        let p = m.predict(&[2]).unwrap();
        assert_eq!(p.posterior, vec![0.5, 0.5]);
        assert_eq!(p.class_index, 0);
    }

    #[test]
    fn memorizes_a_deterministic_mapping() {
        // class = x1 XOR x2; only the augmented structure can represent it.
        let rows: Vec<Vec<usize>> = (0..4)
            .flat_map(|k| {
                let (a, b) = (k & 1, k >> 1);
                vec![vec![a ^ b, a, b]; 3]
            })
            .collect();
        let d = dataset(&[2, 2, 2], rows);
        let s = NetworkStructure::new(d.schema().clone(), vec![Arc::new(1, 2)]).unwrap();
        let m = FittedClassifier::<f64>::fit(s, &d, Smoothing::Mle).unwrap();
        let e = m.evaluate(&d).unwrap();
        assert_eq!(e.accuracy, 1.0);
        assert_eq!(e.confusion.iter().flatten().sum::<u64>(), 12);
    }

    #[test]
    fn from_parts_validates() {
        let d = dataset(&[2, 2], vec![vec![0, 0], vec![1, 1]]);
        let s = NetworkStructure::naive(d.schema().clone());
        let m = FittedClassifier::<f64>::fit(s.clone(), &d, Smoothing::default()).unwrap();
        let rebuilt = FittedClassifier::from_parts(
            s.clone(),
            m.class_prior().to_vec(),
            m.cpts().cloned().collect(),
            *m.meta(),
        )
        .unwrap();
        assert_eq!(rebuilt, m);
        assert!(FittedClassifier::from_parts(s.clone(), vec![0.7, 0.7], vec![], *m.meta()).is_err());
        assert!(
            FittedClassifier::from_parts(s, m.class_prior().to_vec(), vec![], *m.meta()).is_err()
        );
    }

    #[test]
    fn rejects_bad_pseudo_count() {
        let d = dataset(&[2, 2], vec![vec![0, 0]]);
        let s = NetworkStructure::naive(d.schema().clone());
        assert!(FittedClassifier::<f64>::fit(s, &d, Smoothing::Laplace(0.0)).is_err());
    }
}
