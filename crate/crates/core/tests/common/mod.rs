#![allow(dead_code)]

use abn_core::classifier::{Cpt, FitMeta, Smoothing};
use abn_core::FittedClassifier;
use abn_core::sampling::sample_dataset;
use abn_core::{Arc, Dataset, LogBase, NetworkStructure, Schema};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random distribution; `sharpness > 1` concentrates mass on few values.
pub fn random_distribution<R: Rng>(rng: &mut R, k: usize, sharpness: i32) -> Vec<f64> {
    let weights: Vec<f64> = (0..k)
        .map(|_| rng.gen_range(0.02f64..1.0).powi(sharpness))
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Random augmenting forest over the schema's attributes.
pub fn random_structure<R: Rng>(rng: &mut R, schema: &Schema, arc_probability: f64) -> NetworkStructure {
    let mut order: Vec<usize> = schema.feature_indices().collect();
    order.shuffle(rng);
    let mut arcs = Vec::new();
    for k in 1..order.len() {
        if rng.gen_bool(arc_probability) {
            let parent = order[rng.gen_range(0..k)];
            arcs.push(Arc::new(parent, order[k]));
        }
    }
    NetworkStructure::new(schema.clone(), arcs).unwrap()
}

pub fn random_model<R: Rng>(
    rng: &mut R,
    structure: NetworkStructure,
    sharpness: i32,
) -> FittedClassifier {
    let schema = structure.schema().clone();
    let prior = random_distribution(rng, schema.class_cardinality(), 1);
    let cpts = schema
        .feature_indices()
        .map(|i| {
            let parent = structure.parent(i);
            let parent_cardinality = parent.map(|p| schema.cardinality(p)).unwrap_or(1);
            let rows = schema.class_cardinality() * parent_cardinality;
            let probabilities = (0..rows)
                .flat_map(|_| random_distribution(rng, schema.cardinality(i), sharpness))
                .collect();
            Cpt {
                attribute: i,
                parent,
                class_cardinality: schema.class_cardinality(),
                parent_cardinality,
                cardinality: schema.cardinality(i),
                probabilities,
            }
        })
        .collect();
    let meta = FitMeta {
        smoothing: Smoothing::Mle,
        n_rows: 0,
        base: LogBase::Natural,
    };
    abn_core::classifier::FittedClassifier::from_parts(structure, prior, cpts, meta).unwrap()
}

/// Random schema (class at a random column), random network, sampled rows.
pub fn random_dataset<R: Rng>(
    rng: &mut R,
    n_features: usize,
    cardinalities: &[usize],
    class_cardinalities: &[usize],
    n_rows: usize,
) -> Dataset {
    let class_index = rng.gen_range(0..=n_features);
    let cards: Vec<usize> = (0..=n_features)
        .map(|k| {
            if k == class_index {
                *class_cardinalities.choose(rng).unwrap()
            } else {
                *cardinalities.choose(rng).unwrap()
            }
        })
        .collect();
    let schema = Schema::synthetic(class_index, &cards).unwrap();
    let structure = random_structure(rng, &schema, 0.6);
    let model = random_model(rng, structure, 3);
    sample_dataset(&model, n_rows, rng).unwrap()
}
