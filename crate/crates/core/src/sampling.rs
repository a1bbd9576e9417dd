//! Ancestral sampling from a fitted network: class first, then every
//! attribute given its sampled parents.

use rand::Rng;

use crate::classifier::FittedClassifier;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Draws `n_rows` complete rows (class included) from the network's joint
/// distribution.
pub fn sample_dataset<T: Scalar, R: Rng + ?Sized>(
    model: &FittedClassifier<T>,
    n_rows: usize,
    rng: &mut R,
) -> Result<Dataset> {
    if n_rows == 0 {
        return Err(Error::NoRows);
    }
    let schema = model.schema().clone();
    let class = schema.class_index();
    let order = model.structure().topological_order();
    let mut rows = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let mut row = vec![0; schema.len()];
        row[class] = draw(model.class_prior(), rng);
        for &i in &order {
            let cpt = model.cpt(i).expect("every attribute has a table");
            let pv = cpt.parent.map(|p| row[p]).unwrap_or(0);
            row[i] = draw(cpt.row(row[class], pv), rng);
        }
        rows.push(row);
    }
    Dataset::new(schema, rows)
}

fn draw<T: Scalar, R: Rng + ?Sized>(probabilities: &[T], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    for (k, p) in probabilities.iter().enumerate() {
        cumulative += p.to_f64().unwrap_or(0.0);
        if u < cumulative {
            return k;
        }
    }
    // Rounding left the cumulative sum just under one.
    probabilities
        .iter()
        .rposition(|p| *p > T::zero())
        .unwrap_or(probabilities.len() - 1)
}
