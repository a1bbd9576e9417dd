//! Exhaustive search over every augmenting forest, for checking the learner
//! on small attribute sets.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::forest::DisjointSet;
use crate::infotheory::LogBase;
use crate::learner::{learn_structure, LearnOptions, Mode, WeightMode};
use crate::mdl::{NetworkStructure, ScoreContext};
use crate::scalar::Scalar;

/// Largest attribute count searched without an explicit override (36,961
/// forests at 7 attributes).
pub const DEFAULT_ENUMERATION_CAP: usize = 7;

/// Lazily yields every acyclic edge set on `n` labelled vertices exactly once,
/// empty set included. Edges are `(i, j)` with `i < j`.
#[derive(Debug)]
pub struct AugmentingForests {
    n: usize,
    candidates: Vec<(usize, usize)>,
    stack: Vec<(usize, Vec<(usize, usize)>)>,
}

impl Iterator for AugmentingForests {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        while let Some((k, chosen)) = self.stack.pop() {
            if k == self.candidates.len() {
                return Some(chosen);
            }
            let edge = self.candidates[k];
            if joins_two_trees(&chosen, edge, self.n) {
                let mut with = chosen.clone();
                with.push(edge);
                self.stack.push((k + 1, with));
            }
            self.stack.push((k + 1, chosen));
        }
        None
    }
}

fn joins_two_trees(chosen: &[(usize, usize)], edge: (usize, usize), n: usize) -> bool {
    let mut sets = DisjointSet::new(n);
    for &(i, j) in chosen {
        sets.union(i, j);
    }
    sets.union(edge.0, edge.1)
}

pub fn enumerate_augmenting_forests(n: usize, cap: usize) -> Result<AugmentingForests> {
    if n == 0 {
        return Err(Error::InvalidParameters(
            "forest enumeration needs at least one attribute".to_string(),
        ));
    }
    check_cap(n, cap)?;
    let candidates = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    Ok(AugmentingForests {
        n,
        candidates,
        stack: vec![(0, Vec::new())],
    })
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { attributes: n, cap });
    }
    if cap > DEFAULT_ENUMERATION_CAP {
        log::warn!(
            "enumeration cap raised to {cap}; exhaustive search grows super-exponentially"
        );
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub cap: usize,
    pub base: LogBase,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
            base: LogBase::Natural,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalityReport<T> {
    pub optimal_mdl: T,
    /// Undirected edge sets (schema indices, sorted) scoring within tolerance
    /// of the optimum.
    pub optimal_arc_sets: Vec<Vec<(usize, usize)>>,
    /// Gain-weighted learner.
    pub learner_mdl: T,
    pub learner_edges: Vec<(usize, usize)>,
    pub learner_matches: bool,
    /// Cost-weighted learner.
    pub cost_mode_mdl: T,
    pub cost_mode_edges: Vec<(usize, usize)>,
    pub cost_mode_matches: bool,
    pub structures_examined: usize,
    pub tolerance: T,
}

/// Scores every augmenting forest and compares both learner weightings with
/// the exhaustive optimum.
pub fn brute_force_optimal<T: Scalar>(
    dataset: &Dataset,
    options: &OracleOptions,
) -> Result<OptimalityReport<T>> {
    let schema = dataset.schema();
    let features: Vec<usize> = schema.feature_indices().collect();
    let mut ctx = ScoreContext::<T>::new(dataset, options.base);
    let tolerance = T::score_tolerance();

    let mut scored = Vec::new();
    for forest in enumerate_augmenting_forests(features.len(), options.cap)? {
        let edges: Vec<(usize, usize)> = forest
            .iter()
            .map(|&(a, b)| (features[a], features[b]))
            .collect();
        let structure = NetworkStructure::from_undirected(schema.clone(), &edges)?;
        let score = ctx.score(&structure)?;
        scored.push((score, structure.undirected_edges()));
    }
    let optimal_mdl = scored
        .iter()
        .map(|s| s.0)
        .fold(T::infinity(), |a, b| a.min(b));
    let structures_examined = scored.len();
    let optimal_arc_sets = scored
        .into_iter()
        .filter(|(s, _)| *s <= optimal_mdl + tolerance)
        .map(|(_, e)| e)
        .collect();

    let mut learner = |weight_mode| -> Result<(T, Vec<(usize, usize)>)> {
        let opts = LearnOptions::new(Mode::Abn, weight_mode).with_base(options.base);
        let structure = learn_structure::<T>(dataset, &opts)?;
        Ok((ctx.score(&structure)?, structure.undirected_edges()))
    };
    let (learner_mdl, learner_edges) = learner(WeightMode::Gain)?;
    let (cost_mode_mdl, cost_mode_edges) = learner(WeightMode::Cost)?;

    Ok(OptimalityReport {
        optimal_mdl,
        optimal_arc_sets,
        learner_matches: (learner_mdl - optimal_mdl).abs() <= tolerance,
        learner_mdl,
        learner_edges,
        cost_mode_matches: (cost_mode_mdl - optimal_mdl).abs() <= tolerance,
        cost_mode_mdl,
        cost_mode_edges,
        structures_examined,
        tolerance,
    })
}
