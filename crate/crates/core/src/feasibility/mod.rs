//! Deciding whether two discrete measures admit a coupling supported on the
//! causal relation.
//!
//! Everything runs on the counting form of the measures: weights `α_i / N`,
//! `β_j / N` with a shared integer denominator, so Hall-type inequalities
//! are compared exactly.

mod matching;

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::coupling::Coupling;
use crate::flow::Network;
use crate::geometry::{Event, SpacetimeModel};
use crate::measures::DiscreteMeasure;
use crate::rational::{self, IntegerMarginals};

pub use matching::{extract_permutation, matching_is_unique, PermutationResult};

/// Largest side for which [`hall_bruteforce`] enumerates subsets.
pub const HALL_BRUTEFORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeasibilityError {
    #[error("subset enumeration limited to {limit} atoms per side, got {rows}×{cols}")]
    TooLarge { rows: usize, cols: usize, limit: usize },
    #[error("relation is {rows}×{cols}, expected a square relation")]
    NotSquare { rows: usize, cols: usize },
    #[error("relation is {rows}×{cols} but the marginals have {sources} and {targets} atoms")]
    ShapeMismatch { rows: usize, cols: usize, sources: usize, targets: usize },
    #[error("source set is not tight: μ(A) = {mu_a}, ν(J⁺(A)) = {nu_future}")]
    NotTight { mu_a: f64, nu_future: f64 },
    #[error("measures live in different dimensions ({sources} vs {targets} spatial coordinates)")]
    DimensionMismatch { sources: usize, targets: usize },
}

/// `adjacency[i][j] ⇔ y_j ∈ J⁺(x_i)`, possibly fattened by `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalRelation {
    rows: usize,
    cols: usize,
    adjacency: Vec<bool>,
    epsilon: f64,
}

impl CausalRelation {
    /// The causal relation between the supports of `mu` and `nu`.
    ///
    /// For `epsilon > 0` the pair also counts as related when the target
    /// shifted by `±epsilon` in time is causally related to the source. This
    /// stands in for the Euclidean `epsilon`-neighbourhood of `J⁺`.
    pub fn build(
        model: &SpacetimeModel,
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
        epsilon: f64,
    ) -> Result<Self, FeasibilityError> {
        if mu.spatial_dim() != nu.spatial_dim() {
            return Err(FeasibilityError::DimensionMismatch { sources: mu.spatial_dim(), targets: nu.spatial_dim() });
        }
        let (rows, cols) = (mu.len(), nu.len());
        let mut adjacency = vec![false; rows * cols];
        for (i, x) in mu.points().iter().enumerate() {
            for (j, y) in nu.points().iter().enumerate() {
                adjacency[i * cols + j] = related(model, x, y, epsilon);
            }
        }
        Ok(CausalRelation { rows, cols, adjacency, epsilon: epsilon.max(0.0) })
    }

    /// Row-major boolean matrix.
    pub fn from_adjacency(rows: usize, cols: usize, adjacency: Vec<bool>) -> Self {
        assert_eq!(adjacency.len(), rows * cols, "adjacency has the wrong length");
        CausalRelation { rows, cols, adjacency, epsilon: 0.0 }
    }

    /// Relation holding exactly on the listed zero-based pairs.
    pub fn from_pairs(rows: usize, cols: usize, pairs: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![false; rows * cols];
        for &(i, j) in pairs {
            adjacency[i * cols + j] = true;
        }
        CausalRelation { rows, cols, adjacency, epsilon: 0.0 }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn adjacency(&self) -> &[bool] {
        &self.adjacency
    }

    pub fn admits(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.cols + j]
    }

    /// `J⁺(A)` for a set of sources.
    pub fn future_of(&self, sources: &[usize]) -> Vec<usize> {
        (0..self.cols).filter(|&j| sources.iter().any(|&i| self.admits(i, j))).collect()
    }

    /// `J⁻(B)` for a set of targets.
    pub fn past_of(&self, targets: &[usize]) -> Vec<usize> {
        (0..self.rows).filter(|&i| targets.iter().any(|&j| self.admits(i, j))).collect()
    }

    /// The relation restricted to the given rows and columns, in that order.
    pub fn restricted(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut adjacency = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                adjacency.push(self.admits(i, j));
            }
        }
        CausalRelation { rows: rows.len(), cols: cols.len(), adjacency, epsilon: self.epsilon }
    }
}

fn related(model: &SpacetimeModel, x: &Event, y: &Event, epsilon: f64) -> bool {
    if model.is_causal(x, y) {
        return true;
    }
    if epsilon > 0.0 {
        for shift in [epsilon, -epsilon] {
            let moved = Event { t: y.t + shift, x: y.x.clone() };
            if model.is_causal(x, &moved) {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

/// A set violating the Hall condition: `ν(J⁺(A)) < μ(A)` for a source set
/// or `μ(J⁻(B)) < ν(B)` for a target set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolatingSet {
    pub side: Side,
    /// Zero-based atom indices in increasing order.
    pub indices: Vec<usize>,
    /// Mass of the set in counting units.
    pub mass: u64,
    /// Mass of its causal future (or past) in counting units.
    pub reachable_mass: u64,
}

/// Result of [`j_related`]: a witness coupling or a Hall-violating set.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    pub related: bool,
    pub witness_coupling: Option<Coupling>,
    pub violating_set: Option<ViolatingSet>,
    pub marginals: IntegerMarginals,
}

fn check_shape(rel: &CausalRelation, marg: &IntegerMarginals) -> Result<(), FeasibilityError> {
    if rel.rows != marg.source.len() || rel.cols != marg.target.len() {
        return Err(FeasibilityError::ShapeMismatch {
            rows: rel.rows,
            cols: rel.cols,
            sources: marg.source.len(),
            targets: marg.target.len(),
        });
    }
    Ok(())
}

/// Counting form of a pair of measures.
pub fn counting_form(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> IntegerMarginals {
    rational::integer_marginals(mu.weights(), nu.weights())
}

/// First Hall-violating subset in enumeration order: all source subsets by
/// increasing bitmask, then all target subsets.
pub fn hall_bruteforce(
    rel: &CausalRelation,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<Option<ViolatingSet>, FeasibilityError> {
    hall_bruteforce_counts(rel, &counting_form(mu, nu))
}

pub fn hall_bruteforce_counts(
    rel: &CausalRelation,
    marg: &IntegerMarginals,
) -> Result<Option<ViolatingSet>, FeasibilityError> {
    check_shape(rel, marg)?;
    let (m, n) = (rel.rows, rel.cols);
    if m > HALL_BRUTEFORCE_LIMIT || n > HALL_BRUTEFORCE_LIMIT {
        return Err(FeasibilityError::TooLarge { rows: m, cols: n, limit: HALL_BRUTEFORCE_LIMIT });
    }
    // neighbourhood bitmasks
    let row_mask: Vec<u32> =
        (0..m).map(|i| (0..n).filter(|&j| rel.admits(i, j)).fold(0u32, |acc, j| acc | 1 << j)).collect();
    let col_mask: Vec<u32> =
        (0..n).map(|j| (0..m).filter(|&i| rel.admits(i, j)).fold(0u32, |acc, i| acc | 1 << i)).collect();
    let weigh = |mask: u32, counts: &[u64]| -> u64 {
        counts.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, c)| c).sum()
    };
    let bits = |mask: u32, len: usize| -> Vec<usize> { (0..len).filter(|k| mask >> k & 1 == 1).collect() };
    for set in 1u32..(1u32 << m) {
        let future = bits(set, m).iter().fold(0u32, |acc, &i| acc | row_mask[i]);
        let (mass, reach) = (weigh(set, &marg.source), weigh(future, &marg.target));
        if reach < mass {
            return Ok(Some(ViolatingSet { side: Side::Source, indices: bits(set, m), mass, reachable_mass: reach }));
        }
    }
    for set in 1u32..(1u32 << n) {
        let past = bits(set, n).iter().fold(0u32, |acc, &j| acc | col_mask[j]);
        let (mass, reach) = (weigh(set, &marg.target), weigh(past, &marg.source));
        if reach < mass {
            return Ok(Some(ViolatingSet { side: Side::Target, indices: bits(set, n), mass, reachable_mass: reach }));
        }
    }
    Ok(None)
}

/// Decides J-relatedness by maximum flow on the counting form.
pub fn j_related(rel: &CausalRelation, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> FeasibilityVerdict {
    j_related_counts(rel, &counting_form(mu, nu)).expect("relation built from these measures")
}

/// Source `S → i` carries `α_i`, admissible `i → j` carry `N`, `j → T`
/// carries `β_j`. The measures are related iff the maximum flow is `N`; a
/// minimum cut otherwise yields the violating source set.
pub fn j_related_counts(rel: &CausalRelation, marg: &IntegerMarginals) -> Result<FeasibilityVerdict, FeasibilityError> {
    check_shape(rel, marg)?;
    let (m, n) = (rel.rows, rel.cols);
    let big = marg.denominator;
    let (s, t) = (m + n, m + n + 1);
    let mut net = Network::new(m + n + 2);
    for (i, &a) in marg.source.iter().enumerate() {
        net.add_edge(s, i, a, 0);
    }
    let mut pair_edges = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if rel.admits(i, j) {
                pair_edges.push((i, j, net.add_edge(i, m + j, big, 0)));
            }
        }
    }
    for (j, &b) in marg.target.iter().enumerate() {
        net.add_edge(m + j, t, b, 0);
    }
    let value = net.max_flow(s, t);
    if value == big {
        let mut witness = Coupling::zeros(m, n, big);
        for (i, j, e) in pair_edges {
            witness.add(i, j, net.flow(e));
        }
        return Ok(FeasibilityVerdict {
            related: true,
            witness_coupling: Some(witness),
            violating_set: None,
            marginals: marg.clone(),
        });
    }
    let reach = net.reachable_from(s);
    let indices: Vec<usize> = (0..m).filter(|&i| reach[i]).collect();
    let mass = indices.iter().map(|&i| marg.source[i]).sum();
    let reachable_mass = rel.future_of(&indices).iter().map(|&j| marg.target[j]).sum();
    Ok(FeasibilityVerdict {
        related: false,
        witness_coupling: None,
        violating_set: Some(ViolatingSet { side: Side::Source, indices, mass, reachable_mass }),
        marginals: marg.clone(),
    })
}

/// One half of a tight split: an induced subproblem in counting form.
#[derive(Debug, Clone, PartialEq)]
pub struct SubProblem {
    /// Parent indices of the sources, increasing.
    pub sources: Vec<usize>,
    /// Parent indices of the targets, increasing.
    pub targets: Vec<usize>,
    pub relation: CausalRelation,
    /// Counts over the subproblem's own total mass (the normalized measures).
    pub marginals: IntegerMarginals,
}

/// Splits along a tight source set `A` (`0 < μ(A) = ν(J⁺(A)) < 1`) into the
/// problems `(μ|_A, ν|_{J⁺(A)})` and `(μ|_{Aᶜ}, ν|_{J⁺(A)ᶜ})`, each
/// normalized to mass one.
pub fn tight_split(
    rel: &CausalRelation,
    marg: &IntegerMarginals,
    set: &[usize],
) -> Result<(SubProblem, SubProblem), FeasibilityError> {
    check_shape(rel, marg)?;
    let mut inner: Vec<usize> = set.to_vec();
    inner.sort_unstable();
    inner.dedup();
    let future = rel.future_of(&inner);
    let mass: u64 = inner.iter().map(|&i| marg.source[i]).sum();
    let reach: u64 = future.iter().map(|&j| marg.target[j]).sum();
    let total = marg.denominator;
    if mass == 0 || mass != reach || mass >= total {
        return Err(FeasibilityError::NotTight {
            mu_a: mass as f64 / total as f64,
            nu_future: reach as f64 / total as f64,
        });
    }
    let outer: Vec<usize> = (0..rel.rows).filter(|i| !inner.contains(i)).collect();
    let outer_targets: Vec<usize> = (0..rel.cols).filter(|j| !future.contains(j)).collect();
    let make = |rows: Vec<usize>, cols: Vec<usize>, den: u64| SubProblem {
        relation: rel.restricted(&rows, &cols),
        marginals: IntegerMarginals {
            denominator: den,
            source: rows.iter().map(|&i| marg.source[i]).collect(),
            target: cols.iter().map(|&j| marg.target[j]).collect(),
            exact: marg.exact,
        },
        sources: rows,
        targets: cols,
    };
    Ok((make(inner, future, mass), make(outer, outer_targets, total - mass)))
}
