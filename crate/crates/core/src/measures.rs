//! Finitely supported probability measures on spacetime.

use alloc::vec::Vec;

use thiserror::Error;

use crate::geometry::Event;
use crate::rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("measure has empty support")]
    Empty,
    #[error("weights and points differ in length ({points} points, {weights} weights)")]
    LengthMismatch { points: usize, weights: usize },
    #[error("weight {index} is not a positive finite number ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("atoms {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },
    #[error("atom {index} has {found} spatial coordinates, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("atom {index} has non-finite coordinates")]
    NonFinitePoint { index: usize },
    #[error("weights are not multiples of 1/{denominator}{}", suggestion_text(.suggestion))]
    Rationalization { denominator: u64, suggestion: Option<u64> },
}

fn suggestion_text(s: &Option<u64>) -> alloc::string::String {
    match s {
        Some(d) => alloc::format!("; try denominator {d}"),
        None => alloc::string::String::from("; no denominator up to 10^6 fits"),
    }
}

/// Weights summing to one within this are kept as given.
pub const MASS_TOL: f64 = 1e-12;

/// `μ = Σ w_i δ_{x_i}` with distinct atoms and `Σ w_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Event>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure, rescaling the weights to total mass one unless they
    /// already sum to one within [`MASS_TOL`].
    pub fn new(points: Vec<Event>, weights: Vec<f64>) -> Result<Self, MeasureError> {
        Self::validate(&points, &weights)?;
        let total: f64 = weights.iter().sum();
        let weights = if (total - 1.0).abs() <= MASS_TOL { weights } else { weights.iter().map(|w| w / total).collect() };
        Ok(DiscreteMeasure { points, weights })
    }

    /// Weights `counts[i] / denominator` taken as they are, without rescaling.
    pub fn from_counts(points: Vec<Event>, counts: &[u64], denominator: u64) -> Result<Self, MeasureError> {
        let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / denominator as f64).collect();
        Self::validate(&points, &weights)?;
        Ok(DiscreteMeasure { points, weights })
    }

    fn validate(points: &[Event], weights: &[f64]) -> Result<(), MeasureError> {
        if points.is_empty() {
            return Err(MeasureError::Empty);
        }
        if points.len() != weights.len() {
            return Err(MeasureError::LengthMismatch { points: points.len(), weights: weights.len() });
        }
        let dim = points[0].spatial_dim();
        for (index, p) in points.iter().enumerate() {
            if p.spatial_dim() != dim {
                return Err(MeasureError::DimensionMismatch { index, expected: dim, found: p.spatial_dim() });
            }
            if !p.t.is_finite() || p.x.iter().any(|c| !c.is_finite()) {
                return Err(MeasureError::NonFinitePoint { index });
            }
        }
        for (index, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(MeasureError::NonPositiveWeight { index, value: w });
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(MeasureError::DuplicatePoint { first: i, second: j });
                }
            }
        }
        Ok(())
    }

    pub fn dirac(p: Event) -> Self {
        DiscreteMeasure { points: alloc::vec![p], weights: alloc::vec![1.0] }
    }

    /// Uniform weights on distinct points.
    pub fn uniform(points: Vec<Event>) -> Result<Self, MeasureError> {
        let n = points.len();
        Self::new(points, alloc::vec![1.0 / n.max(1) as f64; n])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Event] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spatial_dim(&self) -> usize {
        self.points[0].spatial_dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Integer counts `α_i` with `w_i = α_i / N`.
    pub fn counts_over(&self, denominator: u64) -> Result<Vec<u64>, MeasureError> {
        rational::counts_over(&self.weights, denominator).ok_or_else(|| MeasureError::Rationalization {
            denominator,
            suggestion: rational::suggest_denominator(&self.weights),
        })
    }

    /// The counting list `[x_1 (α_1 times), x_2 (α_2 times), …]` of length `N`.
    pub fn expand_uniform(&self, denominator: u64) -> Result<Vec<Event>, MeasureError> {
        let counts = self.counts_over(denominator)?;
        let mut out = Vec::with_capacity(denominator as usize);
        for (p, c) in self.points.iter().zip(counts) {
            out.extend(core::iter::repeat_n(p, c as usize).cloned());
        }
        Ok(out)
    }

    /// Re-aggregates a counting list into a measure, keeping the order of
    /// first appearance.
    pub fn from_expanded(list: &[Event]) -> Result<Self, MeasureError> {
        let mut points: Vec<Event> = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for e in list {
            match points.iter().position(|p| p == e) {
                Some(k) => counts[k] += 1,
                None => {
                    points.push(e.clone());
                    counts.push(1);
                }
            }
        }
        let n = list.len() as f64;
        Self::new(points, counts.iter().map(|c| *c as f64 / n).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn ev(t: f64, x: f64) -> Event {
        Event::new(t, vec![x]).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let m = DiscreteMeasure::new(vec![ev(0.0, 0.0)], vec![2.0]).unwrap();
        assert_eq!(m.weights(), &[1.0]);
        let m = DiscreteMeasure::new(vec![ev(0.0, 0.0), ev(0.0, 1.0)], vec![1.0, 1.0]).unwrap();
        assert_eq!(m.weights(), &[0.5, 0.5]);
        let sixths = DiscreteMeasure::uniform((0..6).map(|k| ev(0.0, k as f64)).collect()).unwrap();
        assert!(sixths.weights().iter().all(|&w| w == 1.0 / 6.0));
        let err = DiscreteMeasure::new(vec![ev(0.0, 0.0), ev(0.0, 0.0)], vec![0.5, 0.5]).unwrap_err();
        assert_eq!(err, MeasureError::DuplicatePoint { first: 0, second: 1 });
        assert_eq!(DiscreteMeasure::new(vec![], vec![]).unwrap_err(), MeasureError::Empty);
        assert!(matches!(
            DiscreteMeasure::new(vec![ev(0.0, 0.0)], vec![-1.0]),
            Err(MeasureError::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn expand_examples() {
        let (x1, x2) = (ev(0.0, 0.0), ev(0.0, 1.0));
        let m = DiscreteMeasure::new(vec![x1.clone(), x2.clone()], vec![0.5, 0.5]).unwrap();
        assert_eq!(m.expand_uniform(2).unwrap(), vec![x1.clone(), x2.clone()]);
        match m.expand_uniform(3) {
            Err(MeasureError::Rationalization { denominator: 3, suggestion: Some(2) }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let m = DiscreteMeasure::new(vec![x1.clone(), x2.clone()], vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_eq!(m.expand_uniform(3).unwrap(), vec![x1.clone(), x1, x2]);
    }

    proptest! {
        #[test]
        fn expansion_round_trip(counts in proptest::collection::vec(1u64..6, 1..6)) {
            let n: u64 = counts.iter().sum();
            let pts: Vec<Event> = (0..counts.len()).map(|k| ev(0.0, k as f64)).collect();
            let w: Vec<f64> = counts.iter().map(|c| *c as f64 / n as f64).collect();
            let m = DiscreteMeasure::new(pts, w).unwrap();
            let list = m.expand_uniform(n).unwrap();
            prop_assert_eq!(list.len() as u64, n);
            let back = DiscreteMeasure::from_expanded(&list).unwrap();
            prop_assert_eq!(back.points(), m.points());
            for (a, b) in back.weights().iter().zip(m.weights()) {
                prop_assert!((a - b).abs() <= 1e-15);
            }
            prop_assert!((back.total_mass() - 1.0).abs() <= 1e-12);
        }
    }
}
