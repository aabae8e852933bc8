//! Dynamical couplings: transport plans lifted to weighted families of
//! action-minimizing geodesics, their interpolants and restrictions.

mod experiments;
mod regularity;

use alloc::vec::Vec;

use thiserror::Error;

use crate::coupling::Coupling;
use crate::geometry::{Event, Geodesic, GeometryError, SpacetimeModel};
use crate::measures::{DiscreteMeasure, MeasureError};
use crate::rational::IntegerMarginals;
use crate::transport::{self, CostMatrix, TransportError, TransportPlan};

pub use experiments::{
    holder_sharpness_experiment, interior_regularity_experiment, shortening_experiment, shortening_gain,
    sharpness_instance, HolderExperiment, InteriorExperiment, ShorteningExperiment, ShorteningGain, SHARPNESS_TIME,
};
pub use regularity::{regularity_report, regularity_report_at, RegularityReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("no geodesic from source {source_index} to target {target_index}: {error}")]
    Geodesic { source_index: usize, target_index: usize, error: GeometryError },
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("coupling is {rows}×{cols} but the measures have {sources} and {targets} atoms")]
    ShapeMismatch { rows: usize, cols: usize, sources: usize, targets: usize },
    #[error("path subset is empty")]
    EmptySubset,
    #[error("path index {index} out of range ({len} paths)")]
    PathOutOfRange { index: usize, len: usize },
    #[error("interpolation times must satisfy 0 ≤ s < t ≤ 1 (got s = {s}, t = {t})")]
    InvalidTimes { s: f64, t: f64 },
    #[error("instance needs at least {min} atoms, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("the diagonal is not the unique feasible matching; shrink the x-range of the sources")]
    NotUnique,
}

/// One geodesic of a dynamical coupling, carrying `count / N` of the mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPath {
    pub source: usize,
    pub target: usize,
    pub count: u64,
    pub geodesic: Geodesic,
}

/// A finite family of minimizing geodesics whose endpoint pushforward is a
/// given coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalCoupling {
    model: SpacetimeModel,
    denominator: u64,
    paths: Vec<WeightedPath>,
    rows: usize,
    cols: usize,
    /// The lifted marginals, returned as they are by `interpolate` at the
    /// endpoints.
    marginals: Option<(DiscreteMeasure, DiscreteMeasure)>,
}

/// One geodesic per support pair of `coupling`, with the pair's mass.
pub fn lift(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    coupling: &Coupling,
) -> Result<DynamicalCoupling, DynamicsError> {
    if coupling.rows() != mu.len() || coupling.cols() != nu.len() {
        return Err(DynamicsError::ShapeMismatch {
            rows: coupling.rows(),
            cols: coupling.cols(),
            sources: mu.len(),
            targets: nu.len(),
        });
    }
    let mut paths = Vec::new();
    for (i, j, count) in coupling.support() {
        let geodesic = model.geodesic(&mu.points()[i], &nu.points()[j]).map_err(|error| DynamicsError::Geodesic {
            source_index: i,
            target_index: j,
            error,
        })?;
        paths.push(WeightedPath { source: i, target: j, count, geodesic });
    }
    Ok(DynamicalCoupling {
        model: model.clone(),
        denominator: coupling.denominator(),
        paths,
        rows: coupling.rows(),
        cols: coupling.cols(),
        marginals: Some((mu.clone(), nu.clone())),
    })
}

impl DynamicalCoupling {
    pub fn model(&self) -> &SpacetimeModel {
        &self.model
    }

    pub fn paths(&self) -> &[WeightedPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn mass(&self, path: usize) -> f64 {
        self.paths[path].count as f64 / self.denominator as f64
    }

    /// `(ev_0, ev_1)_♯Π` as a coupling between the original supports.
    pub fn endpoint_coupling(&self) -> Coupling {
        let mut c = Coupling::zeros(self.rows, self.cols, self.denominator);
        for p in &self.paths {
            c.add(p.source, p.target, p.count);
        }
        c
    }

    /// Total action `Σ m_k A(γ_k)`.
    pub fn action(&self) -> f64 {
        self.paths.iter().map(|p| p.count as f64 * p.geodesic.action()).sum::<f64>() / self.denominator as f64
    }

    /// `(ev_t)_♯Π` in counting form together with the atom of every path.
    /// Atoms are listed by first appearance, with paths ordered by source
    /// index (by target index at `t = 1`).
    fn evaluate(&self, t: f64) -> (Vec<Event>, Vec<u64>, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.paths.len()).collect();
        if t >= 1.0 {
            order.sort_by_key(|&k| (self.paths[k].target, self.paths[k].source));
        }
        let mut atoms: Vec<Event> = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        let mut atom_of = alloc::vec![0; self.paths.len()];
        for k in order {
            let p = &self.paths[k];
            let e = p.geodesic.point_at(t);
            match atoms.iter().position(|a| *a == e) {
                Some(a) => {
                    counts[a] += p.count;
                    atom_of[k] = a;
                }
                None => {
                    atom_of[k] = atoms.len();
                    atoms.push(e);
                    counts.push(p.count);
                }
            }
        }
        (atoms, counts, atom_of)
    }

    /// `μ_t = (ev_t)_♯Π`; coincident atoms are merged.
    pub fn interpolate(&self, t: f64) -> DiscreteMeasure {
        match (&self.marginals, t) {
            (Some((mu, _)), t) if t <= 0.0 => return mu.clone(),
            (Some((_, nu)), t) if t >= 1.0 => return nu.clone(),
            _ => {}
        }
        let (atoms, counts, _) = self.evaluate(t.clamp(0.0, 1.0));
        DiscreteMeasure::from_counts(atoms, &counts, self.denominator).expect("atoms are distinct and masses positive")
    }

    /// `(ev_s, ev_t)_♯Π` as a plan between `μ_s` and `μ_t`, with the cost
    /// evaluated on the restricted endpoints.
    pub fn restrict(&self, s: f64, t: f64) -> Result<Restriction, DynamicsError> {
        if !(0.0 <= s && s < t && t <= 1.0) {
            return Err(DynamicsError::InvalidTimes { s, t });
        }
        let (src, src_counts, src_of) = self.evaluate(s);
        let (tgt, tgt_counts, tgt_of) = self.evaluate(t);
        let mut coupling = Coupling::zeros(src.len(), tgt.len(), self.denominator);
        for (k, p) in self.paths.iter().enumerate() {
            coupling.add(src_of[k], tgt_of[k], p.count);
        }
        let source = DiscreteMeasure::from_counts(src, &src_counts, self.denominator)?;
        let target = DiscreteMeasure::from_counts(tgt, &tgt_counts, self.denominator)?;
        let cost = CostMatrix::from_model(&self.model, &source, &target);
        let plan = transport::plan_from_coupling(&cost, coupling);
        let marginals = IntegerMarginals {
            denominator: self.denominator,
            source: src_counts,
            target: tgt_counts,
            exact: true,
        };
        Ok(Restriction { source, target, cost, plan, marginals })
    }

    /// The paths in `subset` with masses renormalized to total one.
    pub fn sub_coupling(&self, subset: &[usize]) -> Result<DynamicalCoupling, DynamicsError> {
        if subset.is_empty() {
            return Err(DynamicsError::EmptySubset);
        }
        let mut chosen: Vec<usize> = subset.to_vec();
        chosen.sort_unstable();
        chosen.dedup();
        if let Some(&bad) = chosen.iter().find(|&&k| k >= self.paths.len()) {
            return Err(DynamicsError::PathOutOfRange { index: bad, len: self.paths.len() });
        }
        let paths: Vec<WeightedPath> = chosen.iter().map(|&k| self.paths[k].clone()).collect();
        let denominator = paths.iter().map(|p| p.count).sum();
        Ok(DynamicalCoupling {
            model: self.model.clone(),
            denominator,
            paths,
            rows: self.rows,
            cols: self.cols,
            marginals: None,
        })
    }

    /// Endpoint plan of the coupling between its own marginals `μ_0`, `μ_1`.
    pub fn endpoint_restriction(&self) -> Restriction {
        self.restrict(0.0, 1.0).expect("0 < 1")
    }
}

/// A restricted coupling between two interpolants.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub source: DiscreteMeasure,
    pub target: DiscreteMeasure,
    pub cost: CostMatrix,
    /// The restricted coupling with its cost and residual-graph potentials.
    pub plan: TransportPlan,
    pub marginals: IntegerMarginals,
}

/// Comparison of a restriction with an independent solve between the same
/// marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionCheck {
    pub restricted_cost: f64,
    pub resolved_cost: f64,
    pub same_support: bool,
}

impl Restriction {
    /// Re-solves between `μ_s` and `μ_t` from scratch.
    pub fn check(&self) -> Result<RestrictionCheck, DynamicsError> {
        let resolved = transport::solve_counts(&self.marginals, &self.cost)?;
        Ok(RestrictionCheck {
            restricted_cost: self.plan.primal_cost,
            resolved_cost: resolved.primal_cost,
            same_support: resolved.coupling.support_mask() == self.plan.coupling.support_mask(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ev(t: f64, x: f64) -> Event {
        Event::new(t, vec![x]).unwrap()
    }

    fn three_segments() -> (DiscreteMeasure, DiscreteMeasure, DynamicalCoupling) {
        let model = SpacetimeModel::minkowski(1).unwrap();
        let mu = DiscreteMeasure::uniform((0..3).map(|k| ev(0.0, k as f64)).collect()).unwrap();
        let nu = DiscreteMeasure::uniform((0..3).map(|k| ev(2.0, k as f64)).collect()).unwrap();
        let plan = transport::solve(&mu, &nu, &CostMatrix::from_model(&model, &mu, &nu)).unwrap();
        let dc = lift(&model, &mu, &nu, &plan.coupling).unwrap();
        (mu, nu, dc)
    }

    #[test]
    fn dirac_lift() {
        let model = SpacetimeModel::minkowski(1).unwrap();
        let mu = DiscreteMeasure::dirac(ev(0.0, 0.0));
        let nu = DiscreteMeasure::dirac(ev(1.0, 0.5));
        let dc = lift(&model, &mu, &nu, &Coupling::dirac()).unwrap();
        assert_eq!(dc.len(), 1);
        assert_eq!(dc.mass(0), 1.0);
    }

    #[test]
    fn three_vertical_segments() {
        let (mu, nu, dc) = three_segments();
        assert_eq!(dc.len(), 3);
        for p in dc.paths() {
            assert_eq!(p.source, p.target);
            assert_eq!(p.geodesic.start().x, p.geodesic.end().x);
        }
        assert_eq!(dc.interpolate(0.0), mu);
        assert_eq!(dc.interpolate(1.0), nu);
        let mid = dc.interpolate(0.5);
        assert_eq!(mid.points(), &[ev(1.0, 0.0), ev(1.0, 1.0), ev(1.0, 2.0)]);
    }

    #[test]
    fn zero_mass_pairs_emit_no_path() {
        let model = SpacetimeModel::minkowski(1).unwrap();
        let mu = DiscreteMeasure::uniform(vec![ev(0.0, 0.0), ev(0.0, 1.0)]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![ev(2.0, 0.0), ev(2.0, 1.0)]).unwrap();
        let c = Coupling::from_entries(2, 2, 2, &[(0, 0, 1), (1, 1, 1)]);
        let dc = lift(&model, &mu, &nu, &c).unwrap();
        assert_eq!(dc.len(), 2);
        assert_eq!(dc.endpoint_coupling(), c);
    }

    #[test]
    fn restriction_halves_proper_time() {
        let (_, _, dc) = three_segments();
        let full = dc.restrict(0.0, 1.0).unwrap();
        assert!((full.plan.primal_cost + 2.0).abs() < 1e-12);
        let half = dc.restrict(0.0, 0.5).unwrap();
        assert!((half.plan.primal_cost + 1.0).abs() < 1e-12);
        let check = half.check().unwrap();
        assert!((check.restricted_cost - check.resolved_cost).abs() < 1e-8);
        assert!(check.same_support);
        assert!(matches!(dc.restrict(0.5, 0.5), Err(DynamicsError::InvalidTimes { .. })));
    }

    #[test]
    fn sub_couplings() {
        let (_, _, dc) = three_segments();
        let all = dc.sub_coupling(&[0, 1, 2]).unwrap();
        assert_eq!(all.paths(), dc.paths());
        assert_eq!(all.interpolate(0.0), dc.interpolate(0.0));
        let one = dc.sub_coupling(&[1]).unwrap();
        assert_eq!(one.mass(0), 1.0);
        let two = dc.sub_coupling(&[0, 2]).unwrap();
        let r = two.endpoint_restriction();
        let check = r.check().unwrap();
        assert!((check.restricted_cost - check.resolved_cost).abs() < 1e-8);
        assert_eq!(dc.sub_coupling(&[]), Err(DynamicsError::EmptySubset));
    }
}
