//! Monge maps on spacelike and achronal supports: hypothesis validators,
//! map extraction, uniqueness probing and split diagnostics.

mod instances;

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coupling::Coupling;
use crate::feasibility::counting_form;
use crate::geometry::{CausalCharacter, Event, SpacetimeModel};
use crate::math;
use crate::measures::{DiscreteMeasure, MeasureError};
use crate::rational::IntegerMarginals;
use crate::transport::{self, CostMatrix, TransportError, TransportPlan};

pub use instances::{
    disc_pool, farthest_point_sample, null_cone_instance, refinement_split_fractions, spacelike_disc_instance,
    SPACELIKE_DISC_ATOMS,
};

/// Relative row mass below which a coupling entry is ignored.
pub const MAP_TOL: f64 = 1e-10;
/// Probe runs whose costs differ by more than this are not counted as ties.
pub const PROBE_COST_TOL: f64 = 1e-9;
/// Largest secondary cost drawn by the uniqueness probe.
const PROBE_SECONDARY_MAX: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MongeError {
    #[error("no points given")]
    Empty,
    #[error("points {first} and {second} share a spatial projection")]
    DuplicateProjection { first: usize, second: usize },
    #[error("epsilon must lie in (0, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Outcome of a pairwise hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    /// Indices of a pair breaking the condition, earlier event first.
    Violation(usize, usize),
}

impl Verdict {
    pub fn is_ok(self) -> bool {
        self == Verdict::Ok
    }
}

/// Points of a graph `t = f(x)` with the largest pairwise slope.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceSample {
    pub points: Vec<Event>,
    pub graph_values: Vec<f64>,
    pub lipschitz_estimate: f64,
}

impl HypersurfaceSample {
    pub fn new(points: Vec<Event>) -> Result<Self, MongeError> {
        if points.is_empty() {
            return Err(MongeError::Empty);
        }
        let mut lip: f64 = 0.0;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let dx = math::distance(&points[i].x, &points[j].x);
                if dx == 0.0 {
                    return Err(MongeError::DuplicateProjection { first: i, second: j });
                }
                lip = lip.max((points[i].t - points[j].t).abs() / dx);
            }
        }
        let graph_values = points.iter().map(|p| p.t).collect();
        Ok(HypersurfaceSample { points, graph_values, lipschitz_estimate: lip })
    }

    /// Samples the graph of `f` over the given spatial points.
    pub fn from_graph<F: Fn(&[f64]) -> f64>(xs: &[Vec<f64>], f: F) -> Result<Self, MongeError> {
        Self::new(xs.iter().map(|x| Event { t: f(x), x: x.clone() }).collect())
    }
}

/// No pair of points is timelike related.
pub fn achronal_check(model: &SpacetimeModel, points: &[Event]) -> Verdict {
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i != j && model.causal_relation(&points[i], &points[j]) == Some(CausalCharacter::Timelike) {
                return Verdict::Violation(i, j);
            }
        }
    }
    Verdict::Ok
}

/// Pairwise slopes stay below `1 − eps` in conformal time:
/// `|Δη| ≤ (1 − eps)·|Δx|`, with `η = t` in Minkowski.
pub fn spacelike_check(model: &SpacetimeModel, points: &[Event], eps: f64) -> Result<Verdict, MongeError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(MongeError::InvalidEpsilon(eps));
    }
    let mut first = None;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let dx = math::distance(&points[i].x, &points[j].x);
            if dx == 0.0 {
                return Err(MongeError::DuplicateProjection { first: i, second: j });
            }
            let (a, b) = if points[i].t <= points[j].t { (i, j) } else { (j, i) };
            let deta = conformal_gap(model, points[a].t, points[b].t);
            if first.is_none() && deta > (1.0 - eps) * dx * (1.0 + 1e-12) {
                first = Some(Verdict::Violation(a, b));
            }
        }
    }
    Ok(first.unwrap_or(Verdict::Ok))
}

fn conformal_gap(model: &SpacetimeModel, t0: f64, t1: f64) -> f64 {
    match model {
        SpacetimeModel::Minkowski { .. } => t1 - t0,
        SpacetimeModel::RobertsonWalker { scale, .. } => scale.conformal_time(t0, t1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MongeOutcome {
    /// `map[i]` is the single target of source `i`.
    Map(Vec<usize>),
    /// Source `source` sends mass to both `targets`.
    NotAGraph { source: usize, targets: (usize, usize) },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MongeSolution {
    pub plan: TransportPlan,
    pub outcome: MongeOutcome,
    /// No atom of `μ` is an atom of `ν`.
    pub disjoint_supports: bool,
}

/// Solves the plan and reads off a map when every row has one target.
pub fn monge_solve(model: &SpacetimeModel, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<MongeSolution, MongeError> {
    let cost = CostMatrix::from_model(model, mu, nu);
    let plan = transport::solve(mu, nu, &cost)?;
    let outcome = read_map(&plan.coupling);
    let disjoint_supports = mu.points().iter().all(|p| !nu.points().contains(p));
    Ok(MongeSolution { plan, outcome, disjoint_supports })
}

fn row_targets(coupling: &Coupling, i: usize) -> Vec<usize> {
    let row_mass: u64 = (0..coupling.cols()).map(|j| coupling.count(i, j)).sum();
    (0..coupling.cols())
        .filter(|&j| coupling.count(i, j) as f64 > MAP_TOL * row_mass as f64)
        .collect()
}

fn read_map(coupling: &Coupling) -> MongeOutcome {
    let mut map = Vec::with_capacity(coupling.rows());
    for i in 0..coupling.rows() {
        let targets = row_targets(coupling, i);
        match targets[..] {
            [j] => map.push(j),
            [j1, j2, ..] => return MongeOutcome::NotAGraph { source: i, targets: (j1, j2) },
            [] => unreachable!("every source atom carries mass"),
        }
    }
    MongeOutcome::Map(map)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeVerdict {
    /// Every run returned the support of `plan`.
    Unique { plan: TransportPlan, trials: usize },
    /// Two optimal couplings with different supports.
    NonUnique { first: TransportPlan, second: TransportPlan, trial: usize },
}

/// Re-solves under random row and column permutations with random
/// secondary costs breaking ties among optimal plans.
pub fn uniqueness_probe(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    trials: usize,
    seed: u64,
) -> Result<ProbeVerdict, MongeError> {
    let cost = CostMatrix::from_model(model, mu, nu);
    let marg = counting_form(mu, nu);
    probe_counts(&marg, &cost, trials, seed)
}

/// [`uniqueness_probe`] on an instance in counting form.
pub fn probe_counts(
    marg: &IntegerMarginals,
    cost: &CostMatrix,
    trials: usize,
    seed: u64,
) -> Result<ProbeVerdict, MongeError> {
    let base = transport::solve_counts(marg, cost)?;
    let base_mask = base.coupling.support_mask();
    let (m, n) = (cost.rows(), cost.cols());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let mut rp: Vec<usize> = (0..m).collect();
        let mut cp: Vec<usize> = (0..n).collect();
        rp.shuffle(&mut rng);
        cp.shuffle(&mut rng);
        let entries: Vec<f64> = (0..m).flat_map(|a| cp.iter().map(move |&b| (a, b))).map(|(a, b)| cost.get(rp[a], b)).collect();
        let permuted_cost = CostMatrix::from_entries(m, n, entries);
        let permuted = IntegerMarginals {
            denominator: marg.denominator,
            source: rp.iter().map(|&i| marg.source[i]).collect(),
            target: cp.iter().map(|&j| marg.target[j]).collect(),
            exact: marg.exact,
        };
        let secondary: Vec<u32> = (0..m * n).map(|_| rng.gen_range(0..=PROBE_SECONDARY_MAX)).collect();
        let plan = transport::solve_with_tiebreak(&permuted, &permuted_cost, Some(&secondary))?;
        let mut coupling = Coupling::zeros(m, n, marg.denominator);
        for (a, b, k) in plan.coupling.support() {
            coupling.add(rp[a], cp[b], k);
        }
        if coupling.support_mask() == base_mask {
            continue;
        }
        let other = transport::plan_from_coupling(cost, coupling);
        if (other.primal_cost - base.primal_cost).abs() <= PROBE_COST_TOL * (1.0 + base.primal_cost.abs()) {
            return Ok(ProbeVerdict::NonUnique { first: base, second: other, trial });
        }
    }
    Ok(ProbeVerdict::Unique { plan: base, trials })
}

/// A source atom coupled to two targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRecord {
    pub source: usize,
    pub first: usize,
    pub second: usize,
    /// Angle between the initial directions of the minimizers from the
    /// source to the two targets; zero when both lie on one minimizer.
    pub defect: f64,
}

/// Every pair of targets sharing a source in `plan`.
pub fn double_intersection_scan(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    plan: &TransportPlan,
) -> Vec<SplitRecord> {
    let mut out = Vec::new();
    for i in 0..plan.coupling.rows() {
        let targets = row_targets(&plan.coupling, i);
        let p = &mu.points()[i];
        for a in 0..targets.len() {
            for b in (a + 1)..targets.len() {
                let (j1, j2) = (targets[a], targets[b]);
                let defect = initial_angle(model, p, &nu.points()[j1], &nu.points()[j2]);
                out.push(SplitRecord { source: i, first: j1, second: j2, defect });
            }
        }
    }
    out
}

fn initial_angle(model: &SpacetimeModel, p: &Event, q1: &Event, q2: &Event) -> f64 {
    let direction = |q: &Event| -> Vec<f64> {
        match model {
            SpacetimeModel::Minkowski { .. } => {
                let mut d = alloc::vec![q.t - p.t];
                d.extend(q.x.iter().zip(&p.x).map(|(a, b)| a - b));
                d
            }
            SpacetimeModel::RobertsonWalker { .. } => match model.geodesic(p, q) {
                Ok(g) => g.samples()[0].tangent.components(),
                Err(_) => alloc::vec![0.0; q.x.len() + 1],
            },
        }
    };
    math::angle_between(&direction(q1), &direction(q2))
}

/// Fraction of source atoms sending mass to more than one target.
pub fn split_fraction(coupling: &Coupling) -> f64 {
    let split = (0..coupling.rows()).filter(|&i| row_targets(coupling, i).len() > 1).count();
    split as f64 / coupling.rows() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::brute_force_solve;
    use alloc::vec;

    fn ev(t: f64, x: f64) -> Event {
        Event::new(t, vec![x]).unwrap()
    }

    fn mink() -> SpacetimeModel {
        SpacetimeModel::minkowski(1).unwrap()
    }

    #[test]
    fn achronal_examples() {
        let m = mink();
        let plane: Vec<Event> = (0..5).map(|k| ev(0.0, k as f64)).collect();
        assert_eq!(achronal_check(&m, &plane), Verdict::Ok);
        let cone: Vec<Event> = [-2.0, -1.0, 0.0, 1.0, 3.0].iter().map(|&x: &f64| ev(-x.abs(), x)).collect();
        assert_eq!(achronal_check(&m, &cone), Verdict::Ok);
        assert_eq!(achronal_check(&m, &[ev(0.0, 0.0), ev(1.0, 0.0)]), Verdict::Violation(0, 1));
    }

    #[test]
    fn spacelike_examples() {
        let m = mink();
        let plane: Vec<Event> = (0..5).map(|k| ev(0.0, k as f64)).collect();
        assert_eq!(spacelike_check(&m, &plane, 0.999).unwrap(), Verdict::Ok);
        let tilted: Vec<Event> = (0..7).map(|k| ev(0.5 * (k as f64 * 0.3), k as f64 * 0.3)).collect();
        assert_eq!(spacelike_check(&m, &tilted, 0.5).unwrap(), Verdict::Ok);
        assert!(!spacelike_check(&m, &tilted, 0.51).unwrap().is_ok());
        let null: Vec<Event> = (0..4).map(|k| ev(k as f64, k as f64)).collect();
        for eps in [1e-6, 0.1, 0.9] {
            assert!(!spacelike_check(&m, &null, eps).unwrap().is_ok());
        }
        assert_eq!(
            spacelike_check(&m, &[ev(0.0, 1.0), ev(0.5, 1.0)], 0.1),
            Err(MongeError::DuplicateProjection { first: 0, second: 1 })
        );
        assert_eq!(spacelike_check(&m, &plane, 0.0), Err(MongeError::InvalidEpsilon(0.0)));
    }

    #[test]
    fn hypersurface_lipschitz() {
        let xs: Vec<Vec<f64>> = (0..5).map(|k| vec![k as f64]).collect();
        let h = HypersurfaceSample::from_graph(&xs, |x| 0.25 * x[0]).unwrap();
        assert!((h.lipschitz_estimate - 0.25).abs() < 1e-15);
        assert_eq!(h.graph_values[4], 1.0);
    }

    #[test]
    fn rigid_translation_is_identity_map() {
        let m = mink();
        let mu = DiscreteMeasure::uniform((0..5).map(|k| ev(0.0, 0.1 * k as f64)).collect()).unwrap();
        let nu = DiscreteMeasure::uniform((0..5).map(|k| ev(1.0, 0.1 * k as f64)).collect()).unwrap();
        let s = monge_solve(&m, &mu, &nu).unwrap();
        assert_eq!(s.outcome, MongeOutcome::Map(vec![0, 1, 2, 3, 4]));
        assert!(s.disjoint_supports);
        let brute = brute_force_solve(&mu, &nu, &CostMatrix::from_model(&m, &mu, &nu)).unwrap();
        assert!((brute.cost - s.plan.primal_cost).abs() < 1e-12);
    }

    #[test]
    fn dirac_to_two_atoms_is_not_a_graph() {
        let m = mink();
        let mu = DiscreteMeasure::dirac(ev(0.0, 0.0));
        let nu = DiscreteMeasure::uniform(vec![ev(1.0, -0.5), ev(1.0, 0.5)]).unwrap();
        let s = monge_solve(&m, &mu, &nu).unwrap();
        assert_eq!(s.outcome, MongeOutcome::NotAGraph { source: 0, targets: (0, 1) });
        let splits = double_intersection_scan(&m, &mu, &nu, &s.plan);
        assert_eq!(splits.len(), 1);
        assert!(splits[0].defect > 0.5);
        assert_eq!(split_fraction(&s.plan.coupling), 1.0);
    }

    #[test]
    fn split_along_a_null_ray_is_colinear() {
        let m = mink();
        let mu = DiscreteMeasure::dirac(ev(0.0, 0.0));
        let nu = DiscreteMeasure::uniform(vec![ev(1.0, 1.0), ev(2.0, 2.0)]).unwrap();
        let s = monge_solve(&m, &mu, &nu).unwrap();
        let splits = double_intersection_scan(&m, &mu, &nu, &s.plan);
        assert_eq!(splits.len(), 1);
        assert!(splits[0].defect < 1e-8);
    }

    #[test]
    fn map_plans_have_no_splits() {
        let m = mink();
        let mu = DiscreteMeasure::uniform(vec![ev(0.0, 0.0), ev(0.0, 1.0)]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![ev(1.0, 0.0), ev(1.0, 1.0)]).unwrap();
        let s = monge_solve(&m, &mu, &nu).unwrap();
        assert!(double_intersection_scan(&m, &mu, &nu, &s.plan).is_empty());
        assert_eq!(split_fraction(&s.plan.coupling), 0.0);
    }

    #[test]
    fn dirac_probe_is_unique() {
        let m = mink();
        let v = uniqueness_probe(&m, &DiscreteMeasure::dirac(ev(0.0, 0.0)), &DiscreteMeasure::dirac(ev(1.0, 0.0)), 5, 0);
        assert!(matches!(v, Ok(ProbeVerdict::Unique { trials: 5, .. })));
    }

    #[test]
    fn distinct_costs_probe_is_unique() {
        let m = mink();
        let mu = DiscreteMeasure::uniform((0..4).map(|k| ev(0.0, 0.3 * k as f64)).collect()).unwrap();
        let nu = DiscreteMeasure::uniform((0..4).map(|k| ev(2.0, 0.2 * k as f64 * k as f64 + 0.1)).collect()).unwrap();
        let v = uniqueness_probe(&m, &mu, &nu, 20, 3).unwrap();
        let ProbeVerdict::Unique { plan, .. } = v else { panic!("expected unique") };
        let brute = brute_force_solve(&mu, &nu, &CostMatrix::from_model(&m, &mu, &nu)).unwrap();
        assert!((brute.cost - plan.primal_cost).abs() < 1e-9);
    }

    #[test]
    fn null_cone_probe_finds_two_supports() {
        let (m, mu, nu) = null_cone_instance(2);
        match uniqueness_probe(&m, &mu, &nu, 20, 0).unwrap() {
            ProbeVerdict::NonUnique { first, second, .. } => {
                assert_ne!(first.coupling.support_mask(), second.coupling.support_mask());
                assert_eq!(first.primal_cost, 0.0);
                assert_eq!(second.primal_cost, 0.0);
            }
            other => panic!("expected non-unique, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_is_propagated() {
        let m = mink();
        let mu = DiscreteMeasure::dirac(ev(1.0, 0.0));
        let nu = DiscreteMeasure::dirac(ev(0.0, 0.0));
        assert!(matches!(monge_solve(&m, &mu, &nu), Err(MongeError::Transport(TransportError::Infeasible(_)))));
    }
}
