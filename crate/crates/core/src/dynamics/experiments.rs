//! Constructed instances for the regularity diagnostics.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{lift, regularity_report, regularity_report_at, DynamicalCoupling, DynamicsError, RegularityReport};
use crate::feasibility::{extract_permutation, matching_is_unique, CausalRelation, PermutationResult};
use crate::geometry::{CausalCharacter, Direction, Event, Geodesic, SpacetimeModel};
use crate::math;
use crate::measures::DiscreteMeasure;
use crate::transport::{self, CostMatrix, TransportPlan};

/// Interior time at which the sharpness instance is evaluated.
pub const SHARPNESS_TIME: f64 = 0.5;

/// Width of the source segment of the sharpness instance.
const SHARPNESS_WIDTH: f64 = 0.2;

/// Sources `(0, x_i, 0)` and targets `(1, x_i + cos f_i, sin f_i)` with
/// `f_i = π/2 + x_i / t*`.
///
/// `x_0 = 0` and `x_i = 0.2 (i + U_i) / N` for `i ≥ 1`. Every target lies
/// on the unit circle around its source, so each diagonal pair is null.
/// The rotation rate `1/t*` makes first-order position differences cancel
/// at `t*` while the directions still differ.
pub fn sharpness_instance(n: usize, seed: u64) -> (Vec<Event>, Vec<Event>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n)
        .map(|i| if i == 0 { 0.0 } else { SHARPNESS_WIDTH * (i as f64 + rng.gen::<f64>()) / n as f64 })
        .collect();
    let sources = xs.iter().map(|&x| Event { t: 0.0, x: alloc::vec![x, 0.0] }).collect();
    let targets = xs
        .iter()
        .map(|&x| {
            let f = FRAC_PI_2 + x / SHARPNESS_TIME;
            Event { t: 1.0, x: alloc::vec![x + math::cos(f), math::sin(f)] }
        })
        .collect();
    (sources, targets)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderExperiment {
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    pub plan: TransportPlan,
    pub coupling: DynamicalCoupling,
    /// The diagonal was the only perfect matching inside the relation.
    pub unique_matching: bool,
    /// Every diagonal pair was classified null.
    pub diagonal_null: bool,
    pub report: RegularityReport,
}

/// Regularity of the sharpness instance at `t*`.
pub fn holder_sharpness_experiment(n: usize, seed: u64) -> Result<HolderExperiment, DynamicsError> {
    if n < 16 {
        return Err(DynamicsError::TooSmall { n, min: 16 });
    }
    let model = SpacetimeModel::minkowski(2).expect("positive dimension");
    let (sources, targets) = sharpness_instance(n, seed);
    let diagonal_null =
        sources.iter().zip(&targets).all(|(s, t)| model.causal_relation(s, t) == Some(CausalCharacter::Null));
    let mu = DiscreteMeasure::uniform(sources)?;
    let nu = DiscreteMeasure::uniform(targets)?;
    let rel = CausalRelation::build(&model, &mu, &nu, 0.0).expect("same dimension");
    let identity: Vec<usize> = (0..n).collect();
    let unique_matching = match extract_permutation(&rel).expect("square") {
        PermutationResult::Found(sigma) => sigma == identity && matching_is_unique(&rel, &sigma),
        PermutationResult::Deficient { .. } => false,
    };
    if !unique_matching {
        return Err(DynamicsError::NotUnique);
    }
    let cost = CostMatrix::from_model(&model, &mu, &nu);
    let plan = transport::solve(&mu, &nu, &cost)?;
    let coupling = lift(&model, &mu, &nu, &plan.coupling)?;
    let report = regularity_report_at(&coupling, &[SHARPNESS_TIME]);
    Ok(HolderExperiment { mu, nu, plan, coupling, unique_matching, diagonal_null, report })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorExperiment {
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    pub plan: TransportPlan,
    pub coupling: DynamicalCoupling,
    /// `max |v| / v0` over all stored tangents.
    pub max_speed_ratio: f64,
    pub report: RegularityReport,
}

/// Dilation of the unit disc by `1.4` over unit time: sources uniform in
/// the disc at `t = 0`, targets at `(1, 1.4 x)`, so every optimal path
/// moves with speed at most `0.4`.
pub fn interior_regularity_experiment(n: usize, seed: u64, eps_time: f64) -> Result<InteriorExperiment, DynamicsError> {
    if n < 2 {
        return Err(DynamicsError::TooSmall { n, min: 2 });
    }
    let model = SpacetimeModel::minkowski(2).expect("positive dimension");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sources: Vec<Event> = Vec::with_capacity(n);
    while sources.len() < n {
        let (a, b) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if a * a + b * b <= 1.0 {
            sources.push(Event { t: 0.0, x: alloc::vec![a, b] });
        }
    }
    let targets: Vec<Event> = sources.iter().map(|s| Event { t: 1.0, x: s.x.iter().map(|c| 1.4 * c).collect() }).collect();
    let mu = DiscreteMeasure::uniform(sources)?;
    let nu = DiscreteMeasure::uniform(targets)?;
    let cost = CostMatrix::from_model(&model, &mu, &nu);
    let plan = transport::solve(&mu, &nu, &cost)?;
    let coupling = lift(&model, &mu, &nu, &plan.coupling)?;
    let max_speed_ratio = coupling
        .paths()
        .iter()
        .flat_map(|p| p.geodesic.samples().iter())
        .map(|s| math::norm(&s.tangent.v) / s.tangent.v0)
        .fold(0.0, f64::max);
    let report = regularity_report(&coupling, eps_time);
    Ok(InteriorExperiment { mu, nu, plan, coupling, max_speed_ratio, report })
}

/// Change of total cost when two minimizers swap their endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShorteningGain {
    Gain(f64),
    /// The swapped pairs are not causally related.
    NotApplicable,
}

/// `c(γ₁(0), γ₂(1)) + c(γ₂(0), γ₁(1)) − c(γ₁(0), γ₁(1)) − c(γ₂(0), γ₂(1))`.
pub fn shortening_gain(model: &SpacetimeModel, g1: &Geodesic, g2: &Geodesic) -> ShorteningGain {
    let (a0, a1, b0, b1) = (g1.start(), g1.end(), g2.start(), g2.end());
    if !model.is_causal(a0, b1) || !model.is_causal(b0, a1) {
        return ShorteningGain::NotApplicable;
    }
    ShorteningGain::Gain(model.cost(a0, b1) + model.cost(b0, a1) - model.cost(a0, a1) - model.cost(b0, b1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShorteningExperiment {
    /// `(gain, direction gap at the crossing)` per sampled pair.
    pub samples: Vec<(f64, f64)>,
    /// Least-squares `κ̂` in `gain ≈ −κ̂·gap²`.
    pub kappa_hat: f64,
    pub max_gain: f64,
    pub not_applicable: usize,
}

/// Random pairs of timelike segments in Minkowski `1+2` crossing at an
/// interior time `b ∈ [0.2, 0.8]` with speeds at most `0.8`.
pub fn shortening_experiment(n: usize, seed: u64) -> ShorteningExperiment {
    let model = SpacetimeModel::minkowski(2).expect("positive dimension");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let velocity = |rng: &mut ChaCha8Rng| loop {
        let v = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)];
        if v[0] * v[0] + v[1] * v[1] <= 0.64 {
            return v;
        }
    };
    let mut samples = Vec::with_capacity(n);
    let mut not_applicable = 0;
    while samples.len() + not_applicable < n {
        let b: f64 = rng.gen_range(0.2..0.8);
        let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let (v1, v2) = (velocity(&mut rng), velocity(&mut rng));
        let d1 = Direction::from_components(&[1.0, v1[0], v1[1]]).expect("nonzero");
        let d2 = Direction::from_components(&[1.0, v2[0], v2[1]]).expect("nonzero");
        let gap = d1.angle_to(&d2);
        if gap < 1e-3 {
            continue;
        }
        let segment = |v: [f64; 2]| {
            let p = Event { t: 0.0, x: alloc::vec![c[0] - b * v[0], c[1] - b * v[1]] };
            let q = Event { t: 1.0, x: alloc::vec![c[0] + (1.0 - b) * v[0], c[1] + (1.0 - b) * v[1]] };
            model.geodesic(&p, &q).expect("timelike segment")
        };
        match shortening_gain(&model, &segment(v1), &segment(v2)) {
            ShorteningGain::Gain(g) => samples.push((g, gap)),
            ShorteningGain::NotApplicable => not_applicable += 1,
        }
    }
    let num: f64 = samples.iter().map(|(g, d)| -g * d * d).sum();
    let den: f64 = samples.iter().map(|(_, d)| d * d * d * d).sum();
    ShorteningExperiment {
        kappa_hat: if den > 0.0 { num / den } else { 0.0 },
        max_gain: samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max),
        samples,
        not_applicable,
    }
}
