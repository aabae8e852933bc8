use alloc::vec::Vec;

use super::flow::{self, FlowState, FLOW_STEPS};
use super::{Event, GeometryError, SpacetimeModel, Tangent};
use crate::math;

/// Samples stored per geodesic on the uniform parameter grid.
pub const SAMPLES_PER_GEODESIC: usize = 65;

const SUBSTEPS: usize = FLOW_STEPS / (SAMPLES_PER_GEODESIC - 1);

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub s: f64,
    pub point: Event,
    /// Derivative with respect to `s`.
    pub tangent: Tangent,
}

/// An action-minimizing curve `γ: [0, 1] → M` with `dt/ds` constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    model: SpacetimeModel,
    start: Event,
    end: Event,
    samples: Vec<GeodesicSample>,
    /// Spatial velocity `dx/dt` at each sample (empty for constant curves).
    velocities: Vec<Vec<f64>>,
    action: f64,
    endpoint_residual: f64,
}

pub(crate) fn build(model: &SpacetimeModel, p: &Event, q: &Event) -> Result<Geodesic, GeometryError> {
    if !model.is_causal(p, q) {
        return Err(GeometryError::InfeasiblePair);
    }
    let dt = q.t - p.t;
    let n = SAMPLES_PER_GEODESIC;
    let grid = |k: usize| k as f64 / (n - 1) as f64;
    if dt == 0.0 {
        let samples = (0..n)
            .map(|k| GeodesicSample {
                s: grid(k),
                point: p.clone(),
                tangent: Tangent::new(p.clone(), 0.0, alloc::vec![0.0; p.x.len()]),
            })
            .collect();
        return Ok(Geodesic {
            model: model.clone(),
            start: p.clone(),
            end: q.clone(),
            samples,
            velocities: Vec::new(),
            action: 0.0,
            endpoint_residual: 0.0,
        });
    }
    let dx: Vec<f64> = q.x.iter().zip(&p.x).map(|(b, a)| b - a).collect();
    match model {
        SpacetimeModel::Minkowski { .. } => {
            let velocity: Vec<f64> = dx.iter().map(|c| c / dt).collect();
            let samples: Vec<GeodesicSample> = (0..n)
                .map(|k| {
                    let s = grid(k);
                    let point = affine_point(p, q, s);
                    GeodesicSample { s, tangent: Tangent::new(point.clone(), dt, dx.clone()), point }
                })
                .collect();
            Ok(Geodesic {
                model: model.clone(),
                start: p.clone(),
                end: q.clone(),
                samples,
                velocities: alloc::vec![velocity; n],
                action: model.cost(p, q),
                endpoint_residual: 0.0,
            })
        }
        SpacetimeModel::RobertsonWalker { .. } => {
            let shot = flow::shoot(model, p, q)?;
            let dist = math::norm(&dx);
            let speed = shot.speed_fraction / model.scale(p.t);
            let v0: Vec<f64> = if dist == 0.0 {
                alloc::vec![0.0; dx.len()]
            } else {
                dx.iter().map(|c| speed * c / dist).collect()
            };
            let h = dt / FLOW_STEPS as f64;
            let mut state = FlowState { t: p.t, x: p.x.clone(), v: v0 };
            let mut samples = Vec::with_capacity(n);
            let mut velocities = Vec::with_capacity(n);
            let mut proper_time = 0.0;
            for k in 0..n {
                if k > 0 {
                    let (next, tau) = flow::integrate_with_proper_time(model, &state, h, SUBSTEPS);
                    state = next;
                    proper_time += tau;
                    // keep the time coordinate on the exact affine grid
                    state.t = p.t + grid(k) * dt;
                }
                let point = Event { t: state.t, x: state.x.clone() };
                let tangent_v: Vec<f64> = state.v.iter().map(|c| c * dt).collect();
                samples.push(GeodesicSample { s: grid(k), tangent: Tangent::new(point.clone(), dt, tangent_v), point });
                velocities.push(state.v.clone());
            }
            let endpoint_residual = math::distance(&state.x, &q.x);
            if endpoint_residual > 1e-8 * (1.0 + dist) {
                return Err(GeometryError::NumericalFailure { residual: endpoint_residual });
            }
            samples[0].point = p.clone();
            samples[n - 1].point = q.clone();
            let action = if shot.speed_fraction >= 1.0 { 0.0 } else { -proper_time };
            Ok(Geodesic {
                model: model.clone(),
                start: p.clone(),
                end: q.clone(),
                samples,
                velocities,
                action,
                endpoint_residual,
            })
        }
    }
}

fn affine_point(p: &Event, q: &Event, s: f64) -> Event {
    if s == 0.0 {
        return p.clone();
    }
    if s == 1.0 {
        return q.clone();
    }
    Event {
        t: p.t + s * (q.t - p.t),
        x: p.x.iter().zip(&q.x).map(|(a, b)| a + s * (b - a)).collect(),
    }
}

impl Geodesic {
    pub fn model(&self) -> &SpacetimeModel {
        &self.model
    }

    pub fn start(&self) -> &Event {
        &self.start
    }

    pub fn end(&self) -> &Event {
        &self.end
    }

    pub fn samples(&self) -> &[GeodesicSample] {
        &self.samples
    }

    /// `∫ L(γ̇) ds`, equal to the cost of the endpoints.
    pub fn action(&self) -> f64 {
        self.action
    }

    /// Distance between the integrated endpoint and the requested one.
    pub fn endpoint_residual(&self) -> f64 {
        self.endpoint_residual
    }

    pub fn is_constant(&self) -> bool {
        self.start.t == self.end.t
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let n = SAMPLES_PER_GEODESIC - 1;
        let scaled = s.clamp(0.0, 1.0) * n as f64;
        let k = (scaled as usize).min(n - 1);
        (k, s.clamp(0.0, 1.0) - self.samples[k].s)
    }

    /// Flow state at parameter `s`, integrated from the nearest sample below.
    fn state_at(&self, s: f64) -> FlowState {
        let (k, ds) = self.locate(s);
        let base = &self.samples[k];
        let state = FlowState { t: base.point.t, x: base.point.x.clone(), v: self.velocities[k].clone() };
        if ds == 0.0 {
            return state;
        }
        let h = ds * (self.end.t - self.start.t) / SUBSTEPS as f64;
        let (mut next, _) = flow::integrate_with_proper_time(&self.model, &state, h, SUBSTEPS);
        next.t = self.start.t + s * (self.end.t - self.start.t);
        next
    }

    /// `ev_s(γ) = γ(s)`.
    pub fn point_at(&self, s: f64) -> Event {
        if s <= 0.0 {
            return self.start.clone();
        }
        if s >= 1.0 {
            return self.end.clone();
        }
        if self.is_constant() {
            return self.start.clone();
        }
        match self.model {
            SpacetimeModel::Minkowski { .. } => affine_point(&self.start, &self.end, s),
            SpacetimeModel::RobertsonWalker { .. } => {
                let st = self.state_at(s);
                Event { t: st.t, x: st.x }
            }
        }
    }

    /// `γ̇(s)`.
    pub fn tangent_at(&self, s: f64) -> Tangent {
        let point = self.point_at(s);
        let dt = self.end.t - self.start.t;
        if self.is_constant() {
            let d = self.start.x.len();
            return Tangent::new(point, 0.0, alloc::vec![0.0; d]);
        }
        let v = match self.model {
            SpacetimeModel::Minkowski { .. } => self.velocities[0].clone(),
            SpacetimeModel::RobertsonWalker { .. } => self.state_at(s).v,
        };
        Tangent::new(point, dt, v.iter().map(|c| c * dt).collect())
    }
}

/// Action of the piecewise coordinate-linear curve through `points`;
/// `+∞` as soon as one segment leaves the causal cone.
pub fn path_action(model: &SpacetimeModel, points: &[Event]) -> f64 {
    let mut total = 0.0;
    for w in points.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let dt = q.t - p.t;
        let d2: f64 = q.x.iter().zip(&p.x).map(|(a, b)| (a - b) * (a - b)).sum();
        if dt < 0.0 {
            return f64::INFINITY;
        }
        match model {
            SpacetimeModel::Minkowski { .. } => {
                let form = dt * dt - d2;
                if form < -super::TOL_NULL * (dt * dt + d2) {
                    return f64::INFINITY;
                }
                total -= math::sqrt(form.max(0.0));
            }
            SpacetimeModel::RobertsonWalker { .. } => {
                let outside = core::cell::Cell::new(false);
                let integral = math::gauss_legendre(
                    |s| {
                        let a = model.scale(p.t + s * dt);
                        let form = dt * dt - a * a * d2;
                        if form < -super::TOL_NULL * (dt * dt + a * a * d2) {
                            outside.set(true);
                        }
                        math::sqrt(form.max(0.0))
                    },
                    0.0,
                    1.0,
                    32,
                );
                if outside.get() {
                    return f64::INFINITY;
                }
                total -= integral;
            }
        }
    }
    total
}
