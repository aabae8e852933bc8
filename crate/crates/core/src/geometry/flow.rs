//! Euler–Lagrange flow of the time-parameterized Lagrangian and the shooting
//! solver built on it.
//!
//! With `X_τ = ∂_t`, the Lagrangian on graphs `t ↦ (t, x(t))` is
//! `L_τ(t, v) = −√(1 − a(t)²|v|²)`. Its conjugate momentum
//! `a²v / √(1 − a²|v|²)` is conserved (the models are spatially homogeneous),
//! which gives the flow
//!
//! ```text
//! x' = v,    v' = −(a'/a)·(2 − a²|v|²)·v.
//! ```
//!
//! The right-hand side is smooth up to and beyond the boundary `a|v| = 1`, and
//! `a|v|` is constant on the boundary.

use alloc::vec;
use alloc::vec::Vec;

use super::{Event, GeometryError, SpacetimeModel};
use crate::math;

/// Number of RK4 steps used to integrate between the two endpoints of a
/// geodesic. A multiple of the sample count minus one.
pub(crate) const FLOW_STEPS: usize = 512;

/// Relative slack allowed outside the closed domain `a|v| ≤ 1`.
const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[inline]
fn accel_factor(model: &SpacetimeModel, t: f64, speed_sq: f64) -> f64 {
    let a = model.scale(t);
    let rate = model.scale_rate(t);
    if rate == 0.0 {
        return 0.0;
    }
    -(rate / a) * (2.0 - a * a * speed_sq)
}

/// Right-hand side on the packed state `[x.., v..]`.
fn rhs(model: &SpacetimeModel, d: usize) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
    move |t, y, out| {
        let (x_dot, v_dot) = out.split_at_mut(d);
        let v = &y[d..2 * d];
        let k = accel_factor(model, t, math::norm_sq(v));
        x_dot.copy_from_slice(v);
        for (o, vi) in v_dot.iter_mut().zip(v) {
            *o = k * vi;
        }
    }
}

pub(crate) fn check_domain(model: &SpacetimeModel, t: f64, v: &[f64]) -> Result<(), GeometryError> {
    let speed = model.scale(t) * math::norm(v);
    if !(speed <= 1.0 + DOMAIN_SLACK) {
        return Err(GeometryError::Domain { speed });
    }
    Ok(())
}

pub(crate) fn el_step(model: &SpacetimeModel, state: &FlowState, h: f64) -> Result<FlowState, GeometryError> {
    let d = model.spatial_dim();
    if state.x.len() != d || state.v.len() != d {
        return Err(GeometryError::DimensionMismatch { expected: d, found: state.x.len() });
    }
    check_domain(model, state.t, &state.v)?;
    let mut y = state.x.clone();
    y.extend_from_slice(&state.v);
    let y = math::rk4_step(rhs(model, d), state.t, &y, h);
    Ok(FlowState { t: state.t + h, x: y[..d].to_vec(), v: y[d..].to_vec() })
}

/// Integrate the flow from `state` over `steps` equal steps of size `h`,
/// also accumulating the proper time `∫ √(1 − a²|v|²) dt`.
pub(crate) fn integrate_with_proper_time(
    model: &SpacetimeModel,
    state: &FlowState,
    h: f64,
    steps: usize,
) -> (FlowState, f64) {
    let d = model.spatial_dim();
    let f = |t: f64, y: &[f64], out: &mut [f64]| {
        rhs(model, d)(t, &y[..2 * d], &mut out[..2 * d]);
        let a = model.scale(t);
        out[2 * d] = math::sqrt((1.0 - a * a * math::norm_sq(&y[d..2 * d])).max(0.0));
    };
    let mut y = state.x.clone();
    y.extend_from_slice(&state.v);
    y.push(0.0);
    let mut t = state.t;
    for _ in 0..steps {
        y = math::rk4_step(f, t, &y, h);
        t += h;
    }
    (FlowState { t, x: y[..d].to_vec(), v: y[d..2 * d].to_vec() }, y[2 * d])
}

/// Spatial distance covered and proper time elapsed by the flow line that
/// starts at time `t0` with speed fraction `sigma = a(t0)|v(t0)|`.
fn radial_run(model: &SpacetimeModel, t0: f64, t1: f64, sigma: f64) -> (f64, f64) {
    let w0 = sigma / model.scale(t0);
    let h = (t1 - t0) / FLOW_STEPS as f64;
    let f = |t: f64, y: &[f64], out: &mut [f64]| {
        let a = model.scale(t);
        let w = y[1];
        out[0] = w;
        out[1] = accel_factor(model, t, w * w) * w;
        out[2] = math::sqrt((1.0 - a * a * w * w).max(0.0));
    };
    let mut y = vec![0.0, w0, 0.0];
    let mut t = t0;
    for _ in 0..FLOW_STEPS {
        y = math::rk4_step(f, t, &y, h);
        t += h;
    }
    (y[0], y[2])
}

/// Result of shooting between two causally related events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Shot {
    /// `a(t_p)·|v|` at the start; `0` is the static curve, `1` a null curve.
    pub speed_fraction: f64,
    pub action: f64,
    pub residual: f64,
}

/// Solve the boundary-value problem for the flow by bracketing the initial
/// speed fraction in `[0, 1]` (regula falsi with the Illinois modification).
///
/// The spatial path of every flow line is a straight segment, so only the
/// initial speed is unknown.
pub(crate) fn shoot(model: &SpacetimeModel, p: &Event, q: &Event) -> Result<Shot, GeometryError> {
    let dt = q.t - p.t;
    let target = math::distance(&q.x, &p.x);
    match model.causal_relation(p, q) {
        None => return Err(GeometryError::InfeasiblePair),
        Some(super::CausalCharacter::Null) => {
            return Ok(Shot { speed_fraction: if dt == 0.0 { 0.0 } else { 1.0 }, action: 0.0, residual: 0.0 })
        }
        Some(_) => {}
    }
    if target == 0.0 {
        let (_, tau) = radial_run(model, p.t, q.t, 0.0);
        return Ok(Shot { speed_fraction: 0.0, action: -tau, residual: 0.0 });
    }
    let residual_at = |sigma: f64| {
        let (r, tau) = radial_run(model, p.t, q.t, sigma);
        (r - target, tau)
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut f_lo = -target;
    let (mut f_hi, _) = residual_at(1.0);
    if f_hi < 0.0 {
        // the quadrature reach and the integrated null reach disagree at the
        // level of discretization error; the pair is null for the integrator
        return Ok(Shot { speed_fraction: 1.0, action: 0.0, residual: f_hi.abs() });
    }
    let tol = 1e-13 * target.max(1.0);
    let mut best = (f64::INFINITY, 0.5, 0.0);
    let mut side = 0i8;
    for _ in 0..200 {
        let mut sigma = if f_hi != f_lo { (lo * f_hi - hi * f_lo) / (f_hi - f_lo) } else { 0.5 * (lo + hi) };
        if !(sigma > lo && sigma < hi) {
            sigma = 0.5 * (lo + hi);
        }
        let (f, tau) = residual_at(sigma);
        if f.abs() < best.0 {
            best = (f.abs(), sigma, tau);
        }
        if f.abs() <= tol || hi - lo <= 1e-16 {
            break;
        }
        if f < 0.0 {
            lo = sigma;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = sigma;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    let (residual, sigma, tau) = best;
    if residual > 1e-9 * target.max(1.0) {
        return Err(GeometryError::NumericalFailure { residual });
    }
    Ok(Shot { speed_fraction: sigma, action: -tau, residual })
}

/// Drift of `𝕃` along a flow line after reparameterizing it to an affine
/// parameter of the quadratic Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConservation {
    /// `𝕃` of the reparameterized tangent at the start.
    pub initial: f64,
    /// `max |𝕃(t) − 𝕃(t0)|` over the integration steps.
    pub max_drift: f64,
    /// `max |a(t)|v(t)| − a(t0)|v(t0)||`; zero drift keeps null data null.
    pub max_speed_drift: f64,
    pub final_state: FlowState,
}

/// Integrate the flow for `duration` in `steps` steps together with the
/// time component `u = dt/dλ` of an affine reparameterization, which obeys
/// `d(ln u)/dt = −a·a'·|v|²` independently of the flow equations. Along a
/// genuine geodesic `u²·(1 − a²|v|²)` is constant.
pub fn flow_conservation(
    model: &SpacetimeModel,
    start: &FlowState,
    duration: f64,
    steps: usize,
) -> Result<FlowConservation, GeometryError> {
    let d = model.spatial_dim();
    check_domain(model, start.t, &start.v)?;
    let f = |t: f64, y: &[f64], out: &mut [f64]| {
        rhs(model, d)(t, &y[..2 * d], &mut out[..2 * d]);
        let a = model.scale(t);
        out[2 * d] = -a * model.scale_rate(t) * math::norm_sq(&y[d..2 * d]);
    };
    let form = |t: f64, y: &[f64]| {
        let a = model.scale(t);
        let u = math::exp(y[2 * d]);
        u * u * (1.0 - a * a * math::norm_sq(&y[d..2 * d]))
    };
    let speed = |t: f64, y: &[f64]| model.scale(t) * math::norm(&y[d..2 * d]);
    let mut y = start.x.clone();
    y.extend_from_slice(&start.v);
    y.push(0.0);
    let mut t = start.t;
    let initial = form(t, &y);
    let speed0 = speed(t, &y);
    let h = duration / steps.max(1) as f64;
    let (mut max_drift, mut max_speed_drift) = (0.0_f64, 0.0_f64);
    for _ in 0..steps.max(1) {
        y = math::rk4_step(f, t, &y, h);
        t += h;
        max_drift = max_drift.max((form(t, &y) - initial).abs());
        max_speed_drift = max_speed_drift.max((speed(t, &y) - speed0).abs());
    }
    Ok(FlowConservation {
        initial,
        max_drift,
        max_speed_drift,
        final_state: FlowState { t, x: y[..d].to_vec(), v: y[d..2 * d].to_vec() },
    })
}
