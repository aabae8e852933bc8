//! Model spacetimes, causal classification, the Lorentzian cost and
//! action-minimizing geodesics.
//!
//! Events are written in splitting coordinates `(t, x) ∈ ℝ × ℝ^d`, where `t`
//! is the temporal function. Both shipped models have a quadratic fiber
//! Lagrangian
//!
//! ```text
//! 𝕃(v) = v0² − a(t)²·|v|²
//! ```
//!
//! with `a ≡ 1` for Minkowski space. The cone is `{𝕃 ≥ 0, v0 ≥ 0}` and the
//! Lagrangian is `L = −√𝕃` on it. The cost of a pair is the minimal action of
//! a causal curve joining them, i.e. minus the maximal proper time, and `+∞`
//! when the second event is not in the causal future of the first.

mod flow;
mod geodesic;
mod hessian;

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math;

pub use flow::{flow_conservation, FlowConservation, FlowState};
pub use geodesic::{path_action, Geodesic, GeodesicSample, SAMPLES_PER_GEODESIC};
pub use hessian::{fiber_hessian, hessian_bound_check, HessianReport, HessianScan};

/// Relative tolerance for deciding that a vector lies on the cone boundary.
pub const TOL_NULL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected} spatial coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("target event is not in the causal future of the source event")]
    InfeasiblePair,
    #[error("shooting did not converge (endpoint residual {residual:e})")]
    NumericalFailure { residual: f64 },
    #[error("state outside the closed domain of the time-parameterized Lagrangian (a·|v| = {speed})")]
    Domain { speed: f64 },
}

/// A point of spacetime in splitting coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: Vec<f64>,
}

impl Event {
    pub fn new(t: f64, x: Vec<f64>) -> Result<Self, GeometryError> {
        if !t.is_finite() || x.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::InvalidInput("event coordinates must be finite".into()));
        }
        Ok(Event { t, x })
    }

    pub fn spatial_dim(&self) -> usize {
        self.x.len()
    }

    /// All `1 + d` coordinates, time first.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(1 + self.x.len());
        c.push(self.t);
        c.extend_from_slice(&self.x);
        c
    }

    /// Euclidean distance in splitting coordinates (the background metric).
    pub fn distance(&self, other: &Event) -> f64 {
        let dt = self.t - other.t;
        let dx: f64 = self.x.iter().zip(&other.x).map(|(a, b)| (a - b) * (a - b)).sum();
        math::sqrt(dt * dt + dx)
    }

    /// Bitwise coordinate equality, used to detect duplicate atoms.
    pub fn same_as(&self, other: &Event) -> bool {
        self.t.to_bits() == other.t.to_bits()
            && self.x.len() == other.x.len()
            && self.x.iter().zip(&other.x).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// A tangent vector `(v0, v)` attached to an event.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub base: Event,
    pub v0: f64,
    pub v: Vec<f64>,
}

impl Tangent {
    pub fn new(base: Event, v0: f64, v: Vec<f64>) -> Self {
        Tangent { base, v0, v }
    }

    pub fn is_zero(&self) -> bool {
        self.v0 == 0.0 && self.v.iter().all(|c| *c == 0.0)
    }

    pub fn components(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(1 + self.v.len());
        c.push(self.v0);
        c.extend_from_slice(&self.v);
        c
    }

    pub fn direction(&self) -> Option<Direction> {
        Direction::from_components(&self.components())
    }
}

/// Canonical representative of a tangent line: the Euclidean unit vector
/// (future pointing for causal directions).
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    unit: Vec<f64>,
}

impl Direction {
    pub fn from_components(c: &[f64]) -> Option<Self> {
        let n = math::norm(c);
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        let sign = if c[0] < 0.0 { -1.0 } else { 1.0 };
        Some(Direction { unit: c.iter().map(|x| sign * x / n).collect() })
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    /// Angle to another direction, the projective distance surrogate.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        math::angle_between(&self.unit, &other.unit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalCharacter {
    Timelike,
    Null,
    NonCausal,
}

impl CausalCharacter {
    pub fn is_causal(self) -> bool {
        !matches!(self, CausalCharacter::NonCausal)
    }
}

/// The scale factor `a(t) > 0` of a flat Robertson–Walker model.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleFactor {
    Constant(f64),
    /// Samples `(t, a(t))` with strictly increasing `t`, interpolated linearly
    /// and extended as constants outside the sampled range.
    Table(Vec<(f64, f64)>),
    /// `a(t) = Σ c_k t^k`, restricted to even powers with nonnegative
    /// coefficients and `c_0 > 0`, so that `a ≥ c_0` on all of ℝ.
    Polynomial(Vec<f64>),
}

impl ScaleFactor {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: &str| Err(GeometryError::InvalidInput(m.into()));
        match self {
            ScaleFactor::Constant(a) => {
                if !(a.is_finite() && *a > 0.0) {
                    return bad("scale factor must be positive");
                }
            }
            ScaleFactor::Table(rows) => {
                if rows.is_empty() {
                    return bad("scale factor table is empty");
                }
                if rows.iter().any(|(t, a)| !t.is_finite() || !a.is_finite() || *a <= 0.0) {
                    return bad("scale factor table needs finite times and positive values");
                }
                if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return bad("scale factor table times must be strictly increasing");
                }
            }
            ScaleFactor::Polynomial(c) => {
                if c.is_empty() || !(c[0] > 0.0) || c.iter().any(|x| !x.is_finite()) {
                    return bad("polynomial scale factor needs a positive constant term");
                }
                if c.iter().skip(1).step_by(2).any(|x| *x != 0.0) {
                    return bad("polynomial scale factor may only contain even powers");
                }
                if c.iter().step_by(2).any(|x| *x < 0.0) {
                    return bad("polynomial scale factor needs nonnegative coefficients");
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            ScaleFactor::Constant(a) => *a,
            ScaleFactor::Table(rows) => {
                let (first, last) = (rows[0], rows[rows.len() - 1]);
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let k = rows.partition_point(|(tk, _)| *tk <= t) - 1;
                let ((t0, a0), (t1, a1)) = (rows[k], rows[k + 1]);
                a0 + (a1 - a0) * (t - t0) / (t1 - t0)
            }
            ScaleFactor::Polynomial(c) => c.iter().rev().fold(0.0, |acc, ck| acc * t + ck),
        }
    }

    /// `a'(t)`; for tables the slope of the segment to the right of `t`.
    pub fn rate(&self, t: f64) -> f64 {
        match self {
            ScaleFactor::Constant(_) => 0.0,
            ScaleFactor::Table(rows) => {
                if rows.len() < 2 || t < rows[0].0 || t >= rows[rows.len() - 1].0 {
                    return 0.0;
                }
                let k = rows.partition_point(|(tk, _)| *tk <= t) - 1;
                let ((t0, a0), (t1, a1)) = (rows[k], rows[k + 1]);
                (a1 - a0) / (t1 - t0)
            }
            ScaleFactor::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, ck)| acc * t + k as f64 * ck),
        }
    }

    /// Conformal time `∫_{t0}^{t1} dt / a(t)`: the spatial reach of a null
    /// curve between the two time slices.
    pub fn conformal_time(&self, t0: f64, t1: f64) -> f64 {
        match self {
            ScaleFactor::Constant(a) => (t1 - t0) / a,
            ScaleFactor::Table(rows) => {
                // split at the nodes so the integrand is smooth on each piece
                let mut cuts: Vec<f64> = Vec::with_capacity(rows.len() + 2);
                cuts.push(t0);
                cuts.extend(rows.iter().map(|(t, _)| *t).filter(|t| *t > t0 && *t < t1));
                cuts.push(t1);
                cuts.windows(2)
                    .map(|w| math::gauss_legendre(|t| 1.0 / self.value(t), w[0], w[1], 4))
                    .sum()
            }
            ScaleFactor::Polynomial(_) => math::gauss_legendre(|t| 1.0 / self.value(t), t0, t1, 64),
        }
    }
}

/// A globally hyperbolic model spacetime.
#[derive(Debug, Clone, PartialEq)]
pub enum SpacetimeModel {
    Minkowski { spatial_dim: usize },
    RobertsonWalker { spatial_dim: usize, scale: ScaleFactor },
}

impl SpacetimeModel {
    pub fn minkowski(spatial_dim: usize) -> Result<Self, GeometryError> {
        if spatial_dim == 0 {
            return Err(GeometryError::InvalidInput("spatial dimension must be at least 1".into()));
        }
        Ok(SpacetimeModel::Minkowski { spatial_dim })
    }

    pub fn robertson_walker(spatial_dim: usize, scale: ScaleFactor) -> Result<Self, GeometryError> {
        if spatial_dim == 0 {
            return Err(GeometryError::InvalidInput("spatial dimension must be at least 1".into()));
        }
        scale.validate()?;
        Ok(SpacetimeModel::RobertsonWalker { spatial_dim, scale })
    }

    pub fn spatial_dim(&self) -> usize {
        match self {
            SpacetimeModel::Minkowski { spatial_dim }
            | SpacetimeModel::RobertsonWalker { spatial_dim, .. } => *spatial_dim,
        }
    }

    /// Total dimension `1 + d`.
    pub fn dim(&self) -> usize {
        1 + self.spatial_dim()
    }

    pub fn is_minkowski(&self) -> bool {
        matches!(self, SpacetimeModel::Minkowski { .. })
    }

    pub fn scale(&self, t: f64) -> f64 {
        match self {
            SpacetimeModel::Minkowski { .. } => 1.0,
            SpacetimeModel::RobertsonWalker { scale, .. } => scale.value(t),
        }
    }

    pub fn scale_rate(&self, t: f64) -> f64 {
        match self {
            SpacetimeModel::Minkowski { .. } => 0.0,
            SpacetimeModel::RobertsonWalker { scale, .. } => scale.rate(t),
        }
    }

    pub fn check_event(&self, e: &Event) -> Result<(), GeometryError> {
        if e.spatial_dim() != self.spatial_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.spatial_dim(),
                found: e.spatial_dim(),
            });
        }
        Ok(())
    }

    /// The fiber quadratic form `𝕃(v) = v0² − a(t)²|v|²` at time `t`.
    pub fn quadratic_form(&self, t: f64, v0: f64, v: &[f64]) -> f64 {
        let a = self.scale(t);
        v0 * v0 - a * a * math::norm_sq(v)
    }

    /// Sign classification of a nonzero tangent vector.
    pub fn classify(&self, w: &Tangent) -> Result<CausalCharacter, GeometryError> {
        self.check_event(&w.base)?;
        if w.v.len() != self.spatial_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.spatial_dim(),
                found: w.v.len(),
            });
        }
        if w.is_zero() {
            return Err(GeometryError::InvalidInput("cannot classify the zero vector".into()));
        }
        Ok(self.classify_components(w.base.t, w.v0, &w.v))
    }

    fn classify_components(&self, t: f64, v0: f64, v: &[f64]) -> CausalCharacter {
        let a = self.scale(t);
        let time = v0 * v0;
        let space = a * a * math::norm_sq(v);
        if v0 <= 0.0 {
            return CausalCharacter::NonCausal;
        }
        let form = time - space;
        if form.abs() <= TOL_NULL * (time + space) {
            CausalCharacter::Null
        } else if form > 0.0 {
            CausalCharacter::Timelike
        } else {
            CausalCharacter::NonCausal
        }
    }

    /// Causal character of the pair `(p, q)`: whether `q ∈ J^+(p)`, and if so
    /// whether it lies on the boundary of the causal future.
    ///
    /// `None` means `q ∉ J^+(p)`.
    pub fn causal_relation(&self, p: &Event, q: &Event) -> Option<CausalCharacter> {
        let dt = q.t - p.t;
        let dist = math::distance(&q.x, &p.x);
        if dt == 0.0 && dist == 0.0 {
            return Some(CausalCharacter::Null);
        }
        if dt <= 0.0 {
            return None;
        }
        let reach = match self {
            SpacetimeModel::Minkowski { .. } => dt,
            SpacetimeModel::RobertsonWalker { scale, .. } => scale.conformal_time(p.t, q.t),
        };
        let (r2, d2) = (reach * reach, dist * dist);
        if (r2 - d2).abs() <= TOL_NULL * (r2 + d2) {
            Some(CausalCharacter::Null)
        } else if d2 < r2 {
            Some(CausalCharacter::Timelike)
        } else {
            None
        }
    }

    /// `q ∈ J^+(p)`.
    pub fn is_causal(&self, p: &Event, q: &Event) -> bool {
        self.causal_relation(p, q).is_some()
    }

    /// The Lorentzian cost `c(p, q)`: `≤ 0` on `J^+`, `0` on its boundary and
    /// on the diagonal, `+∞` elsewhere.
    pub fn cost(&self, p: &Event, q: &Event) -> f64 {
        self.minimal_action(p, q)
    }

    /// Minimal action of a causal curve from `p` to `q` (`+∞` if none).
    pub fn minimal_action(&self, p: &Event, q: &Event) -> f64 {
        match self.causal_relation(p, q) {
            None => f64::INFINITY,
            Some(CausalCharacter::Null) => 0.0,
            Some(_) => match self {
                SpacetimeModel::Minkowski { .. } => {
                    let dt = q.t - p.t;
                    let d2: f64 = q.x.iter().zip(&p.x).map(|(a, b)| (a - b) * (a - b)).sum();
                    -math::sqrt((dt * dt - d2).max(0.0))
                }
                SpacetimeModel::RobertsonWalker { .. } => match flow::shoot(self, p, q) {
                    Ok(sol) => sol.action,
                    // the pair is causal, so the infimum is finite; fall back to
                    // the boundary value when the solver cannot resolve it
                    Err(_) => 0.0,
                },
            },
        }
    }

    /// The action-minimizing curve from `p` to `q`, parameterized so that
    /// `t` is affine in the curve parameter.
    pub fn geodesic(&self, p: &Event, q: &Event) -> Result<Geodesic, GeometryError> {
        self.check_event(p)?;
        self.check_event(q)?;
        geodesic::build(self, p, q)
    }

    /// One fourth-order step of the Euler–Lagrange flow of the
    /// time-parameterized Lagrangian `L_τ(t, v) = L(∂_t + v)`.
    pub fn el_flow(&self, state: &FlowState, h: f64) -> Result<FlowState, GeometryError> {
        flow::el_step(self, state, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ev(t: f64, x: &[f64]) -> Event {
        Event::new(t, x.to_vec()).unwrap()
    }

    fn mink(d: usize) -> SpacetimeModel {
        SpacetimeModel::minkowski(d).unwrap()
    }

    #[test]
    fn classify_examples() {
        let m = mink(1);
        let base = ev(0.0, &[0.0]);
        let w = |v0: f64, v: f64| Tangent::new(base.clone(), v0, vec![v]);
        assert_eq!(m.classify(&w(1.0, 0.0)).unwrap(), CausalCharacter::Timelike);
        assert_eq!(m.classify(&w(1.0, 1.0)).unwrap(), CausalCharacter::Null);
        assert_eq!(m.classify(&w(1.0, 2.0)).unwrap(), CausalCharacter::NonCausal);
        assert_eq!(m.classify(&w(-1.0, 0.0)).unwrap(), CausalCharacter::NonCausal);
        assert!(matches!(m.classify(&w(0.0, 0.0)), Err(GeometryError::InvalidInput(_))));

        // the cone x² + y² − z² ≤ 0, z ≥ 0 with z as time
        let m2 = mink(2);
        let w2 = Tangent::new(ev(0.0, &[0.0, 0.0]), 1.0, vec![0.6, 0.8]);
        assert_eq!(m2.classify(&w2).unwrap(), CausalCharacter::Null);
    }

    #[test]
    fn minkowski_cost_examples() {
        let m = mink(1);
        assert_eq!(m.cost(&ev(0.0, &[0.0]), &ev(1.0, &[0.0])), -1.0);
        assert_eq!(m.cost(&ev(0.0, &[0.0]), &ev(-1.0, &[0.0])), f64::INFINITY);
        assert_eq!(m.cost(&ev(0.0, &[0.0]), &ev(0.0, &[0.0])), 0.0);
        assert_eq!(m.cost(&ev(0.0, &[0.0]), &ev(1.0, &[1.0])), 0.0);
        assert_eq!(m.cost(&ev(0.0, &[0.0]), &ev(1.0, &[1.05])), f64::INFINITY);

        let m2 = mink(2);
        let c = m2.cost(&ev(0.0, &[0.3, 0.0]), &ev(1.0, &[1.2, 0.0]));
        assert!((c + libm::sqrt(0.19)).abs() < 1e-15);
    }

    #[test]
    fn rw_with_unit_scale_matches_minkowski() {
        let rw = SpacetimeModel::robertson_walker(1, ScaleFactor::Constant(1.0)).unwrap();
        let m = mink(1);
        let p = ev(0.2, &[0.1]);
        for q in [ev(1.0, &[0.3]), ev(2.0, &[-1.1]), ev(0.7, &[0.1])] {
            assert!((rw.cost(&p, &q) - m.cost(&p, &q)).abs() < 1e-6);
        }
    }

    #[test]
    fn scale_factor_validation() {
        assert!(ScaleFactor::Constant(0.0).validate().is_err());
        assert!(ScaleFactor::Table(vec![(0.0, 1.0), (0.0, 2.0)]).validate().is_err());
        assert!(ScaleFactor::Table(vec![(0.0, 1.0), (1.0, -2.0)]).validate().is_err());
        assert!(ScaleFactor::Polynomial(vec![1.0, 1.0]).validate().is_err());
        assert!(ScaleFactor::Polynomial(vec![1.0, 0.0, 1.0]).validate().is_ok());
    }

    #[test]
    fn table_interpolation_and_conformal_time() {
        let s = ScaleFactor::Table(vec![(0.0, 1.0), (1.0, 2.0)]);
        assert_eq!(s.value(0.5), 1.5);
        assert_eq!(s.value(-3.0), 1.0);
        assert_eq!(s.value(7.0), 2.0);
        assert_eq!(s.rate(0.5), 1.0);
        // ∫_0^1 dt/(1+t) = ln 2, then constant a = 2 beyond t = 1
        let eta = s.conformal_time(0.0, 2.0);
        assert!((eta - (core::f64::consts::LN_2 + 0.5)).abs() < 1e-13);
    }

    #[test]
    fn polynomial_rate() {
        let s = ScaleFactor::Polynomial(vec![1.0, 0.0, 1.0]);
        assert_eq!(s.value(2.0), 5.0);
        assert_eq!(s.rate(2.0), 4.0);
        let eta = s.conformal_time(0.0, 1.0);
        assert!((eta - core::f64::consts::FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn homogeneity_of_quadratic_form() {
        let rw = SpacetimeModel::robertson_walker(2, ScaleFactor::Constant(1.7)).unwrap();
        let v = [0.3, -0.2];
        let base = rw.quadratic_form(0.4, 1.1, &v);
        let lam = 2.0;
        let scaled = rw.quadratic_form(0.4, lam * 1.1, &[lam * 0.3, lam * -0.2]);
        assert_eq!(scaled, lam * lam * base);
    }
}
