//! Optimal transport for Lorentzian cost functions.
//!
//! The crate works on concrete globally hyperbolic model spacetimes
//! (Minkowski space and flat Robertson–Walker spacetimes) and covers:
//!
//! * causal structure, the Lorentzian cost `c(p, q)` (minus the maximal proper
//!   time, `+∞` off the causal future) and action-minimizing geodesics,
//!   see [`geometry`];
//! * finitely supported probability measures and their counting form,
//!   see [`measures`];
//! * deciding whether two measures admit a coupling supported on the causal
//!   relation, with a witness coupling or a Hall-violating set, see
//!   [`feasibility`];
//! * the Kantorovich problem with forbidden pairs, dual potentials and
//!   cyclical monotonicity checks, see [`transport`];
//! * dynamical couplings, interpolation and regularity diagnostics, see
//!   [`dynamics`];
//! * Monge-map extraction and uniqueness probing, see [`monge`].
//!
//! The crate is `no_std` and only needs `alloc`. All floating point special
//! functions go through `libm`, so results are bit-identical across targets.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod coupling;
pub mod dynamics;
pub mod feasibility;
pub mod flow;
pub mod geometry;
pub mod math;
pub mod measures;
pub mod monge;
pub mod rational;
pub mod transport;

pub use coupling::Coupling;
pub use dynamics::{DynamicalCoupling, RegularityReport};
pub use feasibility::{CausalRelation, FeasibilityVerdict};
pub use geometry::{CausalCharacter, Event, Geodesic, ScaleFactor, SpacetimeModel, Tangent};
pub use measures::DiscreteMeasure;
pub use rational::IntegerMarginals;
pub use transport::{CostMatrix, TransportPlan};
