//! Finite-difference check of the uniform convexity bound
//! `∂²_v L_τ ≥ (δ / |L_τ|)·Id` on the interior of the domain of `L_τ`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SpacetimeModel;
use crate::math;

/// Central difference step for second derivatives.
const FD_STEP: f64 = 1e-4;

/// A box of `(t, v)` samples: `t ∈ [t_min, t_max]`, `v ∈ [−b, b]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianScan {
    pub t_min: f64,
    pub t_max: f64,
    pub speed_bound: f64,
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianReport {
    /// `min λ_min(∂²_v L_τ)·|L_τ|` over the evaluated samples
    /// (`+∞` if nothing was evaluated).
    pub delta_hat: f64,
    pub evaluated: usize,
    /// Samples whose stencil left the open domain `a|v| < 1`.
    pub skipped: usize,
}

fn l_tau(model: &SpacetimeModel, t: f64, v: &[f64]) -> Option<f64> {
    let a = model.scale(t);
    let inner = 1.0 - a * a * math::norm_sq(v);
    if inner > 0.0 {
        Some(-math::sqrt(inner))
    } else {
        None
    }
}

/// Smallest eigenvalue of the finite-difference fiber Hessian of `L_τ` at
/// `(t, v)` together with `|L_τ(t, v)|`. `None` when the stencil leaves the
/// open domain.
pub fn fiber_hessian(model: &SpacetimeModel, t: f64, v: &[f64]) -> Option<(f64, f64)> {
    let d = v.len();
    let h = FD_STEP;
    let center = l_tau(model, t, v)?;
    let mut w = v.to_vec();
    let mut eval = |shifts: &[(usize, f64)]| -> Option<f64> {
        w.copy_from_slice(v);
        for &(k, s) in shifts {
            w[k] += s;
        }
        l_tau(model, t, &w)
    };
    let mut hess = vec![0.0; d * d];
    for i in 0..d {
        let plus = eval(&[(i, h)])?;
        let minus = eval(&[(i, -h)])?;
        hess[i * d + i] = (plus - 2.0 * center + minus) / (h * h);
        for j in (i + 1)..d {
            let pp = eval(&[(i, h), (j, h)])?;
            let pm = eval(&[(i, h), (j, -h)])?;
            let mp = eval(&[(i, -h), (j, h)])?;
            let mm = eval(&[(i, -h), (j, -h)])?;
            let mixed = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[i * d + j] = mixed;
            hess[j * d + i] = mixed;
        }
    }
    Some((math::min_eigenvalue_symmetric(&hess, d), center.abs()))
}

/// Empirical `δ̂` over random samples of the box described by `scan`.
pub fn hessian_bound_check(model: &SpacetimeModel, scan: &HessianScan) -> HessianReport {
    let d = model.spatial_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(scan.seed);
    let mut delta_hat = f64::INFINITY;
    let (mut evaluated, mut skipped) = (0, 0);
    let mut v: Vec<f64> = vec![0.0; d];
    for _ in 0..scan.n_samples {
        let t = if scan.t_max > scan.t_min { rng.gen_range(scan.t_min..=scan.t_max) } else { scan.t_min };
        for c in v.iter_mut() {
            *c = if scan.speed_bound > 0.0 { rng.gen_range(-scan.speed_bound..=scan.speed_bound) } else { 0.0 };
        }
        match fiber_hessian(model, t, &v) {
            Some((lambda, abs_l)) => {
                evaluated += 1;
                delta_hat = delta_hat.min(lambda * abs_l);
            }
            None => skipped += 1,
        }
    }
    HessianReport { delta_hat, evaluated, skipped }
}
