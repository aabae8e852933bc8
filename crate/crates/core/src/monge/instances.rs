//! Sampled instances for the Monge diagnostics.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{split_fraction, MongeError};
use crate::geometry::{Event, SpacetimeModel};
use crate::math;
use crate::measures::DiscreteMeasure;
use crate::transport::{self, CostMatrix};

/// Source atoms of the default spacelike-disc instance.
pub const SPACELIKE_DISC_ATOMS: usize = 200;

/// Candidate pool size per requested sample.
const POOL_FACTOR: usize = 20;

/// `size` points uniform in the closed unit disc.
pub fn disc_pool(size: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if a * a + b * b <= 1.0 {
            out.push(alloc::vec![a, b]);
        }
    }
    out
}

/// Greedy farthest-point selection of `n` indices, starting from index 0.
pub fn farthest_point_sample(pool: &[Vec<f64>], n: usize) -> Vec<usize> {
    let n = n.min(pool.len());
    if n == 0 {
        return Vec::new();
    }
    let mut chosen = alloc::vec![0];
    let mut gap: Vec<f64> = pool.iter().map(|p| math::distance(p, &pool[0])).collect();
    while chosen.len() < n {
        let next = (0..pool.len()).max_by(|&a, &b| gap[a].total_cmp(&gap[b]).then(b.cmp(&a))).expect("non-empty");
        chosen.push(next);
        for (k, p) in pool.iter().enumerate() {
            gap[k] = gap[k].min(math::distance(p, &pool[next]));
        }
    }
    chosen
}

fn disc_sample(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let pool = disc_pool(POOL_FACTOR * n, seed);
    farthest_point_sample(&pool, n).into_iter().map(|k| pool[k].clone()).collect()
}

/// `n` quasi-uniform atoms on the `t = 0` unit disc in Minkowski `1+2`,
/// each sent to `(1 + 0.25·y₁, y)` with `y = 1.1 x`; the target graph has
/// slope `0.25`.
pub fn spacelike_disc_instance(n: usize, seed: u64) -> (SpacetimeModel, DiscreteMeasure, DiscreteMeasure) {
    let model = SpacetimeModel::minkowski(2).expect("positive dimension");
    let xs = disc_sample(n, seed);
    let sources = xs.iter().map(|x| Event { t: 0.0, x: x.clone() }).collect();
    let targets = xs
        .iter()
        .map(|x| {
            let y: Vec<f64> = x.iter().map(|c| 1.1 * c).collect();
            Event { t: 1.0 + 0.25 * y[0], x: y }
        })
        .collect();
    let mu = DiscreteMeasure::uniform(sources).expect("distinct sample");
    let nu = DiscreteMeasure::uniform(targets).expect("distinct sample");
    (model, mu, nu)
}

/// `n` sources and `n` targets on one generator `t = −x` of the past cone
/// of the origin in Minkowski `1+1`. Every source is null related to every
/// target, so every coupling costs zero.
pub fn null_cone_instance(n: usize) -> (SpacetimeModel, DiscreteMeasure, DiscreteMeasure) {
    let model = SpacetimeModel::minkowski(1).expect("positive dimension");
    let on_cone = |s: f64| Event { t: -s, x: alloc::vec![s] };
    let sources = (0..n).map(|k| on_cone(2.0 + k as f64 / n as f64)).collect();
    let targets = (0..n).map(|k| on_cone((k + 1) as f64 / (n + 1) as f64)).collect();
    let mu = DiscreteMeasure::uniform(sources).expect("distinct atoms");
    let nu = DiscreteMeasure::uniform(targets).expect("distinct atoms");
    (model, mu, nu)
}

/// Split fraction of the optimal plan from `n` quasi-uniform disc atoms to
/// `targets` fixed random atoms at `t = 2.5`, for every `n` in `sizes`.
pub fn refinement_split_fractions(sizes: &[usize], targets: usize, seed: u64) -> Result<Vec<(usize, f64)>, MongeError> {
    let model = SpacetimeModel::minkowski(2).expect("positive dimension");
    let nu_points: Vec<Event> = disc_pool(targets, seed ^ 0x9e37_79b9)
        .into_iter()
        .map(|y| Event { t: 2.5, x: y.iter().map(|c| 1.1 * c).collect() })
        .collect();
    let nu = DiscreteMeasure::uniform(nu_points)?;
    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mu = DiscreteMeasure::uniform(disc_sample(n, seed).into_iter().map(|x| Event { t: 0.0, x }).collect())?;
        let plan = transport::solve(&mu, &nu, &CostMatrix::from_model(&model, &mu, &nu))?;
        out.push((n, split_fraction(&plan.coupling)));
    }
    Ok(out)
}
