#![allow(dead_code)]

use lorentz_ot::feasibility::CausalRelation;
use lorentz_ot::{DiscreteMeasure, Event, SpacetimeModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn event(rng: &mut ChaCha8Rng, d: usize, t: (f64, f64)) -> Event {
    let x = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Event::new(rng.gen_range(t.0..t.1), x).unwrap()
}

/// Random positive integer counts summing to `total`, one per atom.
pub fn composition(rng: &mut ChaCha8Rng, atoms: usize, total: u64) -> Vec<u64> {
    let mut c = vec![1u64; atoms];
    for _ in 0..(total - atoms as u64) {
        c[rng.gen_range(0..atoms)] += 1;
    }
    c
}

pub fn measure(points: Vec<Event>, counts: &[u64]) -> DiscreteMeasure {
    let total: u64 = counts.iter().sum();
    DiscreteMeasure::new(points, counts.iter().map(|&c| c as f64 / total as f64).collect()).unwrap()
}

/// Sources in `t ∈ [0, 1]`, targets in `t ∈ [0.5, 2.5]`, unit box in space.
pub fn random_pair(rng: &mut ChaCha8Rng, d: usize, m: usize, n: usize, total: u64) -> (DiscreteMeasure, DiscreteMeasure) {
    let src = (0..m).map(|_| event(rng, d, (0.0, 1.0))).collect();
    let tgt = (0..n).map(|_| event(rng, d, (0.5, 2.5))).collect();
    let (a, b) = (composition(rng, m, total), composition(rng, n, total));
    (measure(src, &a), measure(tgt, &b))
}

pub fn random_relation(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CausalRelation {
    let p: f64 = rng.gen_range(0.15..0.85);
    CausalRelation::from_adjacency(m, n, (0..m * n).map(|_| rng.gen_bool(p)).collect())
}

pub fn minkowski(d: usize) -> SpacetimeModel {
    SpacetimeModel::minkowski(d).unwrap()
}
