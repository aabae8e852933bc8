use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CostMatrix;
use crate::coupling::Coupling;

const MARGIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicalReport {
    pub trials: usize,
    pub violations: usize,
    /// `min (Σ c(x_i, y_{i+1}) − Σ c(x_i, y_i))` over sampled cycles with a
    /// finite shifted cost; `+∞` if there was none.
    pub worst_margin: f64,
    /// First violating cycle as support pairs `(i, j)`.
    pub witness: Option<Vec<(usize, usize)>>,
}

/// Samples cycles of `2..=k_max` distinct support pairs and checks that the
/// cyclic shift of targets does not lower the cost.
pub fn check_cyclical_monotonicity(
    coupling: &Coupling,
    cost: &CostMatrix,
    k_max: usize,
    trials: usize,
    seed: u64,
) -> CyclicalReport {
    let support: Vec<(usize, usize)> = coupling.support().iter().map(|&(i, j, _)| (i, j)).collect();
    let mut report = CyclicalReport { trials: 0, violations: 0, worst_margin: f64::INFINITY, witness: None };
    let k_cap = k_max.min(support.len());
    if k_cap < 2 {
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cycle: Vec<(usize, usize)> = Vec::with_capacity(k_cap);
    for _ in 0..trials {
        report.trials += 1;
        let k = rng.gen_range(2..=k_cap);
        cycle.clear();
        cycle.extend(index::sample(&mut rng, support.len(), k).iter().map(|s| support[s]));
        let current: f64 = cycle.iter().map(|&(i, j)| cost.get(i, j)).sum();
        let shifted: f64 = (0..k).map(|a| cost.get(cycle[a].0, cycle[(a + 1) % k].1)).sum();
        if !shifted.is_finite() {
            continue;
        }
        let margin = shifted - current;
        report.worst_margin = report.worst_margin.min(margin);
        if margin < -MARGIN_TOL {
            report.violations += 1;
            if report.witness.is_none() {
                report.witness = Some(cycle.clone());
            }
        }
    }
    report
}
