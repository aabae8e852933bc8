use alloc::vec::Vec;

use super::{CostMatrix, TransportError};
use crate::coupling::Coupling;
use crate::measures::DiscreteMeasure;
use crate::rational::IntegerMarginals;

/// Largest expanded size accepted by [`brute_force_solve`].
pub const BRUTE_FORCE_LIMIT: u64 = 8;

/// Minimum over all permutation couplings of the expanded form.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOptimum {
    /// `+∞` when no permutation avoids the forbidden pairs.
    pub cost: f64,
    pub coupling: Option<Coupling>,
}

pub fn brute_force_solve(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostMatrix,
) -> Result<BruteForceOptimum, TransportError> {
    brute_force_solve_counts(&crate::feasibility::counting_form(mu, nu), cost)
}

/// Enumerates all `N!` bijections between the expanded source and target
/// lists. By Birkhoff's theorem the optimum of the uniform problem is
/// attained at one of them.
pub fn brute_force_solve_counts(marg: &IntegerMarginals, cost: &CostMatrix) -> Result<BruteForceOptimum, TransportError> {
    super::check_shape(marg, cost)?;
    let n = marg.denominator;
    if n > BRUTE_FORCE_LIMIT {
        return Err(TransportError::TooLarge { size: n, limit: BRUTE_FORCE_LIMIT });
    }
    let expand = |counts: &[u64]| -> Vec<usize> {
        counts.iter().enumerate().flat_map(|(k, &c)| core::iter::repeat_n(k, c as usize)).collect()
    };
    let (src, tgt) = (expand(&marg.source), expand(&marg.target));
    let mut perm: Vec<usize> = (0..tgt.len()).collect();
    let mut best = f64::INFINITY;
    let mut best_perm: Option<Vec<usize>> = None;
    let mut visit = |p: &[usize]| {
        let mut total = 0.0;
        for (k, &l) in p.iter().enumerate() {
            total += cost.get(src[k], tgt[l]);
        }
        if total < best {
            best = total;
            best_perm = Some(p.to_vec());
        }
    };
    permutations(&mut perm, 0, &mut visit);
    let coupling = best_perm.map(|p| {
        let mut c = Coupling::zeros(cost.rows(), cost.cols(), n);
        for (k, &l) in p.iter().enumerate() {
            c.add(src[k], tgt[l], 1);
        }
        c
    });
    Ok(BruteForceOptimum { cost: best / n as f64, coupling })
}

fn permutations(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}
