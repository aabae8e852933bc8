//! Rationalization of floating point weights over a shared denominator.
//!
//! Feasibility and transport run on the counting form of a measure: every
//! weight is written as `α_i / N` with a common integer `N`.

use alloc::vec::Vec;

/// Largest shared denominator the solvers accept.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// Absolute tolerance for accepting `count / N` as equal to a weight.
pub const WEIGHT_TOL: f64 = 1e-9;

/// Best rational approximation `p / q` of `x ∈ [0, 1]` with `q ≤ max_den`,
/// via continued fractions with a final semiconvergent.
pub fn best_rational(x: f64, max_den: u64) -> (u64, u64) {
    if !(x > 0.0) {
        return (0, 1);
    }
    if x >= 1.0 {
        return (1, 1);
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut rest = x;
    loop {
        let a = libm::floor(rest);
        if a > max_den as f64 {
            break;
        }
        let a = a as u64;
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            // the semiconvergent with the largest admissible coefficient
            let k = (max_den - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            if q1 > 0 && ((ps as f64 / qs as f64) - x).abs() < ((p1 as f64 / q1 as f64) - x).abs() {
                return (ps, qs);
            }
            break;
        }
        let p2 = a * p1 + p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rest - a as f64;
        if frac.abs() < 1e-15 || ((p1 as f64 / q1 as f64) - x).abs() < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    if q1 == 0 {
        (0, 1)
    } else {
        (p1, q1)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// Counts `α_i` with `α_i / N = w_i` within [`WEIGHT_TOL`], if they exist
/// and sum to `N`.
pub fn counts_over(weights: &[f64], denominator: u64) -> Option<Vec<u64>> {
    if denominator == 0 {
        return None;
    }
    let n = denominator as f64;
    let mut counts = Vec::with_capacity(weights.len());
    for &w in weights {
        let c = libm::round(w * n);
        if c < 0.0 || (c / n - w).abs() > WEIGHT_TOL {
            return None;
        }
        counts.push(c as u64);
    }
    (counts.iter().sum::<u64>() == denominator).then_some(counts)
}

/// Smallest shared denominator `≤ MAX_DENOMINATOR` suggested by continued
/// fractions for all of `weights`.
pub fn suggest_denominator(weights: &[f64]) -> Option<u64> {
    let mut den = 1u64;
    for &w in weights {
        let (_, q) = best_rational(w, MAX_DENOMINATOR);
        den = lcm(den, q)?;
        if den > MAX_DENOMINATOR {
            return None;
        }
    }
    Some(den)
}

/// Two measures in counting form over one shared denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMarginals {
    pub denominator: u64,
    pub source: Vec<u64>,
    pub target: Vec<u64>,
    /// `false` when the weights were not representable over any admissible
    /// denominator and were rounded by largest remainders.
    pub exact: bool,
}

/// Counting form of two weight vectors with a common denominator.
pub fn integer_marginals(source: &[f64], target: &[f64]) -> IntegerMarginals {
    let mut all: Vec<f64> = source.to_vec();
    all.extend_from_slice(target);
    if let Some(den) = suggest_denominator(&all) {
        if let (Some(s), Some(t)) = (counts_over(source, den), counts_over(target, den)) {
            return IntegerMarginals { denominator: den, source: s, target: t, exact: true };
        }
    }
    let den = MAX_DENOMINATOR;
    IntegerMarginals {
        denominator: den,
        source: largest_remainder(source, den),
        target: largest_remainder(target, den),
        exact: false,
    }
}

/// Hamilton apportionment of `total` proportionally to `weights`, keeping
/// every positive weight at a count of at least one.
pub fn largest_remainder(weights: &[f64], total: u64) -> Vec<u64> {
    let sum: f64 = weights.iter().sum();
    let scaled: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<u64> = scaled.iter().map(|s| (libm::floor(*s) as u64).max(1)).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - libm::floor(scaled[a]);
        let rb = scaled[b] - libm::floor(scaled[b]);
        rb.partial_cmp(&ra).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    if assigned < total {
        for &k in order.iter().cycle().take((total - assigned) as usize) {
            counts[k] += 1;
        }
    } else {
        let mut excess = assigned - total;
        for &k in order.iter().rev().cycle() {
            if excess == 0 {
                break;
            }
            if counts[k] > 1 {
                counts[k] -= 1;
                excess -= 1;
            }
        }
    }
    counts
}
