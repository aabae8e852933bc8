//! The Kantorovich problem for the Lorentzian cost with forbidden pairs.
//!
//! Plans are computed by minimum-cost flow on the counting form of the
//! marginals. Forbidden pairs are left out of the network, and costs are
//! rounded to integers at resolution [`COST_RESOLUTION`]. Dual potentials
//! are shortest-path distances in the residual graph of the optimal flow.

mod brute;
mod monotone;

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::coupling::Coupling;
use crate::feasibility::{self, CausalRelation, FeasibilityError, ViolatingSet};
use crate::flow::Network;
use crate::geometry::SpacetimeModel;
use crate::measures::DiscreteMeasure;
use crate::rational::IntegerMarginals;

pub use brute::{brute_force_solve, brute_force_solve_counts, BruteForceOptimum, BRUTE_FORCE_LIMIT};
pub use monotone::{check_cyclical_monotonicity, CyclicalReport};

/// Integer cost units per unit of proper time.
pub const COST_RESOLUTION: f64 = 1e9;

/// Slack allowed in `φ_j − ψ_i ≤ c_ij`.
pub const DUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("marginals are not causally related: {0:?}")]
    Infeasible(ViolatingSet),
    #[error("expanded support of size {size} exceeds the enumeration limit {limit}")]
    TooLarge { size: u64, limit: u64 },
    #[error("cost matrix is {rows}×{cols} but the marginals have {sources} and {targets} atoms")]
    ShapeMismatch { rows: usize, cols: usize, sources: usize, targets: usize },
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

/// `c(x_i, y_j)` for all pairs; `+∞` marks a forbidden pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    /// Costs between the supports of `mu` and `nu`.
    pub fn from_model(model: &SpacetimeModel, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Self {
        let (rows, cols) = (mu.len(), nu.len());
        let mut entries = Vec::with_capacity(rows * cols);
        for x in mu.points() {
            for y in nu.points() {
                entries.push(model.cost(x, y));
            }
        }
        CostMatrix { rows, cols, entries }
    }

    /// Row-major entries; any non-finite entry is treated as forbidden.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "cost matrix has the wrong length");
        let entries = entries.into_iter().map(|c| if c.is_finite() { c } else { f64::INFINITY }).collect();
        CostMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn admissible(&self, i: usize, j: usize) -> bool {
        self.get(i, j).is_finite()
    }

    pub fn mask(&self) -> Vec<bool> {
        self.entries.iter().map(|c| c.is_finite()).collect()
    }

    /// The relation of finite entries.
    pub fn relation(&self) -> CausalRelation {
        CausalRelation::from_adjacency(self.rows, self.cols, self.mask())
    }

    /// `Σ π_ij c_ij`, `+∞` if the coupling charges a forbidden pair.
    pub fn evaluate(&self, coupling: &Coupling) -> f64 {
        let mut total = 0.0;
        for (i, j, k) in coupling.support() {
            total += k as f64 * self.get(i, j);
        }
        total / coupling.denominator() as f64
    }

    fn scaled(&self, i: usize, j: usize) -> i128 {
        libm::round(self.get(i, j) * COST_RESOLUTION) as i128
    }
}

/// An optimal coupling with its dual certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub coupling: Coupling,
    /// `Σ π_ij c_ij` evaluated in floating point.
    pub primal_cost: f64,
    /// `Σ ν_j φ_j − Σ μ_i ψ_i`.
    pub dual_cost: f64,
    /// Potentials on the sources, normalized by `ψ_0 = 0`.
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
}

impl TransportPlan {
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.coupling.mass(i, j)
    }

    /// `max (φ_j − ψ_i − c_ij)` over admissible pairs and
    /// `max |φ_j − ψ_i − c_ij|` over the support.
    pub fn dual_residuals(&self, cost: &CostMatrix) -> (f64, f64) {
        let mut feasibility = f64::NEG_INFINITY;
        let mut slackness: f64 = 0.0;
        for i in 0..cost.rows() {
            for j in 0..cost.cols() {
                if !cost.admissible(i, j) {
                    continue;
                }
                let gap = self.phi[j] - self.psi[i] - cost.get(i, j);
                feasibility = feasibility.max(gap);
                if self.coupling.count(i, j) > 0 {
                    slackness = slackness.max(gap.abs());
                }
            }
        }
        (feasibility, slackness)
    }
}

fn check_shape(marg: &IntegerMarginals, cost: &CostMatrix) -> Result<(), TransportError> {
    if marg.source.len() != cost.rows || marg.target.len() != cost.cols {
        return Err(TransportError::ShapeMismatch {
            rows: cost.rows,
            cols: cost.cols,
            sources: marg.source.len(),
            targets: marg.target.len(),
        });
    }
    Ok(())
}

/// Optimal plan between `mu` and `nu`.
pub fn solve(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cost: &CostMatrix) -> Result<TransportPlan, TransportError> {
    solve_counts(&feasibility::counting_form(mu, nu), cost)
}

/// Optimal plan on the counting form; ties are broken by the lexicographic
/// order of the pairs.
pub fn solve_counts(marg: &IntegerMarginals, cost: &CostMatrix) -> Result<TransportPlan, TransportError> {
    solve_with_tiebreak(marg, cost, None)
}

/// Like [`solve_counts`], but among optimal plans minimizes
/// `Σ π_ij secondary_ij`. `secondary` is row-major and must be small
/// (each entry below `2^20`).
pub fn solve_with_tiebreak(
    marg: &IntegerMarginals,
    cost: &CostMatrix,
    secondary: Option<&[u32]>,
) -> Result<TransportPlan, TransportError> {
    check_shape(marg, cost)?;
    let verdict = feasibility::j_related_counts(&cost.relation(), marg)?;
    if let Some(set) = verdict.violating_set {
        return Err(TransportError::Infeasible(set));
    }
    let (m, n) = (cost.rows, cost.cols);
    let den = marg.denominator;
    // primary costs dominate any total of secondary costs
    let weight: i128 = match secondary {
        Some(sec) => den as i128 * sec.iter().map(|&s| s as i128).max().unwrap_or(0) + 1,
        None => 1,
    };
    let shift = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| cost.admissible(i, j))
        .map(|(i, j)| cost.scaled(i, j))
        .min()
        .unwrap_or(0);
    let (s, t) = (m + n, m + n + 1);
    let mut net = Network::new(m + n + 2);
    for (i, &a) in marg.source.iter().enumerate() {
        net.add_edge(s, i, a, 0);
    }
    let mut pair_edges = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if cost.admissible(i, j) {
                let tie = secondary.map_or(0, |sec| sec[i * n + j] as i128);
                let c = (cost.scaled(i, j) - shift) * weight + tie;
                let cap = marg.source[i].min(marg.target[j]);
                pair_edges.push((i, j, net.add_edge(i, m + j, cap, c)));
            }
        }
    }
    for (j, &b) in marg.target.iter().enumerate() {
        net.add_edge(m + j, t, b, 0);
    }
    let (sent, _) = net.min_cost_flow(s, t, den);
    debug_assert_eq!(sent, den, "feasible instance must route all mass");
    let mut coupling = Coupling::zeros(m, n, den);
    for &(i, j, e) in &pair_edges {
        coupling.add(i, j, net.flow(e));
    }
    Ok(plan_from_coupling(cost, coupling))
}

/// Attaches the primal cost and residual-graph potentials to a coupling.
///
/// The potentials certify optimality only when the coupling is optimal;
/// [`TransportPlan::dual_residuals`] exposes any failure.
pub fn plan_from_coupling(cost: &CostMatrix, coupling: Coupling) -> TransportPlan {
    let den = coupling.denominator();
    let (psi, phi) = potentials(cost, &coupling);
    let primal_cost = cost.evaluate(&coupling);
    let dual_units: i128 = coupling.col_counts().iter().zip(&phi).map(|(&b, &p)| b as i128 * p).sum::<i128>()
        - coupling.row_counts().iter().zip(&psi).map(|(&a, &p)| a as i128 * p).sum::<i128>();
    let dual_cost = dual_units as f64 / COST_RESOLUTION / den as f64;
    TransportPlan {
        coupling,
        primal_cost,
        dual_cost,
        psi: psi.iter().map(|&p| p as f64 / COST_RESOLUTION).collect(),
        phi: phi.iter().map(|&p| p as f64 / COST_RESOLUTION).collect(),
    }
}

/// Bellman–Ford distances from a virtual root in the residual bipartite
/// graph of an optimal coupling, in integer cost units. Forward arcs
/// `i → j` cost `w_ij`; arcs `j → i` on the support cost `−w_ij`.
fn potentials(cost: &CostMatrix, coupling: &Coupling) -> (Vec<i128>, Vec<i128>) {
    let (m, n) = (cost.rows, cost.cols);
    let mut arcs: Vec<(usize, usize, i128)> = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if cost.admissible(i, j) {
                let w = cost.scaled(i, j);
                arcs.push((i, m + j, w));
                if coupling.count(i, j) > 0 {
                    arcs.push((m + j, i, -w));
                }
            }
        }
    }
    let mut dist = vec![0i128; m + n];
    for _ in 0..(m + n + 1) {
        let mut changed = false;
        for &(u, v, w) in &arcs {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let base = dist[0];
    let psi = dist[..m].iter().map(|d| d - base).collect();
    let phi = dist[m..].iter().map(|d| d - base).collect();
    (psi, phi)
}
