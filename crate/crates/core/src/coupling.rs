//! Couplings in counting form: an `m × n` matrix of integer counts over a
//! shared denominator `N`, so that the mass on `(i, j)` is `counts[i][j] / N`.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    rows: usize,
    cols: usize,
    denominator: u64,
    counts: Vec<u64>,
}

impl Coupling {
    pub fn zeros(rows: usize, cols: usize, denominator: u64) -> Self {
        Coupling { rows, cols, denominator, counts: vec![0; rows * cols] }
    }

    /// The product coupling of two Dirac masses.
    pub fn dirac() -> Self {
        Coupling { rows: 1, cols: 1, denominator: 1, counts: vec![1] }
    }

    pub fn from_entries(rows: usize, cols: usize, denominator: u64, entries: &[(usize, usize, u64)]) -> Self {
        let mut c = Self::zeros(rows, cols, denominator);
        for &(i, j, k) in entries {
            c.add(i, j, k);
        }
        c
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn add(&mut self, i: usize, j: usize, k: u64) {
        self.counts[i * self.cols + j] += k;
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.count(i, j) as f64 / self.denominator as f64
    }

    pub fn row_counts(&self) -> Vec<u64> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.count(i, j)).sum()).collect()
    }

    pub fn col_counts(&self) -> Vec<u64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.count(i, j)).sum()).collect()
    }

    /// Positive entries `(i, j, count)` in lexicographic order.
    pub fn support(&self) -> Vec<(usize, usize, u64)> {
        let mut s = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let c = self.count(i, j);
                if c > 0 {
                    s.push((i, j, c));
                }
            }
        }
        s
    }

    /// Support as a boolean mask.
    pub fn support_mask(&self) -> Vec<bool> {
        self.counts.iter().map(|c| *c > 0).collect()
    }

    /// Targets charged by source `i`.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.count(i, j) > 0).collect()
    }

    /// Dense matrix of masses.
    pub fn masses(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.mass(i, j)).collect()).collect()
    }

    /// `true` when no mass sits outside `adjacency` (row-major `rows × cols`).
    pub fn is_supported_on(&self, adjacency: &[bool]) -> bool {
        self.counts.iter().zip(adjacency).all(|(c, a)| *c == 0 || *a)
    }

    /// Marginal counts equal the given ones exactly.
    pub fn has_marginals(&self, source: &[u64], target: &[u64]) -> bool {
        self.row_counts() == source && self.col_counts() == target
    }
}
