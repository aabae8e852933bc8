use alloc::vec;
use alloc::vec::Vec;

use super::CausalRelation;

/// Outcome of searching for a permutation inside a square relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermutationResult {
    /// `sigma[i]` is the column matched to row `i`.
    Found(Vec<usize>),
    /// Rows whose joint neighbourhood is smaller than the set itself.
    Deficient { rows: Vec<usize>, columns: Vec<usize> },
}

fn try_augment(rel: &CausalRelation, row: usize, seen: &mut [bool], owner: &mut [usize]) -> bool {
    // a free admissible column ends the path right away
    for col in 0..rel.cols() {
        if rel.admits(row, col) && !seen[col] && owner[col] == usize::MAX {
            seen[col] = true;
            owner[col] = row;
            return true;
        }
    }
    for col in 0..rel.cols() {
        if !rel.admits(row, col) || seen[col] {
            continue;
        }
        seen[col] = true;
        if owner[col] == usize::MAX || try_augment(rel, owner[col], seen, owner) {
            owner[col] = row;
            return true;
        }
    }
    false
}

/// A permutation whose graph lies in the relation, found by augmenting
/// paths that always try the lowest column first.
///
/// When none exists, the rows reachable by alternating paths from the first
/// unmatched row form a deficient set.
pub fn extract_permutation(rel: &CausalRelation) -> Result<PermutationResult, super::FeasibilityError> {
    if rel.rows() != rel.cols() {
        return Err(super::FeasibilityError::NotSquare { rows: rel.rows(), cols: rel.cols() });
    }
    let n = rel.rows();
    let mut owner = vec![usize::MAX; n];
    for row in 0..n {
        let mut seen = vec![false; n];
        if !try_augment(rel, row, &mut seen, &mut owner) {
            // alternating reachability from the free row
            let mut in_rows = vec![false; n];
            in_rows[row] = true;
            let mut stack = vec![row];
            let mut cols = vec![false; n];
            while let Some(r) = stack.pop() {
                for c in 0..n {
                    if rel.admits(r, c) && !cols[c] {
                        cols[c] = true;
                        let o = owner[c];
                        if o != usize::MAX && !in_rows[o] {
                            in_rows[o] = true;
                            stack.push(o);
                        }
                    }
                }
            }
            return Ok(PermutationResult::Deficient {
                rows: (0..n).filter(|&r| in_rows[r]).collect(),
                columns: (0..n).filter(|&c| cols[c]).collect(),
            });
        }
    }
    let mut sigma = vec![0; n];
    for (col, &row) in owner.iter().enumerate() {
        sigma[row] = col;
    }
    Ok(PermutationResult::Found(sigma))
}

/// Whether `sigma` is the only permutation inside the relation.
///
/// Another one exists iff some cycle alternates between relation edges and
/// edges of `sigma`, i.e. iff the graph `i → k` for `rel(i, sigma(k))`,
/// `k ≠ i`, has a directed cycle.
pub fn matching_is_unique(rel: &CausalRelation, sigma: &[usize]) -> bool {
    let n = sigma.len();
    let mut indegree = vec![0usize; n];
    for i in 0..n {
        for k in 0..n {
            if k != i && rel.admits(i, sigma[k]) {
                indegree[k] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&k| indegree[k] == 0).collect();
    let mut removed = 0;
    while let Some(i) = queue.pop() {
        removed += 1;
        for k in 0..n {
            if k != i && rel.admits(i, sigma[k]) {
                indegree[k] -= 1;
                if indegree[k] == 0 {
                    queue.push(k);
                }
            }
        }
    }
    removed == n
}
