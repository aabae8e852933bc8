//! Network flow on integer capacities: Dinic's maximum flow and successive
//! shortest paths for minimum-cost flow.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u64,
    cost: i128,
}

/// Residual graph shared by both algorithms. Arc `2k` is the `k`-th added
/// edge and `2k + 1` its reverse.
#[derive(Debug, Clone)]
pub struct Network {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    original: Vec<u64>,
}

impl Network {
    pub fn new(nodes: usize) -> Self {
        Network { adj: vec![Vec::new(); nodes], arcs: Vec::new(), original: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds `from → to`; returns the edge index.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: u64, cost: i128) -> usize {
        let id = self.original.len();
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap, cost });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0, cost: -cost });
        self.original.push(cap);
        id
    }

    /// Flow currently carried by edge `id`.
    pub fn flow(&self, id: usize) -> u64 {
        self.original[id] - self.arcs[2 * id].cap
    }

    pub fn edge_count(&self) -> usize {
        self.original.len()
    }

    /// `(from, to, residual capacity, cost)` of every residual arc.
    pub fn residual_arcs(&self) -> Vec<(usize, usize, u64, i128)> {
        let mut out = Vec::with_capacity(self.arcs.len());
        for (u, list) in self.adj.iter().enumerate() {
            for &a in list {
                let arc = &self.arcs[a];
                out.push((u, arc.to, arc.cap, arc.cost));
            }
        }
        out
    }

    /// Nodes reachable from `s` through arcs with positive residual capacity.
    pub fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.node_count()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && level[arc.to] == usize::MAX {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    fn dfs_push(&mut self, u: usize, t: usize, limit: u64, level: &[usize], next: &mut [usize]) -> u64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > 0 && level[to] == level[u] + 1 {
                let pushed = self.dfs_push(to, t, limit.min(cap), level, next);
                if pushed > 0 {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0
    }

    /// Dinic's algorithm; returns the value of a maximum `s`–`t` flow.
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        while let Some(level) = self.bfs_levels(s, t) {
            let mut next = vec![0; self.node_count()];
            loop {
                let pushed = self.dfs_push(s, t, u64::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Sends up to `required` units from `s` to `t` along successive
    /// shortest paths (Dijkstra with Johnson potentials). Edge costs must be
    /// nonnegative. Returns `(flow sent, total cost)`.
    pub fn min_cost_flow(&mut self, s: usize, t: usize, required: u64) -> (u64, i128) {
        let n = self.node_count();
        let mut potential = vec![0i128; n];
        let (mut sent, mut cost) = (0u64, 0i128);
        while sent < required {
            let mut dist = vec![i128::MAX; n];
            let mut prev_arc = vec![usize::MAX; n];
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i128, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if arc.cap == 0 {
                        continue;
                    }
                    let nd = d + arc.cost + potential[u] - potential[arc.to];
                    if nd < dist[arc.to] {
                        dist[arc.to] = nd;
                        prev_arc[arc.to] = a;
                        heap.push(Reverse((nd, arc.to)));
                    }
                }
            }
            if dist[t] == i128::MAX {
                break;
            }
            for v in 0..n {
                if dist[v] != i128::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut push = required - sent;
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                push = push.min(self.arcs[a].cap);
                v = self.arcs[a ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
                cost += push as i128 * self.arcs[a].cost;
                v = self.arcs[a ^ 1].to;
            }
            sent += push;
        }
        (sent, cost)
    }
}
