//! Min-cost flow by successive shortest paths with node potentials.
//!
//! Capacities and costs are real. Initial potentials come from Bellman-Ford
//! so negative arc costs are allowed (negative cycles are not); later rounds
//! use Dijkstra on reduced costs, clamping the tiny negative values that
//! rounding produces.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Residual capacities below this count as saturated.
const CAP_EPS: f64 = 1e-15;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
    cost: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    pub fn nodes(&self) -> usize {
        self.out.len()
    }

    /// Add `u → v` and its zero-capacity reverse; returns the forward index.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64, cost: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap, cost });
        self.arcs.push(Arc {
            to: u,
            cap: 0.0,
            cost: -cost,
        });
        self.out[u].push(id);
        self.out[v].push(id + 1);
        id
    }

    /// Flow on a forward arc, read off its reverse residual.
    pub fn flow(&self, arc: usize) -> f64 {
        self.arcs[arc ^ 1].cap
    }

    fn residual(&self, a: usize) -> bool {
        self.arcs[a].cap > CAP_EPS
    }

    /// Shortest distances over residual arcs from every node at once
    /// (a virtual root joined to all nodes at cost 0). Returns the distances
    /// and the largest remaining violation `d[v] - d[u] - cost` after `V`
    /// passes, which is zero exactly when no negative cycle remains.
    pub fn feasible_potentials(&self) -> (Vec<f64>, f64) {
        let n = self.nodes();
        let mut d = vec![0.0; n];
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                for &a in &self.out[u] {
                    if !self.residual(a) {
                        continue;
                    }
                    let arc = &self.arcs[a];
                    let cand = d[u] + arc.cost;
                    if cand < d[arc.to] - 1e-15 * (1.0 + d[arc.to].abs()) {
                        d[arc.to] = cand;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut violation: f64 = 0.0;
        for u in 0..n {
            for &a in &self.out[u] {
                if self.residual(a) {
                    let arc = &self.arcs[a];
                    violation = violation.max(d[arc.to] - d[u] - arc.cost);
                }
            }
        }
        (d, violation)
    }

    /// Push up to `limit` units from `s` to `t` at minimum cost. Returns
    /// (flow sent, total cost).
    pub fn min_cost_flow(&mut self, s: usize, t: usize, limit: f64) -> (f64, f64) {
        let n = self.nodes();
        let (mut pot, _) = self.feasible_potentials();
        let mut sent = 0.0;
        let mut cost = 0.0;
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        while limit - sent > CAP_EPS {
            dist.iter_mut().for_each(|d| *d = f64::INFINITY);
            prev.iter_mut().for_each(|p| *p = usize::MAX);
            dist[s] = 0.0;
            let mut heap = BinaryHeap::new();
            heap.push(HeapItem(0.0, s));
            while let Some(HeapItem(d, u)) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &a in &self.out[u] {
                    if !self.residual(a) {
                        continue;
                    }
                    let arc = &self.arcs[a];
                    let reduced = (arc.cost + pot[u] - pot[arc.to]).max(0.0);
                    let nd = d + reduced;
                    if nd < dist[arc.to] {
                        dist[arc.to] = nd;
                        prev[arc.to] = a;
                        heap.push(HeapItem(nd, arc.to));
                    }
                }
            }
            if !dist[t].is_finite() {
                break;
            }
            // capping at dist[t] keeps reduced costs nonnegative for nodes
            // the search did not settle
            let cap = dist[t];
            for v in 0..n {
                pot[v] += dist[v].min(cap);
            }
            let mut push = limit - sent;
            let mut v = t;
            while v != s {
                let a = prev[v];
                push = push.min(self.arcs[a].cap);
                v = self.arcs[a ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let a = prev[v];
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
                cost += push * self.arcs[a].cost;
                v = self.arcs[a ^ 1].to;
            }
            sent += push;
        }
        (sent, cost)
    }
}
