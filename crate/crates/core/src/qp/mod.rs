//! Continuous relaxation of the minimum c-balanced q-way cut.
//!
//! A fractional partition is a nonnegative `q × n` matrix `x` whose column
//! `j` distributes the normalized weight `α_j` over the clusters and whose
//! rows carry at least `c` each. The relaxed cut density is
//!
//! ```text
//! f̃(x) = Σ_{i<i'} x_iᵀ B x_{i'} = ½ xᵀ (A ⊗ B) x,   A = J_q − I_q
//! ```
//!
//! with `x_i` the rows of `x`, stacked cluster-major. Partition indicators
//! `x_ij = α_j [j ∈ V_i]` are feasible and evaluate to the cut density, so
//! the relaxed minimum never exceeds `f_q^c`.
//!
//! The objective is indefinite. [`solve`] finds Kuhn–Tucker points by
//! conditional gradient (Frank–Wolfe) from several starts, using an exact
//! transportation LP as the linear oracle.

mod flow;

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Partition, WeightedGraph};
use crate::guards::Guards;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::rng::SeededRng;
use flow::FlowNetwork;

/// Feasibility slack for balance and column constraints.
const FEAS_TOL: f64 = 1e-9;

/// A fractional partition, `q × n`, row `i` is cluster `i`.
pub type FeasiblePoint = Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpProblem {
    n: usize,
    q: usize,
    alpha: Vec<f64>,
    b: Matrix,
    c: f64,
}

impl QpProblem {
    /// Weights are renormalized to sum to one.
    pub fn new(alpha: Vec<f64>, b: Matrix, q: usize, c: f64) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || q == 0 {
            return Err(Error::input("qp needs n >= 1 and q >= 1"));
        }
        if b.rows() != n || b.cols() != n {
            return Err(Error::input(format!(
                "B is {}x{}, expected {n}x{n}",
                b.rows(),
                b.cols()
            )));
        }
        if let Some(j) = alpha.iter().position(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::input(format!(
                "vertex weight alpha[{j}] = {} must be positive",
                alpha[j]
            )));
        }
        if let Some(&x) = b.as_slice().iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::input(format!("edge weight {x} outside [0,1]")));
        }
        let (d, i, j) = b.max_asymmetry();
        if d > 1e-12 {
            return Err(Error::input(format!(
                "B is not symmetric: |B[{i}][{j}] - B[{j}][{i}]| = {d:e}"
            )));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::input(format!("balance c = {c} must be nonnegative")));
        }
        if q as f64 * c > 1.0 + 1e-12 {
            return Err(Error::infeasible(format!(
                "q·c = {} exceeds 1: no fractional partition gives every cluster weight {c}",
                q as f64 * c
            )));
        }
        let total: f64 = alpha.iter().sum();
        let alpha = alpha.iter().map(|a| a / total).collect();
        Ok(Self { n, q, alpha, b, c })
    }

    pub fn from_graph(g: &WeightedGraph, q: usize, c: f64) -> Result<Self> {
        Self::new(g.alpha().to_vec(), g.beta().clone(), q, c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `x_ij = α_j [label_j = i]`.
    pub fn indicator(&self, p: &Partition) -> Result<FeasiblePoint> {
        if p.n() != self.n || p.q() != self.q {
            return Err(Error::input("partition does not match the problem shape"));
        }
        Ok(self.indicator_of(p.labels()))
    }

    fn indicator_of(&self, labels: &[usize]) -> FeasiblePoint {
        let mut x = Matrix::zeros(self.q, self.n);
        for (j, &l) in labels.iter().enumerate() {
            x[(l, j)] = self.alpha[j];
        }
        x
    }

    fn check_shape(&self, x: &Matrix) -> Result<()> {
        if x.rows() != self.q || x.cols() != self.n {
            return Err(Error::input(format!(
                "point is {}x{}, expected q x n = {}x{}",
                x.rows(),
                x.cols(),
                self.q,
                self.n
            )));
        }
        Ok(())
    }

    /// Largest violation of the column, row and sign constraints.
    pub fn feasibility_violation(&self, x: &FeasiblePoint) -> f64 {
        let mut v: f64 = 0.0;
        for j in 0..self.n {
            let col: f64 = (0..self.q).map(|i| x[(i, j)]).sum();
            v = v.max((col - self.alpha[j]).abs());
        }
        for i in 0..self.q {
            let row: f64 = x.row(i).iter().sum();
            v = v.max(self.c - row);
            v = v.max(-x.row(i).iter().cloned().fold(0.0, f64::min));
        }
        v
    }

    pub fn is_feasible(&self, x: &FeasiblePoint) -> bool {
        self.check_shape(x).is_ok() && self.feasibility_violation(x) <= FEAS_TOL
    }
}

/// `Σ_{i<i'} x_iᵀ B x_{i'}`, without forming `A ⊗ B`.
pub fn objective(p: &QpProblem, x: &FeasiblePoint) -> Result<f64> {
    p.check_shape(x)?;
    Ok(objective_unchecked(p, x))
}

fn objective_unchecked(p: &QpProblem, x: &Matrix) -> f64 {
    let bx: Vec<Vec<f64>> = (0..p.q).map(|i| p.b.mul_vec(x.row(i))).collect();
    let mut total = 0.0;
    for i in 0..p.q {
        for k in (i + 1)..p.q {
            total += dot(x.row(i), &bx[k]);
        }
    }
    total
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(A ⊗ B) x`: row `i` is `B Σ_{i'≠i} x_{i'}`.
pub fn gradient(p: &QpProblem, x: &FeasiblePoint) -> Result<Matrix> {
    p.check_shape(x)?;
    Ok(gradient_unchecked(p, x))
}

fn gradient_unchecked(p: &QpProblem, x: &Matrix) -> Matrix {
    let mut t = vec![0.0; p.n];
    for i in 0..p.q {
        t.iter_mut().zip(x.row(i)).for_each(|(s, &v)| *s += v);
    }
    let mut g = Matrix::zeros(p.q, p.n);
    for i in 0..p.q {
        let others: Vec<f64> = t.iter().zip(x.row(i)).map(|(s, v)| s - v).collect();
        g.row_mut(i).copy_from_slice(&p.b.mul_vec(&others));
    }
    g
}

/// An optimal vertex of the linear program with its duals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub x: FeasiblePoint,
    pub cost: f64,
    /// Row duals `u_i ≥ 0` of the balance constraints.
    pub u: Vec<f64>,
    /// Column duals `v_j` of the weight constraints.
    pub v: Vec<f64>,
    /// Duality gap plus the largest dual infeasibility.
    pub cs_residual: f64,
}

/// Minimize `⟨g, s⟩` over fractional partitions.
///
/// Flow network: a source feeds each cluster node exactly `c` and a pool
/// node the remaining `1 − qc`; the pool feeds any cluster; cluster `i`
/// ships to vertex `j` at cost `g_ij`; vertex `j` absorbs `α_j`.
pub fn lp_oracle(p: &QpProblem, g: &Matrix) -> Result<LpSolution> {
    p.check_shape(g)?;
    let (q, n) = (p.q, p.n);
    let source = 0;
    let pool = 1;
    let cluster = |i: usize| 2 + i;
    let vertex = |j: usize| 2 + q + j;
    let sink = 2 + q + n;
    let mut net = FlowNetwork::new(sink + 1);
    let free = (1.0 - q as f64 * p.c).max(0.0);
    net.add_arc(source, pool, free, 0.0);
    for i in 0..q {
        net.add_arc(source, cluster(i), p.c, 0.0);
        net.add_arc(pool, cluster(i), f64::INFINITY, 0.0);
    }
    let mut ship = vec![0usize; q * n];
    for i in 0..q {
        for j in 0..n {
            ship[i * n + j] = net.add_arc(cluster(i), vertex(j), f64::INFINITY, g[(i, j)]);
        }
    }
    for j in 0..n {
        net.add_arc(vertex(j), sink, p.alpha[j], 0.0);
    }
    let (sent, _) = net.min_cost_flow(source, sink, 1.0);
    if (sent - 1.0).abs() > 1e-9 {
        return Err(Error::infeasible(format!(
            "transportation problem routed only {sent} of 1"
        )));
    }
    let mut x = Matrix::from_fn(q, n, |i, j| net.flow(ship[i * n + j]).max(0.0));
    // put the column sums back on α exactly
    for j in 0..n {
        let col: f64 = (0..q).map(|i| x[(i, j)]).sum();
        if col > 0.0 {
            let s = p.alpha[j] / col;
            (0..q).for_each(|i| x[(i, j)] *= s);
        }
    }
    let cost = dot(x.as_slice(), g.as_slice());

    let (pot, _) = net.feasible_potentials();
    let u: Vec<f64> = (0..q)
        .map(|i| (pot[pool] - pot[cluster(i)]).max(0.0))
        .collect();
    let v: Vec<f64> = (0..n).map(|j| pot[vertex(j)] - pot[pool]).collect();
    let dual_obj: f64 = dot(&v, &p.alpha) + p.c * u.iter().sum::<f64>();
    let mut infeas: f64 = 0.0;
    for i in 0..q {
        for j in 0..n {
            infeas = infeas.max(u[i] + v[j] - g[(i, j)]);
        }
    }
    let cs_residual = (cost - dual_obj).abs() + infeas;
    Ok(LpSolution {
        x,
        cost,
        u,
        v,
        cs_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub starts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iters: 5000,
            tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    RandomVertex,
    PerturbedIndicator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub start: usize,
    pub kind: StartKind,
    pub value: f64,
    pub iterations: usize,
    pub fw_gap: f64,
    pub converged: bool,
    /// Value of the locally improved rounding of this start's final point.
    pub refined_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective: f64,
    pub iterations: usize,
    pub fw_gap: f64,
    pub kkt_residual: f64,
    pub converged: bool,
    pub best_start: usize,
    /// Best partition found while rounding and locally improving the
    /// starts' end points, and its cut density.
    pub refined_partition: Partition,
    pub refined_value: f64,
    pub starts: Vec<StartRecord>,
    /// Seconds; excluded from serialized output to keep it reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

struct FwRun {
    x: Matrix,
    value: f64,
    iterations: usize,
    gap: f64,
    converged: bool,
}

/// Convex combination of polytope vertices.
struct ActiveSet {
    vertices: Vec<Matrix>,
    weights: Vec<f64>,
}

impl ActiveSet {
    fn single(v: Matrix) -> Self {
        Self {
            vertices: vec![v],
            weights: vec![1.0],
        }
    }

    fn point(&self) -> Matrix {
        let mut x = Matrix::zeros(self.vertices[0].rows(), self.vertices[0].cols());
        for (v, &w) in self.vertices.iter().zip(&self.weights) {
            x.as_mut_slice()
                .iter_mut()
                .zip(v.as_slice())
                .for_each(|(a, b)| *a += w * b);
        }
        x
    }

    fn toward(&mut self, s: Matrix, step: f64) {
        self.weights.iter_mut().for_each(|w| *w *= 1.0 - step);
        match self
            .vertices
            .iter()
            .position(|v| v.sub(&s).max_abs() < 1e-15)
        {
            Some(k) => self.weights[k] += step,
            None => {
                self.vertices.push(s);
                self.weights.push(step);
            }
        }
        self.prune();
    }

    fn away(&mut self, k: usize, step: f64, full: bool) {
        self.weights.iter_mut().for_each(|w| *w *= 1.0 + step);
        self.weights[k] -= step;
        if full {
            self.weights[k] = 0.0;
        }
        self.prune();
    }

    fn prune(&mut self) {
        let mut k = 0;
        while k < self.weights.len() {
            if self.weights[k] <= 0.0 && self.weights.len() > 1 {
                self.weights.swap_remove(k);
                self.vertices.swap_remove(k);
            } else {
                k += 1;
            }
        }
        let total: f64 = self.weights.iter().sum();
        self.weights.iter_mut().for_each(|w| *w /= total);
    }
}

/// Frank–Wolfe with away steps and exact line search. The iterate is kept
/// as a convex combination of oracle vertices, so it stays feasible.
fn frank_wolfe(p: &QpProblem, mut active: ActiveSet, opts: &SolveOptions) -> Result<FwRun> {
    let mut x = active.point();
    let mut value = objective_unchecked(p, &x);
    let mut gap = f64::INFINITY;
    for it in 0..opts.max_iters {
        let g = gradient_unchecked(p, &x);
        let s = lp_oracle(p, &g)?.x;
        let gx = dot(g.as_slice(), x.as_slice());
        gap = gx - dot(g.as_slice(), s.as_slice());
        if gap < opts.tol {
            return Ok(FwRun {
                x,
                value,
                iterations: it,
                gap,
                converged: true,
            });
        }
        let (away_k, away_val) = active
            .vertices
            .iter()
            .map(|v| dot(g.as_slice(), v.as_slice()))
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("active set is never empty");
        let away_gap = away_val - gx;
        if gap >= away_gap {
            let d = s.sub(&x);
            let step = line_search(-gap, 2.0 * objective_unchecked(p, &d), 1.0);
            active.toward(s, step);
        } else {
            let w = active.weights[away_k];
            let max_step = w / (1.0 - w);
            let d = x.sub(&active.vertices[away_k]);
            let step = line_search(-away_gap, 2.0 * objective_unchecked(p, &d), max_step);
            active.away(away_k, step, step >= max_step);
        }
        x = active.point();
        value = objective_unchecked(p, &x);
    }
    Ok(FwRun {
        x,
        value,
        iterations: opts.max_iters,
        gap,
        converged: false,
    })
}

/// Minimizer on `[0, max]` of `γ·slope + ½γ²·curvature` for `slope ≤ 0`.
fn line_search(slope: f64, curvature: f64, max: f64) -> f64 {
    if curvature > 0.0 {
        (-slope / curvature).clamp(0.0, max)
    } else {
        max
    }
}

/// Cut density of a labeling: the objective at its indicator.
fn labeling_value(p: &QpProblem, labels: &[usize]) -> f64 {
    objective_unchecked(p, &p.indicator_of(labels))
}

/// Per-vertex sums `s[j][i] = Σ_{k ∈ V_i} α_k β_jk` and cluster masses.
struct Assignment<'p> {
    p: &'p QpProblem,
    labels: Vec<usize>,
    mass: Vec<f64>,
    size: Vec<usize>,
    s: Vec<f64>,
}

impl<'p> Assignment<'p> {
    fn new(p: &'p QpProblem, labels: Vec<usize>) -> Self {
        let (n, q) = (p.n, p.q);
        let mut mass = vec![0.0; q];
        let mut size = vec![0; q];
        let mut s = vec![0.0; n * q];
        for (k, &l) in labels.iter().enumerate() {
            mass[l] += p.alpha[k];
            size[l] += 1;
            for j in 0..n {
                s[j * q + l] += p.alpha[k] * p.b[(j, k)];
            }
        }
        Self {
            p,
            labels,
            mass,
            size,
            s,
        }
    }

    /// Change in cut density when `j` moves to cluster `to`.
    fn move_delta(&self, j: usize, to: usize) -> f64 {
        let q = self.p.q;
        let from = self.labels[j];
        let own = self.p.alpha[j] * self.p.b[(j, j)];
        self.p.alpha[j] * (self.s[j * q + from] - own - self.s[j * q + to])
    }

    fn apply_move(&mut self, j: usize, to: usize) {
        let (n, q) = (self.p.n, self.p.q);
        let from = self.labels[j];
        let a = self.p.alpha[j];
        for k in 0..n {
            let w = a * self.p.b[(k, j)];
            self.s[k * q + from] -= w;
            self.s[k * q + to] += w;
        }
        self.mass[from] -= a;
        self.mass[to] += a;
        self.size[from] -= 1;
        self.size[to] += 1;
        self.labels[j] = to;
    }

    fn balanced(&self, mass: f64) -> bool {
        mass >= self.p.c - FEAS_TOL
    }

    fn deficient(&self, i: usize) -> bool {
        self.size[i] == 0 || !self.balanced(self.mass[i])
    }

    /// Moves vertices into deficient clusters, cheapest first.
    fn repair(&mut self) -> Result<usize> {
        let mut moves = 0;
        while let Some(target) = (0..self.p.q).find(|&i| self.deficient(i)) {
            let mut best: Option<(f64, usize)> = None;
            for j in 0..self.p.n {
                let from = self.labels[j];
                if from == target || self.deficient(from) || self.size[from] < 2 {
                    continue;
                }
                if !self.balanced(self.mass[from] - self.p.alpha[j]) {
                    continue;
                }
                let d = self.move_delta(j, target);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, j));
                }
            }
            let Some((_, j)) = best else {
                return Err(Error::infeasible(format!(
                    "cannot repair cluster {target} to weight {} without emptying or unbalancing another",
                    self.p.c
                )));
            };
            self.apply_move(j, target);
            moves += 1;
        }
        Ok(moves)
    }

    /// Best-improvement local search over single moves and swaps that keep
    /// every cluster balanced and nonempty.
    fn improve(&mut self) {
        let (n, q) = (self.p.n, self.p.q);
        for _ in 0..10 * n * n {
            let mut best: Option<(f64, usize, usize, Option<usize>)> = None;
            let mut consider = |d: f64, j: usize, to: usize, swap: Option<usize>| {
                if d < -1e-15 && best.is_none_or(|(bd, ..)| d < bd) {
                    best = Some((d, j, to, swap));
                }
            };
            for j in 0..n {
                let from = self.labels[j];
                if self.size[from] < 2 || !self.balanced(self.mass[from] - self.p.alpha[j]) {
                    continue;
                }
                for to in 0..q {
                    if to != from {
                        consider(self.move_delta(j, to), j, to, None);
                    }
                }
            }
            for j in 0..n {
                for k in (j + 1)..n {
                    let (a, b) = (self.labels[j], self.labels[k]);
                    if a == b {
                        continue;
                    }
                    let (aj, ak) = (self.p.alpha[j], self.p.alpha[k]);
                    if !self.balanced(self.mass[a] - aj + ak)
                        || !self.balanced(self.mass[b] - ak + aj)
                    {
                        continue;
                    }
                    let d = self.move_delta(j, b)
                        + self.move_delta(k, a)
                        + 2.0 * aj * ak * self.p.b[(j, k)];
                    consider(d, j, b, Some(k));
                }
            }
            let Some((_, j, to, swap)) = best else { break };
            let from = self.labels[j];
            self.apply_move(j, to);
            if let Some(k) = swap {
                self.apply_move(k, from);
            }
        }
    }
}

fn argmax_labels(p: &QpProblem, x: &Matrix) -> Vec<usize> {
    (0..p.n)
        .map(|j| {
            let mut best = 0;
            for i in 1..p.q {
                if x[(i, j)] > x[(best, j)] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

/// Assign each vertex to its heaviest cluster (lowest index on ties), then
/// move vertices into clusters below `c` (or empty) at least cost.
/// Returns the partition and its cut density.
pub fn round_to_partition(p: &QpProblem, x: &FeasiblePoint) -> Result<(Partition, f64)> {
    p.check_shape(x)?;
    if p.q > p.n {
        return Err(Error::infeasible(format!(
            "cannot form {} nonempty clusters from {} vertices",
            p.q, p.n
        )));
    }
    let mut a = Assignment::new(p, argmax_labels(p, x));
    a.repair()?;
    let value = labeling_value(p, &a.labels);
    Ok((Partition::from_labels_unchecked(a.labels, p.q), value))
}

fn refine(p: &QpProblem, x: &Matrix) -> Result<(Vec<usize>, f64)> {
    let mut a = Assignment::new(p, argmax_labels(p, x));
    a.repair()?;
    a.improve();
    let value = labeling_value(p, &a.labels);
    Ok((a.labels, value))
}

fn start_point(p: &QpProblem, start: usize, kind: StartKind, rng: &SeededRng) -> Result<ActiveSet> {
    let mut local = rng.stream(start as u64);
    let random_vertex = |r: &mut SeededRng| -> Result<Matrix> {
        let cost = Matrix::from_fn(p.q, p.n, |_, _| r.random_range(-1.0..1.0));
        Ok(lp_oracle(p, &cost)?.x)
    };
    match kind {
        StartKind::RandomVertex => Ok(ActiveSet::single(random_vertex(&mut local)?)),
        StartKind::PerturbedIndicator => {
            let labels: Vec<usize> = (0..p.n).map(|_| local.random_range(0..p.q)).collect();
            let cost = Matrix::from_fn(p.q, p.n, |i, j| {
                let pull = if labels[j] == i { -1.0 } else { 0.0 };
                pull + 0.1 * local.random::<f64>()
            });
            let near = lp_oracle(p, &cost)?.x;
            let noise = random_vertex(&mut local)?;
            let mut set = ActiveSet::single(near);
            set.toward(noise, 0.05);
            Ok(set)
        }
    }
}

struct StartOutcome {
    record: StartRecord,
    x: Matrix,
    labels: Vec<usize>,
}

fn run_start(
    p: &QpProblem,
    start: usize,
    kind: StartKind,
    opts: &SolveOptions,
    rng: &SeededRng,
) -> Result<StartOutcome> {
    let x0 = start_point(p, start, kind, rng)?;
    let mut run = frank_wolfe(p, x0, opts)?;
    let mut iterations = run.iterations;
    let (mut labels, mut refined) = refine(p, &run.x)?;
    // a discrete point beating the stationary point restarts the descent
    for _ in 0..64 {
        if refined >= run.value - 1e-12 {
            break;
        }
        run = frank_wolfe(p, ActiveSet::single(p.indicator_of(&labels)), opts)?;
        iterations += run.iterations;
        let (l, r) = refine(p, &run.x)?;
        if r < refined {
            labels = l;
            refined = r;
        }
    }
    Ok(StartOutcome {
        record: StartRecord {
            start,
            kind,
            value: run.value,
            iterations,
            fw_gap: run.gap,
            converged: run.converged,
            refined_value: refined,
        },
        x: run.x,
        labels,
    })
}

/// Complementary-slackness residual of `x` against the LP duals at its own
/// gradient.
fn kkt_residual(p: &QpProblem, x: &Matrix) -> Result<f64> {
    let g = gradient_unchecked(p, x);
    let lp = lp_oracle(p, &g)?;
    let mut r = 0.0;
    for i in 0..p.q {
        for j in 0..p.n {
            r += x[(i, j)] * (g[(i, j)] - lp.u[i] - lp.v[j]).max(0.0);
        }
        let row: f64 = x.row(i).iter().sum();
        r += lp.u[i] * (row - p.c).max(0.0);
    }
    Ok(r)
}

/// Multistart Frank–Wolfe. Starts `0..starts/2` begin at random vertices of
/// the polytope, the rest at perturbed balanced indicators; start `s` draws
/// from stream `s` of `rng`. The best start (lowest value, then lowest
/// index) is returned.
pub fn solve(
    p: &QpProblem,
    opts: &SolveOptions,
    rng: &SeededRng,
) -> Result<(FeasiblePoint, SolveReport)> {
    if opts.starts == 0 || opts.max_iters == 0 || !(opts.tol > 0.0) {
        return Err(Error::input(
            "qp solve needs starts >= 1, max_iters >= 1 and tol > 0",
        ));
    }
    if p.q > p.n {
        return Err(Error::infeasible(format!(
            "cannot form {} nonempty clusters from {} vertices",
            p.q, p.n
        )));
    }
    let clock = Instant::now();
    let half = opts.starts / 2;
    let outcomes: Vec<StartOutcome> = (0..opts.starts)
        .into_par_iter()
        .map(|s| {
            let kind = if s < half.max(1) {
                StartKind::RandomVertex
            } else {
                StartKind::PerturbedIndicator
            };
            run_start(p, s, kind, opts, rng)
        })
        .collect::<Result<_>>()?;
    let best = outcomes
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.record.value.total_cmp(&b.record.value).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one start");
    let refined = outcomes
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            a.record
                .refined_value
                .total_cmp(&b.record.refined_value)
                .then(i.cmp(j))
        })
        .map(|(i, _)| i)
        .expect("at least one start");
    let x = outcomes[best].x.clone();
    let report = SolveReport {
        objective: outcomes[best].record.value,
        iterations: outcomes.iter().map(|o| o.record.iterations).sum(),
        fw_gap: outcomes[best].record.fw_gap,
        kkt_residual: kkt_residual(p, &x)?,
        converged: outcomes[best].record.converged,
        best_start: best,
        refined_partition: Partition::from_labels_unchecked(outcomes[refined].labels.clone(), p.q),
        refined_value: outcomes[refined].record.refined_value,
        starts: outcomes.into_iter().map(|o| o.record).collect(),
        wall_time: clock.elapsed().as_secs_f64(),
    };
    Ok((x, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerReport {
    pub q: usize,
    pub n: usize,
    /// Eigenvalues of `B`, descending.
    pub b_eigenvalues: Vec<f64>,
    /// `(q−1)λ_i` and `−λ_i` (each `q−1` times), descending.
    pub predicted: Vec<f64>,
    /// Eigenvalues of the materialized `A ⊗ B`, when small enough.
    pub direct: Option<Vec<f64>>,
    pub max_abs_diff: Option<f64>,
    /// Both signs occur among the predicted eigenvalues.
    pub indefinite: bool,
}

pub fn predicted_kron_spectrum(q: usize, b_eigenvalues: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(q * b_eigenvalues.len());
    for &l in b_eigenvalues {
        out.push((q as f64 - 1.0) * l);
        out.extend(std::iter::repeat_n(-l, q - 1));
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// `A = J_q − I_q`.
pub fn cluster_matrix(q: usize) -> Matrix {
    Matrix::from_fn(q, q, |i, j| if i == j { 0.0 } else { 1.0 })
}

/// Predicted spectrum of `A ⊗ B` from that of `B`, checked against a direct
/// eigensolve when `qn` is within the guard.
pub fn kronecker_spectrum_check(p: &QpProblem, guards: &Guards) -> Result<KroneckerReport> {
    guards.check_eigen(p.n)?;
    let b_eigenvalues = symmetric_eigen(&p.b)?.values;
    let predicted = predicted_kron_spectrum(p.q, &b_eigenvalues);
    let qn = p.q * p.n;
    let direct = if !guards.enabled || qn <= guards.kron_direct_max {
        Some(symmetric_eigen(&cluster_matrix(p.q).kron(&p.b))?.values)
    } else {
        None
    };
    let max_abs_diff = direct.as_ref().map(|d| {
        d.iter()
            .zip(&predicted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    let scale = predicted.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-12 * scale.max(1.0);
    let indefinite = predicted.iter().any(|&x| x > tol) && predicted.iter().any(|&x| x < -tol);
    Ok(KroneckerReport {
        q: p.q,
        n: p.n,
        b_eigenvalues,
        predicted,
        direct,
        max_abs_diff,
        indefinite,
    })
}

#[cfg(test)]
mod tests;
