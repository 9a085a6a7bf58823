//! Weighted graphs, partitions, quotients, blow-ups and stepfunction graphons.
//!
//! A [`WeightedGraph`] carries positive vertex weights `alpha` and a symmetric
//! edge-weight matrix `beta` with entries in `[0, 1]`, loops included. Vertex
//! weights are stored as given; every density normalizes by the volume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Asymmetry below this is treated as rounding noise and averaged away by the
/// JSON loader; anything larger is rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// One violated invariant found while validating raw graph data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Serialized form `{"alpha": [...], "beta": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub alpha: Vec<f64>,
    pub beta: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    alpha: Vec<f64>,
    beta: Matrix,
}

impl WeightedGraph {
    /// Validates every invariant and fails with all violations listed.
    /// Asymmetry up to [`SYMMETRY_TOL`] is averaged away.
    pub fn new(alpha: Vec<f64>, beta: Matrix) -> Result<Self> {
        let diags = Self::diagnose(&alpha, &beta);
        if !diags.is_empty() {
            let msg = diags
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::Input(msg));
        }
        let n = alpha.len();
        let mut beta = beta;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (beta[(i, j)] + beta[(j, i)]);
                beta[(i, j)] = avg;
                beta[(j, i)] = avg;
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_rows(alpha: Vec<f64>, beta: &[Vec<f64>]) -> Result<Self> {
        Self::new(alpha, Matrix::from_rows(beta)?)
    }

    /// Unit vertex weights.
    pub fn unit(beta: Matrix) -> Result<Self> {
        Self::new(vec![1.0; beta.rows()], beta)
    }

    /// Unit-weight simple graph from an edge list; loops are 0.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut beta = Matrix::zeros(n, n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::input(format!(
                    "edge ({i},{j}) out of range for n = {n}"
                )));
            }
            beta[(i, j)] = 1.0;
            beta[(j, i)] = 1.0;
        }
        Self::unit(beta)
    }

    /// Every violated invariant of raw `(alpha, beta)` data, never just the
    /// first.
    pub fn diagnose(alpha: &[f64], beta: &Matrix) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let n = alpha.len();
        if n == 0 {
            out.push(Diagnostic::new(
                "alpha",
                "graph must have at least one vertex",
            ));
        }
        if beta.rows() != n || beta.cols() != n {
            out.push(Diagnostic::new(
                "beta",
                format!(
                    "expected a {n}×{n} matrix, got {}×{}",
                    beta.rows(),
                    beta.cols()
                ),
            ));
            return out;
        }
        for (i, &a) in alpha.iter().enumerate() {
            if !(a.is_finite() && a > 0.0) {
                out.push(Diagnostic::new(
                    format!("alpha[{i}]"),
                    format!("vertex weight must be positive and finite, got {a}"),
                ));
            }
        }
        let mut worst_range: Option<(usize, usize, f64)> = None;
        let mut bad_range = 0usize;
        for i in 0..n {
            for j in 0..n {
                let b = beta[(i, j)];
                if !(b.is_finite() && (0.0..=1.0).contains(&b)) {
                    bad_range += 1;
                    if worst_range.is_none() {
                        worst_range = Some((i, j, b));
                    }
                }
            }
        }
        if let Some((i, j, b)) = worst_range {
            out.push(Diagnostic::new(
                format!("beta[{i}][{j}]"),
                format!(
                    "edge weight must lie in [0,1], got {b} ({bad_range} entries out of range)"
                ),
            ));
        }
        let (d, i, j) = beta.max_asymmetry();
        if d > SYMMETRY_TOL || d.is_nan() {
            out.push(Diagnostic::new(
                format!("beta[{i}][{j}]"),
                format!(
                    "matrix is not symmetric: max asymmetry |beta[{i}][{j}] - beta[{j}][{i}]| = {d:e} exceeds {SYMMETRY_TOL:e}"
                ),
            ));
        }
        out
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        Self::new(json.alpha.clone(), Matrix::from_rows(&json.beta)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: GraphJson =
            serde_json::from_str(s).map_err(|e| Error::input(format!("graph JSON: {e}")))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            alpha: self.alpha.clone(),
            beta: self.beta.to_rows(),
        }
    }

    /// Same graph with every loop weight `beta[i][i]` set to `w`.
    pub fn with_loop_weight(&self, w: f64) -> Result<Self> {
        let mut beta = self.beta.clone();
        for i in 0..self.n() {
            beta[(i, i)] = w;
        }
        Self::new(self.alpha.clone(), beta)
    }

    /// Same graph with vertex weights multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.alpha.iter().map(|a| a * s).collect(),
            self.beta.clone(),
        )
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &Matrix {
        &self.beta
    }

    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> f64 {
        self.beta[(i, j)]
    }

    /// `alpha_G`, the total vertex weight.
    pub fn volume(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// Vertex weights divided by the volume.
    pub fn normalized_alpha(&self) -> Vec<f64> {
        let v = self.volume();
        self.alpha.iter().map(|a| a / v).collect()
    }

    /// `max_i alpha_i / alpha_G`.
    pub fn max_weight_ratio(&self) -> f64 {
        self.alpha.iter().fold(0.0f64, |m, &a| m.max(a)) / self.volume()
    }

    pub fn has_unit_weights(&self) -> bool {
        self.alpha.iter().all(|&a| a == 1.0)
    }

    /// `alpha_T` for a vertex subset.
    pub fn subset_volume(&self, set: &[usize]) -> Result<f64> {
        self.check_indices(set)?;
        Ok(set.iter().map(|&i| self.alpha[i]).sum())
    }

    fn check_indices(&self, set: &[usize]) -> Result<()> {
        match set.iter().find(|&&i| i >= self.n()) {
            Some(i) => Err(Error::input(format!(
                "vertex index {i} out of range for n = {}",
                self.n()
            ))),
            None => Ok(()),
        }
    }

    /// Induced subgraph on `vertices` (kept in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        self.check_indices(vertices)?;
        let k = vertices.len();
        let beta = Matrix::from_fn(k, k, |a, b| self.beta[(vertices[a], vertices[b])]);
        Self::new(vertices.iter().map(|&v| self.alpha[v]).collect(), beta)
    }
}

/// The weighted cut `e_G(S,T) = Σ_{s∈S} Σ_{t∈T} α_s α_t β_st`.
///
/// `S` and `T` may overlap; the `s = t` terms then pick up loop weights.
pub fn weighted_cut(g: &WeightedGraph, s: &[usize], t: &[usize]) -> Result<f64> {
    g.check_indices(s)?;
    g.check_indices(t)?;
    let mut total = 0.0;
    for &i in s {
        let row: f64 = t.iter().map(|&j| g.alpha[j] * g.beta[(i, j)]).sum();
        total += g.alpha[i] * row;
    }
    Ok(total)
}

/// A surjective labeling of `[n]` onto `[q]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    q: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::input("partition needs q >= 1"));
        }
        let mut seen = vec![false; q];
        for (v, &l) in labels.iter().enumerate() {
            if l >= q {
                return Err(Error::input(format!(
                    "label {l} of vertex {v} out of range for q = {q}"
                )));
            }
            seen[l] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::input(format!(
                "invalid partition: cluster {empty} is empty"
            )));
        }
        Ok(Self { labels, q })
    }

    /// Everything in one cluster.
    pub fn trivial(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            q: 1,
        }
    }

    /// Trusted constructor for internally generated labelings.
    pub(crate) fn from_labels_unchecked(labels: Vec<usize>, q: usize) -> Self {
        debug_assert!(Self::new(labels.clone(), q).is_ok());
        Self { labels, q }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Vertex lists `V_1, …, V_q`.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.q];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    /// Relabel clusters in order of first appearance (restricted growth form).
    pub fn canonical(&self) -> Partition {
        let mut map = vec![usize::MAX; self.q];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Partition { labels, q: self.q }
    }

    /// Normalized cluster volumes `α_{V_i} / α_G`.
    pub fn masses(&self, g: &WeightedGraph) -> Vec<f64> {
        let vol = g.volume();
        let mut m = vec![0.0; self.q];
        for (v, &l) in self.labels.iter().enumerate() {
            m[l] += g.alpha[v];
        }
        m.iter().map(|x| x / vol).collect()
    }

    fn check_graph(&self, g: &WeightedGraph) -> Result<()> {
        if self.n() != g.n() {
            return Err(Error::input(format!(
                "partition covers {} vertices, graph has {}",
                self.n(),
                g.n()
            )));
        }
        Ok(())
    }
}

/// The q-quotient `G/P`: normalized cluster volumes and pairwise densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientGraph {
    pub q: usize,
    pub vweights: Vec<f64>,
    pub eweights: Matrix,
}

impl QuotientGraph {
    pub fn new(vweights: Vec<f64>, eweights: Matrix) -> Result<Self> {
        let q = vweights.len();
        if q == 0 || eweights.rows() != q || eweights.cols() != q {
            return Err(Error::input("quotient weights have mismatched shapes"));
        }
        let total: f64 = vweights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!(
                "quotient vertex weights must sum to 1, got {total}"
            )));
        }
        if !eweights.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::input("quotient edge weights must be symmetric"));
        }
        Ok(Self {
            q,
            vweights,
            eweights,
        })
    }

    /// `α_i α_j β_ij`, the normalized cut mass between clusters `i` and `j`.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.vweights[i] * self.vweights[j] * self.eweights[(i, j)]
    }

    /// View as a `q`-vertex weighted graph.
    pub fn to_graph(&self) -> Result<WeightedGraph> {
        WeightedGraph::new(self.vweights.clone(), self.eweights.clone())
    }
}

/// Build the quotient `G/P` from cluster volumes and the cluster cut matrix.
pub fn quotient(g: &WeightedGraph, p: &Partition) -> Result<QuotientGraph> {
    p.check_graph(g)?;
    let q = p.q();
    let vol = g.volume();
    let mut cluster_alpha = vec![0.0; q];
    for (v, &l) in p.labels().iter().enumerate() {
        cluster_alpha[l] += g.alpha[v];
    }
    if let Some(i) = cluster_alpha.iter().position(|&a| a <= 0.0) {
        return Err(Error::input(format!(
            "invalid partition: cluster {i} is empty"
        )));
    }
    let cut = cluster_cut_matrix(g, p);
    let eweights = Matrix::from_fn(q, q, |i, j| {
        cut[(i, j)] / (cluster_alpha[i] * cluster_alpha[j])
    });
    let mut vweights: Vec<f64> = cluster_alpha.iter().map(|a| a / vol).collect();
    // absorb the last-ulp drift so the weights sum to exactly 1 within tolerance
    let drift = vweights.iter().sum::<f64>() - 1.0;
    if let Some(w) = vweights.iter_mut().max_by(|a, b| a.partial_cmp(b).unwrap()) {
        *w -= drift;
    }
    Ok(QuotientGraph {
        q,
        vweights,
        eweights,
    })
}

/// Unnormalized `e_G(V_i, V_j)` for all cluster pairs.
pub(crate) fn cluster_cut_matrix(g: &WeightedGraph, p: &Partition) -> Matrix {
    let q = p.q();
    let n = g.n();
    let labels = p.labels();
    let mut per_cluster = vec![0.0; q];
    let mut cut = Matrix::zeros(q, q);
    for i in 0..n {
        per_cluster.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..n {
            per_cluster[labels[j]] += g.alpha[j] * g.beta[(i, j)];
        }
        let li = labels[i];
        for (lj, s) in per_cluster.iter().enumerate() {
            cut[(li, lj)] += g.alpha[i] * s;
        }
    }
    cut
}

/// Blow a `q × q` pattern up to a block-constant graph with unit vertex
/// weights. Block `(i,j)` has size `sizes[i] × sizes[j]` and constant value
/// `pattern[i][j]`; the diagonal blocks include the loops.
pub fn blow_up(pattern: &Matrix, sizes: &[usize]) -> Result<WeightedGraph> {
    let q = sizes.len();
    if pattern.rows() != q || pattern.cols() != q {
        return Err(Error::input(format!(
            "pattern is {}×{} but {q} block sizes were given",
            pattern.rows(),
            pattern.cols()
        )));
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::input(format!("block size {i} must be positive")));
    }
    let block_of: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = block_of.len();
    let beta = Matrix::from_fn(n, n, |i, j| pattern[(block_of[i], block_of[j])]);
    WeightedGraph::unit(beta)
}

/// The planted partition of a blow-up with the given block sizes.
pub fn block_partition(sizes: &[usize]) -> Result<Partition> {
    let labels = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    Partition::new(labels, sizes.len())
}

/// Piecewise-constant symmetric function on `[0,1]²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepfunctionGraphon {
    breaks: Vec<f64>,
    values: Matrix,
}

impl StepfunctionGraphon {
    pub fn new(breaks: Vec<f64>, values: Matrix) -> Result<Self> {
        let m = breaks.len().saturating_sub(1);
        if m == 0 {
            return Err(Error::input("stepfunction needs at least one step"));
        }
        if values.rows() != m || values.cols() != m {
            return Err(Error::input(format!(
                "{m} steps need a {m}×{m} value matrix, got {}×{}",
                values.rows(),
                values.cols()
            )));
        }
        if breaks[0] != 0.0 || (breaks[m] - 1.0).abs() > 1e-12 {
            return Err(Error::input("breaks must start at 0 and end at 1"));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("breaks must be strictly increasing"));
        }
        if !values.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::input("stepfunction values must be symmetric"));
        }
        let mut breaks = breaks;
        breaks[m] = 1.0;
        Ok(Self { breaks, values })
    }

    /// Steps of the given widths (normalized to sum 1).
    pub fn from_widths(widths: &[f64], values: Matrix) -> Result<Self> {
        if widths.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::input("step widths must be positive"));
        }
        let total: f64 = widths.iter().sum();
        let mut breaks = Vec::with_capacity(widths.len() + 1);
        breaks.push(0.0);
        let mut acc = 0.0;
        for w in widths {
            acc += w / total;
            breaks.push(acc);
        }
        let last = breaks.len() - 1;
        breaks[last] = 1.0;
        Self::new(breaks, values)
    }

    /// Equal-width steps.
    pub fn uniform(values: Matrix) -> Result<Self> {
        let m = values.rows();
        Self::from_widths(&vec![1.0; m], values)
    }

    pub fn steps(&self) -> usize {
        self.values.rows()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn widths(&self) -> Vec<f64> {
        self.breaks.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Step index containing `x ∈ [0,1]` (the last step is closed).
    pub fn step_of(&self, x: f64) -> usize {
        let m = self.steps();
        let idx = self.breaks[1..].partition_point(|&b| b <= x);
        idx.min(m - 1)
    }

    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        self.values[(self.step_of(x), self.step_of(y))]
    }

    pub fn min_value(&self) -> f64 {
        self.values
            .as_slice()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .as_slice()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Re-express on a finer set of breaks that contains all of ours.
    fn refine_to(&self, breaks: &[f64]) -> StepfunctionGraphon {
        let mids: Vec<usize> = breaks
            .windows(2)
            .map(|w| self.step_of(0.5 * (w[0] + w[1])))
            .collect();
        let m = mids.len();
        let values = Matrix::from_fn(m, m, |i, j| self.values[(mids[i], mids[j])]);
        StepfunctionGraphon {
            breaks: breaks.to_vec(),
            values,
        }
    }

    fn merged_breaks(&self, other: &StepfunctionGraphon) -> Vec<f64> {
        let mut all: Vec<f64> = self.breaks.iter().chain(&other.breaks).copied().collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<f64> = Vec::with_capacity(all.len());
        for b in all {
            if out.last().is_none_or(|&last| b - last > 1e-13) {
                out.push(b);
            }
        }
        let last = out.len() - 1;
        out[last] = 1.0;
        out
    }

    /// `self - other` on the common refinement of both break sets.
    pub fn difference(&self, other: &StepfunctionGraphon) -> StepfunctionGraphon {
        let breaks = self.merged_breaks(other);
        let a = self.refine_to(&breaks);
        let b = other.refine_to(&breaks);
        StepfunctionGraphon {
            breaks,
            values: a.values.sub(&b.values),
        }
    }

    /// Supremum distance between the two functions.
    pub fn max_abs_diff(&self, other: &StepfunctionGraphon) -> f64 {
        self.difference(other).values.max_abs()
    }

    /// Merge adjacent steps whose rows are identical.
    pub fn simplified(&self) -> StepfunctionGraphon {
        let m = self.steps();
        let mut keep = vec![0usize];
        for i in 1..m {
            let prev = *keep.last().unwrap();
            if self.values.row(i) != self.values.row(prev) {
                keep.push(i);
            }
        }
        let mut breaks: Vec<f64> = keep.iter().map(|&i| self.breaks[i]).collect();
        breaks.push(1.0);
        let k = keep.len();
        let values = Matrix::from_fn(k, k, |i, j| self.values[(keep[i], keep[j])]);
        StepfunctionGraphon { breaks, values }
    }
}

/// `W_G`: intervals of length `α_i/α_G`, value `β_ij` on `I_i × I_j`.
pub fn stepfunction(g: &WeightedGraph) -> StepfunctionGraphon {
    StepfunctionGraphon::from_widths(&g.alpha, g.beta.clone())
        .expect("a valid graph always yields a valid stepfunction")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> WeightedGraph {
        WeightedGraph::from_edges(2, &[(0, 1)]).unwrap()
    }

    fn path3() -> WeightedGraph {
        WeightedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn cycle4() -> WeightedGraph {
        WeightedGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn cut_of_single_edge() {
        let g = single_edge();
        assert_eq!(weighted_cut(&g, &[0], &[1]).unwrap(), 1.0);
        assert_eq!(weighted_cut(&g, &[0, 1], &[0, 1]).unwrap(), 2.0);
    }

    #[test]
    fn cut_on_path_matches_hand_sum() {
        // terms: α1α2β12 + α3α2β32 = 1 + 1
        assert_eq!(weighted_cut(&path3(), &[0, 2], &[1]).unwrap(), 2.0);
    }

    #[test]
    fn cut_rejects_out_of_range() {
        assert!(matches!(
            weighted_cut(&path3(), &[0, 3], &[1]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn quotient_trivial_partition() {
        let g = WeightedGraph::from_rows(
            vec![1.0, 2.0, 0.5],
            &[
                vec![0.1, 0.3, 0.0],
                vec![0.3, 0.0, 0.9],
                vec![0.0, 0.9, 0.4],
            ],
        )
        .unwrap();
        let h = quotient(&g, &Partition::trivial(3)).unwrap();
        assert_eq!(h.vweights, vec![1.0]);
        let all = [0, 1, 2];
        let expect = weighted_cut(&g, &all, &all).unwrap() / g.volume().powi(2);
        assert!((h.eweights[(0, 0)] - expect).abs() < 1e-12);
    }

    #[test]
    fn quotient_of_cycle_split() {
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let h = quotient(&cycle4(), &p).unwrap();
        assert_eq!(h.vweights, vec![0.5, 0.5]);
        assert!((h.eweights[(0, 1)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quotient_two_vertices() {
        let g =
            WeightedGraph::from_rows(vec![1.0, 1.0], &[vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
        let h = quotient(&g, &Partition::new(vec![0, 1], 2).unwrap()).unwrap();
        assert!((h.eweights[(0, 1)] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn partition_rejects_empty_cluster() {
        assert!(matches!(
            Partition::new(vec![0, 0, 2], 3),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn canonical_relabels_by_first_occurrence() {
        let p = Partition::new(vec![2, 0, 2, 1], 3).unwrap();
        assert_eq!(p.canonical().labels(), &[0, 1, 0, 2]);
    }

    #[test]
    fn blow_up_constant() {
        let g = blow_up(&Matrix::filled(1, 1, 0.5), &[3]).unwrap();
        assert_eq!(g.beta(), &Matrix::filled(3, 3, 0.5));
    }

    #[test]
    fn blow_up_two_blocks() {
        let p = Matrix::from_rows(&[vec![0.7, 0.2], vec![0.2, 0.6]]).unwrap();
        let g = blow_up(&p, &[2, 2]).unwrap();
        let expect = Matrix::from_rows(&[
            vec![0.7, 0.7, 0.2, 0.2],
            vec![0.7, 0.7, 0.2, 0.2],
            vec![0.2, 0.2, 0.6, 0.6],
            vec![0.2, 0.2, 0.6, 0.6],
        ])
        .unwrap();
        assert_eq!(g.beta(), &expect);
    }

    #[test]
    fn blow_up_rejects_zero_size() {
        let p = Matrix::filled(2, 2, 0.5);
        assert!(matches!(blow_up(&p, &[2, 0]), Err(Error::Input(_))));
    }

    /// Rank by Gaussian elimination with partial pivoting.
    fn rank(m: &Matrix) -> usize {
        let mut a = m.to_rows();
        let (r, c) = (m.rows(), m.cols());
        let mut rank = 0;
        for col in 0..c {
            let piv =
                (rank..r).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap());
            let Some(piv) = piv else { break };
            if a[piv][col].abs() < 1e-10 {
                continue;
            }
            a.swap(rank, piv);
            for row in 0..r {
                if row != rank {
                    let f = a[row][col] / a[rank][col];
                    for k in 0..c {
                        a[row][k] -= f * a[rank][k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn blow_up_preserves_pattern_rank() {
        let p = Matrix::from_rows(&[vec![0.7, 0.2], vec![0.2, 0.6]]).unwrap();
        let g = blow_up(&p, &[3, 4]).unwrap();
        assert_eq!(rank(g.beta()), 2);
    }

    #[test]
    fn stepfunction_breaks() {
        let g =
            WeightedGraph::from_rows(vec![1.0, 1.0], &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(stepfunction(&g).breaks(), &[0.0, 0.5, 1.0]);
        let g =
            WeightedGraph::from_rows(vec![1.0, 3.0], &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let w = stepfunction(&g);
        assert_eq!(w.breaks(), &[0.0, 0.25, 1.0]);
        assert_eq!(w.values(), g.beta());
    }

    #[test]
    fn blow_up_stepfunction_equals_weighted_pattern() {
        let p = Matrix::from_rows(&[vec![0.7, 0.2], vec![0.2, 0.6]]).unwrap();
        let sizes = [3, 5];
        let big = stepfunction(&blow_up(&p, &sizes).unwrap());
        let small = stepfunction(&WeightedGraph::new(vec![3.0, 5.0], p).unwrap());
        assert!(big.max_abs_diff(&small) < 1e-15);
        assert_eq!(big.simplified().steps(), 2);
    }

    #[test]
    fn loader_symmetrizes_tiny_asymmetry_and_rejects_large() {
        let g = WeightedGraph::from_json_str(
            r#"{"alpha":[1,1],"beta":[[0,0.3],[0.3000000000000001,0]]}"#,
        )
        .unwrap();
        assert_eq!(g.edge(0, 1), g.edge(1, 0));
        let err = WeightedGraph::from_json_str(r#"{"alpha":[1,1],"beta":[[0,0.3],[0.4,0]]}"#);
        assert!(matches!(err, Err(Error::Input(m)) if m.contains("beta[0][1]")));
    }

    #[test]
    fn diagnose_reports_everything() {
        let beta = Matrix::from_rows(&[vec![0.0, 1.5], vec![0.2, 0.0]]).unwrap();
        let d = WeightedGraph::diagnose(&[1.0, -1.0], &beta);
        assert_eq!(d.len(), 3, "{d:?}");
    }

    #[test]
    fn loop_weight_is_configurable() {
        let g = single_edge().with_loop_weight(0.25).unwrap();
        assert_eq!(g.edge(0, 0), 0.25);
        assert_eq!(g.edge(0, 1), 1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn graph_and_partition() -> impl Strategy<Value = (WeightedGraph, Partition)> {
            (2usize..8, 1usize..4).prop_flat_map(|(n, q)| {
                let q = q.min(n);
                (
                    proptest::collection::vec(0.1f64..3.0, n),
                    proptest::collection::vec(0.0f64..=1.0, n * n),
                    proptest::collection::vec(0..q, n),
                )
                    .prop_map(move |(alpha, raw, mut labels)| {
                        let beta = Matrix::from_fn(n, n, |i, j| raw[i.min(j) * n + i.max(j)]);
                        // force surjectivity
                        for (c, l) in labels.iter_mut().take(q).enumerate() {
                            *l = c;
                        }
                        (
                            WeightedGraph::new(alpha, beta).unwrap(),
                            Partition::new(labels, q).unwrap(),
                        )
                    })
            })
        }

        proptest! {
            #[test]
            fn quotient_conserves_total_mass((g, p) in graph_and_partition()) {
                let h = quotient(&g, &p).unwrap();
                let all: Vec<usize> = (0..g.n()).collect();
                let total = weighted_cut(&g, &all, &all).unwrap();
                let mut s = 0.0;
                for i in 0..h.q { for j in 0..h.q { s += h.mass(i, j); } }
                prop_assert!((s * g.volume().powi(2) - total).abs() < 1e-9);
                prop_assert!((h.vweights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
