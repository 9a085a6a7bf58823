//! Homomorphism, injective and induced densities of a simple graph `F` in a
//! weighted graph `G`, and the exact distribution of the sampled graph
//! `ξ(k, G)`.
//!
//! Every density here is a sum over maps `Φ: [k] → [n]` enumerated in
//! row-major order (`Φ(0)` most significant). The top-level split is over
//! `Φ(0)`; partial sums are combined in index order, so the result does not
//! depend on the number of worker threads.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::guards::Guards;

/// A labeled simple graph on `[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SimpleGraphJson", into = "SimpleGraphJson")]
pub struct SimpleGraph {
    k: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// Serialized form `{"k": 3, "edges": [[0,1],[1,2]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimpleGraphJson {
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<SimpleGraphJson> for SimpleGraph {
    type Error = Error;
    fn try_from(json: SimpleGraphJson) -> Result<Self> {
        Self::from_json(&json)
    }
}

impl From<SimpleGraph> for SimpleGraphJson {
    fn from(g: SimpleGraph) -> Self {
        g.to_json()
    }
}

impl SimpleGraph {
    pub fn new(k: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::input(format!(
                    "simple graph cannot have loop ({a},{a})"
                )));
            }
            if a >= k || b >= k {
                return Err(Error::input(format!(
                    "edge ({a},{b}) out of range for k = {k}"
                )));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::input(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(Self { k, edges: set })
    }

    pub fn empty(k: usize) -> Self {
        Self {
            k,
            edges: BTreeSet::new(),
        }
    }

    pub fn complete(k: usize) -> Self {
        Self::from_mask(k, full_mask(k))
    }

    /// Graph whose edge set is given by bits of `mask` over [`pair_list`].
    pub fn from_mask(k: usize, mask: u64) -> Self {
        let edges = pair_list(k)
            .into_iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        Self { k, edges }
    }

    pub fn to_mask(&self) -> u64 {
        pair_list(self.k)
            .iter()
            .enumerate()
            .filter(|(_, e)| self.edges.contains(e))
            .fold(0, |m, (b, _)| m | 1 << b)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Pairs of `[k]` that are not edges.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        pair_list(self.k)
            .into_iter()
            .filter(|e| !self.edges.contains(e))
            .collect()
    }

    /// The same graph with one more edge.
    pub fn with_edge(&self, a: usize, b: usize) -> Result<Self> {
        Self::new(self.k, self.edges().chain(std::iter::once((a, b))))
    }

    /// Unit-weight weighted graph with the same adjacency.
    pub fn to_weighted(&self) -> WeightedGraph {
        let pairs: Vec<(usize, usize)> = self.edges().collect();
        WeightedGraph::from_edges(self.k.max(1), &pairs)
            .expect("simple graph is a valid weighted graph")
    }

    pub fn from_json(json: &SimpleGraphJson) -> Result<Self> {
        Self::new(json.k, json.edges.iter().map(|e| (e[0], e[1])))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: SimpleGraphJson =
            serde_json::from_str(s).map_err(|e| Error::input(format!("simple graph JSON: {e}")))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> SimpleGraphJson {
        SimpleGraphJson {
            k: self.k,
            edges: self.edges().map(|(a, b)| [a, b]).collect(),
        }
    }
}

/// Unordered pairs of `[k]` in the order `(0,1), (0,2), …, (k-2,k-1)`;
/// bit `b` of an edge mask refers to `pair_list(k)[b]`.
pub fn pair_list(k: usize) -> Vec<(usize, usize)> {
    (0..k)
        .flat_map(|a| ((a + 1)..k).map(move |b| (a, b)))
        .collect()
}

fn full_mask(k: usize) -> u64 {
    let m = k * k.saturating_sub(1) / 2;
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MapKind {
    All,
    Injective,
}

/// Per-vertex lists of earlier neighbours (edges) and earlier non-neighbours.
struct Pattern {
    k: usize,
    edges_back: Vec<Vec<usize>>,
    non_edges_back: Vec<Vec<usize>>,
}

impl Pattern {
    fn new(f: &SimpleGraph, induced: bool) -> Self {
        let mut edges_back = vec![Vec::new(); f.k];
        let mut non_edges_back = vec![Vec::new(); f.k];
        for b in 0..f.k {
            for a in 0..b {
                if f.has_edge(a, b) {
                    edges_back[b].push(a);
                } else if induced {
                    non_edges_back[b].push(a);
                }
            }
        }
        Self {
            k: f.k,
            edges_back,
            non_edges_back,
        }
    }
}

/// `Σ_Φ Π α̂_Φ(i) · Π_{E(F)} β · Π_{non-edges} (1-β)` over the chosen maps,
/// with `α̂ = α/α_G`.
fn weighted_map_sum(pat: &Pattern, g: &WeightedGraph, kind: MapKind) -> f64 {
    let a = g.normalized_alpha();
    let n = g.n();
    if pat.k == 0 {
        return 1.0;
    }
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut phi = vec![0usize; pat.k];
            phi[0] = first;
            let mut used = vec![false; n];
            used[first] = true;
            descend(pat, g, &a, kind, &mut phi, &mut used, 1, a[first])
        })
        .collect();
    partials.iter().sum()
}

#[allow(clippy::too_many_arguments)]
fn descend(
    pat: &Pattern,
    g: &WeightedGraph,
    a: &[f64],
    kind: MapKind,
    phi: &mut [usize],
    used: &mut [bool],
    depth: usize,
    weight: f64,
) -> f64 {
    if depth == pat.k {
        return weight;
    }
    let mut total = 0.0;
    for v in 0..g.n() {
        if kind == MapKind::Injective && used[v] {
            continue;
        }
        let mut w = weight * a[v];
        for &u in &pat.edges_back[depth] {
            w *= g.edge(phi[u], v);
        }
        for &u in &pat.non_edges_back[depth] {
            w *= 1.0 - g.edge(phi[u], v);
        }
        if w == 0.0 {
            continue;
        }
        phi[depth] = v;
        used[v] = true;
        total += descend(pat, g, a, kind, phi, used, depth + 1, w);
        used[v] = false;
    }
    total
}

/// `k! · e_k(α̂)`: total weight of injective maps, via the one-pass
/// elementary symmetric recurrence on normalized weights.
pub fn injective_mass(g: &WeightedGraph, k: usize) -> f64 {
    let a = g.normalized_alpha();
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in &a {
        for j in (1..=k).rev() {
            e[j] += x * e[j - 1];
        }
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    fact * e[k]
}

/// `t(F, G)`: weighted fraction of all maps `[k] → [n]` that are
/// homomorphisms.
pub fn hom_density(f: &SimpleGraph, g: &WeightedGraph) -> Result<f64> {
    hom_density_guarded(f, g, &Guards::default())
}

pub fn hom_density_guarded(f: &SimpleGraph, g: &WeightedGraph, guards: &Guards) -> Result<f64> {
    guards.check_hom(f.k, g.n())?;
    Ok(weighted_map_sum(&Pattern::new(f, false), g, MapKind::All))
}

/// `t_inj(F, G)`: the same ratio restricted to injective maps.
pub fn inj_density(f: &SimpleGraph, g: &WeightedGraph) -> Result<f64> {
    inj_density_guarded(f, g, &Guards::default())
}

pub fn inj_density_guarded(f: &SimpleGraph, g: &WeightedGraph, guards: &Guards) -> Result<f64> {
    check_injective(f.k, g.n())?;
    guards.check_hom(f.k, g.n())?;
    let num = weighted_map_sum(&Pattern::new(f, false), g, MapKind::Injective);
    Ok(num / injective_mass(g, f.k))
}

/// `t_ind(F, G)`: injective maps weighted by edges present on `E(F)` and
/// absent (`1 - β`) on the complement.
pub fn ind_density(f: &SimpleGraph, g: &WeightedGraph) -> Result<f64> {
    ind_density_guarded(f, g, &Guards::default())
}

pub fn ind_density_guarded(f: &SimpleGraph, g: &WeightedGraph, guards: &Guards) -> Result<f64> {
    check_injective(f.k, g.n())?;
    guards.check_hom(f.k, g.n())?;
    let num = weighted_map_sum(&Pattern::new(f, true), g, MapKind::Injective);
    Ok(num / injective_mass(g, f.k))
}

fn check_injective(k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(Error::input(format!(
            "injective maps need k <= n, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

/// Which density [`density`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    /// `t`
    Hom,
    /// `t_inj`
    Inj,
    /// `t_ind`
    Ind,
}

impl std::str::FromStr for DensityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" | "hom" => Ok(Self::Hom),
            "tinj" | "inj" => Ok(Self::Inj),
            "tind" | "ind" => Ok(Self::Ind),
            other => Err(Error::input(format!(
                "unknown density kind `{other}` (t|tinj|tind)"
            ))),
        }
    }
}

pub fn density(
    kind: DensityKind,
    f: &SimpleGraph,
    g: &WeightedGraph,
    guards: &Guards,
) -> Result<f64> {
    match kind {
        DensityKind::Hom => hom_density_guarded(f, g, guards),
        DensityKind::Inj => inj_density_guarded(f, g, guards),
        DensityKind::Ind => ind_density_guarded(f, g, guards),
    }
}

/// Exact law of `ξ(k, G)` over the labeled simple graphs on `[k]`, indexed by
/// edge mask.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDistribution {
    k: usize,
    probs: Vec<f64>,
}

impl GraphDistribution {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, f: &SimpleGraph) -> f64 {
        if f.k != self.k {
            return 0.0;
        }
        self.probs[f.to_mask() as usize]
    }

    pub fn prob_of_mask(&self, mask: u64) -> f64 {
        self.probs[mask as usize]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SimpleGraph, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(m, &p)| (SimpleGraph::from_mask(self.k, m as u64), p))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }
}

/// `P(ξ(k,G) = F) = Σ_Φ α̂_Φ ind_Φ(F, G)` for every labeled `F` on `[k]`,
/// non-injective maps included.
pub fn sample_distribution(k: usize, g: &WeightedGraph) -> Result<GraphDistribution> {
    sample_distribution_guarded(k, g, &Guards::default())
}

pub fn sample_distribution_guarded(
    k: usize,
    g: &WeightedGraph,
    guards: &Guards,
) -> Result<GraphDistribution> {
    if k == 0 {
        return Err(Error::input("sample size k must be at least 1"));
    }
    guards.check_sample_distribution(k, g.n())?;
    let pairs = pair_list(k);
    let m = pairs.len();
    let a = g.normalized_alpha();
    let n = g.n();

    let per_first: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut acc = vec![0.0; 1 << m];
            let mut phi = vec![0; k];
            phi[0] = first;
            let mut scratch = vec![0.0; 1 << m];
            loop {
                let w: f64 = phi.iter().map(|&v| a[v]).product();
                // product distribution over edge masks, built by doubling
                scratch[0] = 1.0;
                for (b, &(x, y)) in pairs.iter().enumerate() {
                    let p = g.edge(phi[x], phi[y]);
                    let half = 1usize << b;
                    for s in 0..half {
                        let base = scratch[s];
                        scratch[s] = base * (1.0 - p);
                        scratch[s + half] = base * p;
                    }
                }
                for (dst, src) in acc.iter_mut().zip(&scratch) {
                    *dst += w * src;
                }
                // advance phi[1..] in row-major order
                let mut pos = k;
                loop {
                    if pos == 1 {
                        return acc;
                    }
                    pos -= 1;
                    phi[pos] += 1;
                    if phi[pos] < n {
                        break;
                    }
                    phi[pos] = 0;
                }
            }
        })
        .collect();

    let mut probs = vec![0.0; 1 << m];
    for part in &per_first {
        for (dst, src) in probs.iter_mut().zip(part) {
            *dst += src;
        }
    }
    Ok(GraphDistribution { k, probs })
}
