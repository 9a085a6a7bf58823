//! Minimum multiway cut densities and ground-state energies by exhaustive
//! partition search.
//!
//! All values are computed from the normalized cluster statistics
//! `α_{V_i}/α_G` and `e_G(V_i,V_j)/α_G²`, so they are invariant under scaling
//! the vertex weights.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::enumerate::{search, Labeling, Leaf};
use crate::error::{Error, Result};
use crate::graph::{Partition, WeightedGraph};
use crate::guards::Guards;
use crate::linalg::Matrix;

/// Slack on balance comparisons, absorbing rounding in the cluster masses.
const BALANCE_SLACK: f64 = 1e-12;

/// Which partitions are admissible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Balance {
    #[default]
    Unrestricted,
    /// Every cluster carries at least a `c` fraction of the total weight.
    C {
        c: f64,
    },
    /// Cluster `i` carries `a_i` of the weight, up to `α_max/α_G`.
    A {
        a: Vec<f64>,
    },
}

impl FromStr for Balance {
    type Err = Error;

    /// `none`, `c:0.25` or `a:0.5,0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") || s.eq_ignore_ascii_case("unrestricted") {
            return Ok(Balance::Unrestricted);
        }
        let bad = || {
            Error::input(format!(
                "cannot parse balance `{s}` (expected none, c:<x> or a:<x,y,...>)"
            ))
        };
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        match kind.trim() {
            "c" => Ok(Balance::C { c: num(rest)? }),
            "a" => Ok(Balance::A {
                a: rest.split(',').map(num).collect::<Result<_>>()?,
            }),
            _ => Err(bad()),
        }
    }
}

impl Balance {
    /// Check the parameters against `q`.
    pub fn validate(&self, q: usize) -> Result<()> {
        match self {
            Balance::Unrestricted => Ok(()),
            Balance::C { c } => {
                if !c.is_finite() || *c < 0.0 {
                    return Err(Error::input(format!("balance c = {c} must be nonnegative")));
                }
                if *c * q as f64 > 1.0 + 1e-12 {
                    return Err(Error::input(format!(
                        "balance c = {c} violates c <= 1/q = {}",
                        1.0 / q as f64
                    )));
                }
                Ok(())
            }
            Balance::A { a } => validate_distribution(a, q),
        }
    }

    /// Admissibility of labeled cluster masses.
    pub(crate) fn admits_labeled(&self, masses: &[f64], tol: f64) -> bool {
        match self {
            Balance::Unrestricted => true,
            Balance::C { c } => masses.iter().all(|&m| m >= c - BALANCE_SLACK),
            Balance::A { a } => masses
                .iter()
                .zip(a)
                .all(|(&m, &t)| (m - t).abs() <= tol + BALANCE_SLACK),
        }
    }

    /// Admissibility up to relabeling the clusters.
    fn admits_unlabeled(&self, masses: &[f64], sorted_a: &[f64], tol: f64) -> bool {
        match self {
            Balance::A { .. } => {
                // sorted pairing minimizes the largest deviation on a line
                let mut m = masses.to_vec();
                m.sort_by(f64::total_cmp);
                m.iter()
                    .zip(sorted_a)
                    .all(|(&x, &t)| (x - t).abs() <= tol + BALANCE_SLACK)
            }
            other => other.admits_labeled(masses, tol),
        }
    }
}

pub fn validate_distribution(a: &[f64], q: usize) -> Result<()> {
    if a.len() != q {
        return Err(Error::input(format!(
            "distribution a has length {}, expected q = {q}",
            a.len()
        )));
    }
    if let Some(i) = a.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::input(format!(
            "distribution entry a[{i}] = {} must be positive",
            a[i]
        )));
    }
    let s: f64 = a.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::input(format!(
            "distribution a sums to {s}, expected 1"
        )));
    }
    Ok(())
}

/// Coupling matrix and magnetic field of a q-state spin system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySpec {
    pub j: Matrix,
    pub h: Vec<f64>,
}

impl EnergySpec {
    pub fn new(j: Matrix, h: Vec<f64>) -> Result<Self> {
        let spec = Self { j, h };
        spec.validate(spec.h.len())?;
        Ok(spec)
    }

    /// `J_ii = 0`, `J_ij = -1/2`, `h = 0`: the energy whose ground state is
    /// the minimum cut density.
    pub fn cut_coupling(q: usize) -> Self {
        Self {
            j: cut_coupling_matrix(q),
            h: vec![0.0; q],
        }
    }

    pub fn validate(&self, q: usize) -> Result<()> {
        if self.j.rows() != q || self.j.cols() != q {
            return Err(Error::input(format!(
                "coupling matrix is {}x{}, expected {q}x{q}",
                self.j.rows(),
                self.j.cols()
            )));
        }
        if self.h.len() != q {
            return Err(Error::input(format!(
                "field h has length {}, expected q = {q}",
                self.h.len()
            )));
        }
        let (d, i, j) = self.j.max_asymmetry();
        if d > 1e-12 {
            return Err(Error::input(format!(
                "coupling matrix is not symmetric: |J[{i}][{j}] - J[{j}][{i}]| = {d:e}"
            )));
        }
        if self
            .j
            .as_slice()
            .iter()
            .chain(&self.h)
            .any(|x| !x.is_finite())
        {
            return Err(Error::input("energy spec contains non-finite entries"));
        }
        Ok(())
    }
}

pub fn cut_coupling_matrix(q: usize) -> Matrix {
    Matrix::from_fn(q, q, |i, j| if i == j { 0.0 } else { -0.5 })
}

/// A minimum over partitions together with a minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub value: f64,
    pub partition: Partition,
    /// Number of admissible partitions examined (set partitions for the
    /// symmetric densities, labelings for energies).
    pub feasible_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    /// `Σ_{i<j} e(V_i,V_j) / α_G²`
    F,
    /// `Σ_{i<j} e(V_i,V_j) / (α_{V_i} α_{V_j})`
    Mu,
}

impl FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(Functional::F),
            "mu" => Ok(Functional::Mu),
            _ => Err(Error::input(format!(
                "unknown functional `{s}` (expected f or mu)"
            ))),
        }
    }
}

fn pair_sum(leaf: &Leaf, functional: Functional) -> f64 {
    let q = leaf.masses.len();
    let mut s = 0.0;
    for i in 0..q {
        for j in (i + 1)..q {
            let c = leaf.cut[i * q + j];
            s += match functional {
                Functional::F => c,
                Functional::Mu => c / (leaf.masses[i] * leaf.masses[j]),
            };
        }
    }
    s
}

fn a_tolerance(g: &WeightedGraph) -> f64 {
    g.max_weight_ratio()
}

/// Minimum of a label-symmetric density over admissible partitions.
pub fn cut_density(
    g: &WeightedGraph,
    q: usize,
    functional: Functional,
    balance: &Balance,
    guards: &Guards,
) -> Result<Optimum> {
    balance.validate(q)?;
    let tol = a_tolerance(g);
    let sorted_a = match balance {
        Balance::A { a } => {
            let mut s = a.clone();
            s.sort_by(f64::total_cmp);
            s
        }
        _ => Vec::new(),
    };
    let what = match functional {
        Functional::F => "minimum cut density",
        Functional::Mu => "minimum weighted cut density",
    };
    let best = search(
        g,
        q,
        Labeling::Canonical,
        guards,
        what,
        |m| balance.admits_unlabeled(m, &sorted_a, tol),
        |leaf| pair_sum(leaf, functional),
    )?;
    let partition = match balance {
        Balance::A { a } => match_to_distribution(g, best.labels, q, a),
        _ => Partition::from_labels_unchecked(best.labels, q),
    };
    Ok(Optimum {
        value: best.value,
        partition,
        feasible_count: best.feasible_count,
    })
}

/// Relabel so the cluster with the k-th smallest mass gets the label of the
/// k-th smallest target weight.
fn match_to_distribution(g: &WeightedGraph, labels: Vec<usize>, q: usize, a: &[f64]) -> Partition {
    let p = Partition::from_labels_unchecked(labels, q);
    let masses = p.masses(g);
    let mut by_mass: Vec<usize> = (0..q).collect();
    by_mass.sort_by(|&x, &y| masses[x].total_cmp(&masses[y]).then(x.cmp(&y)));
    let mut by_target: Vec<usize> = (0..q).collect();
    by_target.sort_by(|&x, &y| a[x].total_cmp(&a[y]).then(x.cmp(&y)));
    let mut map = vec![0; q];
    for (&from, &to) in by_mass.iter().zip(&by_target) {
        map[from] = to;
    }
    Partition::from_labels_unchecked(p.labels().iter().map(|&l| map[l]).collect(), q)
}

/// `f_q`, `f_q^c` or `f_q^a` depending on `balance`.
pub fn min_cut_density(g: &WeightedGraph, q: usize, balance: &Balance) -> Result<Optimum> {
    cut_density(g, q, Functional::F, balance, &Guards::default())
}

/// `μ_q`, `μ_q^c` or `μ_q^a` depending on `balance`.
pub fn min_weighted_cut_density(g: &WeightedGraph, q: usize, balance: &Balance) -> Result<Optimum> {
    cut_density(g, q, Functional::Mu, balance, &Guards::default())
}

fn energy(leaf: &Leaf, j: &Matrix, h: &[f64]) -> f64 {
    let q = leaf.masses.len();
    let mut e = 0.0;
    for i in 0..q {
        e += leaf.masses[i] * h[i];
        for k in 0..q {
            e += leaf.cut[i * q + k] * j[(i, k)];
        }
    }
    e
}

/// `Ê_q(G, J, h) = -max_P (Σ_i α_i(G/P) h_i + Σ_ij α_i α_j β_ij(G/P) J_ij)`
/// over all labeled q-partitions.
pub fn ground_state_energy_guarded(
    g: &WeightedGraph,
    q: usize,
    spec: &EnergySpec,
    guards: &Guards,
) -> Result<Optimum> {
    spec.validate(q)?;
    let best = search(
        g,
        q,
        Labeling::Labeled,
        guards,
        "ground state energy",
        |_| true,
        |leaf| -energy(leaf, &spec.j, &spec.h),
    )?;
    Ok(Optimum {
        value: best.value,
        partition: Partition::from_labels_unchecked(best.labels, q),
        feasible_count: best.feasible_count,
    })
}

pub fn ground_state_energy(g: &WeightedGraph, q: usize, spec: &EnergySpec) -> Result<Optimum> {
    ground_state_energy_guarded(g, q, spec, &Guards::default())
}

/// `Ê_q^a(G, J)`: the ground state restricted to labelings whose cluster
/// `i` carries `a_i` of the weight up to `α_max/α_G`.
pub fn microcanonical_energy_guarded(
    g: &WeightedGraph,
    q: usize,
    j: &Matrix,
    a: &[f64],
    guards: &Guards,
) -> Result<Optimum> {
    let spec = EnergySpec {
        j: j.clone(),
        h: vec![0.0; q],
    };
    spec.validate(q)?;
    validate_distribution(a, q)?;
    let balance = Balance::A { a: a.to_vec() };
    let tol = a_tolerance(g);
    let best = search(
        g,
        q,
        Labeling::Labeled,
        guards,
        "microcanonical energy",
        |m| balance.admits_labeled(m, tol),
        |leaf| -energy(leaf, j, &spec.h),
    )?;
    Ok(Optimum {
        value: best.value,
        partition: Partition::from_labels_unchecked(best.labels, q),
        feasible_count: best.feasible_count,
    })
}

pub fn microcanonical_energy(
    g: &WeightedGraph,
    q: usize,
    j: &Matrix,
    a: &[f64],
) -> Result<Optimum> {
    microcanonical_energy_guarded(g, q, j, a, &Guards::default())
}

/// `(q-1) r + C(q-1, 2) r²` with `r = α_max/α_G`, an upper bound on `f_q`.
pub fn fq_upper_bound(g: &WeightedGraph, q: usize) -> f64 {
    let r = g.max_weight_ratio();
    let m = q.saturating_sub(1) as f64;
    m * r + m * (m - 1.0) / 2.0 * r * r
}

/// A complete graph on `n − 1` vertices plus one pendant vertex joined to
/// vertex 1 by a single edge. Vertex 0 is the pendant.
pub fn pendant_clique(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::input(format!(
            "pendant clique needs n >= 3, got {n}"
        )));
    }
    let mut edges = vec![(0, 1)];
    for i in 1..n {
        for j in (i + 1)..n {
            edges.push((i, j));
        }
    }
    WeightedGraph::from_edges(n, &edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendantRow {
    pub n: usize,
    /// `μ_2` of the pendant clique.
    pub mu_graph: f64,
    /// `μ_2` of its clique part, which is what almost every sample sees.
    pub mu_clique: f64,
}

/// `μ_2` along the pendant-clique family: it falls like `1/n` on the whole
/// graph but stays at 1 on the clique, so no sample size can estimate it.
pub fn pendant_clique_demo(ns: &[usize], guards: &Guards) -> Result<Vec<PendantRow>> {
    ns.iter()
        .map(|&n| {
            let g = pendant_clique(n)?;
            let clique = g.induced(&(1..n).collect::<Vec<_>>())?;
            Ok(PendantRow {
                n,
                mu_graph: cut_density(&g, 2, Functional::Mu, &Balance::Unrestricted, guards)?.value,
                mu_clique: cut_density(&clique, 2, Functional::Mu, &Balance::Unrestricted, guards)?
                    .value,
            })
        })
        .collect()
}
