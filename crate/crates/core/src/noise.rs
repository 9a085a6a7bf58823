//! Wigner noise on blown-up matrices.
//!
//! A noisy graph `G_{A_n}` has unit vertex weights and edge weights
//! `A_n = B_n + W_n`, where `B_n` blows a `q × q` pattern up to `n` vertices
//! and `W_n` is a symmetric matrix of independent zero-mean entries bounded
//! by `K`. Every experiment draws `W_n` from stream `n` of the noise seed,
//! so a sequence is reproducible entry by entry.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densities::{cut_density, Balance, Functional};
use crate::error::{Error, Result};
use crate::graph::{
    blow_up, quotient, Partition, QuotientGraph, StepfunctionGraphon, WeightedGraph,
};
use crate::guards::Guards;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::metrics::{cutnorm_exact_guarded, cutnorm_heuristic, d1_distance, DEFAULT_RESTARTS};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseDistribution {
    /// Uniform on `[−K, K]`.
    Uniform,
    /// `±K` with probability ½ each.
    Rademacher,
    /// `N(0, σ²)` clamped to `[−K, K]`.
    TruncatedGaussian { sigma: f64 },
}

impl std::str::FromStr for NoiseDistribution {
    type Err = Error;

    /// `uniform`, `rademacher` or `gaussian:<sigma>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(Self::Uniform),
            "rademacher" => Ok(Self::Rademacher),
            other => {
                let sigma = other
                    .strip_prefix("gaussian:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::input(format!(
                            "unknown noise `{other}` (expected uniform, rademacher or gaussian:<sigma>)"
                        ))
                    })?;
                Ok(Self::TruncatedGaussian { sigma })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub distribution: NoiseDistribution,
    /// Uniform bound on the entries.
    #[serde(rename = "K")]
    pub k: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(distribution: NoiseDistribution, k: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            distribution,
            k,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k >= 0.0) || !self.k.is_finite() {
            return Err(Error::input(format!(
                "noise bound K = {} must be finite and nonnegative",
                self.k
            )));
        }
        if let NoiseDistribution::TruncatedGaussian { sigma } = self.distribution {
            if !(sigma > 0.0) || !sigma.is_finite() {
                return Err(Error::input(format!(
                    "gaussian sigma = {sigma} must be positive"
                )));
            }
        }
        Ok(())
    }

    /// The same distribution under another seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    fn draw(&self, rng: &mut SeededRng, gauss: Option<&Normal<f64>>) -> f64 {
        let k = self.k;
        match self.distribution {
            NoiseDistribution::Uniform => k * (2.0 * rng.random::<f64>() - 1.0),
            NoiseDistribution::Rademacher => {
                if rng.random::<bool>() {
                    k
                } else {
                    -k
                }
            }
            NoiseDistribution::TruncatedGaussian { .. } => gauss
                .expect("normal law built for gaussian noise")
                .sample(rng)
                .clamp(-k, k),
        }
    }
}

/// A symmetric `n × n` Wigner matrix, diagonal included, entries drawn in
/// row-major order over `i ≤ j` from stream `n` of `spec.seed`.
pub fn gen_wigner(n: usize, spec: &NoiseSpec) -> Result<Matrix> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed, n as u64);
    let gauss = match spec.distribution {
        NoiseDistribution::TruncatedGaussian { sigma } => {
            Some(Normal::new(0.0, sigma).map_err(|e| Error::input(e.to_string()))?)
        }
        _ => None,
    };
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = spec.draw(&mut rng, gauss.as_ref());
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisySequenceSpec {
    pub pattern: Matrix,
    /// Block proportions `r_i`, positive and summing to one.
    pub ratios: Vec<f64>,
    /// The sizes `n` the sequence is observed at.
    #[serde(default)]
    pub sizes: Vec<usize>,
    pub noise: NoiseSpec,
    /// Replace additive noise by independent 0/1 entries with the block
    /// probabilities.
    #[serde(default)]
    pub bernoulli: bool,
}

impl NoisySequenceSpec {
    pub fn q(&self) -> usize {
        self.ratios.len()
    }

    /// Every violated requirement, not just the first.
    pub fn diagnose(&self) -> Vec<String> {
        let mut out = Vec::new();
        let q = self.ratios.len();
        if q == 0 {
            out.push("ratios must name at least one block".to_string());
        }
        if self.pattern.rows() != q || self.pattern.cols() != q {
            out.push(format!(
                "pattern is {}×{} but there are {q} ratios",
                self.pattern.rows(),
                self.pattern.cols()
            ));
        } else {
            let (d, i, j) = self.pattern.max_asymmetry();
            if d > 1e-12 {
                out.push(format!(
                    "pattern is not symmetric: |p[{i}][{j}] - p[{j}][{i}]| = {d:e}"
                ));
            }
        }
        if let Some(&p) = self
            .pattern
            .as_slice()
            .iter()
            .find(|&&p| !(p > 0.0 && p < 1.0))
        {
            out.push(format!("pattern entry {p} outside the open interval (0,1)"));
        }
        if let Some(&r) = self.ratios.iter().find(|&&r| !(r > 0.0) || !r.is_finite()) {
            out.push(format!("ratio {r} must be positive"));
        }
        let total: f64 = self.ratios.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            out.push(format!("ratios sum to {total}, expected 1"));
        }
        if let Err(e) = self.noise.validate() {
            out.push(e.to_string());
        }
        if !self.bernoulli && !self.pattern.as_slice().is_empty() {
            let bound = self.noise_bound();
            if self.noise.k > bound {
                out.push(format!(
                    "noise bound K = {} exceeds min(min p, 1 - max p) = {bound}",
                    self.noise.k
                ));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let diags = self.diagnose();
        if diags.is_empty() {
            return Ok(());
        }
        let bound_violated = diags.iter().any(|d| d.starts_with("noise bound"));
        let msg = diags.join("; ");
        if bound_violated && diags.len() == 1 {
            Err(Error::Constraint(msg))
        } else {
            Err(Error::input(msg))
        }
    }

    /// `min{min p_ij, 1 − max p_ij}`, the largest admissible `K`.
    pub fn noise_bound(&self) -> f64 {
        let p = self.pattern.as_slice();
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo.min(1.0 - hi)
    }

    /// Block sizes for `n` vertices by largest-remainder rounding of
    /// `r_i · n`; ties in the remainder go to the lower block index.
    pub fn block_sizes(&self, n: usize) -> Result<Vec<usize>> {
        block_sizes(&self.ratios, n)
    }
}

pub fn block_sizes(ratios: &[f64], n: usize) -> Result<Vec<usize>> {
    let total: f64 = ratios.iter().sum();
    let exact: Vec<f64> = ratios.iter().map(|r| r / total * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let short = n - sizes.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(short) {
        sizes[i] += 1;
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::input(format!("n = {n} leaves block {i} empty")));
    }
    Ok(sizes)
}

/// `G_{A_n}` for the spec. Vertices are ordered block by block.
pub fn noisy_graph(seq: &NoisySequenceSpec, n: usize) -> Result<WeightedGraph> {
    seq.validate()?;
    let sizes = seq.block_sizes(n)?;
    let base = blow_up(&seq.pattern, &sizes)?;
    let beta = if seq.bernoulli {
        let mut rng = SeededRng::new(seq.noise.seed, n as u64);
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = if rng.random::<f64>() < base.edge(i, j) {
                    1.0
                } else {
                    0.0
                };
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        a
    } else {
        let w = gen_wigner(n, &seq.noise)?;
        Matrix::from_fn(n, n, |i, j| base.edge(i, j) + w[(i, j)])
    };
    if let Some(&x) = beta.as_slice().iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::Constraint(format!(
            "noisy edge weight {x} left [0,1]"
        )));
    }
    WeightedGraph::unit(beta)
}

/// The block partition of [`noisy_graph`] at size `n`.
pub fn planted_partition(seq: &NoisySequenceSpec, n: usize) -> Result<Partition> {
    crate::graph::block_partition(&seq.block_sizes(n)?)
}

/// The almost sure limit `H`: vertex weights `r`, edge weights `p`.
pub fn limit_factor_graph(seq: &NoisySequenceSpec) -> Result<QuotientGraph> {
    seq.validate()?;
    let total: f64 = seq.ratios.iter().sum();
    QuotientGraph::new(
        seq.ratios.iter().map(|r| r / total).collect(),
        seq.pattern.clone(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    pub seed: usize,
    /// Whether the cut-norm is exact or a lower bound from the heuristic.
    pub exact: bool,
    pub cutnorm: f64,
    /// `‖W‖₂ / n`, an upper bound on the cut-norm.
    pub spectral_bound: f64,
}

/// Cut-norm of the noise stepfunction `W_n / K` for every `(n, seed)`.
/// Seed `s` draws from `spec.with_seed(derive_seed(spec.seed, s))`.
/// Rows come back in `(n, seed)` order.
pub fn cutnorm_decay_experiment(
    spec: &NoiseSpec,
    ns: &[usize],
    seeds: usize,
    guards: &Guards,
) -> Result<Vec<DecayRow>> {
    spec.validate()?;
    if let Some(&n) = ns.iter().find(|&&n| n == 0) {
        return Err(Error::input(format!(
            "matrix order n = {n} must be positive"
        )));
    }
    for &n in ns {
        guards.check_eigen(n)?;
    }
    let tasks: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| (0..seeds).map(move |s| (n, s)))
        .collect();
    tasks
        .par_iter()
        .map(|&(n, s)| {
            let local = spec.with_seed(SeededRng::derive_seed(spec.seed, s as u64));
            let raw = gen_wigner(n, &local)?;
            let w = if spec.k > 0.0 {
                raw.scale(1.0 / spec.k)
            } else {
                raw
            };
            let spectral_bound = symmetric_eigen(&w)?.spectral_norm() / n as f64;
            let step = StepfunctionGraphon::uniform(w)?;
            let (exact, cut) = match guards.check_cutnorm(n) {
                Ok(()) => (true, cutnorm_exact_guarded(&step, guards)?),
                Err(_) => (
                    false,
                    cutnorm_heuristic(&step, DEFAULT_RESTARTS, &SeededRng::new(local.seed, 1)),
                ),
            };
            Ok(DecayRow {
                n,
                seed: s,
                exact,
                cutnorm: cut.value,
                spectral_bound,
            })
        })
        .collect()
}

/// Median of `f` over the rows with each `n`, in the order of `ns`.
pub fn median_by_n(rows: &[DecayRow], ns: &[usize], f: impl Fn(&DecayRow) -> f64) -> Vec<f64> {
    ns.iter()
        .map(|&n| {
            let mut v: Vec<f64> = rows.iter().filter(|r| r.n == n).map(&f).collect();
            v.sort_by(f64::total_cmp);
            median(&v)
        })
        .collect()
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m == 0 {
        return f64::NAN;
    }
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralRow {
    pub n: usize,
    pub block_sizes: Vec<usize>,
    /// The `q + 1` eigenvalues of largest absolute value, in that order.
    pub top: Vec<f64>,
    /// `|λ_q| / n`.
    pub gap_ratio: f64,
    /// `|λ_{q+1}| / √n`.
    pub bulk_ratio: f64,
    /// q-variance of the top-`q` eigenvector rows over the planted blocks.
    pub s_q2: f64,
}

/// `S_q²(X) = Σ_i Σ_{j∈V_i} ‖x^j − x̄^i‖²` for the rows `x^j` of `x`.
pub fn q_variance(x: &Matrix, labels: &[usize], q: usize) -> f64 {
    let d = x.cols();
    let mut sums = vec![vec![0.0; d]; q];
    let mut counts = vec![0usize; q];
    for (j, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        sums[l].iter_mut().zip(x.row(j)).for_each(|(s, v)| *s += v);
    }
    let mut total = 0.0;
    for (j, &l) in labels.iter().enumerate() {
        let c = counts[l] as f64;
        total += x
            .row(j)
            .iter()
            .zip(&sums[l])
            .map(|(v, s)| (v - s / c).powi(2))
            .sum::<f64>();
    }
    total
}

/// Eigen-structure of `A_n` at each size. Sizes are independent tasks.
pub fn spectral_experiment(
    seq: &NoisySequenceSpec,
    ns: &[usize],
    guards: &Guards,
) -> Result<Vec<SpectralRow>> {
    seq.validate()?;
    let q = seq.q();
    for &n in ns {
        guards.check_eigen(n)?;
        if n <= q {
            return Err(Error::input(format!("n = {n} must exceed q = {q}")));
        }
    }
    ns.par_iter()
        .map(|&n| {
            let g = noisy_graph(seq, n)?;
            let eig = symmetric_eigen(g.beta())?;
            let order = eig.order_by_magnitude();
            let top: Vec<f64> = order[..=q].iter().map(|&k| eig.values[k]).collect();
            let x = Matrix::from_fn(n, q, |i, c| eig.vectors[(i, order[c])]);
            let planted = planted_partition(seq, n)?;
            Ok(SpectralRow {
                n,
                block_sizes: seq.block_sizes(n)?,
                gap_ratio: top[q - 1].abs() / n as f64,
                bulk_ratio: top[q].abs() / (n as f64).sqrt(),
                s_q2: q_variance(&x, planted.labels(), q),
                top,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `d₁(G_{A_n}/P, H)` for the planted partition `P`.
    pub d1_to_limit: f64,
    /// `f_q(G_{A_n})`.
    pub f_q: f64,
    /// `f_q^a(G_{A_n})` with `a` the planted block proportions.
    pub f_q_planted: f64,
    /// Cut density of the planted partition.
    pub planted_cut: f64,
}

/// Densities and the distance to the limit graph along the sequence. The
/// exact densities enumerate all partitions, so `n` is limited by the
/// assignment guard.
pub fn density_convergence(
    seq: &NoisySequenceSpec,
    ns: &[usize],
    guards: &Guards,
) -> Result<Vec<ConvergenceRow>> {
    let h = limit_factor_graph(seq)?;
    let q = seq.q();
    ns.iter()
        .map(|&n| {
            let g = noisy_graph(seq, n)?;
            let planted = planted_partition(seq, n)?;
            let quot = quotient(&g, &planted)?;
            let sizes = seq.block_sizes(n)?;
            let a: Vec<f64> = sizes.iter().map(|&s| s as f64 / n as f64).collect();
            let f_q = cut_density(&g, q, Functional::F, &Balance::Unrestricted, guards)?.value;
            let f_q_planted = cut_density(&g, q, Functional::F, &Balance::A { a }, guards)?.value;
            let planted_cut = (0..q)
                .flat_map(|i| ((i + 1)..q).map(move |k| (i, k)))
                .map(|(i, k)| quot.mass(i, k))
                .sum();
            Ok(ConvergenceRow {
                n,
                d1_to_limit: d1_distance(&quot, &h)?,
                f_q,
                f_q_planted,
                planted_cut,
            })
        })
        .collect()
}
