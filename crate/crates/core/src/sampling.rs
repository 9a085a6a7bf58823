//! The random graphs `ξ(k, G)` and `ξ(k, W)` and the empirical testability
//! experiment built on them.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densities::{cut_density, Balance, Functional};
use crate::error::{Error, Result};
use crate::graph::{StepfunctionGraphon, WeightedGraph};
use crate::guards::Guards;
use crate::homomorphism::{density, DensityKind, SimpleGraph};
use crate::rng::SeededRng;

/// Draw `k` vertices with probabilities `α_i/α_G` (with replacement), then
/// join positions `a < b` with probability `β_{Φ(a)Φ(b)}`.
pub fn sample_graph(g: &WeightedGraph, k: usize, rng: &mut SeededRng) -> SimpleGraph {
    let mut cdf = g.normalized_alpha();
    for i in 1..cdf.len() {
        cdf[i] += cdf[i - 1];
    }
    let last = cdf.len() - 1;
    let phi: Vec<usize> = (0..k)
        .map(|_| {
            let u: f64 = rng.random();
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect();
    connect(k, rng, |a, b| g.edge(phi[a], phi[b]))
}

/// `k` uniform points `X_i`, positions joined with probability `W(X_a, X_b)`.
pub fn sample_graphon(
    w: &StepfunctionGraphon,
    k: usize,
    rng: &mut SeededRng,
) -> Result<SimpleGraph> {
    let (lo, hi) = (w.min_value(), w.max_value());
    if lo < 0.0 || hi > 1.0 {
        return Err(Error::Domain(format!(
            "graphon values must lie in [0,1] to be sampled, found range [{lo}, {hi}]"
        )));
    }
    let steps: Vec<usize> = (0..k).map(|_| w.step_of(rng.random())).collect();
    Ok(connect(k, rng, |a, b| w.values()[(steps[a], steps[b])]))
}

fn connect(k: usize, rng: &mut SeededRng, p: impl Fn(usize, usize) -> f64) -> SimpleGraph {
    let mut edges = Vec::new();
    for a in 0..k {
        for b in (a + 1)..k {
            if rng.random::<f64>() < p(a, b) {
                edges.push((a, b));
            }
        }
    }
    SimpleGraph::new(k, edges).expect("sampled edges are simple")
}

/// A graph parameter evaluated exactly on both the host and its samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parameter", rename_all = "snake_case")]
pub enum Parameter {
    /// `f_q`, `μ_q` and their balanced variants.
    CutDensity {
        q: usize,
        functional: Functional,
        balance: Balance,
    },
    /// `t`, `t_inj` or `t_ind` of a fixed pattern.
    Density {
        kind: DensityKind,
        pattern: SimpleGraph,
    },
}

impl Parameter {
    pub fn evaluate(&self, g: &WeightedGraph, guards: &Guards) -> Result<f64> {
        match self {
            Parameter::CutDensity {
                q,
                functional,
                balance,
            } => cut_density(g, *q, *functional, balance, guards).map(|o| o.value),
            Parameter::Density { kind, pattern } => density(*kind, pattern, g, guards),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Parameter::CutDensity {
                q,
                functional,
                balance,
            } => {
                let base = match functional {
                    Functional::F => format!("f{q}"),
                    Functional::Mu => format!("mu{q}"),
                };
                match balance {
                    Balance::Unrestricted => base,
                    Balance::C { c } => format!("{base}^c({c})"),
                    Balance::A { a } => format!("{base}^a({a:?})"),
                }
            }
            Parameter::Density { kind, pattern } => format!(
                "{kind:?}(k={}, {} edges)",
                pattern.k(),
                pattern.edge_count()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repetition {
    pub rep: u64,
    pub f_sample: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationSummary {
    pub mean: f64,
    pub max: f64,
    pub q50: f64,
    pub q90: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestabilityReport {
    pub f_full: f64,
    pub k: usize,
    pub reps: Vec<Repetition>,
    pub summary: DeviationSummary,
}

/// Nearest-rank quantile of sorted data.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

pub fn summarize(values: &[f64]) -> DeviationSummary {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    DeviationSummary {
        mean: values.iter().sum::<f64>() / values.len() as f64,
        max: *sorted.last().unwrap(),
        q50: nearest_rank(&sorted, 0.5),
        q90: nearest_rank(&sorted, 0.9),
        q95: nearest_rank(&sorted, 0.95),
    }
}

/// Empirical law of `|f(G) − f(ξ(k,G))|` over `reps` samples. Repetition
/// `r` samples from stream `r` of `rng`'s seed; samples are evaluated as
/// unit-weight loopless graphs.
pub fn testability_experiment(
    g: &WeightedGraph,
    k: usize,
    parameter: &Parameter,
    reps: usize,
    rng: &SeededRng,
    guards: &Guards,
) -> Result<TestabilityReport> {
    if k == 0 || reps == 0 {
        return Err(Error::input(
            "testability experiment needs k >= 1 and reps >= 1",
        ));
    }
    let f_full = parameter.evaluate(g, guards)?;
    let rows: Vec<Repetition> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut local = rng.stream(rep);
            let sample = sample_graph(g, k, &mut local);
            let f_sample = parameter.evaluate(&sample.to_weighted(), guards)?;
            Ok(Repetition {
                rep,
                f_sample,
                deviation: (f_full - f_sample).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let devs: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
    Ok(TestabilityReport {
        f_full,
        k,
        summary: summarize(&devs),
        reps: rows,
    })
}
