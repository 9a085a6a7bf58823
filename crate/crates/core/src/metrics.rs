//! Cut-norm, permutation cut distance, `d₁` and the Hausdorff distance of
//! quotient sets.
//!
//! The cut-norm of a stepfunction is attained by sets that are unions of
//! whole steps: the objective is linear in how much of each step a set
//! contains, so moving to a vertex of `[0,1]^m` never loses. With steps of
//! widths `w` and values `W`,
//!
//! ```text
//! ‖W‖_□ = max_{S,T ⊆ [m]} | Σ_{i∈S, j∈T} w_i w_j W_ij |
//! ```
//!
//! and for a fixed `S` the best `T` collects the steps whose weighted column
//! sum has the winning sign.

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densities::Balance;
use crate::enumerate::{Enumerator, Labeling};
use crate::error::{Error, Result};
use crate::graph::{stepfunction, QuotientGraph, StepfunctionGraphon, WeightedGraph};
use crate::guards::Guards;
use crate::linalg::Matrix;
use crate::rng::SeededRng;

pub const DEFAULT_RESTARTS: usize = 32;

/// A cut-norm value and sets `S`, `T` (step indices) attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutNorm {
    pub value: f64,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

/// Steps with widths folded into the values: `a_ij = w_i w_j W_ij`.
fn weighted_cells(w: &StepfunctionGraphon) -> Matrix {
    let widths = w.widths();
    let m = w.steps();
    Matrix::from_fn(m, m, |i, j| widths[i] * widths[j] * w.values()[(i, j)])
}

/// Best `T` for the column sums `c`: returns (value, chosen steps).
fn best_response(c: &[f64]) -> (f64, bool) {
    let (mut pos, mut neg) = (0.0, 0.0);
    for &x in c {
        if x > 0.0 {
            pos += x;
        } else {
            neg -= x;
        }
    }
    if pos >= neg {
        (pos, true)
    } else {
        (neg, false)
    }
}

fn sign_set(c: &[f64], positive: bool) -> Vec<usize> {
    c.iter()
        .enumerate()
        .filter(|(_, &x)| if positive { x > 0.0 } else { x < 0.0 })
        .map(|(j, _)| j)
        .collect()
}

/// Depth-first search over `S`, carrying the column sums of the rows taken
/// so far. Returns the best value and the `S` mask reaching it first.
fn cutnorm_search(a: &Matrix, prefix_bits: usize, prefix: u64) -> (f64, u64) {
    let m = a.rows();
    let mut sums = vec![vec![0.0; m]; m + 1];
    for i in 0..prefix_bits {
        if prefix >> i & 1 == 1 {
            let (lo, hi) = sums.split_at_mut(i + 1);
            for (dst, (&s, &x)) in hi[0].iter_mut().zip(lo[i].iter().zip(a.row(i))) {
                *dst = s + x;
            }
        } else {
            let (lo, hi) = sums.split_at_mut(i + 1);
            hi[0].copy_from_slice(&lo[i]);
        }
    }
    let mut best = (f64::NEG_INFINITY, 0u64);
    fn go(a: &Matrix, depth: usize, mask: u64, sums: &mut [Vec<f64>], best: &mut (f64, u64)) {
        let m = a.rows();
        if depth == m {
            let (v, _) = best_response(&sums[m]);
            if v > best.0 {
                *best = (v, mask);
            }
            return;
        }
        {
            let (lo, hi) = sums.split_at_mut(depth + 1);
            hi[0].copy_from_slice(&lo[depth]);
        }
        go(a, depth + 1, mask, sums, best);
        {
            let (lo, hi) = sums.split_at_mut(depth + 1);
            for (dst, (&s, &x)) in hi[0].iter_mut().zip(lo[depth].iter().zip(a.row(depth))) {
                *dst = s + x;
            }
        }
        go(a, depth + 1, mask | 1 << depth, sums, best);
    }
    go(a, prefix_bits, prefix, &mut sums, &mut best);
    best
}

/// Exact cut-norm by enumerating all `2^m` row sets.
pub fn cutnorm_exact_guarded(w: &StepfunctionGraphon, guards: &Guards) -> Result<CutNorm> {
    let m = w.steps();
    guards.check_cutnorm(m)?;
    let a = weighted_cells(w);
    let split = m.min(8);
    let parts: Vec<(f64, u64)> = (0..1u64 << split)
        .into_par_iter()
        .map(|prefix| cutnorm_search(&a, split, prefix))
        .collect();
    // first maximum in enumeration order
    let (value, mask) =
        parts.into_iter().fold(
            (f64::NEG_INFINITY, 0),
            |acc, p| if p.0 > acc.0 { p } else { acc },
        );
    let s: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
    let c = column_sums(&a, &s);
    let (_, positive) = best_response(&c);
    let t = sign_set(&c, positive);
    Ok(CutNorm { value, s, t })
}

pub fn cutnorm_exact(w: &StepfunctionGraphon) -> Result<CutNorm> {
    cutnorm_exact_guarded(w, &Guards::default())
}

fn column_sums(a: &Matrix, s: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; a.cols()];
    for &i in s {
        c.iter_mut().zip(a.row(i)).for_each(|(x, &y)| *x += y);
    }
    c
}

/// Local search for `σ Σ_{S×T} a` with a fixed sign `σ`, alternating the
/// best `T` for `S` and the best `S` for `T` until neither improves.
fn alternate(
    a: &Matrix,
    at: &Matrix,
    mut s: Vec<usize>,
    positive: bool,
) -> (f64, Vec<usize>, Vec<usize>) {
    let mut value = f64::NEG_INFINITY;
    let mut t;
    loop {
        let c = column_sums(a, &s);
        t = sign_set(&c, positive);
        let r = column_sums(at, &t);
        let s_next = sign_set(&r, positive);
        let v: f64 = s_next.iter().map(|&i| r[i]).sum::<f64>().abs();
        if v <= value + 1e-15 * value.abs().max(1.0) {
            break;
        }
        value = v;
        s = s_next;
    }
    let c = column_sums(a, &s);
    t = sign_set(&c, positive);
    let v = t.iter().map(|&j| c[j]).sum::<f64>().abs();
    (v, s, t)
}

/// Lower bound on the cut-norm from alternating maximization with random
/// restarts. Restart `r` draws its start from stream `r` of the seed; two
/// deterministic starts (all steps, each sign) come first.
pub fn cutnorm_heuristic(w: &StepfunctionGraphon, restarts: usize, rng: &SeededRng) -> CutNorm {
    let a = weighted_cells(w);
    let at = a.transpose();
    let m = a.rows();
    let all: Vec<usize> = (0..m).collect();
    let mut starts: Vec<Vec<usize>> = vec![all.clone(), all];
    for r in 0..restarts {
        let mut local = rng.stream(r as u64);
        starts.push((0..m).filter(|_| local.random::<bool>()).collect());
    }
    let (a, at) = (&a, &at);
    let results: Vec<(f64, Vec<usize>, Vec<usize>)> = starts
        .into_par_iter()
        .enumerate()
        .flat_map_iter(|(k, s)| {
            let signs: &[bool] = if k == 0 {
                &[true]
            } else if k == 1 {
                &[false]
            } else {
                &[true, false]
            };
            signs
                .iter()
                .map(|&p| alternate(a, at, s.clone(), p))
                .collect::<Vec<_>>()
        })
        .collect();
    let (value, s, t) = results
        .into_iter()
        .fold((0.0, Vec::new(), Vec::new()), |acc, r| {
            if r.0 > acc.0 {
                r
            } else {
                acc
            }
        });
    CutNorm { value, s, t }
}

/// Upper bound on the cut distance `δ_□(W_{G1}, W_{G2})`: the least cut-norm
/// of `W_{G1} - W_{G2^π}` over relabelings `π` of `G2` that keep each
/// interval in place, i.e. map every vertex onto one of equal normalized
/// weight.
pub fn cut_distance_perm_guarded(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    guards: &Guards,
) -> Result<f64> {
    let n = g1.n();
    if g2.n() != n {
        return Err(Error::input(format!(
            "graphs have {} and {} vertices",
            n,
            g2.n()
        )));
    }
    guards.check_perm(n)?;
    guards.check_cutnorm(n)?;
    let a1 = g1.normalized_alpha();
    let a2 = g2.normalized_alpha();
    let mut s1 = a1.clone();
    let mut s2 = a2.clone();
    s1.sort_by(f64::total_cmp);
    s2.sort_by(f64::total_cmp);
    if s1.iter().zip(&s2).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(Error::input(
            "graphs must have the same multiset of normalized vertex weights",
        ));
    }
    let w1 = stepfunction(g1);
    let widths = w1.widths();
    let best = (0..n)
        .permutations(n)
        .par_bridge()
        .filter(|p| {
            p.iter()
                .enumerate()
                .all(|(i, &pi)| (a1[i] - a2[pi]).abs() <= 1e-12)
        })
        .map(|p| {
            let values = Matrix::from_fn(n, n, |i, j| g1.edge(i, j) - g2.edge(p[i], p[j]));
            let diff =
                StepfunctionGraphon::from_widths(&widths, values).expect("widths of a valid graph");
            cutnorm_exact_guarded(&diff, &Guards::off())
                .map(|c| c.value)
                .unwrap_or(f64::INFINITY)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

pub fn cut_distance_perm(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<f64> {
    cut_distance_perm_guarded(g1, g2, &Guards::default())
}

/// `Σ_ij |α_i α_j β_ij − α'_i α'_j β'_ij| + Σ_i |α_i − α'_i|`.
pub fn d1_distance(h1: &QuotientGraph, h2: &QuotientGraph) -> Result<f64> {
    if h1.q != h2.q {
        return Err(Error::input(format!(
            "quotients have q = {} and q = {}",
            h1.q, h2.q
        )));
    }
    Ok(d1_unchecked(h1, h2))
}

fn d1_unchecked(h1: &QuotientGraph, h2: &QuotientGraph) -> f64 {
    let q = h1.q;
    let mut d = 0.0;
    for i in 0..q {
        for j in 0..q {
            d += (h1.mass(i, j) - h2.mass(i, j)).abs();
        }
        d += (h1.vweights[i] - h2.vweights[i]).abs();
    }
    d
}

/// All q-quotients of a graph over admissible labeled partitions
/// (duplicates kept).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientSet {
    pub q: usize,
    pub items: Vec<QuotientGraph>,
}

impl QuotientSet {
    pub fn new(q: usize, items: Vec<QuotientGraph>) -> Result<Self> {
        if let Some(h) = items.iter().find(|h| h.q != q) {
            return Err(Error::input(format!(
                "quotient with q = {} in a set with q = {q}",
                h.q
            )));
        }
        Ok(Self { q, items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn directed_hausdorff(a: &QuotientSet, b: &QuotientSet) -> f64 {
    a.items
        .par_iter()
        .map(|h| {
            b.items
                .iter()
                .map(|k| d1_unchecked(h, k))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// `max(sup_A inf_B d₁, sup_B inf_A d₁)`.
pub fn hausdorff_distance(a: &QuotientSet, b: &QuotientSet) -> Result<f64> {
    if a.q != b.q {
        return Err(Error::input(format!(
            "quotient sets have q = {} and q = {}",
            a.q, b.q
        )));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::input(
            "Hausdorff distance needs two non-empty quotient sets",
        ));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

pub fn quotient_set_guarded(
    g: &WeightedGraph,
    q: usize,
    balance: &Balance,
    guards: &Guards,
) -> Result<QuotientSet> {
    balance.validate(q)?;
    let e = Enumerator::new(g, q, Labeling::Labeled)?;
    guards.check_assignments("quotient set", e.assignment_count())?;
    let tol = g.max_weight_ratio();
    let mut items = Vec::new();
    e.walk(&[], &mut |leaf| {
        if !balance.admits_labeled(leaf.masses, tol) {
            return;
        }
        let m = leaf.masses;
        let eweights = Matrix::from_fn(q, q, |i, j| leaf.cut[i * q + j] / (m[i] * m[j]));
        let mut vweights = m.to_vec();
        let drift = vweights.iter().sum::<f64>() - 1.0;
        if let Some(w) = vweights.iter_mut().max_by(|x, y| x.total_cmp(y)) {
            *w -= drift;
        }
        items.push(QuotientGraph {
            q,
            vweights,
            eweights,
        });
    });
    if items.is_empty() {
        return Err(Error::infeasible(format!(
            "quotient set: no admissible {q}-partition exists (empty feasible set)"
        )));
    }
    Ok(QuotientSet { q, items })
}

/// `Ŝ_q(G)` or its balanced restriction.
pub fn quotient_set(g: &WeightedGraph, q: usize, balance: &Balance) -> Result<QuotientSet> {
    quotient_set_guarded(g, q, balance, &Guards::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{quotient, Partition};
    use crate::linalg::symmetric_eigen;
    use proptest::prelude::*;

    fn step(widths: &[f64], rows: &[Vec<f64>]) -> StepfunctionGraphon {
        StepfunctionGraphon::from_widths(widths, Matrix::from_rows(rows).unwrap()).unwrap()
    }

    /// Enumerate every pair of step subsets.
    fn full_pair_oracle(w: &StepfunctionGraphon) -> f64 {
        let a = weighted_cells(w);
        let m = a.rows();
        let mut best: f64 = 0.0;
        for s in 0u32..1 << m {
            for t in 0u32..1 << m {
                let mut sum = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        if s >> i & 1 == 1 && t >> j & 1 == 1 {
                            sum += a[(i, j)];
                        }
                    }
                }
                best = best.max(sum.abs());
            }
        }
        best
    }

    fn cells_sum(w: &StepfunctionGraphon, s: &[usize], t: &[usize]) -> f64 {
        let a = weighted_cells(w);
        s.iter()
            .flat_map(|&i| t.iter().map(move |&j| (i, j)))
            .map(|(i, j)| a[(i, j)])
            .sum()
    }

    #[test]
    fn trivial_cutnorms() {
        let z = StepfunctionGraphon::uniform(Matrix::zeros(3, 3)).unwrap();
        assert_eq!(cutnorm_exact(&z).unwrap().value, 0.0);
        assert_eq!(cutnorm_heuristic(&z, 4, &SeededRng::new(1, 0)).value, 0.0);
        let one = step(&[1.0], &[vec![-0.7]]);
        assert!((cutnorm_exact(&one).unwrap().value - 0.7).abs() < 1e-15);
    }

    #[test]
    fn checkerboard() {
        let w = StepfunctionGraphon::uniform(
            Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap(),
        )
        .unwrap();
        let r = cutnorm_exact(&w).unwrap();
        assert!((r.value - 0.25).abs() < 1e-15);
        assert!((full_pair_oracle(&w) - 0.25).abs() < 1e-15);
        assert!((cells_sum(&w, &r.s, &r.t).abs() - r.value).abs() < 1e-15);
    }

    #[test]
    fn heuristic_on_rank_one() {
        let u = [0.3, 0.9, 0.5, 0.7, 0.2];
        let w = StepfunctionGraphon::from_widths(
            &[1.0, 2.0, 1.0, 3.0, 1.0],
            Matrix::from_fn(5, 5, |i, j| u[i] * u[j]),
        )
        .unwrap();
        let total: f64 = weighted_cells(&w).as_slice().iter().sum();
        let h = cutnorm_heuristic(&w, 8, &SeededRng::new(3, 0));
        assert!((h.value - total).abs() < 1e-14);
        assert_eq!(h.s, vec![0, 1, 2, 3, 4]);
        assert_eq!(h.t, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn guard_suggests_heuristic() {
        let w = StepfunctionGraphon::uniform(Matrix::zeros(23, 23)).unwrap();
        match cutnorm_exact(&w).unwrap_err() {
            Error::Resource { guard, detail, .. } => {
                assert_eq!(guard, "cutnorm_max_steps");
                assert!(detail.contains("heuristic"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    fn all_perm_oracle(g1: &WeightedGraph, g2: &WeightedGraph) -> f64 {
        let n = g1.n();
        let mut best = f64::INFINITY;
        for p in (0..n).permutations(n) {
            let values = Matrix::from_fn(n, n, |i, j| g1.edge(i, j) - g2.edge(p[i], p[j]));
            let w = StepfunctionGraphon::uniform(values).unwrap();
            best = best.min(full_pair_oracle(&w));
        }
        best
    }

    #[test]
    fn perm_distance() {
        let c4 = WeightedGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let k4 = WeightedGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap();
        assert_eq!(cut_distance_perm(&c4, &c4).unwrap(), 0.0);
        let relabeled = WeightedGraph::from_edges(4, &[(0, 2), (2, 1), (1, 3), (3, 0)]).unwrap();
        assert_eq!(cut_distance_perm(&c4, &relabeled).unwrap(), 0.0);
        let d = cut_distance_perm(&c4, &k4).unwrap();
        assert!((d - all_perm_oracle(&c4, &k4)).abs() < 1e-15);
        // the two missing diagonals: 4 ordered pairs of 16
        assert!((d - 0.25).abs() < 1e-15);
        let p3 = WeightedGraph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(cut_distance_perm(&c4, &p3), Err(Error::Input(_))));
    }

    #[test]
    fn d1_examples() {
        let h1 = QuotientGraph::new(vec![1.0], Matrix::from_rows(&[vec![0.3]]).unwrap()).unwrap();
        let h2 = QuotientGraph::new(vec![1.0], Matrix::from_rows(&[vec![0.8]]).unwrap()).unwrap();
        assert_eq!(d1_distance(&h1, &h1).unwrap(), 0.0);
        assert!((d1_distance(&h1, &h2).unwrap() - 0.5).abs() < 1e-15);
        let a = QuotientGraph::new(
            vec![0.25, 0.75],
            Matrix::from_rows(&[vec![0.5, 0.2], vec![0.2, 0.9]]).unwrap(),
        )
        .unwrap();
        let b = QuotientGraph::new(
            vec![0.6, 0.4],
            Matrix::from_rows(&[vec![0.1, 0.7], vec![0.7, 0.3]]).unwrap(),
        )
        .unwrap();
        // hand evaluation term by term
        let terms = [
            (0.25 * 0.25 * 0.5 - 0.6 * 0.6 * 0.1f64).abs(),
            2.0 * (0.25 * 0.75 * 0.2 - 0.6 * 0.4 * 0.7f64).abs(),
            (0.75 * 0.75 * 0.9 - 0.4 * 0.4 * 0.3f64).abs(),
            (0.25 - 0.6f64).abs(),
            (0.75 - 0.4f64).abs(),
        ];
        let expect: f64 = terms.iter().sum();
        assert!((d1_distance(&a, &b).unwrap() - expect).abs() < 1e-15);
        assert!((d1_distance(&b, &a).unwrap() - expect).abs() < 1e-15);
        assert!(d1_distance(&a, &h1).is_err());
    }

    #[test]
    fn quotient_set_examples() {
        let g3 = WeightedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = quotient_set(&g3, 1, &Balance::Unrestricted).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.items[0].vweights, vec![1.0]);
        assert!(matches!(
            quotient_set(&g3, 2, &Balance::C { c: 0.4 }),
            Err(Error::Infeasible(_))
        ));
        let g4 = WeightedGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let s = quotient_set(&g4, 2, &Balance::C { c: 0.5 }).unwrap();
        assert_eq!(s.len(), 6);
        // each item agrees with the direct quotient of its partition
        let direct = quotient(&g4, &Partition::new(vec![0, 0, 1, 1], 2).unwrap()).unwrap();
        assert!(s
            .items
            .iter()
            .any(|h| d1_distance(h, &direct).unwrap() < 1e-15));
        assert_eq!(hausdorff_distance(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_of_singletons_is_d1() {
        let a = QuotientGraph::new(
            vec![0.5, 0.5],
            Matrix::from_rows(&[vec![0.5, 0.2], vec![0.2, 0.9]]).unwrap(),
        )
        .unwrap();
        let b = QuotientGraph::new(
            vec![0.3, 0.7],
            Matrix::from_rows(&[vec![0.1, 0.7], vec![0.7, 0.3]]).unwrap(),
        )
        .unwrap();
        let sa = QuotientSet::new(2, vec![a.clone()]).unwrap();
        let sb = QuotientSet::new(2, vec![b.clone()]).unwrap();
        assert_eq!(
            hausdorff_distance(&sa, &sb).unwrap(),
            d1_distance(&a, &b).unwrap()
        );
        assert!(hausdorff_distance(&sa, &QuotientSet::new(2, vec![]).unwrap()).is_err());
    }

    fn arb_quotient(q: usize) -> impl Strategy<Value = QuotientGraph> {
        (
            prop::collection::vec(0.05f64..1.0, q),
            prop::collection::vec(0.0f64..=1.0, q * q),
        )
            .prop_map(move |(w, raw)| {
                let s: f64 = w.iter().sum();
                let mut v: Vec<f64> = w.iter().map(|x| x / s).collect();
                let drift = v.iter().sum::<f64>() - 1.0;
                v[0] -= drift;
                QuotientGraph::new(
                    v,
                    Matrix::from_fn(q, q, |i, j| raw[i.min(j) * q + i.max(j)]),
                )
                .unwrap()
            })
    }

    fn arb_set() -> impl Strategy<Value = QuotientSet> {
        prop::collection::vec(arb_quotient(2), 5)
            .prop_map(|items| QuotientSet::new(2, items).unwrap())
    }

    fn arb_step(max_m: usize) -> impl Strategy<Value = StepfunctionGraphon> {
        (1..=max_m).prop_flat_map(|m| {
            (
                prop::collection::vec(0.1f64..1.0, m),
                prop::collection::vec(-1.0f64..=1.0, m * m),
            )
                .prop_map(move |(w, v)| {
                    StepfunctionGraphon::from_widths(
                        &w,
                        Matrix::from_fn(m, m, |i, j| v[i.min(j) * m + i.max(j)]),
                    )
                    .unwrap()
                })
        })
    }

    /// `(1/n²) max_U |Σ_{i∈U, j∉U} w_ij|` by subset enumeration.
    fn max_cross_sum(w: &Matrix) -> f64 {
        let n = w.rows();
        let mut best: f64 = 0.0;
        for u in 0u32..1 << n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if u >> i & 1 == 1 && u >> j & 1 == 0 {
                        s += w[(i, j)];
                    }
                }
            }
            best = best.max(s.abs());
        }
        best / (n * n) as f64
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn exact_matches_pair_enumeration(w in arb_step(6)) {
            let r = cutnorm_exact(&w).unwrap();
            prop_assert!((r.value - full_pair_oracle(&w)).abs() < 1e-12);
            prop_assert!((cells_sum(&w, &r.s, &r.t).abs() - r.value).abs() < 1e-12);
            let h = cutnorm_heuristic(&w, 8, &SeededRng::new(9, 0));
            prop_assert!(h.value <= r.value + 1e-12);
            prop_assert!((cells_sum(&w, &h.s, &h.t).abs() - h.value).abs() < 1e-12);
        }

        #[test]
        fn cutnorm_is_a_norm(m in 1usize..7, raw in prop::collection::vec(-1.0f64..=1.0, 98), s in -3.0f64..3.0) {
            let a = Matrix::from_fn(m, m, |i, j| raw[i.min(j) * m + i.max(j)]);
            let b = Matrix::from_fn(m, m, |i, j| raw[49 + i.min(j) * m + i.max(j)]);
            let norm = |x: &Matrix| cutnorm_exact(&StepfunctionGraphon::uniform(x.clone()).unwrap()).unwrap().value;
            let sum = Matrix::from_fn(m, m, |i, j| a[(i, j)] + b[(i, j)]);
            prop_assert!(norm(&sum) <= norm(&a) + norm(&b) + 1e-12);
            prop_assert!((norm(&a.scale(s)) - s.abs() * norm(&a)).abs() < 1e-12);
        }

        #[test]
        fn factor_six_bound(n in 2usize..=12, bits in prop::collection::vec(any::<bool>(), 144)) {
            let w = Matrix::from_fn(n, n, |i, j| if bits[i.min(j) * 12 + i.max(j)] { 1.0 } else { -1.0 });
            let c = cutnorm_exact(&StepfunctionGraphon::uniform(w.clone()).unwrap()).unwrap().value;
            prop_assert!(c <= 6.0 * max_cross_sum(&w) + 1e-12);
        }

        #[test]
        fn spectral_domination(n in 2usize..=10, raw in prop::collection::vec(0.0f64..=1.0, 100)) {
            let beta = Matrix::from_fn(n, n, |i, j| raw[i.min(j) * 10 + i.max(j)]);
            let g = WeightedGraph::unit(beta.clone()).unwrap();
            let c = cutnorm_exact(&stepfunction(&g)).unwrap().value;
            let lam = symmetric_eigen(&beta).unwrap().spectral_norm();
            prop_assert!(c <= lam / n as f64 + 1e-9);
        }

        #[test]
        fn hausdorff_is_a_metric(a in arb_set(), b in arb_set(), c in arb_set()) {
            let ab = hausdorff_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, hausdorff_distance(&b, &a).unwrap());
            let ac = hausdorff_distance(&a, &c).unwrap();
            let cb = hausdorff_distance(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
            // against an all-pairs table
            let table: Vec<Vec<f64>> = a.items.iter().map(|h| b.items.iter().map(|k| d1_distance(h, k).unwrap()).collect()).collect();
            let fwd = table.iter().map(|r| r.iter().cloned().fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
            let bwd = (0..b.len()).map(|j| table.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
            prop_assert_eq!(ab, fwd.max(bwd));
        }
    }

    #[test]
    fn closed_form_inner_step_matches_four_way_enumeration() {
        // for every S the sign rule is optimal over all T
        let w = step(
            &[0.2, 0.3, 0.1, 0.4],
            &[
                vec![0.5, -0.2, 0.9, -0.7],
                vec![-0.2, 0.1, -0.4, 0.3],
                vec![0.9, -0.4, -0.6, 0.2],
                vec![-0.7, 0.3, 0.2, 0.8],
            ],
        );
        let a = weighted_cells(&w);
        for s in 0u32..16 {
            let set: Vec<usize> = (0..4).filter(|&i| s >> i & 1 == 1).collect();
            let (closed, _) = best_response(&column_sums(&a, &set));
            let brute = (0u32..16)
                .map(|t| {
                    let tset: Vec<usize> = (0..4).filter(|&j| t >> j & 1 == 1).collect();
                    cells_sum(&w, &set, &tset).abs()
                })
                .fold(0.0, f64::max);
            assert!((closed - brute).abs() < 1e-15);
        }
    }
}
