//! Exhaustive partition search shared by the cut densities, ground-state
//! energies and quotient sets.
//!
//! Vertices are assigned in index order by depth-first search. In canonical
//! mode labels follow restricted growth (vertex `v` gets a label at most one
//! above the largest used so far), so each set partition is visited once; in
//! labeled mode every surjective labeling is visited. Either way leaves are
//! reached in lexicographic order of their label strings.
//!
//! The cluster volumes and the normalized cluster cut matrix are carried down
//! the search, one copy per depth. A leaf's statistics are therefore computed
//! along a fixed path and do not depend on how the search was split.
//!
//! Graphs too large for plain enumeration but made of a few classes of twin
//! vertices (as blow-ups are) are searched over per-class cluster counts.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Partition, WeightedGraph};
use crate::guards::Guards;

/// Values closer than this (relative to magnitude) count as ties; ties go to
/// the lexicographically smaller label string.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Labeling {
    /// Restricted growth strings: one visit per set partition.
    Canonical,
    /// All surjective labelings.
    Labeled,
}

/// Statistics of a complete assignment.
pub(crate) struct Leaf<'s> {
    pub labels: &'s [usize],
    /// `α_{V_i} / α_G`
    pub masses: &'s [f64],
    /// Row-major `q × q`, entry `(i,j)` is `e_G(V_i, V_j) / α_G²`.
    pub cut: &'s [f64],
}

#[derive(Debug, Clone)]
pub(crate) struct SearchOutcome {
    pub value: f64,
    pub labels: Vec<usize>,
    pub feasible_count: u64,
}

pub(crate) fn is_better(value: f64, labels: &[usize], best: &Option<SearchOutcome>) -> bool {
    match best {
        None => true,
        Some(b) => {
            let tol = TIE_TOL * b.value.abs().max(1.0);
            value < b.value - tol || (value <= b.value + tol && labels < b.labels.as_slice())
        }
    }
}

fn merge(
    acc: &mut Option<SearchOutcome>,
    feasible: &mut u64,
    part: Option<SearchOutcome>,
    part_feasible: u64,
) {
    *feasible += part_feasible;
    if let Some(p) = part {
        if is_better(p.value, &p.labels, acc) {
            *acc = Some(p);
        }
    }
}

pub(crate) struct Enumerator<'g> {
    g: &'g WeightedGraph,
    a: Vec<f64>,
    q: usize,
    mode: Labeling,
}

impl<'g> Enumerator<'g> {
    pub fn new(g: &'g WeightedGraph, q: usize, mode: Labeling) -> Result<Self> {
        if q == 0 || q > g.n() {
            return Err(Error::input(format!(
                "cluster count q = {q} must satisfy 1 <= q <= n = {}",
                g.n()
            )));
        }
        Ok(Self {
            g,
            a: g.normalized_alpha(),
            q,
            mode,
        })
    }

    /// `q^n`, the labeled assignment count the guard is phrased in.
    pub fn assignment_count(&self) -> f64 {
        (self.q as f64).powi(self.g.n() as i32)
    }

    /// Allowed labels for the next vertex given the highest label used so
    /// far (`None` before any) and how many vertices remain after it.
    fn label_range(
        &self,
        used_max: Option<usize>,
        remaining_after: usize,
    ) -> std::ops::Range<usize> {
        match self.mode {
            Labeling::Canonical => {
                let next_new = used_max.map_or(0, |m| m + 1);
                // reusing a label is only allowed if the unopened clusters
                // still fit in the remaining vertices
                if self.q.saturating_sub(next_new) <= remaining_after {
                    0..next_new.min(self.q - 1) + 1
                } else {
                    next_new..next_new + 1
                }
            }
            Labeling::Labeled => 0..self.q,
        }
    }

    /// Visit every leaf below `prefix` in lexicographic order.
    pub fn walk(&self, prefix: &[usize], visit: &mut dyn FnMut(&Leaf)) {
        let n = self.g.n();
        let q = self.q;
        let mut labels = vec![0usize; n];
        let mut masses = vec![vec![0.0; q]; n + 1];
        let mut cuts = vec![vec![0.0; q * q]; n + 1];
        let mut partial = vec![0.0; q];
        for (v, &l) in prefix.iter().enumerate() {
            self.push(v, l, &labels, &mut masses, &mut cuts, &mut partial);
            labels[v] = l;
        }
        self.descend(
            prefix.len(),
            &mut labels,
            &mut masses,
            &mut cuts,
            &mut partial,
            visit,
        );
    }

    fn push(
        &self,
        v: usize,
        l: usize,
        labels: &[usize],
        masses: &mut [Vec<f64>],
        cuts: &mut [Vec<f64>],
        partial: &mut [f64],
    ) {
        let q = self.q;
        let av = self.a[v];
        partial.iter_mut().for_each(|x| *x = 0.0);
        for u in 0..v {
            partial[labels[u]] += self.a[u] * self.g.edge(u, v);
        }
        let (before, after) = masses.split_at_mut(v + 1);
        after[0].copy_from_slice(&before[v]);
        after[0][l] += av;
        let (before, after) = cuts.split_at_mut(v + 1);
        let next = &mut after[0];
        next.copy_from_slice(&before[v]);
        for m in 0..q {
            let d = av * partial[m];
            next[l * q + m] += d;
            next[m * q + l] += d;
        }
        next[l * q + l] += av * av * self.g.edge(v, v);
    }

    fn descend(
        &self,
        depth: usize,
        labels: &mut Vec<usize>,
        masses: &mut Vec<Vec<f64>>,
        cuts: &mut Vec<Vec<f64>>,
        partial: &mut Vec<f64>,
        visit: &mut dyn FnMut(&Leaf),
    ) {
        let n = self.g.n();
        if depth == n {
            let m = &masses[n];
            if m.iter().all(|&x| x > 0.0) {
                visit(&Leaf {
                    labels,
                    masses: m,
                    cut: &cuts[n],
                });
            }
            return;
        }
        let used_max = labels[..depth].iter().copied().max();
        let used_count = masses[depth].iter().filter(|&&x| x > 0.0).count();
        let remaining_after = n - depth - 1;
        let range = self.label_range(used_max, remaining_after);
        for l in range {
            if self.mode == Labeling::Labeled {
                let opened = used_count + usize::from(masses[depth][l] == 0.0);
                if self.q - opened > remaining_after {
                    continue;
                }
            }
            self.push(depth, l, labels, masses, cuts, partial);
            labels[depth] = l;
            self.descend(depth + 1, labels, masses, cuts, partial, visit);
        }
    }

    /// Prefixes of a fixed depth (depending only on `n`, `q` and the mode)
    /// used to split the search across workers.
    fn prefixes(&self) -> Vec<Vec<usize>> {
        let n = self.g.n();
        let mut level: Vec<Vec<usize>> = vec![Vec::new()];
        while level.len() < 256 && level[0].len() < n.saturating_sub(4) {
            let mut next = Vec::new();
            for p in &level {
                let depth = p.len();
                let used_max = p.iter().copied().max();
                let mut opened = vec![false; self.q];
                p.iter().for_each(|&l| opened[l] = true);
                let used_count = opened.iter().filter(|&&o| o).count();
                let remaining_after = n - depth - 1;
                for l in self.label_range(used_max, remaining_after) {
                    if self.mode == Labeling::Labeled {
                        let now = used_count + usize::from(!opened[l]);
                        if self.q - now > remaining_after {
                            continue;
                        }
                    }
                    let mut c = p.clone();
                    c.push(l);
                    next.push(c);
                }
            }
            level = next;
        }
        level
    }

    /// Minimize `objective` over admissible leaves; also counts them.
    pub fn minimize_counted<A, O>(
        &self,
        admissible: A,
        objective: O,
    ) -> (Option<SearchOutcome>, u64)
    where
        A: Fn(&[f64]) -> bool + Sync,
        O: Fn(&Leaf) -> f64 + Sync,
    {
        let parts: Vec<(Option<SearchOutcome>, u64)> = self
            .prefixes()
            .par_iter()
            .map(|prefix| {
                let mut best: Option<SearchOutcome> = None;
                let mut feasible = 0u64;
                self.walk(prefix, &mut |leaf| {
                    if !admissible(leaf.masses) {
                        return;
                    }
                    feasible += 1;
                    let v = objective(leaf);
                    if is_better(v, leaf.labels, &best) {
                        best = Some(SearchOutcome {
                            value: v,
                            labels: leaf.labels.to_vec(),
                            feasible_count: 0,
                        });
                    }
                });
                (best, feasible)
            })
            .collect();
        let mut best = None;
        let mut feasible = 0;
        for (p, f) in parts {
            merge(&mut best, &mut feasible, p, f);
        }
        if let Some(b) = best.as_mut() {
            b.feasible_count = feasible;
        }
        (best, feasible)
    }
}

/// Classes of interchangeable vertices: same weight, same loop, same edge
/// weight to every other vertex. Classes are listed by first member.
pub(crate) fn twin_classes(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let id = classes.len();
        class_of[v] = id;
        let mut members = vec![v];
        for w in (v + 1)..n {
            if class_of[w] == usize::MAX && are_twins(g, v, w) {
                class_of[w] = id;
                members.push(w);
            }
        }
        classes.push(members);
    }
    classes
}

fn are_twins(g: &WeightedGraph, v: usize, w: usize) -> bool {
    g.alpha()[v] == g.alpha()[w]
        && g.edge(v, v) == g.edge(w, w)
        && (0..g.n()).all(|u| u == v || u == w || g.edge(v, u) == g.edge(w, u))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Search over per-class cluster counts for graphs with few twin classes.
///
/// The returned labels are the representative of the optimal count matrix
/// that fills clusters in vertex order within each class (canonicalized in
/// canonical mode); ties between count matrices go to the smaller
/// representative.
pub(crate) struct CompressedEnumerator {
    classes: Vec<Vec<usize>>,
    q: usize,
    n: usize,
    mode: Labeling,
    /// normalized per-vertex weight of each class
    a: Vec<f64>,
    /// `b[c][d]` edge weight between distinct members of classes c and d
    b: Vec<Vec<f64>>,
    loops: Vec<f64>,
}

impl CompressedEnumerator {
    pub fn new(g: &WeightedGraph, q: usize, mode: Labeling) -> Self {
        let classes = twin_classes(g);
        let vol = g.volume();
        let a = classes.iter().map(|c| g.alpha()[c[0]] / vol).collect();
        let b = classes
            .iter()
            .map(|c| {
                classes
                    .iter()
                    .map(|d| {
                        if c[0] == d[0] {
                            c.get(1).map_or(0.0, |&w| g.edge(c[0], w))
                        } else {
                            g.edge(c[0], d[0])
                        }
                    })
                    .collect()
            })
            .collect();
        let loops = classes.iter().map(|c| g.edge(c[0], c[0])).collect();
        Self {
            classes,
            q,
            n: g.n(),
            mode,
            a,
            b,
            loops,
        }
    }

    pub fn count(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| binomial(c.len() + self.q - 1, self.q - 1))
            .product()
    }

    fn representative(&self, counts: &[Vec<usize>]) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (c, members) in self.classes.iter().enumerate() {
            let mut it = members.iter();
            for (l, &k) in counts[c].iter().enumerate() {
                for &v in it.by_ref().take(k) {
                    labels[v] = l;
                }
            }
        }
        if self.mode == Labeling::Canonical {
            Partition::from_labels_unchecked(labels, self.q)
                .canonical()
                .labels()
                .to_vec()
        } else {
            labels
        }
    }

    fn stats(&self, counts: &[Vec<usize>], masses: &mut [f64], cut: &mut [f64]) {
        let q = self.q;
        let m = self.classes.len();
        masses.iter_mut().for_each(|x| *x = 0.0);
        cut.iter_mut().for_each(|x| *x = 0.0);
        for c in 0..m {
            for i in 0..q {
                masses[i] += counts[c][i] as f64 * self.a[c];
            }
        }
        for c in 0..m {
            for d in 0..m {
                let w = self.a[c] * self.a[d] * self.b[c][d];
                for i in 0..q {
                    let xci = counts[c][i] as f64;
                    if xci == 0.0 {
                        continue;
                    }
                    for j in 0..q {
                        let xdj = counts[d][j] as f64;
                        let pairs = if c == d && i == j {
                            xci * (xci - 1.0)
                        } else {
                            xci * xdj
                        };
                        cut[i * q + j] += w * pairs;
                    }
                }
            }
            for i in 0..q {
                cut[i * q + i] += self.a[c] * self.a[c] * counts[c][i] as f64 * self.loops[c];
            }
        }
    }

    pub fn minimize_counted<A, O>(
        &self,
        admissible: A,
        objective: O,
    ) -> (Option<SearchOutcome>, u64)
    where
        A: Fn(&[f64]) -> bool + Sync,
        O: Fn(&Leaf) -> f64 + Sync,
    {
        let q = self.q;
        let m = self.classes.len();
        let mut counts = vec![vec![0usize; q]; m];
        let mut masses = vec![0.0; q];
        let mut cut = vec![0.0; q * q];
        let mut best: Option<SearchOutcome> = None;
        let mut feasible = 0u64;
        self.recurse(0, &mut counts, &mut |counts| {
            self.stats(counts, &mut masses, &mut cut);
            if masses.iter().any(|&x| x <= 0.0) || !admissible(&masses) {
                return;
            }
            feasible += 1;
            let labels = self.representative(counts);
            let v = objective(&Leaf {
                labels: &labels,
                masses: &masses,
                cut: &cut,
            });
            if is_better(v, &labels, &best) {
                best = Some(SearchOutcome {
                    value: v,
                    labels,
                    feasible_count: 0,
                });
            }
        });
        if let Some(b) = best.as_mut() {
            b.feasible_count = feasible;
        }
        (best, feasible)
    }

    fn recurse(
        &self,
        c: usize,
        counts: &mut Vec<Vec<usize>>,
        visit: &mut dyn FnMut(&[Vec<usize>]),
    ) {
        if c == self.classes.len() {
            visit(counts);
            return;
        }
        let size = self.classes[c].len();
        compositions(size, self.q, &mut |comp| {
            counts[c].copy_from_slice(comp);
            self.recurse(c + 1, counts, visit);
        });
    }
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative parts,
/// in decreasing lexicographic order of the first part.
fn compositions(total: usize, parts: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(rest: usize, idx: usize, buf: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        let parts = buf.len();
        if idx == parts - 1 {
            buf[idx] = rest;
            visit(buf);
            return;
        }
        for k in (0..=rest).rev() {
            buf[idx] = k;
            go(rest - k, idx + 1, buf, visit);
        }
    }
    let mut buf = vec![0; parts];
    go(total, 0, &mut buf, visit);
}

/// Pick plain or compressed enumeration under the guard and minimize.
pub(crate) fn search<A, O>(
    g: &WeightedGraph,
    q: usize,
    mode: Labeling,
    guards: &Guards,
    what: &str,
    admissible: A,
    objective: O,
) -> Result<SearchOutcome>
where
    A: Fn(&[f64]) -> bool + Sync,
    O: Fn(&Leaf) -> f64 + Sync,
{
    let plain = Enumerator::new(g, q, mode)?;
    let full = plain.assignment_count();
    let within = |count: f64| !guards.enabled || count <= guards.max_assignments;

    let (best, feasible) = if full <= guards.max_assignments {
        plain.minimize_counted(&admissible, &objective)
    } else {
        let compressed = CompressedEnumerator::new(g, q, mode);
        let reduced = compressed.count();
        if reduced < full && within(reduced) {
            compressed.minimize_counted(&admissible, &objective)
        } else if within(full) {
            plain.minimize_counted(&admissible, &objective)
        } else {
            guards.check_assignments(what, full.min(reduced))?;
            unreachable!()
        }
    };
    best.ok_or_else(|| {
        Error::infeasible(format!(
            "{what}: no admissible {q}-partition exists (empty feasible set, {feasible} candidates)"
        ))
    })
}
