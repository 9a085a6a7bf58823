use super::*;
use crate::densities::{min_cut_density, Balance};
use crate::graph::blow_up;
use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

fn random_problem(seed: u64, n: usize, q: usize, c: f64, unit: bool) -> QpProblem {
    let mut r = SeededRng::new(seed, 99);
    let mut b = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = r.random();
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    let alpha = (0..n)
        .map(|_| if unit { 1.0 } else { r.random_range(0.5..1.5) })
        .collect();
    QpProblem::new(alpha, b, q, c).unwrap()
}

fn random_feasible(p: &QpProblem, seed: u64) -> Matrix {
    let mut r = SeededRng::new(seed, 5);
    let a = lp_oracle(
        p,
        &Matrix::from_fn(p.q(), p.n(), |_, _| r.random_range(-1.0..1.0)),
    )
    .unwrap()
    .x;
    let b = lp_oracle(
        p,
        &Matrix::from_fn(p.q(), p.n(), |_, _| r.random_range(-1.0..1.0)),
    )
    .unwrap()
    .x;
    let t: f64 = r.random();
    Matrix::from_fn(p.q(), p.n(), |i, j| t * a[(i, j)] + (1.0 - t) * b[(i, j)])
}

#[test]
fn objective_examples() {
    let p = random_problem(1, 5, 3, 0.0, false);
    let mut x = Matrix::zeros(3, 5);
    x.row_mut(1).copy_from_slice(p.alpha());
    assert_eq!(objective(&p, &x).unwrap(), 0.0);
    let z = QpProblem::new(vec![1.0; 4], Matrix::zeros(4, 4), 2, 0.25).unwrap();
    assert_eq!(objective(&z, &random_feasible(&z, 3)).unwrap(), 0.0);
    assert!(objective(&p, &Matrix::zeros(2, 5)).is_err());
}

#[test]
fn indicator_objective_is_cut_density() {
    let g = WeightedGraph::from_rows(
        vec![1.0, 2.0, 0.5, 1.5],
        &[
            vec![0.3, 0.9, 0.1, 0.4],
            vec![0.9, 0.0, 0.6, 0.2],
            vec![0.1, 0.6, 0.5, 0.8],
            vec![0.4, 0.2, 0.8, 0.7],
        ],
    )
    .unwrap();
    let p = QpProblem::from_graph(&g, 2, 0.0).unwrap();
    let part = Partition::new(vec![0, 1, 1, 0], 2).unwrap();
    let vol = g.volume();
    let cut = crate::graph::weighted_cut(&g, &[0, 3], &[1, 2]).unwrap() / (vol * vol);
    assert!((objective(&p, &p.indicator(&part).unwrap()).unwrap() - cut).abs() < 1e-15);
}

#[test]
fn gradient_examples() {
    let p = random_problem(2, 4, 2, 0.0, true);
    let mut x = Matrix::zeros(2, 4);
    x.row_mut(0).copy_from_slice(&[0.1, 0.2, 0.3, 0.4]);
    let g = gradient(&p, &x).unwrap();
    assert!(g.row(0).iter().all(|&v| v == 0.0));
    let bx = p.b().mul_vec(x.row(0));
    assert_eq!(g.row(1), bx.as_slice());
    let z = QpProblem::new(vec![1.0; 3], Matrix::zeros(3, 3), 3, 0.0).unwrap();
    assert!(gradient(&z, &random_feasible(&z, 1))
        .unwrap()
        .as_slice()
        .iter()
        .all(|&v| v == 0.0));
}

#[test]
fn gradient_matches_central_differences() {
    for inst in 0..20u64 {
        let p = random_problem(
            100 + inst,
            3 + (inst as usize % 6),
            2 + (inst as usize % 2),
            0.0,
            inst % 2 == 0,
        );
        for pt in 0..10u64 {
            let x = random_feasible(&p, inst * 31 + pt);
            let g = gradient(&p, &x).unwrap();
            let h = 1e-6;
            let mut worst: f64 = 0.0;
            for k in 0..x.as_slice().len() {
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus.as_mut_slice()[k] += h;
                minus.as_mut_slice()[k] -= h;
                let fd =
                    (objective(&p, &plus).unwrap() - objective(&p, &minus).unwrap()) / (2.0 * h);
                worst = worst.max((fd - g.as_slice()[k]).abs());
            }
            assert!(worst < 1e-5, "instance {inst} point {pt}: {worst}");
        }
    }
}

#[test]
fn lp_hand_example() {
    let p = QpProblem::new(vec![0.5, 0.5], Matrix::zeros(2, 2), 2, 0.0).unwrap();
    let g = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let s = lp_oracle(&p, &g).unwrap();
    assert_eq!(s.x.to_rows(), vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
    assert_eq!(s.cost, 0.0);
    assert!(s.cs_residual < 1e-12);
}

#[test]
fn lp_zero_cost_is_feasible() {
    for (q, c) in [(2, 0.0), (3, 0.2), (3, 1.0 / 3.0)] {
        let p = random_problem(7, 5, q, c, false);
        let s = lp_oracle(&p, &Matrix::zeros(q, 5)).unwrap();
        assert!(p.is_feasible(&s.x));
    }
}

#[test]
fn infeasible_balance() {
    let e = QpProblem::new(vec![1.0; 4], Matrix::zeros(4, 4), 3, 0.4).unwrap_err();
    assert!(matches!(e, Error::Infeasible(_)));
}

/// Minimum of `⟨g, s⟩` over all basic feasible solutions of the standard
/// form `Σ_i s_ij = α_j`, `Σ_j s_ij − t_i = c`, `s, t ≥ 0`.
fn bfs_oracle(p: &QpProblem, g: &Matrix) -> f64 {
    let (q, n) = (p.q(), p.n());
    let vars = q * n + q;
    let rows = n + q;
    let mut a = DMatrix::<f64>::zeros(rows, vars);
    for i in 0..q {
        for j in 0..n {
            a[(j, i * n + j)] = 1.0;
            a[(n + i, i * n + j)] = 1.0;
        }
        a[(n + i, q * n + i)] = -1.0;
    }
    let rhs = DVector::from_iterator(
        rows,
        p.alpha()
            .iter()
            .copied()
            .chain(std::iter::repeat_n(p.c(), q)),
    );
    let mut best = f64::INFINITY;
    for basis in (0..vars).combinations(rows) {
        let sub = DMatrix::from_fn(rows, rows, |r, k| a[(r, basis[k])]);
        let lu = sub.clone().lu();
        if sub.determinant().abs() < 1e-10 {
            continue;
        }
        let Some(sol) = lu.solve(&rhs) else { continue };
        if sol.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let cost: f64 = basis
            .iter()
            .zip(sol.iter())
            .filter(|(&var, _)| var < q * n)
            .map(|(&var, &v)| g.as_slice()[var] * v)
            .sum();
        best = best.min(cost);
    }
    best
}

#[test]
fn lp_matches_basic_solution_enumeration() {
    for inst in 0..30u64 {
        let n = 2 + inst as usize % 4;
        let q = 2 + inst as usize % 2;
        let c = [0.0, 0.1, 0.25, 1.0 / q as f64][inst as usize % 4];
        let p = random_problem(500 + inst, n, q, c, inst % 3 == 0);
        let mut r = SeededRng::new(inst, 1);
        let g = Matrix::from_fn(q, n, |_, _| r.random_range(-1.0..1.0));
        let s = lp_oracle(&p, &g).unwrap();
        assert!(p.is_feasible(&s.x));
        assert!(
            (s.cost - bfs_oracle(&p, &g)).abs() < 1e-10,
            "instance {inst}"
        );
        assert!(s.cs_residual < 1e-9, "instance {inst}: {}", s.cs_residual);
    }
}

#[test]
fn planted_cliques_reach_zero() {
    let b = Matrix::from_rows(&[
        vec![0.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 1.0, 0.0],
    ])
    .unwrap();
    let p = QpProblem::new(vec![1.0; 4], b, 2, 0.4).unwrap();
    let (x, report) = solve(&p, &SolveOptions::default(), &SeededRng::new(1, 0)).unwrap();
    assert!(report.objective.abs() < 1e-12);
    let (part, value) = round_to_partition(&p, &x).unwrap();
    assert_eq!(part.canonical().labels(), &[0, 0, 1, 1]);
    assert!(value.abs() < 1e-12);
}

#[test]
fn zero_weights_stop_immediately() {
    let p = QpProblem::new(vec![1.0; 5], Matrix::zeros(5, 5), 2, 0.2).unwrap();
    let (_, report) = solve(&p, &SolveOptions::default(), &SeededRng::new(1, 0)).unwrap();
    assert_eq!(report.objective, 0.0);
    assert!(report.starts.iter().all(|s| s.iterations == 0));
}

#[test]
fn iterates_stay_feasible_and_line_search_is_exact() {
    let p = random_problem(41, 7, 3, 0.2, false);
    let mut x = random_feasible(&p, 2);
    for _ in 0..25 {
        assert!(p.feasibility_violation(&x) < 1e-9);
        let g = gradient(&p, &x).unwrap();
        let d = lp_oracle(&p, &g).unwrap().x.sub(&x);
        let slope = dot(g.as_slice(), d.as_slice());
        let curv = 2.0 * objective(&p, &d).unwrap();
        let step = line_search(slope, curv, 1.0);
        let at = |t: f64| {
            let y = Matrix::from_fn(p.q(), p.n(), |i, j| x[(i, j)] + t * d[(i, j)]);
            objective(&p, &y).unwrap()
        };
        let grid = (0..=100)
            .map(|k| at(k as f64 / 100.0))
            .fold(f64::INFINITY, f64::min);
        assert!(at(step) <= grid + 1e-12);
        x = Matrix::from_fn(p.q(), p.n(), |i, j| (x[(i, j)] + step * d[(i, j)]).max(0.0));
    }
}

#[test]
fn rounding_an_indicator_returns_it() {
    let p = random_problem(8, 6, 3, 0.1, true);
    let part = Partition::new(vec![2, 0, 1, 1, 0, 2], 3).unwrap();
    let (back, value) = round_to_partition(&p, &p.indicator(&part).unwrap()).unwrap();
    assert_eq!(back, part);
    assert!((value - objective(&p, &p.indicator(&part).unwrap()).unwrap()).abs() < 1e-15);
}

#[test]
fn rounding_repairs_balance() {
    let p = random_problem(9, 6, 2, 0.5, true);
    let mut x = Matrix::zeros(2, 6);
    x.row_mut(0).copy_from_slice(p.alpha());
    let (part, _) = round_to_partition(&p, &x).unwrap();
    assert!(part
        .masses(&WeightedGraph::unit(p.b().clone()).unwrap())
        .iter()
        .all(|&m| m >= 0.5 - 1e-12));
    // three clusters of weight 0.3 cannot come out of two vertices each 0.5
    let q = QpProblem::new(vec![1.0, 1.0], Matrix::zeros(2, 2), 2, 0.5).unwrap();
    let mut y = Matrix::zeros(2, 2);
    y.row_mut(0).copy_from_slice(&[0.5, 0.5]);
    assert!(round_to_partition(&q, &y).is_ok());
    let heavy = QpProblem::new(vec![3.0, 1.0, 1.0], Matrix::zeros(3, 3), 2, 0.45).unwrap();
    let mut z = Matrix::zeros(2, 3);
    z.row_mut(0).copy_from_slice(heavy.alpha());
    assert!(matches!(
        round_to_partition(&heavy, &z),
        Err(Error::Infeasible(_))
    ));
}

#[test]
fn relaxation_orders_below_exact() {
    for inst in 0..12u64 {
        let n = 4 + inst as usize % 5;
        let q = 2 + inst as usize % 2;
        let c = [0.0, 0.1, 0.2][inst as usize % 3];
        let p = random_problem(900 + inst, n, q, c, inst % 2 == 0);
        let g = WeightedGraph::new(p.alpha().to_vec(), p.b().clone()).unwrap();
        let exact = min_cut_density(&g, q, &Balance::C { c }).unwrap().value;
        let (x, report) = solve(&p, &SolveOptions::default(), &SeededRng::new(inst, 0)).unwrap();
        assert!(
            report.objective <= exact + 1e-9,
            "instance {inst}: {} > {exact}",
            report.objective
        );
        let (_, rounded) = round_to_partition(&p, &x).unwrap();
        assert!(rounded >= report.objective - 1e-9);
        assert!(report.fw_gap >= -1e-9);
        assert!(
            report.kkt_residual < 1e-6,
            "instance {inst}: kkt {} gap {} conv {}",
            report.kkt_residual,
            report.fw_gap,
            report.converged
        );
    }
}

#[test]
fn planted_blow_up_recovered() {
    let pattern = Matrix::from_rows(&[vec![0.9, 0.0], vec![0.0, 0.8]]).unwrap();
    let g = blow_up(&pattern, &[4, 5]).unwrap();
    let p = QpProblem::from_graph(&g, 2, 0.3).unwrap();
    let (x, report) = solve(&p, &SolveOptions::default(), &SeededRng::new(3, 0)).unwrap();
    assert!(report.objective.abs() < 1e-12);
    let (part, value) = round_to_partition(&p, &x).unwrap();
    let exact = min_cut_density(&g, 2, &Balance::C { c: 0.3 }).unwrap();
    assert_eq!(part.canonical(), exact.partition);
    assert!(value.abs() < 1e-12);
}

#[test]
fn solve_is_reproducible() {
    let p = random_problem(77, 8, 3, 0.2, false);
    let a = solve(&p, &SolveOptions::default(), &SeededRng::new(5, 0)).unwrap();
    let b = solve(&p, &SolveOptions::default(), &SeededRng::new(5, 0)).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(
        serde_json::to_string(&a.1).unwrap(),
        serde_json::to_string(&b.1).unwrap()
    );
}

#[test]
fn kronecker_small_cases() {
    assert_eq!(
        symmetric_eigen(&cluster_matrix(2)).unwrap().values,
        vec![1.0, -1.0]
    );
    let p = QpProblem::new(
        vec![1.0; 2],
        Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        2,
        0.0,
    )
    .unwrap();
    let r = kronecker_spectrum_check(&p, &Guards::default()).unwrap();
    assert_eq!(r.predicted, vec![1.0, 1.0, -1.0, -1.0]);
    assert!(r.max_abs_diff.unwrap() < 1e-12);
    assert!(r.indefinite);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kronecker_matches_independent_eigensolver(seed in any::<u64>(), n in 2usize..=8, q in 2usize..=3) {
        let p = random_problem(seed, n, q, 0.0, true);
        let r = kronecker_spectrum_check(&p, &Guards::default()).unwrap();
        let direct = cluster_matrix(q).kron(p.b());
        let m = DMatrix::from_row_slice(q * n, q * n, direct.as_slice());
        let mut oracle: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in r.predicted.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-8);
        }
        prop_assert!(r.max_abs_diff.unwrap() < 1e-8);
    }
}
