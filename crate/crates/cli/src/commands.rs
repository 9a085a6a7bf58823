use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use cutdens::densities::{
    cut_density, ground_state_energy_guarded, microcanonical_energy_guarded, pendant_clique_demo,
    validate_distribution, Balance, EnergySpec, Functional, Optimum,
};
use cutdens::graph::{stepfunction, GraphJson, StepfunctionGraphon, WeightedGraph};
use cutdens::homomorphism::{density, DensityKind, SimpleGraph, SimpleGraphJson};
use cutdens::metrics::{
    cut_distance_perm_guarded, cutnorm_exact_guarded, cutnorm_heuristic, hausdorff_distance, quotient_set_guarded,
    DEFAULT_RESTARTS,
};
use cutdens::noise::{
    cutnorm_decay_experiment, density_convergence, limit_factor_graph, median_by_n, spectral_experiment,
    NoiseDistribution, NoiseSpec, NoisySequenceSpec,
};
use cutdens::qp::{kronecker_spectrum_check, round_to_partition, solve, QpProblem, SolveOptions};
use cutdens::sampling::{testability_experiment, Parameter};
use cutdens::{Guards, Matrix, SeededRng};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::output::{join, join_floats, Cell, Output, Table};
use crate::settings::Settings;

pub struct Ctx<'a> {
    pub s: &'a mut Settings,
    pub guards: Guards,
    pub seed: u64,
    pub check: bool,
}

impl Ctx<'_> {
    /// Fail with every collected diagnostic, or tell the caller whether to
    /// go on computing.
    fn gate(&mut self) -> CliResult<bool> {
        std::mem::take(&mut self.s.diagnostics).finish()?;
        Ok(!self.check)
    }

    fn read_file(&mut self, key: &str, flag: Option<&str>, required: bool) -> Option<(String, String)> {
        let path: String = if required {
            self.s.require(key, flag)?
        } else {
            self.s.text(key, flag, None)?
        };
        match std::fs::read_to_string(&path) {
            Ok(text) => Some((path, text)),
            Err(e) => {
                self.s.diagnostics.input(format!("--{key}: cannot read {path}: {e}"));
                None
            }
        }
    }

    fn json<T: DeserializeOwned>(&mut self, key: &str, flag: Option<&str>, required: bool) -> Option<T> {
        let (path, text) = self.read_file(key, flag, required)?;
        match serde_json::from_str(&text) {
            Ok(v) => Some(v),
            Err(e) => {
                self.s.diagnostics.input(format!("--{key}: {path}: {e}"));
                None
            }
        }
    }

    /// Load a graph and report all of its violated invariants.
    fn graph(&mut self, key: &str, flag: Option<&str>) -> Option<WeightedGraph> {
        let raw: GraphJson = self.json(key, flag, true)?;
        let beta = match Matrix::from_rows(&raw.beta) {
            Ok(b) => b,
            Err(e) => {
                self.s.diagnostics.input(format!("--{key}: beta: {e}"));
                return None;
            }
        };
        let diags = WeightedGraph::diagnose(&raw.alpha, &beta);
        if !diags.is_empty() {
            for d in diags {
                self.s.diagnostics.input(format!("--{key}: {d}"));
            }
            return None;
        }
        WeightedGraph::new(raw.alpha, beta).ok()
    }

    fn pattern_graph(&mut self, key: &str, flag: Option<&str>, required: bool) -> Option<SimpleGraph> {
        let raw: SimpleGraphJson = self.json(key, flag, required)?;
        match SimpleGraph::from_json(&raw) {
            Ok(f) => Some(f),
            Err(e) => {
                self.s.diagnostics.input(format!("--{key}: {e}"));
                None
            }
        }
    }

    fn q_for(&mut self, q: Option<usize>, n: Option<usize>) {
        match (q, n) {
            (Some(0), _) => self.s.diagnostics.input("--q must be at least 1"),
            (Some(q), Some(n)) if q > n => self
                .s
                .diagnostics
                .input(format!("--q = {q} exceeds the number of vertices n = {n}")),
            _ => {}
        }
    }

    fn balance_for(&mut self, balance: Option<&Balance>, q: Option<usize>) {
        if let (Some(b), Some(q)) = (balance, q) {
            if q >= 1 {
                if let Err(e) = b.validate(q) {
                    self.s.diagnostics.record(e);
                }
            }
        }
    }

    fn sequence(&mut self, a: &SequenceArgs, k_default: &str) -> Option<NoisySequenceSpec> {
        let pattern: Option<Matrix> = self.json("pattern", a.pattern.as_deref(), true);
        let ratios: Option<Vec<f64>> = match a.ratios.as_deref() {
            None if !self.s.has("ratios") => {
                self.s.diagnostics.input("--ratios is required");
                None
            }
            flag => self.s.list("ratios", flag, None),
        };
        let distribution: Option<NoiseDistribution> = self.s.get("noise", a.noise.as_deref(), Some("uniform"));
        let k: Option<f64> = self.s.get("K", a.k.as_deref(), Some(k_default));
        let sizes: Vec<usize> = self.s.list("ns", a.ns.as_deref(), None).unwrap_or_default();
        let bernoulli = self.s.switch("bernoulli", a.bernoulli);
        let seq = NoisySequenceSpec {
            pattern: pattern?,
            ratios: ratios?,
            sizes,
            noise: NoiseSpec {
                distribution: distribution?,
                k: k?,
                seed: self.seed,
            },
            bernoulli,
        };
        let diags = seq.diagnose();
        if !diags.is_empty() {
            for d in diags {
                self.s.diagnostics.input(d);
            }
            return None;
        }
        Some(seq)
    }
}

fn ok<T>(v: Option<T>) -> T {
    v.expect("value present once the diagnostics gate passed")
}

pub fn dispatch(cmd: &Command, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    match cmd {
        Command::Hom(a) => hom(a, ctx),
        Command::SampleTest(a) => sample_test(a, ctx),
        Command::Cutnorm(a) => cutnorm(a, ctx),
        Command::Cutdist(a) => cutdist(a, ctx),
        Command::Hausdorff(a) => hausdorff(a, ctx),
        Command::Density(a) => density_cmd(a, ctx),
        Command::Energy(a) => energy(a, ctx),
        Command::Qp(a) => qp(a, ctx),
        Command::NoiseSweep(a) => noise_sweep(a, ctx),
        Command::Spectral(a) => spectral(a, ctx),
        Command::LimitGraph(a) => limit_graph(a, ctx),
        Command::MuDemo(a) => mu_demo(a, ctx),
    }
}

fn optimum_table(o: &Optimum) -> Table {
    Table::single(vec![
        ("value", o.value.into()),
        ("labels", join(o.partition.labels())),
        ("feasible_count", o.feasible_count.into()),
    ])
}

fn hom(a: &HomArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let g = ctx.graph("graph", a.graph.as_deref());
    let f = ctx.pattern_graph("pattern", a.pattern.as_deref(), true);
    let kind: Option<DensityKind> = ctx.s.get("kind", a.kind.as_deref(), Some("t"));
    if !ctx.gate()? {
        return Ok(None);
    }
    let (g, f, kind) = (ok(g), ok(f), ok(kind));
    let value = density(kind, &f, &g, &ctx.guards)?;
    let table = Table::single(vec![("value", value.into())]);
    Ok(Some(Output::new(json!({ "kind": kind, "k": f.k(), "n": g.n(), "value": value }), table)))
}

fn sample_test(a: &SampleTestArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let g = ctx.graph("graph", a.graph.as_deref());
    let k: Option<usize> = ctx.s.require("k", a.k.as_deref());
    let reps: Option<usize> = ctx.s.get("reps", a.reps.as_deref(), Some("100"));
    let parameter = if a.pattern.is_some() || ctx.s.has("pattern") {
        let pattern = ctx.pattern_graph("pattern", a.pattern.as_deref(), true);
        let kind: Option<DensityKind> = ctx.s.get("kind", a.kind.as_deref(), Some("t"));
        pattern.zip(kind).map(|(pattern, kind)| Parameter::Density { kind, pattern })
    } else {
        let (q, functional, balance) = match ctx.s.text("param", a.param.as_deref(), None) {
            Some(p) => param_shorthand(&p, a, ctx),
            None => (
                ctx.s.get("q", a.q.as_deref(), Some("2")),
                ctx.s.get("functional", a.functional.as_deref(), Some("f")),
                ctx.s.get("balance", a.balance.as_deref(), Some("none")),
            ),
        };
        ctx.q_for(q, None);
        ctx.balance_for(balance.as_ref(), q);
        match (q, functional, balance) {
            (Some(q), Some(functional), Some(balance)) => Some(Parameter::CutDensity { q, functional, balance }),
            _ => None,
        }
    };
    if !ctx.gate()? {
        return Ok(None);
    }
    let (g, k, reps, parameter) = (ok(g), ok(k), ok(reps), ok(parameter));
    let report = testability_experiment(&g, k, &parameter, reps, &SeededRng::new(ctx.seed, 0), &ctx.guards)?;
    let mut table = Table::new(&["rep", "f_sample", "deviation"]);
    for r in &report.reps {
        table.push(vec![r.rep.into(), r.f_sample.into(), r.deviation.into()]);
    }
    let result = json!({ "parameter": parameter, "label": parameter.label(), "report": report });
    Ok(Some(Output::new(result, table)))
}

/// `f2`, `mu3`, `f2c` (balanced, with `--c`).
fn param_shorthand(p: &str, a: &SampleTestArgs, ctx: &mut Ctx) -> (Option<usize>, Option<Functional>, Option<Balance>) {
    for (key, flag) in [("q", &a.q), ("functional", &a.functional), ("balance", &a.balance)] {
        if flag.is_some() {
            ctx.s.diagnostics.input(format!("--param and --{key} are mutually exclusive"));
        }
    }
    let (functional, rest) = if let Some(rest) = p.strip_prefix("mu") {
        (Functional::Mu, rest)
    } else if let Some(rest) = p.strip_prefix('f') {
        (Functional::F, rest)
    } else {
        ctx.s.diagnostics.input(format!("--param `{p}` must look like f2, mu3 or f2c"));
        return (None, None, None);
    };
    let (digits, balanced) = match rest.strip_suffix('c') {
        Some(d) => (d, true),
        None => (rest, false),
    };
    let q = match digits.parse::<usize>() {
        Ok(q) => Some(q),
        Err(_) => {
            ctx.s.diagnostics.input(format!("--param `{p}` must look like f2, mu3 or f2c"));
            None
        }
    };
    let balance = if balanced {
        ctx.s.require::<f64>("c", a.c.as_deref()).map(|c| Balance::C { c })
    } else {
        if a.c.is_some() {
            ctx.s.diagnostics.input(format!("--c needs a balanced --param such as {p}c"));
        }
        Some(Balance::Unrestricted)
    };
    (q, Some(functional), balance)
}

fn cutnorm(a: &CutnormArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let has_graph = a.graph.is_some() || ctx.s.has("graph");
    let has_graphon = a.graphon.is_some() || ctx.s.has("graphon");
    let w = match (has_graph, has_graphon) {
        (true, false) => ctx.graph("graph", a.graph.as_deref()).map(|g| stepfunction(&g)),
        (false, true) => {
            let raw: Option<serde_json::Value> = ctx.json("graphon", a.graphon.as_deref(), true);
            raw.and_then(|v| match serde_json::from_value::<StepfunctionGraphon>(v) {
                Ok(w) => StepfunctionGraphon::new(w.breaks().to_vec(), w.values().clone())
                    .map_err(|e| ctx.s.diagnostics.input(format!("--graphon: {e}")))
                    .ok(),
                Err(e) => {
                    ctx.s.diagnostics.input(format!("--graphon: {e}"));
                    None
                }
            })
        }
        _ => {
            ctx.s.diagnostics.input("give exactly one of --graph and --graphon");
            None
        }
    };
    let method = ctx.s.text("method", a.method.as_deref(), Some("exact"));
    if !matches!(method.as_deref(), Some("exact" | "heuristic")) {
        ctx.s
            .diagnostics
            .input(format!("--method `{}` must be exact or heuristic", method.clone().unwrap_or_default()));
    }
    let restarts: Option<usize> = ctx.s.get("restarts", a.restarts.as_deref(), Some(&DEFAULT_RESTARTS.to_string()));
    if !ctx.gate()? {
        return Ok(None);
    }
    let (w, method, restarts) = (ok(w), ok(method), ok(restarts));
    let cut = if method == "exact" {
        cutnorm_exact_guarded(&w, &ctx.guards)?
    } else {
        cutnorm_heuristic(&w, restarts, &SeededRng::new(ctx.seed, 0))
    };
    let table = Table::single(vec![
        ("method", method.as_str().into()),
        ("value", cut.value.into()),
        ("s", join(&cut.s)),
        ("t", join(&cut.t)),
    ]);
    let result = json!({ "method": method, "steps": w.steps(), "cutnorm": cut });
    Ok(Some(Output::new(result, table)))
}

fn cutdist(a: &PairArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let g1 = ctx.graph("graph", a.graph.as_deref());
    let g2 = ctx.graph("other", a.other.as_deref());
    if !ctx.gate()? {
        return Ok(None);
    }
    let value = cut_distance_perm_guarded(&ok(g1), &ok(g2), &ctx.guards)?;
    Ok(Some(Output::new(json!({ "value": value }), Table::single(vec![("value", value.into())]))))
}

fn hausdorff(a: &HausdorffArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let g1 = ctx.graph("graph", a.graph.as_deref());
    let g2 = ctx.graph("other", a.other.as_deref());
    let q: Option<usize> = ctx.s.get("q", a.q.as_deref(), Some("2"));
    let balance: Option<Balance> = ctx.s.get("balance", a.balance.as_deref(), Some("none"));
    let min_n = g1.as_ref().zip(g2.as_ref()).map(|(a, b)| a.n().min(b.n()));
    ctx.q_for(q, min_n);
    ctx.balance_for(balance.as_ref(), q);
    if !ctx.gate()? {
        return Ok(None);
    }
    let (q, balance) = (ok(q), ok(balance));
    let s1 = quotient_set_guarded(&ok(g1), q, &balance, &ctx.guards)?;
    let s2 = quotient_set_guarded(&ok(g2), q, &balance, &ctx.guards)?;
    let value = hausdorff_distance(&s1, &s2)?;
    let table = Table::single(vec![
        ("value", value.into()),
        ("size_graph", s1.len().into()),
        ("size_other", s2.len().into()),
    ]);
    let result = json!({ "value": value, "size_graph": s1.len(), "size_other": s2.len() });
    Ok(Some(Output::new(result, table)))
}

fn density_cmd(a: &DensityArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let g = ctx.graph("graph", a.graph.as_deref());
    let q: Option<usize> = ctx.s.get("q", a.q.as_deref(), Some("2"));
    let functional: Option<Functional> = ctx.s.get("functional", a.functional.as_deref(), Some("f"));
    let balance: Option<Balance> = ctx.s.get("balance", a.balance.as_deref(), Some("none"));
    ctx.q_for(q, g.as_ref().map(WeightedGraph::n));
    ctx.balance_for(balance.as_ref(), q);
    if !ctx.gate()? {
        return Ok(None);
    }
    let (g, q, functional, balance) = (ok(g), ok(q), ok(functional), ok(balance));
    let opt = cut_density(&g, q, functional, &balance, &ctx.guards)?;
    let table = optimum_table(&opt);
    let result = json!({ "q": q, "functional": functional, "balance": balance, "optimum": opt });
    Ok(Some(Output::new(result, table)))
}

fn energy(a: &EnergyArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let g = ctx.graph("graph", a.graph.as_deref());
    let q: Option<usize> = ctx.s.get("q", a.q.as_deref(), Some("2"));
    ctx.q_for(q, g.as_ref().map(WeightedGraph::n));
    let coupling: Option<Matrix> = ctx.json("coupling", a.coupling.as_deref(), false);
    let field: Option<Vec<f64>> = ctx.s.list("field", a.field.as_deref(), None);
    let proportions: Option<Vec<f64>> = ctx.s.list("a", a.a.as_deref(), None);
    if proportions.is_some() && field.is_some() {
        ctx.s.diagnostics.input("the microcanonical energy (--a) takes no --field");
    }
    let spec = q.filter(|&q| q >= 1).map(|q| {
        let j = coupling.clone().unwrap_or_else(|| EnergySpec::cut_coupling(q).j);
        let h = field.clone().unwrap_or_else(|| vec![0.0; q]);
        EnergySpec { j, h }
    });
    if let (Some(spec), Some(q)) = (&spec, q) {
        if let Err(e) = spec.validate(q) {
            ctx.s.diagnostics.record(e);
        }
        if let Some(a) = &proportions {
            if let Err(e) = validate_distribution(a, q) {
                ctx.s.diagnostics.record(e);
            }
        }
    }
    if !ctx.gate()? {
        return Ok(None);
    }
    let (g, q, spec) = (ok(g), ok(q), ok(spec));
    let (kind, opt) = match &proportions {
        Some(a) => ("microcanonical", microcanonical_energy_guarded(&g, q, &spec.j, a, &ctx.guards)?),
        None => ("ground_state", ground_state_energy_guarded(&g, q, &spec, &ctx.guards)?),
    };
    let table = optimum_table(&opt);
    let result = json!({ "kind": kind, "q": q, "spec": spec, "a": proportions, "optimum": opt });
    Ok(Some(Output::new(result, table)))
}

#[derive(Serialize)]
struct ExactComparison {
    value: f64,
    labels: Vec<usize>,
    relaxation_below_exact: bool,
}

fn qp(a: &QpArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let g = ctx.graph("graph", a.graph.as_deref());
    let q: Option<usize> = ctx.s.get("q", a.q.as_deref(), Some("2"));
    let c: Option<f64> = ctx.s.get("c", a.c.as_deref(), Some("0"));
    let defaults = SolveOptions::default();
    let starts: Option<usize> = ctx.s.get("starts", a.starts.as_deref(), Some(&defaults.starts.to_string()));
    let max_iters: Option<usize> = ctx.s.get("max_iters", a.max_iters.as_deref(), Some(&defaults.max_iters.to_string()));
    let tol: Option<f64> = ctx.s.get("tol", a.tol.as_deref(), Some(&defaults.tol.to_string()));
    let with_exact = ctx.s.switch("with_exact", a.with_exact);
    let kron = ctx.s.switch("kron", a.kron);
    ctx.q_for(q, g.as_ref().map(WeightedGraph::n));
    let problem = match (&g, q, c) {
        (Some(g), Some(q), Some(c)) if q >= 1 => match QpProblem::from_graph(g, q, c) {
            Ok(p) => Some(p),
            Err(e) => {
                ctx.s.diagnostics.record(e);
                None
            }
        },
        _ => None,
    };
    if !ctx.gate()? {
        return Ok(None);
    }
    let (g, p) = (ok(g), ok(problem));
    let opts = SolveOptions {
        starts: ok(starts),
        max_iters: ok(max_iters),
        tol: ok(tol),
    };
    let (x, report) = solve(&p, &opts, &SeededRng::new(ctx.seed, 0))?;
    let (rounded, rounded_value) = round_to_partition(&p, &x)?;
    let mut pairs: Vec<(&'static str, Cell)> = vec![
        ("objective", report.objective.into()),
        ("fw_gap", report.fw_gap.into()),
        ("kkt_residual", report.kkt_residual.into()),
        ("converged", report.converged.into()),
        ("refined_value", report.refined_value.into()),
        ("rounded_value", rounded_value.into()),
        ("rounded_labels", join(rounded.labels())),
    ];
    let exact = if with_exact {
        let opt = cut_density(&g, p.q(), Functional::F, &Balance::C { c: p.c() }, &ctx.guards)?;
        pairs.push(("exact", opt.value.into()));
        Some(ExactComparison {
            value: opt.value,
            labels: opt.partition.labels().to_vec(),
            relaxation_below_exact: report.objective <= opt.value + 1e-9,
        })
    } else {
        None
    };
    let kronecker = if kron {
        let k = kronecker_spectrum_check(&p, &ctx.guards)?;
        pairs.push(("kron_indefinite", k.indefinite.into()));
        Some(k)
    } else {
        None
    };
    let result = json!({
        "q": p.q(),
        "c": p.c(),
        "relaxation_value": report.objective,
        "rounded_value": rounded_value,
        "partition": rounded.labels(),
        "fw_gap": report.fw_gap,
        "kkt_residual": report.kkt_residual,
        "per_start_table": report.starts,
        "report": report,
        "x": x,
        "rounded": { "labels": rounded.labels(), "value": rounded_value },
        "exact": exact,
        "kronecker": kronecker,
    });
    Ok(Some(Output::new(result, Table::single(pairs))))
}

fn noise_sweep(a: &NoiseSweepArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let distribution: Option<NoiseDistribution> = ctx.s.get("noise", a.noise.as_deref(), Some("rademacher"));
    let k: Option<f64> = ctx.s.get("K", a.k.as_deref(), Some("1"));
    let ns: Option<Vec<usize>> = if a.ns.is_none() && !ctx.s.has("ns") {
        ctx.s.diagnostics.input("--ns is required");
        None
    } else {
        ctx.s.list("ns", a.ns.as_deref(), None)
    };
    let seeds: Option<usize> = ctx.s.get("seeds", a.seeds.as_deref(), Some("20"));
    let spec = distribution.zip(k).map(|(distribution, k)| NoiseSpec {
        distribution,
        k,
        seed: ctx.seed,
    });
    if let Some(spec) = &spec {
        if let Err(e) = spec.validate() {
            ctx.s.diagnostics.record(e);
        }
    }
    if a.pattern.is_some() || ctx.s.has("pattern") {
        let seq = SequenceArgs {
            pattern: a.pattern.clone(),
            ratios: a.ratios.clone(),
            noise: a.noise.clone(),
            k: a.k.clone(),
            ns: a.ns.clone(),
            bernoulli: false,
        };
        ctx.sequence(&seq, "1");
    }
    if !ctx.gate()? {
        return Ok(None);
    }
    let (spec, ns, seeds) = (ok(spec), ok(ns), ok(seeds));
    let rows = cutnorm_decay_experiment(&spec, &ns, seeds, &ctx.guards)?;
    let mut table = Table::new(&["n", "seed", "exact", "cutnorm", "spectral_bound"]);
    for r in &rows {
        table.push(vec![r.n.into(), r.seed.into(), r.exact.into(), r.cutnorm.into(), r.spectral_bound.into()]);
    }
    let cut_medians = median_by_n(&rows, &ns, |r| r.cutnorm);
    let spec_medians = median_by_n(&rows, &ns, |r| r.spectral_bound);
    let medians: Vec<_> = ns
        .iter()
        .zip(cut_medians.iter().zip(&spec_medians))
        .map(|(n, (c, s))| json!({ "n": n, "cutnorm": c, "spectral_bound": s }))
        .collect();
    let result = json!({ "noise": spec, "rows": rows, "medians": medians });
    Ok(Some(Output::new(result, table)))
}

fn spectral(a: &SequenceArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let seq = ctx.sequence(a, "0");
    if let Some(seq) = &seq {
        if seq.sizes.is_empty() {
            ctx.s.diagnostics.input("--ns is required");
        }
    }
    if !ctx.gate()? {
        return Ok(None);
    }
    let seq = ok(seq);
    let rows = spectral_experiment(&seq, &seq.sizes, &ctx.guards)?;
    let mut table = Table::new(&["n", "block_sizes", "top_eigenvalues", "gap_ratio", "bulk_ratio", "s_q2"]);
    for r in &rows {
        table.push(vec![
            r.n.into(),
            join(&r.block_sizes),
            join_floats(&r.top),
            r.gap_ratio.into(),
            r.bulk_ratio.into(),
            r.s_q2.into(),
        ]);
    }
    Ok(Some(Output::new(json!({ "spec": seq, "rows": rows }), table)))
}

fn limit_graph(a: &SequenceArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let seq = ctx.sequence(a, "0");
    if !ctx.gate()? {
        return Ok(None);
    }
    let seq = ok(seq);
    let h = limit_factor_graph(&seq)?;
    if seq.sizes.is_empty() {
        let mut table = Table::new(&["cluster", "vweight", "eweights"]);
        for i in 0..h.q {
            table.push(vec![i.into(), h.vweights[i].into(), join_floats(h.eweights.row(i))]);
        }
        return Ok(Some(Output::new(json!({ "limit": h }), table)));
    }
    let rows = density_convergence(&seq, &seq.sizes, &ctx.guards)?;
    let mut table = Table::new(&["n", "d1_to_limit", "f_q", "f_q_planted", "planted_cut"]);
    for r in &rows {
        table.push(vec![
            r.n.into(),
            r.d1_to_limit.into(),
            r.f_q.into(),
            r.f_q_planted.into(),
            r.planted_cut.into(),
        ]);
    }
    Ok(Some(Output::new(json!({ "limit": h, "convergence": rows }), table)))
}

fn mu_demo(a: &MuDemoArgs, ctx: &mut Ctx) -> CliResult<Option<Output>> {
    let ns: Option<Vec<usize>> = ctx.s.list("ns", a.ns.as_deref(), Some("16,25,36,49,64"));
    if let Some(&n) = ns.iter().flatten().find(|&&n| n < 3) {
        ctx.s.diagnostics.input(format!("--ns: n = {n} is below 3"));
    }
    if !ctx.gate()? {
        return Ok(None);
    }
    let rows = pendant_clique_demo(&ok(ns), &ctx.guards)?;
    let mut table = Table::new(&["n", "mu_graph", "mu_clique"]);
    for r in &rows {
        table.push(vec![r.n.into(), r.mu_graph.into(), r.mu_clique.into()]);
    }
    Ok(Some(Output::new(json!({ "rows": rows }), table)))
}

/// Exit with a plain failure when the output cannot be written.
pub fn write_output(path: Option<&std::path::Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::failure(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
