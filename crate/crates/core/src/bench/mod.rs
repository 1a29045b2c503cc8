//! Experiment harness.
//!
//! Every experiment expands a config into *cases* (one instance each), runs
//! the requested methods on the feasible ones, and returns one row per run.
//! Aggregates and matched-case counts are derived from the rows, so they can
//! be recomputed from a saved CSV.

pub mod hk;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cro::{self, CroParams};
use crate::error::{Error, Result};
use crate::exact::{self, Limits};
use crate::feasibility;
use crate::greedy;
use crate::instance::{generate_with, DistanceMatrix, Instance, RandomParams};
use crate::report::{Method, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    AlphaSweep,
    SizeScaling,
    DatasetRun,
    Convergence,
}

/// Seeds as an explicit list or as `{"start": s, "count": k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl Seeds {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Range { start, count } => (*start..start + count).collect(),
        }
    }
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::List(vec![0])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsConfig {
    pub node_limit: Option<u64>,
    pub time_limit_s: Option<f64>,
    /// Solve the roots of one exact search concurrently.
    pub parallel_roots: bool,
}

impl LimitsConfig {
    pub fn to_limits(&self) -> Limits {
        Limits {
            node_limit: self.node_limit,
            time_limit: self.time_limit_s.map(Duration::from_secs_f64),
            parallel: self.parallel_roots,
        }
    }
}

fn default_n() -> Vec<usize> {
    vec![50]
}
fn default_alpha() -> Vec<f64> {
    vec![1.0]
}
fn default_range() -> Vec<f64> {
    vec![20.0]
}
fn default_area() -> f64 {
    100.0
}
fn default_capacity() -> f64 {
    0.5
}
fn default_demand() -> f64 {
    1.0
}
fn default_repeats() -> usize {
    10
}
fn default_methods() -> Vec<Method> {
    vec![Method::Method1, Method::Greedy, Method::Method3, Method::Cro]
}
fn default_checkpoint() -> u64 {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_n")]
    pub n: Vec<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: Vec<f64>,
    #[serde(rename = "D_km", default = "default_range")]
    pub range_km: Vec<f64>,
    /// Side of the square generation area.
    #[serde(default = "default_area")]
    pub area_km: f64,
    #[serde(default = "default_capacity")]
    pub capacity: f64,
    #[serde(default = "default_demand")]
    pub demand: f64,
    #[serde(default)]
    pub seeds: Seeds,
    /// CRO runs per case, seeded 0..repeats.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub limits: LimitsConfig,
    #[serde(default)]
    pub cro: CroParams,
    /// Redraw each seed's instance until some selection is feasible
    /// at the largest `alpha`. Coordinates are then shared by every `alpha`.
    #[serde(default)]
    pub resample_until_feasible: bool,
    /// Dataset runs: matrix file, relative to the config file. Absent means
    /// the synthetic matrix.
    #[serde(default)]
    pub distance_matrix: Option<PathBuf>,
    /// Convergence runs: report whether each run's final value was reached
    /// by this many evaluations.
    #[serde(default = "default_checkpoint")]
    pub checkpoint_fe: u64,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            n: default_n(),
            alpha: default_alpha(),
            range_km: default_range(),
            area_km: default_area(),
            capacity: default_capacity(),
            demand: default_demand(),
            seeds: Seeds::default(),
            repeats: default_repeats(),
            methods: default_methods(),
            limits: LimitsConfig::default(),
            cro: CroParams::default(),
            resample_until_feasible: false,
            distance_matrix: None,
            checkpoint_fe: default_checkpoint(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::invalid("repeats", "must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "at least one method is required"));
        }
        if self.methods.contains(&Method::Rooted) {
            return Err(Error::invalid("methods", "rooted is not a benchmark method"));
        }
        for (k, a) in self.alpha.iter().enumerate() {
            if !(*a > 0.0 && *a <= 1.0) {
                return Err(Error::invalid(format!("alpha[{k}]"), "alpha outside (0,1]"));
            }
        }
        if self.alpha.is_empty() || self.range_km.is_empty() || self.n.is_empty() {
            return Err(Error::invalid("alpha", "alpha, D_km and n lists must be nonempty"));
        }
        self.cro.validate()
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = crate::io::parse_json(&std::fs::read_to_string(path)?)?;
    config.validate()?;
    Ok(config)
}

/// One solver run on one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    #[serde(rename = "D_km")]
    pub range_km: f64,
    pub alpha: f64,
    pub seed: u64,
    pub method: Method,
    /// CRO run index; empty for deterministic methods.
    pub repeat: Option<usize>,
    pub feasible: bool,
    pub objective: Option<f64>,
    pub stations: usize,
    /// 1-based ids, space separated.
    pub selected: String,
    pub time_s: f64,
    pub optimal: bool,
}

impl BenchRow {
    pub fn selected_ids(&self) -> Vec<usize> {
        self.selected
            .split_whitespace()
            .map(|s| s.parse().expect("ids are integers"))
            .collect()
    }
}

/// Per (n, D, α, method) means over feasible cases. For CRO, `mean_*` is
/// over every run and `mean_best`/`mean_worst` over the per-case best and
/// worst run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    #[serde(rename = "D_km")]
    pub range_km: f64,
    pub alpha: f64,
    pub method: Method,
    pub cases: usize,
    pub feasible: usize,
    pub mean_objective: Option<f64>,
    pub mean_stations: Option<f64>,
    pub mean_time_s: Option<f64>,
    pub mean_best: Option<f64>,
    pub mean_worst: Option<f64>,
    pub all_optimal: bool,
}

/// Per (n, D, α): how many cases were feasible and how many of those had
/// every method agree on the objective (CRO by its best run).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub n: usize,
    #[serde(rename = "D_km")]
    pub range_km: f64,
    pub alpha: f64,
    pub cases: usize,
    pub feasible: usize,
    pub matched: usize,
    /// Total instance draws when resampling.
    pub draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub seed: u64,
    pub run: usize,
    pub fe: u64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub n: usize,
    pub seed: u64,
    pub run: usize,
    pub final_best: f64,
    pub best_at_checkpoint: f64,
    pub converged_by_checkpoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: ExperimentConfig,
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<Aggregate>,
    pub cases: Vec<CaseSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<TraceRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<ConvergenceSummary>,
    pub notes: Vec<String>,
}

const MATCH_NOTE: &str =
    "matched cases compare every method's objective, using the best of the CRO repeats";

pub fn same_objective(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn key(x: f64) -> u64 {
    x.to_bits()
}

/// Runs whichever experiment `config.kind` names. Relative paths resolve
/// against `base_dir`.
pub fn run(config: &ExperimentConfig, base_dir: &Path) -> Result<BenchReport> {
    config.validate()?;
    match config.kind {
        ExperimentKind::AlphaSweep => run_alpha_sweep(config),
        ExperimentKind::SizeScaling => run_size_scaling(config),
        ExperimentKind::DatasetRun => {
            let matrix = match &config.distance_matrix {
                Some(p) => hk::load_matrix(base_dir.join(p))?,
                None => hk::synthetic_matrix(),
            };
            run_dataset(config, &matrix)
        }
        ExperimentKind::Convergence => run_convergence(config),
    }
}

/// The instance for one generated case and the number of draws it took.
/// `None` when resampling gave up.
pub fn case_instance(
    config: &ExperimentConfig,
    n: usize,
    range_km: f64,
    seed: u64,
) -> Result<Option<(Instance, u64)>> {
    let alpha = config.alpha.iter().copied().fold(f64::MIN, f64::max);
    let params = RandomParams {
        n,
        width_km: config.area_km,
        height_km: config.area_km,
        range_km,
        alpha,
        capacity: config.capacity,
        demand: config.demand,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = format!("random-n{n}-s{seed}");
    const MAX_DRAWS: u64 = 100_000;
    for draw in 1..=MAX_DRAWS {
        let inst = generate_with(&params, &mut rng, name.clone())?;
        if !config.resample_until_feasible {
            return Ok(Some((inst, draw)));
        }
        let reach = inst.reach_graph()?;
        if feasibility::instance_feasible(&inst, &reach) {
            return Ok(Some((inst, draw)));
        }
    }
    Ok(None)
}

fn row_from(
    inst: &Instance,
    seed: u64,
    report: &SolveReport,
    repeat: Option<usize>,
) -> BenchRow {
    BenchRow {
        n: inst.node_count(),
        range_km: inst.range_km(),
        alpha: inst.alpha(),
        seed,
        method: report.method,
        repeat,
        feasible: true,
        objective: report.objective,
        stations: report.stations,
        selected: report
            .station_ids()
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" "),
        time_s: report.wall_time.as_secs_f64(),
        optimal: report.optimal,
    }
}

fn infeasible_row(inst: &Instance, seed: u64, method: Method) -> BenchRow {
    BenchRow {
        n: inst.node_count(),
        range_km: inst.range_km(),
        alpha: inst.alpha(),
        seed,
        method,
        repeat: None,
        feasible: false,
        objective: None,
        stations: 0,
        selected: String::new(),
        time_s: 0.0,
        optimal: false,
    }
}

/// Runs every configured method on one instance.
pub fn run_methods(config: &ExperimentConfig, inst: &Instance, seed: u64) -> Result<Vec<BenchRow>> {
    let reach = inst.reach_graph()?;
    if !feasibility::instance_feasible(inst, &reach) {
        return Ok(config.methods.iter().map(|&m| infeasible_row(inst, seed, m)).collect());
    }
    let limits = config.limits.to_limits();
    let mut rows = Vec::new();
    for &method in &config.methods {
        match method {
            Method::Method1 => rows.push(row_from(inst, seed, &exact::method1(inst, &reach, &limits)?, None)),
            Method::Method3 => rows.push(row_from(inst, seed, &exact::method3(inst, &reach, &limits)?, None)),
            Method::Greedy => rows.push(row_from(inst, seed, &greedy::greedy(inst, &reach), None)),
            Method::Brute => rows.push(row_from(inst, seed, &exact::brute_force(inst, &reach)?, None)),
            Method::Cro => {
                let seeds: Vec<u64> = (0..config.repeats as u64).collect();
                for (k, (r, _)) in cro::cro_repeats(inst, &reach, &config.cro, &seeds)?.iter().enumerate() {
                    rows.push(row_from(inst, seed, r, Some(k)));
                }
            }
            Method::Rooted => return Err(Error::invalid("methods", "rooted is not a benchmark method")),
        }
    }
    Ok(rows)
}

fn run_grid(config: &ExperimentConfig) -> Result<BenchReport> {
    config.validate()?;
    let seeds = config.seeds.expand();
    let mut jobs = Vec::new();
    for &n in &config.n {
        for &d in &config.range_km {
            for &seed in &seeds {
                jobs.push((n, d, seed));
            }
        }
    }
    let per_job: Vec<(Vec<BenchRow>, Vec<(usize, f64, u64)>)> = jobs
        .par_iter()
        .map(|&(n, d, seed)| -> Result<_> {
            let mut rows = Vec::new();
            let mut draws = Vec::new();
            let Some((base, used)) = case_instance(config, n, d, seed)? else {
                return Ok((rows, draws));
            };
            draws.push((n, d, used));
            for &alpha in &config.alpha {
                let inst = base.with_alpha(alpha)?;
                rows.extend(run_methods(config, &inst, seed)?);
            }
            Ok((rows, draws))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut draws: BTreeMap<(usize, u64), u64> = BTreeMap::new();
    for (r, d) in per_job {
        rows.extend(r);
        for (n, range, used) in d {
            *draws.entry((n, key(range))).or_default() += used;
        }
    }
    let mut report = assemble(config.clone(), rows);
    for c in &mut report.cases {
        c.draws = draws.get(&(c.n, key(c.range_km))).copied().unwrap_or(0);
    }
    if config.resample_until_feasible {
        report.notes.push(
            "instances redrawn until feasible at the largest alpha; draws counts every attempt".into(),
        );
    }
    Ok(report)
}

/// Feasibility and method comparison over an α grid (fixed n and D).
pub fn run_alpha_sweep(config: &ExperimentConfig) -> Result<BenchReport> {
    run_grid(config)
}

/// Timing and objectives over a list of n.
pub fn run_size_scaling(config: &ExperimentConfig) -> Result<BenchReport> {
    run_grid(config)
}

/// The Hong Kong instance over the configured D × α grid.
pub fn run_dataset(config: &ExperimentConfig, matrix: &DistanceMatrix) -> Result<BenchReport> {
    config.validate()?;
    let mut cells = Vec::new();
    for &alpha in &config.alpha {
        for &d in &config.range_km {
            cells.push(hk::instance(matrix.clone(), d, alpha)?);
        }
    }
    let rows: Vec<Vec<BenchRow>> = cells
        .par_iter()
        .map(|inst| run_methods(config, inst, 0))
        .collect::<Result<_>>()?;
    let mut report = assemble(config.clone(), rows.into_iter().flatten().collect());
    if config.distance_matrix.is_none() {
        report.notes.push(hk::SYNTHETIC_NOTE.to_string());
    }
    Ok(report)
}

/// CRO traces on generated instances: one trace per (n, seed, run).
pub fn run_convergence(config: &ExperimentConfig) -> Result<BenchReport> {
    config.validate()?;
    let seeds = config.seeds.expand();
    let alpha = config.alpha[0];
    let d = config.range_km[0];
    let mut jobs = Vec::new();
    for &n in &config.n {
        for &seed in &seeds {
            jobs.push((n, seed));
        }
    }
    type Job = (Vec<BenchRow>, Vec<TraceRow>, Vec<ConvergenceSummary>, u64);
    let per_job: Vec<(usize, Job)> = jobs
        .par_iter()
        .map(|&(n, seed)| -> Result<_> {
            let mut out = (Vec::new(), Vec::new(), Vec::new(), 0);
            let Some((base, used)) = case_instance(config, n, d, seed)? else {
                return Ok((n, out));
            };
            out.3 = used;
            let inst = base.with_alpha(alpha)?;
            let reach = inst.reach_graph()?;
            if !feasibility::instance_feasible(&inst, &reach) {
                out.0.push(infeasible_row(&inst, seed, Method::Cro));
                return Ok((n, out));
            }
            let runs: Vec<u64> = (0..config.repeats as u64).collect();
            for (k, (report, trace)) in cro::cro_repeats(&inst, &reach, &config.cro, &runs)?.into_iter().enumerate() {
                out.0.push(row_from(&inst, seed, &report, Some(k)));
                let final_best = trace.points.last().map_or(f64::INFINITY, |p| p.best);
                let at = trace
                    .points
                    .iter()
                    .take_while(|p| p.fe <= config.checkpoint_fe)
                    .last()
                    .map_or(f64::INFINITY, |p| p.best);
                out.2.push(ConvergenceSummary {
                    n,
                    seed,
                    run: k,
                    final_best,
                    best_at_checkpoint: at,
                    converged_by_checkpoint: at <= final_best,
                });
                out.1.extend(trace.points.iter().map(|p| TraceRow {
                    n,
                    seed,
                    run: k,
                    fe: p.fe,
                    best: p.best,
                }));
            }
            Ok((n, out))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    let mut summary = Vec::new();
    let mut draws: BTreeMap<usize, u64> = BTreeMap::new();
    for (n, (r, t, s, used)) in per_job {
        rows.extend(r);
        traces.extend(t);
        summary.extend(s);
        *draws.entry(n).or_default() += used;
    }
    let mut report = assemble(config.clone(), rows);
    for c in &mut report.cases {
        c.draws = draws.get(&c.n).copied().unwrap_or(0);
    }
    report.traces = traces;
    report.convergence = summary;
    Ok(report)
}

/// Builds aggregates and case summaries from rows.
pub fn assemble(config: ExperimentConfig, rows: Vec<BenchRow>) -> BenchReport {
    let methods = config.methods.clone();
    let (aggregates, cases) = summarize(&rows, &methods);
    BenchReport {
        config,
        rows,
        aggregates,
        cases,
        traces: Vec::new(),
        convergence: Vec::new(),
        notes: vec![MATCH_NOTE.to_string()],
    }
}

type GroupKey = (usize, u64, u64);

/// Aggregates and matched-case counts for `rows`.
pub fn summarize(rows: &[BenchRow], methods: &[Method]) -> (Vec<Aggregate>, Vec<CaseSummary>) {
    // case -> method -> objectives of the runs
    let mut by_case: BTreeMap<(GroupKey, u64), BTreeMap<Method, Vec<&BenchRow>>> = BTreeMap::new();
    for r in rows {
        let g = (r.n, key(r.range_km), key(r.alpha));
        by_case.entry((g, r.seed)).or_default().entry(r.method).or_default().push(r);
    }

    let mut summaries: BTreeMap<GroupKey, CaseSummary> = BTreeMap::new();
    let mut groups: BTreeMap<(GroupKey, Method), Vec<Vec<&BenchRow>>> = BTreeMap::new();
    for ((g, _seed), per_method) in &by_case {
        let any = per_method.values().next().and_then(|v| v.first()).expect("nonempty case");
        let s = summaries.entry(*g).or_insert_with(|| CaseSummary {
            n: any.n,
            range_km: any.range_km,
            alpha: any.alpha,
            cases: 0,
            feasible: 0,
            matched: 0,
            draws: 0,
        });
        s.cases += 1;
        let feasible = per_method.values().flatten().all(|r| r.feasible);
        if feasible {
            s.feasible += 1;
            let bests: Vec<Option<f64>> = methods
                .iter()
                .map(|m| {
                    per_method
                        .get(m)
                        .and_then(|runs| runs.iter().filter_map(|r| r.objective).reduce(f64::min))
                })
                .collect();
            if let Some(Some(first)) = bests.first() {
                if bests.iter().all(|b| b.is_some_and(|b| same_objective(b, *first))) {
                    s.matched += 1;
                }
            }
        }
        for (m, runs) in per_method {
            groups.entry((*g, *m)).or_default().push(runs.clone());
        }
    }

    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let mut aggregates = Vec::new();
    for ((_, method), cases) in &groups {
        let first = cases[0][0];
        let feasible: Vec<&Vec<&BenchRow>> = cases.iter().filter(|c| c.iter().all(|r| r.feasible)).collect();
        let runs: Vec<&BenchRow> = feasible.iter().flat_map(|c| c.iter().copied()).collect();
        let objectives: Vec<f64> = runs.iter().filter_map(|r| r.objective).collect();
        let stations: Vec<f64> = runs.iter().map(|r| r.stations as f64).collect();
        let times: Vec<f64> = runs.iter().map(|r| r.time_s).collect();
        let best: Vec<f64> = feasible
            .iter()
            .filter_map(|c| c.iter().filter_map(|r| r.objective).reduce(f64::min))
            .collect();
        let worst: Vec<f64> = feasible
            .iter()
            .filter_map(|c| c.iter().filter_map(|r| r.objective).reduce(f64::max))
            .collect();
        aggregates.push(Aggregate {
            n: first.n,
            range_km: first.range_km,
            alpha: first.alpha,
            method: *method,
            cases: cases.len(),
            feasible: feasible.len(),
            mean_objective: mean(&objectives),
            mean_stations: mean(&stations),
            mean_time_s: mean(&times),
            mean_best: mean(&best),
            mean_worst: mean(&worst),
            all_optimal: runs.iter().all(|r| r.optimal),
        });
    }
    (aggregates, summaries.into_values().collect())
}
