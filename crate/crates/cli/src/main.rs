//! `evcsp` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 infeasible instance.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use evcsp::bench;
use evcsp::cro::{self, CroParams, PerturbationMode};
use evcsp::exact::{self, Limits, ReductionInput};
use evcsp::feasibility::{self, C1Reading, FlowOutcome};
use evcsp::greedy;
use evcsp::instance::{generate_with, RandomParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use evcsp::io::{self, CheckDoc, CsvRow, ReportDoc, RunDoc, SelectionDoc};
use evcsp::{Error, Instance, SolveReport};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "evcsp", version, about = "Charging station placement solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Method1,
    Method3,
    Greedy,
    Cro,
    Brute,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random geometric instance.
    Gen {
        #[arg(long)]
        n: usize,
        /// Side of the square area in km.
        #[arg(long, default_value_t = 100.0)]
        area: f64,
        #[arg(long = "D", default_value_t = 20.0)]
        range: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        capacity: f64,
        #[arg(long, default_value_t = 1.0)]
        demand: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Redraw from the same stream until the instance is feasible.
        #[arg(long)]
        resample: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an instance, or a selection on it, and print a JSON report.
    Check {
        #[arg(long)]
        instance: PathBuf,
        /// JSON file with `selected` (1-based ids); solve reports work too.
        #[arg(long)]
        selection: Option<PathBuf>,
        /// Root for the flow certificate (1-based); defaults to the lowest
        /// selected id.
        #[arg(long)]
        root: Option<usize>,
        /// Require every pair of selected sites to be within range.
        #[arg(long)]
        strict_c1: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance.
    Solve {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        instance: PathBuf,
        /// Report file: CSV when the name ends in `.csv`, JSON otherwise.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        node_limit: Option<u64>,
        /// Solve exact roots on all cores.
        #[arg(long)]
        parallel: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CRO runs, seeded seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        repeats: u64,
        #[arg(long)]
        fe_limit: Option<u64>,
        /// CRO collisions run greedy elimination without perturbation.
        #[arg(long)]
        paper_pure: bool,
        /// Also write `<out>.trace.csv`: removals for greedy, best objective
        /// per evaluation for CRO.
        #[arg(long)]
        trace: bool,
    },
    /// Run an experiment config and write CSV and JSON reports.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
    },
    /// Write the rooted flow model in LP format.
    ExportMilp {
        #[arg(long)]
        instance: PathBuf,
        /// 1-based root.
        #[arg(long)]
        root: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a vertex cover instance and decide it.
    ReduceVcp {
        /// JSON `{"vertices": n, "edges": [[i, j], ...]}` with 1-based ids.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        bound: u64,
        /// Where to write the reduced instance.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

/// Marks an error as a usage/validation failure (exit 1) or an infeasible
/// instance (exit 2).
enum Failure {
    Usage(anyhow::Error),
    Infeasible(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::InfeasibleInstance) => Failure::Infeasible(format!("{e:#}")),
            _ => Failure::Usage(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::from(e))
    }
}

type Outcome = Result<(), Failure>;

fn load(path: &Path) -> anyhow::Result<Instance> {
    io::load_instance(path).with_context(|| format!("loading {}", path.display()))
}

fn write(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Gen {
            n,
            area,
            range,
            alpha,
            capacity,
            demand,
            seed,
            resample,
            out,
        } => {
            let params = RandomParams {
                n,
                width_km: area,
                height_km: area,
                range_km: range,
                alpha,
                capacity,
                demand,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let name = format!("random-n{n}-s{seed}");
            let mut draws = 0u64;
            let (inst, reach) = loop {
                draws += 1;
                let inst = generate_with(&params, &mut rng, name.clone())?;
                let reach = inst.reach_graph()?;
                if !resample || feasibility::instance_feasible(&inst, &reach) {
                    break (inst, reach);
                }
                if draws >= 100_000 {
                    return Err(Failure::Infeasible(format!("no feasible draw in {draws} attempts")));
                }
            };
            io::save_instance(&inst, &out)?;
            println!(
                "{}: n={} edges={} draws={} feasible={}",
                inst.name(),
                n,
                reach.edge_count(),
                draws,
                feasibility::instance_feasible(&inst, &reach)
            );
            Ok(())
        }
        Command::Check {
            instance,
            selection,
            root,
            strict_c1,
            out,
        } => check(&instance, selection.as_deref(), root, strict_c1, out.as_deref()),
        Command::Solve {
            method,
            instance,
            out,
            time_limit,
            node_limit,
            parallel,
            seed,
            repeats,
            fe_limit,
            paper_pure,
            trace,
        } => {
            let inst = load(&instance)?;
            let limits = Limits {
                node_limit,
                time_limit: time_limit.map(Duration::from_secs_f64),
                parallel,
            };
            let mut params = CroParams::default();
            if let Some(fe) = fe_limit {
                params.fe_limit = fe;
            }
            if paper_pure {
                params.perturbation_mode = PerturbationMode::PaperPure;
            }
            if repeats == 0 {
                return Err(Failure::Usage(anyhow::anyhow!("--repeats must be at least 1")));
            }
            solve(method, &inst, &out, &limits, &params, seed, repeats, trace)
        }
        Command::Bench { config, out } => {
            let cfg = bench::load_config(&config).with_context(|| format!("loading {}", config.display()))?;
            let base = config.parent().unwrap_or(Path::new("."));
            let report = bench::run(&cfg, base)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            fs::write(out.join("rows.csv"), io::write_csv(&report.rows)?).context("writing rows.csv")?;
            fs::write(out.join("summary.csv"), io::write_csv(&report.aggregates)?).context("writing summary.csv")?;
            fs::write(out.join("cases.csv"), io::write_csv(&report.cases)?).context("writing cases.csv")?;
            if !report.traces.is_empty() {
                fs::write(out.join("traces.csv"), io::write_csv(&report.traces)?).context("writing traces.csv")?;
                fs::write(out.join("convergence.csv"), io::write_csv(&report.convergence)?)
                    .context("writing convergence.csv")?;
            }
            fs::write(out.join("report.json"), json(&report)).context("writing report.json")?;
            print!("{}", io::write_csv(&report.cases)?);
            for note in &report.notes {
                println!("# {note}");
            }
            Ok(())
        }
        Command::ExportMilp { instance, root, out } => {
            let inst = load(&instance)?;
            if root == 0 {
                return Err(Failure::Usage(anyhow::anyhow!("--root is 1-based")));
            }
            let reach = inst.reach_graph()?;
            write(out.as_deref(), &exact::export_milp(&inst, &reach, root - 1)?)?;
            Ok(())
        }
        Command::ReduceVcp { graph, bound, out } => {
            let text = fs::read_to_string(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let doc: GraphDoc = io::parse_json(&text)?;
            let mut edges = Vec::with_capacity(doc.edges.len());
            for (k, [a, b]) in doc.edges.iter().copied().enumerate() {
                if a == 0 || b == 0 {
                    return Err(Failure::Usage(anyhow::anyhow!("edges[{k}]: ids are 1-based")));
                }
                edges.push((a - 1, b - 1));
            }
            let input = ReductionInput::new(doc.vertices, edges, bound)?;
            let inst = exact::reduce_vertex_cover(&input)?;
            if let Some(p) = &out {
                io::save_instance(&inst, p)?;
            }
            let reach = inst.reach_graph()?;
            let r = exact::method1(&inst, &reach, &Limits::none())?;
            let cost = r.objective.expect("reduced instances are feasible");
            let yes = cost <= bound as f64;
            println!("optimum {cost} ({} stations); cost <= {bound}: {}", r.stations, if yes { "yes" } else { "no" });
            Ok(())
        }
    }
}

fn check(
    instance: &Path,
    selection: Option<&Path>,
    root: Option<usize>,
    strict_c1: bool,
    out: Option<&Path>,
) -> Outcome {
    let inst = load(instance)?;
    let reach = inst.reach_graph()?;
    let Some(sel) = selection else {
        let feasible = feasibility::instance_feasible(&inst, &reach);
        let report = serde_json::json!({
            "instance": inst.name(),
            "nodes": inst.node_count(),
            "reach_edges": reach.edge_count(),
            "feasible": feasible,
        });
        write(out, &json(&report))?;
        if !feasible {
            return Err(Failure::Infeasible(
                "no selection meets demand while staying connected".into(),
            ));
        }
        return Ok(());
    };
    let text = fs::read_to_string(sel).with_context(|| format!("reading {}", sel.display()))?;
    let x = io::parse_json::<SelectionDoc>(&text)?.to_solution(inst.node_count())?;
    let reading = if strict_c1 { C1Reading::Strict } else { C1Reading::Reflexive };
    let report = feasibility::feasibility_report(&inst, &reach, x.as_slice(), reading)?;
    let mut doc = CheckDoc::new(&inst, &x, &report);
    let root = match root {
        Some(0) => return Err(Failure::Usage(anyhow::anyhow!("--root is 1-based"))),
        Some(r) => Some(r - 1),
        None => x.selected().first().copied(),
    };
    if let Some(r) = root {
        if let FlowOutcome::Certified(cert) = feasibility::construct_flow_certificate(&reach, x.as_slice(), r)? {
            doc.certificate_valid = Some(feasibility::verify_flow_certificate(&cert, &reach, x.as_slice()));
            doc.certificate = Some((&cert).into());
        }
    }
    write(out, &json(&doc))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    method: MethodArg,
    inst: &Instance,
    out: &Path,
    limits: &Limits,
    params: &CroParams,
    seed: u64,
    repeats: u64,
    trace: bool,
) -> Outcome {
    if trace && !matches!(method, MethodArg::Greedy | MethodArg::Cro) {
        return Err(Failure::Usage(anyhow::anyhow!(
            "--trace is only available for greedy and cro"
        )));
    }
    let reach = inst.reach_graph()?;
    let mut runs: Vec<SolveReport> = Vec::new();
    let mut trace_csv = None;
    let best = match method {
        MethodArg::Method1 => exact::method1(inst, &reach, limits)?,
        MethodArg::Method3 => exact::method3(inst, &reach, limits)?,
        MethodArg::Brute => exact::brute_force(inst, &reach)?,
        MethodArg::Greedy => {
            let (report, removals) = greedy::greedy_traced(inst, &reach);
            let rows: Vec<_> = removals
                .iter()
                .map(|r| io::RemovalRow {
                    iteration: r.iteration,
                    removed: r.removed + 1,
                    objective: r.objective,
                })
                .collect();
            trace_csv = Some(io::write_csv(&rows)?);
            report
        }
        MethodArg::Cro => {
            let seeds: Vec<u64> = (seed..seed + repeats).collect();
            let results = cro::cro_repeats(inst, &reach, params, &seeds)?;
            let mut rows = Vec::new();
            for (k, (_, t)) in results.iter().enumerate() {
                rows.extend(t.points.iter().map(|p| io::TraceRowDoc {
                    seed: seeds[k],
                    fe: p.fe,
                    best: p.best,
                }));
            }
            trace_csv = Some(io::write_csv(&rows)?);
            runs = results.into_iter().map(|(r, _)| r).collect();
            let best = runs
                .iter()
                .min_by(|a, b| a.objective.unwrap_or(f64::INFINITY).total_cmp(&b.objective.unwrap_or(f64::INFINITY)))
                .expect("at least one run")
                .clone();
            best
        }
    };

    let is_csv = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if is_csv {
        let rows: Vec<CsvRow> = if runs.is_empty() {
            vec![CsvRow::from(&best)]
        } else {
            runs.iter().map(CsvRow::from).collect()
        };
        io::write_csv(&rows)?
    } else {
        let mut doc = ReportDoc::new(inst, &best);
        doc.runs = runs
            .iter()
            .zip(seed..)
            .map(|(r, s)| RunDoc {
                seed: s,
                objective: r.objective,
                stations: r.stations,
                time_s: r.wall_time.as_secs_f64(),
            })
            .collect();
        json(&doc)
    };
    write(Some(out), &text)?;
    if trace {
        let t = trace_csv.expect("traced methods fill the trace");
        let mut name = out.as_os_str().to_owned();
        name.push(".trace.csv");
        write(Some(Path::new(&name)), &t)?;
    }
    match best.objective {
        Some(obj) => {
            println!(
                "{}: objective {obj} with {} stations {:?}{}",
                best.method,
                best.stations,
                best.station_ids(),
                if best.optimal { " (optimal)" } else { "" }
            );
            Ok(())
        }
        None if best.optimal || matches!(method, MethodArg::Greedy) => Err(Failure::Infeasible(
            "no feasible selection exists".into(),
        )),
        None => Err(Failure::Usage(anyhow::anyhow!(
            "no feasible selection found before the search limit"
        ))),
    }
}
