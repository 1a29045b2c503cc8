//! JSON documents and CSV rows.
//!
//! Documents use 1-based node ids. A geometric document looks like
//!
//! ```json
//! {
//!   "name": "T1", "mode": "geometric", "alpha": 1.0, "D_km": 12.0,
//!   "complete_euclidean": true,
//!   "nodes": [
//!     {"id": 1, "x_km": 0.0,  "y_km": 0.0, "cost": 1.0, "capacity": 1.0, "demand": 1.0},
//!     {"id": 2, "x_km": 10.0, "y_km": 0.0, "cost": 2.0, "capacity": 1.0, "demand": 1.0},
//!     {"id": 3, "x_km": 20.0, "y_km": 0.0, "cost": 3.0, "capacity": 1.0, "demand": 1.0}
//!   ]
//! }
//! ```
//!
//! Road networks go in `edges: [{"i", "j", "length_km"}]`; a precomputed
//! matrix goes in `distance_matrix` (row-major, `null` for unreachable
//! pairs). Explicit documents carry `reach_edges: [[i, j]]` (or per-node
//! `adjacency` lists) and `neighborhoods`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityReport, FlowCertificate, Solution};
use crate::instance::{DistanceMatrix, Instance, Layout, Mode, Point, RoadEdge, Roads, Site};
use crate::report::{RootOutcome, SolveReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_km: Option<f64>,
    pub cost: f64,
    pub capacity: f64,
    pub demand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub i: usize,
    pub j: usize,
    pub length_km: f64,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub name: String,
    pub mode: Mode,
    pub alpha: f64,
    #[serde(rename = "D_km")]
    pub range_km: f64,
    pub nodes: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeDoc>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub complete_euclidean: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reach_edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighborhoods: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_matrix: Option<Vec<Option<f64>>>,
}

/// Converts a 1-based id at `path` to a 0-based index below `n`.
fn index(id: usize, n: usize, path: impl FnOnce() -> String) -> Result<usize> {
    if id == 0 || id > n {
        return Err(Error::invalid(path(), format!("node id {id} outside 1..={n}")));
    }
    Ok(id - 1)
}

impl InstanceDoc {
    pub fn into_instance(self) -> Result<Instance> {
        let n = self.nodes.len();
        let mut sites = Vec::with_capacity(n);
        for (k, node) in self.nodes.iter().enumerate() {
            if node.id != k + 1 {
                return Err(Error::invalid(
                    format!("nodes[{k}].id"),
                    format!("expected id {} (ids are 1-based and in order)", k + 1),
                ));
            }
            let mut site = Site::new(node.cost, node.capacity, node.demand);
            match (node.x_km, node.y_km) {
                (Some(x), Some(y)) => site.position = Some(Point::new(x, y)),
                (None, None) => {}
                _ => {
                    return Err(Error::invalid(
                        format!("nodes[{k}]"),
                        "x_km and y_km must be given together",
                    ))
                }
            }
            sites.push(site);
        }

        let layout = match self.mode {
            Mode::Geometric => {
                for field in [
                    ("reach_edges", self.reach_edges.is_some()),
                    ("adjacency", self.adjacency.is_some()),
                    ("neighborhoods", self.neighborhoods.is_some()),
                ] {
                    if field.1 {
                        return Err(Error::invalid(field.0, "only allowed in explicit mode"));
                    }
                }
                let roads = match (self.complete_euclidean, self.edges) {
                    (true, Some(_)) => {
                        return Err(Error::invalid(
                            "edges",
                            "cannot be combined with complete_euclidean",
                        ))
                    }
                    (true, None) => Some(Roads::CompleteEuclidean),
                    (false, Some(edges)) => {
                        let mut out = Vec::with_capacity(edges.len());
                        for (k, e) in edges.iter().enumerate() {
                            let a = index(e.i, n, || format!("edges[{k}].i"))?;
                            let b = index(e.j, n, || format!("edges[{k}].j"))?;
                            out.push(RoadEdge {
                                a,
                                b,
                                length_km: e.length_km,
                            });
                        }
                        Some(Roads::Edges(out))
                    }
                    (false, None) => None,
                };
                let distances = match self.distance_matrix {
                    None => None,
                    Some(flat) => {
                        if flat.len() != n * n {
                            return Err(Error::invalid(
                                "distance_matrix",
                                format!("expected {} entries ({n}x{n}), found {}", n * n, flat.len()),
                            ));
                        }
                        let d = flat.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
                        Some(DistanceMatrix::from_row_major(n, d).map_err(|e| match e {
                            Error::Invalid { path, message } => {
                                Error::invalid(format!("distance_matrix.{path}"), message)
                            }
                            other => other,
                        })?)
                    }
                };
                Layout::Geometric { roads, distances }
            }
            Mode::Explicit => {
                for field in [
                    ("edges", self.edges.is_some()),
                    ("complete_euclidean", self.complete_euclidean),
                    ("distance_matrix", self.distance_matrix.is_some()),
                ] {
                    if field.1 {
                        return Err(Error::invalid(field.0, "only allowed in geometric mode"));
                    }
                }
                let mut reach_edges = Vec::new();
                match (self.reach_edges, self.adjacency) {
                    (Some(_), Some(_)) => {
                        return Err(Error::invalid("adjacency", "give reach_edges or adjacency, not both"))
                    }
                    (None, None) => {
                        return Err(Error::invalid("reach_edges", "explicit mode needs reach_edges or adjacency"))
                    }
                    (Some(edges), None) => {
                        for (k, [a, b]) in edges.into_iter().enumerate() {
                            let a = index(a, n, || format!("reach_edges[{k}]"))?;
                            let b = index(b, n, || format!("reach_edges[{k}]"))?;
                            reach_edges.push((a, b));
                        }
                    }
                    (None, Some(adj)) => {
                        if adj.len() != n {
                            return Err(Error::invalid(
                                "adjacency",
                                format!("expected {n} lists, found {}", adj.len()),
                            ));
                        }
                        for (i, list) in adj.iter().enumerate() {
                            for &id in list {
                                let j = index(id, n, || format!("adjacency[{i}]"))?;
                                if !adj[j].contains(&(i + 1)) {
                                    return Err(Error::invalid(
                                        format!("adjacency[{i}]"),
                                        format!(
                                            "asymmetric adjacency: node {} lists {} but not the reverse",
                                            i + 1,
                                            j + 1
                                        ),
                                    ));
                                }
                                reach_edges.push((i, j));
                            }
                        }
                    }
                }
                let Some(hoods) = self.neighborhoods else {
                    return Err(Error::invalid("neighborhoods", "required in explicit mode"));
                };
                let mut neighborhoods = Vec::with_capacity(hoods.len());
                for (i, hood) in hoods.iter().enumerate() {
                    let mut out = Vec::with_capacity(hood.len());
                    for &id in hood {
                        out.push(index(id, n, || format!("neighborhoods[{i}]"))?);
                    }
                    neighborhoods.push(out);
                }
                Layout::Explicit {
                    reach_edges,
                    neighborhoods,
                }
            }
        };
        Instance::new(self.name, sites, self.range_km, self.alpha, layout)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let nodes = inst
            .sites()
            .iter()
            .enumerate()
            .map(|(k, s)| NodeDoc {
                id: k + 1,
                x_km: s.position.map(|p| p.x_km),
                y_km: s.position.map(|p| p.y_km),
                cost: s.cost,
                capacity: s.capacity,
                demand: s.demand,
            })
            .collect();
        let mut doc = InstanceDoc {
            name: inst.name().to_string(),
            mode: inst.mode(),
            alpha: inst.alpha(),
            range_km: inst.range_km(),
            nodes,
            edges: None,
            complete_euclidean: false,
            reach_edges: None,
            adjacency: None,
            neighborhoods: None,
            distance_matrix: None,
        };
        match inst.layout() {
            Layout::Geometric { roads, distances } => {
                match roads {
                    Some(Roads::CompleteEuclidean) => doc.complete_euclidean = true,
                    Some(Roads::Edges(edges)) => {
                        doc.edges = Some(
                            edges
                                .iter()
                                .map(|e| EdgeDoc {
                                    i: e.a + 1,
                                    j: e.b + 1,
                                    length_km: e.length_km,
                                })
                                .collect(),
                        )
                    }
                    None => {}
                }
                doc.distance_matrix = distances.as_ref().map(|d| {
                    d.as_row_major()
                        .iter()
                        .map(|&v| v.is_finite().then_some(v))
                        .collect()
                });
            }
            Layout::Explicit {
                reach_edges,
                neighborhoods,
            } => {
                doc.reach_edges = Some(reach_edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect());
                doc.neighborhoods = Some(
                    neighborhoods
                        .iter()
                        .map(|h| h.iter().map(|&j| j + 1).collect())
                        .collect(),
                );
            }
        }
        doc
    }
}

/// Deserializes `text` as `T`, reporting schema errors with their field path.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "document".to_string() } else { path };
        Error::invalid(path, e.into_inner().to_string())
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_json::<InstanceDoc>(text)?.into_instance()
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from_instance(inst)).expect("documents serialize")
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance_to_json(inst) + "\n")?;
    Ok(())
}

/// A selection by 1-based ids. Solve reports carry the same `selected`
/// field, so they can be fed back in as selections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionDoc {
    pub selected: Vec<usize>,
}

impl SelectionDoc {
    pub fn to_solution(&self, n: usize) -> Result<Solution> {
        let mut s = Solution::none(n);
        for (k, &id) in self.selected.iter().enumerate() {
            s.set(index(id, n, || format!("selected[{k}]"))?, true);
        }
        Ok(s)
    }

    pub fn from_solution(s: &Solution) -> Self {
        SelectionDoc {
            selected: s.selected().into_iter().map(|i| i + 1).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootDoc {
    pub root: usize,
    pub improved: Option<f64>,
    pub nodes_explored: u64,
    pub complete: bool,
}

/// A solve report with 1-based ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub instance: String,
    pub method: String,
    pub feasible: bool,
    pub objective: Option<f64>,
    pub stations: usize,
    pub selected: Vec<usize>,
    pub time_s: f64,
    pub nodes_explored: u64,
    pub optimal: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_root: Vec<RootDoc>,
    /// Individual runs of a repeated stochastic solve.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDoc {
    pub seed: u64,
    pub objective: Option<f64>,
    pub stations: usize,
    pub time_s: f64,
}

impl ReportDoc {
    pub fn new(inst: &Instance, r: &SolveReport) -> Self {
        ReportDoc {
            instance: inst.name().to_string(),
            method: r.method.to_string(),
            feasible: r.is_feasible(),
            objective: r.objective,
            stations: r.stations,
            selected: r.station_ids(),
            time_s: r.wall_time.as_secs_f64(),
            nodes_explored: r.nodes_explored,
            optimal: r.optimal,
            per_root: r
                .per_root
                .iter()
                .map(|o: &RootOutcome| RootDoc {
                    root: o.root + 1,
                    improved: o.improved,
                    nodes_explored: o.nodes_explored,
                    complete: o.complete,
                })
                .collect(),
            runs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcDoc {
    pub from: usize,
    pub to: usize,
    pub flow: i64,
}

/// Flow certificate with 1-based ids; the source is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub root: usize,
    pub residue: i64,
    pub source_flow: i64,
    pub arcs: Vec<ArcDoc>,
}

impl From<&FlowCertificate> for CertificateDoc {
    fn from(c: &FlowCertificate) -> Self {
        CertificateDoc {
            root: c.root + 1,
            residue: c.residue,
            source_flow: c.source_flow,
            arcs: c
                .arcs
                .iter()
                .map(|a| ArcDoc {
                    from: a.from + 1,
                    to: a.to + 1,
                    flow: a.flow,
                })
                .collect(),
        }
    }
}

/// Output of the `check` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub instance: String,
    pub selected: Vec<usize>,
    pub objective: f64,
    pub demand_ok: bool,
    pub violated: Vec<usize>,
    pub connectivity_ok: bool,
    pub c1_ok: bool,
    pub overall: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_valid: Option<bool>,
}

impl CheckDoc {
    pub fn new(inst: &Instance, x: &Solution, report: &FeasibilityReport) -> Self {
        CheckDoc {
            instance: inst.name().to_string(),
            selected: SelectionDoc::from_solution(x).selected,
            objective: x.objective(inst),
            demand_ok: report.demand_ok,
            violated: report.violated.iter().map(|i| i + 1).collect(),
            connectivity_ok: report.connectivity_ok,
            c1_ok: report.c1_ok,
            overall: report.overall,
            certificate: None,
            certificate_valid: None,
        }
    }
}

/// One CSV line of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub method: String,
    pub objective: Option<f64>,
    pub stations: usize,
    pub time_s: f64,
    pub optimal: bool,
}

impl From<&SolveReport> for CsvRow {
    fn from(r: &SolveReport) -> Self {
        CsvRow {
            method: r.method.to_string(),
            objective: r.objective,
            stations: r.stations,
            time_s: r.wall_time.as_secs_f64(),
            optimal: r.optimal,
        }
    }
}

/// One greedy removal with a 1-based id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalRow {
    pub iteration: usize,
    pub removed: usize,
    pub objective: f64,
}

/// Best objective after each function evaluation of one CRO run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRowDoc {
    pub seed: u64,
    pub fe: u64,
    pub best: f64,
}

/// Serializes rows with a header line.
pub fn write_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const T1: &str = r#"{
      "name": "T1", "mode": "geometric", "alpha": 1.0, "D_km": 12.0,
      "complete_euclidean": true,
      "nodes": [
        {"id": 1, "x_km": 0.0,  "y_km": 0.0, "cost": 1.0, "capacity": 1.0, "demand": 1.0},
        {"id": 2, "x_km": 10.0, "y_km": 0.0, "cost": 2.0, "capacity": 1.0, "demand": 1.0},
        {"id": 3, "x_km": 20.0, "y_km": 0.0, "cost": 3.0, "capacity": 1.0, "demand": 1.0}
      ]
    }"#;

    fn message(text: &str) -> String {
        parse_instance(text).unwrap_err().to_string()
    }

    #[test]
    fn loads_line_fixture() {
        let inst = parse_instance(T1).unwrap();
        assert_eq!(inst, fixtures::line3());
    }

    #[test]
    fn round_trips() {
        let inst = fixtures::line3();
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
        let roads = T1.replace(
            r#""complete_euclidean": true,"#,
            r#""edges": [{"i": 1, "j": 2, "length_km": 3}, {"i": 2, "j": 3, "length_km": 4}],"#,
        );
        let inst = parse_instance(&roads).unwrap();
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
        let vc = crate::exact::reduce_vertex_cover(
            &crate::exact::ReductionInput::new(3, vec![(0, 1), (1, 2)], 1).unwrap(),
        )
        .unwrap();
        assert_eq!(parse_instance(&instance_to_json(&vc)).unwrap(), vc);
    }

    #[test]
    fn field_paths_in_errors() {
        assert_eq!(message(&T1.replace(r#""alpha": 1.0"#, r#""alpha": 1.5"#)), "alpha: alpha outside (0,1]");
        assert_eq!(
            message(&T1.replace(r#""cost": 2.0"#, r#""cost": -2.0"#)),
            "nodes[1].cost: non-positive cost"
        );
        let m = message(&T1.replace(r#""cost": 3.0"#, r#""cost": "x""#));
        assert!(m.starts_with("nodes[2].cost: invalid type"), "{m}");
        let m = message(&T1.replace(r#""id": 2,"#, r#""id": 5,"#));
        assert!(m.starts_with("nodes[1].id:"), "{m}");
    }

    #[test]
    fn asymmetric_adjacency_is_rejected() {
        let doc = r#"{"name": "e", "mode": "explicit", "alpha": 1, "D_km": 1,
          "nodes": [{"id": 1, "cost": 1, "capacity": 1, "demand": 1},
                    {"id": 2, "cost": 1, "capacity": 1, "demand": 1}],
          "adjacency": [[2], []], "neighborhoods": [[1, 2], [2]]}"#;
        assert!(message(doc).starts_with("adjacency[0]: asymmetric adjacency"));
        let ok = doc.replace(r#"[[2], []]"#, r#"[[2], [1]]"#);
        let inst = parse_instance(&ok).unwrap();
        assert_eq!(inst.reach_graph().unwrap().edge_count(), 1);
    }

    #[test]
    fn matrix_with_unreachable_pairs() {
        let doc = r#"{"name": "m", "mode": "geometric", "alpha": 1, "D_km": 5,
          "nodes": [{"id": 1, "cost": 1, "capacity": 1, "demand": 1},
                    {"id": 2, "cost": 1, "capacity": 1, "demand": 1}],
          "distance_matrix": [0, null, null, 0]}"#;
        let inst = parse_instance(doc).unwrap();
        assert_eq!(inst.reach_graph().unwrap().edge_count(), 0);
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            CsvRow { method: "greedy".into(), objective: Some(2.5), stations: 1, time_s: 0.001, optimal: false },
            CsvRow { method: "method1".into(), objective: None, stations: 0, time_s: 0.0, optimal: true },
        ];
        let text = write_csv(&rows).unwrap();
        assert!(text.starts_with("method,objective,stations,time_s,optimal\n"));
        assert_eq!(read_csv::<CsvRow>(&text).unwrap(), rows);
    }

    #[test]
    fn selection_ids_are_checked() {
        let s = SelectionDoc { selected: vec![2] }.to_solution(3).unwrap();
        assert_eq!(s.as_slice(), &[false, true, false]);
        assert!(SelectionDoc { selected: vec![0] }.to_solution(3).is_err());
        let report: SelectionDoc = parse_json(r#"{"selected": [1, 2], "method": "greedy"}"#).unwrap();
        assert_eq!(report.selected, vec![1, 2]);
    }
}
