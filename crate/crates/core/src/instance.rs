//! City instances and the data derived from them.
//!
//! An [`Instance`] is either *geometric* (sites with coordinates and a road
//! network, or a supplied distance matrix) or *explicit* (the reachability
//! graph and the coverage neighborhoods are given directly). Geometric
//! instances are turned into a [`DistanceMatrix`] by [`shortest_paths`] and
//! then thresholded into a [`ReachGraph`] by [`build_reach_graph`]; explicit
//! instances skip straight to the reach graph.
//!
//! All node indices in this API are 0-based. Documents and the command line
//! use 1-based ids.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x_km: f64,
    pub y_km: f64,
}

impl Point {
    pub fn new(x_km: f64, y_km: f64) -> Self {
        Point { x_km, y_km }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x_km - other.x_km).hypot(self.y_km - other.y_km)
    }
}

/// A candidate location for a charging station.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    /// Construction cost `c_i`.
    pub cost: f64,
    /// Charging capacity `f_i` offered if a station is built here.
    pub capacity: f64,
    /// Local charging demand `F_i`.
    pub demand: f64,
    pub position: Option<Point>,
}

impl Site {
    pub fn new(cost: f64, capacity: f64, demand: f64) -> Self {
        Site {
            cost,
            capacity,
            demand,
            position: None,
        }
    }

    pub fn at(mut self, x_km: f64, y_km: f64) -> Self {
        self.position = Some(Point::new(x_km, y_km));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadEdge {
    pub a: usize,
    pub b: usize,
    pub length_km: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Roads {
    /// Every pair of sites is joined by a straight road.
    CompleteEuclidean,
    Edges(Vec<RoadEdge>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// Distances come from a road network or, when `roads` is `None`, from
    /// the supplied matrix. Exactly one of the two is present.
    Geometric {
        roads: Option<Roads>,
        distances: Option<DistanceMatrix>,
    },
    /// The reach graph and the coverage neighborhoods are given verbatim.
    /// Used for instances whose neighborhoods are not induced by distances,
    /// such as the output of the vertex cover reduction.
    Explicit {
        reach_edges: Vec<(usize, usize)>,
        neighborhoods: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Geometric,
    Explicit,
}

/// A validated placement problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    sites: Vec<Site>,
    range_km: f64,
    alpha: f64,
    layout: Layout,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        sites: Vec<Site>,
        range_km: f64,
        alpha: f64,
        layout: Layout,
    ) -> Result<Self> {
        let mut layout = layout;
        validate(&sites, range_km, alpha, &mut layout)?;
        Ok(Instance {
            name: name.into(),
            sites,
            range_km,
            alpha,
            layout,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.sites[i].cost
    }

    pub fn capacity(&self, i: usize) -> f64 {
        self.sites[i].capacity
    }

    pub fn demand(&self, i: usize) -> f64 {
        self.sites[i].demand
    }

    /// EV driving range `D`.
    pub fn range_km(&self) -> f64 {
        self.range_km
    }

    /// Detour tolerance `α`; demand at `i` is served from sites within `αD`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn mode(&self) -> Mode {
        match self.layout {
            Layout::Geometric { .. } => Mode::Geometric,
            Layout::Explicit { .. } => Mode::Explicit,
        }
    }

    /// Same instance with a different `α`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Instance::new(
            self.name.clone(),
            self.sites.clone(),
            self.range_km,
            alpha,
            self.layout.clone(),
        )
    }

    /// Same instance with a different range `D`.
    pub fn with_range(&self, range_km: f64) -> Result<Self> {
        Instance::new(
            self.name.clone(),
            self.sites.clone(),
            range_km,
            self.alpha,
            self.layout.clone(),
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Sum of all costs, the objective of the all-ones selection.
    pub fn total_cost(&self) -> f64 {
        self.sites.iter().map(|s| s.cost).sum()
    }

    /// Distances followed by the reach graph, for either mode.
    pub fn reach_graph(&self) -> Result<ReachGraph> {
        match self.layout {
            Layout::Geometric { .. } => {
                let d = shortest_paths(self)?;
                build_reach_graph(self, Some(&d))
            }
            Layout::Explicit { .. } => build_reach_graph(self, None),
        }
    }
}

fn validate(sites: &[Site], range_km: f64, alpha: f64, layout: &mut Layout) -> Result<()> {
    let n = sites.len();
    if n == 0 {
        return Err(Error::invalid("nodes", "at least one node is required"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", "alpha outside (0,1]"));
    }
    if !(range_km > 0.0 && range_km.is_finite()) {
        return Err(Error::invalid("D_km", "range must be positive and finite"));
    }
    let explicit = matches!(layout, Layout::Explicit { .. });
    for (i, s) in sites.iter().enumerate() {
        // The vertex cover reduction prices edge-nodes at zero, so explicit
        // instances only need non-negative costs.
        let cost_ok = if explicit {
            s.cost >= 0.0
        } else {
            s.cost > 0.0
        };
        if !(cost_ok && s.cost.is_finite()) {
            let msg = if explicit {
                "cost must be non-negative"
            } else {
                "non-positive cost"
            };
            return Err(Error::invalid(format!("nodes[{i}].cost"), msg));
        }
        if !(s.capacity >= 0.0 && s.capacity.is_finite()) {
            return Err(Error::invalid(
                format!("nodes[{i}].capacity"),
                "capacity must be non-negative",
            ));
        }
        if !(s.demand >= 0.0 && s.demand.is_finite()) {
            return Err(Error::invalid(
                format!("nodes[{i}].demand"),
                "demand must be non-negative",
            ));
        }
        if let Some(p) = s.position {
            if !(p.x_km.is_finite() && p.y_km.is_finite()) {
                return Err(Error::invalid(
                    format!("nodes[{i}]"),
                    "coordinates must be finite",
                ));
            }
        }
    }

    match layout {
        Layout::Geometric { roads, distances } => match (roads.as_ref(), distances.as_ref()) {
            (None, None) => Err(Error::invalid(
                "edges",
                "geometric instances need road edges, complete_euclidean, or a distance_matrix",
            )),
            (Some(_), Some(_)) => Err(Error::invalid(
                "distance_matrix",
                "a distance matrix cannot be combined with road data",
            )),
            (Some(Roads::CompleteEuclidean), None) => {
                if let Some(i) = sites.iter().position(|s| s.position.is_none()) {
                    return Err(Error::invalid(
                        format!("nodes[{i}]"),
                        "complete_euclidean requires x_km and y_km on every node",
                    ));
                }
                Ok(())
            }
            (Some(Roads::Edges(edges)), None) => {
                for (k, e) in edges.iter().enumerate() {
                    if e.a >= n || e.b >= n {
                        return Err(Error::invalid(
                            format!("edges[{k}]"),
                            "endpoint out of range",
                        ));
                    }
                    if e.a == e.b {
                        return Err(Error::invalid(format!("edges[{k}]"), "self-loop"));
                    }
                    if !(e.length_km >= 0.0 && e.length_km.is_finite()) {
                        return Err(Error::invalid(
                            format!("edges[{k}].length_km"),
                            "length must be non-negative and finite",
                        ));
                    }
                }
                Ok(())
            }
            (None, Some(d)) => {
                if d.node_count() != n {
                    return Err(Error::MatrixDimension {
                        got: d.node_count(),
                        expected: n,
                    });
                }
                Ok(())
            }
        },
        Layout::Explicit {
            reach_edges,
            neighborhoods,
        } => {
            for (k, &(a, b)) in reach_edges.iter().enumerate() {
                if a >= n || b >= n {
                    return Err(Error::invalid(
                        format!("reach_edges[{k}]"),
                        "endpoint out of range",
                    ));
                }
                if a == b {
                    return Err(Error::invalid(format!("reach_edges[{k}]"), "self-loop"));
                }
            }
            let mut normalized: Vec<(usize, usize)> = reach_edges
                .iter()
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .collect();
            normalized.sort_unstable();
            normalized.dedup();
            *reach_edges = normalized;

            if neighborhoods.len() != n {
                return Err(Error::invalid(
                    "neighborhoods",
                    format!("expected {n} neighborhoods, found {}", neighborhoods.len()),
                ));
            }
            for (i, hood) in neighborhoods.iter_mut().enumerate() {
                if let Some(&j) = hood.iter().find(|&&j| j >= n) {
                    return Err(Error::invalid(
                        format!("neighborhoods[{i}]"),
                        format!("node {} out of range", j + 1),
                    ));
                }
                hood.sort_unstable();
                hood.dedup();
                if hood.binary_search(&i).is_err() {
                    return Err(Error::invalid(
                        format!("neighborhoods[{i}]"),
                        "a neighborhood must contain its own node",
                    ));
                }
            }
            Ok(())
        }
    }
}

/// Symmetric all-pairs distances. Unreachable pairs hold `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::MatrixDimension {
                got: r.len().max(n),
                expected: n,
            });
        }
        Self::from_row_major(n, rows.into_iter().flatten().collect())
    }

    pub fn from_row_major(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::invalid(
                "distance_matrix",
                format!("expected {} entries, found {}", n * n, d.len()),
            ));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::invalid(
                    format!("distance_matrix[{}]", i * n + i),
                    "diagonal must be zero",
                ));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if v.is_nan() || v < 0.0 {
                    return Err(Error::invalid(
                        format!("distance_matrix[{}]", i * n + j),
                        "distances must be non-negative",
                    ));
                }
                if v != d[j * n + i] {
                    return Err(Error::invalid(
                        format!("distance_matrix[{}]", i * n + j),
                        "matrix must be symmetric",
                    ));
                }
            }
        }
        Ok(DistanceMatrix { n, d })
    }

    pub fn zeros(n: usize) -> Self {
        DistanceMatrix {
            n,
            d: vec![0.0; n * n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.d
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Pairs `(i, j)`, `i < j`, with no connecting road path.
    pub fn unreachable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.get(i, j).is_infinite() {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// All-pairs shortest road distances of a geometric instance.
///
/// Complete-Euclidean instances get straight-line distances; road networks
/// are solved with one Dijkstra run per source; a supplied matrix is returned
/// as is. Disconnected road networks produce infinite entries and a warning.
pub fn shortest_paths(inst: &Instance) -> Result<DistanceMatrix> {
    let n = inst.node_count();
    let (roads, distances) = match inst.layout() {
        Layout::Geometric { roads, distances } => (roads, distances),
        Layout::Explicit { .. } => {
            return Err(Error::invalid(
                "mode",
                "explicit instances carry no distance data",
            ))
        }
    };
    if let Some(d) = distances {
        return Ok(d.clone());
    }
    let matrix = match roads.as_ref().expect("validated geometric layout") {
        Roads::CompleteEuclidean => {
            let pts: Vec<Point> = inst
                .sites()
                .iter()
                .map(|s| s.position.expect("validated coordinates"))
                .collect();
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = pts[i].distance(&pts[j]);
                    d[i * n + j] = v;
                    d[j * n + i] = v;
                }
            }
            DistanceMatrix { n, d }
        }
        Roads::Edges(edges) => {
            let mut adj = vec![Vec::new(); n];
            for e in edges {
                adj[e.a].push((e.b, e.length_km));
                adj[e.b].push((e.a, e.length_km));
            }
            let mut d = Vec::with_capacity(n * n);
            for s in 0..n {
                d.extend(dijkstra(&adj, s));
            }
            // Symmetrize against rounding differences between the two
            // directions of the same path.
            for i in 0..n {
                for j in i + 1..n {
                    let v = d[i * n + j].min(d[j * n + i]);
                    d[i * n + j] = v;
                    d[j * n + i] = v;
                }
            }
            DistanceMatrix { n, d }
        }
    };
    let cut = matrix.unreachable_pairs();
    if !cut.is_empty() {
        log::warn!(
            "instance {:?}: road network is disconnected ({} unreachable pairs, first {}-{})",
            inst.name(),
            cut.len(),
            cut[0].0 + 1,
            cut[0].1 + 1
        );
    }
    Ok(matrix)
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier(0.0, source));
    while let Some(Frontier(du, u)) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let dv = du + w;
            if dv < dist[v] {
                dist[v] = dv;
                heap.push(Frontier(dv, v));
            }
        }
    }
    dist
}

/// The reachability graph `Ĝ` plus the coverage neighborhoods.
///
/// Nodes `i != j` are adjacent iff `d(i,j) <= D`. The neighborhood of `i`
/// holds every `j` with `d(i,j) <= αD`, `i` included. Both lists are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachGraph {
    adjacency: Vec<Vec<usize>>,
    neighborhoods: Vec<Vec<usize>>,
    /// `covered_by[j]` lists every `i` with `j ∈ N_i`.
    covered_by: Vec<Vec<usize>>,
    hops: Option<Vec<u32>>,
}

impl ReachGraph {
    /// Builds a reach graph from adjacency lists and neighborhoods, checking
    /// symmetry, self-loops and `i ∈ N_i`.
    pub fn from_adjacency(
        mut adjacency: Vec<Vec<usize>>,
        mut neighborhoods: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = adjacency.len();
        if neighborhoods.len() != n {
            return Err(Error::invalid(
                "neighborhoods",
                format!("expected {n} neighborhoods, found {}", neighborhoods.len()),
            ));
        }
        for (i, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.iter().any(|&j| j >= n) {
                return Err(Error::invalid(
                    format!("reach_adjacency[{i}]"),
                    "node out of range",
                ));
            }
            if list.binary_search(&i).is_ok() {
                return Err(Error::invalid(format!("reach_adjacency[{i}]"), "self-loop"));
            }
        }
        for i in 0..n {
            for &j in &adjacency[i] {
                if adjacency[j].binary_search(&i).is_err() {
                    return Err(Error::invalid(
                        format!("reach_adjacency[{i}]"),
                        format!("asymmetric adjacency: {} -> {} has no reverse", i + 1, j + 1),
                    ));
                }
            }
        }
        for (i, hood) in neighborhoods.iter_mut().enumerate() {
            hood.sort_unstable();
            hood.dedup();
            if hood.iter().any(|&j| j >= n) {
                return Err(Error::invalid(
                    format!("neighborhoods[{i}]"),
                    "node out of range",
                ));
            }
            if hood.binary_search(&i).is_err() {
                return Err(Error::invalid(
                    format!("neighborhoods[{i}]"),
                    "a neighborhood must contain its own node",
                ));
            }
        }
        Ok(ReachGraph::assemble(adjacency, neighborhoods, None))
    }

    fn assemble(
        adjacency: Vec<Vec<usize>>,
        neighborhoods: Vec<Vec<usize>>,
        hops: Option<Vec<u32>>,
    ) -> Self {
        let mut covered_by = vec![Vec::new(); adjacency.len()];
        for (i, hood) in neighborhoods.iter().enumerate() {
            for &j in hood {
                covered_by[j].push(i);
            }
        }
        ReachGraph {
            adjacency,
            neighborhoods,
            covered_by,
            hops,
        }
    }

    /// Reach graph from an undirected edge list with every neighborhood set
    /// to the closed neighborhood (`α = 1`).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::NodeOutOfRange { node: a.max(b), n });
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let neighborhoods = adjacency
            .iter()
            .enumerate()
            .map(|(i, adj)| {
                let mut h = adj.clone();
                h.push(i);
                h
            })
            .collect();
        Self::from_adjacency(adjacency, neighborhoods)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// `N_i^{αD}`, sorted, always containing `i`.
    pub fn neighborhood(&self, i: usize) -> &[usize] {
        &self.neighborhoods[i]
    }

    /// Nodes whose neighborhood contains `j`, ascending.
    pub fn covered_by(&self, j: usize) -> &[usize] {
        &self.covered_by[j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Hop count of the shortest path between `i` and `j` in the road graph.
    /// `None` when the pair is disconnected or the instance has no road graph.
    pub fn hop_count(&self, i: usize, j: usize) -> Option<u32> {
        let hops = self.hops.as_ref()?;
        let h = hops[i * self.node_count() + j];
        (h != u32::MAX).then_some(h)
    }

    pub fn has_hop_counts(&self) -> bool {
        self.hops.is_some()
    }

    /// True when every neighborhood lies inside the node's closed `Ĝ`
    /// neighborhood. Distance-derived graphs always satisfy this since
    /// `αD <= D`; explicit instances may not.
    pub fn neighborhoods_within_reach(&self) -> bool {
        (0..self.node_count()).all(|i| {
            self.neighborhoods[i]
                .iter()
                .all(|&j| j == i || self.has_edge(i, j))
        })
    }
}

/// Thresholds distances into `Ĝ` and the `αD` neighborhoods.
///
/// Geometric instances need `d`; explicit instances ignore it and pass their
/// payload through. Comparisons use plain `<=` with no tolerance.
pub fn build_reach_graph(inst: &Instance, d: Option<&DistanceMatrix>) -> Result<ReachGraph> {
    let n = inst.node_count();
    match inst.layout() {
        Layout::Explicit {
            reach_edges,
            neighborhoods,
        } => {
            let mut adjacency = vec![Vec::new(); n];
            for &(a, b) in reach_edges {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
            ReachGraph::from_adjacency(adjacency, neighborhoods.clone())
        }
        Layout::Geometric { roads, .. } => {
            let d = d.ok_or_else(|| {
                Error::invalid("distance_matrix", "geometric instance needs distances")
            })?;
            if d.node_count() != n {
                return Err(Error::MatrixDimension {
                    got: d.node_count(),
                    expected: n,
                });
            }
            let range = inst.range_km();
            let radius = inst.alpha() * range;
            let mut adjacency = vec![Vec::new(); n];
            let mut neighborhoods = vec![Vec::new(); n];
            for i in 0..n {
                for j in 0..n {
                    let dij = d.get(i, j);
                    if i != j && dij <= range {
                        adjacency[i].push(j);
                    }
                    if i == j || dij <= radius {
                        neighborhoods[i].push(j);
                    }
                }
            }
            let hops = match roads {
                Some(Roads::CompleteEuclidean) => {
                    let mut h = vec![1u32; n * n];
                    for i in 0..n {
                        h[i * n + i] = 0;
                    }
                    Some(h)
                }
                Some(Roads::Edges(edges)) => Some(road_hops(n, edges)),
                None => None,
            };
            Ok(ReachGraph::assemble(adjacency, neighborhoods, hops))
        }
    }
}

fn road_hops(n: usize, edges: &[RoadEdge]) -> Vec<u32> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut hops = vec![u32::MAX; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut hops[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if row[v] == u32::MAX {
                    row[v] = row[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    hops
}

/// Parameters of the random city generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub n: usize,
    pub width_km: f64,
    pub height_km: f64,
    #[serde(rename = "D_km")]
    pub range_km: f64,
    pub alpha: f64,
    /// Capacity given to every node.
    pub capacity: f64,
    /// Demand given to every node.
    pub demand: f64,
}

impl RandomParams {
    /// Nodes scattered over a square, identical capacities and demands.
    pub fn square(n: usize, side_km: f64, range_km: f64, alpha: f64) -> Self {
        RandomParams {
            n,
            width_km: side_km,
            height_km: side_km,
            range_km,
            alpha,
            capacity: 0.5,
            demand: 1.0,
        }
    }
}

/// Uniformly scattered complete-Euclidean city with costs uniform in `(0, 1]`.
/// The same seed always yields the same instance.
pub fn generate_random(params: &RandomParams, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_with(params, &mut rng, format!("random-n{}-s{seed}", params.n))
}

/// Like [`generate_random`] but draws from a caller-owned generator, so that
/// repeated calls produce a stream of distinct instances.
pub fn generate_with<R: Rng + ?Sized>(
    params: &RandomParams,
    rng: &mut R,
    name: String,
) -> Result<Instance> {
    if params.n == 0 {
        return Err(Error::invalid("n", "at least one node is required"));
    }
    if !(params.width_km > 0.0 && params.height_km > 0.0) {
        return Err(Error::invalid("area", "area must be positive"));
    }
    let sites = (0..params.n)
        .map(|_| {
            let x = rng.gen::<f64>() * params.width_km;
            let y = rng.gen::<f64>() * params.height_km;
            // gen() is uniform on [0, 1); flipping it gives (0, 1].
            let cost = 1.0 - rng.gen::<f64>();
            Site::new(cost, params.capacity, params.demand).at(x, y)
        })
        .collect();
    Instance::new(
        name,
        sites,
        params.range_km,
        params.alpha,
        Layout::Geometric {
            roads: Some(Roads::CompleteEuclidean),
            distances: None,
        },
    )
}
