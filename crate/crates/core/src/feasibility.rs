//! Demand coverage, connectivity, and flow certificates for a selection.
//!
//! A selection `x` is feasible when every node's demand is covered by the
//! selected capacity in its `αD` neighborhood and the selected nodes induce a
//! connected subgraph of the reach graph. Connectivity can be witnessed by a
//! [`FlowCertificate`]: a single-commodity flow from a virtual source attached
//! to a root that delivers one unit to every selected node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph;
use crate::instance::{Instance, ReachGraph};

/// A 0/1 placement vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution {
    x: Vec<bool>,
}

impl Solution {
    pub fn new(x: Vec<bool>) -> Self {
        Solution { x }
    }

    pub fn all(n: usize) -> Self {
        Solution { x: vec![true; n] }
    }

    pub fn none(n: usize) -> Self {
        Solution { x: vec![false; n] }
    }

    /// Selection from 0-based node indices.
    pub fn from_indices(n: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut x = vec![false; n];
        for i in nodes {
            x[i] = true;
        }
        Solution { x }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.x
    }

    pub fn into_vec(self) -> Vec<bool> {
        self.x
    }

    pub fn contains(&self, i: usize) -> bool {
        self.x[i]
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.x[i] = on;
    }

    /// 0-based indices of the selected nodes, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&i| self.x[i]).collect()
    }

    pub fn count(&self) -> usize {
        self.x.iter().filter(|&&b| b).count()
    }

    /// `Σ c_i x_i`, summed in index order.
    pub fn objective(&self, inst: &Instance) -> f64 {
        objective(inst, &self.x)
    }
}

impl From<Vec<bool>> for Solution {
    fn from(x: Vec<bool>) -> Self {
        Solution { x }
    }
}

pub(crate) fn objective(inst: &Instance, x: &[bool]) -> f64 {
    x.iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(i, _)| inst.cost(i))
        .sum()
}

fn check_len(n: usize, x: &[bool]) -> Result<()> {
    if x.len() != n {
        return Err(Error::SelectionLength {
            got: x.len(),
            expected: n,
        });
    }
    Ok(())
}

/// Selected capacity inside `N_i`, summed in neighborhood order.
pub fn covered_capacity(inst: &Instance, reach: &ReachGraph, x: &[bool], i: usize) -> f64 {
    reach
        .neighborhood(i)
        .iter()
        .filter(|&&j| x[j])
        .map(|&j| inst.capacity(j))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandVerdict {
    pub ok: bool,
    /// 0-based nodes whose demand is not covered.
    pub violated: Vec<usize>,
}

/// Every node's demand is covered by the selected capacity in its
/// neighborhood. Uses exact `>=`.
pub fn check_demand(inst: &Instance, reach: &ReachGraph, x: &[bool]) -> Result<DemandVerdict> {
    check_len(inst.node_count(), x)?;
    let violated: Vec<usize> = (0..inst.node_count())
        .filter(|&i| !demand_met(inst, reach, x, i))
        .collect();
    Ok(DemandVerdict {
        ok: violated.is_empty(),
        violated,
    })
}

#[inline]
pub(crate) fn demand_met(inst: &Instance, reach: &ReachGraph, x: &[bool], i: usize) -> bool {
    covered_capacity(inst, reach, x, i) >= inst.demand(i)
}

pub(crate) fn all_demand_met(inst: &Instance, reach: &ReachGraph, x: &[bool]) -> bool {
    (0..inst.node_count()).all(|i| demand_met(inst, reach, x, i))
}

/// The selected nodes induce at most one component of the reach graph.
pub fn check_connectivity(reach: &ReachGraph, x: &[bool]) -> bool {
    graph::is_connected(reach, x)
}

/// How to read the requirement that every selected site has another selected
/// site within range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C1Reading {
    /// A site may be its own partner (`d(i,i) = 0 <= D`), so the check always
    /// passes for selected sites.
    #[default]
    Reflexive,
    /// The partner must be a different selected site, i.e. no selected site
    /// is isolated in the induced subgraph.
    Strict,
}

/// Every selected node has a selected partner within range.
pub fn check_c1(reach: &ReachGraph, x: &[bool], reading: C1Reading) -> bool {
    match reading {
        C1Reading::Reflexive => true,
        C1Reading::Strict => (0..reach.node_count())
            .filter(|&i| x[i])
            .all(|i| reach.neighbors(i).iter().any(|&j| x[j])),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub demand_ok: bool,
    /// 0-based nodes with uncovered demand.
    pub violated: Vec<usize>,
    pub connectivity_ok: bool,
    pub c1_ok: bool,
    /// `demand_ok && connectivity_ok`.
    pub overall: bool,
}

pub fn is_feasible(inst: &Instance, reach: &ReachGraph, x: &[bool]) -> Result<FeasibilityReport> {
    feasibility_report(inst, reach, x, C1Reading::Reflexive)
}

pub fn feasibility_report(
    inst: &Instance,
    reach: &ReachGraph,
    x: &[bool],
    reading: C1Reading,
) -> Result<FeasibilityReport> {
    let demand = check_demand(inst, reach, x)?;
    let connectivity_ok = check_connectivity(reach, x);
    Ok(FeasibilityReport {
        demand_ok: demand.ok,
        violated: demand.violated,
        connectivity_ok,
        c1_ok: check_c1(reach, x, reading),
        overall: demand.ok && connectivity_ok,
    })
}

pub(crate) fn feasible(inst: &Instance, reach: &ReachGraph, x: &[bool]) -> bool {
    all_demand_met(inst, reach, x) && check_connectivity(reach, x)
}

/// The largest selection worth starting a search from: all sites when that
/// is feasible, otherwise the first reach component (by lowest index) that
/// is feasible when fully selected. `None` means no feasible selection
/// exists.
///
/// A feasible selection is connected, so it lies inside one component, and
/// filling that component keeps it connected and never lowers a coverage
/// sum. When every site has positive demand, each site must be covered from
/// within range, so only the all-ones selection can qualify.
pub fn full_selection(inst: &Instance, reach: &ReachGraph) -> Option<Solution> {
    let n = inst.node_count();
    let all = vec![true; n];
    if feasible(inst, reach, &all) {
        return Some(Solution::new(all));
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let comp = graph::reachable_from(reach, &all, s);
        for (v, &c) in comp.iter().enumerate() {
            seen[v] |= c;
        }
        if feasible(inst, reach, &comp) {
            return Some(Solution::new(comp));
        }
    }
    None
}

/// Whether any feasible selection exists. With positive demand everywhere
/// this is the all-ones test.
pub fn instance_feasible(inst: &Instance, reach: &ReachGraph) -> bool {
    full_selection(inst, reach).is_some()
}

/// Flow on one directed arc of the reach graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcFlow {
    pub from: usize,
    pub to: usize,
    pub flow: i64,
}

/// Explicit single-commodity flow proving that the selected nodes are
/// connected to `root`.
///
/// A virtual source attached to `root` holds `n` units. It pushes
/// `source_flow` units into `root` and keeps `residue`; every selected node
/// absorbs exactly one unit, and flow only enters selected nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowCertificate {
    pub root: usize,
    pub residue: i64,
    pub source_flow: i64,
    /// One entry per directed arc of the reach graph (two per edge), ordered
    /// by `(from, to)`.
    pub arcs: Vec<ArcFlow>,
}

impl FlowCertificate {
    pub fn arc(&self, from: usize, to: usize) -> Option<i64> {
        self.arcs
            .binary_search_by(|a| (a.from, a.to).cmp(&(from, to)))
            .ok()
            .map(|k| self.arcs[k].flow)
    }

    pub fn arc_mut(&mut self, from: usize, to: usize) -> Option<&mut i64> {
        self.arcs
            .binary_search_by(|a| (a.from, a.to).cmp(&(from, to)))
            .ok()
            .map(move |k| &mut self.arcs[k].flow)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowOutcome {
    Certified(FlowCertificate),
    /// Some selected nodes cannot be reached from the root through selected
    /// nodes; listed 0-based.
    Disconnected { unreachable: Vec<usize> },
}

impl FlowOutcome {
    pub fn certificate(&self) -> Option<&FlowCertificate> {
        match self {
            FlowOutcome::Certified(c) => Some(c),
            FlowOutcome::Disconnected { .. } => None,
        }
    }
}

/// Builds a flow certificate along a breadth-first tree of the selected
/// nodes rooted at `root`. Each tree arc carries the number of selected nodes
/// below it; every other arc carries zero.
pub fn construct_flow_certificate(
    reach: &ReachGraph,
    x: &[bool],
    root: usize,
) -> Result<FlowOutcome> {
    let n = reach.node_count();
    check_len(n, x)?;
    if root >= n {
        return Err(Error::NodeOutOfRange { node: root, n });
    }
    if !x[root] {
        return Err(Error::RootNotSelected { root });
    }
    let (parent, order) = graph::bfs_tree(reach, x, root);
    let mut reached = vec![false; n];
    for &v in &order {
        reached[v] = true;
    }
    let unreachable: Vec<usize> = (0..n).filter(|&v| x[v] && !reached[v]).collect();
    if !unreachable.is_empty() {
        return Ok(FlowOutcome::Disconnected { unreachable });
    }

    // Subtree sizes, leaves first.
    let mut subtree = vec![0i64; n];
    for &v in order.iter().rev() {
        subtree[v] += 1;
        if parent[v] != usize::MAX {
            subtree[parent[v]] += subtree[v];
        }
    }
    let mut arcs = Vec::with_capacity(2 * reach.edge_count());
    for j in 0..n {
        for &k in reach.neighbors(j) {
            let flow = if parent[k] == j { subtree[k] } else { 0 };
            arcs.push(ArcFlow { from: j, to: k, flow });
        }
    }
    let selected = order.len() as i64;
    Ok(FlowOutcome::Certified(FlowCertificate {
        root,
        residue: n as i64 - selected,
        source_flow: selected,
        arcs,
    }))
}

/// Checks every flow constraint exactly:
///
/// * `residue + source_flow = n` and `residue >= 0`;
/// * `0 <= y_jk <= n·x_k` on every arc, the source arc included;
/// * inflow at `k` equals `x_k` plus outflow at `k`, for every node;
/// * `source_flow = Σ x_j`.
///
/// The arc list must cover each directed arc of the reach graph exactly once.
pub fn verify_flow_certificate(cert: &FlowCertificate, reach: &ReachGraph, x: &[bool]) -> bool {
    let n = reach.node_count();
    if x.len() != n || cert.root >= n || cert.arcs.len() != 2 * reach.edge_count() {
        return false;
    }
    let nn = n as i64;
    let xv = |k: usize| i64::from(x[k]);
    if cert.residue + cert.source_flow != nn || cert.residue < 0 {
        return false;
    }
    if cert.source_flow < 0 || cert.source_flow > nn * xv(cert.root) {
        return false;
    }
    let mut inflow = vec![0i64; n];
    let mut outflow = vec![0i64; n];
    inflow[cert.root] += cert.source_flow;
    let mut prev: Option<(usize, usize)> = None;
    for a in &cert.arcs {
        if a.from >= n || a.to >= n || !reach.has_edge(a.from, a.to) {
            return false;
        }
        // Sorted and duplicate-free, so the count check above makes the
        // arc set exactly the reach graph's arcs.
        if prev.is_some_and(|p| p >= (a.from, a.to)) {
            return false;
        }
        prev = Some((a.from, a.to));
        if a.flow < 0 || a.flow > nn * xv(a.to) {
            return false;
        }
        outflow[a.from] += a.flow;
        inflow[a.to] += a.flow;
    }
    if (0..n).any(|k| inflow[k] != xv(k) + outflow[k]) {
        return false;
    }
    let selected: i64 = (0..n).map(xv).sum();
    selected == cert.source_flow
}
