//! Vertex cover instances encoded as placement instances.
//!
//! Graph vertices become unit-cost sites with no capacity; every edge becomes
//! a free site with unit capacity, adjacent to its two endpoints. The
//! vertices form a clique. Every site demands `|E|` from the edge sites, so
//! all edge sites must be built, and connecting them costs one vertex per
//! edge endpoint chosen: the optimum equals the minimum vertex cover size
//! once there are at least two edges. A single edge site is feasible alone
//! at cost 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Layout, Site};

/// A simple undirected graph with a nonempty edge set, and a cover-size
/// bound for the decision version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionInput {
    pub vertices: usize,
    /// 0-based endpoints.
    pub edges: Vec<(usize, usize)>,
    pub bound: u64,
}

impl ReductionInput {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>, bound: u64) -> Result<Self> {
        let input = ReductionInput { vertices, edges, bound };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        if self.edges.is_empty() {
            return Err(Error::EmptyEdgeSet);
        }
        if self.bound == 0 {
            return Err(Error::invalid("bound", "must be a positive integer"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            let path = format!("edges[{k}]");
            if a >= self.vertices || b >= self.vertices {
                return Err(Error::invalid(path, "endpoint out of range"));
            }
            if a == b {
                return Err(Error::invalid(path, "self-loop"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::invalid(path, "duplicate edge"));
            }
        }
        Ok(())
    }
}

/// Builds the explicit-mode instance. Sites `0..vertices` are the graph
/// vertices, followed by one site per edge in input order.
///
/// Each neighborhood is the edge sites plus the site itself; vertex sites
/// have zero capacity so including them changes no demand sum.
pub fn reduce_vertex_cover(input: &ReductionInput) -> Result<Instance> {
    input.validate()?;
    let v = input.vertices;
    let m = input.edges.len();
    let total = m as f64;
    let mut sites = Vec::with_capacity(v + m);
    sites.extend((0..v).map(|_| Site::new(1.0, 0.0, total)));
    sites.extend((0..m).map(|_| Site::new(0.0, 1.0, total)));

    let mut reach_edges = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            reach_edges.push((a, b));
        }
    }
    for (k, &(a, b)) in input.edges.iter().enumerate() {
        reach_edges.push((a, v + k));
        reach_edges.push((b, v + k));
    }
    let edge_sites: Vec<usize> = (v..v + m).collect();
    let neighborhoods = (0..v + m)
        .map(|i| {
            let mut nb = edge_sites.clone();
            if i < v {
                nb.insert(0, i);
            }
            nb
        })
        .collect();
    Instance::new(
        "vertex-cover",
        sites,
        1.0,
        1.0,
        Layout::Explicit {
            reach_edges,
            neighborhoods,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force;

    fn min_cover(v: usize, edges: &[(usize, usize)]) -> u32 {
        (0u32..1 << v)
            .filter(|s| edges.iter().all(|&(a, b)| s >> a & 1 == 1 || s >> b & 1 == 1))
            .map(u32::count_ones)
            .min()
            .unwrap()
    }

    fn reduced_optimum(v: usize, edges: &[(usize, usize)]) -> f64 {
        let inst = reduce_vertex_cover(&ReductionInput::new(v, edges.to_vec(), 1).unwrap()).unwrap();
        let g = inst.reach_graph().unwrap();
        brute_force(&inst, &g).unwrap().objective.unwrap()
    }

    #[test]
    fn single_edge() {
        let inst = reduce_vertex_cover(&ReductionInput::new(2, vec![(0, 1)], 1).unwrap()).unwrap();
        assert_eq!(inst.node_count(), 3);
        let g = inst.reach_graph().unwrap();
        let r = brute_force(&inst, &g).unwrap();
        // The edge site alone meets every demand of 1 at cost 0, one below the
        // cover size. The decision version still agrees since bounds are >= 1.
        assert_eq!(r.objective, Some(0.0));
        assert_eq!(r.solution.unwrap().as_slice(), &[false, false, true]);
        for x in [[true, false, true], [false, true, true]] {
            assert!(crate::feasibility::feasible(&inst, &g, &x));
        }
    }

    #[test]
    fn triangle_and_star() {
        assert_eq!(reduced_optimum(3, &[(0, 1), (1, 2), (0, 2)]), 2.0);
        assert_eq!(reduced_optimum(4, &[(0, 1), (0, 2), (0, 3)]), 1.0);
        assert_eq!(min_cover(3, &[(0, 1), (1, 2), (0, 2)]), 2);
    }

    #[test]
    fn random_graphs_match_cover_size() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let v = rng.gen_range(2..=7);
            let mut edges = Vec::new();
            for a in 0..v {
                for b in a + 1..v {
                    if rng.gen_bool(0.4) {
                        edges.push((a, b));
                    }
                }
            }
            if edges.len() < 2 || v + edges.len() > 20 {
                continue;
            }
            assert_eq!(reduced_optimum(v, &edges), f64::from(min_cover(v, &edges)), "{edges:?}");
        }
    }

    #[test]
    fn five_cycle() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        assert_eq!(reduced_optimum(5, &edges), f64::from(min_cover(5, &edges)));
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(ReductionInput::new(2, vec![], 1), Err(Error::EmptyEdgeSet)));
        assert!(ReductionInput::new(2, vec![(0, 0)], 1).is_err());
        assert!(ReductionInput::new(2, vec![(0, 1), (1, 0)], 1).is_err());
        assert!(ReductionInput::new(2, vec![(0, 2)], 1).is_err());
    }
}
