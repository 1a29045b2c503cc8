//! Small hand-checkable instances used throughout the tests and the guide.

use crate::feasibility::Solution;
use crate::instance::{Instance, Layout, ReachGraph, Roads, Site};

/// Three sites on a line at 0, 10 and 20 km, straight roads, `D = 12`,
/// `α = 1`, costs 1, 2, 3 and unit capacities and demands.
///
/// The reach graph is the path 1-2-3. The optimum selects only the middle
/// site (cost 2).
pub fn line3() -> Instance {
    Instance::new(
        "T1",
        vec![
            Site::new(1.0, 1.0, 1.0).at(0.0, 0.0),
            Site::new(2.0, 1.0, 1.0).at(10.0, 0.0),
            Site::new(3.0, 1.0, 1.0).at(20.0, 0.0),
        ],
        12.0,
        1.0,
        Layout::Geometric {
            roads: Some(Roads::CompleteEuclidean),
            distances: None,
        },
    )
    .expect("fixture is valid")
}

/// Four nodes with reach edges 1-2 and 2-3; node 4 is isolated.
pub fn appendix_graph() -> ReachGraph {
    ReachGraph::from_edges(4, &[(0, 1), (1, 2)]).expect("fixture is valid")
}

/// Six-node reach graph with sites 1, 2, 3 and 6 selected. Inside the
/// selection, 2 is the hub that holds 1, 3 and 6 together, so only 1, 3 and 6
/// can be dropped without splitting it.
pub fn elimination_figure() -> (ReachGraph, Solution) {
    let g = ReachGraph::from_edges(
        6,
        &[(0, 1), (1, 2), (1, 5), (2, 3), (3, 4), (4, 5)],
    )
    .expect("fixture is valid");
    (g, Solution::from_indices(6, [0, 1, 2, 5]))
}
