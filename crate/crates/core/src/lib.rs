//! Charging station placement on reachability graphs.
//!
//! Sites are candidate station locations with a construction cost, a
//! charging capacity and a local demand. A placement is feasible when the
//! capacity built within `αD` of every site covers its demand and the chosen
//! sites form one connected network under the driving range `D`. This crate
//! models such instances, checks placements (including explicit flow
//! certificates of connectivity) and finds cheap feasible placements with
//! exact branch-and-bound, greedy elimination and chemical reaction
//! optimization.
//!
//! ```
//! use evcsp::{exact, fixtures, greedy};
//!
//! let inst = fixtures::line3();
//! let reach = inst.reach_graph()?;
//! let best = exact::method1(&inst, &reach, &exact::Limits::none())?;
//! assert_eq!(best.objective, Some(2.0));
//! assert_eq!(greedy::greedy(&inst, &reach).objective, Some(2.0));
//! # Ok::<(), evcsp::Error>(())
//! ```

pub mod bench;
pub mod cro;
pub mod error;
pub mod exact;
pub mod feasibility;
pub mod fixtures;
pub mod graph;
pub mod greedy;
pub mod instance;
pub mod io;
pub mod report;

pub use error::{Error, Result};
pub use feasibility::{FeasibilityReport, FlowCertificate, Solution};
pub use instance::{DistanceMatrix, Instance, ReachGraph};
pub use report::{Method, SolveReport};

/// The guide's chapters, compiled as doc-tests so their snippets stay in
/// sync with the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/feasibility.md")]
    mod feasibility {}
    #[doc = include_str!("../../../book/src/greedy.md")]
    mod greedy {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/cro.md")]
    mod cro {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
