use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::feasibility::Solution;
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Minimum over every root of the rooted exact search.
    Method1,
    /// Greedy elimination from the full selection.
    Greedy,
    /// Rooted exact search restricted to the neighborhood of a
    /// minimum-degree pivot.
    Method3,
    /// Chemical reaction optimization.
    Cro,
    /// Exhaustive enumeration.
    Brute,
    /// A single rooted exact search.
    Rooted,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Method1 => "method1",
            Method::Greedy => "greedy",
            Method::Method3 => "method3",
            Method::Cro => "cro",
            Method::Brute => "brute",
            Method::Rooted => "rooted",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "method1" => Method::Method1,
            "greedy" => Method::Greedy,
            "method3" => Method::Method3,
            "cro" => Method::Cro,
            "brute" => Method::Brute,
            "rooted" => Method::Rooted,
            other => return Err(format!("unknown method {other:?}")),
        })
    }
}

/// Result of one rooted subproblem inside a multi-root search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootOutcome {
    /// 0-based root.
    pub root: usize,
    /// Best objective this subproblem found that beat the shared incumbent,
    /// if any.
    pub improved: Option<f64>,
    pub nodes_explored: u64,
    /// The subproblem ran to completion.
    pub complete: bool,
}

/// Outcome of any solver.
///
/// `objective` and `stations` are always derived from `solution`, so the
/// report cannot disagree with the selection it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    /// `None` when no feasible selection exists (or none was found before a
    /// resource limit hit).
    pub solution: Option<Solution>,
    pub objective: Option<f64>,
    pub stations: usize,
    pub wall_time: Duration,
    /// Search nodes for exact methods, removal attempts for greedy, objective
    /// evaluations for CRO.
    pub nodes_explored: u64,
    /// The search finished without hitting a limit; for exact methods this
    /// certifies the objective as optimal.
    pub optimal: bool,
    pub per_root: Vec<RootOutcome>,
}

impl SolveReport {
    pub fn new(method: Method, inst: &Instance, solution: Option<Solution>) -> Self {
        let objective = solution.as_ref().map(|s| s.objective(inst));
        let stations = solution.as_ref().map_or(0, Solution::count);
        SolveReport {
            method,
            solution,
            objective,
            stations,
            wall_time: Duration::ZERO,
            nodes_explored: 0,
            optimal: false,
            per_root: Vec::new(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.solution.is_some()
    }

    /// 1-based ids of the selected sites.
    pub fn station_ids(&self) -> Vec<usize> {
        self.solution
            .as_ref()
            .map(|s| s.selected().into_iter().map(|i| i + 1).collect())
            .unwrap_or_default()
    }
}
