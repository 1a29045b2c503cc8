//! Exact solvers.
//!
//! A feasible selection is nonempty unless every demand is zero, so it
//! contains some site `r`. [`solve_rooted`] finds the cheapest feasible
//! selection containing a given root; [`method1`] takes the minimum over all
//! roots and [`method3`] over the neighborhood of a minimum-degree pivot
//! only, which suffices when every site has positive demand (the pivot's own
//! demand forces a station inside its neighborhood).
//!
//! Roots are solved in order and each later subproblem excludes the earlier
//! roots, so every feasible selection is searched under exactly one root
//! (its first root in the order). The incumbent is shared across roots.

mod milp;
mod reduction;
mod search;

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feasibility::{self, Solution};
use crate::greedy;
use crate::instance::{Instance, ReachGraph};
use crate::report::{Method, RootOutcome, SolveReport};

pub use milp::export_milp;
pub use reduction::{reduce_vertex_cover, ReductionInput};

use search::{Budget, Incumbent};

/// Largest instance [`brute_force`] accepts by default.
pub const BRUTE_FORCE_CAP: usize = 20;

/// Resource limits for the branch-and-bound searches. Hitting any limit
/// returns the best selection found so far with `optimal == false`.
#[derive(Debug, Clone, Default)]
pub struct Limits {
    /// Cap on search nodes, summed over all roots.
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Solve the roots of [`method1`] and [`method3`] on the rayon pool.
    pub parallel: bool,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub fn with_node_limit(mut self, nodes: u64) -> Self {
        self.node_limit = Some(nodes);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    fn budget(&self, start: Instant) -> Budget {
        Budget::new(self.node_limit, self.time_limit.map(|t| start + t))
    }
}

fn check_node(inst: &Instance, node: usize) -> Result<()> {
    if node >= inst.node_count() {
        return Err(Error::NodeOutOfRange {
            node,
            n: inst.node_count(),
        });
    }
    Ok(())
}

fn finish(
    method: Method,
    inst: &Instance,
    start: Instant,
    incumbent: Incumbent,
    budget: &Budget,
    per_root: Vec<RootOutcome>,
) -> SolveReport {
    let solution = incumbent.into_best().map(|(_, x)| Solution::new(x));
    let mut report = SolveReport::new(method, inst, solution);
    report.nodes_explored = budget.nodes();
    report.optimal = !budget.exhausted() && per_root.iter().all(|r| r.complete);
    report.per_root = per_root;
    report.wall_time = start.elapsed();
    report
}

/// Cheapest feasible selection that contains `root` (0-based).
///
/// The search starts from the greedy elimination of the full selection with
/// `root` kept, when the full selection contains `root`.
pub fn solve_rooted(
    inst: &Instance,
    reach: &ReachGraph,
    root: usize,
    limits: &Limits,
) -> Result<SolveReport> {
    check_node(inst, root)?;
    let start = Instant::now();
    let incumbent = Incumbent::new();
    if let Some(full) = feasibility::full_selection(inst, reach).filter(|s| s.contains(root)) {
        let mut x = full.into_vec();
        greedy::eliminate(inst, reach, &mut x, Some(root));
        incumbent.offer(feasibility::objective(inst, &x), &x);
    }
    let budget = limits.budget(start);
    let run = search::run_rooted(inst, reach, root, &[], &incumbent, &budget);
    let outcome = RootOutcome {
        root,
        improved: run.improved,
        nodes_explored: run.nodes,
        complete: run.complete,
    };
    Ok(finish(Method::Rooted, inst, start, incumbent, &budget, vec![outcome]))
}

/// Solves the rooted subproblems for `roots` in order, each excluding the
/// roots before it, starting from the unrooted greedy selection.
fn over_roots(
    method: Method,
    inst: &Instance,
    reach: &ReachGraph,
    roots: &[usize],
    limits: &Limits,
) -> SolveReport {
    let start = Instant::now();
    let incumbent = Incumbent::new();
    let greedy = greedy::greedy(inst, reach);
    if let Some(x) = &greedy.solution {
        incumbent.offer(x.objective(inst), x.as_slice());
    }
    let budget = limits.budget(start);
    let solve = |k: usize| {
        let run = search::run_rooted(inst, reach, roots[k], &roots[..k], &incumbent, &budget);
        RootOutcome {
            root: roots[k],
            improved: run.improved,
            nodes_explored: run.nodes,
            complete: run.complete,
        }
    };
    let per_root: Vec<RootOutcome> = if limits.parallel {
        (0..roots.len()).into_par_iter().map(solve).collect()
    } else {
        (0..roots.len()).map(solve).collect()
    };
    finish(method, inst, start, incumbent, &budget, per_root)
}

fn empty_optimum(method: Method, inst: &Instance, start: Instant) -> SolveReport {
    let mut report = SolveReport::new(method, inst, Some(Solution::none(inst.node_count())));
    report.optimal = true;
    report.wall_time = start.elapsed();
    report
}

/// Global optimum as the minimum over every root.
pub fn method1(inst: &Instance, reach: &ReachGraph, limits: &Limits) -> Result<SolveReport> {
    let start = Instant::now();
    let n = inst.node_count();
    if feasibility::feasible(inst, reach, &vec![false; n]) {
        return Ok(empty_optimum(Method::Method1, inst, start));
    }
    let roots: Vec<usize> = (0..n).collect();
    Ok(over_roots(Method::Method1, inst, reach, &roots, limits))
}

/// Minimum-degree site of the reach graph, lowest index among ties.
pub fn pivot(reach: &ReachGraph) -> Option<usize> {
    (0..reach.node_count()).min_by_key(|&i| (reach.degree(i), i))
}

/// Global optimum over the roots in the pivot's neighborhood. Requires
/// positive demand at every site.
pub fn method3(inst: &Instance, reach: &ReachGraph, limits: &Limits) -> Result<SolveReport> {
    if let Some(node) = (0..inst.node_count()).find(|&i| inst.demand(i) <= 0.0) {
        return Err(Error::ZeroDemand { node });
    }
    let Some(p) = pivot(reach) else {
        let start = Instant::now();
        return Ok(empty_optimum(Method::Method3, inst, start));
    };
    let mut roots = reach.neighborhood(p).to_vec();
    roots.sort_unstable();
    Ok(over_roots(Method::Method3, inst, reach, &roots, limits))
}

/// Exhaustive enumeration of all `2^n` selections, for `n ≤` [`BRUTE_FORCE_CAP`].
pub fn brute_force(inst: &Instance, reach: &ReachGraph) -> Result<SolveReport> {
    brute_force_capped(inst, reach, BRUTE_FORCE_CAP)
}

/// [`brute_force`] with an explicit size cap (at most 30).
pub fn brute_force_capped(inst: &Instance, reach: &ReachGraph, cap: usize) -> Result<SolveReport> {
    let n = inst.node_count();
    let cap = cap.min(30);
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let start = Instant::now();
    let mut best: Option<(f64, Vec<bool>)> = None;
    let mut x = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = mask >> i & 1 == 1;
        }
        let cost = feasibility::objective(inst, &x);
        if best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            continue;
        }
        if feasibility::is_feasible(inst, reach, &x)?.overall {
            best = Some((cost, x.clone()));
        }
    }
    let mut report = SolveReport::new(Method::Brute, inst, best.map(|(_, x)| Solution::new(x)));
    report.nodes_explored = 1u64 << n;
    report.optimal = true;
    report.wall_time = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{generate_random, Layout, RandomParams, Site};

    #[test]
    fn rooted_on_line_fixture() {
        let inst = fixtures::line3();
        let g = inst.reach_graph().unwrap();
        let expect = [(vec![true, true, false], 3.0), (vec![false, true, false], 2.0), (vec![false, true, true], 5.0)];
        for (root, (x, obj)) in expect.iter().enumerate() {
            let r = solve_rooted(&inst, &g, root, &Limits::none()).unwrap();
            assert_eq!(r.solution.as_ref().unwrap().as_slice(), x.as_slice());
            assert_eq!(r.objective, Some(*obj));
            assert!(r.optimal);
        }
        assert!(solve_rooted(&inst, &g, 3, &Limits::none()).is_err());
    }

    #[test]
    fn method1_and_method3_on_line_fixture() {
        let inst = fixtures::line3();
        let g = inst.reach_graph().unwrap();
        let m1 = method1(&inst, &g, &Limits::none()).unwrap();
        assert_eq!(m1.solution.unwrap().as_slice(), &[false, true, false]);
        assert!(m1.optimal);
        assert_eq!(pivot(&g), Some(0));
        let m3 = method3(&inst, &g, &Limits::none()).unwrap();
        assert_eq!(m3.objective, Some(2.0));
        let roots: Vec<usize> = m3.per_root.iter().map(|r| r.root).collect();
        assert_eq!(roots, vec![0, 1]);
    }

    #[test]
    fn infeasible_everywhere() {
        let inst = fixtures::line3().with_range(5.0).unwrap();
        let g = inst.reach_graph().unwrap();
        for root in 0..3 {
            assert!(solve_rooted(&inst, &g, root, &Limits::none()).unwrap().solution.is_none());
        }
        let r = method1(&inst, &g, &Limits::none()).unwrap();
        assert!(r.solution.is_none());
        assert!(r.optimal);
        assert!(brute_force(&inst, &g).unwrap().solution.is_none());
    }

    #[test]
    fn single_site() {
        let inst = Instance::new(
            "one",
            vec![Site::new(4.0, 2.0, 1.0).at(0.0, 0.0)],
            1.0,
            1.0,
            Layout::Geometric {
                roads: Some(crate::instance::Roads::CompleteEuclidean),
                distances: None,
            },
        )
        .unwrap();
        let g = inst.reach_graph().unwrap();
        let r = method1(&inst, &g, &Limits::none()).unwrap();
        assert_eq!(r.solution.unwrap().as_slice(), &[true]);
        assert_eq!(r.objective, Some(4.0));
    }

    #[test]
    fn zero_demand() {
        let mut sites = fixtures::line3().sites().to_vec();
        for s in &mut sites {
            s.demand = 0.0;
        }
        let inst = Instance::new("z", sites, 12.0, 1.0, fixtures::line3().layout().clone()).unwrap();
        let g = inst.reach_graph().unwrap();
        let b = brute_force(&inst, &g).unwrap();
        assert_eq!(b.objective, Some(0.0));
        assert_eq!(b.stations, 0);
        assert_eq!(method1(&inst, &g, &Limits::none()).unwrap().objective, Some(0.0));
        assert!(matches!(method3(&inst, &g, &Limits::none()), Err(Error::ZeroDemand { node: 0 })));
    }

    #[test]
    fn brute_force_cap() {
        let inst = generate_random(&RandomParams::square(21, 100.0, 30.0, 1.0), 1).unwrap();
        let g = inst.reach_graph().unwrap();
        assert!(matches!(brute_force(&inst, &g), Err(Error::TooLarge { n: 21, cap: 20 })));
    }

    #[test]
    fn matches_brute_force_on_small_random_instances() {
        for seed in 0..60u64 {
            let n = 6 + (seed % 7) as usize;
            for alpha in [0.6, 1.0] {
                let p = RandomParams::square(n, 60.0, 30.0, alpha);
                let inst = generate_random(&p, seed).unwrap();
                let g = inst.reach_graph().unwrap();
                let b = brute_force(&inst, &g).unwrap();
                let m = method1(&inst, &g, &Limits::none()).unwrap();
                assert_eq!(b.objective.is_some(), m.objective.is_some(), "seed {seed}");
                if let (Some(a), Some(c)) = (b.objective, m.objective) {
                    assert!((a - c).abs() <= 1e-9 * (1.0 + a), "seed {seed}: {a} vs {c}");
                    let m3 = method3(&inst, &g, &Limits::none()).unwrap();
                    assert!((m3.objective.unwrap() - a).abs() <= 1e-9 * (1.0 + a));
                }
                let par = method1(&inst, &g, &Limits::none().parallel(true)).unwrap();
                assert_eq!(par.objective, m.objective);
            }
        }
    }

    #[test]
    fn node_limit_clears_optimal_flag() {
        let inst = generate_random(&RandomParams::square(30, 100.0, 30.0, 1.0), 3).unwrap();
        let g = inst.reach_graph().unwrap();
        let r = method1(&inst, &g, &Limits::none().with_node_limit(5)).unwrap();
        assert!(!r.optimal);
        if let Some(x) = &r.solution {
            assert!(feasibility::feasible(&inst, &g, x.as_slice()));
        }
    }
}
