//! Rooted branch-and-bound over site states.
//!
//! Every site is `In`, `Out` or `Free`. A search node is pruned when the
//! demand of some site cannot be met by the non-`Out` sites, when an `In`
//! site cannot reach the root through non-`Out` sites, or when its lower
//! bound cannot beat the shared incumbent. The lower bound is the cost of
//! the `In` sites, tightened by a Lagrangian relaxation of the demand rows.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::feasibility;
use crate::graph;
use crate::instance::{Instance, ReachGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Free,
    In,
    Out,
}

/// Best known selection, shared by every rooted subproblem of one solve.
pub(crate) struct Incumbent {
    bound: AtomicU64,
    best: Mutex<Option<(f64, Vec<bool>)>>,
}

impl Incumbent {
    pub(crate) fn new() -> Self {
        Incumbent {
            bound: AtomicU64::new(f64::INFINITY.to_bits()),
            best: Mutex::new(None),
        }
    }

    pub(crate) fn bound(&self) -> f64 {
        f64::from_bits(self.bound.load(Ordering::Acquire))
    }

    /// Stores `x` if it is strictly cheaper than the current best.
    pub(crate) fn offer(&self, objective: f64, x: &[bool]) -> bool {
        let mut best = self.best.lock().expect("incumbent lock poisoned");
        if best.as_ref().is_some_and(|(b, _)| objective >= *b) {
            return false;
        }
        *best = Some((objective, x.to_vec()));
        self.bound.store(objective.to_bits(), Ordering::Release);
        true
    }

    pub(crate) fn into_best(self) -> Option<(f64, Vec<bool>)> {
        self.best.into_inner().expect("incumbent lock poisoned")
    }
}

/// Node and time budget shared by every rooted subproblem of one solve.
pub(crate) struct Budget {
    nodes: AtomicU64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    exhausted: AtomicBool,
}

impl Budget {
    pub(crate) fn new(node_limit: Option<u64>, deadline: Option<Instant>) -> Self {
        Budget {
            nodes: AtomicU64::new(0),
            node_limit,
            deadline,
            exhausted: AtomicBool::new(false),
        }
    }

    /// Counts one search node. Returns false once a limit has been hit.
    fn tick(&self, check_clock: bool) -> bool {
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        let used = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over_nodes = self.node_limit.is_some_and(|l| used > l);
        let over_time = check_clock && self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }
}

/// Outcome of one rooted search.
pub(crate) struct RootRun {
    pub(crate) improved: Option<f64>,
    pub(crate) nodes: u64,
    pub(crate) complete: bool,
}

const ROOT_ITERATIONS: usize = 80;
const NODE_ITERATIONS: usize = 12;

fn tolerance(ub: f64) -> f64 {
    1e-9 * (1.0 + ub.abs())
}

struct Pruned;

struct Search<'a> {
    inst: &'a Instance,
    reach: &'a ReachGraph,
    root: usize,
    incumbent: &'a Incumbent,
    budget: &'a Budget,
    state: Vec<State>,
    trail: Vec<usize>,
    order: Vec<usize>,
    lambda: Vec<f64>,
    nodes: u64,
    improved: Option<f64>,
    aborted: bool,
}

/// Minimum-cost feasible selection containing `root` and none of
/// `excluded`, offered to `incumbent` whenever it beats the current bound.
pub(crate) fn run_rooted(
    inst: &Instance,
    reach: &ReachGraph,
    root: usize,
    excluded: &[usize],
    incumbent: &Incumbent,
    budget: &Budget,
) -> RootRun {
    let n = inst.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.cost(b).total_cmp(&inst.cost(a)).then(a.cmp(&b)));
    let mut state = vec![State::Free; n];
    for &e in excluded {
        state[e] = State::Out;
    }
    state[root] = State::In;
    let mut s = Search {
        inst,
        reach,
        root,
        incumbent,
        budget,
        state,
        trail: Vec::new(),
        order,
        lambda: vec![0.0; n],
        nodes: 0,
        improved: None,
        aborted: false,
    };
    s.explore(0);
    RootRun {
        improved: s.improved,
        nodes: s.nodes,
        complete: !s.aborted,
    }
}

impl Search<'_> {
    fn set(&mut self, j: usize, st: State) {
        debug_assert_eq!(self.state[j], State::Free);
        self.state[j] = st;
        self.trail.push(j);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let j = self.trail.pop().expect("trail above mark");
            self.state[j] = State::Free;
        }
    }

    fn explore(&mut self, depth: usize) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if !self.budget.tick(self.nodes % 64 == 1) {
            self.aborted = true;
            return;
        }
        let mark = self.trail.len();
        if self.tighten(depth).is_err() {
            self.undo(mark);
            return;
        }
        match self.order.iter().copied().find(|&j| self.state[j] == State::Free) {
            None => self.leaf(),
            Some(j) => {
                for st in [State::Out, State::In] {
                    let inner = self.trail.len();
                    self.set(j, st);
                    self.explore(depth + 1);
                    self.undo(inner);
                    if self.aborted {
                        break;
                    }
                }
            }
        }
        self.undo(mark);
    }

    fn leaf(&mut self) {
        let x: Vec<bool> = self.state.iter().map(|&s| s == State::In).collect();
        debug_assert!(feasibility::feasible(self.inst, self.reach, &x));
        if !feasibility::feasible(self.inst, self.reach, &x) {
            return;
        }
        let obj = feasibility::objective(self.inst, &x);
        if self.incumbent.offer(obj, &x) {
            self.improved = Some(obj);
        }
    }

    /// Propagation and bounding to a fixed point (a few rounds at most).
    fn tighten(&mut self, depth: usize) -> Result<(), Pruned> {
        let iterations = if depth == 0 { ROOT_ITERATIONS } else { NODE_ITERATIONS };
        for _ in 0..4 {
            self.propagate()?;
            if !self.bound(iterations)? {
                return Ok(());
            }
        }
        self.propagate()
    }

    fn propagate(&mut self) -> Result<(), Pruned> {
        loop {
            let mut changed = self.propagate_demand()?;
            changed |= self.propagate_connectivity()?;
            if !changed {
                return Ok(());
            }
        }
    }

    /// Fails when some demand cannot be met by the non-`Out` sites; forces in
    /// a free site that some demand cannot do without.
    fn propagate_demand(&mut self) -> Result<bool, Pruned> {
        let mut changed = false;
        for i in 0..self.inst.node_count() {
            let need = self.inst.demand(i);
            if need <= 0.0 {
                continue;
            }
            let mut avail = 0.0;
            for &j in self.reach.neighborhood(i) {
                if self.state[j] != State::Out {
                    avail += self.inst.capacity(j);
                }
            }
            if avail < need {
                return Err(Pruned);
            }
            // Conservative margin: a missed forcing only costs search time.
            let margin = 1e-9 * need.max(1.0);
            for k in 0..self.reach.neighborhood(i).len() {
                let j = self.reach.neighborhood(i)[k];
                let f = self.inst.capacity(j);
                if self.state[j] == State::Free && f > 0.0 && avail - f < need - margin {
                    self.set(j, State::In);
                    changed = true;
                }
            }
        }
        Ok(changed)
    }

    fn propagate_connectivity(&mut self) -> Result<bool, Pruned> {
        let n = self.inst.node_count();
        let allowed: Vec<bool> = self.state.iter().map(|&s| s != State::Out).collect();
        let reached = graph::reachable_from(self.reach, &allowed, self.root);
        let mut changed = false;
        for j in 0..n {
            if reached[j] {
                continue;
            }
            match self.state[j] {
                State::In => return Err(Pruned),
                State::Free => {
                    self.set(j, State::Out);
                    changed = true;
                }
                State::Out => {}
            }
        }
        let required: Vec<bool> = self.state.iter().map(|&s| s == State::In).collect();
        for j in graph::required_separators(self.reach, &reached, &required, self.root) {
            self.set(j, State::In);
            changed = true;
        }
        Ok(changed)
    }

    /// Prunes on the Lagrangian bound and fixes free sites by reduced cost.
    /// Returns whether any site was fixed.
    fn bound(&mut self, iterations: usize) -> Result<bool, Pruned> {
        let ub = self.incumbent.bound();
        if !ub.is_finite() {
            return Ok(false);
        }
        let tol = tolerance(ub);
        let n = self.inst.node_count();
        let mut base = 0.0;
        for j in 0..n {
            if self.state[j] == State::In {
                base += self.inst.cost(j);
            }
        }
        if base >= ub - tol {
            return Err(Pruned);
        }

        // Residual demand of each row after the `In` sites.
        let mut residual = vec![0.0; n];
        let mut active = Vec::new();
        for i in 0..n {
            let need = self.inst.demand(i);
            if need <= 0.0 {
                continue;
            }
            let mut got = 0.0;
            for &j in self.reach.neighborhood(i) {
                if self.state[j] == State::In {
                    got += self.inst.capacity(j);
                }
            }
            if got < need {
                residual[i] = need - got;
                active.push(i);
            }
        }

        // Columns of the free sites over the active rows, with coefficients
        // capped at the residual.
        let free: Vec<usize> = (0..n).filter(|&j| self.state[j] == State::Free).collect();
        let mut start = Vec::with_capacity(free.len() + 1);
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for &j in &free {
            start.push(entries.len());
            let f = self.inst.capacity(j);
            if f <= 0.0 {
                continue;
            }
            for &i in self.reach.covered_by(j) {
                if residual[i] > 0.0 {
                    entries.push((i, f.min(residual[i])));
                }
            }
        }
        start.push(entries.len());

        let mut rc = vec![0.0; free.len()];
        let mut best_rc = vec![0.0; free.len()];
        let mut best = f64::NEG_INFINITY;
        let mut grad = vec![0.0; n];
        let mut step = 2.0;
        let mut stale = 0;
        for &i in &active {
            self.lambda[i] = self.lambda[i].max(0.0);
        }
        for _ in 0..iterations.max(1) {
            let mut value = base;
            for &i in &active {
                value += self.lambda[i] * residual[i];
                grad[i] = residual[i];
            }
            for (k, _) in free.iter().enumerate() {
                let mut r = self.inst.cost(free[k]);
                for &(i, a) in &entries[start[k]..start[k + 1]] {
                    r -= self.lambda[i] * a;
                }
                rc[k] = r;
                if r < 0.0 {
                    value += r;
                    for &(i, a) in &entries[start[k]..start[k + 1]] {
                        grad[i] -= a;
                    }
                }
            }
            if value > best {
                best = value;
                best_rc.copy_from_slice(&rc);
                stale = 0;
            } else {
                stale += 1;
                if stale >= 3 {
                    step /= 2.0;
                    stale = 0;
                }
            }
            if best >= ub - tol {
                return Err(Pruned);
            }
            let norm: f64 = active
                .iter()
                .map(|&i| {
                    if self.lambda[i] <= 0.0 && grad[i] < 0.0 {
                        0.0
                    } else {
                        grad[i] * grad[i]
                    }
                })
                .sum();
            if norm <= 0.0 {
                break;
            }
            let t = step * (ub - value) / norm;
            for &i in &active {
                self.lambda[i] = (self.lambda[i] + t * grad[i]).max(0.0);
            }
        }

        let mut fixed = false;
        for (k, &j) in free.iter().enumerate() {
            if self.state[j] != State::Free {
                continue;
            }
            let r = best_rc[k];
            if r >= 0.0 && best + r >= ub - tol {
                self.set(j, State::Out);
                fixed = true;
            } else if r < 0.0 && best - r >= ub - tol {
                self.set(j, State::In);
                fixed = true;
            }
        }
        Ok(fixed)
    }
}
