//! Chemical reaction optimization.
//!
//! A population of molecules each carries a feasible selection. Its
//! potential energy `PE` is the objective; its kinetic energy `KE` lets it
//! accept worse selections. Four reactions move molecules around:
//!
//! - on-wall collision: one molecule, greedy elimination (after a small
//!   random perturbation in [`PerturbationMode::Perturbed`]);
//! - decomposition: one molecule splits into two random selections;
//! - inter-molecular collision: two molecules, each gets the on-wall move;
//! - synthesis: two molecules merge into one random selection.
//!
//! The sum of all `PE`, all `KE` and the central buffer never changes.

use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{self, Solution};
use crate::greedy;
use crate::instance::{Instance, ReachGraph};
use crate::report::{Method, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationMode {
    /// Greedy elimination only. A 1-minimal selection is a fixed point.
    PaperPure,
    /// Add one random unselected reach neighbor of the selection, then run
    /// greedy elimination.
    #[default]
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CroParams {
    pub fe_limit: u64,
    pub initial_ke: f64,
    pub population_size: usize,
    pub initial_buffer: f64,
    pub collision_ratio: f64,
    pub synthesis_threshold: f64,
    pub decomposition_threshold: u64,
    pub ke_loss_rate: f64,
    pub unity_seed_fraction: f64,
    pub perturbation_mode: PerturbationMode,
}

impl Default for CroParams {
    fn default() -> Self {
        CroParams {
            fe_limit: 2000,
            initial_ke: 10.0,
            population_size: 40,
            initial_buffer: 10.0,
            collision_ratio: 0.5,
            synthesis_threshold: 0.5,
            decomposition_threshold: 20,
            ke_loss_rate: 0.9,
            unity_seed_fraction: 0.10,
            perturbation_mode: PerturbationMode::Perturbed,
        }
    }
}

impl CroParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if self.population_size == 0 {
            return Err(Error::invalid("population_size", "must be at least 1"));
        }
        if !(self.initial_ke >= 0.0 && self.initial_ke.is_finite()) {
            return Err(Error::invalid("initial_ke", "must be non-negative"));
        }
        if !(self.initial_buffer >= 0.0 && self.initial_buffer.is_finite()) {
            return Err(Error::invalid("initial_buffer", "must be non-negative"));
        }
        if !unit(self.collision_ratio) {
            return Err(Error::invalid("collision_ratio", "must lie in [0,1]"));
        }
        if !(self.synthesis_threshold >= 0.0) {
            return Err(Error::invalid("synthesis_threshold", "must be non-negative"));
        }
        if !unit(self.ke_loss_rate) {
            return Err(Error::invalid("ke_loss_rate", "must lie in [0,1]"));
        }
        if !unit(self.unity_seed_fraction) {
            return Err(Error::invalid("unity_seed_fraction", "must lie in [0,1]"));
        }
        Ok(())
    }

    /// Molecules that start from the full selection: the fraction of
    /// the population, rounded, and at least one when the fraction is
    /// positive.
    pub fn unity_count(&self) -> usize {
        if self.unity_seed_fraction <= 0.0 {
            return 0;
        }
        let k = (self.unity_seed_fraction * self.population_size as f64).round() as usize;
        k.clamp(1, self.population_size)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub solution: Solution,
    pub pe: f64,
    pub ke: f64,
    pub hits: u64,
    /// Lowest `PE` this molecule has held, and the hit count when it did.
    pub min_pe: f64,
    pub min_hit: u64,
}

impl Molecule {
    fn new(solution: Solution, pe: f64, ke: f64) -> Self {
        Molecule {
            solution,
            pe,
            ke,
            hits: 0,
            min_pe: pe,
            min_hit: 0,
        }
    }

    fn moved(&mut self, solution: Solution, pe: f64, ke: f64) {
        self.solution = solution;
        self.pe = pe;
        self.ke = ke;
        if pe < self.min_pe {
            self.min_pe = pe;
            self.min_hit = self.hits;
        }
    }
}

/// On-wall energy update: `Some((KE', buffer gain))` when accepted.
///
/// ```
/// let (ke, gain) = evcsp::cro::on_wall_energy(6.0, 10.0, 3.0, 0.9).unwrap();
/// assert!((ke - 11.7).abs() < 1e-12 && (gain - 1.3).abs() < 1e-12);
/// assert!(evcsp::cro::on_wall_energy(6.0, 1.0, 8.0, 0.9).is_none());
/// ```
pub fn on_wall_energy(pe: f64, ke: f64, pe_new: f64, q: f64) -> Option<(f64, f64)> {
    let surplus = pe + ke - pe_new;
    if surplus < 0.0 {
        return None;
    }
    let ke_new = surplus * q;
    Some((ke_new, surplus - ke_new))
}

/// Decomposition energy update with buffer assistance fractions `d1`, `d2`
/// and split fraction `d3`: `Some((KE1', KE2', buffer'))` when accepted.
#[allow(clippy::too_many_arguments)]
pub fn decomposition_energy(
    pe: f64,
    ke: f64,
    pe1: f64,
    pe2: f64,
    buffer: f64,
    d1: f64,
    d2: f64,
    d3: f64,
) -> Option<(f64, f64, f64)> {
    let mut surplus = pe + ke - pe1 - pe2;
    let mut buffer_after = buffer;
    if surplus < 0.0 {
        let assist = d1 * d2 * buffer;
        if surplus + assist < 0.0 {
            return None;
        }
        surplus += assist;
        buffer_after = buffer - assist;
    }
    let ke1 = surplus * d3;
    Some((ke1, surplus - ke1, buffer_after))
}

/// Inter-molecular energy update with split fraction `d4`.
pub fn intermolecular_energy(
    pe1: f64,
    pe2: f64,
    ke1: f64,
    ke2: f64,
    pe1_new: f64,
    pe2_new: f64,
    d4: f64,
) -> Option<(f64, f64)> {
    let surplus = pe1 + pe2 + ke1 + ke2 - pe1_new - pe2_new;
    if surplus < 0.0 {
        return None;
    }
    let a = surplus * d4;
    Some((a, surplus - a))
}

/// Synthesis energy update: `Some(KE')` when accepted.
///
/// ```
/// let ke = evcsp::cro::synthesis_energy(3.0, 4.0, 0.2, 0.2, 5.0).unwrap();
/// assert!((ke - 2.4).abs() < 1e-12);
/// ```
pub fn synthesis_energy(pe1: f64, pe2: f64, ke1: f64, ke2: f64, pe_new: f64) -> Option<f64> {
    let surplus = pe1 + pe2 + ke1 + ke2 - pe_new;
    (surplus >= 0.0).then_some(surplus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReactionCounts {
    pub on_wall: u64,
    pub on_wall_accepted: u64,
    pub decomposition: u64,
    pub decomposition_accepted: u64,
    pub intermolecular: u64,
    pub intermolecular_accepted: u64,
    pub synthesis: u64,
    pub synthesis_accepted: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub fe: u64,
    pub best: f64,
}

/// Best objective after every function evaluation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CroTrace {
    pub points: Vec<TracePoint>,
    pub counts: ReactionCounts,
}

impl CroTrace {
    pub fn is_non_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].best <= w[0].best)
    }
}

/// Which reaction a main-loop step ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reaction {
    OnWall,
    Decomposition,
    Intermolecular,
    Synthesis,
}

/// The CRO state: population, buffer, evaluation count and best selection.
pub struct Reactor<'a, R: Rng> {
    inst: &'a Instance,
    reach: &'a ReachGraph,
    params: CroParams,
    rng: R,
    population: Vec<Molecule>,
    buffer: f64,
    fe: u64,
    best: Option<(f64, Solution)>,
    trace: CroTrace,
    /// Molecules still owed their first on-wall collision.
    warmup: Vec<usize>,
}

impl<'a, R: Rng> Reactor<'a, R> {
    /// Builds and evaluates the initial population. Fails on an infeasible
    /// instance.
    pub fn new(inst: &'a Instance, reach: &'a ReachGraph, params: CroParams, rng: R) -> Result<Self> {
        params.validate()?;
        let full = feasibility::full_selection(inst, reach).ok_or(Error::InfeasibleInstance)?;
        let mut r = Reactor {
            inst,
            reach,
            buffer: params.initial_buffer,
            params,
            rng,
            population: Vec::new(),
            fe: 0,
            best: None,
            trace: CroTrace::default(),
            warmup: Vec::new(),
        };
        let unity = r.params.unity_count();
        for k in 0..r.params.population_size {
            let s = if k < unity {
                r.warmup.push(k);
                full.clone()
            } else {
                greedy::random_solution(inst, reach, &mut r.rng)?
            };
            let pe = r.evaluate(&s);
            r.population.push(Molecule::new(s, pe, r.params.initial_ke));
        }
        Ok(r)
    }

    pub fn population(&self) -> &[Molecule] {
        &self.population
    }

    pub fn buffer(&self) -> f64 {
        self.buffer
    }

    pub fn evaluations(&self) -> u64 {
        self.fe
    }

    pub fn best(&self) -> Option<&(f64, Solution)> {
        self.best.as_ref()
    }

    /// `ΣPE + ΣKE + buffer`.
    pub fn total_energy(&self) -> f64 {
        self.population.iter().map(|m| m.pe + m.ke).sum::<f64>() + self.buffer
    }

    fn evaluate(&mut self, s: &Solution) -> f64 {
        let pe = s.objective(self.inst);
        self.fe += 1;
        if self.best.as_ref().is_none_or(|(b, _)| pe < *b) {
            self.best = Some((pe, s.clone()));
        }
        let best = self.best.as_ref().map_or(pe, |(b, _)| *b);
        self.trace.points.push(TracePoint { fe: self.fe, best });
        pe
    }

    fn perturb(&mut self, i: usize) -> Solution {
        let s = &self.population[i].solution;
        let mut x = s.clone();
        if self.params.perturbation_mode == PerturbationMode::Perturbed {
            let n = self.inst.node_count();
            let mut border = vec![false; n];
            for i in s.selected() {
                for &j in self.reach.neighbors(i) {
                    border[j] = !s.contains(j);
                }
            }
            let border: Vec<usize> = (0..n).filter(|&j| border[j]).collect();
            if !border.is_empty() {
                x.set(border[self.rng.gen_range(0..border.len())], true);
            }
        }
        greedy::greedy_from(self.inst, self.reach, &x).expect("molecules hold feasible selections")
    }

    fn random(&mut self) -> Solution {
        greedy::random_solution(self.inst, self.reach, &mut self.rng).expect("instance is feasible")
    }

    pub fn on_wall(&mut self, i: usize) {
        self.trace.counts.on_wall += 1;
        let s = self.perturb(i);
        let pe_new = self.evaluate(&s);
        let q = self.rng.gen_range(self.params.ke_loss_rate..=1.0);
        let m = &mut self.population[i];
        m.hits += 1;
        if let Some((ke, gain)) = on_wall_energy(m.pe, m.ke, pe_new, q) {
            m.moved(s, pe_new, ke);
            self.buffer += gain;
            self.trace.counts.on_wall_accepted += 1;
        }
    }

    pub fn decompose(&mut self, i: usize) {
        self.trace.counts.decomposition += 1;
        let s1 = self.random();
        let s2 = self.random();
        let pe1 = self.evaluate(&s1);
        let pe2 = self.evaluate(&s2);
        let (d1, d2, d3) = (self.rng.gen::<f64>(), self.rng.gen::<f64>(), self.rng.gen::<f64>());
        let m = &mut self.population[i];
        m.hits += 1;
        if let Some((ke1, ke2, buffer)) = decomposition_energy(m.pe, m.ke, pe1, pe2, self.buffer, d1, d2, d3) {
            self.buffer = buffer;
            self.population[i] = Molecule::new(s1, pe1, ke1);
            self.population.push(Molecule::new(s2, pe2, ke2));
            self.trace.counts.decomposition_accepted += 1;
        }
    }

    pub fn intermolecular(&mut self, i: usize, j: usize) {
        assert_ne!(i, j, "two distinct molecules");
        self.trace.counts.intermolecular += 1;
        let s1 = self.perturb(i);
        let s2 = self.perturb(j);
        let pe1 = self.evaluate(&s1);
        let pe2 = self.evaluate(&s2);
        let d4 = self.rng.gen::<f64>();
        self.population[i].hits += 1;
        self.population[j].hits += 1;
        let (a, b) = (&self.population[i], &self.population[j]);
        if let Some((ke1, ke2)) = intermolecular_energy(a.pe, b.pe, a.ke, b.ke, pe1, pe2, d4) {
            self.population[i].moved(s1, pe1, ke1);
            self.population[j].moved(s2, pe2, ke2);
            self.trace.counts.intermolecular_accepted += 1;
        }
    }

    pub fn synthesize(&mut self, i: usize, j: usize) {
        assert_ne!(i, j, "two distinct molecules");
        self.trace.counts.synthesis += 1;
        let s = self.random();
        let pe = self.evaluate(&s);
        self.population[i].hits += 1;
        self.population[j].hits += 1;
        let (a, b) = (&self.population[i], &self.population[j]);
        if let Some(ke) = synthesis_energy(a.pe, b.pe, a.ke, b.ke, pe) {
            self.population[i] = Molecule::new(s, pe, ke);
            self.population.swap_remove(j);
            self.trace.counts.synthesis_accepted += 1;
        }
    }

    /// One main-loop step. Returns `None` once the evaluation budget is spent.
    ///
    /// Molecules seeded with the full selection get an on-wall collision
    /// first, so the run never ends worse than plain greedy elimination.
    pub fn step(&mut self) -> Option<Reaction> {
        let remaining = self.params.fe_limit.saturating_sub(self.fe);
        if remaining == 0 {
            return None;
        }
        if let Some(i) = self.warmup.pop() {
            self.on_wall(i);
            return Some(Reaction::OnWall);
        }
        let t: f64 = self.rng.gen();
        if t > self.params.collision_ratio || self.population.len() < 2 {
            let i = self.rng.gen_range(0..self.population.len());
            let m = &self.population[i];
            if m.hits - m.min_hit > self.params.decomposition_threshold && remaining >= 2 {
                self.decompose(i);
                Some(Reaction::Decomposition)
            } else {
                self.on_wall(i);
                Some(Reaction::OnWall)
            }
        } else {
            let pick = index::sample(&mut self.rng, self.population.len(), 2);
            let (i, j) = (pick.index(0), pick.index(1));
            let threshold = self.params.synthesis_threshold;
            if self.population[i].ke <= threshold && self.population[j].ke <= threshold {
                self.synthesize(i, j);
                Some(Reaction::Synthesis)
            } else if remaining >= 2 {
                self.intermolecular(i, j);
                Some(Reaction::Intermolecular)
            } else {
                self.on_wall(i);
                Some(Reaction::OnWall)
            }
        }
    }

    pub fn into_result(self) -> (Option<Solution>, CroTrace) {
        (self.best.map(|(_, s)| s), self.trace)
    }
}

/// Runs CRO until `fe_limit` evaluations. Fails on an infeasible instance.
pub fn cro_solve<R: Rng>(
    inst: &Instance,
    reach: &ReachGraph,
    params: &CroParams,
    rng: R,
) -> Result<(SolveReport, CroTrace)> {
    let start = Instant::now();
    let mut reactor = Reactor::new(inst, reach, params.clone(), rng)?;
    while reactor.step().is_some() {}
    let fe = reactor.evaluations();
    let (best, trace) = reactor.into_result();
    let mut report = SolveReport::new(Method::Cro, inst, best);
    report.nodes_explored = fe;
    report.wall_time = start.elapsed();
    Ok((report, trace))
}

/// [`cro_solve`] with a ChaCha8 generator seeded from `seed`.
pub fn cro_seeded(
    inst: &Instance,
    reach: &ReachGraph,
    params: &CroParams,
    seed: u64,
) -> Result<(SolveReport, CroTrace)> {
    cro_solve(inst, reach, params, ChaCha8Rng::seed_from_u64(seed))
}

/// Independent runs, one per seed, on the rayon pool. Results follow the
/// order of `seeds`.
pub fn cro_repeats(
    inst: &Instance,
    reach: &ReachGraph,
    params: &CroParams,
    seeds: &[u64],
) -> Result<Vec<(SolveReport, CroTrace)>> {
    seeds
        .par_iter()
        .map(|&s| cro_seeded(inst, reach, params, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{generate_random, RandomParams};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + a.abs() + b.abs())
    }

    #[test]
    fn energy_examples() {
        let (ke, gain) = on_wall_energy(6.0, 10.0, 3.0, 0.9).unwrap();
        assert!(close(ke, 11.7) && close(gain, 1.3));
        let (k1, k2, buf) = decomposition_energy(10.0, 1.0, 4.0, 5.0, 7.0, 0.3, 0.4, 0.25).unwrap();
        assert!(close(k1 + k2, 2.0) && close(k1, 0.5) && buf == 7.0);
        assert!(decomposition_energy(1.0, 0.0, 4.0, 5.0, 7.0, 1.0, 1.0, 0.5).is_none());
        let (k1, k2, buf) = decomposition_energy(4.0, 1.0, 3.0, 3.0, 4.0, 0.5, 1.0, 0.5).unwrap();
        assert!(close(k1 + k2 + buf + 6.0, 4.0 + 1.0 + 4.0));
        assert!(intermolecular_energy(1.0, 1.0, 0.0, 0.0, 2.0, 2.0, 0.5).is_none());
        assert!(close(synthesis_energy(3.0, 4.0, 0.2, 0.2, 5.0).unwrap(), 2.4));
        assert!(synthesis_energy(3.0, 4.0, 0.2, 0.2, 8.0).is_none());
    }

    #[test]
    fn line_fixture_reaches_optimum() {
        let inst = fixtures::line3();
        let g = inst.reach_graph().unwrap();
        for seed in 0..5 {
            let (r, trace) = cro_seeded(&inst, &g, &CroParams::default(), seed).unwrap();
            assert_eq!(r.objective, Some(2.0));
            assert_eq!(trace.points.len(), 2000);
            assert!(trace.is_non_increasing());
        }
    }

    #[test]
    fn zero_budget_keeps_initial_population() {
        let inst = fixtures::line3();
        let g = inst.reach_graph().unwrap();
        let params = CroParams {
            fe_limit: 0,
            ..CroParams::default()
        };
        let (r, trace) = cro_seeded(&inst, &g, &params, 1).unwrap();
        assert_eq!(trace.points.len(), 40);
        assert_eq!(trace.counts, ReactionCounts::default());
        assert!(r.solution.is_some());
    }

    #[test]
    fn infeasible_instance_is_an_error() {
        let inst = fixtures::line3().with_range(5.0).unwrap();
        let g = inst.reach_graph().unwrap();
        assert!(matches!(
            cro_seeded(&inst, &g, &CroParams::default(), 0),
            Err(Error::InfeasibleInstance)
        ));
    }

    #[test]
    fn paper_pure_on_wall_keeps_minimal_solution() {
        let inst = fixtures::line3();
        let g = inst.reach_graph().unwrap();
        let params = CroParams {
            perturbation_mode: PerturbationMode::PaperPure,
            population_size: 1,
            unity_seed_fraction: 0.0,
            ..CroParams::default()
        };
        let mut r = Reactor::new(&inst, &g, params, ChaCha8Rng::seed_from_u64(3)).unwrap();
        let min = greedy::greedy_from(&inst, &g, &r.population()[0].solution).unwrap();
        r.population[0] = Molecule::new(min.clone(), min.objective(&inst), 1.0);
        r.on_wall(0);
        assert_eq!(r.population()[0].solution, min);
        assert_eq!(r.trace.counts.on_wall_accepted, 1);
    }

    #[test]
    fn energy_is_conserved_by_every_reaction() {
        let p = RandomParams::square(25, 60.0, 25.0, 1.0);
        let mut seen = 0;
        for seed in 0..40u64 {
            let inst = generate_random(&p, seed).unwrap();
            let g = inst.reach_graph().unwrap();
            if !feasibility::instance_feasible(&inst, &g) {
                continue;
            }
            seen += 1;
            let params = CroParams {
                fe_limit: 400,
                population_size: 6,
                synthesis_threshold: 3.0,
                decomposition_threshold: 2,
                ..CroParams::default()
            };
            let mut r = Reactor::new(&inst, &g, params, ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let total = r.total_energy();
            while r.step().is_some() {
                assert!(close(r.total_energy(), total));
                assert!(r.population().iter().all(|m| m.ke >= 0.0));
                for m in r.population() {
                    assert!(feasibility::feasible(&inst, &g, m.solution.as_slice()));
                    assert_eq!(m.pe, m.solution.objective(&inst));
                }
            }
            let c = r.trace.counts;
            assert!(c.on_wall > 0 && c.intermolecular > 0);
            assert_eq!(r.evaluations(), 400);
        }
        assert!(seen > 0);
    }

    #[test]
    fn never_worse_than_greedy_and_deterministic() {
        let p = RandomParams::square(30, 60.0, 25.0, 1.0);
        for seed in 0..10u64 {
            let inst = generate_random(&p, seed).unwrap();
            let g = inst.reach_graph().unwrap();
            if !feasibility::instance_feasible(&inst, &g) {
                continue;
            }
            let params = CroParams {
                fe_limit: 300,
                ..CroParams::default()
            };
            let gr = greedy::greedy(&inst, &g).objective.unwrap();
            let (a, ta) = cro_seeded(&inst, &g, &params, seed).unwrap();
            let (b, tb) = cro_seeded(&inst, &g, &params, seed).unwrap();
            assert!(a.objective.unwrap() <= gr);
            assert_eq!(a.solution, b.solution);
            assert_eq!(ta, tb);
        }
    }
}
