//! Greedy placement over the candidate set under a cardinality constraint.
//!
//! Both variants use the same selection rule so they return identical
//! sequences: at each step let `g*` be the best marginal gain; the chosen
//! candidate is the lowest index whose gain is within [`TIE_TOLERANCE`]
//! (relative) of `g*`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sensing::{CandidateCoverage, CoverageState};

/// Gains at or below this are treated as "nothing left to cover".
pub const EPS_GAIN: f64 = 1e-12;

/// Relative tolerance under which two gains count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

fn tie_floor(best: f64) -> f64 {
    best - TIE_TOLERANCE * best.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyResult {
    /// Candidate indices in selection order.
    pub chosen: Vec<usize>,
    /// Marginal gain of each selection.
    pub gains: Vec<f64>,
    /// Objective after each selection.
    pub objective_trace: Vec<f64>,
    /// Marginal-gain evaluations performed.
    pub evaluations: usize,
    /// Stopped before placing `min(N, n)` agents because no gain exceeded
    /// [`EPS_GAIN`].
    pub stopped_early: bool,
    /// `N` exceeded the number of candidates.
    pub constraint_slack: bool,
}

impl GreedyResult {
    pub fn value(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(0.0)
    }
}

fn check_inputs(cov: &CandidateCoverage, n_agents: usize) -> Result<()> {
    if n_agents < 1 {
        return Err(Error::param("number of agents must be at least 1"));
    }
    if cov.is_empty() {
        return Err(Error::arg("candidate set is empty"));
    }
    Ok(())
}

fn select(candidates: &[(usize, f64)]) -> Option<(usize, f64)> {
    let best = candidates
        .iter()
        .map(|&(_, g)| g)
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = tie_floor(best);
    candidates
        .iter()
        .filter(|&&(_, g)| g >= floor)
        .min_by_key(|&&(k, _)| k)
        .copied()
}

struct Builder {
    state: CoverageState,
    result: GreedyResult,
}

impl Builder {
    fn new(cov: &CandidateCoverage, n_agents: usize) -> Self {
        Builder {
            state: cov.empty_state(),
            result: GreedyResult {
                chosen: Vec::new(),
                gains: Vec::new(),
                objective_trace: Vec::new(),
                evaluations: 0,
                stopped_early: false,
                constraint_slack: n_agents > cov.len(),
            },
        }
    }

    /// Commits `pick`; returns false if the step should end the run.
    fn commit(&mut self, cov: &CandidateCoverage, pick: Option<(usize, f64)>) -> bool {
        match pick {
            Some((k, g)) if g > EPS_GAIN => {
                self.state.add(cov, k);
                self.result.chosen.push(k);
                self.result.gains.push(g);
                self.result.objective_trace.push(self.state.value());
                true
            }
            _ => {
                self.result.stopped_early = true;
                false
            }
        }
    }
}

/// Plain greedy: every step evaluates every unselected candidate.
pub fn greedy_place(cov: &CandidateCoverage, n_agents: usize) -> Result<GreedyResult> {
    check_inputs(cov, n_agents)?;
    let steps = n_agents.min(cov.len());
    let mut b = Builder::new(cov, n_agents);
    let mut selected = vec![false; cov.len()];
    for _ in 0..steps {
        let state = &b.state;
        let gains: Vec<(usize, f64)> = (0..cov.len())
            .into_par_iter()
            .filter(|&k| !selected[k])
            .map(|k| (k, state.gain(cov, k)))
            .collect();
        b.result.evaluations += gains.len();
        let pick = select(&gains);
        if !b.commit(cov, pick) {
            break;
        }
        selected[b.result.chosen[b.result.chosen.len() - 1]] = true;
    }
    Ok(b.result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bound {
    gain: f64,
    index: usize,
}

impl Eq for Bound {}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on gain, lower index first among equals.
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy greedy: stale gains are upper bounds on current gains (diminishing
/// returns), so a step only re-evaluates candidates whose bound could still
/// reach the best fresh gain.
pub fn greedy_place_lazy(cov: &CandidateCoverage, n_agents: usize) -> Result<GreedyResult> {
    check_inputs(cov, n_agents)?;
    let steps = n_agents.min(cov.len());
    let mut b = Builder::new(cov, n_agents);
    let mut heap: BinaryHeap<Bound> = (0..cov.len())
        .map(|index| Bound {
            gain: f64::INFINITY,
            index,
        })
        .collect();
    for _ in 0..steps {
        let mut fresh: Vec<(usize, f64)> = Vec::new();
        let mut best = f64::NEG_INFINITY;
        while let Some(top) = heap.peek() {
            if !fresh.is_empty() && top.gain < tie_floor(best) {
                break;
            }
            let top = heap.pop().expect("peeked");
            let g = b.state.gain(cov, top.index);
            b.result.evaluations += 1;
            best = best.max(g);
            fresh.push((top.index, g));
        }
        let pick = select(&fresh);
        let chosen = pick.map(|(k, _)| k);
        for &(index, gain) in &fresh {
            if Some(index) != chosen {
                heap.push(Bound { gain, index });
            }
        }
        if !b.commit(cov, pick) {
            break;
        }
    }
    Ok(b.result)
}
