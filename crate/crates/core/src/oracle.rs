//! Ground truth for small instances: exhaustive search, randomized
//! submodularity checks and an empirical check of the curvature constants.
//!
//! Every randomized check is a pure function of its seed.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curvature::{elemental_curvature, total_curvature, AlphaDomain};
use crate::error::{Error, Result};
use crate::field::QuadratureGrid;
use crate::sensing::CandidateCoverage;

/// Largest number of subsets [`brute_force`] enumerates by default.
pub const DEFAULT_SUBSET_CAP: u128 = 2_000_000;

/// Relative tolerance for every inequality checked here.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

/// Largest ground set [`check_definition_equivalence`] tabulates.
pub const MAX_TABULATED: usize = 20;

fn tol(reference: f64) -> f64 {
    VIOLATION_TOLERANCE * reference.abs().max(1.0)
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Ascending candidate indices.
    pub best_subset: Vec<usize>,
    pub best_value: f64,
    pub subsets_evaluated: u128,
}

impl OracleResult {
    pub fn to_text(&self) -> String {
        format!(
            "best subset: {:?}\nbest value: {}\nsubsets evaluated: {}\n",
            self.best_subset, self.best_value, self.subsets_evaluated
        )
    }
}

/// Exact maximizer of the objective over all subsets of size `min(N, n)`.
/// Ties go to the lexicographically smallest subset.
pub fn brute_force(cov: &CandidateCoverage, n_agents: usize, cap: u128) -> Result<OracleResult> {
    if n_agents < 1 {
        return Err(Error::param("number of agents must be at least 1"));
    }
    if cov.is_empty() {
        return Err(Error::arg("candidate set is empty"));
    }
    let n = cov.len();
    let k = n_agents.min(n);
    let subsets = binomial(n, k);
    if subsets > cap {
        return Err(Error::InstanceTooLarge { subsets, cap });
    }
    let mass = cov.mass();
    let base = vec![1.0; mass.len()];
    // Chunk by first element; chunks come back in lexicographic order.
    let best = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut product = vec![1.0; mass.len()];
            apply(&mut product, &base, cov.row(first));
            let mut search = Search {
                cov,
                mass,
                n,
                k,
                stack: vec![first],
                best: None,
                evaluated: 0,
            };
            search.descend(first + 1, &product);
            (search.best, search.evaluated)
        })
        .collect::<Vec<_>>();
    let mut out: Option<(Vec<usize>, f64)> = None;
    let mut evaluated = 0u128;
    for (chunk, count) in best {
        evaluated += count;
        if let Some((set, value)) = chunk {
            if out.as_ref().is_none_or(|(_, v)| value > *v) {
                out = Some((set, value));
            }
        }
    }
    let (best_subset, best_value) = out.expect("at least one subset");
    Ok(OracleResult {
        best_subset,
        best_value,
        subsets_evaluated: evaluated,
    })
}

fn apply(dst: &mut [f64], src: &[f64], row: &[f64]) {
    for ((d, s), p) in dst.iter_mut().zip(src).zip(row) {
        *d = s * (1.0 - p);
    }
}

struct Search<'a> {
    cov: &'a CandidateCoverage,
    mass: &'a [f64],
    n: usize,
    k: usize,
    stack: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
    evaluated: u128,
}

impl Search<'_> {
    fn descend(&mut self, next: usize, product: &[f64]) {
        if self.stack.len() == self.k {
            let value: f64 = self
                .mass
                .iter()
                .zip(product)
                .map(|(w, q)| w * (1.0 - q))
                .sum();
            self.evaluated += 1;
            if self.best.as_ref().is_none_or(|(_, v)| value > *v) {
                self.best = Some((self.stack.clone(), value));
            }
            return;
        }
        let remaining = self.k - self.stack.len();
        let mut child = vec![0.0; product.len()];
        for j in next..=self.n - remaining {
            apply(&mut child, product, self.cov.row(j));
            self.stack.push(j);
            self.descend(j + 1, &child);
            self.stack.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularViolation {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub k: usize,
    pub gain_s: f64,
    pub gain_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularReport {
    pub seed: u64,
    pub trials: usize,
    /// Triples with `gain(S) < gain(T) − tol`.
    pub violations: Vec<SubmodularViolation>,
    /// Largest `gain(T) − gain(S)` seen, negative when every gain shrank.
    pub max_violation: f64,
    /// Pairs with `H(S) > H(T) + tol`.
    pub monotonicity_violations: usize,
}

impl SubmodularReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.monotonicity_violations == 0
    }

    pub fn to_text(&self) -> String {
        format!(
            "submodularity: seed {} trials {} violations {} monotonicity violations {} max violation {:e}\n",
            self.seed,
            self.trials,
            self.violations.len(),
            self.monotonicity_violations,
            self.max_violation
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,t,k,gain_s,gain_t\n");
        for v in &self.violations {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                join(&v.s),
                join(&v.t),
                v.k,
                v.gain_s,
                v.gain_t
            );
        }
        out
    }
}

fn join(set: &[usize]) -> String {
    set.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Random `S ⊆ T` and `k ∉ T`, each element kept with probability 1/2.
fn draw_triple(rng: &mut ChaCha8Rng, n: usize) -> (Vec<usize>, Vec<usize>, usize) {
    let k = rng.gen_range(0..n);
    let t: Vec<usize> = (0..n).filter(|&i| i != k && rng.gen_bool(0.5)).collect();
    let s: Vec<usize> = t.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    (s, t, k)
}

/// Randomized check of monotonicity and diminishing returns.
pub fn check_submodular(
    cov: &CandidateCoverage,
    trials: usize,
    seed: u64,
) -> Result<SubmodularReport> {
    if trials < 1 {
        return Err(Error::param("trials must be at least 1"));
    }
    if cov.is_empty() {
        return Err(Error::arg("candidate set is empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SubmodularReport {
        seed,
        trials,
        violations: Vec::new(),
        max_violation: f64::NEG_INFINITY,
        monotonicity_violations: 0,
    };
    for _ in 0..trials {
        let (s, t, k) = draw_triple(&mut rng, cov.len());
        let state_s = cov.state_for(&s);
        let state_t = cov.state_for(&t);
        let gain_s = state_s.gain(cov, k);
        let gain_t = state_t.gain(cov, k);
        report.max_violation = report.max_violation.max(gain_t - gain_s);
        if gain_s < gain_t - tol(gain_t) {
            report.violations.push(SubmodularViolation {
                s,
                t,
                k,
                gain_s,
                gain_t,
            });
        }
        if state_s.value() > state_t.value() + tol(state_t.value()) {
            report.monotonicity_violations += 1;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub trials: usize,
    pub ground_set_size: usize,
    /// Pairs with `f(S∪T) + f(S∩T) > f(S) + f(T) + tol`.
    pub pair_violations: usize,
    /// Triples with `f(S∪{y}) − f(S) < f(T∪{y}) − f(T) − tol`.
    pub gain_violations: usize,
    /// Largest `f(S∪T) + f(S∩T) − f(S) − f(T)` seen.
    pub max_pair_excess: f64,
}

impl EquivalenceReport {
    /// Both characterizations agree: either both hold or both fail.
    pub fn consistent(&self) -> bool {
        (self.pair_violations == 0) == (self.gain_violations == 0)
    }

    pub fn passed(&self) -> bool {
        self.pair_violations == 0 && self.gain_violations == 0
    }

    pub fn to_text(&self) -> String {
        format!(
            "definition equivalence: seed {} trials {} ground set {} pair violations {} gain violations {} max pair excess {:e}\n",
            self.seed,
            self.trials,
            self.ground_set_size,
            self.pair_violations,
            self.gain_violations,
            self.max_pair_excess
        )
    }
}

/// Objective value of every subset, indexed by bitmask.
pub fn subset_table(cov: &CandidateCoverage) -> Result<Vec<f64>> {
    let n = cov.len();
    if n > MAX_TABULATED {
        return Err(Error::arg(format!(
            "ground set of {n} candidates exceeds the tabulation limit of {MAX_TABULATED}"
        )));
    }
    let mass = cov.mass();
    let mut table = vec![0.0; 1 << n];
    // Products for each mask are built from the mask without its top bit.
    let mut products: Vec<Vec<f64>> = vec![vec![1.0; mass.len()]];
    for mask in 1usize..(1 << n) {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let mut p = vec![0.0; mass.len()];
        apply(&mut p, &products[mask & !(1 << top)], cov.row(top));
        table[mask] = mass.iter().zip(&p).map(|(w, q)| w * (1.0 - q)).sum();
        products.push(p);
    }
    Ok(table)
}

/// Checks the lattice form `f(S∪T) + f(S∩T) ≤ f(S) + f(T)` and the
/// diminishing-returns form on the same tabulated objective.
pub fn check_definition_equivalence(
    cov: &CandidateCoverage,
    trials: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    if trials < 1 {
        return Err(Error::param("trials must be at least 1"));
    }
    if cov.is_empty() {
        return Err(Error::arg("candidate set is empty"));
    }
    let table = subset_table(cov)?;
    let n = cov.len();
    let full = (1usize << n) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivalenceReport {
        seed,
        trials,
        ground_set_size: n,
        pair_violations: 0,
        gain_violations: 0,
        max_pair_excess: f64::NEG_INFINITY,
    };
    for _ in 0..trials {
        let s = rng.gen_range(0..=full);
        let t = rng.gen_range(0..=full);
        let lhs = table[s | t] + table[s & t];
        let rhs = table[s] + table[t];
        report.max_pair_excess = report.max_pair_excess.max(lhs - rhs);
        if lhs > rhs + tol(rhs) {
            report.pair_violations += 1;
        }
        let (small, big) = (s & t, t);
        let outside: Vec<usize> = (0..n).filter(|&i| big & (1 << i) == 0).collect();
        if let Some(&y) = outside.get(rng.gen_range(0..outside.len().max(1))) {
            let bit = 1 << y;
            let gain_small = table[small | bit] - table[small];
            let gain_big = table[big | bit] - table[big];
            if gain_small < gain_big - tol(gain_big) {
                report.gain_violations += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureCheck {
    pub seed: u64,
    pub c: f64,
    pub alpha: f64,
    /// Largest sampled `[f(S∪{i,j}) − f(S∪{i})] / [f(S∪{j}) − f(S)]`.
    pub max_ratio: f64,
    /// Largest `1 − [f(F) − f(F∖{j})] / f({j})` over candidates.
    pub max_bracket: f64,
    pub ratio_violations: usize,
    pub bracket_violations: usize,
    /// Samples with a positive denominator.
    pub ratios_sampled: usize,
}

impl CurvatureCheck {
    pub fn passed(&self) -> bool {
        self.ratio_violations == 0 && self.bracket_violations == 0
    }

    pub fn to_text(&self) -> String {
        format!(
            "curvature: seed {} c {} alpha {} max bracket {} max ratio {} ({} samples) violations {}/{}\n",
            self.seed,
            self.c,
            self.alpha,
            self.max_bracket,
            self.max_ratio,
            self.ratios_sampled,
            self.bracket_violations,
            self.ratio_violations
        )
    }
}

/// Compares the closed-form curvatures against their set-function
/// definitions: every bracket against `c`, and `samples` random ratios
/// against `α`.
pub fn check_curvature(
    cov: &CandidateCoverage,
    grid: &QuadratureGrid,
    domain: AlphaDomain,
    samples: usize,
    seed: u64,
) -> Result<CurvatureCheck> {
    if cov.len() < 2 {
        return Err(Error::arg("curvature check needs at least two candidates"));
    }
    let c = total_curvature(cov)?.c;
    let alpha = elemental_curvature(cov, grid, domain)?.alpha;
    let n = cov.len();
    let all: Vec<usize> = (0..n).collect();
    let h_all = cov.value(&all);
    let mut out = CurvatureCheck {
        seed,
        c,
        alpha,
        max_ratio: f64::NEG_INFINITY,
        max_bracket: f64::NEG_INFINITY,
        ratio_violations: 0,
        bracket_violations: 0,
        ratios_sampled: 0,
    };
    for j in 0..n {
        let rest: Vec<usize> = all.iter().copied().filter(|&i| i != j).collect();
        let single = cov.single_value(j);
        if single <= 0.0 {
            continue;
        }
        let bracket = 1.0 - (h_all - cov.value(&rest)) / single;
        out.max_bracket = out.max_bracket.max(bracket);
        if bracket > c + VIOLATION_TOLERANCE {
            out.bracket_violations += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let s: Vec<usize> = (0..n)
            .filter(|&x| x != i && x != j && rng.gen_bool(0.5))
            .collect();
        let state = cov.state_for(&s);
        let before = state.gain(cov, j);
        if before <= 0.0 {
            continue;
        }
        let mut with_i = state.clone();
        with_i.add(cov, i);
        let ratio = with_i.gain(cov, j) / before;
        out.ratios_sampled += 1;
        out.max_ratio = out.max_ratio.max(ratio);
        if ratio > alpha + VIOLATION_TOLERANCE {
            out.ratio_violations += 1;
        }
    }
    Ok(out)
}
