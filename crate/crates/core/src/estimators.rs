//! Monte Carlo estimates of the proportion of visible steps, and exact
//! finite-n expectations to check them against.
//!
//! A watchpoint run counts the steps at which one walker is visible from
//! every watchpoint; a walkers run counts the steps at which `r` independent
//! walkers are all visible from the origin. A step that lands on a
//! watchpoint never counts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::BinomialRows;
use crate::error::{Error, Result};
use crate::numtheory::{gcd, BExponent, DensityResult, PrimeTables};
use crate::visibility::{is_b_visible, LatticePoint, WatchpointSet};
use crate::walk::{derive_trial_seed, Walk, WalkerConfig};

/// Largest step count accepted by the exact expectation routines.
pub const EXACT_MAX_STEPS: usize = 2000;

/// Lookup tables answering "is `gcd_b(dx, dy) = 1`" in O(1) for
/// `|dx|, |dy| <= limit`.
///
/// `lower[m]` is the product of the primes `p` with `p^b1 | m`, `upper[m]`
/// the product of those with `p^b2 | m`. Then `gcd_b(dx, dy) > 1` exactly
/// when `gcd(lower[|dx|], upper[|dy|]) > 1`.
#[derive(Debug, Clone)]
pub struct VisibilityKernel {
    b: BExponent,
    lower: Vec<u32>,
    upper: Vec<u32>,
}

impl VisibilityKernel {
    pub fn new(b: BExponent, limit: usize) -> Result<Self> {
        let tables = PrimeTables::build(limit.max(2))?;
        let radical = |k: u32| {
            let mut h = vec![1u32; limit + 1];
            for &p in tables.primes() {
                let Some(q) = (p as usize).checked_pow(k).filter(|&q| q <= limit) else {
                    break;
                };
                for m in (q..=limit).step_by(q) {
                    h[m] *= p;
                }
            }
            h
        };
        Ok(VisibilityKernel {
            b,
            lower: radical(b.b1()),
            upper: radical(b.b2()),
        })
    }

    pub fn b(&self) -> BExponent {
        self.b
    }

    pub fn limit(&self) -> usize {
        self.lower.len() - 1
    }

    /// Visibility of a displacement `(dx, dy) != (0, 0)` with both components
    /// inside the table range.
    #[inline]
    pub fn visible(&self, dx: i64, dy: i64) -> bool {
        let (ax, ay) = (dx.unsigned_abs() as usize, dy.unsigned_abs() as usize);
        if ax == 0 {
            return ay == 1;
        }
        if ay == 0 {
            return ax == 1;
        }
        let (h1, h2) = (self.lower[ax], self.upper[ay]);
        h1 == 1 || h2 == 1 || gcd(h1 as u64, h2 as u64) == 1
    }
}

/// Observation mode of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Mode {
    Watchpoints {
        watchpoints: WatchpointSet,
        alpha: WalkerConfig,
    },
    Walkers {
        alphas: Vec<WalkerConfig>,
    },
}

impl Mode {
    /// Independent walk streams per trial.
    pub fn walkers_per_trial(&self) -> usize {
        match self {
            Mode::Watchpoints { .. } => 1,
            Mode::Walkers { alphas } => alphas.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSpec {
    pub b: BExponent,
    pub mode: Mode,
    pub steps: usize,
    pub trials: usize,
    pub master_seed: u64,
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Domain("a simulation needs at least one step".into()));
        }
        if self.trials == 0 {
            return Err(Error::Domain("a simulation needs at least one trial".into()));
        }
        match &self.mode {
            Mode::Walkers { alphas } if alphas.is_empty() => {
                Err(Error::Domain("walkers mode needs at least one walker".into()))
            }
            Mode::Watchpoints { watchpoints, .. } if watchpoints.b() != self.b => Err(
                Error::Domain("watchpoint set was validated for a different exponent".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Total walker-steps the simulation performs.
    pub fn work(&self) -> u128 {
        self.steps as u128 * self.trials as u128 * self.mode.walkers_per_trial() as u128
    }

    /// Walk seeds of trial `t`, one per walker.
    pub fn trial_seeds(&self, t: usize) -> Vec<u64> {
        let w = self.mode.walkers_per_trial() as u64;
        (0..w)
            .map(|j| derive_trial_seed(self.master_seed, t as u64, j, w))
            .collect()
    }

    fn kernel(&self) -> Result<VisibilityKernel> {
        let offset = match &self.mode {
            Mode::Watchpoints { watchpoints, .. } => watchpoints.max_offset() as usize,
            Mode::Walkers { .. } => 0,
        };
        VisibilityKernel::new(self.b, self.steps + offset + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_index: usize,
    pub visible_count: u64,
    pub proportion: f64,
}

impl TrialResult {
    fn new(trial_index: usize, visible_count: u64, steps: usize) -> Self {
        TrialResult {
            trial_index,
            visible_count,
            proportion: visible_count as f64 / steps as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateResult {
    pub trials: Vec<TrialResult>,
    pub mean_proportion: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub sample_std: f64,
    pub theory: DensityResult,
    pub abs_deviation: f64,
}

fn count_watchpoint_run(
    kernel: &VisibilityKernel,
    watchpoints: &WatchpointSet,
    alpha: WalkerConfig,
    steps: usize,
    seed: u64,
) -> u64 {
    let points = watchpoints.points();
    let mut walk = Walk::new(alpha, seed);
    let mut count = 0u64;
    for i in 1..=steps as i64 {
        let x = walk.advance();
        let y = i - x;
        let seen = points.iter().all(|w| {
            let (dx, dy) = (x - w.x, y - w.y);
            (dx, dy) != (0, 0) && kernel.visible(dx, dy)
        });
        count += seen as u64;
    }
    count
}

fn count_walkers_run(
    kernel: &VisibilityKernel,
    alphas: &[WalkerConfig],
    steps: usize,
    seeds: &[u64],
) -> u64 {
    let mut walks: Vec<Walk> = alphas
        .iter()
        .zip(seeds)
        .map(|(&a, &s)| Walk::new(a, s))
        .collect();
    let mut count = 0u64;
    for i in 1..=steps as i64 {
        let mut all = true;
        for walk in walks.iter_mut() {
            let x = walk.advance();
            // Every stream must advance even after one walker is hidden.
            all = all && kernel.visible(x, i - x);
        }
        count += all as u64;
    }
    count
}

/// One watchpoint-mode trial of `steps` steps from the walk seeded by `seed`.
pub fn simulate_watchpoint_run(
    watchpoints: &WatchpointSet,
    alpha: WalkerConfig,
    steps: usize,
    seed: u64,
) -> Result<TrialResult> {
    if steps == 0 {
        return Err(Error::Domain("a simulation needs at least one step".into()));
    }
    let kernel = VisibilityKernel::new(watchpoints.b(), steps + watchpoints.max_offset() as usize + 1)?;
    let count = count_watchpoint_run(&kernel, watchpoints, alpha, steps, seed);
    Ok(TrialResult::new(0, count, steps))
}

/// One walkers-mode trial. `seeds[j]` drives walker `j`.
pub fn simulate_walkers_run(
    b: BExponent,
    alphas: &[WalkerConfig],
    steps: usize,
    seeds: &[u64],
) -> Result<TrialResult> {
    if alphas.is_empty() || steps == 0 {
        return Err(Error::Domain("need at least one walker and one step".into()));
    }
    if seeds.len() != alphas.len() {
        return Err(Error::Domain(format!(
            "{} walkers but {} seeds",
            alphas.len(),
            seeds.len()
        )));
    }
    let kernel = VisibilityKernel::new(b, steps + 1)?;
    Ok(TrialResult::new(0, count_walkers_run(&kernel, alphas, steps, seeds), steps))
}

/// Runs every trial of `spec` (in parallel on the current rayon pool) and
/// summarises them against `theory`. The result does not depend on the
/// number of threads.
pub fn aggregate_trials(spec: &SimulationSpec, theory: DensityResult) -> Result<AggregateResult> {
    spec.validate()?;
    let kernel = spec.kernel()?;
    let trials: Vec<TrialResult> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let seeds = spec.trial_seeds(t);
            let count = match &spec.mode {
                Mode::Watchpoints { watchpoints, alpha } => {
                    count_watchpoint_run(&kernel, watchpoints, *alpha, spec.steps, seeds[0])
                }
                Mode::Walkers { alphas } => count_walkers_run(&kernel, alphas, spec.steps, &seeds),
            };
            TrialResult::new(t, count, spec.steps)
        })
        .collect();
    Ok(summarise(trials, theory))
}

fn summarise(mut trials: Vec<TrialResult>, theory: DensityResult) -> AggregateResult {
    trials.sort_by_key(|t| t.trial_index);
    let n = trials.len() as f64;
    let mean = trials.iter().map(|t| t.proportion).sum::<f64>() / n;
    let sample_std = if trials.len() > 1 {
        (trials.iter().map(|t| (t.proportion - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    AggregateResult {
        trials,
        mean_proportion: mean,
        sample_std,
        abs_deviation: (mean - theory.value).abs(),
        theory,
    }
}

fn check_exact_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::Domain("need at least one step".into()));
    }
    if steps > EXACT_MAX_STEPS {
        return Err(Error::Capacity(format!(
            "exact expectation supports at most {EXACT_MAX_STEPS} steps, got {steps}"
        )));
    }
    Ok(())
}

/// `P(P_i visible)` for `i = 1..=steps`, where `P_i = (k, i - k)` with
/// binomial weight and `visible(k, i - k)` decides each position.
pub fn visible_step_probabilities<F>(alpha: f64, steps: usize, visible: F) -> Result<Vec<f64>>
where
    F: Fn(LatticePoint) -> bool,
{
    check_exact_steps(steps)?;
    let rows = BinomialRows::new(steps, alpha)?;
    Ok((1..=steps)
        .map(|i| {
            (0..=i)
                .filter(|&k| visible(LatticePoint::new(k as i64, (i - k) as i64)))
                .map(|k| rows.pmf(i, k))
                .sum()
        })
        .collect())
}

/// `E[S(n)]`: the exact mean proportion of steps visible from the set.
pub fn exact_expectation_watchpoints(
    watchpoints: &WatchpointSet,
    alpha: WalkerConfig,
    steps: usize,
) -> Result<f64> {
    let probs = visible_step_probabilities(alpha.alpha(), steps, |p| watchpoints.sees(p))?;
    Ok(probs.iter().sum::<f64>() / steps as f64)
}

/// `E[R(n)]`: the exact mean proportion of steps at which all walkers are
/// visible from the origin.
pub fn exact_expectation_walkers(b: BExponent, alphas: &[WalkerConfig], steps: usize) -> Result<f64> {
    if alphas.is_empty() {
        return Err(Error::Domain("need at least one walker".into()));
    }
    check_exact_steps(steps)?;
    // Walkers sharing an alpha contribute the same factor.
    let mut multiplicity: BTreeMap<u64, i32> = BTreeMap::new();
    for a in alphas {
        *multiplicity.entry(a.alpha().to_bits()).or_default() += 1;
    }
    let mut per_step = vec![1.0f64; steps];
    for (bits, count) in multiplicity {
        let probs = visible_step_probabilities(f64::from_bits(bits), steps, |p| {
            is_b_visible(b, p, LatticePoint::ORIGIN).expect("step i >= 1 is never the origin")
        })?;
        for (acc, p) in per_step.iter_mut().zip(probs) {
            *acc *= p.powi(count);
        }
    }
    Ok(per_step.iter().sum::<f64>() / steps as f64)
}
