//! Seedable alpha-random walks.
//!
//! Every stream is driven by SplitMix64, so a seed fixes the walk on every
//! platform and in any implementation that follows the same recipe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::visibility::LatticePoint;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub state: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform in `[0, 1)` from the top 53 bits of the next output.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Functional form of [`RngState::next_uniform`].
pub fn next_uniform(state: RngState) -> (f64, RngState) {
    let mut s = state;
    let u = s.next_uniform();
    (u, s)
}

/// Seed for walker `walker` of trial `trial`: the `(trial * walkers_per_trial
/// + walker + 1)`-th SplitMix64 output from state `master`.
pub fn derive_trial_seed(master: u64, trial: u64, walker: u64, walkers_per_trial: u64) -> u64 {
    let index = trial
        .wrapping_mul(walkers_per_trial)
        .wrapping_add(walker)
        .wrapping_add(1);
    mix(master.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

/// Probability `alpha` of a step `(1,0)`; the step `(0,1)` has `1 - alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WalkerConfig {
    alpha: f64,
}

impl WalkerConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(WalkerConfig { alpha })
        } else {
            Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
        }
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }
}

impl TryFrom<f64> for WalkerConfig {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        WalkerConfig::new(alpha)
    }
}

impl From<WalkerConfig> for f64 {
    fn from(cfg: WalkerConfig) -> f64 {
        cfg.alpha
    }
}

/// A lazily generated walk from the origin. Yields `P_1, P_2, ...`; the
/// starting point `P_0 = (0,0)` is not emitted.
#[derive(Debug, Clone)]
pub struct Walk {
    rng: RngState,
    alpha: f64,
    x: i64,
    step: i64,
}

impl Walk {
    pub fn new(cfg: WalkerConfig, seed: u64) -> Self {
        Walk {
            rng: RngState::new(seed),
            alpha: cfg.alpha,
            x: 0,
            step: 0,
        }
    }

    /// Advances one step and returns the new x coordinate; y is
    /// `steps_taken() - x`.
    #[inline]
    pub fn advance(&mut self) -> i64 {
        if self.rng.next_uniform() < self.alpha {
            self.x += 1;
        }
        self.step += 1;
        self.x
    }

    pub fn steps_taken(&self) -> i64 {
        self.step
    }

    pub fn current(&self) -> LatticePoint {
        LatticePoint::new(self.x, self.step - self.x)
    }
}

impl Iterator for Walk {
    type Item = LatticePoint;

    fn next(&mut self) -> Option<LatticePoint> {
        self.advance();
        Some(self.current())
    }
}

/// The first `n` positions of an alpha-random walk.
pub fn walk_positions(cfg: WalkerConfig, seed: u64, n: usize) -> impl Iterator<Item = LatticePoint> {
    Walk::new(cfg, seed).take(n)
}
