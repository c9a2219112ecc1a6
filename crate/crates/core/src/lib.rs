//! Visibility of lattice points along the curves `a1 y^b1 = a2 x^b2`, as seen
//! by alpha-random walkers.
//!
//! * [`numtheory`]: prime tables, the generalized gcd, `ζ(k)`, Euler products.
//! * [`visibility`]: the visibility predicate, its curve oracle, watchpoint sets.
//! * [`walk`]: SplitMix64-driven alpha-random walks.
//! * [`estimators`]: Monte Carlo proportions of visible steps and their exact
//!   finite-n expectations.
//! * [`theory`]: limiting densities and checks of the underlying mean values.

pub mod binomial;
pub mod error;
pub mod estimators;
pub mod numtheory;
pub mod theory;
pub mod visibility;
pub mod walk;

pub use error::{Error, Result};
pub use estimators::{
    aggregate_trials, exact_expectation_walkers, exact_expectation_watchpoints,
    simulate_walkers_run, simulate_watchpoint_run, AggregateResult, Mode, SimulationSpec,
    TrialResult,
};
pub use numtheory::{gcd_b, zeta_int, BExponent, DensityResult, PrimeTables};
pub use theory::{density_walkers, density_watchpoints, ShiftVector};
pub use visibility::{
    curve_oracle_visible, is_b_visible, validate_watchpoint_set, LatticePoint, WatchpointSet,
};
pub use walk::{derive_trial_seed, walk_positions, RngState, WalkerConfig};
