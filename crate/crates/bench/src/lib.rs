//! Shared fixtures for the criterion benches.

use bvis_core::{validate_watchpoint_set, BExponent, LatticePoint, WatchpointSet};

/// The three-point watchpoint set `{(0,0), (1,2), (2,1)}`, pairwise visible
/// for every exponent pair.
pub fn three_point_set(b: BExponent) -> WatchpointSet {
    validate_watchpoint_set(
        b,
        &[
            LatticePoint::new(0, 0),
            LatticePoint::new(1, 2),
            LatticePoint::new(2, 1),
        ],
    )
    .expect("pairwise visible for any b")
}
