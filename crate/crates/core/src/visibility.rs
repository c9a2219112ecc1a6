//! b-visibility between lattice points.
//!
//! [`is_b_visible`] uses the gcd_b criterion, with the shared-coordinate rule
//! when the two points lie on a common vertical or horizontal line.
//! [`curve_oracle_visible`] searches the defining curve for interior lattice
//! points directly, in exact integer arithmetic, and exists to check the
//! former.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{is_gcd_b_one, BExponent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticePoint { x, y }
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl FromStr for LatticePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse lattice point {s:?}"));
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (x, y) = inner.split_once(',').ok_or_else(bad)?;
        Ok(LatticePoint {
            x: x.trim().parse().map_err(|_| bad())?,
            y: y.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Parses `"x1,y1;x2,y2;..."`.
pub fn parse_point_list(s: &str) -> Result<Vec<LatticePoint>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// Whether `p` is b-visible from `q`.
///
/// Points on a common vertical or horizontal line see each other only at
/// distance one. Otherwise visibility is `gcd_b(p1 - q1, p2 - q2) = 1`.
pub fn is_b_visible(b: BExponent, p: LatticePoint, q: LatticePoint) -> Result<bool> {
    if p == q {
        return Err(Error::Undefined(format!(
            "visibility of {p} from itself is undefined"
        )));
    }
    let dx = p.x.checked_sub(q.x);
    let dy = p.y.checked_sub(q.y);
    let (dx, dy) = match (dx, dy) {
        (Some(dx), Some(dy)) => (dx, dy),
        _ => {
            return Err(Error::Unsupported(format!(
                "displacement from {q} to {p} overflows 64 bits"
            )))
        }
    };
    Ok(displacement_visible(b, dx, dy))
}

fn displacement_visible(b: BExponent, dx: i64, dy: i64) -> bool {
    match (dx, dy) {
        (0, dy) => dy.unsigned_abs() == 1,
        (dx, 0) => dx.unsigned_abs() == 1,
        (dx, dy) => is_gcd_b_one(b, dx, dy).expect("both components nonzero"),
    }
}

/// Visibility decided from the curve itself.
///
/// Takes the curve `a1 (y - q2)^b1 = a2 (x - q1)^b2` through `p` with
/// `a1 = (p1 - q1)^b2` and `a2 = (p2 - q2)^b1`, and looks for a lattice point
/// strictly between `q` and `p` on it. Only displacements with both
/// components positive are supported.
pub fn curve_oracle_visible(b: BExponent, p: LatticePoint, q: LatticePoint) -> Result<bool> {
    if p == q {
        return Err(Error::Undefined(format!(
            "visibility of {p} from itself is undefined"
        )));
    }
    let dx = p.x.checked_sub(q.x).filter(|&d| d > 0);
    let dy = p.y.checked_sub(q.y).filter(|&d| d > 0);
    let (dx, dy) = match (dx, dy) {
        (Some(dx), Some(dy)) => (dx, dy),
        _ => {
            return Err(Error::Unsupported(format!(
                "curve oracle needs {p} strictly above and right of {q}"
            )))
        }
    };
    let a1 = BigInt::from(dx).pow(b.b2());
    let a2 = BigInt::from(dy).pow(b.b1());
    // Positive quadrant: the curve is the graph of an increasing function of
    // x, so each interior column meets it at most once.
    for rx in 1..dx {
        let rhs = &a2 * BigInt::from(rx).pow(b.b2());
        if !(&rhs % &a1).is_zero() {
            continue;
        }
        let target = rhs / &a1;
        let ry = target.nth_root(b.b1());
        if ry.pow(b.b1()) == target && ry.is_positive() && ry < BigInt::from(dy) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A set of watchpoints that are pairwise b-visible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WatchpointSet {
    b: BExponent,
    points: Vec<LatticePoint>,
}

impl WatchpointSet {
    pub fn b(&self) -> BExponent {
        self.b
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points.contains(&p)
    }

    /// Largest `|u|` or `|v|` over the watchpoints.
    pub fn max_offset(&self) -> u64 {
        self.points
            .iter()
            .map(|w| w.x.unsigned_abs().max(w.y.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// Whether `p` is b-visible from every watchpoint. A point of the set is
    /// not visible from the set.
    pub fn sees(&self, p: LatticePoint) -> bool {
        self.points
            .iter()
            .all(|&w| w != p && is_b_visible(self.b, p, w).unwrap_or(false))
    }
}

/// Checks that the points are distinct, pairwise b-visible, and no
/// more than `2^(b1+b2)` in number.
pub fn validate_watchpoint_set(b: BExponent, points: &[LatticePoint]) -> Result<WatchpointSet> {
    if points.is_empty() {
        return Err(Error::Domain("watchpoint set is empty".into()));
    }
    let bound = b.watchpoint_bound();
    if points.len() as u64 > bound {
        return Err(Error::TooManyWatchpoints {
            len: points.len(),
            bound,
        });
    }
    for (i, &p) in points.iter().enumerate() {
        for (j, &q) in points.iter().enumerate().skip(i + 1) {
            if p == q {
                return Err(Error::DuplicateWatchpoint {
                    point: p,
                    first: i,
                    second: j,
                });
            }
            if !is_b_visible(b, q, p)? {
                return Err(Error::NotMutuallyVisible { p, q });
            }
        }
    }
    Ok(WatchpointSet {
        b,
        points: points.to_vec(),
    })
}
