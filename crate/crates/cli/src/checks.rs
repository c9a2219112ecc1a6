//! Verification routines behind `bvis verify`.
//!
//! Each routine returns a list of [`Check`]s; a command fails when any of
//! them does.

use bvis_core::numtheory::power_divides;
use bvis_core::theory::{binomial_congruence_sum, mean_value_check, MeanValueKind};
use bvis_core::{
    curve_oracle_visible, gcd_b, is_b_visible, validate_watchpoint_set, walk_positions, BExponent,
    Error, LatticePoint, Result, RngState, WalkerConfig,
};

use crate::output::{Cell, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: Cell,
    pub threshold: Cell,
}

impl Check {
    fn count(name: impl Into<String>, failures: u64) -> Self {
        Check {
            name: name.into(),
            passed: failures == 0,
            measured: Cell::Int(failures),
            threshold: Cell::Int(0),
        }
    }

    fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured <= threshold,
            measured: Cell::Float(measured),
            threshold: Cell::Float(threshold),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub fn report_table(checks: &[Check]) -> Table {
    let mut table = Table::new(["check", "status", "measured", "threshold"]);
    for c in checks {
        table.push(vec![
            c.name.as_str().into(),
            if c.passed { "pass" } else { "fail" }.into(),
            c.measured.clone(),
            c.threshold.clone(),
        ]);
    }
    table
}

const EXPONENTS: [(u32, u32); 11] = [
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 1),
    (2, 3),
    (3, 1),
    (3, 2),
    (3, 4),
    (4, 1),
    (4, 3),
];

struct Sampler(RngState);

impl Sampler {
    fn below(&mut self, n: u64) -> u64 {
        // Multiply-shift; the bias is irrelevant at these ranges.
        ((self.0.next_u64() as u128 * n as u128) >> 64) as u64
    }

    fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    fn exponent(&mut self) -> BExponent {
        let (b1, b2) = EXPONENTS[self.below(EXPONENTS.len() as u64) as usize];
        BExponent::new(b1, b2).expect("coprime table entry")
    }

    /// A pair not both zero. Half the time it carries a common factor
    /// `d^b1`, `d^b2` so that gcd_b is often above 1.
    fn pair(&mut self, b: BExponent) -> (i64, i64) {
        loop {
            let (m, n) = if self.below(2) == 0 {
                (self.range(-1_000_000, 1_000_000), self.range(-1_000_000, 1_000_000))
            } else {
                let d = self.range(1, 12);
                (
                    d.pow(b.b1()) * self.range(-1000, 1000),
                    d.pow(b.b2()) * self.range(-1000, 1000),
                )
            };
            if (m, n) != (0, 0) {
                return (m, n);
            }
        }
    }
}

/// Largest d with d^b1 | m and d^b2 | n, scanning the divisors of the
/// nonzero argument.
fn brute_gcd_b(b: BExponent, m: i64, n: i64) -> u64 {
    let (m, n) = (m.unsigned_abs(), n.unsigned_abs());
    let base = if m != 0 { m } else { n };
    let mut best = 1;
    let mut d = 1u64;
    while d * d <= base {
        if base % d == 0 {
            for cand in [d, base / d] {
                if power_divides(cand, b.b1(), m) && power_divides(cand, b.b2(), n) {
                    best = best.max(cand);
                }
            }
        }
        d += 1;
    }
    best
}

/// Randomised checks of gcd_b, visibility, walks and watchpoint sets.
pub fn gcd_properties(cases: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = Sampler(RngState::new(seed));
    let mut checks = Vec::new();

    let mut bad = 0;
    for _ in 0..cases {
        let b = rng.exponent();
        let (m, n) = rng.pair(b);
        bad += (gcd_b(b, m, n)? != brute_gcd_b(b, m, n)) as u64;
    }
    checks.push(Check::count(format!("gcd_b equals brute force ({cases} cases)"), bad));

    let mut bad = 0;
    for _ in 0..cases {
        let b = rng.exponent();
        let (m, n) = rng.pair(b);
        let d = rng.range(1, 50) as u64;
        let lhs = gcd_b(b, m, n)? % d == 0;
        let rhs = power_divides(d, b.b1(), m.unsigned_abs()) && power_divides(d, b.b2(), n.unsigned_abs());
        bad += (lhs != rhs) as u64;
    }
    checks.push(Check::count(
        format!("d | gcd_b(m,n) iff d^b1 | m and d^b2 | n ({cases} cases)"),
        bad,
    ));

    let mut bad = 0;
    for _ in 0..cases {
        let b = rng.exponent();
        let b = if b.b1() <= b.b2() { b } else { b.swapped() };
        let (m, n) = rng.pair(b);
        let a = rng.range(-10, 10);
        bad += (gcd_b(b, m, n)? != gcd_b(b, m + a * n, n)?) as u64;
    }
    checks.push(Check::count(
        format!("gcd_b(m,n) = gcd_b(m+an,n) when b1 <= b2 ({cases} cases)"),
        bad,
    ));

    let mut bad = 0;
    for _ in 0..cases {
        let b = rng.exponent();
        let mut build = |primes: [i64; 3]| -> i64 {
            primes.iter().map(|p| p.pow(rng.below(5) as u32)).product()
        };
        let (m1, n1) = (build([2, 3, 5]), build([2, 3, 5]));
        let (m2, n2) = (build([7, 11, 13]), build([7, 11, 13]));
        let sign = if rng.below(2) == 0 { 1 } else { -1 };
        let whole = gcd_b(b, sign * m1 * m2, n1 * n2)?;
        bad += (whole != gcd_b(b, sign * m1, n1)? * gcd_b(b, m2, n2)?) as u64;
    }
    checks.push(Check::count(format!("gcd_b is bi-multiplicative ({cases} cases)"), bad));

    let mut bad = 0;
    for _ in 0..cases {
        let b = rng.exponent();
        let p = LatticePoint::new(rng.range(-300, 300), rng.range(-300, 300));
        let q = LatticePoint::new(rng.range(-300, 300), rng.range(-300, 300));
        if p != q {
            bad += (is_b_visible(b, p, q)? != is_b_visible(b, q, p)?) as u64;
        }
    }
    checks.push(Check::count(format!("visibility is symmetric ({cases} cases)"), bad));

    let walks = (cases / 10).max(1);
    let mut bad = 0;
    for _ in 0..walks {
        let alpha = WalkerConfig::new(0.001 + 0.998 * rng.0.next_uniform())?;
        let mut prev = LatticePoint::ORIGIN;
        for (i, p) in walk_positions(alpha, rng.0.next_u64(), 1000).enumerate() {
            let step = (p.x - prev.x, p.y - prev.y);
            if p.x + p.y != i as i64 + 1 || !(step == (1, 0) || step == (0, 1)) {
                bad += 1;
            }
            prev = p;
        }
    }
    checks.push(Check::count(
        format!("walk positions satisfy x_i + y_i = i with unit steps ({walks} walks)"),
        bad,
    ));

    let mut bad = 0;
    for _ in 0..cases / 10 {
        let b = rng.exponent();
        let bound = b.watchpoint_bound() as usize;
        // Distinct points, one more than the bound: never pairwise visible,
        // and always refused.
        let mut points: Vec<LatticePoint> = Vec::with_capacity(bound + 1);
        while points.len() < bound + 1 {
            let p = LatticePoint::new(rng.range(-40, 40), rng.range(-40, 40));
            if !points.contains(&p) {
                points.push(p);
            }
        }
        let mut mutual = true;
        'pairs: for (i, &p) in points.iter().enumerate() {
            for &q in &points[i + 1..] {
                if !is_b_visible(b, p, q)? {
                    mutual = false;
                    break 'pairs;
                }
            }
        }
        let refused = matches!(
            validate_watchpoint_set(b, &points),
            Err(Error::TooManyWatchpoints { .. })
        );
        bad += (mutual || !refused) as u64;
    }
    checks.push(Check::count(
        format!("sets above 2^(b1+b2) are never mutually visible and are refused ({} sets)", cases / 10),
        bad,
    ));
    Ok(checks)
}

/// Exhaustive comparison of the gcd_b criterion with the curve search over
/// displacements `1..=size` in each coordinate.
pub fn visibility_oracle(b: BExponent, size: i64) -> Result<Vec<Check>> {
    if size < 1 {
        return Err(Error::Domain(format!("box size must be positive, got {size}")));
    }
    let mut disagreements = 0;
    for dx in 1..=size {
        for dy in 1..=size {
            let p = LatticePoint::new(dx, dy);
            let criterion = is_b_visible(b, p, LatticePoint::ORIGIN)?;
            let oracle = curve_oracle_visible(b, p, LatticePoint::ORIGIN)?;
            disagreements += (criterion != oracle) as u64;
        }
    }
    Ok(vec![Check::count(
        format!("b = {b}: criterion agrees with curve search on {} displacements", size * size),
        disagreements,
    )])
}

/// Largest `|Σ_{k ≡ a (mod d)} P(k) - 1/d|` over residues `a`.
pub fn congruence_max_deviation(alpha: WalkerConfig, n: u64, d: u64) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    let mut total = 0.0;
    for a in 0..d {
        let s = binomial_congruence_sum(alpha.alpha(), n, d, a)?;
        total += s;
        worst = worst.max((s - 1.0 / d as f64).abs());
    }
    Ok((worst, total))
}

pub fn congruence_sum(alpha: WalkerConfig, n: u64, d: u64, threshold: f64) -> Result<Vec<Check>> {
    let (worst, total) = congruence_max_deviation(alpha, n, d)?;
    Ok(vec![
        Check::at_most(format!("max deviation from 1/{d} at n = {n}"), worst, threshold),
        Check::at_most("residue classes sum to 1".to_string(), (total - 1.0).abs(), 1e-9),
    ])
}

/// Main term agreement at `x`, and no growth of the normalised error from
/// `x/100` to `x` when `x/100` is itself large enough.
pub fn mean_value(b: BExponent, kind: &MeanValueKind, x: u64, threshold: f64) -> Result<Vec<Check>> {
    let at_x = mean_value_check(b, kind, x)?;
    let density = at_x.predicted_main / x as f64;
    let mut checks = vec![Check::at_most(
        format!("|S(x)/x - C| at x = {x} (C = {density:.9})"),
        (at_x.partial_sum / x as f64 - density).abs(),
        threshold,
    )];
    let small = x / 100;
    if small >= bvis_core::theory::MEAN_VALUE_MIN_X {
        let at_small = mean_value_check(b, kind, small)?;
        checks.push(Check::at_most(
            format!("normalised error ratio, x = {x} over x = {small}"),
            at_x.error_ratio / at_small.error_ratio,
            1.0,
        ));
    }
    Ok(checks)
}
