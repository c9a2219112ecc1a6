//! Limiting densities and numerical checks of the summation estimates behind
//! them.
//!
//! The density of steps visible from `J` pairwise visible watchpoints is
//! `∏_p (1 - J / p^(b1+b2))`; the density of steps at which `r` walkers are
//! all visible is `∏_p (1 - p^-b* + p^-b* (1 - p^-b^*)^r)` with
//! `b* = min(b1, b2)` and `b^* = max(b1, b2)`. Both are evaluated with
//! [`euler_product_accelerated`] or [`euler_product_truncated`], whichever
//! needs fewer primes.

use serde::{Deserialize, Serialize};

use crate::binomial::BinomialRows;
use crate::error::{Error, Result};
use crate::numtheory::{
    euler_product_accelerated, euler_product_truncated, gcd, is_gcd_b_one, BExponent,
    CompensatedSum, DensityResult, DeviationBound, PrimeTables, ZetaExtraction,
};

/// Default tolerance for density evaluations.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Smallest cutoff accepted by [`mean_value_check`].
pub const MEAN_VALUE_MIN_X: u64 = 100;

fn evaluate<F>(factor: F, bound: DeviationBound, extraction: ZetaExtraction, tol: f64) -> Result<DensityResult>
where
    F: Fn(u64) -> f64,
{
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let direct = bound.direct_cutoff(tol);
    let accelerated = extraction.cutoff(&bound, tol);
    let cutoff = direct.min(accelerated);
    // Bertrand: some prime lies in (P, 2P].
    let limit = (2.0 * cutoff).ceil() + 16.0;
    if limit > crate::numtheory::DEFAULT_TABLE_CAP as f64 {
        return Err(Error::Capacity(format!(
            "tolerance {tol:e} needs primes beyond {cutoff:.3e}"
        )));
    }
    let tables = PrimeTables::build(limit as usize)?;
    if accelerated <= direct {
        euler_product_accelerated(factor, bound, extraction, tol, &tables)
    } else {
        euler_product_truncated(factor, bound, tol, &tables)
    }
}

/// `∏_p (1 - J / p^(b1+b2))`, the density of steps visible from `J`
/// watchpoints. Exactly zero when `J = 2^(b1+b2)`.
pub fn density_watchpoints(b: BExponent, j: u64, tol: f64) -> Result<DensityResult> {
    let bound = b.watchpoint_bound();
    if j == 0 || j > bound {
        return Err(Error::Domain(format!(
            "number of watchpoints must be in 1..={bound}, got {j}"
        )));
    }
    let k = b.sum();
    let jf = j as f64;
    let exponent = -(k as i32);
    evaluate(
        |p| 1.0 - jf * (p as f64).powi(exponent),
        DeviationBound::new(jf, k),
        ZetaExtraction {
            zeta_arg: k,
            power: jf,
            residual: DeviationBound::new(jf * jf, 2 * k),
        },
        tol,
    )
}

/// `∏_p (1 - p^-b* + p^-b* (1 - p^-b^*)^r)`, the density of steps at which
/// `r` independent walkers are all visible from the origin.
pub fn density_walkers(b: BExponent, r: u64, tol: f64) -> Result<DensityResult> {
    if r == 0 {
        return Err(Error::Domain("need at least one walker".into()));
    }
    let (lo, hi) = (b.lower(), b.upper());
    let rf = r as f64;
    let factor = |p: u64| {
        let x = (p as f64).powi(-(lo as i32));
        let y = (p as f64).powi(-(hi as i32));
        // 1 - (1 - y)^r, accurate for small y.
        let hidden = -(rf * (-y).ln_1p()).exp_m1();
        1.0 - x * hidden
    };
    evaluate(
        factor,
        DeviationBound::new(rf, lo + hi),
        ZetaExtraction {
            zeta_arg: lo + hi,
            power: rf,
            residual: DeviationBound::new(rf * rf, lo + 2 * hi),
        },
        tol,
    )
}

/// Shifts `s` (and companion shifts `t`) of the gcd_b-conditioned sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftVector {
    s: Vec<i64>,
    t: Vec<i64>,
}

impl ShiftVector {
    /// Shifts `s` with all `t` zero.
    pub fn new(s: Vec<i64>) -> Result<Self> {
        let t = vec![0; s.len()];
        Self::with_t(s, t)
    }

    pub fn with_t(s: Vec<i64>, t: Vec<i64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Domain("shift vector is empty".into()));
        }
        if s.len() != t.len() {
            return Err(Error::Domain(format!(
                "s has {} entries but t has {}",
                s.len(),
                t.len()
            )));
        }
        Ok(ShiftVector { s, t })
    }

    /// The single zero shift.
    pub fn zero() -> Self {
        ShiftVector { s: vec![0], t: vec![0] }
    }

    pub fn s(&self) -> &[i64] {
        &self.s
    }

    pub fn t(&self) -> &[i64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn max_abs_s(&self) -> u64 {
        self.s.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    /// Requires `gcd_b(s_i - s_j, t_i - t_j) = 1` for every pair `i != j`.
    pub fn check_pairwise(&self, b: BExponent) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let ds = self.s[i] - self.s[j];
                let dt = self.t[i] - self.t[j];
                let ok = (ds, dt) != (0, 0) && is_gcd_b_one(b, ds, dt)?;
                if !ok {
                    return Err(Error::Domain(format!(
                        "shifts {i} and {j} violate the pairwise gcd_b condition: \
                         gcd_b({ds}, {dt}) != 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_n_beyond_shifts(shifts: &ShiftVector, n: u64) -> Result<()> {
    if n <= shifts.max_abs_s() {
        return Err(Error::Domain(format!(
            "n = {n} must exceed every |s_j| (max {})",
            shifts.max_abs_s()
        )));
    }
    Ok(())
}

/// Squarefree `d` with `d^b1 | m`, paired with `μ(d)`.
fn admissible_divisors(b1: u32, m: u64, tables: &PrimeTables, scratch: &mut Vec<u64>) -> Vec<(u64, i32)> {
    tables.prime_divisors(m, scratch);
    let mut out = vec![(1u64, 1i32)];
    for &p in scratch.iter() {
        if !crate::numtheory::power_divides(p, b1, m) {
            continue;
        }
        let len = out.len();
        for i in 0..len {
            let (d, mu) = out[i];
            out.push((d * p, -mu));
        }
    }
    out
}

/// `f_{b,s}(n) = Σ μ(d_1)⋯μ(d_J) / (d_1⋯d_J)^b2` over pairwise coprime
/// `d_j` with `d_j^b1 | n - s_j`.
///
/// `tables` must cover the prime divisors of `n + max|s_j|`, either by
/// sieve or by primes up to its square root.
pub fn f_bs_value(b: BExponent, shifts: &ShiftVector, n: u64, tables: &PrimeTables) -> Result<f64> {
    check_n_beyond_shifts(shifts, n)?;
    let mut scratch = Vec::new();
    let candidates: Vec<Vec<(u64, i32)>> = shifts
        .s()
        .iter()
        .map(|&s| {
            let m = (n as i64 - s) as u64;
            admissible_divisors(b.b1(), m, tables, &mut scratch)
        })
        .collect();
    let mut acc = CompensatedSum::new();
    enumerate_coprime(&candidates, 0, 1, 1, b.b2(), &mut acc);
    Ok(acc.value())
}

fn enumerate_coprime(
    candidates: &[Vec<(u64, i32)>],
    level: usize,
    product: u64,
    sign: i32,
    b2: u32,
    acc: &mut CompensatedSum,
) {
    if level == candidates.len() {
        acc.add(sign as f64 * (product as f64).powi(-(b2 as i32)));
        return;
    }
    for &(d, mu) in &candidates[level] {
        if gcd(d, product) == 1 {
            enumerate_coprime(candidates, level + 1, product * d, sign * mu, b2, acc);
        }
    }
}

fn f_b_from_factorization(b: BExponent, factors: impl Iterator<Item = (u64, u32)>) -> f64 {
    factors
        .filter(|&(_, e)| e >= b.b1())
        .map(|(p, _)| 1.0 - (p as f64).powi(-(b.b2() as i32)))
        .product()
}

/// `f_b(n) = Σ_{d^b1 | n} μ(d) / d^b2`, evaluated multiplicatively:
/// `f_b(p^k)` is `1` for `k < b1` and `1 - p^-b2` otherwise.
pub fn f_b_value(b: BExponent, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("f_b is defined for n >= 1".into()));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(f_b_from_factorization(b, factors.into_iter()))
}

/// `f_b(n)` for every `n = 1..=x` (index 0 is unused and set to 0).
pub fn f_b_values(b: BExponent, x: usize, tables: &PrimeTables) -> Result<Vec<f64>> {
    if x > tables.limit() {
        return Err(Error::Capacity(format!(
            "tables reach {} but f_b is needed up to {x}",
            tables.limit()
        )));
    }
    let mut out = vec![0.0; x + 1];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = f_b_from_factorization(b, tables.factorize(n).into_iter());
    }
    Ok(out)
}

/// Which mean value to check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeanValueKind {
    /// `Σ_{n <= x} f_{b,s}(n)` against `x ∏_p (1 - J / p^(b1+b2))`; error
    /// normalised by `log^J x`.
    WatchpointsShifted { shifts: ShiftVector },
    /// `Σ_{n <= x} f_b(n)^r` against `C_{b,r} x`; error normalised by `√x`.
    WalkerMoment { r: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValueReport {
    pub x: u64,
    pub partial_sum: f64,
    pub predicted_main: f64,
    pub abs_error: f64,
    /// `log^J x` or `√x`, depending on the kind.
    pub error_scale: f64,
    pub error_ratio: f64,
}

/// Compares a partial sum of `f_{b,s}` or of `f_b^r` with its main term.
///
/// Requires `b1 <= b2`; for the other orientation swap the axes first.
/// The shifted sum runs over `max|s_j| < n <= x`, where `f_{b,s}` is defined.
pub fn mean_value_check(b: BExponent, kind: &MeanValueKind, x: u64) -> Result<MeanValueReport> {
    if x < MEAN_VALUE_MIN_X {
        return Err(Error::Domain(format!(
            "mean value checks need x >= {MEAN_VALUE_MIN_X}, got {x}"
        )));
    }
    if b.b1() > b.b2() {
        return Err(Error::Domain(format!(
            "mean value checks assume b1 <= b2; use {} with the axes swapped",
            b.swapped()
        )));
    }
    let (partial_sum, density, error_scale) = match kind {
        MeanValueKind::WatchpointsShifted { shifts } => {
            let top = x + shifts.max_abs_s();
            let tables = PrimeTables::build(top as usize)?;
            let mut acc = CompensatedSum::new();
            for n in shifts.max_abs_s() + 1..=x {
                acc.add(f_bs_value(b, shifts, n, &tables)?);
            }
            let density = density_watchpoints(b, shifts.len() as u64, DEFAULT_TOL)?;
            (acc.value(), density.value, (x as f64).ln().powi(shifts.len() as i32))
        }
        MeanValueKind::WalkerMoment { r } => {
            if *r == 0 {
                return Err(Error::Domain("need r >= 1".into()));
            }
            let tables = PrimeTables::build(x as usize)?;
            let values = f_b_values(b, x as usize, &tables)?;
            let exponent = i32::try_from(*r)
                .map_err(|_| Error::Domain(format!("moment order {r} is too large")))?;
            let acc: CompensatedSum = values[1..].iter().map(|v| v.powi(exponent)).sum();
            let density = density_walkers(b, *r, DEFAULT_TOL)?;
            (acc.value(), density.value, (x as f64).sqrt())
        }
    };
    let predicted_main = density * x as f64;
    let abs_error = (partial_sum - predicted_main).abs();
    Ok(MeanValueReport {
        x,
        partial_sum,
        predicted_main,
        abs_error,
        error_scale,
        error_ratio: abs_error / error_scale,
    })
}

/// `Σ_{k ≡ a (mod d)} C(n,k) α^k (1-α)^(n-k)`.
pub fn binomial_congruence_sum(alpha: f64, n: u64, d: u64, a: u64) -> Result<f64> {
    if d == 0 || d > n {
        return Err(Error::Domain(format!("need 1 <= d <= n, got d = {d}, n = {n}")));
    }
    if a >= d {
        return Err(Error::Domain(format!("residue {a} is not in 0..{d}")));
    }
    let rows = BinomialRows::new(n as usize, alpha)?;
    let n = n as usize;
    let acc: CompensatedSum = (a as usize..=n).step_by(d as usize).map(|k| rows.pmf(n, k)).sum();
    Ok(acc.value())
}

/// `Σ C(m,k) α^k (1-α)^(m-k)` over `0 <= k <= m` with
/// `gcd_b(n - s_j, k - t_j) = 1` for every `j`.
pub fn gcdb_conditioned_binomial_sum(
    b: BExponent,
    alpha: f64,
    m: u64,
    n: u64,
    shifts: &ShiftVector,
) -> Result<f64> {
    check_n_beyond_shifts(shifts, n)?;
    shifts.check_pairwise(b)?;
    let rows = BinomialRows::new(m as usize, alpha)?;
    let m = m as usize;
    let mut acc = CompensatedSum::new();
    for k in 0..=m {
        let mut all = true;
        for (&s, &t) in shifts.s().iter().zip(shifts.t()) {
            if !is_gcd_b_one(b, n as i64 - s, k as i64 - t)? {
                all = false;
                break;
            }
        }
        if all {
            acc.add(rows.pmf(m, k));
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::zeta_int;

    fn b(b1: u32, b2: u32) -> BExponent {
        BExponent::new(b1, b2).unwrap()
    }

    /// Product form of f_{b,s}: each prime may divide at most one d_j, so
    /// f_{b,s}(n) = ∏_p (1 - #{j : p^b1 | n - s_j} / p^b2).
    fn f_bs_product_form(bb: BExponent, s: &[i64], n: u64) -> f64 {
        let mut primes: Vec<u64> = Vec::new();
        for &sj in s {
            let mut m = (n as i64 - sj) as u64;
            let mut p = 2;
            while p * p <= m {
                if m.is_multiple_of(p) {
                    primes.push(p);
                    while m.is_multiple_of(p) {
                        m /= p;
                    }
                }
                p += 1;
            }
            if m > 1 {
                primes.push(m);
            }
        }
        primes.sort_unstable();
        primes.dedup();
        primes
            .iter()
            .map(|&p| {
                let c = s
                    .iter()
                    .filter(|&&sj| crate::numtheory::power_divides(p, bb.b1(), (n as i64 - sj) as u64))
                    .count();
                1.0 - c as f64 * (p as f64).powi(-(bb.b2() as i32))
            })
            .product()
    }

    #[test]
    fn table1_theoretical_column() {
        let rows = [
            ((1, 2), 0.534567),
            ((1, 3), 0.777373),
            ((1, 4), 0.894015),
            ((1, 5), 0.948994),
            ((2, 3), 0.894015),
            ((2, 5), 0.975182),
            ((3, 4), 0.975182),
            ((3, 5), 0.987821),
        ];
        for ((b1, b2), expected) in rows {
            let d = density_watchpoints(b(b1, b2), 3, DEFAULT_TOL).unwrap();
            assert!((d.value - expected).abs() < 5e-7, "({b1},{b2}): {}", d.value);
            assert!(d.tail_bound <= DEFAULT_TOL);
        }
    }

    #[test]
    fn watchpoint_density_edges() {
        assert_eq!(density_watchpoints(b(1, 1), 4, DEFAULT_TOL).unwrap().value, 0.0);
        assert!(density_watchpoints(b(1, 1), 5, DEFAULT_TOL).is_err());
        assert!(density_watchpoints(b(1, 1), 0, DEFAULT_TOL).is_err());
        let sylvester = density_watchpoints(b(1, 1), 1, DEFAULT_TOL).unwrap();
        assert!((sylvester.value - 1.0 / zeta_int(2).unwrap()).abs() < 1e-12);
    }

    const TABLE2_R: [u64; 15] = [2, 3, 4, 5, 6, 10, 20, 30, 40, 50, 60, 100, 200, 500, 1000];
    const TABLE2_23: [f64; 15] = [
        0.933076, 0.905515, 0.881225, 0.859791, 0.840850, 0.784303, 0.716860, 0.690364, 0.676832,
        0.668389, 0.662484, 0.649786, 0.638324, 0.627636, 0.622756,
    ];
    const TABLE2_35: [f64; 15] = [
        0.992002, 0.988185, 0.984484, 0.980896, 0.977417, 0.964525, 0.938432, 0.919169, 0.904881,
        0.894220, 0.886205, 0.868973, 0.856556, 0.845638, 0.841122,
    ];

    #[test]
    fn table2_theoretical_digits() {
        // The printed multi-walker values are the first six decimals,
        // truncated rather than rounded.
        for (bb, column) in [(b(2, 3), TABLE2_23), (b(3, 5), TABLE2_35)] {
            for (r, printed) in TABLE2_R.into_iter().zip(column) {
                let d = density_walkers(bb, r, DEFAULT_TOL).unwrap();
                let digits = (d.value * 1e6).floor() as i64;
                assert_eq!(digits, (printed * 1e6).round() as i64, "{bb} r={r}: {}", d.value);
            }
        }
        // Independent high-precision products.
        let d = density_walkers(b(3, 5), 500, DEFAULT_TOL).unwrap();
        assert!((d.value - 0.845_638_853).abs() < 2e-9);
        let d = density_walkers(b(2, 3), 4, DEFAULT_TOL).unwrap();
        assert!((d.value - 0.881_225_945).abs() < 2e-9);
    }

    #[test]
    fn accelerated_and_direct_agree() {
        // Force both evaluation routes for the same product.
        let bb = b(2, 3);
        for r in [1u64, 7, 300] {
            let rf = r as f64;
            let factor = |p: u64| {
                let x = (p as f64).powi(-2);
                let y = (p as f64).powi(-3);
                1.0 - x * -(rf * (-y).ln_1p()).exp_m1()
            };
            let bound = DeviationBound::new(rf, 5);
            let tol = 1e-10;
            let tables = PrimeTables::build((2.0 * bound.direct_cutoff(tol)) as usize + 16).unwrap();
            let direct = euler_product_truncated(factor, bound, tol, &tables).unwrap();
            let fast = euler_product_accelerated(
                factor,
                bound,
                ZetaExtraction { zeta_arg: 5, power: rf, residual: DeviationBound::new(rf * rf, 8) },
                tol,
                &tables,
            )
            .unwrap();
            assert!((direct.value - fast.value).abs() <= direct.tail_bound + fast.tail_bound + 1e-13);
            assert!((density_walkers(bb, r, tol).unwrap().value - direct.value).abs() < 3e-10);
        }
    }

    #[test]
    fn one_walker_is_one_watchpoint() {
        for bb in [b(1, 1), b(1, 2), b(2, 3), b(3, 5)] {
            let w = density_watchpoints(bb, 1, DEFAULT_TOL).unwrap().value;
            let r = density_walkers(bb, 1, DEFAULT_TOL).unwrap().value;
            assert!((w - r).abs() < 2e-9, "{bb}");
        }
    }

    #[test]
    fn walker_density_decreases_to_zeta_floor() {
        let floor = 1.0 / zeta_int(2).unwrap();
        let mut prev = f64::INFINITY;
        for r in 1..=1000 {
            let d = density_walkers(b(2, 3), r, DEFAULT_TOL).unwrap().value;
            assert!(d < prev, "r={r}");
            assert!(d >= 0.607927 - 1e-6);
            prev = d;
        }
        // The approach to the floor is slow: primes above r^(1/3) still
        // contribute about Σ p^-2. Reference value from an independent
        // direct product over primes below 3e6.
        let far = density_walkers(b(2, 3), 100_000, DEFAULT_TOL).unwrap().value;
        assert!((far - 0.610_260_627).abs() < 1e-8, "{far}");
        assert!(far > floor);
        let farther = density_walkers(b(2, 3), 1_000_000_000, DEFAULT_TOL).unwrap().value;
        assert!(farther > floor && farther < far);
    }

    #[test]
    fn walker_density_axis_symmetry() {
        for r in [1, 2, 10, 500] {
            assert_eq!(
                density_walkers(b(2, 3), r, DEFAULT_TOL).unwrap(),
                density_walkers(b(3, 2), r, DEFAULT_TOL).unwrap()
            );
        }
    }

    #[test]
    fn f_b_examples() {
        assert!((f_b_value(b(2, 3), 12).unwrap() - 0.875).abs() < 1e-15);
        assert_eq!(f_b_value(b(2, 3), 1).unwrap(), 1.0);
        for p in [2u64, 3, 5, 7, 97, 7919] {
            let expected = 1.0 - 1.0 / (p * p) as f64;
            assert!((f_b_value(b(1, 2), p).unwrap() - expected).abs() < 1e-15);
        }
        assert!(f_b_value(b(1, 2), 0).is_err());
    }

    #[test]
    fn f_bs_examples() {
        let t = PrimeTables::build(1000).unwrap();
        let zero = ShiftVector::zero();
        assert!((f_bs_value(b(1, 2), &zero, 4, &t).unwrap() - 0.75).abs() < 1e-15);
        for q in [5u64, 11, 101] {
            for b2 in [2, 3, 5] {
                let v = f_bs_value(b(1, b2), &zero, q, &t).unwrap();
                assert!((v - (1.0 - (q as f64).powi(-(b2 as i32)))).abs() < 1e-15);
            }
        }
        let shifts = ShiftVector::new(vec![0, 3, 3]).unwrap();
        assert!(matches!(f_bs_value(b(1, 2), &shifts, 3, &t), Err(Error::Domain(_))));
    }

    #[test]
    fn f_bs_single_zero_shift_is_f_b() {
        let t = PrimeTables::build(10_000).unwrap();
        let values = f_b_values(b(2, 3), 10_000, &t).unwrap();
        for bb in [b(1, 2), b(2, 3), b(1, 1)] {
            let values_bb = f_b_values(bb, 10_000, &t).unwrap();
            for n in 1..=10_000u64 {
                let v = f_bs_value(bb, &ShiftVector::zero(), n, &t).unwrap();
                assert!((v - values_bb[n as usize]).abs() < 1e-14, "{bb} n={n}");
                assert!((values_bb[n as usize] - f_b_value(bb, n).unwrap()).abs() < 1e-14);
            }
        }
        assert!(values[1..].iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn f_bs_matches_product_form() {
        let t = PrimeTables::build(3000).unwrap();
        for bb in [b(1, 2), b(1, 3), b(2, 3)] {
            for s in [vec![0i64, 3, 3], vec![0, 1, 5], vec![-2, 0, 7, 12]] {
                let shifts = ShiftVector::new(s.clone()).unwrap();
                for n in 13..2000u64 {
                    let got = f_bs_value(bb, &shifts, n, &t).unwrap();
                    let want = f_bs_product_form(bb, &s, n);
                    assert!((got - want).abs() < 1e-13, "{bb} s={s:?} n={n}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn mean_value_preconditions() {
        let kind = MeanValueKind::WalkerMoment { r: 2 };
        assert!(mean_value_check(b(3, 2), &kind, 1000).is_err());
        assert!(mean_value_check(b(2, 3), &kind, 99).is_err());
    }

    #[test]
    fn sylvester_mean_value() {
        let kind = MeanValueKind::WatchpointsShifted { shifts: ShiftVector::zero() };
        let r = mean_value_check(b(1, 1), &kind, 1_000_000).unwrap();
        assert!((r.partial_sum / 1e6 - 0.607927).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn shifted_mean_value_tracks_density() {
        // s = u + v for the watchpoints (0,0), (1,2), (2,1).
        let kind = MeanValueKind::WatchpointsShifted {
            shifts: ShiftVector::new(vec![0, 3, 3]).unwrap(),
        };
        let small = mean_value_check(b(1, 2), &kind, 10_000).unwrap();
        let large = mean_value_check(b(1, 2), &kind, 100_000).unwrap();
        assert!((large.partial_sum / 1e5 - 0.534567).abs() < 1e-2, "{large:?}");
        assert!(large.error_ratio <= 10.0 * small.error_ratio.max(1e-3), "{small:?} {large:?}");
    }

    #[test]
    fn walker_moment_decay() {
        let kind = MeanValueKind::WalkerMoment { r: 2 };
        let small = mean_value_check(b(2, 3), &kind, 10_000).unwrap();
        let large = mean_value_check(b(2, 3), &kind, 1_000_000).unwrap();
        assert!((large.partial_sum / 1e6 - 0.933076).abs() < 1e-2);
        assert!(large.error_ratio <= 10.0 * small.error_ratio);
    }

    #[test]
    fn congruence_sums() {
        assert!((binomial_congruence_sum(0.3, 50, 1, 0).unwrap() - 1.0).abs() < 1e-13);
        for n in [100u64, 1000] {
            let total: f64 = (0..7).map(|a| binomial_congruence_sum(0.4, n, 7, a).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n}: {total}");
        }
        for a in 0..7 {
            let v = binomial_congruence_sum(0.5, 10_000, 7, a).unwrap();
            assert!((v - 1.0 / 7.0).abs() < 0.01);
        }
        assert!(binomial_congruence_sum(0.5, 5, 6, 0).is_err());
        assert!(binomial_congruence_sum(0.5, 5, 3, 3).is_err());
        assert!(binomial_congruence_sum(1.5, 5, 3, 0).is_err());
    }

    #[test]
    fn gcdb_sum_tiny_case() {
        // k = 0 is excluded (9 | 0); k = 1, 2, 3 survive.
        let v = gcdb_conditioned_binomial_sum(b(1, 2), 0.5, 3, 3, &ShiftVector::zero()).unwrap();
        assert!((v - 0.875).abs() < 1e-15);
        let point = gcdb_conditioned_binomial_sum(b(1, 2), 0.5, 0, 3, &ShiftVector::zero()).unwrap();
        assert_eq!(point, 0.0);
        let point = gcdb_conditioned_binomial_sum(b(1, 2), 0.5, 0, 5, &ShiftVector::with_t(vec![0], vec![1]).unwrap()).unwrap();
        assert_eq!(point, 1.0);
    }

    #[test]
    fn gcdb_sum_hypothesis() {
        let bad = ShiftVector::with_t(vec![0, 2], vec![0, 4]).unwrap();
        assert!(matches!(
            gcdb_conditioned_binomial_sum(b(1, 2), 0.5, 10, 10, &bad),
            Err(Error::Domain(_))
        ));
        let good = ShiftVector::with_t(vec![0, 3, 3], vec![0, 2, 1]).unwrap();
        assert!(gcdb_conditioned_binomial_sum(b(1, 2), 0.5, 10, 10, &good).is_ok());
    }

    #[test]
    fn gcdb_sum_approaches_f_b() {
        let bb = b(1, 2);
        for n in [100u64, 1000, 10_000] {
            let lhs = gcdb_conditioned_binomial_sum(bb, 0.5, n, n, &ShiftVector::zero()).unwrap();
            let f = f_b_value(bb, n).unwrap();
            let tau = (1..=n).filter(|d| n % d == 0).count() as f64;
            assert!((lhs - f).abs() <= (n as f64).powf(-0.5) * tau, "n={n}: {lhs} vs {f}");
        }
    }
}
