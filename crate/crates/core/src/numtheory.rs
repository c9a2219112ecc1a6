//! Arithmetic substrate: exponent pairs, prime tables, the generalized gcd,
//! integer zeta values and Euler products truncated with a rigorous tail bound.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest table the sieve will allocate unless told otherwise.
pub const DEFAULT_TABLE_CAP: usize = 200_000_000;

/// The exponent pair `(b1, b2)` of the curves `a1 (y - q2)^b1 = a2 (x - q1)^b2`.
///
/// `b1` is the exponent on the y-side, `b2` the one on the x-side. Both are
/// positive and coprime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u32, u32)", into = "(u32, u32)")]
pub struct BExponent {
    b1: u32,
    b2: u32,
}

impl BExponent {
    /// Straight lines, i.e. classical visibility.
    pub const CLASSICAL: BExponent = BExponent { b1: 1, b2: 1 };

    pub fn new(b1: u32, b2: u32) -> Result<Self> {
        if b1 == 0 || b2 == 0 {
            return Err(Error::InvalidExponent {
                b1,
                b2,
                reason: "exponents must be positive",
            });
        }
        if gcd(b1 as u64, b2 as u64) != 1 {
            return Err(Error::InvalidExponent {
                b1,
                b2,
                reason: "exponents must be coprime",
            });
        }
        Ok(BExponent { b1, b2 })
    }

    pub fn b1(self) -> u32 {
        self.b1
    }

    pub fn b2(self) -> u32 {
        self.b2
    }

    /// `min(b1, b2)`.
    pub fn lower(self) -> u32 {
        self.b1.min(self.b2)
    }

    /// `max(b1, b2)`.
    pub fn upper(self) -> u32 {
        self.b1.max(self.b2)
    }

    pub fn sum(self) -> u32 {
        self.b1 + self.b2
    }

    /// The pair with the coordinate axes exchanged.
    pub fn swapped(self) -> Self {
        BExponent {
            b1: self.b2,
            b2: self.b1,
        }
    }

    /// Upper bound `2^(b1+b2)` on the size of a pairwise visible point set.
    pub fn watchpoint_bound(self) -> u64 {
        1u64.checked_shl(self.sum()).unwrap_or(u64::MAX)
    }
}

impl fmt::Display for BExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.b1, self.b2)
    }
}

impl FromStr for BExponent {
    type Err = Error;

    /// Parses `"b1,b2"`, optionally wrapped in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut parts = inner.split(',').map(str::trim);
        let parse = |t: Option<&str>| -> Result<u32> {
            t.and_then(|t| t.parse::<u32>().ok())
                .ok_or_else(|| Error::Domain(format!("cannot parse exponent pair {s:?}")))
        };
        let b1 = parse(parts.next())?;
        let b2 = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::Domain(format!("cannot parse exponent pair {s:?}")));
        }
        BExponent::new(b1, b2)
    }
}

impl TryFrom<(u32, u32)> for BExponent {
    type Error = Error;

    fn try_from((b1, b2): (u32, u32)) -> Result<Self> {
        BExponent::new(b1, b2)
    }
}

impl From<BExponent> for (u32, u32) {
    fn from(b: BExponent) -> Self {
        (b.b1, b.b2)
    }
}

/// Binary gcd. `gcd(0, n) = n`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Whether `p^k` divides `n`, without ever forming `p^k`. Zero is divisible
/// by everything.
pub fn power_divides(p: u64, k: u32, mut n: u64) -> bool {
    if n == 0 {
        return true;
    }
    for _ in 0..k {
        if !n.is_multiple_of(p) {
            return false;
        }
        n /= p;
    }
    true
}

fn valuation(p: u64, mut n: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// Distinct prime divisors of `n` by trial division.
fn trial_prime_divisors(mut n: u64, out: &mut Vec<u64>) {
    out.clear();
    if n.is_multiple_of(2) {
        out.push(2);
        n >>= n.trailing_zeros();
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 2;
    }
    if n > 1 {
        out.push(n);
    }
}

/// Reduces `(m, n)` to the nonzero magnitude whose prime divisors are the only
/// candidates for a common `d` in the generalized gcd.
fn gcd_b_candidates(m: i64, n: i64) -> Result<(u64, u64, u64)> {
    if m == 0 && n == 0 {
        return Err(Error::Undefined("gcd_b(0, 0) is undefined".into()));
    }
    let (m, n) = (m.unsigned_abs(), n.unsigned_abs());
    Ok((m, n, gcd(m, n)))
}

fn assemble_gcd_b(b: BExponent, m: u64, n: u64, primes: &[u64]) -> u64 {
    primes.iter().fold(1u64, |acc, &p| {
        let e = (valuation(p, m) / b.b1).min(valuation(p, n) / b.b2);
        acc * p.pow(e)
    })
}

/// The generalized gcd: the largest `d >= 1` with `d^b1 | m` and `d^b2 | n`.
///
/// Divisibility is taken on absolute values, and every `d` divides zero.
/// Factors by trial division; use [`PrimeTables::gcd_b`] inside loops.
pub fn gcd_b(b: BExponent, m: i64, n: i64) -> Result<u64> {
    let (m, n, g) = gcd_b_candidates(m, n)?;
    let mut primes = Vec::new();
    trial_prime_divisors(g, &mut primes);
    Ok(assemble_gcd_b(b, m, n, &primes))
}

/// `gcd_b(m, n) == 1`, i.e. no prime `p` has `p^b1 | m` and `p^b2 | n`.
pub fn is_gcd_b_one(b: BExponent, m: i64, n: i64) -> Result<bool> {
    let (m, n, g) = gcd_b_candidates(m, n)?;
    let mut primes = Vec::new();
    trial_prime_divisors(g, &mut primes);
    Ok(!primes
        .iter()
        .any(|&p| power_divides(p, b.b1, m) && power_divides(p, b.b2, n)))
}

/// Primes, Möbius values and smallest prime factors up to `limit`.
///
/// Built once by a linear sieve and immutable afterwards.
#[derive(Debug, Clone)]
pub struct PrimeTables {
    limit: usize,
    primes: Vec<u32>,
    mobius: Vec<i8>,
    spf: Vec<u32>,
}

impl PrimeTables {
    pub fn build(limit: usize) -> Result<Self> {
        Self::build_with_cap(limit, DEFAULT_TABLE_CAP)
    }

    pub fn build_with_cap(limit: usize, cap: usize) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Capacity(format!("table limit {limit} is below 2")));
        }
        if limit > cap || limit > u32::MAX as usize {
            return Err(Error::Capacity(format!(
                "table limit {limit} exceeds the cap of {cap} entries"
            )));
        }
        let mut spf = vec![0u32; limit + 1];
        let mut mobius = vec![0i8; limit + 1];
        let mut primes = Vec::new();
        mobius[1] = 1;
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mobius[i] = -1;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si {
                    break;
                }
                let j = i * p as usize;
                if j > limit {
                    break;
                }
                spf[j] = p;
                mobius[j] = if p == si { 0 } else { -mobius[i] };
            }
        }
        Ok(PrimeTables {
            limit,
            primes,
            mobius,
            spf,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    /// Smallest prime factor of `n >= 2`.
    pub fn spf(&self, n: usize) -> u32 {
        self.spf[n]
    }

    /// Prime factorization `[(p, e)]` of `1 <= n <= limit`, ascending in `p`.
    pub fn factorize(&self, mut n: usize) -> Vec<(u64, u32)> {
        assert!(n >= 1 && n <= self.limit, "{n} outside the sieved range");
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    /// Distinct prime divisors of `n >= 1`, using the sieve when `n` is in
    /// range and trial division by sieved primes otherwise.
    pub fn prime_divisors(&self, n: u64, out: &mut Vec<u64>) {
        out.clear();
        if n <= self.limit as u64 {
            let mut n = n as usize;
            while n > 1 {
                let p = self.spf[n] as usize;
                out.push(p as u64);
                while n.is_multiple_of(p) {
                    n /= p;
                }
            }
            return;
        }
        let mut n = n;
        for &p in &self.primes {
            let p = p as u64;
            if p * p > n {
                break;
            }
            if n.is_multiple_of(p) {
                out.push(p);
                while n.is_multiple_of(p) {
                    n /= p;
                }
            }
        }
        if n > 1 {
            let last = *self.primes.last().expect("tables hold at least the prime 2") as u64;
            if last.saturating_mul(last) >= n {
                out.push(n);
            } else {
                // Sieve too short for this n: finish by trial division.
                let mut rest = Vec::new();
                trial_prime_divisors(n, &mut rest);
                out.extend(rest);
            }
        }
    }

    /// Table-backed [`gcd_b`].
    pub fn gcd_b(&self, b: BExponent, m: i64, n: i64) -> Result<u64> {
        let (m, n, g) = gcd_b_candidates(m, n)?;
        let mut primes = Vec::new();
        self.prime_divisors(g, &mut primes);
        Ok(assemble_gcd_b(b, m, n, &primes))
    }
}

/// Kahan–Babuška (Neumaier) compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::Sum<f64> for CompensatedSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        iter.for_each(|x| acc.add(x));
        acc
    }
}

const ZETA_DIRECT_TERMS: u64 = 1_000_000;

/// `ζ(k)` for integer `k >= 2`, absolute error below `1e-15`.
///
/// Sums `n^-k` for `n < N` smallest-first, then adds the Euler–Maclaurin tail
/// `N^(1-k)/(k-1) + N^-k/2 + k N^(-k-1)/12`.
pub fn zeta_int(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("zeta_int needs k >= 2, got {k}")));
    }
    let big_n = ZETA_DIRECT_TERMS as f64;
    let kf = k as f64;
    let exponent = -(k.min(i32::MAX as u32) as i32);
    let mut acc = CompensatedSum::new();
    acc.add(
        big_n.powf(1.0 - kf) / (kf - 1.0)
            + 0.5 * big_n.powf(-kf)
            + kf * big_n.powf(-kf - 1.0) / 12.0,
    );
    for n in (2..ZETA_DIRECT_TERMS).rev() {
        let term = (n as f64).powi(exponent);
        if term != 0.0 {
            acc.add(term);
        }
    }
    acc.add(1.0);
    Ok(acc.value())
}

/// Bound `|1 - F(p)| <= constant * p^-exponent` on the factors of an Euler
/// product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationBound {
    pub constant: f64,
    pub exponent: u32,
}

impl DeviationBound {
    pub fn new(constant: f64, exponent: u32) -> Self {
        DeviationBound { constant, exponent }
    }

    fn validate(&self) -> Result<()> {
        if self.exponent < 2 || !(self.constant.is_finite() && self.constant >= 0.0) {
            return Err(Error::Domain(format!(
                "deviation bound needs exponent >= 2 and finite constant >= 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Whether every prime beyond `cutoff` has deviation at most 1/2.
    fn small_beyond(&self, cutoff: f64) -> bool {
        self.constant * cutoff.powi(-(self.exponent as i32)) <= 0.5
    }

    /// `constant * Σ_{n > cutoff} n^-exponent`, bounded by the integral.
    fn tail_sum(&self, cutoff: f64) -> f64 {
        let k = self.exponent as f64;
        self.constant * cutoff.powf(1.0 - k) / (k - 1.0)
    }

    /// Smallest real cutoff at which a direct truncation meets `tol`.
    pub fn direct_cutoff(&self, tol: f64) -> f64 {
        let k = self.exponent as f64;
        let by_tail = (2.0 * self.constant / ((k - 1.0) * tol)).powf(1.0 / (k - 1.0));
        let by_size = (2.0 * self.constant).powf(1.0 / k);
        by_tail.max(by_size).max(2.0)
    }
}

/// Rewrites `∏ F(p)` as `ζ(k)^-power · ∏ F(p) (1 - p^-k)^-power`.
///
/// `residual` bounds `|ln(F(p) (1 - p^-k)^-power)|` for every prime where the
/// primary deviation bound is at most 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaExtraction {
    pub zeta_arg: u32,
    pub power: f64,
    pub residual: DeviationBound,
}

impl ZetaExtraction {
    /// Smallest real cutoff at which the accelerated product meets `tol`.
    pub fn cutoff(&self, primary: &DeviationBound, tol: f64) -> f64 {
        let k = self.residual.exponent as f64;
        let by_tail = (self.residual.constant / ((k - 1.0) * (tol).ln_1p()))
            .powf(1.0 / (k - 1.0));
        let by_size = (2.0 * primary.constant).powf(1.0 / primary.exponent as f64);
        by_tail.max(by_size).max(2.0)
    }
}

/// A truncated Euler product with a rigorous bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityResult {
    pub value: f64,
    /// Largest prime whose factor was multiplied in (0 when no prime was needed).
    pub prime_cutoff: u64,
    /// Bound on `|value - ∏_p F(p)|`, ignoring floating-point round-off.
    pub tail_bound: f64,
}

impl DensityResult {
    fn zero(prime_cutoff: u64) -> Self {
        DensityResult {
            value: 0.0,
            prime_cutoff,
            tail_bound: 0.0,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn check_factor(p: u64, f: f64) -> Result<bool> {
    if f == 0.0 {
        return Ok(true);
    }
    if f.is_nan() || f <= 0.0 || f > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "Euler factor at p = {p} is {f}, outside (0, 1]"
        )));
    }
    Ok(false)
}

/// `∏_{p <= P} F(p)` for the smallest sieved prime `P` whose tail bound
/// `2 C P^(1-κ) / (κ-1)` is within `tol`.
///
/// A factor that is exactly zero ends the evaluation with value 0.
pub fn euler_product_truncated<F>(
    factor: F,
    bound: DeviationBound,
    tol: f64,
    tables: &PrimeTables,
) -> Result<DensityResult>
where
    F: Fn(u64) -> f64,
{
    bound.validate()?;
    check_tol(tol)?;
    let k = bound.exponent as f64;
    let mut value = 1.0f64;
    for &p in tables.primes() {
        let p = p as u64;
        let f = factor(p);
        if check_factor(p, f)? {
            return Ok(DensityResult::zero(p));
        }
        value *= f;
        let cut = p as f64;
        if bound.small_beyond(cut) {
            let tail = 2.0 * bound.constant * cut.powf(1.0 - k) / (k - 1.0);
            if tail <= tol {
                return Ok(DensityResult {
                    value,
                    prime_cutoff: p,
                    tail_bound: tail,
                });
            }
        }
    }
    Err(Error::Capacity(format!(
        "primes up to {} do not reach the cutoff {:.0} needed for tolerance {tol:e}",
        tables.limit(),
        bound.direct_cutoff(tol)
    )))
}

/// Like [`euler_product_truncated`], but divides out `ζ(k)^power` first so the
/// remaining factors deviate from 1 only at order `residual.exponent`.
///
/// Runs in log space, so large powers do not underflow.
pub fn euler_product_accelerated<F>(
    factor: F,
    bound: DeviationBound,
    extraction: ZetaExtraction,
    tol: f64,
    tables: &PrimeTables,
) -> Result<DensityResult>
where
    F: Fn(u64) -> f64,
{
    bound.validate()?;
    extraction.residual.validate()?;
    check_tol(tol)?;
    let log_zeta = zeta_int(extraction.zeta_arg)?.ln();
    let mut log_sum = CompensatedSum::new();
    log_sum.add(-extraction.power * log_zeta);
    let k = -(extraction.zeta_arg as i32);
    for &p in tables.primes() {
        let p = p as u64;
        let f = factor(p);
        if check_factor(p, f)? {
            return Ok(DensityResult::zero(p));
        }
        log_sum.add(f.ln());
        log_sum.add(-extraction.power * (-(p as f64).powi(k)).ln_1p());
        let cut = p as f64;
        if bound.small_beyond(cut) {
            let residual = extraction.residual.tail_sum(cut);
            let value = log_sum.value().exp();
            let tail = value * residual.exp_m1();
            if tail <= tol {
                return Ok(DensityResult {
                    value: value.min(1.0),
                    prime_cutoff: p,
                    tail_bound: tail,
                });
            }
        }
    }
    Err(Error::Capacity(format!(
        "primes up to {} do not reach the cutoff {:.0} needed for tolerance {tol:e}",
        tables.limit(),
        extraction.cutoff(&bound, tol)
    )))
}
