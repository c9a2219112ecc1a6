//! Binomial probabilities evaluated term by term in log space.

use crate::error::{Error, Result};

/// `ln k!` for `k = 0..=n`, each entry from `lnΓ(k + 1)` directly.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    (0..=n).map(|k| libm::lgamma(k as f64 + 1.0)).collect()
}

/// Binomial pmf rows `C(i, k) α^k (1-α)^(i-k)` for a fixed `α`.
#[derive(Debug, Clone)]
pub struct BinomialRows {
    ln_fact: Vec<f64>,
    ln_alpha: f64,
    ln_beta: f64,
}

impl BinomialRows {
    pub fn new(max_trials: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(BinomialRows {
            ln_fact: ln_factorials(max_trials),
            ln_alpha: alpha.ln(),
            ln_beta: (-alpha).ln_1p(),
        })
    }

    pub fn max_trials(&self) -> usize {
        self.ln_fact.len() - 1
    }

    /// `P(Bin(i, α) = k)` for `k <= i <= max_trials`.
    #[inline]
    pub fn pmf(&self, i: usize, k: usize) -> f64 {
        debug_assert!(k <= i && i <= self.max_trials());
        let f = &self.ln_fact;
        (f[i] - f[k] - f[i - k] + k as f64 * self.ln_alpha + (i - k) as f64 * self.ln_beta).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rows_match_closed_form() {
        let rows = BinomialRows::new(10, 0.3).unwrap();
        for i in 0..=10usize {
            for k in 0..=i {
                let c = (0..k).fold(1.0, |acc, j| acc * (i - j) as f64 / (j + 1) as f64);
                let exact = c * 0.3f64.powi(k as i32) * 0.7f64.powi((i - k) as i32);
                assert!((rows.pmf(i, k) - exact).abs() <= 1e-14, "i={i} k={k}");
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let rows = BinomialRows::new(2000, 0.5).unwrap();
        for i in [1usize, 10, 100, 1000, 2000] {
            let total: f64 = (0..=i).map(|k| rows.pmf(i, k)).sum();
            assert!((total - 1.0).abs() < 1e-11, "i={i}: {total}");
        }
    }
}
