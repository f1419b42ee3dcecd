//! Poisson pmf and mass-based truncation of infinite Poisson sums.

use super::{NumericError, TruncationBudget};
use crate::mathx;

/// Poisson pmf `e^{-mean} mean^n / n!`, computed in log space.
pub fn poisson_pmf(mean: f64, n: u32) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    mathx::exp(n as f64 * mathx::ln(mean) - mean - mathx::lgamma(n as f64 + 1.0))
}

/// Smallest `n` such that `P(X <= n) >= 1 - tail_mass` for `X ~ Poisson(mean)`.
pub fn poisson_truncation(mean: f64, budget: &TruncationBudget) -> Result<u32, NumericError> {
    budget.validate()?;
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(NumericError::InvalidParameter("poisson mean must be finite and >= 0"));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let target = 1.0 - budget.tail_mass;
    let mut cum = 0.0;
    for n in 0..=budget.max_terms_per_sum as u32 {
        cum += poisson_pmf(mean, n);
        if cum >= target {
            return Ok(n);
        }
    }
    Err(NumericError::TruncationBudget { achieved_mass: cum })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(tail: f64) -> TruncationBudget {
        TruncationBudget { tail_mass: tail, max_terms_per_sum: 256 }
    }

    #[test]
    fn degenerate_mean_zero() {
        assert_eq!(poisson_truncation(0.0, &budget(1e-4)).unwrap(), 0);
    }

    #[test]
    fn matches_pmf_partial_sum_oracle() {
        // frozen from cumulative pmf sums: P(X<=6 | mean 1) = 0.9999168 and
        // P(X<=11 | mean 3) = 0.9999286 are the first to reach 1 - 1e-4
        assert_eq!(poisson_truncation(1.0, &budget(1e-4)).unwrap(), 6);
        assert_eq!(poisson_truncation(3.0, &budget(1e-4)).unwrap(), 11);
    }

    #[test]
    fn truncation_is_minimal() {
        for &mean in &[0.2, 1.0, 2.5, 7.0] {
            let n = poisson_truncation(mean, &budget(1e-4)).unwrap();
            let cum: f64 = (0..=n).map(|k| poisson_pmf(mean, k)).sum();
            assert!(cum >= 1.0 - 1e-4);
            if n > 0 {
                let cum_prev: f64 = (0..n).map(|k| poisson_pmf(mean, k)).sum();
                assert!(cum_prev < 1.0 - 1e-4, "mean={mean}: n not minimal");
            }
        }
    }

    #[test]
    fn budget_exceeded_reports_mass() {
        let b = TruncationBudget { tail_mass: 1e-12, max_terms_per_sum: 2 };
        match poisson_truncation(50.0, &b).unwrap_err() {
            NumericError::TruncationBudget { achieved_mass } => {
                assert!(achieved_mass < 1.0)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
