//! The Chen-Stein error bound for return-time counts:
//!
//! ```text
//! |P(W_{A,m} in E) - nu_t(E)|
//!     <= C1 min_{tau(A) < Delta < m}
//!        ( alpha(Delta)/mu(A) + Delta mu(A) + P_A(tau_A <= Delta) ) (t + log m)
//! ```
//!
//! with `t = m mu(A)` and natural log. The constant `C1` is not pinned by
//! the theory; the bound is reported with `C1 = 1` and consumers compare
//! ratios rather than asserting domination.

use serde::Serialize;

use crate::error::{Error, Result};

/// Evaluated bound at the minimizing gap.
#[derive(Debug, Clone, Serialize)]
pub struct ChenSteinBound {
    pub mu_a: f64,
    pub tau_a: usize,
    pub m: u64,
    /// Kac parameter `t = m mu(A)`.
    pub t: f64,
    /// The minimizing gap.
    pub delta_star: usize,
    /// `alpha(Delta*) / mu(A)`.
    pub alpha_term: f64,
    /// `Delta* mu(A)`.
    pub delta_term: f64,
    /// `P_A(tau_A <= Delta*)`.
    pub short_return_term: f64,
    /// `t + ln m`.
    pub factor: f64,
    /// `(alpha_term + delta_term + short_return_term) * factor`, `C1 = 1`.
    pub value: f64,
}

/// Scan the integer gaps `tau(A) < Delta < m` for the minimizing bound.
///
/// `alpha_fn` must be non-increasing and `short_return_fn` non-decreasing
/// in the gap; the scan exits early once the `Delta mu(A)` term alone
/// exceeds the best value found, which is sound because every other addend
/// is nonnegative.
pub fn chen_stein_bound(
    mu_a: f64,
    tau_a: usize,
    alpha_fn: impl Fn(usize) -> f64,
    short_return_fn: impl Fn(usize) -> f64,
    m: u64,
) -> Result<ChenSteinBound> {
    if !(mu_a > 0.0 && mu_a < 1.0) {
        return Err(Error::Validation(format!("mu(A) = {mu_a} outside (0, 1)")));
    }
    if tau_a == 0 {
        return Err(Error::Validation("tau(A) must be >= 1".into()));
    }
    if m as usize <= tau_a + 1 {
        return Err(Error::EmptyDeltaRange { tau: tau_a, m });
    }
    let t = m as f64 * mu_a;
    let factor = t + (m as f64).ln();

    let mut best: Option<ChenSteinBound> = None;
    for delta in (tau_a + 1)..(m as usize) {
        let delta_term = delta as f64 * mu_a;
        if let Some(b) = &best {
            if delta_term * factor > b.value {
                break; // monotone envelope: no larger gap can improve
            }
        }
        let alpha_term = alpha_fn(delta) / mu_a;
        let short_return_term = short_return_fn(delta);
        let value = (alpha_term + delta_term + short_return_term) * factor;
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(ChenSteinBound {
                mu_a,
                tau_a,
                m,
                t,
                delta_star: delta,
                alpha_term,
                delta_term,
                short_return_term,
                factor,
                value,
            });
        }
    }
    Ok(best.expect("range is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_terms_select_smallest_gap() {
        // alpha = 0, short returns = 0: the bound reduces to
        // Delta mu(A) (t + ln m), increasing in Delta.
        let b = chen_stein_bound(0.01, 2, |_| 0.0, |_| 0.0, 100).unwrap();
        assert_eq!(b.delta_star, 3);
        assert_abs_diff_eq!(b.value, 0.03 * (1.0 + 100.0f64.ln()), epsilon = 1e-12);
        assert_abs_diff_eq!(b.value, 0.1682, epsilon = 1e-4);
    }

    #[test]
    fn geometric_alpha_matches_brute_force() {
        let alpha = |d: usize| 0.25f64.powi(d as i32);
        let fast = chen_stein_bound(0.01, 1, alpha, |_| 0.0, 100).unwrap();
        let factor = 1.0 + 100.0f64.ln();
        let (mut best_v, mut best_d) = (f64::INFINITY, 0);
        for d in 2..100usize {
            let v = (alpha(d) / 0.01 + 0.01 * d as f64) * factor;
            if v < best_v {
                (best_v, best_d) = (v, d);
            }
        }
        assert_eq!(fast.delta_star, best_d);
        assert_abs_diff_eq!(fast.value, best_v, epsilon = 1e-12);
    }

    #[test]
    fn empty_range_is_an_error() {
        assert!(matches!(
            chen_stein_bound(0.1, 3, |_| 0.0, |_| 0.0, 4),
            Err(Error::EmptyDeltaRange { tau: 3, m: 4 })
        ));
    }

    #[test]
    fn scan_equals_brute_force_on_random_instances() {
        let mut rng = SplitMix64::new(4242);
        for case in 0..20 {
            let mu = 0.001 + 0.2 * rng.next_f64();
            let tau = 1 + rng.next_index(6);
            let m = (tau as u64 + 2) + rng.next_index(4000) as u64;
            let rate = 0.2 + 0.7 * rng.next_f64();
            let scale = rng.next_f64();
            let alpha = move |d: usize| scale * rate.powi(d as i32);
            let sr = move |d: usize| (mu * d as f64).min(1.0);

            let fast = chen_stein_bound(mu, tau, alpha, sr, m).unwrap();
            let factor = m as f64 * mu + (m as f64).ln();
            let (mut best_v, mut best_d) = (f64::INFINITY, 0);
            for d in (tau + 1)..(m as usize) {
                let v = (alpha(d) / mu + d as f64 * mu + sr(d)) * factor;
                if v < best_v {
                    (best_v, best_d) = (v, d);
                }
            }
            assert_eq!(fast.delta_star, best_d, "case {case}");
            assert_abs_diff_eq!(fast.value, best_v, epsilon = 1e-12);
        }
    }

    #[test]
    fn bound_is_monotone_in_alpha() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..20 {
            let mu = 0.005 + 0.1 * rng.next_f64();
            let m = 50 + rng.next_index(500) as u64;
            let rate = 0.3 + 0.5 * rng.next_f64();
            let hi = chen_stein_bound(mu, 1, |d| rate.powi(d as i32), |_| 0.0, m).unwrap();
            let lo = chen_stein_bound(mu, 1, |d| 0.5 * rate.powi(d as i32), |_| 0.0, m).unwrap();
            assert!(lo.value <= hi.value + 1e-15);
        }
    }
}
