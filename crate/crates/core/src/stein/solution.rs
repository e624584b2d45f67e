//! The Stein equation for the Poisson law and its solution tables.
//!
//! The Stein operator is `Sf(k) = t f(k+1) - k f(k)`. For a target event
//! `E` the Stein equation `Sf = chi_E - nu_t(E)` has the solution
//!
//! ```text
//! f(k) =  ((k-1)!/t^k) sum_{i=0}^{k-1} (chi_E(i) - nu_t(E)) t^i / i!
//!      = -((k-1)!/t^k) sum_{i=k}^inf   (chi_E(i) - nu_t(E)) t^i / i!
//! ```
//!
//! with `f(0)` free (set to 0 here). The forward recursion
//! `f(k+1) = (k f(k) + chi_E(k) - nu_t(E)) / t` amplifies error by `k/t`
//! per step, so it is used only up to `ceil(t)`; past the mean the
//! backward tail series is evaluated instead, with its terms generated by
//! the stable ratio `w_{i+1} = w_i * t / (i+1)` starting from `w_k = 1/k`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dist::CountDistribution;
use crate::error::{Error, Result};

/// `e^{-t} t^k / k!`, by upward recursion from `e^{-t}`.
pub fn poisson_pmf(t: f64, k: usize) -> f64 {
    assert!(t >= 0.0, "Poisson parameter must be >= 0");
    let mut p = (-t).exp();
    for i in 0..k {
        p *= t / (i + 1) as f64;
    }
    p
}

/// Poisson(t) law truncated at `cap` with lumped overflow.
pub fn poisson_law(t: f64, cap: usize) -> Result<CountDistribution> {
    if t < 0.0 {
        return Err(Error::Validation(format!("Poisson parameter {t} < 0")));
    }
    let mut probs = Vec::with_capacity(cap + 1);
    let mut p = (-t).exp();
    let mut total = 0.0;
    for k in 0..=cap {
        probs.push(p);
        total += p;
        p *= t / (k + 1) as f64;
    }
    CountDistribution::new(probs, (1.0 - total).max(0.0))
}

/// Solution table of the Stein equation for an indicator target.
#[derive(Debug, Clone, Serialize)]
pub struct SteinSolution {
    pub t: f64,
    pub target: Vec<usize>,
    pub nu_e: f64,
    /// `f(0..=cap+1)` with `f(0) = 0`.
    pub f: Vec<f64>,
}

impl SteinSolution {
    /// `f(k)`; zero beyond the table (ever-smaller tail values).
    pub fn f(&self, k: usize) -> f64 {
        self.f.get(k).copied().unwrap_or(0.0)
    }

    /// Largest `k` for which the Stein residual is certified.
    pub fn cap(&self) -> usize {
        self.f.len().saturating_sub(2)
    }

    fn in_target(&self, k: usize) -> bool {
        self.target.binary_search(&k).is_ok()
    }

    /// `t f(k+1) - k f(k) - (chi_E(k) - nu_t(E))`, which must vanish.
    pub fn residual(&self, k: usize) -> f64 {
        let h = if self.in_target(k) { 1.0 } else { 0.0 };
        self.t * self.f(k + 1) - k as f64 * self.f(k) - (h - self.nu_e)
    }

    pub fn max_residual(&self) -> f64 {
        (0..=self.cap()).map(|k| self.residual(k).abs()).fold(0.0, f64::max)
    }
}

/// Terms of the backward tail series from index `k`:
/// `f(k) = -sum_{i>=k} (chi_E(i) - nu_e) w_i`, `w_k = 1/k`,
/// `w_{i+1} = w_i t/(i+1)`.
fn backward_f(t: f64, nu_e: f64, target: &BTreeSet<usize>, k: usize) -> f64 {
    debug_assert!(k >= 1);
    let mut w = 1.0 / k as f64;
    let mut sum = 0.0;
    let mut i = k;
    loop {
        let h = if target.contains(&i) { 1.0 } else { 0.0 };
        sum += (h - nu_e) * w;
        w *= t / (i + 1) as f64;
        i += 1;
        // past the target and the mean, the remaining tail is a geometric
        // series with ratio t/i; stop once it cannot move the sum
        if w < 1e-22 && i > *target.iter().next_back().unwrap_or(&0) && (i as f64) > t {
            break;
        }
        if i > k + 100_000 {
            break;
        }
    }
    -sum
}

/// Solve the Stein equation for `h = chi_E` on `{0..=cap}`.
///
/// Forward recursion up to the seam at `ceil(t)`, backward series beyond;
/// the two evaluations agree to ~1e-12 on the seam (asserted by tests and
/// the acceptance suite via the residual gate).
pub fn stein_solve(t: f64, target: &[usize], cap: usize) -> Result<SteinSolution> {
    if !(t > 0.0) {
        return Err(Error::Validation(format!("Stein parameter t = {t} must be > 0")));
    }
    let target_set: BTreeSet<usize> = target.iter().copied().collect();
    if let Some(&max) = target_set.iter().next_back() {
        if max > cap {
            return Err(Error::Validation(format!(
                "target event contains {max} beyond cap {cap}"
            )));
        }
    }
    let nu_e: f64 = target_set.iter().map(|&k| poisson_pmf(t, k)).sum();

    let seam = (t.ceil() as usize).min(cap + 1);
    let mut f = vec![0.0f64; cap + 2];
    // forward: f(k+1) = (k f(k) + h(k) - nu_e)/t for k = 0 .. seam-1
    for k in 0..seam {
        let h = if target_set.contains(&k) { 1.0 } else { 0.0 };
        f[k + 1] = (k as f64 * f[k] + h - nu_e) / t;
    }
    for k in (seam + 1)..=(cap + 1) {
        f[k] = backward_f(t, nu_e, &target_set, k);
    }
    Ok(SteinSolution { t, target: target_set.into_iter().collect(), nu_e, f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pmf_examples() {
        assert_abs_diff_eq!(poisson_pmf(1.0, 0), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(poisson_pmf(2.0, 2), 2.0 * (-2.0f64).exp(), epsilon = 1e-15);
        assert_eq!(poisson_pmf(0.0, 0), 1.0);
    }

    #[test]
    fn law_lumps_overflow() {
        let law = poisson_law(2.0, 4).unwrap();
        assert!(law.overflow() > 0.0);
        assert_abs_diff_eq!(law.total_mass(), 1.0, epsilon = 1e-15);
        assert_eq!(poisson_law(0.0, 3).unwrap().p(0), 1.0);
    }

    #[test]
    fn solution_values_for_unit_parameter() {
        // t = 1, E = {0}: f(1) = 1 - e^{-1}, f(2) = f(1) - e^{-1}
        let sol = stein_solve(1.0, &[0], 20).unwrap();
        let e1 = (-1.0f64).exp();
        assert_abs_diff_eq!(sol.f(1), 1.0 - e1, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.f(2), 1.0 - 2.0 * e1, epsilon = 1e-12);
    }

    #[test]
    fn empty_event_gives_zero_solution() {
        let sol = stein_solve(3.0, &[], 50).unwrap();
        assert!(sol.f.iter().all(|&v| v == 0.0));
        assert_eq!(sol.max_residual(), 0.0);
    }

    #[test]
    fn residual_vanishes_across_parameters() {
        for t in [0.5, 1.0, 2.0, 5.0, 11.3] {
            let sol = stein_solve(t, &[0, 3, 4, 17], 120).unwrap();
            assert!(sol.max_residual() < 1e-10, "t = {t}: {}", sol.max_residual());
        }
    }

    #[test]
    fn forward_and_backward_agree_near_seam() {
        for t in [0.5, 2.0, 5.0] {
            let target: Vec<usize> = vec![1, 2, 8];
            let sol = stein_solve(t, &target, 60).unwrap();
            let set: BTreeSet<usize> = target.iter().copied().collect();
            let nu_e = sol.nu_e;
            let lo = (t.ceil() as usize).saturating_sub(2).max(1);
            for k in lo..=(t.ceil() as usize + 5) {
                // recompute k-th value by the backward series regardless of
                // which branch produced it
                let back = backward_f(t, nu_e, &set, k);
                assert!(
                    (sol.f(k) - back).abs() < 1e-10,
                    "t={t} k={k}: {} vs {back}",
                    sol.f(k)
                );
            }
        }
    }

    #[test]
    fn logsum_bounds_hold() {
        // |f(k)| <= 1 for k <= t, else (2+t)/k
        for t in [0.5, 1.0, 2.0, 5.0] {
            let sol = stein_solve(t, &[0, 2, 5, 6], 400).unwrap();
            for k in 1..=sol.cap() {
                let bound = if (k as f64) <= t { 1.0 } else { (2.0 + t) / k as f64 };
                assert!(sol.f(k).abs() <= bound + 1e-12, "t={t} k={k}");
            }
        }
    }

    #[test]
    fn poisson_characterization_via_stein_operator() {
        // E_nu_t [S f] = 0 for bounded f iff nu = Poisson(t): checked for
        // 50 random bounded f supported on {0..200} at each t.
        let mut rng = crate::rng::SplitMix64::new(99);
        for t in [0.5, 1.0, 2.0, 5.0] {
            let law = poisson_law(t, 260).unwrap();
            for _ in 0..50 {
                let f: Vec<f64> = (0..=201).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
                let mut expect = 0.0;
                for k in 0..=200usize {
                    expect += law.p(k) * (t * f[k + 1] - k as f64 * f[k]);
                }
                assert!(expect.abs() < 1e-8, "t = {t}: E[Sf] = {expect}");
            }
        }
        // and a non-Poisson law is detected by some f
        let off = CountDistribution::new(vec![0.5, 0.25, 0.25], 0.0).unwrap();
        let t = 1.0;
        let f: Vec<f64> = (0..4).map(|k| k as f64).collect();
        let mut expect = 0.0;
        for k in 0..=2usize {
            expect += off.p(k) * (t * f[k + 1] - k as f64 * f[k]);
        }
        assert!(expect.abs() > 0.01);
    }
}
