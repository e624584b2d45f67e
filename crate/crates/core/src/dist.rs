//! Probability mass functions on `{0, 1, ..., K} ∪ {overflow}`.
//!
//! Hitting-count laws, Poisson laws and empirical laws all live in this
//! shape: explicit probabilities up to a support cap `K`, with everything
//! above `K` lumped into a single overflow cell. The exact variant keeps
//! rational mass so oracle identities can be asserted with `==`.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rat;

/// Tolerance for the normalization invariant of float-mode distributions.
pub const MASS_TOL: f64 = 1e-12;

/// A pmf on `{0..K}` with lumped overflow mass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountDistribution {
    probs: Vec<f64>,
    overflow: f64,
}

impl CountDistribution {
    /// Build from explicit cell probabilities and overflow mass.
    pub fn new(probs: Vec<f64>, overflow: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("empty support".into()));
        }
        if probs.iter().chain(std::iter::once(&overflow)).any(|&p| !(p >= 0.0)) {
            return Err(Error::Validation("negative or NaN probability".into()));
        }
        let d = Self { probs, overflow };
        let total = d.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Unnormalized(total));
        }
        Ok(d)
    }

    /// Empirical law from per-count observation totals.
    pub fn from_counts(counts: &[u64], overflow: u64) -> Result<Self> {
        let total: u64 = counts.iter().sum::<u64>() + overflow;
        if total == 0 {
            return Err(Error::Validation("no observations".into()));
        }
        let t = total as f64;
        Self::new(counts.iter().map(|&c| c as f64 / t).collect(), overflow as f64 / t)
    }

    pub fn point_mass(k: usize, cap: usize) -> Self {
        let mut probs = vec![0.0; cap + 1];
        probs[k.min(cap)] = 1.0;
        Self { probs, overflow: 0.0 }
    }

    /// Largest explicitly represented count.
    pub fn cap(&self) -> usize {
        self.probs.len() - 1
    }

    /// `P(W = k)` for `k <= cap`.
    pub fn p(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `P(W > cap)`.
    pub fn overflow(&self) -> f64 {
        self.overflow
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.overflow
    }

    /// Mean over the explicit cells. Exact when `overflow()` is zero;
    /// otherwise a lower bound.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// Variance over the explicit cells; meaningful when overflow is zero.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - m).powi(2) * p)
            .sum()
    }

    /// Re-lump so the explicit support ends at `cap`.
    pub fn with_cap(&self, cap: usize) -> Self {
        let mut probs: Vec<f64> = self.probs.iter().copied().take(cap + 1).collect();
        probs.resize(cap + 1, 0.0);
        let spill: f64 = self.probs.iter().skip(cap + 1).sum();
        Self { probs, overflow: self.overflow + spill }
    }
}

/// Exact-rational pmf used by the oracle layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    probs: Vec<Rat>,
    overflow: Rat,
}

impl ExactDistribution {
    pub fn new(probs: Vec<Rat>, overflow: Rat) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("empty support".into()));
        }
        let total: Rat = probs.iter().sum::<Rat>() + &overflow;
        if total != Rat::from_integer(1.into()) {
            return Err(Error::Unnormalized(total.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { probs, overflow })
    }

    pub fn cap(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn p(&self, k: usize) -> Rat {
        self.probs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }

    pub fn overflow(&self) -> &Rat {
        &self.overflow
    }

    /// Exact mean; requires zero overflow so no mass is unaccounted for.
    pub fn mean(&self) -> Result<Rat> {
        if !self.overflow.is_zero() {
            return Err(Error::Validation(
                "exact mean undefined with lumped overflow mass".into(),
            ));
        }
        Ok(self
            .probs
            .iter()
            .enumerate()
            .map(|(k, p)| Rat::from_integer(k.into()) * p)
            .sum())
    }

    pub fn to_float(&self) -> CountDistribution {
        CountDistribution {
            probs: self.probs.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect(),
            overflow: self.overflow.to_f64().unwrap_or(0.0),
        }
    }
}

impl From<&ExactDistribution> for CountDistribution {
    fn from(d: &ExactDistribution) -> Self {
        d.to_float()
    }
}

/// Total variation distance `sup_E |p(E) - q(E)| = (1/2) Σ |p_k - q_k|`,
/// the overflow cell included.
///
/// Distributions with different caps are first re-lumped to the smaller
/// cap so the cells compared are the same events.
pub fn tv_distance(p: &CountDistribution, q: &CountDistribution) -> Result<f64> {
    for d in [p, q] {
        let total = d.total_mass();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Unnormalized(total));
        }
    }
    let cap = p.cap().min(q.cap());
    let (p, q) = (p.with_cap(cap), q.with_cap(cap));
    let mut l1 = (p.overflow() - q.overflow()).abs();
    for k in 0..=cap {
        l1 += (p.p(k) - q.p(k)).abs();
    }
    Ok(0.5 * l1)
}
