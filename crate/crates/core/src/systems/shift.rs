//! Finite-alphabet shifts with Markov (or Bernoulli) invariant measures.
//!
//! The transition matrix is stored exactly as rationals; the stationary
//! vector is solved by rational Gaussian elimination, so `pi P = pi` holds
//! with zero residual and cylinder measures computed from it are exact.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat_from_f64, Rat};
use crate::rng::SplitMix64;

/// Maximum alphabet size. Transfer DP tables are exponential in the word
/// length, so large alphabets are out of scope anyway.
pub const MAX_ALPHABET: usize = 16;

/// A mixing Markov shift: alphabet `{0..s-1}`, row-stochastic rational
/// matrix `P`, stationary vector `pi`, and the precomputed power-positivity
/// index `k0` with `P^k0` entrywise positive.
#[derive(Debug, Clone)]
pub struct MarkovShift {
    p: Vec<Vec<Rat>>,
    p_f64: Vec<Vec<f64>>,
    allowed: Vec<Vec<bool>>,
    pi: Vec<Rat>,
    pi_f64: Vec<f64>,
    k0: usize,
}

impl MarkovShift {
    /// Build from exact rational rows. Rows must sum to exactly one; the
    /// transition graph (support of `P`) must be irreducible and aperiodic.
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let s = rows.len();
        if s < 2 {
            return Err(Error::Validation("alphabet size must be >= 2".into()));
        }
        if s > MAX_ALPHABET {
            return Err(Error::Validation(format!("alphabet size {s} exceeds {MAX_ALPHABET}")));
        }
        if rows.iter().any(|r| r.len() != s) {
            return Err(Error::Validation("transition matrix is not square".into()));
        }
        let one = Rat::one();
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|p| p.is_negative()) {
                return Err(Error::Validation(format!("negative entry in row {i}")));
            }
            if row.iter().sum::<Rat>() != one {
                return Err(Error::Validation(format!("row {i} does not sum to 1")));
            }
        }
        let allowed: Vec<Vec<bool>> =
            rows.iter().map(|r| r.iter().map(|p| p.is_positive()).collect()).collect();
        let k0 = positivity_index(&allowed).ok_or_else(|| {
            Error::Validation("transition graph is not irreducible and aperiodic".into())
        })?;
        let pi = solve_stationary(&rows)?;
        if pi.iter().any(|p| !p.is_positive()) {
            return Err(Error::Validation("stationary vector not strictly positive".into()));
        }
        let p_f64 = rows
            .iter()
            .map(|r| r.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect())
            .collect();
        let pi_f64 = pi.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect();
        Ok(Self { p: rows, p_f64, allowed, pi, pi_f64, k0 })
    }

    /// Build from float rows. Row sums must be within `1e-12` of one; each
    /// row is then rescaled exactly so the stochasticity invariant is exact.
    pub fn from_f64(rows: &[Vec<f64>]) -> Result<Self> {
        let mut exact = Vec::with_capacity(rows.len());
        for row in rows {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Validation(format!("row sum {sum} not within 1e-12 of 1")));
            }
            let entries: Vec<Rat> = row.iter().map(|&x| rat_from_f64(x)).collect::<Result<_>>()?;
            let total: Rat = entries.iter().sum();
            exact.push(entries.into_iter().map(|e| e / &total).collect());
        }
        Self::new(exact)
    }

    /// Bernoulli (iid) shift with the given symbol weights.
    pub fn bernoulli(weights: Vec<Rat>) -> Result<Self> {
        let s = weights.len();
        Self::new(vec![weights; s])
    }

    /// The fair-coin full shift on two symbols.
    pub fn fair_coin() -> Self {
        let half = Rat::new(1.into(), 2.into());
        Self::bernoulli(vec![half.clone(), half]).expect("fair coin is valid")
    }

    /// Uniform Bernoulli shift on `s` symbols.
    pub fn uniform(s: usize) -> Result<Self> {
        let w = Rat::new(1.into(), (s as i64).into());
        Self::bernoulli(vec![w; s])
    }

    /// The golden-mean subshift (word "11" forbidden) with the Markov
    /// measure given by `P = [[1/2, 1/2], [1, 0]]`.
    pub fn golden_mean() -> Self {
        let half = Rat::new(1.into(), 2.into());
        Self::new(vec![vec![half.clone(), half], vec![Rat::one(), Rat::zero()]])
            .expect("golden mean chain is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.p.len()
    }

    pub fn is_allowed(&self, a: u8, b: u8) -> bool {
        self.allowed[a as usize][b as usize]
    }

    pub fn prob(&self, a: u8, b: u8) -> &Rat {
        &self.p[a as usize][b as usize]
    }

    pub fn prob_f64(&self, a: u8, b: u8) -> f64 {
        self.p_f64[a as usize][b as usize]
    }

    pub fn stationary(&self) -> &[Rat] {
        &self.pi
    }

    pub fn stationary_f64(&self) -> &[f64] {
        &self.pi_f64
    }

    /// Power-positivity index: smallest `k` with `P^k` entrywise positive.
    pub fn positivity_index(&self) -> usize {
        self.k0
    }

    /// Is every consecutive transition of `w` allowed?
    pub fn word_admissible(&self, w: &[u8]) -> bool {
        w.iter().all(|&a| (a as usize) < self.alphabet_size())
            && w.windows(2).all(|t| self.is_allowed(t[0], t[1]))
    }

    /// Exact measure of the cylinder of a single word.
    pub fn word_measure(&self, w: &[u8]) -> Rat {
        if w.is_empty() {
            return Rat::one();
        }
        let mut m = self.pi[w[0] as usize].clone();
        for t in w.windows(2) {
            m *= self.prob(t[0], t[1]);
        }
        m
    }

    /// Draw a stationary word: first symbol from `pi`, successors from the
    /// rows of `P`. Deterministic given the generator state.
    pub fn sample_stationary(&self, rng: &mut SplitMix64, len: usize) -> Vec<u8> {
        assert!(len >= 1, "length must be >= 1");
        let mut w = Vec::with_capacity(len);
        w.push(sample_index(&self.pi_f64, rng));
        for _ in 1..len {
            let last = *w.last().unwrap() as usize;
            w.push(sample_index(&self.p_f64[last], rng));
        }
        w
    }

    /// Uniform bound on the alpha-mixing coefficient at gap `k`, valid for
    /// events over any cylinder depths:
    /// `max_a (1/2) sum_b |P^{k+1}(a,b) - pi_b|`.
    pub fn alpha_upper(&self, k: usize) -> f64 {
        let s = self.alphabet_size();
        let mut pk = identity_f64(s);
        for _ in 0..=k {
            pk = mat_mul_f64(&pk, &self.p_f64);
        }
        let mut worst: f64 = 0.0;
        for row in &pk {
            let dev: f64 =
                row.iter().zip(&self.pi_f64).map(|(p, q)| (p - q).abs()).sum::<f64>() / 2.0;
            worst = worst.max(dev);
        }
        worst
    }
}

fn sample_index(weights: &[f64], rng: &mut SplitMix64) -> u8 {
    let u = rng.next_f64();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i as u8;
        }
    }
    (weights.len() - 1) as u8
}

fn identity_f64(s: usize) -> Vec<Vec<f64>> {
    (0..s).map(|i| (0..s).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn mat_mul_f64(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let s = a.len();
    let mut out = vec![vec![0.0; s]; s];
    for i in 0..s {
        for k in 0..s {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..s {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Smallest `k` with `A^k` entrywise positive, or `None` if the graph is
/// not primitive. Wielandt's bound `(s-1)^2 + 1` caps the search.
fn positivity_index(allowed: &[Vec<bool>]) -> Option<usize> {
    let s = allowed.len();
    let bound = (s - 1) * (s - 1) + 1;
    let mut power = allowed.to_vec();
    for k in 1..=bound {
        if power.iter().all(|row| row.iter().all(|&b| b)) {
            return Some(k);
        }
        power = bool_mat_mul(&power, allowed);
    }
    if power.iter().all(|row| row.iter().all(|&b| b)) {
        return Some(bound + 1);
    }
    None
}

fn bool_mat_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let s = a.len();
    (0..s)
        .map(|i| (0..s).map(|j| (0..s).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

/// Exact stationary vector of a rational row-stochastic matrix.
///
/// Solves `pi P = pi`, `sum pi = 1` by Gaussian elimination over the
/// rationals, replacing one redundant equation with the normalization.
pub fn stationary_distribution_exact(rows: &[Vec<Rat>]) -> Result<Vec<Rat>> {
    let s = rows.len();
    if rows.iter().any(|r| r.len() != s) {
        return Err(Error::Validation("matrix is not square".into()));
    }
    let one = Rat::one();
    for (i, row) in rows.iter().enumerate() {
        if row.iter().any(|p| p.is_negative()) || row.iter().sum::<Rat>() != one {
            return Err(Error::Validation(format!("row {i} is not a probability vector")));
        }
    }
    let allowed: Vec<Vec<bool>> =
        rows.iter().map(|r| r.iter().map(|p| p.is_positive()).collect()).collect();
    if !irreducible(&allowed) {
        return Err(Error::Validation("matrix is reducible".into()));
    }
    solve_stationary(rows)
}

/// Float front end for [`stationary_distribution_exact`]: entries are taken
/// as exact dyadics, rows rescaled to sum to one, and the exact solution is
/// rounded back to `f64`, so the residual is far below the `1e-12` contract.
pub fn stationary_distribution(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut exact = Vec::with_capacity(rows.len());
    for row in rows {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("row sum {sum} not within 1e-12 of 1")));
        }
        if row.iter().any(|&x| x < 0.0) {
            return Err(Error::Validation("negative entry".into()));
        }
        let entries: Vec<Rat> = row.iter().map(|&x| rat_from_f64(x)).collect::<Result<_>>()?;
        let total: Rat = entries.iter().sum();
        exact.push(entries.into_iter().map(|e| e / &total).collect::<Vec<_>>());
    }
    let pi = stationary_distribution_exact(&exact)?;
    Ok(pi.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect())
}

fn irreducible(allowed: &[Vec<bool>]) -> bool {
    let s = allowed.len();
    // Reachability closure: every state reaches every state.
    let mut reach = allowed.to_vec();
    for k in 0..s {
        for i in 0..s {
            for j in 0..s {
                reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
            }
        }
    }
    (0..s).all(|i| (0..s).all(|j| reach[i][j]))
}

fn solve_stationary(rows: &[Vec<Rat>]) -> Result<Vec<Rat>> {
    let s = rows.len();
    // Transposed system (P^T - I) x = 0 with the last equation replaced by
    // sum x = 1.
    let mut a: Vec<Vec<Rat>> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let mut v = rows[j][i].clone();
                    if i == j {
                        v -= Rat::one();
                    }
                    v
                })
                .collect()
        })
        .collect();
    let mut b = vec![Rat::zero(); s];
    a[s - 1] = vec![Rat::one(); s];
    b[s - 1] = Rat::one();

    for col in 0..s {
        let pivot = (col..s)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Validation("singular stationary system".into()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].clone();
        for r in 0..s {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &inv;
            for c in col..s {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
            let sub = f * &b[col];
            b[r] -= sub;
        }
    }
    Ok((0..s).map(|i| &b[i] / &a[i][i]).collect())
}

/// Parse a word like `"0110"` over alphabets up to size 36 (digits then
/// lowercase letters).
pub fn parse_word(s: &str, alphabet_size: usize) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| {
            let v = c
                .to_digit(36)
                .ok_or_else(|| Error::Validation(format!("bad symbol {c:?} in word {s:?}")))?
                as usize;
            if v >= alphabet_size {
                return Err(Error::Validation(format!(
                    "symbol {c:?} out of range for alphabet of size {alphabet_size}"
                )));
            }
            Ok(v as u8)
        })
        .collect()
}

pub fn word_to_string(w: &[u8]) -> String {
    w.iter().map(|&a| std::char::from_digit(a as u32, 36).unwrap_or('?')).collect()
}
