//! Exact laws of the hitting count `W_{A,m} = sum_{j=1}^m chi_A(T^j x)`
//! and of short returns, by transfer dynamic programming over the pair
//! (last `n-1` symbols, running count).
//!
//! The DP runs in exact rational arithmetic when asked for the oracle law,
//! or in `f64` for large instances where 4000-bit denominators would be
//! prohibitive; the float path is still an exact enumeration, only its
//! arithmetic rounds.

use num_traits::{One, ToPrimitive, Zero};

use crate::dist::{CountDistribution, ExactDistribution};
use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::symbolic::{cylinder_measure, CylinderSet};
use crate::systems::MarkovShift;

/// States x steps budget for one DP run.
const DP_BUDGET: u128 = 1 << 36;

/// Arithmetic shared by the rational and float DP backends.
trait Weight: Clone {
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    fn acc(&mut self, other: &Self);
    fn times(&self, other: &Self) -> Self;
    fn from_rat(r: &Rat) -> Self;
}

impl Weight for Rat {
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn acc(&mut self, other: &Self) {
        *self += other;
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

impl Weight for f64 {
    fn nil() -> Self {
        0.0
    }
    fn is_nil(&self) -> bool {
        *self == 0.0
    }
    fn acc(&mut self, other: &Self) {
        *self += other;
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rat(r: &Rat) -> Self {
        r.to_f64().unwrap_or(0.0)
    }
}

/// Word-indexing scheme: states are the base-s encodings of words of
/// length `l = max(n-1, 1)`.
struct StateSpace {
    s: usize,
    l: usize,
    count: usize,
}

impl StateSpace {
    fn new(s: usize, n: usize, m: u64, cap: usize) -> Result<Self> {
        let l = (n - 1).max(1);
        let mut count: usize = 1;
        for _ in 0..l {
            count = count
                .checked_mul(s)
                .filter(|&c| c <= 1 << 30)
                .ok_or_else(|| Error::Budget(format!("state space s^{l} too large")))?;
        }
        let work = count as u128 * (m as u128 + 1) * (cap as u128 + 2) * s as u128;
        if work > DP_BUDGET {
            return Err(Error::Budget(format!(
                "DP work {work} exceeds budget {DP_BUDGET} (s^(n-1) * m * K)"
            )));
        }
        Ok(Self { s, l, count })
    }

    fn encode(&self, w: &[u8]) -> usize {
        w.iter().fold(0usize, |acc, &a| acc * self.s + a as usize)
    }

    fn decode(&self, mut idx: usize) -> Vec<u8> {
        let mut w = vec![0u8; self.l];
        for i in (0..self.l).rev() {
            w[i] = (idx % self.s) as u8;
            idx /= self.s;
        }
        w
    }

    /// Drop the leading symbol, append `a`.
    fn advance(&self, idx: usize, a: u8) -> usize {
        (idx * self.s + a as usize) % self.count
    }

    fn last_symbol(&self, idx: usize) -> u8 {
        (idx % self.s) as u8
    }
}

struct Transition {
    next: usize,
    hits: bool,
    prob_index: (u8, u8),
}

/// Per-state transition table plus window-membership flags.
fn build_transitions(
    shift: &MarkovShift,
    cyl: &CylinderSet,
    space: &StateSpace,
) -> Vec<Vec<Transition>> {
    let n = cyl.word_len();
    (0..space.count)
        .map(|idx| {
            let state = space.decode(idx);
            let last = space.last_symbol(idx);
            (0..shift.alphabet_size() as u8)
                .filter(|&a| shift.is_allowed(last, a))
                .map(|a| {
                    // completed window: last n-1 state symbols plus a
                    let mut window = state[state.len() + 1 - n..].to_vec();
                    window.push(a);
                    Transition {
                        next: space.advance(idx, a),
                        hits: cyl.contains_word(&window),
                        prob_index: (last, a),
                    }
                })
                .collect()
        })
        .collect()
}

/// Distribution of the initial state (the law of the first `l` symbols).
fn initial_state<W: Weight>(shift: &MarkovShift, space: &StateSpace) -> Vec<W> {
    let mut dp = vec![W::nil(); space.count];
    let mut stack: Vec<(Vec<u8>, Rat)> = (0..shift.alphabet_size() as u8)
        .map(|a| (vec![a], shift.stationary()[a as usize].clone()))
        .collect();
    while let Some((w, mass)) = stack.pop() {
        if w.len() == space.l {
            dp[space.encode(&w)].acc(&W::from_rat(&mass));
            continue;
        }
        let last = *w.last().unwrap();
        for a in 0..shift.alphabet_size() as u8 {
            if shift.is_allowed(last, a) {
                let mut v = w.clone();
                v.push(a);
                stack.push((v, &mass * shift.prob(last, a)));
            }
        }
    }
    dp
}

/// Law of `W_{A,m}` for `x ~ mu`, counts above `cap` lumped into overflow.
///
/// Layout: `dp[state][count]` where the count lane `cap + 1` is overflow.
fn hit_dp<W: Weight>(
    shift: &MarkovShift,
    cyl: &CylinderSet,
    m: u64,
    cap: usize,
) -> Result<Vec<W>> {
    let n = cyl.word_len();
    let space = StateSpace::new(shift.alphabet_size(), n, m, cap)?;
    let lanes = cap + 2;
    let transitions: Vec<Vec<(usize, bool, W)>> = build_transitions(shift, cyl, &space)
        .iter()
        .map(|ts| {
            ts.iter()
                .map(|t| {
                    (t.next, t.hits, W::from_rat(shift.prob(t.prob_index.0, t.prob_index.1)))
                })
                .collect()
        })
        .collect();

    let init = initial_state::<W>(shift, &space);
    let mut dp: Vec<W> = vec![W::nil(); space.count * lanes];
    for (idx, mass) in init.into_iter().enumerate() {
        if !mass.is_nil() {
            dp[idx * lanes] = mass;
        }
    }

    // Generate symbols x_l .. x_{m+n-1}; the window completed when x_i is
    // produced starts at j = i - n + 1 and is counted only for j in [1, m].
    let l = space.l;
    let mut scratch: Vec<W> = vec![W::nil(); space.count * lanes];
    for i in l..=(m as usize + n - 1) {
        let counted = i >= n;
        for slot in scratch.iter_mut() {
            *slot = W::nil();
        }
        for idx in 0..space.count {
            for lane in 0..lanes {
                let mass = &dp[idx * lanes + lane];
                if mass.is_nil() {
                    continue;
                }
                for (next, hits, p) in &transitions[idx] {
                    let new_lane = if counted && *hits {
                        (lane + 1).min(cap + 1)
                    } else {
                        lane
                    };
                    scratch[next * lanes + new_lane].acc(&mass.times(p));
                }
            }
        }
        std::mem::swap(&mut dp, &mut scratch);
    }

    let mut law = vec![W::nil(); lanes];
    for idx in 0..space.count {
        for lane in 0..lanes {
            law[lane].acc(&dp[idx * lanes + lane]);
        }
    }
    Ok(law)
}

/// Exact-rational law of the hitting count `W_{A,m}`.
pub fn exact_hit_distribution(
    shift: &MarkovShift,
    cyl: &CylinderSet,
    m: u64,
    cap: usize,
) -> Result<ExactDistribution> {
    if m == 0 {
        return ExactDistribution::new(vec![Rat::one()], Rat::zero());
    }
    let law = hit_dp::<Rat>(shift, cyl, m, cap)?;
    let overflow = law[cap + 1].clone();
    ExactDistribution::new(law[..=cap].to_vec(), overflow)
}

/// Float-arithmetic version of the same enumeration, for instances whose
/// rational denominators would be astronomically wide. Normalization is
/// restored exactly by construction of the returned distribution.
pub fn hit_distribution_f64(
    shift: &MarkovShift,
    cyl: &CylinderSet,
    m: u64,
    cap: usize,
) -> Result<CountDistribution> {
    if m == 0 {
        return CountDistribution::new(vec![1.0], 0.0);
    }
    let law = hit_dp::<f64>(shift, cyl, m, cap)?;
    // rounding drift over m steps stays well below the 1e-12 mass gate,
    // but rescale anyway so downstream TV inputs are exactly normalized
    let total: f64 = law.iter().sum();
    let overflow = law[cap + 1] / total;
    CountDistribution::new(law[..=cap].iter().map(|p| p / total).collect(), overflow)
}

/// `P_A(tau_A <= delta)`: the probability that a point conditioned to start
/// in `A` returns to `A` within `delta` steps. Exact via the same DP with
/// an absorbing "already returned" lane.
pub fn short_return_prob(shift: &MarkovShift, cyl: &CylinderSet, delta: u64) -> Result<Rat> {
    let mu_a = cylinder_measure(shift, cyl);
    if mu_a.is_zero() {
        return Err(Error::UndefinedConditional);
    }
    if delta == 0 {
        return Ok(Rat::zero());
    }
    let n = cyl.word_len();
    let space = StateSpace::new(shift.alphabet_size(), n, delta, 0)?;
    let transitions = build_transitions(shift, cyl, &space);

    // state mass conditioned (unnormalized) on the initial window lying in A
    let mut dp = vec![Rat::zero(); space.count];
    for w in cyl.words() {
        let suffix = &w[w.len() - space.l..];
        dp[space.encode(suffix)] += shift.word_measure(w);
    }

    let mut hit = Rat::zero();
    let mut scratch = vec![Rat::zero(); space.count];
    for _ in 1..=delta {
        for slot in scratch.iter_mut() {
            slot.set_zero();
        }
        for idx in 0..space.count {
            if dp[idx].is_zero() {
                continue;
            }
            for tr in &transitions[idx] {
                let mass = &dp[idx] * shift.prob(tr.prob_index.0, tr.prob_index.1);
                if tr.hits {
                    hit += mass; // absorbed: the return happened
                } else {
                    scratch[tr.next] += mass;
                }
            }
        }
        std::mem::swap(&mut dp, &mut scratch);
    }
    Ok(hit / mu_a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::MarkovShift;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn single_symbol_word_is_binomial() {
        let coin = MarkovShift::fair_coin();
        let a = CylinderSet::from_strs(&coin, &["1"]).unwrap();
        let law = exact_hit_distribution(&coin, &a, 3, 3).unwrap();
        assert_eq!(law.probs(), &[rat(1, 8), rat(3, 8), rat(3, 8), rat(1, 8)]);
        assert!(law.overflow().is_zero());
    }

    #[test]
    fn double_one_word_law() {
        let coin = MarkovShift::fair_coin();
        let a = CylinderSet::from_strs(&coin, &["11"]).unwrap();
        let law = exact_hit_distribution(&coin, &a, 2, 2).unwrap();
        assert_eq!(law.probs(), &[rat(5, 8), rat(2, 8), rat(1, 8)]);
    }

    #[test]
    fn zero_length_orbit_is_point_mass() {
        let coin = MarkovShift::fair_coin();
        let a = CylinderSet::from_strs(&coin, &["11"]).unwrap();
        let law = exact_hit_distribution(&coin, &a, 0, 4).unwrap();
        assert_eq!(law.p(0), Rat::one());
    }

    #[test]
    fn mean_identity_exact() {
        // E W_{A,m} = m mu(A), exactly, by stationarity.
        let coin = MarkovShift::fair_coin();
        for words in [vec!["1"], vec!["01"], vec!["11"], vec!["011", "110"]] {
            let a = CylinderSet::from_strs(&coin, &words).unwrap();
            let mu = cylinder_measure(&coin, &a);
            for m in [1u64, 3, 7, 12] {
                let law = exact_hit_distribution(&coin, &a, m, m as usize).unwrap();
                assert_eq!(
                    law.mean().unwrap(),
                    Rat::from_integer((m as i64).into()) * &mu,
                    "words {words:?} m {m}"
                );
            }
        }
    }

    #[test]
    fn float_backend_matches_exact() {
        let shift = MarkovShift::golden_mean();
        let a = CylinderSet::from_strs(&shift, &["010"]).unwrap();
        let exact = exact_hit_distribution(&shift, &a, 20, 8).unwrap().to_float();
        let float = hit_distribution_f64(&shift, &a, 20, 8).unwrap();
        for k in 0..=8 {
            assert!((exact.p(k) - float.p(k)).abs() < 1e-12);
        }
        assert!((exact.overflow() - float.overflow()).abs() < 1e-12);
    }

    #[test]
    fn short_return_examples() {
        let coin = MarkovShift::fair_coin();
        let a11 = CylinderSet::from_strs(&coin, &["11"]).unwrap();
        assert_eq!(short_return_prob(&coin, &a11, 1).unwrap(), rat(1, 2));
        let a01 = CylinderSet::from_strs(&coin, &["01"]).unwrap();
        assert_eq!(short_return_prob(&coin, &a01, 1).unwrap(), Rat::zero());
        assert_eq!(short_return_prob(&coin, &a01, 0).unwrap(), Rat::zero());
    }

    #[test]
    fn short_return_is_monotone_in_delta() {
        let coin = MarkovShift::fair_coin();
        let a = CylinderSet::from_strs(&coin, &["0101"]).unwrap();
        let mut prev = Rat::zero();
        for delta in 0..10 {
            let p = short_return_prob(&coin, &a, delta).unwrap();
            assert!(p >= prev, "delta {delta}");
            prev = p;
        }
    }

    #[test]
    fn short_return_brute_force_check() {
        // enumerate all continuations of length delta for a golden-mean word
        let g = MarkovShift::golden_mean();
        let a = CylinderSet::from_strs(&g, &["010"]).unwrap();
        let delta = 4u64;
        let fast = short_return_prob(&g, &a, delta).unwrap();

        // brute force: words w + delta extra symbols; count mass where some
        // window j in [1, delta] lies in A
        let mut hit = Rat::zero();
        let mut total = Rat::zero();
        let mut stack: Vec<Vec<u8>> = a.words().to_vec();
        while let Some(w) = stack.pop() {
            if w.len() == 3 + delta as usize {
                let mass = g.word_measure(&w);
                total += &mass;
                if (1..=delta as usize).any(|j| a.contains_word(&w[j..j + 3])) {
                    hit += mass;
                }
                continue;
            }
            let last = *w.last().unwrap();
            for s in 0..2u8 {
                if g.is_allowed(last, s) {
                    let mut v = w.clone();
                    v.push(s);
                    stack.push(v);
                }
            }
        }
        assert_eq!(fast, hit / total);
    }

    #[test]
    fn budget_rejects_huge_instances() {
        let coin = MarkovShift::fair_coin();
        let a = CylinderSet::new(&coin, vec![vec![0; 40]]).unwrap();
        assert!(matches!(
            exact_hit_distribution(&coin, &a, 1 << 40, 64),
            Err(Error::Budget(_))
        ));
    }
}
