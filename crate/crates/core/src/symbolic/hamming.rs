//! Hamming distance and clusters of cylinders.
//!
//! The cluster of cylinders around a word `x` at radius `beta` is
//! `{y : d_n^H(x, y) < beta}` with `d_n^H` the normalized mismatch count.
//! Its size is bounded by `lambda_n = sum_{m <= [n beta]} s^m C(n, m)`.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::{rat_from_f64, Rat};
use crate::symbolic::CylinderSet;
use crate::systems::MarkovShift;

/// Normalized Hamming distance `(1/n) #{k : w1_k != w2_k}` in `[0, 1]`.
pub fn hamming_distance(w1: &[u8], w2: &[u8]) -> Result<f64> {
    if w1.len() != w2.len() {
        return Err(Error::Validation(format!(
            "length mismatch: {} vs {}",
            w1.len(),
            w2.len()
        )));
    }
    let mismatches = w1.iter().zip(w2).filter(|(a, b)| a != b).count();
    Ok(mismatches as f64 / w1.len() as f64)
}

/// Largest mismatch count `m` admitted by the strict inequality
/// `m / n < beta`, evaluated in exact rational arithmetic over the given
/// float `beta`. Returns `None` when even `m = 0` fails (`beta <= 0`).
fn max_mismatches(n: usize, beta: f64) -> Result<Option<usize>> {
    let b = rat_from_f64(beta)?;
    if !b.is_positive() {
        return Ok(None);
    }
    let bn = b * Rat::from_integer((n as i64).into());
    // beta <= 1 so bn <= n and the floor fits an i64
    let mut m: i64 = bn.floor().to_integer().try_into().expect("bn <= n");
    if Rat::from_integer(m.into()) == bn {
        m -= 1; // strict inequality excludes the boundary
    }
    if m < 0 {
        Ok(None)
    } else {
        Ok(Some((m as usize).min(n)))
    }
}

/// All admissible words within strict Hamming radius `beta` of `center`
/// (the center itself always included). Enumeration aborts with a budget
/// error once the cluster would exceed `budget` words; nothing is
/// truncated silently.
pub fn hamming_cluster(
    shift: &MarkovShift,
    center: &[u8],
    beta: f64,
    budget: usize,
) -> Result<CylinderSet> {
    if center.is_empty() {
        return Err(Error::Validation("empty center word".into()));
    }
    if !shift.word_admissible(center) {
        return Err(Error::Validation("center word is not admissible".into()));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Validation(format!("beta {beta} outside [0, 1]")));
    }
    let n = center.len();
    let allow = max_mismatches(n, beta)?;
    let Some(max_mis) = allow else {
        return CylinderSet::new(shift, vec![center.to_vec()]);
    };

    let s = shift.alphabet_size() as u8;
    let mut out = Vec::new();
    // DFS over (prefix, mismatch count) with admissibility pruning.
    let mut stack: Vec<(Vec<u8>, usize)> = vec![(Vec::new(), 0)];
    while let Some((prefix, mis)) = stack.pop() {
        if prefix.len() == n {
            out.push(prefix);
            if out.len() > budget {
                return Err(Error::Budget(format!(
                    "Hamming cluster exceeds budget of {budget} words"
                )));
            }
            continue;
        }
        let pos = prefix.len();
        for a in 0..s {
            let new_mis = mis + usize::from(a != center[pos]);
            if new_mis > max_mis {
                continue;
            }
            if pos > 0 && !shift.is_allowed(prefix[pos - 1], a) {
                continue;
            }
            let mut next = prefix.clone();
            next.push(a);
            stack.push((next, new_mis));
        }
    }
    CylinderSet::new(shift, out)
}

/// The binomial cluster bound `sum_{m=0}^{[n beta]} s^m C(n, m)`.
pub fn lambda_bound(n: usize, s: usize, beta: f64) -> Result<u128> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Validation(format!("beta {beta} outside [0, 1]")));
    }
    let b = rat_from_f64(beta)?;
    let bn = b * Rat::from_integer((n as i64).into());
    let top: usize = bn.floor().to_integer().max(0.into()).try_into().unwrap_or(n);
    let top = top.min(n);

    let overflow = || Error::Budget(format!("lambda bound overflows u128 at n = {n}, s = {s}"));
    let mut total: u128 = 0;
    let mut s_pow: u128 = 1;
    let mut binom: u128 = 1;
    for m in 0..=top {
        if m > 0 {
            s_pow = s_pow.checked_mul(s as u128).ok_or_else(overflow)?;
            // C(n, m) = C(n, m-1) * (n - m + 1) / m, exact at each step
            binom = binom
                .checked_mul((n - m + 1) as u128)
                .ok_or_else(overflow)?
                / m as u128;
        }
        total = total
            .checked_add(s_pow.checked_mul(binom).ok_or_else(overflow)?)
            .ok_or_else(overflow)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::MarkovShift;

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(b"abc", b"abc").unwrap(), 0.0);
        assert_eq!(hamming_distance(b"abc", b"abd").unwrap(), 1.0 / 3.0);
        assert_eq!(hamming_distance(b"ab", b"ba").unwrap(), 1.0);
        assert!(hamming_distance(b"ab", b"abc").is_err());
    }

    #[test]
    fn cluster_full_shift_example() {
        // n = 4, beta = 0.3: strict radius admits at most one mismatch.
        let coin = MarkovShift::fair_coin();
        let cluster = hamming_cluster(&coin, &[0, 1, 1, 0], 0.3, 1 << 16).unwrap();
        assert_eq!(cluster.len(), 5);
        assert_eq!(lambda_bound(4, 2, 0.3).unwrap(), 9);
        assert!((cluster.len() as u128) <= lambda_bound(4, 2, 0.3).unwrap());
    }

    #[test]
    fn zero_radius_is_the_center() {
        let coin = MarkovShift::fair_coin();
        let cluster = hamming_cluster(&coin, &[1, 0, 1], 0.0, 16).unwrap();
        assert_eq!(cluster.words(), &[vec![1, 0, 1]]);
    }

    #[test]
    fn integer_beta_n_is_strict() {
        // beta * n = 2 exactly: words at Hamming distance exactly 2/n are out.
        let coin = MarkovShift::fair_coin();
        let cluster = hamming_cluster(&coin, &[0, 0, 0, 0], 0.5, 1 << 16).unwrap();
        // mismatches < 2, i.e. at most 1: 1 + 4 = 5 words
        assert_eq!(cluster.len(), 5);
    }

    #[test]
    fn cluster_respects_admissibility() {
        let g = MarkovShift::golden_mean();
        let cluster = hamming_cluster(&g, &[0, 0, 0], 0.4, 1 << 16).unwrap();
        // one mismatch allowed; "011"/"110" style words with "11" are barred
        for w in cluster.words() {
            assert!(g.word_admissible(w));
        }
        assert_eq!(cluster.len(), 4); // 000, 100, 010, 001
    }

    #[test]
    fn budget_is_enforced() {
        let coin = MarkovShift::fair_coin();
        let err = hamming_cluster(&coin, &[0; 12], 1.0, 100);
        assert!(matches!(err, Err(Error::Budget(_))));
    }

    #[test]
    fn cluster_size_never_exceeds_lambda_exhaustively() {
        for s in [2usize, 3] {
            let shift = MarkovShift::uniform(s).unwrap();
            for n in 1..=14usize {
                for beta in [0.0, 0.1, 0.25, 0.5] {
                    // alternating center exercises both match and mismatch
                    // transitions
                    let center: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
                    let cluster = hamming_cluster(&shift, &center, beta, 1 << 22).unwrap();
                    let bound = lambda_bound(n, s, beta).unwrap();
                    assert!(
                        cluster.len() as u128 <= bound,
                        "s={s} n={n} beta={beta}: {} > {bound}",
                        cluster.len()
                    );
                }
            }
        }
    }
}
