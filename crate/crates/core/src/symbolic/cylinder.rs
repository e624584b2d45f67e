//! Unions of admissible n-words and their exact measures and periods.

use std::collections::HashSet;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::systems::MarkovShift;

/// A union of admissible cylinders of a common word length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSet {
    word_len: usize,
    words: Vec<Vec<u8>>,
}

impl CylinderSet {
    /// Words must be nonempty, of equal length, and admissible for the
    /// shift. Duplicates are removed; words are kept sorted.
    pub fn new(shift: &MarkovShift, mut words: Vec<Vec<u8>>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::Validation("cylinder set has no words".into()));
        }
        let n = words[0].len();
        if n == 0 {
            return Err(Error::Validation("word length must be >= 1".into()));
        }
        for w in &words {
            if w.len() != n {
                return Err(Error::Validation("words have mixed lengths".into()));
            }
            if !shift.word_admissible(w) {
                return Err(Error::Validation(format!(
                    "word {:?} is not admissible",
                    crate::systems::word_to_string(w)
                )));
            }
        }
        words.sort();
        words.dedup();
        Ok(Self { word_len: n, words })
    }

    pub fn from_strs(shift: &MarkovShift, words: &[&str]) -> Result<Self> {
        let parsed = words
            .iter()
            .map(|s| crate::systems::parse_word(s, shift.alphabet_size()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(shift, parsed)
    }

    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains_word(&self, w: &[u8]) -> bool {
        self.words.binary_search_by(|probe| probe.as_slice().cmp(w)).is_ok()
    }
}

/// Exact measure `sum_w pi(w_0) prod P(w_i, w_{i+1})` of a cylinder set.
pub fn cylinder_measure(shift: &MarkovShift, cyl: &CylinderSet) -> Rat {
    cyl.words().iter().map(|w| shift.word_measure(w)).sum()
}

pub fn cylinder_measure_f64(shift: &MarkovShift, cyl: &CylinderSet) -> f64 {
    cylinder_measure(shift, cyl).to_f64().unwrap_or(0.0)
}

/// Period `tau(A) = min{k >= 1 : T^{-k} A ∩ A != emptyset}`.
///
/// For `k < n` this asks for two words of `A` overlapping consistently in
/// their middle; for `k >= n` it asks for an admissible bridge of exactly
/// `k - n + 1` transitions from some final symbol of `A` to some initial
/// symbol of `A`. Primitivity guarantees a hit by `k = n + k0 - 1`, so the
/// scan terminates.
pub fn period(shift: &MarkovShift, cyl: &CylinderSet) -> usize {
    let n = cyl.word_len();
    let s = shift.alphabet_size();

    let ends: HashSet<u8> = cyl.words().iter().map(|w| w[n - 1]).collect();
    let starts: HashSet<u8> = cyl.words().iter().map(|w| w[0]).collect();

    // Boolean reachability powers, grown lazily for the k >= n branch.
    let mut reach: Vec<Vec<bool>> =
        (0..s).map(|a| (0..s).map(|b| shift.is_allowed(a as u8, b as u8)).collect()).collect();
    let mut reach_steps = 1usize;

    for k in 1..=(n + shift.positivity_index()) {
        if k < n {
            let suffixes: HashSet<&[u8]> = cyl.words().iter().map(|w| &w[k..]).collect();
            if cyl.words().iter().any(|w| suffixes.contains(&w[..n - k])) {
                return k;
            }
        } else {
            let steps = k - n + 1;
            while reach_steps < steps {
                reach = (0..s)
                    .map(|a| {
                        (0..s)
                            .map(|b| {
                                (0..s).any(|c| reach[a][c] && shift.is_allowed(c as u8, b as u8))
                            })
                            .collect()
                    })
                    .collect();
                reach_steps += 1;
            }
            if ends
                .iter()
                .any(|&a| starts.iter().any(|&b| reach[a as usize][b as usize]))
            {
                return k;
            }
        }
    }
    unreachable!("primitive graph: a bridge of k0 steps always exists")
}
