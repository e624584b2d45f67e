//! Exact combinatorics and probability on Markov shifts: cylinder sets,
//! set periods, Hamming clusters, exact hitting-count laws, short-return
//! probabilities and mixing coefficients. This is the ground-truth oracle
//! layer that every Monte Carlo claim is checked against.

mod cylinder;
mod hamming;
mod hitting;
mod mixing;

pub use cylinder::{cylinder_measure, cylinder_measure_f64, period, CylinderSet};
pub use hamming::{hamming_cluster, hamming_distance, lambda_bound};
pub use hitting::{exact_hit_distribution, hit_distribution_f64, short_return_prob};
pub use mixing::{mixing_coefficient, MixingBracket, MixingKind};
