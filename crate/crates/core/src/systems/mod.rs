//! Concrete measure-preserving systems `(X, T, mu)`: circle/interval maps
//! with exactly sampleable invariant measures, and finite-alphabet Markov
//! shifts with exact rational transition structure.

mod metric;
mod shift;

pub use metric::{LebesgueOrbit, MapKind, MetricSystem};
pub use shift::{
    parse_word, stationary_distribution, stationary_distribution_exact, word_to_string,
    MarkovShift,
};
