//! Circle and interval maps with exactly sampleable invariant measures.
//!
//! Three maps are provided:
//!
//! - doubling: `T(x) = 2x mod 1` on the circle, invariant measure Lebesgue;
//! - tent: `T(x) = 2 min(x, 1-x)` on `[0,1]`, invariant measure Lebesgue;
//! - Gauss: `T(x) = 1/x mod 1` on `(0,1)`, invariant density `1/((1+x) ln 2)`,
//!   sampled by inverse CDF `x = 2^u - 1`.
//!
//! Doubling and tent act on binary digits (shift, respectively shift with a
//! conditional complement), and multiplication by two is exact in binary
//! floating point. An `f64` starting point is therefore a dyadic rational
//! whose *true* orbit collapses onto the fixed point 0 after at most ~53
//! steps. Short orbits through [`MetricSystem::iterate`] are exact; long
//! orbit statistics must go through [`LebesgueOrbit`], which samples a point
//! by its digit expansion and serves every iterate to 53-bit precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Doubling,
    Tent,
    Gauss,
}

/// A map of the circle or interval together with its metric and invariant
/// measure sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSystem {
    pub kind: MapKind,
}

impl MetricSystem {
    pub fn doubling() -> Self {
        Self { kind: MapKind::Doubling }
    }

    pub fn tent() -> Self {
        Self { kind: MapKind::Tent }
    }

    pub fn gauss() -> Self {
        Self { kind: MapKind::Gauss }
    }

    /// Domain membership: `[0,1)` for doubling, `[0,1]` for tent, `(0,1)`
    /// for Gauss (the map is undefined at 0).
    pub fn in_domain(&self, x: f64) -> bool {
        match self.kind {
            MapKind::Doubling => (0.0..1.0).contains(&x),
            MapKind::Tent => (0.0..=1.0).contains(&x),
            MapKind::Gauss => x > 0.0 && x < 1.0,
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {x} outside domain of {:?}", self.kind)))
        }
    }

    /// One application of `T`.
    pub fn map(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match self.kind {
            MapKind::Doubling => {
                let y = 2.0 * x;
                if y >= 1.0 {
                    y - 1.0
                } else {
                    y
                }
            }
            MapKind::Tent => {
                if x <= 0.5 {
                    2.0 * x
                } else {
                    2.0 * (1.0 - x)
                }
            }
            MapKind::Gauss => {
                let y = (1.0 / x).fract();
                if y == 0.0 {
                    // 1/x integral: the orbit leaves the domain.
                    return Err(Error::Domain(format!(
                        "Gauss orbit reached 0 from x = {x}"
                    )));
                }
                y
            }
        })
    }

    /// `T^k(x)`.
    pub fn iterate(&self, x: f64, k: usize) -> Result<f64> {
        let mut y = x;
        self.check_domain(x)?;
        for _ in 0..k {
            y = self.map(y)?;
        }
        Ok(y)
    }

    /// `(x, T x, ..., T^{n-1} x)`, length `n >= 1`.
    pub fn orbit(&self, x: f64, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Validation("orbit length must be >= 1".into()));
        }
        let mut out = Vec::with_capacity(n);
        self.check_domain(x)?;
        out.push(x);
        while out.len() < n {
            out.push(self.map(*out.last().unwrap())?);
        }
        Ok(out)
    }

    /// Circle distance for the doubling map, absolute difference otherwise.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            MapKind::Doubling => {
                let d = (x - y).abs();
                d.min(1.0 - d)
            }
            MapKind::Tent | MapKind::Gauss => (x - y).abs(),
        }
    }

    /// One draw from the invariant measure.
    pub fn sample_invariant(&self, rng: &mut SplitMix64) -> f64 {
        match self.kind {
            MapKind::Doubling | MapKind::Tent => rng.next_f64(),
            MapKind::Gauss => {
                let u = rng.next_f64_open();
                u.exp2() - 1.0
            }
        }
    }
}

/// A Lebesgue-random point of the doubling or tent map, stored as its
/// binary digit expansion, with random access to every iterate.
///
/// For the doubling map, `T^j x` is the fraction whose digits start at
/// offset `j`. For the tent map, `T^j x` (for `j >= 1`) has digits
/// `b[j+i] XOR b[j-1]`. Points are served truncated to 53 digits, so every
/// distance comparison carries an error below `2^-52`; membership tests at
/// the radii used here (`>= 2^-51`) are unaffected on all but a
/// measure-zero-adjacent sliver of inputs.
#[derive(Debug, Clone)]
pub struct LebesgueOrbit {
    kind: MapKind,
    words: Vec<u64>,
    horizon: usize,
}

const POINT_BITS: usize = 53;

impl LebesgueOrbit {
    /// Sample a point with `horizon + 1` serveable iterates `T^0 .. T^horizon`.
    pub fn sample(system: MetricSystem, rng: &mut SplitMix64, horizon: usize) -> Result<Self> {
        match system.kind {
            MapKind::Doubling | MapKind::Tent => {}
            MapKind::Gauss => {
                return Err(Error::Validation(
                    "digit-expansion orbits exist only for doubling and tent".into(),
                ))
            }
        }
        let n_bits = horizon + POINT_BITS + 1;
        let n_words = n_bits.div_ceil(64);
        let words = (0..n_words).map(|_| rng.next_u64()).collect();
        Ok(Self { kind: system.kind, words, horizon })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    fn bit(&self, i: usize) -> u64 {
        (self.words[i / 64] >> (63 - (i % 64))) & 1
    }

    /// 53 digits starting at offset `j`, as an integer in `[0, 2^53)`.
    #[inline]
    fn digits53(&self, j: usize) -> u64 {
        let w = j / 64;
        let s = j % 64;
        let hi = self.words[w] << s;
        let lo = if s == 0 { 0 } else { self.words[w + 1] >> (64 - s) };
        (hi | lo) >> (64 - POINT_BITS)
    }

    /// `T^j x` to 53-bit precision.
    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        debug_assert!(j <= self.horizon);
        let mut d = self.digits53(j);
        if self.kind == MapKind::Tent && j > 0 && self.bit(j - 1) == 1 {
            d = !d & ((1u64 << POINT_BITS) - 1);
        }
        d as f64 * (1.0 / (1u64 << POINT_BITS) as f64)
    }
}
