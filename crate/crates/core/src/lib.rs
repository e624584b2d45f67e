//! Return-time statistics of measure-preserving dynamical systems.
//!
//! The crate is a laboratory for the hitting count
//! `W_{A,m} = sum_{j=1}^m chi_A(T^j x)` when the target `A` is a cylinder
//! set of a Markov shift or a Bowen ball of an interval map, the orbit
//! length is Kac-scaled as `m = t / mu(A)`, and the law of `W` is compared
//! against the Poisson law with parameter `t`.
//!
//! Layered as:
//!
//! - [`systems`]: concrete maps and shifts with exactly sampleable
//!   invariant measures;
//! - [`symbolic`]: exact cylinder combinatorics, hitting laws, short
//!   returns and mixing coefficients (the oracle layer);
//! - [`bowen`]: Bowen-ball geometry, exact for the doubling map where
//!   balls are circle arcs;
//! - [`stein`]: Poisson law, Stein-equation solver and the Chen-Stein
//!   return-time error bound;
//! - [`harness`]: the seeded, reproducible Monte Carlo experiment engine.

pub mod bowen;
pub mod dist;
pub mod error;
pub mod harness;
pub mod rational;
pub mod rng;
pub mod stein;
pub mod symbolic;
pub mod systems;

pub use dist::{tv_distance, CountDistribution, ExactDistribution};
pub use error::{Error, Result};
pub use rational::Rat;
