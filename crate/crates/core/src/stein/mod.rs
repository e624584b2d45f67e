//! Poisson law, Stein-equation solver, and the Chen-Stein return-time
//! error bound.

mod bound;
mod solution;

pub use bound::{chen_stein_bound, ChenSteinBound};
pub use solution::{poisson_law, poisson_pmf, stein_solve, SteinSolution};

pub use crate::dist::tv_distance;
