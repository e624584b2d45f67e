//! Bowen-ball geometry and statistics: membership, measure, recurrence
//! time, ball period, entropy estimators and dyadic cylinder
//! approximations. The doubling map with a dyadic partition is the fully
//! exact backend anchoring every statistical claim made elsewhere.

mod approx;
mod arc;
mod ball;

pub use approx::{
    count_intersecting_cylinders, cylinder_approximation, CylinderApproximation, MAX_DEPTH,
};
pub use arc::CircleArc;
pub use ball::{
    entropy_estimates, recurrence_time, recurrence_time_orbit, BowenBall, EntropyEstimates,
    MeasureEstimate, PeriodBounds, MAX_DOUBLING_LEN,
};
