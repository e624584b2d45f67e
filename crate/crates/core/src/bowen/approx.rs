//! Dyadic cylinder approximations of doubling-map Bowen balls.
//!
//! With the dyadic partition `{[0,1/2), [1/2,1)}`, depth-N cylinders are
//! the intervals `[j 2^-N, (j+1) 2^-N)`. A ball (an arc for `eps < 1/4`)
//! is approximated from inside by the cylinders it contains and its defect
//! is covered by the cylinders straddling its endpoints. Classification
//! treats the arc as `[lo, hi)`: endpoints aligned to the dyadic grid then
//! produce an empty boundary, and the measure sandwich
//! `mu(inner) <= mu(ball) <= mu(inner) + mu(boundary)` is exact either way.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::bowen::ball::BowenBall;
use crate::error::{Error, Result};
use crate::rational::{rat_to_f64, Rat};

/// Maximum dyadic depth; beyond this the arc endpoints themselves are
/// coarser than the grid.
pub const MAX_DEPTH: usize = 48;
/// Cap on materialized cylinder indices per approximation.
const ENUM_BUDGET: u64 = 1 << 22;

/// Inner/boundary decomposition of a ball at dyadic depth `depth`.
#[derive(Debug, Clone)]
pub struct CylinderApproximation {
    pub depth: usize,
    /// Indices `j` of depth cylinders contained in the ball.
    pub inner: Vec<u64>,
    /// Indices of cylinders meeting the ball without being contained.
    pub boundary: Vec<u64>,
    pub mu_ball: Rat,
    pub mu_inner: Rat,
    pub mu_boundary: Rat,
}

impl CylinderApproximation {
    /// Outer approximation: all cylinders meeting the ball.
    pub fn outer(&self) -> Vec<u64> {
        let mut all: Vec<u64> = self.inner.iter().chain(&self.boundary).copied().collect();
        all.sort_unstable();
        all
    }

    /// Boundary-to-ball measure ratio, the empirical counterpart of the
    /// annulus regularity function.
    pub fn theta_hat(&self) -> f64 {
        rat_to_f64(&(&self.mu_boundary / &self.mu_ball))
    }

    /// The approximation penalty `2 t theta_hat` on hitting-law distances.
    pub fn lemma_gap_bound(&self, t: f64) -> f64 {
        2.0 * t * self.theta_hat()
    }

    /// Binary word of a depth-`depth` cylinder index.
    pub fn word(&self, index: u64) -> String {
        (0..self.depth)
            .rev()
            .map(|b| if index >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Non-wrapping segment `[lo, hi)` with `0 <= lo < hi <= 1`.
struct Segment {
    lo: Rat,
    hi: Rat,
}

/// Split an arc `[lo, lo+len)` into non-wrapping segments.
fn segments(lo: &Rat, len: &Rat) -> Vec<Segment> {
    let hi = lo + len;
    if hi <= Rat::one() {
        vec![Segment { lo: lo.clone(), hi }]
    } else {
        vec![
            Segment { lo: lo.clone(), hi: Rat::one() },
            Segment { lo: Rat::zero(), hi: hi - Rat::one() },
        ]
    }
}

fn floor_u64(x: &Rat) -> u64 {
    x.floor().to_integer().to_u64().unwrap_or(0)
}

/// Is `x` an integer?
fn is_integral(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Classify the depth-`depth` cylinders against one segment. Returns
/// (contained, straddling) index ranges.
fn classify_segment(seg: &Segment, depth: usize) -> (Vec<u64>, Vec<u64>) {
    let scale = Rat::from_integer(BigInt::from(1u8) << depth);
    let a = &seg.lo * &scale;
    let b = &seg.hi * &scale;

    // cylinders meeting [a, b) in grid units: j < b and j + 1 > a
    let j_first = floor_u64(&a);
    let j_last = if is_integral(&b) {
        floor_u64(&b).saturating_sub(1)
    } else {
        floor_u64(&b)
    };

    // contained: j >= a and j + 1 <= b
    let c_first = if is_integral(&a) { floor_u64(&a) } else { floor_u64(&a) + 1 };
    let c_last_plus = floor_u64(&b); // j + 1 <= b  <=>  j < b when b integral, j <= floor(b) - 1 otherwise
    let c_last = c_last_plus.saturating_sub(1);

    let mut inner = Vec::new();
    let mut boundary = Vec::new();
    for j in j_first..=j_last {
        if j >= c_first && j <= c_last && c_last_plus >= 1 {
            inner.push(j);
        } else {
            boundary.push(j);
        }
    }
    (inner, boundary)
}

/// Inner/boundary cylinder decomposition of an exact-backend ball.
pub fn cylinder_approximation(ball: &BowenBall, depth: usize) -> Result<CylinderApproximation> {
    if depth < ball.len() {
        return Err(Error::Validation(format!(
            "approximation depth {depth} below ball length {}",
            ball.len()
        )));
    }
    if depth > MAX_DEPTH {
        return Err(Error::Validation(format!("depth {depth} exceeds cap {MAX_DEPTH}")));
    }
    let arc = ball.exact_arc()?;
    let expected = rat_to_f64(arc.len()) * (1u64 << depth) as f64;
    if expected > ENUM_BUDGET as f64 {
        return Err(Error::Budget(format!(
            "~{expected:.0} cylinders at depth {depth} exceed budget {ENUM_BUDGET}"
        )));
    }

    let mut inner = Vec::new();
    let mut boundary = Vec::new();
    for seg in segments(arc.lo(), arc.len()) {
        if seg.lo == seg.hi {
            continue;
        }
        let (i, b) = classify_segment(&seg, depth);
        inner.extend(i);
        boundary.extend(b);
    }
    inner.sort_unstable();
    boundary.sort_unstable();

    let cell = Rat::new(1.into(), BigInt::from(1u8) << depth);
    let mu_inner = Rat::from_integer((inner.len() as u64).into()) * &cell;
    let mu_boundary = Rat::from_integer((boundary.len() as u64).into()) * &cell;
    Ok(CylinderApproximation {
        depth,
        inner,
        boundary,
        mu_ball: arc.len().clone(),
        mu_inner,
        mu_boundary,
    })
}

/// Number of depth-`depth` dyadic cylinders meeting the ball, by endpoint
/// arithmetic alone (no materialization, so no budget).
pub fn count_intersecting_cylinders(ball: &BowenBall, depth: usize) -> Result<u64> {
    if depth > MAX_DEPTH {
        return Err(Error::Validation(format!("depth {depth} exceeds cap {MAX_DEPTH}")));
    }
    let arc = ball.exact_arc()?;
    if arc.is_full() {
        return Ok(1 << depth);
    }
    let mut count = 0u64;
    for seg in segments(arc.lo(), arc.len()) {
        if seg.lo == seg.hi {
            continue;
        }
        let scale = Rat::from_integer(BigInt::from(1u8) << depth);
        let a = &seg.lo * &scale;
        let b = &seg.hi * &scale;
        let j_first = floor_u64(&a);
        let j_last = if is_integral(&b) {
            floor_u64(&b).saturating_sub(1)
        } else {
            floor_u64(&b)
        };
        count += j_last - j_first + 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_from_str;
    use crate::systems::MetricSystem;
    use approx::assert_abs_diff_eq;
    use num_traits::ToPrimitive;

    fn ball(center: f64, eps: f64, n: usize) -> BowenBall {
        BowenBall::new(MetricSystem::doubling(), center, eps, n).unwrap()
    }

    #[test]
    fn generic_ball_has_two_boundary_cylinders() {
        // eps = 0.1, n = 6, depth 12: ball length 0.00625, generic endpoints
        let approx = cylinder_approximation(&ball(0.37, 0.1, 6), 12).unwrap();
        assert_eq!(approx.boundary.len(), 2);
        assert_eq!(approx.mu_boundary, Rat::new(2.into(), 4096.into()));
        assert_abs_diff_eq!(approx.theta_hat(), 0.078125, epsilon = 1e-10);
    }

    #[test]
    fn aligned_endpoints_have_empty_boundary() {
        // center 1/2, eps = 2^-4, n = 1: arc (0.4375, 0.5625), endpoints
        // dyadic at depth >= 4
        let b = ball(0.5, 0.0625, 1);
        let approx = cylinder_approximation(&b, 6).unwrap();
        assert!(approx.boundary.is_empty());
        assert_eq!(approx.mu_inner, approx.mu_ball);
    }

    #[test]
    fn sandwich_is_exact() {
        for (center, eps, n, depth) in
            [(0.37, 0.1, 6, 12), (0.9, 0.05, 4, 10), (0.123, 0.2, 8, 14)]
        {
            let b = ball(center, eps, n);
            let a = cylinder_approximation(&b, depth).unwrap();
            assert!(a.mu_inner <= a.mu_ball);
            assert!(a.mu_ball <= &a.mu_inner + &a.mu_boundary);
            // inner and boundary are disjoint index sets
            let outer = a.outer();
            assert_eq!(outer.len(), a.inner.len() + a.boundary.len());
        }
    }

    #[test]
    fn wrapped_arc_is_classified() {
        // center near 0: the arc wraps through the origin
        let b = ball(0.001, 0.2, 1);
        let a = cylinder_approximation(&b, 8).unwrap();
        assert!(a.mu_inner <= a.mu_ball);
        assert!(a.mu_ball <= &a.mu_inner + &a.mu_boundary);
        let total = a.inner.len() + a.boundary.len();
        // arc length 0.4 at depth 8: about 102 cylinders
        assert!((101..=104).contains(&total), "total = {total}");
    }

    #[test]
    fn deeper_grids_shrink_theta_by_halves() {
        let b = ball(0.37, 0.1, 6);
        let t12 = cylinder_approximation(&b, 12).unwrap().theta_hat();
        let t16 = cylinder_approximation(&b, 16).unwrap().theta_hat();
        assert_abs_diff_eq!(t16, t12 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn counts_match_interval_geometry() {
        // eps = 0.1, n = 10: length ratio to depth-10 cells is 0.4
        let c = count_intersecting_cylinders(&ball(0.37, 0.1, 10), 10).unwrap();
        assert!((1..=2).contains(&c));
        // eps = 0.4, n = 1: arc of length 0.8 meets both depth-1 cells
        let c = count_intersecting_cylinders(&ball(0.0, 0.4, 1), 1).unwrap();
        assert_eq!(c, 2);
    }

    #[test]
    fn count_agrees_with_materialized_outer() {
        for depth in [8usize, 10, 13] {
            let b = ball(0.613, 0.1, 7);
            let count = count_intersecting_cylinders(&b, depth).unwrap();
            let approx = cylinder_approximation(&b, depth).unwrap();
            assert_eq!(count as usize, approx.outer().len());
        }
    }

    #[test]
    fn exact_third_center_works() {
        let third = rat_from_str("1/3").unwrap();
        let b = BowenBall::with_exact_center(MetricSystem::doubling(), third, 0.1, 4).unwrap();
        let a = cylinder_approximation(&b, 10).unwrap();
        // 1/3 is not dyadic: generic endpoints, two boundary cells
        assert_eq!(a.boundary.len(), 2);
        let total_mu = (&a.mu_inner + &a.mu_boundary).to_f64().unwrap();
        assert!(total_mu >= a.mu_ball.to_f64().unwrap());
    }

    #[test]
    fn words_encode_indices() {
        let a = cylinder_approximation(&ball(0.37, 0.1, 6), 8).unwrap();
        let j = a.inner[0];
        let w = a.word(j);
        assert_eq!(w.len(), 8);
        assert_eq!(u64::from_str_radix(&w, 2).unwrap(), j);
    }
}
