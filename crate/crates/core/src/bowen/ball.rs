//! Bowen balls `B_{eps,n}(x) = {y : sup_{0<=k<n} d(T^k x, T^k y) < eps}`
//! and their statistics: membership, measure, period, recurrence time and
//! entropy estimators.
//!
//! For the doubling map with `eps < 1/4` the ball is exactly the open arc
//! of radius `eps 2^{-(n-1)}` around the center: inductively, the preimage
//! arcs around the other `2^k` preimages of `T^k x` stay farther than
//! `2^{-k} (1 - 3 eps) > 0` from the running intersection, so only the
//! branch through `x` survives. Everything exact below rides on that arc.

use crate::bowen::arc::CircleArc;
use crate::error::{Error, Result};
use crate::rational::{rat_from_f64, rat_to_f64, Rat};
use crate::rng::SplitMix64;
use crate::systems::{LebesgueOrbit, MapKind, MetricSystem};

/// Length cap for doubling-map balls: keeps the arc radius
/// `eps 2^{-(n-1)}` well above the 2^-53 resolution of sampled points.
pub const MAX_DOUBLING_LEN: usize = 48;

/// A dynamical ball with exact rational center.
#[derive(Debug, Clone)]
pub struct BowenBall {
    system: MetricSystem,
    center: Rat,
    center_f64: f64,
    eps: Rat,
    eps_f64: f64,
    n: usize,
}

/// Measure estimate with its standard error; `exact` marks the arc route.
#[derive(Debug, Clone, Copy)]
pub struct MeasureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub exact: bool,
}

/// Period bounds; `certified` only for the exact arc backend.
#[derive(Debug, Clone, Copy)]
pub struct PeriodBounds {
    pub lower: usize,
    pub upper: usize,
    pub certified: bool,
}

/// Brin-Katok and recurrence-based entropy estimates at one `(eps, n)`.
#[derive(Debug, Clone, Copy)]
pub struct EntropyEstimates {
    pub brin_katok: f64,
    pub varandas: f64,
    pub recurrence: u64,
}

impl BowenBall {
    pub fn new(system: MetricSystem, center: f64, eps: f64, n: usize) -> Result<Self> {
        Self::with_exact_center(system, rat_from_f64(center)?, eps, n)
    }

    /// Rational centers keep periodic points like 1/3 exactly periodic.
    pub fn with_exact_center(
        system: MetricSystem,
        center: Rat,
        eps: f64,
        n: usize,
    ) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Validation(format!("radius eps = {eps} must be > 0")));
        }
        if n == 0 {
            return Err(Error::Validation("ball length n must be >= 1".into()));
        }
        if system.kind == MapKind::Doubling && n > MAX_DOUBLING_LEN {
            return Err(Error::Validation(format!(
                "ball length {n} exceeds doubling-map precision cap {MAX_DOUBLING_LEN}"
            )));
        }
        let center_f64 = rat_to_f64(&center);
        if !system.in_domain(center_f64) {
            return Err(Error::Domain(format!("center {center_f64} outside domain")));
        }
        Ok(Self { system, center, center_f64, eps: rat_from_f64(eps)?, eps_f64: eps, n })
    }

    pub fn system(&self) -> MetricSystem {
        self.system
    }

    pub fn center(&self) -> f64 {
        self.center_f64
    }

    pub fn center_exact(&self) -> &Rat {
        &self.center
    }

    pub fn eps(&self) -> f64 {
        self.eps_f64
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Is the exact arc geometry available?
    pub fn has_exact_backend(&self) -> bool {
        self.system.kind == MapKind::Doubling
            && (self.eps_f64 < 0.25 || (self.n == 1 && self.eps_f64 < 0.5))
    }

    /// The exact arc radius `eps 2^{-(n-1)}`.
    fn arc_radius(&self) -> Rat {
        let scale = Rat::new(1.into(), num_bigint::BigInt::from(1u8) << (self.n - 1));
        &self.eps * scale
    }

    /// The ball as an exact open arc (doubling map only).
    pub fn exact_arc(&self) -> Result<CircleArc> {
        if !self.has_exact_backend() {
            return Err(Error::Validation(
                "exact arc backend requires the doubling map with eps < 1/4 (n = 1: eps < 1/2)"
                    .into(),
            ));
        }
        Ok(CircleArc::from_center_radius(&self.center, &self.arc_radius()))
    }

    /// Definitional membership: all `n` orbit distances strictly below eps.
    pub fn contains(&self, y: f64) -> Result<bool> {
        if !self.system.in_domain(y) {
            return Err(Error::Domain(format!("point {y} outside domain")));
        }
        let mut cx = self.center_f64;
        let mut cy = y;
        for k in 0..self.n {
            if self.system.distance(cx, cy) >= self.eps_f64 {
                return Ok(false);
            }
            if k + 1 < self.n {
                cx = self.system.map(cx)?;
                cy = match self.system.map(cy) {
                    Ok(v) => v,
                    // Gauss orbits can exit the domain (x = 1/q); such a
                    // point is not in any ball of positive length
                    Err(_) => return Ok(false),
                };
            }
        }
        Ok(true)
    }

    /// Ball measure: exact arc length for the doubling map, Monte Carlo
    /// hit frequency with binomial standard error otherwise.
    pub fn measure_exact(&self) -> Result<Rat> {
        let arc = self.exact_arc()?;
        Ok(arc.len().clone())
    }

    pub fn measure_monte_carlo(&self, samples: u64, seed: u64) -> Result<MeasureEstimate> {
        if samples == 0 {
            return Err(Error::Validation("Monte Carlo sample count must be >= 1".into()));
        }
        let mut rng = SplitMix64::new(seed);
        let mut hits = 0u64;
        for _ in 0..samples {
            let y = self.system.sample_invariant(&mut rng);
            if self.contains(y)? {
                hits += 1;
            }
        }
        let p = hits as f64 / samples as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        Ok(MeasureEstimate { value: p, std_error: se, exact: false })
    }

    /// Ball period `tau = min{k >= 1 : T^k(ball) ∩ ball != emptyset}` by
    /// exact arc iteration. The forward image of an arc doubles in length
    /// each step, so by `k ~ n + log2(1/(2 eps))` it covers the circle and
    /// the scan is guaranteed to stop.
    pub fn period_exact(&self) -> Result<usize> {
        let ball = self.exact_arc()?;
        let mut image = ball.clone();
        for k in 1.. {
            image = image.double();
            if image.intersects(&ball) {
                return Ok(k);
            }
        }
        unreachable!("image reaches the full circle")
    }

    /// Sampled period bounds: the smallest observed return of sampled ball
    /// points is an upper bound for `tau`; nothing certifies a lower bound
    /// from finitely many samples, so `lower` is 1 and `certified` false.
    pub fn period_sampled(&self, samples: u64, seed: u64, cap: u64) -> Result<PeriodBounds> {
        if samples == 0 || cap == 0 {
            return Err(Error::Validation("need samples >= 1 and cap >= 1".into()));
        }
        let mut rng = SplitMix64::new(seed);
        let mut upper = u64::MAX;
        let max_rejects = 1_000_000u64;
        for _ in 0..samples {
            // rejection-sample a point of the ball
            let mut y = None;
            for _ in 0..max_rejects {
                let cand = self.system.sample_invariant(&mut rng);
                if self.contains(cand)? {
                    y = Some(cand);
                    break;
                }
            }
            let Some(mut point) = y else {
                return Err(Error::Budget(format!(
                    "no ball point found in {max_rejects} rejection draws"
                )));
            };
            for k in 1..=cap.min(upper) {
                point = match self.system.map(point) {
                    Ok(v) => v,
                    Err(_) => break,
                };
                if self.contains(point)? {
                    upper = upper.min(k);
                    break;
                }
            }
        }
        if upper == u64::MAX {
            return Err(Error::RecurrenceOverflow(cap));
        }
        Ok(PeriodBounds { lower: 1, upper: upper as usize, certified: false })
    }
}

/// First return of the orbit to its own Bowen ball:
/// `R = min{j in [1, cap] : d(T^{j+k} x, T^k x) < eps for all k < n}`,
/// scanned over a sliding window against the fixed template of the first
/// `n` orbit points. `None` marks cap overflow.
pub fn recurrence_time(
    system: MetricSystem,
    orbit: impl Fn(usize) -> f64,
    eps: f64,
    n: usize,
    cap: u64,
) -> Result<Option<u64>> {
    if cap == 0 || n == 0 {
        return Err(Error::Validation("need cap >= 1 and n >= 1".into()));
    }
    let template: Vec<f64> = (0..n).map(&orbit).collect();
    for j in 1..=cap {
        let mut hit = true;
        for (k, t) in template.iter().enumerate() {
            if system.distance(orbit(j as usize + k), *t) >= eps {
                hit = false;
                break;
            }
        }
        if hit {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// Recurrence time along a sampled Lebesgue orbit.
pub fn recurrence_time_orbit(
    orbit: &LebesgueOrbit,
    system: MetricSystem,
    eps: f64,
    n: usize,
    cap: u64,
) -> Result<Option<u64>> {
    if (cap as usize + n) > orbit.horizon() {
        return Err(Error::Validation(format!(
            "orbit horizon {} too short for cap {cap} + n {n}",
            orbit.horizon()
        )));
    }
    recurrence_time(system, |j| orbit.point(j), eps, n, cap)
}

/// Brin-Katok and recurrence-rate entropy estimates:
/// `(1/n) |log mu(B)|` and `(1/n) log R` (natural logs).
pub fn entropy_estimates(
    ball: &BowenBall,
    measure: MeasureEstimate,
    orbit: impl Fn(usize) -> f64,
    cap: u64,
) -> Result<EntropyEstimates> {
    if !(measure.value > 0.0) {
        return Err(Error::Validation("ball measure estimate is zero".into()));
    }
    let n = ball.len() as f64;
    let brin_katok = measure.value.ln().abs() / n;
    let r = recurrence_time(ball.system(), orbit, ball.eps(), ball.len(), cap)?
        .ok_or(Error::RecurrenceOverflow(cap))?;
    Ok(EntropyEstimates { brin_katok, varandas: (r as f64).ln() / n, recurrence: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn membership_examples() {
        let ball = BowenBall::new(MetricSystem::doubling(), 0.0, 0.1, 3).unwrap();
        assert!(ball.contains(0.01).unwrap()); // distances 0.01, 0.02, 0.04
        assert!(!ball.contains(0.03).unwrap()); // 0.12 at k = 2
        assert!(ball.contains(0.0).unwrap()); // center
    }

    #[test]
    fn exact_measure_is_scaled_arc() {
        let ball = BowenBall::new(MetricSystem::doubling(), 0.3, 0.1, 1).unwrap();
        assert_abs_diff_eq!(rat_to_f64(&ball.measure_exact().unwrap()), 0.2, epsilon = 1e-15);
        let ball10 = BowenBall::new(MetricSystem::doubling(), 0.3, 0.1, 10).unwrap();
        assert_abs_diff_eq!(
            rat_to_f64(&ball10.measure_exact().unwrap()),
            0.2 / 512.0,
            epsilon = 1e-18
        );
    }

    #[test]
    fn exact_backend_gates() {
        let wide = BowenBall::new(MetricSystem::doubling(), 0.5, 0.3, 4).unwrap();
        assert!(wide.exact_arc().is_err());
        let n1 = BowenBall::new(MetricSystem::doubling(), 0.5, 0.4, 1).unwrap();
        assert!(n1.exact_arc().is_ok()); // single constraint: plain arc
        let tent = BowenBall::new(MetricSystem::tent(), 0.5, 0.1, 4).unwrap();
        assert!(tent.exact_arc().is_err());
    }

    #[test]
    fn exact_measure_agrees_with_dense_grid_count() {
        let ball = BowenBall::new(MetricSystem::doubling(), 0.3, 0.1, 6).unwrap();
        let grid = 1 << 20;
        let inside = (0..grid)
            .filter(|&i| ball.contains(i as f64 / grid as f64).unwrap())
            .count();
        let exact = rat_to_f64(&ball.measure_exact().unwrap());
        assert_abs_diff_eq!(inside as f64 / grid as f64, exact, epsilon = 4.0 / grid as f64);
    }

    #[test]
    fn nesting_in_n_and_eps() {
        let mut rng = SplitMix64::new(77);
        let sys = MetricSystem::doubling();
        for _ in 0..200 {
            let x = rng.next_f64();
            let y = rng.next_f64();
            let b_n = BowenBall::new(sys, x, 0.1, 6).unwrap();
            let b_n1 = BowenBall::new(sys, x, 0.1, 7).unwrap();
            let b_wide = BowenBall::new(sys, x, 0.2, 6).unwrap();
            if b_n1.contains(y).unwrap() {
                assert!(b_n.contains(y).unwrap());
            }
            if b_n.contains(y).unwrap() {
                assert!(b_wide.contains(y).unwrap());
            }
        }
    }

    #[test]
    fn period_of_fixed_point_center() {
        // x = 0 is the fixed point: T(arc) contains the arc immediately.
        let ball = BowenBall::new(MetricSystem::doubling(), 0.0, 0.1, 8).unwrap();
        assert_eq!(ball.period_exact().unwrap(), 1);
        // n = 1, eps = 0.4 at the fixed point: T(arc) overlaps arc
        let wide = BowenBall::new(MetricSystem::doubling(), 0.0, 0.4, 1).unwrap();
        assert_eq!(wide.period_exact().unwrap(), 1);
    }

    #[test]
    fn period_of_period_two_center() {
        let third = Rat::new(1.into(), 3.into());
        let ball =
            BowenBall::with_exact_center(MetricSystem::doubling(), third, 0.01, 8).unwrap();
        assert_eq!(ball.period_exact().unwrap(), 2);
    }

    #[test]
    fn period_covering_bound() {
        // 2^k * 2 eps 2^{-(n-1)} >= 1 forces intersection: tau <= 12 for
        // eps = 0.1, n = 10.
        let mut rng = SplitMix64::new(3);
        for _ in 0..25 {
            let ball = BowenBall::new(MetricSystem::doubling(), rng.next_f64(), 0.1, 10).unwrap();
            let tau = ball.period_exact().unwrap();
            assert!((1..=12).contains(&tau), "tau = {tau}");
        }
    }

    #[test]
    fn sampled_period_upper_bounds_exact() {
        let ball = BowenBall::new(MetricSystem::doubling(), 0.37, 0.1, 6).unwrap();
        let exact = ball.period_exact().unwrap();
        let sampled = ball.period_sampled(64, 5, 1 << 16).unwrap();
        assert!(!sampled.certified);
        assert_eq!(sampled.lower, 1);
        assert!(sampled.upper >= exact, "sampled {} < exact {exact}", sampled.upper);
    }

    #[test]
    fn recurrence_of_periodic_center() {
        // x = 1/3 has T^2 x = x: the orbit returns to its ball at j = 2.
        let sys = MetricSystem::doubling();
        let orbit = sys.orbit(1.0 / 3.0, 40).unwrap();
        let r = recurrence_time(sys, |j| orbit[j], 0.05, 12, 16).unwrap();
        assert_eq!(r, Some(2));
    }

    #[test]
    fn recurrence_overflow_is_reported() {
        let sys = MetricSystem::doubling();
        let orbit = sys.orbit(0.37, 40).unwrap();
        // cap 3 is below the true return for a generic point at eps = 1e-4
        let r = recurrence_time(sys, |j| orbit[j], 1e-4, 4, 3).unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn recurrence_matches_naive_rescan() {
        let sys = MetricSystem::doubling();
        let mut rng = SplitMix64::new(12);
        let horizon = 1 << 16;
        let orbit = LebesgueOrbit::sample(sys, &mut rng, horizon + 16).unwrap();
        let (eps, n, cap) = (0.05, 12usize, horizon as u64);
        let fast = recurrence_time_orbit(&orbit, sys, eps, n, cap).unwrap();

        // naive double loop over materialized points
        let pts: Vec<f64> = (0..=(horizon + 15)).map(|j| orbit.point(j)).collect();
        let mut naive = None;
        'outer: for j in 1..=cap as usize {
            for k in 0..n {
                if sys.distance(pts[j + k], pts[k]) >= eps {
                    continue 'outer;
                }
            }
            naive = Some(j as u64);
            break;
        }
        assert_eq!(fast, naive);
        assert!(fast.is_some(), "seed should return within 2^16");
    }

    #[test]
    fn recurrence_dominates_ball_period() {
        // the center's own return is a return of the set: R >= tau
        let sys = MetricSystem::doubling();
        let mut rng = SplitMix64::new(41);
        for _ in 0..20 {
            let ball = BowenBall::new(sys, rng.next_f64(), 0.1, 6).unwrap();
            let tau = ball.period_exact().unwrap();
            let orbit = sys.orbit(ball.center(), 64).unwrap();
            if let Some(r) =
                recurrence_time(sys, |j| orbit[j.min(63)], 0.1, 6, 40).unwrap()
            {
                assert!(r as usize >= tau, "R = {r} < tau = {tau}");
            }
        }
    }

    #[test]
    fn entropy_analytic_values() {
        // exact doubling measure: brin_katok(n) = ((n-1) ln 2 + ln 5)/n at eps = 0.1
        let sys = MetricSystem::doubling();
        for (n, expect) in [(16usize, 0.750416), (32, 0.721781)] {
            let ball = BowenBall::new(sys, 0.37, 0.1, n).unwrap();
            let mu = rat_to_f64(&ball.measure_exact().unwrap());
            let bk = mu.ln().abs() / n as f64;
            assert_abs_diff_eq!(bk, expect, epsilon = 1e-5);
        }
    }
}
