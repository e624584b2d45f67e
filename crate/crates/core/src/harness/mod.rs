//! Seeded Monte Carlo experiment engine.
//!
//! An experiment samples points from the invariant measure, counts visits
//! `W = sum_{j=1}^m chi_A(T^j x)` to the target, and compares the
//! empirical law of `W` against the Poisson law and (for cylinder targets)
//! the exact transfer-DP law.
//!
//! Reproducibility contract: trial `i` draws from
//! `SplitMix64::for_trial(master_seed, i)` and nothing else, trials are
//! merged by integer count addition in fixed chunk order, and every
//! derived statistic is a function of the merged counts. Reports are
//! therefore bit-identical for any worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{tv_distance, CountDistribution};
use crate::error::{Error, Result};
use crate::rational::rat_to_f64;
use crate::rng::SplitMix64;
use crate::stein::{poisson_law, ChenSteinBound};
use crate::symbolic::{cylinder_measure, exact_hit_distribution, hit_distribution_f64, CylinderSet};
use crate::systems::{LebesgueOrbit, MapKind, MarkovShift, MetricSystem};
use crate::bowen::BowenBall;

/// Trials per parallel work unit; fixed so the merge order never depends
/// on the worker count.
const CHUNK: u64 = 512;

/// What the orbit is counted against.
#[derive(Debug, Clone)]
pub enum Target {
    /// A cylinder set of a Markov shift.
    Cylinder { shift: MarkovShift, set: CylinderSet },
    /// A Bowen ball with a fixed center.
    Ball { ball: BowenBall },
    /// A Bowen ball whose center is freshly sampled each trial
    /// (quenched statistics over centers). Exact-measure backend required.
    BallResampled { system: MetricSystem, eps: f64, n: usize },
}

/// A fully specified experiment; the report is a pure function of this.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub target: Target,
    /// Kac parameter: the orbit length is `m = round(t / mu(target))`.
    pub t: f64,
    pub trials: u64,
    pub master_seed: u64,
    /// Count cap; defaults to `max(32, ceil(8 t))`.
    pub cap: Option<usize>,
    /// Monte Carlo sample count for ball measures without exact backend.
    pub measure_samples: u64,
}

impl ExperimentConfig {
    pub fn new(target: Target, t: f64, trials: u64, master_seed: u64) -> Self {
        Self { target, t, trials, master_seed, cap: None, measure_samples: 1_000_000 }
    }

    fn effective_cap(&self) -> usize {
        self.cap.unwrap_or_else(|| 32.max((8.0 * self.t).ceil() as usize))
    }

    fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) {
            return Err(Error::Validation(format!("t = {} must be > 0", self.t)));
        }
        if self.trials == 0 {
            return Err(Error::Validation("trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub empirical: CountDistribution,
    /// Exact law where an oracle exists (cylinder targets).
    pub exact: Option<CountDistribution>,
    pub poisson: CountDistribution,
    pub tv_emp_poisson: f64,
    pub tv_exact_poisson: Option<f64>,
    pub tv_emp_exact: Option<f64>,
    /// Per-count standard errors of the empirical frequencies.
    pub std_errors: Vec<f64>,
    /// Largest |z| of empirical cells against the reference law
    /// (exact when available, Poisson otherwise).
    pub max_z: f64,
    pub mu_hat: f64,
    pub m: u64,
    /// Realized Kac parameter `m * mu_hat`.
    pub t_hat: f64,
    pub requested_t: f64,
    pub trials: u64,
    pub master_seed: u64,
    /// Centers resampled per trial?
    pub quenched: bool,
    /// Wall-clock diagnostics; excluded from serialized artifacts so that
    /// reruns of a manifest stay byte-identical.
    #[serde(skip)]
    pub wall_ms: u128,
}

/// Count visits of `T^j x` for `j = 1..=m` (the sum starts at j = 1).
pub fn count_visits<P>(
    orbit: impl Iterator<Item = P>,
    membership: impl Fn(&P) -> bool,
    m: u64,
) -> u64 {
    orbit.skip(1).take(m as usize).filter(|p| membership(p)).count() as u64
}

fn histogram_merge(chunks: Vec<Vec<u64>>) -> Vec<u64> {
    let mut total = vec![0u64; chunks.first().map_or(0, Vec::len)];
    for c in chunks {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    total
}

/// Run the experiment described by `config` on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = std::time::Instant::now();
    let cap = config.effective_cap();
    let lanes = cap + 2; // counts 0..=cap plus overflow

    let (counts, mu_hat, m, quenched, exact) = match &config.target {
        Target::Cylinder { shift, set } => {
            let mu = rat_to_f64(&cylinder_measure(shift, set));
            if mu <= 0.0 {
                return Err(Error::UndefinedConditional);
            }
            let m = kac_length(config.t, mu)?;
            let counts = run_cylinder_trials(config, shift, set, m, lanes)?;
            let exact = oracle_law(shift, set, m, cap)?;
            (counts, mu, m, false, Some(exact))
        }
        Target::Ball { ball } => {
            let mu = ball_mu(ball, config)?;
            let m = kac_length(config.t, mu)?;
            let counts = run_ball_trials(config, ball, m, lanes)?;
            (counts, mu, m, false, None)
        }
        Target::BallResampled { system, eps, n } => {
            let counts = run_resampled_ball_trials(config, *system, *eps, *n, lanes)?;
            // mu and m vary per center; report the fixed-center values of a
            // reference center for metadata, namely the arc length
            let mu = BowenBall::new(*system, 0.0, *eps, *n)?
                .measure_exact()
                .map(|r| rat_to_f64(&r))?;
            let m = kac_length(config.t, mu)?;
            (counts, mu, m, true, None)
        }
    };

    let overflow = counts[lanes - 1];
    let empirical = CountDistribution::from_counts(&counts[..lanes - 1], overflow)?;
    let t_hat = m as f64 * mu_hat;
    let poisson = poisson_law(t_hat, cap)?;

    let trials_f = config.trials as f64;
    let std_errors: Vec<f64> = empirical
        .probs()
        .iter()
        .map(|&p| (p * (1.0 - p) / trials_f).sqrt())
        .collect();

    let reference = exact.as_ref().unwrap_or(&poisson);
    let mut max_z: f64 = 0.0;
    for k in 0..=cap {
        let p_ref = reference.p(k);
        if p_ref > 0.0 && p_ref < 1.0 {
            let se = (p_ref * (1.0 - p_ref) / trials_f).sqrt();
            max_z = max_z.max((empirical.p(k) - p_ref).abs() / se);
        }
    }

    let tv_emp_poisson = tv_distance(&empirical, &poisson)?;
    let (tv_exact_poisson, tv_emp_exact) = match &exact {
        Some(ex) => (Some(tv_distance(ex, &poisson)?), Some(tv_distance(&empirical, ex)?)),
        None => (None, None),
    };

    Ok(ExperimentReport {
        empirical,
        exact,
        poisson,
        tv_emp_poisson,
        tv_exact_poisson,
        tv_emp_exact,
        std_errors,
        max_z,
        mu_hat,
        m,
        t_hat,
        requested_t: config.t,
        trials: config.trials,
        master_seed: config.master_seed,
        quenched,
        wall_ms: start.elapsed().as_millis(),
    })
}

fn kac_length(t: f64, mu: f64) -> Result<u64> {
    if mu <= 0.0 {
        return Err(Error::UndefinedConditional);
    }
    Ok(((t / mu).round() as u64).max(1))
}

fn ball_mu(ball: &BowenBall, config: &ExperimentConfig) -> Result<f64> {
    if ball.has_exact_backend() {
        Ok(rat_to_f64(&ball.measure_exact()?))
    } else {
        let est = ball.measure_monte_carlo(
            config.measure_samples,
            crate::rng::mix(config.master_seed, u64::MAX),
        )?;
        if est.value <= 0.0 {
            return Err(Error::UndefinedConditional);
        }
        Ok(est.value)
    }
}

/// The exact oracle law: rational DP for small instances, float DP beyond.
fn oracle_law(
    shift: &MarkovShift,
    set: &CylinderSet,
    m: u64,
    cap: usize,
) -> Result<CountDistribution> {
    let small = (shift.alphabet_size() as u128)
        .pow(set.word_len().saturating_sub(1) as u32)
        .saturating_mul(m as u128)
        < 1 << 16;
    if small {
        Ok(exact_hit_distribution(shift, set, m, cap)?.to_float())
    } else {
        hit_distribution_f64(shift, set, m, cap)
    }
}

fn parallel_chunks(
    trials: u64,
    lanes: usize,
    body: impl Fn(u64, &mut Vec<u64>) -> Result<()> + Sync,
) -> Result<Vec<u64>> {
    let n_chunks = trials.div_ceil(CHUNK);
    let chunks: Vec<Result<Vec<u64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![0u64; lanes];
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(trials);
            for trial in lo..hi {
                body(trial, &mut hist)?;
            }
            Ok(hist)
        })
        .collect();
    let mut ok = Vec::with_capacity(n_chunks as usize);
    for c in chunks {
        ok.push(c?);
    }
    Ok(histogram_merge(ok))
}

fn record(hist: &mut [u64], w: u64) {
    let lanes = hist.len();
    let lane = (w as usize).min(lanes - 1);
    hist[lane] += 1;
}

fn run_cylinder_trials(
    config: &ExperimentConfig,
    shift: &MarkovShift,
    set: &CylinderSet,
    m: u64,
    lanes: usize,
) -> Result<Vec<u64>> {
    let n = set.word_len();
    let word_len = m as usize + n; // symbols x_0 .. x_{m+n-1}
    parallel_chunks(config.trials, lanes, |trial, hist| {
        let mut rng = SplitMix64::for_trial(config.master_seed, trial);
        let word = shift.sample_stationary(&mut rng, word_len);
        let mut w = 0u64;
        for j in 1..=m as usize {
            if set.contains_word(&word[j..j + n]) {
                w += 1;
            }
        }
        record(hist, w);
        Ok(())
    })
}

fn run_ball_trials(
    config: &ExperimentConfig,
    ball: &BowenBall,
    m: u64,
    lanes: usize,
) -> Result<Vec<u64>> {
    let system = ball.system();
    let n = ball.len();
    // Fast path: the ball is an arc, membership is one distance comparison.
    let arc_radius =
        if ball.has_exact_backend() { Some(ball.eps() / (1u64 << (n - 1)) as f64) } else { None };
    let center = ball.center();

    parallel_chunks(config.trials, lanes, |trial, hist| {
        let mut rng = SplitMix64::for_trial(config.master_seed, trial);
        let w = match system.kind {
            MapKind::Doubling | MapKind::Tent => {
                let horizon = m as usize + n + 1;
                let orbit = LebesgueOrbit::sample(system, &mut rng, horizon)?;
                count_ball_visits(ball, arc_radius, center, |j| orbit.point(j), m, n)
            }
            MapKind::Gauss => {
                // f64 pseudo-orbit; Gauss orbits of sampled irrationals stay
                // in the domain for all practical horizons
                let x = system.sample_invariant(&mut rng);
                let mut pts = Vec::with_capacity(m as usize + n + 1);
                pts.push(x);
                for _ in 0..(m as usize + n) {
                    match system.map(*pts.last().unwrap()) {
                        Ok(v) => pts.push(v),
                        Err(_) => break,
                    }
                }
                count_ball_visits(ball, None, center, |j| pts[j.min(pts.len() - 1)], m, n)
            }
        };
        record(hist, w);
        Ok(())
    })
}

fn count_ball_visits(
    ball: &BowenBall,
    arc_radius: Option<f64>,
    center: f64,
    orbit: impl Fn(usize) -> f64,
    m: u64,
    n: usize,
) -> u64 {
    let system = ball.system();
    let mut w = 0u64;
    match arc_radius {
        Some(r) => {
            for j in 1..=m as usize {
                if system.distance(orbit(j), center) < r {
                    w += 1;
                }
            }
        }
        None => {
            // definitional membership against the center orbit template
            let template: Vec<f64> =
                system.orbit(center, n).unwrap_or_else(|_| vec![center; n]);
            for j in 1..=m as usize {
                let inside = (0..n)
                    .all(|k| system.distance(orbit(j + k), template[k]) < ball.eps());
                if inside {
                    w += 1;
                }
            }
        }
    }
    w
}

fn run_resampled_ball_trials(
    config: &ExperimentConfig,
    system: MetricSystem,
    eps: f64,
    n: usize,
    lanes: usize,
) -> Result<Vec<u64>> {
    if system.kind != MapKind::Doubling {
        return Err(Error::Validation(
            "resampled centers need the exact doubling backend for per-center measures".into(),
        ));
    }
    parallel_chunks(config.trials, lanes, |trial, hist| {
        let mut rng = SplitMix64::for_trial(config.master_seed, trial);
        let center = rng.next_f64();
        let ball = BowenBall::new(system, center, eps, n)?;
        let mu = rat_to_f64(&ball.measure_exact()?);
        let m = kac_length(config.t, mu)?;
        let horizon = m as usize + n + 1;
        let orbit = LebesgueOrbit::sample(system, &mut rng, horizon)?;
        let r = eps / (1u64 << (n - 1)) as f64;
        let w = count_ball_visits(&ball, Some(r), center, |j| orbit.point(j), m, n);
        record(hist, w);
        Ok(())
    })
}

/// One summary row for tabulated comparisons.
#[derive(Debug, Clone, Serialize)]
pub struct PoissonSummary {
    pub n: usize,
    pub m: u64,
    pub mu_hat: f64,
    pub t_hat: f64,
    pub tv_emp_poisson: f64,
    pub tv_exact_poisson: Option<f64>,
    pub tv_emp_exact: Option<f64>,
    pub max_z: f64,
    pub chen_stein_value: Option<f64>,
}

/// Flatten a report (plus optional Chen-Stein bound) into a summary row.
pub fn compare_to_poisson(
    n: usize,
    report: &ExperimentReport,
    chen_stein: Option<&ChenSteinBound>,
) -> PoissonSummary {
    PoissonSummary {
        n,
        m: report.m,
        mu_hat: report.mu_hat,
        t_hat: report.t_hat,
        tv_emp_poisson: report.tv_emp_poisson,
        tv_exact_poisson: report.tv_exact_poisson,
        tv_emp_exact: report.tv_emp_exact,
        max_z: report.max_z,
        chen_stein_value: chen_stein.map(|b| b.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_visits_starts_at_one() {
        // doubling, x = 1/3, arc of radius 0.01 around 1/3: hits at j = 2, 4
        let sys = MetricSystem::doubling();
        let orbit = sys.orbit(1.0 / 3.0, 5).unwrap();
        let w = count_visits(
            orbit.iter().copied(),
            |&p| sys.distance(p, 1.0 / 3.0) < 0.01,
            4,
        );
        assert_eq!(w, 2);
        // m = 0 counts nothing
        let w0 = count_visits(orbit.iter().copied(), |_| true, 0);
        assert_eq!(w0, 0);
    }

    #[test]
    fn count_visits_on_words() {
        // "011011": count symbol-1 positions among j = 1..=5
        let word = [0u8, 1, 1, 0, 1, 1];
        let w = count_visits(word.iter(), |&&s| s == 1, 5);
        assert_eq!(w, 4);
    }

    #[test]
    fn reports_are_reproducible() {
        let shift = MarkovShift::fair_coin();
        let set = CylinderSet::from_strs(&shift, &["011"]).unwrap();
        let config =
            ExperimentConfig::new(Target::Cylinder { shift, set }, 1.0, 2000, 99);
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn worker_count_does_not_change_reports() {
        let shift = MarkovShift::fair_coin();
        let set = CylinderSet::from_strs(&shift, &["0110"]).unwrap();
        let config =
            ExperimentConfig::new(Target::Cylinder { shift, set }, 1.0, 3000, 1234);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&config))
            .unwrap();
        let eight = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_experiment(&config))
            .unwrap();
        assert_eq!(
            serde_json::to_string(&single).unwrap(),
            serde_json::to_string(&eight).unwrap()
        );
    }

    #[test]
    fn empirical_mean_matches_kac_identity() {
        // E W = m mu(A): 4-sigma gate using the exact variance
        let shift = MarkovShift::fair_coin();
        let set = CylinderSet::from_strs(&shift, &["01"]).unwrap();
        let trials = 20_000u64;
        let config =
            ExperimentConfig::new(Target::Cylinder { shift, set }, 1.0, trials, 2718);
        let report = run_experiment(&config).unwrap();
        let exact = report.exact.as_ref().unwrap();
        assert!(exact.overflow() < 1e-12);
        let sigma_mean = (exact.variance() / trials as f64).sqrt();
        let expect = report.m as f64 * report.mu_hat;
        assert!(
            (report.empirical.mean() - expect).abs() < 4.0 * sigma_mean,
            "mean {} vs {expect} (sigma {sigma_mean})",
            report.empirical.mean()
        );
    }

    #[test]
    fn oracle_gate_on_small_cylinder() {
        let shift = MarkovShift::fair_coin();
        let set = CylinderSet::from_strs(&shift, &["0110"]).unwrap();
        let trials = 100_000u64;
        let config = ExperimentConfig::new(Target::Cylinder { shift, set }, 1.0, trials, 7);
        let report = run_experiment(&config).unwrap();
        let k = report.empirical.cap() as f64;
        let gate = 3.0 * (k / trials as f64).sqrt();
        assert!(report.tv_emp_exact.unwrap() < gate.min(0.01));
    }

    #[test]
    fn ball_target_runs_and_matches_poisson_loosely() {
        let ball = BowenBall::new(MetricSystem::doubling(), 0.37, 0.1, 8).unwrap();
        let config = ExperimentConfig::new(Target::Ball { ball }, 1.0, 4000, 31);
        let report = run_experiment(&config).unwrap();
        assert!(report.exact.is_none());
        assert!(report.tv_emp_poisson < 0.2, "tv = {}", report.tv_emp_poisson);
    }

    #[test]
    fn periodic_center_is_visibly_non_poisson() {
        // x = 1/3 is period-2: counts cluster. The magnitude is not pinned
        // by theory at finite n, so compare against a generic center.
        let third = Rat::new(1.into(), 3.into());
        let periodic = BowenBall::with_exact_center(MetricSystem::doubling(), third, 0.05, 8)
            .unwrap();
        let generic = BowenBall::new(MetricSystem::doubling(), 0.37, 0.05, 8).unwrap();
        let tv_periodic = run_experiment(&ExperimentConfig::new(
            Target::Ball { ball: periodic },
            1.0,
            4000,
            5,
        ))
        .unwrap()
        .tv_emp_poisson;
        let tv_generic = run_experiment(&ExperimentConfig::new(
            Target::Ball { ball: generic },
            1.0,
            4000,
            5,
        ))
        .unwrap()
        .tv_emp_poisson;
        assert!(
            tv_periodic > 3.0 * tv_generic,
            "periodic {tv_periodic} vs generic {tv_generic}"
        );
    }

    use crate::rational::Rat;

    #[test]
    fn resampled_centers_aggregate() {
        let config = ExperimentConfig::new(
            Target::BallResampled { system: MetricSystem::doubling(), eps: 0.1, n: 8 },
            1.0,
            3000,
            11,
        );
        let report = run_experiment(&config).unwrap();
        assert!(report.quenched);
        assert!(report.tv_emp_poisson < 0.25);
    }
}
