//! `poisson-check`: empirical and exact hitting-count laws against the
//! Poisson law over an n-grid, for cylinder or Bowen-ball targets.

use serde::Serialize;
use serde_json::json;

use reclab_core::harness::{
    compare_to_poisson, run_experiment, ExperimentConfig, ExperimentReport, PoissonSummary,
    Target,
};
use reclab_core::stein::chen_stein_bound;
use reclab_core::symbolic::{cylinder_measure, period, short_return_prob, CylinderSet};
use reclab_core::systems::{parse_word, MarkovShift};
use reclab_core::bowen::BowenBall;
use reclab_core::rational::{rat_from_str, rat_to_f64};
use reclab_core::Error as CoreError;

use crate::args::{is_metric, parse_grid, parse_metric, parse_shift, PoissonCheckArgs};
use crate::commands::{common_argv, Ctx};
use crate::out::{fmt_f64, fmt_opt, Artifacts};
use crate::{CliError, CliResult};

#[derive(Debug, Serialize)]
struct Summary {
    schema_version: u32,
    command: String,
    system: String,
    t: f64,
    trials: u64,
    master_seed: u64,
    rows: Vec<PoissonSummary>,
}

pub fn run(ctx: Ctx<'_>, args: &PoissonCheckArgs) -> CliResult<()> {
    let t = args.t.or(ctx.file.t).unwrap_or(1.0);
    if !(t > 0.0) {
        return Err(CoreError::Validation("t must be positive".into()).into());
    }
    let trials = args.trials.or(ctx.file.trials).unwrap_or(10_000);
    // A fixed --word pins the target; the grid then collapses to its length.
    let grid = match (&args.word, is_metric(&args.system)) {
        (Some(word), false) => {
            vec![word.split(',').next().unwrap_or_default().trim().len()]
        }
        _ => parse_grid(&args.n)?,
    };

    let mut artifacts = Artifacts::new(&ctx.common)?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut summary_rows = Vec::new();

    for &n in &grid {
        let (report, chen) = match () {
            _ if is_metric(&args.system) => run_ball(args, n, t, trials, &ctx)?,
            _ => run_cylinder(args, n, t, trials, &ctx)?,
        };
        let reference = report.exact.as_ref().unwrap_or(&report.poisson);
        for k in 0..=report.empirical.cap() {
            let p_ref = reference.p(k);
            let z = if p_ref > 0.0 && p_ref < 1.0 {
                let se = (p_ref * (1.0 - p_ref) / trials as f64).sqrt();
                (report.empirical.p(k) - p_ref) / se
            } else {
                0.0
            };
            rows.push(vec![
                n.to_string(),
                k.to_string(),
                fmt_f64(report.empirical.p(k)),
                fmt_opt(report.exact.as_ref().map(|e| e.p(k))),
                fmt_f64(report.poisson.p(k)),
                fmt_f64(z),
            ]);
        }
        summary_rows.push(compare_to_poisson(n, &report, chen.as_ref()));
    }

    artifacts.write_csv(&["n", "k", "emp", "exact", "poisson", "z"], &rows)?;
    artifacts.write_summary(&Summary {
        schema_version: crate::out::SCHEMA_VERSION,
        command: ctx.command.to_string(),
        system: args.system.clone(),
        t,
        trials,
        master_seed: ctx.common.seed,
        rows: summary_rows,
    })?;

    let mut argv = vec![
        ctx.command.to_string(),
        "--system".into(),
        args.system.clone(),
        "--n".into(),
        args.n.clone(),
        "--t".into(),
        t.to_string(),
        "--trials".into(),
        trials.to_string(),
    ];
    for (flag, val) in [
        ("--matrix", &args.matrix),
        ("--word", &args.word),
        ("--word-family", &args.word_family),
        ("--center", &args.center),
    ] {
        if let Some(v) = val {
            argv.extend([flag.to_string(), v.clone()]);
        }
    }
    if let Some(eps) = args.eps {
        argv.extend(["--eps".into(), eps.to_string()]);
    }
    if let Some(cap) = args.cap {
        argv.extend(["--cap".into(), cap.to_string()]);
    }
    argv.extend(common_argv(&ctx));
    let resolved = json!({
        "system": args.system, "t": t, "trials": trials, "n_grid": grid,
        "word": args.word, "word_family": args.word_family,
        "eps": args.eps, "center": args.center, "cap": args.cap,
    });
    artifacts.write_manifest(ctx.command, argv, ctx.invoked_argv, resolved)
}

/// The non-self-overlapping word `0^{n-1} 1`.
fn zeros_one(n: usize) -> Vec<u8> {
    let mut w = vec![0u8; n];
    w[n - 1] = 1;
    w
}

fn cylinder_target(
    args: &PoissonCheckArgs,
    shift: &MarkovShift,
    n: usize,
) -> CliResult<CylinderSet> {
    if let Some(word) = &args.word {
        let words = word
            .split(',')
            .map(|w| parse_word(w.trim(), shift.alphabet_size()))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(CylinderSet::new(shift, words)?);
    }
    match args.word_family.as_deref() {
        None | Some("zeros-one") => Ok(CylinderSet::new(shift, vec![zeros_one(n)])?),
        Some(other) => Err(CliError::Config(format!(
            "unknown word family {other:?} (only zeros-one is built in)"
        ))),
    }
}

fn run_cylinder(
    args: &PoissonCheckArgs,
    n: usize,
    t: f64,
    trials: u64,
    ctx: &Ctx<'_>,
) -> CliResult<(ExperimentReport, Option<reclab_core::stein::ChenSteinBound>)> {
    let shift = parse_shift(&args.system, args.matrix.as_deref())?;
    let set = cylinder_target(args, &shift, n)?;
    let mut config = ExperimentConfig::new(
        Target::Cylinder { shift: shift.clone(), set: set.clone() },
        t,
        trials,
        ctx.common.seed,
    );
    config.cap = args.cap;
    let report = run_experiment(&config)?;

    // Chen-Stein bound with the chain's uniform mixing upper bound; both
    // side functions are exact for the chain.
    let mu = rat_to_f64(&cylinder_measure(&shift, &set));
    let tau = period(&shift, &set);
    let chen = if report.m as usize > tau + 1 {
        Some(chen_stein_bound(
            mu,
            tau,
            |d| shift.alpha_upper(d),
            |d| {
                short_return_prob(&shift, &set, d as u64)
                    .map(|p| rat_to_f64(&p))
                    .unwrap_or(1.0)
            },
            report.m,
        )?)
    } else {
        None
    };
    Ok((report, chen))
}

fn run_ball(
    args: &PoissonCheckArgs,
    n: usize,
    t: f64,
    trials: u64,
    ctx: &Ctx<'_>,
) -> CliResult<(ExperimentReport, Option<reclab_core::stein::ChenSteinBound>)> {
    let system = parse_metric(&args.system)?;
    let eps = args.eps.ok_or_else(|| {
        CliError::Config("ball targets need --eps".into())
    })?;
    let center = args.center.as_deref().unwrap_or("random");
    let target = if center == "random" {
        Target::BallResampled { system, eps, n }
    } else {
        let c = rat_from_str(center)?;
        Target::Ball { ball: BowenBall::with_exact_center(system, c, eps, n)? }
    };
    let config = ExperimentConfig::new(target, t, trials, ctx.common.seed);
    Ok((run_experiment(&config)?, None))
}
