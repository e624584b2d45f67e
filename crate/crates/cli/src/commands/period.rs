//! `period-scan`: exact Bowen-ball periods tau(B_{eps,n}(x))/n over
//! Lebesgue-random centers and an n-grid (doubling map only).

use serde::Serialize;
use serde_json::json;

use reclab_core::bowen::BowenBall;
use reclab_core::rng::SplitMix64;
use reclab_core::systems::MetricSystem;
use reclab_core::Error as CoreError;

use crate::args::{parse_grid, PeriodScanArgs};
use crate::commands::{common_argv, Ctx};
use crate::out::{fmt_f64, Artifacts};
use crate::CliResult;

#[derive(Debug, Serialize)]
struct PerN {
    n: usize,
    min_tau: usize,
    max_tau: usize,
    median_ratio: f64,
    /// Covering bound `n + ceil(log2(1/(2 eps)))` on every exact period.
    covering_bound: usize,
}

#[derive(Debug, Serialize)]
struct Summary {
    schema_version: u32,
    command: String,
    eps: f64,
    centers: u64,
    master_seed: u64,
    per_n: Vec<PerN>,
}

pub fn run(ctx: Ctx<'_>, args: &PeriodScanArgs) -> CliResult<()> {
    if args.system != "doubling" {
        return Err(CoreError::Validation(
            "period-scan needs the exact arc backend: --system doubling".into(),
        )
        .into());
    }
    if args.centers == 0 {
        return Err(CoreError::Validation("centers must be >= 1".into()).into());
    }
    let grid = parse_grid(&args.n)?;
    let system = MetricSystem::doubling();
    let slack = (1.0 / (2.0 * args.eps)).log2().ceil() as usize;

    let mut artifacts = Artifacts::new(&ctx.common)?;
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for &n in &grid {
        let mut taus = Vec::with_capacity(args.centers as usize);
        for i in 0..args.centers {
            let mut rng = SplitMix64::for_trial(ctx.common.seed, i);
            let center = rng.next_f64();
            let ball = BowenBall::new(system, center, args.eps, n)?;
            let tau = ball.period_exact()?;
            taus.push(tau);
            rows.push(vec![
                n.to_string(),
                fmt_f64(center),
                tau.to_string(),
                fmt_f64(tau as f64 / n as f64),
            ]);
        }
        let mut sorted = taus.clone();
        sorted.sort_unstable();
        per_n.push(PerN {
            n,
            min_tau: sorted[0],
            max_tau: *sorted.last().unwrap(),
            median_ratio: sorted[sorted.len() / 2] as f64 / n as f64,
            covering_bound: n + slack,
        });
    }

    artifacts.write_csv(&["n", "center", "tau", "tau_over_n"], &rows)?;
    artifacts.write_summary(&Summary {
        schema_version: crate::out::SCHEMA_VERSION,
        command: ctx.command.to_string(),
        eps: args.eps,
        centers: args.centers,
        master_seed: ctx.common.seed,
        per_n,
    })?;

    let mut argv = vec![
        ctx.command.to_string(),
        "--system".into(),
        args.system.clone(),
        "--eps".into(),
        args.eps.to_string(),
        "--n".into(),
        args.n.clone(),
        "--centers".into(),
        args.centers.to_string(),
    ];
    argv.extend(common_argv(&ctx));
    let resolved = json!({
        "system": args.system, "eps": args.eps, "n_grid": grid, "centers": args.centers,
    });
    artifacts.write_manifest(ctx.command, argv, ctx.invoked_argv, resolved)
}
