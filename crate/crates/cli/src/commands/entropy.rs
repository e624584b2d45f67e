//! `entropy`: Brin-Katok and recurrence-rate entropy estimators over an
//! n-grid of Bowen balls with exact measures (doubling map).

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use reclab_core::bowen::{recurrence_time_orbit, BowenBall};
use reclab_core::rational::rat_to_f64;
use reclab_core::rng::SplitMix64;
use reclab_core::systems::{LebesgueOrbit, MetricSystem};
use reclab_core::Error as CoreError;

use crate::args::{parse_grid, EntropyArgs};
use crate::commands::{common_argv, Ctx};
use crate::out::{fmt_f64, fmt_opt, Artifacts};
use crate::CliResult;

#[derive(Debug, Serialize)]
struct PerN {
    n: usize,
    brin_katok: f64,
    median_varandas: Option<f64>,
    overflows: usize,
}

#[derive(Debug, Serialize)]
struct Summary {
    schema_version: u32,
    command: String,
    eps: f64,
    centers: u64,
    cap: u64,
    /// ln 2, the entropy of the doubling map, for reference.
    h_reference: f64,
    master_seed: u64,
    per_n: Vec<PerN>,
}

struct CenterRow {
    center: f64,
    recurrence: Option<u64>,
}

pub fn run(ctx: Ctx<'_>, args: &EntropyArgs) -> CliResult<()> {
    if args.system != "doubling" {
        return Err(CoreError::Validation(
            "entropy needs exact ball measures: --system doubling".into(),
        )
        .into());
    }
    let grid = parse_grid(&args.n)?;
    let system = MetricSystem::doubling();

    let mut artifacts = Artifacts::new(&ctx.common)?;
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for &n in &grid {
        // exact Brin-Katok value is center-free for the doubling map
        let mu = rat_to_f64(
            &BowenBall::new(system, 0.25, args.eps, n)?.measure_exact()?,
        );
        let brin_katok = mu.ln().abs() / n as f64;

        let centers: Vec<reclab_core::Result<CenterRow>> = (0..args.centers)
            .into_par_iter()
            .map(|i| {
                let mut rng = SplitMix64::for_trial(ctx.common.seed, i);
                let horizon = args.cap as usize + n + 1;
                let orbit = LebesgueOrbit::sample(system, &mut rng, horizon)?;
                let r = recurrence_time_orbit(&orbit, system, args.eps, n, args.cap)?;
                Ok(CenterRow { center: orbit.point(0), recurrence: r })
            })
            .collect();

        let mut varandas_values = Vec::new();
        let mut overflows = 0usize;
        for c in centers {
            let c = c?;
            let varandas = c.recurrence.map(|r| (r as f64).ln() / n as f64);
            match varandas {
                Some(v) => varandas_values.push(v),
                None => overflows += 1,
            }
            rows.push(vec![
                n.to_string(),
                fmt_f64(c.center),
                fmt_f64(mu),
                c.recurrence.map(|r| r.to_string()).unwrap_or_default(),
                fmt_f64(brin_katok),
                fmt_opt(varandas),
            ]);
        }
        varandas_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        per_n.push(PerN {
            n,
            brin_katok,
            median_varandas: (!varandas_values.is_empty())
                .then(|| varandas_values[varandas_values.len() / 2]),
            overflows,
        });
    }

    artifacts.write_csv(
        &["n", "center", "mu_ball", "recurrence", "brin_katok", "varandas"],
        &rows,
    )?;
    artifacts.write_summary(&Summary {
        schema_version: crate::out::SCHEMA_VERSION,
        command: ctx.command.to_string(),
        eps: args.eps,
        centers: args.centers,
        cap: args.cap,
        h_reference: std::f64::consts::LN_2,
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
        "--cap".into(),
        args.cap.to_string(),
    ];
    argv.extend(common_argv(&ctx));
    let resolved = json!({
        "system": args.system, "eps": args.eps, "n_grid": grid,
        "centers": args.centers, "cap": args.cap,
    });
    artifacts.write_manifest(ctx.command, argv, ctx.invoked_argv, resolved)
}
