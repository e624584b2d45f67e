//! `cluster-count`: how many cylinders a Bowen ball meets, against the
//! exponential reference curve, and Hamming cluster sizes against the
//! binomial bound for shift systems.

use serde::Serialize;
use serde_json::json;

use reclab_core::bowen::{count_intersecting_cylinders, BowenBall};
use reclab_core::rational::rat_from_str;
use reclab_core::symbolic::{hamming_cluster, lambda_bound};
use reclab_core::systems::MetricSystem;

use crate::args::{is_metric, parse_grid, parse_shift, ClusterCountArgs};
use crate::commands::{common_argv, Ctx};
use crate::out::{fmt_f64, Artifacts};
use crate::{CliError, CliResult};

const CLUSTER_BUDGET: usize = 1 << 22;

#[derive(Debug, Serialize)]
struct Summary {
    schema_version: u32,
    command: String,
    system: String,
    mode: String,
    master_seed: u64,
    rows: Vec<serde_json::Value>,
}

pub fn run(ctx: Ctx<'_>, args: &ClusterCountArgs) -> CliResult<()> {
    let grid = parse_grid(&args.n)?;
    let mut artifacts = Artifacts::new(&ctx.common)?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();

    let mode = if is_metric(&args.system) {
        if args.system != "doubling" {
            return Err(CliError::Config(
                "cluster-count on metric systems needs --system doubling".into(),
            ));
        }
        let center = rat_from_str(&args.center)?;
        for &n in &grid {
            let ball = BowenBall::with_exact_center(
                MetricSystem::doubling(),
                center.clone(),
                args.eps,
                n,
            )?;
            let count = count_intersecting_cylinders(&ball, n)?;
            let reference = (args.delta * n as f64).exp();
            rows.push(vec![n.to_string(), count.to_string(), fmt_f64(reference)]);
            json_rows.push(json!({ "n": n, "count": count, "exp_bound": reference }));
        }
        artifacts.write_csv(&["n", "count", "exp_bound"], &rows)?;
        "ball-intersections"
    } else {
        let shift = parse_shift(&args.system, args.matrix.as_deref())?;
        for &n in &grid {
            // alternating center word, admissible in every built-in shift
            let center: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
            let cluster = hamming_cluster(&shift, &center, args.beta, CLUSTER_BUDGET)?;
            let bound = lambda_bound(n, shift.alphabet_size(), args.beta)?;
            rows.push(vec![n.to_string(), cluster.len().to_string(), bound.to_string()]);
            json_rows.push(json!({
                "n": n, "cluster_size": cluster.len(), "lambda_bound": bound.to_string(),
            }));
        }
        artifacts.write_csv(&["n", "cluster_size", "lambda_bound"], &rows)?;
        "hamming-clusters"
    };

    artifacts.write_summary(&Summary {
        schema_version: crate::out::SCHEMA_VERSION,
        command: ctx.command.to_string(),
        system: args.system.clone(),
        mode: mode.to_string(),
        master_seed: ctx.common.seed,
        rows: json_rows,
    })?;

    let mut argv = vec![
        ctx.command.to_string(),
        "--system".into(),
        args.system.clone(),
        "--eps".into(),
        args.eps.to_string(),
        "--center".into(),
        args.center.clone(),
        "--n".into(),
        args.n.clone(),
        "--delta".into(),
        args.delta.to_string(),
        "--beta".into(),
        args.beta.to_string(),
    ];
    if let Some(m) = &args.matrix {
        argv.extend(["--matrix".into(), m.clone()]);
    }
    argv.extend(common_argv(&ctx));
    let resolved = json!({
        "system": args.system, "mode": mode, "eps": args.eps, "center": args.center,
        "n_grid": grid, "delta": args.delta, "beta": args.beta,
    });
    artifacts.write_manifest(ctx.command, argv, ctx.invoked_argv, resolved)
}
