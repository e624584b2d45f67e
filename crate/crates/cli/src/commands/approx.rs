//! `approx-gap`: inner/boundary dyadic approximations of a Bowen ball over
//! a depth grid, with the boundary ratio and the hitting-law gap penalty.

use serde::Serialize;
use serde_json::json;

use reclab_core::bowen::{cylinder_approximation, BowenBall};
use reclab_core::rational::{rat_from_str, rat_to_f64};
use reclab_core::systems::MetricSystem;
use reclab_core::Error as CoreError;

use crate::args::{parse_grid, ApproxGapArgs};
use crate::commands::{common_argv, Ctx};
use crate::out::{fmt_f64, Artifacts};
use crate::CliResult;

#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    depth: usize,
    mu_ball: f64,
    mu_inner: f64,
    mu_boundary: f64,
    theta_hat: f64,
    gap_bound: f64,
    boundary_cells: usize,
}

#[derive(Debug, Serialize)]
struct Summary {
    schema_version: u32,
    command: String,
    eps: f64,
    center: String,
    t: f64,
    rows: Vec<Row>,
}

pub fn run(ctx: Ctx<'_>, args: &ApproxGapArgs) -> CliResult<()> {
    let t = args.t.or(ctx.file.t).unwrap_or(1.0);
    if !(t > 0.0) {
        return Err(CoreError::Validation("t must be positive".into()).into());
    }
    let grid = parse_grid(&args.depth)?;
    let center = rat_from_str(&args.center)?;
    let ball = BowenBall::with_exact_center(
        MetricSystem::doubling(),
        center,
        args.eps,
        args.ball_n,
    )?;

    let mut artifacts = Artifacts::new(&ctx.common)?;
    let mut csv_rows = Vec::new();
    let mut rows = Vec::new();
    for &depth in &grid {
        let approx = cylinder_approximation(&ball, depth)?;
        let row = Row {
            n: args.ball_n,
            depth,
            mu_ball: rat_to_f64(&approx.mu_ball),
            mu_inner: rat_to_f64(&approx.mu_inner),
            mu_boundary: rat_to_f64(&approx.mu_boundary),
            theta_hat: approx.theta_hat(),
            gap_bound: approx.lemma_gap_bound(t),
            boundary_cells: approx.boundary.len(),
        };
        csv_rows.push(vec![
            row.n.to_string(),
            row.depth.to_string(),
            fmt_f64(row.mu_ball),
            fmt_f64(row.mu_inner),
            fmt_f64(row.mu_boundary),
            fmt_f64(row.theta_hat),
            fmt_f64(row.gap_bound),
        ]);
        rows.push(row);
    }

    artifacts.write_csv(
        &["n", "N", "mu_ball", "mu_inner", "mu_boundary", "theta_hat", "lemma13_bound"],
        &csv_rows,
    )?;
    artifacts.write_summary(&Summary {
        schema_version: crate::out::SCHEMA_VERSION,
        command: ctx.command.to_string(),
        eps: args.eps,
        center: args.center.clone(),
        t,
        rows,
    })?;

    let mut argv = vec![
        ctx.command.to_string(),
        "--eps".into(),
        args.eps.to_string(),
        "--ball-n".into(),
        args.ball_n.to_string(),
        "--center".into(),
        args.center.clone(),
        "--depth".into(),
        args.depth.clone(),
        "--t".into(),
        t.to_string(),
    ];
    argv.extend(common_argv(&ctx));
    let resolved = json!({
        "eps": args.eps, "ball_n": args.ball_n, "center": args.center,
        "depth_grid": grid, "t": t,
    });
    artifacts.write_manifest(ctx.command, argv, ctx.invoked_argv, resolved)
}
