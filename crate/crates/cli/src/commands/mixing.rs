//! `mixing`: exact or bracketed alpha/phi mixing coefficients of a Markov
//! shift over a gap grid.

use serde::Serialize;
use serde_json::json;

use reclab_core::symbolic::{mixing_coefficient, MixingKind};
use reclab_core::Error as CoreError;

use crate::args::{parse_grid, parse_shift, MixingArgs};
use crate::commands::{common_argv, Ctx};
use crate::out::{fmt_f64, Artifacts};
use crate::CliResult;

#[derive(Debug, Serialize)]
struct Row {
    k: usize,
    lower: f64,
    upper: f64,
    exact: bool,
}

#[derive(Debug, Serialize)]
struct Summary {
    schema_version: u32,
    command: String,
    system: String,
    kind: String,
    depth_past: usize,
    depth_future: usize,
    rows: Vec<Row>,
}

pub fn run(ctx: Ctx<'_>, args: &MixingArgs) -> CliResult<()> {
    let kind = match args.kind.as_str() {
        "alpha" => MixingKind::Alpha,
        "phi" => MixingKind::Phi,
        other => {
            return Err(CoreError::Validation(format!(
                "unknown mixing kind {other:?} (want alpha or phi)"
            ))
            .into())
        }
    };
    let shift = parse_shift(&args.system, args.matrix.as_deref())?;
    let grid = parse_grid(&args.k)?;

    let mut artifacts = Artifacts::new(&ctx.common)?;
    let mut csv_rows = Vec::new();
    let mut rows = Vec::new();
    for &k in &grid {
        let b = mixing_coefficient(&shift, args.depth_past, args.depth_future, k, kind)?;
        csv_rows.push(vec![
            k.to_string(),
            fmt_f64(b.lower),
            fmt_f64(b.upper),
            b.exact.to_string(),
        ]);
        rows.push(Row { k, lower: b.lower, upper: b.upper, exact: b.exact });
    }

    artifacts.write_csv(&["k", "lower", "upper", "exact"], &csv_rows)?;
    artifacts.write_summary(&Summary {
        schema_version: crate::out::SCHEMA_VERSION,
        command: ctx.command.to_string(),
        system: args.system.clone(),
        kind: args.kind.clone(),
        depth_past: args.depth_past,
        depth_future: args.depth_future,
        rows,
    })?;

    let mut argv = vec![
        ctx.command.to_string(),
        "--system".into(),
        args.system.clone(),
        "--depth-past".into(),
        args.depth_past.to_string(),
        "--depth-future".into(),
        args.depth_future.to_string(),
        "--k".into(),
        args.k.clone(),
        "--kind".into(),
        args.kind.clone(),
    ];
    if let Some(m) = &args.matrix {
        argv.extend(["--matrix".into(), m.clone()]);
    }
    argv.extend(common_argv(&ctx));
    let resolved = json!({
        "system": args.system, "kind": args.kind, "k_grid": grid,
        "depth_past": args.depth_past, "depth_future": args.depth_future,
    });
    artifacts.write_manifest(ctx.command, argv, ctx.invoked_argv, resolved)
}
