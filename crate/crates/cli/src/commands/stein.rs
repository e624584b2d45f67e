//! `stein-bound`: the Chen-Stein bound against the exact TV distance to
//! Poisson for cylinder targets over an n-grid.
//!
//! The gap functions fed to the bound are exact for Markov shifts: the
//! alpha bound comes from the chain's uniform coupling estimate (zero for
//! iid) and the short-return probability from the transfer DP.

use serde::Serialize;
use serde_json::json;

use reclab_core::dist::tv_distance;
use reclab_core::rational::rat_to_f64;
use reclab_core::stein::{chen_stein_bound, poisson_law};
use reclab_core::symbolic::{cylinder_measure, period, short_return_prob, CylinderSet};
use reclab_core::Error as CoreError;

use crate::args::{parse_grid, parse_shift, SteinBoundArgs};
use crate::commands::{common_argv, Ctx};
use crate::out::{fmt_f64, Artifacts};
use crate::{CliError, CliResult};

#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    mu: f64,
    tau: usize,
    m: u64,
    delta_star: usize,
    alpha_term: f64,
    delta_term: f64,
    short_return_term: f64,
    factor: f64,
    bound: f64,
    tv_exact_poisson: f64,
    /// TV / bound; the unknown constant C1 makes this a ratio report, not
    /// a domination claim.
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    schema_version: u32,
    command: String,
    system: String,
    t: f64,
    master_seed: u64,
    rows: Vec<Row>,
}

pub fn run(ctx: Ctx<'_>, args: &SteinBoundArgs) -> CliResult<()> {
    let t = args.t.or(ctx.file.t).unwrap_or(1.0);
    if !(t > 0.0) {
        return Err(CoreError::Validation("t must be positive".into()).into());
    }
    if args.word_family != "zeros-one" {
        return Err(CliError::Config(format!(
            "unknown word family {:?} (only zeros-one is built in)",
            args.word_family
        )));
    }
    let shift = parse_shift(&args.system, args.matrix.as_deref())?;
    let grid = parse_grid(&args.n)?;

    let mut artifacts = Artifacts::new(&ctx.common)?;
    let mut csv_rows = Vec::new();
    let mut rows = Vec::new();
    for &n in &grid {
        if n < 2 {
            return Err(CoreError::Validation("word length must be >= 2".into()).into());
        }
        let mut word = vec![0u8; n];
        word[n - 1] = 1;
        let set = CylinderSet::new(&shift, vec![word])?;
        let mu = rat_to_f64(&cylinder_measure(&shift, &set));
        let tau = period(&shift, &set);
        let m = ((t / mu).round() as u64).max(1);
        let bound = chen_stein_bound(
            mu,
            tau,
            |d| shift.alpha_upper(d),
            |d| {
                short_return_prob(&shift, &set, d as u64)
                    .map(|p| rat_to_f64(&p))
                    .unwrap_or(1.0)
            },
            m,
        )?;

        let cap = args.cap.unwrap_or_else(|| 32.max((8.0 * t).ceil() as usize));
        let exact = reclab_core::symbolic::hit_distribution_f64(&shift, &set, m, cap)?;
        let t_hat = m as f64 * mu;
        let tv = tv_distance(&exact, &poisson_law(t_hat, cap)?)?;

        let row = Row {
            n,
            mu,
            tau,
            m,
            delta_star: bound.delta_star,
            alpha_term: bound.alpha_term,
            delta_term: bound.delta_term,
            short_return_term: bound.short_return_term,
            factor: bound.factor,
            bound: bound.value,
            tv_exact_poisson: tv,
            ratio: tv / bound.value,
        };
        csv_rows.push(vec![
            row.n.to_string(),
            fmt_f64(row.mu),
            row.tau.to_string(),
            row.m.to_string(),
            row.delta_star.to_string(),
            fmt_f64(row.alpha_term),
            fmt_f64(row.delta_term),
            fmt_f64(row.short_return_term),
            fmt_f64(row.factor),
            fmt_f64(row.bound),
            fmt_f64(row.tv_exact_poisson),
            fmt_f64(row.ratio),
        ]);
        rows.push(row);
    }

    artifacts.write_csv(
        &[
            "n",
            "mu",
            "tau",
            "m",
            "delta_star",
            "alpha_term",
            "delta_term",
            "short_return_term",
            "factor",
            "bound",
            "tv_exact_poisson",
            "ratio",
        ],
        &csv_rows,
    )?;
    artifacts.write_summary(&Summary {
        schema_version: crate::out::SCHEMA_VERSION,
        command: ctx.command.to_string(),
        system: args.system.clone(),
        t,
        master_seed: ctx.common.seed,
        rows,
    })?;

    let mut argv = vec![
        ctx.command.to_string(),
        "--system".into(),
        args.system.clone(),
        "--word-family".into(),
        args.word_family.clone(),
        "--n".into(),
        args.n.clone(),
        "--t".into(),
        t.to_string(),
    ];
    if let Some(m) = &args.matrix {
        argv.extend(["--matrix".into(), m.clone()]);
    }
    if let Some(cap) = args.cap {
        argv.extend(["--cap".into(), cap.to_string()]);
    }
    argv.extend(common_argv(&ctx));
    let resolved = json!({
        "system": args.system, "word_family": args.word_family,
        "n_grid": grid, "t": t, "cap": args.cap,
    });
    artifacts.write_manifest(ctx.command, argv, ctx.invoked_argv, resolved)
}
