//! Subcommand implementations.

mod approx;
mod cluster;
mod entropy;
mod mixing;
mod period;
mod poisson;
mod stein;

use crate::args::{Cli, Command};
use crate::CliResult;

pub fn run(invoked_argv: &[String], cli: Cli) -> CliResult<()> {
    let name = cli.command.name();
    match cli.command {
        Command::PoissonCheck(args) => with_pool(&args.common, name, invoked_argv, |ctx| {
            poisson::run(ctx, &args)
        }),
        Command::PeriodScan(args) => with_pool(&args.common, name, invoked_argv, |ctx| {
            period::run(ctx, &args)
        }),
        Command::Entropy(args) => with_pool(&args.common, name, invoked_argv, |ctx| {
            entropy::run(ctx, &args)
        }),
        Command::SteinBound(args) => with_pool(&args.common, name, invoked_argv, |ctx| {
            stein::run(ctx, &args)
        }),
        Command::ApproxGap(args) => with_pool(&args.common, name, invoked_argv, |ctx| {
            approx::run(ctx, &args)
        }),
        Command::ClusterCount(args) => with_pool(&args.common, name, invoked_argv, |ctx| {
            cluster::run(ctx, &args)
        }),
        Command::Mixing(args) => with_pool(&args.common, name, invoked_argv, |ctx| {
            mixing::run(ctx, &args)
        }),
    }
}

/// Everything a command needs besides its own flags.
pub struct Ctx<'a> {
    pub command: &'a str,
    pub invoked_argv: &'a [String],
    pub common: crate::args::ResolvedCommon,
    pub file: crate::args::FileConfig,
}

fn with_pool(
    common: &crate::args::CommonArgs,
    name: &str,
    invoked_argv: &[String],
    body: impl FnOnce(Ctx<'_>) -> CliResult<()> + Send,
) -> CliResult<()> {
    let (resolved, file) = common.resolve(name)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolved.workers)
        .build()
        .map_err(|e| crate::CliError::Config(format!("thread pool: {e}")))?;
    let ctx = Ctx { command: name, invoked_argv, common: resolved, file };
    pool.install(|| body(ctx))
}

/// Common tail: canonical argv entries for the shared flags.
pub fn common_argv(ctx: &Ctx<'_>) -> Vec<String> {
    vec![
        "--seed".into(),
        ctx.common.seed.to_string(),
        "--out-dir".into(),
        ctx.common.out_dir.to_string_lossy().into_owned(),
        "--prefix".into(),
        ctx.common.prefix.clone(),
        "--workers".into(),
        ctx.common.workers.to_string(),
    ]
}
