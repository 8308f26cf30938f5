mod args;
mod cache;
mod commands;
mod deciders;
mod inputs;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use fraisse_core::Budget;
use serde_json::json;

use args::{Cli, Command};
use cache::Cache;
use commands::Ctx;
use inputs::Usage;
use report::{Outcome, Report};

fn name(c: &Command) -> &'static str {
    match c {
        Command::Parse(_) => "parse",
        Command::Enumerate(_) => "enumerate",
        Command::Embeddings(_) => "embeddings",
        Command::Patterns(_) => "patterns",
        Command::PatternCount(_) => "pattern-count",
        Command::Arrow(_) => "arrow",
        Command::ArrowSearch(_) => "arrow-search",
        Command::DefinableArrow(_) => "definable-arrow",
        Command::StableArrow(_) => "stable-arrow",
        Command::RoelckeWitness(_) => "roelcke-witness",
        Command::Stability(_) => "stability",
        Command::ProximalCheck(_) => "proximal-check",
        Command::ProximalArrow(_) => "proximal-arrow",
        Command::ConvexArrow(_) => "convex-arrow",
        Command::Orbits(_) => "orbits",
        Command::InvariantPartitions(_) => "invariant-partitions",
        Command::CoherentPartitions(_) => "coherent-partitions",
        Command::Amalgamation(_) => "amalgamation",
        Command::Verify(_) => "verify",
    }
}

fn dispatch(cli: &Cli, ctx: &Ctx) -> anyhow::Result<Outcome> {
    use Command::*;
    match &cli.command {
        Parse(a) => commands::parse(a),
        Enumerate(a) => commands::enumerate(ctx, a),
        Embeddings(a) => commands::embeddings_cmd(a),
        Patterns(a) => commands::patterns(ctx, a),
        PatternCount(a) => commands::pattern_count_cmd(ctx, a),
        Arrow(a) => deciders::arrow(ctx, a),
        ArrowSearch(a) => deciders::arrow_search_cmd(ctx, a),
        DefinableArrow(a) => deciders::definable(ctx, a),
        StableArrow(a) => deciders::stable(ctx, a),
        RoelckeWitness(a) => deciders::roelcke(ctx, a),
        Stability(a) => deciders::stability(ctx, a),
        ProximalCheck(a) => deciders::proximal(ctx, a),
        ProximalArrow(a) => deciders::proximal_arrow_cmd(ctx, a),
        ConvexArrow(a) => deciders::convex(ctx, a),
        Orbits(a) => commands::orbits(ctx, a),
        InvariantPartitions(a) => commands::partitions(ctx, a),
        CoherentPartitions(a) => commands::coherent(ctx, a),
        Amalgamation(a) => commands::amalgamation(ctx, a),
        Verify(a) => deciders::verify_cmd(ctx, a),
    }
}

fn budget(cli: &Cli) -> Result<Budget, Usage> {
    let mut budget = match cli.global.node_budget {
        Some(0) => return Err(Usage("--node-budget must be positive".into())),
        Some(n) => Budget::new(n),
        None => Budget::default(),
    };
    if let Some(secs) = cli.global.time_budget {
        if !(secs > 0.0 && secs.is_finite()) {
            return Err(Usage("--time-budget must be a positive number of seconds".into()));
        }
        budget = budget.with_time_limit(Duration::from_secs_f64(secs));
    }
    Ok(budget)
}

fn print(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let budget = match budget(&cli) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let ctx = Ctx {
        budget,
        cache: Cache::from_env(cli.global.no_cache),
    };
    match dispatch(&cli, &ctx) {
        Ok(outcome) => {
            print(if cli.global.json { &outcome.machine } else { &outcome.human });
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            let limit = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<fraisse_core::Error>(), Some(fraisse_core::Error::ResourceLimit(_))));
            eprintln!("error: {e:#}");
            if limit {
                let outcome = Report::new(name(&cli.command), json!({}))
                    .finish("resource-limit", 3, json!({ "message": format!("{e:#}") }));
                print(if cli.global.json { &outcome.machine } else { &outcome.human });
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
