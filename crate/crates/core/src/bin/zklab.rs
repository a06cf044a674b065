use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zklab::lab::{run, tally, Experiment, LabConfig, Status};
use zklab::protocol::Mode;

#[derive(Parser)]
#[command(name = "zklab", version, about = "Exact and sampled experiments on zero-knowledge deciders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reverse-sampling deciders against the counterexample protocol.
    Counterexample(Common),
    /// Acceptance gap of every NIZK decider on a fixture.
    NizkGap(Common),
    /// Acceptance gap of the interactive decider on the demo protocol.
    IzkGap(Common),
    /// Rewrite the private-coin fixture into a public-coin protocol.
    CoinTransform(Common),
    /// Empirical tail frequencies against the Chernoff bounds.
    ChernoffAudit(Common),
    /// Decision-to-inversion records across sizes.
    DtiPackage(Common),
    /// Every experiment listed in the config.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// TOML or JSON config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["exact", "mc"]))]
    mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::Counterexample(c) => (Some("counterexample"), c),
        Command::NizkGap(c) => (Some("nizk-gap"), c),
        Command::IzkGap(c) => (Some("izk-gap"), c),
        Command::CoinTransform(c) => (Some("coin-transform"), c),
        Command::ChernoffAudit(c) => (Some("chernoff-audit"), c),
        Command::DtiPackage(c) => (Some("dti-package"), c),
        Command::Run(c) => (None, c),
    };
    match execute(kind, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(kind: Option<&str>, common: &Common) -> anyhow::Result<bool> {
    let mut config = match &common.config {
        Some(p) => LabConfig::from_path(p)?,
        None => LabConfig::default(),
    };
    let mode = common.mode.as_deref().map(|m| m.parse::<Mode>()).transpose()?;
    config = config.with_overrides(common.seed, mode, common.out.clone());
    if let Some(kind) = kind {
        config.experiments.retain(|e| e.kind() == kind);
        if config.experiments.is_empty() {
            config.experiments.push(Experiment::default_of(kind).expect("known kind"));
        }
    }
    config.validate()?;

    let manifest = run(&config)?;
    for e in &manifest.experiments {
        let tag = match e.status {
            Status::Passed => "PASS ",
            Status::Failed => "FAIL ",
            Status::Error => "ERROR",
        };
        println!("{tag} {} ({})", e.name, e.kind);
        if let Some(err) = &e.error {
            println!("      {err}");
        }
        for c in &e.checks {
            println!("      {} {}: {}", if c.holds { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
    }
    let (ok, total) = tally(&manifest);
    println!("{ok}/{total} checks hold; manifest at {}", config.out.join("manifest.json").display());
    Ok(manifest.all_passed)
}
