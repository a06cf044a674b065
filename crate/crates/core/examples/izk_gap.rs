//! Acceptance gap of the interactive decider on the three-round demo protocol.
//!
//! `cargo run --release --example izk_gap -- [runs] [seed]`

use std::time::Instant;

use num::Zero;
use zklab::dist::{rat, Rat};
use zklab::extrapolation::{make_exact_ue, prefix_sampler};
use zklab::izk::{izk_gap_experiment, EngineParams};
use zklab::protocol::{build_demo_interactive, ErrorProfile};
use zklab::report::Evaluation;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let runs: u64 = args.next().map_or(Ok(2000), |a| a.parse())?;
    let seed: u64 = args.next().map_or(Ok(7), |a| a.parse())?;

    let spec = build_demo_interactive(3, &ErrorProfile::target(Rat::zero(), rat(1, 4), rat(1, 2))?)?;
    let oracle = make_exact_ue(prefix_sampler(&spec))?;
    let params = EngineParams::desk(3, 1, 8, 8);

    let exact = izk_gap_experiment(&spec, &oracle, &params, "x1", "x0", Evaluation::Exact)?;
    println!("exact  gap {:.6}", exact.gap.float);

    let t = Instant::now();
    let mc = izk_gap_experiment(&spec, &oracle, &params, "x1", "x0", Evaluation::MonteCarlo { trials: runs, seed })?;
    let [lo, hi] = mc.gap.bounds();
    println!("mc     gap {:.4} in [{lo:.4}, {hi:.4}] over {runs} runs ({:.1?})", mc.gap.float, t.elapsed());
    for c in exact.checks.iter().chain(&mc.checks) {
        println!("{} {}: {}", if c.holds { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
