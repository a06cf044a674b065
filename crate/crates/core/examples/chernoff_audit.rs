//! Empirical tail frequencies of binomial sums against the three Chernoff bounds.
//!
//! `cargo run --release --example chernoff_audit -- [trials] [seed]`

use zklab::dist::{chernoff_audit, default_audit_grid, fmt_rat};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: u64 = args.next().map_or(Ok(20_000), |a| a.parse())?;
    let seed: u64 = args.next().map_or(Ok(1), |a| a.parse())?;
    println!("{:10} {:>4} {:>5} {:>5} {:>10} {:>10} {:>10}", "bound", "m", "p", "dev", "empirical", "binomial", "bound");
    for r in chernoff_audit(&default_audit_grid(), trials, seed)? {
        println!(
            "{:10} {:>4} {:>5} {:>5} {:>10.5} {:>10.5} {:>10.5} {}",
            r.cell.kind.name(),
            r.cell.m,
            fmt_rat(&r.cell.p),
            fmt_rat(&r.cell.dev),
            r.empirical,
            r.exact_tail,
            r.bound,
            if r.pass { "" } else { "EXCEEDED" }
        );
    }
    Ok(())
}
