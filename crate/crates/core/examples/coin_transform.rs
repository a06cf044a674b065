//! Turns the private-coin fixture into a public-coin protocol, once with an exact
//! inverter and once with an inverter that errs with probability 1/64.

use std::sync::Arc;

use zklab::coin_transform::{build_private_fixture, measure_private_errors, publicize};
use zklab::dist::{fmt_rat, rat};
use zklab::reductions::{BruteForce, Inverter, Noisy};

fn main() -> anyhow::Result<()> {
    let spec = build_private_fixture()?;
    let p = measure_private_errors(&spec)?;
    println!("{}: (c, s, zk) = ({}, {}, {})", spec.name, fmt_rat(&p.eps_c), fmt_rat(&p.eps_s), fmt_rat(&p.eps_zk));
    let inverters: Vec<Arc<dyn Inverter>> =
        vec![Arc::new(BruteForce), Arc::new(Noisy::new(Arc::new(BruteForce), rat(1, 64)))];
    for inv in inverters {
        let (public, report) = publicize(&spec, &inv, &rat(64, 1))?;
        println!("\ninverter {}: {} rounds after the rewrite", inv.name(), public.k());
        for row in &report.rows {
            let tv = row.tv.as_ref().map_or("-".into(), fmt_rat);
            println!(
                "  {:18} c {:>9} s {:>9} zk {:>9} tv {tv}",
                row.hybrid,
                fmt_rat(&row.eps_c),
                fmt_rat(&row.eps_s),
                fmt_rat(&row.eps_zk)
            );
        }
        println!(
            "  deltas ({}, {}, {}), budget {}",
            fmt_rat(&report.delta_c),
            fmt_rat(&report.delta_s),
            fmt_rat(&report.delta_zk),
            fmt_rat(&report.error_budget)
        );
        for c in &report.checks {
            println!("  {} {}", if c.holds { "ok  " } else { "FAIL" }, c.name);
        }
    }
    Ok(())
}
