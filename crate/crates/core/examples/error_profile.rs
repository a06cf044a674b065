//! Exact completeness, soundness and zero-knowledge errors of the bundled protocols,
//! and a round trip through the JSON schema.

use num::Zero;
use zklab::coin_transform::{build_private_fixture, measure_private_errors};
use zklab::dist::{fmt_rat, rat, Rat};
use zklab::protocol::schema::{interactive_from_json, interactive_to_json, nizk_from_json, nizk_to_json};
use zklab::protocol::{
    build_counterexample, build_demo_interactive, build_ideal_nizk, measure_interactive_errors, measure_nizk_errors,
    ErrorProfile, SoundVariant,
};

fn show(name: &str, p: &ErrorProfile) {
    println!("{name:32} c {:>6} s {:>6} zk {:>6}", fmt_rat(&p.eps_c), fmt_rat(&p.eps_s), fmt_rat(&p.eps_zk));
}

fn main() -> anyhow::Result<()> {
    let ideal = build_ideal_nizk()?;
    show(&ideal.name, &measure_nizk_errors(&ideal)?);
    let cex = build_counterexample(rat(3, 10), rat(1, 10), Rat::zero(), SoundVariant::Randomized)?;
    show(&cex.name, &measure_nizk_errors(&cex)?);
    let back = nizk_from_json(&nizk_to_json(&cex)?)?;
    assert_eq!(back, cex);

    for k in [3, 5] {
        let demo = build_demo_interactive(k, &ErrorProfile::target(rat(1, 8), rat(1, 4), rat(1, 2))?)?;
        show(&demo.name, &measure_interactive_errors(&demo)?);
        let back = interactive_from_json(&interactive_to_json(&demo)?)?;
        show("  after a JSON round trip", &measure_interactive_errors(&back)?);
    }
    let private = build_private_fixture()?;
    show(&private.name, &measure_private_errors(&private)?);
    Ok(())
}
