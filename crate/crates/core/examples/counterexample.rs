//! Reverse-sampling the simulator is fooled by a protocol whose simulator rarely
//! produces one of the crs values; repeating the sampling fixes it.

use num::Zero;
use zklab::dist::{fmt_rat, rat, short_rat, Rat};
use zklab::extrapolation::{make_exact_ue, nizk_crs_sampler};
use zklab::nizk_deciders::{exact_acceptance, DeciderParams, NizkDecider};
use zklab::protocol::{build_counterexample, measure_nizk_errors, SoundVariant};

fn main() -> anyhow::Result<()> {
    for (delta, reps) in [(Rat::zero(), 1), (rat(1, 1024), 64)] {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), delta.clone(), SoundVariant::Derandomized)?;
        let profile = measure_nizk_errors(&spec)?;
        let oracle = make_exact_ue(nizk_crs_sampler(&spec))?;
        let params = DeciderParams::from_formulas(1, 4).with_reps(reps);
        println!(
            "delta = {}: errors (c, s, zk) = ({}, {}, {}), T = {reps}",
            fmt_rat(&delta),
            fmt_rat(&profile.eps_c),
            fmt_rat(&profile.eps_s),
            fmt_rat(&profile.eps_zk)
        );
        for d in NizkDecider::ALL {
            let a_in = exact_acceptance(d, &spec, &oracle, "x1", &params)?;
            let a_out = exact_acceptance(d, &spec, &oracle, "x0", &params)?;
            println!(
                "  {:5} accepts x1 w.p. {:>10}, x0 w.p. {:>6}, gap {}",
                d.name(),
                short_rat(&a_in),
                short_rat(&a_out),
                short_rat(&(&a_in - &a_out))
            );
        }
    }
    Ok(())
}
