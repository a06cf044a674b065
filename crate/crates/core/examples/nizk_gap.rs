//! Exact and sampled acceptance gaps of the NIZK deciders across fixtures, including
//! the trivial protocols whose errors sum to one.

use zklab::dist::rat;
use zklab::extrapolation::{make_exact_ue, nizk_crs_sampler};
use zklab::nizk_deciders::{nizk_gap_experiment, DeciderParams};
use zklab::protocol::{build_ideal_nizk, build_trivial_protocol, NizkSpec};
use zklab::report::Evaluation;

fn main() -> anyhow::Result<()> {
    let fixtures: Vec<NizkSpec> = vec![
        build_ideal_nizk()?,
        build_trivial_protocol(rat(1, 3), rat(1, 3), rat(1, 3))?,
        build_trivial_protocol(rat(1, 2), rat(1, 4), rat(1, 4))?,
    ];
    let params = DeciderParams::from_formulas(1, 4).with_reps(16);
    for spec in &fixtures {
        let oracle = make_exact_ue(nizk_crs_sampler(spec))?;
        println!("{}", spec.name);
        for how in [Evaluation::Exact, Evaluation::MonteCarlo { trials: 4000, seed: 1 }] {
            for r in nizk_gap_experiment(spec, &oracle, &params, "x1", "x0", how)? {
                let [lo, hi] = r.gap.bounds();
                println!("  {:5} {:?}: gap {:.4} [{lo:.4}, {hi:.4}]", r.decider, r.mode, r.gap.float);
            }
        }
    }
    Ok(())
}
