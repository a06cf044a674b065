//! Decision-to-inversion records: the decider's gap, how far an imperfect oracle can
//! move it, and whether majority voting still separates the two instances.

use std::sync::Arc;

use num::{One, Zero};
use zklab::dist::{fmt_rat, rat, short_rat, Rat};
use zklab::izk::EngineParams;
use zklab::nizk_deciders::DeciderParams;
use zklab::protocol::{build_counterexample, build_demo_interactive, ErrorProfile, SoundVariant};
use zklab::reductions::{package_dti, BruteForce, DtiSize, DtiTarget, Inverter, Noisy};

fn main() -> anyhow::Result<()> {
    let nizk = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 1024), SoundVariant::Derandomized)?;
    let nizk_params = DeciderParams::from_formulas(1, 8).with_reps(64);
    let demo = build_demo_interactive(3, &ErrorProfile::target(Rat::zero(), rat(1, 4), rat(1, 2))?)?;
    let demo_params = EngineParams::desk(3, 4, 8, 4);

    let cases = [
        ("nizk", DtiTarget::Nizk { spec: &nizk, params: &nizk_params }),
        ("interactive", DtiTarget::Interactive { spec: &demo, params: &demo_params }),
    ];
    for (label, target) in cases {
        let size = DtiSize { label: label.into(), target, x_in: "x1".into(), x_out: "x0".into() };
        for eta in [Rat::zero(), rat(1, 2560), Rat::one()] {
            let inv: Arc<dyn Inverter> = Arc::new(Noisy::new(Arc::new(BruteForce), eta.clone()));
            let rec = package_dti(std::slice::from_ref(&size), 8, &inv)?;
            let r = &rec.rows[0];
            println!(
                "{label:12} eta {:>7}: gap {:>10} shift <= {:>10} votes {} in {:.4} out {:.4} guarantee {} holds {}",
                fmt_rat(&eta),
                short_rat(&r.gap),
                short_rat(&r.shift_bound),
                rec.amplification,
                r.amplified_in,
                r.amplified_out,
                r.guarantee,
                r.holds
            );
        }
    }
    Ok(())
}
