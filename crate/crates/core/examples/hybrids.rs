//! The interactive engine piece by piece: message classes, the round-wise
//! distinguisher on simulated transcripts, and hybrid runs.

use num::Zero;
use zklab::dist::{rat, short_rat, Rat, SeedStream};
use zklab::extrapolation::{make_exact_ue, prefix_sampler};
use zklab::izk::{classify_message, hybrid_transcript, izk_distinguisher, EngineParams};
use zklab::protocol::{build_demo_interactive, ErrorProfile, Transcript};

fn main() -> anyhow::Result<()> {
    let spec = build_demo_interactive(3, &ErrorProfile::target(Rat::zero(), rat(1, 4), rat(1, 2))?)?;
    let oracle = make_exact_ue(prefix_sampler(&spec))?;
    let mut params = EngineParams::desk(3, 1, 8, 8);
    params.est_trials = 512;

    let empty = Transcript(vec![]);
    for m in 0..spec.alphabet_len(0) as u16 {
        let q = classify_message(&spec, &oracle, "x1", &empty, m, &params)?;
        println!("first message {m}: success {} threshold {} {:?}", short_rat(&q.p_m), short_rat(&q.q_threshold), q.class);
    }

    let mut s = SeedStream::new(11);
    let runs = 300;
    let mut fired = 0;
    for _ in 0..runs {
        let code = spec.sim_code("x1", s.below(spec.sim_tape("x1")));
        let tau = spec.decode(spec.full(code));
        if izk_distinguisher(&spec, &oracle, "x1", &tau, &params, s.below(u64::MAX))?.fired {
            fired += 1;
        }
    }
    println!("distinguisher fired on {fired}/{runs} simulated transcripts");

    for i in 0..=spec.k() {
        let r = hybrid_transcript(&spec, &oracle, "x1", i, 1, &params, 100 + i as u64)?;
        println!("hybrid {i}: transcript {:?} verdict {} fired at {:?}", r.transcript.0, r.verdict, r.distinguisher.fired_round);
    }
    Ok(())
}
