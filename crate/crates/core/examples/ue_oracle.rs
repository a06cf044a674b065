//! Universal extrapolation by enumeration: answer laws of exact and perturbed oracles
//! and their distance from uniform preimages.

use std::sync::Arc;

use zklab::dist::{fmt_rat, rat, SeedStream, Token};
use zklab::extrapolation::{make_exact_ue, perturb_ue, ue_quality, IndexedSampler, SamplerDef, UEOracle};
use zklab::reductions::RandomGuess;

fn main() -> anyhow::Result<()> {
    // r in [0, 12) observed as r mod 3 on "a" and r / 4 on "b".
    let def = SamplerDef::uniform_tapes("mod-div", &["a", "b"], 12, |x, r| {
        Token::index(if x == "a" { r % 3 } else { r / 4 }, 1)
    })?;
    let exact = make_exact_ue(def.clone())?;
    let noisy = perturb_ue(&exact, rat(1, 8), 0)?;
    let guess = UEOracle::with_inverter(IndexedSampler::build(def)?, Arc::new(RandomGuess));
    for o in [&exact, &noisy, &guess] {
        print!("{:40}", o.describe());
        for x in ["a", "b"] {
            print!(" quality({x}) = {:6}", fmt_rat(&ue_quality(o, x)?));
        }
        println!();
    }
    let mut s = SeedStream::new(3);
    let y = Token::index(1, 1);
    let draws: Vec<u64> = (0..12).map(|_| exact.query("a", &y, &mut s)).collect::<Result<_, _>>()?;
    println!("preimages of 1 under r mod 3: {draws:?}");
    Ok(())
}
