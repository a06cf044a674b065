//! Inverting function families: the concatenated family `g`, and algorithm B, which
//! answers ⊥ exactly as often as its inverter fails.

use std::sync::Arc;

use zklab::dist::{fmt_rat, rat, SeedStream, Token};
use zklab::extrapolation::SamplerDef;
use zklab::reductions::{
    algorithm_b, algorithm_b_bottom, g_construction, inversion_success, AlwaysBottom, AuxAlphabet, BVerdict,
    BruteForce, Evaluation, FunctionFamily, Inverter, InverterAccess, Noisy, Partial, RandomGuess,
};

fn main() -> anyhow::Result<()> {
    let f = FunctionFamily::new(
        SamplerDef::uniform_tapes("halve-or-mod3", &["0", "1"], 16, |x, r| {
            Token::index(if x == "0" { r / 2 } else { r % 3 }, 1)
        })?,
        AuxAlphabet::Binary,
    )?;
    let d = SamplerDef::uniform_tapes("coin", &[""], 2, |_, r| Token::new(if r == 0 { "0" } else { "1" }))?;
    let g = g_construction(&d, &f)?;
    let inverters: Vec<Arc<dyn Inverter>> = vec![
        Arc::new(BruteForce),
        Arc::new(RandomGuess),
        Arc::new(Noisy::new(Arc::new(BruteForce), rat(1, 3))),
        Arc::new(AlwaysBottom),
        Arc::new(Partial { success: [("0".to_string(), rat(3, 4))].into(), default: rat(1, 5) }),
    ];
    for inv in &inverters {
        let s0 = inversion_success(&f, inv, "0", Evaluation::Exact)?;
        let s1 = inversion_success(&f, inv, "1", Evaluation::Exact)?;
        let sg = inversion_success(&g, inv, "", Evaluation::Exact)?;
        let b0 = algorithm_b_bottom(&f, inv, "0")?;
        println!(
            "{:28} f_0 {:>6} f_1 {:>6} g {:>6}  Pr[B(0) = bottom] {:>4}",
            inv.name(),
            fmt_rat(&s0),
            fmt_rat(&s1),
            fmt_rat(&sg),
            fmt_rat(&b0)
        );
    }
    let mut s = SeedStream::new(5);
    let mut label = |x: &str, _: &mut InverterAccess<'_>, _: &mut SeedStream| x == "1";
    let partial = &inverters[4];
    let bottoms = (0..10_000)
        .filter(|_| algorithm_b("0", &f, partial, &mut label, &mut s).unwrap() == BVerdict::Bottom)
        .count();
    println!("sampled Pr[B(0) = bottom] with the partial inverter: {:.4}", bottoms as f64 / 10_000.0);
    Ok(())
}
