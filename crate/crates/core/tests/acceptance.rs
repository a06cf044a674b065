//! Acceptance criteria. Each prints one PASS/FAIL line with its measured values and
//! runtime; the test fails if any criterion does.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num::{One, Signed, Zero};
use zklab::coin_transform::{build_private_fixture, measure_private_errors, publicize};
use zklab::dist::{chernoff_audit, default_audit_grid, fmt_rat, rat, rat_int, short_rat, to_f64, Rat, SeedStream, Token};
use zklab::extrapolation::{make_exact_ue, nizk_crs_sampler, perturb_ue, prefix_sampler, SamplerDef, UEOracle};
use zklab::izk::{izk_gap_experiment, Engine, EngineParams, Quality};
use zklab::lab::{run, LabConfig};
use zklab::nizk_deciders::{bad_crs_bound, exact_acceptance, DeciderParams, NizkDecider};
use zklab::protocol::{
    build_counterexample, build_demo_interactive, build_ideal_nizk, build_trivial_protocol, measure_interactive_errors,
    measure_nizk_errors, ErrorProfile, InteractiveSpec, NizkSpec, Prefix, SoundVariant, Transcript,
};
use zklab::reductions::{
    algorithm_b_bottom, g_construction, inversion_success, AlwaysBottom, AuxAlphabet, BruteForce, Evaluation,
    FunctionFamily, Inverter, Noisy, Partial, RandomGuess,
};

type Outcome = anyhow::Result<(bool, String)>;

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn counterexample(delta: Rat) -> NizkSpec {
    build_counterexample(rat(1, 2), rat(1, 4), delta, SoundVariant::Derandomized).unwrap()
}

fn oracle(spec: &NizkSpec) -> UEOracle {
    make_exact_ue(nizk_crs_sampler(spec)).unwrap()
}

fn demo(c: Rat, s: Rat, z: Rat) -> (InteractiveSpec, UEOracle) {
    let spec = build_demo_interactive(3, &ErrorProfile::target(c, s, z).unwrap()).unwrap();
    let o = make_exact_ue(prefix_sampler(&spec)).unwrap();
    (spec, o)
}

/// Binomial standard deviation at frequency `b` over `n` runs.
fn sigma(b: f64, n: u64) -> f64 {
    (b * (1.0 - b) / n as f64).sqrt()
}

fn c01_barrier() -> Outcome {
    let spec = counterexample(Rat::zero());
    let o = oracle(&spec);
    let params = DeciderParams::from_formulas(1, 4);
    let acc = |d, x| exact_acceptance(d, &spec, &o, x, &params);
    let ow = (acc(NizkDecider::Ow, "x1")?, acc(NizkDecider::Ow, "x0")?);
    let chk = (acc(NizkDecider::Chk, "x1")?, acc(NizkDecider::Chk, "x0")?);
    let quarter = rat(1, 4);
    let ok = ow.0 == quarter && ow.1 == quarter && chk == ow;
    Ok((ok, format!("ow ({}, {}), chk ({}, {})", fmt_rat(&ow.0), fmt_rat(&ow.1), fmt_rat(&chk.0), fmt_rat(&chk.1))))
}

fn c02_repetition() -> Outcome {
    let spec = counterexample(rat(1, 1024));
    let o = oracle(&spec);
    let params = DeciderParams::from_formulas(1, 4).with_reps(64);
    let gap = exact_acceptance(NizkDecider::Alg1, &spec, &o, "x1", &params)?
        - exact_acceptance(NizkDecider::Alg1, &spec, &o, "x0", &params)?;
    Ok((gap >= rat(1, 5), format!("alg1 gap {} >= 1/5", short_rat(&gap))))
}

fn nizk_fixtures() -> Vec<NizkSpec> {
    vec![
        build_ideal_nizk().unwrap(),
        counterexample(Rat::zero()),
        counterexample(rat(1, 1024)),
        build_counterexample(rat(3, 10), rat(1, 10), rat(1, 64), SoundVariant::Randomized).unwrap(),
        build_counterexample(rat(1, 10), rat(1, 2), rat(1, 20), SoundVariant::Derandomized).unwrap(),
        build_trivial_protocol(rat(1, 3), rat(1, 3), rat(1, 3)).unwrap(),
        build_trivial_protocol(rat(1, 2), rat(1, 4), rat(1, 4)).unwrap(),
    ]
}

fn c03_bad_crs() -> Outcome {
    let mut worst = String::new();
    let mut ok = true;
    let mut n = 0;
    for spec in nizk_fixtures() {
        let o = oracle(&spec);
        let profile = measure_nizk_errors(&spec)?;
        for p in [4, 8, 16] {
            let c = bad_crs_bound(&spec, &o, "x1", &DeciderParams::from_formulas(1, p), &profile)?;
            n += 1;
            if !c.holds {
                ok = false;
                worst = format!("{} at p = {p}: {}", spec.name, c.detail);
            }
        }
    }
    Ok((ok, if ok { format!("{n} (fixture, p) pairs within the bound") } else { worst }))
}

fn c04_squared_keep() -> Outcome {
    let delta = rat(1, 1024);
    let mut parts = Vec::new();
    let mut ok = true;
    for z in [rat(1, 10), rat(3, 10), rat(1, 2)] {
        let spec = build_counterexample(z.clone(), rat(1, 4), delta.clone(), SoundVariant::Derandomized)?;
        let got = exact_acceptance(NizkDecider::Ow, &spec, &oracle(&spec), "x1", &DeciderParams::from_formulas(1, 4))?;
        let want = (Rat::one() - &z) * (Rat::one() - &z);
        let dev = (&got - &want).abs();
        ok &= dev <= &delta * rat_int(2);
        parts.push(format!("eps_zk {}: |{} - {}| = {}", fmt_rat(&z), short_rat(&got), fmt_rat(&want), short_rat(&dev)));
    }
    Ok((ok, parts.join("; ")))
}

fn c05_trivial_null() -> Outcome {
    let mut ok = true;
    for (c, s, z) in [(rat(1, 3), rat(1, 3), rat(1, 3)), (rat(1, 2), rat(1, 4), rat(1, 4)), (rat(1, 8), rat(5, 8), rat(1, 4))] {
        let spec = build_trivial_protocol(c, s, z)?;
        let o = oracle(&spec);
        for t in [1, 16] {
            let params = DeciderParams::from_formulas(1, 4).with_reps(t);
            for d in NizkDecider::ALL {
                let gap = exact_acceptance(d, &spec, &o, "x1", &params)? - exact_acceptance(d, &spec, &o, "x0", &params)?;
                ok &= gap.is_zero();
            }
        }
    }
    Ok((ok, "3 profiles x 3 deciders x T in {1, 16}".into()))
}

fn c06_est_accuracy() -> Outcome {
    let (spec, o) = demo(Rat::zero(), rat(1, 4), rat(1, 2));
    let params = EngineParams::desk(3, 1, 8, 8);
    assert_eq!(params.est_trials, 12 * 8u64.pow(4));
    let e = Engine::new(&spec, &o, "x1", params)?;
    let mut s = SeedStream::new(60);
    let n = 1000;
    let mut far = 0;
    for i in 0..n {
        // Honest and simulated prefixes, one or two messages long.
        let len = 1 + (i % 2);
        let tau = if i % 4 < 2 {
            spec.honest_prefix("x1", len, &mut s)?
        } else {
            spec.truncate(spec.full(spec.sim_code("x1", s.below(spec.sim_tape("x1")))), len)
        };
        let d = to_f64(&(e.est(tau, &mut s)? - e.exact_success(tau)?)).abs();
        far += u64::from(d > 1.0 / 8.0);
    }
    let f = far as f64 / n as f64;
    Ok((f <= 1.0 / 8.0, format!("{far}/{n} estimates off by more than 1/8")))
}

fn c07_ptilde_okay() -> Outcome {
    let (spec, o) = demo(Rat::zero(), rat(1, 4), rat(1, 2));
    let params = EngineParams::desk(3, 1, 8, 8);
    let need = 1.0 - to_f64(&params.tail_mass()) - 0.02;
    let e = Engine::new(&spec, &o, "x1", params)?;
    let mut s = SeedStream::new(70);
    let n = 500;
    let mut okay = 0;
    for i in 0..n {
        // Prover speaks at the root and after two messages.
        let tau = if i % 2 == 0 { Prefix::EMPTY } else { spec.honest_prefix("x1", 2, &mut s)? };
        let m = e.p_tilde_next(tau, &mut s)?;
        okay += u64::from(e.classify_message(tau, m)?.class.is_okay());
    }
    let f = okay as f64 / n as f64;
    Ok((f >= need, format!("{okay}/{n} okay-class, need {need:.4}")))
}

fn c08_distinguisher() -> Outcome {
    let runs = 10_000u64;
    let k = 3;
    let p = 8;
    // Sim transcripts of the demo: the distinguisher should rarely fire.
    let (spec, o) = demo(Rat::zero(), rat(1, 4), rat(1, 2));
    let params = EngineParams::desk(k, 1, p, 4);
    let e = Engine::new(&spec, &o, "x1", params.clone())?;
    let mut s = SeedStream::new(80);
    let mut fired = 0;
    for _ in 0..runs {
        let tau = spec.full(spec.sim_code("x1", s.below(spec.sim_tape("x1"))));
        fired += u64::from(e.distinguisher(tau, &mut s)?.fired);
    }
    let b_sim = 1.0 / (4.0 * p as f64);
    let f_sim = fired as f64 / runs as f64;
    let ok_sim = f_sim <= b_sim + 3.0 * sigma(b_sim, runs);

    // A planted very-good last message: the distinguisher should fire at that round.
    let (spec, o) = demo(Rat::zero(), rat(1, 4), rat(3, 4));
    let e = Engine::new(&spec, &o, "x1", params.clone())?;
    let tau = spec.encode(&Transcript(vec![1, 3, ((1 + 3 + 1) % 4) as u16]))?;
    let class = e.classify_message(spec.truncate(tau, 2), spec.msg(tau.code, 2))?.class;
    let mut at_round = 0;
    for _ in 0..runs {
        at_round += u64::from(e.distinguisher(tau, &mut s)?.fired_round == Some(3));
    }
    let b_pl = 1.0 - to_f64(&params.tail_mass());
    let f_pl = at_round as f64 / runs as f64;
    let ok_pl = class == Quality::VeryGood && f_pl >= b_pl - 3.0 * sigma(b_pl, runs);
    Ok((
        ok_sim && ok_pl,
        format!(
            "sim fires {f_sim:.4} <= {:.4}; planted ({class:?}) fires at round 3 {f_pl:.4} >= {:.4}",
            b_sim + 3.0 * sigma(b_sim, runs),
            b_pl - 3.0 * sigma(b_pl, runs)
        ),
    ))
}

fn c09_interactive_gap() -> Outcome {
    let (spec, o) = demo(Rat::zero(), rat(1, 4), rat(1, 2));
    let params = EngineParams::desk(3, 1, 8, 8);
    let r = izk_gap_experiment(&spec, &o, &params, "x1", "x0", Evaluation::MonteCarlo { trials: 10_000, seed: 90 })?;
    let [lo, hi] = r.gap.bounds();
    let ok = r.gap.float >= 1.0 / 16.0 && lo > 0.0 && r.all_checks_hold();
    Ok((ok, format!("gap {:.4}, 99% interval [{lo:.4}, {hi:.4}]", r.gap.float)))
}

fn c10_chernoff() -> Outcome {
    let rows = chernoff_audit(&default_audit_grid(), 100_000, 100)?;
    let worst = rows.iter().map(|r| r.empirical / r.bound).fold(0.0, f64::max);
    Ok((rows.len() == 12 && rows.iter().all(|r| r.pass), format!("12 cells, largest frequency/bound {worst:.4}")))
}

fn c11_coin_transform() -> Outcome {
    let spec = build_private_fixture()?;
    let before = measure_private_errors(&spec)?;
    let (public, exact) = publicize(&spec, &(Arc::new(BruteForce) as Arc<dyn Inverter>), &rat(64, 1))?;
    let after = measure_interactive_errors(&public)?;
    let same = after.eps_c == before.eps_c && after.eps_s == before.eps_s && after.eps_zk == before.eps_zk;
    let eta = rat(1, 64);
    let noisy: Arc<dyn Inverter> = Arc::new(Noisy::new(Arc::new(BruteForce), eta.clone()));
    let (public, report) = publicize(&spec, &noisy, &rat(64, 1))?;
    let rounds = report.inverters.len() as u64;
    let after = measure_interactive_errors(&public)?;
    let deltas = [&after.eps_c - &before.eps_c, &after.eps_s - &before.eps_s, &after.eps_zk - &before.eps_zk];
    let within = deltas.iter().all(|d| *d <= &eta * rat_int(rounds));
    Ok((
        same && exact.all_checks_hold() && within && rounds == 1,
        format!(
            "exact deltas 0: {same}; eta 1/64 deltas ({}, {}, {}) over {rounds} round",
            fmt_rat(&deltas[0]),
            fmt_rat(&deltas[1]),
            fmt_rat(&deltas[2])
        ),
    ))
}

fn c12_algorithm_b() -> Outcome {
    let families = vec![
        FunctionFamily::new(SamplerDef::uniform_tapes("id", &["1", "11"], 64, |_, r| Token::index(r, 1))?, AuxAlphabet::Unary)?,
        FunctionFamily::new(
            SamplerDef::uniform_tapes("halve-or-mod3", &["0", "1"], 16, |x, r| {
                Token::index(if x == "0" { r / 2 } else { r % 3 }, 1)
            })?,
            AuxAlphabet::Binary,
        )?,
        FunctionFamily::new(
            SamplerDef::uniform_tapes("constant", &["0", "10"], 8, |_, _| Token::index(0, 1))?,
            AuxAlphabet::Binary,
        )?,
    ];
    let inverters: Vec<Arc<dyn Inverter>> = vec![
        Arc::new(BruteForce),
        Arc::new(RandomGuess),
        Arc::new(AlwaysBottom),
        Arc::new(Noisy::new(Arc::new(BruteForce), rat(1, 3))),
        Arc::new(Partial { success: [("0".to_string(), rat(3, 4))].into(), default: rat(1, 5) }),
    ];
    let mut ok = true;
    let mut n = 0;
    for f in &families {
        let xs: Vec<String> = f.instances();
        for inv in &inverters {
            for x in &xs {
                let fail = Rat::one() - inversion_success(f, inv, x, Evaluation::Exact)?;
                ok &= algorithm_b_bottom(f, inv, x)? == fail;
                n += 1;
            }
        }
    }
    let d = SamplerDef::uniform_tapes("coin", &[""], 2, |_, r| Token::new(if r == 0 { "0" } else { "1" }))?;
    let g = g_construction(&d, &families[1])?;
    let g_success = inversion_success(&g, &(Arc::new(BruteForce) as Arc<dyn Inverter>), "", Evaluation::Exact)?;
    ok &= g_success.is_one();
    Ok((ok, format!("{n} (family, inverter, x) triples; brute force on g succeeds w.p. {}", fmt_rat(&g_success))))
}

fn c13_perturbation() -> Outcome {
    let mut ok = true;
    let mut worst = Rat::zero();
    for spec in [counterexample(rat(1, 1024)), build_counterexample(rat(3, 10), rat(1, 10), rat(1, 64), SoundVariant::Randomized)?] {
        let exact = oracle(&spec);
        let params = DeciderParams::from_formulas(1, 4).with_reps(16);
        for eta in [Rat::zero(), rat(1, 256), rat(1, 64), rat(1, 16)] {
            let o = perturb_ue(&exact, eta.clone(), 13)?;
            for x in ["x1", "x0"] {
                let d = (exact_acceptance(NizkDecider::Alg1, &spec, &o, x, &params)?
                    - exact_acceptance(NizkDecider::Alg1, &spec, &exact, x, &params)?)
                .abs();
                ok &= d <= rat_int(params.reps) * &eta;
                if !eta.is_zero() {
                    worst = worst.max(&d / (rat_int(params.reps) * &eta));
                }
            }
        }
    }
    Ok((ok, format!("largest shift / (T eta) = {}", short_rat(&worst))))
}

const REPLAY: &str = r#"
seed = 1400
mode = "mc"
trials = 400

[[experiments]]
kind = "counterexample"
eps_zk = "1/2"
eps_s = "1/4"
delta = "1/1024"
reps = 64
p = 4

[[experiments]]
kind = "nizk-gap"
n = 1
p = 8
reps = 16
oracle_eta = "1/64"

[[experiments]]
kind = "izk-gap"
n = 1
p = 8
p_est = 4
est_trials = 256
runs = 100

[[experiments]]
kind = "coin-transform"
eta = "1/64"
q = 64

[[experiments]]
kind = "chernoff-audit"
trials = 2000

[[experiments]]
kind = "dti-package"
p = 8
sizes = [{ type = "nizk", label = "n=1", n = 1, reps = 64, fixture = { type = "ideal" } }]
"#;

fn c14_replay() -> Outcome {
    let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
    let mut outputs = Vec::new();
    for d in &dirs {
        let cfg = LabConfig::from_toml_str(REPLAY)?.with_overrides(None, None, Some(d.path().to_path_buf()));
        let m = run(&cfg)?;
        let mut files = vec![("manifest.json".to_string(), std::fs::read(d.path().join("manifest.json"))?)];
        for f in &m.files {
            files.push((f.clone(), std::fs::read(d.path().join(f))?));
        }
        outputs.push(files);
    }
    let same = outputs[0] == outputs[1];
    Ok((same && outputs[0].len() == 13, format!("{} files, byte-identical: {same}", outputs[0].len())))
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { id: 1, name: "counterexample barrier", limit: secs(1), run: c01_barrier },
        Criterion { id: 2, name: "repetition fix", limit: secs(5), run: c02_repetition },
        Criterion { id: 3, name: "bad-crs mass bound", limit: secs(10), run: c03_bad_crs },
        Criterion { id: 4, name: "single reverse sample keeps (1 - eps_zk)^2", limit: secs(5), run: c04_squared_keep },
        Criterion { id: 5, name: "trivial protocols have no gap", limit: secs(5), run: c05_trivial_null },
        Criterion { id: 6, name: "Est accuracy", limit: secs(120), run: c06_est_accuracy },
        Criterion { id: 7, name: "P~ picks okay-class messages", limit: secs(120), run: c07_ptilde_okay },
        Criterion { id: 8, name: "distinguisher on sim and planted transcripts", limit: secs(300), run: c08_distinguisher },
        Criterion { id: 9, name: "interactive acceptance gap", limit: secs(600), run: c09_interactive_gap },
        Criterion { id: 10, name: "Chernoff audit", limit: secs(120), run: c10_chernoff },
        Criterion { id: 11, name: "private-to-public fidelity", limit: secs(60), run: c11_coin_transform },
        Criterion { id: 12, name: "algorithm B bottom law and g", limit: secs(30), run: c12_algorithm_b },
        Criterion { id: 13, name: "oracle perturbation shift <= T eta", limit: secs(60), run: c13_perturbation },
        Criterion { id: 14, name: "replay determinism", limit: secs(600), run: c14_replay },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let t = Instant::now();
        let out = (c.run)();
        let el = t.elapsed();
        let (ok, detail) = match out {
            Ok((ok, d)) => (ok && el <= c.limit, d),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "{} C{:02} {} [{:.2?} / {:?}]: {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            el,
            c.limit
        );
        if !ok {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
