//! Inversion harnesses, the concatenated-output family `g`, algorithm B and the
//! decision-to-inversion packaging of the deciders.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::{fmt_rat, rat_int, rat_max, rat_serde, to_f64, Rat, SeedStream, Token};
use crate::error::{LabError, Result};
use crate::extrapolation::{nizk_crs_sampler, prefix_sampler, ue_quality, IndexedSampler, SamplerDef, TapeLaw, UEOracle};
use crate::izk::{Engine, EngineParams, EstMode};
use crate::nizk_deciders::{exact_acceptance, DeciderParams, NizkDecider};
use crate::protocol::{
    check_budget, measure_interactive_errors, measure_nizk_errors, InteractiveSpec, NizkSpec, Party, Prefix,
};
pub use crate::report::Evaluation;

/// An inverter described by the law of its answer given the preimage size: it returns
/// a uniform preimage, a uniform tape, or nothing, with the stated probabilities.
pub trait Inverter: Send + Sync {
    fn name(&self) -> String;
    fn law(&self, x: &str, preimage: u64, tape_size: u64) -> TapeLaw;
}

impl fmt::Debug for dyn Inverter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Uniform preimage, or failure when there is none.
#[derive(Clone, Copy, Debug)]
pub struct BruteForce;

impl Inverter for BruteForce {
    fn name(&self) -> String {
        "brute-force".into()
    }
    fn law(&self, _: &str, _: u64, _: u64) -> TapeLaw {
        TapeLaw::exact()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RandomGuess;

impl Inverter for RandomGuess {
    fn name(&self) -> String {
        "random-guess".into()
    }
    fn law(&self, _: &str, _: u64, _: u64) -> TapeLaw {
        TapeLaw::uniform()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AlwaysBottom;

impl Inverter for AlwaysBottom {
    fn name(&self) -> String {
        "always-bottom".into()
    }
    fn law(&self, _: &str, _: u64, _: u64) -> TapeLaw {
        TapeLaw::bottom()
    }
}

/// Replaces the base answer by a uniform tape with probability `eta`.
pub struct Noisy {
    base: Arc<dyn Inverter>,
    eta: Rat,
}

impl Noisy {
    pub fn new(base: Arc<dyn Inverter>, eta: Rat) -> Self {
        Noisy { base, eta }
    }
}

impl Inverter for Noisy {
    fn name(&self) -> String {
        format!("{}+uniform@{}", self.base.name(), fmt_rat(&self.eta))
    }
    fn law(&self, x: &str, preimage: u64, tape_size: u64) -> TapeLaw {
        self.base.law(x, preimage, tape_size).given_preimage(preimage).blend_uniform(&self.eta)
    }
}

/// Succeeds with a fixed per-instance probability, otherwise returns nothing.
#[derive(Clone, Debug)]
pub struct Partial {
    pub success: BTreeMap<String, Rat>,
    pub default: Rat,
}

impl Inverter for Partial {
    fn name(&self) -> String {
        "partial".into()
    }
    fn law(&self, x: &str, _: u64, _: u64) -> TapeLaw {
        let s = self.success.get(x).unwrap_or(&self.default).clone();
        let fail = Rat::one() - &s;
        TapeLaw::new(s, Rat::zero(), fail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuxAlphabet {
    Unary,
    Binary,
}

impl AuxAlphabet {
    pub fn admits(self, label: &str) -> bool {
        match self {
            AuxAlphabet::Unary => label.bytes().all(|b| b == b'1'),
            AuxAlphabet::Binary => label.bytes().all(|b| b == b'0' || b == b'1'),
        }
    }
}

/// A family `f_x(r)` indexed by auxiliary inputs over a unary or binary alphabet.
#[derive(Clone, Debug)]
pub struct FunctionFamily {
    pub alphabet: AuxAlphabet,
    sampler: Arc<IndexedSampler>,
}

impl FunctionFamily {
    pub fn new(def: SamplerDef, alphabet: AuxAlphabet) -> Result<Self> {
        if let Some(bad) = def.instances().find(|x| !alphabet.admits(x)) {
            return Err(LabError::InvalidSpec(format!("instance {bad:?} outside the {alphabet:?} alphabet")));
        }
        Ok(FunctionFamily { alphabet, sampler: IndexedSampler::build(def)? })
    }

    pub fn eval(&self, x: &str, r: u64) -> Token {
        self.sampler.def.observe(x, r)
    }

    pub fn tape_size(&self, x: &str) -> Result<u64> {
        self.sampler.def.tape_size(x)
    }

    pub fn instances(&self) -> Vec<String> {
        self.sampler.def.instances().map(String::from).collect()
    }

    pub fn sampler(&self) -> &Arc<IndexedSampler> {
        &self.sampler
    }

    /// Oracle interface over this family driven by `inv`.
    pub fn oracle(&self, inv: Arc<dyn Inverter>) -> UEOracle {
        UEOracle::with_inverter(self.sampler.clone(), inv)
    }
}

pub fn brute_force_inverter(_f: &FunctionFamily) -> Arc<dyn Inverter> {
    Arc::new(BruteForce)
}

/// One inversion attempt; `None` is the inverter's ⊥.
pub fn invert(f: &FunctionFamily, inv: &Arc<dyn Inverter>, x: &str, y: &Token, s: &mut SeedStream) -> Result<Option<u64>> {
    Ok(f.oracle(inv.clone()).query_handle(x, y)?.draw(s))
}

/// `Pr_r[f_x(A(x, f_x(r))) = f_x(r)]`.
pub fn inversion_success(f: &FunctionFamily, inv: &Arc<dyn Inverter>, x: &str, how: Evaluation) -> Result<Rat> {
    let n = f.tape_size(x)?;
    match how {
        Evaluation::Exact => {
            check_budget(u128::from(n))?;
            let o = f.oracle(inv.clone());
            let s = rat_int(n);
            let mut total = Rat::zero();
            for (y, c) in f.sampler.observations(x)? {
                let law = o.tape_law(x, y)?;
                let c = rat_int(c);
                total += &c / &s * (&law.preimage + &law.uniform * &c / &s);
            }
            Ok(total)
        }
        Evaluation::MonteCarlo { trials, seed } => {
            let o = f.oracle(inv.clone());
            let mut s = SeedStream::new(seed);
            let mut hits = 0u64;
            for _ in 0..trials {
                let y = f.eval(x, s.below(n));
                if o.query_handle(x, &y)?.draw(&mut s).is_some_and(|r| f.eval(x, r) == y) {
                    hits += 1;
                }
            }
            Ok(Rat::new(hits.into(), trials.max(1).into()))
        }
    }
}

/// `g(r1 ∥ r2) = D(r1) ∥ f_{D(r1)}(r2)`. `D`'s observations must be instance labels of
/// `f` (UTF-8, in `f`'s alphabet), and those instances must share one tape size.
pub fn g_construction(d: &SamplerDef, f: &FunctionFamily) -> Result<FunctionFamily> {
    let mut f_tape = None;
    let mut tapes = BTreeMap::new();
    for xd in d.instances() {
        let nd = d.tape_size(xd)?;
        check_budget(u128::from(nd))?;
        for r1 in 0..nd {
            let obs = d.observe(xd, r1);
            let label = std::str::from_utf8(obs.as_bytes())
                .ok()
                .filter(|l| f.alphabet.admits(l))
                .ok_or_else(|| LabError::InvalidSpec(format!("alphabet mismatch: D({xd}; {r1}) = {obs}")))?;
            let nf = f.tape_size(label)?;
            if *f_tape.get_or_insert(nf) != nf {
                return Err(LabError::InvalidSpec("instances in D's support have different tape sizes".into()));
            }
        }
        let nf = f_tape.unwrap_or(1);
        check_budget(u128::from(nd) * u128::from(nf))?;
        tapes.insert(xd.to_string(), nd * nf);
    }
    let nf = f_tape.unwrap_or(1);
    let (d, inner) = (d.clone(), f.sampler.clone());
    let def = SamplerDef::new(format!("g[{}, {}]", d.name, inner.def.name), tapes, move |xd, r| {
        let head = d.observe(xd, r / nf);
        let label = String::from_utf8_lossy(head.as_bytes()).into_owned();
        Token::pair(&head, &inner.def.observe(&label, r % nf))
    })?;
    FunctionFamily::new(def, f.alphabet)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BVerdict {
    Zero,
    One,
    Bottom,
}

/// Inverter access handed to a reduction: `(y, stream) -> candidate`.
pub type InverterAccess<'a> = dyn FnMut(&Token, &mut SeedStream) -> Option<u64> + 'a;

/// Samples `r2`, tries to invert `f_x(r2)`; `⊥` if that fails, else the reduction's verdict.
pub fn algorithm_b(
    x: &str,
    f: &FunctionFamily,
    inv: &Arc<dyn Inverter>,
    reduction: &mut dyn FnMut(&str, &mut InverterAccess<'_>, &mut SeedStream) -> bool,
    s: &mut SeedStream,
) -> Result<BVerdict> {
    let o = f.oracle(inv.clone());
    let r2 = s.below(f.tape_size(x)?);
    let y = f.eval(x, r2);
    let ok = o.query_handle(x, &y)?.draw(s).is_some_and(|r| f.eval(x, r) == y);
    if !ok {
        return Ok(BVerdict::Bottom);
    }
    let mut access = |y: &Token, s: &mut SeedStream| o.query_handle(x, y).ok().and_then(|q| q.draw(s));
    Ok(if reduction(x, &mut access, s) { BVerdict::One } else { BVerdict::Zero })
}

/// Exact `Pr[algorithm_b = ⊥]`, by enumerating `r2` one tape at a time.
pub fn algorithm_b_bottom(f: &FunctionFamily, inv: &Arc<dyn Inverter>, x: &str) -> Result<Rat> {
    let n = f.tape_size(x)?;
    check_budget(u128::from(n))?;
    let o = f.oracle(inv.clone());
    let s = rat_int(n);
    let mut total = Rat::zero();
    for r2 in 0..n {
        let y = f.eval(x, r2);
        let law = o.tape_law(x, &y)?;
        let hit = rat_int(f.sampler.preimage(x, &y).map_or(0, |p| p.size())) / &s;
        total += &law.fail + &law.uniform * (Rat::one() - hit);
    }
    Ok(total / s)
}

/// One instance size handed to [`package_dti`].
#[derive(Clone, Copy, Debug)]
pub enum DtiTarget<'a> {
    Nizk { spec: &'a NizkSpec, params: &'a DeciderParams },
    Interactive { spec: &'a InteractiveSpec, params: &'a EngineParams },
}

#[derive(Clone, Debug)]
pub struct DtiSize<'a> {
    pub label: String,
    pub target: DtiTarget<'a>,
    pub x_in: String,
    pub x_out: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtiRow {
    pub size: String,
    #[serde(with = "rat_serde")]
    pub accept_in: Rat,
    #[serde(with = "rat_serde")]
    pub accept_out: Rat,
    #[serde(with = "rat_serde")]
    pub gap: Rat,
    #[serde(with = "rat_serde")]
    pub oracle_quality: Rat,
    #[serde(with = "rat_serde")]
    pub shift_bound: Rat,
    /// Majority-vote acceptance, from binomial tails (display precision).
    pub amplified_in: f64,
    pub amplified_out: f64,
    /// Both amplified verdicts are correct with probability at least `1 - 1/p`.
    pub holds: bool,
    /// The oracle shift stays below half the promised gap, so the vote threshold separates.
    pub guarantee: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtiRecord {
    pub decider: String,
    #[serde(with = "rat_serde")]
    pub p: Rat,
    pub amplification: u64,
    pub inverter: String,
    pub rows: Vec<DtiRow>,
}

impl DtiRecord {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Majority repetitions: `ceil(8 p^2 ln p)`.
pub fn amplification_count(p: u64) -> u64 {
    let pf = p as f64;
    (8.0 * pf * pf * pf.ln()).ceil().max(1.0) as u64
}

fn vote_accepts(m: u64, acc: f64, threshold: f64) -> f64 {
    use statrs::distribution::{Binomial, DiscreteCDF};
    let need = (threshold * m as f64).ceil() as u64;
    if need == 0 {
        return 1.0;
    }
    match Binomial::new(acc.clamp(0.0, 1.0), m) {
        Ok(b) => b.sf(need - 1),
        Err(_) => f64::NAN,
    }
}

/// Packages Algorithm 1 or the interactive decider as a decision procedure whose only
/// resource is an inverter for the sampler-derived family. Every size is evaluated
/// exactly with the inverter plugged into the oracle slot, then amplified by a
/// majority vote at the midpoint of the promised acceptance levels
/// `1 - eps_c - eps_zk - 1/(2p)` and `eps_s`.
pub fn package_dti(sizes: &[DtiSize<'_>], p: u64, inverter: &Arc<dyn Inverter>) -> Result<DtiRecord> {
    if p < 2 {
        return Err(LabError::OutOfRange(format!("p = {p} must be at least 2")));
    }
    let kinds: Vec<&str> = sizes
        .iter()
        .map(|s| match s.target {
            DtiTarget::Nizk { .. } => "alg1",
            DtiTarget::Interactive { .. } => "alg7",
        })
        .collect();
    if kinds.windows(2).any(|w| w[0] != w[1]) {
        return Err(LabError::InvalidSpec("all sizes must use the same decider".into()));
    }
    let m = amplification_count(p);
    let pr = rat_int(p);
    let mut rows = Vec::new();
    for size in sizes {
        let (accept_in, accept_out, profile, quality, per_eta) = match size.target {
            DtiTarget::Nizk { spec, params } => {
                let sampler = IndexedSampler::build(nizk_crs_sampler(spec))?;
                let o = UEOracle::with_inverter(sampler, inverter.clone());
                let a = exact_acceptance(NizkDecider::Alg1, spec, &o, &size.x_in, params)?;
                let b = exact_acceptance(NizkDecider::Alg1, spec, &o, &size.x_out, params)?;
                let q = rat_max(&ue_quality(&o, &size.x_in)?, &ue_quality(&o, &size.x_out)?);
                (a, b, measure_nizk_errors(spec)?, q, rat_int(params.reps))
            }
            DtiTarget::Interactive { spec, params } => {
                let sampler = IndexedSampler::build(prefix_sampler(spec))?;
                let o = UEOracle::with_inverter(sampler, inverter.clone());
                let exact = params.clone().with_mode(EstMode::ExactRecursion);
                let a = Engine::new(spec, &o, &size.x_in, exact.clone())?.exact_success(Prefix::EMPTY)?;
                let b = Engine::new(spec, &o, &size.x_out, exact)?.exact_success(Prefix::EMPTY)?;
                let q = rat_max(&ue_quality(&o, &size.x_in)?, &ue_quality(&o, &size.x_out)?);
                let rounds = (0..spec.k()).filter(|j| spec.owner(*j) == Party::Prover).count() as u64;
                (a, b, measure_interactive_errors(spec)?, q, rat_int(rounds * params.ptilde_samples))
            }
        };
        let hi = Rat::one() - &profile.eps_c - &profile.eps_zk - Rat::one() / (rat_int(2) * &pr);
        let lo = profile.eps_s.clone();
        let threshold = to_f64(&((&hi + &lo) / rat_int(2)));
        let shift_bound = &per_eta * &quality;
        let guarantee = hi > lo && shift_bound < (&hi - &lo) / rat_int(2);
        let amplified_in = vote_accepts(m, to_f64(&accept_in), threshold);
        let amplified_out = vote_accepts(m, to_f64(&accept_out), threshold);
        let target = 1.0 - 1.0 / p as f64;
        rows.push(DtiRow {
            size: size.label.clone(),
            gap: &accept_in - &accept_out,
            accept_in,
            accept_out,
            oracle_quality: quality,
            shift_bound,
            amplified_in,
            amplified_out,
            holds: amplified_in >= target && 1.0 - amplified_out >= target,
            guarantee,
        });
    }
    Ok(DtiRecord {
        decider: kinds.first().copied().unwrap_or("alg1").to_string(),
        p: pr,
        amplification: m,
        inverter: inverter.name(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::rat;

    fn injective(bits: u32) -> FunctionFamily {
        let def = SamplerDef::uniform_tapes("id", &["1"], 1 << bits, |_, r| Token::index(r, 2)).unwrap();
        FunctionFamily::new(def, AuxAlphabet::Unary).unwrap()
    }

    fn two_to_one() -> FunctionFamily {
        let def = SamplerDef::uniform_tapes("half", &["0", "1"], 16, |x, r| {
            Token::index(if x == "0" { r / 2 } else { r % 3 }, 1)
        })
        .unwrap();
        FunctionFamily::new(def, AuxAlphabet::Binary).unwrap()
    }

    #[test]
    fn success_of_simple_inverters() {
        let f = injective(8);
        let bf = brute_force_inverter(&f);
        assert_eq!(inversion_success(&f, &bf, "1", Evaluation::Exact).unwrap(), Rat::one());
        let bot: Arc<dyn Inverter> = Arc::new(AlwaysBottom);
        assert!(inversion_success(&f, &bot, "1", Evaluation::Exact).unwrap().is_zero());
        let guess: Arc<dyn Inverter> = Arc::new(RandomGuess);
        assert_eq!(inversion_success(&f, &guess, "1", Evaluation::Exact).unwrap(), rat(1, 256));
    }

    #[test]
    fn monte_carlo_success_is_close_to_exact() {
        let f = two_to_one();
        let inv: Arc<dyn Inverter> = Arc::new(Noisy::new(Arc::new(BruteForce), rat(1, 2)));
        for x in ["0", "1"] {
            let exact = crate::dist::to_f64(&inversion_success(&f, &inv, x, Evaluation::Exact).unwrap());
            let mc = inversion_success(&f, &inv, x, Evaluation::MonteCarlo { trials: 20_000, seed: 3 }).unwrap();
            assert!((crate::dist::to_f64(&mc) - exact).abs() < 0.02);
        }
    }

    #[test]
    fn alphabet_is_checked() {
        let def = SamplerDef::uniform_tapes("bad", &["10"], 2, |_, r| Token::index(r, 1)).unwrap();
        assert!(FunctionFamily::new(def, AuxAlphabet::Unary).is_err());
        let d = SamplerDef::uniform_tapes("d", &[""], 2, |_, _| Token::new(b"2".to_vec())).unwrap();
        assert!(g_construction(&d, &two_to_one()).is_err());
    }

    #[test]
    fn g_with_point_mass_d_matches_the_fixed_instance() {
        let f = two_to_one();
        let d = SamplerDef::uniform_tapes("d", &[""], 1, |_, _| Token::new(b"1".to_vec())).unwrap();
        let g = g_construction(&d, &f).unwrap();
        for inv in [Arc::new(RandomGuess) as Arc<dyn Inverter>, Arc::new(BruteForce)] {
            assert_eq!(
                inversion_success(&g, &inv, "", Evaluation::Exact).unwrap(),
                inversion_success(&f, &inv, "1", Evaluation::Exact).unwrap()
            );
        }
    }

    #[test]
    fn g_success_is_dominated_by_the_best_instance() {
        let f = two_to_one();
        let d = SamplerDef::uniform_tapes("d", &[""], 2, |_, r| Token::new(if r == 0 { b"0" } else { b"1" }.to_vec())).unwrap();
        let g = g_construction(&d, &f).unwrap();
        let invs: Vec<Arc<dyn Inverter>> = vec![
            Arc::new(BruteForce),
            Arc::new(RandomGuess),
            Arc::new(AlwaysBottom),
            Arc::new(Noisy::new(Arc::new(BruteForce), rat(1, 3))),
        ];
        for inv in invs {
            let sg = inversion_success(&g, &inv, "", Evaluation::Exact).unwrap();
            let best = ["0", "1"]
                .iter()
                .map(|x| inversion_success(&f, &inv, x, Evaluation::Exact).unwrap())
                .max()
                .unwrap();
            assert!(sg <= best);
        }
        // A random guess must also hit r1, which D makes a fair coin.
        let guess: Arc<dyn Inverter> = Arc::new(RandomGuess);
        let avg = (inversion_success(&f, &guess, "0", Evaluation::Exact).unwrap()
            + inversion_success(&f, &guess, "1", Evaluation::Exact).unwrap())
            / rat_int(2);
        assert_eq!(inversion_success(&g, &guess, "", Evaluation::Exact).unwrap(), avg / rat_int(2));
        assert_eq!(inversion_success(&g, &brute_force_inverter(&g), "", Evaluation::Exact).unwrap(), Rat::one());
    }

    #[test]
    fn bottom_probability_of_algorithm_b() {
        let f = two_to_one();
        let partial: Arc<dyn Inverter> = Arc::new(Partial {
            success: [("0".to_string(), rat(3, 4))].into(),
            default: rat(1, 5),
        });
        assert_eq!(algorithm_b_bottom(&f, &partial, "0").unwrap(), rat(1, 4));
        assert_eq!(algorithm_b_bottom(&f, &partial, "1").unwrap(), rat(4, 5));
        let bot: Arc<dyn Inverter> = Arc::new(AlwaysBottom);
        let mut s = SeedStream::new(9);
        let mut never = |_: &str, _: &mut InverterAccess<'_>, _: &mut SeedStream| -> bool { unreachable!() };
        for _ in 0..50 {
            assert_eq!(algorithm_b("0", &f, &bot, &mut never, &mut s).unwrap(), BVerdict::Bottom);
        }
        let bf = brute_force_inverter(&f);
        let mut label = |x: &str, _: &mut InverterAccess<'_>, _: &mut SeedStream| x == "1";
        for _ in 0..50 {
            assert_eq!(algorithm_b("1", &f, &bf, &mut label, &mut s).unwrap(), BVerdict::One);
            assert_eq!(algorithm_b("0", &f, &bf, &mut label, &mut s).unwrap(), BVerdict::Zero);
        }
    }
    #[test]
    fn dti_record_on_the_counterexample() {
        use crate::protocol::{build_counterexample, SoundVariant};
        let spec = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 1024), SoundVariant::Derandomized).unwrap();
        let params = DeciderParams::from_formulas(1, 8).with_reps(64);
        let size = DtiSize {
            label: "n=1".into(),
            target: DtiTarget::Nizk { spec: &spec, params: &params },
            x_in: "x1".into(),
            x_out: "x0".into(),
        };
        let exact = package_dti(std::slice::from_ref(&size), 8, &brute_force_inverter_any()).unwrap();
        assert_eq!(exact.amplification, 1065);
        let row = &exact.rows[0];
        assert!(row.holds && row.guarantee, "{row:?}");
        assert!(row.oracle_quality.is_zero());

        let eta = Rat::one() / rat_int(40 * 64);
        let noisy: Arc<dyn Inverter> = Arc::new(Noisy::new(Arc::new(BruteForce), eta));
        let shifted = package_dti(std::slice::from_ref(&size), 8, &noisy).unwrap();
        let d = &shifted.rows[0].gap - &row.gap;
        assert!(d.clone() <= rat(1, 40) && -d <= rat(1, 40));

        let useless: Arc<dyn Inverter> = Arc::new(Noisy::new(Arc::new(BruteForce), Rat::one()));
        let none = package_dti(std::slice::from_ref(&size), 8, &useless).unwrap();
        assert!(!none.rows[0].guarantee);
    }

    fn brute_force_inverter_any() -> Arc<dyn Inverter> {
        Arc::new(BruteForce)
    }

    #[test]
    fn dti_record_on_the_interactive_demo() {
        use crate::protocol::{build_demo_interactive, ErrorProfile};
        let spec = build_demo_interactive(3, &ErrorProfile::target(Rat::zero(), rat(1, 4), rat(1, 2)).unwrap()).unwrap();
        let params = EngineParams::desk(3, 4, 8, 4);
        let size = DtiSize {
            label: "k=3".into(),
            target: DtiTarget::Interactive { spec: &spec, params: &params },
            x_in: "x1".into(),
            x_out: "x0".into(),
        };
        let rec = package_dti(&[size], 8, &brute_force_inverter_any()).unwrap();
        assert_eq!(rec.decider, "alg7");
        assert_eq!(rec.rows[0].accept_out, rat(1, 4));
        assert!(rec.rows[0].holds, "{:?}", rec.rows[0]);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(serde_json::from_str::<DtiRecord>(&json).unwrap(), rec);
    }
}
