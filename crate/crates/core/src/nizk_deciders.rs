//! Deciders that reverse-sample a NIZK simulator on a crs from Gen.
//!
//! `ow` takes one reverse sample, `chk` first rejects crs values the simulator
//! over-produces, and `alg1` repeats the reverse sample `T` times on the same crs and
//! accepts if any simulated proof verifies. `alg2` is the distinguisher built from the
//! same counting idea. Every decider has an exact acceptance formula next to its
//! sampling form.

use std::collections::BTreeMap;

use num::traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::{binomial_cdf, fmt_rat, rat, rat_int, rat_pow, rat_serde, ExactDist, Rat, SeedStream, Token};
use crate::error::{LabError, Result};
use crate::extrapolation::UEOracle;
use crate::protocol::{measure_nizk_errors, ErrorProfile, NizkSpec};
use crate::report::{Check, Estimate, Evaluation, GapReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeciderParams {
    /// Size parameter the formulas are instantiated at.
    pub n: u64,
    pub p: Rat,
    /// Repetitions `T` of the reverse-sampling loop.
    pub reps: u64,
    pub bad_threshold: Rat,
    pub good_threshold: Rat,
    pub count_cutoff: Rat,
    pub dist_reps: u64,
    /// Soundness error assumed by the crs check; `None` uses the measured value.
    pub chk_eps_s: Option<Rat>,
}

impl DeciderParams {
    /// `T = 20np`, thresholds `1/(20p)` and `1/(10p)`, cutoff `1.5n`.
    pub fn from_formulas(n: u64, p: u64) -> Self {
        let pr = rat_int(p);
        DeciderParams {
            n,
            reps: 20 * n * p,
            bad_threshold: rat(1, 20) / &pr,
            good_threshold: rat(1, 10) / &pr,
            count_cutoff: rat(3, 2) * rat_int(n),
            dist_reps: 20 * n * p,
            p: pr,
            chk_eps_s: None,
        }
    }

    pub fn with_reps(mut self, t: u64) -> Self {
        self.reps = t;
        self
    }

    pub fn with_eps_s(mut self, eps_s: Rat) -> Self {
        self.chk_eps_s = Some(eps_s);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 || self.dist_reps == 0 {
            return Err(LabError::OutOfRange("repetition counts must be positive".into()));
        }
        if self.bad_threshold >= self.good_threshold {
            return Err(LabError::OutOfRange("badness threshold must be below goodness threshold".into()));
        }
        if self.p <= Rat::zero() {
            return Err(LabError::OutOfRange("p must be positive".into()));
        }
        Ok(())
    }

    fn cutoff(&self) -> u64 {
        self.count_cutoff.floor().to_integer().to_u64().unwrap_or(0)
    }

    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("n".into(), self.n.to_string());
        m.insert("p".into(), fmt_rat(&self.p));
        m.insert("T".into(), self.reps.to_string());
        m.insert("bad_threshold".into(), fmt_rat(&self.bad_threshold));
        m.insert("good_threshold".into(), fmt_rat(&self.good_threshold));
        m.insert("count_cutoff".into(), fmt_rat(&self.count_cutoff));
        m.insert("dist_reps".into(), self.dist_reps.to_string());
        if let Some(e) = &self.chk_eps_s {
            m.insert("chk_eps_s".into(), fmt_rat(e));
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NizkDecider {
    Ow,
    Chk,
    Alg1,
}

impl NizkDecider {
    pub const ALL: [NizkDecider; 3] = [NizkDecider::Ow, NizkDecider::Chk, NizkDecider::Alg1];

    pub fn name(self) -> &'static str {
        match self {
            NizkDecider::Ow => "ow",
            NizkDecider::Chk => "chk",
            NizkDecider::Alg1 => "alg1",
        }
    }
}

fn sim_of<'a>(spec: &'a NizkSpec, x: &str) -> Result<&'a crate::protocol::TapeTable<(Token, Token)>> {
    spec.sim.get(x).ok_or_else(|| LabError::InvalidSpec(format!("no simulator for {x}")))
}

/// Probability that one reverse-sampling iteration on `crs` yields an accepted proof.
pub fn crs_accept_prob(spec: &NizkSpec, oracle: &UEOracle, x: &str, crs: &Token) -> Result<Rat> {
    let sim = sim_of(spec, x)?;
    let law = oracle.law_of(x, crs, |r| sim.get(r).1.clone())?;
    Ok(law.outcomes.iter().map(|(proof, w)| w * spec.verify(x, crs, proof)).sum())
}

/// `(crs, Pr_Gen[crs], p_crs)` over Gen's support.
pub fn crs_table(spec: &NizkSpec, oracle: &UEOracle, x: &str) -> Result<Vec<(Token, Rat, Rat)>> {
    spec.gen_law()
        .iter()
        .map(|(crs, w)| Ok((crs.clone(), w.clone(), crs_accept_prob(spec, oracle, x, crs)?)))
        .collect()
}

/// The crs check: reject when `Pr_Sim[crs] / Pr_Gen[crs] > 1/sqrt(eps_s)`.
pub fn chk_passes(spec: &NizkSpec, x: &str, crs: &Token, eps_s: &Rat) -> Result<bool> {
    let gen = spec.gen_law().prob(crs);
    if gen.is_zero() {
        return Ok(false);
    }
    if eps_s.is_zero() {
        return Ok(true);
    }
    let sim = sim_of(spec, x)?;
    let sim_p: Rat = sim
        .runs()
        .filter(|(_, _, v)| v.0 == *crs)
        .map(|(_, len, _)| rat_int(len))
        .sum::<Rat>()
        / rat_int(sim.size());
    let ratio = sim_p / gen;
    Ok(&ratio * &ratio * eps_s <= Rat::one())
}

fn chk_eps_s(spec: &NizkSpec, params: &DeciderParams) -> Result<Rat> {
    match &params.chk_eps_s {
        Some(e) => Ok(e.clone()),
        None => Ok(measure_nizk_errors(spec)?.eps_s),
    }
}

/// Exact acceptance probability of a decider on `x`.
pub fn exact_acceptance(
    d: NizkDecider,
    spec: &NizkSpec,
    oracle: &UEOracle,
    x: &str,
    params: &DeciderParams,
) -> Result<Rat> {
    params.validate()?;
    let eps_s = if d == NizkDecider::Chk { Some(chk_eps_s(spec, params)?) } else { None };
    let mut total = Rat::zero();
    for (crs, w, p) in crs_table(spec, oracle, x)? {
        let v = match d {
            NizkDecider::Ow => p,
            NizkDecider::Chk => {
                if chk_passes(spec, x, &crs, eps_s.as_ref().expect("set for chk"))? {
                    p
                } else {
                    Rat::zero()
                }
            }
            NizkDecider::Alg1 => Rat::one() - rat_pow(&(Rat::one() - p), params.reps),
        };
        total += w * v;
    }
    Ok(total)
}

fn sample_crs(spec: &NizkSpec, s: &mut SeedStream) -> Token {
    spec.gen.get(s.below(spec.gen.size())).clone()
}

/// One reverse sample and verification; an oracle failure rejects.
fn iteration(spec: &NizkSpec, oracle: &UEOracle, x: &str, crs: &Token, s: &mut SeedStream) -> Result<bool> {
    let sim = sim_of(spec, x)?;
    Ok(match oracle.query_handle(x, crs)?.draw(s) {
        None => false,
        Some(r) => s.bernoulli(spec.verify(x, crs, &sim.get(r).1)),
    })
}

pub fn ow_decider(spec: &NizkSpec, oracle: &UEOracle, x: &str, s: &mut SeedStream) -> Result<bool> {
    let crs = sample_crs(spec, s);
    iteration(spec, oracle, x, &crs, s)
}

pub fn chk_decider(spec: &NizkSpec, oracle: &UEOracle, x: &str, eps_s: &Rat, s: &mut SeedStream) -> Result<bool> {
    let crs = sample_crs(spec, s);
    if !chk_passes(spec, x, &crs, eps_s)? {
        return Ok(false);
    }
    iteration(spec, oracle, x, &crs, s)
}

pub fn alg1_decider(
    spec: &NizkSpec,
    oracle: &UEOracle,
    x: &str,
    params: &DeciderParams,
    s: &mut SeedStream,
) -> Result<bool> {
    let crs = sample_crs(spec, s);
    for _ in 0..params.reps {
        if iteration(spec, oracle, x, &crs, s)? {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn run_decider(
    d: NizkDecider,
    spec: &NizkSpec,
    oracle: &UEOracle,
    x: &str,
    params: &DeciderParams,
    eps_s: &Rat,
    s: &mut SeedStream,
) -> Result<bool> {
    match d {
        NizkDecider::Ow => ow_decider(spec, oracle, x, s),
        NizkDecider::Chk => chk_decider(spec, oracle, x, eps_s, s),
        NizkDecider::Alg1 => alg1_decider(spec, oracle, x, params, s),
    }
}

/// Outputs 1 iff at most `cutoff` of `dist_reps` simulated proofs for the given crs
/// verify and the given pair itself verifies.
pub fn alg2_distinguisher(
    spec: &NizkSpec,
    oracle: &UEOracle,
    x: &str,
    pair: &(Token, Token),
    params: &DeciderParams,
    s: &mut SeedStream,
) -> Result<bool> {
    let mut count = 0u64;
    for _ in 0..params.dist_reps {
        if iteration(spec, oracle, x, &pair.0, s)? {
            count += 1;
        }
    }
    Ok(count <= params.cutoff() && s.bernoulli(spec.verify(x, &pair.0, &pair.1)))
}

/// Exact `Pr[alg2 = 1]` on a fixed pair.
pub fn alg2_exact(spec: &NizkSpec, oracle: &UEOracle, x: &str, pair: &(Token, Token), params: &DeciderParams) -> Result<Rat> {
    let v = spec.verify(x, &pair.0, &pair.1);
    if v.is_zero() {
        return Ok(Rat::zero());
    }
    let p = crs_accept_prob(spec, oracle, x, &pair.0)?;
    Ok(binomial_cdf(params.dist_reps, &p, params.cutoff()) * v)
}

/// Exact `Pr[alg2 = 1]` on pairs drawn from `law`.
pub fn alg2_on_law(
    spec: &NizkSpec,
    oracle: &UEOracle,
    x: &str,
    law: &ExactDist<(Token, Token)>,
    params: &DeciderParams,
) -> Result<Rat> {
    let mut cache: BTreeMap<&Token, Rat> = BTreeMap::new();
    let mut total = Rat::zero();
    for (pair, w) in law.iter() {
        let v = spec.verify(x, &pair.0, &pair.1);
        if v.is_zero() {
            continue;
        }
        if !cache.contains_key(&pair.0) {
            let p = crs_accept_prob(spec, oracle, x, &pair.0)?;
            cache.insert(&pair.0, binomial_cdf(params.dist_reps, &p, params.cutoff()));
        }
        total += w * &cache[&pair.0] * v;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrsClass {
    Bad,
    Middle,
    Good,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrsRow {
    pub crs: Token,
    #[serde(with = "rat_serde")]
    pub gen_prob: Rat,
    #[serde(with = "rat_serde")]
    pub p_crs: Rat,
    pub class: CrsClass,
}

pub fn crs_badness(spec: &NizkSpec, oracle: &UEOracle, x: &str, params: &DeciderParams) -> Result<Vec<CrsRow>> {
    Ok(crs_table(spec, oracle, x)?
        .into_iter()
        .map(|(crs, gen_prob, p_crs)| {
            let class = if p_crs <= params.bad_threshold {
                CrsClass::Bad
            } else if p_crs >= params.good_threshold {
                CrsClass::Good
            } else {
                CrsClass::Middle
            };
            CrsRow { crs, gen_prob, p_crs, class }
        })
        .collect())
}

/// `Pr_Gen[crs bad] <= eps_zk + eps_c + 1/(4p)` on an in-language instance.
pub fn bad_crs_bound(
    spec: &NizkSpec,
    oracle: &UEOracle,
    x: &str,
    params: &DeciderParams,
    profile: &ErrorProfile,
) -> Result<Check> {
    let bad: Rat = crs_badness(spec, oracle, x, params)?
        .into_iter()
        .filter(|r| r.class == CrsClass::Bad)
        .map(|r| r.gen_prob)
        .sum();
    let bound = &profile.eps_zk + &profile.eps_c + rat(1, 4) / &params.p;
    Ok(Check::new(
        format!("bad-crs mass on {x}"),
        bad <= bound,
        format!("Pr[bad] = {} <= {}", fmt_rat(&bad), fmt_rat(&bound)),
    ))
}

/// Acceptance of every decider on `x_in` and `x_out`. Exact mode also checks the
/// bad-crs bound on `x_in`.
pub fn nizk_gap_experiment(
    spec: &NizkSpec,
    oracle: &UEOracle,
    params: &DeciderParams,
    x_in: &str,
    x_out: &str,
    how: Evaluation,
) -> Result<Vec<GapReport>> {
    params.validate()?;
    for (x, want) in [(x_in, true), (x_out, false)] {
        if spec.instance(x)?.in_language != want {
            return Err(LabError::InvalidSpec(format!("{x} is labeled with the wrong membership")));
        }
    }
    let profile = measure_nizk_errors(spec)?;
    let eps_s = params.chk_eps_s.clone().unwrap_or_else(|| profile.eps_s.clone());
    let params = params.clone().with_eps_s(eps_s.clone());
    let mut echo = params.echo();
    echo.insert("spec".into(), spec.name.clone());
    echo.insert("oracle".into(), oracle.describe());
    let mut root = how.seed().map(SeedStream::new);
    let mut out = Vec::new();
    for d in NizkDecider::ALL {
        let mut acc = |x: &str| -> Result<Estimate> {
            match (how, root.as_mut()) {
                (Evaluation::MonteCarlo { trials, .. }, Some(root)) => {
                    let mut s = root.fork();
                    let mut hits = 0;
                    for _ in 0..trials {
                        if run_decider(d, spec, oracle, x, &params, &eps_s, &mut s)? {
                            hits += 1;
                        }
                    }
                    Ok(Estimate::frequency(hits, trials))
                }
                _ => Ok(Estimate::exact(exact_acceptance(d, spec, oracle, x, &params)?)),
            }
        };
        let a_in = acc(x_in)?;
        let a_out = acc(x_out)?;
        let mut r = GapReport::new(d.name(), (x_in, a_in), (x_out, a_out), how, echo.clone());
        if how == Evaluation::Exact && d == NizkDecider::Alg1 {
            r.checks.push(bad_crs_bound(spec, oracle, x_in, &params, &profile)?);
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Signed;
    use crate::extrapolation::{make_exact_ue, nizk_crs_sampler, perturb_ue};
    use crate::protocol::{build_counterexample, build_ideal_nizk, build_trivial_protocol, SoundVariant};

    fn oracle(spec: &NizkSpec) -> UEOracle {
        make_exact_ue(nizk_crs_sampler(spec)).unwrap()
    }

    fn acc(d: NizkDecider, spec: &NizkSpec, x: &str, params: &DeciderParams) -> Rat {
        exact_acceptance(d, spec, &oracle(spec), x, params).unwrap()
    }

    #[test]
    fn reverse_sampling_is_fooled_by_the_counterexample() {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), Rat::zero(), SoundVariant::Derandomized).unwrap();
        let params = DeciderParams::from_formulas(2, 4);
        for d in [NizkDecider::Ow, NizkDecider::Chk] {
            assert_eq!(acc(d, &spec, "x1", &params), rat(1, 4));
            assert_eq!(acc(d, &spec, "x0", &params), rat(1, 4));
        }
    }

    #[test]
    fn single_reverse_sample_gives_squared_keep_probability() {
        let spec = build_counterexample(rat(3, 10), rat(1, 10), Rat::zero(), SoundVariant::Derandomized).unwrap();
        assert_eq!(acc(NizkDecider::Ow, &spec, "x1", &DeciderParams::from_formulas(1, 4)), rat(49, 100));
    }

    #[test]
    fn repetition_opens_a_gap() {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 1024), SoundVariant::Derandomized).unwrap();
        let params = DeciderParams::from_formulas(1, 4).with_reps(64);
        let a_in = acc(NizkDecider::Alg1, &spec, "x1", &params);
        let a_out = acc(NizkDecider::Alg1, &spec, "x0", &params);
        assert_eq!(a_out, rat(1, 4));
        assert!((&a_in - rat(1, 2)).abs() < rat_pow(&rat(1, 2), 50));
        assert!(a_in - a_out >= rat(1, 5));
    }

    #[test]
    fn one_repetition_is_the_baseline() {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 64), SoundVariant::Randomized).unwrap();
        let params = DeciderParams::from_formulas(1, 4).with_reps(1);
        for x in ["x1", "x0"] {
            assert_eq!(acc(NizkDecider::Alg1, &spec, x, &params), acc(NizkDecider::Ow, &spec, x, &params));
        }
    }

    #[test]
    fn trivial_protocols_have_no_gap() {
        let spec = build_trivial_protocol(rat(1, 3), rat(1, 3), rat(1, 3)).unwrap();
        for t in [1, 7, 64] {
            let params = DeciderParams::from_formulas(1, 4).with_reps(t);
            for d in NizkDecider::ALL {
                assert_eq!(acc(d, &spec, "x1", &params), acc(d, &spec, "x0", &params));
            }
        }
    }

    #[test]
    fn ideal_spec() {
        let spec = build_ideal_nizk().unwrap();
        let params = DeciderParams::from_formulas(1, 4);
        let reports = nizk_gap_experiment(&spec, &oracle(&spec), &params, "x1", "x0", Evaluation::Exact).unwrap();
        for r in &reports {
            assert_eq!(r.accept_in.value, Rat::one());
            assert_eq!(r.gap.value, Rat::one());
        }
        let rows = crs_badness(&spec, &oracle(&spec), "x1", &params).unwrap();
        assert!(rows.iter().all(|r| r.class == CrsClass::Good));
    }

    #[test]
    fn crs_check_rejects_overproduced_crs() {
        // Gen puts 1/16 on "accept"; Sim puts 1/2 there, which is 8 = 2/sqrt(1/16) times heavier.
        let spec = build_trivial_protocol(rat(7, 16), rat(1, 16), rat(1, 2)).unwrap();
        let mut spec = spec;
        let sim = spec.sim["x0"].clone();
        let half = sim.size() / 2;
        let acc_tok = Token::new(*b"accept");
        let tweaked = crate::protocol::TapeTable::from_fn(sim.size(), |t| {
            if t < half { (acc_tok.clone(), Token::empty()) } else { sim.get(t).clone() }
        })
        .unwrap();
        spec.sim.insert("x0".into(), tweaked);
        assert!(!chk_passes(&spec, "x0", &acc_tok, &rat(1, 16)).unwrap());
        let o = make_exact_ue(nizk_crs_sampler(&spec)).unwrap();
        let mut s = SeedStream::new(5);
        for _ in 0..200 {
            let crs = sample_crs(&spec, &mut s.clone());
            let v = chk_decider(&spec, &o, "x0", &rat(1, 16), &mut s).unwrap();
            if crs == acc_tok {
                assert!(!v);
            }
        }
    }

    #[test]
    fn classification_of_counterexample_crs() {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 1024), SoundVariant::Randomized).unwrap();
        let params = DeciderParams::from_formulas(1, 4);
        let rows = crs_badness(&spec, &oracle(&spec), "x1", &params).unwrap();
        for r in rows {
            match r.crs.0[0] {
                0 => assert_eq!(r.class, CrsClass::Good),
                _ => {
                    assert!(r.p_crs.is_zero());
                    assert_eq!(r.class, CrsClass::Bad);
                }
            }
        }
    }

    #[test]
    fn distinguisher_on_simulated_and_real_pairs() {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 1024), SoundVariant::Derandomized).unwrap();
        let o = oracle(&spec);
        let params = DeciderParams::from_formulas(1, 4);
        let sim = alg2_on_law(&spec, &o, "x1", &spec.sim_law("x1"), &params).unwrap();
        assert!(sim <= rat(1, 20));
        let real = alg2_on_law(&spec, &o, "x1", &spec.real_law("x1").unwrap(), &params).unwrap();
        assert!(real >= rat(1, 2) - rat(1, 80));
        let bad_pair = (crate::protocol::counterexample_crs(1, Some(0)), Token::byte(0));
        assert!(alg2_exact(&spec, &o, "x1", &bad_pair, &params).unwrap().is_zero());
        let mut s = SeedStream::new(11);
        assert!(!alg2_distinguisher(&spec, &o, "x1", &bad_pair, &params, &mut s).unwrap());
    }

    #[test]
    fn perturbed_oracle_shift_is_bounded() {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 1024), SoundVariant::Derandomized).unwrap();
        let params = DeciderParams::from_formulas(1, 4).with_reps(16);
        let exact = oracle(&spec);
        for eta in [rat(1, 256), rat(1, 64), rat(1, 16)] {
            let noisy = perturb_ue(&exact, eta.clone(), 1).unwrap();
            for x in ["x1", "x0"] {
                let a = exact_acceptance(NizkDecider::Alg1, &spec, &exact, x, &params).unwrap();
                let b = exact_acceptance(NizkDecider::Alg1, &spec, &noisy, x, &params).unwrap();
                assert!((a - b).abs() <= rat_int(params.reps) * &eta);
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 64), SoundVariant::Derandomized).unwrap();
        let o = oracle(&spec);
        let params = DeciderParams::from_formulas(1, 2).with_reps(8);
        let exact = nizk_gap_experiment(&spec, &o, &params, "x1", "x0", Evaluation::Exact).unwrap();
        let mc = nizk_gap_experiment(&spec, &o, &params, "x1", "x0", Evaluation::MonteCarlo { trials: 4000, seed: 2 }).unwrap();
        for (e, m) in exact.iter().zip(&mc) {
            for (a, b) in [(&e.accept_in, &m.accept_in), (&e.accept_out, &m.accept_out)] {
                let [lo, hi] = b.interval.unwrap();
                assert!(lo <= a.float && a.float <= hi, "{} {} not in [{lo},{hi}]", e.decider, a.float);
            }
        }
        assert!(exact.iter().all(GapReport::all_checks_hold));
    }
}
