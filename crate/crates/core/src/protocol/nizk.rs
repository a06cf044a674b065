use std::collections::BTreeMap;

use num::integer::Integer;
use num::traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::tape::{check_budget, TapeTable};
use super::{instance_index, ErrorProfile, Instance, Mode};
use crate::dist::{fmt_rat, is_probability, rat_int, rat_max, tv_distance, ExactDist, Rat, Token};
use crate::error::{LabError, Result};

/// Acceptance probabilities for one crs. A deterministic verifier only uses 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrsRule {
    pub default: Rat,
    pub proofs: BTreeMap<Token, Rat>,
}

impl CrsRule {
    pub fn constant(v: Rat) -> Self {
        CrsRule { default: v, proofs: BTreeMap::new() }
    }

    pub fn only(proof: Token) -> Self {
        let mut proofs = BTreeMap::new();
        proofs.insert(proof, Rat::one());
        CrsRule { default: Rat::zero(), proofs }
    }

    /// Acceptance of the best proof. The proof space is open, so the default counts.
    pub fn best(&self) -> Rat {
        self.proofs.values().fold(self.default.clone(), |a, v| rat_max(&a, v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierTable {
    pub default: Rat,
    pub by_crs: BTreeMap<Token, CrsRule>,
}

impl VerifierTable {
    pub fn accept(&self, crs: &Token, proof: &Token) -> &Rat {
        match self.by_crs.get(crs) {
            Some(rule) => rule.proofs.get(proof).unwrap_or(&rule.default),
            None => &self.default,
        }
    }

    pub fn best(&self, crs: &Token) -> Rat {
        self.by_crs.get(crs).map_or_else(|| self.default.clone(), CrsRule::best)
    }

    fn values(&self) -> impl Iterator<Item = &Rat> {
        std::iter::once(&self.default).chain(
            self.by_crs
                .values()
                .flat_map(|r| std::iter::once(&r.default).chain(r.proofs.values())),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SoundVariant {
    /// The out-of-language verifier accepts with probability `eps_s` on its own coins.
    Randomized,
    /// The crs carries extra uniform coordinates and acceptance is a fixed
    /// `eps_s`-fraction of crs values.
    Derandomized,
}

/// A non-interactive argument over finite tape spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NizkSpec {
    pub name: String,
    pub instances: Vec<Instance>,
    pub gen: TapeTable<Token>,
    pub prover_tape: u64,
    /// instance -> crs -> proof table over the prover tape. In-language instances only.
    pub prover: BTreeMap<String, BTreeMap<Token, TapeTable<Token>>>,
    pub verifier: BTreeMap<String, VerifierTable>,
    pub sim: BTreeMap<String, TapeTable<(Token, Token)>>,
}

impl NizkSpec {
    pub fn validate(&self) -> Result<()> {
        let gen_crs = self.gen.counts();
        for inst in &self.instances {
            let v = self
                .verifier
                .get(&inst.label)
                .ok_or_else(|| LabError::InvalidSpec(format!("no verifier for {}", inst.label)))?;
            if v.values().any(|p| !is_probability(p)) {
                return Err(LabError::InvalidSpec(format!("verifier of {} leaves [0,1]", inst.label)));
            }
            let s = self
                .sim
                .get(&inst.label)
                .ok_or_else(|| LabError::InvalidSpec(format!("no simulator for {}", inst.label)))?;
            check_budget(u128::from(s.size()))?;
            if inst.in_language {
                if inst.witness.is_none() {
                    return Err(LabError::InvalidSpec(format!("{} has no witness", inst.label)));
                }
                let p = self
                    .prover
                    .get(&inst.label)
                    .ok_or_else(|| LabError::InvalidSpec(format!("no prover for {}", inst.label)))?;
                for crs in gen_crs.keys() {
                    let t = p.get(crs).ok_or_else(|| {
                        LabError::InvalidSpec(format!("prover of {} misses crs {crs}", inst.label))
                    })?;
                    if t.size() != self.prover_tape {
                        return Err(LabError::InvalidSpec("prover table size mismatch".into()));
                    }
                }
            }
        }
        check_budget(u128::from(self.gen.size()))?;
        check_budget(u128::from(self.prover_tape))?;
        Ok(())
    }

    pub fn instance(&self, label: &str) -> Result<&Instance> {
        Ok(&self.instances[instance_index(&self.instances, label)?])
    }

    pub fn verify(&self, x: &str, crs: &Token, proof: &Token) -> &Rat {
        self.verifier[x].accept(crs, proof)
    }

    pub fn is_deterministic(&self) -> bool {
        self.verifier
            .values()
            .all(|v| v.values().all(|p| p.is_zero() || p.is_one()))
    }

    pub fn gen_law(&self) -> ExactDist<Token> {
        self.gen.law()
    }

    /// Joint law of (crs, honest proof) for an in-language instance.
    pub fn real_law(&self, x: &str) -> Result<ExactDist<(Token, Token)>> {
        let tables = self
            .prover
            .get(x)
            .ok_or_else(|| LabError::InvalidSpec(format!("{x} has no honest prover")))?;
        let mut pairs: BTreeMap<(Token, Token), Rat> = BTreeMap::new();
        for (crs, w) in self.gen_law().iter() {
            for (proof, q) in tables[crs].law().iter() {
                *pairs.entry((crs.clone(), proof.clone())).or_insert_with(Rat::zero) += w * q;
            }
        }
        ExactDist::new(pairs)
    }

    pub fn sim_law(&self, x: &str) -> ExactDist<(Token, Token)> {
        self.sim[x].law()
    }

    /// `Pr[V accepts]` for the honest prover on `x`.
    pub fn honest_acceptance(&self, x: &str) -> Result<Rat> {
        let real = self.real_law(x)?;
        Ok(real.expect(|(c, p)| self.verify(x, c, p).clone()))
    }

    /// Best-proof acceptance on `x`.
    pub fn soundness_value(&self, x: &str) -> Rat {
        let v = &self.verifier[x];
        self.gen_law().expect(|crs| v.best(crs))
    }
}

/// `eps_c`, `eps_s` and `eps_zk` by enumeration. Soundness is the unbounded-prover value
/// and zero-knowledge is total variation, so both upper-bound any efficient adversary.
pub fn measure_nizk_errors(spec: &NizkSpec) -> Result<ErrorProfile> {
    spec.validate()?;
    let mut eps_c = Rat::zero();
    let mut eps_s = Rat::zero();
    let mut eps_zk = Rat::zero();
    for inst in &spec.instances {
        if inst.in_language {
            let rej = Rat::one() - spec.honest_acceptance(&inst.label)?;
            eps_c = rat_max(&eps_c, &rej);
            let tv = tv_distance(&spec.real_law(&inst.label)?, &spec.sim_law(&inst.label));
            eps_zk = rat_max(&eps_zk, &tv);
        } else {
            eps_s = rat_max(&eps_s, &spec.soundness_value(&inst.label));
        }
    }
    ErrorProfile::new(
        eps_c,
        eps_s,
        eps_zk,
        Mode::Exact,
        "enumeration; soundness vs unbounded prover; zero-knowledge as total variation",
    )
}

/// As [`measure_nizk_errors`] but the cheating prover picks the false statement after
/// seeing the crs.
pub fn measure_nizk_errors_adaptive(spec: &NizkSpec) -> Result<ErrorProfile> {
    let mut p = measure_nizk_errors(spec)?;
    let outs: Vec<&Instance> = spec.instances.iter().filter(|i| !i.in_language).collect();
    p.eps_s = spec.gen_law().expect(|crs| {
        outs.iter()
            .map(|i| spec.verifier[&i.label].best(crs))
            .fold(Rat::zero(), |a, b| rat_max(&a, &b))
    });
    p.notes.push_str("; adaptive soundness");
    Ok(p)
}

fn denom_u64(r: &Rat) -> Result<u64> {
    r.denom()
        .to_u64()
        .ok_or_else(|| LabError::OutOfRange(format!("denominator of {} too large", fmt_rat(r))))
}

/// Number of tapes out of `den` carrying weight `w`.
fn share(w: &Rat, den: u64) -> u64 {
    (w * rat_int(den)).to_integer().to_u64().expect("weight fits tape space")
}

fn check_open_unit(name: &str, v: &Rat) -> Result<()> {
    if *v <= Rat::zero() || *v >= Rat::one() {
        return Err(LabError::OutOfRange(format!("{name} = {} not in (0,1)", fmt_rat(v))));
    }
    Ok(())
}

const REJECT: &[u8] = b"reject";
const ACCEPT: &[u8] = b"accept";
const CLEAR: &[u8] = b"clear";

/// Two labeled instances used by every NIZK fixture.
fn fixture_instances() -> Vec<Instance> {
    vec![Instance::yes("x1", Token::new(*b"w1")), Instance::no("x0")]
}

/// Mixture of an always-reject, an always-accept and a witness-in-clear protocol,
/// chosen by the crs with weights `eps_c`, `eps_s`, `eps_zk`.
pub fn build_trivial_protocol(eps_c: Rat, eps_s: Rat, eps_zk: Rat) -> Result<NizkSpec> {
    for (n, v) in [("eps_c", &eps_c), ("eps_s", &eps_s), ("eps_zk", &eps_zk)] {
        if !is_probability(v) {
            return Err(LabError::OutOfRange(format!("{n} = {} not in [0,1]", fmt_rat(v))));
        }
    }
    let sum = &eps_c + &eps_s + &eps_zk;
    if !sum.is_one() {
        return Err(LabError::OutOfRange(format!("errors sum to {}, need 1", fmt_rat(&sum))));
    }
    let den = [&eps_c, &eps_s, &eps_zk]
        .iter()
        .map(|r| denom_u64(r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1u64, |a, b| a.lcm(&b));
    let (rej, acc, clr) = (Token::new(REJECT), Token::new(ACCEPT), Token::new(CLEAR));
    let gen = TapeTable::from_blocks(vec![
        (rej.clone(), share(&eps_c, den)),
        (acc.clone(), share(&eps_s, den)),
        (clr.clone(), share(&eps_zk, den)),
    ])?;
    let instances = fixture_instances();
    let witness = instances[0].witness.clone().expect("x1 has a witness");
    let dummy = Token::new(*b"dummy");

    let mut tables = BTreeMap::new();
    for crs in gen.counts().keys() {
        let proof = if *crs == clr { witness.clone() } else { Token::empty() };
        tables.insert(crs.clone(), TapeTable::constant(1, proof)?);
    }
    let mut prover = BTreeMap::new();
    prover.insert("x1".to_string(), tables);

    let verifier_for = |in_lang: bool| {
        let mut by_crs = BTreeMap::new();
        by_crs.insert(rej.clone(), CrsRule::constant(Rat::zero()));
        by_crs.insert(acc.clone(), CrsRule::constant(Rat::one()));
        by_crs.insert(
            clr.clone(),
            if in_lang { CrsRule::only(witness.clone()) } else { CrsRule::constant(Rat::zero()) },
        );
        VerifierTable { default: Rat::zero(), by_crs }
    };
    let mut verifier = BTreeMap::new();
    verifier.insert("x1".to_string(), verifier_for(true));
    verifier.insert("x0".to_string(), verifier_for(false));

    let sim_table = gen.map(|crs| {
        let proof = if *crs == clr { dummy.clone() } else { Token::empty() };
        (crs.clone(), proof)
    });
    let mut sim = BTreeMap::new();
    sim.insert("x1".to_string(), sim_table.clone());
    sim.insert("x0".to_string(), sim_table);

    let spec = NizkSpec {
        name: format!("trivial({},{},{})", fmt_rat(&eps_c), fmt_rat(&eps_s), fmt_rat(&eps_zk)),
        instances,
        gen,
        prover_tape: 1,
        prover,
        verifier,
        sim,
    };
    spec.validate()?;
    Ok(spec)
}

/// The crs of the counterexample: the bit, plus an extra uniform coordinate in the
/// derandomized variant.
pub fn counterexample_crs(bit: u8, extra: Option<u64>) -> Token {
    match extra {
        None => Token::byte(bit),
        Some(e) => {
            let mut v = vec![bit];
            v.extend_from_slice(&(e as u32).to_be_bytes());
            Token(v)
        }
    }
}

/// A protocol whose simulator outputs crs 1 only with probability `delta`, so that
/// reverse-sampling the simulator on a crs 1 from Gen yields a failing proof.
///
/// Gen: crs bit 0 w.p. `1 - eps_zk`, 1 w.p. `eps_zk`; honest proof = crs bit.
/// Sim: (0,0) w.p. `1 - eps_zk`, (0,1) w.p. `eps_zk - delta`, (1,0) w.p. `delta`.
pub fn build_counterexample(
    eps_zk: Rat,
    eps_s: Rat,
    delta: Rat,
    variant: SoundVariant,
) -> Result<NizkSpec> {
    check_open_unit("eps_zk", &eps_zk)?;
    check_open_unit("eps_s", &eps_s)?;
    if delta < Rat::zero() || delta > eps_zk {
        return Err(LabError::OutOfRange(format!(
            "delta = {} not in [0, eps_zk]",
            fmt_rat(&delta)
        )));
    }
    let one = Rat::one();
    let keep = &one - &eps_zk;
    // Accepting crs values for x0 fill the bit-0 part first.
    let (frac0, frac1) = if eps_s <= keep {
        (&eps_s / &keep, Rat::zero())
    } else {
        (one.clone(), (&eps_s - &keep) / &eps_zk)
    };
    let extra = match variant {
        SoundVariant::Randomized => None,
        SoundVariant::Derandomized => Some(denom_u64(&frac0)?.lcm(&denom_u64(&frac1)?)),
    };
    let b = extra.unwrap_or(1);
    let crs_of = |bit: u8, e: u64| counterexample_crs(bit, extra.map(|_| e));

    let gd = denom_u64(&eps_zk)?;
    check_budget(u128::from(gd) * u128::from(b))?;
    let gen_bits = TapeTable::from_blocks(vec![(0u8, share(&keep, gd)), (1u8, share(&eps_zk, gd))])?;
    let gen = TapeTable::from_fn(gd * b, |t| crs_of(*gen_bits.get(t / b), t % b))?;

    let sd = [&keep, &(&eps_zk - &delta), &delta]
        .iter()
        .map(|r| denom_u64(r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1u64, |a, c| a.lcm(&c));
    check_budget(u128::from(sd) * u128::from(b))?;
    let sim_pairs = TapeTable::from_blocks(vec![
        ((0u8, 0u8), share(&keep, sd)),
        ((0, 1), share(&(&eps_zk - &delta), sd)),
        ((1, 0), share(&delta, sd)),
    ])?;
    let sim_table = TapeTable::from_fn(sd * b, |t| {
        let (bit, pi) = *sim_pairs.get(t / b);
        (crs_of(bit, t % b), Token::byte(pi))
    })?;

    let instances = fixture_instances();
    let mut tables = BTreeMap::new();
    let mut v_in = BTreeMap::new();
    let mut v_out = BTreeMap::new();
    let accept_below = |f: &Rat| share(f, b);
    for bit in [0u8, 1] {
        for e in 0..b {
            let crs = crs_of(bit, e);
            tables.insert(crs.clone(), TapeTable::constant(1, Token::byte(bit))?);
            v_in.insert(crs.clone(), CrsRule::only(Token::byte(bit)));
            if extra.is_some() {
                let cut = accept_below(if bit == 0 { &frac0 } else { &frac1 });
                let v = if e < cut { Rat::one() } else { Rat::zero() };
                v_out.insert(crs, CrsRule::constant(v));
            }
        }
    }
    let mut prover = BTreeMap::new();
    prover.insert("x1".to_string(), tables);
    let mut verifier = BTreeMap::new();
    verifier.insert("x1".to_string(), VerifierTable { default: Rat::zero(), by_crs: v_in });
    let out_default = if extra.is_some() { Rat::zero() } else { eps_s.clone() };
    verifier.insert("x0".to_string(), VerifierTable { default: out_default, by_crs: v_out });
    let mut sim = BTreeMap::new();
    sim.insert("x1".to_string(), sim_table.clone());
    sim.insert("x0".to_string(), sim_table);

    let spec = NizkSpec {
        name: format!(
            "counterexample(eps_zk={},eps_s={},delta={},{})",
            fmt_rat(&eps_zk),
            fmt_rat(&eps_s),
            fmt_rat(&delta),
            match variant {
                SoundVariant::Randomized => "randomized",
                SoundVariant::Derandomized => "derandomized",
            }
        ),
        instances,
        gen,
        prover_tape: 1,
        prover,
        verifier,
        sim,
    };
    spec.validate()?;
    Ok(spec)
}

/// One crs, one accepted proof for `x1`, nothing accepted for `x0`, and a perfect
/// simulator.
pub fn build_ideal_nizk() -> Result<NizkSpec> {
    let crs = Token::new(*b"crs");
    let ok = Token::new(*b"ok");
    let gen = TapeTable::constant(1, crs.clone())?;
    let mut tables = BTreeMap::new();
    tables.insert(crs.clone(), TapeTable::constant(1, ok.clone())?);
    let mut prover = BTreeMap::new();
    prover.insert("x1".to_string(), tables);
    let mut by_crs = BTreeMap::new();
    by_crs.insert(crs.clone(), CrsRule::only(ok.clone()));
    let mut verifier = BTreeMap::new();
    verifier.insert("x1".to_string(), VerifierTable { default: Rat::zero(), by_crs });
    verifier.insert(
        "x0".to_string(),
        VerifierTable { default: Rat::zero(), by_crs: BTreeMap::new() },
    );
    let sim_table = TapeTable::constant(1, (crs, ok))?;
    let mut sim = BTreeMap::new();
    sim.insert("x1".to_string(), sim_table.clone());
    sim.insert("x0".to_string(), sim_table);
    let spec = NizkSpec {
        name: "ideal".into(),
        instances: fixture_instances(),
        gen,
        prover_tape: 1,
        prover,
        verifier,
        sim,
    };
    spec.validate()?;
    Ok(spec)
}
