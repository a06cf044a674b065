//! Estimator-driven cheating prover for public-coin protocols, the round-wise
//! distinguisher, hybrid transcripts, and the decider that plays the prover against
//! the verifier.
//!
//! The prover `P~` extends a transcript by drawing candidate next messages from an
//! extrapolation oracle over simulator prefixes and keeping the candidate with the
//! highest estimated success. `Est` estimates success by playing `P~` against the
//! (stateless) verifier from the given transcript.
//!
//! Whenever the estimates of all candidates are exact (exact-recursion mode, or the
//! candidates complete the transcript) the prover's output law is computed in closed
//! form and sampled directly.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num::traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{fmt_rat, rat, rat_int, rat_pow, short_rat, to_f64, Rat, SeedStream};
use crate::error::{LabError, Result};
use crate::extrapolation::{prefix_token, UEOracle};
use crate::protocol::{measure_interactive_errors, InteractiveSpec, Party, Prefix, Transcript};
use crate::report::{Check, Estimate, Evaluation, GapReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstMode {
    ExactRecursion,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineParams {
    pub k: usize,
    pub n: u64,
    pub p: Rat,
    pub p_est: Rat,
    pub ptilde_samples: u64,
    pub est_trials: u64,
    pub dist_samples: u64,
    pub dist_cutoff: u64,
    pub mode: EstMode,
    /// One estimate per distinct message within a prover or distinguisher call.
    pub share_estimates: bool,
}

impl EngineParams {
    /// `pEst = 256 k^2 n p^2`, `16knp` prover samples, `12 pEst^4` trials (saturating),
    /// `8knp` distinguisher samples, cutoff `n`.
    pub fn from_formulas(k: usize, n: u64, p: u64) -> Self {
        let p_est = 256 * (k as u64).pow(2) * n * p * p;
        Self::desk(k, n, p, p_est)
    }

    /// As [`from_formulas`](Self::from_formulas) with a smaller stand-in for `pEst`.
    pub fn desk(k: usize, n: u64, p: u64, p_est: u64) -> Self {
        let kk = k as u64;
        let trials = p_est.checked_pow(4).and_then(|v| v.checked_mul(12)).unwrap_or(u64::MAX);
        EngineParams {
            k,
            n,
            p: rat_int(p),
            p_est: rat_int(p_est),
            ptilde_samples: 16 * kk * n * p,
            est_trials: trials,
            dist_samples: 8 * kk * n * p,
            dist_cutoff: n,
            mode: EstMode::MonteCarlo,
            share_estimates: true,
        }
    }

    pub fn with_mode(mut self, mode: EstMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_est_trials(mut self, t: u64) -> Self {
        self.est_trials = t;
        self
    }

    /// `1 / (16 k p)`.
    pub fn tail_mass(&self) -> Rat {
        Rat::one() / (rat_int(16 * self.k as u64) * &self.p)
    }

    pub fn margin(&self) -> Rat {
        rat_int(2) / &self.p_est
    }

    pub fn validate(&self) -> Result<()> {
        if self.ptilde_samples == 0 || self.est_trials == 0 || self.dist_samples == 0 {
            return Err(LabError::OutOfRange("sample counts must be positive".into()));
        }
        if self.p <= Rat::zero() || self.p_est <= Rat::zero() {
            return Err(LabError::OutOfRange("p and pEst must be positive".into()));
        }
        Ok(())
    }

    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("k".into(), self.k.to_string());
        m.insert("n".into(), self.n.to_string());
        m.insert("p".into(), fmt_rat(&self.p));
        m.insert("p_est".into(), fmt_rat(&self.p_est));
        m.insert("ptilde_samples".into(), format!("{} (16knp)", self.ptilde_samples));
        m.insert("est_trials".into(), format!("{} (12 pEst^4)", self.est_trials));
        m.insert("dist_samples".into(), format!("{} (8knp)", self.dist_samples));
        m.insert("dist_cutoff".into(), format!("{} (n)", self.dist_cutoff));
        m.insert(
            "mode".into(),
            match self.mode {
                EstMode::ExactRecursion => "exact-recursion".into(),
                EstMode::MonteCarlo => "monte-carlo".into(),
            },
        );
        m.insert("share_estimates".into(), self.share_estimates.to_string());
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quality {
    Below,
    Okay,
    Good,
    VeryGood,
}

impl Quality {
    pub fn is_okay(self) -> bool {
        self >= Quality::Okay
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MessageQuality {
    pub message: u16,
    #[serde(with = "crate::dist::rat_serde")]
    pub p_m: Rat,
    #[serde(with = "crate::dist::rat_serde")]
    pub q_threshold: Rat,
    pub class: Quality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguisherRun {
    pub fired: bool,
    /// 1-based message index of the prover round that fired.
    pub fired_round: Option<usize>,
    /// `r_flags[j]`: fired in or before message `j`; `r_flags[0]` is always false.
    pub r_flags: Vec<bool>,
}

impl DistinguisherRun {
    fn new(k: usize, fired_round: Option<usize>) -> Self {
        let r_flags = (0..=k).map(|j| fired_round.is_some_and(|f| f <= j)).collect();
        DistinguisherRun { fired: fired_round.is_some(), fired_round, r_flags }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridRunReport {
    pub hybrid: usize,
    pub variant: u8,
    pub transcript: Transcript,
    pub verdict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_transcript: Option<Transcript>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_verdict: Option<bool>,
    pub distinguisher: DistinguisherRun,
    /// The prover could not extend a transcript; the run rejects.
    pub stuck: bool,
}

/// Law of the next message under the oracle, with its failure mass.
struct MsgLaw {
    probs: Vec<(u16, Rat)>,
    fail: Rat,
    sampler: Draw<u16>,
}

/// Inverse-CDF sampler over a finite law; draws past the last entry are `None`.
enum Draw<T> {
    Int { den: u64, cum: Vec<u64>, items: Vec<T> },
    Float { cum: Vec<f64>, items: Vec<T> },
}

impl<T: Copy> Draw<T> {
    fn new(probs: &[(T, Rat)]) -> Self {
        let den = probs
            .iter()
            .try_fold(1u64, |a, (_, p)| p.denom().to_u64().and_then(|d| {
                let l = num::integer::lcm(a, d);
                (l < 1 << 62).then_some(l)
            }));
        let items: Vec<T> = probs.iter().map(|(m, _)| *m).collect();
        match den {
            Some(den) => {
                let mut acc = 0u64;
                let cum = probs
                    .iter()
                    .map(|(_, p)| {
                        acc += (p * rat_int(den)).to_integer().to_u64().expect("fits");
                        acc
                    })
                    .collect();
                Draw::Int { den, cum, items }
            }
            None => Self::float(probs.iter().map(|(m, p)| (*m, to_f64(p)))),
        }
    }

    fn float(probs: impl Iterator<Item = (T, f64)>) -> Self {
        let mut acc = 0.0;
        let (items, cum) = probs
            .map(|(m, p)| {
                acc += p;
                (m, acc)
            })
            .unzip();
        Draw::Float { cum, items }
    }

    fn sample(&self, s: &mut SeedStream) -> Option<T> {
        match self {
            Draw::Int { den, cum, items } => {
                let u = s.below(*den);
                let i = cum.partition_point(|c| *c <= u);
                items.get(i).copied()
            }
            Draw::Float { cum, items } => {
                let u: f64 = s.gen();
                let i = cum.partition_point(|c| *c <= u);
                items.get(i).copied()
            }
        }
    }
}

/// Engine for one instance: caches next-message laws, exact values and closed-form
/// prover laws by prefix.
pub struct Engine<'a> {
    spec: &'a InteractiveSpec,
    oracle: &'a UEOracle,
    x: String,
    params: EngineParams,
    laws: RefCell<HashMap<Prefix, Rc<MsgLaw>>>,
    values: RefCell<HashMap<Prefix, Rat>>,
    prover_laws: RefCell<HashMap<Prefix, Rc<Draw<u16>>>>,
}

impl<'a> Engine<'a> {
    pub fn new(spec: &'a InteractiveSpec, oracle: &'a UEOracle, x: &str, params: EngineParams) -> Result<Self> {
        params.validate()?;
        spec.instance(x)?;
        if params.k != spec.k() {
            return Err(LabError::InvalidSpec(format!("params for k = {}, spec has k = {}", params.k, spec.k())));
        }
        Ok(Engine {
            spec,
            oracle,
            x: x.to_string(),
            params,
            laws: RefCell::default(),
            values: RefCell::default(),
            prover_laws: RefCell::default(),
        })
    }

    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    pub fn spec(&self) -> &InteractiveSpec {
        self.spec
    }

    fn prover_turn(&self, tau: Prefix) -> Result<()> {
        if tau.len >= self.spec.k() || self.spec.owner(tau.len) != Party::Prover {
            return Err(LabError::InvalidSpec(format!("prover does not speak after {} messages", tau.len)));
        }
        Ok(())
    }

    fn msg_law(&self, tau: Prefix) -> Result<Rc<MsgLaw>> {
        if let Some(l) = self.laws.borrow().get(&tau) {
            return Ok(l.clone());
        }
        let (spec, x, j) = (self.spec, self.x.as_str(), tau.len);
        let n = spec.sim_tape(x);
        let law = self.oracle.law_of(x, &prefix_token(tau), |r| spec.msg(spec.sim_code(x, r % n), j))?;
        let probs: Vec<(u16, Rat)> = law.outcomes.into_iter().collect();
        let l = Rc::new(MsgLaw { sampler: Draw::new(&probs), probs, fail: law.fail });
        self.laws.borrow_mut().insert(tau, l.clone());
        Ok(l)
    }

    fn accept_value(&self, full: Prefix) -> Rat {
        if self.spec.accepts(&self.x, full) { Rat::one() } else { Rat::zero() }
    }

    /// Exact acceptance probability when `P~` with exact estimates plays from `tau`.
    pub fn exact_success(&self, tau: Prefix) -> Result<Rat> {
        if self.spec.is_full(tau) {
            return Ok(self.accept_value(tau));
        }
        if let Some(v) = self.values.borrow().get(&tau) {
            return Ok(v.clone());
        }
        let v = match self.spec.owner(tau.len) {
            Party::Verifier => {
                let a = self.spec.alphabet_len(tau.len);
                let mut total = Rat::zero();
                for c in 0..a {
                    total += self.exact_success(self.spec.extend(tau, c as u16))?;
                }
                total / rat_int(a)
            }
            Party::Prover => {
                let law = self.msg_law(tau)?;
                let mut groups: BTreeMap<Rat, Rat> = BTreeMap::new();
                for (m, q) in &law.probs {
                    let v = self.exact_success(self.spec.extend(tau, *m))?;
                    *groups.entry(v).or_insert_with(Rat::zero) += q;
                }
                // E[max of S draws] = sum_g v_g (F_g^S - F_{g-1}^S), failures at the bottom.
                let s = self.params.ptilde_samples;
                let mut below = law.fail.clone();
                let mut prev = rat_pow(&below, s);
                let mut total = Rat::zero();
                for (v, q) in groups {
                    below += q;
                    let cur = rat_pow(&below, s);
                    total += v * (&cur - &prev);
                    prev = cur;
                }
                total
            }
        };
        self.values.borrow_mut().insert(tau, v.clone());
        Ok(v)
    }

    /// Value of a child transcript when the estimator is exact there.
    fn exact_child(&self, child: Prefix) -> Result<Option<Rat>> {
        if self.spec.is_full(child) {
            Ok(Some(self.accept_value(child)))
        } else if self.params.mode == EstMode::ExactRecursion {
            Ok(Some(self.exact_success(child)?))
        } else {
            Ok(None)
        }
    }

    /// Closed-form output law of `P~` at `tau` when all candidate estimates are exact.
    /// Message `m` in value group `g` (descending) is chosen with probability
    /// `((1 - H_g)^S - (1 - H_g - Q_g)^S) * q(m) / Q_g`, `H_g` the mass of better groups.
    fn prover_law(&self, tau: Prefix) -> Result<Option<Rc<Draw<u16>>>> {
        if let Some(d) = self.prover_laws.borrow().get(&tau) {
            return Ok(Some(d.clone()));
        }
        let law = self.msg_law(tau)?;
        let mut groups: BTreeMap<std::cmp::Reverse<Rat>, Vec<(u16, f64)>> = BTreeMap::new();
        for (m, q) in &law.probs {
            match self.exact_child(self.spec.extend(tau, *m))? {
                Some(v) => groups.entry(std::cmp::Reverse(v)).or_default().push((*m, to_f64(q))),
                None => return Ok(None),
            }
        }
        let s = self.params.ptilde_samples as i32;
        let mut higher = 0.0f64;
        let mut out = Vec::new();
        for members in groups.values() {
            let mass: f64 = members.iter().map(|(_, q)| q).sum();
            let hit = (1.0 - higher).max(0.0).powi(s) - (1.0 - higher - mass).max(0.0).powi(s);
            out.extend(members.iter().map(|(m, q)| (*m, hit * q / mass)));
            higher += mass;
        }
        let d = Rc::new(Draw::float(out.into_iter()));
        self.prover_laws.borrow_mut().insert(tau, d.clone());
        Ok(Some(d))
    }

    /// `Est`: exact in exact-recursion mode, otherwise the accept fraction of
    /// `est_trials` plays of `P~` against the verifier from `tau`.
    pub fn est(&self, tau: Prefix, s: &mut SeedStream) -> Result<Rat> {
        if self.spec.is_full(tau) {
            return Ok(self.accept_value(tau));
        }
        if self.params.mode == EstMode::ExactRecursion {
            return self.exact_success(tau);
        }
        let mut hits = 0u64;
        for _ in 0..self.params.est_trials {
            let (end, _) = self.complete(tau, s)?;
            if self.spec.is_full(end) && self.spec.accepts(&self.x, end) {
                hits += 1;
            }
        }
        Ok(rat_int(hits) / rat_int(self.params.est_trials))
    }

    /// Plays `P~` against the verifier until the transcript is full. Returns the
    /// (possibly partial) transcript and whether the prover got stuck.
    pub fn complete(&self, mut tau: Prefix, s: &mut SeedStream) -> Result<(Prefix, bool)> {
        while !self.spec.is_full(tau) {
            let m = match self.spec.owner(tau.len) {
                Party::Verifier => s.below(self.spec.alphabet_len(tau.len)) as u16,
                Party::Prover => match self.p_tilde_next(tau, s) {
                    Ok(m) => m,
                    Err(LabError::Stuck(_)) => return Ok((tau, true)),
                    Err(e) => return Err(e),
                },
            };
            tau = self.spec.extend(tau, m);
        }
        Ok((tau, false))
    }

    /// Next message of `P~`: the candidate with the highest estimate, first seen on ties.
    pub fn p_tilde_next(&self, tau: Prefix, s: &mut SeedStream) -> Result<u16> {
        self.prover_turn(tau)?;
        if let Some(d) = self.prover_law(tau)? {
            return d.sample(s).ok_or(LabError::Stuck(tau.len));
        }
        let law = self.msg_law(tau)?;
        let mut order: Vec<u16> = Vec::new();
        let mut all: Vec<u16> = Vec::new();
        for _ in 0..self.params.ptilde_samples {
            if let Some(m) = law.sampler.sample(s) {
                if self.params.share_estimates {
                    if !order.contains(&m) {
                        order.push(m);
                    }
                } else {
                    all.push(m);
                }
            }
        }
        let candidates = if self.params.share_estimates { order } else { all };
        let mut best: Option<(u16, Rat)> = None;
        for m in candidates {
            let e = self.est(self.spec.extend(tau, m), s)?;
            if best.as_ref().is_none_or(|(_, b)| e > *b) {
                let top = e.is_one();
                best = Some((m, e));
                if top {
                    break;
                }
            }
        }
        best.map(|(m, _)| m).ok_or(LabError::Stuck(tau.len))
    }

    /// Definition-style classification of prover message `m` at `tau`.
    pub fn classify_message(&self, tau: Prefix, m: u16) -> Result<MessageQuality> {
        self.prover_turn(tau)?;
        let law = self.msg_law(tau)?;
        let live = Rat::one() - &law.fail;
        if live.is_zero() {
            return Err(LabError::Stuck(tau.len));
        }
        let mut by_value: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (m2, q) in &law.probs {
            *by_value.entry(self.exact_success(self.spec.extend(tau, *m2))?).or_insert_with(Rat::zero) += q / &live;
        }
        let need = Rat::one() - self.params.tail_mass();
        let mut acc = Rat::zero();
        let mut q_threshold = None;
        for (v, w) in by_value {
            acc += w;
            if acc > need {
                q_threshold = Some(v);
                break;
            }
        }
        let q_threshold = q_threshold.expect("cumulative mass reaches one");
        let p_m = self.exact_success(self.spec.extend(tau, m))?;
        let margin = self.params.margin();
        let class = if p_m >= &q_threshold + &margin {
            Quality::VeryGood
        } else if p_m >= q_threshold {
            Quality::Good
        } else if p_m >= &q_threshold - &margin {
            Quality::Okay
        } else {
            Quality::Below
        };
        Ok(MessageQuality { message: m, p_m, q_threshold, class })
    }

    /// Round-wise distinguisher on a full transcript.
    pub fn distinguisher(&self, tau: Prefix, s: &mut SeedStream) -> Result<DistinguisherRun> {
        if !self.spec.is_full(tau) {
            return Err(LabError::InvalidSpec("distinguisher needs a full transcript".into()));
        }
        let k = self.spec.k();
        for j in (0..k).filter(|j| self.spec.owner(*j) == Party::Prover) {
            let prev = self.spec.truncate(tau, j);
            let own = self.spec.msg(tau.code, j);
            let e_own = self.est(self.spec.truncate(tau, j + 1), s)?;
            let law = self.msg_law(prev)?;
            let draws: Vec<u16> = (0..self.params.dist_samples).filter_map(|_| law.sampler.sample(s)).collect();
            let mut count = 0u64;
            if self.params.share_estimates {
                let mut cache: BTreeMap<u16, bool> = BTreeMap::new();
                cache.insert(own, true);
                for m in draws {
                    let ge = match cache.get(&m) {
                        Some(b) => *b,
                        None => {
                            let b = self.est(self.spec.extend(prev, m), s)? >= e_own;
                            cache.insert(m, b);
                            b
                        }
                    };
                    count += u64::from(ge);
                }
            } else {
                for m in draws {
                    count += u64::from(self.est(self.spec.extend(prev, m), s)? >= e_own);
                }
            }
            if count < self.params.dist_cutoff {
                return Ok(DistinguisherRun::new(k, Some(j + 1)));
            }
        }
        Ok(DistinguisherRun::new(k, None))
    }

    /// First `i` messages of a simulated transcript, the rest drawn message by message
    /// from the oracle. `None` when the oracle fails.
    pub fn extrapolated_transcript(&self, i: usize, s: &mut SeedStream) -> Result<Option<Prefix>> {
        let spec = self.spec;
        let full = spec.full(spec.sim_code(&self.x, s.below(spec.sim_tape(&self.x))));
        let mut tau = spec.truncate(full, i.min(spec.k()));
        while !spec.is_full(tau) {
            match self.msg_law(tau)?.sampler.sample(s) {
                Some(m) => tau = spec.extend(tau, m),
                None => return Ok(None),
            }
        }
        Ok(Some(tau))
    }

    /// Honest prover and verifier for `i` messages, then `P~` against the verifier.
    /// Variant 2 also replays from the first `i - 1` messages.
    pub fn hybrid_transcript(&self, i: usize, variant: u8, s: &mut SeedStream) -> Result<HybridRunReport> {
        let k = self.spec.k();
        if i > k {
            return Err(LabError::OutOfRange(format!("hybrid index {i} > k = {k}")));
        }
        if variant != 1 && variant != 2 {
            return Err(LabError::OutOfRange(format!("variant {variant}")));
        }
        if variant == 2 && i == 0 {
            return Err(LabError::OutOfRange("variant 2 needs i >= 1".into()));
        }
        let head = self.spec.honest_prefix(&self.x, i, s)?;
        let (tau, stuck) = self.complete(head, s)?;
        let verdict = !stuck && self.spec.accepts(&self.x, tau);
        let distinguisher = if stuck { DistinguisherRun::new(k, None) } else { self.distinguisher(tau, s)? };
        let (mut second_transcript, mut second_verdict, mut stuck2) = (None, None, false);
        if variant == 2 {
            let (t2, st) = self.complete(self.spec.truncate(tau, i - 1), s)?;
            stuck2 = st;
            second_verdict = Some(!st && self.spec.accepts(&self.x, t2));
            second_transcript = Some(self.spec.decode(t2));
        }
        Ok(HybridRunReport {
            hybrid: i,
            variant,
            transcript: self.spec.decode(tau),
            verdict,
            second_transcript,
            second_verdict,
            distinguisher,
            stuck: stuck || stuck2,
        })
    }

    /// Verdict of the verifier after a full interaction with `P~`; a stuck prover loses.
    pub fn alg7(&self, s: &mut SeedStream) -> Result<bool> {
        let (tau, stuck) = self.complete(Prefix::EMPTY, s)?;
        Ok(!stuck && self.spec.accepts(&self.x, tau))
    }
}

pub fn exact_success(spec: &InteractiveSpec, oracle: &UEOracle, x: &str, tau: &Transcript, params: &EngineParams) -> Result<Rat> {
    Engine::new(spec, oracle, x, params.clone())?.exact_success(spec.encode(tau)?)
}

pub fn est(
    spec: &InteractiveSpec,
    oracle: &UEOracle,
    x: &str,
    tau: &Transcript,
    params: &EngineParams,
    seed: u64,
) -> Result<Rat> {
    Engine::new(spec, oracle, x, params.clone())?.est(spec.encode(tau)?, &mut SeedStream::new(seed))
}

pub fn classify_message(
    spec: &InteractiveSpec,
    oracle: &UEOracle,
    x: &str,
    tau: &Transcript,
    m: u16,
    params: &EngineParams,
) -> Result<MessageQuality> {
    Engine::new(spec, oracle, x, params.clone())?.classify_message(spec.encode(tau)?, m)
}

pub fn p_tilde_next(
    spec: &InteractiveSpec,
    oracle: &UEOracle,
    x: &str,
    tau: &Transcript,
    params: &EngineParams,
    seed: u64,
) -> Result<u16> {
    Engine::new(spec, oracle, x, params.clone())?.p_tilde_next(spec.encode(tau)?, &mut SeedStream::new(seed))
}

pub fn izk_distinguisher(
    spec: &InteractiveSpec,
    oracle: &UEOracle,
    x: &str,
    tau: &Transcript,
    params: &EngineParams,
    seed: u64,
) -> Result<DistinguisherRun> {
    Engine::new(spec, oracle, x, params.clone())?.distinguisher(spec.encode(tau)?, &mut SeedStream::new(seed))
}

pub fn hybrid_transcript(
    spec: &InteractiveSpec,
    oracle: &UEOracle,
    x: &str,
    i: usize,
    variant: u8,
    params: &EngineParams,
    seed: u64,
) -> Result<HybridRunReport> {
    Engine::new(spec, oracle, x, params.clone())?.hybrid_transcript(i, variant, &mut SeedStream::new(seed))
}

pub fn alg7_decider(spec: &InteractiveSpec, oracle: &UEOracle, x: &str, params: &EngineParams, seed: u64) -> Result<bool> {
    Engine::new(spec, oracle, x, params.clone())?.alg7(&mut SeedStream::new(seed))
}

/// Acceptance of the decider on both instances. Exact evaluation runs the exact
/// recursion; Monte-Carlo evaluation plays `trials` seeded interactions per instance.
pub fn izk_gap_experiment(
    spec: &InteractiveSpec,
    oracle: &UEOracle,
    params: &EngineParams,
    x_in: &str,
    x_out: &str,
    how: Evaluation,
) -> Result<GapReport> {
    for (x, want) in [(x_in, true), (x_out, false)] {
        if spec.instance(x)?.in_language != want {
            return Err(LabError::InvalidSpec(format!("{x} is labeled with the wrong membership")));
        }
    }
    let params = match how {
        Evaluation::Exact => params.clone().with_mode(EstMode::ExactRecursion),
        Evaluation::MonteCarlo { .. } => params.clone(),
    };
    let mut root = SeedStream::new(how.seed().unwrap_or(0));
    let mut acc = |x: &str| -> Result<Estimate> {
        let engine = Engine::new(spec, oracle, x, params.clone())?;
        match how {
            Evaluation::Exact => Ok(Estimate::exact(engine.exact_success(Prefix::EMPTY)?)),
            Evaluation::MonteCarlo { trials, .. } => {
                let mut s = root.fork();
                let mut hits = 0;
                for _ in 0..trials {
                    hits += u64::from(engine.alg7(&mut s)?);
                }
                Ok(Estimate::frequency(hits, trials))
            }
        }
    };
    let a_in = acc(x_in)?;
    let a_out = acc(x_out)?;
    let mut echo = params.echo();
    echo.insert("spec".into(), spec.name.clone());
    echo.insert("oracle".into(), oracle.describe());
    let mut report = GapReport::new("alg7", (x_in, a_in), (x_out, a_out), how, echo);

    let profile = measure_interactive_errors(spec)?;
    let slack = Rat::one() - Rat::one() / &params.p;
    let need = Rat::one() / (rat(2, 1) * &params.p);
    if profile.sum() < slack {
        let lo = report.gap.bounds()[0];
        report.checks.push(Check::new(
            "gap >= 1/(2p)",
            report.gap.value >= need,
            format!("gap {} vs {}", short_rat(&report.gap.value), fmt_rat(&need)),
        ));
        if report.mode == crate::protocol::Mode::Mc {
            report.checks.push(Check::new("gap interval excludes 0", lo > 0.0, format!("lower end {lo:.4}")));
        }
    } else {
        report.params.insert(
            "gap_requirement".into(),
            format!("not applicable: errors sum to {} >= 1 - 1/p", fmt_rat(&profile.sum())),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extrapolation::{make_exact_ue, prefix_sampler};
    use crate::protocol::{build_demo_interactive, ErrorProfile};

    fn demo(k: usize, c: Rat, s: Rat, z: Rat) -> (InteractiveSpec, UEOracle) {
        let spec = build_demo_interactive(k, &ErrorProfile::target(c, s, z).unwrap()).unwrap();
        let o = make_exact_ue(prefix_sampler(&spec)).unwrap();
        (spec, o)
    }

    fn small(k: usize) -> EngineParams {
        let mut p = EngineParams::desk(k, 2, 4, 4);
        p.est_trials = 256;
        p
    }

    #[test]
    fn exact_success_at_the_leaves_and_one_round_up() {
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(1, 2));
        let e = Engine::new(&spec, &o, "x1", small(3)).unwrap();
        for code in 0..spec.total() {
            let full = spec.full(code);
            let want = if spec.accepts("x1", full) { Rat::one() } else { Rat::zero() };
            assert_eq!(e.exact_success(full).unwrap(), want);
        }
        // Verifier speaks next after the first message.
        let a = spec.extend(Prefix::EMPTY, 2);
        let by_hand: Rat = (0..spec.alphabet_len(1))
            .map(|c| e.exact_success(spec.extend(a, c as u16)).unwrap())
            .sum::<Rat>()
            / rat_int(spec.alphabet_len(1));
        assert_eq!(e.exact_success(a).unwrap(), by_hand);
    }

    #[test]
    fn last_round_value_matches_max_of_draws() {
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(1, 2));
        let params = small(3);
        let e = Engine::new(&spec, &o, "x1", params.clone()).unwrap();
        // Normal-branch challenge: the correct z is drawn with probability 1 - 2/3.
        let tau = spec.extend(spec.extend(Prefix::EMPTY, 0), 3);
        let miss = rat(2, 3);
        assert_eq!(e.exact_success(tau).unwrap(), Rat::one() - rat_pow(&miss, params.ptilde_samples));
    }

    #[test]
    fn exact_mode_est_is_exact_success() {
        let (spec, o) = demo(5, Rat::zero(), rat(1, 4), rat(1, 2));
        let params = small(5).with_mode(EstMode::ExactRecursion);
        let e = Engine::new(&spec, &o, "x1", params).unwrap();
        let mut s = SeedStream::new(1);
        for _ in 0..50 {
            let full = spec.full(spec.sim_code("x1", s.below(spec.sim_tape("x1"))));
            for len in 0..=spec.k() {
                let p = spec.truncate(full, len);
                assert_eq!(e.est(p, &mut s).unwrap(), e.exact_success(p).unwrap());
            }
        }
    }

    #[test]
    fn monte_carlo_est_concentrates() {
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(1, 2));
        let params = small(3).with_est_trials(4096);
        let e = Engine::new(&spec, &o, "x1", params).unwrap();
        let tau = spec.extend(Prefix::EMPTY, 1);
        let truth = to_f64(&e.exact_success(tau).unwrap());
        let mut s = SeedStream::new(2);
        let mut far = 0;
        for _ in 0..50 {
            if (to_f64(&e.est(tau, &mut s).unwrap()) - truth).abs() > 1.0 / 16.0 {
                far += 1;
            }
        }
        assert_eq!(far, 0);
    }

    #[test]
    fn quality_classes_are_nested_and_degenerate_laws_have_no_very_good() {
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(1, 2));
        let e = Engine::new(&spec, &o, "x1", small(3)).unwrap();
        let root: Vec<_> = (0..4).map(|m| e.classify_message(Prefix::EMPTY, m).unwrap()).collect();
        assert!(root.iter().all(|q| q.class == Quality::Good));
        for a in 0..4u16 {
            for c in 0..spec.alphabet_len(1) as u16 {
                let tau = spec.extend(spec.extend(Prefix::EMPTY, a), c);
                for m in 0..5 {
                    let q = e.classify_message(tau, m).unwrap();
                    let margin = e.params().margin();
                    assert_eq!(q.class >= Quality::VeryGood, q.p_m >= &q.q_threshold + &margin);
                    assert_eq!(q.class >= Quality::Good, q.p_m >= q.q_threshold);
                    assert_eq!(q.class >= Quality::Okay, q.p_m >= &q.q_threshold - &margin);
                }
            }
        }
        assert!(e.classify_message(spec.extend(Prefix::EMPTY, 0), 0).is_err());
    }

    #[test]
    fn prover_finds_the_best_message_in_exact_mode() {
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(1, 2));
        let e = Engine::new(&spec, &o, "x1", small(3).with_mode(EstMode::ExactRecursion)).unwrap();
        let tau = spec.extend(spec.extend(Prefix::EMPTY, 1), 2);
        let best = (0..5u16).max_by_key(|m| e.exact_success(spec.extend(tau, *m)).unwrap()).unwrap();
        let mut s = SeedStream::new(3);
        let mut hits = 0;
        for _ in 0..200 {
            hits += u32::from(e.p_tilde_next(tau, &mut s).unwrap() == best);
        }
        assert!(hits >= 199);
    }

    #[test]
    fn sampled_prover_matches_closed_form() {
        // Forcing the sampled path on a last-round prefix must agree with the closed form.
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(1, 2));
        let mut params = small(3);
        params.ptilde_samples = 2;
        let e = Engine::new(&spec, &o, "x1", params).unwrap();
        let tau = spec.extend(spec.extend(Prefix::EMPTY, 0), 3);
        let mut s = SeedStream::new(4);
        let trials = 20_000;
        let closed = (0..trials).filter(|_| {
            let m = e.p_tilde_next(tau, &mut s).unwrap();
            spec.accepts("x1", spec.extend(tau, m))
        });
        let closed = closed.count() as f64 / trials as f64;
        // Two draws, each correct with probability 1/3.
        assert!((closed - (1.0 - (2.0f64 / 3.0).powi(2))).abs() < 0.02);
    }

    #[test]
    fn distinguisher_flags() {
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(3, 4));
        let e = Engine::new(&spec, &o, "x1", small(3)).unwrap();
        let mut s = SeedStream::new(5);
        // Planted correct response on the normal branch, where the simulator always sends the dummy.
        let tau = spec.encode(&Transcript(vec![1, 3, ((1 + 3 + 1) % 4) as u16])).unwrap();
        let q = e.classify_message(spec.truncate(tau, 2), spec.msg(tau.code, 2)).unwrap();
        assert_eq!(q.class, Quality::VeryGood);
        let run = e.distinguisher(tau, &mut s).unwrap();
        assert_eq!(run.fired_round, Some(3));
        assert_eq!(run.r_flags, vec![false, false, false, true]);
        let mut never = small(3);
        never.dist_cutoff = 0;
        let e0 = Engine::new(&spec, &o, "x1", never).unwrap();
        assert!(!e0.distinguisher(tau, &mut s).unwrap().fired);
    }

    #[test]
    fn hybrids() {
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(1, 2));
        let e = Engine::new(&spec, &o, "x1", small(3)).unwrap();
        let mut s = SeedStream::new(6);
        for i in 0..=3 {
            for v in [1u8, 2] {
                if v == 2 && i == 0 {
                    assert!(e.hybrid_transcript(0, 2, &mut s).is_err());
                    continue;
                }
                let r = e.hybrid_transcript(i, v, &mut s).unwrap();
                assert!(r.distinguisher.r_flags.windows(2).all(|w| w[0] <= w[1]));
                assert!(!r.distinguisher.r_flags[0]);
                if i == 3 && v == 1 {
                    // Completeness error 0: honest transcripts always accept.
                    assert!(r.verdict);
                }
            }
        }
    }

    #[test]
    fn exact_gap_on_demo_and_ideal() {
        let (spec, o) = demo(3, Rat::zero(), rat(1, 4), rat(1, 2));
        let r = izk_gap_experiment(&spec, &o, &small(3), "x1", "x0", Evaluation::Exact).unwrap();
        assert!(r.all_checks_hold());
        assert_eq!(r.accept_out.value, rat(1, 4));
        let (ideal, oi) = demo(3, Rat::zero(), Rat::zero(), Rat::zero());
        let r = izk_gap_experiment(&ideal, &oi, &small(3), "x1", "x0", Evaluation::Exact).unwrap();
        assert_eq!(r.gap.value, Rat::one());
    }
}
