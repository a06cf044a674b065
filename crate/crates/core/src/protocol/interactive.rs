use std::collections::{BTreeMap, HashMap};

use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::tape::{check_budget, TapeTable};
use super::{instance_index, ErrorProfile, Instance, Mode};
use crate::dist::{
    fmt_rat, rat_int, rat_max, rat_min, tv_distance, ExactDist, Rat, SeedStream, Token,
};
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Prover,
    Verifier,
}

/// One message slot. Verifier slots are fresh uniform draws from the alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub owner: Party,
    pub alphabet: Vec<Token>,
}

/// A partial transcript as (number of messages, mixed-radix code). Message `j` has
/// weight `|A_0|...|A_{j-1}|`, so a prefix code is the full code reduced modulo the
/// weight of its length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prefix {
    pub len: usize,
    pub code: u64,
}

impl Prefix {
    pub const EMPTY: Prefix = Prefix { len: 0, code: 0 };
}

/// Message indices in round order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transcript(pub Vec<u16>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub round: usize,
    pub sender: Party,
    pub message: Token,
}

/// Constant-round public-coin protocol given by explicit tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractiveSpec {
    pub name: String,
    pub instances: Vec<Instance>,
    rounds: Vec<Round>,
    weights: Vec<u64>,
    prover_tape: u64,
    prover: BTreeMap<String, BTreeMap<Prefix, TapeTable<u16>>>,
    accept: BTreeMap<String, Vec<bool>>,
    sim: BTreeMap<String, TapeTable<u64>>,
}

impl InteractiveSpec {
    /// `accept[x]` is indexed by full transcript code; `prover[x]` holds a table over
    /// the prover tape for every prefix at which the prover speaks.
    pub fn new(
        name: impl Into<String>,
        instances: Vec<Instance>,
        rounds: Vec<Round>,
        prover_tape: u64,
        prover: BTreeMap<String, BTreeMap<Prefix, TapeTable<u16>>>,
        accept: BTreeMap<String, Vec<bool>>,
        sim: BTreeMap<String, TapeTable<u64>>,
    ) -> Result<Self> {
        if rounds.is_empty() {
            return Err(LabError::InvalidSpec("no rounds".into()));
        }
        let mut weights = vec![1u64];
        for r in &rounds {
            if r.alphabet.is_empty() || r.alphabet.len() > usize::from(u16::MAX) {
                return Err(LabError::InvalidSpec("alphabet size out of range".into()));
            }
            let w = u128::from(*weights.last().unwrap()) * r.alphabet.len() as u128;
            check_budget(w)?;
            weights.push(w as u64);
        }
        check_budget(u128::from(prover_tape))?;
        let spec = InteractiveSpec {
            name: name.into(),
            instances,
            rounds,
            weights,
            prover_tape,
            prover,
            accept,
            sim,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let total = self.total();
        for inst in &self.instances {
            let x = &inst.label;
            let acc = self
                .accept
                .get(x)
                .ok_or_else(|| LabError::InvalidSpec(format!("no accept table for {x}")))?;
            if acc.len() as u64 != total {
                return Err(LabError::InvalidSpec(format!("accept table of {x} has wrong size")));
            }
            let sim = self
                .sim
                .get(x)
                .ok_or_else(|| LabError::InvalidSpec(format!("no simulator for {x}")))?;
            if sim.values().iter().any(|c| *c >= total) {
                return Err(LabError::InvalidSpec(format!("simulator of {x} leaves the alphabets")));
            }
            if inst.in_language {
                let p = self
                    .prover
                    .get(x)
                    .ok_or_else(|| LabError::InvalidSpec(format!("no prover for {x}")))?;
                for (pre, t) in p {
                    let ok = pre.len < self.k()
                        && self.rounds[pre.len].owner == Party::Prover
                        && pre.code < self.weights[pre.len]
                        && t.size() == self.prover_tape
                        && t.values().iter().all(|m| usize::from(*m) < self.rounds[pre.len].alphabet.len());
                    if !ok {
                        return Err(LabError::InvalidSpec(format!("bad prover entry for {x}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.rounds.len()
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn owner(&self, j: usize) -> Party {
        self.rounds[j].owner
    }

    pub fn alphabet_len(&self, j: usize) -> u64 {
        self.rounds[j].alphabet.len() as u64
    }

    /// Number of full transcripts.
    pub fn total(&self) -> u64 {
        self.weights[self.k()]
    }

    pub fn prover_tape(&self) -> u64 {
        self.prover_tape
    }

    pub fn sim_tape(&self, x: &str) -> u64 {
        self.sim[x].size()
    }

    pub fn sim_table(&self, x: &str) -> &TapeTable<u64> {
        &self.sim[x]
    }

    pub fn prover_table(&self, x: &str) -> Option<&BTreeMap<Prefix, TapeTable<u16>>> {
        self.prover.get(x)
    }

    pub fn accept_table(&self, x: &str) -> &[bool] {
        &self.accept[x]
    }

    pub fn instance(&self, label: &str) -> Result<&Instance> {
        Ok(&self.instances[instance_index(&self.instances, label)?])
    }

    pub fn extend(&self, p: Prefix, m: u16) -> Prefix {
        debug_assert!(u64::from(m) < self.alphabet_len(p.len));
        Prefix { len: p.len + 1, code: p.code + u64::from(m) * self.weights[p.len] }
    }

    /// Message `j` of a (prefix or full) code.
    pub fn msg(&self, code: u64, j: usize) -> u16 {
        ((code / self.weights[j]) % self.alphabet_len(j)) as u16
    }

    pub fn truncate(&self, p: Prefix, len: usize) -> Prefix {
        debug_assert!(len <= p.len);
        Prefix { len, code: p.code % self.weights[len] }
    }

    pub fn is_full(&self, p: Prefix) -> bool {
        p.len == self.k()
    }

    pub fn full(&self, code: u64) -> Prefix {
        Prefix { len: self.k(), code }
    }

    pub fn accepts(&self, x: &str, full: Prefix) -> bool {
        debug_assert!(self.is_full(full));
        self.accept[x][full.code as usize]
    }

    pub fn prover_msg(&self, x: &str, p: Prefix, tape: u64) -> Result<u16> {
        self.prover
            .get(x)
            .and_then(|t| t.get(&p))
            .map(|t| *t.get(tape))
            .ok_or_else(|| LabError::InvalidSpec(format!("honest prover undefined at {p:?} for {x}")))
    }

    /// Full transcript code produced by the simulator on `tape`.
    pub fn sim_code(&self, x: &str, tape: u64) -> u64 {
        *self.sim[x].get(tape)
    }

    pub fn encode(&self, t: &Transcript) -> Result<Prefix> {
        if t.0.len() > self.k() {
            return Err(LabError::InvalidSpec("transcript too long".into()));
        }
        let mut p = Prefix::EMPTY;
        for m in &t.0 {
            if u64::from(*m) >= self.alphabet_len(p.len) {
                return Err(LabError::InvalidSpec("message outside alphabet".into()));
            }
            p = self.extend(p, *m);
        }
        Ok(p)
    }

    pub fn decode(&self, p: Prefix) -> Transcript {
        Transcript((0..p.len).map(|j| self.msg(p.code, j)).collect())
    }

    pub fn render(&self, p: Prefix) -> Vec<TranscriptEntry> {
        (0..p.len)
            .map(|j| TranscriptEntry {
                round: j + 1,
                sender: self.owner(j),
                message: self.rounds[j].alphabet[usize::from(self.msg(p.code, j))].clone(),
            })
            .collect()
    }

    /// Honest prover against the honest verifier for the first `upto` rounds.
    pub fn honest_prefix(&self, x: &str, upto: usize, s: &mut SeedStream) -> Result<Prefix> {
        let tape = s.below(self.prover_tape);
        let mut p = Prefix::EMPTY;
        while p.len < upto {
            let m = match self.owner(p.len) {
                Party::Verifier => s.below(self.alphabet_len(p.len)) as u16,
                Party::Prover => self.prover_msg(x, p, tape)?,
            };
            p = self.extend(p, m);
        }
        Ok(p)
    }

    /// Exact law of honest full transcripts (codes).
    pub fn honest_law(&self, x: &str) -> Result<ExactDist<u64>> {
        let coins: u128 = (0..self.k())
            .filter(|j| self.owner(*j) == Party::Verifier)
            .map(|j| u128::from(self.alphabet_len(j)))
            .product();
        check_budget(coins * u128::from(self.prover_tape))?;
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for tape in 0..self.prover_tape {
            self.walk_honest(x, tape, Prefix::EMPTY, &mut counts)?;
        }
        ExactDist::from_counts(counts)
    }

    fn walk_honest(&self, x: &str, tape: u64, p: Prefix, counts: &mut HashMap<u64, u64>) -> Result<()> {
        if self.is_full(p) {
            *counts.entry(p.code).or_default() += 1;
            return Ok(());
        }
        match self.owner(p.len) {
            Party::Prover => {
                let m = self.prover_msg(x, p, tape)?;
                self.walk_honest(x, tape, self.extend(p, m), counts)
            }
            Party::Verifier => {
                for c in 0..self.alphabet_len(p.len) {
                    self.walk_honest(x, tape, self.extend(p, c as u16), counts)?;
                }
                Ok(())
            }
        }
    }

    pub fn sim_law(&self, x: &str) -> ExactDist<u64> {
        self.sim[x].law()
    }

    fn coins_after(&self, len: usize) -> u64 {
        (len..self.k())
            .filter(|j| self.owner(*j) == Party::Verifier)
            .map(|j| self.alphabet_len(j))
            .product()
    }

    /// Optimal cheating-prover acceptance probability by backward induction.
    pub fn game_value(&self, x: &str) -> Rat {
        let wins = self.game_wins(x, Prefix::EMPTY, &mut |_| None);
        Rat::new(wins.into(), self.coins_after(0).into())
    }

    /// Acceptance probability of a fixed deterministic prover strategy.
    pub fn strategy_value(&self, x: &str, strategy: &mut dyn FnMut(Prefix) -> u16) -> Rat {
        let wins = self.game_wins(x, Prefix::EMPTY, &mut |p| Some(strategy(p)));
        Rat::new(wins.into(), self.coins_after(0).into())
    }

    /// Number of winning verifier-coin sequences from `p` on; `fixed` overrides the
    /// prover's maximization when it returns a message.
    fn game_wins(&self, x: &str, p: Prefix, fixed: &mut dyn FnMut(Prefix) -> Option<u16>) -> u64 {
        if self.is_full(p) {
            return u64::from(self.accepts(x, p));
        }
        match self.owner(p.len) {
            Party::Verifier => (0..self.alphabet_len(p.len))
                .map(|c| self.game_wins(x, self.extend(p, c as u16), fixed))
                .sum(),
            Party::Prover => match fixed(p) {
                Some(m) => self.game_wins(x, self.extend(p, m), fixed),
                None => (0..self.alphabet_len(p.len))
                    .map(|m| self.game_wins(x, self.extend(p, m as u16), fixed))
                    .max()
                    .unwrap_or(0),
            },
        }
    }
}

/// Exact error profile: completeness and zero-knowledge by enumerating honest and
/// simulated transcripts, soundness by backward induction over the game tree.
pub fn measure_interactive_errors(spec: &InteractiveSpec) -> Result<ErrorProfile> {
    check_budget(u128::from(spec.total()))?;
    let mut eps_c = Rat::zero();
    let mut eps_s = Rat::zero();
    let mut eps_zk = Rat::zero();
    for inst in &spec.instances {
        let x = &inst.label;
        if inst.in_language {
            let honest = spec.honest_law(x)?;
            let rej = honest.prob_where(|c| !spec.accepts(x, spec.full(*c)));
            eps_c = rat_max(&eps_c, &rej);
            eps_zk = rat_max(&eps_zk, &tv_distance(&honest, &spec.sim_law(x)));
        } else {
            eps_s = rat_max(&eps_s, &spec.game_value(x));
        }
    }
    ErrorProfile::new(
        eps_c,
        eps_s,
        eps_zk,
        Mode::Exact,
        "enumeration; soundness by backward induction vs unbounded prover; zero-knowledge as transcript total variation",
    )
}

/// Parameters of the demo protocol realizing a target profile.
///
/// Rounds for `k = 3`: prover commit `a`, verifier challenge `c`, prover response `z`.
/// For `k = 5`: `a`, `c1`, `b`, `c2`, `z`. The first challenge picks a branch:
/// `[0, reject)` always rejects `x1`, `[reject, reject + accept_all)` accepts anything,
/// the rest is the normal branch where `z` must equal `a + c + w mod 4` (plus `b + c2`
/// for `k = 5`, where `b` must equal `a + c1 mod 4`). The simulator replaces `z` by a
/// dummy with probability `zeta_normal` on the normal branch and `zeta_other` elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoLayout {
    pub k: usize,
    pub challenges: u64,
    pub reject: u64,
    pub accept_all: u64,
    #[serde(with = "crate::dist::rat_serde")]
    pub zeta_normal: Rat,
    #[serde(with = "crate::dist::rat_serde")]
    pub zeta_other: Rat,
    pub selector: u64,
}

const COMMITS: u64 = 4;
const DUMMY: u16 = 4;

impl DemoLayout {
    pub fn new(k: usize, targets: &ErrorProfile) -> Result<Self> {
        if k != 3 && k != 5 {
            return Err(LabError::OutOfRange(format!("k = {k}, need 3 or 5")));
        }
        if &targets.eps_c + &targets.eps_s > Rat::one() {
            return Err(LabError::Infeasible("eps_c + eps_s exceeds 1".into()));
        }
        let exact = (1..=16u64).find(|c| {
            (&targets.eps_c * rat_int(*c)).is_integer() && (&targets.eps_s * rat_int(*c)).is_integer()
        });
        let challenges = exact.unwrap_or(16);
        let round = |r: &Rat| (r * rat_int(challenges)).round().to_integer().to_u64().unwrap_or(0);
        let (reject, accept_all) = (round(&targets.eps_c), round(&targets.eps_s));
        let tol = Rat::new(1.into(), 100.into());
        for (got, want) in [(reject, &targets.eps_c), (accept_all, &targets.eps_s)] {
            let err = Rat::new(got.into(), challenges.into()) - want;
            if err.abs() > tol || reject + accept_all > challenges {
                return Err(LabError::Infeasible(format!(
                    "{} not representable with at most 16 challenges",
                    fmt_rat(want)
                )));
            }
        }
        let w_normal = Rat::new((challenges - reject - accept_all).into(), challenges.into());
        let zeta_normal = if w_normal.is_zero() {
            Rat::zero()
        } else {
            rat_min(&(&targets.eps_zk / &w_normal), &Rat::one())
        };
        let rest = &targets.eps_zk - &zeta_normal * &w_normal;
        let zeta_other = if rest.is_zero() { Rat::zero() } else { rest / (Rat::one() - &w_normal) };
        let selector = zeta_normal
            .denom()
            .lcm(zeta_other.denom())
            .to_u64()
            .ok_or_else(|| LabError::Infeasible("eps_zk denominator too large".into()))?;
        let layout = DemoLayout { k, challenges, reject, accept_all, zeta_normal, zeta_other, selector };
        check_budget(u128::from(layout.sim_tape()))?;
        Ok(layout)
    }

    pub fn is_normal(&self, c: u64) -> bool {
        c >= self.reject + self.accept_all
    }

    pub fn is_accept_all(&self, c: u64) -> bool {
        c >= self.reject && c < self.reject + self.accept_all
    }

    pub fn sim_tape(&self) -> u64 {
        COMMITS * self.challenges * if self.k == 5 { 2 } else { 1 } * self.selector
    }

    fn alphabets(&self) -> Vec<Round> {
        let small = |n: u64| (0..n).map(|i| Token::byte(i as u8)).collect::<Vec<_>>();
        let p = |n| Round { owner: Party::Prover, alphabet: small(n) };
        let v = |n| Round { owner: Party::Verifier, alphabet: small(n) };
        if self.k == 3 {
            vec![p(COMMITS), v(self.challenges), p(COMMITS + 1)]
        } else {
            vec![p(COMMITS), v(self.challenges), p(COMMITS), v(2), p(COMMITS + 1)]
        }
    }

    fn expected_b(a: u16, c1: u16) -> u16 {
        ((u64::from(a) + u64::from(c1)) % COMMITS) as u16
    }

    /// Correct final response for messages `m` (all but the last) and witness `w`.
    fn expected_z(m: &[u16], w: u16) -> u16 {
        let s: u64 = m.iter().map(|v| u64::from(*v)).sum::<u64>() + u64::from(w);
        (s % COMMITS) as u16
    }
}

fn witness_value(inst: &Instance) -> u16 {
    inst.witness.as_ref().and_then(|w| w.0.first()).map_or(0, |b| u16::from(*b))
}

/// Table-driven public-coin protocol whose exact errors match `targets` (to within
/// 1/100 when the soundness or completeness target needs more than 16 challenges).
pub fn build_demo_interactive(k: usize, targets: &ErrorProfile) -> Result<InteractiveSpec> {
    let layout = DemoLayout::new(k, targets)?;
    let instances = vec![Instance::yes("x1", Token::byte(1)), Instance::no("x0")];
    let rounds = layout.alphabets();
    let shell = InteractiveSpec::new(
        "shell",
        Vec::new(),
        rounds.clone(),
        COMMITS,
        BTreeMap::new(),
        BTreeMap::new(),
        BTreeMap::new(),
    )?;
    let total = shell.total();

    let mut prover = BTreeMap::new();
    let mut accept = BTreeMap::new();
    let mut sim = BTreeMap::new();
    for inst in &instances {
        let w = witness_value(inst);
        let acc: Vec<bool> = (0..total)
            .map(|code| {
                let m = shell.decode(shell.full(code)).0;
                let c = u64::from(m[1]);
                if layout.is_accept_all(c) {
                    return true;
                }
                if !inst.in_language || !layout.is_normal(c) {
                    return false;
                }
                let b_ok = k == 3 || m[2] == DemoLayout::expected_b(m[0], m[1]);
                b_ok && m[k - 1] == DemoLayout::expected_z(&m[..k - 1], w)
            })
            .collect();
        accept.insert(inst.label.clone(), acc);

        let sim_table = TapeTable::from_fn(layout.sim_tape(), |t| {
            let sel = t % layout.selector;
            let mut rest = t / layout.selector;
            let c2 = if k == 5 {
                let v = rest % 2;
                rest /= 2;
                v as u16
            } else {
                0
            };
            let c = (rest % layout.challenges) as u16;
            let a = (rest / layout.challenges) as u16;
            let zeta = if layout.is_normal(u64::from(c)) { &layout.zeta_normal } else { &layout.zeta_other };
            let cut = (zeta * rat_int(layout.selector)).to_integer().to_u64().unwrap_or(0);
            let mut m = vec![a, c];
            if k == 5 {
                m.push(DemoLayout::expected_b(a, c));
                m.push(c2);
            }
            let z = if sel < cut { DUMMY } else { DemoLayout::expected_z(&m, w) };
            m.push(z);
            shell.encode(&Transcript(m)).expect("in alphabet").code
        })?;
        sim.insert(inst.label.clone(), sim_table);

        if inst.in_language {
            let mut table = BTreeMap::new();
            table.insert(Prefix::EMPTY, TapeTable::from_fn(COMMITS, |t| t as u16)?);
            for code in 0..shell.weights[k - 1] {
                let p = Prefix { len: k - 1, code };
                let m = shell.decode(p).0;
                table.insert(p, TapeTable::constant(COMMITS, DemoLayout::expected_z(&m, w))?);
            }
            if k == 5 {
                for code in 0..shell.weights[2] {
                    let p = Prefix { len: 2, code };
                    let m = shell.decode(p).0;
                    table.insert(p, TapeTable::constant(COMMITS, DemoLayout::expected_b(m[0], m[1]))?);
                }
            }
            prover.insert(inst.label.clone(), table);
        }
    }
    InteractiveSpec::new(
        format!(
            "demo(k={k},eps_c={},eps_s={},eps_zk={})",
            fmt_rat(&targets.eps_c),
            fmt_rat(&targets.eps_s),
            fmt_rat(&targets.eps_zk)
        ),
        instances,
        rounds,
        COMMITS,
        prover,
        accept,
        sim,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::rat;
    use rand::RngCore;

    fn demo(k: usize, c: Rat, s: Rat, z: Rat) -> InteractiveSpec {
        build_demo_interactive(k, &ErrorProfile::target(c, s, z).unwrap()).unwrap()
    }

    #[test]
    fn ideal_demo_has_zero_profile() {
        let spec = demo(3, Rat::zero(), Rat::zero(), Rat::zero());
        let p = measure_interactive_errors(&spec).unwrap();
        assert_eq!((p.eps_c, p.eps_s, p.eps_zk), (Rat::zero(), Rat::zero(), Rat::zero()));
    }

    #[test]
    fn demo_profiles_are_exact() {
        for k in [3, 5] {
            for (c, s, z) in [
                (Rat::zero(), rat(1, 4), rat(1, 2)),
                (rat(1, 8), rat(3, 8), rat(1, 3)),
                (Rat::zero(), rat(1, 4), rat(3, 4)),
                (rat(1, 4), rat(1, 4), rat(1, 2)),
            ] {
                let spec = demo(k, c.clone(), s.clone(), z.clone());
                let p = measure_interactive_errors(&spec).unwrap();
                assert_eq!((p.eps_c, p.eps_s, p.eps_zk), (c.clone(), s.clone(), z.clone()), "k={k}");
            }
        }
    }

    #[test]
    fn approximate_targets_within_one_percent() {
        let t = ErrorProfile::target(rat(1, 17), rat(1, 19), rat(1, 5)).unwrap();
        let spec = build_demo_interactive(3, &t).unwrap();
        let p = measure_interactive_errors(&spec).unwrap();
        assert!((p.eps_c - rat(1, 17)).abs() <= rat(1, 100));
        assert!((p.eps_s - rat(1, 19)).abs() <= rat(1, 100));
        assert_eq!(p.eps_zk, rat(1, 5));
        let bad = ErrorProfile::target(rat(1, 3), rat(1, 3), Rat::zero()).unwrap();
        assert!(build_demo_interactive(3, &bad).is_ok());
        let bad = ErrorProfile::target(rat(1, 40), Rat::zero(), Rat::zero()).unwrap();
        assert!(matches!(build_demo_interactive(3, &bad), Err(LabError::Infeasible(_))));
        assert!(build_demo_interactive(4, &t).is_err());
    }

    #[test]
    fn encode_decode_round_trip() {
        let spec = demo(5, Rat::zero(), rat(1, 4), rat(1, 2));
        let t = Transcript(vec![3, 2, 1, 1, 4]);
        let p = spec.encode(&t).unwrap();
        assert_eq!(spec.decode(p), t);
        assert_eq!(spec.truncate(p, 2), spec.encode(&Transcript(vec![3, 2])).unwrap());
        let r = spec.render(p);
        assert_eq!(r[1].sender, Party::Verifier);
        assert_eq!(r[4].round, 5);
    }

    #[test]
    fn backward_induction_dominates_random_strategies() {
        let spec = demo(3, rat(1, 8), rat(3, 8), rat(1, 2));
        let best = spec.game_value("x0");
        let mut s = SeedStream::new(99);
        for _ in 0..100 {
            let salt = s.next_u64();
            let mut strat = |p: Prefix| {
                let h = (p.code ^ salt).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 40;
                (h % spec.alphabet_len(p.len)) as u16
            };
            assert!(spec.strategy_value("x0", &mut strat) <= best);
        }
    }

    #[test]
    fn always_accept_gives_full_soundness_error() {
        let spec = demo(3, Rat::zero(), Rat::one(), Rat::zero());
        assert_eq!(measure_interactive_errors(&spec).unwrap().eps_s, Rat::one());
    }
}
