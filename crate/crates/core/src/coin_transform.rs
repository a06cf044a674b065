//! Private-coin to public-coin transformation.
//!
//! The first private verifier round is rewritten in three hybrid steps. Step 1 appends
//! an inverter sample `A(a, y)` to the message `y = V(a, r)`. Step 2 sends `r` in that
//! slot and lets the verifier continue with `A(a, y)`. Step 3 sends only `r`, which is
//! now a public coin. The verifier keeps the inverter's coins as its new private tape.
//! Repeating this until no private round is left and then revealing the last coin tape
//! as a final verifier round gives a public-coin protocol with a deterministic verdict.
//!
//! A transcript is handled in two forms:
//! - the *new* form, messages as sent in the current hybrid;
//! - the *original* form, the messages the untransformed protocol would show.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::{fmt_rat, rat_int, rat_max, rat_serde, tv_distance, ExactDist, Rat, Token};
use crate::error::{LabError, Result};
use crate::extrapolation::{ue_quality, IndexedSampler, SamplerDef, UEOracle};
use crate::protocol::{
    check_budget, measure_interactive_errors, ErrorProfile, Instance, InteractiveSpec, Mode, Party, Prefix, Round,
    TapeTable, Transcript,
};
use crate::reductions::Inverter;
use crate::report::Check;

/// `(x, original prefix, private tape) -> message`.
pub type VerifierMap = dyn Fn(&str, &[u16], u64) -> u16 + Send + Sync;
/// `(x, original full transcript, private tape) -> verdict`.
pub type AcceptMap = dyn Fn(&str, &[u16], u64) -> bool + Send + Sync;
/// `(x, original prefix, prover tape) -> message`.
pub type ProverMap = dyn Fn(&str, &[u16], u64) -> u16 + Send + Sync;
/// `(x, simulator tape) -> original full transcript`.
pub type SimMap = dyn Fn(&str, u64) -> Vec<u16> + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundKind {
    Prover,
    PublicCoin,
    Private,
}

/// Inverter for one rewritten round, as integer cut points over its coin space.
struct Layer {
    round: usize,
    /// Size of the space the inverted value lives in.
    below: u64,
    coins: u64,
    inverter: String,
    quality: Rat,
    eq1_tv: Rat,
    cuts: HashMap<(String, Vec<u16>), HashMap<u16, Vec<(u64, u64)>>>,
}

impl Layer {
    fn table(&self, x: &str, prefix: &[u16], y: u16) -> &[(u64, u64)] {
        &self.cuts[&(x.to_string(), prefix.to_vec())][&y]
    }

    fn apply(&self, x: &str, prefix: &[u16], y: u16, rho: u64) -> u64 {
        let t = self.table(x, prefix, y);
        t[t.partition_point(|(end, _)| *end <= rho)].1
    }

    fn law(&self, x: &str, prefix: &[u16], y: u16) -> Vec<(u64, Rat)> {
        let mut prev = 0;
        self.table(x, prefix, y)
            .iter()
            .map(|(end, v)| {
                let w = Rat::new((end - prev).into(), self.coins.into());
                prev = *end;
                (*v, w)
            })
            .collect()
    }
}

/// Verifier with a private tape, given by next-message maps over original transcripts,
/// together with the hybrid rewrites applied so far.
#[derive(Clone)]
pub struct PrivateCoinSpec {
    pub name: String,
    pub instances: Vec<Instance>,
    kinds: Vec<RoundKind>,
    alphabets: Vec<u64>,
    tape: u64,
    verifier: Arc<VerifierMap>,
    accept: Arc<AcceptMap>,
    prover: Arc<ProverMap>,
    prover_tape: u64,
    sim: Arc<SimMap>,
    sim_tapes: BTreeMap<String, u64>,
    layers: Vec<Arc<Layer>>,
    pending: Option<(Arc<Layer>, u8)>,
}

impl fmt::Debug for PrivateCoinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrivateCoinSpec")
            .field("name", &self.name)
            .field("kinds", &self.kinds)
            .field("alphabets", &self.alphabets)
            .field("tape", &self.tape)
            .field("revealed", &self.layers.iter().map(|l| l.round).collect::<Vec<_>>())
            .field("pending", &self.pending.as_ref().map(|(l, s)| (l.round, *s)))
            .finish()
    }
}

struct Path {
    new: Vec<u16>,
    orig: Vec<u16>,
    pt: u64,
    hidden: u64,
    w: Rat,
}

impl PrivateCoinSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        instances: Vec<Instance>,
        rounds: Vec<(RoundKind, u64)>,
        tape: u64,
        verifier: impl Fn(&str, &[u16], u64) -> u16 + Send + Sync + 'static,
        accept: impl Fn(&str, &[u16], u64) -> bool + Send + Sync + 'static,
        (prover_tape, prover): (u64, impl Fn(&str, &[u16], u64) -> u16 + Send + Sync + 'static),
        (sim_tapes, sim): (BTreeMap<String, u64>, impl Fn(&str, u64) -> Vec<u16> + Send + Sync + 'static),
    ) -> Result<Self> {
        if rounds.is_empty() || rounds.iter().any(|(_, a)| *a == 0 || *a > u64::from(u16::MAX)) {
            return Err(LabError::InvalidSpec("rounds need alphabets of size 1..=65535".into()));
        }
        if tape == 0 || prover_tape == 0 {
            return Err(LabError::InvalidSpec("empty tape space".into()));
        }
        check_budget(u128::from(tape) * u128::from(prover_tape))?;
        for inst in &instances {
            match sim_tapes.get(&inst.label) {
                Some(n) if *n > 0 => check_budget(u128::from(*n))?,
                _ => return Err(LabError::InvalidSpec(format!("no simulator tape for {}", inst.label))),
            }
        }
        let (kinds, alphabets) = rounds.into_iter().unzip();
        Ok(PrivateCoinSpec {
            name: name.into(),
            instances,
            kinds,
            alphabets,
            tape,
            verifier: Arc::new(verifier),
            accept: Arc::new(accept),
            prover: Arc::new(prover),
            prover_tape,
            sim: Arc::new(sim),
            sim_tapes,
            layers: Vec::new(),
            pending: None,
        })
    }

    /// Views a public-coin protocol as one with a trivial private tape.
    pub fn from_public(spec: &InteractiveSpec) -> Result<Self> {
        let rounds = (0..spec.k())
            .map(|j| {
                let kind = match spec.owner(j) {
                    Party::Prover => RoundKind::Prover,
                    Party::Verifier => RoundKind::PublicCoin,
                };
                (kind, spec.alphabet_len(j))
            })
            .collect();
        let sim_tapes = spec.instances.iter().map(|i| (i.label.clone(), spec.sim_tape(&i.label))).collect();
        let (a, p, s) = (Arc::new(spec.clone()), Arc::new(spec.clone()), Arc::new(spec.clone()));
        Self::new(
            format!("{} (as private-coin)", spec.name),
            spec.instances.clone(),
            rounds,
            1,
            |_, _, _| 0,
            move |x, t, _| a.accepts(x, a.encode(&Transcript(t.to_vec())).expect("in range")),
            (spec.prover_tape(), move |x: &str, t: &[u16], pt| {
                let pre = p.encode(&Transcript(t.to_vec())).expect("in range");
                p.prover_msg(x, pre, pt).expect("honest prover defined on reachable prefixes")
            }),
            (sim_tapes, move |x: &str, tape| s.decode(s.full(s.sim_code(x, tape))).0),
        )
    }

    pub fn k(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[RoundKind] {
        &self.kinds
    }

    /// Rounds (0-based) already rewritten into public coins.
    pub fn revealed_rounds(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.round).collect()
    }

    /// Round and step of a rewrite in progress.
    pub fn pending_step(&self) -> Option<(usize, u8)> {
        self.pending.as_ref().map(|(l, s)| (l.round, *s))
    }

    fn layer_at(&self, j: usize) -> Option<usize> {
        self.layers.iter().position(|l| l.round == j)
    }

    fn pending_at(&self, j: usize) -> Option<(&Layer, u8)> {
        self.pending.as_ref().filter(|(l, _)| l.round == j).map(|(l, s)| (l.as_ref(), *s))
    }

    /// First private round not yet rewritten.
    pub fn next_private_round(&self) -> Option<usize> {
        let done = self.layers.last().map_or(0, |l| l.round + 1);
        (done..self.k()).find(|j| self.kinds[*j] == RoundKind::Private)
    }

    /// Leading verifier messages that are uniform coins.
    pub fn leading_uniform(&self) -> usize {
        let mut t = 0;
        for j in 0..self.k() {
            match self.kinds[j] {
                RoundKind::Prover => {}
                RoundKind::PublicCoin => t += 1,
                RoundKind::Private if self.layer_at(j).is_some() => t += 1,
                RoundKind::Private => break,
            }
        }
        t
    }

    fn level_tape(&self, level: usize) -> u64 {
        if level == 0 { self.tape } else { self.layers[level - 1].coins }
    }

    /// Private tape the verifier currently holds.
    pub fn top_tape(&self) -> u64 {
        self.level_tape(self.layers.len())
    }

    pub fn new_alphabet(&self, j: usize) -> u64 {
        if let Some(l) = self.layer_at(j) {
            self.layers[l].below
        } else if let Some((l, _)) = self.pending_at(j) {
            self.alphabets[j] * l.below
        } else {
            self.alphabets[j]
        }
    }

    /// Original-level tape behind a value of the given level.
    fn resolve(&self, x: &str, mut level: usize, mut v: u64, new: &[u16], orig: &[u16]) -> u64 {
        while level > 0 {
            let l = &self.layers[level - 1];
            v = l.apply(x, &new[..l.round], orig[l.round], v);
            level -= 1;
        }
        v
    }

    /// Original form of a new-form transcript (prefix or full).
    pub fn orig_of(&self, x: &str, new: &[u16]) -> Vec<u16> {
        let mut orig = Vec::with_capacity(new.len());
        for (j, &m) in new.iter().enumerate() {
            let y = if let Some(l) = self.layer_at(j) {
                let r = self.resolve(x, l, u64::from(m), &new[..j], &orig);
                (self.verifier)(x, &orig, r)
            } else if let Some((l, _)) = self.pending_at(j) {
                (u64::from(m) / l.below) as u16
            } else {
                m
            };
            orig.push(y);
        }
        orig
    }

    fn check_message(&self, j: usize, m: u16) -> Result<u16> {
        if u64::from(m) >= self.alphabets[j] {
            return Err(LabError::Round { round: j + 1, reason: format!("message {m} outside the alphabet") });
        }
        Ok(m)
    }

    /// Honest runs as weighted paths carrying the verifier's hidden value.
    fn honest_paths(&self, x: &str) -> Result<Vec<Path>> {
        let top = self.layers.len();
        let w0 = Rat::new(1.into(), (u128::from(self.tape) * u128::from(self.prover_tape)).into());
        let mut paths: Vec<Path> = (0..self.prover_tape)
            .flat_map(|pt| {
                let w0 = w0.clone();
                (0..self.tape).map(move |r| Path { new: vec![], orig: vec![], pt, hidden: r, w: w0.clone() })
            })
            .collect();
        for j in 0..self.k() {
            let mut next = Vec::with_capacity(paths.len());
            for mut p in paths {
                if let Some(l) = self.layer_at(j) {
                    let layer = &self.layers[l];
                    let u = p.hidden;
                    let y = (self.verifier)(x, &p.orig, self.resolve(x, l, u, &p.new, &p.orig));
                    p.new.push(u as u16);
                    p.orig.push(self.check_message(j, y)?);
                    let w = &p.w / rat_int(layer.coins);
                    for rho in 0..layer.coins {
                        next.push(Path { new: p.new.clone(), orig: p.orig.clone(), pt: p.pt, hidden: rho, w: w.clone() });
                    }
                } else if let Some((layer, step)) = self.pending_at(j) {
                    let u = p.hidden;
                    let y = self.check_message(j, (self.verifier)(x, &p.orig, self.resolve(x, top, u, &p.new, &p.orig)))?;
                    for (v, q) in layer.law(x, &p.new, y) {
                        let (shown, hidden) = if step == 1 { (v, u) } else { (u, v) };
                        let mut new = p.new.clone();
                        new.push((u64::from(y) * layer.below + shown) as u16);
                        let mut orig = p.orig.clone();
                        orig.push(y);
                        next.push(Path { new, orig, pt: p.pt, hidden, w: &p.w * q });
                    }
                } else {
                    match self.kinds[j] {
                        RoundKind::Prover => {
                            let m = self.check_message(j, (self.prover)(x, &p.orig, p.pt))?;
                            p.new.push(m);
                            p.orig.push(m);
                            next.push(p);
                        }
                        RoundKind::PublicCoin => {
                            let a = self.alphabets[j];
                            let w = &p.w / rat_int(a);
                            for c in 0..a as u16 {
                                let mut new = p.new.clone();
                                new.push(c);
                                let mut orig = p.orig.clone();
                                orig.push(c);
                                next.push(Path { new, orig, pt: p.pt, hidden: p.hidden, w: w.clone() });
                            }
                        }
                        RoundKind::Private => {
                            let r = self.resolve(x, top, p.hidden, &p.new, &p.orig);
                            let y = self.check_message(j, (self.verifier)(x, &p.orig, r))?;
                            p.new.push(y);
                            p.orig.push(y);
                            next.push(p);
                        }
                    }
                }
            }
            check_budget(next.len() as u128)?;
            paths = next;
        }
        Ok(paths)
    }

    fn verdict(&self, x: &str, p: &Path) -> bool {
        let r = self.resolve(x, self.layers.len(), p.hidden, &p.new, &p.orig);
        (self.accept)(x, &p.orig, r)
    }

    /// Exact law of (new-form transcript, verdict) under the honest prover.
    pub fn honest_joint(&self, x: &str) -> Result<ExactDist<(Vec<u16>, bool)>> {
        let mut acc: BTreeMap<(Vec<u16>, bool), Rat> = BTreeMap::new();
        for p in self.honest_paths(x)? {
            let v = self.verdict(x, &p);
            *acc.entry((p.new, v)).or_insert_with(Rat::zero) += p.w;
        }
        ExactDist::new(acc)
    }

    pub fn honest_acceptance(&self, x: &str) -> Result<Rat> {
        Ok(self.honest_joint(x)?.prob_where(|(_, v)| *v))
    }

    /// Exact law of the simulator's new-form transcripts. Rewritten rounds get the
    /// inverter's sample for the simulated message.
    pub fn sim_law(&self, x: &str) -> Result<ExactDist<Vec<u16>>> {
        let n = *self
            .sim_tapes
            .get(x)
            .ok_or_else(|| LabError::InvalidSpec(format!("no simulator for {x}")))?;
        let mut acc: BTreeMap<Vec<u16>, Rat> = BTreeMap::new();
        for s in 0..n {
            let orig = (self.sim)(x, s);
            if orig.len() != self.k() {
                return Err(LabError::InvalidSpec(format!("simulator of {x} returned {} messages", orig.len())));
            }
            let mut paths = vec![(Vec::with_capacity(self.k()), Rat::new(1.into(), n.into()))];
            for (j, &y) in orig.iter().enumerate() {
                self.check_message(j, y)?;
                let mut next = Vec::new();
                for (new, w) in paths {
                    let shown: Vec<(u64, Rat)> = if let Some(l) = self.layer_at(j) {
                        self.layers[l].law(x, &new, y)
                    } else if let Some((layer, _)) = self.pending_at(j) {
                        layer
                            .law(x, &new, y)
                            .into_iter()
                            .map(|(v, q)| (u64::from(y) * layer.below + v, q))
                            .collect()
                    } else {
                        vec![(u64::from(y), Rat::one())]
                    };
                    for (m, q) in shown {
                        let mut n2 = new.clone();
                        n2.push(m as u16);
                        next.push((n2, &w * q));
                    }
                }
                paths = next;
            }
            for (new, w) in paths {
                *acc.entry(new).or_insert_with(Rat::zero) += w;
            }
        }
        ExactDist::new(acc)
    }

    /// Optimal acceptance of an unbounded prover who sees every message, appended
    /// samples and revealed coins included.
    pub fn game_value(&self, x: &str) -> Result<Rat> {
        let w = Rat::new(1.into(), self.tape.into());
        let items = (0..self.tape).map(|r| (r, w.clone())).collect();
        self.game(x, &mut Vec::new(), &mut Vec::new(), items)
    }

    fn game(&self, x: &str, new: &mut Vec<u16>, orig: &mut Vec<u16>, items: Vec<(u64, Rat)>) -> Result<Rat> {
        let j = new.len();
        let top = self.layers.len();
        if j == self.k() {
            let mut v = Rat::zero();
            for (h, w) in items {
                if (self.accept)(x, orig, self.resolve(x, top, h, new, orig)) {
                    v += w;
                }
            }
            return Ok(v);
        }
        // Children keyed by new message: (original message, hidden items).
        let mut children: BTreeMap<u16, (u16, Vec<(u64, Rat)>)> = BTreeMap::new();
        if let Some(l) = self.layer_at(j) {
            let layer = &self.layers[l];
            for (u, w) in items {
                let y = self.check_message(j, (self.verifier)(x, orig, self.resolve(x, l, u, new, orig)))?;
                let w = w / rat_int(layer.coins);
                let e = children.entry(u as u16).or_insert_with(|| (y, Vec::new()));
                e.1.extend((0..layer.coins).map(|rho| (rho, w.clone())));
            }
        } else if let Some((layer, step)) = self.pending_at(j) {
            for (u, w) in items {
                let y = self.check_message(j, (self.verifier)(x, orig, self.resolve(x, top, u, new, orig)))?;
                for (v, q) in layer.law(x, new, y) {
                    let (shown, hidden) = if step == 1 { (v, u) } else { (u, v) };
                    let m = (u64::from(y) * layer.below + shown) as u16;
                    children.entry(m).or_insert_with(|| (y, Vec::new())).1.push((hidden, &w * q));
                }
            }
        } else {
            match self.kinds[j] {
                RoundKind::Prover => {
                    let mut best = Rat::zero();
                    for m in 0..self.alphabets[j] as u16 {
                        new.push(m);
                        orig.push(m);
                        let v = self.game(x, new, orig, items.clone());
                        new.pop();
                        orig.pop();
                        best = rat_max(&best, &v?);
                    }
                    return Ok(best);
                }
                RoundKind::PublicCoin => {
                    let a = self.alphabets[j];
                    for c in 0..a as u16 {
                        let scaled = items.iter().map(|(h, w)| (*h, w / rat_int(a))).collect();
                        children.insert(c, (c, scaled));
                    }
                }
                RoundKind::Private => {
                    for (h, w) in items {
                        let y = self.check_message(j, (self.verifier)(x, orig, self.resolve(x, top, h, new, orig)))?;
                        children.entry(y).or_insert_with(|| (y, Vec::new())).1.push((h, w));
                    }
                }
            }
        }
        let mut total = Rat::zero();
        for (m, (y, items)) in children {
            new.push(m);
            orig.push(y);
            let v = self.game(x, new, orig, items);
            new.pop();
            orig.pop();
            total += v?;
        }
        Ok(total)
    }

    /// Rewritten rounds, including one in progress.
    fn extra_rounds(&self) -> BTreeSet<usize> {
        self.layers.iter().map(|l| l.round).chain(self.pending.as_ref().map(|(l, _)| l.round)).collect()
    }

    /// Original messages, plus the extra component at the listed rewritten rounds.
    fn canonical(&self, x: &str, new: &[u16], keep: &BTreeSet<usize>) -> Vec<(u16, Option<u64>)> {
        let orig = self.orig_of(x, new);
        (0..new.len())
            .map(|j| {
                let extra = if !keep.contains(&j) {
                    None
                } else if self.layer_at(j).is_some() {
                    Some(u64::from(new[j]))
                } else {
                    self.pending_at(j).map(|(l, _)| u64::from(new[j]) % l.below)
                };
                (orig[j], extra)
            })
            .collect()
    }

    fn build_layer(&self, inv: &Arc<dyn Inverter>) -> Result<Layer> {
        let j = self
            .next_private_round()
            .ok_or_else(|| LabError::OutOfOrder("no private verifier round left to rewrite".into()))?;
        let level = self.layers.len();
        let below = self.level_tape(level);
        let alph = self.alphabets[j];
        let mut prefixes: Vec<Vec<u16>> = vec![vec![]];
        for i in 0..j {
            let a = self.new_alphabet(i);
            check_budget(prefixes.len() as u128 * u128::from(a))?;
            prefixes = prefixes
                .into_iter()
                .flat_map(|p| {
                    (0..a as u16).map(move |m| {
                        let mut q = p.clone();
                        q.push(m);
                        q
                    })
                })
                .collect();
        }
        check_budget(prefixes.len() as u128 * self.instances.len() as u128 * u128::from(below))?;
        let mut keys: BTreeMap<String, (String, Vec<u16>)> = BTreeMap::new();
        let mut values: HashMap<String, Vec<u16>> = HashMap::new();
        for inst in &self.instances {
            let x = &inst.label;
            for p in &prefixes {
                let orig = self.orig_of(x, p);
                let label = format!(
                    "{x}|{}",
                    p.iter().map(u16::to_string).collect::<Vec<_>>().join(".")
                );
                let vals = (0..below)
                    .map(|u| self.check_message(j, (self.verifier)(x, &orig, self.resolve(x, level, u, p, &orig))))
                    .collect::<Result<Vec<u16>>>()?;
                values.insert(label.clone(), vals);
                keys.insert(label, (x.clone(), p.clone()));
            }
        }
        let values = Arc::new(values);
        let table = values.clone();
        let def = SamplerDef::new(
            format!("{} round {}", self.name, j + 1),
            keys.keys().map(|k| (k.clone(), below)).collect(),
            move |label, u| Token::index(u64::from(table[label][u as usize]), 2),
        )?;
        let oracle = UEOracle::with_inverter(IndexedSampler::build(def)?, inv.clone());

        let mut laws: Vec<(String, u16, Vec<(u64, Rat)>)> = Vec::new();
        let mut quality = Rat::zero();
        let mut eq1_tv = Rat::zero();
        for label in keys.keys() {
            quality = rat_max(&quality, &ue_quality(&oracle, label)?);
            let vals = &values[label];
            let mut per_y: HashMap<u16, Vec<(u64, Rat)>> = HashMap::new();
            for y in 0..alph as u16 {
                let tok = Token::index(u64::from(y), 2);
                let law: Vec<(u64, Rat)> = if oracle.sampler().preimage(label, &tok).is_none() {
                    // Not an image: only the simulator can ask, and it gets a uniform value.
                    let w = Rat::new(1.into(), below.into());
                    (0..below).map(|u| (u, w.clone())).collect()
                } else {
                    let q = oracle.law_of(label, &tok, |u| u)?;
                    if !q.fail.is_zero() {
                        return Err(LabError::Round {
                            round: j + 1,
                            reason: format!("inverter fails with probability {} at {label}", fmt_rat(&q.fail)),
                        });
                    }
                    q.outcomes.into_iter().filter(|(_, w)| !w.is_zero()).collect()
                };
                per_y.insert(y, law.clone());
                laws.push((label.clone(), y, law));
            }
            // (y, r, A(y)) against (y, A(y), r) for uniform r.
            let mut d1: BTreeMap<(u16, u64, u64), Rat> = BTreeMap::new();
            let mut d2: BTreeMap<(u16, u64, u64), Rat> = BTreeMap::new();
            let wr = Rat::new(1.into(), below.into());
            for r in 0..below {
                let y = vals[r as usize];
                for (v, q) in &per_y[&y] {
                    let w = &wr * q;
                    *d1.entry((y, r, *v)).or_insert_with(Rat::zero) += &w;
                    *d2.entry((y, *v, r)).or_insert_with(Rat::zero) += w;
                }
            }
            eq1_tv = rat_max(&eq1_tv, &tv_distance(&ExactDist::new(d1)?, &ExactDist::new(d2)?));
        }

        let mut coins = 1u64;
        for (_, _, law) in &laws {
            for (_, w) in law {
                let d = w.denom().to_u64().ok_or(LabError::BudgetExceeded { needed: u128::MAX, budget: 1 << 20 })?;
                coins = coins.lcm(&d);
                check_budget(u128::from(coins))?;
            }
        }
        if coins > u64::from(u16::MAX) {
            return Err(LabError::BudgetExceeded { needed: coins.into(), budget: u16::MAX.into() });
        }
        let mut cuts: HashMap<(String, Vec<u16>), HashMap<u16, Vec<(u64, u64)>>> = HashMap::new();
        for (label, y, law) in laws {
            let mut end = 0u64;
            let table = law
                .into_iter()
                .map(|(v, w)| {
                    end += (w * rat_int(coins)).to_integer().to_u64().expect("fits");
                    (end, v)
                })
                .collect();
            cuts.entry(keys[&label].clone()).or_default().insert(y, table);
        }
        Ok(Layer { round: j, below, coins, inverter: inv.name(), quality, eq1_tv, cuts })
    }

    /// Public-coin protocol: revealed rounds become verifier coins and a final round
    /// reveals the remaining private tape, so the verdict is a function of the transcript.
    pub fn to_interactive(&self) -> Result<InteractiveSpec> {
        if self.pending.is_some() || self.next_private_round().is_some() {
            return Err(LabError::OutOfOrder("private rounds remain".into()));
        }
        let top = self.top_tape();
        let coin_round = top > 1;
        if top > u64::from(u16::MAX) {
            return Err(LabError::BudgetExceeded { needed: top.into(), budget: u16::MAX.into() });
        }
        let alph = |n: u64| (0..n).map(|m| Token::index(m, 2)).collect::<Vec<_>>();
        let mut rounds: Vec<Round> = (0..self.k())
            .map(|j| Round {
                owner: if self.kinds[j] == RoundKind::Prover { Party::Prover } else { Party::Verifier },
                alphabet: alph(self.new_alphabet(j)),
            })
            .collect();
        if coin_round {
            rounds.push(Round { owner: Party::Verifier, alphabet: alph(top) });
        }
        let sizes: Vec<u64> = rounds.iter().map(|r| r.alphabet.len() as u64).collect();
        let mut weights = vec![1u64];
        for a in &sizes {
            let w = u128::from(*weights.last().unwrap()) * u128::from(*a);
            check_budget(w)?;
            weights.push(w as u64);
        }
        let total = *weights.last().unwrap();
        let decode = |code: u64| -> Vec<u16> {
            sizes.iter().zip(&weights).map(|(a, w)| ((code / w) % a) as u16).collect()
        };
        let encode = |msgs: &[u16]| -> u64 { msgs.iter().zip(&weights).map(|(m, w)| u64::from(*m) * w).sum() };

        let mut accept = BTreeMap::new();
        let mut prover = BTreeMap::new();
        let mut sim = BTreeMap::new();
        for inst in &self.instances {
            let x = inst.label.as_str();
            let table: Vec<bool> = (0..total)
                .map(|code| {
                    let mut msgs = decode(code);
                    let c = if coin_round { u64::from(msgs.pop().expect("coin round")) } else { 0 };
                    let orig = self.orig_of(x, &msgs);
                    (self.accept)(x, &orig, self.resolve(x, self.layers.len(), c, &msgs, &orig))
                })
                .collect();
            accept.insert(x.to_string(), table);

            if inst.in_language {
                let mut entries = BTreeMap::new();
                for j in (0..self.k()).filter(|j| self.kinds[*j] == RoundKind::Prover) {
                    for code in 0..weights[j] {
                        let msgs: Vec<u16> = decode(code)[..j].to_vec();
                        let orig = self.orig_of(x, &msgs);
                        let t = TapeTable::from_fn(self.prover_tape, |pt| (self.prover)(x, &orig, pt))?;
                        entries.insert(Prefix { len: j, code }, t);
                    }
                }
                prover.insert(x.to_string(), entries);
            }

            let law = self.sim_law(x)?;
            let coin_w = Rat::new(1.into(), top.into());
            let mut codes: BTreeMap<u64, Rat> = BTreeMap::new();
            for (msgs, w) in law.iter() {
                if coin_round {
                    for c in 0..top as u16 {
                        let mut full = msgs.clone();
                        full.push(c);
                        codes.insert(encode(&full), w * &coin_w);
                    }
                } else {
                    codes.insert(encode(msgs), w.clone());
                }
            }
            let den = codes.values().try_fold(1u64, |a, w| w.denom().to_u64().map(|d| a.lcm(&d)));
            let den = den.ok_or(LabError::BudgetExceeded { needed: u128::MAX, budget: 1 << 20 })?;
            check_budget(u128::from(den))?;
            let blocks = codes
                .into_iter()
                .map(|(c, w)| (c, (w * rat_int(den)).to_integer().to_u64().expect("fits")))
                .collect();
            sim.insert(x.to_string(), TapeTable::from_blocks(blocks)?);
        }
        InteractiveSpec::new(
            format!("{} (public coin)", self.name),
            self.instances.clone(),
            rounds,
            self.prover_tape,
            prover,
            accept,
            sim,
        )
    }
}

/// Exact profile by enumeration: completeness over honest runs, soundness by backward
/// induction over what the prover sees, zero knowledge as transcript distance.
pub fn measure_private_errors(spec: &PrivateCoinSpec) -> Result<ErrorProfile> {
    measure_on(spec, &spec.instances.iter().map(|i| i.label.as_str()).collect::<Vec<_>>())
}

fn measure_on(spec: &PrivateCoinSpec, xs: &[&str]) -> Result<ErrorProfile> {
    let mut eps_c = Rat::zero();
    let mut eps_s = Rat::zero();
    let mut eps_zk = Rat::zero();
    for x in xs {
        let inst = spec
            .instances
            .iter()
            .find(|i| i.label == *x)
            .ok_or_else(|| LabError::InvalidSpec(format!("unknown instance {x:?}")))?;
        if inst.in_language {
            let joint = spec.honest_joint(x)?;
            eps_c = rat_max(&eps_c, &joint.prob_where(|(_, v)| !*v));
            let honest = joint.map(|(t, _)| t.clone());
            eps_zk = rat_max(&eps_zk, &tv_distance(&honest, &spec.sim_law(x)?));
        } else {
            eps_s = rat_max(&eps_s, &spec.game_value(x)?);
        }
    }
    ErrorProfile::new(eps_c, eps_s, eps_zk, Mode::Exact, "private-coin enumeration")
}

/// Exact distributional inverter for the first private round that is not yet public.
/// The auxiliary input is the transcript prefix: every prefix is its own instance.
/// Reports the inverter's quality and the distance between `(y, r, A(y))` and
/// `(y, A(y), r)`, maximized over prefixes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverterSummary {
    pub round: usize,
    pub inverter: String,
    pub coins: u64,
    #[serde(with = "rat_serde")]
    pub quality: Rat,
    #[serde(with = "rat_serde")]
    pub eq1_tv: Rat,
}

pub fn exact_distributional_inverter(spec: &PrivateCoinSpec) -> Result<InverterSummary> {
    inverter_summary(spec, &(Arc::new(crate::reductions::BruteForce) as Arc<dyn Inverter>))
}

pub fn inverter_summary(spec: &PrivateCoinSpec, inv: &Arc<dyn Inverter>) -> Result<InverterSummary> {
    let l = spec.build_layer(inv)?;
    Ok(InverterSummary { round: l.round + 1, inverter: l.inverter, coins: l.coins, quality: l.quality, eq1_tv: l.eq1_tv })
}

/// Applies one hybrid step to the first private round. Steps must come in the order
/// 1, 2, 3; steps 2 and 3 reuse the inverter table built in step 1 and require the
/// same inverter.
pub fn hybrid_step(spec: &PrivateCoinSpec, inv: &Arc<dyn Inverter>, which: u8) -> Result<PrivateCoinSpec> {
    let mut out = spec.clone();
    match (which, &spec.pending) {
        (1, None) => {
            out.pending = Some((Arc::new(spec.build_layer(inv)?), 1));
        }
        (2 | 3, Some((layer, step))) if *step + 1 == which => {
            if layer.inverter != inv.name() {
                return Err(LabError::OutOfOrder(format!(
                    "step {which} with inverter {} after step 1 with {}",
                    inv.name(),
                    layer.inverter
                )));
            }
            if which == 2 {
                out.pending = Some((layer.clone(), 2));
            } else {
                out.pending = None;
                out.layers.push(layer.clone());
            }
        }
        (1..=3, _) => {
            let at = spec.pending_step().map_or("no step".to_string(), |(_, s)| format!("step {s}"));
            return Err(LabError::OutOfOrder(format!("step {which} requested after {at}")));
        }
        _ => return Err(LabError::OutOfRange(format!("hybrid step {which}"))),
    }
    Ok(out)
}

/// Largest distance, over in-language instances, between the honest laws of
/// (transcript, verdict) of two hybrids, compared on original messages plus the
/// components both hybrids expose.
pub fn hybrid_tv(a: &PrivateCoinSpec, b: &PrivateCoinSpec) -> Result<Rat> {
    let keep: BTreeSet<usize> = a.extra_rounds().intersection(&b.extra_rounds()).copied().collect();
    let mut worst = Rat::zero();
    for inst in a.instances.iter().filter(|i| i.in_language) {
        let x = inst.label.as_str();
        let pa = project(a, x, &keep)?;
        let pb = project(b, x, &keep)?;
        worst = rat_max(&worst, &tv_distance(&pa, &pb));
    }
    Ok(worst)
}

type Canon = (Vec<(u16, Option<u64>)>, bool);

fn project(spec: &PrivateCoinSpec, x: &str, keep: &BTreeSet<usize>) -> Result<ExactDist<Canon>> {
    let mut acc: BTreeMap<Canon, Rat> = BTreeMap::new();
    for ((t, v), w) in spec.honest_joint(x)?.iter() {
        *acc.entry((spec.canonical(x, t, keep), *v)).or_insert_with(Rat::zero) += w;
    }
    ExactDist::new(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridRow {
    pub hybrid: String,
    /// 1-based round being rewritten.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<u8>,
    /// Honest (transcript, verdict) distance to the previous row.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub tv: Option<Rat>,
    #[serde(with = "rat_serde")]
    pub eps_c: Rat,
    #[serde(with = "rat_serde")]
    pub eps_s: Rat,
    #[serde(with = "rat_serde")]
    pub eps_zk: Rat,
}

mod opt_rat {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&fmt_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rat>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| crate::dist::parse_rat(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub spec: String,
    pub rows: Vec<HybridRow>,
    pub before: ErrorProfile,
    pub after: ErrorProfile,
    #[serde(with = "rat_serde")]
    pub delta_c: Rat,
    #[serde(with = "rat_serde")]
    pub delta_s: Rat,
    #[serde(with = "rat_serde")]
    pub delta_zk: Rat,
    /// Honest (transcript, verdict) distance on original messages.
    #[serde(with = "rat_serde")]
    pub honest_tv: Rat,
    pub inverters: Vec<InverterSummary>,
    /// Twice the summed inverter quality: the allowed growth of each error.
    #[serde(with = "rat_serde")]
    pub error_budget: Rat,
    pub checks: Vec<Check>,
}

impl TransformReport {
    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn row(spec: &PrivateCoinSpec, hybrid: String, at: Option<(usize, u8)>, tv: Option<Rat>) -> Result<HybridRow> {
    let p = measure_private_errors(spec)?;
    Ok(HybridRow {
        hybrid,
        round: at.map(|(r, _)| r + 1),
        step: at.map(|(_, s)| s),
        tv,
        eps_c: p.eps_c,
        eps_s: p.eps_s,
        eps_zk: p.eps_zk,
    })
}

/// Exact profiles of two hybrids of the same protocol, their honest distance on
/// original messages, and whether each error grew by at most the inverter budget.
pub fn transform_fidelity(before: &PrivateCoinSpec, after: &PrivateCoinSpec, xs: &[&str]) -> Result<TransformReport> {
    let b = measure_on(before, xs)?;
    let a = measure_on(after, xs)?;
    let mut honest_tv = Rat::zero();
    for x in xs {
        if before.instances.iter().any(|i| i.label == *x && i.in_language) {
            let keep = BTreeSet::new();
            honest_tv = rat_max(&honest_tv, &tv_distance(&project(before, x, &keep)?, &project(after, x, &keep)?));
        }
    }
    let skip = before.layers.len();
    let inverters: Vec<InverterSummary> = after
        .layers
        .iter()
        .skip(skip)
        .map(|l| InverterSummary {
            round: l.round + 1,
            inverter: l.inverter.clone(),
            coins: l.coins,
            quality: l.quality.clone(),
            eq1_tv: l.eq1_tv.clone(),
        })
        .collect();
    let error_budget: Rat = inverters.iter().map(|i| &i.quality * rat_int(2)).sum();
    let delta_c = &a.eps_c - &b.eps_c;
    let delta_s = &a.eps_s - &b.eps_s;
    let delta_zk = &a.eps_zk - &b.eps_zk;
    let mut checks = Vec::new();
    for (name, d) in [("completeness growth", &delta_c), ("soundness growth", &delta_s), ("zero-knowledge growth", &delta_zk)] {
        checks.push(Check::new(
            name,
            *d <= error_budget,
            format!("{} vs budget {}", fmt_rat(d), fmt_rat(&error_budget)),
        ));
    }
    checks.push(Check::new(
        "honest distance",
        honest_tv <= error_budget,
        format!("{} vs budget {}", fmt_rat(&honest_tv), fmt_rat(&error_budget)),
    ));
    Ok(TransformReport {
        spec: before.name.clone(),
        rows: Vec::new(),
        before: b,
        after: a,
        delta_c,
        delta_s,
        delta_zk,
        honest_tv,
        inverters,
        error_budget,
        checks,
    })
}

/// Rewrites every private round with the given inverter and converts the result to a
/// public-coin protocol. The report lists every hybrid and checks that the summed
/// inverter error stays within `1/q`.
pub fn publicize(
    spec: &PrivateCoinSpec,
    inv: &Arc<dyn Inverter>,
    q_budget: &Rat,
) -> Result<(InteractiveSpec, TransformReport)> {
    if !q_budget.is_positive() {
        return Err(LabError::OutOfRange("q budget must be positive".into()));
    }
    let mut rows = vec![row(spec, "0".into(), None, None)?];
    let mut cur = spec.clone();
    while let Some(j) = cur.next_private_round() {
        for step in 1..=3u8 {
            let next = hybrid_step(&cur, inv, step).map_err(|e| match e {
                LabError::Round { .. } => e,
                other => LabError::Round { round: j + 1, reason: other.to_string() },
            })?;
            let tv = hybrid_tv(&cur, &next)?;
            rows.push(row(&next, format!("round {} step {step}", j + 1), Some((j, step)), Some(tv))?);
            cur = next;
        }
    }
    let public = cur.to_interactive()?;
    let measured = measure_interactive_errors(&public)?;
    rows.push(HybridRow {
        hybrid: "public".into(),
        round: None,
        step: None,
        tv: None,
        eps_c: measured.eps_c.clone(),
        eps_s: measured.eps_s.clone(),
        eps_zk: measured.eps_zk.clone(),
    });
    let xs: Vec<&str> = spec.instances.iter().map(|i| i.label.as_str()).collect();
    let mut report = transform_fidelity(spec, &cur, &xs)?;
    let last = &rows[rows.len() - 2];
    report.checks.push(Check::new(
        "public protocol keeps the last hybrid's profile",
        measured.eps_c == last.eps_c && measured.eps_s == last.eps_s && measured.eps_zk == last.eps_zk,
        format!(
            "({}, {}, {})",
            fmt_rat(&measured.eps_c),
            fmt_rat(&measured.eps_s),
            fmt_rat(&measured.eps_zk)
        ),
    ));
    let limit = Rat::one() / q_budget;
    report.checks.push(Check::new(
        "inverter error within 1/q",
        report.error_budget <= limit,
        format!("{} vs {}", fmt_rat(&report.error_budget), fmt_rat(&limit)),
    ));
    report.after = measured;
    report.rows = rows;
    Ok((public, report))
}

/// Three-message private-coin protocol with profile (1/8, 1/2, 1/8).
///
/// The prover sends `a` in {0,1}, the verifier sends the parity `v = r mod 2` of its
/// tape `r` in [0,4), the prover answers `z` in [0,5) with 4 a dummy. `x1` accepts iff
/// `z = a + (r mod 2)`; the honest prover sends the dummy with probability 1/8. `x0`
/// accepts iff `z = r`, which a prover who only sees the parity hits half the time.
/// The simulator always answers correctly with uniform `a`.
pub fn build_private_fixture() -> Result<PrivateCoinSpec> {
    let instances = vec![Instance::yes("x1", Token::byte(1)), Instance::no("x0")];
    let sim_tapes = instances.iter().map(|i| (i.label.clone(), 4)).collect();
    PrivateCoinSpec::new(
        "parity-challenge",
        instances,
        vec![(RoundKind::Prover, 2), (RoundKind::Private, 2), (RoundKind::Prover, 5)],
        4,
        |_, _, r| (r % 2) as u16,
        |x, t, r| {
            let z = u64::from(t[2]);
            if x == "x1" { z == u64::from(t[0]) + r % 2 } else { z == r }
        },
        (8, |_: &str, t: &[u16], pt: u64| match t.len() {
            0 => (pt % 2) as u16,
            _ if pt == 0 => 4,
            _ => t[0] + t[1],
        }),
        (sim_tapes, |_: &str, s: u64| {
            let (a, v) = ((s % 2) as u16, (s / 2) as u16);
            vec![a, v, a + v]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::rat;
    use crate::protocol::build_demo_interactive;
    use crate::reductions::{BruteForce, Noisy};

    fn exact() -> Arc<dyn Inverter> {
        Arc::new(BruteForce)
    }

    fn noisy(eta: Rat) -> Arc<dyn Inverter> {
        Arc::new(Noisy::new(Arc::new(BruteForce), eta))
    }

    fn profile(p: &ErrorProfile) -> (Rat, Rat, Rat) {
        (p.eps_c.clone(), p.eps_s.clone(), p.eps_zk.clone())
    }

    #[test]
    fn fixture_profile() {
        let spec = build_private_fixture().unwrap();
        let p = measure_private_errors(&spec).unwrap();
        assert_eq!(profile(&p), (rat(1, 8), rat(1, 2), rat(1, 8)));
        assert_eq!(spec.leading_uniform(), 0);
    }

    #[test]
    fn exact_inverter_satisfies_the_swap_identity() {
        let spec = build_private_fixture().unwrap();
        let inv = exact_distributional_inverter(&spec).unwrap();
        assert_eq!(inv.round, 2);
        assert!(inv.quality.is_zero() && inv.eq1_tv.is_zero());
        assert_eq!(inv.coins, 2);
    }

    #[test]
    fn steps_in_order() {
        let spec = build_private_fixture().unwrap();
        let inv = exact();
        assert!(matches!(hybrid_step(&spec, &inv, 2), Err(LabError::OutOfOrder(_))));
        let h1 = hybrid_step(&spec, &inv, 1).unwrap();
        assert!(matches!(hybrid_step(&h1, &inv, 3), Err(LabError::OutOfOrder(_))));
        assert!(matches!(hybrid_step(&h1, &inv, 1), Err(LabError::OutOfOrder(_))));
        assert!(matches!(hybrid_step(&h1, &noisy(rat(1, 2)), 2), Err(LabError::OutOfOrder(_))));
        let h2 = hybrid_step(&h1, &inv, 2).unwrap();
        let h3 = hybrid_step(&h2, &inv, 3).unwrap();
        assert_eq!(h3.leading_uniform(), 1);
        assert!(matches!(hybrid_step(&h3, &inv, 1), Err(LabError::OutOfOrder(_))));

        let base = measure_private_errors(&spec).unwrap();
        for h in [&h1, &h2, &h3] {
            assert_eq!(profile(&measure_private_errors(h).unwrap()), profile(&base));
        }
        // Appending never moves the verdict; the swap is exact with an exact inverter.
        for (a, b) in [(&spec, &h1), (&h1, &h2), (&h2, &h3)] {
            assert!(hybrid_tv(a, b).unwrap().is_zero());
        }
        for x in ["x1"] {
            assert_eq!(spec.honest_acceptance(x).unwrap(), h1.honest_acceptance(x).unwrap());
        }
    }

    #[test]
    fn noisy_swap_moves_at_most_eta() {
        let spec = build_private_fixture().unwrap();
        let eta = rat(1, 64);
        let inv = noisy(eta.clone());
        let h1 = hybrid_step(&spec, &inv, 1).unwrap();
        let h2 = hybrid_step(&h1, &inv, 2).unwrap();
        let tv = hybrid_tv(&h1, &h2).unwrap();
        assert!(tv.is_positive() && tv <= eta, "{}", fmt_rat(&tv));
        assert!(hybrid_tv(&spec, &h1).unwrap().is_zero());
    }

    #[test]
    fn publicize_with_exact_inverter_keeps_every_error() {
        let spec = build_private_fixture().unwrap();
        let (public, report) = publicize(&spec, &exact(), &rat(64, 1)).unwrap();
        assert!(report.all_checks_hold(), "{:?}", report.checks);
        let p = measure_interactive_errors(&public).unwrap();
        assert_eq!(profile(&p), (rat(1, 8), rat(1, 2), rat(1, 8)));
        assert!(report.delta_c.is_zero() && report.delta_s.is_zero() && report.delta_zk.is_zero());
        assert!(report.honest_tv.is_zero());
        // Private round, then the revealed coin tape of the inverter.
        assert_eq!(public.k(), 4);
        assert!((0..4).all(|j| public.owner(j) == [Party::Prover, Party::Verifier, Party::Prover, Party::Verifier][j]));
        assert_eq!(report.rows.len(), 5);
    }

    #[test]
    fn publicize_with_noisy_inverter_stays_within_eta() {
        let spec = build_private_fixture().unwrap();
        let eta = rat(1, 64);
        let (public, report) = publicize(&spec, &noisy(eta.clone()), &rat(64, 1)).unwrap();
        assert!(report.all_checks_hold(), "{:?}", report.checks);
        let after = measure_interactive_errors(&public).unwrap();
        let before = measure_private_errors(&spec).unwrap();
        for (a, b) in [(&after.eps_c, &before.eps_c), (&after.eps_s, &before.eps_s), (&after.eps_zk, &before.eps_zk)] {
            assert!(a - b <= eta);
        }
        assert!(after.eps_c > before.eps_c);
    }

    #[test]
    fn public_spec_is_a_fixed_point() {
        let demo = build_demo_interactive(3, &ErrorProfile::target(Rat::zero(), rat(1, 4), rat(1, 2)).unwrap()).unwrap();
        let spec = PrivateCoinSpec::from_public(&demo).unwrap();
        assert_eq!(profile(&measure_private_errors(&spec).unwrap()), profile(&measure_interactive_errors(&demo).unwrap()));
        let (public, report) = publicize(&spec, &exact(), &rat(1, 1)).unwrap();
        assert_eq!(public.k(), demo.k());
        assert!(report.delta_c.is_zero() && report.delta_s.is_zero() && report.delta_zk.is_zero());
        assert_eq!(report.rows.len(), 2);
        assert_eq!(public.honest_law("x1").unwrap(), demo.honest_law("x1").unwrap());
        assert_eq!(public.sim_law("x1"), demo.sim_law("x1"));
    }

    #[test]
    fn failing_inverter_names_the_round() {
        let spec = build_private_fixture().unwrap();
        let bot: Arc<dyn Inverter> = Arc::new(crate::reductions::AlwaysBottom);
        match publicize(&spec, &bot, &rat(1, 1)) {
            Err(LabError::Round { round, .. }) => assert_eq!(round, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn report_serializes() {
        let spec = build_private_fixture().unwrap();
        let (_, report) = publicize(&spec, &exact(), &rat(8, 1)).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<TransformReport>(&json).unwrap(), report);
    }
}
