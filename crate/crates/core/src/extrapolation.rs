//! Enumeration-backed universal extrapolation oracles.
//!
//! An oracle answers a query `(x, y)` with a tape `r` such that `M(x; r) = y`. Every
//! oracle here is described by a [`TapeLaw`]: with some probability it returns a
//! uniform preimage, with some probability a uniform tape from the whole space, and
//! otherwise it fails. That covers exact extrapolation, injected statistical error and
//! the simple inverters of the reductions module, and lets every consumer compute its
//! acceptance probabilities exactly.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num::traits::{One, ToPrimitive, Zero};

use crate::dist::{fmt_rat, rat_int, Rat, SeedStream, Token};
use crate::error::{LabError, Result};
use crate::protocol::{check_budget, InteractiveSpec, NizkSpec, Prefix};
use crate::reductions::{BruteForce, Inverter, Noisy};

type SamplerMap = dyn Fn(&str, u64) -> Token + Send + Sync;

/// An efficient sampler `M(x; r)` over a finite tape space per instance.
#[derive(Clone)]
pub struct SamplerDef {
    pub name: String,
    tapes: BTreeMap<String, u64>,
    map: Arc<SamplerMap>,
}

impl fmt::Debug for SamplerDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SamplerDef").field("name", &self.name).field("tapes", &self.tapes).finish()
    }
}

impl SamplerDef {
    pub fn new(
        name: impl Into<String>,
        tapes: BTreeMap<String, u64>,
        map: impl Fn(&str, u64) -> Token + Send + Sync + 'static,
    ) -> Result<Self> {
        for (x, n) in &tapes {
            if *n == 0 {
                return Err(LabError::InvalidSpec(format!("empty tape space for {x}")));
            }
        }
        Ok(SamplerDef { name: name.into(), tapes, map: Arc::new(map) })
    }

    /// Same tape space for every listed instance.
    pub fn uniform_tapes(
        name: impl Into<String>,
        instances: &[&str],
        tape_size: u64,
        map: impl Fn(&str, u64) -> Token + Send + Sync + 'static,
    ) -> Result<Self> {
        let tapes = instances.iter().map(|x| (x.to_string(), tape_size)).collect();
        Self::new(name, tapes, map)
    }

    pub fn observe(&self, x: &str, r: u64) -> Token {
        (self.map)(x, r)
    }

    pub fn tape_size(&self, x: &str) -> Result<u64> {
        self.tapes
            .get(x)
            .copied()
            .ok_or_else(|| LabError::InvalidSpec(format!("sampler {} has no instance {x:?}", self.name)))
    }

    pub fn instances(&self) -> impl Iterator<Item = &str> {
        self.tapes.keys().map(String::as_str)
    }
}

/// Tapes mapping to one observation, as merged runs with cumulative counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preimage {
    runs: Vec<(u64, u64)>,
    cum: Vec<u64>,
    total: u64,
}

impl Preimage {
    fn push(&mut self, r: u64) {
        match self.runs.last_mut() {
            Some((s, l)) if *s + *l == r => *l += 1,
            _ => self.runs.push((r, 1)),
        }
        self.total += 1;
    }

    fn finish(&mut self) {
        let mut acc = 0;
        self.cum = self
            .runs
            .iter()
            .map(|(_, l)| {
                acc += l;
                acc
            })
            .collect();
    }

    pub fn size(&self) -> u64 {
        self.total
    }

    /// Uniform element.
    pub fn draw(&self, s: &mut SeedStream) -> u64 {
        let u = s.below(self.total);
        let i = self.cum.partition_point(|c| *c <= u);
        let before = if i == 0 { 0 } else { self.cum[i - 1] };
        self.runs[i].0 + (u - before)
    }

    pub fn contains(&self, r: u64) -> bool {
        let i = self.runs.partition_point(|(s, _)| *s <= r);
        i > 0 && r < self.runs[i - 1].0 + self.runs[i - 1].1
    }

    pub fn tapes(&self) -> impl Iterator<Item = u64> + '_ {
        self.runs.iter().flat_map(|(s, l)| *s..*s + *l)
    }
}

/// A sampler with its preimage index (observation -> tapes) built for every instance.
#[derive(Debug)]
pub struct IndexedSampler {
    pub def: SamplerDef,
    index: BTreeMap<String, HashMap<Token, Preimage>>,
}

impl IndexedSampler {
    pub fn build(def: SamplerDef) -> Result<Arc<Self>> {
        let mut index = BTreeMap::new();
        for (x, n) in &def.tapes {
            check_budget(u128::from(*n))?;
            let mut by_obs: HashMap<Token, Preimage> = HashMap::new();
            for r in 0..*n {
                by_obs
                    .entry(def.observe(x, r))
                    .or_insert_with(|| Preimage { runs: Vec::new(), cum: Vec::new(), total: 0 })
                    .push(r);
            }
            for p in by_obs.values_mut() {
                p.finish();
            }
            index.insert(x.clone(), by_obs);
        }
        Ok(Arc::new(IndexedSampler { def, index }))
    }

    pub fn preimage(&self, x: &str, y: &Token) -> Option<&Preimage> {
        self.index.get(x).and_then(|m| m.get(y))
    }

    /// Observations with their preimage sizes, in a fixed order.
    pub fn observations(&self, x: &str) -> Result<BTreeMap<&Token, u64>> {
        let m = self
            .index
            .get(x)
            .ok_or_else(|| LabError::InvalidSpec(format!("no instance {x:?}")))?;
        Ok(m.iter().map(|(y, p)| (y, p.size())).collect())
    }
}

/// Answer law of an oracle query: uniform preimage, uniform tape, or failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeLaw {
    pub preimage: Rat,
    pub uniform: Rat,
    pub fail: Rat,
}

impl TapeLaw {
    pub fn new(preimage: Rat, uniform: Rat, fail: Rat) -> Self {
        TapeLaw { preimage, uniform, fail }
    }

    pub fn exact() -> Self {
        TapeLaw::new(Rat::one(), Rat::zero(), Rat::zero())
    }

    pub fn uniform() -> Self {
        TapeLaw::new(Rat::zero(), Rat::one(), Rat::zero())
    }

    pub fn bottom() -> Self {
        TapeLaw::new(Rat::zero(), Rat::zero(), Rat::one())
    }

    /// Moves the preimage branch to failure when the preimage is empty.
    pub fn given_preimage(mut self, size: u64) -> Self {
        if size == 0 {
            self.fail += std::mem::replace(&mut self.preimage, Rat::zero());
        }
        self
    }

    /// `(1 - eta) * self + eta * uniform`.
    pub fn blend_uniform(&self, eta: &Rat) -> Self {
        let keep = Rat::one() - eta;
        TapeLaw::new(&self.preimage * &keep, &self.uniform * &keep + eta, &self.fail * &keep)
    }
}

/// Conditional law of a function of the answer tape; `fail` is the failure mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryLaw<K: Ord> {
    pub fail: Rat,
    pub outcomes: BTreeMap<K, Rat>,
}

/// Pre-resolved query for repeated draws against one observation.
pub struct Query<'a> {
    pre: Option<&'a Preimage>,
    tape_size: u64,
    den: u64,
    pre_cut: u64,
    uni_cut: u64,
}

impl Query<'_> {
    pub fn draw(&self, s: &mut SeedStream) -> Option<u64> {
        let u = if self.den == 1 { 0 } else { s.below(self.den) };
        if u < self.pre_cut {
            self.pre.map(|p| p.draw(s))
        } else if u < self.uni_cut {
            Some(s.below(self.tape_size))
        } else {
            None
        }
    }

    pub fn preimage_size(&self) -> u64 {
        self.pre.map_or(0, Preimage::size)
    }
}

#[derive(Clone)]
pub struct UEOracle {
    sampler: Arc<IndexedSampler>,
    inverter: Arc<dyn Inverter>,
    seed: Option<u64>,
}

impl fmt::Debug for UEOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UEOracle")
            .field("sampler", &self.sampler.def.name)
            .field("inverter", &self.inverter.name())
            .finish()
    }
}

impl UEOracle {
    pub fn with_inverter(sampler: Arc<IndexedSampler>, inverter: Arc<dyn Inverter>) -> Self {
        UEOracle { sampler, inverter, seed: None }
    }

    pub fn sampler(&self) -> &Arc<IndexedSampler> {
        &self.sampler
    }

    pub fn inverter(&self) -> &Arc<dyn Inverter> {
        &self.inverter
    }

    pub fn describe(&self) -> String {
        match self.seed {
            Some(seed) => format!("{} (seed {seed})", self.inverter.name()),
            None => self.inverter.name(),
        }
    }

    pub fn tape_law(&self, x: &str, y: &Token) -> Result<TapeLaw> {
        let size = self.sampler.preimage(x, y).map_or(0, Preimage::size);
        let n = self.sampler.def.tape_size(x)?;
        Ok(self.inverter.law(x, size, n).given_preimage(size))
    }

    pub fn query_handle(&self, x: &str, y: &Token) -> Result<Query<'_>> {
        let pre = self.sampler.preimage(x, y);
        let law = self.tape_law(x, y)?;
        let tape_size = self.sampler.def.tape_size(x)?;
        let den = [&law.preimage, &law.uniform, &law.fail]
            .iter()
            .filter(|r| !r.is_zero())
            .map(|r| r.denom().to_u64())
            .try_fold(1u64, |a, d| d.map(|d| num::integer::lcm(a, d)))
            .ok_or_else(|| LabError::OutOfRange("oracle mixture denominators too large".into()))?;
        let cut = |r: &Rat| (r * rat_int(den)).to_integer().to_u64().unwrap_or(0);
        let pre_cut = cut(&law.preimage);
        Ok(Query { pre, tape_size, den, pre_cut, uni_cut: pre_cut + cut(&law.uniform) })
    }

    /// One query; failure of any kind is reported as an empty preimage.
    pub fn query(&self, x: &str, y: &Token, s: &mut SeedStream) -> Result<u64> {
        self.query_handle(x, y)?
            .draw(s)
            .ok_or_else(|| LabError::EmptyPreimage(format!("{} at {x}/{y}", self.sampler.def.name)))
    }

    /// Exact law of `f(answer)` for a query, computed from the oracle's definition.
    pub fn law_of<K: Ord + Clone>(
        &self,
        x: &str,
        y: &Token,
        f: impl Fn(u64) -> K,
    ) -> Result<QueryLaw<K>> {
        let law = self.tape_law(x, y)?;
        let mut outcomes: BTreeMap<K, Rat> = BTreeMap::new();
        if !law.preimage.is_zero() {
            let pre = self.sampler.preimage(x, y).expect("non-empty when weighted");
            let mut counts: BTreeMap<K, u64> = BTreeMap::new();
            for r in pre.tapes() {
                *counts.entry(f(r)).or_default() += 1;
            }
            let w = &law.preimage / rat_int(pre.size());
            for (k, c) in counts {
                *outcomes.entry(k).or_insert_with(Rat::zero) += &w * rat_int(c);
            }
        }
        if !law.uniform.is_zero() {
            let n = self.sampler.def.tape_size(x)?;
            let mut counts: BTreeMap<K, u64> = BTreeMap::new();
            for r in 0..n {
                *counts.entry(f(r)).or_default() += 1;
            }
            let w = &law.uniform / rat_int(n);
            for (k, c) in counts {
                *outcomes.entry(k).or_insert_with(Rat::zero) += &w * rat_int(c);
            }
        }
        Ok(QueryLaw { fail: law.fail, outcomes })
    }
}

/// Exact extrapolation: a uniform draw from the preimage.
pub fn make_exact_ue(s: SamplerDef) -> Result<UEOracle> {
    Ok(UEOracle::with_inverter(IndexedSampler::build(s)?, Arc::new(BruteForce)))
}

/// With probability `eta` per query, answers with a uniform tape instead. The draws
/// themselves use the caller's stream; `seed` is recorded for reports.
pub fn perturb_ue(o: &UEOracle, eta: Rat, seed: u64) -> Result<UEOracle> {
    if eta < Rat::zero() || eta > Rat::one() {
        return Err(LabError::OutOfRange(format!("eta = {} not in [0,1]", fmt_rat(&eta))));
    }
    let inverter: Arc<dyn Inverter> = if eta.is_zero() {
        o.inverter.clone()
    } else {
        Arc::new(Noisy::new(o.inverter.clone(), eta))
    };
    Ok(UEOracle { sampler: o.sampler.clone(), inverter, seed: Some(seed) })
}

/// Exact total variation between `(r, M(x;r))` and `(N(x, M(x;r)), M(x;r))`.
///
/// For an observation `y` with preimage size `c` out of `S` tapes and answer law
/// `(pre, uni, fail)`, the contribution is `(c/S) * (uni * (S - c)/S + fail)`.
pub fn ue_quality(o: &UEOracle, x: &str) -> Result<Rat> {
    let n = o.sampler.def.tape_size(x)?;
    let s = rat_int(n);
    let mut tv = Rat::zero();
    for (y, c) in o.sampler.observations(x)? {
        let law = o.tape_law(x, y)?;
        let c = rat_int(c);
        tv += &c / &s * (&law.uniform * (&s - &c) / &s + &law.fail);
    }
    Ok(tv)
}

/// Observation = crs component of the simulator's output.
pub fn nizk_crs_sampler(spec: &NizkSpec) -> SamplerDef {
    let tapes = spec.sim.iter().map(|(x, t)| (x.clone(), t.size())).collect();
    let sims = spec.sim.clone();
    SamplerDef {
        name: format!("crs-sampler[{}]", spec.name),
        tapes,
        map: Arc::new(move |x, r| sims[x].get(r).0.clone()),
    }
}

/// Observation token of a transcript prefix.
pub fn prefix_token(p: Prefix) -> Token {
    let mut v = Vec::with_capacity(9);
    v.push(p.len as u8);
    v.extend_from_slice(&p.code.to_be_bytes());
    Token(v)
}

/// Tape `r = r1 * |sim tape| + r2` with `r1 + 1` in `[1, k]`; the observation is the
/// first `r1` messages of `Sim(x; r2)`.
pub fn prefix_sampler(spec: &InteractiveSpec) -> SamplerDef {
    let k = spec.k() as u64;
    let tapes = spec
        .instances
        .iter()
        .map(|i| (i.label.clone(), k * spec.sim_tape(&i.label)))
        .collect();
    let spec = spec.clone();
    SamplerDef {
        name: format!("prefix-sampler[{}]", spec.name),
        tapes,
        map: Arc::new(move |x, r| {
            let n = spec.sim_tape(x);
            let (r1, r2) = (r / n, r % n);
            let full = spec.full(spec.sim_code(x, r2));
            prefix_token(spec.truncate(full, r1 as usize))
        }),
    }
}

/// Splits a prefix-sampler tape into `(r1 - 1, r2)`.
pub fn split_prefix_tape(spec: &InteractiveSpec, x: &str, r: u64) -> (u64, u64) {
    let n = spec.sim_tape(x);
    (r / n, r % n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{condition, rat, tv_distance, ExactDist};
    use crate::protocol::{build_counterexample, build_demo_interactive, ErrorProfile, SoundVariant};

    fn injective(bits: u32) -> SamplerDef {
        SamplerDef::uniform_tapes("id", &["x"], 1 << bits, |_, r| Token::index(r, 2)).unwrap()
    }

    fn constant() -> SamplerDef {
        SamplerDef::uniform_tapes("const", &["x"], 16, |_, _| Token::empty()).unwrap()
    }

    /// Brute-force joint laws of Definition-2.4 pairs; `None` marks failure.
    fn quality_by_enumeration(o: &UEOracle, x: &str) -> Rat {
        let n = o.sampler.def.tape_size(x).unwrap();
        let real = ExactDist::from_counts((0..n).map(|r| ((Some(r), o.sampler.def.observe(x, r)), 1)))
            .unwrap();
        let mut pairs: BTreeMap<(Option<u64>, Token), Rat> = BTreeMap::new();
        for r in 0..n {
            let y = o.sampler.def.observe(x, r);
            let law = o.law_of(x, &y, Some).unwrap();
            let w = rat(1, n as i64);
            for (k, p) in law.outcomes {
                *pairs.entry((k, y.clone())).or_insert_with(Rat::zero) += &w * p;
            }
            if !law.fail.is_zero() {
                *pairs.entry((None, y.clone())).or_insert_with(Rat::zero) += &w * &law.fail;
            }
        }
        tv_distance(&real, &ExactDist::new(pairs).unwrap())
    }

    #[test]
    fn exact_oracle_on_injective_map_returns_the_preimage() {
        let o = make_exact_ue(injective(4)).unwrap();
        let mut s = SeedStream::new(1);
        for r in 0..16 {
            assert_eq!(o.query("x", &Token::index(r, 2), &mut s).unwrap(), r);
        }
        assert!(matches!(o.query("x", &Token::index(99, 2), &mut s), Err(LabError::EmptyPreimage(_))));
    }

    #[test]
    fn exact_oracle_on_constant_map_is_uniform() {
        let o = make_exact_ue(constant()).unwrap();
        let mut s = SeedStream::new(2);
        let mut counts = [0u32; 16];
        for _ in 0..10_000 {
            counts[o.query("x", &Token::empty(), &mut s).unwrap() as usize] += 1;
        }
        let e = 10_000.0 / 16.0;
        let chi2: f64 = counts.iter().map(|c| (f64::from(*c) - e).powi(2) / e).sum();
        // 15 degrees of freedom; the 0.999 quantile is about 37.7.
        assert!(chi2 < 37.7, "chi2 = {chi2}");
    }

    #[test]
    fn quality_closed_form_matches_enumeration() {
        let bases = [injective(3), constant(), nizk_crs_sampler(
            &build_counterexample(rat(1, 2), rat(1, 4), rat(1, 16), SoundVariant::Randomized).unwrap(),
        )];
        for base in bases {
            let exact = make_exact_ue(base).unwrap();
            let xs: Vec<String> = exact.sampler.def.instances().map(String::from).collect();
            for eta in [Rat::zero(), rat(1, 8), rat(1, 20), Rat::one()] {
                let o = perturb_ue(&exact, eta.clone(), 0).unwrap();
                for x in &xs {
                    let q = ue_quality(&o, x).unwrap();
                    assert_eq!(q, quality_by_enumeration(&o, x));
                    assert!(q <= eta);
                }
            }
        }
    }

    #[test]
    fn fully_noisy_oracle_on_injective_sampler() {
        let o = perturb_ue(&make_exact_ue(injective(3)).unwrap(), Rat::one(), 0).unwrap();
        assert_eq!(ue_quality(&o, "x").unwrap(), rat(7, 8));
    }

    #[test]
    fn crs_sampler_conditionals_match_condition() {
        let spec = build_counterexample(rat(1, 2), rat(1, 4), rat(1, 1024), SoundVariant::Randomized).unwrap();
        let o = make_exact_ue(nizk_crs_sampler(&spec)).unwrap();
        let law = o.law_of("x1", &Token::byte(0), |r| spec.sim["x1"].get(r).1.clone()).unwrap();
        let want = condition(&spec.sim_law("x1"), &Token::byte(0)).unwrap();
        assert!(law.fail.is_zero());
        let got = ExactDist::new(law.outcomes).unwrap();
        assert_eq!(got, want);
        let obs = o.sampler.observations("x1").unwrap();
        let n = spec.sim["x1"].size() as i64;
        assert_eq!(rat(obs[&Token::byte(0)] as i64, n), Rat::one() - rat(1, 1024));
    }

    #[test]
    fn prefix_queries_extend_the_prefix() {
        let t = ErrorProfile::target(Rat::zero(), rat(1, 4), rat(1, 2)).unwrap();
        let spec = build_demo_interactive(3, &t).unwrap();
        let o = make_exact_ue(prefix_sampler(&spec)).unwrap();
        let mut s = SeedStream::new(4);
        let root = prefix_token(Prefix::EMPTY);
        for _ in 0..200 {
            let r = o.query("x1", &root, &mut s).unwrap();
            let (r1, r2) = split_prefix_tape(&spec, "x1", r);
            assert_eq!(r1, 0);
            let full = spec.full(spec.sim_code("x1", r2));
            for len in 1..spec.k() {
                let p = spec.truncate(full, len);
                let r = o.query("x1", &prefix_token(p), &mut s).unwrap();
                let (r1, r2) = split_prefix_tape(&spec, "x1", r);
                assert_eq!(r1 as usize, len);
                assert_eq!(spec.truncate(spec.full(spec.sim_code("x1", r2)), len), p);
            }
        }
        let unreachable = Prefix { len: 2, code: 0 };
        let dummy_z = spec.extend(unreachable, 4);
        assert!(o.query("x1", &prefix_token(dummy_z), &mut s).is_err());
    }
}
