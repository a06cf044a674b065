//! Exact finite distributions over rationals, seeded sampling and tail bounds.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::{BigInt, BigUint, RandBigInt, Sign};
use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::BigRational;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: u64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Parses `"a/b"`, `"a"` or a terminating decimal such as `"0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || LabError::OutOfRange(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num::pow(BigInt::from(10), frac.len());
        let r = Rat::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Canonical `"num/den"` rendering used in every report.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `num/den` when short, otherwise a float rendering marked with `~`.
pub fn short_rat(r: &Rat) -> String {
    let s = fmt_rat(r);
    if s.len() <= 24 { s } else { format!("~{:.6}", to_f64(r)) }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_probability(r: &Rat) -> bool {
    !r.is_negative() && *r <= Rat::one()
}

pub fn rat_pow(base: &Rat, exp: u64) -> Rat {
    num::pow(base.clone(), exp as usize)
}

pub fn rat_min(a: &Rat, b: &Rat) -> Rat {
    if a <= b { a.clone() } else { b.clone() }
}

pub fn rat_max(a: &Rat, b: &Rat) -> Rat {
    if a >= b { a.clone() } else { b.clone() }
}

/// Denominator of `r` as a `u64`, if it fits.
pub fn small_denom(r: &Rat) -> Option<u64> {
    r.denom().to_u64()
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Serde adapter storing a rational as a `"num/den"` string.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Opaque byte-string outcome. Serialized as lowercase hex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Token(pub Vec<u8>);

impl Token {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        Token(bytes.into())
    }

    pub fn empty() -> Self {
        Token(Vec::new())
    }

    pub fn byte(b: u8) -> Self {
        Token(vec![b])
    }

    /// Fixed-width big-endian encoding of an index.
    pub fn index(v: u64, width: usize) -> Self {
        let bytes = v.to_be_bytes();
        Token(bytes[8 - width.min(8)..].to_vec())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s)
            .map(Token)
            .map_err(|e| LabError::InvalidSpec(format!("bad hex token {s:?}: {e}")))
    }

    /// Length-prefixed concatenation; `split_pair` inverts it.
    pub fn pair(a: &Token, b: &Token) -> Token {
        let mut out = Vec::with_capacity(4 + a.len() + b.len());
        out.extend_from_slice(&(a.len() as u32).to_be_bytes());
        out.extend_from_slice(&a.0);
        out.extend_from_slice(&b.0);
        Token(out)
    }

    pub fn split_pair(&self) -> Option<(Token, Token)> {
        if self.0.len() < 4 {
            return None;
        }
        let n = u32::from_be_bytes(self.0[..4].try_into().ok()?) as usize;
        if self.0.len() < 4 + n {
            return None;
        }
        Some((Token(self.0[4..4 + n].to_vec()), Token(self.0[4 + n..].to_vec())))
    }

    /// Reads the token as a big-endian unsigned integer.
    pub fn as_u64(&self) -> Option<u64> {
        if self.0.len() > 8 {
            return None;
        }
        Some(self.0.iter().fold(0u64, |acc, b| (acc << 8) | u64::from(*b)))
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", self.to_hex())
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Token::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Finite distribution with exact rational weights. Zero-weight outcomes are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDist<T: Ord = Token> {
    weights: BTreeMap<T, Rat>,
}

impl<T: Ord + Clone> ExactDist<T> {
    /// Builds from explicit pairs. Duplicate outcomes, negative weights or a sum other
    /// than one are rejected.
    pub fn new(pairs: impl IntoIterator<Item = (T, Rat)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        let mut total = Rat::zero();
        for (o, w) in pairs {
            if w.is_negative() {
                return Err(LabError::InvalidDistribution("negative weight".into()));
            }
            total += &w;
            if weights.contains_key(&o) {
                return Err(LabError::InvalidDistribution("duplicate outcome".into()));
            }
            weights.insert(o, w);
        }
        weights.retain(|_, w| !w.is_zero());
        if total != Rat::one() {
            return Err(LabError::InvalidDistribution(format!(
                "weights sum to {}",
                fmt_rat(&total)
            )));
        }
        Ok(ExactDist { weights })
    }

    /// Builds from integer counts, merging repeated outcomes.
    pub fn from_counts(counts: impl IntoIterator<Item = (T, u64)>) -> Result<Self> {
        let mut acc: BTreeMap<T, u64> = BTreeMap::new();
        for (o, c) in counts {
            *acc.entry(o).or_default() += c;
        }
        let total: u64 = acc.values().sum();
        if total == 0 {
            return Err(LabError::InvalidDistribution("no mass".into()));
        }
        let den = BigInt::from(total);
        let weights = acc
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(o, c)| (o, Rat::new(BigInt::from(c), den.clone())))
            .collect();
        Ok(ExactDist { weights })
    }

    pub fn point(o: T) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(o, Rat::one());
        ExactDist { weights }
    }

    pub fn uniform(outcomes: impl IntoIterator<Item = T>) -> Result<Self> {
        Self::from_counts(outcomes.into_iter().map(|o| (o, 1)))
    }

    pub fn prob(&self, o: &T) -> Rat {
        self.weights.get(o).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rat)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Pushforward under `f`.
    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> ExactDist<U> {
        let mut weights: BTreeMap<U, Rat> = BTreeMap::new();
        for (o, w) in &self.weights {
            *weights.entry(f(o)).or_insert_with(Rat::zero) += w;
        }
        ExactDist { weights }
    }

    pub fn prob_where(&self, pred: impl Fn(&T) -> bool) -> Rat {
        self.weights
            .iter()
            .filter(|(o, _)| pred(o))
            .fold(Rat::zero(), |acc, (_, w)| acc + w)
    }

    pub fn expect(&self, f: impl Fn(&T) -> Rat) -> Rat {
        self.weights
            .iter()
            .fold(Rat::zero(), |acc, (o, w)| acc + w * f(o))
    }

    /// Draws an outcome with exactly its weight, using a uniform integer below the
    /// common denominator.
    pub fn sample(&self, s: &mut SeedStream) -> &T {
        let den = self
            .weights
            .values()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let u = if let Some(d) = den.to_u64() {
            BigInt::from(s.below(d))
        } else {
            let d = den.to_biguint().expect("positive denominator");
            BigInt::from_biguint(Sign::Plus, s.rng.gen_biguint_below(&d))
        };
        let mut acc = BigInt::zero();
        let mut last = None;
        for (o, w) in &self.weights {
            acc += w.numer() * (&den / w.denom());
            last = Some(o);
            if u < acc {
                return o;
            }
        }
        last.expect("non-empty distribution")
    }
}

/// Total variation distance, exact.
pub fn tv_distance<T: Ord + Clone>(d1: &ExactDist<T>, d2: &ExactDist<T>) -> Rat {
    let mut sum = Rat::zero();
    for (o, w) in &d1.weights {
        sum += (w - d2.prob(o)).abs();
    }
    for (o, w) in &d2.weights {
        if !d1.weights.contains_key(o) {
            sum += w;
        }
    }
    sum / rat(2, 1)
}

/// Conditional law of the second coordinate given the first equals `observed`.
pub fn condition<A: Ord + Clone, B: Ord + Clone>(
    d: &ExactDist<(A, B)>,
    observed: &A,
) -> Result<ExactDist<B>> {
    let mass = d.prob_where(|(a, _)| a == observed);
    if mass.is_zero() {
        return Err(LabError::EmptyPreimage("conditioning on a zero-probability value".into()));
    }
    let weights = d
        .weights
        .iter()
        .filter(|((a, _), _)| a == observed)
        .map(|((_, b), w)| (b.clone(), w / &mass))
        .collect();
    Ok(ExactDist { weights })
}

/// First-coordinate marginal of a joint law.
pub fn marginal_first<A: Ord + Clone, B: Ord + Clone>(d: &ExactDist<(A, B)>) -> ExactDist<A> {
    d.map(|(a, _)| a.clone())
}

/// Pointwise weighted sum of component laws.
pub fn mix<T: Ord + Clone>(components: &[(ExactDist<T>, Rat)]) -> Result<ExactDist<T>> {
    let mut total = Rat::zero();
    let mut weights: BTreeMap<T, Rat> = BTreeMap::new();
    for (d, w) in components {
        if w.is_negative() {
            return Err(LabError::InvalidDistribution("negative mixture weight".into()));
        }
        total += w;
        for (o, p) in &d.weights {
            *weights.entry(o.clone()).or_insert_with(Rat::zero) += p * w;
        }
    }
    if total != Rat::one() {
        return Err(LabError::InvalidDistribution(format!(
            "mixture weights sum to {}",
            fmt_rat(&total)
        )));
    }
    weights.retain(|_, w| !w.is_zero());
    Ok(ExactDist { weights })
}

/// Reproducible random stream. `counter` is the ChaCha word position, so a stream can
/// be rebuilt at any point from `(seed, counter)`.
#[derive(Clone, Debug)]
pub struct SeedStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn at(seed: u64, counter: u64) -> Self {
        let mut s = Self::new(seed);
        s.rng.set_word_pos(u128::from(counter));
        s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.rng.get_word_pos() as u64
    }

    /// Independent child stream derived from the next draw.
    pub fn fork(&mut self) -> SeedStream {
        SeedStream::new(self.rng.next_u64())
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.rng.gen_range(0..n)
    }

    /// Exact Bernoulli draw.
    pub fn bernoulli(&mut self, p: &Rat) -> bool {
        if p.is_zero() {
            return false;
        }
        if *p >= Rat::one() {
            return true;
        }
        match (p.numer().to_u64(), p.denom().to_u64()) {
            (Some(n), Some(d)) => self.below(d) < n,
            _ => {
                let d: BigUint = p.denom().to_biguint().expect("positive");
                let u = self.rng.gen_biguint_below(&d);
                BigInt::from_biguint(Sign::Plus, u) < *p.numer()
            }
        }
    }
}

impl RngCore for SeedStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChernoffKind {
    MultAbove,
    MultBelow,
    Additive,
}

impl ChernoffKind {
    pub fn name(self) -> &'static str {
        match self {
            ChernoffKind::MultAbove => "mult-above",
            ChernoffKind::MultBelow => "mult-below",
            ChernoffKind::Additive => "additive",
        }
    }
}

fn check_chernoff_args(kind: ChernoffKind, p: &Rat, dev: &Rat) -> Result<()> {
    if !is_probability(p) {
        return Err(LabError::OutOfRange(format!("p = {} not in [0,1]", fmt_rat(p))));
    }
    match kind {
        ChernoffKind::MultAbove | ChernoffKind::MultBelow => {
            if !dev.is_positive() || *dev >= Rat::one() {
                return Err(LabError::OutOfRange(format!(
                    "delta = {} not in (0,1)",
                    fmt_rat(dev)
                )));
            }
        }
        ChernoffKind::Additive => {
            if dev.is_negative() {
                return Err(LabError::OutOfRange(format!("Delta = {} < 0", fmt_rat(dev))));
            }
        }
    }
    Ok(())
}

/// Upper bound on the tail probability of a sum of `m` independent Bernoulli(p)
/// variables.
///
/// * `MultAbove`: `Pr[X >= (1+d)mp] <= exp(-d^2 mp / 3)`
/// * `MultBelow`: `Pr[X <= (1-d)mp] <= exp(-d^2 mp / 2)`
/// * `Additive`:  `Pr[|X - mp| >= D] <= 2 exp(-D^2 / m)`
pub fn chernoff_bound(kind: ChernoffKind, m: u64, p: &Rat, dev: &Rat) -> Result<f64> {
    check_chernoff_args(kind, p, dev)?;
    let mf = m as f64;
    let pf = to_f64(p);
    let d = to_f64(dev);
    Ok(match kind {
        ChernoffKind::MultAbove => (-d * d * mf * pf / 3.0).exp(),
        ChernoffKind::MultBelow => (-d * d * mf * pf / 2.0).exp(),
        ChernoffKind::Additive => {
            if m == 0 {
                2.0
            } else {
                2.0 * (-d * d / mf).exp()
            }
        }
    })
}

/// The tail event of a Chernoff bound as integer thresholds on `X`: the event is
/// `X <= low` or `X >= high` (either side may be absent).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailEvent {
    pub low: Option<u64>,
    pub high: Option<u64>,
}

impl TailEvent {
    pub fn new(kind: ChernoffKind, m: u64, p: &Rat, dev: &Rat) -> Result<Self> {
        check_chernoff_args(kind, p, dev)?;
        let mean = rat_int(m) * p;
        let floor_u = |r: &Rat| -> Option<u64> {
            if r.is_negative() { None } else { r.floor().to_integer().to_u64() }
        };
        let ceil_u = |r: &Rat| -> Option<u64> {
            let c = r.ceil().to_integer();
            if c > BigInt::from(m) { None } else { c.to_u64().or(Some(0)) }
        };
        Ok(match kind {
            ChernoffKind::MultAbove => TailEvent {
                low: None,
                high: ceil_u(&((Rat::one() + dev) * &mean)),
            },
            ChernoffKind::MultBelow => TailEvent {
                low: floor_u(&((Rat::one() - dev) * &mean)),
                high: None,
            },
            ChernoffKind::Additive => TailEvent {
                low: floor_u(&(&mean - dev)),
                high: ceil_u(&(&mean + dev)).map(|h| h.max(0)),
            },
        })
    }

    pub fn contains(&self, x: u64) -> bool {
        self.low.is_some_and(|l| x <= l) || self.high.is_some_and(|h| x >= h)
    }

    /// Exact binomial probability of the event, in floating point.
    pub fn binomial_prob(&self, m: u64, p: f64) -> f64 {
        use statrs::distribution::{Binomial, DiscreteCDF};
        let b = match Binomial::new(p, m) {
            Ok(b) => b,
            Err(_) => return f64::NAN,
        };
        let lo = self.low.map_or(0.0, |l| b.cdf(l));
        let hi = match self.high {
            Some(0) => 1.0,
            Some(h) => b.sf(h - 1),
            None => 0.0,
        };
        (lo + hi).min(1.0)
    }
}

/// Exact `Pr[Bin(m, p) <= c]`.
pub fn binomial_cdf(m: u64, p: &Rat, c: u64) -> Rat {
    if c >= m {
        return Rat::one();
    }
    let q = Rat::one() - p;
    let mut total = Rat::zero();
    let mut choose = BigInt::one();
    for j in 0..=c {
        if j > 0 {
            choose = choose * BigInt::from(m - j + 1) / BigInt::from(j);
        }
        let term = Rat::from_integer(choose.clone()) * rat_pow(p, j) * rat_pow(&q, m - j);
        total += term;
    }
    total
}

/// Half-width of a two-sided confidence interval for a frequency over `trials`
/// draws, from the additive bound: `sqrt(ln(2/fail) / trials)`.
pub fn chernoff_halfwidth(trials: u64, fail: f64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    ((2.0 / fail).ln() / trials as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditCell {
    pub kind: ChernoffKind,
    pub m: u64,
    #[serde(with = "rat_serde")]
    pub p: Rat,
    #[serde(with = "rat_serde")]
    pub dev: Rat,
}

impl AuditCell {
    pub fn new(kind: ChernoffKind, m: u64, p: Rat, dev: Rat) -> Self {
        AuditCell { kind, m, p, dev }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    #[serde(flatten)]
    pub cell: AuditCell,
    pub trials: u64,
    pub hits: u64,
    pub empirical: f64,
    pub bound: f64,
    pub exact_tail: f64,
    pub pass: bool,
}

/// Twelve cells, four per bound kind, whose bounds sit between about 1e-3 and 0.5.
pub fn default_audit_grid() -> Vec<AuditCell> {
    let mut cells = Vec::new();
    for kind in [ChernoffKind::MultAbove, ChernoffKind::MultBelow] {
        cells.push(AuditCell::new(kind, 300, rat(1, 10), rat(1, 2)));
        cells.push(AuditCell::new(kind, 100, rat(1, 2), rat(1, 5)));
        cells.push(AuditCell::new(kind, 200, rat(1, 4), rat(3, 10)));
        cells.push(AuditCell::new(kind, 50, rat(1, 2), rat(1, 2)));
    }
    cells.push(AuditCell::new(ChernoffKind::Additive, 100, rat(1, 2), rat(15, 1)));
    cells.push(AuditCell::new(ChernoffKind::Additive, 100, rat(1, 10), rat(12, 1)));
    cells.push(AuditCell::new(ChernoffKind::Additive, 200, rat(1, 4), rat(20, 1)));
    cells.push(AuditCell::new(ChernoffKind::Additive, 50, rat(1, 2), rat(10, 1)));
    cells
}

/// Counts how often a sum of `m` seeded Bernoulli(p) draws lands in the tail event.
pub fn audit_cell(cell: &AuditCell, trials: u64, s: &mut SeedStream) -> Result<AuditRow> {
    let bound = chernoff_bound(cell.kind, cell.m, &cell.p, &cell.dev)?;
    let event = TailEvent::new(cell.kind, cell.m, &cell.p, &cell.dev)?;
    let (num, den) = match (cell.p.numer().to_u64(), cell.p.denom().to_u64()) {
        (Some(n), Some(d)) => (n, d),
        _ => return Err(LabError::OutOfRange("audit p must have a small denominator".into())),
    };
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut x = 0u64;
        for _ in 0..cell.m {
            if s.below(den) < num {
                x += 1;
            }
        }
        if event.contains(x) {
            hits += 1;
        }
    }
    let empirical = hits as f64 / trials as f64;
    Ok(AuditRow {
        cell: cell.clone(),
        trials,
        hits,
        empirical,
        bound,
        exact_tail: event.binomial_prob(cell.m, to_f64(&cell.p)),
        pass: empirical <= bound,
    })
}

pub fn chernoff_audit(cells: &[AuditCell], trials: u64, seed: u64) -> Result<Vec<AuditRow>> {
    let mut root = SeedStream::new(seed);
    cells
        .iter()
        .map(|c| {
            let mut s = root.fork();
            audit_cell(c, trials, &mut s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(p: Rat) -> ExactDist<u8> {
        ExactDist::new([(0u8, Rat::one() - &p), (1u8, p)]).unwrap()
    }

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_rat("3/12").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat("7").unwrap(), rat(7, 1));
        assert!(parse_rat("1/0").is_err());
        assert_eq!(fmt_rat(&rat(6, 8)), "3/4");
    }

    #[test]
    fn tv_of_two_bernoullis() {
        assert_eq!(tv_distance(&bern(rat(1, 2)), &bern(rat(1, 4))), rat(1, 4));
        let d = bern(rat(1, 3));
        assert_eq!(tv_distance(&d, &d), Rat::zero());
    }

    #[test]
    fn tv_of_disjoint_supports_is_one() {
        let a = ExactDist::point(1u8);
        let b = ExactDist::point(2u8);
        assert_eq!(tv_distance(&a, &b), Rat::one());
    }

    #[test]
    fn new_rejects_bad_weights() {
        assert!(ExactDist::new([(0u8, rat(1, 2))]).is_err());
        assert!(ExactDist::new([(0u8, rat(3, 2)), (1u8, rat(-1, 2))]).is_err());
        assert!(ExactDist::new([(0u8, rat(1, 2)), (0u8, rat(1, 2))]).is_err());
    }

    #[test]
    fn condition_single_survivor() {
        let d = ExactDist::uniform([(0u8, 0u8), (0, 1), (1, 0)]).unwrap();
        let c = condition(&d, &1).unwrap();
        assert_eq!(c, ExactDist::point(0u8));
        assert!(matches!(condition(&d, &7), Err(LabError::EmptyPreimage(_))));
    }

    #[test]
    fn mix_of_point_masses() {
        let m = mix(&[(ExactDist::point(0u8), rat(1, 4)), (ExactDist::point(1u8), rat(3, 4))])
            .unwrap();
        assert_eq!(m, bern(rat(3, 4)));
        let d = bern(rat(1, 5));
        assert_eq!(mix(&[(d.clone(), Rat::one())]).unwrap(), d);
        assert!(mix(&[(d, rat(1, 2))]).is_err());
    }

    #[test]
    fn sampling_is_reproducible_and_calibrated() {
        let d = bern(rat(3, 10));
        let mut a = SeedStream::new(11);
        let mut b = SeedStream::new(11);
        let xs: Vec<u8> = (0..100).map(|_| *d.sample(&mut a)).collect();
        let ys: Vec<u8> = (0..100).map(|_| *d.sample(&mut b)).collect();
        assert_eq!(xs, ys);
        let mut s = SeedStream::new(5);
        let ones = (0..100_000).filter(|_| *d.sample(&mut s) == 1).count();
        assert!((ones as f64 / 1e5 - 0.3).abs() < 0.01);
        assert_eq!(*ExactDist::point(9u8).sample(&mut s), 9);
    }

    #[test]
    fn stream_resumes_from_counter() {
        let mut s = SeedStream::new(3);
        s.below(17);
        s.next_u64();
        let (seed, ctr) = (s.seed(), s.counter());
        let mut t = SeedStream::at(seed, ctr);
        assert_eq!(s.next_u64(), t.next_u64());
    }

    #[test]
    fn chernoff_formulas() {
        let v = chernoff_bound(ChernoffKind::MultAbove, 300, &rat(1, 10), &rat(1, 2)).unwrap();
        assert!((v - (-2.5f64).exp()).abs() < 1e-12);
        let v = chernoff_bound(ChernoffKind::Additive, 100, &rat(1, 2), &Rat::zero()).unwrap();
        assert_eq!(v, 2.0);
        assert!(chernoff_bound(ChernoffKind::MultBelow, 10, &rat(1, 2), &Rat::one()).is_err());
        assert!(chernoff_bound(ChernoffKind::Additive, 10, &rat(1, 2), &rat(-1, 1)).is_err());
    }

    #[test]
    fn tail_event_thresholds() {
        let e = TailEvent::new(ChernoffKind::MultAbove, 300, &rat(1, 10), &rat(1, 2)).unwrap();
        assert_eq!(e, TailEvent { low: None, high: Some(45) });
        let e = TailEvent::new(ChernoffKind::Additive, 100, &rat(1, 2), &rat(15, 1)).unwrap();
        assert_eq!(e, TailEvent { low: Some(35), high: Some(65) });
    }

    #[test]
    fn binomial_cdf_small_case() {
        // Bin(3, 1/2): P[X <= 1] = 4/8
        assert_eq!(binomial_cdf(3, &rat(1, 2), 1), rat(1, 2));
        assert_eq!(binomial_cdf(3, &rat(1, 2), 3), Rat::one());
        assert_eq!(binomial_cdf(4, &Rat::zero(), 0), Rat::one());
    }

    #[test]
    fn default_grid_bounds_dominate_exact_tails() {
        for c in default_audit_grid() {
            let b = chernoff_bound(c.kind, c.m, &c.p, &c.dev).unwrap();
            let e = TailEvent::new(c.kind, c.m, &c.p, &c.dev).unwrap();
            let t = e.binomial_prob(c.m, to_f64(&c.p));
            assert!(b > 1e-3 && b <= 2.0, "{c:?} bound {b}");
            assert!(t < b, "{c:?}: tail {t} vs bound {b}");
        }
    }
}
