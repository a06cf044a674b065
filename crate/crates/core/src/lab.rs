//! Configuration-driven experiment runner.
//!
//! A [`LabConfig`] lists experiments; [`run`] executes them in order, writes one JSON
//! and one CSV report per experiment into the output directory, and finishes with
//! `manifest.json`. Nothing time- or host-dependent goes into any file, so the same
//! config and seed reproduce every byte.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num::traits::Zero;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coin_transform::{build_private_fixture, publicize};
use crate::dist::{chernoff_audit, chernoff_halfwidth, default_audit_grid, fmt_rat, rat, short_rat, rat_serde, Rat, SeedStream};
use crate::error::{LabError, Result};
use crate::extrapolation::{make_exact_ue, nizk_crs_sampler, perturb_ue, prefix_sampler};
use crate::izk::{izk_gap_experiment, EngineParams};
use crate::nizk_deciders::{nizk_gap_experiment, DeciderParams, NizkDecider};
use crate::protocol::{
    build_counterexample, build_demo_interactive, build_ideal_nizk, build_trivial_protocol, ErrorProfile,
    InteractiveSpec, Mode, NizkSpec, SoundVariant,
};
use crate::reductions::{package_dti, BruteForce, DtiSize, DtiTarget, Inverter, Noisy};
use crate::report::{Check, Estimate, Evaluation, GapReport, INTERVAL_FAIL};

pub const TOOL: &str = "zklab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn default_mode() -> Mode {
    Mode::Exact
}
fn default_trials() -> u64 {
    10_000
}
fn default_out() -> PathBuf {
    PathBuf::from("zklab-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    #[serde(default)]
    pub seed: u64,
    /// Evaluation of the decider experiments; the audit is always sampled and the
    /// coin transform always exact.
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Monte-Carlo runs per acceptance estimate.
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig { seed: 0, mode: default_mode(), trials: default_trials(), out: default_out(), experiments: vec![] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Counterexample(CounterexampleCfg),
    NizkGap(NizkGapCfg),
    IzkGap(IzkGapCfg),
    CoinTransform(CoinTransformCfg),
    ChernoffAudit(ChernoffAuditCfg),
    DtiPackage(DtiPackageCfg),
}

impl Experiment {
    pub const KINDS: [&'static str; 6] =
        ["counterexample", "nizk-gap", "izk-gap", "coin-transform", "chernoff-audit", "dti-package"];

    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Counterexample(_) => "counterexample",
            Experiment::NizkGap(_) => "nizk-gap",
            Experiment::IzkGap(_) => "izk-gap",
            Experiment::CoinTransform(_) => "coin-transform",
            Experiment::ChernoffAudit(_) => "chernoff-audit",
            Experiment::DtiPackage(_) => "dti-package",
        }
    }

    /// Defaults for a subcommand run without a matching config entry.
    pub fn default_of(kind: &str) -> Option<Experiment> {
        Some(match kind {
            "counterexample" => Experiment::Counterexample(CounterexampleCfg::default()),
            "nizk-gap" => Experiment::NizkGap(NizkGapCfg::default()),
            "izk-gap" => Experiment::IzkGap(IzkGapCfg::default()),
            "coin-transform" => Experiment::CoinTransform(CoinTransformCfg::default()),
            "chernoff-audit" => Experiment::ChernoffAudit(ChernoffAuditCfg::default()),
            "dti-package" => Experiment::DtiPackage(DtiPackageCfg::default()),
            _ => return None,
        })
    }

    fn name(&self) -> Option<&str> {
        match self {
            Experiment::Counterexample(c) => c.name.as_deref(),
            Experiment::NizkGap(c) => c.name.as_deref(),
            Experiment::IzkGap(c) => c.name.as_deref(),
            Experiment::CoinTransform(c) => c.name.as_deref(),
            Experiment::ChernoffAudit(c) => c.name.as_deref(),
            Experiment::DtiPackage(c) => c.name.as_deref(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleCfg {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(with = "rat_serde")]
    pub eps_zk: Rat,
    #[serde(with = "rat_serde")]
    pub eps_s: Rat,
    #[serde(with = "rat_serde")]
    pub delta: Rat,
    pub reps: u64,
    pub p: u64,
}

impl Default for CounterexampleCfg {
    fn default() -> Self {
        CounterexampleCfg { name: None, eps_zk: rat(1, 2), eps_s: rat(1, 4), delta: rat(1, 1024), reps: 64, p: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NizkFixture {
    Counterexample {
        #[serde(with = "rat_serde")]
        eps_zk: Rat,
        #[serde(with = "rat_serde")]
        eps_s: Rat,
        #[serde(with = "rat_serde")]
        delta: Rat,
        variant: SoundVariant,
    },
    Trivial {
        #[serde(with = "rat_serde")]
        eps_c: Rat,
        #[serde(with = "rat_serde")]
        eps_s: Rat,
        #[serde(with = "rat_serde")]
        eps_zk: Rat,
    },
    Ideal {},
}

impl NizkFixture {
    pub fn build(&self) -> Result<NizkSpec> {
        match self {
            NizkFixture::Counterexample { eps_zk, eps_s, delta, variant } => {
                build_counterexample(eps_zk.clone(), eps_s.clone(), delta.clone(), *variant)
            }
            NizkFixture::Trivial { eps_c, eps_s, eps_zk } => {
                build_trivial_protocol(eps_c.clone(), eps_s.clone(), eps_zk.clone())
            }
            NizkFixture::Ideal {} => build_ideal_nizk(),
        }
    }
}

impl Default for NizkFixture {
    fn default() -> Self {
        NizkFixture::Counterexample {
            eps_zk: rat(1, 2),
            eps_s: rat(1, 4),
            delta: rat(1, 1024),
            variant: SoundVariant::Derandomized,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NizkGapCfg {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub fixture: NizkFixture,
    pub n: u64,
    pub p: u64,
    /// Overrides the repetition count from the formulas.
    #[serde(default)]
    pub reps: Option<u64>,
    /// Error of the extrapolation oracle; absent means exact.
    #[serde(default, with = "opt_rat")]
    pub oracle_eta: Option<Rat>,
}

impl Default for NizkGapCfg {
    fn default() -> Self {
        NizkGapCfg { name: None, fixture: NizkFixture::default(), n: 1, p: 8, reps: Some(64), oracle_eta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoCfg {
    pub k: usize,
    #[serde(with = "rat_serde")]
    pub eps_c: Rat,
    #[serde(with = "rat_serde")]
    pub eps_s: Rat,
    #[serde(with = "rat_serde")]
    pub eps_zk: Rat,
}

impl Default for DemoCfg {
    fn default() -> Self {
        DemoCfg { k: 3, eps_c: Rat::zero(), eps_s: rat(1, 4), eps_zk: rat(1, 2) }
    }
}

impl DemoCfg {
    pub fn build(&self) -> Result<InteractiveSpec> {
        build_demo_interactive(
            self.k,
            &ErrorProfile::target(self.eps_c.clone(), self.eps_s.clone(), self.eps_zk.clone())?,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IzkGapCfg {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub demo: DemoCfg,
    pub n: u64,
    pub p: u64,
    pub p_est: u64,
    #[serde(default)]
    pub est_trials: Option<u64>,
    /// Overrides the top-level trial count.
    #[serde(default)]
    pub runs: Option<u64>,
}

impl Default for IzkGapCfg {
    fn default() -> Self {
        IzkGapCfg { name: None, demo: DemoCfg::default(), n: 1, p: 8, p_est: 8, est_trials: None, runs: None }
    }
}

impl IzkGapCfg {
    fn engine(&self) -> EngineParams {
        let mut e = EngineParams::desk(self.demo.k, self.n, self.p, self.p_est);
        if let Some(t) = self.est_trials {
            e.est_trials = t;
        }
        e
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinTransformCfg {
    #[serde(default)]
    pub name: Option<String>,
    /// Error injected into the inverter; absent means exact.
    #[serde(default, with = "opt_rat")]
    pub eta: Option<Rat>,
    /// The summed inverter error must stay within `1/q`.
    pub q: u64,
}

impl Default for CoinTransformCfg {
    fn default() -> Self {
        CoinTransformCfg { name: None, eta: None, q: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernoffAuditCfg {
    #[serde(default)]
    pub name: Option<String>,
    pub trials: u64,
}

impl Default for ChernoffAuditCfg {
    fn default() -> Self {
        ChernoffAuditCfg { name: None, trials: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DtiSizeCfg {
    Nizk { label: String, fixture: NizkFixture, n: u64, reps: Option<u64> },
    Interactive { label: String, demo: DemoCfg, n: u64, p_est: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DtiPackageCfg {
    #[serde(default)]
    pub name: Option<String>,
    pub p: u64,
    #[serde(default, with = "opt_rat")]
    pub eta: Option<Rat>,
    pub sizes: Vec<DtiSizeCfg>,
}

impl Default for DtiPackageCfg {
    fn default() -> Self {
        DtiPackageCfg {
            name: None,
            p: 8,
            eta: None,
            sizes: vec![DtiSizeCfg::Nizk { label: "n=1".into(), fixture: NizkFixture::default(), n: 1, reps: Some(64) }],
        }
    }
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

fn schema(path: impl Into<String>, reason: impl Into<String>) -> LabError {
    LabError::Schema { path: path.into(), reason: reason.into() }
}

fn at_path<T: serde::de::DeserializeOwned>(prefix: &str, v: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let full = match (prefix, path.as_str()) {
            ("", ".") => "$".to_string(),
            (p, ".") => p.trim_end_matches('.').to_string(),
            (p, rest) => format!("{p}{rest}"),
        };
        schema(full, e.into_inner().to_string())
    })
}

impl LabConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| schema("$", e.to_string()))?;
        Self::from_value(v)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let t: toml::Table = toml::from_str(s).map_err(|e| schema("$", e.to_string()))?;
        Self::from_value(serde_json::to_value(t)?)
    }

    /// Reads `.toml` or `.json`, chosen by extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text),
            Some("json") => Self::from_json_str(&text),
            _ => Err(schema("$", format!("{} is neither .toml nor .json", path.display()))),
        }
    }

    fn from_value(mut v: serde_json::Value) -> Result<Self> {
        // Experiments are dispatched on `kind` by hand so that errors inside them keep
        // their full path.
        let raw = match v.as_object_mut().and_then(|o| o.remove("experiments")) {
            None => Vec::new(),
            Some(serde_json::Value::Array(a)) => a,
            Some(_) => return Err(schema("experiments", "expected an array")),
        };
        let mut c: LabConfig = at_path("", v)?;
        for (i, e) in raw.into_iter().enumerate() {
            let at = format!("experiments[{i}]");
            let kind = match e.get("kind") {
                Some(serde_json::Value::String(k)) => k.clone(),
                _ => return Err(schema(format!("{at}.kind"), format!("expected one of {}", Experiment::KINDS.join(", ")))),
            };
            let mut body = e;
            body.as_object_mut().expect("has a kind").remove("kind");
            let pre = format!("{at}.");
            c.experiments.push(match kind.as_str() {
                "counterexample" => Experiment::Counterexample(at_path(&pre, body)?),
                "nizk-gap" => Experiment::NizkGap(at_path(&pre, body)?),
                "izk-gap" => Experiment::IzkGap(at_path(&pre, body)?),
                "coin-transform" => Experiment::CoinTransform(at_path(&pre, body)?),
                "chernoff-audit" => Experiment::ChernoffAudit(at_path(&pre, body)?),
                "dti-package" => Experiment::DtiPackage(at_path(&pre, body)?),
                other => {
                    return Err(schema(
                        format!("{at}.kind"),
                        format!("unknown kind {other:?}, expected one of {}", Experiment::KINDS.join(", ")),
                    ))
                }
            });
        }
        c.validate()?;
        Ok(c)
    }

    /// Range checks serde cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.mode == Mode::Mc && self.trials == 0 {
            return Err(schema("trials", "must be positive in mc mode"));
        }
        let mut names = BTreeSet::new();
        for (i, e) in self.experiments.iter().enumerate() {
            let at = |f: &str| format!("experiments[{i}].{f}");
            let name = experiment_name(i, e);
            if !names.insert(name.clone()) {
                return Err(schema(at("name"), format!("duplicate experiment name {name:?}")));
            }
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(schema(at("name"), "use letters, digits, '-' and '_'"));
            }
            let p_ok = |p: u64, f: &str| if p >= 2 { Ok(()) } else { Err(schema(at(f), "must be at least 2")) };
            match e {
                Experiment::Counterexample(c) => {
                    p_ok(c.p, "p")?;
                    if c.reps == 0 {
                        return Err(schema(at("reps"), "must be positive"));
                    }
                }
                Experiment::NizkGap(c) => {
                    p_ok(c.p, "p")?;
                    if c.n == 0 {
                        return Err(schema(at("n"), "must be positive"));
                    }
                }
                Experiment::IzkGap(c) => {
                    p_ok(c.p, "p")?;
                    p_ok(c.p_est, "p_est")?;
                    if c.n == 0 || c.demo.k == 0 {
                        return Err(schema(at("n"), "n and demo.k must be positive"));
                    }
                }
                Experiment::CoinTransform(c) => {
                    if c.q == 0 {
                        return Err(schema(at("q"), "must be positive"));
                    }
                }
                Experiment::ChernoffAudit(c) => {
                    if c.trials == 0 {
                        return Err(schema(at("trials"), "must be positive"));
                    }
                }
                Experiment::DtiPackage(c) => {
                    p_ok(c.p, "p")?;
                    if c.sizes.is_empty() {
                        return Err(schema(at("sizes"), "needs at least one size"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Command-line flags take precedence over file values.
    pub fn with_overrides(mut self, seed: Option<u64>, mode: Option<Mode>, out: Option<PathBuf>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(m) = mode {
            self.mode = m;
        }
        if let Some(o) = out {
            self.out = o;
        }
        self
    }

    /// SHA-256 of the effective config in canonical JSON, output directory excluded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&LabConfig { out: PathBuf::new(), ..self.clone() }).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

fn experiment_name(i: usize, e: &Experiment) -> String {
    e.name().map_or_else(|| format!("{:02}-{}", i, e.kind()), str::to_string)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub kind: String,
    pub seed: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<Check>,
    pub outputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub mode: Mode,
    pub experiments: Vec<ExperimentRecord>,
    /// Every report written, relative to the output directory.
    pub files: Vec<String>,
    pub all_passed: bool,
}

/// One numeric cell of a CSV report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub experiment: String,
    pub row: String,
    pub quantity: String,
    pub mode: Mode,
    /// `num/den` for rationals, decimal text for values only known as floats.
    pub value: String,
    pub float: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

struct Outcome {
    json: serde_json::Value,
    rows: Vec<CsvRow>,
    checks: Vec<Check>,
}

struct Rows<'a> {
    experiment: &'a str,
    rows: Vec<CsvRow>,
}

impl Rows<'_> {
    fn estimate(&mut self, row: &str, quantity: &str, e: &Estimate) {
        let (lo, hi) = match e.interval {
            Some([lo, hi]) => (Some(lo), Some(hi)),
            None => (None, None),
        };
        self.rows.push(CsvRow {
            experiment: self.experiment.into(),
            row: row.into(),
            quantity: quantity.into(),
            mode: e.mode,
            value: fmt_rat(&e.value),
            float: e.float,
            lo,
            hi,
        });
    }

    fn exact(&mut self, row: &str, quantity: &str, r: &Rat) {
        self.estimate(row, quantity, &Estimate::exact(r.clone()));
    }

    fn float(&mut self, row: &str, quantity: &str, mode: Mode, v: f64, interval: Option<[f64; 2]>) {
        self.rows.push(CsvRow {
            experiment: self.experiment.into(),
            row: row.into(),
            quantity: quantity.into(),
            mode,
            value: format!("{v}"),
            float: v,
            lo: interval.map(|i| i[0]),
            hi: interval.map(|i| i[1]),
        });
    }

    fn gap(&mut self, row: &str, r: &GapReport) {
        self.estimate(row, "accept_in", &r.accept_in);
        self.estimate(row, "accept_out", &r.accept_out);
        self.estimate(row, "gap", &r.gap);
    }
}

fn evaluation(cfg: &LabConfig, trials: u64, seed: u64) -> Evaluation {
    match cfg.mode {
        Mode::Exact => Evaluation::Exact,
        Mode::Mc => Evaluation::MonteCarlo { trials, seed },
    }
}

fn inverter(eta: &Option<Rat>) -> Arc<dyn Inverter> {
    match eta {
        Some(e) if !e.is_zero() => Arc::new(Noisy::new(Arc::new(BruteForce), e.clone())),
        _ => Arc::new(BruteForce),
    }
}

fn run_experiment(cfg: &LabConfig, name: &str, e: &Experiment, seed: u64) -> Result<Outcome> {
    let mut rows = Rows { experiment: name, rows: Vec::new() };
    let mut checks = Vec::new();
    let json = match e {
                Experiment::Counterexample(c) => {
            // The barrier uses a simulator that never emits crs 1; the repetition fix
            // needs it with probability delta.
            let how = evaluation(cfg, cfg.trials, seed);
            let params = DeciderParams::from_formulas(1, c.p).with_reps(c.reps);
            let mut parts = serde_json::Map::new();
            for (part, delta) in [("barrier", Rat::zero()), ("repetition", c.delta.clone())] {
                let spec = build_counterexample(c.eps_zk.clone(), c.eps_s.clone(), delta, SoundVariant::Derandomized)?;
                let oracle = make_exact_ue(nizk_crs_sampler(&spec))?;
                let reports = nizk_gap_experiment(&spec, &oracle, &params, "x1", "x0", how)?;
                for r in &reports {
                    rows.gap(&format!("{part}/{}", r.decider), r);
                    checks.extend(r.checks.iter().map(|c| Check::new(format!("{part}: {}", c.name), c.holds, c.detail.clone())));
                }
                let find = |d: NizkDecider| reports.iter().find(|r| r.decider == d.name()).expect("all deciders run");
                let (ow, chk, alg1) = (find(NizkDecider::Ow), find(NizkDecider::Chk), find(NizkDecider::Alg1));
                let [lo, hi] = ow.gap.bounds();
                match (part, how) {
                    ("barrier", Evaluation::Exact) => {
                        checks.push(Check::new("ow gap is 0", ow.gap.value.is_zero(), ow.gap.render()));
                        checks.push(Check::new(
                            "chk accepts exactly like ow",
                            chk.accept_in.value == ow.accept_in.value && chk.accept_out.value == ow.accept_out.value,
                            format!("in {} vs {}, out {} vs {}", chk.accept_in.render(), ow.accept_in.render(),
                                chk.accept_out.render(), ow.accept_out.render()),
                        ));
                    }
                    ("barrier", _) => checks.push(Check::new(
                        "ow gap interval contains 0",
                        lo <= 0.0 && 0.0 <= hi,
                        format!("[{lo:.4}, {hi:.4}]"),
                    )),
                    (_, Evaluation::Exact) => checks.push(Check::new(
                        "alg1 gap >= 1/5",
                        alg1.gap.value >= rat(1, 5),
                        short_rat(&alg1.gap.value),
                    )),
                    _ => {
                        let [lo, hi] = alg1.gap.bounds();
                        checks.push(Check::new("alg1 gap interval excludes 0", lo > 0.0, format!("[{lo:.4}, {hi:.4}]")));
                    }
                }
                parts.insert(part.into(), serde_json::to_value(&reports)?);
            }
            serde_json::Value::Object(parts)
        }
        Experiment::NizkGap(c) => {
            let spec = c.fixture.build()?;
            let mut oracle = make_exact_ue(nizk_crs_sampler(&spec))?;
            if let Some(eta) = &c.oracle_eta {
                oracle = perturb_ue(&oracle, eta.clone(), seed)?;
            }
            let mut params = DeciderParams::from_formulas(c.n, c.p);
            if let Some(t) = c.reps {
                params = params.with_reps(t);
            }
            let reports = nizk_gap_experiment(&spec, &oracle, &params, "x1", "x0", evaluation(cfg, cfg.trials, seed))?;
            for r in &reports {
                rows.gap(&r.decider, r);
                checks.extend(r.checks.iter().cloned());
            }
            serde_json::to_value(&reports)?
        }
        Experiment::IzkGap(c) => {
            let spec = c.demo.build()?;
            let oracle = make_exact_ue(prefix_sampler(&spec))?;
            let how = evaluation(cfg, c.runs.unwrap_or(cfg.trials), seed);
            let r = izk_gap_experiment(&spec, &oracle, &c.engine(), "x1", "x0", how)?;
            rows.gap(&r.decider, &r);
            checks.extend(r.checks.iter().cloned());
            serde_json::to_value(&r)?
        }
        Experiment::CoinTransform(c) => {
            let spec = build_private_fixture()?;
            let (_, report) = publicize(&spec, &inverter(&c.eta), &Rat::from_integer(c.q.into()))?;
            for h in &report.rows {
                rows.exact(&h.hybrid, "eps_c", &h.eps_c);
                rows.exact(&h.hybrid, "eps_s", &h.eps_s);
                rows.exact(&h.hybrid, "eps_zk", &h.eps_zk);
                if let Some(tv) = &h.tv {
                    rows.exact(&h.hybrid, "tv_to_previous", tv);
                }
            }
            rows.exact("total", "delta_c", &report.delta_c);
            rows.exact("total", "delta_s", &report.delta_s);
            rows.exact("total", "delta_zk", &report.delta_zk);
            rows.exact("total", "honest_tv", &report.honest_tv);
            rows.exact("total", "error_budget", &report.error_budget);
            checks.extend(report.checks.iter().cloned());
            serde_json::to_value(&report)?
        }
        Experiment::ChernoffAudit(c) => {
            let audit = chernoff_audit(&default_audit_grid(), c.trials, seed)?;
            let h = chernoff_halfwidth(c.trials, INTERVAL_FAIL);
            for (i, r) in audit.iter().enumerate() {
                let row = format!(
                    "{}:{}:m={}:p={}:dev={}",
                    i,
                    r.cell.kind.name(),
                    r.cell.m,
                    fmt_rat(&r.cell.p),
                    fmt_rat(&r.cell.dev)
                );
                let iv = [(r.empirical - h).max(0.0), (r.empirical + h).min(1.0)];
                rows.float(&row, "empirical", Mode::Mc, r.empirical, Some(iv));
                rows.float(&row, "bound", Mode::Exact, r.bound, None);
                rows.float(&row, "binomial_tail", Mode::Exact, r.exact_tail, None);
                checks.push(Check::new(
                    format!("tail frequency within bound ({row})"),
                    r.pass,
                    format!("{} <= {}", r.empirical, r.bound),
                ));
            }
            serde_json::to_value(&audit)?
        }
        Experiment::DtiPackage(c) => {
            enum Built {
                N(NizkSpec, DeciderParams),
                I(InteractiveSpec, EngineParams),
            }
            let mut built = Vec::new();
            for s in &c.sizes {
                built.push(match s {
                    DtiSizeCfg::Nizk { label, fixture, n, reps } => {
                        let mut p = DeciderParams::from_formulas(*n, c.p);
                        if let Some(t) = reps {
                            p = p.with_reps(*t);
                        }
                        (label.clone(), Built::N(fixture.build()?, p))
                    }
                    DtiSizeCfg::Interactive { label, demo, n, p_est } => {
                        (label.clone(), Built::I(demo.build()?, EngineParams::desk(demo.k, *n, c.p, *p_est)))
                    }
                });
            }
            let sizes: Vec<DtiSize<'_>> = built
                .iter()
                .map(|(label, b)| DtiSize {
                    label: label.clone(),
                    target: match b {
                        Built::N(spec, params) => DtiTarget::Nizk { spec, params },
                        Built::I(spec, params) => DtiTarget::Interactive { spec, params },
                    },
                    x_in: "x1".into(),
                    x_out: "x0".into(),
                })
                .collect();
            let record = package_dti(&sizes, c.p, &inverter(&c.eta))?;
            for r in &record.rows {
                rows.exact(&r.size, "accept_in", &r.accept_in);
                rows.exact(&r.size, "accept_out", &r.accept_out);
                rows.exact(&r.size, "gap", &r.gap);
                rows.exact(&r.size, "oracle_quality", &r.oracle_quality);
                rows.exact(&r.size, "shift_bound", &r.shift_bound);
                rows.float(&r.size, "amplified_in", Mode::Exact, r.amplified_in, None);
                rows.float(&r.size, "amplified_out", Mode::Exact, r.amplified_out, None);
                checks.push(Check::new(
                    format!("amplified verdicts correct at {}", r.size),
                    r.holds,
                    format!("in {:.6}, out {:.6}", r.amplified_in, r.amplified_out),
                ));
            }
            serde_json::to_value(&record)?
        }
    };
    Ok(Outcome { json, rows: rows.rows, checks })
}

fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(["experiment", "row", "quantity", "mode", "value", "float", "lo", "hi"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every experiment, writes the reports and then the manifest. An experiment that
/// errors (an exceeded enumeration budget, say) is recorded and the run continues.
pub fn run(config: &LabConfig) -> Result<RunManifest> {
    config.validate()?;
    fs::create_dir_all(&config.out)?;
    let mut root = SeedStream::new(config.seed);
    let mut records = Vec::new();
    let mut files = Vec::new();
    for (i, e) in config.experiments.iter().enumerate() {
        let name = experiment_name(i, e);
        let seed = root.next_u64();
        let mut record = ExperimentRecord {
            name: name.clone(),
            kind: e.kind().into(),
            seed,
            status: Status::Passed,
            error: None,
            checks: vec![],
            outputs: vec![],
        };
        match run_experiment(config, &name, e, seed) {
            Ok(out) => {
                let json_name = format!("{name}.json");
                let csv_name = format!("{name}.csv");
                let doc = serde_json::json!({
                    "experiment": name,
                    "kind": e.kind(),
                    "mode": config.mode,
                    "seed": seed,
                    "config": e,
                    "result": out.json,
                    "checks": out.checks,
                });
                fs::write(config.out.join(&json_name), serde_json::to_string_pretty(&doc)? + "\n")?;
                write_csv(&config.out.join(&csv_name), &out.rows)?;
                if !out.checks.iter().all(|c| c.holds) {
                    record.status = Status::Failed;
                }
                record.checks = out.checks;
                record.outputs = vec![json_name.clone(), csv_name.clone()];
                files.extend([json_name, csv_name]);
            }
            Err(err) => {
                record.status = Status::Error;
                record.error = Some(err.to_string());
            }
        }
        records.push(record);
    }
    let manifest = RunManifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        config_sha256: config.hash(),
        seed: config.seed,
        mode: config.mode,
        all_passed: records.iter().all(|r| r.status == Status::Passed),
        experiments: records,
        files,
    };
    fs::write(config.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

/// Passed checks over all checks, for summaries.
pub fn tally(m: &RunManifest) -> (usize, usize) {
    let all = m.experiments.iter().flat_map(|e| &e.checks);
    let total = all.clone().count();
    (all.filter(|c| c.holds).count(), total)
}
