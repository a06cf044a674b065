//! JSON documents for protocol specs. Tables are keyed by hex-encoded tapes (the
//! start of each run) and every document carries `schema_version`.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::interactive::{InteractiveSpec, Prefix, Round, Transcript};
use super::nizk::{CrsRule, NizkSpec, VerifierTable};
use super::tape::TapeTable;
use super::Instance;
use crate::dist::{fmt_rat, parse_rat, Rat, Token};
use crate::error::{LabError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TapeDoc<T> {
    pub size: u64,
    pub runs: BTreeMap<String, T>,
}

fn hex_width(size: u64) -> usize {
    let bytes = (64 - size.saturating_sub(1).leading_zeros()).div_ceil(8).max(1);
    bytes as usize * 2
}

impl<T: Clone + PartialEq> TapeDoc<T> {
    pub fn from_table(t: &TapeTable<T>) -> Self {
        let w = hex_width(t.size());
        let runs = t.runs().map(|(s, _, v)| (format!("{s:0w$x}"), v.clone())).collect();
        TapeDoc { size: t.size(), runs }
    }

    pub fn to_table(&self, path: &str) -> Result<TapeTable<T>> {
        let runs = self
            .runs
            .iter()
            .map(|(k, v)| {
                u64::from_str_radix(k, 16)
                    .map(|s| (s, v.clone()))
                    .map_err(|_| schema_err(path, format!("tape key {k:?} is not hex")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut runs = runs;
        runs.sort_by_key(|r| r.0);
        TapeTable::from_runs(self.size, runs).map_err(|e| schema_err(path, e.to_string()))
    }
}

fn schema_err(path: &str, reason: impl Into<String>) -> LabError {
    LabError::Schema { path: path.into(), reason: reason.into() }
}

fn rat_field(path: &str, s: &str) -> Result<Rat> {
    parse_rat(s).map_err(|e| schema_err(path, e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrsRuleDoc {
    pub default: String,
    #[serde(default)]
    pub proofs: BTreeMap<Token, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifierDoc {
    pub default: String,
    #[serde(default)]
    pub by_crs: BTreeMap<Token, CrsRuleDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NizkSpecDoc {
    pub schema_version: u32,
    pub kind: String,
    pub name: String,
    pub instances: Vec<Instance>,
    pub gen: TapeDoc<Token>,
    pub prover_tape: u64,
    pub prover: BTreeMap<String, BTreeMap<Token, TapeDoc<Token>>>,
    pub verifier: BTreeMap<String, VerifierDoc>,
    pub sim: BTreeMap<String, TapeDoc<(Token, Token)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProverEntryDoc {
    pub prefix: Vec<u16>,
    pub table: TapeDoc<u16>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractiveSpecDoc {
    pub schema_version: u32,
    pub kind: String,
    pub name: String,
    pub instances: Vec<Instance>,
    pub rounds: Vec<Round>,
    pub prover_tape: u64,
    pub prover: BTreeMap<String, Vec<ProverEntryDoc>>,
    /// Accepted full transcripts as message-index lists.
    pub accept: BTreeMap<String, Vec<Vec<u16>>>,
    pub sim: BTreeMap<String, TapeDoc<Vec<u16>>>,
}

fn check_header(version: u32, kind: &str, want: &str) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(schema_err("schema_version", format!("unsupported version {version}")));
    }
    if kind != want {
        return Err(schema_err("kind", format!("expected {want:?}, got {kind:?}")));
    }
    Ok(())
}

fn parse_doc<T: DeserializeOwned>(json: &str) -> Result<T> {
    serde_json::from_str(json).map_err(|e| schema_err(&format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

pub fn nizk_to_doc(spec: &NizkSpec) -> NizkSpecDoc {
    let rule_doc = |r: &CrsRule| CrsRuleDoc {
        default: fmt_rat(&r.default),
        proofs: r.proofs.iter().map(|(k, v)| (k.clone(), fmt_rat(v))).collect(),
    };
    NizkSpecDoc {
        schema_version: SCHEMA_VERSION,
        kind: "nizk".into(),
        name: spec.name.clone(),
        instances: spec.instances.clone(),
        gen: TapeDoc::from_table(&spec.gen),
        prover_tape: spec.prover_tape,
        prover: spec
            .prover
            .iter()
            .map(|(x, m)| (x.clone(), m.iter().map(|(c, t)| (c.clone(), TapeDoc::from_table(t))).collect()))
            .collect(),
        verifier: spec
            .verifier
            .iter()
            .map(|(x, v)| {
                (
                    x.clone(),
                    VerifierDoc {
                        default: fmt_rat(&v.default),
                        by_crs: v.by_crs.iter().map(|(c, r)| (c.clone(), rule_doc(r))).collect(),
                    },
                )
            })
            .collect(),
        sim: spec.sim.iter().map(|(x, t)| (x.clone(), TapeDoc::from_table(t))).collect(),
    }
}

pub fn nizk_from_doc(doc: &NizkSpecDoc) -> Result<NizkSpec> {
    check_header(doc.schema_version, &doc.kind, "nizk")?;
    let mut prover = BTreeMap::new();
    for (x, m) in &doc.prover {
        let mut tables = BTreeMap::new();
        for (c, t) in m {
            tables.insert(c.clone(), t.to_table(&format!("prover.{x}.{c}"))?);
        }
        prover.insert(x.clone(), tables);
    }
    let mut verifier = BTreeMap::new();
    for (x, v) in &doc.verifier {
        let path = format!("verifier.{x}");
        let mut by_crs = BTreeMap::new();
        for (c, r) in &v.by_crs {
            let p = format!("{path}.by_crs.{c}");
            let mut proofs = BTreeMap::new();
            for (pi, a) in &r.proofs {
                proofs.insert(pi.clone(), rat_field(&format!("{p}.proofs.{pi}"), a)?);
            }
            by_crs.insert(c.clone(), CrsRule { default: rat_field(&format!("{p}.default"), &r.default)?, proofs });
        }
        verifier.insert(
            x.clone(),
            VerifierTable { default: rat_field(&format!("{path}.default"), &v.default)?, by_crs },
        );
    }
    let mut sim = BTreeMap::new();
    for (x, t) in &doc.sim {
        sim.insert(x.clone(), t.to_table(&format!("sim.{x}"))?);
    }
    let spec = NizkSpec {
        name: doc.name.clone(),
        instances: doc.instances.clone(),
        gen: doc.gen.to_table("gen")?,
        prover_tape: doc.prover_tape,
        prover,
        verifier,
        sim,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn nizk_to_json(spec: &NizkSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(&nizk_to_doc(spec))?)
}

pub fn nizk_from_json(json: &str) -> Result<NizkSpec> {
    nizk_from_doc(&parse_doc(json)?)
}

pub fn interactive_to_doc(spec: &InteractiveSpec) -> InteractiveSpecDoc {
    let mut prover = BTreeMap::new();
    let mut accept = BTreeMap::new();
    let mut sim = BTreeMap::new();
    for inst in &spec.instances {
        let x = &inst.label;
        if let Some(tables) = spec.prover_table(x) {
            let entries = tables
                .iter()
                .map(|(p, t)| ProverEntryDoc { prefix: spec.decode(*p).0, table: TapeDoc::from_table(t) })
                .collect();
            prover.insert(x.clone(), entries);
        }
        let acc = spec
            .accept_table(x)
            .iter()
            .enumerate()
            .filter(|(_, a)| **a)
            .map(|(c, _)| spec.decode(spec.full(c as u64)).0)
            .collect();
        accept.insert(x.clone(), acc);
        let table = spec.sim_table(x).map(|c| spec.decode(spec.full(*c)).0);
        sim.insert(x.clone(), TapeDoc::from_table(&table));
    }
    InteractiveSpecDoc {
        schema_version: SCHEMA_VERSION,
        kind: "interactive".into(),
        name: spec.name.clone(),
        instances: spec.instances.clone(),
        rounds: spec.rounds().to_vec(),
        prover_tape: spec.prover_tape(),
        prover,
        accept,
        sim,
    }
}

pub fn interactive_from_doc(doc: &InteractiveSpecDoc) -> Result<InteractiveSpec> {
    check_header(doc.schema_version, &doc.kind, "interactive")?;
    let shell = InteractiveSpec::new(
        "shell",
        Vec::new(),
        doc.rounds.clone(),
        doc.prover_tape,
        BTreeMap::new(),
        BTreeMap::new(),
        BTreeMap::new(),
    )?;
    let encode = |path: &str, m: &[u16]| -> Result<Prefix> {
        shell.encode(&Transcript(m.to_vec())).map_err(|e| schema_err(path, e.to_string()))
    };
    let mut prover = BTreeMap::new();
    for (x, entries) in &doc.prover {
        let mut tables = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            let path = format!("prover.{x}[{i}]");
            tables.insert(encode(&path, &e.prefix)?, e.table.to_table(&path)?);
        }
        prover.insert(x.clone(), tables);
    }
    let mut accept = BTreeMap::new();
    for (x, list) in &doc.accept {
        let mut acc = vec![false; shell.total() as usize];
        for (i, m) in list.iter().enumerate() {
            let path = format!("accept.{x}[{i}]");
            let p = encode(&path, m)?;
            if !shell.is_full(p) {
                return Err(schema_err(&path, "accepted transcript is not full"));
            }
            acc[p.code as usize] = true;
        }
        accept.insert(x.clone(), acc);
    }
    let mut sim = BTreeMap::new();
    for (x, t) in &doc.sim {
        let path = format!("sim.{x}");
        let table = t.to_table(&path)?;
        let mut blocks = Vec::new();
        for (_, len, m) in table.runs() {
            let p = encode(&path, m)?;
            if !shell.is_full(p) {
                return Err(schema_err(&path, "simulated transcript is not full"));
            }
            blocks.push((p.code, len));
        }
        sim.insert(x.clone(), TapeTable::from_blocks(blocks)?);
    }
    InteractiveSpec::new(
        doc.name.clone(),
        doc.instances.clone(),
        doc.rounds.clone(),
        doc.prover_tape,
        prover,
        accept,
        sim,
    )
}

pub fn interactive_to_json(spec: &InteractiveSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(&interactive_to_doc(spec))?)
}

pub fn interactive_from_json(json: &str) -> Result<InteractiveSpec> {
    interactive_from_doc(&parse_doc(json)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::rat;
    use crate::protocol::{
        build_counterexample, build_demo_interactive, build_trivial_protocol, ErrorProfile,
        SoundVariant,
    };

    #[test]
    fn nizk_round_trip() {
        for spec in [
            build_trivial_protocol(rat(1, 5), rat(3, 10), rat(1, 2)).unwrap(),
            build_counterexample(rat(1, 2), rat(1, 4), rat(1, 1024), SoundVariant::Randomized).unwrap(),
            build_counterexample(rat(3, 10), rat(1, 10), Rat::from_integer(0.into()), SoundVariant::Derandomized)
                .unwrap(),
        ] {
            let json = nizk_to_json(&spec).unwrap();
            assert_eq!(nizk_from_json(&json).unwrap(), spec);
        }
    }

    #[test]
    fn interactive_round_trip() {
        let t = ErrorProfile::target(rat(1, 8), rat(1, 4), rat(1, 2)).unwrap();
        for k in [3, 5] {
            let spec = build_demo_interactive(k, &t).unwrap();
            let json = interactive_to_json(&spec).unwrap();
            assert_eq!(interactive_from_json(&json).unwrap(), spec);
        }
    }

    #[test]
    fn version_is_mandatory() {
        let spec = build_trivial_protocol(rat(1, 2), rat(1, 2), rat(0, 1)).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&nizk_to_json(&spec).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("schema_version");
        assert!(nizk_from_json(&v.to_string()).is_err());
        v["schema_version"] = 7.into();
        assert!(matches!(nizk_from_json(&v.to_string()), Err(LabError::Schema { .. })));
    }

    #[test]
    fn tape_keys_are_fixed_width_hex() {
        let t = TapeTable::from_blocks(vec![(1u16, 3), (2, 300)]).unwrap();
        let d = TapeDoc::from_table(&t);
        assert_eq!(d.runs.keys().cloned().collect::<Vec<_>>(), vec!["0000", "0003"]);
        assert_eq!(d.to_table("t").unwrap(), t);
    }
}
