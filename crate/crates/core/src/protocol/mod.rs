//! Finite-randomness protocol representations and exact error measurement.

mod interactive;
mod nizk;
pub mod schema;
mod tape;

pub use interactive::{
    build_demo_interactive, measure_interactive_errors, DemoLayout, InteractiveSpec, Party,
    Prefix, Round, Transcript, TranscriptEntry,
};
pub use nizk::{
    build_counterexample, build_ideal_nizk, counterexample_crs, build_trivial_protocol, measure_nizk_errors,
    measure_nizk_errors_adaptive, CrsRule, NizkSpec, SoundVariant, VerifierTable,
};
pub use tape::{check_budget, TapeTable, DEFAULT_BUDGET_BITS};

use serde::{Deserialize, Serialize};

use crate::dist::{fmt_rat, is_probability, rat_serde, Rat, Token};
use crate::error::{LabError, Result};

/// Which computation produced a number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

impl Mode {
    pub fn tag(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Mc => "mc",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" => Ok(Mode::Mc),
            _ => Err(LabError::OutOfRange(format!("mode must be exact or mc, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub label: String,
    pub in_language: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Token>,
}

impl Instance {
    pub fn yes(label: &str, witness: Token) -> Self {
        Instance { label: label.into(), in_language: true, witness: Some(witness) }
    }

    pub fn no(label: &str) -> Self {
        Instance { label: label.into(), in_language: false, witness: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorProfile {
    #[serde(with = "rat_serde")]
    pub eps_c: Rat,
    #[serde(with = "rat_serde")]
    pub eps_s: Rat,
    #[serde(with = "rat_serde")]
    pub eps_zk: Rat,
    pub mode: Mode,
    pub notes: String,
}

impl ErrorProfile {
    pub fn new(eps_c: Rat, eps_s: Rat, eps_zk: Rat, mode: Mode, notes: impl Into<String>) -> Result<Self> {
        for (name, v) in [("eps_c", &eps_c), ("eps_s", &eps_s), ("eps_zk", &eps_zk)] {
            if !is_probability(v) {
                return Err(LabError::OutOfRange(format!("{name} = {} not in [0,1]", fmt_rat(v))));
            }
        }
        Ok(ErrorProfile { eps_c, eps_s, eps_zk, mode, notes: notes.into() })
    }

    /// Target profile for fixture builders.
    pub fn target(eps_c: Rat, eps_s: Rat, eps_zk: Rat) -> Result<Self> {
        Self::new(eps_c, eps_s, eps_zk, Mode::Exact, "target")
    }

    pub fn sum(&self) -> Rat {
        &self.eps_c + &self.eps_s + &self.eps_zk
    }
}

pub(crate) fn instance_index(instances: &[Instance], label: &str) -> Result<usize> {
    instances
        .iter()
        .position(|i| i.label == label)
        .ok_or_else(|| LabError::InvalidSpec(format!("unknown instance {label:?}")))
}
