//! Numbers tagged with how they were obtained, and the gap reports shared by the
//! NIZK and interactive experiments.

use std::collections::BTreeMap;

use num::traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dist::{chernoff_halfwidth, fmt_rat, rat_int, rat_serde, to_f64, Rat};
use crate::protocol::Mode;

/// Failure probability per Monte-Carlo interval. Two of them bound a gap with 99% confidence.
pub const INTERVAL_FAIL: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

impl Evaluation {
    pub fn mode(self) -> Mode {
        match self {
            Evaluation::Exact => Mode::Exact,
            Evaluation::MonteCarlo { .. } => Mode::Mc,
        }
    }

    pub fn seed(self) -> Option<u64> {
        match self {
            Evaluation::Exact => None,
            Evaluation::MonteCarlo { seed, .. } => Some(seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    #[serde(with = "rat_serde")]
    pub value: Rat,
    pub float: f64,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

impl Estimate {
    pub fn exact(value: Rat) -> Self {
        Estimate { float: to_f64(&value), value, mode: Mode::Exact, interval: None, trials: None }
    }

    /// Frequency `hits / trials` with a Chernoff interval at [`INTERVAL_FAIL`].
    pub fn frequency(hits: u64, trials: u64) -> Self {
        let value = if trials == 0 { Rat::zero() } else { rat_int(hits) / rat_int(trials) };
        let f = to_f64(&value);
        let h = chernoff_halfwidth(trials, INTERVAL_FAIL);
        Estimate {
            float: f,
            value,
            mode: Mode::Mc,
            interval: Some([(f - h).max(0.0), (f + h).min(1.0)]),
            trials: Some(trials),
        }
    }

    pub fn bounds(&self) -> [f64; 2] {
        self.interval.unwrap_or([self.float, self.float])
    }

    /// `self - other`; intervals combine endpoint-wise.
    pub fn minus(&self, other: &Estimate) -> Estimate {
        let value = &self.value - &other.value;
        let mode = if self.mode == Mode::Exact && other.mode == Mode::Exact { Mode::Exact } else { Mode::Mc };
        let interval = (mode == Mode::Mc).then(|| {
            let (a, b) = (self.bounds(), other.bounds());
            [a[0] - b[1], a[1] - b[0]]
        });
        Estimate { float: to_f64(&value), value, mode, interval, trials: self.trials.or(other.trials) }
    }

    pub fn render(&self) -> String {
        fmt_rat(&self.value)
    }
}

/// A named inequality and whether it held.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), holds, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub decider: String,
    pub x_in: String,
    pub x_out: String,
    pub accept_in: Estimate,
    pub accept_out: Estimate,
    pub gap: Estimate,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

impl GapReport {
    pub fn new(
        decider: &str,
        (x_in, accept_in): (&str, Estimate),
        (x_out, accept_out): (&str, Estimate),
        how: Evaluation,
        params: BTreeMap<String, String>,
    ) -> Self {
        let gap = accept_in.minus(&accept_out);
        GapReport {
            decider: decider.into(),
            x_in: x_in.into(),
            x_out: x_out.into(),
            accept_in,
            accept_out,
            gap,
            mode: how.mode(),
            seed: how.seed(),
            params,
            checks: Vec::new(),
        }
    }

    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}
