//! JSON state documents and trajectory CSV.
//!
//! A state document names its kind and carries the arrays of that kind:
//!
//! ```json
//! {"n": 2, "kind": "action_angle", "phat": [1.0, 0.0], "qhat": [0.0, 0.0]}
//! ```
//!
//! Kinds are `toda` (`q`, `p`), `action_angle` (`phat`, `qhat`) and `moser`
//! (`phat`, `w`, optionally `qhat`). Floats are written in shortest
//! round-trip form, so loading a stored document reproduces it bitwise.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::duality::ActionAngleState;
use crate::error::{Error, Result};
use crate::gauge::MoserState;
use crate::toda::TodaState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Toda,
    ActionAngle,
    Moser,
}

impl std::fmt::Display for StateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateKind::Toda => "toda",
            StateKind::ActionAngle => "action_angle",
            StateKind::Moser => "moser",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub n: usize,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phat: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qhat: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
}

/// A validated state of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Toda(TodaState),
    ActionAngle(ActionAngleState),
    /// Moser variables, with the angles when they are known.
    Moser(MoserState, Option<Vec<f64>>),
}

impl State {
    pub fn kind(&self) -> StateKind {
        match self {
            State::Toda(_) => StateKind::Toda,
            State::ActionAngle(_) => StateKind::ActionAngle,
            State::Moser(..) => StateKind::Moser,
        }
    }

    pub fn to_document(&self) -> StateDocument {
        let empty = |n, kind| StateDocument { n, kind, q: None, p: None, phat: None, qhat: None, w: None };
        match self {
            State::Toda(s) => {
                StateDocument { q: Some(s.q().to_vec()), p: Some(s.p().to_vec()), ..empty(s.n(), StateKind::Toda) }
            }
            State::ActionAngle(a) => StateDocument {
                phat: Some(a.phat().to_vec()),
                qhat: Some(a.qhat().to_vec()),
                ..empty(a.n(), StateKind::ActionAngle)
            },
            State::Moser(m, qhat) => StateDocument {
                phat: Some(m.phat().to_vec()),
                w: Some(m.w().to_vec()),
                qhat: qhat.clone(),
                ..empty(m.n(), StateKind::Moser)
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("state document serializes")
    }
}

impl StateDocument {
    /// Checks array presence and lengths, then the invariants of the kind.
    pub fn into_state(self, tol: &ToleranceConfig) -> Result<State> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidState("n must be positive".into()));
        }
        let kind = self.kind;
        let take = |name: &str, v: Option<Vec<f64>>| -> Result<Vec<f64>> {
            let v = v.ok_or_else(|| Error::Parse(format!("kind {kind} requires field {name}")))?;
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
            Ok(v)
        };
        let reject = |name: &str, v: &Option<Vec<f64>>| -> Result<()> {
            match v {
                Some(_) => Err(Error::Parse(format!("field {name} does not belong to kind {kind}"))),
                None => Ok(()),
            }
        };
        match kind {
            StateKind::Toda => {
                reject("phat", &self.phat)?;
                reject("qhat", &self.qhat)?;
                reject("w", &self.w)?;
                Ok(State::Toda(TodaState::new(take("q", self.q)?, take("p", self.p)?)?))
            }
            StateKind::ActionAngle => {
                reject("q", &self.q)?;
                reject("p", &self.p)?;
                reject("w", &self.w)?;
                Ok(State::ActionAngle(ActionAngleState::new(take("phat", self.phat)?, take("qhat", self.qhat)?, tol)?))
            }
            StateKind::Moser => {
                reject("q", &self.q)?;
                reject("p", &self.p)?;
                let qhat = self.qhat.map(|v| take("qhat", Some(v))).transpose()?;
                if qhat.as_ref().is_some_and(|v| v.iter().any(|x| !x.is_finite())) {
                    return Err(Error::InvalidState("q̂ must be finite".into()));
                }
                Ok(State::Moser(MoserState::new(take("phat", self.phat)?, take("w", self.w)?, tol)?, qhat))
            }
        }
    }
}

pub fn parse_state(text: &str, tol: &ToleranceConfig) -> Result<State> {
    let doc: StateDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_state(tol)
}

pub fn read_state(path: &std::path::Path, tol: &ToleranceConfig) -> Result<State> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_state(&text, tol)
}

/// `%g`-style formatting with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

pub fn toda_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|i| format!("q{i}")));
    h.extend((1..=n).map(|i| format!("p{i}")));
    h.push("H".into());
    h
}

pub fn action_angle_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|i| format!("phat{i}")));
    h.extend((1..=n).map(|i| format!("qhat{i}")));
    h.push("Hhat".into());
    h
}

/// Indices `0, stride, 2·stride, …` plus the last index.
pub fn strided(len: usize, stride: usize) -> Vec<usize> {
    let stride = stride.max(1);
    let mut idx: Vec<usize> = (0..len).step_by(stride).collect();
    if len > 0 && idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    idx
}

/// Comma-separated rows with a header line and `\n` endings.
pub fn write_csv(out: &mut impl Write, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|x| format_sig12(*x)).collect();
        writeln!(out, "{}", line.join(",")).map_err(io)?;
    }
    Ok(())
}
