//! Verdict records produced by the bound verifiers, and their JSON/CSV forms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numfmt;

/// Slack absorbed by every verdict.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Main1,
    Diam2,
    Diam3,
    Join,
    LargeDegree,
    DegreeWindow,
    Grm,
    CounterexampleFamily,
    KemenySandwich,
    Cheeger,
    CouplingTv,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::Main1,
        TheoremId::Diam2,
        TheoremId::Diam3,
        TheoremId::Join,
        TheoremId::LargeDegree,
        TheoremId::DegreeWindow,
        TheoremId::Grm,
        TheoremId::CounterexampleFamily,
        TheoremId::KemenySandwich,
        TheoremId::Cheeger,
        TheoremId::CouplingTv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Main1 => "main1",
            TheoremId::Diam2 => "diam2",
            TheoremId::Diam3 => "diam3",
            TheoremId::Join => "join",
            TheoremId::LargeDegree => "large_degree",
            TheoremId::DegreeWindow => "degree_window",
            TheoremId::Grm => "grm",
            TheoremId::CounterexampleFamily => "counterexample_family",
            TheoremId::KemenySandwich => "kemeny_sandwich",
            TheoremId::Cheeger => "cheeger",
            TheoremId::CouplingTv => "coupling_tv",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown theorem id `{s}`")))
    }
}

/// Which side of the bound the measured value must fall on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// `measured >= bound`; margin is `measured - bound`.
    AtLeast,
    /// `measured <= bound`; margin is `bound - measured`.
    AtMost,
    /// `bound <= measured <= upper`; margin is the smaller of the two slacks.
    Between,
}

/// A context entry.
#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl Param {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Param::Int(i) => Some(i as f64),
            Param::Real(x) => Some(x),
            Param::Bool(b) => Some(if b { 1.0 } else { 0.0 }),
            Param::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Param::Int(i) => i.to_string(),
            Param::Real(x) => numfmt::csv_cell(*x),
            Param::Bool(b) => b.to_string(),
            Param::Text(s) => s.clone(),
        }
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Param::Int(i) => s.serialize_i64(*i),
            Param::Real(x) => numfmt::serialize(x, s),
            Param::Bool(b) => s.serialize_bool(*b),
            Param::Text(t) => s.serialize_str(t),
        }
    }
}

impl From<usize> for Param {
    fn from(v: usize) -> Self {
        Param::Int(v as i64)
    }
}

impl From<u64> for Param {
    fn from(v: u64) -> Self {
        // seeds above i64::MAX keep their exact value as text
        i64::try_from(v).map(Param::Int).unwrap_or_else(|_| Param::Text(v.to_string()))
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Real(v)
    }
}

impl From<bool> for Param {
    fn from(v: bool) -> Self {
        Param::Bool(v)
    }
}

impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_string())
    }
}

/// One theorem check on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub n: usize,
    pub sense: Sense,
    pub hypothesis_ok: bool,
    #[serde(rename = "bound", serialize_with = "numfmt::serialize")]
    pub bound_value: f64,
    #[serde(rename = "measured", serialize_with = "numfmt::serialize")]
    pub measured_value: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub margin: f64,
    pub holds: bool,
    pub context: BTreeMap<String, Param>,
}

impl BoundReport {
    /// One-sided report; `holds` is derived from the margin.
    pub fn new(
        theorem_id: TheoremId,
        n: usize,
        sense: Sense,
        hypothesis_ok: bool,
        bound_value: f64,
        measured_value: f64,
    ) -> Self {
        let margin = match sense {
            Sense::AtLeast => measured_value - bound_value,
            Sense::AtMost => bound_value - measured_value,
            Sense::Between => panic!("use BoundReport::between for two-sided checks"),
        };
        Self::assemble(theorem_id, n, sense, hypothesis_ok, bound_value, measured_value, margin)
    }

    /// Two-sided report `lower <= measured <= upper`; `upper` is kept in the
    /// context under `upper_bound`.
    pub fn between(
        theorem_id: TheoremId,
        n: usize,
        hypothesis_ok: bool,
        lower: f64,
        upper: f64,
        measured: f64,
    ) -> Self {
        let margin = (measured - lower).min(upper - measured);
        Self::assemble(theorem_id, n, Sense::Between, hypothesis_ok, lower, measured, margin)
            .with("upper_bound", upper)
    }

    fn assemble(
        theorem_id: TheoremId,
        n: usize,
        sense: Sense,
        hypothesis_ok: bool,
        bound_value: f64,
        measured_value: f64,
        margin: f64,
    ) -> Self {
        BoundReport {
            theorem_id,
            n,
            sense,
            hypothesis_ok,
            bound_value,
            measured_value,
            margin,
            holds: hypothesis_ok && margin >= -MARGIN_TOLERANCE,
            context: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Param>) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    /// Folds an additional sub-check into the verdict.
    pub fn require(mut self, key: &str, ok: bool) -> Self {
        self.context.insert(key.to_string(), Param::Bool(ok));
        self.holds &= ok;
        self
    }

    pub fn get(&self, key: &str) -> Option<&Param> {
        self.context.get(key)
    }

    /// Numeric value of a top-level field or a context key.
    pub fn field(&self, name: &str) -> Option<f64> {
        match name {
            "n" => Some(self.n as f64),
            "bound" => Some(self.bound_value),
            "measured" => Some(self.measured_value),
            "margin" => Some(self.margin),
            "holds" => Some(self.holds as u8 as f64),
            "hypothesis_ok" => Some(self.hypothesis_ok as u8 as f64),
            key => self.context.get(key).and_then(Param::as_f64),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// `k=v` pairs joined by `;`, keys sorted.
    pub fn params_cell(&self) -> String {
        self.context
            .iter()
            .map(|(k, v)| format!("{k}={}", v.render()))
            .collect::<Vec<_>>()
            .join(";")
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "theorem_id",
    "n",
    "params",
    "hypothesis_ok",
    "bound",
    "measured",
    "margin",
    "holds",
];

/// JSON lines, one report per line.
pub fn reports_to_json_lines(reports: &[BoundReport]) -> String {
    reports.iter().map(|r| r.to_json() + "\n").collect()
}

/// CSV with [`CSV_HEADER`] columns.
pub fn reports_to_csv(reports: &[BoundReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    for r in reports {
        w.write_record([
            r.theorem_id.as_str().to_string(),
            r.n.to_string(),
            r.params_cell(),
            r.hypothesis_ok.to_string(),
            numfmt::csv_cell(r.bound_value),
            numfmt::csv_cell(r.measured_value),
            numfmt::csv_cell(r.margin),
            r.holds.to_string(),
        ])
        .map_err(ser)?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

/// Two-column CSV of `(x, y)` taken from each report, in stream order.
pub fn plot_data(reports: &[BoundReport], x: &str, y: &str) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record([x, y]).map_err(ser)?;
    for r in reports {
        let get = |f: &str| r.field(f).ok_or_else(|| Error::UnknownField(f.to_string()));
        w.write_record([numfmt::csv_cell(get(x)?), numfmt::csv_cell(get(y)?)])
            .map_err(ser)?;
    }
    finish_csv(w)
}
