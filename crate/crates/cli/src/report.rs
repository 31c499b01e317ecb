//! Line-delimited JSON reports: one header line, then one record per check.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A probe past the stated hypotheses that found the counterexample it was looking for.
    ExpectedFailure,
}

/// Where the reference value of a check comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Trivial,
    Derived,
    Paper,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub schema: u32,
    pub command: String,
    pub seed: Option<u64>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub provenance: Provenance,
    pub detail: String,
    pub value: Value,
}

impl Record {
    pub fn new(name: impl Into<String>, anchor: &str, status: Status) -> Self {
        Record {
            name: name.into(),
            anchor: anchor.to_string(),
            status,
            residual: None,
            provenance: Provenance::None,
            detail: String::new(),
            value: Value::Null,
        }
    }

    pub fn check(name: impl Into<String>, anchor: &str, ok: bool) -> Self {
        Record::new(name, anchor, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn residual(mut self, r: f64) -> Self {
        self.residual = Some(if r.is_finite() { r } else { f64::MAX });
        self
    }

    pub fn provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn value(mut self, v: Value) -> Self {
        self.value = v;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Header,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: Option<u64>) -> Self {
        Report {
            header: Header {
                schema: SCHEMA_VERSION,
                command: command.into(),
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    /// True when every record other than an expected failure passed.
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    fn sorted(&self) -> Vec<&Record> {
        let mut v: Vec<&Record> = self.records.iter().collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for r in self.sorted() {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("# {}\n", self.header.command);
        for r in self.sorted() {
            let tag = match r.status {
                Status::Pass => "PASS ",
                Status::Fail => "FAIL ",
                Status::ExpectedFailure => "XFAIL",
            };
            out.push_str(&format!("{tag} {}", r.name));
            if let Some(res) = r.residual {
                out.push_str(&format!("  residual={res:.3e}"));
            }
            if !r.detail.is_empty() {
                out.push_str(&format!("  {}", r.detail));
            }
            out.push('\n');
        }
        let bad = self
            .records
            .iter()
            .filter(|r| r.status == Status::Fail)
            .count();
        out.push_str(&format!("{} checks, {bad} failed\n", self.records.len()));
        out
    }
}

/// Checks a structured report against the schema and returns it parsed.
pub fn validate(text: &str) -> Result<Report, String> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or("empty report")?;
    let header: Header =
        serde_json::from_str(first).map_err(|e| format!("line 1: bad header: {e}"))?;
    if header.schema != SCHEMA_VERSION {
        return Err(format!("line 1: schema {} is not {SCHEMA_VERSION}", header.schema));
    }
    if header.command.trim().is_empty() {
        return Err("line 1: empty command".into());
    }
    let mut records: Vec<Record> = Vec::new();
    for (i, line) in lines {
        let ln = i + 1;
        let r: Record =
            serde_json::from_str(line).map_err(|e| format!("line {ln}: bad record: {e}"))?;
        if r.name.is_empty() {
            return Err(format!("line {ln}: empty name"));
        }
        if r.anchor.trim().is_empty() {
            return Err(format!("line {ln}: record `{}` has no anchor", r.name));
        }
        if let Some(prev) = records.last() {
            if prev.name >= r.name {
                return Err(format!("line {ln}: records out of order at `{}`", r.name));
            }
        }
        records.push(r);
    }
    Ok(Report { header, records })
}
