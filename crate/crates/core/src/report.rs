//! Check records and the machine-readable verification report.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::exactmat::{format_scalar, ExactMatrix, Scalar};
use crate::qpolyverify::QPolyCertificate;
use crate::tmodule::DecompositionEcho;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Where a check failed. Only the fields relevant to the check are set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Witness {
    pub fn detail(msg: impl Into<String>) -> Self {
        Witness { detail: Some(msg.into()), ..Default::default() }
    }

    pub fn at_vertex(vertex: usize, msg: impl Into<String>) -> Self {
        Witness { vertex: Some(vertex), detail: Some(msg.into()), ..Default::default() }
    }

    /// A matrix entry that breaks an identity.
    pub fn entry(row: usize, col: usize, value: &Scalar) -> Self {
        Witness { row: Some(row), col: Some(col), entry: Some(format_scalar(value)), ..Default::default() }
    }

    pub fn with_ij(mut self, i: usize, j: usize) -> Self {
        self.i = Some(i);
        self.j = Some(j);
        self
    }

    pub fn with_i(mut self, i: usize) -> Self {
        self.i = Some(i);
        self
    }

    pub fn with_detail(mut self, msg: impl Into<String>) -> Self {
        self.detail = Some(msg.into());
        self
    }
}

pub type Outcome = Result<(), Witness>;

/// `lhs == rhs` as matrices, or the first differing entry of `lhs`.
pub fn expect_equal(lhs: &ExactMatrix, rhs: &ExactMatrix) -> Outcome {
    match lhs.first_difference(rhs) {
        None => Ok(()),
        Some((r, c)) if r < lhs.rows() && c < lhs.cols() => Err(Witness::entry(r, c, lhs.get(r, c))),
        Some(_) => Err(Witness::detail("shape mismatch")),
    }
}

/// `m == 0`, or its first nonzero entry.
pub fn expect_zero(m: &ExactMatrix) -> Outcome {
    match m.first_nonzero() {
        None => Ok(()),
        Some((r, c, x)) => Err(Witness::entry(r, c, x)),
    }
}

/// One executed (or skipped) check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub group: String,
    pub statement: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub wall_time_ms: f64,
}

impl CheckRecord {
    pub fn run(id: &str, statement: &str, f: impl FnOnce() -> Outcome) -> Self {
        let start = Instant::now();
        let outcome = f();
        let wall_time_ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
        let (status, witness) = match outcome {
            Ok(()) => (Status::Pass, None),
            Err(w) => (Status::Fail, Some(w)),
        };
        CheckRecord { id: id.into(), group: String::new(), statement: statement.into(), status, witness, wall_time_ms }
    }

    pub fn skipped(id: &str, statement: &str, reason: &str) -> Self {
        CheckRecord {
            id: id.into(),
            group: String::new(),
            statement: statement.into(),
            status: Status::Skipped,
            witness: Some(Witness::detail(reason)),
            wall_time_ms: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// `true` when every record passed.
pub fn all_pass(records: &[CheckRecord]) -> bool {
    records.iter().all(CheckRecord::passed)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub overall_pass: bool,
}

/// The echo of the run configuration carried in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub p: u64,
    pub ext_degree: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub q: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub size_limit: usize,
    pub checks: Vec<String>,
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<QPolyCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modules: Option<DecompositionEcho>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(config: ConfigEcho, checks: Vec<CheckRecord>) -> Self {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let failed = count(Status::Fail);
        let summary = Summary {
            total: checks.len(),
            passed: count(Status::Pass),
            failed,
            skipped: count(Status::Skipped),
            overall_pass: failed == 0,
        };
        VerificationReport { schema_version: SCHEMA_VERSION.into(), config, checks, certificate: None, modules: None, summary }
    }

    pub fn overall_pass(&self) -> bool {
        self.summary.overall_pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Plain-text rendering, one line per check.
    pub fn to_human(&self) -> String {
        let c = &self.config;
        let mut out = format!("geometry L_{}({}), checks: {}\n", c.n, c.q, c.checks.join(","));
        for r in &self.checks {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("[{tag}] {:<40} {}\n", r.id, r.statement));
            if r.status == Status::Fail {
                if let Some(w) = &r.witness {
                    out.push_str(&format!("       witness: {}\n", serde_json::to_string(w).unwrap_or_default()));
                }
            }
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{} passed, {} failed, {} skipped: {}\n",
            s.passed,
            s.failed,
            s.skipped,
            if s.overall_pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::int;

    fn echo() -> ConfigEcho {
        ConfigEcho { p: 2, ext_degree: 1, modulus: None, q: 2, n: 2, size_limit: 5000, checks: vec![], inject_fault: false }
    }

    #[test]
    fn empty_report() {
        let r = VerificationReport::new(echo(), vec![]);
        let json = r.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["checks"], serde_json::json!([]));
        assert_eq!(v["schema_version"], "1");
        assert!(r.overall_pass());
    }

    #[test]
    fn statuses_survive_round_trip() {
        let records = vec![
            CheckRecord::run("a", "holds", || Ok(())),
            CheckRecord::run("b", "breaks", || Err(Witness::entry(1, 2, &int(3)).with_ij(0, 2))),
            CheckRecord::skipped("c", "later", "dependency failed"),
        ];
        let r = VerificationReport::new(echo(), records);
        assert!(!r.overall_pass());
        assert_eq!((r.summary.passed, r.summary.failed, r.summary.skipped), (1, 1, 1));
        let back = VerificationReport::from_json(&r.to_json()).unwrap();
        let statuses: Vec<_> = back.checks.iter().map(|c| c.status).collect();
        assert_eq!(statuses, vec![Status::Pass, Status::Fail, Status::Skipped]);
        let w = back.checks[1].witness.as_ref().unwrap();
        assert_eq!((w.i, w.j, w.row, w.col, w.entry.as_deref()), (Some(0), Some(2), Some(1), Some(2), Some("3/1")));
        assert!(r.to_human().contains("[FAIL] b"));
    }
}
