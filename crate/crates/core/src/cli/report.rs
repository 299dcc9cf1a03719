//! The `qwick-report/1` file format.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::qtensor::{Residual, Scalar};

const SCHEMA: &str = "qwick-report/1";

pub fn report_schema_version() -> &'static str {
    SCHEMA
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub dim: usize,
    pub q: String,
    pub mode: String,
    pub max_n: usize,
    pub max_k: usize,
    pub truncation: usize,
    pub seed: u64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub inputs_digest: String,
    pub residual: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<serde_json::Value>,
}

impl Case {
    /// A case whose inputs are described by `inputs`; the digest is the
    /// SHA-256 of that description.
    pub fn new(name: impl Into<String>, inputs: &str, residual: impl Into<String>, passed: bool) -> Self {
        Case {
            name: name.into(),
            inputs_digest: digest(inputs),
            residual: residual.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            value: None,
        }
    }

    /// A case judged by an identity residual.
    pub fn from_residual<S: Scalar>(name: impl Into<String>, inputs: &str, r: &Residual, tol: f64) -> Self {
        let passed = if S::is_exact() { r.exact_zero } else { r.within(tol) };
        Case::new(name, inputs, format_residual::<S>(r), passed)
    }

    pub fn with_value(mut self, value: serde_json::Value) -> Self {
        self.value = Some(value);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// `"0"` for an exact zero; otherwise the largest difference.
pub fn format_residual<S: Scalar>(r: &Residual) -> String {
    if r.exact_zero {
        "0".into()
    } else if S::is_exact() {
        format!("nonzero (max coefficient {:e})", r.max)
    } else {
        format!("{:.3e}", r.max)
    }
}

pub fn digest(inputs: &str) -> String {
    hex::encode(Sha256::digest(inputs.as_bytes()))
}

/// Rows of floats with named columns, also written as CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<Case>,
    #[serde(default)]
    pub notes: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub suite: String,
    pub params: Params,
    pub cases: Vec<Case>,
    #[serde(default)]
    pub tables: Vec<Table>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: &str, params: Params, cases: Vec<Case>, tables: Vec<Table>, notes: BTreeMap<String, serde_json::Value>) -> Self {
        let passed = cases.iter().filter(|c| c.passed()).count();
        let first_failure = cases.iter().find(|c| !c.passed()).cloned();
        let summary = Summary { total: cases.len(), passed, failed: cases.len() - passed, first_failure, notes };
        Report { schema: SCHEMA.into(), suite: suite.into(), params, cases, tables, summary }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Report(e.to_string()))
    }

    /// Write `<dir>/<suite>.json` and one CSV per table; returns the paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(io_error)?;
        let json = dir.join(format!("{}.json", self.suite));
        fs::write(&json, self.to_json()? + "\n").map_err(io_error)?;
        let mut paths = vec![json];
        for table in &self.tables {
            let path = dir.join(format!("{}-{}.csv", self.suite, table.name));
            let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Report(e.to_string()))?;
            w.write_record(&table.columns).map_err(|e| Error::Report(e.to_string()))?;
            for row in &table.rows {
                w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| Error::Report(e.to_string()))?;
            }
            w.flush().map_err(io_error)?;
            paths.push(path);
        }
        Ok(paths)
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::Report(e.to_string())
}

/// Parse a report and check it against the schema.
pub fn validate_report(text: &str) -> Result<Report> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))?;
    match raw.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        Some(other) => return Err(Error::Report(format!("unknown schema {other:?}"))),
        None => return Err(Error::Report("missing schema field".into())),
    }
    let report: Report = serde_json::from_value(raw).map_err(|e| Error::Report(e.to_string()))?;
    let passed = report.cases.iter().filter(|c| c.passed()).count();
    let s = &report.summary;
    if s.total != report.cases.len() || s.passed != passed || s.failed != s.total - passed {
        return Err(Error::Report("summary counts disagree with the cases".into()));
    }
    for case in &report.cases {
        if case.inputs_digest.len() != 64 || !case.inputs_digest.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Report(format!("case {} has a malformed digest", case.name)));
        }
    }
    for t in &report.tables {
        if t.rows.iter().any(|r| r.len() != t.columns.len()) {
            return Err(Error::Report(format!("table {} has ragged rows", t.name)));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtensor::QPoly;

    fn params() -> Params {
        Params { dim: 2, q: "q".into(), mode: "exact".into(), max_n: 1, max_k: 1, truncation: 2, seed: 0, tolerance: 1e-10 }
    }

    fn sample() -> Report {
        let cases = vec![
            Case::from_residual::<QPoly>("a", "a", &Residual::new(), 0.0),
            Case::new("b", "b", "1", false),
        ];
        let table = Table { name: "t".into(), columns: vec!["x".into()], rows: vec![vec![1.5]] };
        Report::new("identities", params(), cases, vec![table], BTreeMap::new())
    }

    #[test]
    fn schema_constant() {
        assert_eq!(report_schema_version(), "qwick-report/1");
    }

    #[test]
    fn round_trip() {
        let r = sample();
        assert_eq!(r.summary.failed, 1);
        assert_eq!(r.summary.first_failure.as_ref().unwrap().name, "b");
        let back = validate_report(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejects_unknown_schema() {
        let text = sample().to_json().unwrap().replace("qwick-report/1", "qwick-report/2");
        assert!(validate_report(&text).is_err());
        assert!(validate_report("{}").is_err());
    }

    #[test]
    fn rejects_inconsistent_summary() {
        let mut r = sample();
        r.summary.passed = 2;
        assert!(validate_report(&r.to_json().unwrap()).is_err());
    }

    #[test]
    fn writes_json_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let paths = sample().write(dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        let csv = fs::read_to_string(&paths[1]).unwrap();
        assert_eq!(csv, "x\n1.5\n");
    }
}
