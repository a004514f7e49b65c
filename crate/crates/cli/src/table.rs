//! Result tables and their CSV/JSON renderings.

use oplab_core::format::float17;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Null,
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => float17(*x),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Null, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultTable {
    pub kind: String,
    pub label: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<serde_json::Value>,
}

impl ResultTable {
    pub fn new(kind: &str, label: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            kind: kind.to_string(),
            label: label.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
            document: None,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn document<T: Serialize>(&mut self, doc: &T) {
        self.document = Some(serde_json::to_value(doc).expect("report types serialize"));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub cells: Vec<ResultTable>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(ResultTable::passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Comment lines carry metadata and checks; each cell is a header plus rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {} {}\n", self.metadata.tool, self.metadata.version));
        out.push_str(&format!("# config {}\n", self.metadata.config));
        if let Some(t) = self.metadata.wall_time_seconds {
            out.push_str(&format!("# wall_time_seconds {}\n", float17(t)));
        }
        for (i, cell) in self.cells.iter().enumerate() {
            out.push_str(&format!("# cell {i} {} {}\n", cell.kind, cell.label));
            for c in &cell.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                out.push_str(&format!("# check {} {tag} {}\n", c.name, c.detail));
            }
            if let Some(doc) = &cell.document {
                out.push_str(&format!("# document {doc}\n"));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&cell.columns).expect("in-memory write");
            for row in &cell.rows {
                w.write_record(row.iter().map(Value::csv)).expect("in-memory write");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        }
        out
    }
}
