use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::Result;

/// One measured quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Flag(bool),
    Text(String),
}

impl Value {
    /// CSV cell. Reals carry 12 significant digits.
    pub fn to_cell(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Real(x) => format!("{x:.11e}"),
            Value::Flag(b) => b.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Flag(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// Aligned with [`ReportDocument::columns`].
    pub values: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMean {
    pub column: String,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    /// Records whose `pass` column is false; absent without a `pass` column.
    pub violations: Option<usize>,
    pub min_slack: Option<f64>,
    pub means: Vec<ColumnMean>,
}

impl Summary {
    pub fn compute(columns: &[String], records: &[TrialRecord]) -> Self {
        let col = |name: &str| columns.iter().position(|c| c == name);
        let violations = col("pass").map(|i| {
            records
                .iter()
                .filter(|r| matches!(r.values.get(i), Some(Value::Flag(false))))
                .count()
        });
        let min_slack = col("slack").and_then(|i| {
            records
                .iter()
                .filter_map(|r| r.values.get(i).and_then(Value::as_f64))
                .reduce(f64::min)
        });
        let means = if records.is_empty() {
            Vec::new()
        } else {
            columns
                .iter()
                .enumerate()
                .filter(|(i, _)| matches!(records[0].values.get(*i), Some(Value::Real(_))))
                .map(|(i, name)| {
                    let sum: f64 = records.iter().filter_map(|r| r.values[i].as_f64()).sum();
                    ColumnMean {
                        column: name.clone(),
                        mean: sum / records.len() as f64,
                    }
                })
                .collect()
        };
        Self {
            trials: records.len(),
            violations,
            min_slack,
            means,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn new(config: ExperimentConfig, columns: &[&str], records: Vec<TrialRecord>) -> Self {
        let columns: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
        let summary = Summary::compute(&columns, &records);
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            columns,
            records,
            summary,
            notes: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.records.iter().map(|r| &r.values[i]).collect())
    }

    pub fn reals(&self, name: &str) -> Vec<f64> {
        self.column(name)
            .unwrap_or_default()
            .into_iter()
            .filter_map(Value::as_f64)
            .collect()
    }
}

/// CSV has a `trial,seed` prefix and never includes durations; JSON includes
/// them only when the config asks for timings.
pub fn serialize_report(doc: &ReportDocument, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header = ["trial", "seed"]
                .into_iter()
                .map(String::from)
                .chain(doc.columns.iter().cloned());
            w.write_record(header)?;
            for r in &doc.records {
                let row = [r.trial.to_string(), r.seed.to_string()]
                    .into_iter()
                    .chain(r.values.iter().map(Value::to_cell));
                w.write_record(row)?;
            }
            w.into_inner().map_err(|e| csv::Error::from(e.into_error()).into())
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&stripped(doc))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn stripped(doc: &ReportDocument) -> std::borrow::Cow<'_, ReportDocument> {
    if doc.config.timings {
        return std::borrow::Cow::Borrowed(doc);
    }
    let mut d = doc.clone();
    d.records.iter_mut().for_each(|r| r.duration_ms = None);
    std::borrow::Cow::Owned(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(records: Vec<TrialRecord>) -> ReportDocument {
        ReportDocument::new(ExperimentConfig::default(), &["x", "slack", "pass"], records)
    }

    fn rec(trial: usize, x: f64, slack: f64, pass: bool) -> TrialRecord {
        TrialRecord {
            trial,
            seed: 7,
            values: vec![x.into(), slack.into(), pass.into()],
            duration_ms: Some(1.5),
        }
    }

    #[test]
    fn empty_document_is_header_only_csv() {
        let bytes = serialize_report(&doc(vec![]), Format::Csv).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "trial,seed,x,slack,pass\n");
    }

    #[test]
    fn csv_uses_twelve_significant_digits_and_drops_durations() {
        let bytes = serialize_report(&doc(vec![rec(0, 1.0 / 3.0, -0.5, false)]), Format::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "0,7,3.33333333333e-1,-5.00000000000e-1,false");
    }

    #[test]
    fn json_round_trips() {
        let d = doc(vec![rec(0, 0.1, 0.2, true), rec(1, 0.3, -0.1, false)]);
        let back: ReportDocument =
            serde_json::from_slice(&serialize_report(&d, Format::Json).unwrap()).unwrap();
        let mut expected = d.clone();
        expected.records.iter_mut().for_each(|r| r.duration_ms = None);
        assert_eq!(back, expected);
    }

    #[test]
    fn summary_counts_violations_and_min_slack() {
        let d = doc(vec![rec(0, 1.0, 0.2, true), rec(1, 3.0, -0.1, false)]);
        assert_eq!(d.summary.violations, Some(1));
        assert_eq!(d.summary.min_slack, Some(-0.1));
        assert_eq!(d.summary.means[0].mean, 2.0);
    }
}
