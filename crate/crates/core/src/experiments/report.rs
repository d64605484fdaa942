//! Structured experiment results.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Every report carries this note: the thresholds are empirical.
pub const TOLERANCE_NOTE: &str = "tolerance: calibrated, not theoretical";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparator {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Lt => value < threshold,
            Comparator::Le => value <= threshold,
            Comparator::Gt => value > threshold,
            Comparator::Ge => value >= threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub comparator: Comparator,
    pub value: f64,
}

/// A small numeric table written next to the report as CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: serde_json::Value,
    pub statistics: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, Threshold>,
    pub verdicts: BTreeMap<String, bool>,
    pub seeds: Vec<u64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub tables: BTreeMap<String, Table>,
}

impl ExperimentReport {
    pub fn new<P: Serialize>(name: &str, params: &P, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            params: serde_json::to_value(params).unwrap_or(serde_json::Value::Null),
            statistics: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            seeds: vec![seed],
            notes: vec![TOLERANCE_NOTE.to_string()],
            tables: BTreeMap::new(),
        }
    }

    /// Records a statistic without a pass/fail criterion. Non-finite values
    /// are stored as `f64::MAX` with the sign kept, since JSON has no NaN.
    pub fn stat(&mut self, key: &str, value: f64) {
        let v = if value.is_finite() {
            value
        } else if value.is_nan() {
            f64::MAX
        } else {
            value.signum() * f64::MAX
        };
        self.statistics.insert(key.to_string(), v);
    }

    /// Records a statistic together with its criterion and verdict.
    pub fn check(&mut self, key: &str, value: f64, comparator: Comparator, threshold: f64) -> bool {
        self.stat(key, value);
        let ok = value.is_finite() && comparator.holds(value, threshold);
        self.thresholds.insert(key.to_string(), Threshold { comparator, value: threshold });
        self.verdicts.insert(key.to_string(), ok);
        ok
    }

    /// Records a boolean criterion as the statistic 1 or 0 with threshold `>= 1`.
    pub fn check_flag(&mut self, key: &str, ok: bool) -> bool {
        self.check(key, if ok { 1.0 } else { 0.0 }, Comparator::Ge, 1.0)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| *v)
    }

    /// True when every verdict is what its statistic and threshold imply.
    pub fn is_consistent(&self) -> bool {
        self.thresholds.iter().all(|(k, t)| {
            let Some(&s) = self.statistics.get(k) else { return false };
            self.verdicts.get(k) == Some(&(s.is_finite() && s != f64::MAX && t.comparator.holds(s, t.value)))
        }) && self.verdicts.keys().all(|k| self.thresholds.contains_key(k))
    }

    /// One line per verdict: `PASS name/key: value cmp threshold`.
    pub fn summary_lines(&self) -> Vec<String> {
        self.verdicts
            .iter()
            .map(|(k, ok)| {
                let t = self.thresholds[k];
                let cmp = serde_json::to_value(t.comparator).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
                format!("{} {}/{}: {} {} {}", if *ok { "PASS" } else { "FAIL" }, self.name, k, fmt_stat(self.statistics[k]), cmp, fmt_stat(t.value))
            })
            .collect()
    }
}

fn fmt_stat(v: f64) -> String {
    let a = v.abs();
    if a == f64::MAX || !v.is_finite() {
        "non-finite".into()
    } else if a == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v:.6}")
    } else {
        format!("{v:.6e}")
    }
}
