//! Verification reports: per-check records plus aggregates recomputable
//! from them.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::TrialConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// How `value` is compared with `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `value ≤ bound + tol`.
    Le,
    /// `|value − bound| ≤ tol`.
    Eq,
}

/// One checked inequality or identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    pub check: String,
    pub family: String,
    pub k: usize,
    pub alpha: [f64; 2],
    pub c: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    /// The measured quantity; `None` when the input is zero.
    pub ratio_sq: Option<f64>,
    pub bound_sq: f64,
    pub relation: Relation,
    pub tol: f64,
    pub residual: f64,
    pub residual_tol: f64,
    pub satisfied: bool,
}

impl Record {
    /// `satisfied` as implied by the other fields.
    pub fn recompute(&self) -> bool {
        let value_ok = match self.ratio_sq {
            None => true,
            Some(v) => match self.relation {
                Relation::Le => v <= self.bound_sq + self.tol,
                Relation::Eq => (v - self.bound_sq).abs() <= self.tol,
            },
        };
        value_ok && self.residual <= self.residual_tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub label: String,
    pub value: f64,
    pub satisfied: bool,
}

/// Measured `‖T‖` at `c = 0` against each candidate constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNormRow {
    pub family: String,
    pub k: usize,
    pub band: usize,
    pub degree: usize,
    pub sampled: f64,
    pub exact: f64,
    pub candidates: Vec<CandidateRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub count: usize,
    pub violations: usize,
    pub max_ratio_sq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub records: usize,
    pub violations: usize,
    pub max_residual: f64,
    pub checks: Vec<CheckSummary>,
    pub op_norms: Vec<OpNormRow>,
    /// Findings that are reported but not counted as violations.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: TrialConfig,
    pub records: Vec<Record>,
    pub aggregates: Aggregates,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

impl Aggregates {
    pub fn from_records(records: &[Record], op_norms: Vec<OpNormRow>, notes: Vec<String>) -> Self {
        let mut checks: Vec<CheckSummary> = Vec::new();
        for r in records {
            let slot = match checks.iter().position(|c| c.check == r.check) {
                Some(i) => &mut checks[i],
                None => {
                    checks.push(CheckSummary {
                        check: r.check.clone(),
                        count: 0,
                        violations: 0,
                        max_ratio_sq: None,
                    });
                    checks.last_mut().expect("just pushed")
                }
            };
            slot.count += 1;
            slot.violations += usize::from(!r.satisfied);
            if let Some(v) = r.ratio_sq {
                slot.max_ratio_sq = Some(slot.max_ratio_sq.map_or(v, |m| m.max(v)));
            }
        }
        Aggregates {
            records: records.len(),
            violations: records.iter().filter(|r| !r.satisfied).count(),
            max_residual: records.iter().map(|r| r.residual).fold(0.0, f64::max),
            checks,
            op_norms,
            notes,
        }
    }
}

impl Report {
    pub fn new(config: TrialConfig, records: Vec<Record>, op_norms: Vec<OpNormRow>, notes: Vec<String>) -> Self {
        let aggregates = Aggregates::from_records(&records, op_norms, notes);
        Report {
            version: VERSION.to_string(),
            config,
            records,
            aggregates,
            wall_time_s: None,
        }
    }

    pub fn violations(&self) -> usize {
        self.aggregates.violations
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Usage(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("report: {e}")))
    }

    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// One row per record.
    pub fn write_csv(&self, w: impl Write) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Row<'a> {
            index: usize,
            check: &'a str,
            family: &'a str,
            k: usize,
            alpha_re: f64,
            alpha_im: f64,
            c_re: f64,
            c_im: f64,
            lambda: Option<f64>,
            ratio_sq: Option<f64>,
            bound_sq: f64,
            relation: Relation,
            tol: f64,
            residual: f64,
            residual_tol: f64,
            satisfied: bool,
        }
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(Row {
                index: r.index,
                check: &r.check,
                family: &r.family,
                k: r.k,
                alpha_re: r.alpha[0],
                alpha_im: r.alpha[1],
                c_re: r.c[0],
                c_im: r.c[1],
                lambda: r.lambda,
                ratio_sq: r.ratio_sq,
                bound_sq: r.bound_sq,
                relation: r.relation,
                tol: r.tol,
                residual: r.residual,
                residual_tol: r.residual_tol,
                satisfied: r.satisfied,
            })
            .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;

    fn record(i: usize, v: f64, satisfied: bool) -> Record {
        Record {
            index: i,
            check: "bound".into(),
            family: "dk".into(),
            k: 1,
            alpha: [1.0, 0.0],
            c: [0.1 + 0.2, 0.0],
            lambda: None,
            ratio_sq: Some(v),
            bound_sq: 0.5,
            relation: Relation::Le,
            tol: 1e-6,
            residual: 1e-15,
            residual_tol: 1e-8,
            satisfied,
        }
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let recs = vec![record(0, 0.1 + 0.2, true), record(1, 0.7, false), record(2, 1.0 / 3.0, true)];
        let r = Report::new(TrialConfig::defaults(Suite::RandomBounds), recs, vec![], vec!["note".into()]);
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), r.to_json().unwrap());
        assert_eq!(r.violations(), 1);
        assert_eq!(r.aggregates.checks[0].max_ratio_sq, Some(0.7));
        for rec in &r.records {
            assert_eq!(rec.recompute(), rec.satisfied);
        }
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let r = Report::new(TrialConfig::defaults(Suite::RandomBounds), vec![record(0, 0.25, true)], vec![], vec![]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("index,check,family"));
    }
}
