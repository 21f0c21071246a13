//! Machine-readable verification reports: per-check records with a fixed
//! schema, summary counts, and plot-data emission.

use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// One verification record. `lhs` and `rhs` are stored as [re, im].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub parameters: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
    pub runtime_ms: u64,
}

impl CheckRecord {
    pub fn compare(
        check_id: impl Into<String>,
        parameters: impl Into<String>,
        lhs: C64,
        rhs: C64,
        tolerance: f64,
        runtime_ms: u64,
    ) -> Self {
        let abs_error = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel_error = if scale > 0.0 { abs_error / scale } else { 0.0 };
        let status = if rel_error <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckRecord {
            check_id: check_id.into(),
            parameters: parameters.into(),
            lhs: [lhs.re, lhs.im],
            rhs: [rhs.re, rhs.im],
            abs_error,
            rel_error,
            tolerance,
            status,
            runtime_ms,
        }
    }

    pub fn scalar(
        check_id: impl Into<String>,
        parameters: impl Into<String>,
        observed: f64,
        tolerance: f64,
        runtime_ms: u64,
    ) -> Self {
        let status = if observed <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckRecord {
            check_id: check_id.into(),
            parameters: parameters.into(),
            lhs: [observed, 0.0],
            rhs: [0.0, 0.0],
            abs_error: observed,
            rel_error: observed,
            tolerance,
            status,
            runtime_ms,
        }
    }

    pub fn inconclusive(check_id: impl Into<String>, parameters: impl Into<String>) -> Self {
        CheckRecord {
            check_id: check_id.into(),
            parameters: parameters.into(),
            lhs: [0.0, 0.0],
            rhs: [0.0, 0.0],
            abs_error: f64::NAN,
            rel_error: f64::NAN,
            tolerance: 0.0,
            status: CheckStatus::Inconclusive,
            runtime_ms: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub config_echo: String,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config_echo: String, seed: u64, mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| a.check_id.cmp(&b.check_id).then(a.parameters.cmp(&b.parameters)));
        let mut summary = Summary { total: records.len(), ..Default::default() };
        for r in &records {
            match r.status {
                CheckStatus::Pass => summary.pass += 1,
                CheckStatus::Fail => summary.fail += 1,
                CheckStatus::Inconclusive => summary.inconclusive += 1,
            }
        }
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_echo,
            seed,
            records,
            summary,
        }
    }

    pub fn any_failed(&self) -> bool {
        self.summary.fail > 0
    }

    /// JSON body with runtimes zeroed: byte-identical across reruns with the
    /// same configuration and seed.
    pub fn body_json(&self) -> Result<String> {
        let mut clone = self.clone();
        for r in &mut clone.records {
            r.runtime_ms = 0;
        }
        serde_json::to_string_pretty(&clone).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn full_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn human_summary(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let st = match r.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Inconclusive => "inconclusive",
            };
            s.push_str(&format!(
                "{:<12} {:<40} rel_err {:.3e}  tol {:.1e}  [{}]\n",
                r.check_id, r.parameters, r.rel_error, r.tolerance, st
            ));
        }
        s.push_str(&format!(
            "summary: {} checks, {} pass, {} fail, {} inconclusive\n",
            self.summary.total, self.summary.pass, self.summary.fail, self.summary.inconclusive
        ));
        s
    }

    /// Emit (parameter, lhs, rhs, error) rows for one check id as a
    /// comma-separated table.
    pub fn emit_plot_data(&self, check_id: &str, out: &mut dyn Write) -> Result<usize> {
        let rows: Vec<&CheckRecord> = self.records.iter().filter(|r| r.check_id == check_id).collect();
        if rows.is_empty() {
            return Err(Error::config(format!("no records for check id {check_id}")));
        }
        writeln!(out, "parameter,lhs_re,lhs_im,rhs_re,rhs_im,error")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.parameters, r.lhs[0], r.lhs[1], r.rhs[0], r.rhs[1], r.abs_error
            )?;
        }
        Ok(rows.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_folds_statuses() {
        let records = vec![
            CheckRecord::compare("a", "p1", C64::new(1.0, 0.0), C64::new(1.0, 0.0), 1e-6, 3),
            CheckRecord::compare("b", "p2", C64::new(1.0, 0.0), C64::new(2.0, 0.0), 1e-6, 4),
            CheckRecord::inconclusive("c", "p3"),
        ];
        let rep = Report::new("cfg".into(), 7, records);
        assert_eq!(rep.summary.total, 3);
        assert_eq!(rep.summary.pass, 1);
        assert_eq!(rep.summary.fail, 1);
        assert_eq!(rep.summary.inconclusive, 1);
        assert!(rep.any_failed());
    }

    #[test]
    fn body_ignores_runtimes() {
        let mk = |ms| {
            Report::new(
                "cfg".into(),
                7,
                vec![CheckRecord::compare("a", "p", C64::new(1.0, 0.0), C64::new(1.0, 0.0), 1e-6, ms)],
            )
        };
        assert_eq!(mk(3).body_json().unwrap(), mk(9999).body_json().unwrap());
    }

    #[test]
    fn plot_rows() {
        let records = vec![
            CheckRecord::compare("grid", "b=0.5", C64::new(1.0, 0.0), C64::new(1.0, 0.0), 1e-3, 0),
            CheckRecord::compare("grid", "b=1", C64::new(2.0, 0.0), C64::new(2.0, 0.0), 1e-3, 0),
        ];
        let rep = Report::new("cfg".into(), 1, records);
        let mut buf = Vec::new();
        let n = rep.emit_plot_data("grid", &mut buf).unwrap();
        assert_eq!(n, 2);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().count() == 3);
        assert!(rep.emit_plot_data("missing", &mut Vec::new()).is_err());
    }
}
