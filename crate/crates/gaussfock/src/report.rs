//! Machine-readable verification reports, JSON schema v1.
//!
//! Every check lands in one [`CheckRecord`]; `paper_anchor` ties the check to
//! the equation or result it exercises ("plumbing" for infrastructure-only
//! checks). The header fields `generated_unix_ms` and `wall_time_ms` are the
//! only run-dependent content; [`VerificationReport::stable_json`] drops them
//! so byte-level comparisons across runs are meaningful.

use serde::{Deserialize, Serialize};

use crate::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub paper_anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckRecord {
    /// Record a residual-style check: passes when residual <= tolerance.
    pub fn residual(
        name: &str,
        anchor: &str,
        lhs: f64,
        rhs: f64,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            lhs,
            rhs,
            residual,
            tolerance,
            pass: residual <= tolerance,
            note: None,
        }
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    /// Downgrade a failing check to an informational one.
    pub fn informational(mut self, note: &str) -> Self {
        self.pass = true;
        self.note = Some(note.to_string());
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub generated_unix_ms: u64,
    pub wall_time_ms: u64,
    pub seed: u64,
    pub config: serde_json::Value,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(seed: u64, config: serde_json::Value, records: Vec<CheckRecord>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let summary = Summary {
            total: records.len(),
            passed,
            failed: records.len() - passed,
        };
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_unix_ms: now,
            wall_time_ms: 0,
            seed,
            config,
            records,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with the run-dependent header fields zeroed, for byte-level
    /// comparison between runs.
    pub fn stable_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.generated_unix_ms = 0;
        copy.wall_time_ms = 0;
        Ok(serde_json::to_string_pretty(&copy)?)
    }

    /// Flat CSV rendering of the records.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,paper_anchor,lhs,rhs,residual,tolerance,pass\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.name, r.paper_anchor, r.lhs, r.rhs, r.residual, r.tolerance, r.pass
            ));
        }
        out
    }
}
