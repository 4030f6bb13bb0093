//! Result rows and their CSV / JSON-lines encodings.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::scenario::Check;

pub const HEADER: [&str; 10] = [
    "scenario", "check", "T", "pair", "p_fwd", "p_rev", "lhs_log", "rhs_log", "residual", "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    /// Autonomous evolution with no tolerance configured: the residual is a
    /// measurement, not a verdict.
    #[serde(rename = "approx")]
    Approx,
    /// Check not applicable to this pair, or the ratio is vacuous.
    #[serde(rename = "NA")]
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Approx => "approx",
            Status::NotApplicable => "NA",
        }
    }

    pub fn verdict(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub scenario: String,
    pub check: Check,
    #[serde(rename = "T")]
    pub temperature: f64,
    pub pair: String,
    pub p_fwd: Option<f64>,
    pub p_rev: Option<f64>,
    pub lhs_log: Option<f64>,
    pub rhs_log: Option<f64>,
    pub residual: Option<f64>,
    pub status: Status,
}

impl ReportRow {
    /// Row with every numeric column missing.
    pub fn not_applicable(scenario: &str, check: Check, temperature: f64, pair: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            check,
            temperature,
            pair: pair.to_string(),
            p_fwd: None,
            p_rev: None,
            lhs_log: None,
            rhs_log: None,
            residual: None,
            status: Status::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), float)
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.check.to_string(),
            float(r.temperature),
            r.pair.clone(),
            opt(r.p_fwd),
            opt(r.p_rev),
            opt(r.lhs_log),
            opt(r.rhs_log),
            opt(r.residual),
            r.status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(rows: &[ReportRow], mut out: W) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[ReportRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Jsonl => write_jsonl(rows, out),
    }
}

pub fn any_failed(rows: &[ReportRow]) -> bool {
    rows.iter().any(|r| r.status == Status::Fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ReportRow {
        ReportRow {
            p_fwd: Some(0.25),
            residual: Some(1e-17),
            status: Status::Pass,
            ..ReportRow::not_applicable("s", Check::Crooks, 0.2, "a,b")
        }
    }

    #[test]
    fn csv_formats_floats_and_missing_values() {
        let mut buf = Vec::new();
        write_csv(&[row()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "s,crooks,2.0000000000000001e-1,\"a,b\",2.5000000000000000e-1,NA,NA,NA,1.0000000000000001e-17,pass"
        );
    }

    #[test]
    fn header_only_when_empty() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{}\n", HEADER.join(","))
        );
    }

    #[test]
    fn jsonl_uses_null_for_missing() {
        let mut buf = Vec::new();
        write_jsonl(&[row()], &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["T"], 0.2);
        assert_eq!(v["check"], "crooks");
        assert!(v["p_rev"].is_null());
        assert_eq!(v["status"], "pass");
    }
}
