//! Experiment reports and their CSV / JSON encodings.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stats::{z_score, Estimate};
use crate::Result;

/// How a row decides pass or fail.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Check {
    /// `|z| <= max` against the exact value.
    ZScore { max: f64 },
    /// `|estimate - exact| <= tol * |exact|`.
    Relative { tol: f64 },
    /// `|estimate - exact| <= tol`.
    Absolute { tol: f64 },
    /// `estimate >= threshold`.
    AtLeast { threshold: f64 },
    /// `estimate < critical` (for test statistics).
    Below { critical: f64 },
    /// `estimate > min` (for p-values).
    PValue { min: f64 },
    /// Reported for information only.
    Info,
}

impl Check {
    fn describe(&self) -> String {
        match self {
            Check::ZScore { max } => format!("|z|<={max}"),
            Check::Relative { tol } => format!("rel<={tol}"),
            Check::Absolute { tol } => format!("abs<={tol:e}"),
            Check::AtLeast { threshold } => format!(">={threshold}"),
            Check::Below { critical } => format!("<{critical:.6}"),
            Check::PValue { min } => format!("p>{min}"),
            Check::Info => "info".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub exact: Option<f64>,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub z: Option<f64>,
    pub check: Check,
    /// `None` for informational rows.
    pub pass: Option<bool>,
}

impl ReportRow {
    fn build(name: impl Into<String>, exact: Option<f64>, estimate: f64, stderr: Option<f64>, check: Check) -> Self {
        let z = exact.map(|e| z_score(e, estimate, stderr.unwrap_or(0.0)));
        let pass = match (&check, exact) {
            (Check::ZScore { max }, Some(_)) => Some(z.is_some_and(|z| z.abs() <= *max)),
            (Check::Relative { tol }, Some(e)) => Some((estimate - e).abs() <= tol * e.abs()),
            (Check::Absolute { tol }, Some(e)) => Some((estimate - e).abs() <= *tol),
            (Check::AtLeast { threshold }, _) => Some(estimate >= *threshold),
            (Check::Below { critical }, _) => Some(estimate < *critical),
            (Check::PValue { min }, _) => Some(estimate > *min),
            _ => None,
        };
        Self {
            name: name.into(),
            exact,
            estimate,
            stderr,
            z,
            check,
            pass,
        }
    }

    /// A Monte Carlo estimate checked against an exact value within `max` standard errors.
    pub fn z_band(name: impl Into<String>, exact: f64, est: Estimate, max: f64) -> Self {
        Self::build(name, Some(exact), est.mean, Some(est.stderr), Check::ZScore { max })
    }

    pub fn relative(name: impl Into<String>, reference: f64, value: f64, stderr: Option<f64>, tol: f64) -> Self {
        Self::build(name, Some(reference), value, stderr, Check::Relative { tol })
    }

    pub fn absolute(name: impl Into<String>, reference: f64, value: f64, tol: f64) -> Self {
        Self::build(name, Some(reference), value, None, Check::Absolute { tol })
    }

    pub fn at_least(name: impl Into<String>, value: f64, stderr: Option<f64>, threshold: f64) -> Self {
        Self::build(name, None, value, stderr, Check::AtLeast { threshold })
    }

    pub fn below(name: impl Into<String>, statistic: f64, critical: f64) -> Self {
        Self::build(name, None, statistic, None, Check::Below { critical })
    }

    pub fn p_value(name: impl Into<String>, p: f64, min: f64) -> Self {
        Self::build(name, None, p, None, Check::PValue { min })
    }

    pub fn info(name: impl Into<String>, exact: Option<f64>, value: f64, stderr: Option<f64>) -> Self {
        Self::build(name, exact, value, stderr, Check::Info)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub kind: String,
    pub seed: u64,
    pub samples: u64,
    pub batches: u64,
    pub precision_bits: usize,
    pub threads: usize,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    exact: Option<f64>,
    estimate: f64,
    stderr: Option<f64>,
    z: Option<f64>,
    check: String,
    pass: &'static str,
}

impl ExperimentReport {
    /// True iff no checked row failed.
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(CsvRow {
                name: &r.name,
                exact: r.exact,
                estimate: r.estimate,
                stderr: r.stderr,
                z: r.z,
                check: r.check.describe(),
                pass: match r.pass {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "info",
                },
            })
            .map_err(std::io::Error::from)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, out: W, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rows: Vec<ReportRow>) -> ExperimentReport {
        ExperimentReport {
            metadata: ReportMetadata {
                kind: "test".into(),
                seed: 1,
                samples: 10,
                batches: 1,
                precision_bits: 128,
                threads: 1,
                wall_time_seconds: 0.0,
            },
            rows,
        }
    }

    #[test]
    fn checks_decide_pass() {
        let est = Estimate { mean: 1.1, stderr: 0.05 };
        assert_eq!(ReportRow::z_band("a", 1.0, est, 4.0).pass, Some(true));
        assert_eq!(ReportRow::z_band("a", 1.0, Estimate { mean: 1.3, stderr: 0.05 }, 4.0).pass, Some(false));
        assert_eq!(ReportRow::relative("b", 100.0, 104.0, None, 0.05).pass, Some(true));
        assert_eq!(ReportRow::relative("b", 100.0, 94.0, None, 0.05).pass, Some(false));
        assert_eq!(ReportRow::at_least("c", 0.96, None, 0.95).pass, Some(true));
        assert_eq!(ReportRow::below("d", 0.1, 0.05).pass, Some(false));
        assert_eq!(ReportRow::p_value("e", 0.5, 0.001).pass, Some(true));
        assert_eq!(ReportRow::info("f", Some(1.0), 2.0, None).pass, None);
        let zero_se = ReportRow::z_band("g", 6.0, Estimate { mean: 6.0, stderr: 0.0 }, 4.0);
        assert_eq!((zero_se.z, zero_se.pass), (Some(0.0), Some(true)));
    }

    #[test]
    fn exact_rows_have_finite_z() {
        let r = ReportRow::z_band("x", 1.0, Estimate { mean: 2.0, stderr: 0.0 }, 4.0);
        assert!(r.z.unwrap().is_finite());
        assert_eq!(r.pass, Some(false));
    }

    #[test]
    fn csv_and_json() {
        let rpt = report(vec![
            ReportRow::z_band("p", 0.5, Estimate { mean: 0.51, stderr: 0.01 }, 4.0),
            ReportRow::info("note", None, 3.0, None),
        ]);
        let mut buf = Vec::new();
        rpt.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("name,exact,estimate,stderr,z,check,pass"));
        assert!(lines.next().unwrap().starts_with("p,0.5,0.51,0.01,"));
        assert_eq!(lines.next(), Some("note,,3.0,,,info,info"));
        let mut buf = Vec::new();
        rpt.write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0]["name"], "p");
        assert_eq!(v["metadata"]["seed"], 1);
        assert!(rpt.all_pass());
    }
}
