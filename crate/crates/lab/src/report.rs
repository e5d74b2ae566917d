//! Reproduction tables.

use std::io::{self, Write};

use crate::config::{Check, Expectation};

/// One checked quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub quantity: String,
    pub computed: Option<f64>,
    pub reference: Option<f64>,
    pub relative_error: Option<f64>,
    /// Pass criterion in words, e.g. `rel <= 1e-2`.
    pub tolerance: String,
    pub pass: bool,
    pub locus: String,
    pub note: String,
}

impl ReportRow {
    pub fn checked(expectation: &Expectation, computed: f64) -> Self {
        Self::from_check(
            &expectation.quantity,
            computed,
            expectation.check,
            &expectation.locus,
        )
    }

    pub fn from_check(quantity: &str, computed: f64, check: Check, locus: &str) -> Self {
        let reference = check.reference();
        let relative_error = match check {
            Check::Near { .. } | Check::Equals(_) if reference != 0.0 => {
                Some(((computed - reference) / reference).abs())
            }
            Check::Near { .. } | Check::Equals(_) => Some((computed - reference).abs()),
            Check::Below(_) | Check::Above(_) => None,
        };
        Self {
            quantity: quantity.to_string(),
            computed: Some(computed),
            reference: Some(reference),
            relative_error,
            tolerance: check.describe(),
            pass: check.passes(computed),
            locus: locus.to_string(),
            note: String::new(),
        }
    }

    /// A row for an operation that produced no value.
    pub fn failed(quantity: &str, tolerance: &str, locus: &str, note: impl Into<String>) -> Self {
        Self {
            quantity: quantity.to_string(),
            computed: None,
            reference: None,
            relative_error: None,
            tolerance: tolerance.to_string(),
            pass: false,
            locus: locus.to_string(),
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub scenario: String,
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ReportRow>,
}

const HEADER: [&str; 8] = [
    "quantity",
    "computed",
    "reference",
    "relative_error",
    "tolerance",
    "status",
    "locus",
    "note",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_else(|| "-".into())
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

impl ComparisonReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            metadata: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    fn record(row: &ReportRow) -> [String; 8] {
        [
            row.quantity.clone(),
            fmt_opt(row.computed),
            fmt_opt(row.reference),
            fmt_opt(row.relative_error),
            row.tolerance.clone(),
            status(row.pass).into(),
            row.locus.clone(),
            row.note.clone(),
        ]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# scenario: {}", self.scenario)?;
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(HEADER).map_err(csv_error)?;
        for row in &self.rows {
            out.write_record(Self::record(row)).map_err(csv_error)?;
        }
        out.flush()
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "scenario: {}", self.scenario)?;
        for (k, v) in &self.metadata {
            writeln!(w, "  {k}: {v}")?;
        }
        write_table(&mut w, self.rows.iter().map(|r| (None, r)))?;
        writeln!(
            w,
            "{} rows, {} passed, {} failed",
            self.rows.len(),
            self.rows.len() - self.failures(),
            self.failures()
        )
    }
}

/// Plain-text table; `scenario` adds a leading column when present.
fn write_table<'a, W: Write>(
    w: &mut W,
    rows: impl Iterator<Item = (Option<&'a str>, &'a ReportRow)>,
) -> io::Result<()> {
    let rows: Vec<_> = rows.collect();
    let with_scenario = rows.iter().any(|(s, _)| s.is_some());
    let mut lines: Vec<Vec<String>> = Vec::with_capacity(rows.len() + 1);
    let mut header: Vec<String> = Vec::new();
    if with_scenario {
        header.push("scenario".into());
    }
    header.extend(HEADER.iter().map(|s| s.to_string()));
    lines.push(header);
    for (scenario, row) in &rows {
        let mut line = Vec::new();
        if with_scenario {
            line.push(scenario.unwrap_or("").to_string());
        }
        line.extend(ComparisonReport::record(row));
        lines.push(line);
    }
    let cols = lines[0].len();
    // The note column is left unpadded.
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            lines
                .iter()
                .map(|l| l[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for line in &lines {
        let mut text = String::new();
        for (c, cell) in line.iter().enumerate() {
            if c + 1 == cols {
                text.push_str(cell);
            } else {
                text.push_str(&format!("{cell:<width$}  ", width = widths[c]));
            }
        }
        writeln!(w, "{}", text.trim_end())?;
    }
    Ok(())
}

/// Rows of several scenarios in one table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AggregateReport {
    pub reports: Vec<ComparisonReport>,
}

impl AggregateReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(ComparisonReport::all_pass)
    }

    pub fn rows(&self) -> usize {
        self.reports.iter().map(|r| r.rows.len()).sum()
    }

    pub fn failures(&self) -> usize {
        self.reports.iter().map(ComparisonReport::failures).sum()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["scenario"];
        header.extend(HEADER);
        out.write_record(header).map_err(csv_error)?;
        for report in &self.reports {
            for row in &report.rows {
                let mut record = vec![report.scenario.clone()];
                record.extend(ComparisonReport::record(row));
                out.write_record(record).map_err(csv_error)?;
            }
        }
        out.flush()
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        write_table(
            &mut w,
            self.reports.iter().flat_map(|r| {
                r.rows
                    .iter()
                    .map(move |row| (Some(r.scenario.as_str()), row))
            }),
        )?;
        writeln!(
            w,
            "{} scenarios, {} rows, {} failed",
            self.reports.len(),
            self.rows(),
            self.failures()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_rendering() {
        let mut report = ComparisonReport::new("demo");
        report.metadata.push(("model".into(), "riccati".into()));
        let check = Check::Near {
            value: 1.274,
            tol: 1e-3,
            relative: false,
        };
        report.rows.push(ReportRow::from_check(
            "radius",
            1.2736,
            check,
            "radius, Y0 = 0",
        ));
        report.rows.push(ReportRow::failed(
            "x_over",
            "rel <= 1e-2",
            "endpoint",
            "root, not bracketed",
        ));
        assert!(report.rows[0].pass);
        assert!(!report.all_pass());
        assert_eq!(report.failures(), 1);

        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("# scenario: demo\n# model: riccati\nquantity,computed"));
        assert!(csv.contains("\"radius, Y0 = 0\""));
        assert!(csv.contains("\"root, not bracketed\""));

        let mut text = Vec::new();
        report.write_text(&mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert!(text.contains("PASS") && text.contains("FAIL"));
        assert!(text.ends_with("2 rows, 1 passed, 1 failed\n"));
    }
}
