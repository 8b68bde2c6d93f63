//! Deterministic CSV and JSON export. Decimal values carry 17 significant
//! digits, so re-importing reproduces every f64 bit for bit.

use std::fs;
use std::path::Path;

use crate::{Error, Result};

use super::compare::ComparisonReport;

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Samples as CSV: a header row, then one row per replica.
pub fn render_samples_csv(samples: &[f64]) -> String {
    let mut out = String::from("replica,value\n");
    for (i, v) in samples.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt17(*v)));
    }
    out
}

pub fn write_samples_csv(samples: &[f64], path: &Path) -> Result<()> {
    fs::write(path, render_samples_csv(samples)).map_err(io_err(path))
}

/// Read back a samples CSV written by [`write_samples_csv`].
pub fn read_samples_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("replica,value") => {}
        other => return Err(Error::Format(format!("bad samples header: {other:?}"))),
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let (idx, value) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("line {}: missing comma", lineno + 2)))?;
        let _: u64 = idx
            .parse()
            .map_err(|_| Error::Format(format!("line {}: bad index", lineno + 2)))?;
        out.push(
            value
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("line {}: bad value", lineno + 2)))?,
        );
    }
    Ok(out)
}

/// Report as CSV: typed rows sharing one header, one row per grid point,
/// distance, or verdict. The `record` column names the row type.
pub fn render_report_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(
        "record,name,point,empirical_re,empirical_im,theory_re,theory_im,se_re,se_im,statistic,p_value,n_left,n_right,passed,observed,requirement\n",
    );
    for g in &report.transform_grids {
        out.push_str(&format!(
            "grid,,{},{},{},{},{},{},{},,,,,,,\n",
            fmt17(g.point),
            fmt17(g.empirical_re),
            fmt17(g.empirical_im),
            fmt17(g.theory_re),
            fmt17(g.theory_im),
            fmt17(g.std_error_re),
            fmt17(g.std_error_im),
        ));
    }
    for d in &report.distances {
        out.push_str(&format!(
            "distance,{},,,,,,,,{},{},{},{},,,\n",
            d.name,
            fmt17(d.statistic),
            fmt17(d.p_value),
            d.n_left,
            d.n_right,
        ));
    }
    for v in &report.verdicts {
        out.push_str(&format!(
            "verdict,{},,,,,,,,,,,,{},{},\"{}\"\n",
            v.name,
            v.passed,
            fmt17(v.observed),
            v.requirement.replace('"', "'"),
        ));
    }
    out
}

pub fn write_report_csv(report: &ComparisonReport, path: &Path) -> Result<()> {
    fs::write(path, render_report_csv(report)).map_err(io_err(path))
}

pub fn write_report_json(report: &ComparisonReport, path: &Path) -> Result<()> {
    let mut text = report.to_json();
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}
