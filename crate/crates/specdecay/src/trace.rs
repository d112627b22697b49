//! CSV serialization of solution traces, decay fits, and bound reports.
//!
//! Values are written with 17 significant digits ({:.16e}), which round-trips
//! f64 exactly; identical inputs therefore produce byte-identical files.
//! Column names are stable: t, norm_h, then norm_sobolev_{beta} and
//! norm_dt_{k} in the order the run requested them.

use crate::analysis::{BoundReport, DecayFit};
use crate::error::{Error, Result};
use crate::evolution::SolutionTrace;
use std::fmt::Write as _;
use std::path::Path;

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render a trace as CSV text.
pub fn trace_to_csv(trace: &SolutionTrace) -> String {
    let mut header = String::from("t,norm_h");
    for (b, _) in &trace.sobolev {
        let _ = write!(header, ",norm_sobolev_{b}");
    }
    for (k, _) in &trace.dt_norms {
        let _ = write!(header, ",norm_dt_{k}");
    }
    let mut out = header;
    out.push('\n');
    let ts = trace.grid.points();
    for i in 0..ts.len() {
        let _ = write!(out, "{},{}", fmt_value(ts[i]), fmt_value(trace.norm_h[i]));
        for (_, col) in &trace.sobolev {
            let _ = write!(out, ",{}", fmt_value(col[i]));
        }
        for (_, col) in &trace.dt_norms {
            let _ = write!(out, ",{}", fmt_value(col[i]));
        }
        out.push('\n');
    }
    out
}

/// Render decay fits as CSV text, one row per fitted column.
pub fn fits_to_csv(fits: &[(String, DecayFit)]) -> String {
    let mut out = String::from("column,model,rate,amplitude,rsquared,window_lo,window_hi\n");
    for (column, fit) in fits {
        let _ = writeln!(
            out,
            "{column},{},{},{},{},{},{}",
            fit.model,
            fmt_value(fit.rate),
            fmt_value(fit.amplitude),
            fmt_value(fit.rsquared),
            fmt_value(fit.window.0),
            fmt_value(fit.window.1),
        );
    }
    out
}

/// Render a bound report as CSV text.
pub fn report_to_csv(report: &BoundReport) -> String {
    let mut out = String::from("inequality,channel,fitted_C,ratio_stability,pass\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.inequality,
            row.channel,
            fmt_value(row.fitted_c),
            fmt_value(row.ratio_stability),
            row.pass,
        );
    }
    out
}

/// Write text to a file, mapping failures to IO errors with the path.
pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Parsed numeric CSV: named columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    columns: Vec<(String, Vec<f64>)>,
}

impl TraceTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// The time column; every trace file has one.
    pub fn time(&self) -> Result<&[f64]> {
        self.column("t")
            .ok_or_else(|| Error::domain("trace file has no t column"))
    }

    /// (t, value) series for a named column, ready for the fit routines.
    pub fn series(&self, name: &str) -> Result<Vec<(f64, f64)>> {
        let t = self.time()?;
        let v = self.column(name).ok_or_else(|| {
            Error::domain(format!(
                "trace file has no column {name}; available: {}",
                self.column_names().join(", ")
            ))
        })?;
        Ok(t.iter().copied().zip(v.iter().copied()).collect())
    }
}

/// Parse CSV text with a header row into numeric columns.
pub fn parse_trace_csv(text: &str) -> Result<TraceTable> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l,
            None => return Err(Error::domain("trace file is empty")),
        }
    };
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    if names.iter().any(|n| n.is_empty()) {
        return Err(Error::domain("trace header has an empty column name"));
    }
    let mut columns: Vec<(String, Vec<f64>)> =
        names.into_iter().map(|n| (n, Vec::new())).collect();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::domain(format!(
                "trace line {}: {} fields, header has {}",
                lineno + 1,
                fields.len(),
                columns.len()
            )));
        }
        for (slot, field) in columns.iter_mut().zip(fields) {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::domain(format!(
                    "trace line {}: cannot parse {field:?} as a number",
                    lineno + 1
                ))
            })?;
            slot.1.push(v);
        }
    }
    if columns[0].1.is_empty() {
        return Err(Error::domain("trace file has a header but no data rows"));
    }
    Ok(TraceTable { columns })
}

/// Read and parse a trace CSV file.
pub fn read_trace_file(path: impl AsRef<Path>) -> Result<TraceTable> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_trace_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{solve_linear, CoefficientVector, InitialData, TimeGrid};
    use crate::spectrum::{DampingParams, SharedSpectrum, Spectrum};
    use std::sync::Arc;

    fn small_trace() -> SolutionTrace {
        let s: SharedSpectrum = Arc::new(Spectrum::from_list(&[0.0, 1.0]).unwrap());
        let data = InitialData::new(
            CoefficientVector::new(s.clone(), vec![1.0, 0.5]).unwrap(),
            CoefficientVector::new(s, vec![0.0, 0.0]).unwrap(),
        )
        .unwrap();
        let params = DampingParams::new(1.0, 2.0).unwrap();
        let grid = TimeGrid::uniform(1.0, 4).unwrap();
        solve_linear(&params, &data, &grid, &[2.0], &[1]).unwrap()
    }

    #[test]
    fn trace_csv_round_trips() {
        let trace = small_trace();
        let text = trace_to_csv(&trace);
        let table = parse_trace_csv(&text).unwrap();
        assert_eq!(
            table.column_names(),
            vec!["t", "norm_h", "norm_sobolev_2", "norm_dt_1"]
        );
        assert_eq!(table.time().unwrap(), trace.grid.points());
        assert_eq!(table.column("norm_h").unwrap(), trace.norm_h.as_slice());
        assert_eq!(
            table.column("norm_dt_1").unwrap(),
            trace.dt_column(1).unwrap()
        );
    }

    #[test]
    fn trace_csv_is_deterministic() {
        let a = trace_to_csv(&small_trace());
        let b = trace_to_csv(&small_trace());
        assert_eq!(a, b);
    }

    #[test]
    fn series_names_missing_columns() {
        let table = parse_trace_csv("t,norm_h\n0,1\n1,0.5\n").unwrap();
        let err = table.series("norm_dt_2").unwrap_err();
        assert!(err.to_string().contains("norm_dt_2"), "{err}");
        assert!(table.series("norm_h").is_ok());
    }

    #[test]
    fn parse_rejects_malformed_rows() {
        assert!(parse_trace_csv("").is_err());
        assert!(parse_trace_csv("t,norm_h\n").is_err());
        assert!(parse_trace_csv("t,norm_h\n0\n").is_err());
        assert!(parse_trace_csv("t,norm_h\n0,abc\n").is_err());
    }

    #[test]
    fn fit_and_report_csv_headers() {
        use crate::analysis::{BoundRow, Channel, DecayFit, FitModel};
        let fits = vec![(
            "norm_h".to_string(),
            DecayFit {
                model: FitModel::Exponential,
                rate: 0.5,
                amplitude: 1.0,
                rsquared: 1.0,
                window: (5.0, 20.0),
            },
        )];
        let text = fits_to_csv(&fits);
        assert!(text.starts_with("column,model,rate,amplitude,rsquared,window_lo,window_hi\n"));
        assert!(text.contains("norm_h,exp,"), "{text}");

        let report = BoundReport {
            rows: vec![BoundRow {
                inequality: "norm_h:large:bounded".to_string(),
                channel: Channel::U0,
                fitted_c: 1.0,
                ratio_stability: 0.0,
                pass: true,
            }],
        };
        let text = report_to_csv(&report);
        assert!(text.starts_with("inequality,channel,fitted_C,ratio_stability,pass\n"));
        assert!(text.contains("norm_h:large:bounded,u0,"), "{text}");
        assert!(text.trim_end().ends_with(",true"), "{text}");
    }
}
