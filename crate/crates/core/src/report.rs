//! Report and table persistence.
//!
//! Every file is written to a temporary sibling and renamed into place, so a
//! failed write never leaves a partial file behind.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::detector::FlickerReport;
use crate::error::{Error, Result};
use crate::palette::{Matrix8, PaletteColor};
use crate::reducer::ReductionReport;
use crate::stochastic::StochasticTables;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    /// `.csv` selects CSV, anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::invalid(
                "report format",
                format!("{s:?} (expected json or csv)"),
            )),
        }
    }
}

/// A report with a flat CSV rendering next to its JSON form.
pub trait TabularReport: Serialize {
    fn csv_header(&self) -> Vec<String>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

impl TabularReport for FlickerReport {
    fn csv_header(&self) -> Vec<String> {
        ["index", "flagged", "total", "ratio"]
            .map(String::from)
            .to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .pairs
            .iter()
            .map(|p| {
                vec![
                    p.index.to_string(),
                    p.flagged.to_string(),
                    p.total.to_string(),
                    p.ratio.to_string(),
                ]
            })
            .collect();
        let flagged: usize = self.pairs.iter().map(|p| p.flagged).sum();
        let total: usize = self.pairs.iter().map(|p| p.total).sum();
        rows.push(vec![
            "aggregate".into(),
            flagged.to_string(),
            total.to_string(),
            self.aggregate_ratio.to_string(),
        ]);
        rows
    }
}

impl TabularReport for ReductionReport {
    fn csv_header(&self) -> Vec<String> {
        vec!["metric".into(), "value".into()]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let kv = |k: &str, v: String| vec![k.to_string(), v];
        vec![
            kv("mode", self.mode.to_string()),
            kv("frames_before", self.frames_before.to_string()),
            kv("frames_after", self.frames_after.to_string()),
            kv("flagged_pairs", self.flagged_pairs.to_string()),
            kv("before_ratio", self.before_ratio.to_string()),
            kv("after_ratio", self.after_ratio.to_string()),
            kv("percent_reduction", self.percent_reduction.to_string()),
            kv("max_step_before", self.max_step_before.to_string()),
            kv("max_step_after", self.max_step_after.to_string()),
        ]
    }
}

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(
    path: &Path,
    write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        write(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(header)?;
        for row in rows {
            csv.write_record(row)?;
        }
        csv.flush()
    })
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    write_atomic(path, |w| {
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")
    })
}

pub fn write_report<R: TabularReport>(report: &R, path: &Path, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(report, path),
        ReportFormat::Csv => write_csv(path, &report.csv_header(), &report.csv_rows()),
    }
}

/// Reads a JSON report written by [`write_report`].
pub fn read_report<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

/// One CSV file of the `tables` export.
#[derive(Debug, Clone, PartialEq)]
pub struct TableDocument {
    pub file_name: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn color_header(corner: &str, extra: &[&str]) -> Vec<String> {
    std::iter::once(corner.to_string())
        .chain(PaletteColor::ALL.iter().map(|c| c.name().to_string()))
        .chain(extra.iter().map(|s| s.to_string()))
        .collect()
}

fn matrix_rows(m: &Matrix8) -> Vec<Vec<String>> {
    PaletteColor::ALL
        .iter()
        .zip(m)
        .map(|(c, row)| {
            std::iter::once(c.name().to_string())
                .chain(row.iter().map(|&v| format_sig6(v)))
                .collect()
        })
        .collect()
}

/// CSV renderings of every stochastic table, six significant digits.
pub fn table_documents(t: &StochasticTables) -> Vec<TableDocument> {
    let mut col_rows = matrix_rows(&t.col_stochastic);
    let sums: Vec<f64> = (0..PaletteColor::ALL.len())
        .map(|j| t.col_stochastic.iter().map(|r| r[j]).sum())
        .collect();
    let stat_rows: [(&str, Vec<f64>); 4] = [
        ("Sum", sums),
        ("Mean", t.col_stats.iter().map(|s| s.mean).collect()),
        ("Variance", t.col_stats.iter().map(|s| s.variance).collect()),
        ("StdDev", t.col_stats.iter().map(|s| s.stddev).collect()),
    ];
    for (name, values) in stat_rows {
        col_rows.push(
            std::iter::once(name.to_string())
                .chain(values.iter().map(|&v| format_sig6(v)))
                .collect(),
        );
    }

    let row_stats_rows = matrix_rows(&t.col_stochastic)
        .into_iter()
        .zip(&t.row_stats)
        .map(|(mut row, s)| {
            row.extend([s.sum, s.mean, s.variance, s.stddev].map(format_sig6));
            row
        })
        .collect();

    vec![
        TableDocument {
            file_name: "distance.csv",
            header: color_header("color", &[]),
            rows: matrix_rows(&t.distance),
        },
        TableDocument {
            file_name: "col_stochastic.csv",
            header: color_header("color", &[]),
            rows: col_rows,
        },
        TableDocument {
            file_name: "z_col.csv",
            header: color_header("color", &[]),
            rows: matrix_rows(&t.z_col),
        },
        TableDocument {
            file_name: "prob_col.csv",
            header: color_header("color", &[]),
            rows: matrix_rows(&t.prob_col),
        },
        TableDocument {
            file_name: "row_stats.csv",
            header: color_header("color", &["Sum", "Mean", "Variance", "StdDev"]),
            rows: row_stats_rows,
        },
        TableDocument {
            file_name: "prob_row.csv",
            header: color_header("color", &[]),
            rows: matrix_rows(&t.prob_row),
        },
    ]
}

/// Writes every [`table_documents`] file into `dir`; returns the paths.
pub fn write_tables(t: &StochasticTables, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    table_documents(t)
        .into_iter()
        .map(|doc| {
            let path = dir.join(doc.file_name);
            write_csv(&path, &doc.header, &doc.rows)?;
            Ok(path)
        })
        .collect()
}
