//! Two-column CSV series (`time, value`) and schema-tagged CSV output.
//!
//! Input files need a header row; lines starting with `#` are skipped.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::laguerre::SampleGrid;
use crate::simbench::functions::{KernelId, KernelSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// First line of every file written by this crate.
pub fn schema_line(kind: &str) -> String {
    format!("# schema: lagdeconv.{kind}.v{SCHEMA_VERSION}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Series {
    pub fn grid(&self) -> Result<SampleGrid> {
        SampleGrid::from_times(self.times.clone())
    }
}

pub fn read_series(path: &Path) -> Result<Series> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_series(&text, &path.display().to_string())
}

/// Parses `time,value` rows; `label` names the source in error messages.
pub fn parse_series(text: &str, label: &str) -> Result<Series> {
    let err = |line: usize, msg: String| Error::Parse { path: label.to_string(), line, msg };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header_len = reader.headers().map_err(|e| err(line_of(&e), e.to_string()))?.len();
    if header_len == 0 {
        return Err(err(1, "empty file: header row required".into()));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| err(line_of(&e), e.to_string()))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() < 2 {
            return Err(err(line, format!("expected 2 columns, found {}", rec.len())));
        }
        let parse = |i: usize| -> Result<f64> {
            let field = &rec[i];
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(line, format!("non-numeric value '{field}' in column {}", i + 1)))
        };
        times.push(parse(0)?);
        values.push(parse(1)?);
    }
    if times.is_empty() {
        return Err(err(1, "empty file: no data rows".into()));
    }
    Ok(Series { times, values })
}

fn line_of(e: &csv::Error) -> usize {
    e.position().map(|p| p.line() as usize).unwrap_or(1)
}

/// Loads a sampled kernel; the horizon is the last time in the file.
pub fn read_kernel(path: &Path, id: KernelId) -> Result<KernelSpec> {
    let s = read_series(path)?;
    let grid = s.grid()?;
    KernelSpec::sampled(id, grid, s.values)
}

/// Writes `rows` under a schema comment and a header row.
pub fn write_csv<P: AsRef<Path>>(path: P, kind: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", schema_line(kind))?;
    {
        let mut w = csv::WriterBuilder::new().from_writer(&mut out);
        w.write_record(header).map_err(csv_io)?;
        for r in rows {
            w.write_record(r).map_err(csv_io)?;
        }
        w.flush()?;
    }
    out.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Shortest representation that round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_series<P: AsRef<Path>>(path: P, kind: &str, value_name: &str, series: &Series) -> Result<()> {
    let rows: Vec<Vec<String>> =
        series.times.iter().zip(&series.values).map(|(t, v)| vec![fmt_f64(*t), fmt_f64(*v)]).collect();
    write_csv(path, kind, &["t", value_name], &rows)
}
