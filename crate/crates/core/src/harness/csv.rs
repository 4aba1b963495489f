//! Benchmark results as CSV, one row per timed repetition.

use std::io::{Read, Write};

use super::runner::{BenchResult, Verified};
use crate::{Error, Result};

pub const HEADER: [&str; 10] =
    ["kernel", "variant", "n", "extra", "workers", "rep", "seconds", "mflops", "verified", "max_rel_err"];

/// A parsed CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub kernel: String,
    pub variant: String,
    pub n: usize,
    pub extra: String,
    pub workers: usize,
    /// 1-based.
    pub rep: usize,
    pub seconds: f64,
    pub mflops: f64,
    pub verified: Verified,
    pub max_rel_err: Option<f64>,
}

impl CsvRow {
    /// The rows describing `r`, one per repetition.
    pub fn from_result(r: &BenchResult) -> Vec<CsvRow> {
        (0..r.times.len())
            .map(|k| CsvRow {
                kernel: r.case.kernel.to_string(),
                variant: r.case.variant.to_string(),
                n: r.case.n,
                extra: r.case.extra(),
                workers: r.case.workers,
                rep: k + 1,
                seconds: r.times[k],
                mflops: r.mflops_at(k),
                verified: r.verified,
                max_rel_err: r.max_rel_err,
            })
            .collect()
    }

    fn fields(&self) -> [String; 10] {
        [
            self.kernel.clone(),
            self.variant.clone(),
            self.n.to_string(),
            self.extra.clone(),
            self.workers.to_string(),
            self.rep.to_string(),
            self.seconds.to_string(),
            self.mflops.to_string(),
            self.verified.to_string(),
            self.max_rel_err.map(|e| format!("{e:e}")).unwrap_or_default(),
        ]
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::Format(e.to_string()),
    }
}

pub fn write_rows(rows: &[CsvRow], sink: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.fields()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Header plus one row per repetition of every result.
pub fn csv_write(results: &[BenchResult], sink: impl Write) -> Result<()> {
    let rows: Vec<CsvRow> = results.iter().flat_map(CsvRow::from_result).collect();
    write_rows(&rows, sink)
}

pub fn csv_string(results: &[BenchResult]) -> String {
    let mut buf = Vec::new();
    csv_write(results, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, k: usize, line: usize) -> Result<T> {
    let raw = rec.get(k).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::Parse { line, msg: format!("invalid {} `{raw}`", HEADER[k]) })
}

pub fn csv_read(source: impl Read) -> Result<Vec<CsvRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(HEADER) {
        return Err(Error::Parse { line: 1, msg: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")) });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != HEADER.len() {
            return Err(Error::Parse { line, msg: format!("expected {} fields, got {}", HEADER.len(), rec.len()) });
        }
        let verified: Verified = rec[8].parse().map_err(|_| Error::Parse { line, msg: format!("invalid verified `{}`", &rec[8]) })?;
        rows.push(CsvRow {
            kernel: rec[0].to_string(),
            variant: rec[1].to_string(),
            n: parse_field(&rec, 2, line)?,
            extra: rec[3].to_string(),
            workers: parse_field(&rec, 4, line)?,
            rep: parse_field(&rec, 5, line)?,
            seconds: parse_field(&rec, 6, line)?,
            mflops: parse_field(&rec, 7, line)?,
            verified,
            max_rel_err: if rec[9].is_empty() { None } else { Some(parse_field(&rec, 9, line)?) },
        });
    }
    Ok(rows)
}
