//! Reader for Matrix Market coordinate files with real values.
//!
//! Accepts `%%MatrixMarket matrix coordinate real general|symmetric`,
//! `%` comment lines and 1-based indices. Symmetric files are expanded to
//! full storage and duplicate entries are summed.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::kernels::CsrMatrix;
use crate::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

pub fn mm_read(input: impl BufRead) -> Result<CsrMatrix> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (no, header) = match lines.next() {
        Some((no, l)) => (no, l?),
        None => return Err(parse_err(1, "empty input")),
    };
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    let words: Vec<&str> = words.iter().map(String::as_str).collect();
    let symmetric = match words.as_slice() {
        ["%%matrixmarket", "matrix", "coordinate", "real", "general"] => false,
        ["%%matrixmarket", "matrix", "coordinate", "real", "symmetric"] => true,
        ["%%matrixmarket", ..] => return Err(parse_err(no, format!("unsupported header `{header}`"))),
        _ => return Err(parse_err(no, "missing %%MatrixMarket header")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    let mut last = no;
    for (no, line) in lines {
        let line = line?;
        last = no;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let mut tok = text.split_whitespace();
        match size {
            None => {
                let dims = (field(no, tok.next(), "row count")?, field(no, tok.next(), "column count")?, field(no, tok.next(), "entry count")?);
                if dims.0 == 0 || dims.1 == 0 {
                    return Err(parse_err(no, "dimensions must be positive"));
                }
                if symmetric && dims.0 != dims.1 {
                    return Err(parse_err(no, "symmetric matrix must be square"));
                }
                size = Some(dims);
            }
            Some((rows, cols, nnz)) => {
                if entries.len() == nnz {
                    return Err(parse_err(no, format!("more than the declared {nnz} entries")));
                }
                let i: usize = field(no, tok.next(), "row index")?;
                let j: usize = field(no, tok.next(), "column index")?;
                let v: f64 = field(no, tok.next(), "value")?;
                if i == 0 || i > rows || j == 0 || j > cols {
                    return Err(parse_err(no, format!("index ({i},{j}) outside {rows}x{cols}")));
                }
                entries.push((i - 1, j - 1, v));
            }
        }
        if tok.next().is_some() {
            return Err(parse_err(no, "trailing fields"));
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(last, "missing size line"))?;
    if entries.len() != nnz {
        return Err(parse_err(last, format!("declared {nnz} entries, found {}", entries.len())));
    }
    if symmetric {
        let mirrored: Vec<_> = entries.iter().filter(|e| e.0 != e.1).map(|&(i, j, v)| (j, i, v)).collect();
        entries.extend(mirrored);
    }
    CsrMatrix::from_triplets(rows, cols, entries)
}

pub fn mm_read_path(path: &Path) -> Result<CsrMatrix> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    mm_read(BufReader::new(file)).map_err(|e| e.context(&path.display().to_string()))
}
