//! Plain-text matrix files.
//!
//! ```text
//! # hyperoval over GF(4)
//! q=4 p=2 m=2 mod=1,1
//! k=3 n=6
//! 1 1 1 1 0 0
//! 0 1 2 3 1 0
//! 0 1 3 2 0 1
//! ```
//!
//! Entries are element encodings. `#` starts a comment; blank lines are
//! ignored. `p` and `m` may be omitted when they follow from `q`; `mod`
//! lists the non-leading modulus coefficients, lowest degree first.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::field::{prime_power, FieldCtx, Gf};
use crate::linalg::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: entry {value} out of range for q = {q}")]
    EncodingOutOfRange { line: usize, column: usize, value: u64, q: u32 },
    #[error("{0}")]
    Io(String),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, as (line number, text).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        (!l.trim().is_empty()).then_some((i + 1, l))
    })
}

/// Whitespace-separated tokens with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn key_values<'a>(line_no: usize, line: &'a str, allowed: &[&str]) -> Result<Vec<(usize, &'a str, &'a str)>, FormatError> {
    let mut out: Vec<(usize, &str, &str)> = Vec::new();
    for (col, tok) in tokens(line) {
        let Some((key, value)) = tok.split_once('=') else {
            return Err(parse_err(line_no, col, format!("expected key=value, got `{tok}`")));
        };
        if !allowed.contains(&key) {
            return Err(parse_err(line_no, col, format!("unknown key `{key}`")));
        }
        if out.iter().any(|(_, k, _)| *k == key) {
            return Err(parse_err(line_no, col, format!("duplicate key `{key}`")));
        }
        out.push((col, key, value));
    }
    Ok(out)
}

fn parse_uint(line: usize, column: usize, s: &str) -> Result<u64, FormatError> {
    s.parse::<u64>()
        .map_err(|_| parse_err(line, column, format!("expected a non-negative integer, got `{s}`")))
}

/// Parses a field header line such as `q=9 p=3 m=2 mod=1,0`.
pub fn parse_field_header(line_no: usize, line: &str) -> Result<FieldCtx, FormatError> {
    let kv = key_values(line_no, line, &["q", "p", "m", "mod"])?;
    let get = |key: &str| kv.iter().find(|(_, k, _)| *k == key).map(|(c, _, v)| (*c, *v));
    let (qcol, qval) = get("q").ok_or_else(|| parse_err(line_no, 1, "field header needs q="))?;
    let q = parse_uint(line_no, qcol, qval)?;
    let (p, m) = u32::try_from(q)
        .ok()
        .and_then(prime_power)
        .ok_or_else(|| parse_err(line_no, qcol, format!("q = {q} is not a prime power")))?;
    for (key, expected) in [("p", p), ("m", m)] {
        if let Some((col, v)) = get(key) {
            if parse_uint(line_no, col, v)? != expected as u64 {
                return Err(parse_err(line_no, col, format!("{key}={v} inconsistent with q = {q}")));
            }
        }
    }
    let modulus = match get("mod") {
        Some((col, v)) => Some(
            v.split(',')
                .map(|c| parse_uint(line_no, col, c).map(|x| x as u32))
                .collect::<Result<Vec<u32>, _>>()?,
        ),
        None => None,
    };
    let col = get("mod").map_or(qcol, |(c, _)| c);
    FieldCtx::new(p, m, modulus.as_deref()).map_err(|e| parse_err(line_no, col, e.to_string()))
}

/// Parses a matrix file.
pub fn read_matrix(text: &str) -> Result<Matrix, FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, 1, "missing field header"))?;
    let field = parse_field_header(hl, header)?;
    let (dl, dims) = lines.next().ok_or_else(|| parse_err(hl + 1, 1, "missing `k= n=` line"))?;
    let kv = key_values(dl, dims, &["k", "n"])?;
    let dim = |key: &str| -> Result<usize, FormatError> {
        let (col, _, v) = kv
            .iter()
            .find(|(_, k, _)| *k == key)
            .ok_or_else(|| parse_err(dl, 1, format!("missing {key}=")))?;
        let x = parse_uint(dl, *col, v)? as usize;
        if x == 0 {
            return Err(parse_err(dl, *col, format!("{key} must be positive")));
        }
        Ok(x)
    };
    let (k, n) = (dim("k")?, dim("n")?);
    let mut data = Vec::with_capacity(k * n);
    let mut last_line = dl;
    for r in 0..k {
        let (ln, row) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, 1, format!("expected {k} rows, found {r}")))?;
        last_line = ln;
        let toks = tokens(row);
        if toks.len() != n {
            let col = toks.get(n).map_or(row.len() + 1, |t| t.0);
            return Err(parse_err(ln, col, format!("expected {n} entries, found {}", toks.len())));
        }
        for (col, tok) in toks {
            let v = parse_uint(ln, col, tok)?;
            if v >= field.q() as u64 {
                return Err(FormatError::EncodingOutOfRange {
                    line: ln,
                    column: col,
                    value: v,
                    q: field.q(),
                });
            }
            data.push(Gf(v as u32));
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, 1, format!("unexpected content after {k} rows")));
    }
    Ok(Matrix::new(&field, k, n, data).expect("dimensions checked"))
}

pub fn read_matrix_file(path: &Path) -> Result<Matrix, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io(format!("{}: {e}", path.display())))?;
    read_matrix(&text)
}

/// Serializes a matrix; [`read_matrix`] returns it unchanged.
pub fn write_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    writeln!(out, "{}", m.field().header()).unwrap();
    writeln!(out, "k={} n={}", m.rows(), m.cols()).unwrap();
    for row in m.to_u32_rows() {
        let row: Vec<String> = row.iter().map(u32::to_string).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

/// Parses columns written as `1,0,0;0,1,0`: `;` between vectors, `,` between
/// entries.
pub fn parse_vectors(field: &FieldCtx, text: &str) -> Result<Vec<Vec<Gf>>, FormatError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(';') {
        let mut col_off = offset;
        let mut v = Vec::new();
        for entry in part.split(',') {
            let column = col_off + 1 + (entry.len() - entry.trim_start().len());
            let x = parse_uint(1, column, entry.trim())?;
            if x >= field.q() as u64 {
                return Err(FormatError::EncodingOutOfRange {
                    line: 1,
                    column,
                    value: x,
                    q: field.q(),
                });
            }
            v.push(Gf(x as u32));
            col_off += entry.len() + 1;
        }
        out.push(v);
        offset += part.len() + 1;
    }
    Ok(out)
}

pub fn format_vectors(vs: &[Vec<Gf>]) -> String {
    vs.iter()
        .map(|v| v.iter().map(|x| x.0.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}
