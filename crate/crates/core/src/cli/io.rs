//! Dense matrix input from CSV and Matrix Market files.

use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{GcrssError, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Auto,
    Csv,
    MatrixMarket,
}

fn perr<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(GcrssError::Parse { line, message: message.into() })
}

fn number(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = match tok.trim().parse() {
        Ok(v) => v,
        Err(_) => return perr(line, format!("not a number: {:?}", tok.trim())),
    };
    if !v.is_finite() {
        return Err(GcrssError::InvalidInput(format!("non-finite entry on line {line}")));
    }
    Ok(v)
}

pub fn parse_matrix(path: &Path, format: Format) -> Result<Matrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GcrssError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let format = match format {
        Format::Auto if path.extension().is_some_and(|e| e == "mtx") => Format::MatrixMarket,
        f => f,
    };
    parse_matrix_str(&text, format)
}

pub fn parse_matrix_str(text: &str, format: Format) -> Result<Matrix> {
    match format {
        Format::Csv => parse_csv(text),
        Format::MatrixMarket => parse_mm(text),
        Format::Auto => {
            if text.trim_start().starts_with("%%MatrixMarket") {
                parse_mm(text)
            } else {
                parse_csv(text)
            }
        }
    }
}

fn parse_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line.split(',').map(|t| number(t, i + 1)).collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return perr(i + 1, format!("expected {} fields, found {}", first.len(), row.len()));
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(Matrix::from_row_slice(rows.len(), cols, &flat))
}

fn parse_mm(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(GcrssError::Parse { line: 1, message: "empty file".into() })?;
    let h: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return perr(1, "bad Matrix Market header");
    }
    let coordinate = match h[2].as_str() {
        "array" => false,
        "coordinate" => true,
        other => return perr(1, format!("unsupported layout {other}")),
    };
    if !matches!(h[3].as_str(), "real" | "integer" | "double") || h[4] != "general" {
        return perr(1, "only real general matrices are supported");
    }
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_no, size_line) = body.next().ok_or(GcrssError::Parse { line: 2, message: "missing size line".into() })?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .or_else(|_| perr(size_no + 1, "bad size line"))?;
    let expected = if coordinate { 3 } else { 2 };
    if dims.len() != expected {
        return perr(size_no + 1, format!("size line needs {expected} integers"));
    }
    let (rows, cols) = (dims[0], dims[1]);
    let mut m = Matrix::zeros(rows, cols);
    if coordinate {
        let mut seen = 0;
        for (no, line) in body {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return perr(no + 1, "coordinate entry needs row, column and value");
            }
            let i: usize = t[0].parse().or_else(|_| perr(no + 1, "bad row index"))?;
            let j: usize = t[1].parse().or_else(|_| perr(no + 1, "bad column index"))?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return perr(no + 1, format!("index ({i}, {j}) out of range"));
            }
            m[(i - 1, j - 1)] += number(t[2], no + 1)?;
            seen += 1;
        }
        if seen != dims[2] {
            return perr(size_no + 1, format!("declared {} entries, found {seen}", dims[2]));
        }
    } else {
        let mut idx = 0;
        for (no, line) in body {
            for tok in line.split_whitespace() {
                if idx >= rows * cols {
                    return perr(no + 1, "too many entries");
                }
                m[(idx % rows.max(1), idx / rows.max(1))] = number(tok, no + 1)?;
                idx += 1;
            }
        }
        if idx != rows * cols {
            return perr(size_no + 1, format!("expected {} entries, found {idx}", rows * cols));
        }
    }
    Ok(m)
}
