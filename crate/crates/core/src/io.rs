//! Text formats shared by the library and the CLI.
//!
//! Matrices are JSON objects `{"rows": m, "cols": n, "entries": [[..]]}`
//! whose entries are strings `"p/q"` or `"p"`. Decimal literals are
//! rejected. Sign vectors are strings over `+-0`.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::sign::{SignVector, SignVectorSet};

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let num_body = num.strip_prefix('-').unwrap_or(num);
    if !digits(num_body) {
        return Err(bad());
    }
    let n: Integer = num.parse().map_err(|_| bad())?;
    let d: Integer = match den {
        Some(d) if digits(d) => d.parse().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => Integer::from(1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational::from((n, d)))
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn format_rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// `serialize_with` helper for a rational field.
pub fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// `serialize_with` helper for a rational vector field.
pub fn ser_rationals<S: serde::Serializer>(
    v: &[Rational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

pub fn matrix_from_json(text: &str) -> Result<RationalMatrix> {
    let raw: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("matrix JSON: {e}")))?;
    if raw.entries.len() != raw.rows {
        return Err(Error::ShapeMismatch(format!(
            "declared {} rows, found {}",
            raw.rows,
            raw.entries.len()
        )));
    }
    let mut entries = Vec::with_capacity(raw.rows * raw.cols);
    for (i, row) in raw.entries.iter().enumerate() {
        if row.len() != raw.cols {
            return Err(Error::ShapeMismatch(format!(
                "row {i} has {} entries, declared {} columns",
                row.len(),
                raw.cols
            )));
        }
        for e in row {
            entries.push(parse_rational(e)?);
        }
    }
    RationalMatrix::new(raw.rows, raw.cols, entries)
}

pub fn matrix_to_json_value(m: &RationalMatrix) -> serde_json::Value {
    let raw = MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        entries: (0..m.rows()).map(|i| format_rationals(m.row(i))).collect(),
    };
    serde_json::to_value(raw).expect("matrix serializes")
}

pub fn matrix_to_json(m: &RationalMatrix) -> String {
    serde_json::to_string(&matrix_to_json_value(m)).expect("matrix serializes")
}

/// A rational vector: either a JSON array of rational strings, or a matrix
/// JSON with a single row or a single column.
pub fn vector_from_json(text: &str) -> Result<Vec<Rational>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("vector JSON: {e}")))?;
    match value {
        serde_json::Value::Array(items) => items
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => parse_rational(s),
                other => Err(Error::InvalidRational(other.to_string())),
            })
            .collect(),
        serde_json::Value::Object(_) => {
            let m = matrix_from_json(text)?;
            if m.cols() == 1 {
                Ok(m.column(0))
            } else if m.rows() == 1 {
                Ok(m.row(0).to_vec())
            } else {
                Err(Error::ShapeMismatch("vector matrix must have one row or one column".into()))
            }
        }
        _ => Err(Error::Invalid("expected an array or a matrix object".into())),
    }
}

/// Sign vectors, as a JSON array of strings or one string per line
/// (`#` starts a comment).
pub fn sign_set_from_text(text: &str) -> Result<SignVectorSet> {
    let trimmed = text.trim_start();
    let vectors: Vec<SignVector> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Invalid(format!("sign list: {e}")))?
    } else {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?
    };
    let len = vectors
        .first()
        .map(SignVector::len)
        .ok_or_else(|| Error::Invalid("empty sign vector list".into()))?;
    SignVectorSet::from_vectors(len, vectors)
}
