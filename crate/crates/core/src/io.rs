//! Plain-text file formats: `i,w,z` sample CSV files and one-value-per-line
//! lifetime files.

use std::fmt::Write as _;

use crate::error::{NjpcError, Result};
use crate::sample::NjpcSample;

pub const SAMPLE_HEADER: &str = "i,w,z";

/// Parses an `i,w,z` CSV sample. The header row is required; blank lines
/// and `#` comments are skipped.
pub fn parse_sample_csv(text: &str) -> Result<NjpcSample> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h.replace(' ', "") == SAMPLE_HEADER => {}
        Some((line, h)) => {
            return Err(NjpcError::Parse {
                line,
                message: format!("expected header {SAMPLE_HEADER:?}, found {h:?}"),
            })
        }
        None => {
            return Err(NjpcError::Parse {
                line: 1,
                message: "empty sample file".into(),
            })
        }
    }
    let mut w = Vec::new();
    let mut z = Vec::new();
    for (line, row) in lines {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(NjpcError::Parse {
                line,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let idx: usize = fields[0].parse().map_err(|_| NjpcError::Parse {
            line,
            message: format!("bad index {:?}", fields[0]),
        })?;
        if idx != w.len() + 1 {
            return Err(NjpcError::Parse {
                line,
                message: format!("expected index {}, found {idx}", w.len() + 1),
            });
        }
        let t: f64 = fields[1].parse().map_err(|_| NjpcError::Parse {
            line,
            message: format!("bad failure time {:?}", fields[1]),
        })?;
        let ind: u8 = match fields[2] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(NjpcError::Parse {
                    line,
                    message: format!("indicator must be 0 or 1, found {other:?}"),
                })
            }
        };
        w.push(t);
        z.push(ind);
    }
    NjpcSample::from_indicators(w, &z)
}

/// Writes a sample as `i,w,z` CSV. Times use Rust's shortest round-trip
/// representation so that reading the file back is lossless.
pub fn format_sample_csv(sample: &NjpcSample) -> String {
    let mut out = String::from(SAMPLE_HEADER);
    out.push('\n');
    for (i, (w, z)) in sample.w().iter().zip(sample.z()).enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, w, u8::from(*z));
    }
    out
}

/// Parses a complete-data lifetime file: one non-negative value per line.
pub fn parse_lifetimes(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(line, l)| match l.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
            _ => Err(NjpcError::Parse {
                line,
                message: format!("expected a non-negative lifetime, found {l:?}"),
            }),
        })
        .collect()
}
