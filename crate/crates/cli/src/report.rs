//! Report emission: Monte Carlo tables as CSV or JSON lines, retained draws
//! as a small binary file, and the reproducibility manifest.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! a report back recovers every value exactly.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use vwp_core::inference::IntervalEstimate;
use vwp_core::simharness::{McReport, McRow, Method};

use crate::CliError;

/// Magic prefix of a draws file: 8 bytes of magic then a little-endian
/// u64 draw count, then the draws as little-endian f64.
pub const DRAWS_MAGIC: &[u8; 8] = b"OBDRAWS1";

const CSV_HEADER: &str =
    "method,theta0,n,d,coverage,mc_se,length,bias,reps,failures,wall_ms,signed_bias";

pub fn write_mc_csv(report: &McReport, path: &Path) -> Result<(), CliError> {
    let mut out = String::with_capacity(64 * (report.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.method,
            r.theta0,
            r.n,
            r.d,
            r.coverage,
            r.mc_se,
            r.length,
            r.bias,
            r.reps,
            r.failures,
            r.wall_ms,
            r.signed_bias
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn read_mc_csv(path: &Path) -> Result<McReport, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::Config("empty report".into()))?;
    if header != CSV_HEADER {
        return Err(CliError::Config(format!("unexpected report header: {header}")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(CliError::Parse {
                row: i + 2,
                column: String::new(),
                message: format!("expected 12 fields, found {}", fields.len()),
            });
        }
        let method = match fields[0] {
            "CB" => Method::Cb,
            "ORACLE" => Method::Oracle,
            "NAIVE" => Method::Naive,
            other => {
                return Err(CliError::Parse {
                    row: i + 2,
                    column: "method".into(),
                    message: format!("unknown method '{other}'"),
                })
            }
        };
        let parse_f = |s: &str, col: &str| -> Result<f64, CliError> {
            s.parse().map_err(|_| CliError::Parse {
                row: i + 2,
                column: col.into(),
                message: format!("'{s}' is not numeric"),
            })
        };
        let parse_u = |s: &str, col: &str| -> Result<u64, CliError> {
            s.parse().map_err(|_| CliError::Parse {
                row: i + 2,
                column: col.into(),
                message: format!("'{s}' is not an integer"),
            })
        };
        rows.push(McRow {
            method,
            theta0: parse_f(fields[1], "theta0")?,
            n: parse_u(fields[2], "n")? as usize,
            d: parse_u(fields[3], "d")? as usize,
            coverage: parse_f(fields[4], "coverage")?,
            mc_se: parse_f(fields[5], "mc_se")?,
            length: parse_f(fields[6], "length")?,
            bias: parse_f(fields[7], "bias")?,
            reps: parse_u(fields[8], "reps")? as usize,
            failures: parse_u(fields[9], "failures")? as usize,
            wall_ms: parse_u(fields[10], "wall_ms")?,
            signed_bias: parse_f(fields[11], "signed_bias")?,
        });
    }
    Ok(McReport { rows })
}

pub fn write_mc_jsonl(report: &McReport, path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    for r in &report.rows {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn read_mc_jsonl(path: &Path) -> Result<McReport, CliError> {
    let text = std::fs::read_to_string(path)?;
    let rows = text
        .lines()
        .map(serde_json::from_str::<McRow>)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(McReport { rows })
}

/// Serialized interval summary for `fit` runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitRecord {
    pub component: usize,
    pub point: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl FitRecord {
    pub fn new(component: usize, iv: &IntervalEstimate) -> Self {
        Self {
            component,
            point: iv.point,
            se: iv.se,
            lower: iv.lower,
            upper: iv.upper,
            level: iv.level,
        }
    }
}

pub fn write_draws(path: &Path, draws: &[f64]) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(DRAWS_MAGIC)?;
    file.write_all(&(draws.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(draws.len() * 8);
    for v in draws {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    file.write_all(&buf)?;
    Ok(())
}

pub fn read_draws(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut file = std::fs::File::open(path)?;
    let mut header = [0u8; 16];
    file.read_exact(&mut header).map_err(|_| bad_draws("truncated header"))?;
    if &header[..8] != DRAWS_MAGIC {
        return Err(bad_draws("bad magic"));
    }
    let count = u64::from_le_bytes(header[8..].try_into().expect("8 bytes")) as usize;
    let mut body = Vec::new();
    file.read_to_end(&mut body)?;
    if body.len() != count * 8 {
        return Err(bad_draws(&format!(
            "expected {} draw bytes, found {}",
            count * 8,
            body.len()
        )));
    }
    Ok(body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

fn bad_draws(msg: &str) -> CliError {
    CliError::Config(format!("invalid draws file: {msg}"))
}

/// The manifest every run writes next to its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_digest: String,
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<PathBuf, CliError> {
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(manifest)?)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> McReport {
        McReport {
            rows: vec![McRow {
                method: Method::Cb,
                theta0: 0.5,
                n: 400,
                d: 500,
                coverage: 0.9549999999999312,
                mc_se: 0.0123,
                length: 1.3029999999999,
                bias: 0.071,
                signed_bias: -0.071,
                reps: 200,
                failures: 0,
                wall_ms: 12345,
            }],
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let report = sample_report();
        write_mc_csv(&report, &path).unwrap();
        let back = read_mc_csv(&path).unwrap();
        assert_eq!(report, back);
        // bit-exactness of the sensitive float
        assert_eq!(report.rows[0].coverage.to_bits(), back.rows[0].coverage.to_bits());
    }

    #[test]
    fn jsonl_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.jsonl");
        let report = sample_report();
        write_mc_jsonl(&report, &path).unwrap();
        let back = read_mc_jsonl(&path).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn draws_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("draws.bin");
        let draws = vec![0.1, -2.5, 3.14159, f64::MIN_POSITIVE];
        write_draws(&path, &draws).unwrap();
        let back = read_draws(&path).unwrap();
        assert_eq!(draws, back);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..8], DRAWS_MAGIC);
        assert_eq!(bytes.len(), 16 + 8 * draws.len());
    }

    #[test]
    fn corrupt_draws_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("draws.bin");
        std::fs::write(&path, b"NOTMAGIC\x01\x00\x00\x00\x00\x00\x00\x00").unwrap();
        assert!(read_draws(&path).is_err());
    }
}
