//! CSV dataset ingestion: dummy encoding for declared categorical columns,
//! standardization of numeric columns, and listwise deletion of rows with
//! missing cells.
//!
//! Conventions (all deterministic):
//! - standardization uses the population standard deviation (divide by n);
//! - columns taking exactly the values {0, 1} are left unstandardized, so
//!   ingesting a standardized re-export reproduces the same matrix;
//! - categorical levels are the sorted distinct strings, the first being
//!   the reference level;
//! - missing cells are "", "NA", "N/A", "?" or "." and drop the whole row.

use ndarray::prelude::*;
use vwp_core::model::{Dataset, Treatment};
use vwp_core::projection::dummy_encode;

use crate::CliError;

const MISSING_TOKENS: [&str; 5] = ["", "NA", "N/A", "?", "."];

/// What ingestion did besides producing the dataset.
#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub rows_dropped: usize,
    pub warnings: Vec<String>,
    /// Names of the produced nuisance columns, in order.
    pub z_columns: Vec<String>,
}

fn is_missing(cell: &str) -> bool {
    MISSING_TOKENS.contains(&cell.trim())
}

/// Read a headed CSV into a [`Dataset`]: `outcome_column` must be strictly
/// binary, `treatment_column` binary or small-integer categorical, columns
/// named in `categorical_columns` are dummy-encoded, and everything else is
/// parsed numeric and standardized.
pub fn ingest_csv(
    path: &std::path::Path,
    treatment_column: &str,
    outcome_column: &str,
    categorical_columns: &[String],
) -> Result<(Dataset, IngestReport), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("column '{name}' not found in {headers:?}")))
    };
    let outcome_idx = find(outcome_column)?;
    let treatment_idx = find(treatment_column)?;
    if outcome_idx == treatment_idx {
        return Err(CliError::Config(
            "outcome and treatment must be different columns".into(),
        ));
    }
    for c in categorical_columns {
        find(c)?;
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut report = IngestReport::default();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(CliError::Parse {
                row: line + 2,
                column: String::new(),
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        let cells: Vec<String> = record.iter().map(str::to_string).collect();
        if cells.iter().any(|c| is_missing(c)) {
            report.rows_dropped += 1;
            continue;
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(CliError::Config("no complete rows after ingestion".into()));
    }
    if report.rows_dropped > 0 {
        report
            .warnings
            .push(format!("dropped {} rows with missing values", report.rows_dropped));
    }
    let n = rows.len();

    let parse_numeric = |col: usize, row: usize, cell: &str| -> Result<f64, CliError> {
        cell.parse::<f64>().map_err(|_| CliError::Parse {
            row: row + 2,
            column: headers[col].clone(),
            message: format!("'{cell}' is not numeric"),
        })
    };

    // outcome
    let mut y = Array1::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        let v = parse_numeric(outcome_idx, i, &row[outcome_idx])?;
        if v != 0.0 && v != 1.0 {
            return Err(CliError::NonBinaryOutcome {
                row: i + 2,
                value: row[outcome_idx].clone(),
            });
        }
        y[i] = v;
    }

    // treatment: binary or integer codes 0..=k
    let mut codes = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let v = parse_numeric(treatment_idx, i, &row[treatment_idx])?;
        if v < 0.0 || v.fract() != 0.0 || v > 20.0 {
            return Err(CliError::Parse {
                row: i + 2,
                column: headers[treatment_idx].clone(),
                message: format!("treatment value '{v}' is not a small nonnegative integer"),
            });
        }
        codes.push(v as usize);
    }
    let max_level = codes.iter().copied().max().unwrap_or(0);
    let treatment = if max_level <= 1 {
        Treatment::Binary(Array1::from_iter(codes.iter().map(|&c| c as f64)))
    } else {
        Treatment::Categorical {
            codes,
            k: max_level,
        }
    };

    // nuisance columns in header order
    let mut z_blocks: Vec<Array2<f64>> = Vec::new();
    for (col, name) in headers.iter().enumerate() {
        if col == outcome_idx || col == treatment_idx {
            continue;
        }
        if categorical_columns.iter().any(|c| c == name) {
            let mut levels: Vec<String> = rows.iter().map(|r| r[col].clone()).collect();
            levels.sort();
            levels.dedup();
            if levels.len() < 2 {
                report
                    .warnings
                    .push(format!("constant column '{name}' dropped"));
                continue;
            }
            let k = levels.len() - 1;
            let codes: Vec<usize> = rows
                .iter()
                .map(|r| levels.iter().position(|l| *l == r[col]).expect("level"))
                .collect();
            let block = dummy_encode(&codes, k).map_err(|e| CliError::Config(e.to_string()))?;
            for level in levels.iter().skip(1) {
                report.z_columns.push(format!("{name}={level}"));
            }
            z_blocks.push(block);
        } else {
            let mut values = Array1::zeros(n);
            for (i, row) in rows.iter().enumerate() {
                values[i] = parse_numeric(col, i, &row[col])?;
            }
            let distinct_01 = values.iter().all(|&v| v == 0.0 || v == 1.0);
            let mean = values.mean().unwrap();
            let var = values.mapv(|v| (v - mean) * (v - mean)).mean().unwrap();
            if var == 0.0 {
                report
                    .warnings
                    .push(format!("constant column '{name}' dropped"));
                continue;
            }
            if !distinct_01 {
                let sd = var.sqrt();
                values.mapv_inplace(|v| (v - mean) / sd);
            }
            report.z_columns.push(name.clone());
            z_blocks.push(values.insert_axis(Axis(1)));
        }
    }

    let d: usize = z_blocks.iter().map(|b| b.ncols()).sum();
    let mut z = Array2::zeros((n, d));
    let mut offset = 0;
    for block in &z_blocks {
        z.slice_mut(s![.., offset..offset + block.ncols()]).assign(block);
        offset += block.ncols();
    }

    let dataset = Dataset::new(y, treatment, z).map_err(CliError::Model)?;
    Ok((dataset, report))
}

/// Write the ingested dataset back out (outcome, treatment, then the
/// processed nuisance columns) for reproducibility checks.
#[cfg_attr(not(test), allow(dead_code))]
pub fn export_csv(
    path: &std::path::Path,
    dataset: &Dataset,
    report: &IngestReport,
    treatment_column: &str,
    outcome_column: &str,
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec![outcome_column.to_string(), treatment_column.to_string()];
    header.extend(report.z_columns.iter().cloned());
    writer.write_record(&header)?;
    let y = dataset.y();
    let z = dataset.z();
    for i in 0..dataset.n() {
        let mut record = vec![format!("{}", y[i])];
        match dataset.treatment() {
            Treatment::Binary(x) => record.push(format!("{}", x[i])),
            Treatment::Categorical { codes, .. } => record.push(format!("{}", codes[i])),
        }
        for j in 0..dataset.d() {
            record.push(format!("{}", z[[i, j]]));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
