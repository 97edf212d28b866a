//! Diagnostics for prediction files, whether produced by the emulator or by
//! a trained model.
//!
//! Two line formats are accepted:
//!
//! * `decimal_tsv`: `n<TAB>target<TAB>prediction`, decimal integers;
//! * `token_tsv`: the same three fields, each written in the token grammar
//!   of [`crate::codec`] for the analysis base.
//!
//! Extra trailing columns (such as a decode-failure flag) are ignored.

mod classify;
mod histogram;
mod report;
mod tables;
mod tokens;

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use classify::{classify, AnalyzerConfig, CloseTier, ErrorClass, LabelKind};
pub use histogram::{ratio_histogram, LatticePoint, RatioBin, RatioHistogram, RatioMode};
pub use report::{summary_report, EpsilonCount, LabelSummary, Report};
pub use tables::{kk_matrix, residual_class_table, KkCell, KkMatrix, ResidualRow, ResidueStatus};
pub use tokens::{digit_agreement, token_agreement, DigitAgreement, TokenAgreement};

use crate::codec::{self, check_base};
use crate::collatz::long_step;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub n: u64,
    pub target: u128,
    /// Zero marks an undecodable model output.
    pub prediction: u128,
    pub base: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionFormat {
    DecimalTsv,
    TokenTsv,
}

impl FromStr for PredictionFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decimal_tsv" | "decimal" => Ok(PredictionFormat::DecimalTsv),
            "token_tsv" | "token" => Ok(PredictionFormat::TokenTsv),
            other => Err(Error::InvalidArgument(format!(
                "unknown prediction format {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub accepted: usize,
    pub rejected: Vec<Rejection>,
}

fn parse_field(
    field: &str,
    format: PredictionFormat,
    base: u32,
) -> std::result::Result<u128, String> {
    match format {
        PredictionFormat::DecimalTsv => field
            .trim()
            .parse::<u128>()
            .map_err(|_| format!("not a non-negative integer: {field:?}")),
        PredictionFormat::TokenTsv => codec::from_tokens(field, base).map_err(|e| e.to_string()),
    }
}

fn parse_line(
    line: &str,
    format: PredictionFormat,
    base: u32,
) -> std::result::Result<PredictionRecord, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < 3 {
        return Err(format!(
            "expected 3 tab-separated fields, found {}",
            fields.len()
        ));
    }
    let n = parse_field(fields[0], format, base)?;
    let target = parse_field(fields[1], format, base)?;
    let prediction = parse_field(fields[2], format, base)?;
    let n = u64::try_from(n).map_err(|_| format!("input {n} exceeds 2^63"))?;
    let step = long_step(n).map_err(|e| e.to_string())?;
    if step.kappa != target {
        return Err(format!(
            "target {target} is not the long Collatz successor of {n} ({})",
            step.kappa
        ));
    }
    Ok(PredictionRecord {
        n,
        target,
        prediction,
        base,
    })
}

/// Parses prediction lines, keeping good records and reporting bad ones by
/// 1-based line number. Blank lines are skipped.
pub fn parse_predictions<R: BufRead>(
    reader: R,
    format: PredictionFormat,
    base: u32,
) -> Result<(Vec<PredictionRecord>, LoadReport)> {
    check_base(base)?;
    let mut records = Vec::new();
    let mut report = LoadReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<predictions>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line, format, base) {
            Ok(record) => records.push(record),
            Err(reason) => report.rejected.push(Rejection {
                line: i + 1,
                reason,
            }),
        }
    }
    report.accepted = records.len();
    Ok((records, report))
}

pub fn load_predictions(
    path: &Path,
    format: PredictionFormat,
    base: u32,
) -> Result<(Vec<PredictionRecord>, LoadReport)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    match parse_predictions(BufReader::new(file), format, base) {
        Err(Error::Io { source, .. }) => Err(Error::io(path, source)),
        other => other,
    }
}

/// A record with its loop lengths and error class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedRecord {
    pub record: PredictionRecord,
    pub k: u32,
    pub k_prime: u32,
    pub class: ErrorClass,
}

pub fn classify_records(
    records: &[PredictionRecord],
    config: &AnalyzerConfig,
) -> Vec<ClassifiedRecord> {
    records
        .par_iter()
        .map(|&record| {
            let step = long_step(record.n).expect("records are validated on load");
            ClassifiedRecord {
                record,
                k: step.k,
                k_prime: step.k_prime,
                class: classify(&record, config),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_lines() {
        let text = "27\t31\t31\n5\t1\t4\textra\n\n7\t12\t9\n6\t3\t3\n1\t1\n";
        let (records, report) =
            parse_predictions(text.as_bytes(), PredictionFormat::DecimalTsv, 27).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(
            records[1],
            PredictionRecord {
                n: 5,
                target: 1,
                prediction: 4,
                base: 27
            }
        );
        let lines: Vec<usize> = report.rejected.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![4, 5, 6]);
        assert!(report.rejected[0]
            .reason
            .contains("not the long Collatz successor"));
        assert!(report.rejected[1].reason.contains("odd"));
    }

    #[test]
    fn token_lines() {
        let text = "+ 1 3\t+ 1 7\t+ 1 7\n+ 1 3\t+ 1 7\t+ 1 x\n";
        let (records, report) =
            parse_predictions(text.as_bytes(), PredictionFormat::TokenTsv, 24).unwrap();
        assert_eq!(
            records,
            vec![PredictionRecord {
                n: 27,
                target: 31,
                prediction: 31,
                base: 24
            }]
        );
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].line, 2);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_predictions(
            Path::new("/nonexistent/preds.tsv"),
            PredictionFormat::DecimalTsv,
            10,
        )
        .unwrap_err();
        assert!(err.is_io());
    }
}
