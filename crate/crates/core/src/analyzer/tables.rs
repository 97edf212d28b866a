use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::classify::{AnalyzerConfig, LabelKind};
use super::ClassifiedRecord;
use crate::error::{Error, Result};

pub const MAX_RESIDUE_BITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueStatus {
    Learned,
    Unlearned,
    Mixed,
    LowSupport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    /// Class is `n ≡ residue (mod 2^bits)`.
    pub bits: u32,
    pub residue: u64,
    pub count: u64,
    pub correct: u64,
    pub accuracy: Option<f64>,
    pub status: ResidueStatus,
}

/// Accuracy per odd residue class modulo `2^p`, for `p = 1..=p_max`.
pub fn residual_class_table(
    records: &[ClassifiedRecord],
    p_max: u32,
    config: &AnalyzerConfig,
) -> Result<Vec<ResidualRow>> {
    if !(1..=MAX_RESIDUE_BITS).contains(&p_max) {
        return Err(Error::InvalidArgument(format!(
            "p_max {p_max} outside 1..={MAX_RESIDUE_BITS}"
        )));
    }
    let mut rows = Vec::new();
    for bits in 1..=p_max {
        let modulus = 1u64 << bits;
        let mut counts = vec![(0u64, 0u64); modulus as usize];
        for r in records {
            let slot = &mut counts[(r.record.n % modulus) as usize];
            slot.0 += 1;
            slot.1 += r.class.is_correct() as u64;
        }
        for residue in (1..modulus).step_by(2) {
            let (count, correct) = counts[residue as usize];
            let accuracy = (count > 0).then(|| correct as f64 / count as f64);
            let status = match accuracy {
                _ if count < config.min_support => ResidueStatus::LowSupport,
                Some(a) if a >= config.learned_threshold => ResidueStatus::Learned,
                Some(a) if a <= config.unlearned_threshold => ResidueStatus::Unlearned,
                _ => ResidueStatus::Mixed,
            };
            rows.push(ResidualRow {
                bits,
                residue,
                count,
                correct,
                accuracy,
                status,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KkCell {
    pub k: u32,
    pub k_prime: u32,
    pub count: u64,
    pub correct: u64,
    /// `None` when the cell is empty.
    pub accuracy: Option<f64>,
    pub labels: BTreeMap<LabelKind, u64>,
    pub dominant: Option<LabelKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KkMatrix {
    pub max_k: u32,
    pub max_k_prime: u32,
    /// Row-major, `k = 1..=max_k`, `k' = 1..=max_k_prime`.
    pub cells: Vec<KkCell>,
}

impl KkMatrix {
    pub fn cell(&self, k: u32, k_prime: u32) -> Option<&KkCell> {
        if k == 0 || k_prime == 0 || k > self.max_k || k_prime > self.max_k_prime {
            return None;
        }
        self.cells
            .get(((k - 1) * self.max_k_prime + (k_prime - 1)) as usize)
    }
}

pub fn kk_matrix(records: &[ClassifiedRecord]) -> KkMatrix {
    let max_k = records.iter().map(|r| r.k).max().unwrap_or(0);
    let max_k_prime = records.iter().map(|r| r.k_prime).max().unwrap_or(0);
    let mut grouped: BTreeMap<(u32, u32), BTreeMap<LabelKind, u64>> = BTreeMap::new();
    for r in records {
        *grouped
            .entry((r.k, r.k_prime))
            .or_default()
            .entry(r.class.kind())
            .or_default() += 1;
    }
    let mut cells = Vec::with_capacity((max_k * max_k_prime) as usize);
    for k in 1..=max_k {
        for k_prime in 1..=max_k_prime {
            let labels = grouped.remove(&(k, k_prime)).unwrap_or_default();
            let count: u64 = labels.values().sum();
            let correct = labels.get(&LabelKind::Correct).copied().unwrap_or(0);
            // ties go to the earlier kind in precedence order
            let dominant = labels
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(kind, _)| *kind);
            cells.push(KkCell {
                k,
                k_prime,
                count,
                correct,
                accuracy: (count > 0).then(|| correct as f64 / count as f64),
                labels,
                dominant,
            });
        }
    }
    KkMatrix {
        max_k,
        max_k_prime,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{classify_records, PredictionRecord};
    use crate::collatz::long_step;

    fn all_correct(limit: u64) -> Vec<ClassifiedRecord> {
        let records: Vec<PredictionRecord> = (1..limit)
            .step_by(2)
            .map(|n| {
                let kappa = long_step(n).unwrap().kappa;
                PredictionRecord {
                    n,
                    target: kappa,
                    prediction: kappa,
                    base: 10,
                }
            })
            .collect();
        classify_records(&records, &AnalyzerConfig::default())
    }

    #[test]
    fn all_correct_is_learned_everywhere() {
        let classified = all_correct(1 << 14);
        let rows = residual_class_table(&classified, 6, &AnalyzerConfig::default()).unwrap();
        assert_eq!(rows.len(), 1 + 2 + 4 + 8 + 16 + 32);
        assert!(rows.iter().all(|r| r.status == ResidueStatus::Learned));
    }

    #[test]
    fn low_support_and_range() {
        let classified = all_correct(40);
        let rows = residual_class_table(&classified, 3, &AnalyzerConfig::default()).unwrap();
        assert!(rows
            .iter()
            .filter(|r| r.bits == 3)
            .all(|r| r.status == ResidueStatus::LowSupport));
        assert!(residual_class_table(&classified, 0, &AnalyzerConfig::default()).is_err());
        assert!(residual_class_table(&classified, 13, &AnalyzerConfig::default()).is_err());
    }

    #[test]
    fn matrix_shape_and_empty_cells() {
        let classified = all_correct(64);
        let m = kk_matrix(&classified);
        assert_eq!(m.cells.len(), (m.max_k * m.max_k_prime) as usize);
        let total: u64 = m.cells.iter().map(|c| c.count).sum();
        assert_eq!(total, 32);
        let empty = m
            .cells
            .iter()
            .find(|c| c.count == 0)
            .expect("some empty cell");
        assert_eq!(empty.accuracy, None);
        assert_eq!(empty.dominant, None);
        assert_eq!(m.cell(1, 1).unwrap().dominant, Some(LabelKind::Correct));
        assert!(m.cell(0, 1).is_none());
    }
}
