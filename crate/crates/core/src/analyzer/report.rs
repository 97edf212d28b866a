use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::classify::{AnalyzerConfig, CloseTier, ErrorClass, LabelKind};
use super::histogram::{ratio_histogram, RatioHistogram};
use super::tables::{kk_matrix, residual_class_table, KkMatrix, ResidualRow, ResidueStatus};
use super::tokens::{token_agreement, TokenAgreement};
use super::ClassifiedRecord;
use crate::error::Result;

/// Most frequent NP2E offsets kept in a report.
pub const TOP_EPSILONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSummary {
    pub kind: LabelKind,
    pub count: u64,
    /// Share of all predictions.
    pub fraction: f64,
    /// Share of incorrect predictions; `None` for `correct` or when there are
    /// no errors.
    pub error_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloseMissSummary {
    pub tier: CloseTier,
    pub bound: f64,
    pub count: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonCount {
    pub epsilon: i128,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub base: u32,
    pub total: u64,
    pub correct: u64,
    pub accuracy: f64,
    pub labels: Vec<LabelSummary>,
    pub close_misses: Vec<CloseMissSummary>,
    pub epsilons: Vec<EpsilonCount>,
    pub residual_classes: Vec<ResidualRow>,
    pub kk_matrix: KkMatrix,
    pub tokens: TokenAgreement,
    pub histogram: RatioHistogram,
}

impl Report {
    pub fn label(&self, kind: LabelKind) -> &LabelSummary {
        self.labels
            .iter()
            .find(|l| l.kind == kind)
            .expect("every kind is summarized")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let pct = |x: f64| x * 100.0;
        let _ = writeln!(out, "records   {}", self.total);
        let _ = writeln!(out, "base      {}", self.base);
        let _ = writeln!(out, "accuracy  {:.2}%", pct(self.accuracy));
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<18} {:>10} {:>9} {:>9}",
            "label", "count", "% preds", "% errors"
        );
        for l in &self.labels {
            let err = l
                .error_fraction
                .map_or("-".to_string(), |f| format!("{:.2}", pct(f)));
            let _ = writeln!(
                out,
                "{:<18} {:>10} {:>9.2} {:>9}",
                l.kind.name(),
                l.count,
                pct(l.fraction),
                err
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "close misses (by tightest tier)");
        for c in &self.close_misses {
            let _ = writeln!(
                out,
                "  < {:>4}% {:>10} {:>9.2}%",
                pct(c.bound),
                c.count,
                pct(c.fraction)
            );
        }
        if !self.epsilons.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "near power-of-two offsets");
            for e in &self.epsilons {
                let _ = writeln!(out, "  eps={:+} {}", e.epsilon, e.count);
            }
        }
        let t = &self.tokens;
        let _ = writeln!(out);
        let _ = writeln!(out, "token agreement over {} errors", t.errors);
        let _ = writeln!(
            out,
            "  pred_len {:.2}  matches {:.2}  prefix {:.2}  suffix {:.2}  prefix+suffix {:.2}",
            t.mean_pred_len,
            t.mean_matches,
            t.mean_prefix,
            t.mean_suffix,
            t.mean_prefix_plus_suffix
        );
        let flagged: Vec<&ResidualRow> = self
            .residual_classes
            .iter()
            .filter(|r| r.status == ResidueStatus::Learned)
            .collect();
        if let Some(bits) = flagged.iter().map(|r| r.bits).max() {
            let residues: Vec<String> = flagged
                .iter()
                .filter(|r| r.bits == bits)
                .map(|r| r.residue.to_string())
                .collect();
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "learned residues mod 2^{bits}: {}",
                residues.join(", ")
            );
        }
        if !self.histogram.modes.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "ratio modes");
            for m in self.histogram.modes.iter().take(15) {
                let at = m.lattice.map_or(String::new(), |p| {
                    format!("  (2/3)^{}·2^{}·B^-{}", p.a, p.l, p.d)
                });
                let _ = writeln!(
                    out,
                    "  {:>12.6} {:>8} {:>7.2}%{at}",
                    m.ratio,
                    m.count,
                    pct(m.mass)
                );
            }
        }
        out
    }
}

/// Aggregates classified records into a single report.
pub fn summary_report(
    records: &[ClassifiedRecord],
    config: &AnalyzerConfig,
    p_max: u32,
    bins_per_decade: u32,
) -> Result<Report> {
    let base = records.first().map_or(10, |r| r.record.base);
    let total = records.len() as u64;
    let mut counts: BTreeMap<LabelKind, u64> = BTreeMap::new();
    let mut tiers: BTreeMap<CloseTier, u64> = BTreeMap::new();
    let mut epsilons: BTreeMap<i128, u64> = BTreeMap::new();
    for r in records {
        *counts.entry(r.class.kind()).or_default() += 1;
        match r.class {
            ErrorClass::CloseMiss { tier } => *tiers.entry(tier).or_default() += 1,
            ErrorClass::NearPowerOfTwo { epsilon, .. } => {
                *epsilons.entry(epsilon).or_default() += 1
            }
            _ => {}
        }
    }
    let correct = counts.get(&LabelKind::Correct).copied().unwrap_or(0);
    let errors = total - correct;
    let share = |c: u64, of: u64| if of == 0 { 0.0 } else { c as f64 / of as f64 };

    let labels = LabelKind::ALL
        .into_iter()
        .map(|kind| {
            let count = counts.get(&kind).copied().unwrap_or(0);
            LabelSummary {
                kind,
                count,
                fraction: share(count, total),
                error_fraction: (kind != LabelKind::Correct && errors > 0)
                    .then(|| share(count, errors)),
            }
        })
        .collect();
    let close_misses = CloseTier::ALL
        .into_iter()
        .map(|tier| {
            let count = tiers.get(&tier).copied().unwrap_or(0);
            CloseMissSummary {
                tier,
                bound: tier.bound(),
                count,
                fraction: share(count, total),
            }
        })
        .collect();
    let mut epsilons: Vec<EpsilonCount> = epsilons
        .into_iter()
        .map(|(epsilon, count)| EpsilonCount { epsilon, count })
        .collect();
    epsilons.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then(a.epsilon.abs().cmp(&b.epsilon.abs()))
            .then(a.epsilon.cmp(&b.epsilon))
    });
    epsilons.truncate(TOP_EPSILONS);

    Ok(Report {
        base,
        total,
        correct,
        accuracy: share(correct, total),
        labels,
        close_misses,
        epsilons,
        residual_classes: residual_class_table(records, p_max, config)?,
        kk_matrix: kk_matrix(records),
        tokens: token_agreement(records),
        histogram: ratio_histogram(records, bins_per_decade, base)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{classify_records, PredictionRecord};
    use crate::collatz::long_step;

    fn records() -> Vec<ClassifiedRecord> {
        let mut recs = Vec::new();
        for n in (1..2000u64).step_by(2) {
            let t = long_step(n).unwrap().kappa;
            let p = match n % 8 {
                1 => t,
                3 => 2 * t,
                5 => 4 * t + 1,
                _ => 3 * t,
            };
            recs.push(PredictionRecord {
                n,
                target: t,
                prediction: p,
                base: 26,
            });
        }
        classify_records(&recs, &AnalyzerConfig::default())
    }

    #[test]
    fn fractions_partition() {
        let report = summary_report(&records(), &AnalyzerConfig::default(), 4, 20).unwrap();
        let sum: f64 = report.labels.iter().map(|l| l.fraction).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let err_sum: f64 = report.labels.iter().filter_map(|l| l.error_fraction).sum();
        assert!((err_sum - 1.0).abs() < 1e-12);
        assert_eq!(report.total, 1000);
        assert_eq!(report.correct, 250);
        assert_eq!(report.label(LabelKind::PowerOfTwo).count, 250);
    }

    #[test]
    fn serializes_and_renders() {
        let report = summary_report(&records(), &AnalyzerConfig::default(), 4, 20).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["total"], 1000);
        assert!(json["kk_matrix"]["cells"].is_array());
        let text = report.to_text();
        assert!(text.contains("accuracy  25.00%"));
        assert!(text.contains("power_of_two"));
    }

    #[test]
    fn order_independent() {
        let mut recs = records();
        let a = summary_report(&recs, &AnalyzerConfig::default(), 4, 20).unwrap();
        recs.reverse();
        let b = summary_report(&recs, &AnalyzerConfig::default(), 4, 20).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
