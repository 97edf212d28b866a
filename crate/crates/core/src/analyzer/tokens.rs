use serde::{Deserialize, Serialize};

use super::ClassifiedRecord;
use crate::codec::encode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitAgreement {
    pub pred_len: usize,
    /// Digits equal at the same position counted from the left.
    pub matches: usize,
    pub prefix: usize,
    pub suffix: usize,
}

pub fn digit_agreement(prediction: &[u32], target: &[u32]) -> DigitAgreement {
    let prefix = prediction
        .iter()
        .zip(target)
        .take_while(|(a, b)| a == b)
        .count();
    let suffix = prediction
        .iter()
        .rev()
        .zip(target.iter().rev())
        .take_while(|(a, b)| a == b)
        .count();
    let matches = prediction
        .iter()
        .zip(target)
        .filter(|(a, b)| a == b)
        .count();
    DigitAgreement {
        pred_len: prediction.len(),
        matches,
        prefix,
        suffix,
    }
}

/// Mean agreement between predicted and target digit strings, over
/// incorrect records with a decodable prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenAgreement {
    pub errors: usize,
    pub mean_pred_len: f64,
    pub mean_matches: f64,
    pub mean_prefix: f64,
    pub mean_suffix: f64,
    /// `prefix + suffix`, capped at the shorter length.
    pub mean_prefix_plus_suffix: f64,
}

pub fn token_agreement(records: &[ClassifiedRecord]) -> TokenAgreement {
    let mut sums = [0usize; 5];
    let mut errors = 0usize;
    for r in records {
        let rec = &r.record;
        if r.class.is_correct() || rec.prediction == 0 {
            continue;
        }
        let pred = encode(rec.prediction, rec.base).expect("validated base");
        let target = encode(rec.target, rec.base).expect("validated base");
        let a = digit_agreement(pred.digits(), target.digits());
        let shorter = pred.len().min(target.len());
        sums[0] += a.pred_len;
        sums[1] += a.matches;
        sums[2] += a.prefix;
        sums[3] += a.suffix;
        sums[4] += (a.prefix + a.suffix).min(shorter);
        errors += 1;
    }
    let mean = |s: usize| {
        if errors == 0 {
            0.0
        } else {
            s as f64 / errors as f64
        }
    };
    TokenAgreement {
        errors,
        mean_pred_len: mean(sums[0]),
        mean_matches: mean(sums[1]),
        mean_prefix: mean(sums[2]),
        mean_suffix: mean(sums[3]),
        mean_prefix_plus_suffix: mean(sums[4]),
    }
}
