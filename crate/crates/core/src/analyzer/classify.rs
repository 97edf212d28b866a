use std::fmt;

use serde::{Deserialize, Serialize};

use super::PredictionRecord;

/// Tolerances and search ranges of the error taxonomy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerConfig {
    /// Bound on `|ε|/p` for near power-of-two errors.
    pub near_power_tolerance: f64,
    /// Bound on `|p·B^d/(2^l·t) − 1|` for truncated outputs.
    pub truncated_tolerance: f64,
    /// Bound on `|p/((2/3)^a·2^l·t) − 1|` for hard errors.
    pub hard_tolerance: f64,
    pub max_hard_a: u32,
    pub max_l: u32,
    pub learned_threshold: f64,
    pub unlearned_threshold: f64,
    pub min_support: u64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig {
            near_power_tolerance: 1e-3,
            truncated_tolerance: 1e-3,
            hard_tolerance: 1e-2,
            max_hard_a: 12,
            max_l: 40,
            learned_threshold: 0.95,
            unlearned_threshold: 0.01,
            min_support: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CloseTier {
    /// Within 0.1%.
    Tenth,
    /// Within 1%.
    One,
    /// Within 3%.
    Three,
}

impl CloseTier {
    pub const ALL: [CloseTier; 3] = [CloseTier::Tenth, CloseTier::One, CloseTier::Three];

    pub fn bound(self) -> f64 {
        match self {
            CloseTier::Tenth => 1e-3,
            CloseTier::One => 1e-2,
            CloseTier::Three => 3e-2,
        }
    }
}

/// One label per record. Checked in the order Correct, PowerOfTwo,
/// NearPowerOfTwo, Truncated, Hard, CloseMiss, Other; the first match wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorClass {
    Correct,
    /// `p = 2^l·t`, `l >= 1`.
    PowerOfTwo {
        l: u32,
    },
    /// `p = 2^l·t + ε`, `l >= 1`, `ε ≠ 0`, `|ε|/p` small.
    NearPowerOfTwo {
        l: u32,
        epsilon: i128,
    },
    /// `p ≈ 2^l·t / B^depth` with `2^l < B^depth`.
    Truncated {
        l: u32,
        depth: u32,
    },
    /// `p ≈ (2/3)^a·2^l·t`.
    Hard {
        a: u32,
        l: u32,
    },
    CloseMiss {
        tier: CloseTier,
    },
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Correct,
    PowerOfTwo,
    NearPowerOfTwo,
    Truncated,
    Hard,
    CloseMiss,
    Other,
}

impl LabelKind {
    pub const ALL: [LabelKind; 7] = [
        LabelKind::Correct,
        LabelKind::PowerOfTwo,
        LabelKind::NearPowerOfTwo,
        LabelKind::Truncated,
        LabelKind::Hard,
        LabelKind::CloseMiss,
        LabelKind::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LabelKind::Correct => "correct",
            LabelKind::PowerOfTwo => "power_of_two",
            LabelKind::NearPowerOfTwo => "near_power_of_two",
            LabelKind::Truncated => "truncated",
            LabelKind::Hard => "hard",
            LabelKind::CloseMiss => "close_miss",
            LabelKind::Other => "other",
        }
    }
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl ErrorClass {
    pub fn kind(&self) -> LabelKind {
        match self {
            ErrorClass::Correct => LabelKind::Correct,
            ErrorClass::PowerOfTwo { .. } => LabelKind::PowerOfTwo,
            ErrorClass::NearPowerOfTwo { .. } => LabelKind::NearPowerOfTwo,
            ErrorClass::Truncated { .. } => LabelKind::Truncated,
            ErrorClass::Hard { .. } => LabelKind::Hard,
            ErrorClass::CloseMiss { .. } => LabelKind::CloseMiss,
            ErrorClass::Other => LabelKind::Other,
        }
    }

    pub fn is_correct(&self) -> bool {
        matches!(self, ErrorClass::Correct)
    }
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorClass::Correct => write!(f, "correct"),
            ErrorClass::PowerOfTwo { l } => write!(f, "power_of_two(l={l})"),
            ErrorClass::NearPowerOfTwo { l, epsilon } => {
                write!(f, "near_power_of_two(l={l}, eps={epsilon:+})")
            }
            ErrorClass::Truncated { l, depth } => write!(f, "truncated(l={l}, depth={depth})"),
            ErrorClass::Hard { a, l } => write!(f, "hard(a={a}, l={l})"),
            ErrorClass::CloseMiss { tier } => write!(f, "close_miss(<{}%)", tier.bound() * 100.0),
            ErrorClass::Other => write!(f, "other"),
        }
    }
}

fn nearest_exponent(x: f64) -> Option<u32> {
    let l = x.log2().round();
    (l.is_finite() && (0.0..=127.0).contains(&l)).then_some(l as u32)
}

fn near_power_of_two(p: u128, t: u128, ratio: f64, config: &AnalyzerConfig) -> Option<ErrorClass> {
    let centre = nearest_exponent(ratio)?;
    (centre.saturating_sub(1)..=centre + 1)
        .filter(|&l| l >= 1 && t.leading_zeros() >= l)
        .filter_map(|l| {
            let scaled = t << l;
            let diff = p.abs_diff(scaled);
            let epsilon = i128::try_from(diff).ok()?;
            let epsilon = if p >= scaled { epsilon } else { -epsilon };
            (diff != 0 && (diff as f64) < config.near_power_tolerance * p as f64)
                .then_some((diff, l, epsilon))
        })
        .min()
        .map(|(_, l, epsilon)| ErrorClass::NearPowerOfTwo { l, epsilon })
}

fn truncated(ratio: f64, base: u32, config: &AnalyzerConfig) -> Option<ErrorClass> {
    (1..=2u32).find_map(|depth| {
        let scale = (base as f64).powi(depth as i32);
        let x = ratio * scale;
        let l = nearest_exponent(x).filter(|&l| l <= config.max_l)?;
        let power = 2f64.powi(l as i32);
        (power < scale && (x / power - 1.0).abs() < config.truncated_tolerance)
            .then_some(ErrorClass::Truncated { l, depth })
    })
}

fn hard(ratio: f64, config: &AnalyzerConfig) -> Option<ErrorClass> {
    (1..=config.max_hard_a).find_map(|a| {
        let x = ratio * 1.5f64.powi(a as i32);
        let l = nearest_exponent(x).filter(|&l| l <= config.max_l)?;
        ((x / 2f64.powi(l as i32) - 1.0).abs() < config.hard_tolerance)
            .then_some(ErrorClass::Hard { a, l })
    })
}

/// Labels one record. Total: every record gets exactly one class.
pub fn classify(record: &PredictionRecord, config: &AnalyzerConfig) -> ErrorClass {
    let (p, t) = (record.prediction, record.target);
    if p == t {
        return ErrorClass::Correct;
    }
    if p == 0 || t == 0 {
        return ErrorClass::Other;
    }
    if p > t && p % t == 0 && (p / t).is_power_of_two() {
        return ErrorClass::PowerOfTwo {
            l: (p / t).trailing_zeros(),
        };
    }
    let ratio = p as f64 / t as f64;
    near_power_of_two(p, t, ratio, config)
        .or_else(|| truncated(ratio, record.base, config))
        .or_else(|| hard(ratio, config))
        .or_else(|| {
            let miss = (ratio - 1.0).abs();
            CloseTier::ALL
                .into_iter()
                .find(|tier| miss < tier.bound())
                .map(|tier| ErrorClass::CloseMiss { tier })
        })
        .unwrap_or(ErrorClass::Other)
}
