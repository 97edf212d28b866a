//! Closed-form model of what a trained network predicts.
//!
//! A [`Frontier`] records, for each `k` up to `k_max`, the largest `k'`
//! the model handles (`l'_k`). Inside the frontier the prediction is exact;
//! for a learned `k` with `k' > l'_k` it is `κ_{k,l'_k}(n) = 2^{k'−l'_k}·κ(n)`;
//! beyond `k_max` it is `κ_{k_max,1}(n)` rounded to an odd integer.

use std::io::Write;
use std::path::Path;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collatz::{kappa_restricted, long_step, round_to_odd};
use crate::datagen::{example_rng, sample_natural};
use crate::error::{Error, Result};
use crate::suffix::expected_accuracy;

pub const MAX_CANONICAL_STEP: u32 = 16;

/// The learned `(k, k')` classes: `k = 1..=k_max`, `k' <= l'_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frontier {
    /// `limits[k - 1] = l'_k`.
    limits: Vec<u32>,
}

impl Frontier {
    /// `k_max = step`, `l'_k = max(step − k, 1)`.
    pub fn canonical(step: u32) -> Result<Self> {
        if !(1..=MAX_CANONICAL_STEP).contains(&step) {
            return Err(Error::InvalidFrontier(format!(
                "canonical step {step} outside 1..={MAX_CANONICAL_STEP}"
            )));
        }
        Self::from_limits((1..=step).map(|k| step.saturating_sub(k).max(1)).collect())
    }

    /// Explicit `l'_1, l'_2, …`; must be non-empty, positive and
    /// non-increasing.
    pub fn from_limits(limits: Vec<u32>) -> Result<Self> {
        if limits.is_empty() {
            return Err(Error::InvalidFrontier("no learned k".into()));
        }
        if limits.contains(&0) {
            return Err(Error::InvalidFrontier(
                "every l'_k must be at least 1".into(),
            ));
        }
        if limits.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidFrontier(
                "l'_k must be non-increasing in k".into(),
            ));
        }
        Ok(Frontier { limits })
    }

    pub fn k_max(&self) -> u32 {
        self.limits.len() as u32
    }

    pub fn limit(&self, k: u32) -> Option<u32> {
        (k >= 1)
            .then(|| self.limits.get(k as usize - 1).copied())
            .flatten()
    }

    /// `(k, l'_k)` for `k = 1..=k_max`.
    pub fn limits(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.limits
            .iter()
            .enumerate()
            .map(|(i, &l)| (i as u32 + 1, l))
    }

    pub fn contains(&self, k: u32, k_prime: u32) -> bool {
        self.limit(k).is_some_and(|l| k_prime <= l)
    }

    /// Natural-distribution probability of a power-of-two error:
    /// `Σ_k 2^{−(k + l'_k)}`.
    pub fn expected_power_of_two_fraction(&self) -> f64 {
        self.limits()
            .map(|(k, l)| 2f64.powi(-((k + l) as i32)))
            .sum()
    }

    /// Natural-distribution probability that `k > k_max`.
    pub fn expected_hard_fraction(&self) -> f64 {
        2f64.powi(-(self.k_max() as i32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityMode {
    /// Emit power-of-two predictions as computed (even).
    #[default]
    Free,
    /// Add one to even power-of-two predictions.
    ForceOdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmulatedLabel {
    Correct,
    PowerOfTwo { l: u32 },
    Hard { a: u32, l: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmulatedPrediction {
    pub n: u64,
    pub target: u128,
    pub prediction: u128,
    pub label: EmulatedLabel,
    pub parity_mode: ParityMode,
}

pub fn predict(n: u64, frontier: &Frontier, parity_mode: ParityMode) -> Result<EmulatedPrediction> {
    let step = long_step(n)?;
    let (k, k_prime) = (step.k, step.k_prime);
    let (prediction, label) = match frontier.limit(k) {
        Some(limit) if k_prime <= limit => (step.kappa, EmulatedLabel::Correct),
        Some(limit) => {
            let shift = k_prime - limit;
            let value = step.kappa << shift;
            let value = match parity_mode {
                ParityMode::Free => value,
                ParityMode::ForceOdd => value + 1,
            };
            (value, EmulatedLabel::PowerOfTwo { l: shift })
        }
        None => {
            let approx = kappa_restricted(n, frontier.k_max(), 1)?;
            let value = round_to_odd(&approx)?
                .to_u128()
                .expect("κ_{k_max,1}(n) for n <= 2^63 fits in 128 bits");
            (
                value,
                EmulatedLabel::Hard {
                    a: k - frontier.k_max(),
                    l: k_prime - 1,
                },
            )
        }
    };
    Ok(EmulatedPrediction {
        n,
        target: step.kappa,
        prediction,
        label,
        parity_mode,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierReport {
    pub count: usize,
    pub accuracy: f64,
    pub p2e_fraction: f64,
    pub hard_fraction: f64,
    pub expected_accuracy: f64,
    pub expected_p2e_fraction: f64,
    pub expected_hard_fraction: f64,
}

pub fn evaluate_frontier(frontier: &Frontier, sample: &[u64]) -> Result<FrontierReport> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument("sample must be non-empty".into()));
    }
    let counts = sample
        .par_iter()
        .map(|&n| {
            predict(n, frontier, ParityMode::Free).map(|p| match p.label {
                EmulatedLabel::Correct => [1usize, 0, 0],
                EmulatedLabel::PowerOfTwo { .. } => [0, 1, 0],
                EmulatedLabel::Hard { .. } => [0, 0, 1],
            })
        })
        .try_reduce(
            || [0, 0, 0],
            |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]),
        )?;
    let total = sample.len() as f64;
    Ok(FrontierReport {
        count: sample.len(),
        accuracy: counts[0] as f64 / total,
        p2e_fraction: counts[1] as f64 / total,
        hard_fraction: counts[2] as f64 / total,
        expected_accuracy: expected_accuracy(frontier).to_f64(),
        expected_p2e_fraction: frontier.expected_power_of_two_fraction(),
        expected_hard_fraction: frontier.expected_hard_fraction(),
    })
}

/// Settings for a batch of emulated predictions on natural-distribution
/// inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmulationSpec {
    pub frontier: Frontier,
    pub parity_mode: ParityMode,
    pub count: usize,
    pub seed: u64,
    pub n_max: u64,
    /// Inputs `<= min_n` are redrawn.
    pub min_n: u64,
}

impl EmulationSpec {
    pub fn new(frontier: Frontier, count: usize, seed: u64) -> Self {
        EmulationSpec {
            frontier,
            parity_mode: ParityMode::Free,
            count,
            seed,
            n_max: crate::datagen::DEFAULT_N_MAX,
            min_n: 0,
        }
    }
}

/// Draws natural inputs (one counter-based stream per index) and predicts
/// each. Deterministic in `(spec, seed)` whatever the thread count.
pub fn emulate(spec: &EmulationSpec) -> Result<Vec<EmulatedPrediction>> {
    if spec.count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if spec.n_max < 3 || spec.min_n >= spec.n_max - 1 {
        return Err(Error::InvalidArgument(format!(
            "need 3 <= n_max and min_n < n_max - 1 (n_max={}, min_n={})",
            spec.n_max, spec.min_n
        )));
    }
    (0..spec.count as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = example_rng(spec.seed, index);
            let n = loop {
                let n = sample_natural(&mut rng, spec.n_max);
                if n > spec.min_n {
                    break n;
                }
            };
            predict(n, &spec.frontier, spec.parity_mode)
        })
        .collect()
}

/// Writes `n<TAB>target<TAB>prediction` lines.
pub fn write_predictions<W: Write>(
    predictions: &[EmulatedPrediction],
    mut out: W,
) -> std::io::Result<()> {
    for p in predictions {
        writeln!(out, "{}\t{}\t{}", p.n, p.target, p.prediction)?;
    }
    out.flush()
}

pub fn write_predictions_file(predictions: &[EmulatedPrediction], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_predictions(predictions, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}
