use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ClassifiedRecord;
use crate::error::{Error, Result};

/// Relative distance within which a mode is identified with a lattice point.
pub const SNAP_TOLERANCE: f64 = 0.005;
const MAX_A: u32 = 12;
const MAX_L: u32 = 40;
const MAX_DEPTH: u32 = 2;

/// `(2/3)^a · 2^l · B^{-d}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub a: u32,
    pub l: u32,
    pub d: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioBin {
    pub index: i64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioMode {
    /// Geometric mean of the ratios in the peak bin.
    pub ratio: f64,
    pub peak_index: i64,
    /// Records attributed to this mode (its basin of attraction).
    pub count: u64,
    pub mass: f64,
    pub lattice: Option<LatticePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioHistogram {
    pub bins_per_decade: u32,
    pub base: u32,
    pub total: u64,
    pub bins: Vec<RatioBin>,
    /// Sorted by decreasing count, then by ratio.
    pub modes: Vec<RatioMode>,
}

impl RatioHistogram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin,ratio_lo,ratio_hi,count,fraction\n");
        for b in &self.bins {
            let fraction = if self.total == 0 {
                0.0
            } else {
                b.count as f64 / self.total as f64
            };
            let _ = writeln!(
                out,
                "{},{:e},{:e},{},{}",
                b.index, b.ratio_lo, b.ratio_hi, b.count, fraction
            );
        }
        out
    }

    pub fn modes_csv(&self) -> String {
        let mut out = String::from("ratio,count,mass,a,l,d,lattice_value\n");
        for m in &self.modes {
            let _ = match m.lattice {
                Some(p) => writeln!(
                    out,
                    "{:e},{},{},{},{},{},{:e}",
                    m.ratio, m.count, m.mass, p.a, p.l, p.d, p.value
                ),
                None => writeln!(out, "{:e},{},{},,,,", m.ratio, m.count, m.mass),
            };
        }
        out
    }
}

/// Nearest point of the `(2/3)^a·2^l·B^{-d}` lattice, if within
/// [`SNAP_TOLERANCE`].
pub fn snap_to_lattice(ratio: f64, base: u32) -> Option<LatticePoint> {
    let mut best: Option<(f64, LatticePoint)> = None;
    for d in 0..=MAX_DEPTH {
        for a in 0..=MAX_A {
            let scaled = ratio * 1.5f64.powi(a as i32) * (base as f64).powi(d as i32);
            let l = scaled.log2().round();
            if !(0.0..=MAX_L as f64).contains(&l) {
                continue;
            }
            let value =
                (2.0f64 / 3.0).powi(a as i32) * 2f64.powi(l as i32) / (base as f64).powi(d as i32);
            let err = (ratio / value - 1.0).abs();
            if best.as_ref().is_none_or(|(e, _)| err < *e) {
                best = Some((
                    err,
                    LatticePoint {
                        a,
                        l: l as u32,
                        d,
                        value,
                    },
                ));
            }
        }
    }
    best.filter(|(e, _)| *e < SNAP_TOLERANCE).map(|(_, p)| p)
}

/// Log-scale histogram of `p/t` over incorrect records with a positive
/// prediction, with its modes.
pub fn ratio_histogram(
    records: &[ClassifiedRecord],
    bins_per_decade: u32,
    base: u32,
) -> Result<RatioHistogram> {
    if bins_per_decade == 0 {
        return Err(Error::InvalidArgument(
            "bins_per_decade must be positive".into(),
        ));
    }
    let bpd = bins_per_decade as f64;
    let mut by_bin: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for r in records {
        if r.class.is_correct() || r.record.prediction == 0 {
            continue;
        }
        let log_ratio = (r.record.prediction as f64).log10() - (r.record.target as f64).log10();
        let index = (log_ratio * bpd).floor() as i64;
        by_bin.entry(index).or_default().push(log_ratio);
    }
    let total: u64 = by_bin.values().map(|v| v.len() as u64).sum();
    let (Some(&first), Some(&last)) = (by_bin.keys().next(), by_bin.keys().next_back()) else {
        return Ok(RatioHistogram {
            bins_per_decade,
            base,
            total,
            bins: Vec::new(),
            modes: Vec::new(),
        });
    };

    let count_at = |i: i64| by_bin.get(&i).map_or(0, |v| v.len() as u64);
    let bins: Vec<RatioBin> = (first..=last)
        .map(|index| RatioBin {
            index,
            ratio_lo: 10f64.powf(index as f64 / bpd),
            ratio_hi: 10f64.powf((index + 1) as f64 / bpd),
            count: count_at(index),
        })
        .collect();

    // Each occupied bin climbs to its larger neighbour until it reaches a
    // peak; a mode's mass is everything that climbs to it.
    let mut basin: BTreeMap<i64, u64> = BTreeMap::new();
    for (&index, values) in &by_bin {
        let mut at = index;
        loop {
            let here = count_at(at);
            let (left, right) = (count_at(at - 1), count_at(at + 1));
            if right > here && right >= left {
                at += 1;
            } else if left > here {
                at -= 1;
            } else {
                break;
            }
        }
        *basin.entry(at).or_default() += values.len() as u64;
    }

    let mut modes: Vec<RatioMode> = basin
        .into_iter()
        .map(|(peak, count)| {
            let mut logs = by_bin[&peak].clone();
            logs.sort_by(f64::total_cmp);
            let ratio = 10f64.powf(logs.iter().sum::<f64>() / logs.len() as f64);
            RatioMode {
                ratio,
                peak_index: peak,
                count,
                mass: count as f64 / total as f64,
                lattice: snap_to_lattice(ratio, base),
            }
        })
        .collect();
    modes.sort_by(|a, b| b.count.cmp(&a.count).then(a.ratio.total_cmp(&b.ratio)));

    Ok(RatioHistogram {
        bins_per_decade,
        base,
        total,
        bins,
        modes,
    })
}
