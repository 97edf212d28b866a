//! Exhaustive checks of the loop-length theory over bounded ranges.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collatz::{kappa_restricted, long_step, long_step_by_parity, ExactRational, MAX_INPUT};
use crate::emulator::Frontier;
use crate::error::{Error, Result};
use crate::suffix::{
    expected_accuracy, h_sequence, loop_lengths_from_suffix, minimal_period, period,
};

/// Below this bound the range check also evaluates `κ_{k,k'}` exactly.
const RESTRICTED_CHECK_LIMIT: u64 = 1 << 16;
const MAX_K: usize = 64;
const MAX_K_PRIME: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub failures: u64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, checked: u64, failures: u64, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: failures == 0,
            checked,
            failures,
            detail,
        }
    }
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {} checked={} failures={}",
            self.name, self.checked, self.failures
        )?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

fn odd_range(max_n: u64) -> impl ParallelIterator<Item = u64> {
    (0..max_n / 2).into_par_iter().map(|i| 2 * i + 1)
}

fn check_one(n: u64) -> Option<String> {
    let direct = long_step(n).ok()?;
    match long_step_by_parity(n) {
        Ok(r) if r == direct => {}
        _ => return Some(format!("n={n}: the two step algorithms disagree")),
    }
    if loop_lengths_from_suffix(n).ok()? != (direct.k, direct.k_prime) {
        return Some(format!("n={n}: suffix oracle disagrees"));
    }
    if direct.kappa % 2 == 0 || direct.kappa << direct.k_prime != direct.apex {
        return Some(format!("n={n}: kappa/apex relation broken"));
    }
    if direct.kappa > MAX_INPUT as u128 || long_step(direct.kappa as u64).is_err() {
        return Some(format!(
            "n={n}: successor {} is not a valid input",
            direct.kappa
        ));
    }
    if n < RESTRICTED_CHECK_LIMIT {
        let exact = kappa_restricted(n, direct.k, direct.k_prime).ok()?;
        if exact != ExactRational::from_integer(direct.kappa) {
            return Some(format!("n={n}: restricted kappa differs"));
        }
    }
    None
}

/// Both step algorithms, the suffix oracle, and the successor relations for
/// every odd `n < max_n`.
pub fn theorem_range(max_n: u64) -> Result<CheckResult> {
    if !(2..=MAX_INPUT).contains(&max_n) {
        return Err(Error::InvalidArgument(format!(
            "max_n {max_n} outside [2, 2^63]"
        )));
    }
    let (failures, first) = odd_range(max_n)
        .map(|n| match check_one(n) {
            Some(msg) => (1u64, Some((n, msg))),
            None => (0, None),
        })
        .reduce(
            || (0, None),
            |a, b| {
                let first = match (a.1, b.1) {
                    (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                    (x, y) => x.or(y),
                };
                (a.0 + b.0, first)
            },
        );
    let detail = first.map_or(String::new(), |(_, msg)| format!("first: {msg}"));
    Ok(CheckResult::new(
        "oracle-equivalence",
        max_n / 2,
        failures,
        detail,
    ))
}

/// Minimal period of `a_{l,j}` equals `2·3^{l−1}` for `l = 1..=max_level`.
pub fn lemma_periods(max_level: u32) -> Result<CheckResult> {
    if !(1..=12).contains(&max_level) {
        return Err(Error::InvalidArgument(format!(
            "max_level {max_level} outside 1..=12"
        )));
    }
    let bad: Vec<String> = (1..=max_level)
        .filter_map(|l| {
            let found = minimal_period(l);
            (found != period(l)).then(|| format!("l={l}: period {found}"))
        })
        .collect();
    Ok(CheckResult::new(
        "minimal-period",
        max_level as u64,
        bad.len() as u64,
        bad.join("; "),
    ))
}

pub const H_STRINGS: [&str; 3] = ["10", "111000", "111101101000010010"];

pub fn h_strings() -> CheckResult {
    let bad: Vec<String> = H_STRINGS
        .iter()
        .zip(1u32..)
        .filter_map(|(&expected, l)| {
            let got = h_sequence(l)
                .map(|h| h.to_reversed_string())
                .unwrap_or_default();
            (got != expected).then(|| format!("l={l}: {got}"))
        })
        .collect();
    CheckResult::new(
        "h-sequences",
        H_STRINGS.len() as u64,
        bad.len() as u64,
        bad.join("; "),
    )
}

/// Counts of odd `n < 2^bits` per `(k, k')`, indexed `[k][k']`.
pub fn class_counts(bits: u32) -> Result<Vec<Vec<u64>>> {
    if !(2..=40).contains(&bits) {
        return Err(Error::InvalidArgument(format!(
            "bits {bits} outside 2..=40"
        )));
    }
    let flat = odd_range(1u64 << bits)
        .fold(
            || vec![0u64; MAX_K * MAX_K_PRIME],
            |mut acc, n| {
                let r = long_step(n).expect("odd input in range");
                acc[r.k as usize * MAX_K_PRIME + (r.k_prime as usize).min(MAX_K_PRIME - 1)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; MAX_K * MAX_K_PRIME],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(flat.chunks(MAX_K_PRIME).map(<[u64]>::to_vec).collect())
}

/// `#{(k,k') = (a,b)}` over odd `n < 2^bits` is `2^{bits−1−(a+b)}` within
/// one, for `a + b <= max_sum`.
pub fn corollary_counts(counts: &[Vec<u64>], bits: u32, max_sum: u32) -> CheckResult {
    let mut checked = 0;
    let mut bad = Vec::new();
    for a in 1..max_sum {
        for b in 1..=max_sum - a {
            let expected = 1i64 << (bits - 1 - (a + b));
            let got = counts[a as usize][b as usize] as i64;
            checked += 1;
            if (got - expected).abs() > 1 {
                bad.push(format!("({a},{b}): {got} vs {expected}"));
            }
        }
    }
    CheckResult::new("class-counts", checked, bad.len() as u64, bad.join("; "))
}

pub const LEVELS: [(u64, u64); 5] = [(1, 4), (3, 8), (9, 16), (23, 32), (53, 64)];

/// Exact expected accuracy of the first canonical frontiers, and the
/// brute-force share of odd `n < 2^bits` falling in each.
pub fn quantized_levels(counts: &[Vec<u64>], bits: u32) -> Result<CheckResult> {
    let total: u64 = 1 << (bits - 1);
    let mut bad = Vec::new();
    let mut shares = Vec::new();
    for (step, &(num, den)) in (1u32..).zip(LEVELS.iter()) {
        let frontier = Frontier::canonical(step)?;
        if expected_accuracy(&frontier) != ExactRational::new(num, den) {
            bad.push(format!(
                "step {step}: exact {}",
                expected_accuracy(&frontier)
            ));
        }
        let hits: u64 = frontier
            .limits()
            .flat_map(|(k, limit)| (1..=limit).map(move |kp| (k, kp)))
            .map(|(k, kp)| counts[k as usize][kp as usize])
            .sum();
        let share = ExactRational::new(hits, total);
        if share != ExactRational::new(num, den) {
            bad.push(format!("step {step}: counted {share}"));
        }
        shares.push(format!("{hits}/{total}"));
    }
    Ok(CheckResult::new(
        "quantized-levels",
        LEVELS.len() as u64 * 2,
        bad.len() as u64,
        {
            let mut d = format!("counted [{}]", shares.join(", "));
            if !bad.is_empty() {
                d.push_str(&format!("; {}", bad.join("; ")));
            }
            d
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub max_n: u64,
    pub count_bits: u32,
    pub max_level: u32,
    pub max_sum: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_n: 1 << 22,
            count_bits: 24,
            max_level: 6,
            max_sum: 12,
        }
    }
}

pub fn run_all(options: &VerifyOptions) -> Result<Vec<CheckResult>> {
    if options.max_sum + 1 > options.count_bits {
        return Err(Error::InvalidArgument(format!(
            "max_sum {} needs count_bits > {}",
            options.max_sum, options.max_sum
        )));
    }
    let counts = class_counts(options.count_bits)?;
    Ok(vec![
        theorem_range(options.max_n)?,
        h_strings(),
        lemma_periods(options.max_level)?,
        corollary_counts(&counts, options.count_bits, options.max_sum),
        quantized_levels(&counts, options.count_bits)?,
    ])
}
