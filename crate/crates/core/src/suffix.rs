//! Reading the loop lengths `(k, k')` straight off the binary form of `n`.
//!
//! For a level `l`, the sequence `a_{l,j} = 2^{-j}·(3^l − 1) mod 3^l` obeys
//! `a_{l,0} = 3^l − 1`, `a_{l,j+1} = a/2` when `a` is even and `(a + 3^l)/2`
//! when odd. Its parities `h_j` are periodic with period `2·3^{l−1}`.
//! An odd `n` with `k` trailing ones has `k' = j` exactly when bits
//! `k .. k+j−1` of `n` equal `h_0 .. h_{j−1}` and bit `k+j` differs from
//! `h_j`.

use serde::{Deserialize, Serialize};

use crate::collatz::{self, ExactRational};
use crate::emulator::Frontier;
use crate::error::{Error, Result};

/// Highest level that can be materialized as a [`ParitySequence`].
pub const MAX_MATERIALIZED_LEVEL: u32 = 20;

/// Highest level the streaming path supports (`2·3^l` must fit in a `u128`).
pub const MAX_STREAM_LEVEL: u32 = 80;

/// `Φ(3^l) = 2·3^{l−1}`.
pub fn period(l: u32) -> u64 {
    assert!(
        (1..=40).contains(&l),
        "period only defined here for 1 <= l <= 40"
    );
    2 * 3u64.pow(l - 1)
}

fn check_level(l: u32) -> Result<()> {
    if (1..=MAX_MATERIALIZED_LEVEL).contains(&l) {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(l))
    }
}

/// Lazy generator of `a_{l,j}` via the halving recurrence.
#[derive(Debug, Clone)]
pub struct ASequence {
    modulus: u128,
    current: u128,
}

impl ASequence {
    pub fn new(l: u32) -> Self {
        assert!(
            (1..=MAX_STREAM_LEVEL).contains(&l),
            "stream level {l} outside 1..={MAX_STREAM_LEVEL}"
        );
        let modulus = 3u128.pow(l);
        ASequence {
            modulus,
            current: modulus - 1,
        }
    }
}

impl Iterator for ASequence {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        let value = self.current;
        self.current = if value.is_multiple_of(2) {
            value / 2
        } else {
            (value + self.modulus) / 2
        };
        Some(value)
    }
}

/// Infinite stream of parities `h_0, h_1, …` for one level.
pub fn parity_stream(l: u32) -> impl Iterator<Item = u8> {
    ASequence::new(l).map(|a| (a % 2) as u8)
}

/// First `count` terms of `a_{l,j}`.
pub fn a_sequence(l: u32, count: usize) -> Result<Vec<u64>> {
    check_level(l)?;
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    Ok(ASequence::new(l).take(count).map(|a| a as u64).collect())
}

/// Smallest `p > 0` with `a_{l,p} = a_{l,0}`, found by running the recurrence.
pub fn minimal_period(l: u32) -> u64 {
    let mut seq = ASequence::new(l);
    let start = seq.next().expect("infinite sequence");
    let steps = seq
        .position(|value| value == start)
        .expect("infinite sequence");
    steps as u64 + 1
}

/// Multiplicative order of `base` modulo `modulus`, by trial over the
/// divisors of `phi` (which must be a multiple of the order).
pub fn multiplicative_order(base: u64, modulus: u64, phi: u64) -> u64 {
    let pow_mod = |mut b: u128, mut e: u64| {
        let m = modulus as u128;
        let mut acc = 1u128 % m;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        acc
    };
    let mut divisors: Vec<u64> = (1..=phi)
        .take_while(|d| d * d <= phi)
        .filter(|d| phi.is_multiple_of(*d))
        .flat_map(|d| [d, phi / d])
        .collect();
    divisors.sort_unstable();
    divisors
        .into_iter()
        .find(|&d| pow_mod(base as u128, d) == 1)
        .unwrap_or(phi)
}

/// The parities `h_0 … h_{Φ−1}` for one level, bit-packed in generation
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySequence {
    l: u32,
    len: u64,
    words: Vec<u64>,
}

impl ParitySequence {
    pub fn level(&self) -> u32 {
        self.l
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `h_j`.
    pub fn bit(&self, j: u64) -> u8 {
        assert!(j < self.len, "index {j} out of range {}", self.len);
        ((self.words[(j / 64) as usize] >> (j % 64)) & 1) as u8
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |j| self.bit(j))
    }

    /// `H_l` as conventionally written: `h_{Φ−1} … h_1 h_0`.
    pub fn to_reversed_string(&self) -> String {
        (0..self.len)
            .rev()
            .map(|j| if self.bit(j) == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Materializes the full parity sequence for level `l` (1..=20).
pub fn h_sequence(l: u32) -> Result<ParitySequence> {
    check_level(l)?;
    let len = period(l);
    let mut words = vec![0u64; len.div_ceil(64) as usize];
    for (j, h) in parity_stream(l).take(len as usize).enumerate() {
        words[j / 64] |= (h as u64) << (j % 64);
    }
    Ok(ParitySequence { l, len, words })
}

fn bit_of(n: u64, i: u32) -> u8 {
    if i >= 64 {
        0
    } else {
        ((n >> i) & 1) as u8
    }
}

/// `(k, k')` of an odd `n`, from its bits alone. Bits above the top of `n`
/// read as zero.
pub fn loop_lengths_from_suffix(n: u64) -> Result<(u32, u32)> {
    collatz::check_input(n)?;
    let k = n.trailing_ones();
    let mut k_prime = 0u32;
    for h in parity_stream(k) {
        if bit_of(n, k + k_prime) != h {
            break;
        }
        k_prime += 1;
    }
    Ok((k, k_prime))
}

/// The binary ending shared by exactly the odd integers with loop lengths
/// `(k, k')`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassSuffix {
    pub k: u32,
    pub k_prime: u32,
    /// Most significant bit first; length `k + k' + 1`.
    pub suffix: String,
}

impl ClassSuffix {
    pub fn bit_len(&self) -> usize {
        self.suffix.len()
    }

    /// Whether the binary form of `n` (with implicit leading zeros) ends in
    /// this suffix.
    pub fn matches(&self, n: u64) -> bool {
        self.suffix
            .bytes()
            .rev()
            .enumerate()
            .all(|(i, c)| bit_of(n, i as u32) == c - b'0')
    }

    /// `(p, r)` such that the suffix is the class `n ≡ r (mod 2^p)`, when
    /// `p <= 63`.
    pub fn residue(&self) -> Option<(u32, u64)> {
        let p = self.bit_len() as u32;
        if p > 63 {
            return None;
        }
        let r = self
            .suffix
            .bytes()
            .fold(0u64, |acc, c| (acc << 1) | (c - b'0') as u64);
        Some((p, r))
    }
}

/// Largest `k'` accepted by [`class_suffix`].
pub const MAX_SUFFIX_K_PRIME: u32 = 1 << 16;

/// Any `k' >= 1` is accepted, including `k' >= 2·3^{k−1}`: the parity
/// stream is periodic, so the suffix simply runs past one period.
pub fn class_suffix(k: u32, k_prime: u32) -> Result<ClassSuffix> {
    if !(1..=MAX_MATERIALIZED_LEVEL).contains(&k) || !(1..=MAX_SUFFIX_K_PRIME).contains(&k_prime) {
        return Err(Error::ClassOutOfRange { k, k_prime });
    }
    let mut right_to_left: Vec<u8> = vec![1; k as usize];
    let mut stream = parity_stream(k);
    right_to_left.extend(stream.by_ref().take(k_prime as usize));
    let next = stream.next().expect("infinite stream");
    right_to_left.push(1 - next);
    let suffix = right_to_left
        .iter()
        .rev()
        .map(|&b| if b == 1 { '1' } else { '0' })
        .collect();
    Ok(ClassSuffix { k, k_prime, suffix })
}

/// `P(k, k') = 2^{-(k + k')}` for uniformly drawn odd inputs.
pub fn class_probability(k: u32, k_prime: u32) -> Result<ExactRational> {
    if k == 0 || k_prime == 0 {
        return Err(Error::ClassOutOfRange { k, k_prime });
    }
    Ok(ExactRational::dyadic(k + k_prime))
}

/// Probability that a natural-distribution input lies in a class the
/// frontier predicts exactly: `Σ_k 2^{-k}·(1 − 2^{-l'_k})`.
pub fn expected_accuracy(frontier: &Frontier) -> ExactRational {
    frontier
        .limits()
        .map(|(k, limit)| {
            ExactRational::dyadic(k)
                * (ExactRational::from_integer(1) - ExactRational::dyadic(limit))
        })
        .sum()
}
