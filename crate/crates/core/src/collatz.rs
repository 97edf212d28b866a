//! The long Collatz step on odd integers.
//!
//! An odd `n = 2^k·m − 1` (with `m` odd) goes through `k` up-steps
//! `x → (3x+1)/2` to reach the even apex `3^k·m − 1`, then `k'` down-steps
//! `x → x/2` to reach the odd successor `κ(n)`.
//!
//! Inputs are capped at 2^63. The apex is then below `1.5^63·2^63 < 2^100`,
//! so every intermediate value fits in a `u128`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted input.
pub const MAX_INPUT: u64 = 1 << 63;

/// One long Collatz step: `n → apex → kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LongStepRecord {
    pub n: u64,
    pub kappa: u128,
    pub apex: u128,
    /// Up-step loop length, `v2(n + 1)`.
    pub k: u32,
    /// Down-step loop length, `v2(apex)`.
    pub k_prime: u32,
}

pub(crate) fn check_input(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if n.is_multiple_of(2) {
        return Err(Error::EvenInput(n as u128));
    }
    if n > MAX_INPUT {
        return Err(Error::InputTooLarge(n as u128));
    }
    Ok(())
}

/// Number of consecutive 1-bits at the right of `n`, i.e. `v2(n + 1)`.
pub fn trailing_ones(n: u64) -> Result<u32> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenInput(n as u128));
    }
    Ok(n.trailing_ones())
}

/// Computes the long step by counting the trailing ones first, then running
/// two loops of known length.
pub fn long_step(n: u64) -> Result<LongStepRecord> {
    check_input(n)?;
    let k = n.trailing_ones();
    let mut x = n as u128;
    for _ in 0..k {
        x = (3 * x + 1) >> 1;
    }
    let apex = x;
    let k_prime = apex.trailing_zeros();
    for _ in 0..k_prime {
        x /= 2;
    }
    Ok(LongStepRecord {
        n,
        kappa: x,
        apex,
        k,
        k_prime,
    })
}

/// Same step, driven only by the parity of the running value.
pub fn long_step_by_parity(n: u64) -> Result<LongStepRecord> {
    check_input(n)?;
    let mut x = n as u128;
    let mut k = 0;
    while x % 2 == 1 {
        x = (3 * x + 1) >> 1;
        k += 1;
    }
    let apex = x;
    let mut k_prime = 0;
    while x.is_multiple_of(2) {
        x /= 2;
        k_prime += 1;
    }
    Ok(LongStepRecord {
        n,
        kappa: x,
        apex,
        k,
        k_prime,
    })
}

/// `3^k·m − 1` where `n = 2^k·m − 1`, `m` odd.
pub fn apex(n: u64) -> Result<u128> {
    check_input(n)?;
    let k = n.trailing_ones();
    let m = (n as u128 + 1) >> k;
    Ok(3u128.pow(k) * m - 1)
}

/// `κ(n)` alone.
pub fn kappa(n: u64) -> Result<u128> {
    long_step(n).map(|r| r.kappa)
}

/// Exact rational number, always in lowest terms with a positive
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    /// Panics if `denominator` is zero.
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(value.into()))
    }

    /// `1 / 2^exp`.
    pub fn dyadic(exp: u32) -> Self {
        ExactRational::new(1, BigInt::one() << exp)
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// Exact decimal expansion if the denominator has no prime factors other
    /// than 2 and 5, otherwise `None`.
    pub fn to_terminating_decimal(&self) -> Option<String> {
        let mut den = self.denominator().clone();
        let (mut twos, mut fives) = (0u32, 0u32);
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while den.is_even() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if !den.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        let scaled = self.numerator() * BigInt::from(10).pow(digits) / self.denominator();
        let negative = scaled.is_negative();
        let mut text = scaled.abs().to_string();
        if digits > 0 {
            let width = digits as usize + 1;
            if text.len() < width {
                text = format!("{}{}", "0".repeat(width - text.len()), text);
            }
            text.insert(text.len() - digits as usize, '.');
        }
        Some(if negative { format!("-{text}") } else { text })
    }
}

impl std::ops::Add for ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 + rhs.0)
    }
}

impl std::ops::Sub for ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 - rhs.0)
    }
}

impl std::ops::Mul for ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 * rhs.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// `κ_{l,l'}(n) = ((3/2)^l·(n+1) − 1) / 2^{l'}`, the long-step formula with
/// both loop lengths frozen.
pub fn kappa_restricted(n: u64, l: u32, l_prime: u32) -> Result<ExactRational> {
    check_input(n)?;
    if l == 0 || l_prime == 0 {
        return Err(Error::InvalidArgument(
            "loop lengths l and l' must be at least 1".into(),
        ));
    }
    let numerator = BigInt::from(3).pow(l) * BigInt::from(n as u128 + 1) - (BigInt::one() << l);
    let denominator = BigInt::one() << (l + l_prime);
    Ok(ExactRational::new(numerator, denominator))
}

/// Nearest odd integer to `q`. An even integer `q` sits halfway between two
/// odd integers; the tie goes up to `q + 1`.
pub fn round_to_odd(q: &ExactRational) -> Result<BigUint> {
    if !q.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "round_to_odd needs a positive value, got {q}"
        )));
    }
    // q > 0, so floor(q) >= 0. If floor is odd it is within 1 of q and the
    // next odd candidates are further away; otherwise floor + 1 wins.
    let floor = q.as_ratio().floor().to_integer();
    let rounded = if floor.is_odd() { floor } else { floor + 1 };
    Ok(rounded
        .to_biguint()
        .expect("rounded value of a positive rational is positive"))
}
