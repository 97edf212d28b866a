//! Base-B digit strings and their token rendering.
//!
//! Token grammar, shared by corpus files, prediction files and the trainer:
//! a sign token (`+`) followed by one token per digit, most significant
//! first, each digit written as a decimal numeral, single-space separated.
//! `31` in base 24 renders as `+ 1 7`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_BASE: u32 = 2;
pub const MAX_BASE: u32 = 64;

pub fn check_base(base: u32) -> Result<()> {
    if (MIN_BASE..=MAX_BASE).contains(&base) {
        Ok(())
    } else {
        Err(Error::InvalidBase(base))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn token(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// A validated base-B digit sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitString {
    base: u32,
    sign: Sign,
    digits: Vec<u32>,
}

impl DigitString {
    /// Validates the digits: non-empty, each below `base`, no leading zero
    /// unless the value is zero.
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        Self::with_sign(base, Sign::Plus, digits)
    }

    pub fn with_sign(base: u32, sign: Sign, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::InvalidDigits("empty digit list".into()));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidDigits(format!(
                "digit {d} out of range for base {base}"
            )));
        }
        if digits.len() > 1 && digits[0] == 0 {
            return Err(Error::InvalidDigits(
                "leading zero on multi-digit input".into(),
            ));
        }
        Ok(DigitString { base, sign, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_tokens(self))
    }
}

pub fn encode(n: u128, base: u32) -> Result<DigitString> {
    check_base(base)?;
    let b = base as u128;
    let mut digits = Vec::new();
    let mut rest = n;
    loop {
        digits.push((rest % b) as u32);
        rest /= b;
        if rest == 0 {
            break;
        }
    }
    digits.reverse();
    Ok(DigitString {
        base,
        sign: Sign::Plus,
        digits,
    })
}

pub fn decode(d: &DigitString) -> Result<u128> {
    // Re-validate: fields are private, but deserialized values bypass `new`.
    DigitString::with_sign(d.base, d.sign, d.digits.clone())?;
    if d.sign == Sign::Minus && d.digits != [0] {
        return Err(Error::InvalidDigits(
            "negative values are not supported".into(),
        ));
    }
    d.digits.iter().try_fold(0u128, |acc, &digit| {
        acc.checked_mul(d.base as u128)
            .and_then(|v| v.checked_add(digit as u128))
            .ok_or_else(|| Error::InvalidDigits("value does not fit in 128 bits".into()))
    })
}

pub fn render_tokens(d: &DigitString) -> String {
    let mut out = String::with_capacity(2 + 3 * d.digits.len());
    out.push_str(d.sign.token());
    for digit in &d.digits {
        out.push(' ');
        out.push_str(&digit.to_string());
    }
    out
}

pub fn parse_tokens(text: &str, base: u32) -> Result<DigitString> {
    check_base(base)?;
    let mut tokens = text.split_whitespace();
    let sign = match tokens.next() {
        Some("+") => Sign::Plus,
        Some("-") => Sign::Minus,
        Some(other) => {
            return Err(Error::InvalidTokens(format!(
                "unknown sign token {other:?}"
            )))
        }
        None => return Err(Error::InvalidTokens("empty token sequence".into())),
    };
    let digits = tokens
        .map(|t| {
            let digit: u32 = t
                .parse()
                .map_err(|_| Error::InvalidTokens(format!("non-numeric digit token {t:?}")))?;
            if digit >= base {
                return Err(Error::InvalidTokens(format!(
                    "digit {digit} out of range for base {base}"
                )));
            }
            Ok(digit)
        })
        .collect::<Result<Vec<_>>>()?;
    DigitString::with_sign(base, sign, digits)
}

/// Encodes and renders in one go.
pub fn to_tokens(n: u128, base: u32) -> Result<String> {
    encode(n, base).map(|d| render_tokens(&d))
}

/// Parses and decodes in one go.
pub fn from_tokens(text: &str, base: u32) -> Result<u128> {
    parse_tokens(text, base).and_then(|d| decode(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encode_examples() {
        assert_eq!(encode(27, 2).unwrap().digits(), &[1, 1, 0, 1, 1]);
        assert_eq!(encode(31, 24).unwrap().digits(), &[1, 7]);
        assert_eq!(encode(0, 10).unwrap().digits(), &[0]);
        assert!(matches!(encode(5, 1), Err(Error::InvalidBase(1))));
        assert!(matches!(encode(5, 65), Err(Error::InvalidBase(65))));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(
            decode(&DigitString::new(24, vec![1, 7]).unwrap()).unwrap(),
            31
        );
        assert_eq!(
            decode(&DigitString::new(2, vec![1, 0, 1]).unwrap()).unwrap(),
            5
        );
        assert_eq!(
            decode(&DigitString::new(10, vec![2, 7]).unwrap()).unwrap(),
            27
        );
    }

    #[test]
    fn invalid_digit_strings() {
        assert!(DigitString::new(10, vec![]).is_err());
        assert!(DigitString::new(10, vec![1, 10]).is_err());
        assert!(DigitString::new(10, vec![0, 1]).is_err());
        assert!(DigitString::new(10, vec![0]).is_ok());
        let too_big = DigitString::new(64, vec![63; 30]).unwrap();
        assert!(decode(&too_big).is_err());
    }

    #[test]
    fn token_examples() {
        assert_eq!(
            render_tokens(&DigitString::new(24, vec![1, 7]).unwrap()),
            "+ 1 7"
        );
        assert_eq!(
            render_tokens(&DigitString::new(2, vec![1, 0, 1]).unwrap()),
            "+ 1 0 1"
        );
        assert_eq!(
            render_tokens(&DigitString::new(10, vec![3, 1]).unwrap()),
            "+ 3 1"
        );
        assert_eq!(from_tokens("+  1   7", 24).unwrap(), 31);
    }

    #[test]
    fn token_errors() {
        assert!(matches!(
            parse_tokens("* 1 7", 24),
            Err(Error::InvalidTokens(_))
        ));
        assert!(matches!(
            parse_tokens("+ 1 x", 24),
            Err(Error::InvalidTokens(_))
        ));
        assert!(matches!(
            parse_tokens("+ 1 24", 24),
            Err(Error::InvalidTokens(_))
        ));
        assert!(parse_tokens("", 24).is_err());
        assert!(parse_tokens("+", 24).is_err());
    }

    #[test]
    fn last_digit_fixes_low_bits_in_even_bases() {
        for base in [8u32, 16, 24, 32, 48] {
            let d = (base.trailing_zeros()) as u64;
            let mask = (1u64 << d) - 1;
            let mut seen = std::collections::HashMap::new();
            for n in 0..(1u64 << 16) {
                let last = *encode(n as u128, base).unwrap().digits().last().unwrap();
                let residue = n & mask;
                assert_eq!(
                    *seen.entry(last).or_insert(residue),
                    residue,
                    "base {base} n {n}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(n in any::<u128>(), base in MIN_BASE..=MAX_BASE) {
            let d = encode(n, base).unwrap();
            prop_assert_eq!(decode(&d).unwrap(), n);
            let expected_len = if n == 0 { 1 } else {
                let mut len = 0; let mut x = n; while x > 0 { x /= base as u128; len += 1; } len
            };
            prop_assert_eq!(d.len(), expected_len);
            prop_assert_eq!(parse_tokens(&render_tokens(&d), base).unwrap(), d);
        }
    }
}
