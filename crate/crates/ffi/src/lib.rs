//! C ABI over `collatz-core`.
//!
//! Every function returns a [`CollatzStatus`] and writes results through out
//! pointers. 128-bit values cross the boundary as [`CollatzU128`]. Frontiers
//! are opaque handles created by `collatz_frontier_*` and released with
//! [`collatz_frontier_free`].

#![allow(clippy::missing_safety_doc)]

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use collatz_core::analyzer::{classify, AnalyzerConfig, ErrorClass, PredictionRecord};
use collatz_core::emulator::EmulatedLabel;
use collatz_core::{Error, Frontier, ParityMode};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollatzStatus {
    Ok = 0,
    EvenInput = 1,
    ZeroInput = 2,
    InputTooLarge = 3,
    InvalidBase = 4,
    OutOfRange = 5,
    InvalidArgument = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

impl From<&Error> for CollatzStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::EvenInput(_) => CollatzStatus::EvenInput,
            Error::ZeroInput => CollatzStatus::ZeroInput,
            Error::InputTooLarge(_) => CollatzStatus::InputTooLarge,
            Error::InvalidBase(_) => CollatzStatus::InvalidBase,
            Error::LevelOutOfRange(_) | Error::ClassOutOfRange { .. } => CollatzStatus::OutOfRange,
            _ => CollatzStatus::InvalidArgument,
        }
    }
}

/// An unsigned 128-bit integer as two 64-bit halves.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CollatzU128 {
    pub hi: u64,
    pub lo: u64,
}

impl From<u128> for CollatzU128 {
    fn from(v: u128) -> Self {
        CollatzU128 {
            hi: (v >> 64) as u64,
            lo: v as u64,
        }
    }
}

impl From<CollatzU128> for u128 {
    fn from(v: CollatzU128) -> Self {
        ((v.hi as u128) << 64) | v.lo as u128
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CollatzStep {
    pub n: u64,
    pub kappa: CollatzU128,
    pub apex: CollatzU128,
    pub k: u32,
    pub k_prime: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollatzParity {
    Free = 0,
    ForceOdd = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollatzLabel {
    Correct = 0,
    PowerOfTwo = 1,
    NearPowerOfTwo = 2,
    Truncated = 3,
    Hard = 4,
    CloseMiss = 5,
    Other = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollatzPrediction {
    pub n: u64,
    pub target: CollatzU128,
    pub prediction: CollatzU128,
    /// `Correct`, `PowerOfTwo` or `Hard`.
    pub label: CollatzLabel,
    pub a: u32,
    pub l: u32,
}

/// An error class. Fields not used by `label` are zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollatzClass {
    pub label: CollatzLabel,
    pub a: u32,
    pub l: u32,
    pub depth: u32,
    /// `|ε|` of a near power-of-two error.
    pub epsilon: CollatzU128,
    pub epsilon_negative: bool,
    /// Relative bound of a close-miss tier (0.001, 0.01 or 0.03).
    pub close_bound: f64,
}

/// Opaque frontier handle.
pub struct CollatzFrontier {
    inner: Frontier,
}

fn guard(f: impl FnOnce() -> Result<(), CollatzStatus>) -> CollatzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CollatzStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => CollatzStatus::Internal,
    }
}

unsafe fn out<'a, T>(ptr: *mut T) -> Result<&'a mut T, CollatzStatus> {
    ptr.as_mut().ok_or(CollatzStatus::NullPointer)
}

fn status<T>(r: collatz_core::Result<T>) -> Result<T, CollatzStatus> {
    r.map_err(|e| CollatzStatus::from(&e))
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn collatz_status_message(status: CollatzStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        CollatzStatus::Ok => b"ok\0",
        CollatzStatus::EvenInput => b"input must be odd\0",
        CollatzStatus::ZeroInput => b"input must be positive\0",
        CollatzStatus::InputTooLarge => b"input exceeds 2^63\0",
        CollatzStatus::InvalidBase => b"base outside [2, 64]\0",
        CollatzStatus::OutOfRange => b"level or class outside the supported range\0",
        CollatzStatus::InvalidArgument => b"invalid argument\0",
        CollatzStatus::NullPointer => b"null pointer\0",
        CollatzStatus::BufferTooSmall => b"buffer too small\0",
        CollatzStatus::Internal => b"internal error\0",
    };
    text.as_ptr().cast()
}

/// Long Collatz step of an odd `n` in `[1, 2^63]`.
#[no_mangle]
pub unsafe extern "C" fn collatz_long_step(n: u64, result: *mut CollatzStep) -> CollatzStatus {
    guard(|| {
        let result = out(result)?;
        let r = status(collatz_core::long_step(n))?;
        *result = CollatzStep {
            n: r.n,
            kappa: r.kappa.into(),
            apex: r.apex.into(),
            k: r.k,
            k_prime: r.k_prime,
        };
        Ok(())
    })
}

/// Loop lengths read from the binary suffix of `n`.
#[no_mangle]
pub unsafe extern "C" fn collatz_loop_lengths(
    n: u64,
    k: *mut u32,
    k_prime: *mut u32,
) -> CollatzStatus {
    guard(|| {
        let (k, k_prime) = (out(k)?, out(k_prime)?);
        (*k, *k_prime) = status(collatz_core::loop_lengths_from_suffix(n))?;
        Ok(())
    })
}

/// Writes the NUL-terminated binary suffix of class `(k, k_prime)` into
/// `buffer`. `required`, if not null, receives the size needed including the
/// terminator; with a short buffer the status is `BUFFER_TOO_SMALL`.
#[no_mangle]
pub unsafe extern "C" fn collatz_class_suffix(
    k: u32,
    k_prime: u32,
    buffer: *mut c_char,
    capacity: usize,
    required: *mut usize,
) -> CollatzStatus {
    guard(|| {
        let suffix = status(collatz_core::class_suffix(k, k_prime))?.suffix;
        let needed = suffix.len() + 1;
        if let Some(required) = required.as_mut() {
            *required = needed;
        }
        if buffer.is_null() {
            return Err(CollatzStatus::NullPointer);
        }
        if capacity < needed {
            return Err(CollatzStatus::BufferTooSmall);
        }
        std::ptr::copy_nonoverlapping(suffix.as_ptr().cast::<c_char>(), buffer, suffix.len());
        *buffer.add(suffix.len()) = 0;
        Ok(())
    })
}

fn boxed(frontier: Frontier, handle: &mut *mut CollatzFrontier) {
    *handle = Box::into_raw(Box::new(CollatzFrontier { inner: frontier }));
}

/// Creates the canonical frontier of a learning step (1..=16).
#[no_mangle]
pub unsafe extern "C" fn collatz_frontier_canonical(
    step: u32,
    handle: *mut *mut CollatzFrontier,
) -> CollatzStatus {
    guard(|| {
        let handle = out(handle)?;
        boxed(status(Frontier::canonical(step))?, handle);
        Ok(())
    })
}

/// Creates a frontier from per-`k` limits `l'_1 .. l'_len`.
#[no_mangle]
pub unsafe extern "C" fn collatz_frontier_from_limits(
    limits: *const u32,
    len: usize,
    handle: *mut *mut CollatzFrontier,
) -> CollatzStatus {
    guard(|| {
        let handle = out(handle)?;
        if limits.is_null() {
            return Err(CollatzStatus::NullPointer);
        }
        let limits = std::slice::from_raw_parts(limits, len).to_vec();
        boxed(status(Frontier::from_limits(limits))?, handle);
        Ok(())
    })
}

/// Releases a frontier. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn collatz_frontier_free(handle: *mut CollatzFrontier) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[no_mangle]
pub unsafe extern "C" fn collatz_frontier_k_max(
    handle: *const CollatzFrontier,
    k_max: *mut u32,
) -> CollatzStatus {
    guard(|| {
        let frontier = handle.as_ref().ok_or(CollatzStatus::NullPointer)?;
        *out(k_max)? = frontier.inner.k_max();
        Ok(())
    })
}

/// Expected accuracy of a frontier as the exact fraction
/// `numerator / denominator`; `OUT_OF_RANGE` if either does not fit 64 bits.
#[no_mangle]
pub unsafe extern "C" fn collatz_expected_accuracy(
    handle: *const CollatzFrontier,
    numerator: *mut u64,
    denominator: *mut u64,
) -> CollatzStatus {
    guard(|| {
        let frontier = handle.as_ref().ok_or(CollatzStatus::NullPointer)?;
        let (numerator, denominator) = (out(numerator)?, out(denominator)?);
        let value = collatz_core::expected_accuracy(&frontier.inner);
        *numerator = u64::try_from(value.numerator()).map_err(|_| CollatzStatus::OutOfRange)?;
        *denominator = u64::try_from(value.denominator()).map_err(|_| CollatzStatus::OutOfRange)?;
        Ok(())
    })
}

/// Emulated model prediction for `n`.
#[no_mangle]
pub unsafe extern "C" fn collatz_predict(
    n: u64,
    handle: *const CollatzFrontier,
    parity: CollatzParity,
    result: *mut CollatzPrediction,
) -> CollatzStatus {
    guard(|| {
        let frontier = handle.as_ref().ok_or(CollatzStatus::NullPointer)?;
        let result = out(result)?;
        let mode = match parity {
            CollatzParity::Free => ParityMode::Free,
            CollatzParity::ForceOdd => ParityMode::ForceOdd,
        };
        let p = status(collatz_core::predict(n, &frontier.inner, mode))?;
        let (label, a, l) = match p.label {
            EmulatedLabel::Correct => (CollatzLabel::Correct, 0, 0),
            EmulatedLabel::PowerOfTwo { l } => (CollatzLabel::PowerOfTwo, 0, l),
            EmulatedLabel::Hard { a, l } => (CollatzLabel::Hard, a, l),
        };
        *result = CollatzPrediction {
            n: p.n,
            target: p.target.into(),
            prediction: p.prediction.into(),
            label,
            a,
            l,
        };
        Ok(())
    })
}

/// Error class of `prediction` against `target` in `base`, with the default
/// tolerances.
#[no_mangle]
pub unsafe extern "C" fn collatz_classify(
    target: CollatzU128,
    prediction: CollatzU128,
    base: u32,
    result: *mut CollatzClass,
) -> CollatzStatus {
    guard(|| {
        let result = out(result)?;
        status(collatz_core::codec::check_base(base))?;
        let record = PredictionRecord {
            n: 1,
            target: target.into(),
            prediction: prediction.into(),
            base,
        };
        let mut c = CollatzClass {
            label: CollatzLabel::Other,
            a: 0,
            l: 0,
            depth: 0,
            epsilon: CollatzU128::default(),
            epsilon_negative: false,
            close_bound: 0.0,
        };
        match classify(&record, &AnalyzerConfig::default()) {
            ErrorClass::Correct => c.label = CollatzLabel::Correct,
            ErrorClass::PowerOfTwo { l } => (c.label, c.l) = (CollatzLabel::PowerOfTwo, l),
            ErrorClass::NearPowerOfTwo { l, epsilon } => {
                (c.label, c.l) = (CollatzLabel::NearPowerOfTwo, l);
                c.epsilon = epsilon.unsigned_abs().into();
                c.epsilon_negative = epsilon < 0;
            }
            ErrorClass::Truncated { l, depth } => {
                (c.label, c.l, c.depth) = (CollatzLabel::Truncated, l, depth)
            }
            ErrorClass::Hard { a, l } => (c.label, c.a, c.l) = (CollatzLabel::Hard, a, l),
            ErrorClass::CloseMiss { tier } => {
                (c.label, c.close_bound) = (CollatzLabel::CloseMiss, tier.bound())
            }
            ErrorClass::Other => {}
        }
        *result = c;
        Ok(())
    })
}
