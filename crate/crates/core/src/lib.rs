//! The long Collatz step and the loop-length theory behind it: exact
//! computation, the binary-suffix oracle, dataset generation for sequence
//! models, and a closed-form emulator and analyzer of their predictions.

pub mod analyzer;
pub mod cli;
pub mod codec;
pub mod collatz;
pub mod datagen;
pub mod emulator;
pub mod error;
pub mod suffix;
pub mod verify;

pub use collatz::{
    apex, kappa, kappa_restricted, long_step, round_to_odd, trailing_ones, ExactRational,
    LongStepRecord,
};
pub use emulator::{predict, Frontier, ParityMode};
pub use error::{Error, Result};
pub use suffix::{
    class_probability, class_suffix, expected_accuracy, h_sequence, loop_lengths_from_suffix,
};
