//! Reproducible train/test corpora.
//!
//! Every example index `i` draws from its own ChaCha8 stream (`seed`,
//! stream `i`), so any sharding of the index range produces the same
//! examples. Lines are `input tokens<TAB>output tokens`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{self, check_base};
use crate::collatz::{self, long_step, MAX_INPUT};
use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: u64 = 1_000_000_000_000;
pub const DEFAULT_K_CAP: u32 = 16;

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    LongStep,
    Apex,
    LoopLengths,
    BaseConvert,
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long_step" => Ok(Task::LongStep),
            "apex" => Ok(Task::Apex),
            "loop_lengths" => Ok(Task::LoopLengths),
            "base_convert" => Ok(Task::BaseConvert),
            other => Err(Error::InvalidSpec(format!("unknown task {other:?}"))),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::LongStep => "long_step",
            Task::Apex => "apex",
            Task::LoopLengths => "loop_lengths",
            Task::BaseConvert => "base_convert",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputDistribution {
    /// Uniform over odd integers in `[1, n_max]`.
    Natural,
    /// `k` uniform over `1..=k_cap`.
    UniformK,
    /// `P(k = l) ∝ 1/l` over `1..=k_cap`.
    LogUniformK,
}

impl FromStr for InputDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(InputDistribution::Natural),
            "uniform_k" => Ok(InputDistribution::UniformK),
            "loguniform_k" => Ok(InputDistribution::LogUniformK),
            other => Err(Error::InvalidSpec(format!(
                "unknown distribution {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub task: Task,
    pub input_base: u32,
    pub output_base: u32,
    pub n_max: u64,
    pub distribution: InputDistribution,
    pub k_cap: u32,
    pub count: usize,
    pub seed: u64,
}

impl GenSpec {
    /// Natural distribution, `n_max = 10^12`, same base in and out.
    pub fn new(task: Task, base: u32, count: usize, seed: u64) -> Self {
        GenSpec {
            task,
            input_base: base,
            output_base: base,
            n_max: DEFAULT_N_MAX,
            distribution: InputDistribution::Natural,
            k_cap: DEFAULT_K_CAP,
            count,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_base(self.input_base)?;
        check_base(self.output_base)?;
        if self.task != Task::BaseConvert && self.output_base != self.input_base {
            return Err(Error::InvalidSpec(format!(
                "task {} uses one base, got input {} and output {}",
                self.task, self.input_base, self.output_base
            )));
        }
        if self.n_max < 3 || self.n_max > MAX_INPUT {
            return Err(Error::InvalidSpec(format!(
                "n_max {} outside [3, 2^63]",
                self.n_max
            )));
        }
        if self.count == 0 {
            return Err(Error::InvalidSpec("count must be at least 1".into()));
        }
        if self.distribution != InputDistribution::Natural {
            if self.k_cap == 0 || self.k_cap > 61 {
                return Err(Error::InvalidSpec(format!(
                    "k_cap {} outside 1..=61",
                    self.k_cap
                )));
            }
            if self.n_max >> (self.k_cap + 1) == 0 {
                return Err(Error::InvalidSpec(format!(
                    "n_max {} too small for l = {}",
                    self.n_max, self.k_cap
                )));
            }
            // shaped inputs can exceed n_max by up to 2^l - 1
            if self
                .n_max
                .checked_add(1 << self.k_cap)
                .is_none_or(|n| n > MAX_INPUT)
            {
                return Err(Error::InvalidSpec(format!(
                    "n_max {} too large for shaped sampling",
                    self.n_max
                )));
            }
        }
        Ok(())
    }
}

/// Counter-based generator for example `index`.
pub fn example_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform odd integer in `[1, n_max]`.
pub fn sample_natural<R: Rng + ?Sized>(rng: &mut R, n_max: u64) -> u64 {
    2 * rng.random_range(0..=(n_max - 1) / 2) + 1
}

/// `u·2^{l+1} + 2^l − 1`: an odd integer with exactly `l` trailing ones.
pub fn shaped_input(l: u32, u: u64) -> Option<u64> {
    u.checked_mul(1u64.checked_shl(l + 1)?)?
        .checked_add((1u64 << l) - 1)
}

/// Draws one input according to `spec.distribution`.
pub fn sample_input<R: Rng + ?Sized>(spec: &GenSpec, rng: &mut R) -> Result<u64> {
    let l = match spec.distribution {
        InputDistribution::Natural => return Ok(sample_natural(rng, spec.n_max)),
        InputDistribution::UniformK => rng.random_range(1..=spec.k_cap),
        InputDistribution::LogUniformK => {
            let weights = (1..=spec.k_cap).map(|l| 1.0 / l as f64);
            let index =
                WeightedIndex::new(weights).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            index.sample(rng) as u32 + 1
        }
    };
    let u_max = spec.n_max >> (l + 1);
    if u_max == 0 {
        return Err(Error::InvalidSpec(format!(
            "n_max {} too small for l = {l}",
            spec.n_max
        )));
    }
    let u = rng.random_range(1..=u_max);
    shaped_input(l, u)
        .ok_or_else(|| Error::InvalidSpec(format!("shaped input overflows for l = {l}")))
}

/// Input and output token text for one example.
pub fn make_pair(spec: &GenSpec, n: u64) -> Result<(String, String)> {
    let input = codec::to_tokens(n as u128, spec.input_base)?;
    let output = match spec.task {
        Task::LongStep => codec::to_tokens(long_step(n)?.kappa, spec.output_base)?,
        Task::Apex => codec::to_tokens(collatz::apex(n)?, spec.output_base)?,
        Task::LoopLengths => {
            let r = long_step(n)?;
            format!("{} {}", r.k, r.k_prime)
        }
        Task::BaseConvert => codec::to_tokens(n as u128, spec.output_base)?,
    };
    Ok((input, output))
}

/// Recomputes the output of a corpus line from its input tokens.
pub fn validate_line(spec: &GenSpec, line: &str) -> Result<u64> {
    let (input, output) = line
        .split_once('\t')
        .ok_or_else(|| Error::InvalidTokens(format!("missing tab in {line:?}")))?;
    let n = codec::from_tokens(input, spec.input_base)?;
    let n = u64::try_from(n).map_err(|_| Error::InputTooLarge(n))?;
    let (_, expected) = make_pair(spec, n)?;
    if expected != output {
        return Err(Error::InvalidTokens(format!(
            "output {output:?} does not match recomputed {expected:?} for n = {n}"
        )));
    }
    Ok(n)
}

#[derive(Debug, Clone, Default)]
pub struct CorpusOptions {
    /// Reject inputs already emitted earlier in the same corpus.
    pub unique: bool,
    /// Inputs never to emit (e.g. the training set when writing a test set).
    pub exclude: Option<HashSet<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusSummary {
    pub lines_written: u64,
    pub distinct_inputs: u64,
    /// `(k, k')` → number of emitted inputs.
    pub class_histogram: BTreeMap<(u32, u32), u64>,
}

impl CorpusSummary {
    /// Fraction of inputs with `k = l`.
    pub fn k_count(&self, l: u32) -> u64 {
        self.class_histogram
            .iter()
            .filter(|((k, _), _)| *k == l)
            .map(|(_, c)| c)
            .sum()
    }
}

struct Drawn {
    n: u64,
    attempts: u32,
}

fn draw(spec: &GenSpec, index: u64, skip: u32, reject: impl Fn(u64) -> bool) -> Result<Drawn> {
    let mut rng = example_rng(spec.seed, index);
    for _ in 0..skip {
        sample_input(spec, &mut rng)?;
    }
    let mut attempts = skip;
    loop {
        let n = sample_input(spec, &mut rng)?;
        attempts += 1;
        if !reject(n) {
            return Ok(Drawn { n, attempts });
        }
        if attempts > 10_000 {
            return Err(Error::InvalidSpec(format!(
                "could not draw an admissible input for example {index}; input space exhausted?"
            )));
        }
    }
}

/// Generates the inputs of a corpus in index order.
pub fn generate_inputs(spec: &GenSpec, options: &CorpusOptions) -> Result<Vec<u64>> {
    spec.validate()?;
    let excluded = |n: u64| options.exclude.as_ref().is_some_and(|set| set.contains(&n));
    let mut seen = HashSet::new();
    let mut inputs = Vec::with_capacity(spec.count);
    let mut start = 0usize;
    while start < spec.count {
        let end = (start + CHUNK).min(spec.count);
        let first: Vec<Drawn> = (start as u64..end as u64)
            .into_par_iter()
            .map(|i| draw(spec, i, 0, excluded))
            .collect::<Result<_>>()?;
        // Duplicates depend on earlier examples, so they are resolved in
        // index order by continuing that example's own stream.
        for (offset, drawn) in first.into_iter().enumerate() {
            let mut drawn = drawn;
            if options.unique {
                while seen.contains(&drawn.n) {
                    let index = (start + offset) as u64;
                    drawn = draw(spec, index, drawn.attempts, |n| {
                        excluded(n) || seen.contains(&n)
                    })?;
                }
                seen.insert(drawn.n);
            }
            inputs.push(drawn.n);
        }
        start = end;
    }
    Ok(inputs)
}

/// Writes the corpus to any writer.
pub fn write_corpus_to<W: Write>(
    spec: &GenSpec,
    options: &CorpusOptions,
    out: W,
) -> Result<(CorpusSummary, W)> {
    let inputs = generate_inputs(spec, options)?;
    let mut out = out;
    let mut summary = CorpusSummary::default();
    let mut distinct = HashSet::with_capacity(inputs.len());
    for chunk in inputs.chunks(CHUNK) {
        let lines: Vec<(String, (u32, u32))> = chunk
            .par_iter()
            .map(|&n| {
                let (input, output) = make_pair(spec, n)?;
                let r = long_step(n)?;
                Ok((format!("{input}\t{output}\n"), (r.k, r.k_prime)))
            })
            .collect::<Result<_>>()?;
        for (line, class) in lines {
            out.write_all(line.as_bytes())
                .map_err(|e| Error::io("<corpus output>", e))?;
            *summary.class_histogram.entry(class).or_default() += 1;
            summary.lines_written += 1;
        }
        distinct.extend(chunk.iter().copied());
    }
    out.flush().map_err(|e| Error::io("<corpus output>", e))?;
    summary.distinct_inputs = distinct.len() as u64;
    Ok((summary, out))
}

pub fn write_corpus(spec: &GenSpec, options: &CorpusOptions, path: &Path) -> Result<CorpusSummary> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    match write_corpus_to(spec, options, BufWriter::new(file)) {
        Ok((summary, _)) => Ok(summary),
        Err(Error::Io { source, .. }) => Err(Error::io(path, source)),
        Err(e) => Err(e),
    }
}

/// Reads the decoded inputs of an existing corpus, for use as an exclusion
/// set.
pub fn read_corpus_inputs(path: &Path, base: u32) -> Result<HashSet<u64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut inputs = HashSet::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let input = line.split('\t').next().unwrap_or_default();
        let n = codec::from_tokens(input, base)
            .map_err(|e| Error::InvalidTokens(format!("{}:{}: {e}", path.display(), i + 1)))?;
        inputs.insert(u64::try_from(n).map_err(|_| Error::InputTooLarge(n))?);
    }
    Ok(inputs)
}
