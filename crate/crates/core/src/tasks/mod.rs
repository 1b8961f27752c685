//! Deterministic generators for the fourteen tasks.
//!
//! Every generator is a pure function of `(config, seed)`. Sample `i` of split
//! `s` draws only from its own stream `derive_stream(seed, sample_stream_id(task, s, i))`,
//! so generation order and thread count never change the output.
//!
//! Each task is split into a draw step (random content) and a public layout
//! builder that turns explicit content into a [`Sample`]; the builders pin
//! the channel layouts documented by [`channel_layout`].

mod forecast;
mod memory;
mod pattern;
mod reasoning;

pub use forecast::{
    forecast_samples, gen_chaotic, gen_sinus, lorenz_trajectory, sinus_parameters, LorenzState,
    LORENZ_DT, LORENZ_WARMUP,
};
pub use memory::{
    associative_recall_sample, continuous_postcasting_sample, gen_associative_recall,
    gen_continuous_postcasting, gen_discrete_postcasting, gen_selective_copy, gen_simple_copy,
    postcasting_sample, selective_copy_sample, simple_copy_sample,
};
pub use pattern::{
    continuous_pattern_sample, discrete_pattern_sample, gen_continuous_pattern_completion,
    gen_discrete_pattern_completion, gen_induction_heads, induction_sample, masked_count,
};
pub use reasoning::{
    adding_sample, bracket_sample, cross_situation_sample, gen_adding_problem,
    gen_bracket_matching, gen_cross_situation, gen_sorting_problem, is_balanced,
    random_balanced_brackets, sorting_sample, Bracket, CrossVocabulary, Situation, FUNCTION_WORDS,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, TaskConfig, TaskId};
use crate::model::{Dataset, Sample, Slot, Split};
use crate::rng::{derive_stream, sample_stream_id, RngStream, Seed};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("non-finite state at integration step {step}")]
    NonFinite { step: usize },
}

/// One named group of input or output columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub width: usize,
    pub doc: String,
}

impl Channel {
    fn new(name: &str, width: usize, doc: &str) -> Self {
        Channel {
            name: name.to_string(),
            width,
            doc: doc.to_string(),
        }
    }
}

/// Column layout of a task's input and target matrices, in column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelLayout {
    pub input: Vec<Channel>,
    pub output: Vec<Channel>,
}

impl ChannelLayout {
    pub fn d_in(&self) -> usize {
        self.input.iter().map(|c| c.width).sum()
    }

    pub fn d_out(&self) -> usize {
        self.output.iter().map(|c| c.width).sum()
    }
}

/// The pinned channel layout for a configuration.
pub fn channel_layout(config: &TaskConfig) -> ChannelLayout {
    let ch = Channel::new;
    let (input, output) = match config {
        TaskConfig::SinusForecasting(_) => (
            vec![ch("value", 1, "u(t)")],
            vec![ch("value", 1, "u(t + forecast_length)")],
        ),
        TaskConfig::ChaoticForecasting(_) => (
            vec![ch("xyz", 3, "normalized Lorenz state (x, y, z) at t")],
            vec![ch(
                "xyz",
                3,
                "normalized Lorenz state at t + forecast_length",
            )],
        ),
        TaskConfig::DiscretePostcasting(c) => (
            vec![ch("symbol", c.n_symbols, "one-hot s(t)")],
            vec![ch("symbol", c.n_symbols, "one-hot s(t - delay)")],
        ),
        TaskConfig::ContinuousPostcasting(_) => (
            vec![ch("value", 1, "u(t)")],
            vec![ch("value", 1, "u(t - delay)")],
        ),
        TaskConfig::DiscretePatternCompletion(c) => (
            vec![
                ch(
                    "symbol",
                    c.n_symbols,
                    "one-hot symbol, zero at masked steps",
                ),
                ch("mask_flag", 1, "1 at masked steps"),
            ],
            vec![ch("symbol", c.n_symbols, "one-hot original symbol")],
        ),
        TaskConfig::ContinuousPatternCompletion(_) => (
            vec![
                ch("value", 1, "motif value, 0 at masked steps"),
                ch("mask_flag", 1, "1 at masked steps"),
            ],
            vec![ch("value", 1, "original motif value")],
        ),
        TaskConfig::BracketMatching(_) => (
            vec![ch("open", 1, "1 for '('"), ch("close", 1, "1 for ')'")],
            vec![ch("label", 2, "one-hot {valid, invalid} at the final step")],
        ),
        TaskConfig::SimpleCopy(c) => (
            vec![
                ch(
                    "symbol",
                    c.n_symbols,
                    "one-hot content during the first sequence_length steps",
                ),
                ch("trigger", 1, "1 at step sequence_length + delay"),
            ],
            vec![ch(
                "symbol",
                c.n_symbols,
                "replayed content over the last sequence_length steps",
            )],
        ),
        TaskConfig::SelectiveCopy(c) => (
            vec![
                ch(
                    "symbol",
                    c.n_symbols,
                    "one-hot content during the first sequence_length steps",
                ),
                ch("marker", 1, "1 at the marked content steps"),
                ch("trigger", 1, "1 at step sequence_length + delay"),
            ],
            vec![ch(
                "symbol",
                c.n_symbols,
                "marked symbols in position order over the last n_markers steps",
            )],
        ),
        TaskConfig::AddingProblem(c) => (
            vec![
                ch("digit", c.max_number, "one-hot digit in 0..max_number"),
                ch("marker", 1, "1 at the two marked steps"),
                ch("trigger", 1, "1 at the final step"),
            ],
            vec![ch(
                "sum",
                2 * c.max_number - 1,
                "one-hot sum of the marked digits at the final step",
            )],
        ),
        TaskConfig::SortingProblem(c) => (
            vec![
                ch(
                    "symbol",
                    c.n_symbols,
                    "one-hot symbol during the first sequence_length steps",
                ),
                ch(
                    "position",
                    c.sequence_length,
                    "one-hot target position of the symbol",
                ),
                ch("trigger", 1, "1 at step sequence_length"),
            ],
            vec![ch(
                "symbol",
                c.n_symbols,
                "symbol for output position j at step sequence_length + 1 + j",
            )],
        ),
        TaskConfig::CrossSituation(c) => {
            let vocab = CrossVocabulary::new(c);
            let (no, nc, np) = (c.objects.len(), c.colors.len(), c.positions.len());
            let mut output = Vec::new();
            for k in 1..=2 {
                output.push(Channel {
                    name: format!("object_{k}"),
                    width: no,
                    doc: format!(
                        "object label of situation {k} (situations ordered by position label)"
                    ),
                });
                output.push(Channel {
                    name: format!("color_{k}"),
                    width: nc,
                    doc: format!("color label of situation {k}"),
                });
                output.push(Channel {
                    name: format!("position_{k}"),
                    width: np,
                    doc: format!("position label of situation {k}"),
                });
            }
            (
                vec![Channel {
                    name: "word".to_string(),
                    width: vocab.len(),
                    doc: format!("one-hot word over [{}]", vocab.words().join(", ")),
                }],
                output,
            )
        }
        TaskConfig::AssociativeRecall(c) => (
            vec![
                ch("symbol", c.n_symbols, "one-hot key or value"),
                ch("query", 1, "1 at the final (query) step"),
            ],
            vec![ch(
                "symbol",
                c.n_symbols,
                "one-hot value associated with the queried key",
            )],
        ),
        TaskConfig::InductionHeads(c) => (
            vec![ch("symbol", c.n_symbols, "one-hot s(t)")],
            vec![ch("symbol", c.n_symbols, "one-hot s(t + 1)")],
        ),
    };
    ChannelLayout { input, output }
}

/// Output slot groups; only cross situation has more than one.
pub fn slot_layout(config: &TaskConfig) -> Option<Vec<Slot>> {
    match config {
        TaskConfig::CrossSituation(_) => {
            let layout = channel_layout(config);
            let mut offset = 0;
            Some(
                layout
                    .output
                    .iter()
                    .map(|c| {
                        let s = Slot {
                            offset,
                            width: c.width,
                        };
                        offset += c.width;
                        s
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

/// Generates a dataset for any task configuration.
pub fn generate(config: &TaskConfig, seed: Seed) -> Result<Dataset, GenError> {
    config.check()?;
    match config {
        TaskConfig::SinusForecasting(c) => gen_sinus(c, seed),
        TaskConfig::ChaoticForecasting(c) => gen_chaotic(c, seed),
        TaskConfig::DiscretePostcasting(c) => gen_discrete_postcasting(c, seed),
        TaskConfig::ContinuousPostcasting(c) => gen_continuous_postcasting(c, seed),
        TaskConfig::DiscretePatternCompletion(c) => gen_discrete_pattern_completion(c, seed),
        TaskConfig::ContinuousPatternCompletion(c) => gen_continuous_pattern_completion(c, seed),
        TaskConfig::BracketMatching(c) => gen_bracket_matching(c, seed),
        TaskConfig::SimpleCopy(c) => gen_simple_copy(c, seed),
        TaskConfig::SelectiveCopy(c) => gen_selective_copy(c, seed),
        TaskConfig::AddingProblem(c) => gen_adding_problem(c, seed),
        TaskConfig::SortingProblem(c) => gen_sorting_problem(c, seed),
        TaskConfig::CrossSituation(c) => gen_cross_situation(c, seed),
        TaskConfig::AssociativeRecall(c) => gen_associative_recall(c, seed),
        TaskConfig::InductionHeads(c) => gen_induction_heads(c, seed),
    }
}

/// The random stream owned by sample `index` of `split`.
pub fn sample_stream(task: TaskId, seed: Seed, split: Split, index: usize) -> RngStream {
    derive_stream(
        seed,
        sample_stream_id(task.index(), split.index(), index as u64),
    )
}

/// Builds a count-based dataset by drawing every sample from its own stream.
pub(crate) fn count_based<F>(config: TaskConfig, seed: Seed, make: F) -> Result<Dataset, GenError>
where
    F: Fn(&mut RngStream) -> Sample + Sync,
{
    config.check()?;
    let task = config.task();
    let counts = config.split_counts().expect("count-based task");
    let mut splits: Vec<Vec<Sample>> = Split::ALL
        .iter()
        .zip(counts)
        .map(|(&split, n)| {
            (0..n)
                .into_par_iter()
                .map(|i| make(&mut sample_stream(task, seed, split, i)))
                .collect()
        })
        .collect();
    let test = splits.pop().unwrap();
    let valid = splits.pop().unwrap();
    let train = splits.pop().unwrap();
    Ok(assemble(config, seed, train, valid, test))
}

pub(crate) fn assemble(
    config: TaskConfig,
    seed: Seed,
    train: Vec<Sample>,
    valid: Vec<Sample>,
    test: Vec<Sample>,
) -> Dataset {
    let layout = channel_layout(&config);
    let task = config.task();
    Dataset {
        task,
        metric: task.metric(),
        d_in: layout.d_in(),
        d_out: layout.d_out(),
        slot_layout: slot_layout(&config),
        config,
        seed,
        train,
        valid,
        test,
    }
}
