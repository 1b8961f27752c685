//! Postcasting, copy and associative recall: tasks that test how long and how
//! selectively a model can hold its input.

use ndarray::{Array1, Array2};

use super::{count_based, GenError};
use crate::config::{
    AssociativeRecallConfig, ContinuousPostcastingConfig, SelectiveCopyConfig, SymbolDelayConfig,
    TaskConfig,
};
use crate::model::{set_one_hot, Dataset, MetricKind, Sample};
use crate::rng::Seed;

fn classification(input: Array2<f32>, target: Array2<f32>, eval_mask: Array1<bool>) -> Sample {
    Sample {
        input,
        target,
        eval_mask,
        metric: MetricKind::ClassificationErrorRate,
        slot_layout: None,
    }
}

/// `target[t] = one_hot(symbols[t - delay])`, masked for `t >= delay`.
pub fn postcasting_sample(symbols: &[usize], n_symbols: usize, delay: usize) -> Sample {
    let t_len = symbols.len();
    let mut input = Array2::zeros((t_len, n_symbols));
    let mut target = Array2::zeros((t_len, n_symbols));
    let mut mask = Array1::from_elem(t_len, false);
    for (t, &s) in symbols.iter().enumerate() {
        set_one_hot(input.row_mut(t), 0, s);
        if t >= delay {
            set_one_hot(target.row_mut(t), 0, symbols[t - delay]);
            mask[t] = true;
        }
    }
    classification(input, target, mask)
}

pub fn gen_discrete_postcasting(c: &SymbolDelayConfig, seed: Seed) -> Result<Dataset, GenError> {
    count_based(TaskConfig::DiscretePostcasting(c.clone()), seed, |s| {
        let symbols: Vec<usize> = (0..c.sequence_length)
            .map(|_| s.index_unchecked(c.n_symbols))
            .collect();
        postcasting_sample(&symbols, c.n_symbols, c.delay)
    })
}

pub fn continuous_postcasting_sample(values: &[f64], delay: usize) -> Sample {
    let t_len = values.len();
    let mut input = Array2::zeros((t_len, 1));
    let mut target = Array2::zeros((t_len, 1));
    let mut mask = Array1::from_elem(t_len, false);
    for (t, &u) in values.iter().enumerate() {
        input[[t, 0]] = u as f32;
        if t >= delay {
            target[[t, 0]] = values[t - delay] as f32;
            mask[t] = true;
        }
    }
    Sample {
        input,
        target,
        eval_mask: mask,
        metric: MetricKind::RegressionMse,
        slot_layout: None,
    }
}

pub fn gen_continuous_postcasting(
    c: &ContinuousPostcastingConfig,
    seed: Seed,
) -> Result<Dataset, GenError> {
    count_based(TaskConfig::ContinuousPostcasting(c.clone()), seed, |s| {
        let values: Vec<f64> = (0..c.sequence_length)
            .map(|_| s.uniform_unchecked(-0.8, 0.8))
            .collect();
        continuous_postcasting_sample(&values, c.delay)
    })
}

/// Content, silent delay, trigger, then the content replayed as targets.
///
/// Timeline length is `2 * content.len() + delay + 1`.
pub fn simple_copy_sample(content: &[usize], n_symbols: usize, delay: usize) -> Sample {
    let l = content.len();
    let t_len = 2 * l + delay + 1;
    let trigger = l + delay;
    let mut input = Array2::zeros((t_len, n_symbols + 1));
    let mut target = Array2::zeros((t_len, n_symbols));
    let mut mask = Array1::from_elem(t_len, false);
    for (t, &s) in content.iter().enumerate() {
        set_one_hot(input.row_mut(t), 0, s);
        set_one_hot(target.row_mut(trigger + 1 + t), 0, s);
        mask[trigger + 1 + t] = true;
    }
    input[[trigger, n_symbols]] = 1.0;
    classification(input, target, mask)
}

pub fn gen_simple_copy(c: &SymbolDelayConfig, seed: Seed) -> Result<Dataset, GenError> {
    count_based(TaskConfig::SimpleCopy(c.clone()), seed, |s| {
        let content: Vec<usize> = (0..c.sequence_length)
            .map(|_| s.index_unchecked(c.n_symbols))
            .collect();
        simple_copy_sample(&content, c.n_symbols, c.delay)
    })
}

/// Like simple copy, but only the symbols at `markers` are replayed, in
/// order of position. Timeline length is `content.len() + delay + 1 + markers.len()`.
pub fn selective_copy_sample(
    content: &[usize],
    markers: &[usize],
    n_symbols: usize,
    delay: usize,
) -> Sample {
    let l = content.len();
    let k = markers.len();
    let t_len = l + delay + 1 + k;
    let trigger = l + delay;
    let marker_ch = n_symbols;
    let trigger_ch = n_symbols + 1;
    let mut input = Array2::zeros((t_len, n_symbols + 2));
    let mut target = Array2::zeros((t_len, n_symbols));
    let mut mask = Array1::from_elem(t_len, false);
    for (t, &s) in content.iter().enumerate() {
        set_one_hot(input.row_mut(t), 0, s);
    }
    let mut ordered = markers.to_vec();
    ordered.sort_unstable();
    for (j, &p) in ordered.iter().enumerate() {
        input[[p, marker_ch]] = 1.0;
        set_one_hot(target.row_mut(trigger + 1 + j), 0, content[p]);
        mask[trigger + 1 + j] = true;
    }
    input[[trigger, trigger_ch]] = 1.0;
    classification(input, target, mask)
}

pub fn gen_selective_copy(c: &SelectiveCopyConfig, seed: Seed) -> Result<Dataset, GenError> {
    count_based(TaskConfig::SelectiveCopy(c.clone()), seed, |s| {
        let content: Vec<usize> = (0..c.sequence_length)
            .map(|_| s.index_unchecked(c.n_symbols))
            .collect();
        let markers = s.sample_distinct(c.sequence_length, c.n_markers);
        selective_copy_sample(&content, &markers, c.n_symbols, c.delay)
    })
}

/// Key/value pairs presented as consecutive steps after leading zero padding;
/// the final step shows `pairs[query].0` with the query flag set.
pub fn associative_recall_sample(
    pairs: &[(usize, usize)],
    query: usize,
    n_symbols: usize,
    sequence_length: usize,
) -> Sample {
    let t_len = sequence_length;
    let pad = t_len - 1 - 2 * pairs.len();
    let mut input = Array2::zeros((t_len, n_symbols + 1));
    let mut target = Array2::zeros((t_len, n_symbols));
    let mut mask = Array1::from_elem(t_len, false);
    for (i, &(k, v)) in pairs.iter().enumerate() {
        set_one_hot(input.row_mut(pad + 2 * i), 0, k);
        set_one_hot(input.row_mut(pad + 2 * i + 1), 0, v);
    }
    let last = t_len - 1;
    set_one_hot(input.row_mut(last), 0, pairs[query].0);
    input[[last, n_symbols]] = 1.0;
    set_one_hot(target.row_mut(last), 0, pairs[query].1);
    mask[last] = true;
    classification(input, target, mask)
}

pub fn gen_associative_recall(
    c: &AssociativeRecallConfig,
    seed: Seed,
) -> Result<Dataset, GenError> {
    count_based(TaskConfig::AssociativeRecall(c.clone()), seed, |s| {
        let keys = s.sample_distinct(c.n_symbols, c.num_pairs);
        let pairs: Vec<(usize, usize)> = keys
            .into_iter()
            .map(|k| (k, s.index_unchecked(c.n_symbols)))
            .collect();
        let query = s.index_unchecked(c.num_pairs);
        associative_recall_sample(&pairs, query, c.n_symbols, c.sequence_length)
    })
}
