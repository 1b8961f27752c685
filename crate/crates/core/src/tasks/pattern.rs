//! Pattern completion and induction heads.

use ndarray::{Array1, Array2};

use super::{count_based, GenError};
use crate::config::{
    ContinuousPatternConfig, DiscretePatternConfig, SymbolSequenceConfig, TaskConfig,
};
use crate::model::{set_one_hot, Dataset, MetricKind, Sample};
use crate::rng::Seed;

/// `ceil(mask_ratio * length)`, tolerant to products like `0.2 * 60 = 12.000000000000002`.
pub fn masked_count(mask_ratio: f64, length: usize) -> usize {
    ((mask_ratio * length as f64 - 1e-9).ceil().max(1.0) as usize).min(length)
}

/// Periodic repetition of `motif`; `masked` steps show only the mask flag.
pub fn discrete_pattern_sample(
    motif: &[usize],
    length: usize,
    masked: &[usize],
    n_symbols: usize,
) -> Sample {
    let flag = n_symbols;
    let mut input = Array2::zeros((length, n_symbols + 1));
    let mut target = Array2::zeros((length, n_symbols));
    let mut mask = Array1::from_elem(length, false);
    for &t in masked {
        mask[t] = true;
    }
    for t in 0..length {
        let sym = motif[t % motif.len()];
        set_one_hot(target.row_mut(t), 0, sym);
        if mask[t] {
            input[[t, flag]] = 1.0;
        } else {
            set_one_hot(input.row_mut(t), 0, sym);
        }
    }
    Sample {
        input,
        target,
        eval_mask: mask,
        metric: MetricKind::ClassificationErrorRate,
        slot_layout: None,
    }
}

pub fn gen_discrete_pattern_completion(
    c: &DiscretePatternConfig,
    seed: Seed,
) -> Result<Dataset, GenError> {
    count_based(
        TaskConfig::DiscretePatternCompletion(c.clone()),
        seed,
        |s| {
            let motif: Vec<usize> = (0..c.base_length)
                .map(|_| s.index_unchecked(c.n_symbols))
                .collect();
            let masked = s.sample_distinct(
                c.sequence_length,
                masked_count(c.mask_ratio, c.sequence_length),
            );
            discrete_pattern_sample(&motif, c.sequence_length, &masked, c.n_symbols)
        },
    )
}

/// Continuous variant: channel 0 carries the value (0 when masked), channel 1 the flag.
pub fn continuous_pattern_sample(motif: &[f64], length: usize, masked: &[usize]) -> Sample {
    let mut input = Array2::zeros((length, 2));
    let mut target = Array2::zeros((length, 1));
    let mut mask = Array1::from_elem(length, false);
    for &t in masked {
        mask[t] = true;
    }
    for t in 0..length {
        let v = motif[t % motif.len()] as f32;
        target[[t, 0]] = v;
        if mask[t] {
            input[[t, 1]] = 1.0;
        } else {
            input[[t, 0]] = v;
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

pub fn gen_continuous_pattern_completion(
    c: &ContinuousPatternConfig,
    seed: Seed,
) -> Result<Dataset, GenError> {
    count_based(
        TaskConfig::ContinuousPatternCompletion(c.clone()),
        seed,
        |s| {
            let motif: Vec<f64> = (0..c.base_length)
                .map(|_| s.uniform_unchecked(-1.0, 1.0))
                .collect();
            let masked = s.sample_distinct(
                c.sequence_length,
                masked_count(c.mask_ratio, c.sequence_length),
            );
            continuous_pattern_sample(&motif, c.sequence_length, &masked)
        },
    )
}

/// Sequence `half ++ half` with next-token targets; only steps whose next
/// token is fixed by the repetition (`L/2 - 1 ..= L - 2`) are masked.
pub fn induction_sample(half: &[usize], n_symbols: usize) -> Sample {
    let h = half.len();
    let l = 2 * h;
    let seq: Vec<usize> = half.iter().chain(half.iter()).copied().collect();
    let mut input = Array2::zeros((l, n_symbols));
    let mut target = Array2::zeros((l, n_symbols));
    let mut mask = Array1::from_elem(l, false);
    for t in 0..l {
        set_one_hot(input.row_mut(t), 0, seq[t]);
        if t + 1 < l {
            set_one_hot(target.row_mut(t), 0, seq[t + 1]);
        }
        if t + 1 >= h && t + 2 <= l {
            mask[t] = true;
        }
    }
    Sample {
        input,
        target,
        eval_mask: mask,
        metric: MetricKind::ClassificationErrorRate,
        slot_layout: None,
    }
}

pub fn gen_induction_heads(c: &SymbolSequenceConfig, seed: Seed) -> Result<Dataset, GenError> {
    count_based(TaskConfig::InductionHeads(c.clone()), seed, |s| {
        let half: Vec<usize> = (0..c.sequence_length / 2)
            .map(|_| s.index_unchecked(c.n_symbols))
            .collect();
        induction_sample(&half, c.n_symbols)
    })
}
