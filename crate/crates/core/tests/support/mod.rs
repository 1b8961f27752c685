//! Independent oracles shared by the integration tests.
//!
//! Every oracle decodes a generated sample from its input matrix alone,
//! recomputes the expected targets and mask with straightforward loops, and
//! compares them with what the generator produced. None of them call back
//! into the generator code.

#![allow(dead_code)]

use std::f64::consts::PI;

use cogscale::config::{
    forecast_split_lengths, AddingConfig, AssociativeRecallConfig, BracketConfig,
    ContinuousPatternConfig, ContinuousPostcastingConfig, CrossSituationConfig,
    DiscretePatternConfig, ForecastConfig, SelectiveCopyConfig, SymbolDelayConfig,
    SymbolSequenceConfig,
};
use cogscale::tasks::sinus_parameters;
use cogscale::{
    derive_stream, generate, Dataset, MetricKind, RngStream, Sample, Seed, TaskConfig, TaskId,
};

/// Small random-draw helper over a crate stream.
pub struct Draw(pub RngStream);

impl Draw {
    pub fn new(seed: u64, label: u64) -> Self {
        Draw(derive_stream(Seed(seed), label))
    }

    /// Integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.0.draw_index(hi - lo + 1).unwrap()
    }

    pub fn real(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.draw_uniform(lo, hi).unwrap()
    }

    pub fn coin(&mut self) -> bool {
        self.0.coin()
    }

    pub fn u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}

fn counts(d: &mut Draw) -> (usize, usize, usize) {
    (d.int(1, 3), d.int(1, 2), d.int(1, 3))
}

/// A random valid configuration of `task`.
pub fn random_config(task: TaskId, d: &mut Draw) -> TaskConfig {
    let (n_train, n_valid, n_test) = counts(d);
    match task {
        TaskId::SinusForecasting | TaskId::ChaoticForecasting => {
            let sequence_length = d.int(40, 400);
            let valid_len = (sequence_length as f64 * 0.1).round() as usize;
            let c = ForecastConfig {
                sequence_length,
                forecast_length: d.int(0, valid_len.saturating_sub(1)),
                training_ratio: 0.45,
                validation_ratio: 0.1,
                testing_ratio: 0.45,
            };
            if task == TaskId::SinusForecasting {
                TaskConfig::SinusForecasting(c)
            } else {
                TaskConfig::ChaoticForecasting(c)
            }
        }
        TaskId::DiscretePostcasting | TaskId::SimpleCopy => {
            let sequence_length = d.int(1, 40);
            let c = SymbolDelayConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length,
                delay: d.int(0, sequence_length - 1),
                n_symbols: d.int(2, 10),
            };
            if task == TaskId::SimpleCopy {
                TaskConfig::SimpleCopy(c)
            } else {
                TaskConfig::DiscretePostcasting(c)
            }
        }
        TaskId::ContinuousPostcasting => {
            let sequence_length = d.int(1, 60);
            TaskConfig::ContinuousPostcasting(ContinuousPostcastingConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length,
                delay: d.int(0, sequence_length - 1),
            })
        }
        TaskId::DiscretePatternCompletion => {
            let sequence_length = d.int(1, 80);
            TaskConfig::DiscretePatternCompletion(DiscretePatternConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length,
                n_symbols: d.int(2, 10),
                base_length: d.int(1, sequence_length),
                mask_ratio: d.int(1, 99) as f64 / 100.0,
            })
        }
        TaskId::ContinuousPatternCompletion => {
            let sequence_length = d.int(1, 80);
            TaskConfig::ContinuousPatternCompletion(ContinuousPatternConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length,
                base_length: d.int(1, sequence_length),
                mask_ratio: d.int(1, 99) as f64 / 100.0,
            })
        }
        TaskId::BracketMatching => TaskConfig::BracketMatching(BracketConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: 2 * d.int(1, 40),
            max_depth: d.int(1, 12),
        }),
        TaskId::SelectiveCopy => {
            let sequence_length = d.int(1, 40);
            TaskConfig::SelectiveCopy(SelectiveCopyConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length,
                delay: d.int(0, sequence_length - 1),
                n_markers: d.int(1, sequence_length),
                n_symbols: d.int(2, 10),
            })
        }
        TaskId::AddingProblem => TaskConfig::AddingProblem(AddingConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: d.int(3, 30),
            max_number: d.int(2, 10),
        }),
        TaskId::SortingProblem => TaskConfig::SortingProblem(SymbolSequenceConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: d.int(1, 25),
            n_symbols: d.int(2, 10),
        }),
        TaskId::InductionHeads => TaskConfig::InductionHeads(SymbolSequenceConfig {
            n_train,
            n_valid,
            n_test,
            sequence_length: 2 * d.int(1, 40),
            n_symbols: d.int(2, 10),
        }),
        TaskId::AssociativeRecall => {
            let n_symbols = d.int(2, 16);
            let num_pairs = d.int(1, n_symbols);
            TaskConfig::AssociativeRecall(AssociativeRecallConfig {
                n_train,
                n_valid,
                n_test,
                sequence_length: 2 * num_pairs + 1 + d.int(0, 10),
                num_pairs,
                n_symbols,
            })
        }
        TaskId::CrossSituation => {
            // words drawn from one pool, so the same surface word can name
            // labels in two categories
            let pool = [
                "glass", "orange", "cup", "bowl", "blue", "red", "green", "left", "right",
                "center", "middle", "top", "plate", "pink",
            ];
            let category = |d: &mut Draw| -> Vec<Vec<String>> {
                let n_labels = d.int(2, 4);
                let mut order: Vec<usize> = (0..pool.len()).collect();
                for i in 0..order.len() {
                    let j = d.int(i, order.len() - 1);
                    order.swap(i, j);
                }
                let mut next = order.into_iter();
                (0..n_labels)
                    .map(|_| {
                        (0..d.int(1, 2))
                            .map(|_| pool[next.next().unwrap()].to_string())
                            .collect()
                    })
                    .collect()
            };
            TaskConfig::CrossSituation(CrossSituationConfig {
                n_train,
                n_valid,
                n_test,
                objects: category(d),
                colors: category(d),
                positions: category(d),
            })
        }
    }
}

/// Class of a one-hot row, `None` for an all-zero row, an error otherwise.
fn hot(row: &[f32]) -> Result<Option<usize>, String> {
    let mut found = None;
    for (i, &v) in row.iter().enumerate() {
        if v == 1.0 {
            if found.is_some() {
                return Err(format!("row {row:?} has two ones"));
            }
            found = Some(i);
        } else if v != 0.0 {
            return Err(format!("row {row:?} is not binary"));
        }
    }
    Ok(found)
}

fn class(row: &[f32]) -> Result<usize, String> {
    hot(row)?.ok_or_else(|| "expected a one-hot row, found zeros".to_string())
}

fn zero(row: &[f32]) -> bool {
    row.iter().all(|v| *v == 0.0)
}

fn row(m: &ndarray::Array2<f32>, t: usize) -> &[f32] {
    m.row(t).to_slice().expect("standard layout")
}

fn cols(m: &ndarray::Array2<f32>, t: usize, range: std::ops::Range<usize>) -> &[f32] {
    &row(m, t)[range]
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

fn expect_mask(s: &Sample, expected: &[bool]) -> Result<(), String> {
    ensure!(
        s.eval_mask.iter().copied().eq(expected.iter().copied()),
        "mask {:?} differs from {:?}",
        s.eval_mask.to_vec(),
        expected
    );
    Ok(())
}

fn only_last(t_len: usize) -> Vec<bool> {
    (0..t_len).map(|t| t + 1 == t_len).collect()
}

/// Checks a whole dataset against the oracle of its task.
pub fn check_dataset(d: &Dataset) -> Result<(), String> {
    ensure!(d.task == d.config.task(), "task tag mismatch");
    ensure!(d.metric == d.task.metric(), "metric kind mismatch");
    if let Some(c) = d.config.split_counts() {
        ensure!(
            [d.train.len(), d.valid.len(), d.test.len()] == c,
            "split counts differ from the configuration"
        );
    }
    for (split, samples) in d.splits() {
        for (i, s) in samples.iter().enumerate() {
            ensure!(s.metric == d.metric, "{split} {i}: metric kind");
            ensure!(
                s.d_in() == d.d_in && s.d_out() == d.d_out,
                "{split} {i}: width ({}, {}) vs ({}, {})",
                s.d_in(),
                s.d_out(),
                d.d_in,
                d.d_out
            );
            ensure!(
                s.target.nrows() == s.len() && s.eval_mask.len() == s.len(),
                "{split} {i}: length mismatch"
            );
            ensure!(s.n_masked() > 0, "{split} {i}: empty mask");
            check_sample(&d.config, s).map_err(|e| format!("{split} sample {i}: {e}"))?;
        }
    }
    if let TaskConfig::SinusForecasting(c) | TaskConfig::ChaoticForecasting(c) = &d.config {
        check_forecast_series(d, c)?;
    }
    Ok(())
}

fn check_sample(config: &TaskConfig, s: &Sample) -> Result<(), String> {
    match config {
        TaskConfig::SinusForecasting(c) | TaskConfig::ChaoticForecasting(c) => {
            shift_forward(s, c.forecast_length)
        }
        TaskConfig::DiscretePostcasting(c) => discrete_shift(s, c),
        TaskConfig::ContinuousPostcasting(c) => continuous_shift(s, c),
        TaskConfig::DiscretePatternCompletion(c) => discrete_period(s, c),
        TaskConfig::ContinuousPatternCompletion(c) => continuous_period(s, c),
        TaskConfig::BracketMatching(c) => bracket_stack(s, c),
        TaskConfig::SimpleCopy(c) => copy_replay(s, c),
        TaskConfig::SelectiveCopy(c) => selective_filter(s, c),
        TaskConfig::AddingProblem(c) => adding_sum(s, c),
        TaskConfig::SortingProblem(c) => sorting_inverse(s, c),
        TaskConfig::CrossSituation(c) => cross_round_trip(s, c),
        TaskConfig::AssociativeRecall(c) => recall_lookup(s, c),
        TaskConfig::InductionHeads(c) => induction_half_copy(s, c),
    }
}

/// Forecasting: `target[t] = input[t + h]` inside the segment.
fn shift_forward(s: &Sample, h: usize) -> Result<(), String> {
    let t_len = s.len();
    let mask: Vec<bool> = (0..t_len).map(|t| t + h < t_len).collect();
    expect_mask(s, &mask)?;
    for t in 0..t_len {
        let expected: Vec<f32> = if t + h < t_len {
            row(&s.input, t + h).to_vec()
        } else {
            vec![0.0; s.d_out()]
        };
        ensure!(
            row(&s.target, t) == expected.as_slice(),
            "target at {t} is not the input at {t}+{h}"
        );
    }
    Ok(())
}

fn check_forecast_series(d: &Dataset, c: &ForecastConfig) -> Result<(), String> {
    let l = c.sequence_length;
    let train = (l as f64 * c.training_ratio).round() as usize;
    let valid = (l as f64 * c.validation_ratio).round() as usize;
    let lens = [train, valid, l - train - valid];
    ensure!(lens == forecast_split_lengths(c), "split lengths {lens:?}");
    let segs = [&d.train, &d.valid, &d.test];
    for (seg, len) in segs.iter().zip(lens) {
        ensure!(seg.len() == 1 && seg[0].len() == len, "segment length");
    }
    let series: Vec<&[f32]> = segs
        .iter()
        .flat_map(|seg| (0..seg[0].len()).map(move |t| row(&seg[0].input, t)))
        .collect();
    match d.task {
        TaskId::SinusForecasting => {
            let (f, phase) = sinus_parameters(d.seed);
            ensure!(
                (0.02..0.1).contains(&f) && (0.0..2.0 * PI).contains(&phase),
                "sine parameters"
            );
            for (t, v) in series.iter().enumerate() {
                let expected = (2.0 * PI * f * t as f64 + phase).sin();
                ensure!((v[0] as f64 - expected).abs() < 1e-6, "sine value at {t}");
            }
        }
        _ => {
            for dim in 0..3 {
                let vals: Vec<f32> = series.iter().map(|v| v[dim]).collect();
                let lo = vals.iter().copied().fold(f32::INFINITY, f32::min);
                let hi = vals.iter().copied().fold(f32::NEG_INFINITY, f32::max);
                ensure!(
                    lo == -1.0 && hi == 1.0,
                    "dimension {dim} spans [{lo}, {hi}]"
                );
            }
        }
    }
    Ok(())
}

fn discrete_shift(s: &Sample, c: &SymbolDelayConfig) -> Result<(), String> {
    ensure!(s.len() == c.sequence_length, "length");
    let symbols: Vec<usize> = (0..s.len())
        .map(|t| class(row(&s.input, t)))
        .collect::<Result<_, _>>()?;
    ensure!(symbols.iter().all(|&x| x < c.n_symbols), "symbol range");
    let mask: Vec<bool> = (0..s.len()).map(|t| t >= c.delay).collect();
    expect_mask(s, &mask)?;
    for t in 0..s.len() {
        match hot(row(&s.target, t))? {
            Some(k) => ensure!(t >= c.delay && k == symbols[t - c.delay], "target at {t}"),
            None => ensure!(t < c.delay, "missing target at {t}"),
        }
    }
    Ok(())
}

fn continuous_shift(s: &Sample, c: &ContinuousPostcastingConfig) -> Result<(), String> {
    ensure!(s.len() == c.sequence_length, "length");
    let mask: Vec<bool> = (0..s.len()).map(|t| t >= c.delay).collect();
    expect_mask(s, &mask)?;
    for t in 0..s.len() {
        let u = s.input[[t, 0]];
        ensure!((-0.8..0.8).contains(&u), "input {u} out of range");
        let expected = if t >= c.delay {
            s.input[[t - c.delay, 0]]
        } else {
            0.0
        };
        ensure!(s.target[[t, 0]] == expected, "target at {t}");
    }
    Ok(())
}

/// `ceil(p * L / 100)` in integers, at least one.
fn masked_steps_for(ratio: f64, length: usize) -> usize {
    let p = (ratio * 100.0).round() as usize;
    (p * length).div_ceil(100).clamp(1, length)
}

fn discrete_period(s: &Sample, c: &DiscretePatternConfig) -> Result<(), String> {
    let l = c.sequence_length;
    let k = c.n_symbols;
    ensure!(s.len() == l, "length");
    ensure!(
        s.n_masked() == masked_steps_for(c.mask_ratio, l),
        "mask count {}",
        s.n_masked()
    );
    let targets: Vec<usize> = (0..l)
        .map(|t| class(row(&s.target, t)))
        .collect::<Result<_, _>>()?;
    for t in 0..l {
        ensure!(targets[t] < k, "target symbol range");
        ensure!(
            targets[t] == targets[t % c.base_length],
            "target at {t} breaks the period"
        );
        let symbol = hot(cols(&s.input, t, 0..k))?;
        let flag = s.input[[t, k]];
        if s.eval_mask[t] {
            ensure!(
                symbol.is_none() && flag == 1.0,
                "masked step {t} leaks its symbol"
            );
        } else {
            ensure!(
                symbol == Some(targets[t]) && flag == 0.0,
                "visible step {t}"
            );
        }
    }
    Ok(())
}

fn continuous_period(s: &Sample, c: &ContinuousPatternConfig) -> Result<(), String> {
    let l = c.sequence_length;
    ensure!(s.len() == l, "length");
    ensure!(
        s.n_masked() == masked_steps_for(c.mask_ratio, l),
        "mask count {}",
        s.n_masked()
    );
    for t in 0..l {
        let y = s.target[[t, 0]];
        ensure!((-1.0..1.0).contains(&y), "target range");
        ensure!(
            y == s.target[[t % c.base_length, 0]],
            "target at {t} breaks the period"
        );
        if s.eval_mask[t] {
            ensure!(
                s.input[[t, 0]] == 0.0 && s.input[[t, 1]] == 1.0,
                "masked step {t}"
            );
        } else {
            ensure!(
                s.input[[t, 0]] == y && s.input[[t, 1]] == 0.0,
                "visible step {t}"
            );
        }
    }
    Ok(())
}

fn bracket_stack(s: &Sample, c: &BracketConfig) -> Result<(), String> {
    ensure!(s.len() == c.sequence_length, "length");
    let mut stack = Vec::new();
    let mut valid = true;
    for t in 0..s.len() {
        match class(row(&s.input, t))? {
            0 => stack.push(t),
            _ => valid &= stack.pop().is_some(),
        }
    }
    valid &= stack.is_empty();
    expect_mask(s, &only_last(s.len()))?;
    let label = class(row(&s.target, s.len() - 1))?;
    ensure!(
        label == if valid { 0 } else { 1 },
        "label {label}, stack says valid={valid}"
    );
    Ok(())
}

fn copy_replay(s: &Sample, c: &SymbolDelayConfig) -> Result<(), String> {
    let l = c.sequence_length;
    let k = c.n_symbols;
    let trigger = l + c.delay;
    ensure!(s.len() == 2 * l + c.delay + 1, "length");
    let mut content = Vec::new();
    for t in 0..s.len() {
        let sym = hot(cols(&s.input, t, 0..k))?;
        ensure!((t < l) == sym.is_some(), "symbol presence at {t}");
        content.extend(sym);
        ensure!((s.input[[t, k]] == 1.0) == (t == trigger), "trigger at {t}");
    }
    let mask: Vec<bool> = (0..s.len()).map(|t| t > trigger).collect();
    expect_mask(s, &mask)?;
    for t in 0..s.len() {
        match hot(row(&s.target, t))? {
            Some(x) => ensure!(
                t > trigger && x == content[t - trigger - 1],
                "replay at {t}"
            ),
            None => ensure!(t <= trigger, "missing replay at {t}"),
        }
    }
    Ok(())
}

fn selective_filter(s: &Sample, c: &SelectiveCopyConfig) -> Result<(), String> {
    let (l, k, m) = (c.sequence_length, c.n_symbols, c.n_markers);
    let trigger = l + c.delay;
    ensure!(s.len() == l + c.delay + 1 + m, "length");
    let mut content = Vec::new();
    let mut marked = Vec::new();
    for t in 0..s.len() {
        let sym = hot(cols(&s.input, t, 0..k))?;
        ensure!((t < l) == sym.is_some(), "symbol presence at {t}");
        content.extend(sym);
        if s.input[[t, k]] == 1.0 {
            ensure!(t < l, "marker outside the content");
            marked.push(content[t]);
        }
        ensure!(
            (s.input[[t, k + 1]] == 1.0) == (t == trigger),
            "trigger at {t}"
        );
    }
    ensure!(marked.len() == m, "{} markers", marked.len());
    let mask: Vec<bool> = (0..s.len()).map(|t| t > trigger).collect();
    expect_mask(s, &mask)?;
    for (j, &x) in marked.iter().enumerate() {
        ensure!(class(row(&s.target, trigger + 1 + j))? == x, "output {j}");
    }
    Ok(())
}

fn adding_sum(s: &Sample, c: &AddingConfig) -> Result<(), String> {
    let (l, m) = (c.sequence_length, c.max_number);
    ensure!(s.len() == l + 1 && s.d_out() == 2 * m - 1, "shape");
    let mut sum = 0;
    let mut markers = 0;
    for t in 0..l {
        let digit = class(cols(&s.input, t, 0..m))?;
        if s.input[[t, m]] == 1.0 {
            sum += digit;
            markers += 1;
        }
        ensure!(s.input[[t, m + 1]] == 0.0, "early trigger");
    }
    ensure!(
        zero(cols(&s.input, l, 0..m + 1)) && s.input[[l, m + 1]] == 1.0,
        "trigger step"
    );
    ensure!(markers == 2, "{markers} markers");
    expect_mask(s, &only_last(s.len()))?;
    ensure!(class(row(&s.target, l))? == sum, "sum");
    Ok(())
}

fn sorting_inverse(s: &Sample, c: &SymbolSequenceConfig) -> Result<(), String> {
    let (l, k) = (c.sequence_length, c.n_symbols);
    ensure!(s.len() == 2 * l + 1, "length");
    let mut at_position = vec![None; l];
    for i in 0..l {
        let sym = class(cols(&s.input, i, 0..k))?;
        let pos = class(cols(&s.input, i, k..k + l))?;
        ensure!(at_position[pos].is_none(), "position {pos} repeated");
        at_position[pos] = Some(sym);
    }
    for t in l..s.len() {
        let trigger = s.input[[t, k + l]] == 1.0;
        ensure!(trigger == (t == l), "trigger at {t}");
        ensure!(
            zero(cols(&s.input, t, 0..k + l)),
            "input after content at {t}"
        );
    }
    let mask: Vec<bool> = (0..s.len()).map(|t| t > l).collect();
    expect_mask(s, &mask)?;
    for (j, expected) in at_position.iter().enumerate() {
        ensure!(
            Some(class(row(&s.target, l + 1 + j))?) == *expected,
            "output {j}"
        );
    }
    Ok(())
}

fn cross_round_trip(s: &Sample, c: &CrossSituationConfig) -> Result<(), String> {
    let mut words: Vec<String> = ["the", "is", "on", "and"]
        .iter()
        .map(|w| w.to_string())
        .collect();
    for w in c
        .objects
        .iter()
        .chain(&c.colors)
        .chain(&c.positions)
        .flatten()
    {
        if !words.contains(w) {
            words.push(w.clone());
        }
    }
    ensure!(
        s.d_in() == words.len(),
        "vocabulary size {} vs {}",
        s.d_in(),
        words.len()
    );
    ensure!(s.len() == 15, "length");
    let sentence: Vec<&str> = (0..15)
        .map(|t| class(row(&s.input, t)).map(|i| words[i].as_str()))
        .collect::<Result<_, _>>()?;
    let label =
        |labels: &[Vec<String>], w: &str| labels.iter().position(|syn| syn.iter().any(|x| x == w));
    let mut situations = Vec::new();
    for k in 0..2 {
        let w = &sentence[k * 8..k * 8 + 7];
        ensure!(
            w[0] == "the" && w[3] == "is" && w[4] == "on" && w[5] == "the",
            "sentence shape {sentence:?}"
        );
        let color = label(&c.colors, w[1]).ok_or("unknown color")?;
        let object = label(&c.objects, w[2]).ok_or("unknown object")?;
        let position = label(&c.positions, w[6]).ok_or("unknown position")?;
        situations.push((position, object, color));
    }
    ensure!(sentence[7] == "and", "conjunction");
    ensure!(situations[0].0 != situations[1].0, "positions must differ");
    ensure!(situations[0].1 != situations[1].1, "objects must differ");
    situations.sort();
    let (no, nc, np) = (c.objects.len(), c.colors.len(), c.positions.len());
    let slots = s.slot_layout.as_ref().ok_or("missing slot layout")?;
    ensure!(slots.len() == 6, "six slots");
    expect_mask(s, &only_last(15))?;
    let mut expected = Vec::new();
    for &(position, object, color) in &situations {
        expected.extend([object, color, position]);
    }
    let widths = [no, nc, np, no, nc, np];
    let mut offset = 0;
    for (j, slot) in slots.iter().enumerate() {
        ensure!(
            slot.offset == offset && slot.width == widths[j],
            "slot {j} geometry"
        );
        let got = class(cols(&s.target, 14, slot.offset..slot.offset + slot.width))?;
        ensure!(got == expected[j], "slot {j}: {got} vs {}", expected[j]);
        offset += slot.width;
    }
    ensure!(offset == s.d_out(), "slots cover the output");
    for t in 0..14 {
        ensure!(zero(row(&s.target, t)), "target before the final step");
    }
    Ok(())
}

fn recall_lookup(s: &Sample, c: &AssociativeRecallConfig) -> Result<(), String> {
    let (l, k, p) = (c.sequence_length, c.n_symbols, c.num_pairs);
    ensure!(s.len() == l, "length");
    let pad = l - 1 - 2 * p;
    for t in 0..pad {
        ensure!(zero(row(&s.input, t)), "padding at {t}");
    }
    let mut table = Vec::new();
    for i in 0..p {
        let key = class(cols(&s.input, pad + 2 * i, 0..k))?;
        let value = class(cols(&s.input, pad + 2 * i + 1, 0..k))?;
        ensure!(table.iter().all(|(k2, _)| *k2 != key), "key {key} repeated");
        table.push((key, value));
    }
    for t in 0..l - 1 {
        ensure!(s.input[[t, k]] == 0.0, "early query flag");
    }
    ensure!(s.input[[l - 1, k]] == 1.0, "query flag");
    let query = class(cols(&s.input, l - 1, 0..k))?;
    let answer = table.iter().find(|(key, _)| *key == query).map(|(_, v)| *v);
    ensure!(answer.is_some(), "query key {query} not in the table");
    expect_mask(s, &only_last(l))?;
    ensure!(
        Some(class(row(&s.target, l - 1))?) == answer,
        "looked-up value"
    );
    Ok(())
}

fn induction_half_copy(s: &Sample, c: &SymbolSequenceConfig) -> Result<(), String> {
    let l = c.sequence_length;
    let h = l / 2;
    ensure!(s.len() == l, "length");
    let seq: Vec<usize> = (0..l)
        .map(|t| class(row(&s.input, t)))
        .collect::<Result<_, _>>()?;
    ensure!(
        seq[..h] == seq[h..],
        "second half is not a copy of the first"
    );
    let mask: Vec<bool> = (0..l).map(|t| t + 1 >= h && t + 1 < l).collect();
    expect_mask(s, &mask)?;
    for t in 0..l - 1 {
        ensure!(class(row(&s.target, t))? == seq[t + 1], "next token at {t}");
    }
    Ok(())
}

/// Runs `configs` random configurations of every task through the oracles.
/// Returns the number of mismatching (config, seed) pairs per task.
pub fn generator_oracle_suite(configs: usize) -> Vec<(TaskId, usize, Option<String>)> {
    TaskId::ALL
        .iter()
        .map(|&task| {
            let mut d = Draw::new(0x0AC1E, task.index() as u64);
            let mut failures = 0;
            let mut first = None;
            for _ in 0..configs {
                let config = random_config(task, &mut d);
                let seed = Seed(d.u64());
                let outcome = generate(&config, seed)
                    .map_err(|e| e.to_string())
                    .and_then(|ds| check_dataset(&ds));
                if let Err(e) = outcome {
                    failures += 1;
                    first.get_or_insert_with(|| format!("{config:?} seed {}: {e}", seed.0));
                }
            }
            (task, failures, first)
        })
        .collect()
}

/// Loop oracles for the three metric kinds.
pub mod metric_oracle {
    use super::*;
    use cogscale::Slot;
    use ndarray::{Array1, Array2};

    fn first_max(values: &[f64]) -> usize {
        let mut best = 0;
        for i in 1..values.len() {
            if values[i] > values[best] {
                best = i;
            }
        }
        best
    }

    /// Brute-force score of `pred` on `s`.
    pub fn score(pred: &Array2<f64>, s: &Sample) -> f64 {
        let mut err = 0.0;
        let mut n = 0usize;
        for t in 0..s.len() {
            if !s.eval_mask[t] {
                continue;
            }
            match s.metric {
                MetricKind::RegressionMse => {
                    for j in 0..s.d_out() {
                        let d = pred[[t, j]] - s.target[[t, j]] as f64;
                        err += d * d;
                        n += 1;
                    }
                }
                _ => {
                    let slots = s.slot_layout.clone().unwrap_or(vec![Slot {
                        offset: 0,
                        width: s.d_out(),
                    }]);
                    for slot in slots {
                        let p: Vec<f64> = (slot.offset..slot.offset + slot.width)
                            .map(|j| pred[[t, j]])
                            .collect();
                        let y: Vec<f64> = (slot.offset..slot.offset + slot.width)
                            .map(|j| s.target[[t, j]] as f64)
                            .collect();
                        if first_max(&p) != first_max(&y) {
                            err += 1.0;
                        }
                        n += 1;
                    }
                }
            }
        }
        err / n as f64
    }

    /// A random sample of `kind` with a random prediction that has frequent ties.
    pub fn random_pair(kind: MetricKind, d: &mut Draw) -> (Sample, Array2<f64>) {
        let t_len = d.int(1, 30);
        let mut mask = Array1::from_shape_fn(t_len, |_| d.coin());
        mask[d.int(0, t_len - 1)] = true;
        let (d_out, slots) = match kind {
            MetricKind::MultiLabelLabelErrorRate => {
                let widths: Vec<usize> = (0..d.int(1, 6)).map(|_| d.int(1, 5)).collect();
                let mut offset = 0;
                let slots: Vec<Slot> = widths
                    .iter()
                    .map(|&width| {
                        let s = Slot { offset, width };
                        offset += width;
                        s
                    })
                    .collect();
                (offset, Some(slots))
            }
            _ => (d.int(1, 8), None),
        };
        let mut target = Array2::<f32>::zeros((t_len, d_out));
        match kind {
            MetricKind::RegressionMse => target.mapv_inplace(|_| d.real(-2.0, 2.0) as f32),
            _ => {
                let groups = slots.clone().unwrap_or(vec![Slot {
                    offset: 0,
                    width: d_out,
                }]);
                for t in 0..t_len {
                    if mask[t] {
                        for g in &groups {
                            target[[t, g.offset + d.int(0, g.width - 1)]] = 1.0;
                        }
                    }
                }
            }
        }
        let pred = Array2::from_shape_fn((t_len, d_out), |_| match kind {
            MetricKind::RegressionMse => d.real(-3.0, 3.0),
            _ => d.int(0, 3) as f64 * 0.5,
        });
        let sample = Sample {
            input: Array2::zeros((t_len, 1)),
            target,
            eval_mask: mask,
            metric: kind,
            slot_layout: slots,
        };
        (sample, pred)
    }
}

/// Explicit normal-equation ridge solution `(X^T X + lambda I)^-1 X^T Y`.
pub fn normal_equation_ridge(
    x: &nalgebra::DMatrix<f64>,
    y: &nalgebra::DMatrix<f64>,
    lambda: f64,
) -> nalgebra::DMatrix<f64> {
    let xt = x.transpose();
    let g = &xt * x + nalgebra::DMatrix::identity(x.ncols(), x.ncols()) * lambda;
    g.try_inverse()
        .expect("regularized Gram matrix is invertible")
        * xt
        * y
}

/// Largest eigenvalue modulus from a dense eigensolver.
pub fn dense_spectral_radius(w: &cogscale::esn::Csr) -> f64 {
    let d = w.to_dense();
    let m = nalgebra::DMatrix::from_fn(w.n, w.n, |i, j| d[[i, j]]);
    m.complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Largest width in `range` whose count fits, by linear scan.
pub fn linear_scan_width(
    budget: u64,
    count: impl Fn(usize) -> u64,
    range: std::ops::RangeInclusive<usize>,
) -> Option<usize> {
    range.filter(|&w| count(w) <= budget).last()
}

/// A random monotone non-decreasing count function, as a lookup table over
/// `lo..=hi`, plus its width range.
pub fn random_monotone_counts(d: &mut Draw) -> (Vec<u64>, usize, usize) {
    let lo = d.int(0, 50);
    let hi = lo + d.int(0, 400);
    let base = d.int(0, 2000) as u64;
    let style = d.int(0, 2);
    let mut table = Vec::with_capacity(hi - lo + 1);
    let mut acc = base;
    for w in lo..=hi {
        acc += match style {
            0 => d.int(0, 20) as u64,
            1 => w as u64 / 10 + 1,
            _ => {
                if d.int(0, 9) == 0 {
                    d.int(0, 300) as u64
                } else {
                    0
                }
            }
        };
        table.push(acc);
    }
    (table, lo, hi)
}
