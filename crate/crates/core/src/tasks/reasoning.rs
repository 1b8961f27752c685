//! Manipulation tasks: adding, sorting, bracket matching and cross situation.

use ndarray::{Array1, Array2};

use super::{count_based, slot_layout, GenError};
use crate::config::{
    AddingConfig, BracketConfig, CrossSituationConfig, SymbolSequenceConfig, TaskConfig,
};
use crate::model::{set_one_hot, Dataset, MetricKind, Sample};
use crate::rng::{RngStream, Seed};

fn single_query(input: Array2<f32>, d_out: usize, class: usize) -> Sample {
    let t_len = input.nrows();
    let mut target = Array2::zeros((t_len, d_out));
    let mut mask = Array1::from_elem(t_len, false);
    set_one_hot(target.row_mut(t_len - 1), 0, class);
    mask[t_len - 1] = true;
    Sample {
        input,
        target,
        eval_mask: mask,
        metric: MetricKind::ClassificationErrorRate,
        slot_layout: None,
    }
}

/// Digits in `0..max_number`, two marked positions, a trigger step, and the
/// marked sum as the single target class.
pub fn adding_sample(digits: &[usize], markers: [usize; 2], max_number: usize) -> Sample {
    let l = digits.len();
    let marker_ch = max_number;
    let trigger_ch = max_number + 1;
    let mut input = Array2::zeros((l + 1, max_number + 2));
    for (t, &d) in digits.iter().enumerate() {
        set_one_hot(input.row_mut(t), 0, d);
    }
    for &m in &markers {
        input[[m, marker_ch]] = 1.0;
    }
    input[[l, trigger_ch]] = 1.0;
    let sum = digits[markers[0]] + digits[markers[1]];
    single_query(input, 2 * max_number - 1, sum)
}

pub fn gen_adding_problem(c: &AddingConfig, seed: Seed) -> Result<Dataset, GenError> {
    count_based(TaskConfig::AddingProblem(c.clone()), seed, |s| {
        let digits: Vec<usize> = (0..c.sequence_length)
            .map(|_| s.index_unchecked(c.max_number))
            .collect();
        let m = s.sample_distinct(c.sequence_length, 2);
        adding_sample(&digits, [m[0], m[1]], c.max_number)
    })
}

/// Symbol `symbols[i]` is shown with its destination `positions[i]`; after
/// the trigger, output step `j` must name the symbol whose destination is `j`.
pub fn sorting_sample(symbols: &[usize], positions: &[usize], n_symbols: usize) -> Sample {
    let l = symbols.len();
    let t_len = 2 * l + 1;
    let pos_off = n_symbols;
    let trigger_ch = n_symbols + l;
    let mut input = Array2::zeros((t_len, n_symbols + l + 1));
    let mut target = Array2::zeros((t_len, n_symbols));
    let mut mask = Array1::from_elem(t_len, false);
    for i in 0..l {
        set_one_hot(input.row_mut(i), 0, symbols[i]);
        set_one_hot(input.row_mut(i), pos_off, positions[i]);
        let out = l + 1 + positions[i];
        set_one_hot(target.row_mut(out), 0, symbols[i]);
        mask[out] = true;
    }
    input[[l, trigger_ch]] = 1.0;
    Sample {
        input,
        target,
        eval_mask: mask,
        metric: MetricKind::ClassificationErrorRate,
        slot_layout: None,
    }
}

pub fn gen_sorting_problem(c: &SymbolSequenceConfig, seed: Seed) -> Result<Dataset, GenError> {
    count_based(TaskConfig::SortingProblem(c.clone()), seed, |s| {
        let symbols: Vec<usize> = (0..c.sequence_length)
            .map(|_| s.index_unchecked(c.n_symbols))
            .collect();
        let positions = s.permutation(c.sequence_length);
        sorting_sample(&symbols, &positions, c.n_symbols)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    Open,
    Close,
}

impl Bracket {
    fn flipped(self) -> Self {
        match self {
            Bracket::Open => Bracket::Close,
            Bracket::Close => Bracket::Open,
        }
    }
}

/// True when no prefix closes more than it opens and the total depth is zero.
pub fn is_balanced(brackets: &[Bracket]) -> bool {
    let mut depth: i64 = 0;
    for b in brackets {
        depth += match b {
            Bracket::Open => 1,
            Bracket::Close => -1,
        };
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

/// Depth-constrained random walk producing a balanced string of even `length`.
pub fn random_balanced_brackets(
    length: usize,
    max_depth: usize,
    s: &mut RngStream,
) -> Vec<Bracket> {
    let mut out = Vec::with_capacity(length);
    let mut depth = 0usize;
    for t in 0..length {
        let remaining = length - t;
        let b = if depth == remaining || depth >= max_depth {
            Bracket::Close
        } else if depth == 0 || s.coin() {
            Bracket::Open
        } else {
            Bracket::Close
        };
        depth = match b {
            Bracket::Open => depth + 1,
            Bracket::Close => depth - 1,
        };
        out.push(b);
    }
    out
}

/// Two input channels (open, close); label 0 = valid, 1 = invalid at the final step.
pub fn bracket_sample(brackets: &[Bracket]) -> Sample {
    let mut input = Array2::zeros((brackets.len(), 2));
    for (t, b) in brackets.iter().enumerate() {
        let ch = match b {
            Bracket::Open => 0,
            Bracket::Close => 1,
        };
        input[[t, ch]] = 1.0;
    }
    let label = if is_balanced(brackets) { 0 } else { 1 };
    single_query(input, 2, label)
}

pub fn gen_bracket_matching(c: &BracketConfig, seed: Seed) -> Result<Dataset, GenError> {
    count_based(TaskConfig::BracketMatching(c.clone()), seed, |s| {
        let mut brackets = random_balanced_brackets(c.sequence_length, c.max_depth, s);
        if s.coin() {
            let i = s.index_unchecked(brackets.len());
            brackets[i] = brackets[i].flipped();
        }
        bracket_sample(&brackets)
    })
}

pub const FUNCTION_WORDS: [&str; 4] = ["the", "is", "on", "and"];

/// Word vocabulary of a cross situation configuration.
///
/// Function words come first, then each surface word in order of first
/// appearance across objects, colors and positions. A word that names labels
/// in two categories (e.g. "orange") gets a single token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossVocabulary {
    words: Vec<String>,
    objects: Vec<Vec<usize>>,
    colors: Vec<Vec<usize>>,
    positions: Vec<Vec<usize>>,
}

impl CrossVocabulary {
    pub fn new(c: &CrossSituationConfig) -> Self {
        let mut words: Vec<String> = FUNCTION_WORDS.iter().map(|w| w.to_string()).collect();
        let mut intern = |labels: &[Vec<String>]| -> Vec<Vec<usize>> {
            labels
                .iter()
                .map(|syns| {
                    syns.iter()
                        .map(|w| match words.iter().position(|x| x == w) {
                            Some(i) => i,
                            None => {
                                words.push(w.clone());
                                words.len() - 1
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let objects = intern(&c.objects);
        let colors = intern(&c.colors);
        let positions = intern(&c.positions);
        CrossVocabulary {
            words,
            objects,
            colors,
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn token(&self, word: &str) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }

    /// Token ids of the synonyms of object label `i`.
    pub fn object_tokens(&self, i: usize) -> &[usize] {
        &self.objects[i]
    }

    pub fn color_tokens(&self, i: usize) -> &[usize] {
        &self.colors[i]
    }

    pub fn position_tokens(&self, i: usize) -> &[usize] {
        &self.positions[i]
    }

    pub fn n_labels(&self) -> (usize, usize, usize) {
        (self.objects.len(), self.colors.len(), self.positions.len())
    }
}

/// Label indices of one (object, color, position) situation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Situation {
    pub object: usize,
    pub color: usize,
    pub position: usize,
}

/// Encodes the sentence
/// "the C O is on the P and the C O is on the P"
/// with the given surface-word choices (`synonyms[k] = [color, object, position]`
/// synonym indices for situation `k`). The single target at the final step
/// holds both situations ordered by position label.
pub fn cross_situation_sample(
    vocab: &CrossVocabulary,
    situations: [Situation; 2],
    synonyms: [[usize; 3]; 2],
) -> Sample {
    let the = vocab.token("the").unwrap();
    let is = vocab.token("is").unwrap();
    let on = vocab.token("on").unwrap();
    let and = vocab.token("and").unwrap();
    let mut tokens = Vec::with_capacity(15);
    for (k, sit) in situations.iter().enumerate() {
        if k == 1 {
            tokens.push(and);
        }
        let [cs, os, ps] = synonyms[k];
        tokens.push(the);
        tokens.push(vocab.color_tokens(sit.color)[cs]);
        tokens.push(vocab.object_tokens(sit.object)[os]);
        tokens.push(is);
        tokens.push(on);
        tokens.push(the);
        tokens.push(vocab.position_tokens(sit.position)[ps]);
    }
    let mut input = Array2::zeros((tokens.len(), vocab.len()));
    for (t, &tok) in tokens.iter().enumerate() {
        set_one_hot(input.row_mut(t), 0, tok);
    }
    let (no, nc, np) = vocab.n_labels();
    let per = no + nc + np;
    let mut ordered = situations;
    ordered.sort_by_key(|s| s.position);
    let last = tokens.len() - 1;
    let mut target = Array2::zeros((tokens.len(), 2 * per));
    for (k, sit) in ordered.iter().enumerate() {
        let base = k * per;
        set_one_hot(target.row_mut(last), base, sit.object);
        set_one_hot(target.row_mut(last), base + no, sit.color);
        set_one_hot(target.row_mut(last), base + no + nc, sit.position);
    }
    let mut mask = Array1::from_elem(tokens.len(), false);
    mask[last] = true;
    let mut offsets = Vec::with_capacity(6);
    for k in 0..2 {
        let base = k * per;
        offsets.push(crate::model::Slot {
            offset: base,
            width: no,
        });
        offsets.push(crate::model::Slot {
            offset: base + no,
            width: nc,
        });
        offsets.push(crate::model::Slot {
            offset: base + no + nc,
            width: np,
        });
    }
    Sample {
        input,
        target,
        eval_mask: mask,
        metric: MetricKind::MultiLabelLabelErrorRate,
        slot_layout: Some(offsets),
    }
}

pub fn gen_cross_situation(c: &CrossSituationConfig, seed: Seed) -> Result<Dataset, GenError> {
    let config = TaskConfig::CrossSituation(c.clone());
    config.check()?;
    let vocab = CrossVocabulary::new(c);
    debug_assert!(slot_layout(&config).is_some());
    count_based(config, seed, |s| {
        let (no, nc, np) = vocab.n_labels();
        let objs = s.sample_distinct(no, 2);
        let poss = s.sample_distinct(np, 2);
        let cols = [s.index_unchecked(nc), s.index_unchecked(nc)];
        let situations = [0, 1].map(|k| Situation {
            object: objs[k],
            color: cols[k],
            position: poss[k],
        });
        let synonyms = situations.map(|sit| {
            [
                s.index_unchecked(vocab.color_tokens(sit.color).len()),
                s.index_unchecked(vocab.object_tokens(sit.object).len()),
                s.index_unchecked(vocab.position_tokens(sit.position).len()),
            ]
        });
        cross_situation_sample(&vocab, situations, synonyms)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{preset, Difficulty, TaskId};
    use crate::model::argmax;
    use crate::rng::derive_stream;

    fn label(s: &Sample) -> usize {
        let t = s.masked_steps().next().unwrap();
        argmax(s.target.row(t).iter().copied())
    }

    #[test]
    fn adding_sum_class() {
        let s = adding_sample(&[2, 0, 1], [0, 2], 3);
        assert_eq!(s.len(), 4);
        assert_eq!(s.d_out(), 5);
        assert_eq!(label(&s), 3);
        assert_eq!(s.input[[3, 4]], 1.0);
    }

    #[test]
    fn adding_small_preset_dims() {
        let TaskConfig::AddingProblem(c) = preset(TaskId::AddingProblem, Difficulty::Small) else {
            unreachable!()
        };
        let ds = gen_adding_problem(&c, Seed(0)).unwrap();
        assert_eq!((ds.train[0].len(), ds.d_in, ds.d_out), (11, 5, 5));
        for s in &ds.train {
            assert_eq!(s.input.column(3).sum(), 2.0);
        }
    }

    #[test]
    fn sorting_inverse_permutation() {
        let s = sorting_sample(&[1, 0], &[1, 0], 2);
        let outs: Vec<usize> = s
            .masked_steps()
            .map(|t| argmax(s.target.row(t).iter().copied()))
            .collect();
        assert_eq!(outs, [0, 1]);
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn sorting_medium_timeline() {
        let TaskConfig::SortingProblem(c) = preset(TaskId::SortingProblem, Difficulty::Medium)
        else {
            unreachable!()
        };
        let ds = gen_sorting_problem(&c, Seed(0)).unwrap();
        assert_eq!(ds.train[0].len(), 41);
        assert_eq!(ds.d_in, 8 + 20 + 1);
    }

    #[test]
    fn bracket_labels() {
        use Bracket::*;
        assert_eq!(label(&bracket_sample(&[Open, Close])), 0);
        assert_eq!(label(&bracket_sample(&[Open, Open, Close])), 1);
        assert_eq!(label(&bracket_sample(&[Close, Open])), 1);
    }

    #[test]
    fn random_walk_respects_depth() {
        for seed in 0..200 {
            let mut s = derive_stream(Seed(seed), 1);
            let b = random_balanced_brackets(20, 3, &mut s);
            assert!(is_balanced(&b));
            let mut d = 0i64;
            for x in &b {
                d += if *x == Bracket::Open { 1 } else { -1 };
                assert!(d <= 3);
            }
        }
    }

    #[test]
    fn bracket_medium_preset() {
        let TaskConfig::BracketMatching(c) = preset(TaskId::BracketMatching, Difficulty::Medium)
        else {
            unreachable!()
        };
        assert_eq!((c.sequence_length, c.max_depth), (100, 10));
    }

    #[test]
    fn polysemous_word_has_one_token() {
        let TaskConfig::CrossSituation(c) = preset(TaskId::CrossSituation, Difficulty::Small)
        else {
            unreachable!()
        };
        let v = CrossVocabulary::new(&c);
        let orange = v.token("orange").unwrap();
        assert_eq!(v.object_tokens(1), [orange]);
        assert_eq!(v.color_tokens(1), [orange]);
        assert_eq!(v.words().iter().filter(|w| *w == "orange").count(), 1);
        // the is on and glass orange blue left right
        assert_eq!(v.len(), 9);
    }

    #[test]
    fn synonyms_share_a_label() {
        let TaskConfig::CrossSituation(c) = preset(TaskId::CrossSituation, Difficulty::Medium)
        else {
            unreachable!()
        };
        let v = CrossVocabulary::new(&c);
        assert_eq!(
            v.position_tokens(2),
            [v.token("center").unwrap(), v.token("middle").unwrap()]
        );
    }

    #[test]
    fn cross_situation_round_trip() {
        let TaskConfig::CrossSituation(c) = preset(TaskId::CrossSituation, Difficulty::Small)
        else {
            unreachable!()
        };
        let v = CrossVocabulary::new(&c);
        // (orange, orange, right) mentioned first, (glass, blue, left) second
        let sits = [
            Situation {
                object: 1,
                color: 1,
                position: 1,
            },
            Situation {
                object: 0,
                color: 0,
                position: 0,
            },
        ];
        let s = cross_situation_sample(&v, sits, [[0; 3]; 2]);
        assert_eq!(s.len(), 15);
        let row = s.target.row(14);
        let slots = s.slot_layout.clone().unwrap();
        let decoded: Vec<usize> = slots
            .iter()
            .map(|sl| argmax(row.iter().skip(sl.offset).take(sl.width).copied()))
            .collect();
        assert_eq!(decoded, [0, 0, 0, 1, 1, 1]);
        let words: Vec<&str> = (0..15)
            .map(|t| v.words()[argmax(s.input.row(t).iter().copied())].as_str())
            .collect();
        assert_eq!(
            words.join(" "),
            "the orange orange is on the right and the blue glass is on the left"
        );
    }
}
