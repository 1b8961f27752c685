//! Sinus and chaotic (Lorenz) forecasting.

use ndarray::{Array1, Array2};
use std::f64::consts::PI;

use super::{assemble, GenError};
use crate::config::{forecast_split_lengths, ForecastConfig, TaskConfig, TaskId};
use crate::model::{Dataset, MetricKind, Sample};
use crate::rng::{derive_stream, sample_stream_id, RngStream, Seed};

/// Split label of the single series stream used by forecasting tasks.
const SERIES_SPLIT: u8 = 3;

pub const LORENZ_DT: f64 = 0.01;
pub const LORENZ_WARMUP: usize = 1000;

fn series_stream(task: TaskId, seed: Seed) -> RngStream {
    derive_stream(seed, sample_stream_id(task.index(), SERIES_SPLIT, 0))
}

/// Frequency (cycles/step) and phase drawn for a sinus dataset.
pub fn sinus_parameters(seed: Seed) -> (f64, f64) {
    let mut s = series_stream(TaskId::SinusForecasting, seed);
    let f = s.uniform_unchecked(0.02, 0.1);
    let phase = s.uniform_unchecked(0.0, 2.0 * PI);
    (f, phase)
}

pub fn gen_sinus(config: &ForecastConfig, seed: Seed) -> Result<Dataset, GenError> {
    let wrapped = TaskConfig::SinusForecasting(config.clone());
    wrapped.check()?;
    let (f, phase) = sinus_parameters(seed);
    let series: Vec<Vec<f64>> = (0..config.sequence_length)
        .map(|t| vec![libm::sin(2.0 * PI * f * t as f64 + phase)])
        .collect();
    let [train, valid, test] = forecast_samples(&series, config);
    Ok(assemble(
        wrapped,
        seed,
        vec![train],
        vec![valid],
        vec![test],
    ))
}

/// State of the Lorenz system with the classic parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LorenzState {
    pub const SIGMA: f64 = 10.0;
    pub const RHO: f64 = 28.0;
    pub const BETA: f64 = 8.0 / 3.0;

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        LorenzState { x, y, z }
    }

    fn derivative(self) -> [f64; 3] {
        [
            Self::SIGMA * (self.y - self.x),
            self.x * (Self::RHO - self.z) - self.y,
            self.x * self.y - Self::BETA * self.z,
        ]
    }

    fn offset(self, d: [f64; 3], h: f64) -> Self {
        LorenzState::new(self.x + h * d[0], self.y + h * d[1], self.z + h * d[2])
    }

    /// One classical fourth-order Runge-Kutta step.
    pub fn rk4_step(self, dt: f64) -> Self {
        let k1 = self.derivative();
        let k2 = self.offset(k1, dt / 2.0).derivative();
        let k3 = self.offset(k2, dt / 2.0).derivative();
        let k4 = self.offset(k3, dt).derivative();
        let mut d = [0.0; 3];
        for i in 0..3 {
            d[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
        }
        self.offset(d, dt)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// `steps` states following `start` (start excluded).
pub fn lorenz_trajectory(
    start: LorenzState,
    dt: f64,
    steps: usize,
) -> Result<Vec<LorenzState>, GenError> {
    let mut out = Vec::with_capacity(steps);
    let mut s = start;
    for step in 0..steps {
        s = s.rk4_step(dt);
        if !s.is_finite() {
            return Err(GenError::NonFinite { step });
        }
        out.push(s);
    }
    Ok(out)
}

pub fn gen_chaotic(config: &ForecastConfig, seed: Seed) -> Result<Dataset, GenError> {
    let wrapped = TaskConfig::ChaoticForecasting(config.clone());
    wrapped.check()?;
    let mut s = series_stream(TaskId::ChaoticForecasting, seed);
    let start = LorenzState::new(
        1.0 + s.uniform_unchecked(-1.0, 1.0),
        1.0 + s.uniform_unchecked(-1.0, 1.0),
        1.0 + s.uniform_unchecked(-1.0, 1.0),
    );
    let traj = lorenz_trajectory(start, LORENZ_DT, LORENZ_WARMUP + config.sequence_length)?;
    let kept = &traj[LORENZ_WARMUP..];

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for st in kept {
        for (d, v) in st.as_array().into_iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    let series: Vec<Vec<f64>> = kept
        .iter()
        .map(|st| {
            st.as_array()
                .into_iter()
                .enumerate()
                .map(|(d, v)| {
                    let span = hi[d] - lo[d];
                    if span > 0.0 {
                        2.0 * (v - lo[d]) / span - 1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let [train, valid, test] = forecast_samples(&series, config);
    Ok(assemble(
        wrapped,
        seed,
        vec![train],
        vec![valid],
        vec![test],
    ))
}

/// Cuts a series into contiguous train/valid/test samples.
///
/// Inside each segment `target[t] = series[t + h]`; the last `h` steps of a
/// segment have no in-segment target, are stored as zero and are unmasked.
pub fn forecast_samples(series: &[Vec<f64>], config: &ForecastConfig) -> [Sample; 3] {
    let h = config.forecast_length;
    let dim = series.first().map_or(1, Vec::len);
    let lens = forecast_split_lengths(config);
    let mut start = 0;
    lens.map(|len| {
        let seg = &series[start..start + len];
        start += len;
        let mut input = Array2::<f32>::zeros((len, dim));
        let mut target = Array2::<f32>::zeros((len, dim));
        let mut mask = Array1::from_elem(len, false);
        for t in 0..len {
            for d in 0..dim {
                input[[t, d]] = seg[t][d] as f32;
            }
            if t + h < len {
                for d in 0..dim {
                    target[[t, d]] = seg[t + h][d] as f32;
                }
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
    })
}
