//! Sparse random reservoirs and the leaky-integrator state update.

use faer::Mat;
use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::EsnError;
use crate::rng::{derive_stream, mix64, RngStream, Seed};

/// Iteration cap of the spectral radius estimate.
pub const POWER_MAX_ITERS: usize = 500;
/// Relative change between iterations that ends the estimate.
pub const POWER_TOL: f64 = 1e-6;
/// Consecutive iterations the change must stay below `POWER_TOL`.
pub const POWER_PATIENCE: usize = 10;
/// Radius below which a reservoir draw counts as degenerate.
pub const DEGENERATE_RADIUS: f64 = 1e-12;
/// Draws attempted before giving up on a degenerate reservoir.
pub const MAX_ATTEMPTS: u64 = 3;
/// Width of the iterated subspace.
pub const POWER_BLOCK: usize = 32;

const STREAM_TAG: u64 = 0xE5;
const PURPOSE_W: u64 = 0;
const PURPOSE_W_IN: u64 = 1;
const PURPOSE_BIAS: u64 = 2;
const PURPOSE_PROBE: u64 = 3;

fn esn_stream(seed: Seed, attempt: u64, purpose: u64) -> RngStream {
    derive_stream(seed, mix64(STREAM_TAG << 56 | attempt << 8 | purpose))
}

/// Connection probability used when none is configured: 0.1 for small
/// reservoirs, an expected in-degree of 20 for large ones.
pub fn default_density(n_units: usize) -> f64 {
    if n_units <= 200 {
        0.1
    } else {
        20.0 / n_units as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsnConfig {
    pub n_units: usize,
    pub leaking_rate: f64,
    pub spectral_radius: f64,
    pub input_scaling: f64,
    pub density: f64,
    pub bias_scaling: f64,
    pub seed: Seed,
}

impl EsnConfig {
    pub fn new(n_units: usize, seed: Seed) -> Self {
        EsnConfig {
            n_units,
            leaking_rate: 0.3,
            spectral_radius: 0.9,
            input_scaling: 1.0,
            density: default_density(n_units),
            bias_scaling: 0.1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), EsnError> {
        let mut bad = Vec::new();
        if self.n_units == 0 {
            bad.push("n_units >= 1");
        }
        if !(self.leaking_rate > 0.0 && self.leaking_rate <= 1.0) {
            bad.push("leaking_rate in (0, 1]");
        }
        if !(self.spectral_radius > 0.0 && self.spectral_radius.is_finite()) {
            bad.push("spectral_radius > 0");
        }
        if !(self.input_scaling > 0.0 && self.input_scaling.is_finite()) {
            bad.push("input_scaling > 0");
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            bad.push("density in (0, 1]");
        }
        if !(self.bias_scaling >= 0.0 && self.bias_scaling.is_finite()) {
            bad.push("bias_scaling >= 0");
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(EsnError::InvalidConfig(bad.join(", ")))
        }
    }
}

/// Square sparse matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl Csr {
    pub fn zeros(n: usize) -> Self {
        Csr {
            n,
            indptr: vec![0; n + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Random matrix whose entries are nonzero with probability `density`,
    /// values uniform in [-1, 1]. Row by row, column gaps are drawn from the
    /// geometric distribution so the cost is proportional to the nonzeros.
    pub fn random(n: usize, density: f64, stream: &mut RngStream) -> Self {
        let mut m = Csr::zeros(n);
        let log_q = (1.0 - density).ln();
        for i in 0..n {
            let mut j = 0usize;
            loop {
                if density < 1.0 {
                    let u = stream.uniform_unchecked(0.0, 1.0);
                    let gap = ((1.0 - u).ln() / log_q).floor();
                    if gap >= (n - j) as f64 {
                        break;
                    }
                    j += gap as usize;
                }
                if j >= n {
                    break;
                }
                m.indices.push(j as u32);
                m.values.push(stream.uniform_unchecked(-1.0, 1.0));
                j += 1;
            }
            m.indptr[i + 1] = m.values.len();
        }
        m
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .zip(&self.values[r])
            .map(|(&j, &v)| (j as usize, v))
    }

    /// `out = self * x`.
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `self * q` for a dense column block.
    pub fn mul_mat(&self, q: &Mat<f64>) -> Mat<f64> {
        let mut out = Mat::zeros(self.n, q.ncols());
        for c in 0..q.ncols() {
            let col = q.col(c);
            for i in 0..self.n {
                out[(i, c)] = self.row(i).map(|(j, v)| v * col[j]).sum();
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Csr {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut d = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[[i, j]] = v;
            }
        }
        d
    }
}

/// Largest eigenvalue magnitude of `w`.
///
/// Iterates a block of `min(n, POWER_BLOCK)` vectors, re-orthonormalized each
/// step, and takes the largest Ritz value magnitude of the projected block.
/// A single vector would oscillate forever when the dominant eigenvalues form
/// a complex pair, which is the common case for random reservoirs.
pub fn spectral_radius(w: &Csr, stream: &mut RngStream) -> Result<f64, EsnError> {
    let n = w.n;
    if w.nnz() == 0 {
        return Ok(0.0);
    }
    let k = n.min(POWER_BLOCK);
    let start = Mat::from_fn(n, k, |_, _| stream.uniform_unchecked(-1.0, 1.0));
    let mut q = start.qr().compute_thin_Q();
    let mut previous = f64::NAN;
    let mut radius = 0.0;
    let mut settled = 0;
    for _ in 0..POWER_MAX_ITERS {
        let z = w.mul_mat(&q);
        let h = q.transpose() * &z;
        radius = h
            .eigenvalues()
            .map_err(|e| EsnError::Numeric(format!("Ritz eigenvalues: {e:?}")))?
            .iter()
            .map(|c| c.re.hypot(c.im))
            .fold(0.0, f64::max);
        if !radius.is_finite() {
            return Err(EsnError::Numeric(
                "non-finite spectral radius estimate".into(),
            ));
        }
        if radius < DEGENERATE_RADIUS {
            break;
        }
        // Ritz values approach the limit unevenly, so a single small step
        // is not enough evidence of convergence
        if previous.is_finite() && (radius - previous).abs() <= POWER_TOL * radius {
            settled += 1;
            if settled == POWER_PATIENCE {
                break;
            }
        } else {
            settled = 0;
        }
        previous = radius;
        q = z.qr().compute_thin_Q();
    }
    Ok(radius)
}

/// Reservoir weights before scaling by the grid hyperparameters. The draw
/// depends only on the seed, size, input width, density and bias scaling,
/// so every grid point of a sweep shares it.
#[derive(Debug, Clone)]
pub struct RawReservoir {
    pub w: Csr,
    /// Estimated spectral radius of `w`.
    pub radius: f64,
    /// n x D_in, uniform in [-1, 1].
    pub w_in: Array2<f64>,
    /// Uniform in [-bias_scaling, bias_scaling].
    pub bias: Array1<f64>,
    /// Draw that succeeded, starting at 0.
    pub attempt: u64,
}

impl RawReservoir {
    pub fn draw(
        n_units: usize,
        d_in: usize,
        density: f64,
        bias_scaling: f64,
        seed: Seed,
    ) -> Result<Self, EsnError> {
        for attempt in 0..MAX_ATTEMPTS {
            let w = Csr::random(n_units, density, &mut esn_stream(seed, attempt, PURPOSE_W));
            let radius = spectral_radius(&w, &mut esn_stream(seed, attempt, PURPOSE_PROBE))?;
            if radius < DEGENERATE_RADIUS {
                log::warn!("degenerate reservoir draw {attempt} (radius {radius:e}), redrawing");
                continue;
            }
            let mut s = esn_stream(seed, attempt, PURPOSE_W_IN);
            let w_in =
                Array2::from_shape_simple_fn((n_units, d_in), || s.uniform_unchecked(-1.0, 1.0));
            let mut s = esn_stream(seed, attempt, PURPOSE_BIAS);
            let bias = Array1::from_shape_simple_fn(n_units, || {
                bias_scaling * s.uniform_unchecked(-1.0, 1.0)
            });
            return Ok(RawReservoir {
                w,
                radius,
                w_in,
                bias,
                attempt,
            });
        }
        Err(EsnError::Degenerate {
            attempts: MAX_ATTEMPTS,
        })
    }

    /// Applies leaking rate, spectral radius and input scaling.
    pub fn scale(&self, leaking_rate: f64, spectral_radius: f64, input_scaling: f64) -> Reservoir {
        Reservoir {
            w: self.w.scaled(spectral_radius / self.radius),
            w_in: &self.w_in * input_scaling,
            bias: self.bias.clone(),
            leaking_rate,
        }
    }
}

/// A ready-to-run reservoir.
#[derive(Debug, Clone)]
pub struct Reservoir {
    pub w: Csr,
    pub w_in: Array2<f64>,
    pub bias: Array1<f64>,
    pub leaking_rate: f64,
}

impl Reservoir {
    pub fn n_units(&self) -> usize {
        self.w.n
    }

    pub fn d_in(&self) -> usize {
        self.w_in.ncols()
    }
}

pub fn build_reservoir(cfg: &EsnConfig, d_in: usize) -> Result<Reservoir, EsnError> {
    cfg.validate()?;
    let raw = RawReservoir::draw(cfg.n_units, d_in, cfg.density, cfg.bias_scaling, cfg.seed)?;
    Ok(raw.scale(cfg.leaking_rate, cfg.spectral_radius, cfg.input_scaling))
}

/// States after each input step, starting from the zero state.
pub fn run_states(res: &Reservoir, inputs: ArrayView2<f32>) -> Result<Array2<f64>, EsnError> {
    run_states_from(res, inputs, &vec![0.0; res.n_units()])
}

/// `x(t+1) = (1 - a) x(t) + a tanh(W x(t) + W_in u(t+1) + b)`; row t of the
/// result is the state after consuming input row t.
pub fn run_states_from(
    res: &Reservoir,
    inputs: ArrayView2<f32>,
    x0: &[f64],
) -> Result<Array2<f64>, EsnError> {
    let n = res.n_units();
    let a = res.leaking_rate;
    let mut x = x0.to_vec();
    let mut pre = vec![0.0; n];
    let mut states = Array2::zeros((inputs.nrows(), n));
    for (t, u) in inputs.outer_iter().enumerate() {
        res.w.mul_vec(&x, &mut pre);
        for (p, b) in pre.iter_mut().zip(&res.bias) {
            *p += b;
        }
        for (j, &uj) in u.iter().enumerate() {
            if uj != 0.0 {
                let uj = uj as f64;
                for (p, w) in pre.iter_mut().zip(res.w_in.column(j)) {
                    *p += w * uj;
                }
            }
        }
        let mut row = states.row_mut(t);
        for ((xi, p), s) in x.iter_mut().zip(&pre).zip(row.iter_mut()) {
            *xi = (1.0 - a) * *xi + a * p.tanh();
            *s = *xi;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(EsnError::NonFinite { step: t });
        }
    }
    Ok(states)
}
