//! Closed-form ridge readout with validation-selected regularization.

use faer::linalg::matmul::triangular::{matmul, BlockStructure};
use faer::linalg::solvers::Solve;
use faer::{Accum, Mat, MatRef, Par, Side};
use ndarray::{s, Array2, ArrayView2};

use super::EsnError;
use crate::metrics::score_split;
use crate::model::Sample;

/// Masked timesteps of a split gathered into design matrices.
///
/// Row r of the design `x()` is a reservoir state followed by a constant 1
/// (bias column); the matching row of `y` is the target at that step. The
/// design is stored transposed so each state is written contiguously.
#[derive(Debug, Clone)]
pub struct MaskedDesign {
    xt: Mat<f64>,
    pub y: Mat<f64>,
    /// Masked step indices of each sample, in row order.
    pub steps: Vec<Vec<usize>>,
}

impl MaskedDesign {
    /// Runs `states_of` on every sample and keeps the masked rows.
    pub fn collect<F>(
        samples: &[Sample],
        n_units: usize,
        mut states_of: F,
    ) -> Result<Self, EsnError>
    where
        F: FnMut(&Sample) -> Result<Array2<f64>, EsnError>,
    {
        let m: usize = samples.iter().map(Sample::n_masked).sum();
        let d_out = samples.first().map_or(0, Sample::d_out);
        let mut xt = Mat::zeros(n_units + 1, m);
        let mut y = Mat::zeros(m, d_out);
        let mut steps = Vec::with_capacity(samples.len());
        let mut r = 0;
        for sample in samples {
            let states = states_of(sample)?;
            let masked: Vec<usize> = sample.masked_steps().collect();
            for &t in &masked {
                let col = xt.col_mut(r).try_as_col_major_mut().unwrap().as_slice_mut();
                for (c, &v) in col.iter_mut().zip(states.row(t)) {
                    *c = v;
                }
                col[n_units] = 1.0;
                for (k, &v) in sample.target.row(t).iter().enumerate() {
                    y[(r, k)] = v as f64;
                }
                r += 1;
            }
            steps.push(masked);
        }
        Ok(MaskedDesign { xt, y, steps })
    }

    /// Masked steps x (n_units + 1).
    pub fn x(&self) -> MatRef<'_, f64> {
        self.xt.transpose()
    }

    pub fn n_rows(&self) -> usize {
        self.xt.ncols()
    }

    /// Full-length predictions per sample: masked rows from `x * w_t`, all
    /// other rows zero (they are never scored).
    pub fn predictions(&self, w_t: MatRef<f64>, samples: &[Sample]) -> Vec<Array2<f64>> {
        let fitted = self.x() * w_t;
        let mut r = 0;
        samples
            .iter()
            .zip(&self.steps)
            .map(|(sample, steps)| {
                let mut p = Array2::zeros((sample.len(), w_t.ncols()));
                for &t in steps {
                    for k in 0..w_t.ncols() {
                        p[[t, k]] = fitted[(r, k)];
                    }
                    r += 1;
                }
                p
            })
            .collect()
    }
}

/// Regularized least squares `min |X W^T - Y|^2 + lambda |W|^2` for several
/// lambdas sharing one Gram matrix.
///
/// With more rows than features the primal system `(X^T X + lambda I) W^T = X^T Y`
/// is solved; otherwise the dual `W^T = X^T (X X^T + lambda I)^-1 Y`. Both give
/// the same solution for lambda > 0, and each costs one Cholesky factorization
/// of the smaller Gram matrix per lambda. Only the lower triangle of the
/// Gram matrix is formed and read.
pub struct RidgeProblem<'a> {
    x: MatRef<'a, f64>,
    y: MatRef<'a, f64>,
    gram: Mat<f64>,
    primal: bool,
    /// X^T Y in primal form.
    xty: Option<Mat<f64>>,
}

impl<'a> RidgeProblem<'a> {
    pub fn new(x: MatRef<'a, f64>, y: MatRef<'a, f64>) -> Self {
        let primal = x.nrows() >= x.ncols();
        let (a, xty) = if primal {
            (x.transpose(), Some(x.transpose() * y))
        } else {
            (x, None)
        };
        let mut gram = Mat::zeros(a.nrows(), a.nrows());
        matmul(
            gram.as_mut(),
            BlockStructure::TriangularLower,
            Accum::Replace,
            a,
            BlockStructure::Rectangular,
            a.transpose(),
            BlockStructure::Rectangular,
            1.0,
            Par::Seq,
        );
        RidgeProblem {
            x,
            y,
            gram,
            primal,
            xty,
        }
    }

    pub fn is_primal(&self) -> bool {
        self.primal
    }

    /// Returns W^T, features x outputs.
    pub fn solve(&self, lambda: f64) -> Result<Mat<f64>, EsnError> {
        let mut g = self.gram.clone();
        for i in 0..g.nrows() {
            g[(i, i)] += lambda;
        }
        let llt = g
            .llt(Side::Lower)
            .map_err(|e| EsnError::Singular(format!("lambda {lambda:e}: {e:?}")))?;
        let w_t = match &self.xty {
            Some(xty) => llt.solve(xty),
            None => self.x.transpose() * llt.solve(self.y),
        };
        if (0..w_t.nrows()).any(|i| (0..w_t.ncols()).any(|j| !w_t[(i, j)].is_finite())) {
            return Err(EsnError::Singular(format!(
                "lambda {lambda:e}: non-finite solution"
            )));
        }
        Ok(w_t)
    }
}

/// A fitted readout.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutSolution {
    /// D_out x (n_units + 1); the last column is the bias.
    pub w_out: Array2<f64>,
    pub ridge: f64,
    pub validation_score: f64,
}

impl ReadoutSolution {
    fn from_transposed(w_t: &Mat<f64>, ridge: f64, validation_score: f64) -> Self {
        ReadoutSolution {
            w_out: Array2::from_shape_fn((w_t.ncols(), w_t.nrows()), |(i, j)| w_t[(j, i)]),
            ridge,
            validation_score,
        }
    }

    /// Outputs for every row of a T x n_units state matrix.
    pub fn predict(&self, states: ArrayView2<f64>) -> Array2<f64> {
        let n = states.ncols();
        let weights = self.w_out.slice(s![.., ..n]);
        let bias = self.w_out.column(n);
        states.dot(&weights.t()) + bias
    }
}

/// Fits the readout for every lambda in `ridges` and keeps the one with the
/// lowest validation score (the first on ties). Lambdas whose system cannot
/// be factorized are skipped.
pub fn fit_readout(
    train: &MaskedDesign,
    valid: &MaskedDesign,
    valid_samples: &[Sample],
    ridges: &[f64],
) -> Result<ReadoutSolution, EsnError> {
    if ridges.is_empty() {
        return Err(EsnError::InvalidConfig("ridge grid is empty".into()));
    }
    if train.n_rows() == 0 {
        return Err(EsnError::NoMaskedSteps);
    }
    let problem = RidgeProblem::new(train.x(), train.y.as_ref());
    let mut best: Option<(Mat<f64>, f64, f64)> = None;
    for &lambda in ridges {
        let w_t = match problem.solve(lambda) {
            Ok(w) => w,
            Err(e) => {
                log::warn!("skipping ridge {lambda:e}: {e}");
                continue;
            }
        };
        let preds = valid.predictions(w_t.as_ref(), valid_samples);
        let (score, _) = score_split(preds.iter().map(|p| p.view()), valid_samples)?;
        if !score.is_finite() {
            log::warn!("skipping ridge {lambda:e}: non-finite validation score");
            continue;
        }
        if best.as_ref().is_none_or(|b| score < b.2) {
            best = Some((w_t, lambda, score));
        }
    }
    let (w_t, lambda, score) = best.ok_or(EsnError::AllRidgesFailed)?;
    Ok(ReadoutSolution::from_transposed(&w_t, lambda, score))
}
