//! Two-hidden-layer rectifier MLP with identity output, hand-rolled forward
//! and backward passes, trained full-batch with ADAM.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{
    adam_step, mape_loss, mape_loss_grad, AdamState, Scaler, TrainConfig, MAPE_FLOOR,
};
use crate::series::{LagMatrix, TimeSeries};

/// (p, n_h, k): input lags, hidden width (both layers), output horizons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpArch {
    pub p: usize,
    pub n_hidden: usize,
    pub k: usize,
}

/// y = W3^T f(W2^T f(W1^T x + b1) + b2) + b3, rectifier hidden activations.
///
/// Weight shapes follow the model equation: W1 is (p+1) x n_h, W2 n_h x n_h,
/// W3 n_h x n_o.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpForecaster {
    pub arch: MlpArch,
    pub w1: DMatrix<f64>,
    pub b1: DVector<f64>,
    pub w2: DMatrix<f64>,
    pub b2: DVector<f64>,
    pub w3: DMatrix<f64>,
    pub b3: DVector<f64>,
}

/// Gradients with the same shapes as the parameters.
pub type MlpGradients = MlpForecaster;

fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-limit..limit))
}

impl MlpForecaster {
    pub fn new_seeded(arch: MlpArch, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        MlpForecaster {
            arch,
            w1: glorot(arch.p + 1, arch.n_hidden, &mut rng),
            b1: DVector::zeros(arch.n_hidden),
            w2: glorot(arch.n_hidden, arch.n_hidden, &mut rng),
            b2: DVector::zeros(arch.n_hidden),
            w3: glorot(arch.n_hidden, arch.k, &mut rng),
            b3: DVector::zeros(arch.k),
        }
    }

    pub fn zeros(arch: MlpArch) -> Self {
        MlpForecaster {
            arch,
            w1: DMatrix::zeros(arch.p + 1, arch.n_hidden),
            b1: DVector::zeros(arch.n_hidden),
            w2: DMatrix::zeros(arch.n_hidden, arch.n_hidden),
            b2: DVector::zeros(arch.n_hidden),
            w3: DMatrix::zeros(arch.n_hidden, arch.k),
            b3: DVector::zeros(arch.k),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend(self.w1.iter());
        out.extend(self.b1.iter());
        out.extend(self.w2.iter());
        out.extend(self.b2.iter());
        out.extend(self.w3.iter());
        out.extend(self.b3.iter());
        out
    }

    pub fn assign_flat(&mut self, flat: &[f64]) {
        let mut i = 0;
        for dst in [
            self.w1.as_mut_slice(),
            self.b1.as_mut_slice(),
            self.w2.as_mut_slice(),
            self.b2.as_mut_slice(),
            self.w3.as_mut_slice(),
            self.b3.as_mut_slice(),
        ] {
            dst.copy_from_slice(&flat[i..i + dst.len()]);
            i += dst.len();
        }
    }
}

fn relu(v: &DVector<f64>) -> DVector<f64> {
    v.map(|x| x.max(0.0))
}

/// Deterministic forward pass.
pub fn mlp_forward(m: &MlpForecaster, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != m.arch.p + 1 {
        return Err(Error::InvalidArgument(format!(
            "input dimension {} != p+1 = {}",
            x.len(),
            m.arch.p + 1
        )));
    }
    let x = DVector::from_column_slice(x);
    let a1 = relu(&(m.w1.transpose() * &x + &m.b1));
    let a2 = relu(&(m.w2.transpose() * &a1 + &m.b2));
    let y = m.w3.transpose() * &a2 + &m.b3;
    Ok(y.iter().copied().collect())
}

/// Exact gradients of the floored MAPE loss with respect to every parameter,
/// for one sample. Returns (loss, gradients).
pub fn mlp_backward(m: &MlpForecaster, x: &[f64], target: &[f64]) -> Result<(f64, MlpGradients)> {
    if x.len() != m.arch.p + 1 || target.len() != m.arch.k {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let xv = DVector::from_column_slice(x);
    let z1 = m.w1.transpose() * &xv + &m.b1;
    let a1 = relu(&z1);
    let z2 = m.w2.transpose() * &a1 + &m.b2;
    let a2 = relu(&z2);
    let y = m.w3.transpose() * &a2 + &m.b3;
    let pred: Vec<f64> = y.iter().copied().collect();
    let loss = mape_loss(&pred, target, MAPE_FLOOR);
    let dy = DVector::from_vec(mape_loss_grad(&pred, target, MAPE_FLOOR));

    let mut g = MlpGradients::zeros(m.arch);
    // y = w3^T a2 + b3
    g.b3 = dy.clone();
    g.w3 = &a2 * dy.transpose();
    let da2 = &m.w3 * &dy;
    let dz2 = da2.zip_map(&z2, |d, z| if z > 0.0 { d } else { 0.0 });
    g.b2 = dz2.clone();
    g.w2 = &a1 * dz2.transpose();
    let da1 = &m.w2 * &dz2;
    let dz1 = da1.zip_map(&z1, |d, z| if z > 0.0 { d } else { 0.0 });
    g.b1 = dz1.clone();
    g.w1 = &xv * dz1.transpose();
    Ok((loss, g))
}

/// An MLP plus the scaler fitted on its training rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedMlp {
    pub net: MlpForecaster,
    pub scaler: Scaler,
    pub loss_curve: Vec<f64>,
    pub validation_loss: Option<f64>,
}

impl TrainedMlp {
    /// Direct multi-horizon forecast from the last `p` values of `recent`,
    /// with the time feature set to `recent.len()`.
    pub fn predict_multi_horizon(&self, recent: &TimeSeries) -> Result<Vec<f64>> {
        let p = self.net.arch.p;
        if recent.len() < p {
            return Err(Error::InsufficientData {
                needed: p,
                have: recent.len(),
            });
        }
        self.predict_from_window(&recent.values[recent.len() - p..], recent.len() as f64)
    }

    /// Forecast from an explicit lag window and time feature (for callers
    /// whose window is not a suffix of the series the model indexes by, e.g.
    /// augmented-series pipelines).
    pub fn predict_from_window(&self, window: &[f64], t: f64) -> Result<Vec<f64>> {
        if window.len() != self.net.arch.p {
            return Err(Error::InvalidArgument(format!(
                "window length {} != p = {}",
                window.len(),
                self.net.arch.p
            )));
        }
        let mut x = window.to_vec();
        x.push(t);
        let scaled = self.scaler.scale_input(&x);
        let out = mlp_forward(&self.net, &scaled)?;
        Ok(self.scaler.unscale_output(&out))
    }
}

/// Full-batch seeded ADAM training on a supervised lag matrix.
///
/// Inputs are z-scored and targets divided by the training-mean magnitude;
/// both fitted on the training rows only. The last `validation_fraction` of
/// rows is held out and the best-validation weights are returned.
pub fn train_mlp(data: &LagMatrix, n_hidden: usize, config: &TrainConfig) -> Result<TrainedMlp> {
    config.validate()?;
    if data.rows() == 0 {
        return Err(Error::InsufficientData { needed: 1, have: 0 });
    }
    let arch = MlpArch {
        p: data.p,
        n_hidden,
        k: data.k,
    };
    let n_val = ((data.rows() as f64) * config.validation_fraction).floor() as usize;
    let n_train = data.rows() - n_val;
    let train_inputs = &data.inputs[..n_train];
    let train_targets = &data.targets[..n_train];

    let scaler = Scaler::fit(train_inputs, train_targets);
    let sx: Vec<Vec<f64>> = train_inputs.iter().map(|r| scaler.scale_input(r)).collect();
    let st: Vec<Vec<f64>> = train_targets.iter().map(|r| scaler.scale_target(r)).collect();
    let vx: Vec<Vec<f64>> = data.inputs[n_train..]
        .iter()
        .map(|r| scaler.scale_input(r))
        .collect();
    let vt: Vec<Vec<f64>> = data.targets[n_train..]
        .iter()
        .map(|r| scaler.scale_target(r))
        .collect();

    let mut net = MlpForecaster::new_seeded(arch, config.seed);
    let mut flat = net.flatten();
    let mut state = AdamState::new(flat.len());
    let mut curve = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, Vec<f64>)> = None;

    for epoch in 1..=config.epochs {
        net.assign_flat(&flat);
        let mut total_loss = 0.0;
        let mut grad_acc = vec![0.0; flat.len()];
        for (x, t) in sx.iter().zip(&st) {
            let (loss, g) = mlp_backward(&net, x, t)?;
            total_loss += loss;
            for (acc, gv) in grad_acc.iter_mut().zip(g.flatten()) {
                *acc += gv;
            }
        }
        let inv = 1.0 / n_train as f64;
        total_loss *= inv;
        for g in &mut grad_acc {
            *g *= inv;
        }
        if !total_loss.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        curve.push(total_loss);
        adam_step(&mut flat, &grad_acc, &mut state, config, epoch);

        if !vx.is_empty() {
            net.assign_flat(&flat);
            let mut vloss = 0.0;
            for (x, t) in vx.iter().zip(&vt) {
                vloss += mape_loss(&mlp_forward(&net, x)?, t, MAPE_FLOOR);
            }
            vloss /= vx.len() as f64;
            if best.as_ref().map(|(b, _)| vloss < *b).unwrap_or(true) {
                best = Some((vloss, flat.clone()));
            }
        }
    }

    let (validation_loss, final_flat) = match best {
        Some((v, f)) => (Some(v), f),
        None => (None, flat),
    };
    net.assign_flat(&final_flat);
    Ok(TrainedMlp {
        net,
        scaler,
        loss_curve: curve,
        validation_loss,
    })
}
