//! Gated recurrent unit: reset and update gates computed on the concatenated
//! [h_{t-1}, x_t], tanh candidate state, hidden size equal to the input size.
//! Backpropagation through time is written out by hand and checked against
//! finite differences.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{
    adam_step, mape_loss, mape_loss_grad, AdamState, Scaler, TrainConfig, MAPE_FLOOR,
};
use crate::series::{LagMatrix, TimeSeries};

/// r_t = sigma(Psi [h, x] + beta_r); u_t = sigma(Phi [h, x] + beta_u);
/// h~_t = tanh(Theta [r.h, x] + beta_h); h_t = (1-u).h + u.h~.
///
/// Psi, Phi, Theta are p x 2p; the hidden state has length p.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GruCell {
    pub p: usize,
    pub psi: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    pub theta: DMatrix<f64>,
    pub beta_r: DVector<f64>,
    pub beta_u: DVector<f64>,
    pub beta_h: DVector<f64>,
}

/// Per-parameter gradients, same shapes as [`GruCell`].
pub type GruGradients = GruCell;

fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-limit..limit))
}

impl GruCell {
    pub fn new_seeded(p: usize, rng: &mut ChaCha8Rng) -> Self {
        GruCell {
            p,
            psi: glorot(p, 2 * p, rng),
            phi: glorot(p, 2 * p, rng),
            theta: glorot(p, 2 * p, rng),
            beta_r: DVector::zeros(p),
            beta_u: DVector::zeros(p),
            beta_h: DVector::zeros(p),
        }
    }

    pub fn zeros(p: usize) -> Self {
        GruCell {
            p,
            psi: DMatrix::zeros(p, 2 * p),
            phi: DMatrix::zeros(p, 2 * p),
            theta: DMatrix::zeros(p, 2 * p),
            beta_r: DVector::zeros(p),
            beta_u: DVector::zeros(p),
            beta_h: DVector::zeros(p),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend(self.psi.iter());
        out.extend(self.phi.iter());
        out.extend(self.theta.iter());
        out.extend(self.beta_r.iter());
        out.extend(self.beta_u.iter());
        out.extend(self.beta_h.iter());
        out
    }

    pub fn assign_flat(&mut self, flat: &[f64]) {
        let mut i = 0;
        for dst in [
            self.psi.as_mut_slice(),
            self.phi.as_mut_slice(),
            self.theta.as_mut_slice(),
            self.beta_r.as_mut_slice(),
            self.beta_u.as_mut_slice(),
            self.beta_h.as_mut_slice(),
        ] {
            dst.copy_from_slice(&flat[i..i + dst.len()]);
            i += dst.len();
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Everything the backward pass needs from one step.
struct StepCache {
    h_prev: DVector<f64>,
    x: DVector<f64>,
    r: DVector<f64>,
    u: DVector<f64>,
    h_tilde: DVector<f64>,
}

fn concat(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

fn step(cell: &GruCell, h_prev: &DVector<f64>, x: &DVector<f64>) -> (DVector<f64>, StepCache) {
    let a = concat(h_prev, x);
    let r = (&cell.psi * &a + &cell.beta_r).map(sigmoid);
    let u = (&cell.phi * &a + &cell.beta_u).map(sigmoid);
    let c = concat(&r.component_mul(h_prev), x);
    let h_tilde = (&cell.theta * &c + &cell.beta_h).map(f64::tanh);
    let h = h_prev.component_mul(&u.map(|v| 1.0 - v)) + u.component_mul(&h_tilde);
    (
        h,
        StepCache {
            h_prev: h_prev.clone(),
            x: x.clone(),
            r,
            u,
            h_tilde,
        },
    )
}

fn forward_with_cache(
    cell: &GruCell,
    x_seq: &[Vec<f64>],
    h0: &[f64],
) -> Result<(Vec<DVector<f64>>, Vec<StepCache>)> {
    if h0.len() != cell.p {
        return Err(Error::InvalidArgument(format!(
            "h0 length {} != p = {}",
            h0.len(),
            cell.p
        )));
    }
    let mut h = DVector::from_column_slice(h0);
    let mut states = Vec::with_capacity(x_seq.len());
    let mut caches = Vec::with_capacity(x_seq.len());
    for x in x_seq {
        if x.len() != cell.p {
            return Err(Error::InvalidArgument(format!(
                "input length {} != p = {}",
                x.len(),
                cell.p
            )));
        }
        let (next, cache) = step(cell, &h, &DVector::from_column_slice(x));
        h = next;
        states.push(h.clone());
        caches.push(cache);
    }
    Ok((states, caches))
}

/// Run the cell over a sequence from `h0`; returns the per-step hidden states
/// (the last entry is h_T).
pub fn gru_forward(cell: &GruCell, x_seq: &[Vec<f64>], h0: &[f64]) -> Result<Vec<Vec<f64>>> {
    let (states, _) = forward_with_cache(cell, x_seq, h0)?;
    Ok(states.iter().map(|h| h.iter().copied().collect()).collect())
}

/// Backpropagation through time for a loss that depends only on the final
/// state: given dL/dh_T, returns gradients for every cell parameter.
pub fn gru_backward(
    cell: &GruCell,
    x_seq: &[Vec<f64>],
    h0: &[f64],
    grad_h_final: &[f64],
) -> Result<GruGradients> {
    if grad_h_final.len() != cell.p {
        return Err(Error::InvalidArgument("gradient length != p".into()));
    }
    let (_, caches) = forward_with_cache(cell, x_seq, h0)?;
    let mut g = GruGradients::zeros(cell.p);
    let mut dh = DVector::from_column_slice(grad_h_final);
    for cache in caches.iter().rev() {
        let one_minus_u = cache.u.map(|v| 1.0 - v);
        let du = dh.component_mul(&(&cache.h_tilde - &cache.h_prev));
        let dh_tilde = dh.component_mul(&cache.u);
        let mut dh_prev = dh.component_mul(&one_minus_u);

        // candidate: h~ = tanh(Theta [r.h_prev, x] + beta_h)
        let dz_h = dh_tilde.component_mul(&cache.h_tilde.map(|v| 1.0 - v * v));
        let c = concat(&cache.r.component_mul(&cache.h_prev), &cache.x);
        g.beta_h += &dz_h;
        g.theta += &dz_h * c.transpose();
        let dc = cell.theta.transpose() * &dz_h;
        let dc_top = dc.rows(0, cell.p).into_owned();
        let dr = dc_top.component_mul(&cache.h_prev);
        dh_prev += dc_top.component_mul(&cache.r);

        let a = concat(&cache.h_prev, &cache.x);
        // update gate
        let dz_u = du.component_mul(&cache.u.component_mul(&one_minus_u));
        g.beta_u += &dz_u;
        g.phi += &dz_u * a.transpose();
        let da_u = cell.phi.transpose() * &dz_u;
        // reset gate
        let dz_r = dr.component_mul(&cache.r.component_mul(&cache.r.map(|v| 1.0 - v)));
        g.beta_r += &dz_r;
        g.psi += &dz_r * a.transpose();
        let da_r = cell.psi.transpose() * &dz_r;

        let da = da_u + da_r;
        dh_prev += da.rows(0, cell.p).into_owned();
        dh = dh_prev;
    }
    Ok(g)
}

/// GRU forecaster: the last `p` observations are fed as one input vector from
/// h0 = 0, so the forecast is a pure function of those `p` values. The k
/// horizons are read from the state either through an affine head (default)
/// or directly as components 0..k (the raw state convention; needs k <= p).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GruForecaster {
    pub cell: GruCell,
    pub k: usize,
    /// (k x p weight, k bias); `None` selects the raw-state readout.
    pub head: Option<(DMatrix<f64>, DVector<f64>)>,
}

impl GruForecaster {
    pub fn new_seeded(p: usize, k: usize, affine_head: bool, seed: u64) -> Result<Self> {
        if !affine_head && k > p {
            return Err(Error::InvalidArgument(format!(
                "raw-state readout needs k <= p, got k = {k}, p = {p}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cell = GruCell::new_seeded(p, &mut rng);
        let head = affine_head.then(|| (glorot(k, p, &mut rng), DVector::zeros(k)));
        Ok(GruForecaster { cell, k, head })
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = self.cell.flatten();
        if let Some((w, b)) = &self.head {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    pub fn assign_flat(&mut self, flat: &[f64]) {
        let n_cell = self.cell.flatten().len();
        self.cell.assign_flat(&flat[..n_cell]);
        if let Some((w, b)) = &mut self.head {
            let mut i = n_cell;
            for dst in [w.as_mut_slice(), b.as_mut_slice()] {
                dst.copy_from_slice(&flat[i..i + dst.len()]);
                i += dst.len();
            }
        }
    }

    /// Forecast in the scaled input space.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let states = gru_forward(&self.cell, &[x.to_vec()], &vec![0.0; self.cell.p])?;
        let h = DVector::from_column_slice(states.last().unwrap());
        let y = match &self.head {
            Some((w, b)) => w * &h + b,
            None => h.rows(0, self.k).into_owned(),
        };
        Ok(y.iter().copied().collect())
    }

    /// Loss and gradients (flat, same layout as [`Self::flatten`]) for one
    /// scaled sample.
    fn backward(&self, x: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
        let h0 = vec![0.0; self.cell.p];
        let (states, _) = forward_with_cache(&self.cell, &[x.to_vec()], &h0)?;
        let h = states.last().unwrap().clone();
        let pred_v = match &self.head {
            Some((w, b)) => w * &h + b,
            None => h.rows(0, self.k).into_owned(),
        };
        let pred: Vec<f64> = pred_v.iter().copied().collect();
        let loss = mape_loss(&pred, target, MAPE_FLOOR);
        let dy = DVector::from_vec(mape_loss_grad(&pred, target, MAPE_FLOOR));

        let (dh, head_grads) = match &self.head {
            Some((w, _)) => {
                let gw = &dy * h.transpose();
                let gb = dy.clone();
                (w.transpose() * &dy, Some((gw, gb)))
            }
            None => {
                let mut dh = DVector::zeros(self.cell.p);
                for j in 0..self.k {
                    dh[j] = dy[j];
                }
                (dh, None)
            }
        };
        let cell_g = gru_backward(
            &self.cell,
            &[x.to_vec()],
            &h0,
            dh.as_slice(),
        )?;
        let mut flat = cell_g.flatten();
        if let Some((gw, gb)) = head_grads {
            flat.extend(gw.iter());
            flat.extend(gb.iter());
        }
        Ok((loss, flat))
    }
}

/// A GRU forecaster plus the scaler fitted on its training rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedGru {
    pub net: GruForecaster,
    pub scaler: Scaler,
    pub loss_curve: Vec<f64>,
    pub validation_loss: Option<f64>,
}

impl TrainedGru {
    pub fn predict_multi_horizon(&self, recent: &TimeSeries) -> Result<Vec<f64>> {
        let p = self.net.cell.p;
        if recent.len() < p {
            return Err(Error::InsufficientData {
                needed: p,
                have: recent.len(),
            });
        }
        let x = self
            .scaler
            .scale_input(&recent.values[recent.len() - p..]);
        let out = self.net.forward(&x)?;
        Ok(self.scaler.unscale_output(&out))
    }
}

/// Full-batch seeded ADAM training on a supervised lag matrix. The GRU input
/// has no time feature, so the trailing `t` column of the lag matrix is
/// dropped before training.
pub fn train_gru(
    data: &LagMatrix,
    affine_head: bool,
    config: &TrainConfig,
) -> Result<TrainedGru> {
    config.validate()?;
    if data.rows() == 0 {
        return Err(Error::InsufficientData { needed: 1, have: 0 });
    }
    let inputs: Vec<Vec<f64>> = data.inputs.iter().map(|r| r[..data.p].to_vec()).collect();
    let n_val = ((data.rows() as f64) * config.validation_fraction).floor() as usize;
    let n_train = data.rows() - n_val;
    let scaler = Scaler::fit(&inputs[..n_train], &data.targets[..n_train]);
    let sx: Vec<Vec<f64>> = inputs[..n_train].iter().map(|r| scaler.scale_input(r)).collect();
    let st: Vec<Vec<f64>> = data.targets[..n_train]
        .iter()
        .map(|r| scaler.scale_target(r))
        .collect();
    let vx: Vec<Vec<f64>> = inputs[n_train..].iter().map(|r| scaler.scale_input(r)).collect();
    let vt: Vec<Vec<f64>> = data.targets[n_train..]
        .iter()
        .map(|r| scaler.scale_target(r))
        .collect();

    let mut net = GruForecaster::new_seeded(data.p, data.k, affine_head, config.seed)?;
    let mut flat = net.flatten();
    let mut state = AdamState::new(flat.len());
    let mut curve = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, Vec<f64>)> = None;

    for epoch in 1..=config.epochs {
        net.assign_flat(&flat);
        let mut total_loss = 0.0;
        let mut grad_acc = vec![0.0; flat.len()];
        for (x, t) in sx.iter().zip(&st) {
            let (loss, g) = net.backward(x, t)?;
            total_loss += loss;
            for (acc, gv) in grad_acc.iter_mut().zip(g) {
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
                vloss += mape_loss(&net.forward(x)?, t, MAPE_FLOOR);
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
    Ok(TrainedGru {
        net,
        scaler,
        loss_curve: curve,
        validation_loss,
    })
}
