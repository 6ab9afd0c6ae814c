//! Small neural forecasters trained from scratch: a two-hidden-layer MLP and a
//! GRU-based forecaster, both direct multi-horizon, trained with ADAM on a
//! MAPE loss.

pub mod gru;
pub mod mlp;

use serde::{Deserialize, Serialize};

pub use gru::{gru_backward, gru_forward, train_gru, GruCell, GruForecaster, GruGradients, TrainedGru};
pub use mlp::{
    mlp_backward, mlp_forward, train_mlp, MlpArch, MlpForecaster, MlpGradients, TrainedMlp,
};

/// Floor applied to |target| in the MAPE denominator; one death/day.
pub const MAPE_FLOOR: f64 = 1.0;

/// Optimiser and training-loop settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Fraction of training rows held out (from the end) for model selection;
    /// 0 disables the holdout.
    pub validation_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 2000,
            seed: 0,
            validation_fraction: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> crate::error::Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(crate::error::Error::InvalidArgument(
                "learning rate must be > 0".into(),
            ));
        }
        if !(0.0 < self.beta1 && self.beta1 < 1.0 && 0.0 < self.beta2 && self.beta2 < 1.0) {
            return Err(crate::error::Error::InvalidArgument(
                "beta1 and beta2 must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// First and second ADAM moment accumulators over a flat parameter vector.
#[derive(Debug, Clone, Default)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }
}

/// One ADAM update, `t` is the 1-based step index.
///
/// m <- b1 m + (1-b1) g; v <- b2 v + (1-b2) g^2; theta <- theta - lr mhat/(sqrt(vhat)+eps).
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    config: &TrainConfig,
    t: usize,
) {
    debug_assert!(t >= 1);
    debug_assert_eq!(params.len(), grads.len());
    let b1 = config.beta1;
    let b2 = config.beta2;
    let bc1 = 1.0 - b1.powi(t as i32);
    let bc2 = 1.0 - b2.powi(t as i32);
    for i in 0..params.len() {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
        let mhat = state.m[i] / bc1;
        let vhat = state.v[i] / bc2;
        params[i] -= config.learning_rate * mhat / (vhat.sqrt() + config.epsilon);
    }
}

/// MAPE loss with a floored denominator:
/// (100/k) sum |t_i - p_i| / max(|t_i|, floor).
pub fn mape_loss(pred: &[f64], target: &[f64], floor: f64) -> f64 {
    debug_assert_eq!(pred.len(), target.len());
    let k = pred.len() as f64;
    100.0 / k
        * pred
            .iter()
            .zip(target)
            .map(|(p, t)| (t - p).abs() / t.abs().max(floor))
            .sum::<f64>()
}

/// Gradient of [`mape_loss`] with respect to the predictions.
pub fn mape_loss_grad(pred: &[f64], target: &[f64], floor: f64) -> Vec<f64> {
    let k = pred.len() as f64;
    pred.iter()
        .zip(target)
        .map(|(p, t)| {
            let s = if p > t {
                1.0
            } else if p < t {
                -1.0
            } else {
                0.0
            };
            100.0 / k * s / t.abs().max(floor)
        })
        .collect()
}

/// Input/target scaling fitted on training rows only. Inputs are z-scored per
/// column; targets are divided by a single positive scale so the MAPE loss is
/// unchanged and outputs de-scale by multiplication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scaler {
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub target_scale: f64,
}

impl Scaler {
    pub fn identity(n_inputs: usize) -> Self {
        Scaler {
            input_mean: vec![0.0; n_inputs],
            input_std: vec![1.0; n_inputs],
            target_scale: 1.0,
        }
    }

    pub fn fit(inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Self {
        let cols = inputs[0].len();
        let rows = inputs.len() as f64;
        let mut mean = vec![0.0; cols];
        for row in inputs {
            for (c, v) in row.iter().enumerate() {
                mean[c] += v;
            }
        }
        for m in &mut mean {
            *m /= rows;
        }
        let mut std = vec![0.0; cols];
        for row in inputs {
            for (c, v) in row.iter().enumerate() {
                std[c] += (v - mean[c]) * (v - mean[c]);
            }
        }
        for s in &mut std {
            *s = (*s / rows).sqrt();
            if *s < 1e-12 {
                *s = 1.0;
            }
        }
        let mut t_abs = 0.0;
        let mut t_count = 0.0;
        for row in targets {
            for v in row {
                t_abs += v.abs();
                t_count += 1.0;
            }
        }
        let target_scale = if t_count > 0.0 && t_abs / t_count > 1e-12 {
            t_abs / t_count
        } else {
            1.0
        };
        Scaler {
            input_mean: mean,
            input_std: std,
            target_scale,
        }
    }

    pub fn scale_input(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(c, v)| (v - self.input_mean[c]) / self.input_std[c])
            .collect()
    }

    pub fn scale_target(&self, row: &[f64]) -> Vec<f64> {
        row.iter().map(|v| v / self.target_scale).collect()
    }

    pub fn unscale_output(&self, row: &[f64]) -> Vec<f64> {
        row.iter().map(|v| v * self.target_scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mape_zero_at_perfect_prediction() {
        assert_eq!(mape_loss(&[3.0, 4.0], &[3.0, 4.0], 1.0), 0.0);
    }

    #[test]
    fn mape_ten_percent() {
        assert!((mape_loss(&[90.0], &[100.0], 1.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn mape_grad_matches_finite_differences() {
        let pred = vec![85.0, 123.0, 40.0];
        let target = vec![100.0, 110.0, 50.0];
        let g = mape_loss_grad(&pred, &target, 1.0);
        let h = 1e-6;
        for i in 0..pred.len() {
            let mut up = pred.clone();
            up[i] += h;
            let mut dn = pred.clone();
            dn[i] -= h;
            let fd = (mape_loss(&up, &target, 1.0) - mape_loss(&dn, &target, 1.0)) / (2.0 * h);
            assert!(
                (fd - g[i]).abs() / fd.abs().max(1e-9) < 1e-6,
                "i={i}: {fd} vs {}",
                g[i]
            );
        }
    }

    #[test]
    fn mape_floor_prevents_blowup() {
        let l = mape_loss(&[5.0], &[0.0], 1.0);
        assert!((l - 500.0).abs() < 1e-9);
    }

    #[test]
    fn adam_zero_gradient_no_move() {
        let mut p = vec![1.0, -2.0];
        let mut st = AdamState::new(2);
        adam_step(&mut p, &[0.0, 0.0], &mut st, &TrainConfig::default(), 1);
        assert_eq!(p, vec![1.0, -2.0]);
    }

    #[test]
    fn adam_first_step_magnitude() {
        // g=1, lr=0.1, t=1: bias correction makes mhat = vhat = 1, so the step
        // is lr / (1 + eps) ~ 0.1.
        let mut p = vec![0.0];
        let mut st = AdamState::new(1);
        let cfg = TrainConfig {
            learning_rate: 0.1,
            ..Default::default()
        };
        adam_step(&mut p, &[1.0], &mut st, &cfg, 1);
        assert!((p[0] + 0.1).abs() < 1e-6, "{}", p[0]);
    }

    #[test]
    fn adam_first_step_opposes_gradient() {
        let mut p = vec![0.5, 0.5, 0.5];
        let g = vec![1.0, -2.0, 0.25];
        let mut st = AdamState::new(3);
        adam_step(&mut p, &g, &mut st, &TrainConfig::default(), 1);
        for i in 0..3 {
            assert!((p[i] - 0.5) * g[i] < 0.0);
        }
    }

    #[test]
    fn scaler_roundtrip_and_mape_invariance() {
        let inputs = vec![vec![1.0, 10.0], vec![3.0, 30.0], vec![5.0, 20.0]];
        let targets = vec![vec![100.0], vec![200.0], vec![300.0]];
        let sc = Scaler::fit(&inputs, &targets);
        let t = sc.scale_target(&targets[0]);
        let back = sc.unscale_output(&t);
        assert!((back[0] - 100.0).abs() < 1e-9);
        // pure rescaling leaves MAPE unchanged
        let pred = vec![90.0];
        let l_raw = mape_loss(&pred, &targets[0], 0.0);
        let l_scaled = mape_loss(&sc.scale_target(&pred), &t, 0.0);
        assert!((l_raw - l_scaled).abs() < 1e-9);
    }
}
