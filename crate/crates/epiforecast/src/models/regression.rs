//! Time-series regression with lagged variables, fitted by OLS.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Deterministic time regressors to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeTrend {
    None,
    Linear,
    /// t and t^2 (the quadratic-time variants).
    Quadratic,
}

/// Which regressors enter the design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegressionSpec {
    /// Number of response lags y_{t-1}..y_{t-p}.
    pub y_lags: usize,
    /// When an exogenous series is supplied: number of its lags beyond the
    /// contemporaneous x_t (1 reproduces b_1 x_t + b_2 x_{t-1}).
    pub x_lags: usize,
    pub time: TimeTrend,
}

/// OLS-fitted lagged regression model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionTsModel {
    pub spec: RegressionSpec,
    pub intercept: f64,
    /// Coefficients on y_{t-1}..y_{t-p}.
    pub phi: Vec<f64>,
    /// Coefficients on x_t, x_{t-1}, ...
    pub beta: Vec<f64>,
    /// Coefficients on t (and t^2 when quadratic).
    pub trend: Vec<f64>,
    pub sigma2: f64,
    pub sse: f64,
    pub n_obs: usize,
}

fn design_row(
    spec: &RegressionSpec,
    y: &[f64],
    x: Option<&[f64]>,
    t: usize,
) -> Vec<f64> {
    let mut row = vec![1.0];
    for j in 1..=spec.y_lags {
        row.push(y[t - j]);
    }
    if let Some(x) = x {
        for j in 0..=spec.x_lags {
            row.push(x[t - j]);
        }
    }
    match spec.time {
        TimeTrend::None => {}
        TimeTrend::Linear => row.push(t as f64),
        TimeTrend::Quadratic => {
            row.push(t as f64);
            row.push((t as f64) * (t as f64));
        }
    }
    row
}

/// Fit y_t = b_0 + sum phi_j y_{t-j} + sum b_i x_{t-i} + trend(t) + eps_t by OLS.
pub fn fit_regression_ts(
    y: &TimeSeries,
    x: Option<&TimeSeries>,
    spec: RegressionSpec,
) -> Result<RegressionTsModel> {
    if let Some(x) = x {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "series lengths differ: y {} vs x {}",
                y.len(),
                x.len()
            )));
        }
    }
    let skip = spec.y_lags.max(if x.is_some() { spec.x_lags } else { 0 });
    let n_cols = 1
        + spec.y_lags
        + if x.is_some() { spec.x_lags + 1 } else { 0 }
        + match spec.time {
            TimeTrend::None => 0,
            TimeTrend::Linear => 1,
            TimeTrend::Quadratic => 2,
        };
    if y.len() < skip + n_cols + 2 {
        return Err(Error::InsufficientData {
            needed: skip + n_cols + 2,
            have: y.len(),
        });
    }
    let rows = y.len() - skip;
    let xv = x.map(|s| s.values.as_slice());
    let design = DMatrix::from_fn(rows, n_cols, |r, c| {
        design_row(&spec, &y.values, xv, r + skip)[c]
    });
    let target = DVector::from_fn(rows, |r, _| y.values[r + skip]);

    let svd = design.clone().svd(true, true);
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > 1e-10 * svd.singular_values[0])
        .count();
    if rank < n_cols {
        return Err(Error::Collinear(format!(
            "design matrix rank {rank} < {n_cols} columns"
        )));
    }
    let coef = svd
        .solve(&target, 1e-12)
        .map_err(|e| Error::Numerical(e.to_string()))?;

    let residuals = &target - &design * &coef;
    let sse = residuals.norm_squared();

    let mut i = 1;
    let phi = coef.as_slice()[i..i + spec.y_lags].to_vec();
    i += spec.y_lags;
    let beta = if x.is_some() {
        let b = coef.as_slice()[i..i + spec.x_lags + 1].to_vec();
        i += spec.x_lags + 1;
        b
    } else {
        Vec::new()
    };
    let trend = coef.as_slice()[i..].to_vec();

    Ok(RegressionTsModel {
        spec,
        intercept: coef[0],
        phi,
        beta,
        trend,
        sigma2: sse / rows as f64,
        sse,
        n_obs: rows,
    })
}

impl RegressionTsModel {
    /// Iterated forecast using only response lags and the deterministic trend;
    /// requires the model to be exogenous-free.
    pub fn forecast(&self, history: &TimeSeries, h: usize) -> Result<Vec<f64>> {
        if !self.beta.is_empty() {
            return Err(Error::InvalidArgument(
                "iterated forecasting requires a model without exogenous terms".into(),
            ));
        }
        if history.len() < self.spec.y_lags {
            return Err(Error::InsufficientData {
                needed: self.spec.y_lags,
                have: history.len(),
            });
        }
        let mut y = history.values.clone();
        let n = y.len();
        let mut out = Vec::with_capacity(h);
        for step in 0..h {
            let t = n + step;
            let mut pred = self.intercept;
            for (j, c) in self.phi.iter().enumerate() {
                pred += c * y[t - 1 - j];
            }
            match self.spec.time {
                TimeTrend::None => {}
                TimeTrend::Linear => pred += self.trend[0] * t as f64,
                TimeTrend::Quadratic => {
                    pred += self.trend[0] * t as f64 + self.trend[1] * (t as f64) * (t as f64)
                }
            }
            y.push(pred);
            out.push(pred);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_lags(p: usize) -> RegressionSpec {
        RegressionSpec {
            y_lags: p,
            x_lags: 0,
            time: TimeTrend::None,
        }
    }

    #[test]
    fn exact_ar1_recovery() {
        // y_t = 3 + 0.5 y_{t-1} exactly.
        let mut y = vec![1.0];
        for _ in 0..80 {
            y.push(3.0 + 0.5 * y.last().unwrap());
        }
        let m = fit_regression_ts(&TimeSeries::from_values(y), None, spec_lags(1)).unwrap();
        assert!((m.intercept - 3.0).abs() < 1e-8);
        assert!((m.phi[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn exogenous_recovery() {
        // y_t = 0.5 y_{t-1} + 2 x_t exactly. (A purely static y = 2x would make
        // the y_{t-1} column collinear with x_{t-1}.)
        let x: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin() * 4.0 + 1.0).collect();
        let mut y = vec![2.0 * x[0]];
        for t in 1..x.len() {
            y.push(0.5 * y[t - 1] + 2.0 * x[t]);
        }
        let m = fit_regression_ts(
            &TimeSeries::from_values(y),
            Some(&TimeSeries::from_values(x)),
            RegressionSpec {
                y_lags: 1,
                x_lags: 1,
                time: TimeTrend::None,
            },
        )
        .unwrap();
        assert!((m.beta[0] - 2.0).abs() < 1e-6, "b1 = {}", m.beta[0]);
        assert!((m.phi[0] - 0.5).abs() < 1e-6, "phi1 = {}", m.phi[0]);
        assert!(m.intercept.abs() < 1e-6);
        assert!(m.beta[1].abs() < 1e-6);
    }

    #[test]
    fn residuals_orthogonal_to_regressors() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let y: Vec<f64> = (0..150).map(|_| rng.gen::<f64>() * 10.0).collect();
        let x: Vec<f64> = (0..150).map(|_| rng.gen::<f64>() * 3.0).collect();
        let spec = RegressionSpec {
            y_lags: 1,
            x_lags: 1,
            time: TimeTrend::Linear,
        };
        let ys = TimeSeries::from_values(y.clone());
        let xs = TimeSeries::from_values(x.clone());
        let m = fit_regression_ts(&ys, Some(&xs), spec).unwrap();
        // Rebuild the design and residuals, check <r, col> ~ 0.
        let skip = 1;
        let rows = y.len() - skip;
        for c in 0..5 {
            let mut dot = 0.0;
            let mut col_norm = 0.0;
            let mut r_norm = 0.0;
            for r in 0..rows {
                let t = r + skip;
                let row = design_row(&spec, &y, Some(&x), t);
                let pred = row[0] * m.intercept
                    + row[1] * m.phi[0]
                    + row[2] * m.beta[0]
                    + row[3] * m.beta[1]
                    + row[4] * m.trend[0];
                let resid = y[t] - pred;
                dot += resid * row[c];
                col_norm += row[c] * row[c];
                r_norm += resid * resid;
            }
            assert!(
                dot.abs() < 1e-6 * (col_norm.sqrt() * r_norm.sqrt()).max(1e-9),
                "column {c}: {dot}"
            );
        }
    }

    #[test]
    fn residual_mean_zero_with_intercept() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let y: Vec<f64> = (0..100).map(|_| rng.gen::<f64>()).collect();
        let ys = TimeSeries::from_values(y.clone());
        let m = fit_regression_ts(&ys, None, spec_lags(2)).unwrap();
        let mut mean_resid = 0.0;
        for t in 2..y.len() {
            let pred = m.intercept + m.phi[0] * y[t - 1] + m.phi[1] * y[t - 2];
            mean_resid += y[t] - pred;
        }
        mean_resid /= (y.len() - 2) as f64;
        assert!(mean_resid.abs() < 1e-9);
    }

    #[test]
    fn collinear_design_rejected() {
        // x identical to a constant makes the design rank-deficient with intercept.
        let y: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let x = vec![2.0; 50];
        let r = fit_regression_ts(
            &TimeSeries::from_values(y),
            Some(&TimeSeries::from_values(x)),
            RegressionSpec {
                y_lags: 1,
                x_lags: 0,
                time: TimeTrend::None,
            },
        );
        assert!(matches!(r, Err(Error::Collinear(_))));
    }

    #[test]
    fn quadratic_trend_recovery() {
        // y_t = 1 + 0.5 t + 0.25 t^2 + 0.3 y_{t-1} exactly. (A pure quadratic
        // target would make y_{t-1} collinear with the {1, t, t^2} columns.)
        let mut y = vec![1.0];
        for t in 1..80usize {
            let tf = t as f64;
            y.push(1.0 + 0.5 * tf + 0.25 * tf * tf + 0.3 * y[t - 1]);
        }
        let m = fit_regression_ts(
            &TimeSeries::from_values(y.clone()),
            None,
            RegressionSpec {
                y_lags: 1,
                x_lags: 0,
                time: TimeTrend::Quadratic,
            },
        )
        .unwrap();
        assert!((m.phi[0] - 0.3).abs() < 1e-6, "phi1 = {}", m.phi[0]);
        assert!((m.trend[0] - 0.5).abs() < 1e-5, "t coef = {}", m.trend[0]);
        assert!((m.trend[1] - 0.25).abs() < 1e-6, "t^2 coef = {}", m.trend[1]);
        // Exact recursion: forecasts continue it.
        let f = m.forecast(&TimeSeries::from_values(y.clone()), 3).unwrap();
        let mut prev = *y.last().unwrap();
        for (i, v) in f.iter().enumerate() {
            let t = (80 + i) as f64;
            let expected = 1.0 + 0.5 * t + 0.25 * t * t + 0.3 * prev;
            assert!((v - expected).abs() < 1e-5 * expected, "{v} vs {expected}");
            prev = expected;
        }
    }
}
