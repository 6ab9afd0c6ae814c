//! Vector autoregression fitted by per-equation least squares.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// VAR(p, n): y_t = delta + Phi^(0) y_{t-p} + ... + Phi^(p-1) y_{t-1} + eps_t.
///
/// `coefficients[l]` is the n x n matrix multiplying y_{t-p+l}, matching the
/// oldest-lag-first indexing of the model equation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarModel {
    pub n_vars: usize,
    pub p: usize,
    pub intercepts: Vec<f64>,
    pub coefficients: Vec<Vec<Vec<f64>>>,
    pub residual_covariance: Vec<Vec<f64>>,
}

/// Fit a VAR(p) by OLS of each variable on all n*p lagged values plus an
/// intercept (equivalent to multivariate least squares).
pub fn fit_var(series: &[TimeSeries], p: usize) -> Result<VarModel> {
    let n_vars = series.len();
    if n_vars == 0 || p == 0 {
        return Err(Error::InvalidArgument("need >= 1 series and p >= 1".into()));
    }
    let len = series[0].len();
    if series.iter().any(|s| s.len() != len) {
        return Err(Error::InvalidArgument("series lengths differ".into()));
    }
    if len <= n_vars * p + 2 {
        return Err(Error::InsufficientData {
            needed: n_vars * p + 3,
            have: len,
        });
    }
    let rows = len - p;
    let n_cols = 1 + n_vars * p;
    // Columns: intercept, then for lag offset l = 0..p (y_{t-p+l}), each variable.
    let design = DMatrix::from_fn(rows, n_cols, |r, c| {
        if c == 0 {
            1.0
        } else {
            let l = (c - 1) / n_vars;
            let v = (c - 1) % n_vars;
            series[v].values[r + l]
        }
    });
    let svd = design.clone().svd(true, true);
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > 1e-10 * svd.singular_values[0])
        .count();
    if rank < n_cols {
        return Err(Error::Collinear(format!(
            "lag design rank {rank} < {n_cols}"
        )));
    }

    let mut intercepts = vec![0.0; n_vars];
    let mut coefficients = vec![vec![vec![0.0; n_vars]; n_vars]; p];
    let mut residuals: Vec<DVector<f64>> = Vec::with_capacity(n_vars);
    for eq in 0..n_vars {
        let target = DVector::from_fn(rows, |r, _| series[eq].values[r + p]);
        let coef = svd
            .solve(&target, 1e-12)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        intercepts[eq] = coef[0];
        for l in 0..p {
            for v in 0..n_vars {
                coefficients[l][eq][v] = coef[1 + l * n_vars + v];
            }
        }
        residuals.push(&target - &design * &coef);
    }

    let mut cov = vec![vec![0.0; n_vars]; n_vars];
    for (i, cov_row) in cov.iter_mut().enumerate() {
        for (j, c) in cov_row.iter_mut().enumerate() {
            *c = residuals[i].dot(&residuals[j]) / rows as f64;
        }
    }

    Ok(VarModel {
        n_vars,
        p,
        intercepts,
        coefficients,
        residual_covariance: cov,
    })
}

/// Iterated multi-step VAR forecast; returns an h x n matrix.
pub fn forecast_var(m: &VarModel, history: &[TimeSeries], h: usize) -> Result<Vec<Vec<f64>>> {
    if history.len() != m.n_vars {
        return Err(Error::InvalidArgument(format!(
            "model has {} variables, history has {}",
            m.n_vars,
            history.len()
        )));
    }
    let len = history[0].len();
    if len < m.p || history.iter().any(|s| s.len() != len) {
        return Err(Error::InsufficientData {
            needed: m.p,
            have: len,
        });
    }
    // extended[v] holds the history of variable v plus forecasts appended.
    let mut extended: Vec<Vec<f64>> = history.iter().map(|s| s.values.clone()).collect();
    let mut out = Vec::with_capacity(h);
    for step in 0..h {
        let t = len + step;
        let mut row = vec![0.0; m.n_vars];
        for (eq, r) in row.iter_mut().enumerate() {
            let mut pred = m.intercepts[eq];
            for l in 0..m.p {
                // coefficients[l] multiplies y_{t-p+l}
                for v in 0..m.n_vars {
                    pred += m.coefficients[l][eq][v] * extended[v][t - m.p + l];
                }
            }
            *r = pred;
        }
        for (v, col) in extended.iter_mut().enumerate() {
            col.push(row[v]);
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::simulate::simulate_ar;
    use crate::models::{fit_regression_ts, forecast_ar, ArModel, RegressionSpec, TimeTrend};

    #[test]
    fn independent_ar1_pair_recovers_diagonal() {
        let a = simulate_ar(&[0.5], 0.0, 5000, 61);
        let b = simulate_ar(&[0.7], 0.0, 5000, 62);
        let m = fit_var(&[a, b], 1).unwrap();
        let phi = &m.coefficients[0];
        assert!((phi[0][0] - 0.5).abs() < 0.05, "{}", phi[0][0]);
        assert!((phi[1][1] - 0.7).abs() < 0.05, "{}", phi[1][1]);
        assert!(phi[0][1].abs() < 0.05);
        assert!(phi[1][0].abs() < 0.05);
    }

    #[test]
    fn var_n1_matches_lag_regression() {
        let s = simulate_ar(&[0.6, -0.2], 3.0, 500, 63);
        let p = 2;
        let var = fit_var(std::slice::from_ref(&s), p).unwrap();
        let reg = fit_regression_ts(
            &s,
            None,
            RegressionSpec {
                y_lags: p,
                x_lags: 0,
                time: TimeTrend::None,
            },
        )
        .unwrap();
        assert!((var.intercepts[0] - reg.intercept).abs() < 1e-8);
        // VAR stores oldest-lag-first; regression phi is lag-1-first.
        assert!((var.coefficients[p - 1][0][0] - reg.phi[0]).abs() < 1e-8);
        assert!((var.coefficients[0][0][0] - reg.phi[1]).abs() < 1e-8);
    }

    #[test]
    fn zero_noise_linear_system_exact() {
        // y_t = A y_{t-1} with A = [[0.5, 0.1], [0.0, 0.8]], no noise.
        let a = [[0.5, 0.1], [0.0, 0.8]];
        let mut x = vec![vec![1.0], vec![2.0]];
        for t in 1..60 {
            for eq in 0..2 {
                let v = a[eq][0] * x[0][t - 1] + a[eq][1] * x[1][t - 1];
                x[eq].push(v);
            }
        }
        let series: Vec<TimeSeries> = x.into_iter().map(TimeSeries::from_values).collect();
        let m = fit_var(&series, 1).unwrap();
        for eq in 0..2 {
            for v in 0..2 {
                assert!(
                    (m.coefficients[0][eq][v] - a[eq][v]).abs() < 1e-6,
                    "A[{eq}][{v}] = {}",
                    m.coefficients[0][eq][v]
                );
            }
            assert!(m.intercepts[eq].abs() < 1e-6);
        }
    }

    #[test]
    fn zero_phi_forecasts_intercept() {
        let m = VarModel {
            n_vars: 2,
            p: 1,
            intercepts: vec![3.0, -1.0],
            coefficients: vec![vec![vec![0.0; 2]; 2]],
            residual_covariance: vec![vec![0.0; 2]; 2],
        };
        let h = forecast_var(
            &m,
            &[
                TimeSeries::from_values(vec![9.0, 2.0]),
                TimeSeries::from_values(vec![1.0, 4.0]),
            ],
            3,
        )
        .unwrap();
        for row in h {
            assert_eq!(row, vec![3.0, -1.0]);
        }
    }

    #[test]
    fn diagonal_var_decouples_to_univariate_ar() {
        let m = VarModel {
            n_vars: 2,
            p: 1,
            intercepts: vec![0.0, 0.0],
            coefficients: vec![vec![vec![0.5, 0.0], vec![0.0, 0.3]]],
            residual_covariance: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let h1 = TimeSeries::from_values(vec![8.0]);
        let h2 = TimeSeries::from_values(vec![10.0]);
        let f = forecast_var(&m, &[h1.clone(), h2.clone()], 4).unwrap();
        let a1 = ArModel {
            p: 1,
            mean: 0.0,
            phi: vec![0.5],
            sigma2: 1.0,
            stationary: true,
        };
        let a2 = ArModel {
            p: 1,
            mean: 0.0,
            phi: vec![0.3],
            sigma2: 1.0,
            stationary: true,
        };
        let f1 = forecast_ar(&a1, &h1, 4).unwrap();
        let f2 = forecast_ar(&a2, &h2, 4).unwrap();
        for i in 0..4 {
            assert!((f[i][0] - f1[i]).abs() < 1e-12);
            assert!((f[i][1] - f2[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn h1_forecast_matches_direct_formula() {
        let s1 = simulate_ar(&[0.4], 1.0, 200, 71);
        let s2 = simulate_ar(&[0.2], -1.0, 200, 72);
        let m = fit_var(&[s1.clone(), s2.clone()], 2).unwrap();
        let f = forecast_var(&m, &[s1.clone(), s2.clone()], 1).unwrap();
        let n = s1.len();
        for eq in 0..2 {
            let mut direct = m.intercepts[eq];
            for l in 0..2 {
                direct += m.coefficients[l][eq][0] * s1.values[n - 2 + l];
                direct += m.coefficients[l][eq][1] * s2.values[n - 2 + l];
            }
            assert!((f[0][eq] - direct).abs() < 1e-12);
        }
    }
}
