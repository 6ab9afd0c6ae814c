//! Autocorrelation, partial autocorrelation, and white-noise diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Autocorrelation (or partial autocorrelation) estimates up to a maximum lag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcfResult {
    /// Lag 0..=maxlag.
    pub lags: Vec<usize>,
    /// rho_k in [-1, 1]; rho_0 = 1.
    pub autocorrelations: Vec<f64>,
    /// gamma_k; the biased (1/n) estimator.
    pub autocovariances: Vec<f64>,
    /// +-band for the zero-correlation null: 1.96 / sqrt(n).
    pub confidence_band: f64,
}

/// Biased (1/n) sample autocovariances gamma_0..gamma_maxlag.
pub fn autocovariances(values: &[f64], maxlag: usize) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    (0..=maxlag)
        .map(|k| {
            (k..n)
                .map(|t| (values[t] - mean) * (values[t - k] - mean))
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// Sample ACF: gamma_k = (1/n) sum (y_t - ybar)(y_{t-k} - ybar), rho_k = gamma_k / gamma_0.
pub fn acf(s: &TimeSeries, maxlag: usize) -> Result<AcfResult> {
    let n = s.len();
    if maxlag >= n {
        return Err(Error::InvalidArgument(format!(
            "maxlag {} must be < series length {}",
            maxlag, n
        )));
    }
    let gamma = autocovariances(&s.values, maxlag);
    if gamma[0] <= 0.0 {
        return Err(Error::Degenerate(
            "constant series has zero variance".into(),
        ));
    }
    let rho: Vec<f64> = gamma.iter().map(|g| g / gamma[0]).collect();
    Ok(AcfResult {
        lags: (0..=maxlag).collect(),
        autocorrelations: rho,
        autocovariances: gamma,
        confidence_band: 1.96 / (n as f64).sqrt(),
    })
}

/// Durbin-Levinson recursion on rho_1..rho_maxlag.
///
/// Returns (pacf values for lags 1..=maxlag, final AR coefficients phi_1..phi_maxlag).
/// The pacf at lag k is the last coefficient of the order-k recursion.
pub fn durbin_levinson(rho: &[f64], maxlag: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pacf = Vec::with_capacity(maxlag);
    let mut phi: Vec<f64> = Vec::new();
    let mut prev_err: f64 = 1.0;
    for k in 1..=maxlag {
        let num = rho[k]
            - phi
                .iter()
                .enumerate()
                .map(|(j, p)| p * rho[k - 1 - j])
                .sum::<f64>();
        let alpha = if prev_err.abs() < 1e-300 {
            0.0
        } else {
            num / prev_err
        };
        let mut next = Vec::with_capacity(k);
        for j in 0..k - 1 {
            next.push(phi[j] - alpha * phi[k - 2 - j]);
        }
        next.push(alpha);
        phi = next;
        prev_err *= 1.0 - alpha * alpha;
        pacf.push(alpha);
    }
    (pacf, phi)
}

/// Partial autocorrelations via Durbin-Levinson; pacf(1) = rho_1 exactly.
pub fn pacf(s: &TimeSeries, maxlag: usize) -> Result<AcfResult> {
    if maxlag >= s.len() / 2 {
        return Err(Error::InvalidArgument(format!(
            "maxlag {} must be < half the series length {}",
            maxlag,
            s.len()
        )));
    }
    let base = acf(s, maxlag)?;
    let (partials, _) = durbin_levinson(&base.autocorrelations, maxlag);
    let mut values = vec![1.0];
    values.extend(partials);
    Ok(AcfResult {
        lags: base.lags,
        autocorrelations: values,
        autocovariances: base.autocovariances,
        confidence_band: base.confidence_band,
    })
}

/// Moment diagnostics of a residual series against the white-noise conditions:
/// zero mean, constant variance, no serial correlation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseDiagnostics {
    pub mean: f64,
    pub variance: f64,
    pub lag1_autocorr: f64,
    pub is_white: bool,
}

/// Check residuals against the white-noise moment conditions.
///
/// `is_white` iff |mean| <= mean_tol * s/sqrt(n) and |rho_1| <= corr_band_mult/sqrt(n).
pub fn white_noise_check(
    residuals: &TimeSeries,
    mean_tol: f64,
    corr_band_mult: f64,
) -> NoiseDiagnostics {
    let n = residuals.len() as f64;
    let mean = residuals.mean();
    let variance = residuals.variance();
    let lag1 = if variance > 0.0 {
        let g = autocovariances(&residuals.values, 1);
        g[1] / g[0]
    } else {
        0.0
    };
    let mean_ok = mean.abs() <= mean_tol * (variance.sqrt() / n.sqrt()).max(f64::EPSILON);
    let corr_ok = lag1.abs() <= corr_band_mult / n.sqrt();
    NoiseDiagnostics {
        mean,
        variance,
        lag1_autocorr: lag1,
        is_white: mean_ok && corr_ok,
    }
}
