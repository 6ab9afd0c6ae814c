//! AR(p) estimation via the Yule-Walker equations and iterated forecasting.

use serde::{Deserialize, Serialize};

use crate::acf::{autocovariances, durbin_levinson};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// A fitted autoregressive model on zero-centered values
/// z_t = phi_1 z_{t-1} + ... + phi_p z_{t-p} + eps_t, z_t = y_t - mu.
///
/// Coefficients are stored lag-1-first (phi\[0\] multiplies z_{t-1}).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArModel {
    pub p: usize,
    pub mean: f64,
    pub phi: Vec<f64>,
    pub sigma2: f64,
    /// All roots of the AR polynomial outside the unit circle.
    pub stationary: bool,
}

/// Check stationarity of the AR polynomial 1 - phi_1 z - ... - phi_p z^p by
/// the companion-matrix spectral radius (power iteration bound).
fn ar_is_stationary(phi: &[f64]) -> bool {
    let p = phi.len();
    if p == 0 {
        return true;
    }
    // Companion matrix eigenvalues inside the unit circle <=> stationary.
    let m = nalgebra::DMatrix::from_fn(p, p, |i, j| {
        if i == 0 {
            phi[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    m.complex_eigenvalues().iter().all(|e| e.norm() < 1.0)
}

/// Solve the Yule-Walker system R phi = rho for the AR coefficients from the
/// biased sample autocorrelations, via the Durbin-Levinson recursion.
pub fn fit_ar_yule_walker(s: &TimeSeries, p: usize) -> Result<ArModel> {
    if s.len() <= 2 * p {
        return Err(Error::InsufficientData {
            needed: 2 * p + 1,
            have: s.len(),
        });
    }
    let gamma = autocovariances(&s.values, p);
    if gamma[0] <= 0.0 {
        return Err(Error::Degenerate("constant series".into()));
    }
    let rho: Vec<f64> = gamma.iter().map(|g| g / gamma[0]).collect();
    let (_, phi) = durbin_levinson(&rho, p);
    if phi.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerical("singular Yule-Walker system".into()));
    }
    let mean = s.mean();
    // Innovation variance from the residuals of the fitted recursion.
    let mut sse = 0.0;
    let mut count = 0usize;
    for t in p..s.len() {
        let pred: f64 = (0..p)
            .map(|j| phi[j] * (s.values[t - 1 - j] - mean))
            .sum::<f64>()
            + mean;
        let e = s.values[t] - pred;
        sse += e * e;
        count += 1;
    }
    let stationary = ar_is_stationary(&phi);
    Ok(ArModel {
        p,
        mean,
        phi,
        sigma2: if count > 0 { sse / count as f64 } else { 0.0 },
        stationary,
    })
}

/// Fit an AR model from externally supplied autocorrelations (used by tests
/// and by callers that already hold exact theoretical correlations).
pub fn ar_from_autocorrelations(rho: &[f64], p: usize, mean: f64) -> Result<ArModel> {
    if rho.len() <= p {
        return Err(Error::InvalidArgument(format!(
            "need autocorrelations up to lag {p}"
        )));
    }
    let (_, phi) = durbin_levinson(rho, p);
    let stationary = ar_is_stationary(&phi);
    Ok(ArModel {
        p,
        mean,
        phi,
        sigma2: 0.0,
        stationary,
    })
}

/// Iterated multi-step AR forecast; forecasts feed back as pseudo-history.
pub fn forecast_ar(m: &ArModel, history: &TimeSeries, h: usize) -> Result<Vec<f64>> {
    if history.len() < m.p {
        return Err(Error::InsufficientData {
            needed: m.p,
            have: history.len(),
        });
    }
    let mut z: Vec<f64> = history.values.iter().map(|y| y - m.mean).collect();
    let n = z.len();
    let mut out = Vec::with_capacity(h);
    for step in 0..h {
        let t = n + step;
        let pred: f64 = (0..m.p).map(|j| m.phi[j] * z[t - 1 - j]).sum();
        z.push(pred);
        out.push(pred + m.mean);
    }
    Ok(out)
}
