//! The statistical model family: random walk, exponential smoothing,
//! autoregression, (seasonal) ARIMA, lagged regression, and VAR.

pub mod ar;
pub mod baseline;
pub mod regression;
pub mod sarima;
pub mod simulate;
pub mod var;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ar::{fit_ar_yule_walker, forecast_ar, ArModel};
pub use baseline::{rw_forecast, ses_fit_forecast, SesAlpha};
pub use regression::{fit_regression_ts, RegressionSpec, RegressionTsModel, TimeTrend};
pub use sarima::{fit_arima, fit_sarima, forecast_sarima, SarimaModel};
pub use var::{fit_var, forecast_var, VarModel};

/// (p,d,q)(P,D,Q)_s order tuple shared by AR/ARIMA/SARIMA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    /// Season length; 0 = non-seasonal.
    pub s_period: usize,
}

impl ModelOrder {
    pub fn arima(p: usize, d: usize, q: usize) -> Self {
        ModelOrder {
            p,
            d,
            q,
            seasonal_p: 0,
            seasonal_d: 0,
            seasonal_q: 0,
            s_period: 0,
        }
    }

    pub fn sarima(p: usize, d: usize, q: usize, bp: usize, bd: usize, bq: usize, s: usize) -> Self {
        ModelOrder {
            p,
            d,
            q,
            seasonal_p: bp,
            seasonal_d: bd,
            seasonal_q: bq,
            s_period: s,
        }
    }

    pub fn is_seasonal(&self) -> bool {
        self.seasonal_p + self.seasonal_d + self.seasonal_q > 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_seasonal() && self.s_period < 2 {
            return Err(Error::InvalidArgument(
                "seasonal orders require s_period >= 2".into(),
            ));
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        // delta + AR + MA + seasonal AR + seasonal MA
        1 + self.p + self.q + self.seasonal_p + self.seasonal_q
    }
}

impl std::fmt::Display for ModelOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_seasonal() || self.s_period > 0 {
            write!(
                f,
                "({},{},{})x({},{},{})_{}",
                self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q, self.s_period
            )
        } else {
            write!(f, "({},{},{})", self.p, self.d, self.q)
        }
    }
}

/// Fit summary used for AIC-based order comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitSummary {
    pub model: String,
    pub aic: f64,
    pub n_params: usize,
    pub training_smape: f64,
}

/// Gaussian conditional-sum-of-squares AIC surrogate:
/// n ln(sse/n) + 2k.
pub fn aic(sse: f64, n_obs: usize, n_params: usize) -> Result<f64> {
    if sse <= 0.0 {
        return Err(Error::Degenerate("AIC requires a positive SSE".into()));
    }
    if n_obs == 0 {
        return Err(Error::InvalidArgument("AIC requires n_obs > 0".into()));
    }
    Ok(n_obs as f64 * (sse / n_obs as f64).ln() + 2.0 * n_params as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aic_zero_first_term() {
        assert_eq!(aic(10.0, 10, 3).unwrap(), 6.0);
    }

    #[test]
    fn aic_param_penalty() {
        let a = aic(5.0, 20, 2).unwrap();
        let b = aic(5.0, 20, 4).unwrap();
        assert!((b - a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn aic_rejects_nonpositive_sse() {
        assert!(aic(0.0, 10, 1).is_err());
    }
}
