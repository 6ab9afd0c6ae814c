//! Forecast-interleaving data augmentation: one-step SARIMA forecasts are
//! averaged with the preceding observation and inserted between consecutive
//! days, doubling the effective series length (2n - 1 points).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::sarima::{fit_sarima, forecast_sarima};
use crate::models::ModelOrder;
use crate::series::TimeSeries;

/// Base model for the one-step forecasts: SARIMA(1,0,0)x(3,1,1) period 7.
pub fn base_order() -> ModelOrder {
    ModelOrder::sarima(1, 0, 0, 3, 1, 1, 7)
}

/// Refit cadence for the out-of-sample forecast half.
pub const REFIT_EVERY: usize = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AugmentedSeries {
    pub values: Vec<f64>,
    /// Order of the SARIMA model that produced the interpolants.
    pub base_order: ModelOrder,
}

impl AugmentedSeries {
    /// Original index for even augmented positions, `None` for interpolants.
    pub fn original_index(&self, aug_index: usize) -> Option<usize> {
        (aug_index % 2 == 0).then_some(aug_index / 2)
    }

    /// Exact left inverse of [`augment`]: the even-position subsequence.
    pub fn extract_original(&self) -> Vec<f64> {
        self.values.iter().step_by(2).copied().collect()
    }

    /// CSV with columns index, value, origin in {observed, interpolated}.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let err = |e: csv::Error| Error::io("<augmented csv>", std::io::Error::other(e.to_string()));
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["index", "value", "origin"]).map_err(err)?;
        for (i, v) in self.values.iter().enumerate() {
            let origin = if i % 2 == 0 { "observed" } else { "interpolated" };
            wtr.write_record([i.to_string(), format!("{v}"), origin.to_string()])
                .map_err(err)?;
        }
        wtr.flush()
            .map_err(|e| Error::io("<augmented csv>", e))?;
        Ok(())
    }
}

fn min_series_length(order: &ModelOrder) -> usize {
    // The out-of-sample half starts from a fit on the first half, so the half
    // itself must satisfy the CSS fit requirement (differencing offset plus
    // twice the expanded AR memory plus the MA memory).
    let a_len = (order.p + order.seasonal_p * order.s_period).max(1);
    let min_half = order.seasonal_d * order.s_period
        + order.d
        + 2 * a_len
        + (order.q + order.seasonal_q * order.s_period)
        + 1;
    2 * min_half
}

/// One-step forecasts for days 1..n-1: output index j is the forecast of
/// y_{j+1}.
///
/// The first half (j+1 < floor(n/2)) are in-sample one-step predictions from
/// a fit on the full series; where the CSS recursion has no residual yet the
/// previous observation stands in. The second half are rolling out-of-sample
/// one-step forecasts from a model fitted on the first half and refitted every
/// [`REFIT_EVERY`] steps on a fixed-width drop-oldest window, so each forecast
/// reads only data up to its left anchor.
pub fn generate_base_forecasts(s: &TimeSeries) -> Result<Vec<f64>> {
    let order = base_order();
    let n = s.len();
    if n < min_series_length(&order) {
        return Err(Error::InsufficientData {
            needed: min_series_length(&order),
            have: n,
        });
    }
    let split = n / 2;
    let mut forecasts = Vec::with_capacity(n - 1);

    let full = fit_sarima(s, order)?;
    let in_sample = full.in_sample_one_step(s)?;
    for target in 1..split {
        forecasts.push(in_sample[target].unwrap_or(s.values[target - 1]));
    }

    let mut model = fit_sarima(&s.slice(0, split), order)?;
    for target in split..n {
        let origin = target - 1;
        let steps_in = target - split;
        if steps_in > 0 && steps_in % REFIT_EVERY == 0 {
            model = fit_sarima(&s.slice(target - split, target), order)?;
        }
        let history = s.slice(0, origin + 1);
        forecasts.push(forecast_sarima(&model, &history, 1)?[0]);
    }
    Ok(forecasts)
}

/// augmented[2t] = y_t; augmented[2t+1] = (y_t + yhat_{t+1}) / 2.
pub fn interleave(s: &TimeSeries, forecasts: &[f64]) -> Result<AugmentedSeries> {
    if forecasts.len() + 1 != s.len() {
        return Err(Error::InvalidArgument(format!(
            "need n-1 = {} forecasts, got {}",
            s.len() - 1,
            forecasts.len()
        )));
    }
    let mut values = Vec::with_capacity(2 * s.len() - 1);
    for t in 0..s.len() {
        values.push(s.values[t]);
        if t + 1 < s.len() {
            values.push((s.values[t] + forecasts[t]) / 2.0);
        }
    }
    Ok(AugmentedSeries {
        values,
        base_order: base_order(),
    })
}

/// [`generate_base_forecasts`] followed by [`interleave`].
pub fn augment(s: &TimeSeries) -> Result<AugmentedSeries> {
    let forecasts = generate_base_forecasts(s)?;
    interleave(s, &forecasts)
}
