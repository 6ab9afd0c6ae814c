//! Rolling-origin multi-horizon backtesting, the sMAPE metric, per-horizon
//! order search, and report assembly.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::augment::{augment, base_order};
use crate::error::{Error, Result};
use crate::models::ar::{fit_ar_yule_walker, forecast_ar};
use crate::models::baseline::{rw_forecast, ses_fit_forecast, SesAlpha};
use crate::models::sarima::{fit_sarima, forecast_sarima};
use crate::models::ModelOrder;
use crate::neural::{train_gru, train_mlp, TrainConfig};
use crate::series::{sliding_window, TimeSeries};

/// Symmetric MAPE on the 0-200 scale; a 0/0 term contributes 0.
pub fn smape(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    if actual.len() != forecast.len() || actual.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "smape needs equal non-empty lengths, got {} and {}",
            actual.len(),
            forecast.len()
        )));
    }
    let n = actual.len() as f64;
    let sum: f64 = actual
        .iter()
        .zip(forecast)
        .map(|(a, f)| {
            let denom = a.abs() + f.abs();
            if denom == 0.0 {
                0.0
            } else {
                (a - f).abs() / denom
            }
        })
        .sum();
    Ok(200.0 / n * sum)
}

/// Backtest settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RollingConfig {
    /// Leading fraction used as the initial training window.
    pub train_fraction: f64,
    /// Refit cadence kt in test-set steps.
    pub retrain_every: usize,
    /// Forecast horizons 1..=max_horizon recorded at every origin.
    pub max_horizon: usize,
}

impl Default for RollingConfig {
    fn default() -> Self {
        RollingConfig {
            train_fraction: 0.6,
            retrain_every: 5,
            max_horizon: 14,
        }
    }
}

impl RollingConfig {
    /// Fit once on the initial window and never refit (neural families).
    pub fn no_refit() -> Self {
        RollingConfig {
            retrain_every: usize::MAX,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidArgument(
                "train_fraction must lie in (0, 1)".into(),
            ));
        }
        if self.retrain_every == 0 || self.max_horizon == 0 {
            return Err(Error::InvalidArgument(
                "retrain_every and max_horizon must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// A fitted model reduced to what the harness needs: a forecast function over
/// an arbitrary history, and optional in-sample one-step predictions aligned
/// with the window it was fitted on.
pub struct FittedModel {
    pub forecast: Box<dyn Fn(&TimeSeries, usize) -> Result<Vec<f64>>>,
    pub in_sample: Option<Vec<Option<f64>>>,
}

/// A named model family: anything that can be fitted to a training window.
pub struct ModelFamily {
    pub name: String,
    pub fit: Box<dyn Fn(&TimeSeries) -> Result<FittedModel>>,
}

impl ModelFamily {
    pub fn new(
        name: impl Into<String>,
        fit: impl Fn(&TimeSeries) -> Result<FittedModel> + 'static,
    ) -> Self {
        ModelFamily {
            name: name.into(),
            fit: Box::new(fit),
        }
    }

    /// Random walk: forecast at every horizon is the last observed value.
    pub fn rw() -> Self {
        ModelFamily::new("RW", |train: &TimeSeries| {
            let in_sample = Some(
                std::iter::once(None)
                    .chain(train.values.iter().take(train.len() - 1).map(|v| Some(*v)))
                    .collect(),
            );
            Ok(FittedModel {
                forecast: Box::new(|history, h| rw_forecast(history, h)),
                in_sample,
            })
        })
    }

    /// Simple exponential smoothing; alpha fixed or grid-selected in-window.
    pub fn ses(alpha: SesAlpha) -> Self {
        ModelFamily::new("SES", move |_train: &TimeSeries| {
            Ok(FittedModel {
                forecast: Box::new(move |history, h| ses_fit_forecast(history, alpha, h)),
                in_sample: None,
            })
        })
    }

    /// Yule-Walker AR(p) on the training window, iterated forecasts.
    pub fn ar(p: usize) -> Self {
        ModelFamily::new(format!("AR({p})"), move |train: &TimeSeries| {
            let model = fit_ar_yule_walker(train, p)?;
            Ok(FittedModel {
                forecast: Box::new(move |history, h| forecast_ar(&model, history, h)),
                in_sample: None,
            })
        })
    }

    /// CSS-fitted (S)ARIMA of the given order.
    pub fn sarima(order: ModelOrder) -> Self {
        ModelFamily::new(format!("{order}"), move |train: &TimeSeries| {
            let model = fit_sarima(train, order)?;
            let in_sample = model.in_sample_one_step(train).ok();
            Ok(FittedModel {
                forecast: Box::new(move |history, h| forecast_sarima(&model, history, h)),
                in_sample,
            })
        })
    }

    /// Direct multi-horizon MLP; trained on the window it is fitted to, so
    /// pair it with a no-refit config ("trained once" policy).
    pub fn mlp(p: usize, hidden: usize, k: usize, tc: TrainConfig) -> Self {
        ModelFamily::new(format!("NN({p})"), move |train: &TimeSeries| {
            let data = sliding_window(train, p, k)?;
            let model = train_mlp(&data, hidden, &tc)?;
            Ok(FittedModel {
                forecast: Box::new(move |history, h| {
                    let fc = model.predict_multi_horizon(history)?;
                    if h > fc.len() {
                        return Err(Error::InvalidArgument(format!(
                            "direct model emits {} horizons, {} requested",
                            fc.len(),
                            h
                        )));
                    }
                    Ok(fc[..h].to_vec())
                }),
                in_sample: None,
            })
        })
    }

    /// Direct multi-horizon GRU forecaster (affine readout head).
    pub fn gru(p: usize, k: usize, tc: TrainConfig) -> Self {
        ModelFamily::new(format!("GRU({p})"), move |train: &TimeSeries| {
            let data = sliding_window(train, p, k)?;
            let model = train_gru(&data, true, &tc)?;
            Ok(FittedModel {
                forecast: Box::new(move |history, h| {
                    let fc = model.predict_multi_horizon(history)?;
                    if h > fc.len() {
                        return Err(Error::InvalidArgument(format!(
                            "direct model emits {} horizons, {} requested",
                            fc.len(),
                            h
                        )));
                    }
                    Ok(fc[..h].to_vec())
                }),
                in_sample: None,
            })
        })
    }

    /// MLP trained on the forecast-interleaved series with 28 outputs; even
    /// output components map to daily horizons 1..14.
    ///
    /// At forecast time the recent history is interleaved on the fly with
    /// one-step forecasts from a SARIMA model fitted on the training window
    /// only, so no forecast reads data past its origin.
    pub fn mlp_augmented(p: usize, hidden: usize, tc: TrainConfig) -> Self {
        ModelFamily::new(format!("AUG-NN({p})"), move |train: &TimeSeries| {
            let aug = augment(train)?;
            let aug_series = TimeSeries::from_values(aug.values.clone());
            let data = sliding_window(&aug_series, p, 28)?;
            let model = train_mlp(&data, hidden, &tc)?;
            let interpolator = fit_sarima(train, base_order())?;
            Ok(FittedModel {
                forecast: Box::new(move |history, h| {
                    if h > 14 {
                        return Err(Error::InvalidArgument(
                            "augmented model covers daily horizons 1..14".into(),
                        ));
                    }
                    // Augmented tail ending at the origin: observed values at
                    // even offsets, SARIMA-midpoints between them.
                    let t_last = history.len() - 1;
                    let n_obs = p / 2 + 2;
                    if history.len() < n_obs {
                        return Err(Error::InsufficientData {
                            needed: n_obs,
                            have: history.len(),
                        });
                    }
                    let mut tail = Vec::with_capacity(2 * n_obs);
                    for t in t_last + 1 - n_obs..=t_last {
                        if t > t_last + 1 - n_obs {
                            let prefix = history.slice(0, t);
                            let next = forecast_sarima(&interpolator, &prefix, 1)?[0];
                            tail.push((history.values[t - 1] + next) / 2.0);
                        }
                        tail.push(history.values[t]);
                    }
                    let window = &tail[tail.len() - p..];
                    // Time feature: position in the augmented indexing.
                    let fc28 = model.predict_from_window(window, (2 * t_last + 1) as f64)?;
                    Ok(even_horizons(&fc28)?[..h].to_vec())
                }),
                in_sample: None,
            })
        })
    }
}

/// Rolling forecasts: one row per origin, horizons 1..=H across.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastMatrix {
    pub origins: Vec<usize>,
    /// `values[i][h-1]` is the forecast made at `origins[i]` for `origins[i]+h`;
    /// `None` where the target falls past the end of the series.
    pub values: Vec<Vec<Option<f64>>>,
    /// Aligned actuals, same shape.
    pub actuals: Vec<Vec<Option<f64>>>,
    pub max_horizon: usize,
    /// In-sample (training window) pairs of (actual, one-step prediction).
    pub in_sample: Vec<(f64, f64)>,
    /// Origins where the scheduled refit failed and the previous model was
    /// reused.
    pub flagged_origins: Vec<usize>,
}

impl ForecastMatrix {
    /// The (actual, forecast) pairs for one horizon.
    pub fn horizon_pairs(&self, h: usize) -> (Vec<f64>, Vec<f64>) {
        let mut a = Vec::new();
        let mut f = Vec::new();
        for (row_f, row_a) in self.values.iter().zip(&self.actuals) {
            if let (Some(fv), Some(av)) = (row_f[h - 1], row_a[h - 1]) {
                f.push(fv);
                a.push(av);
            }
        }
        (a, f)
    }

    /// CSV export with columns origin, horizon, forecast, actual.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let err = |e: csv::Error| Error::io("<forecast csv>", std::io::Error::other(e.to_string()));
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["origin", "horizon", "forecast", "actual"])
            .map_err(err)?;
        for (i, origin) in self.origins.iter().enumerate() {
            for h in 1..=self.max_horizon {
                if let (Some(f), Some(a)) = (self.values[i][h - 1], self.actuals[i][h - 1]) {
                    wtr.write_record([
                        origin.to_string(),
                        h.to_string(),
                        format!("{f}"),
                        format!("{a}"),
                    ])
                    .map_err(err)?;
                }
            }
        }
        wtr.flush().map_err(|e| Error::io("<forecast csv>", e))?;
        Ok(())
    }
}

/// Rolling-origin backtest with a fixed-width drop-oldest training window.
///
/// The first origin is the last index of the initial training split; the model
/// is refitted every `retrain_every` origins on the window ending at the
/// current origin and reused in between. Forecasts at an origin never read any
/// value past that origin. A failed scheduled refit reuses the previous model
/// and flags the origin; a failed initial fit is an error.
pub fn rolling_validate(
    family: &ModelFamily,
    s: &TimeSeries,
    cfg: &RollingConfig,
) -> Result<ForecastMatrix> {
    cfg.validate()?;
    let n = s.len();
    let train_len = ((n as f64) * cfg.train_fraction).floor() as usize;
    if train_len < 2 || train_len + 1 >= n {
        return Err(Error::InsufficientData {
            needed: 4,
            have: n,
        });
    }
    let first_origin = train_len - 1;

    let mut fitted = (family.fit)(&s.slice(0, train_len))?;
    let in_sample: Vec<(f64, f64)> = match &fitted.in_sample {
        Some(preds) => preds
            .iter()
            .enumerate()
            .filter_map(|(t, p)| p.map(|p| (s.values[t], p)))
            .collect(),
        None => Vec::new(),
    };

    let mut matrix = ForecastMatrix {
        origins: Vec::new(),
        values: Vec::new(),
        actuals: Vec::new(),
        max_horizon: cfg.max_horizon,
        in_sample,
        flagged_origins: Vec::new(),
    };

    for origin in first_origin..n - 1 {
        let steps = origin - first_origin;
        if steps > 0 && cfg.retrain_every != usize::MAX && steps % cfg.retrain_every == 0 {
            // Drop-oldest window of constant length ending at the origin.
            match (family.fit)(&s.slice(origin + 1 - train_len, origin + 1)) {
                Ok(m) => fitted = m,
                Err(_) => matrix.flagged_origins.push(origin),
            }
        }
        let history = s.slice(0, origin + 1);
        let fc = (fitted.forecast)(&history, cfg.max_horizon)?;
        let mut row_f = Vec::with_capacity(cfg.max_horizon);
        let mut row_a = Vec::with_capacity(cfg.max_horizon);
        for h in 1..=cfg.max_horizon {
            if origin + h < n {
                row_f.push(Some(fc[h - 1]));
                row_a.push(Some(s.values[origin + h]));
            } else {
                row_f.push(None);
                row_a.push(None);
            }
        }
        matrix.origins.push(origin);
        matrix.values.push(row_f);
        matrix.actuals.push(row_a);
    }
    Ok(matrix)
}

/// One table column: per-horizon sMAPE plus the in-sample figure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model: String,
    /// Index h-1 holds the sMAPE at horizon h; `None` if no origin had a
    /// recorded forecast there.
    pub horizon_smape: Vec<Option<f64>>,
    pub in_sample_smape: Option<f64>,
    /// Grid-searched families: the selected order per horizon.
    pub selected_orders: Option<Vec<usize>>,
    pub flagged_origins: Vec<usize>,
}

impl EvaluationReport {
    pub fn mean_smape(&self) -> Option<f64> {
        let vals: Vec<f64> = self.horizon_smape.iter().flatten().copied().collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }
}

/// Reduce a forecast matrix to its per-horizon sMAPE column.
pub fn evaluate(fm: &ForecastMatrix, model: impl Into<String>) -> EvaluationReport {
    let mut horizon_smape = Vec::with_capacity(fm.max_horizon);
    for h in 1..=fm.max_horizon {
        let (a, f) = fm.horizon_pairs(h);
        horizon_smape.push(if a.is_empty() {
            None
        } else {
            Some(smape(&a, &f).expect("aligned pairs"))
        });
    }
    let in_sample_smape = if fm.in_sample.is_empty() {
        None
    } else {
        let (a, p): (Vec<f64>, Vec<f64>) = fm.in_sample.iter().copied().unzip();
        Some(smape(&a, &p).expect("aligned pairs"))
    };
    EvaluationReport {
        model: model.into(),
        horizon_smape,
        in_sample_smape,
        selected_orders: None,
        flagged_origins: fm.flagged_origins.clone(),
    }
}

/// Per-horizon order search over a grid of non-seasonal orders `p`.
///
/// Each candidate is backtested with [`rolling_validate`]; for every horizon
/// the p with the lowest sMAPE is reported, ties broken toward smaller p.
/// Candidates whose backtest fails outright are skipped and flagged.
pub fn order_search(
    name: impl Into<String>,
    family_for_p: impl Fn(usize) -> ModelFamily,
    s: &TimeSeries,
    cfg: &RollingConfig,
    p_grid: impl IntoIterator<Item = usize>,
) -> Result<EvaluationReport> {
    let mut best: Vec<Option<(f64, usize)>> = vec![None; cfg.max_horizon];
    let mut best_in_sample: Option<(f64, usize)> = None;
    let mut failed: Vec<usize> = Vec::new();
    let mut tried = 0;
    for p in p_grid {
        tried += 1;
        let family = family_for_p(p);
        let fm = match rolling_validate(&family, s, cfg) {
            Ok(fm) => fm,
            Err(_) => {
                failed.push(p);
                continue;
            }
        };
        let report = evaluate(&fm, family.name);
        for (h, v) in report.horizon_smape.iter().enumerate() {
            if let Some(v) = v {
                if best[h].map(|(b, _)| *v < b).unwrap_or(true) {
                    best[h] = Some((*v, p));
                }
            }
        }
        if let Some(v) = report.in_sample_smape {
            if best_in_sample.map(|(b, _)| v < b).unwrap_or(true) {
                best_in_sample = Some((v, p));
            }
        }
    }
    if tried == 0 {
        return Err(Error::InvalidArgument("empty order grid".into()));
    }
    if tried == failed.len() {
        return Err(Error::NonConvergence {
            iterations: tried,
            best: f64::NAN,
        });
    }
    Ok(EvaluationReport {
        model: name.into(),
        horizon_smape: best.iter().map(|b| b.map(|(v, _)| v)).collect(),
        in_sample_smape: best_in_sample.map(|(v, _)| v),
        selected_orders: Some(best.iter().map(|b| b.map(|(_, p)| p).unwrap_or(0)).collect()),
        flagged_origins: failed,
    })
}

/// Percentage improvement of `aug` over `base` per horizon:
/// 100 (base - aug) / base; `None` where base is 0 or either is missing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImprovementReport {
    pub per_horizon: Vec<Option<f64>>,
    pub mean: Option<f64>,
    pub max: Option<f64>,
}

pub fn improvement_report(base: &EvaluationReport, aug: &EvaluationReport) -> Result<ImprovementReport> {
    if base.horizon_smape.len() != aug.horizon_smape.len() {
        return Err(Error::InvalidArgument(
            "reports cover different horizon counts".into(),
        ));
    }
    let per_horizon: Vec<Option<f64>> = base
        .horizon_smape
        .iter()
        .zip(&aug.horizon_smape)
        .map(|(b, a)| match (b, a) {
            (Some(b), Some(a)) if *b != 0.0 => Some(100.0 * (b - a) / b),
            _ => None,
        })
        .collect();
    let vals: Vec<f64> = per_horizon.iter().flatten().copied().collect();
    let mean = (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64);
    let max = vals.iter().copied().fold(None, |acc: Option<f64>, v| {
        Some(acc.map_or(v, |a| a.max(v)))
    });
    Ok(ImprovementReport {
        per_horizon,
        mean,
        max,
    })
}

/// Map a direct 28-horizon forecast from an interleaved series to effective
/// daily horizons 1..14 by reading the even components 2, 4, ..., 28.
pub fn even_horizons(forecast28: &[f64]) -> Result<Vec<f64>> {
    if forecast28.len() < 28 {
        return Err(Error::InvalidArgument(format!(
            "need 28 horizons, got {}",
            forecast28.len()
        )));
    }
    Ok((1..=14).map(|h| forecast28[2 * h - 1]).collect())
}

/// Text table, models as columns, in-sample plus per-horizon rows.
pub fn format_table(reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    let h_max = reports.iter().map(|r| r.horizon_smape.len()).max().unwrap_or(0);
    out.push_str(&format!("{:>10}", "h"));
    for r in reports {
        out.push_str(&format!("{:>18}", r.model));
    }
    out.push('\n');
    let cell = |v: Option<f64>, p: Option<usize>| -> String {
        match (v, p) {
            (Some(v), Some(p)) => format!("{:>12.2} ({:>2}) ", v, p),
            (Some(v), None) => format!("{:>18.2}", v),
            _ => format!("{:>18}", "-"),
        }
    };
    out.push_str(&format!("{:>10}", "in-sample"));
    for r in reports {
        out.push_str(&cell(r.in_sample_smape, None));
    }
    out.push('\n');
    for h in 1..=h_max {
        out.push_str(&format!("{:>10}", h));
        for r in reports {
            let v = r.horizon_smape.get(h - 1).copied().flatten();
            let p = r
                .selected_orders
                .as_ref()
                .and_then(|o| o.get(h - 1))
                .copied()
                .filter(|p| *p > 0);
            out.push_str(&cell(v, p));
        }
        out.push('\n');
    }
    out
}
