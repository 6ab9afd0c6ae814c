//! Random walk and simple exponential smoothing baselines.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Random walk forecast: every horizon repeats the last observed value.
pub fn rw_forecast(s: &TimeSeries, h: usize) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Err(Error::InsufficientData { needed: 1, have: 0 });
    }
    if h == 0 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    Ok(vec![*s.values.last().unwrap(); h])
}

/// Smoothing-weight choice for SES.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SesAlpha {
    Fixed(f64),
    /// Select alpha on a 0.05 grid minimising one-step in-sample squared error.
    Auto,
}

fn ses_level(values: &[f64], alpha: f64) -> f64 {
    let mut level = values[0];
    for y in &values[1..] {
        level = alpha * y + (1.0 - alpha) * level;
    }
    level
}

fn ses_sse(values: &[f64], alpha: f64) -> f64 {
    let mut level = values[0];
    let mut sse = 0.0;
    for y in &values[1..] {
        let e = y - level;
        sse += e * e;
        level = alpha * y + (1.0 - alpha) * level;
    }
    sse
}

/// Fit-and-forecast simple exponential smoothing. All `h` forecasts equal the
/// final smoothed level.
pub fn ses_fit_forecast(s: &TimeSeries, alpha: SesAlpha, h: usize) -> Result<Vec<f64>> {
    if s.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            have: s.len(),
        });
    }
    let alpha = match alpha {
        SesAlpha::Fixed(a) => {
            if a <= 0.0 || a > 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "alpha must be in (0, 1], got {a}"
                )));
            }
            a
        }
        SesAlpha::Auto => {
            let mut best = (f64::INFINITY, 0.05);
            for i in 1..=20 {
                let a = i as f64 * 0.05;
                let sse = ses_sse(&s.values, a);
                if sse < best.0 {
                    best = (sse, a);
                }
            }
            best.1
        }
    };
    let level = ses_level(&s.values, alpha);
    Ok(vec![level; h])
}
