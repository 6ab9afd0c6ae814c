//! Core time-series representation and differencing / windowing transforms.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly daily-spaced series of observed values with a start date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub start_date: NaiveDate,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(start_date: NaiveDate, values: Vec<f64>) -> Self {
        TimeSeries { start_date, values }
    }

    /// Series with an arbitrary epoch, for data without a meaningful calendar anchor.
    pub fn from_values(values: Vec<f64>) -> Self {
        TimeSeries {
            start_date: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + chrono::Duration::days(index as i64)
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population variance (1/n).
    pub fn variance(&self) -> f64 {
        let n = self.values.len();
        if n == 0 {
            return 0.0;
        }
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64
    }

    /// Sub-series consisting of `self.values[range]`, with the start date shifted.
    pub fn slice(&self, start: usize, end: usize) -> TimeSeries {
        TimeSeries {
            start_date: self.date_at(start),
            values: self.values[start..end].to_vec(),
        }
    }
}

/// Apply `(1 - B)^d`: first differences, `d` times.
pub fn difference(s: &TimeSeries, d: usize) -> Result<TimeSeries> {
    if s.len() <= d {
        return Err(Error::InsufficientData {
            needed: d + 1,
            have: s.len(),
        });
    }
    let mut v = s.values.clone();
    for _ in 0..d {
        v = v.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(TimeSeries {
        start_date: s.start_date + chrono::Duration::days(d as i64),
        values: v,
    })
}

/// Invert `difference`: `anchors` holds the `d` leading values that were dropped.
///
/// `inverse_difference(difference(s, d), &s.values[..d], d) == s` up to rounding.
pub fn inverse_difference(diff: &TimeSeries, anchors: &[f64], d: usize) -> Result<TimeSeries> {
    if anchors.len() != d {
        return Err(Error::InvalidArgument(format!(
            "expected {} anchor values, got {}",
            d,
            anchors.len()
        )));
    }
    let mut v = diff.values.clone();
    // Undo one differencing level at a time, innermost last.
    for level in (0..d).rev() {
        // Anchor for this level is the first value of the partially-differenced series,
        // which is the level-th anchor differenced `level` times.
        let mut head = anchors.to_vec();
        for _ in 0..level {
            head = head.windows(2).map(|w| w[1] - w[0]).collect();
        }
        let first = head[0];
        let mut undone = Vec::with_capacity(v.len() + 1);
        undone.push(first);
        let mut acc = first;
        for x in &v {
            acc += x;
            undone.push(acc);
        }
        v = undone;
    }
    Ok(TimeSeries {
        start_date: diff.start_date - chrono::Duration::days(d as i64),
        values: v,
    })
}

/// Apply `(1 - B^s)^D`: seasonal differences with period `s_period`, `D` times.
pub fn seasonal_difference(s: &TimeSeries, big_d: usize, s_period: usize) -> Result<TimeSeries> {
    if big_d > 0 && s_period < 2 {
        return Err(Error::InvalidArgument(
            "seasonal period must be >= 2".into(),
        ));
    }
    if s.len() <= big_d * s_period {
        return Err(Error::InsufficientData {
            needed: big_d * s_period + 1,
            have: s.len(),
        });
    }
    let mut v = s.values.clone();
    for _ in 0..big_d {
        v = (s_period..v.len()).map(|i| v[i] - v[i - s_period]).collect();
    }
    Ok(TimeSeries {
        start_date: s.start_date + chrono::Duration::days((big_d * s_period) as i64),
        values: v,
    })
}

/// Extend a differenced-scale forecast back to the undifferenced scale.
///
/// `base` is the series *before* one application of differencing at `period`
/// (1 = regular). Forecast `j` on the undifferenced scale is
/// `f[j] + y[n - period + j]`, reading reconstructed values once `j >= period`.
pub fn undifference_forecasts(forecasts: &[f64], base: &[f64], period: usize) -> Vec<f64> {
    let n = base.len();
    let mut out: Vec<f64> = Vec::with_capacity(forecasts.len());
    for (j, f) in forecasts.iter().enumerate() {
        let prev = if j < period {
            base[n - period + j]
        } else {
            out[j - period]
        };
        out.push(f + prev);
    }
    out
}

/// Supervised sliding-window view of a series: `p` lags plus the time index as
/// inputs, the next `k` values as targets, stride 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LagMatrix {
    /// m x (p+1); row i is [y_i, ..., y_{i+p-1}, t = i+p].
    pub inputs: Vec<Vec<f64>>,
    /// m x k; row i is [y_{i+p}, ..., y_{i+p+k-1}].
    pub targets: Vec<Vec<f64>>,
    pub p: usize,
    pub k: usize,
}

impl LagMatrix {
    pub fn rows(&self) -> usize {
        self.inputs.len()
    }
}

/// Build the [`LagMatrix`] for `p` lags and `k` horizons; m = n - p - k + 1.
pub fn sliding_window(s: &TimeSeries, p: usize, k: usize) -> Result<LagMatrix> {
    let n = s.len();
    if p == 0 || k == 0 {
        return Err(Error::InvalidArgument("p and k must be >= 1".into()));
    }
    if n < p + k {
        return Err(Error::InsufficientData {
            needed: p + k,
            have: n,
        });
    }
    let m = n - p - k + 1;
    let mut inputs = Vec::with_capacity(m);
    let mut targets = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<f64> = s.values[i..i + p].to_vec();
        row.push((i + p) as f64);
        inputs.push(row);
        targets.push(s.values[i + p..i + p + k].to_vec());
    }
    Ok(LagMatrix {
        inputs,
        targets,
        p,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::from_values(v.to_vec())
    }

    #[test]
    fn difference_first_order() {
        let d = difference(&ts(&[1.0, 3.0, 6.0]), 1).unwrap();
        assert_eq!(d.values, vec![2.0, 3.0]);
    }

    #[test]
    fn difference_zero_is_identity() {
        let s = ts(&[4.0, 2.0, 9.0]);
        assert_eq!(difference(&s, 0).unwrap().values, s.values);
    }

    #[test]
    fn second_difference_matches_twice_applied() {
        // [1,3,6,10] -> d1 [2,3,4] -> d1 [1,1]
        let s = ts(&[1.0, 3.0, 6.0, 10.0]);
        let d2 = difference(&s, 2).unwrap();
        assert_eq!(d2.values, vec![1.0, 1.0]);
        let twice = difference(&difference(&s, 1).unwrap(), 1).unwrap();
        assert_eq!(d2.values, twice.values);
    }

    #[test]
    fn difference_insufficient_length() {
        assert!(difference(&ts(&[1.0]), 1).is_err());
    }

    #[test]
    fn inverse_difference_roundtrip_d1() {
        let d = ts(&[2.0, 3.0]);
        let s = inverse_difference(&d, &[1.0], 1).unwrap();
        assert_eq!(s.values, vec![1.0, 3.0, 6.0]);
    }

    #[test]
    fn inverse_difference_d0_identity() {
        let d = ts(&[2.0, 3.0]);
        assert_eq!(inverse_difference(&d, &[], 0).unwrap().values, d.values);
    }

    #[test]
    fn inverse_difference_anchor_count_checked() {
        assert!(inverse_difference(&ts(&[1.0]), &[1.0], 2).is_err());
    }

    #[test]
    fn seasonal_difference_period_7() {
        let s = ts(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let d = seasonal_difference(&s, 1, 7).unwrap();
        assert_eq!(d.values, vec![7.0, 7.0]);
    }

    #[test]
    fn seasonal_difference_d0_identity() {
        let s = ts(&[1.0, 5.0, 2.0]);
        assert_eq!(seasonal_difference(&s, 0, 7).unwrap().values, s.values);
    }

    #[test]
    fn regular_and_seasonal_differencing_commute() {
        let v: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).sin() * 10.0 + i as f64).collect();
        let s = ts(&v);
        let a = difference(&seasonal_difference(&s, 1, 7).unwrap(), 1).unwrap();
        let b = seasonal_difference(&difference(&s, 1).unwrap(), 1, 7).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn sliding_window_small_example() {
        let s = ts(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let m = sliding_window(&s, 2, 2).unwrap();
        assert_eq!(m.inputs, vec![vec![1.0, 2.0, 2.0], vec![2.0, 3.0, 3.0]]);
        assert_eq!(m.targets, vec![vec![3.0, 4.0], vec![4.0, 5.0]]);
    }

    #[test]
    fn sliding_window_row_count() {
        let s = ts(&(0..20).map(|i| i as f64).collect::<Vec<_>>());
        for p in 1..5 {
            for k in 1..5 {
                let m = sliding_window(&s, p, k).unwrap();
                assert_eq!(m.rows(), 20 - p - k + 1);
            }
        }
    }
}
