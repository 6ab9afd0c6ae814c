//! Outlier smoothing against a centered rolling window, with replacement values
//! taken from a local-level state-space smoother.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Default signal-to-noise ratio for the local level smoother.
pub const DEFAULT_Q_RATIO: f64 = 0.1;

/// Fixed-interval smoothed state means of the local level model
///
///   y_t  = mu_t + eps_t,        eps ~ (0, 1)
///   mu_t = mu_{t-1} + eta_t,    eta ~ (0, q_ratio)
///
/// Forward Kalman filter followed by the Rauch-Tung-Striebel backward pass.
/// Output length equals input length.
pub fn local_level_smooth(s: &TimeSeries, q_ratio: f64) -> Result<TimeSeries> {
    if s.is_empty() {
        return Err(Error::InsufficientData { needed: 1, have: 0 });
    }
    if q_ratio <= 0.0 {
        return Err(Error::InvalidArgument("q_ratio must be > 0".into()));
    }
    let n = s.len();
    let q = q_ratio;
    let r = 1.0;

    let mut filt_mean = vec![0.0; n];
    let mut filt_var = vec![0.0; n];
    let mut pred_mean = vec![0.0; n];
    let mut pred_var = vec![0.0; n];

    // Diffuse-ish initialisation anchored on the first observation.
    let mut m = s.values[0];
    let mut p = 1e7;
    for t in 0..n {
        let (mp, pp) = if t == 0 { (m, p) } else { (m, p + q) };
        pred_mean[t] = mp;
        pred_var[t] = pp;
        let k = pp / (pp + r);
        m = mp + k * (s.values[t] - mp);
        p = (1.0 - k) * pp;
        filt_mean[t] = m;
        filt_var[t] = p;
    }

    let mut smooth = vec![0.0; n];
    smooth[n - 1] = filt_mean[n - 1];
    let mut next = filt_mean[n - 1];
    for t in (0..n - 1).rev() {
        let c = filt_var[t] / pred_var[t + 1];
        next = filt_mean[t] + c * (next - pred_mean[t + 1]);
        smooth[t] = next;
    }
    Ok(TimeSeries::new(s.start_date, smooth))
}

/// Result of an outlier-smoothing pass.
#[derive(Debug, Clone)]
pub struct SmoothResult {
    pub series: TimeSeries,
    /// Indices that were flagged and replaced.
    pub flagged: Vec<usize>,
}

/// Replace points lying more than `k_sigma` rolling standard deviations from the
/// centered rolling mean (window/2 neighbours each side, excluding the point
/// itself) with the local-level smoother's estimate at that index.
///
/// Because the smoother is fit to the series as given, the replacement for a
/// large spike can itself remain an outlier; passes are repeated on the
/// partially cleaned series until no point is flagged, so the result is a
/// fixed point of the procedure.
///
/// Boundary points use a truncated one-sided window.
pub fn smooth_outliers(s: &TimeSeries, window: usize, k_sigma: f64) -> Result<SmoothResult> {
    let mut current = s.clone();
    let mut flagged: Vec<usize> = Vec::new();
    // Each pass shrinks surviving spikes toward their neighbourhood, so this
    // converges quickly; the cap only guards against pathological inputs.
    for _ in 0..32 {
        let pass = smooth_outliers_once(&current, window, k_sigma)?;
        if pass.flagged.is_empty() {
            break;
        }
        flagged.extend(pass.flagged);
        current = pass.series;
    }
    flagged.sort_unstable();
    flagged.dedup();
    Ok(SmoothResult {
        series: current,
        flagged,
    })
}

fn smooth_outliers_once(s: &TimeSeries, window: usize, k_sigma: f64) -> Result<SmoothResult> {
    if window < 2 || window % 2 != 0 {
        return Err(Error::InvalidArgument(
            "window must be even and >= 2".into(),
        ));
    }
    if k_sigma <= 0.0 {
        return Err(Error::InvalidArgument("k_sigma must be > 0".into()));
    }
    let n = s.len();
    if n < window + 1 {
        return Err(Error::InsufficientData {
            needed: window + 1,
            have: n,
        });
    }
    let half = window / 2;
    let replacement = local_level_smooth(s, DEFAULT_Q_RATIO)?;

    let mut out = s.values.clone();
    let mut flagged = Vec::new();
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let neighbours: Vec<f64> = (lo..=hi).filter(|&j| j != i).map(|j| s.values[j]).collect();
        let m = neighbours.iter().sum::<f64>() / neighbours.len() as f64;
        let var = neighbours.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
            / neighbours.len() as f64;
        let sd = var.sqrt();
        let dev = (s.values[i] - m).abs();
        // A zero-spread neighbourhood flags any departure from the local mean.
        let is_outlier = if sd == 0.0 {
            dev > 0.0
        } else {
            dev > k_sigma * sd
        };
        if is_outlier {
            out[i] = replacement.values[i];
            flagged.push(i);
        }
    }
    Ok(SmoothResult {
        series: TimeSeries::new(s.start_date, out),
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::from_values(v)
    }

    #[test]
    fn local_level_constant_is_fixed_point() {
        let s = ts(vec![5.0; 40]);
        let sm = local_level_smooth(&s, 0.1).unwrap();
        for v in &sm.values {
            assert!((v - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn local_level_large_q_tracks_input() {
        let s = ts(vec![1.0, 9.0, 2.0, 8.0, 3.0, 7.0, 4.0]);
        let sm = local_level_smooth(&s, 1e8).unwrap();
        for (a, b) in sm.values.iter().zip(&s.values) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }

    #[test]
    fn local_level_reduces_variance_of_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let s = ts((0..400).map(|_| rng.gen::<f64>() - 0.5).collect());
            let sm = local_level_smooth(&s, 0.5).unwrap();
            assert!(sm.variance() <= s.variance());
        }
    }

    #[test]
    fn constant_series_unchanged() {
        let s = ts(vec![2.0; 20]);
        let r = smooth_outliers(&s, 6, 3.5).unwrap();
        assert_eq!(r.series.values, s.values);
        assert!(r.flagged.is_empty());
    }

    #[test]
    fn interior_spike_flagged_and_bounded() {
        let mut v: Vec<f64> = (0..60).map(|i| 100.0 + (i as f64 * 0.3).sin()).collect();
        v[30] *= 100.0;
        let s = ts(v.clone());
        let r = smooth_outliers(&s, 6, 3.5).unwrap();
        assert!(r.flagged.contains(&30));
        // Replacement should fall back toward the neighbourhood, far below the spike.
        assert!(r.series.values[30] < v[30] / 2.0);
        assert!(r.series.values[30] > 0.0);
    }

    #[test]
    fn monotone_smooth_series_not_flagged() {
        let s = ts((0..50).map(|i| i as f64 * 2.0).collect());
        let r = smooth_outliers(&s, 6, 3.5).unwrap();
        assert!(r.flagged.is_empty());
    }

    #[test]
    fn idempotent_on_spiky_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mut v: Vec<f64> = (0..120)
                .map(|i| 50.0 + 10.0 * (i as f64 * 0.2).sin() + rng.gen::<f64>())
                .collect();
            v[40] += 500.0;
            v[90] -= 300.0;
            let once = smooth_outliers(&ts(v), 6, 3.5).unwrap();
            let twice = smooth_outliers(&once.series, 6, 3.5).unwrap();
            assert_eq!(once.series.values, twice.series.values);
        }
    }
}
