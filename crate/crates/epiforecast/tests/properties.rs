//! Randomized property sweeps over the metric, the differencing operators,
//! and the sliding-window construction.

use proptest::prelude::*;

use epiforecast::eval::smape;
use epiforecast::series::{
    difference, inverse_difference, seasonal_difference, sliding_window, undifference_forecasts,
    TimeSeries,
};

fn finite_vec(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6f64..1e6, 1..=max_len)
}

proptest! {
    #[test]
    fn smape_symmetric_and_bounded(pair in finite_vec(20).prop_flat_map(|a| {
        let n = a.len();
        (Just(a), prop::collection::vec(-1e6f64..1e6, n))
    })) {
        let (a, f) = pair;
        let v = smape(&a, &f).unwrap();
        let sym = smape(&f, &a).unwrap();
        prop_assert!((0.0..=200.0).contains(&v));
        prop_assert!((v - sym).abs() < 1e-9);
    }

    #[test]
    fn smape_scale_invariant(
        pair in finite_vec(20).prop_flat_map(|a| {
            let n = a.len();
            (Just(a), prop::collection::vec(-1e6f64..1e6, n))
        }),
        c in 1e-3f64..1e3,
    ) {
        let (a, f) = pair;
        let v = smape(&a, &f).unwrap();
        let ca: Vec<f64> = a.iter().map(|x| c * x).collect();
        let cf: Vec<f64> = f.iter().map(|x| c * x).collect();
        prop_assert!((smape(&ca, &cf).unwrap() - v).abs() < 1e-9 * v.max(1.0));
    }

    #[test]
    fn difference_roundtrip(values in prop::collection::vec(-1e5f64..1e5, 4..60), d in 1usize..=3) {
        let s = TimeSeries::from_values(values.clone());
        if s.len() > d {
            let diff = difference(&s, d).unwrap();
            let back = inverse_difference(&diff, &values[..d], d).unwrap();
            for (a, b) in back.values.iter().zip(&values) {
                prop_assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn seasonal_difference_inverts_via_forecast_path(
        values in prop::collection::vec(-1e5f64..1e5, 16..60),
    ) {
        // Differencing then re-accumulating the tail reproduces the tail.
        let period = 7;
        let s = TimeSeries::from_values(values.clone());
        let diff = seasonal_difference(&s, 1, period).unwrap();
        let split = values.len() - 4;
        let base = &values[..split];
        let tail_diff: Vec<f64> = diff.values[split - period..].to_vec();
        let rebuilt = undifference_forecasts(&tail_diff, base, period);
        for (a, b) in rebuilt.iter().zip(&values[split..]) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn sliding_window_shape_and_content(
        values in prop::collection::vec(-1e4f64..1e4, 8..80),
        p in 1usize..=5,
        k in 1usize..=4,
    ) {
        let s = TimeSeries::from_values(values.clone());
        let n = s.len();
        if n >= p + k {
            let lm = sliding_window(&s, p, k).unwrap();
            prop_assert_eq!(lm.rows(), n - p - k + 1);
            for (i, (input, target)) in lm.inputs.iter().zip(&lm.targets).enumerate() {
                prop_assert_eq!(input.len(), p + 1);
                prop_assert_eq!(target.len(), k);
                // lags, then the time index of the first target
                for j in 0..p {
                    prop_assert_eq!(input[j], values[i + j]);
                }
                prop_assert_eq!(input[p], (i + p) as f64);
                for j in 0..k {
                    prop_assert_eq!(target[j], values[i + p + j]);
                }
            }
        } else {
            prop_assert!(sliding_window(&s, p, k).is_err());
        }
    }
}
