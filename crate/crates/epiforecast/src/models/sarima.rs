//! (Seasonal) ARIMA estimation by conditional sum of squares.
//!
//! Seasonal differencing is applied first, then regular differencing, then the
//! multiplicative AR and MA polynomials are expanded into equivalent long
//! non-seasonal polynomials and an ARMA recursion is fitted on the differenced
//! scale by minimising the sum of squared one-step residuals (initial shocks
//! zero) with Nelder-Mead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{aic, fit_ar_yule_walker, ModelOrder};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::series::{difference, seasonal_difference, undifference_forecasts, TimeSeries};

/// A fitted (seasonal) ARIMA model.
///
/// Coefficients follow the recursion sign convention: on the differenced scale
/// w_t = delta + sum_i a_i w_{t-i} + sum_j b_j eps_{t-j} + eps_t, where a and b
/// are the expanded products of the non-seasonal and seasonal polynomials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarimaModel {
    pub order: ModelOrder,
    /// Intercept on the differenced scale; fixed at 0 whenever d + D > 0.
    pub intercept: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub seasonal_phi: Vec<f64>,
    pub seasonal_theta: Vec<f64>,
    pub sigma2: f64,
    /// Achieved conditional sum of squares.
    pub css: f64,
    /// Gaussian CSS log-likelihood proxy: -n/2 ln(sse/n).
    pub loglik_proxy: f64,
    pub aic: f64,
    pub converged: bool,
}

/// Expand the multiplicative AR product (1 - sum phi_i B^i)(1 - sum Phi_k B^{ks})
/// into recursion coefficients a_j (a_j multiplies w_{t-j}).
pub fn expand_ar_polynomial(phi: &[f64], seasonal_phi: &[f64], s: usize) -> Vec<f64> {
    let len = phi.len() + seasonal_phi.len() * s;
    let mut a = vec![0.0; len];
    for (i, c) in phi.iter().enumerate() {
        a[i] += c;
    }
    for (k, cs) in seasonal_phi.iter().enumerate() {
        let lag = (k + 1) * s;
        a[lag - 1] += cs;
        for (i, c) in phi.iter().enumerate() {
            a[lag + i] -= c * cs;
        }
    }
    a
}

/// Expand the multiplicative MA product (1 + sum theta_j B^j)(1 + sum Theta_k B^{ks}).
pub fn expand_ma_polynomial(theta: &[f64], seasonal_theta: &[f64], s: usize) -> Vec<f64> {
    let len = theta.len() + seasonal_theta.len() * s;
    let mut b = vec![0.0; len];
    for (j, c) in theta.iter().enumerate() {
        b[j] += c;
    }
    for (k, cs) in seasonal_theta.iter().enumerate() {
        let lag = (k + 1) * s;
        b[lag - 1] += cs;
        for (j, c) in theta.iter().enumerate() {
            b[lag + j] += c * cs;
        }
    }
    b
}

/// One-step residuals of the ARMA recursion on `w`, with shocks before the AR
/// memory set to zero. Returns (residuals aligned with w, start index, sse).
fn css_residuals(w: &[f64], delta: f64, a: &[f64], b: &[f64]) -> (Vec<f64>, usize, f64) {
    let t0 = a.len();
    let n = w.len();
    let mut eps = vec![0.0; n];
    let mut sse = 0.0;
    for t in t0..n {
        let mut pred = delta;
        for (i, c) in a.iter().enumerate() {
            pred += c * w[t - 1 - i];
        }
        for (j, c) in b.iter().enumerate() {
            if t >= t0 + j + 1 {
                pred += c * eps[t - 1 - j];
            }
        }
        eps[t] = w[t] - pred;
        sse += eps[t] * eps[t];
    }
    (eps, t0, sse)
}

struct ParamLayout {
    has_intercept: bool,
    p: usize,
    q: usize,
    bp: usize,
    bq: usize,
}

impl ParamLayout {
    fn pack(&self, m: &SarimaModel) -> Vec<f64> {
        let mut x = Vec::new();
        if self.has_intercept {
            x.push(m.intercept);
        }
        x.extend(&m.phi);
        x.extend(&m.theta);
        x.extend(&m.seasonal_phi);
        x.extend(&m.seasonal_theta);
        x
    }

    fn unpack(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut i = 0;
        let delta = if self.has_intercept {
            i += 1;
            x[0]
        } else {
            0.0
        };
        let phi = x[i..i + self.p].to_vec();
        i += self.p;
        let theta = x[i..i + self.q].to_vec();
        i += self.q;
        let bphi = x[i..i + self.bp].to_vec();
        i += self.bp;
        let btheta = x[i..i + self.bq].to_vec();
        (delta, phi, theta, bphi, btheta)
    }
}

/// Apply the model's differencing to a series, returning every intermediate
/// level (index 0 = original, last = fully differenced).
fn difference_levels(s: &TimeSeries, order: &ModelOrder) -> Result<Vec<TimeSeries>> {
    let mut levels = vec![s.clone()];
    for _ in 0..order.seasonal_d {
        let next = seasonal_difference(levels.last().unwrap(), 1, order.s_period)?;
        levels.push(next);
    }
    for _ in 0..order.d {
        let next = difference(levels.last().unwrap(), 1)?;
        levels.push(next);
    }
    Ok(levels)
}

/// Fit a non-seasonal ARIMA(p,d,q) by conditional sum of squares.
pub fn fit_arima(s: &TimeSeries, order: ModelOrder) -> Result<SarimaModel> {
    if order.is_seasonal() {
        return Err(Error::InvalidArgument(
            "fit_arima requires P = D = Q = 0; use fit_sarima".into(),
        ));
    }
    fit_sarima(s, order)
}

/// Fit a multiplicative SARIMA(p,d,q)x(P,D,Q)_s by conditional sum of squares.
pub fn fit_sarima(s: &TimeSeries, order: ModelOrder) -> Result<SarimaModel> {
    order.validate()?;
    let needed = order.seasonal_d * order.s_period
        + order.d
        + 2 * (order.p + order.seasonal_p * order.s_period).max(1)
        + (order.q + order.seasonal_q * order.s_period);
    if s.len() <= needed {
        return Err(Error::InsufficientData {
            needed: needed + 1,
            have: s.len(),
        });
    }

    let levels = difference_levels(s, &order)?;
    let w = levels.last().unwrap().clone();
    let has_intercept = order.d + order.seasonal_d == 0;
    let layout = ParamLayout {
        has_intercept,
        p: order.p,
        q: order.q,
        bp: order.seasonal_p,
        bq: order.seasonal_q,
    };

    // Initial point: phi from Yule-Walker on the differenced series, MA and
    // seasonal coefficients zero, intercept from the implied mean.
    let phi0 = if order.p > 0 {
        match fit_ar_yule_walker(&w, order.p) {
            Ok(m) => m.phi,
            Err(_) => vec![0.0; order.p],
        }
    } else {
        Vec::new()
    };
    let delta0 = if has_intercept {
        w.mean() * (1.0 - phi0.iter().sum::<f64>())
    } else {
        0.0
    };
    let init = SarimaModel {
        order,
        intercept: delta0,
        phi: phi0,
        theta: vec![0.0; order.q],
        seasonal_phi: vec![0.0; order.seasonal_p],
        seasonal_theta: vec![0.0; order.seasonal_q],
        sigma2: 0.0,
        css: 0.0,
        loglik_proxy: 0.0,
        aic: 0.0,
        converged: true,
    };
    let start = layout.pack(&init);

    let objective = |x: &[f64]| -> f64 {
        let (delta, phi, theta, bphi, btheta) = layout.unpack(x);
        let a = expand_ar_polynomial(&phi, &bphi, order.s_period.max(1));
        let b = expand_ma_polynomial(&theta, &btheta, order.s_period.max(1));
        if a.len() >= w.len() {
            return f64::INFINITY;
        }
        let (_, _, sse) = css_residuals(&w.values, delta, &a, &b);
        if sse.is_finite() {
            sse
        } else {
            f64::INFINITY
        }
    };

    let (point, converged) = if start.is_empty() {
        (start.clone(), true)
    } else if layout.p + layout.q + layout.bp + layout.bq == 0 {
        // Intercept-only model has the closed-form solution delta = mean(w).
        (vec![w.mean()], true)
    } else {
        let opts = NelderMeadOptions {
            max_iterations: 2000,
            tolerance: 1e-7,
            initial_step: 0.1,
            restarts: 1,
        };
        let r = nelder_mead(objective, &start, &opts);
        (r.point, r.converged)
    };

    let (delta, phi, theta, bphi, btheta) = layout.unpack(&point);
    let a = expand_ar_polynomial(&phi, &bphi, order.s_period.max(1));
    let b = expand_ma_polynomial(&theta, &btheta, order.s_period.max(1));
    let (_, t0, sse) = css_residuals(&w.values, delta, &a, &b);
    let n_eff = w.len() - t0;
    let sigma2 = if n_eff > 0 { sse / n_eff as f64 } else { 0.0 };
    let model_aic = if sse > 0.0 && n_eff > 0 {
        aic(sse, n_eff, order.n_params())?
    } else {
        f64::NEG_INFINITY
    };
    Ok(SarimaModel {
        order,
        intercept: delta,
        phi,
        theta,
        seasonal_phi: bphi,
        seasonal_theta: btheta,
        sigma2,
        css: sse,
        loglik_proxy: if n_eff > 0 && sse > 0.0 {
            -(n_eff as f64) / 2.0 * (sse / n_eff as f64).ln()
        } else {
            0.0
        },
        aic: model_aic,
        converged,
    })
}

impl SarimaModel {
    fn expanded(&self) -> (Vec<f64>, Vec<f64>) {
        (
            expand_ar_polynomial(&self.phi, &self.seasonal_phi, self.order.s_period.max(1)),
            expand_ma_polynomial(&self.theta, &self.seasonal_theta, self.order.s_period.max(1)),
        )
    }

    /// Minimum history length needed to forecast.
    pub fn min_history(&self) -> usize {
        let (a, _) = self.expanded();
        self.order.d + self.order.seasonal_d * self.order.s_period + a.len() + 1
    }

    /// In-sample one-step predictions aligned with `s`; `None` where the
    /// recursion has no residual (differencing offset plus AR memory).
    pub fn in_sample_one_step(&self, s: &TimeSeries) -> Result<Vec<Option<f64>>> {
        let levels = difference_levels(s, &self.order)?;
        let w = levels.last().unwrap();
        let (a, b) = self.expanded();
        let (eps, t0, _) = css_residuals(&w.values, self.intercept, &a, &b);
        let offset = s.len() - w.len();
        let mut out = vec![None; s.len()];
        for (tw, e) in eps.iter().enumerate().skip(t0) {
            out[tw + offset] = Some(s.values[tw + offset] - e);
        }
        Ok(out)
    }
}

/// Iterated multi-horizon forecast on the differenced scale with future shocks
/// zero, then inversion of the differencing anchored on the history.
pub fn forecast_sarima(m: &SarimaModel, history: &TimeSeries, h: usize) -> Result<Vec<f64>> {
    if history.len() < m.min_history() {
        return Err(Error::InsufficientData {
            needed: m.min_history(),
            have: history.len(),
        });
    }
    let levels = difference_levels(history, &m.order)?;
    let w = levels.last().unwrap();
    let (a, b) = m.expanded();
    let (eps, t0, _) = css_residuals(&w.values, m.intercept, &a, &b);
    let _ = t0;

    let n = w.len();
    let mut extended = w.values.clone();
    let mut forecasts = Vec::with_capacity(h);
    for step in 0..h {
        let t = n + step;
        let mut pred = m.intercept;
        for (i, c) in a.iter().enumerate() {
            pred += c * extended[t - 1 - i];
        }
        for (j, c) in b.iter().enumerate() {
            let idx = t as i64 - 1 - j as i64;
            // Future shocks are zero; past shocks come from the CSS pass.
            if idx >= 0 && (idx as usize) < n {
                pred += c * eps[idx as usize];
            }
        }
        extended.push(pred);
        forecasts.push(pred);
    }

    // Invert regular differencing first (it was applied last), then seasonal.
    let mut f = forecasts;
    let total_levels = levels.len();
    let regular_levels = m.order.d;
    for li in (0..total_levels - 1).rev() {
        let period = if li >= total_levels - 1 - regular_levels {
            1
        } else {
            m.order.s_period
        };
        f = undifference_forecasts(&f, &levels[li].values, period);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::simulate::{simulate_ar, simulate_arma, simulate_seasonal_ar};
    use crate::models::{fit_ar_yule_walker, rw_forecast};

    #[test]
    fn polynomial_expansion_by_hand() {
        // (1 - 0.5B)(1 - 0.4B^7) = 1 - 0.5B - 0.4B^7 + 0.2B^8
        // recursion form: a_1 = 0.5, a_7 = 0.4, a_8 = -0.2
        let a = expand_ar_polynomial(&[0.5], &[0.4], 7);
        assert_eq!(a.len(), 8);
        assert!((a[0] - 0.5).abs() < 1e-15);
        assert!((a[6] - 0.4).abs() < 1e-15);
        assert!((a[7] + 0.2).abs() < 1e-15);
        for (i, v) in a.iter().enumerate() {
            if ![0, 6, 7].contains(&i) {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn ma_expansion_sign() {
        // (1 + 0.3B)(1 + 0.2B^7) = 1 + 0.3B + 0.2B^7 + 0.06B^8
        let b = expand_ma_polynomial(&[0.3], &[0.2], 7);
        assert!((b[0] - 0.3).abs() < 1e-15);
        assert!((b[6] - 0.2).abs() < 1e-15);
        assert!((b[7] - 0.06).abs() < 1e-15);
    }

    #[test]
    fn arima_100_agrees_with_yule_walker() {
        let s = simulate_ar(&[0.6], 5.0, 5000, 11);
        let yw = fit_ar_yule_walker(&s, 1).unwrap();
        let css = fit_arima(&s, ModelOrder::arima(1, 0, 0)).unwrap();
        assert!(
            (yw.phi[0] - css.phi[0]).abs() < 0.05,
            "yw {} vs css {}",
            yw.phi[0],
            css.phi[0]
        );
    }

    #[test]
    fn arima_010_is_random_walk() {
        let s = simulate_ar(&[0.4], 2.0, 300, 3);
        let m = fit_arima(&s, ModelOrder::arima(0, 1, 0)).unwrap();
        let f = forecast_sarima(&m, &s, 5).unwrap();
        assert_eq!(f, rw_forecast(&s, 5).unwrap());
    }

    #[test]
    fn ma1_recovery() {
        let s = simulate_arma(&[], &[0.5], 0.0, 5000, 21);
        let m = fit_arima(&s, ModelOrder::arima(0, 0, 1)).unwrap();
        assert!((0.42..=0.58).contains(&m.theta[0]), "{}", m.theta[0]);
    }

    #[test]
    fn degenerate_seasonal_equals_arima() {
        let s = simulate_arma(&[0.5], &[0.2], 1.0, 600, 5);
        let a = fit_arima(&s, ModelOrder::arima(1, 0, 1)).unwrap();
        let b = fit_sarima(&s, ModelOrder::sarima(1, 0, 1, 0, 0, 0, 7)).unwrap();
        assert_eq!(a.phi, b.phi);
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.intercept, b.intercept);
        let fa = forecast_sarima(&a, &s, 10).unwrap();
        let fb = forecast_sarima(&b, &s, 10).unwrap();
        assert_eq!(fa, fb);
    }

    #[test]
    fn seasonal_ar_recovery() {
        let s = simulate_seasonal_ar(0.6, 7, 0.0, 5000, 31);
        let m = fit_sarima(&s, ModelOrder::sarima(0, 0, 0, 1, 0, 0, 7)).unwrap();
        assert!(
            (0.5..=0.7).contains(&m.seasonal_phi[0]),
            "{}",
            m.seasonal_phi[0]
        );
    }

    #[test]
    fn zero_coefficient_model_forecasts_intercept() {
        let s = simulate_ar(&[], 3.0, 200, 9);
        let m = fit_arima(&s, ModelOrder::arima(0, 0, 0)).unwrap();
        let f = forecast_sarima(&m, &s, 4).unwrap();
        for v in f {
            assert!((v - m.intercept).abs() < 1e-12);
        }
        assert!((m.intercept - s.mean()).abs() < 1e-12);
    }

    #[test]
    fn insample_one_step_consistent_with_css() {
        let s = simulate_arma(&[0.6], &[0.3], 10.0, 400, 17);
        let m = fit_arima(&s, ModelOrder::arima(1, 0, 1)).unwrap();
        let preds = m.in_sample_one_step(&s).unwrap();
        // Recompute SSE from the reported predictions; must equal the fit's CSS.
        let sse: f64 = preds
            .iter()
            .enumerate()
            .filter_map(|(t, p)| p.map(|p| (s.values[t] - p).powi(2)))
            .sum();
        assert!((sse - m.css).abs() < 1e-6 * m.css.max(1.0));
    }

    #[test]
    fn one_step_forecast_matches_recursion() {
        // Forecast at h=1 from a truncated history equals the in-sample
        // one-step prediction at that position.
        let s = simulate_arma(&[0.5], &[0.2], 5.0, 300, 23);
        let m = fit_arima(&s, ModelOrder::arima(1, 0, 1)).unwrap();
        let preds = m.in_sample_one_step(&s).unwrap();
        for t in [100usize, 200, 299] {
            let hist = s.slice(0, t);
            let f = forecast_sarima(&m, &hist, 1).unwrap();
            let expected = preds[t].unwrap();
            assert!(
                (f[0] - expected).abs() < 1e-9,
                "t={t}: {} vs {expected}",
                f[0]
            );
        }
    }

    #[test]
    fn seasonal_differencing_roundtrip_in_forecast() {
        // d=1 and no coefficients: forecasts on the original scale are flat (RW).
        let s = simulate_ar(&[0.3], 50.0, 300, 40);
        let m = fit_sarima(&s, ModelOrder::sarima(0, 1, 0, 0, 0, 0, 0)).unwrap();
        let f = forecast_sarima(&m, &s, 7).unwrap();
        for v in &f {
            assert!((v - s.values.last().unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn translation_equivariance() {
        let s = simulate_arma(&[0.5], &[0.0], 20.0, 400, 55);
        let shifted = TimeSeries::from_values(s.values.iter().map(|v| v + 100.0).collect());
        let m1 = fit_arima(&s, ModelOrder::arima(1, 0, 0)).unwrap();
        let m2 = fit_arima(&shifted, ModelOrder::arima(1, 0, 0)).unwrap();
        let f1 = forecast_sarima(&m1, &s, 5).unwrap();
        let f2 = forecast_sarima(&m2, &shifted, 5).unwrap();
        for (a, b) in f1.iter().zip(&f2) {
            assert!((b - a - 100.0).abs() < 0.5, "{a} vs {b}");
        }
    }

    #[test]
    fn aic_prefers_true_arima_order() {
        // Order selection sanity on simulated ARIMA(3,1,2): the true order's AIC
        // should be competitive (within the top of a small grid) most of the time.
        let mut wins = 0;
        let trials = 10;
        for seed in 0..trials {
            let z = simulate_arma(&[0.6, -0.3, 0.2], &[0.4, 0.25], 0.0, 1200, 700 + seed);
            // integrate once
            let mut y = vec![0.0];
            for v in &z.values {
                y.push(y.last().unwrap() + v);
            }
            let s = TimeSeries::from_values(y);
            let mut best = f64::INFINITY;
            let mut aic_true = f64::INFINITY;
            for p in 0..=4usize {
                for q in 0..=3usize {
                    if p + q == 0 {
                        continue;
                    }
                    if let Ok(m) = fit_arima(&s, ModelOrder::arima(p, 1, q)) {
                        best = best.min(m.aic);
                        if p == 3 && q == 2 {
                            aic_true = m.aic;
                        }
                    }
                }
            }
            // Exact argmin recovery is noisy under CSS; what AIC must deliver is
            // that the true order stays competitive with the grid's best.
            if aic_true - best <= 8.0 {
                wins += 1;
            }
        }
        assert!(wins >= 8, "true order competitive in only {wins}/{trials} trials");
    }
}
