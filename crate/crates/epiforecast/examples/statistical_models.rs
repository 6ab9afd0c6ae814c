//! Fit the statistical family to one series: identification via ACF/PACF,
//! then RW, SES, AR, ARIMA, and SARIMA forecasts side by side.

use epiforecast::acf::{acf, pacf, white_noise_check};
use epiforecast::models::ar::{fit_ar_yule_walker, forecast_ar};
use epiforecast::models::baseline::{rw_forecast, ses_fit_forecast, SesAlpha};
use epiforecast::models::sarima::{fit_sarima, forecast_sarima};
use epiforecast::models::ModelOrder;
use epiforecast::series::{difference, TimeSeries};
use epiforecast::synth::{generate_deaths_series, SynthConfig};

fn main() -> epiforecast::Result<()> {
    let s = generate_deaths_series(&SynthConfig {
        days: 250,
        seed: 3,
        ..Default::default()
    })?;

    // Identification: the weekly cycle shows up at lag 7.
    let a = acf(&s, 14)?;
    println!("acf lags 1,7,14: {:.2}, {:.2}, {:.2} (band {:.2})",
        a.autocorrelations[1], a.autocorrelations[7], a.autocorrelations[14],
        a.confidence_band);
    let p = pacf(&s, 10)?;
    println!("pacf lags 1..3: {:.2}, {:.2}, {:.2}",
        p.autocorrelations[1], p.autocorrelations[2], p.autocorrelations[3]);

    let h = 7;
    println!("\nh=1..{h} forecasts:");
    println!("  RW:     {:?}", round(&rw_forecast(&s, h)?));
    println!("  SES:    {:?}", round(&ses_fit_forecast(&s, SesAlpha::Auto, h)?));

    let ar = fit_ar_yule_walker(&s, 7)?;
    println!("  AR(7):  {:?}  (stationary: {})", round(&forecast_ar(&ar, &s, h)?), ar.stationary);

    let arima = fit_sarima(&s, ModelOrder::arima(2, 1, 1))?;
    println!("  ARIMA(2,1,1): {:?}  aic {:.1}", round(&forecast_sarima(&arima, &s, h)?), arima.aic);

    let sarima = fit_sarima(&s, ModelOrder::sarima(1, 0, 0, 1, 1, 0, 7))?;
    println!("  SARIMA(1,0,0)(1,1,0)_7: {:?}  aic {:.1}",
        round(&forecast_sarima(&sarima, &s, h)?), sarima.aic);

    // Residual diagnostics on the differenced series.
    let diff = difference(&s, 1)?;
    let centered = TimeSeries::from_values(
        diff.values.iter().map(|v| v - diff.mean()).collect(),
    );
    let diag = white_noise_check(&centered, 0.5, 1.96);
    println!("\nfirst difference white-noise check: mean {:.2}, white: {}",
        diag.mean, diag.is_white);
    Ok(())
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 10.0).round() / 10.0).collect()
}
