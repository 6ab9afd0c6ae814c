//! Time-series forecasting toolkit for epidemic count data.
//!
//! The pieces, roughly in pipeline order:
//!
//! - [`ingest`] — parsing and validation of the 18-column national tracking
//!   CSV, extraction of modeling series;
//! - [`series`] — the [`series::TimeSeries`] type, differencing, lag
//!   matrices;
//! - [`acf`] — autocorrelations, partial autocorrelations, white-noise
//!   diagnostics;
//! - [`preprocess`] — local-level smoothing and outlier replacement;
//! - [`models`] — random walk, SES, Yule-Walker AR, CSS-fitted
//!   ARIMA/SARIMA, lagged regression, VAR, and simulators for them;
//! - [`epi`] — an SEI²RD compartmental simulator with least-squares
//!   calibration;
//! - [`neural`] — a two-hidden-layer MLP and a GRU forecaster, trained from
//!   scratch with ADAM on a floored MAPE loss;
//! - [`augment`] — SARIMA-forecast interleaving that doubles a series to
//!   2n−1 points;
//! - [`eval`] — rolling-origin multi-horizon backtesting, sMAPE, order
//!   search, report formatting;
//! - [`synth`] — a seeded synthetic dataset generator for demos and tests;
//! - [`optim`] — the Nelder-Mead simplex minimiser used by the fitters.

pub mod acf;
pub mod augment;
pub mod epi;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod models;
pub mod neural;
pub mod optim;
pub mod preprocess;
pub mod series;
pub mod synth;

pub use error::{Error, Result};
pub use series::TimeSeries;
