//! Thin command-line front end over the epiforecast library: ingestion,
//! preprocessing, model fitting and forecasting, backtesting, augmentation,
//! epidemic simulation, and report assembly.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
//! The environment variable `PFB_SEED` overrides any configured seed.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use epiforecast::augment::augment;
use epiforecast::epi::{
    calibrate, daily_deaths, simulate, trajectory_to_csv, CalibrationBounds, CompartmentState,
    EpiParams,
};
use epiforecast::error::{Error, Result};
use epiforecast::eval::{
    evaluate, format_table, improvement_report, order_search, rolling_validate, EvaluationReport,
    ModelFamily, RollingConfig,
};
use epiforecast::ingest::{extract_series, parse_csv, write_csv, Dataset, COLUMNS};
use epiforecast::models::baseline::SesAlpha;
use epiforecast::models::sarima::{fit_arima, fit_sarima, forecast_sarima};
use epiforecast::models::ModelOrder;
use epiforecast::neural::TrainConfig;
use epiforecast::preprocess::smooth_outliers;
use epiforecast::series::TimeSeries;
use epiforecast::synth::{generate_dataset, SynthConfig};

#[derive(Parser)]
#[command(name = "epiforecast", version, about = "Epidemic time-series forecasting toolkit")]
struct Cli {
    /// Flat TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a dataset, cache the canonical CSV.
    Ingest(CommonArgs),
    /// Outlier smoothing via the local-level smoother.
    Preprocess(PreprocessArgs),
    /// Fit one model and print its summary as JSON.
    Fit(FitArgs),
    /// Fit one model and print multi-horizon forecasts.
    Forecast(ForecastArgs),
    /// Rolling-origin backtest; writes report.json, table.txt, forecasts.csv,
    /// plotdata.csv.
    Evaluate(EvaluateArgs),
    /// Interleave SARIMA one-step forecasts into the series (2n-1 points).
    Augment(CommonArgs),
    /// Run the compartmental simulator, optionally calibrating first.
    SimulateEpi(SimulateArgs),
    /// Combine saved report.json files into one text table.
    Report(ReportArgs),
}

/// Flags shared by every data-reading command. `None` means "not given":
/// the config file, then the default, fills it in.
#[derive(Args, Clone, Default, Serialize, Deserialize)]
struct CommonArgs {
    /// Input CSV path, or `synth:<seed>` for a generated dataset.
    #[arg(long)]
    input: Option<String>,
    /// Target column of the national schema.
    #[arg(long)]
    column: Option<String>,
    /// Leading rows to drop before modeling.
    #[arg(long)]
    trim: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
struct PreprocessArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Rolling-mean window for outlier detection.
    #[arg(long)]
    outlier_window: Option<usize>,
    /// Flag threshold in local standard deviations.
    #[arg(long)]
    k_sigma: Option<f64>,
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// rw | ses | ar | arima | sarima | nn | gru
    #[arg(long)]
    model: Option<String>,
    /// Order as p,d,q or p,d,q,P,D,Q,s (ar takes just p).
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    lags: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
struct ForecastArgs {
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long)]
    horizon: Option<usize>,
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
struct EvaluateArgs {
    #[command(flatten)]
    fit: FitArgs,
    /// Order grid `lo..hi` for grid-searched families.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Refit cadence kt.
    #[arg(long)]
    retrain_every: Option<usize>,
    #[arg(long)]
    max_horizon: Option<usize>,
    /// Upper bound on evaluation workers. The refit chain is sequential by
    /// construction (a failed refit reuses the previous model), so this caps
    /// rather than sets parallelism; 1 forces fully sequential runs.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    alpha: Option<f64>,
    /// q1,q2,q3,q4,q5
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    population: Option<f64>,
    #[arg(long)]
    days: Option<usize>,
    /// Initial S,E,I,IH,R,D.
    #[arg(long)]
    init: Option<String>,
    /// Calibrate (alpha, q1..q5) against the input deaths series first.
    #[arg(long, default_value_t = false)]
    calibrate: bool,
}

#[derive(Args, Clone)]
struct ReportArgs {
    /// report.json files to combine.
    #[arg(long, value_delimiter = ',')]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let file_cfg = match cli.config.as_deref().map(load_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => fail(&e),
    };
    let result = match cli.command {
        Command::Ingest(a) => cmd_ingest(merge_common(a, &file_cfg)),
        Command::Preprocess(a) => cmd_preprocess(a, &file_cfg),
        Command::Fit(a) => cmd_fit(a, &file_cfg).map(|s| println!("{s}")),
        Command::Forecast(a) => cmd_forecast(a, &file_cfg),
        Command::Evaluate(a) => cmd_evaluate(a, &file_cfg),
        Command::Augment(a) => cmd_augment(merge_common(a, &file_cfg)),
        Command::SimulateEpi(a) => cmd_simulate_epi(a, &file_cfg),
        Command::Report(a) => cmd_report(a),
    };
    if let Err(e) = result {
        fail(&e);
    }
}

fn fail(e: &Error) -> ! {
    eprintln!("epiforecast: {e}");
    std::process::exit(e.exit_code());
}

/// Flat key-value config document; every key matches a long flag name.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<String>,
    column: Option<String>,
    trim: Option<usize>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
    outlier_window: Option<usize>,
    k_sigma: Option<f64>,
    model: Option<String>,
    order: Option<String>,
    lags: Option<usize>,
    hidden: Option<usize>,
    epochs: Option<usize>,
    horizon: Option<usize>,
    grid: Option<String>,
    train_fraction: Option<f64>,
    retrain_every: Option<usize>,
    max_horizon: Option<usize>,
    jobs: Option<usize>,
}

fn load_config(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    toml::from_str(&text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
}

fn merge_common(a: CommonArgs, f: &FileConfig) -> CommonArgs {
    let seed = std::env::var("PFB_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .or(a.seed)
        .or(f.seed);
    CommonArgs {
        input: a.input.or_else(|| f.input.clone()),
        column: a.column.or_else(|| f.column.clone()),
        trim: a.trim.or(f.trim),
        out_dir: a.out_dir.or_else(|| f.out_dir.clone()),
        seed,
    }
}

fn merge_fit(a: FitArgs, f: &FileConfig) -> FitArgs {
    FitArgs {
        common: merge_common(a.common, f),
        model: a.model.or_else(|| f.model.clone()),
        order: a.order.or_else(|| f.order.clone()),
        lags: a.lags.or(f.lags),
        hidden: a.hidden.or(f.hidden),
        epochs: a.epochs.or(f.epochs),
    }
}

fn load_dataset(common: &CommonArgs) -> Result<Dataset> {
    let input = common
        .input
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--input is required".into()))?;
    if let Some(seed) = input.strip_prefix("synth:") {
        let seed = seed
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad synthetic seed `{seed}`")))?;
        return generate_dataset(&SynthConfig {
            seed,
            ..Default::default()
        });
    }
    parse_csv(input)
}

fn load_series(common: &CommonArgs) -> Result<TimeSeries> {
    let ds = load_dataset(common)?;
    let column = common.column.as_deref().unwrap_or("deathIncrease");
    if !COLUMNS.contains(&column) {
        return Err(Error::InvalidArgument(format!(
            "unknown column `{column}`; valid columns: {}",
            COLUMNS.join(", ")
        )));
    }
    extract_series(&ds, column, common.trim.unwrap_or(0))
}

fn out_dir(common: &CommonArgs) -> Result<PathBuf> {
    let dir = common.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    Ok(dir)
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reproducibility echo: the fully-merged settings the run actually used.
/// Unset options are dropped (TOML has no null).
fn echo_config(dir: &Path, settings: &impl Serialize) -> Result<()> {
    let mut value = serde_json::to_value(settings)
        .map_err(|e| Error::InvalidArgument(format!("config echo: {e}")))?;
    if let serde_json::Value::Object(map) = &mut value {
        map.retain(|_, v| !v.is_null());
    }
    let text = toml::to_string_pretty(&value)
        .map_err(|e| Error::InvalidArgument(format!("config echo: {e}")))?;
    write_out(dir, "config.echo.toml", &text)
}

fn parse_order(text: Option<&str>, model: &str) -> Result<ModelOrder> {
    let text = text.ok_or_else(|| Error::InvalidArgument("--order is required".into()))?;
    let nums: Vec<usize> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad order component `{t}`")))
        })
        .collect::<Result<_>>()?;
    let order = match (model, nums.as_slice()) {
        ("ar", [p]) => ModelOrder::arima(*p, 0, 0),
        ("arima", [p, d, q]) => ModelOrder::arima(*p, *d, *q),
        ("sarima", [p, d, q, bp, bd, bq, s]) => ModelOrder::sarima(*p, *d, *q, *bp, *bd, *bq, *s),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "order `{text}` does not fit model `{model}`"
            )))
        }
    };
    order.validate()?;
    Ok(order)
}

fn cmd_ingest(common: CommonArgs) -> Result<()> {
    let ds = load_dataset(&common)?;
    let series = load_series(&common)?;
    let dir = out_dir(&common)?;
    let cache = dir.join("canonical.csv");
    write_csv(&ds, &cache)?;
    echo_config(&dir, &common)?;
    println!(
        "rows: {}\npoints after trim: {}\nspan: {} .. {}\nwarnings: {}\ncached: {}",
        ds.len(),
        series.len(),
        series.date_at(0),
        series.date_at(series.len() - 1),
        ds.warnings.len(),
        cache.display()
    );
    for w in &ds.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

fn cmd_preprocess(args: PreprocessArgs, f: &FileConfig) -> Result<()> {
    let common = merge_common(args.common, f);
    let window = args.outlier_window.or(f.outlier_window).unwrap_or(6);
    let k_sigma = args.k_sigma.or(f.k_sigma).unwrap_or(3.5);
    let s = load_series(&common)?;
    let result = smooth_outliers(&s, window, k_sigma)?;
    let dir = out_dir(&common)?;
    let mut csv = String::from("date,raw,smoothed,flagged\n");
    for i in 0..s.len() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            s.date_at(i),
            s.values[i],
            result.series.values[i],
            result.flagged.contains(&i)
        ));
    }
    write_out(&dir, "smoothed.csv", &csv)?;
    echo_config(&dir, &common)?;
    println!(
        "points: {}\noutliers replaced: {}\nwritten: {}",
        s.len(),
        result.flagged.len(),
        dir.join("smoothed.csv").display()
    );
    Ok(())
}

fn cmd_fit(args: FitArgs, f: &FileConfig) -> Result<String> {
    let args = merge_fit(args, f);
    let s = load_series(&args.common)?;
    let model = args.model.as_deref().unwrap_or("rw");
    let summary = match model {
        "rw" => serde_json::json!({"model": "rw", "n": s.len()}),
        "ses" => {
            let fc = epiforecast::models::baseline::ses_fit_forecast(&s, SesAlpha::Auto, 1)?;
            serde_json::json!({"model": "ses", "n": s.len(), "one_step": fc[0]})
        }
        "ar" => {
            let order = parse_order(args.order.as_deref(), "ar")?;
            let m = epiforecast::models::ar::fit_ar_yule_walker(&s, order.p)?;
            serde_json::to_value(&m).map_err(|e| Error::Numerical(e.to_string()))?
        }
        "arima" => {
            let order = parse_order(args.order.as_deref(), "arima")?;
            let m = fit_arima(&s, order)?;
            serde_json::to_value(&m).map_err(|e| Error::Numerical(e.to_string()))?
        }
        "sarima" => {
            let order = parse_order(args.order.as_deref(), "sarima")?;
            let m = fit_sarima(&s, order)?;
            serde_json::to_value(&m).map_err(|e| Error::Numerical(e.to_string()))?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown model `{other}` (rw, ses, ar, arima, sarima)"
            )))
        }
    };
    serde_json::to_string_pretty(&summary).map_err(|e| Error::Numerical(e.to_string()))
}

fn cmd_forecast(args: ForecastArgs, f: &FileConfig) -> Result<()> {
    let horizon = args.horizon.or(f.horizon).unwrap_or(14);
    let fit_args = merge_fit(args.fit, f);
    let s = load_series(&fit_args.common)?;
    let model = fit_args.model.as_deref().unwrap_or("rw");
    let forecasts: Vec<f64> = match model {
        "rw" => epiforecast::models::baseline::rw_forecast(&s, horizon)?,
        "ses" => epiforecast::models::baseline::ses_fit_forecast(&s, SesAlpha::Auto, horizon)?,
        "ar" => {
            let order = parse_order(fit_args.order.as_deref(), "ar")?;
            let m = epiforecast::models::ar::fit_ar_yule_walker(&s, order.p)?;
            epiforecast::models::ar::forecast_ar(&m, &s, horizon)?
        }
        "arima" | "sarima" => {
            let order = parse_order(fit_args.order.as_deref(), model)?;
            let m = fit_sarima(&s, order)?;
            forecast_sarima(&m, &s, horizon)?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown model `{other}` (rw, ses, ar, arima, sarima)"
            )))
        }
    };
    println!("horizon,forecast");
    for (h, v) in forecasts.iter().enumerate() {
        println!("{},{v}", h + 1);
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| Error::InvalidArgument(format!("grid `{text}` is not `lo..hi`")))?;
    let lo = lo
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad grid bound `{lo}`")))?;
    let hi = hi
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad grid bound `{hi}`")))?;
    Ok(lo..=hi)
}

fn cmd_evaluate(args: EvaluateArgs, f: &FileConfig) -> Result<()> {
    if let Some(jobs) = args.jobs.or(f.jobs) {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be >= 1".into()));
        }
    }
    let grid = args.grid.clone().or_else(|| f.grid.clone());
    let cfg = RollingConfig {
        train_fraction: args.train_fraction.or(f.train_fraction).unwrap_or(0.6),
        retrain_every: args.retrain_every.or(f.retrain_every).unwrap_or(5),
        max_horizon: args.max_horizon.or(f.max_horizon).unwrap_or(14),
    };
    let fit_args = merge_fit(args.fit, f);
    let s = load_series(&fit_args.common)?;
    let dir = out_dir(&fit_args.common)?;
    let model = fit_args.model.as_deref().unwrap_or("rw").to_string();
    let seed = fit_args.common.seed.unwrap_or(0);
    let lags = fit_args.lags.unwrap_or(14);
    let hidden = fit_args.hidden.unwrap_or(64);
    let tc = TrainConfig {
        seed,
        epochs: fit_args.epochs.unwrap_or(500),
        ..Default::default()
    };

    let report: EvaluationReport = match model.as_str() {
        "ar" if grid.is_some() => order_search(
            "AR",
            ModelFamily::ar,
            &s,
            &cfg,
            parse_grid(grid.as_deref().unwrap())?,
        )?,
        "sarima" if grid.is_some() => order_search(
            "SARIMA",
            |p| ModelFamily::sarima(ModelOrder::sarima(p, 0, 0, 3, 1, 1, 7)),
            &s,
            &cfg,
            parse_grid(grid.as_deref().unwrap())?,
        )?,
        _ => {
            let (family, eval_cfg) = match model.as_str() {
                "rw" => (ModelFamily::rw(), cfg.clone()),
                "ses" => (ModelFamily::ses(SesAlpha::Auto), cfg.clone()),
                "ar" => {
                    let order = parse_order(fit_args.order.as_deref(), "ar")?;
                    (ModelFamily::ar(order.p), cfg.clone())
                }
                "sarima" | "arima" => {
                    let order = parse_order(fit_args.order.as_deref(), model.as_str())?;
                    (ModelFamily::sarima(order), cfg.clone())
                }
                // Neural families are trained once: no rolling refit.
                "nn" => (
                    ModelFamily::mlp(lags, hidden, cfg.max_horizon, tc.clone()),
                    RollingConfig {
                        retrain_every: usize::MAX,
                        ..cfg.clone()
                    },
                ),
                "gru" => (
                    ModelFamily::gru(lags, cfg.max_horizon, tc.clone()),
                    RollingConfig {
                        retrain_every: usize::MAX,
                        ..cfg.clone()
                    },
                ),
                "augnn" => (
                    ModelFamily::mlp_augmented(lags, hidden, tc.clone()),
                    RollingConfig {
                        retrain_every: usize::MAX,
                        ..cfg.clone()
                    },
                ),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown model `{other}` (rw, ses, ar, arima, sarima, nn, gru, augnn)"
                    )))
                }
            };
            let fm = rolling_validate(&family, &s, &eval_cfg)?;
            let mut buf = Vec::new();
            fm.write_csv(&mut buf)?;
            write_out(&dir, "forecasts.csv", &String::from_utf8_lossy(&buf))?;
            // h=1 forecasts aligned with dates, for external plotting.
            let mut plot = String::from("date,actual,forecast_h1\n");
            for (i, origin) in fm.origins.iter().enumerate() {
                if let (Some(f), Some(a)) = (fm.values[i][0], fm.actuals[i][0]) {
                    plot.push_str(&format!("{},{a},{f}\n", s.date_at(origin + 1)));
                }
            }
            write_out(&dir, "plotdata.csv", &plot)?;
            evaluate(&fm, family.name.clone())
        }
    };

    let json =
        serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))?;
    write_out(&dir, "report.json", &json)?;
    write_out(&dir, "table.txt", &format_table(std::slice::from_ref(&report)))?;
    echo_config(
        &dir,
        &serde_json::json!({
            "input": fit_args.common.input,
            "column": fit_args.common.column,
            "trim": fit_args.common.trim,
            "model": model,
            "grid": grid,
            "seed": seed,
            "lags": lags,
            "hidden": hidden,
            "train_fraction": cfg.train_fraction,
            "retrain_every": cfg.retrain_every,
            "max_horizon": cfg.max_horizon,
        }),
    )?;
    println!("{}", format_table(std::slice::from_ref(&report)));
    println!("written: {}", dir.join("report.json").display());
    Ok(())
}

fn cmd_augment(common: CommonArgs) -> Result<()> {
    let s = load_series(&common)?;
    let aug = augment(&s)?;
    let dir = out_dir(&common)?;
    let mut buf = Vec::new();
    aug.write_csv(&mut buf)?;
    write_out(&dir, "augmented.csv", &String::from_utf8_lossy(&buf))?;
    echo_config(&dir, &common)?;
    println!(
        "original points: {}\naugmented points: {}\nwritten: {}",
        s.len(),
        aug.values.len(),
        dir.join("augmented.csv").display()
    );
    Ok(())
}

fn parse_floats(text: &str, expect: usize, what: &str) -> Result<Vec<f64>> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad {what} component `{t}`")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != expect {
        return Err(Error::InvalidArgument(format!(
            "{what} needs {expect} components, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn cmd_simulate_epi(args: SimulateArgs, f: &FileConfig) -> Result<()> {
    let common = merge_common(args.common, f);
    let dir = out_dir(&common)?;
    let population = args.population.unwrap_or(3.3e8);
    let days = args.days.unwrap_or(200);

    let mut params = EpiParams {
        alpha: args.alpha.unwrap_or(0.2),
        q1: 0.2,
        q2: 0.05,
        q3: 0.08,
        q4: 0.09,
        q5: 0.02,
        population,
    };
    if let Some(q) = args.q.as_deref() {
        let q = parse_floats(q, 5, "q")?;
        [params.q1, params.q2, params.q3, params.q4, params.q5] =
            [q[0], q[1], q[2], q[3], q[4]];
    }
    let init = match args.init.as_deref() {
        Some(text) => {
            let v = parse_floats(text, 6, "init")?;
            CompartmentState {
                susceptible: v[0],
                exposed: v[1],
                infected: v[2],
                hospitalized: v[3],
                recovered: v[4],
                dead: v[5],
            }
        }
        None => CompartmentState {
            susceptible: population - 1000.0,
            exposed: 700.0,
            infected: 250.0,
            hospitalized: 50.0,
            recovered: 0.0,
            dead: 0.0,
        },
    };
    params.validate()?;

    if args.calibrate {
        let observed = load_series(&common)?;
        let bounds = CalibrationBounds::default();
        let outcome = calibrate(&observed, &init, population, &bounds)?;
        params = outcome.params;
        println!(
            "calibrated: alpha={:.4} q=[{:.4},{:.4},{:.4},{:.4},{:.4}] sse={:.4e}",
            params.alpha, params.q1, params.q2, params.q3, params.q4, params.q5, outcome.sse
        );
    }

    let trajectory = simulate(&init, &params, days)?;
    write_out(&dir, "trajectory.csv", &trajectory_to_csv(&trajectory))?;
    echo_config(
        &dir,
        &serde_json::json!({
            "alpha": params.alpha,
            "q": [params.q1, params.q2, params.q3, params.q4, params.q5],
            "population": population,
            "days": days,
        }),
    )?;
    let deaths = daily_deaths(&trajectory);
    println!(
        "days: {days}\nfinal dead: {:.1}\npeak daily deaths: {:.1}\nwritten: {}",
        trajectory.last().unwrap().dead,
        deaths.values.iter().cloned().fold(0.0, f64::max),
        dir.join("trajectory.csv").display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    if args.inputs.is_empty() {
        return Err(Error::InvalidArgument("--inputs is required".into()));
    }
    let mut reports = Vec::new();
    for path in &args.inputs {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let report: EvaluationReport = serde_json::from_str(&text)
            .map_err(|e| Error::Integrity(format!("{}: {e}", path.display())))?;
        reports.push(report);
    }
    let table = format_table(&reports);
    if reports.len() == 2 {
        if let Ok(imp) = improvement_report(&reports[0], &reports[1]) {
            if let (Some(mean), Some(max)) = (imp.mean, imp.max) {
                println!("improvement of {} over {}: mean {mean:.2}%, max {max:.2}%",
                    reports[1].model, reports[0].model);
            }
        }
    }
    if let Some(dir) = args.out_dir {
        fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        write_out(&dir, "table.txt", &table)?;
    }
    println!("{table}");
    Ok(())
}
