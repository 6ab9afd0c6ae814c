//! Per-horizon order search: backtest SARIMA(p,0,0)(3,1,1)_7 over a grid of
//! p and report the best order for each horizon, next to the random walk.

use epiforecast::eval::{evaluate, format_table, order_search, rolling_validate, ModelFamily, RollingConfig};
use epiforecast::models::ModelOrder;
use epiforecast::synth::{generate_deaths_series, SynthConfig};

fn main() -> epiforecast::Result<()> {
    let s = generate_deaths_series(&SynthConfig {
        days: 180,
        seed: 11,
        ..Default::default()
    })?;
    let cfg = RollingConfig {
        max_horizon: 7,
        ..Default::default()
    };

    let rw = evaluate(&rolling_validate(&ModelFamily::rw(), &s, &cfg)?, "RW");

    // Small grid to keep the example quick; the full study uses p = 1..22.
    let sarima = order_search(
        "SARIMA",
        |p| ModelFamily::sarima(ModelOrder::sarima(p, 0, 0, 3, 1, 1, 7)),
        &s,
        &cfg,
        1..=4,
    )?;

    println!("{}", format_table(&[rw, sarima]));
    println!("(sMAPE per horizon; the parenthesised number is the selected p)");
    Ok(())
}
