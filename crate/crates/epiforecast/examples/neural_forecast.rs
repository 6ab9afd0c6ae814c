//! Train the two neural forecasters on a synthetic deaths series and compare
//! their direct multi-horizon forecasts against what actually happened.

use epiforecast::neural::{train_gru, train_mlp, TrainConfig};
use epiforecast::series::sliding_window;
use epiforecast::synth::{generate_deaths_series, SynthConfig};

fn main() -> epiforecast::Result<()> {
    let s = generate_deaths_series(&SynthConfig {
        days: 200,
        seed: 9,
        ..Default::default()
    })?;
    let p = 14;
    let k = 7;
    let split = s.len() - k;
    let train = s.slice(0, split);
    let data = sliding_window(&train, p, k)?;

    let tc = TrainConfig {
        epochs: 600,
        seed: 1,
        ..Default::default()
    };

    let mlp = train_mlp(&data, 64, &tc)?;
    println!(
        "MLP: final training MAPE {:.2}%, validation {:.2}%",
        mlp.loss_curve.last().unwrap(),
        mlp.validation_loss.unwrap()
    );

    let gru = train_gru(&data, true, &tc)?;
    println!(
        "GRU: final training MAPE {:.2}%, validation {:.2}%",
        gru.loss_curve.last().unwrap(),
        gru.validation_loss.unwrap()
    );

    let mlp_fc = mlp.predict_multi_horizon(&train)?;
    let gru_fc = gru.predict_multi_horizon(&train)?;
    println!("\nh | actual |    MLP |    GRU");
    for h in 0..k {
        println!(
            "{} | {:6.0} | {:6.0} | {:6.0}",
            h + 1,
            s.values[split + h],
            mlp_fc[h],
            gru_fc[h]
        );
    }
    Ok(())
}
