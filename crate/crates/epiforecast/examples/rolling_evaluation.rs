//! The full rolling-origin backtest: statistical and neural families on one
//! series, the per-horizon sMAPE table, and the augmentation improvement.

use epiforecast::eval::{
    evaluate, format_table, improvement_report, rolling_validate, ModelFamily, RollingConfig,
};
use epiforecast::models::baseline::SesAlpha;
use epiforecast::models::ModelOrder;
use epiforecast::neural::TrainConfig;
use epiforecast::synth::{generate_deaths_series, SynthConfig};

fn main() -> epiforecast::Result<()> {
    let s = generate_deaths_series(&SynthConfig {
        days: 220,
        seed: 2,
        ..Default::default()
    })?;
    let cfg = RollingConfig::default();
    let once = RollingConfig::no_refit();
    let tc = TrainConfig {
        epochs: 300,
        seed: 0,
        ..Default::default()
    };

    let mut reports = vec![
        evaluate(&rolling_validate(&ModelFamily::rw(), &s, &cfg)?, "RW"),
        evaluate(&rolling_validate(&ModelFamily::ses(SesAlpha::Auto), &s, &cfg)?, "SES"),
        evaluate(&rolling_validate(&ModelFamily::ar(7), &s, &cfg)?, "AR(7)"),
        evaluate(
            &rolling_validate(
                &ModelFamily::sarima(ModelOrder::sarima(1, 0, 0, 3, 1, 1, 7)),
                &s,
                &cfg,
            )?,
            "SARIMA",
        ),
    ];
    // Neural families are trained once on the initial window, no refits.
    let nn = evaluate(
        &rolling_validate(&ModelFamily::mlp(14, 32, 14, tc.clone()), &s, &once)?,
        "NN",
    );
    let aug = evaluate(
        &rolling_validate(&ModelFamily::mlp_augmented(14, 32, tc), &s, &once)?,
        "AUG-NN",
    );
    let imp = improvement_report(&nn, &aug)?;
    reports.push(nn);
    reports.push(aug);

    println!("{}", format_table(&reports));
    if let (Some(mean), Some(max)) = (imp.mean, imp.max) {
        println!("augmentation improvement: mean {mean:.2}%, max {max:.2}%");
    }
    Ok(())
}
