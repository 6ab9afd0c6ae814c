//! Outlier detection and replacement: spike a clean series, then smooth it
//! with the rolling-window rule backed by the local-level smoother.

use epiforecast::preprocess::{local_level_smooth, smooth_outliers};
use epiforecast::series::TimeSeries;
use epiforecast::synth::{generate_deaths_series, SynthConfig};

fn main() -> epiforecast::Result<()> {
    let mut s = generate_deaths_series(&SynthConfig {
        days: 200,
        seed: 7,
        ..Default::default()
    })?;

    // Inject reporting glitches.
    let spikes = [50, 121, 160];
    for &i in &spikes {
        s.values[i] *= 6.0;
    }

    let result = smooth_outliers(&s, 6, 3.5)?;
    println!("flagged indices: {:?}", result.flagged);
    for &i in &spikes {
        println!(
            "day {i}: raw {:.0} -> smoothed {:.0}",
            s.values[i], result.series.values[i]
        );
    }

    // The state-space smoother on its own, for comparison.
    let smooth = local_level_smooth(&s, 0.1)?;
    let rough = |v: &TimeSeries| -> f64 {
        v.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (v.len() - 1) as f64
    };
    println!(
        "mean |day-to-day change|: raw {:.1}, local-level {:.1}",
        rough(&s),
        rough(&smooth)
    );
    Ok(())
}
