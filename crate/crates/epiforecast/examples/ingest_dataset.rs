//! Generate a synthetic national-schema dataset, write it to CSV, parse it
//! back, and extract the daily-deaths modeling series.

use epiforecast::ingest::{extract_series, parse_csv, write_csv};
use epiforecast::synth::{generate_dataset, SynthConfig};

fn main() -> epiforecast::Result<()> {
    let cfg = SynthConfig {
        seed: 42,
        ..Default::default()
    };
    let ds = generate_dataset(&cfg)?;

    let dir = std::env::temp_dir().join("epiforecast-example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("synthetic.csv");
    write_csv(&ds, &path)?;
    println!("wrote {} rows to {}", ds.len(), path.display());

    let parsed = parse_csv(&path)?;
    assert_eq!(parsed.len(), ds.len());
    println!("parsed back {} rows, {} warnings", parsed.len(), parsed.warnings.len());

    // The modeling pipeline drops a 44-day warm-up before fitting.
    let deaths = extract_series(&parsed, "deathIncrease", 44)?;
    println!(
        "deathIncrease: {} points, {} .. {}",
        deaths.len(),
        deaths.date_at(0),
        deaths.date_at(deaths.len() - 1)
    );
    println!(
        "mean {:.1}, max {:.0}",
        deaths.mean(),
        deaths.values.iter().cloned().fold(0.0, f64::max)
    );
    Ok(())
}
