//! Seeded synthetic national-dataset generator: an SEI²RD trajectory with
//! weekly reporting artifacts and noise, written into the 18-column schema.
//! Used by the examples and by tests that need realistic data without the
//! real feed.

use std::collections::HashMap;

use chrono::{Datelike, NaiveDate};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::epi::{simulate, CompartmentState, EpiParams};
use crate::error::Result;
use crate::ingest::{CovidRecord, Dataset, Provenance};
use crate::models::simulate::normal_draws;
use crate::series::TimeSeries;

/// Knobs for the generator; defaults give a two-wave deaths series with
/// weekly reporting texture on the national 18-column schema.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub days: usize,
    pub start_date: NaiveDate,
    pub population: f64,
    pub seed: u64,
    /// Multiplicative weekly reporting pattern, index = weekday.
    pub weekly_pattern: [f64; 7],
    /// Relative noise on daily increments.
    pub noise_level: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            days: 420,
            start_date: NaiveDate::from_ymd_opt(2020, 3, 1).unwrap(),
            population: 3.3e8,
            seed: 0,
            weekly_pattern: [0.75, 0.95, 1.05, 1.1, 1.1, 1.05, 1.0],
            noise_level: 0.05,
        }
    }
}

fn epi_trajectory(cfg: &SynthConfig) -> Result<Vec<CompartmentState>> {
    let params = EpiParams {
        alpha: 0.25,
        q1: 0.21,
        q2: 0.05,
        q3: 0.08,
        q4: 0.09,
        q5: 0.015,
        population: cfg.population,
    };
    let state0 = CompartmentState {
        susceptible: cfg.population - 2000.0,
        exposed: 1500.0,
        infected: 400.0,
        hospitalized: 100.0,
        recovered: 0.0,
        dead: 0.0,
    };
    simulate(&state0, &params, cfg.days)
}

/// Day offset of the second epidemic wave.
const SECOND_WAVE_LAG: usize = 160;

/// Superimpose a delayed, damped second wave and a small endemic floor on a
/// single-wave increment sequence, so long series do not decay to all zeros.
fn two_wave(inc: &[f64]) -> Vec<f64> {
    let peak = inc.iter().cloned().fold(0.0, f64::max);
    let floor = 0.02 * peak;
    (0..inc.len())
        .map(|t| {
            let echo = if t >= SECOND_WAVE_LAG {
                0.6 * inc[t - SECOND_WAVE_LAG]
            } else {
                0.0
            };
            inc[t] + echo + floor
        })
        .collect()
}

/// Generate a full 18-column dataset. Deterministic for a given config.
pub fn generate_dataset(cfg: &SynthConfig) -> Result<Dataset> {
    let traj = epi_trajectory(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = normal_draws(cfg.days * 4, &mut rng);

    let death_raw: Vec<f64> = (0..cfg.days)
        .map(|t| {
            if t == 0 {
                traj[0].dead
            } else {
                traj[t].dead - traj[t - 1].dead
            }
        })
        .collect();
    let case_raw: Vec<f64> = (0..cfg.days)
        .map(|t| {
            if t == 0 {
                0.0
            } else {
                (traj[t - 1].susceptible - traj[t].susceptible).max(0.0)
            }
        })
        .collect();
    let death_base = two_wave(&death_raw);
    let case_base = two_wave(&case_raw);

    let mut records = Vec::with_capacity(cfg.days);
    let mut cum_dead = 0.0;
    let mut cum_pos = 0.0;
    let mut cum_neg = 0.0;
    let mut cum_hosp = 0.0;
    for t in 0..cfg.days {
        let date = cfg.start_date + chrono::Duration::days(t as i64);
        let wk = cfg.weekly_pattern[date.weekday().num_days_from_monday() as usize];
        let jitter = |i: usize, base: f64| -> f64 {
            (base * wk * (1.0 + cfg.noise_level * noise[4 * t + i])).max(0.0).round()
        };

        let death_inc = jitter(0, death_base[t]);
        let pos_inc = jitter(1, case_base[t]);
        let neg_inc = jitter(2, case_base[t] * 9.0);
        let hosp_inc = jitter(3, case_base[t] * 0.06);
        cum_dead += death_inc;
        cum_pos += pos_inc;
        cum_neg += neg_inc;
        cum_hosp += hosp_inc;

        let hosp_cur = traj[t].hospitalized.round();
        let mut values: HashMap<String, Option<f64>> = HashMap::new();
        let mut put = |k: &str, v: f64| {
            values.insert(k.to_string(), Some(v));
        };
        put("death", cum_dead);
        put("deathIncrease", death_inc);
        put("positive", cum_pos);
        put("positiveIncrease", pos_inc);
        put("negative", cum_neg);
        put("negativeIncrease", neg_inc);
        put("hospitalizedIncrease", hosp_inc);
        put("hospitalizedCumulative", cum_hosp);
        put("hospitalizedCurrently", hosp_cur);
        put("inIcuCumulative", (cum_hosp * 0.25).round());
        put("inIcuCurrently", (hosp_cur * 0.25).round());
        put("onVentilatorCumulative", (cum_hosp * 0.1).round());
        put("onVentilatorCurrently", (hosp_cur * 0.1).round());
        put("totalTestResults", cum_pos + cum_neg);
        put("totalTestResultsIncrease", pos_inc + neg_inc);
        put("recovered", traj[t].recovered.round());
        put("states", 56.0);
        records.push(CovidRecord { date, values });
    }
    Ok(Dataset {
        records,
        provenance: Provenance {
            source: format!("synthetic seed {}", cfg.seed),
            row_count: cfg.days,
        },
        warnings: Vec::new(),
    })
}

/// Shortcut: just the daily-deaths series (the main modeling target).
pub fn generate_deaths_series(cfg: &SynthConfig) -> Result<TimeSeries> {
    let ds = generate_dataset(cfg)?;
    let values = ds
        .records
        .iter()
        .map(|r| r.get("deathIncrease").unwrap_or(0.0))
        .collect();
    Ok(TimeSeries::new(cfg.start_date, values))
}
