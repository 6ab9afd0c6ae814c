//! SEI²RD simulation and calibration round trip: simulate an epidemic with
//! known parameters, then recover them from the daily-death curve alone.

use epiforecast::epi::{
    calibrate, daily_deaths, simulate, CalibrationBounds, CompartmentState, EpiParams,
};

fn main() -> epiforecast::Result<()> {
    let population = 1e7;
    let truth = EpiParams {
        alpha: 0.3,
        q1: 0.2,
        q2: 0.06,
        q3: 0.1,
        q4: 0.08,
        q5: 0.02,
        population,
    };
    let init = CompartmentState {
        susceptible: population - 3000.0,
        exposed: 2000.0,
        infected: 800.0,
        hospitalized: 200.0,
        recovered: 0.0,
        dead: 0.0,
    };

    let trajectory = simulate(&init, &truth, 150)?;
    let last = trajectory.last().unwrap();
    println!("after 150 days: dead {:.0}, recovered {:.0}", last.dead, last.recovered);
    println!(
        "population conserved to {:.2e} (relative)",
        (last.total() - population).abs() / population
    );

    let observed = daily_deaths(&trajectory);
    let peak = observed.values.iter().cloned().fold(0.0, f64::max);
    println!("peak daily deaths: {peak:.0}");

    let fit = calibrate(&observed, &init, population, &CalibrationBounds::default())?;
    println!("\ncalibration (true -> recovered):");
    println!("  alpha {:.3} -> {:.3}", truth.alpha, fit.params.alpha);
    println!("  q1    {:.3} -> {:.3}", truth.q1, fit.params.q1);
    println!("  q5    {:.3} -> {:.3}", truth.q5, fit.params.q5);
    println!("  sse {:.3e}, converged: {}", fit.sse, fit.converged);
    if !fit.flat_directions.is_empty() {
        println!("  flat (unidentified) directions: {:?}", fit.flat_directions);
    }
    Ok(())
}
