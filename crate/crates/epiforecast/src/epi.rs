//! SEI2RD compartmental difference-equation simulator with least-squares
//! calibration against an observed daily-death series.
//!
//! The susceptible update drops the re-entry term q5*I^H so that the six
//! equations conserve the total population exactly; see the README for the
//! reasoning behind this correction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::series::TimeSeries;

/// Flow parameters, all per day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpiParams {
    /// Transmission rate.
    pub alpha: f64,
    /// E -> I.
    pub q1: f64,
    /// I -> I^H.
    pub q2: f64,
    /// I -> R.
    pub q3: f64,
    /// I^H -> R.
    pub q4: f64,
    /// I^H -> D.
    pub q5: f64,
    /// Total population.
    pub population: f64,
}

impl EpiParams {
    pub fn validate(&self) -> Result<()> {
        if self.population <= 0.0 {
            return Err(Error::InvalidArgument("population must be > 0".into()));
        }
        if self.alpha < 0.0 {
            return Err(Error::InvalidArgument("alpha must be >= 0".into()));
        }
        let qs = [self.q1, self.q2, self.q3, self.q4, self.q5];
        if qs.iter().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::InvalidArgument("q1..q5 must lie in [0, 1]".into()));
        }
        if self.q2 + self.q3 > 1.0 {
            return Err(Error::InvalidArgument("q2 + q3 must be <= 1".into()));
        }
        if self.q4 + self.q5 > 1.0 {
            return Err(Error::InvalidArgument("q4 + q5 must be <= 1".into()));
        }
        Ok(())
    }
}

/// Compartment counts (continuous relaxation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompartmentState {
    pub susceptible: f64,
    pub exposed: f64,
    pub infected: f64,
    pub hospitalized: f64,
    pub recovered: f64,
    pub dead: f64,
}

impl CompartmentState {
    pub fn total(&self) -> f64 {
        self.susceptible + self.exposed + self.infected + self.hospitalized + self.recovered + self.dead
    }
}

/// One step plus a diagnostic for whether non-negativity clamping fired.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub state: CompartmentState,
    pub clamped: bool,
}

/// Advance the compartments one day.
pub fn step(state: &CompartmentState, params: &EpiParams) -> Result<StepOutcome> {
    if params.population <= 0.0 {
        return Err(Error::InvalidArgument("population must be > 0".into()));
    }
    let n = params.population;
    let force = params.alpha * (state.infected + state.hospitalized) / n * state.susceptible;
    let e_out = params.q1 * state.exposed;
    let i_to_h = params.q2 * state.infected;
    let i_to_r = params.q3 * state.infected;
    let h_to_r = params.q4 * state.hospitalized;
    let h_to_d = params.q5 * state.hospitalized;

    let mut next = CompartmentState {
        susceptible: state.susceptible - force,
        exposed: state.exposed + force - e_out,
        infected: state.infected + e_out - i_to_h - i_to_r,
        hospitalized: state.hospitalized + i_to_h - h_to_r - h_to_d,
        recovered: state.recovered + i_to_r + h_to_r,
        dead: state.dead + h_to_d,
    };
    let mut clamped = false;
    for v in [
        &mut next.susceptible,
        &mut next.exposed,
        &mut next.infected,
        &mut next.hospitalized,
        &mut next.recovered,
        &mut next.dead,
    ] {
        if *v < 0.0 {
            *v = 0.0;
            clamped = true;
        }
    }
    Ok(StepOutcome {
        state: next,
        clamped,
    })
}

/// Iterate `step` T times; trajectory[0] is the initial state.
pub fn simulate(
    init: &CompartmentState,
    params: &EpiParams,
    t_steps: usize,
) -> Result<Vec<CompartmentState>> {
    let mut out = Vec::with_capacity(t_steps + 1);
    out.push(*init);
    let mut cur = *init;
    for _ in 0..t_steps {
        cur = step(&cur, params)?.state;
        out.push(cur);
    }
    Ok(out)
}

/// First differences of the dead compartment: the model's daily-deaths analog.
pub fn daily_deaths(trajectory: &[CompartmentState]) -> TimeSeries {
    TimeSeries::from_values(
        trajectory
            .windows(2)
            .map(|w| w[1].dead - w[0].dead)
            .collect(),
    )
}

/// Bounds for each calibrated parameter (alpha, q1..q5).
#[derive(Debug, Clone, Copy)]
pub struct CalibrationBounds {
    pub alpha: (f64, f64),
    pub q: (f64, f64),
}

impl Default for CalibrationBounds {
    fn default() -> Self {
        CalibrationBounds {
            alpha: (0.0, 2.0),
            q: (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub params: EpiParams,
    pub sse: f64,
    pub converged: bool,
    /// Parameters with no detectable effect on the objective at the optimum.
    pub flat_directions: Vec<&'static str>,
}

fn project(x: &[f64], bounds: &CalibrationBounds) -> [f64; 6] {
    let clamp = |v: f64, (lo, hi): (f64, f64)| v.clamp(lo, hi);
    [
        clamp(x[0], bounds.alpha),
        clamp(x[1], bounds.q),
        clamp(x[2], bounds.q),
        clamp(x[3], bounds.q),
        clamp(x[4], bounds.q),
        clamp(x[5], bounds.q),
    ]
}

fn params_from(x: &[f64; 6], population: f64) -> EpiParams {
    // Joint flow fractions are renormalised so the compartment invariants hold.
    let (mut q2, mut q3) = (x[2], x[3]);
    if q2 + q3 > 1.0 {
        let s = q2 + q3;
        q2 /= s;
        q3 /= s;
    }
    let (mut q4, mut q5) = (x[4], x[5]);
    if q4 + q5 > 1.0 {
        let s = q4 + q5;
        q4 /= s;
        q5 /= s;
    }
    EpiParams {
        alpha: x[0],
        q1: x[1],
        q2,
        q3,
        q4,
        q5,
        population,
    }
}

/// Fit (alpha, q1..q5) to an observed daily-death series by minimising the
/// sum of squared differences between simulated and observed daily deaths.
/// Deterministic given the fixed start simplex.
pub fn calibrate(
    observed_deaths: &TimeSeries,
    init: &CompartmentState,
    population: f64,
    bounds: &CalibrationBounds,
) -> Result<CalibrationResult> {
    if observed_deaths.len() < 14 {
        return Err(Error::InsufficientData {
            needed: 14,
            have: observed_deaths.len(),
        });
    }
    let t_steps = observed_deaths.len();
    let objective = |x: &[f64]| -> f64 {
        let p = params_from(&project(x, bounds), population);
        match simulate(init, &p, t_steps) {
            Ok(traj) => {
                let sim = daily_deaths(&traj);
                sim.values
                    .iter()
                    .zip(&observed_deaths.values)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum()
            }
            Err(_) => f64::INFINITY,
        }
    };

    let start = [0.3, 0.2, 0.1, 0.1, 0.1, 0.05];
    let opts = NelderMeadOptions {
        max_iterations: 4000,
        tolerance: 1e-10,
        initial_step: 0.05,
        restarts: 2,
    };
    let r = nelder_mead(objective, &start, &opts);
    let best = project(&r.point, bounds);
    let params = params_from(&best, population);
    let sse = r.value;

    // Probe each direction for identifiability at the optimum.
    let names = ["alpha", "q1", "q2", "q3", "q4", "q5"];
    let mut flat = Vec::new();
    for i in 0..6 {
        let mut probe = r.point.clone();
        probe[i] += 0.05;
        let up = objective(&probe);
        probe[i] -= 0.10;
        let down = objective(&probe);
        if (up - sse).abs() <= 1e-12 * sse.max(1.0) && (down - sse).abs() <= 1e-12 * sse.max(1.0) {
            flat.push(names[i]);
        }
    }

    Ok(CalibrationResult {
        params,
        sse,
        converged: r.converged,
        flat_directions: flat,
    })
}

/// Write a trajectory as CSV with columns t,S,E,I,IH,R,D.
pub fn trajectory_to_csv(trajectory: &[CompartmentState]) -> String {
    let mut out = String::from("t,S,E,I,IH,R,D\n");
    for (t, s) in trajectory.iter().enumerate() {
        out.push_str(&format!(
            "{t},{},{},{},{},{},{}\n",
            s.susceptible, s.exposed, s.infected, s.hospitalized, s.recovered, s.dead
        ));
    }
    out
}
