//! Derivative-free local minimisation (Nelder-Mead) shared by the CSS model
//! fits and the epidemic calibration.

/// Options for a Nelder-Mead run.
#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Convergence tolerance on simplex spread, in both parameter and objective space.
    pub tolerance: f64,
    /// Initial simplex step per coordinate (absolute).
    pub initial_step: f64,
    /// Rebuild the simplex around the incumbent and rerun this many extra times.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iterations: 2000,
            tolerance: 1e-7,
            initial_step: 0.1,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimise `f` from `start`. Deterministic given the start point.
pub fn nelder_mead<F>(f: F, start: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = start.to_vec();
    let mut best_val = f(&best);
    let mut total_iters = 0;
    let mut converged = false;
    for _ in 0..=opts.restarts {
        let r = run_once(&f, &best, opts);
        total_iters += r.iterations;
        if r.value < best_val {
            best = r.point;
            best_val = r.value;
        }
        converged = r.converged;
    }
    NelderMeadResult {
        point: best,
        value: best_val,
        iterations: total_iters,
        converged,
    }
}

fn run_once<F>(f: &F, start: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    if n == 0 {
        return NelderMeadResult {
            point: vec![],
            value: f(start),
            iterations: 0,
            converged: true,
        };
    }
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        let step = if p[i].abs() > 1.0 {
            opts.initial_step * p[i].abs()
        } else {
            opts.initial_step
        };
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let simplex_sorted: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let values_sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = simplex_sorted;
        values = values_sorted;

        let spread_v = (values[n] - values[0]).abs();
        let spread_x = (0..n)
            .map(|j| (simplex[n][j] - simplex[0][j]).abs())
            .fold(0.0f64, f64::max);
        if spread_v < opts.tolerance && spread_x < opts.tolerance {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();

        let blend = |a: f64| -> Vec<f64> {
            (0..n)
                .map(|j| centroid[j] + a * (centroid[j] - simplex[n][j]))
                .collect()
        };
        let reflected = blend(ALPHA);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = blend(GAMMA);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted: Vec<f64> = if fr < values[n] {
                // outside contraction
                (0..n).map(|j| centroid[j] + RHO * (reflected[j] - centroid[j])).collect()
            } else {
                // inside contraction
                (0..n).map(|j| centroid[j] + RHO * (simplex[n][j] - centroid[j])).collect()
            };
            let fc = f(&contracted);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    for j in 0..n {
                        simplex[i][j] = simplex[0][j] + SIGMA * (simplex[i][j] - simplex[0][j]);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    NelderMeadResult {
        point: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimises_quadratic() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2);
        let r = nelder_mead(f, &[0.0, 0.0], &NelderMeadOptions::default());
        assert!((r.point[0] - 3.0).abs() < 1e-4, "{:?}", r.point);
        assert!((r.point[1] + 1.0).abs() < 1e-4);
        assert!(r.converged);
    }

    #[test]
    fn minimises_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(
            f,
            &[-1.2, 1.0],
            &NelderMeadOptions {
                max_iterations: 5000,
                ..Default::default()
            },
        );
        assert!((r.point[0] - 1.0).abs() < 1e-3, "{:?}", r.point);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let a = nelder_mead(&f, &[1.0, 2.0, 3.0], &NelderMeadOptions::default());
        let b = nelder_mead(&f, &[1.0, 2.0, 3.0], &NelderMeadOptions::default());
        assert_eq!(a.point, b.point);
    }
}
