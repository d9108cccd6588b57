//! Projected gradient descent with backtracking, used wherever an objective
//! has no closed-form constrained minimizer.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::linalg;

#[derive(Clone, Copy, Debug)]
pub struct PgdOptions {
    /// Stop once the gradient-mapping norm falls to this level.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
}

impl Default for PgdOptions {
    fn default() -> Self {
        PgdOptions {
            tolerance: 1e-9,
            max_iterations: 100_000,
            initial_step: 1.0,
        }
    }
}

/// Minimize a smooth convex `f` over `domain`, starting from `start`.
///
/// Each accepted step satisfies the usual sufficient-decrease test
/// `f(w+) <= f(w) + g·(w+ - w) + |w+ - w|^2 / 2s`; the step grows mildly after
/// every acceptance so flat regions are crossed quickly.
pub fn projected_gradient<F, G>(
    domain: &Domain,
    start: &[f64],
    f: F,
    grad: G,
    opts: PgdOptions,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut w = domain.project(start)?;
    let mut fw = f(&w);
    let mut step = opts.initial_step;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        let g = grad(&w);
        loop {
            iterations += 1;
            let trial: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
            let next = domain.project_unchecked(&trial);
            let delta = linalg::sub(&next, &w);
            residual = linalg::norm(&delta) / step;
            if residual <= opts.tolerance {
                return Ok(next);
            }
            let f_next = f(&next);
            let model = fw + linalg::dot(&g, &delta) + linalg::dot(&delta, &delta) / (2.0 * step);
            // the absolute slack absorbs rounding once f stops changing
            if f_next <= model + 1e-15 * fw.abs().max(1.0) {
                w = next;
                fw = f_next;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-300 || iterations >= opts.max_iterations {
                return Err(Error::SolverDidNotConverge {
                    iterations,
                    residual,
                });
            }
        }
    }
    Err(Error::SolverDidNotConverge {
        iterations,
        residual,
    })
}
