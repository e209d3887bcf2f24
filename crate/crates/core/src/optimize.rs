//! Derivative-free minimization: a thin wrapper over argmin's Nelder-Mead with
//! fixed seed simplices and an evaluation budget.

use std::sync::atomic::{AtomicUsize, Ordering};

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Initial edge length along each coordinate.
    pub step: f64,
    /// Stop once the standard deviation of the vertex values drops below
    /// `tolerance * max(1, |f(x0)|)`.
    pub tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            step: 0.1,
            tolerance: 1e-10,
            max_evaluations: 100_000,
        }
    }
}

struct Problem<'a, F> {
    f: &'a F,
    evaluations: &'a AtomicUsize,
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Problem<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let v = (self.f)(p);
        // keep the simplex ordering well defined when a vertex leaves the domain
        Ok(if v.is_finite() { v } else { 1e300 })
    }
}

fn simplex_around(x0: &[f64], step: f64) -> Vec<Vec<f64>> {
    let mut out = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        out.push(v);
    }
    out
}

fn run_once<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: f64,
    opts: &SimplexOptions,
    tol: f64,
    evaluations: &AtomicUsize,
) -> Result<(Minimum, bool)> {
    let stall = |best: f64| Error::OptimizerStall {
        evaluations: evaluations.load(Ordering::Relaxed),
        best,
    };
    let solver = NelderMead::new(simplex_around(x0, step))
        .with_sd_tolerance(tol)
        .map_err(|_| stall(f64::NAN))?;
    let remaining = opts.max_evaluations.saturating_sub(evaluations.load(Ordering::Relaxed));
    // a Nelder-Mead iteration costs at most dim + 2 evaluations
    let iters = (remaining / (x0.len() + 2)).max(1) as u64;
    let res = Executor::new(Problem { f, evaluations }, solver)
        .configure(|s| s.max_iters(iters))
        .run()
        .map_err(|_| stall(f64::NAN))?;
    let state = res.state();
    let x = state.get_best_param().cloned().unwrap_or_else(|| x0.to_vec());
    let value = state.get_best_cost();
    let converged = matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::SolverConverged)
    );
    Ok((
        Minimum {
            x,
            value,
            evaluations: evaluations.load(Ordering::Relaxed),
        },
        converged,
    ))
}

/// Minimizes `f` from the simplex spanned by `x0` and `x0 + step * e_i`.
///
/// The value-spread stopping rule is fooled by simplices that straddle the
/// minimum symmetrically, so the search is restarted from the best vertex
/// with a shrinking edge until a restart stops paying off.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &SimplexOptions) -> Result<Minimum> {
    let evaluations = AtomicUsize::new(0);
    let tol = opts.tolerance * f(x0).abs().max(1.0);
    let stalled = |best: f64| Error::OptimizerStall {
        evaluations: evaluations.load(Ordering::Relaxed),
        best,
    };
    let (mut best, ok) = run_once(&f, x0, opts.step, opts, tol, &evaluations)?;
    if !ok {
        return Err(stalled(best.value));
    }
    let mut step = opts.step;
    for _ in 0..12 {
        step *= 0.3;
        let (next, ok) = run_once(&f, &best.x, step, opts, tol, &evaluations)?;
        let gain = best.value - next.value;
        if next.value < best.value {
            best = next;
        }
        if !ok {
            return Err(stalled(best.value));
        }
        if gain <= tol {
            break;
        }
    }
    best.evaluations = evaluations.load(Ordering::Relaxed);
    Ok(best)
}
