//! Imaginary-time relaxation of the coupled radial equations.
//!
//! Each sweep solves
//! `(1 + dt (H_lin + c)) psi' = (1 + dt (mu + c) + dt lambda sigma_x) psi`
//! with the densities in `H_lin` lagged, then renormalizes. `H_lin` holds the
//! kinetic, trap and interaction terms and is factored implicitly; the
//! projected `mu` and the laser coupling go to the right-hand side, and the
//! shift `c = max(0, lambda - mu)` keeps both right-hand coefficients
//! nonnegative. At a fixed point the renormalization factor is exactly 1, so
//! converged profiles solve the stationary equations themselves, and every
//! other mode is damped for any `dt > 0`.

use serde::{Deserialize, Serialize};

use super::grid::{energy_functional, stationarity, RadialProfile};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::tridiag::TridiagLu;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxOptions {
    pub dt: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Residual and energy are checked every this many sweeps.
    pub check_every: usize,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions {
            dt: 2.0,
            tolerance: 1e-6,
            max_iterations: 400_000,
            check_every: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relaxed {
    pub profile: RadialProfile,
    pub energy: f64,
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn sweep(p: &mut RadialProfile, params: &ModelParams, mu: f64, dt: f64) {
    let (u0, u1) = params.mean_field_couplings();
    let h = p.h();
    let n = p.len();
    let c = (params.lambda - mu).max(0.0);
    let off = vec![-0.5 * dt / (h * h); n - 1];
    let mut new_u = Vec::with_capacity(n);
    let mut new_v = Vec::with_capacity(n);
    for (target, own, other) in [(&mut new_u, &p.alpha, &p.beta), (&mut new_v, &p.beta, &p.alpha)] {
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let (a, b, r) = (own[i], other[i], p.r[i]);
                1.0 + dt * (1.0 / (h * h) + 0.5 * r * r + u0 * a * a + u1 * b * b + c)
            })
            .collect();
        let lu = TridiagLu::factor(&off, &diag, &off, f64::MIN_POSITIVE);
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| p.r[i] * ((1.0 + dt * (mu + c)) * own[i] + dt * params.lambda * other[i]))
            .collect();
        lu.solve_in_place(&mut rhs);
        *target = rhs;
    }
    for i in 0..n {
        p.alpha[i] = new_u[i] / p.r[i];
        p.beta[i] = new_v[i] / p.r[i];
    }
    p.scale_to(params.n());
}

/// Relaxes `seed` to a stationary profile of the same symmetry sector.
///
/// The seed must be normalized to N. Fails with [`Error::Divergence`] if the
/// energy ever rises by more than 1e-9 relative between checks, or ends
/// above the seed energy.
pub fn relax_gpe(params: &ModelParams, seed: &RadialProfile, opts: &RelaxOptions) -> Result<Relaxed> {
    let seed_energy = energy_functional(seed, params)?;
    let mut p = seed.clone();
    let (mut mu, mut residual) = stationarity(&p, params);
    let mut energy = seed_energy;
    let mut it = 0;
    while residual > opts.tolerance {
        if it >= opts.max_iterations {
            return Err(Error::Convergence {
                iterations: it,
                what: format!("relaxation residual {residual:e} above {:e}", opts.tolerance),
            });
        }
        for _ in 0..opts.check_every {
            sweep(&mut p, params, mu, opts.dt);
            mu = stationarity(&p, params).0;
        }
        it += opts.check_every;
        let next = energy_functional(&p, params)?;
        if !next.is_finite() || next > energy + 1e-9 * energy.abs().max(1.0) {
            return Err(Error::Divergence {
                iteration: it,
                from: energy,
                to: next,
            });
        }
        energy = next;
        let s = stationarity(&p, params);
        mu = s.0;
        residual = s.1;
    }
    if energy > seed_energy {
        return Err(Error::Divergence {
            iteration: it,
            from: seed_energy,
            to: energy,
        });
    }
    Ok(Relaxed {
        profile: p,
        energy,
        mu,
        residual,
        iterations: it,
    })
}
