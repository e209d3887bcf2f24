//! Thomas-Fermi profiles of the coupled condensates.
//!
//! Dropping the kinetic term, the stationary equations allow either
//! `alpha = beta` or `alpha beta = Lambda / 2` (field convention). In the
//! second case `alpha^2 + beta^2 = rho = (mu - r^2/2) / U0`, so
//! `alpha^2 = [rho +- sqrt(rho^2 - Lambda^2)] / 2` for `r <= r1` with
//! `r1^2 = 2 (mu - Lambda U0)`; beyond `r1` the profiles merge into the
//! symmetric form `(mu + lambda - r^2/2) / (U0 + U1)` which ends at
//! `r2^2 = 2 (mu + lambda)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{energy_functional, RadialGrid, RadialProfile};
use super::BranchKind;
use crate::error::{Error, Result};
use crate::params::{field_transition_control, LambdaConvention, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TFSolution {
    pub branch: BranchKind,
    pub mu: f64,
    /// Edge of the asymmetric core (0 on the symmetric branch).
    pub r1: f64,
    /// Outer edge of the cloud.
    pub r2: f64,
    pub profile: RadialProfile,
    /// Energy of the sampled profile through the grid functional.
    pub energy: f64,
}

/// `r0 = [15 N (U0 + U1) / (8 pi)]^(1/5)`.
pub fn tf_radius(n: f64, u_sum: f64) -> f64 {
    (15.0 * n * u_sum / (8.0 * PI)).powf(0.2)
}

/// Analytic `4 pi int (alpha^2 + beta^2) r^2 dr` of the asymmetric branch.
pub fn asymmetric_norm(mu: f64, params: &ModelParams) -> f64 {
    let (u0, u1) = params.mean_field_couplings();
    let control = 2.0 * params.lambda / (u1 - u0);
    let r1 = (2.0 * (mu - control * u0)).max(0.0).sqrt();
    let r2 = (2.0 * (mu + params.lambda)).max(0.0).sqrt();
    let inner = 4.0 * PI / u0 * (mu * r1.powi(3) / 3.0 - r1.powi(5) / 10.0);
    let outer = 8.0 * PI / (u0 + u1)
        * ((mu + params.lambda) * (r2.powi(3) - r1.powi(3)) / 3.0 - (r2.powi(5) - r1.powi(5)) / 10.0);
    inner + outer
}

/// Analytic norm of the symmetric branch with support radius `r0`.
pub fn symmetric_norm(r0: f64, u_sum: f64) -> f64 {
    8.0 * PI * r0.powi(5) / (15.0 * u_sum)
}

fn symmetric(params: &ModelParams, grid: &RadialGrid) -> Result<TFSolution> {
    let (u0, u1) = params.mean_field_couplings();
    let s = u0 + u1;
    let r0 = tf_radius(params.n(), s);
    let mut profile = grid.sample(|r| {
        let a = ((r0 * r0 - r * r) / (2.0 * s)).max(0.0).sqrt();
        (a, a)
    });
    profile.scale_to(params.n());
    let energy = energy_functional(&profile, params)?;
    Ok(TFSolution {
        branch: BranchKind::Symmetric,
        mu: 0.5 * r0 * r0 - params.lambda,
        r1: 0.0,
        r2: r0,
        profile,
        energy,
    })
}

fn solve_mu(params: &ModelParams, control: f64) -> Result<f64> {
    let (u0, _) = params.mean_field_couplings();
    let n = params.n();
    let f = |mu: f64| asymmetric_norm(mu, params) - n;
    let lo0 = control * u0;
    let mut lo = lo0;
    let mut hi = lo0 + (lo0.abs() + 1.0);
    let mut scans = 0;
    while f(hi) < 0.0 {
        lo = hi;
        hi = lo0 + 2.0 * (hi - lo0);
        scans += 1;
        if scans > 200 || !hi.is_finite() {
            return Err(Error::Bracketing { lo: lo0, hi });
        }
    }
    if f(lo) > 0.0 {
        return Err(Error::Bracketing { lo: lo0, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn asymmetric(params: &ModelParams, grid: &RadialGrid, control: f64, mu: f64) -> Result<(TFSolution, TFSolution)> {
    let (u0, u1) = params.mean_field_couplings();
    let lam = params.lambda;
    let r1 = (2.0 * (mu - control * u0)).sqrt();
    let r2 = (2.0 * (mu + lam)).sqrt();
    let mut plus = grid.sample(|r| {
        if r <= r1 {
            let rho = (mu - 0.5 * r * r) / u0;
            let root = (rho * rho - control * control).max(0.0).sqrt();
            (((rho + root) / 2.0).sqrt(), ((rho - root) / 2.0).max(0.0).sqrt())
        } else {
            let a = ((mu + lam - 0.5 * r * r) / (u0 + u1)).max(0.0).sqrt();
            (a, a)
        }
    });
    plus.scale_to(params.n());
    let minus = plus.mirrored();
    let e_plus = energy_functional(&plus, params)?;
    let e_minus = energy_functional(&minus, params)?;
    let make = |branch, profile, energy| TFSolution {
        branch,
        mu,
        r1,
        r2,
        profile,
        energy,
    };
    Ok((make(BranchKind::Plus, plus, e_plus), make(BranchKind::Minus, minus, e_minus)))
}

/// Thomas-Fermi branches for `params.lambda`.
///
/// The symmetric branch is always returned first. For `U1 > U0` and
/// `Lambda < Lambda0` (field convention) the two mirror-image asymmetric
/// branches follow.
pub fn solve_thomas_fermi(params: &ModelParams, grid: &RadialGrid) -> Result<Vec<TFSolution>> {
    params.validate()?;
    let (u0, u1) = params.mean_field_couplings();
    if !(u0 + u1 > 0.0) {
        return Err(Error::Domain(format!("Thomas-Fermi needs U0 + U1 > 0, got {}", u0 + u1)));
    }
    let mut out = vec![symmetric(params, grid)?];
    if u1 > u0 && u0 > 0.0 {
        let control = params.mean_field_control(LambdaConvention::Field)?;
        if control < field_transition_control(params.n_atoms, u0, u1) {
            let mu = solve_mu(params, control)?;
            let (p, m) = asymmetric(params, grid, control, mu)?;
            out.push(p);
            out.push(m);
        }
    }
    Ok(out)
}

/// The branch with the lowest grid energy.
pub fn lowest(solutions: &[TFSolution]) -> Option<&TFSolution> {
    solutions.iter().min_by(|a, b| a.energy.total_cmp(&b.energy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_examples() {
        assert!((tf_radius(1.0, 8.0 * PI / 15.0) - 1.0).abs() < 1e-12);
        let r = tf_radius(1000.0, 0.004);
        assert!((r - 2.387_324_146_378_430_4f64.powf(0.2)).abs() < 1e-12);
        assert!((r - 1.190_097).abs() < 1e-6);
    }

    #[test]
    fn symmetric_norm_closes() {
        let r0 = tf_radius(1000.0, 0.004);
        assert!((symmetric_norm(r0, 0.004) - 1000.0).abs() < 1e-8 * 1000.0);
    }

    #[test]
    fn continuity_at_inner_edge() {
        let p = ModelParams::new(1000, 0.2, 0.6, 0.0).unwrap().at_control(3.0, LambdaConvention::Field).unwrap();
        let grid = RadialGrid::for_cloud(tf_radius(1000.0, 0.8));
        let sols = solve_thomas_fermi(&p, &grid).unwrap();
        assert_eq!(sols.len(), 3);
        let plus = &sols[1];
        assert!(plus.r1 > 0.0 && plus.r1 < plus.r2);
        let h = plus.profile.h();
        let i = (plus.r1 / h) as usize;
        let jump = (plus.profile.alpha[i] - plus.profile.alpha[i - 1]).abs();
        let slope = (plus.profile.alpha[i - 1] - plus.profile.alpha[i - 3]).abs() / 2.0;
        assert!(jump <= 2.0 * slope.max(1e-3), "{jump} {slope}");
        // alpha_+ = beta_- pointwise
        assert_eq!(plus.profile.alpha, sols[2].profile.beta);
        assert!(((plus.energy - sols[2].energy) / plus.energy).abs() < 1e-12);
        assert!((asymmetric_norm(plus.mu, &p) - 1000.0).abs() < 1e-8);
    }

    #[test]
    fn symmetric_only_above_transition_or_for_repulsive_cross() {
        let p = ModelParams::new(1000, 0.2, 0.6, 0.0).unwrap();
        let l0 = field_transition_control(1000, 0.2, 0.6);
        let q = p.at_control(1.01 * l0, LambdaConvention::Field).unwrap();
        let grid = RadialGrid::for_cloud(5.0);
        assert_eq!(solve_thomas_fermi(&q, &grid).unwrap().len(), 1);
        let q = ModelParams::new(1000, 0.6, 0.2, 0.1).unwrap();
        assert_eq!(solve_thomas_fermi(&q, &grid).unwrap().len(), 1);
    }

    #[test]
    fn asymmetric_merges_into_symmetric_at_transition() {
        let p = ModelParams::new(1000, 0.2, 0.6, 0.0).unwrap();
        let l0 = field_transition_control(1000, 0.2, 0.6);
        let q = p.at_control(0.999_999 * l0, LambdaConvention::Field).unwrap();
        let control = q.control(LambdaConvention::Field).unwrap();
        let mu = solve_mu(&q, control).unwrap();
        let mu_sym = 0.5 * tf_radius(1000.0, 0.8).powi(2) - q.lambda;
        assert!((mu - mu_sym).abs() < 1e-4 * mu_sym.abs(), "{mu} {mu_sym}");
    }

    #[test]
    fn rejects_non_positive_sum() {
        let p = ModelParams::new(10, -0.5, 0.2, 0.1).unwrap();
        assert!(solve_thomas_fermi(&p, &RadialGrid::for_cloud(1.0)).is_err());
    }
}
