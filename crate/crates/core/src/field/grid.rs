//! Radial grid, two-component profiles and the discretized energy functional.
//!
//! Profiles live on `r_i = i h`, `i = 1..=n`, with `u = r alpha` vanishing at
//! `r = 0` and one cell beyond `r_max`. All integrals use the rectangle rule
//! with weight `4 pi r_i^2 h`, and the kinetic term is the summation-by-parts
//! form of the second-order Laplacian on `u`. With these choices the gradient
//! of the discrete functional is exactly the discrete Gross-Pitaevskii
//! operator used by the relaxation solver.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub points: usize,
    pub r_max: f64,
}

impl RadialGrid {
    pub const DEFAULT_POINTS: usize = 2048;

    pub fn new(points: usize, r_max: f64) -> Result<Self> {
        if points < 8 || !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::Domain(format!("bad radial grid: {points} points up to {r_max}")));
        }
        Ok(RadialGrid { points, r_max })
    }

    /// `r_max = max(2 r0, 8)` with the default resolution.
    pub fn for_cloud(r0: f64) -> Self {
        RadialGrid {
            points: Self::DEFAULT_POINTS,
            r_max: (2.0 * r0).max(8.0),
        }
    }

    pub fn h(&self) -> f64 {
        self.r_max / self.points as f64
    }

    pub fn radii(&self) -> Vec<f64> {
        let h = self.h();
        (1..=self.points).map(|i| i as f64 * h).collect()
    }

    pub fn sample<F: Fn(f64) -> (f64, f64)>(&self, f: F) -> RadialProfile {
        let r = self.radii();
        let (alpha, beta) = r.iter().map(|&x| f(x)).unzip();
        RadialProfile { r, alpha, beta }
    }
}

/// Real amplitudes `alpha(r)`, `beta(r)` on a uniform radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl RadialProfile {
    pub fn h(&self) -> f64 {
        self.r[0]
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.h();
        self.r.iter().map(move |r| 4.0 * PI * r * r * h)
    }

    /// `4 pi int (alpha^2 + beta^2) r^2 dr`.
    pub fn norm(&self) -> f64 {
        let (na, nb) = self.populations();
        na + nb
    }

    /// Populations of the two components.
    pub fn populations(&self) -> (f64, f64) {
        self.weights()
            .zip(self.alpha.iter().zip(&self.beta))
            .fold((0.0, 0.0), |(na, nb), (w, (a, b))| (na + w * a * a, nb + w * b * b))
    }

    /// `int f g d^3r` for two sampled functions.
    pub fn integrate_product(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights().zip(f.iter().zip(g)).map(|(w, (a, b))| w * a * b).sum()
    }

    pub fn scale_to(&mut self, n: f64) {
        let c = (n / self.norm()).sqrt();
        self.alpha.iter_mut().chain(self.beta.iter_mut()).for_each(|v| *v *= c);
    }

    /// The A/B mirror image.
    pub fn mirrored(&self) -> Self {
        RadialProfile {
            r: self.r.clone(),
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    /// Largest `|alpha - beta|` over the grid.
    pub fn max_asymmetry(&self) -> f64 {
        self.alpha.iter().zip(&self.beta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    fn check_norm(&self, n: f64) -> Result<()> {
        let found = self.norm();
        if !((found - n).abs() <= 1e-4 * n) {
            return Err(Error::Unnormalized { expected: n, found });
        }
        Ok(())
    }
}

/// `4 pi int f (-nabla^2/2 + r^2/2) g r^2 dr` for radial functions.
pub(crate) fn one_body(p: &RadialProfile, f: &[f64], g: &[f64]) -> f64 {
    let h = p.h();
    let n = p.len();
    let uf = |i: usize| if i == 0 || i > n { 0.0 } else { p.r[i - 1] * f[i - 1] };
    let ug = |i: usize| if i == 0 || i > n { 0.0 } else { p.r[i - 1] * g[i - 1] };
    let mut kinetic = 0.0;
    for i in 0..=n {
        kinetic += (uf(i + 1) - uf(i)) * (ug(i + 1) - ug(i));
    }
    let potential: f64 = p
        .r
        .iter()
        .zip(f.iter().zip(g))
        .map(|(r, (a, b))| 4.0 * PI * r * r * h * 0.5 * r * r * a * b)
        .sum();
    2.0 * PI / h * kinetic + potential
}

/// Contributions to [`energy_functional`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    pub one_body: f64,
    pub intra: f64,
    pub inter: f64,
    pub laser: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.one_body + self.intra + self.inter + self.laser
    }
}

/// `E = int [ a(T+V)a + b(T+V)b + U0/2 (a^4 + b^4) + U1 a^2 b^2 - 2 lambda a b ] d^3r`.
///
/// Uses `params.lambda` and the mean-field couplings of `params`.
pub fn energy_functional(profile: &RadialProfile, params: &ModelParams) -> Result<f64> {
    Ok(energy_parts(profile, params)?.total())
}

pub fn energy_parts(profile: &RadialProfile, params: &ModelParams) -> Result<EnergyParts> {
    params.validate()?;
    profile.check_norm(params.n())?;
    let (u0, u1) = params.mean_field_couplings();
    let one = one_body(profile, &profile.alpha, &profile.alpha) + one_body(profile, &profile.beta, &profile.beta);
    let (mut intra, mut inter, mut laser) = (0.0, 0.0, 0.0);
    for (w, (a, b)) in profile.weights().zip(profile.alpha.iter().zip(&profile.beta)) {
        let (a2, b2) = (a * a, b * b);
        intra += w * 0.5 * u0 * (a2 * a2 + b2 * b2);
        inter += w * u1 * a2 * b2;
        laser -= w * 2.0 * params.lambda * a * b;
    }
    Ok(EnergyParts {
        one_body: one,
        intra,
        inter,
        laser,
    })
}

/// Left-hand sides of the stationary coupled equations,
/// `(L_a) alpha - lambda beta` and `(L_b) beta - lambda alpha` with
/// `L_a = -nabla^2/2 + r^2/2 + U0 alpha^2 + U1 beta^2`.
pub fn gp_operator(profile: &RadialProfile, params: &ModelParams) -> (Vec<f64>, Vec<f64>) {
    let (u0, u1) = params.mean_field_couplings();
    let h = profile.h();
    let n = profile.len();
    let lap = |x: &[f64], i: usize| {
        let u = |j: isize| {
            if j < 0 || j as usize >= n {
                0.0
            } else {
                profile.r[j as usize] * x[j as usize]
            }
        };
        let i = i as isize;
        (u(i + 1) - 2.0 * u(i) + u(i - 1)) / (h * h) / profile.r[i as usize]
    };
    let mut ga = Vec::with_capacity(n);
    let mut gb = Vec::with_capacity(n);
    for i in 0..n {
        let (r, a, b) = (profile.r[i], profile.alpha[i], profile.beta[i]);
        let v = 0.5 * r * r;
        ga.push(-0.5 * lap(&profile.alpha, i) + (v + u0 * a * a + u1 * b * b) * a - params.lambda * b);
        gb.push(-0.5 * lap(&profile.beta, i) + (v + u0 * b * b + u1 * a * a) * b - params.lambda * a);
    }
    (ga, gb)
}

/// Chemical potential by projection and the residual norm
/// `|| (L - mu) psi - lambda sigma psi || / || psi ||` on the grid.
pub fn stationarity(profile: &RadialProfile, params: &ModelParams) -> (f64, f64) {
    let (ga, gb) = gp_operator(profile, params);
    let norm = profile.norm();
    let mu = (profile.integrate_product(&profile.alpha, &ga) + profile.integrate_product(&profile.beta, &gb)) / norm;
    let ra: Vec<f64> = ga.iter().zip(&profile.alpha).map(|(g, a)| g - mu * a).collect();
    let rb: Vec<f64> = gb.iter().zip(&profile.beta).map(|(g, b)| g - mu * b).collect();
    let res = (profile.integrate_product(&ra, &ra) + profile.integrate_product(&rb, &rb)) / norm;
    (mu, res.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &RadialGrid, n_a: f64, a: f64, n_b: f64, b: f64) -> RadialProfile {
        let amp = |n: f64, w: f64| (n / (2.0 * PI * w * w).powf(1.5)).sqrt();
        let (ca, cb) = (amp(n_a, a), amp(n_b, b));
        grid.sample(|r| {
            (
                ca * (-r * r / (4.0 * a * a)).exp(),
                cb * (-r * r / (4.0 * b * b)).exp(),
            )
        })
    }

    #[test]
    fn oscillator_ground_energy() {
        let grid = RadialGrid::new(2048, 8.0).unwrap();
        let p = gaussian(&grid, 1.0, 0.5f64.sqrt(), 0.0, 1.0);
        let params = ModelParams::new(1, 0.0, 0.0, 0.0).unwrap();
        let e = energy_functional(&p, &params).unwrap();
        assert!((e - 1.5).abs() < 1e-5, "{e}");
        let p = gaussian(&grid, 0.5, 0.5f64.sqrt(), 0.5, 0.5f64.sqrt());
        let e = energy_functional(&p, &params.with_lambda(1.0)).unwrap();
        assert!((e - 0.5).abs() < 1e-5, "{e}");
    }

    #[test]
    fn second_order_convergence() {
        let params = ModelParams::new(1, 0.0, 0.0, 0.0).unwrap();
        let err = |points: usize| {
            let grid = RadialGrid::new(points, 8.0).unwrap();
            let p = gaussian(&grid, 1.0, 0.5f64.sqrt(), 0.0, 1.0);
            // the rectangle rule is spectrally accurate here; the error is the Laplacian's
            (energy_functional(&p, &params).unwrap() - 1.5).abs()
        };
        let ratio = err(256) / err(512);
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn unnormalized_profile_is_rejected() {
        let grid = RadialGrid::new(512, 8.0).unwrap();
        let p = gaussian(&grid, 1.001, 0.7, 0.0, 1.0);
        let params = ModelParams::new(1, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(energy_functional(&p, &params), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn gradient_matches_operator() {
        let grid = RadialGrid::new(200, 6.0).unwrap();
        let params = ModelParams::new(50, 0.3, 0.7, 0.4).unwrap();
        let mut p = grid.sample(|r| ((-r * r / 3.0).exp() * (1.0 + 0.2 * r), (-r * r / 2.0).exp()));
        p.scale_to(50.0);
        let (ga, _) = gp_operator(&p, &params);
        let h = p.h();
        let e0 = |q: &RadialProfile| {
            let (u0, u1) = params.mean_field_couplings();
            let one = one_body(q, &q.alpha, &q.alpha) + one_body(q, &q.beta, &q.beta);
            let rest: f64 = q
                .weights()
                .zip(q.alpha.iter().zip(&q.beta))
                .map(|(w, (a, b))| w * (0.5 * u0 * (a.powi(4) + b.powi(4)) + u1 * a * a * b * b - 2.0 * params.lambda * a * b))
                .sum();
            one + rest
        };
        for &i in &[3usize, 40, 120] {
            let d = 1e-5;
            let mut up = p.clone();
            up.alpha[i] += d;
            let mut dn = p.clone();
            dn.alpha[i] -= d;
            let fd = (e0(&up) - e0(&dn)) / (2.0 * d);
            let w = 4.0 * PI * p.r[i] * p.r[i] * h;
            assert!((fd / w - 2.0 * ga[i]).abs() < 1e-6 * ga[i].abs().max(1.0), "{i}: {} vs {}", fd / w, 2.0 * ga[i]);
        }
    }

    #[test]
    fn mirror_swaps_populations() {
        let grid = RadialGrid::new(300, 8.0).unwrap();
        let p = gaussian(&grid, 3.0, 0.8, 1.0, 1.1);
        let (a, b) = p.populations();
        let (c, d) = p.mirrored().populations();
        assert_eq!((a, b), (d, c));
    }
}
