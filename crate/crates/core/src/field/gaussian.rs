//! Gaussian variational ansatz `alpha(r) = sqrt(A) exp(-r^2 / (4 a^2))`, for
//! which `N_A = A (2 pi a^2)^(3/2)`, and its energy minimization.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::grid::{RadialGrid, RadialProfile};
use super::thomas_fermi::tf_radius;
use crate::error::{Error, Result};
use crate::optimize::{minimize, SimplexOptions};
use crate::params::{LambdaConvention, ModelParams};

/// `sum_k c_k exp(-gamma_k r^2)`; every integral below is in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussSum {
    pub terms: Vec<(f64, f64)>,
}

fn s3(g: f64) -> f64 {
    (PI / g).powf(1.5)
}

impl GaussSum {
    /// Single Gaussian holding `population` atoms with width parameter `width`.
    pub fn single(population: f64, width: f64) -> Self {
        let amp = population / (2.0 * PI * width * width).powf(1.5);
        GaussSum {
            terms: vec![(amp.sqrt(), 0.25 / (width * width))],
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|(c, g)| c * (-g * r * r).exp()).sum()
    }

    /// `int f g d^3r`.
    pub fn overlap(&self, other: &GaussSum) -> f64 {
        let mut s = 0.0;
        for &(c1, g1) in &self.terms {
            for &(c2, g2) in &other.terms {
                s += c1 * c2 * s3(g1 + g2);
            }
        }
        s
    }

    /// `int f (-nabla^2/2 + r^2/2) g d^3r`.
    pub fn one_body(&self, other: &GaussSum) -> f64 {
        let mut s = 0.0;
        for &(c1, g1) in &self.terms {
            for &(c2, g2) in &other.terms {
                let g = g1 + g2;
                s += c1 * c2 * s3(g) * (3.0 * g1 * g2 / g + 0.75 / g);
            }
        }
        s
    }

    /// `int f g h k d^3r`.
    pub fn quartic(f: &GaussSum, g: &GaussSum, h: &GaussSum, k: &GaussSum) -> f64 {
        let mut s = 0.0;
        for &(c1, g1) in &f.terms {
            for &(c2, g2) in &g.terms {
                for &(c3, g3) in &h.terms {
                    for &(c4, g4) in &k.terms {
                        s += c1 * c2 * c3 * c4 * s3(g1 + g2 + g3 + g4);
                    }
                }
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.overlap(self)
    }
}

/// Energy of the product state with component orbitals `alpha`, `beta`.
pub fn orbital_energy(params: &ModelParams, alpha: &GaussSum, beta: &GaussSum) -> f64 {
    let (u0, u1) = params.mean_field_couplings();
    alpha.one_body(alpha) + beta.one_body(beta)
        + 0.5 * u0 * (GaussSum::quartic(alpha, alpha, alpha, alpha) + GaussSum::quartic(beta, beta, beta, beta))
        + u1 * GaussSum::quartic(alpha, alpha, beta, beta)
        - 2.0 * params.lambda * alpha.overlap(beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPair {
    pub amp_a: f64,
    pub width_a: f64,
    pub amp_b: f64,
    pub width_b: f64,
}

impl GaussianPair {
    pub fn from_populations(n_a: f64, width_a: f64, n_b: f64, width_b: f64) -> Self {
        let amp = |n: f64, w: f64| n / (2.0 * PI * w * w).powf(1.5);
        GaussianPair {
            amp_a: amp(n_a, width_a),
            width_a,
            amp_b: amp(n_b, width_b),
            width_b,
        }
    }

    pub fn populations(&self) -> (f64, f64) {
        let pop = |a: f64, w: f64| a * (2.0 * PI * w * w).powf(1.5);
        (pop(self.amp_a, self.width_a), pop(self.amp_b, self.width_b))
    }

    pub fn orbitals(&self) -> (GaussSum, GaussSum) {
        let one = |a: f64, w: f64| GaussSum {
            terms: vec![(a.sqrt(), 0.25 / (w * w))],
        };
        (one(self.amp_a, self.width_a), one(self.amp_b, self.width_b))
    }

    pub fn mirrored(&self) -> Self {
        GaussianPair {
            amp_a: self.amp_b,
            width_a: self.width_b,
            amp_b: self.amp_a,
            width_b: self.width_a,
        }
    }

    pub fn energy(&self, params: &ModelParams) -> f64 {
        let (a, b) = self.orbitals();
        orbital_energy(params, &a, &b)
    }

    /// Samples onto `grid`, rescaled so the grid norm equals the population.
    pub fn sample(&self, grid: &RadialGrid) -> RadialProfile {
        let (a, b) = self.orbitals();
        let mut p = grid.sample(|r| (a.eval(r), b.eval(r)));
        let (na, nb) = self.populations();
        p.scale_to(na + nb);
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMinimum {
    pub pair: GaussianPair,
    pub energy: f64,
    /// Mirror image of an asymmetric minimum, when one wins.
    pub degenerate_partner: Option<GaussianPair>,
    /// Best energy with `A = B`, `a = b`.
    pub symmetric_energy: f64,
    pub evaluations: usize,
}

fn unpack(n: f64, x: &[f64]) -> GaussianPair {
    let c = x[2].cos();
    GaussianPair::from_populations(n * c * c, x[0].exp(), n * (1.0 - c * c), x[1].exp())
}

/// Width seed: the oscillator width, or the width whose mean-square radius
/// matches the Thomas-Fermi cloud when that is larger.
fn seed_width(params: &ModelParams) -> f64 {
    let (u0, u1) = params.mean_field_couplings();
    let osc = 0.5f64.sqrt();
    if u0 + u1 > 0.0 {
        osc.max(tf_radius(params.n(), u0 + u1) / 7f64.sqrt())
    } else {
        osc
    }
}

/// Minimizes the Gaussian-ansatz energy over `(A, a, B, b)` at fixed `N`.
///
/// One symmetric and `restarts - 1` asymmetric seeds are used. An asymmetric
/// optimum is reported with `N_A >= N_B` and its mirror image as the
/// degenerate partner when it beats the symmetric optimum by more than 1e-9.
pub fn minimize_gaussian(params: &ModelParams, restarts: usize) -> Result<GaussianMinimum> {
    params.validate()?;
    if restarts < 2 {
        return Err(Error::Domain("minimize_gaussian needs at least 2 restarts".into()));
    }
    let n = params.n();
    // the asymmetry test below compares energies at the 1e-9 level
    let opts = SimplexOptions {
        tolerance: 1e-13,
        ..Default::default()
    };
    let energy = |x: &[f64]| unpack(n, x).energy(params);

    let w0 = seed_width(params).ln();
    let sym = minimize(|x: &[f64]| energy(&[x[0], x[0], FRAC_PI_4]), &[w0], &opts)?;
    let mut evaluations = sym.evaluations;
    let (ls, es) = (sym.x[0], sym.value);

    let mut best: Option<(Vec<f64>, f64)> = None;
    for k in 0..restarts {
        let theta = FRAC_PI_4 * (1.0 - k as f64 / restarts as f64);
        let m = minimize(energy, &[ls, ls, theta], &opts)?;
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|(_, v)| m.value < *v) {
            best = Some((m.x, m.value));
        }
    }
    let (x, value) = best.expect("at least two restarts");
    let candidate = unpack(n, &x);
    let (na, nb) = candidate.populations();
    let asymmetric = value < es - 1e-9 && (na - nb).abs() > 1e-6 * n;
    if asymmetric {
        let pair = if na >= nb { candidate } else { candidate.mirrored() };
        Ok(GaussianMinimum {
            pair,
            energy: value,
            degenerate_partner: Some(pair.mirrored()),
            symmetric_energy: es,
            evaluations,
        })
    } else {
        let w = ls.exp();
        Ok(GaussianMinimum {
            pair: GaussianPair::from_populations(0.5 * n, w, 0.5 * n, w),
            energy: es,
            degenerate_partner: None,
            symmetric_energy: es,
            evaluations,
        })
    }
}

/// Locates, by bisection on the field-convention `Lambda` in `[lo, hi]`, the
/// point where the Gaussian minimum stops being asymmetric.
pub fn gaussian_transition(params: &ModelParams, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let asym = |control: f64| -> Result<bool> {
        let p = params.at_control(control, LambdaConvention::Field)?;
        Ok(minimize_gaussian(&p, 3)?.degenerate_partner.is_some())
    };
    if !asym(lo)? || asym(hi)? {
        return Err(Error::Domain(format!("no symmetry-breaking transition inside [{lo}, {hi}]")));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if asym(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad<F: Fn(f64) -> f64>(f: F) -> f64 {
        // 4 pi int f(r) r^2 dr by composite Simpson on [0, 20]
        let n = 20_000;
        let h = 20.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(r) * r * r;
        }
        4.0 * PI * s * h / 3.0
    }

    #[test]
    fn closed_forms_against_quadrature() {
        let f = GaussSum {
            terms: vec![(0.7, 0.3), (0.2, 1.1)],
        };
        let g = GaussSum {
            terms: vec![(1.3, 0.45)],
        };
        assert!((f.overlap(&g) - quad(|r| f.eval(r) * g.eval(r))).abs() < 1e-10);
        let q = GaussSum::quartic(&f, &f, &g, &g);
        assert!((q - quad(|r| (f.eval(r) * g.eval(r)).powi(2))).abs() < 1e-10);
        // -1/2 f g'' - (1/r) f g' + r^2/2 f g for radial Gaussians
        let lap_g = |r: f64| {
            g.terms.iter().map(|(c, ga)| c * (4.0 * ga * ga * r * r - 6.0 * ga) * (-ga * r * r).exp()).sum::<f64>()
        };
        let ob = quad(|r| f.eval(r) * (-0.5 * lap_g(r) + 0.5 * r * r * g.eval(r)));
        assert!((f.one_body(&g) - ob).abs() < 1e-10, "{} {}", f.one_body(&g), ob);
    }

    #[test]
    fn single_gaussian_population() {
        let g = GaussSum::single(7.0, 0.9);
        assert!((g.norm() - 7.0).abs() < 1e-12);
        let pair = GaussianPair::from_populations(3.0, 0.8, 4.0, 1.2);
        let (a, b) = pair.populations();
        assert!((a - 3.0).abs() < 1e-12 && (b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn oscillator_limit() {
        let p = ModelParams::new(1, 0.0, 0.0, 0.0).unwrap();
        let m = minimize_gaussian(&p, 2).unwrap();
        assert!((m.energy - 1.5).abs() < 1e-9);
        assert!((m.pair.width_a - 0.5f64.sqrt()).abs() < 1e-4);
        assert!(m.degenerate_partner.is_none());
    }

    #[test]
    fn repulsive_cross_coupling_keeps_symmetry() {
        for &lam in &[0.01, 0.5, 3.0] {
            let p = ModelParams::new(1000, 0.6, 0.2, lam).unwrap();
            let m = minimize_gaussian(&p, 3).unwrap();
            assert!(m.degenerate_partner.is_none(), "lambda {lam}");
        }
    }

    #[test]
    fn weak_coupling_breaks_symmetry_with_mirror_partner() {
        let p = ModelParams::new(1000, 0.2, 0.6, 0.0).unwrap().at_control(2.0, LambdaConvention::Field).unwrap();
        let m = minimize_gaussian(&p, 3).unwrap();
        let partner = m.degenerate_partner.expect("asymmetric minimum");
        let (na, nb) = m.pair.populations();
        assert!(na > nb);
        assert!(m.energy < m.symmetric_energy);
        // re-minimize from the mirrored seed
        let x0 = [partner.width_a.ln(), partner.width_b.ln(), (nb / 1000.0).sqrt().acos()];
        let again = minimize(|x: &[f64]| unpack(1000.0, x).energy(&p), &x0, &SimplexOptions::default()).unwrap();
        let found = unpack(1000.0, &again.x);
        assert!((again.value - m.energy).abs() < 1e-7 * m.energy.abs());
        assert!((found.width_a - partner.width_a).abs() < 1e-3);
        assert!((found.populations().0 - nb).abs() < 1e-2 * 1000.0);
    }
}
