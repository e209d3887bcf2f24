//! Energies of the even and odd superpositions of two product states
//! `|psi_+>`, `|psi_->` built from field-model orbital pairs.
//!
//! With the single-particle overlap `s = (1/N) int (a+ a- + b+ b-)`, the
//! product states obey `<+|-> = s^N` and `<+|H|-> = s^(N-2) Y` where
//! `Y = s [int a+ (T+V) a- + b+ (T+V) b- - lambda (a+ b- + b+ a-)]
//!    + U0/2 int [(a+ a-)^2 + (b+ b-)^2] + U1 int a+ a- b+ b-`.
//! Writing `D = E_mid s^2 - Y`, the even and odd energies are
//! `E_mid -+ s^(N-2) D / (1 +- s^N)`, so the strict ordering
//! `E_+ < E_mid < E_-` is equivalent to `D > 0`.

use serde::{Deserialize, Serialize};

use super::gaussian::{GaussSum, GaussianPair};
use super::grid::{energy_functional, one_body, RadialProfile};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Integrals entering the superposition energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairIntegrals {
    /// `<psi_+|H|psi_+>`.
    pub e_mid: f64,
    /// `int (a+ a- + b+ b-)`.
    pub overlap: f64,
    /// `int a+ (T+V) a- + b+ (T+V) b-`.
    pub one_body: f64,
    /// `int (a+ b- + b+ a-)`.
    pub laser: f64,
    /// `int (a+ a-)^2 + (b+ b-)^2`.
    pub same: f64,
    /// `int a+ a- b+ b-`.
    pub cross: f64,
}

impl PairIntegrals {
    pub fn from_gaussians(params: &ModelParams, plus: &GaussianPair, minus: &GaussianPair) -> Self {
        let (ap, bp) = plus.orbitals();
        let (am, bm) = minus.orbitals();
        Self::from_orbitals(params, (&ap, &bp), (&am, &bm))
    }

    pub fn from_orbitals(params: &ModelParams, plus: (&GaussSum, &GaussSum), minus: (&GaussSum, &GaussSum)) -> Self {
        let (ap, bp) = plus;
        let (am, bm) = minus;
        PairIntegrals {
            e_mid: super::gaussian::orbital_energy(params, ap, bp),
            overlap: ap.overlap(am) + bp.overlap(bm),
            one_body: ap.one_body(am) + bp.one_body(bm),
            laser: ap.overlap(bm) + bp.overlap(am),
            same: GaussSum::quartic(ap, am, ap, am) + GaussSum::quartic(bp, bm, bp, bm),
            cross: GaussSum::quartic(ap, am, bp, bm),
        }
    }

    pub fn from_profiles(params: &ModelParams, plus: &RadialProfile, minus: &RadialProfile) -> Result<Self> {
        let prod = |f: &[f64], g: &[f64]| -> Vec<f64> { f.iter().zip(g).map(|(a, b)| a * b).collect() };
        let aa = prod(&plus.alpha, &minus.alpha);
        let bb = prod(&plus.beta, &minus.beta);
        Ok(PairIntegrals {
            e_mid: energy_functional(plus, params)?,
            overlap: plus.integrate_product(&plus.alpha, &minus.alpha) + plus.integrate_product(&plus.beta, &minus.beta),
            one_body: one_body(plus, &plus.alpha, &minus.alpha) + one_body(plus, &plus.beta, &minus.beta),
            laser: plus.integrate_product(&plus.alpha, &minus.beta) + plus.integrate_product(&plus.beta, &minus.alpha),
            same: plus.integrate_product(&aa, &aa) + plus.integrate_product(&bb, &bb),
            cross: plus.integrate_product(&aa, &bb),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatOrdering {
    pub e_plus: f64,
    pub e_mid: f64,
    pub e_minus: f64,
    /// Single-particle overlap `s`.
    pub single_overlap: f64,
    /// `N ln s`, the log of `<psi_+|psi_->`.
    pub ln_overlap: f64,
    /// `D = E_mid s^2 - Y`; the ordering is strict iff `D > 0`.
    pub margin: f64,
    /// `ln(s^(N-2) |D|)`, the log of the gaps' common factor.
    pub ln_gap_scale: f64,
}

impl CatOrdering {
    pub fn is_strictly_ordered(&self) -> bool {
        self.margin > 0.0
    }
}

pub fn cat_energy_ordering(params: &ModelParams, ints: &PairIntegrals) -> Result<CatOrdering> {
    let n = params.n();
    let (u0, u1) = params.mean_field_couplings();
    let s = ints.overlap / n;
    if !(s < 1.0 - 1e-8) {
        return Err(Error::NotCatRegime(s));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("single-particle overlap {s} is not positive")));
    }
    let y = s * (ints.one_body - params.lambda * ints.laser) + 0.5 * u0 * ints.same + u1 * ints.cross;
    let margin = ints.e_mid * s * s - y;
    let ln_s = s.ln();
    let ln_overlap = n * ln_s;
    let ln_gap_scale = (n - 2.0) * ln_s + margin.abs().ln();
    let scale = margin.signum() * ln_gap_scale.exp();
    let sn = ln_overlap.exp();
    Ok(CatOrdering {
        e_plus: ints.e_mid - scale / (1.0 + sn),
        e_mid: ints.e_mid,
        e_minus: ints.e_mid + scale / -(ln_overlap.exp_m1()),
        single_overlap: s,
        ln_overlap,
        margin,
        ln_gap_scale,
    })
}
