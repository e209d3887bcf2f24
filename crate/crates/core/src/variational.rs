//! Number-resolved variational model: the state is a superposition
//! `sum_m q_m |m atoms in phi_m>_A |N-m atoms in phi_{N-m}>_B` with one
//! Gaussian (optionally two) orbital shape per occupation number, and the
//! amplitudes `q_m` solve a tridiagonal eigenproblem in `m`.
//!
//! Shapes `phi_m` are unit-normalized; the populated orbital is
//! `sqrt(m) phi_m`. The diagonal is the exact Fock-state expectation
//!
//! `E_m = m t_m + (N-m) t_{N-m} + U0/2 [m(m-1) g_m + (N-m)(N-m-1) g_{N-m}]
//!        + U1 m (N-m) int phi_m^2 phi_{N-m}^2`
//!
//! and the couplings are `-lambda K_m` with
//! `K_m = sqrt((m+1)(N-m)) int phi_{m+1} phi_{N-m-1}` and its partner
//! `L_{m+1} = sqrt((m+1)(N-m)) int phi_m phi_{N-m}`, averaged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::gaussian::GaussSum;
use crate::optimize::{minimize, SimplexOptions};
use crate::params::{LambdaConvention, ModelParams};
use crate::tridiag::TridiagonalHamiltonian;
use crate::twomode::exact::{diagonalize, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitalAnsatz {
    SingleGaussian,
    TwoGaussian,
}

/// Coefficient of the laser term in the per-orbital equations: the orbital
/// pair for occupation `m` minimizes `E_m - 2 kappa int alpha_m alpha_{N-m}`
/// with `kappa` equal to `lambda` or `2 lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitalCoupling {
    Lambda,
    TwoLambda,
}

impl OrbitalCoupling {
    pub fn factor(self) -> f64 {
        match self {
            OrbitalCoupling::Lambda => 1.0,
            OrbitalCoupling::TwoLambda => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OrbitalCoupling::Lambda => "lambda",
            OrbitalCoupling::TwoLambda => "2lambda",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "lambda" | "1" => Some(OrbitalCoupling::Lambda),
            "2lambda" | "2" => Some(OrbitalCoupling::TwoLambda),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalOptions {
    pub ansatz: OrbitalAnsatz,
    pub coupling: OrbitalCoupling,
    /// Solve every `stride`-th occupation and interpolate in between;
    /// `None` picks `ceil(N / 200)`, `Some(1)` is full resolution.
    pub stride: Option<usize>,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        VariationalOptions {
            ansatz: OrbitalAnsatz::SingleGaussian,
            coupling: OrbitalCoupling::TwoLambda,
            stride: None,
        }
    }
}

/// Unit-normalized orbital shapes for `m = 0..=N`, mirror-symmetric by
/// construction. `phi_0` carries no atoms and copies `phi_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalFamily {
    pub shapes: Vec<GaussSum>,
    /// Occupations whose optimization failed and were interpolated.
    pub flagged: Vec<usize>,
}

impl OrbitalFamily {
    pub fn n_atoms(&self) -> usize {
        self.shapes.len() - 1
    }

    /// All shapes equal to one Gaussian of width `width`.
    pub fn uniform(n_atoms: usize, width: f64) -> Self {
        OrbitalFamily {
            shapes: vec![GaussSum::single(1.0, width); n_atoms + 1],
            flagged: Vec::new(),
        }
    }

    /// Width `a` with `<r^2> = 3 a^2`; the Gaussian width itself for the
    /// single-Gaussian ansatz.
    pub fn widths(&self) -> Vec<f64> {
        self.shapes.iter().map(effective_width).collect()
    }

    /// Peak density `m phi_m(0)^2` of the populated orbital.
    pub fn peak_density(&self, m: usize) -> f64 {
        m as f64 * self.shapes[m].eval(0.0).powi(2)
    }
}

fn effective_width(s: &GaussSum) -> f64 {
    // <r^2> = sum c c' (3 / (2 g)) (pi / g)^(3/2) with g the pair exponent
    let mut r2 = 0.0;
    for &(c1, g1) in &s.terms {
        for &(c2, g2) in &s.terms {
            let g = g1 + g2;
            r2 += c1 * c2 * 1.5 / g * (std::f64::consts::PI / g).powf(1.5);
        }
    }
    (r2 / s.norm() / 3.0).sqrt()
}

fn one_body(s: &GaussSum) -> f64 {
    s.one_body(s)
}

fn quartic(s: &GaussSum) -> f64 {
    GaussSum::quartic(s, s, s, s)
}

/// Unit-normalized shape from optimizer coordinates.
fn shape(ansatz: OrbitalAnsatz, x: &[f64]) -> GaussSum {
    match ansatz {
        OrbitalAnsatz::SingleGaussian => GaussSum::single(1.0, x[0].exp()),
        OrbitalAnsatz::TwoGaussian => {
            let (c, s) = (x[2].cos(), x[2].sin());
            let a = GaussSum::single(1.0, x[0].exp());
            let b = GaussSum::single(1.0, x[1].exp());
            let raw = GaussSum {
                terms: vec![(c * a.terms[0].0, a.terms[0].1), (s * b.terms[0].0, b.terms[0].1)],
            };
            let k = raw.norm().sqrt();
            GaussSum {
                terms: raw.terms.iter().map(|&(cc, g)| (cc / k, g)).collect(),
            }
        }
    }
}

fn dims(ansatz: OrbitalAnsatz) -> usize {
    match ansatz {
        OrbitalAnsatz::SingleGaussian => 1,
        OrbitalAnsatz::TwoGaussian => 3,
    }
}

/// Diagonal element `E_m` for the given shapes.
pub fn diagonal_energy(params: &ModelParams, m: usize, own: &GaussSum, partner: &GaussSum) -> f64 {
    let (mf, nf) = (m as f64, (params.n_atoms - m) as f64);
    mf * one_body(own) + nf * one_body(partner)
        + 0.5 * params.u0 * (mf * (mf - 1.0) * quartic(own) + nf * (nf - 1.0) * quartic(partner))
        + params.u1 * mf * nf * GaussSum::quartic(own, own, partner, partner)
}

fn pair_energy(params: &ModelParams, kappa: f64, m: usize, own: &GaussSum, partner: &GaussSum) -> f64 {
    let (mf, nf) = (m as f64, (params.n_atoms - m) as f64);
    diagonal_energy(params, m, own, partner) - 2.0 * kappa * (mf * nf).sqrt() * own.overlap(partner)
}

fn coarse_points(n: usize, stride: usize) -> Vec<usize> {
    let half = n / 2;
    let mut pts: Vec<usize> = (0..=half).step_by(stride.max(1)).collect();
    if *pts.last().unwrap() != half {
        pts.push(half);
    }
    if n >= 2 && !pts.contains(&1) {
        pts.insert(1, 1);
    }
    pts
}

/// Optimizer coordinates of `(phi_m, phi_{N-m})`.
type Coords = (Vec<f64>, Vec<f64>);

/// Solves the orbital pair `(phi_m, phi_{N-m})` for `m <= N/2` with warm
/// starts, interpolates skipped and failed occupations in the optimizer
/// coordinates, and mirrors.
pub fn solve_orbitals(params: &ModelParams, opts: &VariationalOptions) -> Result<OrbitalFamily> {
    params.validate()?;
    let n = params.n_atoms;
    if n < 10 {
        return Err(Error::Domain(format!("the variational model needs N >= 10, got {n}")));
    }
    let kappa = opts.coupling.factor() * params.lambda;
    let d = dims(opts.ansatz);
    let stride = opts.stride.unwrap_or_else(|| n.div_ceil(200)).max(1);
    let points = coarse_points(n, stride);
    let nm = SimplexOptions {
        tolerance: 1e-13,
        ..Default::default()
    };

    let w0 = {
        let u = params.u0 + params.u1;
        let osc = 0.5f64.sqrt();
        if u > 0.0 {
            osc.max(crate::field::thomas_fermi::tf_radius(n as f64, u) / 7f64.sqrt())
        } else {
            osc
        }
    };
    let seed_one: Vec<f64> = match opts.ansatz {
        OrbitalAnsatz::SingleGaussian => vec![w0.ln()],
        OrbitalAnsatz::TwoGaussian => vec![w0.ln(), (1.5 * w0).ln(), 0.2],
    };

    // coordinates of (phi_m, phi_{N-m}) per solved point
    let mut solved: Vec<Option<Coords>> = Vec::with_capacity(points.len());
    let mut warm = (seed_one.clone(), seed_one.clone());
    for &m in &points {
        let res = if m == 0 {
            let f = |x: &[f64]| {
                let s = shape(opts.ansatz, x);
                pair_energy(params, kappa, 0, &s, &s)
            };
            minimize(f, &warm.1, &nm).map(|r| (r.x.clone(), r.x))
        } else if 2 * m == n {
            let f = |x: &[f64]| {
                let s = shape(opts.ansatz, x);
                pair_energy(params, kappa, m, &s, &s)
            };
            minimize(f, &warm.0, &nm).map(|r| (r.x.clone(), r.x))
        } else {
            let f = |x: &[f64]| {
                let own = shape(opts.ansatz, &x[..d]);
                let partner = shape(opts.ansatz, &x[d..]);
                pair_energy(params, kappa, m, &own, &partner)
            };
            let x0: Vec<f64> = warm.0.iter().chain(&warm.1).copied().collect();
            minimize(f, &x0, &nm).map(|r| (r.x[..d].to_vec(), r.x[d..].to_vec()))
        };
        match res {
            Ok(pair) => {
                warm = pair.clone();
                solved.push(Some(pair));
            }
            Err(_) => solved.push(None),
        }
    }

    let mut flagged: Vec<usize> = points.iter().zip(&solved).filter(|(_, s)| s.is_none()).map(|(m, _)| *m).collect();
    let good: Vec<(usize, &Coords)> =
        points.iter().zip(&solved).filter_map(|(m, s)| s.as_ref().map(|p| (*m, p))).collect();
    if good.is_empty() {
        return Err(Error::OptimizerStall {
            evaluations: 0,
            best: f64::NAN,
        });
    }

    // m = 0 is unpopulated; its coordinates never feed an interpolation
    let anchors: Vec<(usize, &Coords)> = good.iter().filter(|(m, _)| *m > 0).copied().collect();
    let interp = |m: usize, which: usize| -> Vec<f64> {
        let pick = |p: &Coords| if which == 0 { p.0.clone() } else { p.1.clone() };
        let hi = anchors.iter().position(|(k, _)| *k >= m);
        match hi {
            Some(0) => pick(anchors[0].1),
            None => pick(anchors[anchors.len() - 1].1),
            Some(j) => {
                let (m0, p0) = anchors[j - 1];
                let (m1, p1) = anchors[j];
                let t = (m - m0) as f64 / (m1 - m0) as f64;
                pick(p0).iter().zip(pick(p1)).map(|(a, b)| a + t * (b - a)).collect()
            }
        }
    };

    let mut shapes = vec![GaussSum { terms: Vec::new() }; n + 1];
    for m in 1..=n / 2 {
        shapes[m] = shape(opts.ansatz, &interp(m, 0));
        shapes[n - m] = shape(opts.ansatz, &interp(m, 1));
    }
    shapes[n] = match good.iter().find(|(m, _)| *m == 0) {
        Some((_, p)) => shape(opts.ansatz, &p.1),
        None => {
            flagged.push(0);
            shapes[n - 1].clone()
        }
    };
    shapes[0] = shapes[1].clone();
    flagged.sort_unstable();
    Ok(OrbitalFamily { shapes, flagged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QHamiltonian {
    pub matrix: TridiagonalHamiltonian,
    /// `max |lambda K_m - lambda L_{m+1}|` before averaging.
    pub asymmetry: f64,
}

impl QHamiltonian {
    /// Asymmetries above 1e-8 are expected at finite N and only reported.
    pub fn is_asymmetric(&self) -> bool {
        self.asymmetry > 1e-8
    }
}

pub fn build_q_hamiltonian(family: &OrbitalFamily, params: &ModelParams) -> Result<QHamiltonian> {
    params.validate()?;
    let n = params.n_atoms;
    if family.n_atoms() != n {
        return Err(Error::Domain(format!("orbital family has N = {}, parameters N = {n}", family.n_atoms())));
    }
    let s = &family.shapes;
    let diag: Vec<f64> = (0..=n).map(|m| diagonal_energy(params, m, &s[m], &s[n - m])).collect();
    let mut off = Vec::with_capacity(n);
    let mut asymmetry: f64 = 0.0;
    for m in 0..n {
        let c = (((m + 1) * (n - m)) as f64).sqrt();
        let k = c * s[m + 1].overlap(&s[n - m - 1]);
        let l = c * s[m].overlap(&s[n - m]);
        asymmetry = asymmetry.max(params.lambda * (k - l).abs());
        off.push(-params.lambda * 0.5 * (k + l));
    }
    Ok(QHamiltonian {
        matrix: TridiagonalHamiltonian::new(diag, off)?,
        asymmetry,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalState {
    pub widths: Vec<f64>,
    pub qvec: Vec<f64>,
    pub energy: f64,
    pub asymmetry: f64,
    pub flagged: Vec<usize>,
}

pub fn ground_state(params: &ModelParams, opts: &VariationalOptions) -> Result<VariationalState> {
    let family = solve_orbitals(params, opts)?;
    let q = build_q_hamiltonian(&family, params)?;
    let spec = diagonalize(&q.matrix, 1, true)?;
    let qvec = spec.eigenvectors.ok_or(Error::MissingEigenvectors)?.swap_remove(0);
    Ok(VariationalState {
        widths: family.widths(),
        qvec,
        energy: spec.eigenvalues[0],
        asymmetry: q.asymmetry,
        flagged: family.flagged,
    })
}

fn row(params: &ModelParams, control: f64, opts: &VariationalOptions) -> Result<SweepRow> {
    let p = params.at_control(control, LambdaConvention::Field)?;
    let family = solve_orbitals(&p, opts)?;
    let q = build_q_hamiltonian(&family, &p)?;
    let spec = diagonalize(&q.matrix, 4.min(p.n_atoms + 1), false)?;
    Ok(SweepRow::from_spectrum(control, p.lambda, &spec))
}

/// Gap table over a field-convention `Lambda` grid, rows in grid order;
/// failed rows carry their error instead of aborting the sweep.
pub fn spectrum_and_figures(params: &ModelParams, grid: &[f64], opts: &VariationalOptions) -> Vec<SweepRow> {
    grid.par_iter()
        .map(|&control| {
            row(params, control, opts).unwrap_or_else(|e| {
                let lam = params.lambda_from_control(control, LambdaConvention::Field).unwrap_or(f64::NAN);
                SweepRow::failed(control, lam, &e)
            })
        })
        .collect()
}
