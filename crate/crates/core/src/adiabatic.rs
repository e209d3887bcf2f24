//! Time evolution of the two-mode state while the laser coupling is ramped
//! down through the transition, with fidelities against the instantaneous
//! ground state and the lowest parity pair.
//!
//! Steps use the implicit midpoint rule (Cayley form)
//! `(1 + i dt/2 H) psi' = (1 - i dt/2 H) psi` with `H` taken at the step
//! midpoint, which is exactly unitary and keeps `T_AB` parity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{LambdaConvention, ModelParams};
use crate::tridiag::{TridiagLu, TridiagonalHamiltonian};
use crate::twomode::exact::{build_hamiltonian, diagonalize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RampShape {
    Linear,
    Smoothstep,
}

impl RampShape {
    pub fn name(self) -> &'static str {
        match self {
            RampShape::Linear => "linear",
            RampShape::Smoothstep => "smoothstep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "linear" => Some(RampShape::Linear),
            "smoothstep" => Some(RampShape::Smoothstep),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSchedule {
    pub lambda_start: f64,
    pub lambda_end: f64,
    /// In trap periods' time units; 0 is a sudden quench.
    pub duration: f64,
    pub shape: RampShape,
    pub convention: LambdaConvention,
}

impl RampSchedule {
    pub fn new(lambda_start: f64, lambda_end: f64, duration: f64, shape: RampShape) -> Result<Self> {
        let r = RampSchedule {
            lambda_start,
            lambda_end,
            duration,
            shape,
            convention: LambdaConvention::TwoMode,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_end > 0.0 && self.lambda_start >= self.lambda_end && self.lambda_start.is_finite()) {
            return Err(Error::Domain(format!(
                "ramp needs Lambda_start >= Lambda_end > 0, got {} -> {}",
                self.lambda_start, self.lambda_end
            )));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::Domain(format!("ramp duration must be >= 0, got {}", self.duration)));
        }
        Ok(())
    }

    /// Control value at time `t`, clamped to the ramp interval.
    pub fn control_at(&self, t: f64) -> f64 {
        if self.duration == 0.0 {
            return self.lambda_end;
        }
        let s = (t / self.duration).clamp(0.0, 1.0);
        let s = match self.shape {
            RampShape::Linear => s,
            RampShape::Smoothstep => s * s * (3.0 - 2.0 * s),
        };
        self.lambda_start + (self.lambda_end - self.lambda_start) * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSample {
    pub t: f64,
    pub control: f64,
    pub fid0: f64,
    pub fid01: f64,
    pub norm: f64,
}

/// `H(lambda) = diag + lambda * hop`: the diagonal does not depend on lambda.
struct Pieces {
    diag: Vec<f64>,
    hop: Vec<f64>,
}

impl Pieces {
    fn new(params: &ModelParams) -> Result<Self> {
        let h = build_hamiltonian(&params.with_lambda(1.0))?;
        Ok(Pieces {
            diag: h.diag,
            hop: h.offdiag,
        })
    }

    fn at(&self, lambda: f64) -> TridiagonalHamiltonian {
        TridiagonalHamiltonian {
            diag: self.diag.clone(),
            offdiag: self.hop.iter().map(|x| lambda * x).collect(),
        }
    }
}

fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn overlap_sqr(phi: &[f64], psi: &[Complex64]) -> f64 {
    psi.iter().zip(phi).map(|(z, p)| z * p).sum::<Complex64>().norm_sqr()
}

fn fidelities(h: &TridiagonalHamiltonian, psi: &[Complex64]) -> Result<(f64, f64)> {
    let k = 2.min(h.dim());
    let spec = diagonalize(h, k, true)?;
    let vecs = spec.eigenvectors.ok_or(Error::MissingEigenvectors)?;
    let f0 = overlap_sqr(&vecs[0], psi);
    let f1 = vecs.get(1).map_or(0.0, |v| overlap_sqr(v, psi));
    Ok((f0, f0 + f1))
}

/// `E_N - E_0` of a tridiagonal matrix.
pub fn spectral_width(h: &TridiagonalHamiltonian) -> Result<f64> {
    Ok(h.bisect_eigenvalue(h.dim() - 1)? - h.bisect_eigenvalue(0)?)
}

/// One implicit-midpoint step of `i dpsi/dt = H psi`.
pub fn cayley_step(h: &TridiagonalHamiltonian, psi: &mut [Complex64], dt: f64) {
    let n = psi.len();
    let a = Complex64::new(0.0, 0.5 * dt);
    let hpsi: Vec<Complex64> = (0..n)
        .map(|m| {
            let mut v = psi[m] * h.diag[m];
            if m > 0 {
                v += psi[m - 1] * h.offdiag[m - 1];
            }
            if m + 1 < n {
                v += psi[m + 1] * h.offdiag[m];
            }
            v
        })
        .collect();
    for m in 0..n {
        psi[m] -= a * hpsi[m];
    }
    let off: Vec<Complex64> = h.offdiag.iter().map(|&e| a * e).collect();
    let diag: Vec<Complex64> = h.diag.iter().map(|&d| Complex64::new(1.0, 0.0) + a * d).collect();
    TridiagLu::factor(&off, &diag, &off, f64::MIN_POSITIVE).solve_in_place(psi);
}

/// Evolves the ground state at `ramp.lambda_start` through the ramp.
///
/// Returns `samples + 1` rows at evenly spaced times (two rows for a sudden
/// quench). `dt` must satisfy `dt <= 0.05 / (E_N - E_0)` at the start of
/// the ramp and is shrunk so that the duration is a whole number of steps.
pub fn evolve(params: &ModelParams, ramp: &RampSchedule, dt: f64, samples: usize) -> Result<Vec<EvolutionSample>> {
    params.validate()?;
    ramp.validate()?;
    let pieces = Pieces::new(params)?;
    let lam = |control: f64| params.lambda_from_control(control, ramp.convention);
    let h0 = pieces.at(lam(ramp.lambda_start)?);
    let width = spectral_width(&h0)?;
    if !(dt > 0.0) || dt > 0.05 / width {
        return Err(Error::Domain(format!(
            "dt = {dt} does not resolve the spectral width {width} (need dt <= {})",
            0.05 / width
        )));
    }
    let start = diagonalize(&h0, 1, true)?;
    let mut psi: Vec<Complex64> = start.eigenvectors.ok_or(Error::MissingEigenvectors)?[0]
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();

    let mut out = vec![EvolutionSample {
        t: 0.0,
        control: ramp.lambda_start,
        fid0: 1.0,
        fid01: 1.0,
        norm: norm(&psi),
    }];
    if ramp.duration == 0.0 {
        let h = pieces.at(lam(ramp.lambda_end)?);
        let (f0, f01) = fidelities(&h, &psi)?;
        out.push(EvolutionSample {
            t: 0.0,
            control: ramp.lambda_end,
            fid0: f0,
            fid01: f01,
            norm: norm(&psi),
        });
        return Ok(out);
    }

    let samples = samples.max(1);
    let steps = ((ramp.duration / dt).ceil() as usize).max(samples);
    let steps = steps.div_ceil(samples) * samples;
    let dt = ramp.duration / steps as f64;
    let per_sample = steps / samples;
    let constant = ramp.lambda_start == ramp.lambda_end;
    let mut before = norm(&psi);
    for k in 0..steps {
        let t = k as f64 * dt;
        let h = if constant { h0.clone() } else { pieces.at(lam(ramp.control_at(t + 0.5 * dt))?) };
        cayley_step(&h, &mut psi, dt);
        let after = norm(&psi);
        let drift = (after - before).abs();
        if drift > 1e-12 {
            return Err(Error::StepRejected { t, drift });
        }
        before = after;
        if (k + 1) % per_sample == 0 {
            let t = (k + 1) as f64 * dt;
            let control = ramp.control_at(t);
            let h = pieces.at(lam(control)?);
            let (f0, f01) = fidelities(&h, &psi)?;
            out.push(EvolutionSample {
                t,
                control,
                fid0: f0,
                fid01: f01,
                norm: after,
            });
        }
    }
    Ok(out)
}

/// Largest time step allowed at the start of `ramp`.
pub fn max_time_step(params: &ModelParams, ramp: &RampSchedule) -> Result<f64> {
    let lam = params.lambda_from_control(ramp.lambda_start, ramp.convention)?;
    Ok(0.05 / spectral_width(&build_hamiltonian(&params.with_lambda(lam))?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ModelParams {
        ModelParams::new(20, 0.02, 0.06, 0.0).unwrap()
    }

    #[test]
    fn ramp_shapes() {
        let r = RampSchedule::new(1.5, 0.7, 10.0, RampShape::Linear).unwrap();
        assert_eq!(r.control_at(0.0), 1.5);
        assert!((r.control_at(5.0) - 1.1).abs() < 1e-15);
        assert_eq!(r.control_at(20.0), 0.7);
        let s = RampSchedule { shape: RampShape::Smoothstep, ..r };
        assert!((s.control_at(5.0) - 1.1).abs() < 1e-15);
        assert!(s.control_at(1.0) > r.control_at(1.0));
        assert!(RampSchedule::new(0.5, 0.7, 1.0, RampShape::Linear).is_err());
        assert!(RampSchedule::new(1.5, 0.7, -1.0, RampShape::Linear).is_err());
    }

    #[test]
    fn constant_coupling_keeps_the_ground_state() {
        let p = small();
        let r = RampSchedule::new(1.2, 1.2, 5.0, RampShape::Linear).unwrap();
        let dt = max_time_step(&p, &r).unwrap();
        let rows = evolve(&p, &r, dt, 10).unwrap();
        assert_eq!(rows.len(), 11);
        for row in rows {
            assert!((row.fid0 - 1.0).abs() < 1e-8, "{row:?}");
            assert!((row.norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sudden_quench_keeps_the_state() {
        let p = small();
        let r = RampSchedule::new(1.5, 0.7, 0.0, RampShape::Linear).unwrap();
        let rows = evolve(&p, &r, 1e-4, 4).unwrap();
        let h0 = build_hamiltonian(&p.at_control(1.5, LambdaConvention::TwoMode).unwrap()).unwrap();
        let h1 = build_hamiltonian(&p.at_control(0.7, LambdaConvention::TwoMode).unwrap()).unwrap();
        let a = diagonalize(&h0, 1, true).unwrap().eigenvectors.unwrap().remove(0);
        let b = diagonalize(&h1, 1, true).unwrap().eigenvectors.unwrap().remove(0);
        let want = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>().powi(2);
        assert_eq!(rows.len(), 2);
        assert!((rows[1].fid0 - want).abs() < 1e-12);
    }

    #[test]
    fn coarse_steps_are_refused() {
        let p = small();
        let r = RampSchedule::new(1.5, 0.7, 1.0, RampShape::Linear).unwrap();
        let dt = max_time_step(&p, &r).unwrap();
        assert!(evolve(&p, &r, 1.01 * dt, 2).is_err());
    }

    #[test]
    fn quench_conserves_energy_and_parity() {
        let p = small().at_control(0.8, LambdaConvention::TwoMode).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let n = h.dim();
        // even, non-stationary start
        let mut psi: Vec<Complex64> = (0..n)
            .map(|m| {
                let x = m as f64 - 10.0;
                Complex64::new((-x * x / 8.0).exp(), 0.0)
            })
            .collect();
        let k = norm(&psi);
        psi.iter_mut().for_each(|z| *z /= k);
        let energy = |psi: &[Complex64]| {
            let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
            let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            dot(&re, &h.apply(&re)) + dot(&im, &h.apply(&im))
        };
        let e0 = energy(&psi);
        for _ in 0..2000 {
            cayley_step(&h, &mut psi, 0.01);
        }
        assert!(((energy(&psi) - e0) / e0).abs() < 1e-8);
        let odd: f64 = (0..n).map(|m| (psi[m] - psi[n - 1 - m]).norm_sqr()).sum::<f64>() / 2.0;
        assert!(odd < 1e-16, "{odd}");
        assert!((norm(&psi) - 1.0).abs() < 1e-10);
    }
}
