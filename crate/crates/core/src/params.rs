//! Physical parameters in trap units (energies in units of the trap quantum,
//! lengths in oscillator lengths) and the two conventions for the control
//! parameter Lambda.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which definition of the control parameter is meant.
///
/// * `TwoMode`: `Lambda = 2 lambda / [N (U1 - U0)]`
/// * `Field`: `Lambda = 2 lambda / (U1 - U0)`
///
/// The two differ by a factor of N and are never silently converted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LambdaConvention {
    TwoMode,
    Field,
}

impl LambdaConvention {
    pub fn name(self) -> &'static str {
        match self {
            LambdaConvention::TwoMode => "two_mode",
            LambdaConvention::Field => "field",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "two_mode" | "twomode" | "two-mode" => Some(LambdaConvention::TwoMode),
            "field" => Some(LambdaConvention::Field),
            _ => None,
        }
    }
}

/// All physical knobs of the model.
///
/// `u0` and `u1` are the bare couplings that enter the second-quantized
/// Hamiltonian. When `apply_tilde_rescale` is set, mean-field energy formulas
/// use `U (N - 1) / N` instead (see [`ModelParams::mean_field_couplings`]);
/// exact diagonalization always uses the bare values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_atoms: usize,
    pub u0: f64,
    pub u1: f64,
    pub lambda: f64,
    pub apply_tilde_rescale: bool,
}

impl ModelParams {
    pub fn new(n_atoms: usize, u0: f64, u1: f64, lambda: f64) -> Result<Self> {
        let p = ModelParams {
            n_atoms,
            u0,
            u1,
            lambda,
            apply_tilde_rescale: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tilde(mut self, on: bool) -> Self {
        self.apply_tilde_rescale = on;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::Domain("n_atoms must be at least 1".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        if !self.u0.is_finite() || !self.u1.is_finite() {
            return Err(Error::Domain("interaction strengths must be finite".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> f64 {
        self.n_atoms as f64
    }

    /// `(N - 1) / N` if the tilde rescaling is on, else 1.
    pub fn tilde_factor(&self) -> f64 {
        if self.apply_tilde_rescale {
            (self.n() - 1.0) / self.n()
        } else {
            1.0
        }
    }

    /// Couplings entering mean-field energy expressions.
    pub fn mean_field_couplings(&self) -> (f64, f64) {
        let f = self.tilde_factor();
        (self.u0 * f, self.u1 * f)
    }

    /// Control parameter computed from the bare couplings.
    pub fn control(&self, convention: LambdaConvention) -> Result<f64> {
        control_from(self.n(), self.u0, self.u1, self.lambda, convention)
    }

    /// Control parameter computed from the couplings used in mean-field
    /// formulas (equal to [`ModelParams::control`] when the tilde is off).
    pub fn mean_field_control(&self, convention: LambdaConvention) -> Result<f64> {
        let (u0, u1) = self.mean_field_couplings();
        control_from(self.n(), u0, u1, self.lambda, convention)
    }

    /// Inverse of [`ModelParams::control`]: the coupling lambda that yields
    /// the requested `Lambda` for these interactions.
    pub fn lambda_from_control(&self, control: f64, convention: LambdaConvention) -> Result<f64> {
        if self.u1 == self.u0 {
            return Err(Error::DegenerateInteraction(self.u0));
        }
        if !(control >= 0.0) || !control.is_finite() {
            return Err(Error::Domain(format!("Lambda must be >= 0, got {control}")));
        }
        let du = self.u1 - self.u0;
        Ok(match convention {
            LambdaConvention::TwoMode => control * self.n() * du / 2.0,
            LambdaConvention::Field => control * du / 2.0,
        })
    }

    /// Copy of these parameters with lambda set from a control value.
    pub fn at_control(&self, control: f64, convention: LambdaConvention) -> Result<Self> {
        Ok(self.with_lambda(self.lambda_from_control(control, convention)?))
    }
}

fn control_from(n: f64, u0: f64, u1: f64, lambda: f64, convention: LambdaConvention) -> Result<f64> {
    if u1 == u0 {
        return Err(Error::DegenerateInteraction(u0));
    }
    let du = u1 - u0;
    Ok(match convention {
        LambdaConvention::TwoMode => 2.0 * lambda / (n * du),
        LambdaConvention::Field => 2.0 * lambda / du,
    })
}

/// Thomas-Fermi transition point of the field model,
/// `[15 N / (8 pi)]^(2/5) (U1 + U0)^(-3/5)`, in the field convention.
pub fn field_transition_control(n_atoms: usize, u0: f64, u1: f64) -> f64 {
    (15.0 * n_atoms as f64 / (8.0 * std::f64::consts::PI)).powf(0.4) * (u1 + u0).powf(-0.6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_from_control_examples() {
        let p = ModelParams::new(1000, 0.001, 0.003, 0.0).unwrap();
        let l = p.lambda_from_control(2.0, LambdaConvention::TwoMode).unwrap();
        assert!((l - 2.0).abs() < 1e-14);
        assert_eq!(p.lambda_from_control(0.0, LambdaConvention::Field).unwrap(), 0.0);

        let p = ModelParams::new(1, 0.0, 2.0, 0.0).unwrap();
        assert_eq!(p.lambda_from_control(1.0, LambdaConvention::TwoMode).unwrap(), 1.0);
    }

    #[test]
    fn control_round_trip() {
        for conv in [LambdaConvention::TwoMode, LambdaConvention::Field] {
            let p = ModelParams::new(731, 0.0137, 0.0411, 0.0).unwrap();
            for &c in &[0.1, 0.77, 1.0, 3.5, 12.0] {
                let q = p.at_control(c, conv).unwrap();
                let back = q.control(conv).unwrap();
                assert!(((back - c) / c).abs() < 1e-14, "{conv:?} {c} {back}");
            }
        }
    }

    #[test]
    fn degenerate_and_domain_errors() {
        let p = ModelParams::new(10, 0.5, 0.5, 1.0).unwrap();
        assert!(matches!(p.control(LambdaConvention::TwoMode), Err(Error::DegenerateInteraction(_))));
        assert!(matches!(
            p.lambda_from_control(1.0, LambdaConvention::Field),
            Err(Error::DegenerateInteraction(_))
        ));
        let p = ModelParams::new(10, 0.5, 1.5, 1.0).unwrap();
        assert!(matches!(p.lambda_from_control(-1.0, LambdaConvention::Field), Err(Error::Domain(_))));
        assert!(ModelParams::new(0, 0.1, 0.2, 0.0).is_err());
        assert!(ModelParams::new(3, 0.1, 0.2, -1.0).is_err());
    }

    #[test]
    fn tilde_halves_interactions_at_two_atoms() {
        let p = ModelParams::new(2, 0.4, 1.2, 0.3).unwrap().with_tilde(true);
        let (a, b) = p.mean_field_couplings();
        assert_eq!((a, b), (0.2, 0.6));
        assert_eq!(p.with_tilde(false).mean_field_couplings(), (0.4, 1.2));
    }

    #[test]
    fn field_transition_matches_hand_value() {
        // (15 * 1000 / 8 pi)^(2/5) * 0.8^(-3/5)
        let v = field_transition_control(1000, 0.2, 0.6);
        let expect = (596.831_036_594_607_6_f64).powf(0.4) * 0.8_f64.powf(-0.6);
        assert!((v - expect).abs() < 1e-12);
    }
}
