//! Closed-form mean-field branches of the two-mode model, and the energies of
//! the even/odd superpositions of the two broken-symmetry branches.
//!
//! All formulas use [`ModelParams::mean_field_couplings`], so the tilde
//! rescaling applies here when it is switched on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{LambdaConvention, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchLabel {
    Symmetric,
    Plus,
    Minus,
}

impl BranchLabel {
    pub fn name(self) -> &'static str {
        match self {
            BranchLabel::Symmetric => "symmetric",
            BranchLabel::Plus => "plus",
            BranchLabel::Minus => "minus",
        }
    }
}

/// Stationary point of the product-state energy with `alpha^2 + beta^2 = N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldBranch {
    pub alpha: f64,
    pub beta: f64,
    pub energy: f64,
    pub label: BranchLabel,
}

/// `U0/2 (a^4 + b^4) + U1 a^2 b^2 - 2 lambda a b` for real amplitudes.
pub fn mean_field_energy(params: &ModelParams, alpha: f64, beta: f64) -> f64 {
    let (u0, u1) = params.mean_field_couplings();
    let (a2, b2) = (alpha * alpha, beta * beta);
    0.5 * u0 * (a2 * a2 + b2 * b2) + u1 * a2 * b2 - 2.0 * params.lambda * alpha * beta
}

/// All real stationary branches, sorted by energy.
///
/// The symmetric branch always exists. For `|Lambda| < 1` two asymmetric
/// branches with `alpha_+ = beta_-` appear; for `U0 > U1` they carry
/// `beta < 0` and lie above the symmetric one.
pub fn mean_field_branches(params: &ModelParams) -> Result<Vec<MeanFieldBranch>> {
    params.validate()?;
    if params.lambda == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let n = params.n();
    let (u0, u1) = params.mean_field_couplings();
    let lam = params.lambda;
    let half = (n / 2.0).sqrt();
    let mut out = vec![MeanFieldBranch {
        alpha: half,
        beta: half,
        energy: 0.25 * n * n * (u0 + u1) - lam * n,
        label: BranchLabel::Symmetric,
    }];
    if u1 != u0 {
        let control = params.mean_field_control(LambdaConvention::TwoMode)?;
        if control.abs() < 1.0 {
            let root = (1.0 - control * control).sqrt();
            let hi = (0.5 * n * (1.0 + root)).sqrt();
            let lo = (0.5 * n * (1.0 - root)).sqrt();
            let sign = control.signum();
            let energy = 0.5 * u0 * n * n - lam * lam / (u1 - u0);
            out.push(MeanFieldBranch {
                alpha: hi,
                beta: sign * lo,
                energy,
                label: BranchLabel::Plus,
            });
            out.push(MeanFieldBranch {
                alpha: lo,
                beta: sign * hi,
                energy,
                label: BranchLabel::Minus,
            });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// Residuals of the Lagrange conditions
/// `(U0 a^2 + U1 b^2) a - lambda b = mu a` and its mirror, with `mu` taken
/// from the first equation. Returns `(max residual, |mu_1 - mu_2|)`.
pub fn stationarity_residual(params: &ModelParams, branch: &MeanFieldBranch) -> (f64, f64) {
    let (u0, u1) = params.mean_field_couplings();
    let (a, b, lam) = (branch.alpha, branch.beta, params.lambda);
    let lhs_a = (u0 * a * a + u1 * b * b) * a - lam * b;
    let lhs_b = (u0 * b * b + u1 * a * a) * b - lam * a;
    let mu_a = lhs_a / a;
    let mu_b = lhs_b / b;
    let res = (lhs_a - mu_a * a).abs().max((lhs_b - mu_a * b).abs());
    (res, (mu_a - mu_b).abs())
}

/// Overlap of the two broken-symmetry product states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub value: f64,
    pub ln_value: f64,
    /// Set when `ln_value < -745` and `value` has been flushed to zero.
    pub underflow: bool,
}

impl Overlap {
    fn from_ln(ln_value: f64) -> Self {
        let underflow = ln_value < -745.0;
        Overlap {
            value: if underflow { 0.0 } else { ln_value.exp() },
            ln_value,
            underflow,
        }
    }
}

fn cat_control(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let (u0, u1) = params.mean_field_couplings();
    if !(u1 > u0) {
        return Err(Error::Domain(format!("cat branches need U1 > U0 (U0 = {u0}, U1 = {u1})")));
    }
    let control = params.mean_field_control(LambdaConvention::TwoMode)?;
    if !(control > 0.0 && control < 1.0) {
        return Err(Error::Domain(format!("cat branches need 0 < Lambda < 1, got {control}")));
    }
    Ok(control)
}

/// `eps = Lambda^N`, evaluated in log space.
pub fn cat_overlap(params: &ModelParams) -> Result<Overlap> {
    let control = cat_control(params)?;
    Ok(Overlap::from_ln(params.n() * control.ln()))
}

/// `<psi_+|psi_->` from the branch amplitudes: `((a+ a- + b+ b-) / N)^N`.
pub fn explicit_overlap(params: &ModelParams, plus: &MeanFieldBranch, minus: &MeanFieldBranch) -> Overlap {
    let n = params.n();
    let single = (plus.alpha * minus.alpha + plus.beta * minus.beta) / n;
    Overlap::from_ln(n * single.ln())
}

/// Energies of `(|psi_+> +- |psi_->)` and the splitting diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatDiagnostics {
    pub overlap_eps: f64,
    pub ln_eps: f64,
    pub underflow: bool,
    pub e_plus: f64,
    pub e_minus: f64,
    /// `e_minus - e_plus`, computed without cancellation.
    pub delta_e: f64,
    /// `1 / eps` (infinite once eps underflows).
    pub cat_size: f64,
    /// `(N/2)(U1 - U0)`, the splitting for eps close to 1.
    pub delta_e_near_unity: f64,
    /// `eps |ln eps| N (U1 - U0)`, the splitting for eps << 1.
    pub delta_e_small_eps: f64,
}

/// `E_+- = (N^2/4) [2U0 - Lambda^2 (U1-U0) +- eps (3U0 - U1)] / (1 +- eps)`.
///
/// The splitting is evaluated as `2 eps (D - C) / (1 - eps^2)` with
/// `D - C = (N^2/4)(U1 - U0)(1 - Lambda^2)`, which needs no subtraction of
/// nearly equal energies at any eps.
pub fn cat_energies(params: &ModelParams) -> Result<CatDiagnostics> {
    let control = cat_control(params)?;
    let n = params.n();
    let (u0, u1) = params.mean_field_couplings();
    let du = u1 - u0;
    let ov = Overlap::from_ln(n * control.ln());
    let eps = ov.value;
    let quarter = 0.25 * n * n;
    let direct = quarter * (2.0 * u0 - control * control * du);
    let cross = quarter * (3.0 * u0 - u1);
    let e_plus = (direct + eps * cross) / (1.0 + eps);
    let e_minus = (direct - eps * cross) / (1.0 - eps);
    let one_minus_eps2 = -(2.0 * ov.ln_value).exp_m1();
    let delta_e = 2.0 * eps * quarter * du * (1.0 - control * control) / one_minus_eps2;
    Ok(CatDiagnostics {
        overlap_eps: eps,
        ln_eps: ov.ln_value,
        underflow: ov.underflow,
        e_plus,
        e_minus,
        delta_e,
        cat_size: (-ov.ln_value).exp(),
        delta_e_near_unity: 0.5 * n * du,
        delta_e_small_eps: eps * ov.ln_value.abs() * n * du,
    })
}
