use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("interaction strengths are degenerate (U1 = U0 = {0}); Lambda is undefined")]
    DegenerateInteraction(f64),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("coupling lambda = 0: mean-field amplitude phases are unconstrained")]
    ZeroCoupling,

    #[error("matrix elements overflow for N = {n}")]
    Overflow { n: usize },

    #[error("eigensolver failed to converge after {iterations} iterations: {what}")]
    Convergence { iterations: usize, what: String },

    #[error("spectrum carries no eigenvectors")]
    MissingEigenvectors,

    #[error("profile normalization {found} deviates from N = {expected}")]
    Unnormalized { expected: f64, found: f64 },

    #[error("could not bracket the chemical potential in [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("optimizer stalled after {evaluations} evaluations (best energy {best})")]
    OptimizerStall { evaluations: usize, best: f64 },

    #[error("relaxation diverged at iteration {iteration}: energy {from} -> {to}")]
    Divergence { iteration: usize, from: f64, to: f64 },

    #[error("step rejected at t = {t}: norm drift {drift:e} per step")]
    StepRejected { t: f64, drift: f64 },

    #[error("overlap {0} too close to 1: branches are not distinct")]
    NotCatRegime(f64),

    #[error("{failed} sweep row(s) failed: {details}")]
    SweepRows { failed: usize, details: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
