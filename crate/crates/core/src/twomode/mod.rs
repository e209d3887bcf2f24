//! The two-mode model: exact Fock-space diagonalization and the closed-form
//! mean-field and cat-state analytics.

pub mod exact;
pub mod meanfield;
