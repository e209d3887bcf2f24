//! Field-theoretical mean field in an isotropic harmonic trap.

pub mod gaussian;
pub mod grid;
pub mod ordering;
pub mod relax;
pub mod thomas_fermi;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchKind {
    Symmetric,
    Plus,
    Minus,
}

impl BranchKind {
    pub fn name(self) -> &'static str {
        match self {
            BranchKind::Symmetric => "symmetric",
            BranchKind::Plus => "plus",
            BranchKind::Minus => "minus",
        }
    }
}
