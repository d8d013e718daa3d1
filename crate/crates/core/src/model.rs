use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_tfim, build_xxz, Hamiltonian};

/// Spin-chain family; the coupling is `h` (with `J = 1`) for TFIM and `Jz`
/// (with `J⊥ = 1`) for XXZ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Tfim,
    Xxz,
}

impl Model {
    pub fn hamiltonian(self, n: usize, coupling: f64) -> Result<Hamiltonian> {
        self.check_coupling(coupling)?;
        match self {
            Model::Tfim => build_tfim(n, 1.0, coupling),
            Model::Xxz => build_xxz(n, 1.0, coupling),
        }
    }

    pub fn check_coupling(self, coupling: f64) -> Result<()> {
        if !coupling.is_finite() {
            return Err(Error::Domain(format!("non-finite coupling {coupling}")));
        }
        if self == Model::Tfim && coupling < 0.0 {
            return Err(Error::Domain(format!(
                "TFIM field h must be >= 0, got {coupling}"
            )));
        }
        Ok(())
    }

    /// Sweep window placed symmetrically about the critical coupling.
    pub fn default_window(self) -> (f64, f64) {
        match self {
            Model::Tfim => (0.2, 1.8),
            Model::Xxz => (-1.8, -0.2),
        }
    }

    pub fn critical_coupling(self) -> f64 {
        match self {
            Model::Tfim => 1.0,
            Model::Xxz => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Tfim => "tfim",
            Model::Xxz => "xxz",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tfim" => Ok(Model::Tfim),
            "xxz" => Ok(Model::Xxz),
            other => Err(Error::Argument(format!("unknown model '{other}'"))),
        }
    }
}
