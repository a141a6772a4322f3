//! Numerical phase-space quantum mechanics toolbox.
//!
//! Builds projection operators (harmonic-oscillator Slater projections in the
//! Fock basis, spectral projections of Schrödinger operators on a grid),
//! transforms them to phase space (Wigner, Husimi, Weyl/Wick quantization),
//! and measures scaled Schatten, quantum Sobolev and quantum Besov norms,
//! together with sweep drivers that track how these quantities behave as the
//! effective Planck constant goes to zero.

pub mod error;
pub mod experiments;
pub mod fock;
pub mod grid;
pub mod linalg;
pub mod norms;
pub mod phasespace;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// The effective Planck constant ℏ > 0, with h = 2πℏ.
///
/// Threaded through every operator and norm; two operators can only be
/// combined when their parameters agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalParam {
    hbar: f64,
}

impl SemiclassicalParam {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be a positive finite real, got {hbar}"
            )));
        }
        Ok(Self { hbar })
    }

    #[inline]
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// h = 2πℏ.
    #[inline]
    pub fn h(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar
    }
}
