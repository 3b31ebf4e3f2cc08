//! Numerical laboratory for the chiral-gauge (leptonic) magnetic monopole.
//!
//! The crate is organised by physical sector:
//!
//! - [`clifford`]: gamma matrices in the de Broglie representation, the
//!   sixteen-element Clifford basis, Dirac bilinears and the Weyl split.
//! - [`potentials`]: Maxwell equations with magnetic sources, duality
//!   rotations and the axial pseudo-potential in its two monopole gauges.
//! - [`symmetry`]: exact Fourier test fields, gauge and P/T/C maps, and the
//!   invariance certifier built on a registry of named transforms.
//! - [`classical`]: the Poincaré equation, its first integral and cone,
//!   Birkeland focusing and the eikonal Hamiltonian. Integrators are
//!   selected by name from a registry.
//! - [`angular`]: monopole angular-momentum operators, Wigner functions,
//!   angular eigenfunctions and the admissible Dirac numbers.
//! - [`nonlinear`]: the massive nonlinear equations, their plane-wave
//!   dispersion branches and the torsion/curvature identities.
//!
//! Public interfaces use real `(t, x, y, z)` coordinates with ħ = c = 1 unless
//! a [`Units`] value says otherwise. The imaginary-time convention `x₄ = ict`
//! is only used internally for index algebra.

pub mod angular;
pub mod classical;
pub mod clifford;
mod error;
pub mod nonlinear;
pub mod potentials;
pub mod sampling;
pub mod symmetry;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;

/// A spacetime point `(t, x, y, z)`.
pub type Point4 = [f64; 4];

/// Physical constants entering the couplings. Defaults to ħ = c = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub c: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0, c: 1.0 }
    }
}

impl Units {
    /// The coupling `g / ħc` multiplying the axial potential.
    pub fn coupling(&self, g: f64) -> f64 {
        g / (self.hbar * self.c)
    }
}
