//! Geometric-optics limit of the monopole equation.

use serde::{Deserialize, Serialize};

use super::OdeSystem;
use crate::potentials::{fd_gradient, norm, AxialPotential, Vec3};
use crate::{Point4, Result};

/// Kinematic quantities at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EikonalPoint {
    /// `E = c|p|`.
    pub energy: f64,
    /// Linear momentum `p = P + (g/c)B`.
    pub p: Vec3,
    /// `H = c|p| − gW`.
    pub h: f64,
}

/// Evaluates the eikonal Hamiltonian for canonical momentum `P` at `point`.
pub fn eikonal_hamiltonian(big_p: &Vec3, pot: &AxialPotential, point: &Point4, g: f64, c: f64) -> Result<EikonalPoint> {
    let (b, w) = pot.eval(point)?;
    let p = [big_p[0] + g / c * b[0], big_p[1] + g / c * b[1], big_p[2] + g / c * b[2]];
    let energy = c * norm(&p);
    Ok(EikonalPoint {
        energy,
        p,
        h: energy - g * w,
    })
}

/// Hamilton's equations for `H(r, P)` with `∂H/∂r` taken by fourth-order
/// central differences. State layout `(r, P)`.
pub struct HamiltonFlow<'a> {
    pub pot: &'a AxialPotential,
    pub g: f64,
    pub c: f64,
    pub fd_step: f64,
}

impl HamiltonFlow<'_> {
    fn hamiltonian(&self, t: f64, r: &Vec3, big_p: &Vec3) -> Result<f64> {
        Ok(eikonal_hamiltonian(big_p, self.pot, &[t, r[0], r[1], r[2]], self.g, self.c)?.h)
    }
}

impl OdeSystem for HamiltonFlow<'_> {
    fn dim(&self) -> usize {
        6
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let r = [y[0], y[1], y[2]];
        let big_p = [y[3], y[4], y[5]];
        let here = eikonal_hamiltonian(&big_p, self.pot, &[t, r[0], r[1], r[2]], self.g, self.c)?;
        let pn = norm(&here.p);
        for k in 0..3 {
            dy[k] = self.c * here.p[k] / pn;
        }
        // Probe the singular set once at the stencil extremes so errors surface
        // as errors rather than NaN.
        for k in 0..3 {
            for s in [-2.0, 2.0] {
                let mut q = r;
                q[k] += s * self.fd_step;
                self.hamiltonian(t, &q, &big_p)?;
            }
        }
        let grad = fd_gradient(
            |q| {
                self.hamiltonian(t, &[q[1], q[2], q[3]], &big_p)
                    .unwrap_or(f64::NAN)
            },
            &[t, r[0], r[1], r[2]],
            self.fd_step,
        );
        for k in 0..3 {
            dy[3 + k] = -grad[k + 1];
        }
        Ok(())
    }
}
