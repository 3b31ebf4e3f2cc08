//! Random test inputs shared by the property suites and the CLI.

use rand::Rng;

use crate::clifford::{Spinor4, WeylPair};
use crate::C64;

fn component<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// A spinor with independent components uniform in the unit square.
pub fn random_spinor<R: Rng + ?Sized>(rng: &mut R) -> Spinor4 {
    Spinor4::new(std::array::from_fn(|_| component(rng)))
}

pub fn random_pair<R: Rng + ?Sized>(rng: &mut R) -> WeylPair {
    WeylPair::new(
        std::array::from_fn(|_| component(rng)),
        std::array::from_fn(|_| component(rng)),
    )
}

/// A point uniform in the cube `[-half, half]³`.
pub fn random_point3<R: Rng + ?Sized>(rng: &mut R, half: f64) -> [f64; 3] {
    std::array::from_fn(|_| rng.random_range(-half..half))
}

/// A spacetime point with `t` in `[-half, half]` and space in the same cube.
pub fn random_point4<R: Rng + ?Sized>(rng: &mut R, half: f64) -> [f64; 4] {
    std::array::from_fn(|_| rng.random_range(-half..half))
}
