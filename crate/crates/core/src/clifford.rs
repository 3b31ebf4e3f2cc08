//! Gamma matrices in the de Broglie representation and the Dirac bilinears.
//!
//! The matrices are Euclidean (`{γ_μ, γ_ν} = 2δ_μν`, all hermitian) because the
//! fourth coordinate is `x₄ = ict`. Every accessor on [`Bilinears`] reports
//! physical real components ordered `(t, x, y, z)`: the imaginary fourth
//! components `J₄ = iΨ†Ψ` and `Σ₄ = iΨ†γ₅Ψ` are returned as `Ψ†Ψ` and `Ψ†γ₅Ψ`.
//!
//! With that ordering the index contraction `A_μB_μ` of the imaginary-time
//! formalism becomes `a·b − a₀b₀`, see [`contract`].

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::C64;

pub type Matrix2c = Matrix2<C64>;
pub type Matrix4c = Matrix4<C64>;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Pauli matrices `s₁, s₂, s₃`.
pub fn pauli() -> [Matrix2c; 3] {
    [
        Matrix2c::new(ZERO, ONE, ONE, ZERO),
        Matrix2c::new(ZERO, -I, I, ZERO),
        Matrix2c::new(ONE, ZERO, ZERO, -ONE),
    ]
}

fn blocks(a: Matrix2c, b: Matrix2c, c: Matrix2c, d: Matrix2c) -> Matrix4c {
    let mut m = Matrix4c::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
    m
}

/// A complex four-component bispinor at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor4(pub Vector4<C64>);

impl Spinor4 {
    pub fn new(c: [C64; 4]) -> Self {
        Self(Vector4::new(c[0], c[1], c[2], c[3]))
    }

    pub fn zeros() -> Self {
        Self(Vector4::zeros())
    }

    pub fn basis(k: usize) -> Self {
        let mut v = Vector4::zeros();
        v[k] = ONE;
        Self(v)
    }

    /// `Ψ†Ψ`.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|c| c.conj()))
    }

    /// `Ψ† M Ψ`.
    pub fn expect(&self, m: &Matrix4c) -> C64 {
        self.0.dotc(&(m * self.0))
    }

    pub fn apply(&self, m: &Matrix4c) -> Self {
        Self(m * self.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0 * s)
    }
}

impl std::ops::Add for Spinor4 {
    type Output = Spinor4;
    fn add(self, rhs: Self) -> Self {
        Spinor4(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Spinor4 {
    type Output = Spinor4;
    fn sub(self, rhs: Self) -> Self {
        Spinor4(self.0 - rhs.0)
    }
}

/// Two-component Weyl spinors, eigenstates of the charge operator `G = gγ₅`
/// with eigenvalues `+g` (ξ) and `−g` (η).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylPair {
    pub xi: Vector2<C64>,
    pub eta: Vector2<C64>,
}

impl WeylPair {
    pub fn new(xi: [C64; 2], eta: [C64; 2]) -> Self {
        Self {
            xi: Vector2::new(xi[0], xi[1]),
            eta: Vector2::new(eta[0], eta[1]),
        }
    }

    /// `(Ω₁, Ω₂)` from `Ω₁ = ξ†η + η†ξ`, `Ω₂ = i(ξ†η − η†ξ)`.
    pub fn omegas(&self) -> (f64, f64) {
        let xe = self.xi.dotc(&self.eta);
        let ex = self.eta.dotc(&self.xi);
        ((xe + ex).re, (I * (xe - ex)).re)
    }

    /// `ρ = 2|ξ†η|`, the chiral invariant amplitude.
    pub fn rho(&self) -> f64 {
        2.0 * self.xi.dotc(&self.eta).norm()
    }
}

/// One element `Γ_N` of the Clifford basis.
#[derive(Debug, Clone)]
pub struct CliffordElement {
    /// Gamma indices in the product, e.g. `[1, 2]` for `γ₁γ₂`; empty for `I`,
    /// `[5]` for `γ₅`.
    pub indices: Vec<usize>,
    pub matrix: Matrix4c,
    /// `phase · Γ_N` is hermitian (`1` or `i`).
    pub hermitian_phase: C64,
}

impl CliffordElement {
    pub fn label(&self) -> String {
        if self.indices.is_empty() {
            "I".to_string()
        } else {
            let idx: String = self.indices.iter().map(|i| i.to_string()).collect();
            format!("g{idx}")
        }
    }
}

/// The gamma matrices, the 16-element Clifford basis and the sign table
/// `γ_μ Γ_N γ_μ = sign(μ, N) Γ_N` (no sum over μ).
#[derive(Debug, Clone)]
pub struct GammaBasis {
    /// `γ₁, γ₂, γ₃, γ₄, γ₅` at indices `0..5`.
    pub gamma: [Matrix4c; 5],
    pub clifford16: Vec<CliffordElement>,
    pub sign_table: [[i8; 16]; 4],
}

impl GammaBasis {
    /// `γ_μ` for `μ ∈ 1..=5`.
    pub fn g(&self, mu: usize) -> &Matrix4c {
        &self.gamma[mu - 1]
    }

    /// `U = U⁻¹ = (γ₄ + γ₅)/√2`, the map to the Weyl representation.
    pub fn weyl_map(&self) -> Matrix4c {
        (self.gamma[3] + self.gamma[4]) * C64::from(FRAC_1_SQRT_2)
    }
}

/// Builds the de Broglie gamma matrices
/// `γ_k = i[[0, s_k], [−s_k, 0]]`, `γ₄ = diag(I, −I)`, `γ₅ = [[0, I], [I, 0]]`
/// and fills the sign table by explicit multiplication.
pub fn build_gamma_basis() -> GammaBasis {
    let s = pauli();
    let id2 = Matrix2c::identity();
    let z2 = Matrix2c::zeros();
    let gk = |k: usize| blocks(z2, s[k] * I, -s[k] * I, z2);
    let gamma = [
        gk(0),
        gk(1),
        gk(2),
        blocks(id2, z2, z2, -id2),
        blocks(z2, id2, id2, z2),
    ];

    let mut index_sets: Vec<Vec<usize>> = vec![vec![]];
    for a in 1..=4 {
        index_sets.push(vec![a]);
    }
    for a in 1..=4 {
        for b in (a + 1)..=4 {
            index_sets.push(vec![a, b]);
        }
    }
    for a in 1..=4 {
        for b in (a + 1)..=4 {
            for c in (b + 1)..=4 {
                index_sets.push(vec![a, b, c]);
            }
        }
    }
    index_sets.push(vec![5]);

    let clifford16: Vec<CliffordElement> = index_sets
        .into_iter()
        .map(|indices| {
            let matrix = indices
                .iter()
                .fold(Matrix4c::identity(), |acc, &i| acc * gamma[i - 1]);
            let hermitian_phase = if approx_eq(&matrix.adjoint(), &matrix) {
                ONE
            } else {
                debug_assert!(approx_eq(&matrix.adjoint(), &(-matrix)));
                I
            };
            CliffordElement {
                indices,
                matrix,
                hermitian_phase,
            }
        })
        .collect();

    let mut sign_table = [[0i8; 16]; 4];
    for (mu, row) in sign_table.iter_mut().enumerate() {
        for (n, el) in clifford16.iter().enumerate() {
            let p = gamma[mu] * el.matrix * gamma[mu];
            *row.get_mut(n).unwrap() = if approx_eq(&p, &el.matrix) {
                1
            } else if approx_eq(&p, &(-el.matrix)) {
                -1
            } else {
                0
            };
        }
    }

    GammaBasis {
        gamma,
        clifford16,
        sign_table,
    }
}

fn approx_eq(a: &Matrix4c, b: &Matrix4c) -> bool {
    (a - b).iter().all(|c| c.norm() < 1e-14)
}

/// Shared instance of the gamma basis.
pub fn gamma_basis() -> &'static GammaBasis {
    static BASIS: OnceLock<GammaBasis> = OnceLock::new();
    BASIS.get_or_init(build_gamma_basis)
}

/// Index contraction `A_μB_μ` of the imaginary-time formalism for physical
/// `(t, x, y, z)` components: `a·b − a₀b₀`.
pub fn contract(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[1] * b[1] + a[2] * b[2] + a[3] * b[3] - a[0] * b[0]
}

/// The sixteen bilinear covariants of a spinor plus the polar form `(ρ, A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bilinears {
    /// Scalar `Ω₁ = Ψ̄Ψ`.
    pub omega1: f64,
    /// Pseudoscalar `Ω₂ = −iΨ̄γ₅Ψ`.
    pub omega2: f64,
    /// Polar current, `(Ψ†Ψ, J_x, J_y, J_z)`.
    pub j: [f64; 4],
    /// Axial current, `(Ψ†γ₅Ψ, Σ_x, Σ_y, Σ_z)`.
    pub sigma: [f64; 4],
    /// Antisymmetric tensor `M_μν = iΨ̄γ_μγ_νΨ` (μ ≠ ν), index 0 is time.
    pub m: [[f64; 4]; 4],
    pub rho: f64,
    /// Yvon–Takabayasi angle in `(−π, π]`; `None` when `ρ = 0`.
    pub angle: Option<f64>,
}

impl Bilinears {
    /// `Ω₁² + Ω₂²`.
    pub fn rho_sqr(&self) -> f64 {
        self.omega1 * self.omega1 + self.omega2 * self.omega2
    }
}

/// Relative size under which `ρ` is treated as zero and the angle `A` as
/// undefined.
pub const RHO_ZERO_REL: f64 = 1e-14;

/// Yvon–Takabayasi angle from `(Ω₁, Ω₂)`, range `(−π, π]`.
pub fn yt_angle(omega1: f64, omega2: f64, scale: f64) -> Option<f64> {
    let rho = omega1.hypot(omega2);
    if rho <= RHO_ZERO_REL * scale || rho == 0.0 {
        return None;
    }
    let a = omega2.atan2(omega1);
    Some(if a <= -std::f64::consts::PI { std::f64::consts::PI } else { a })
}

/// Computes the bilinear covariants directly from their matrix definitions
/// with `Ψ̄ = Ψ†γ₄`.
pub fn bilinears(psi: &Spinor4) -> Bilinears {
    let gb = gamma_basis();
    let g4 = gb.g(4);
    let g5 = gb.g(5);
    let bar = |m: &Matrix4c| psi.expect(&(g4 * m));

    let omega1 = bar(&Matrix4c::identity()).re;
    let omega2 = (-I * bar(g5)).re;

    let mut j = [0.0; 4];
    let mut sigma = [0.0; 4];
    for k in 1..=3 {
        j[k] = (I * bar(gb.g(k))).re;
        sigma[k] = (I * bar(&(gb.g(k) * g5))).re;
    }
    // J₄ = iΨ†Ψ and Σ₄ = iΨ†γ₅Ψ; report the real densities.
    j[0] = (-I * (I * bar(g4))).re;
    sigma[0] = (-I * (I * bar(&(g4 * g5)))).re;

    // Physical index p ∈ {0: t, 1..3: space} ↔ gamma index 4, 1..3.
    let gidx = |p: usize| if p == 0 { 4 } else { p };
    let mut m = [[0.0; 4]; 4];
    for p in 0..4 {
        for q in 0..4 {
            if p == q {
                continue;
            }
            let raw = I * bar(&(gb.g(gidx(p)) * gb.g(gidx(q))));
            // One time index carries a factor i from x₄ = ict.
            let v = if p == 0 || q == 0 { -I * raw } else { raw };
            m[p][q] = v.re;
        }
    }

    let rho = omega1.hypot(omega2);
    Bilinears {
        omega1,
        omega2,
        j,
        sigma,
        m,
        rho,
        angle: yt_angle(omega1, omega2, psi.norm_sqr()),
    }
}

/// `Ψ ↦ UΨ = (ξ, η)` with `U = (γ₄ + γ₅)/√2`.
pub fn weyl_split(psi: &Spinor4) -> WeylPair {
    let v = gamma_basis().weyl_map() * psi.0;
    WeylPair {
        xi: Vector2::new(v[0], v[1]),
        eta: Vector2::new(v[2], v[3]),
    }
}

/// Inverse of [`weyl_split`] (`U` is an involution).
pub fn weyl_join(pair: &WeylPair) -> Spinor4 {
    let v = Vector4::new(pair.xi[0], pair.xi[1], pair.eta[0], pair.eta[1]);
    Spinor4(gamma_basis().weyl_map() * v)
}

/// The charge operator `G = gγ₅` in the de Broglie representation.
pub fn charge_operator(g: f64) -> Matrix4c {
    gamma_basis().g(5) * C64::from(g)
}

/// The isotropic chiral currents of a Weyl pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiralCurrents {
    /// `X = (ξ†ξ, −ξ†sξ)`.
    pub x: [f64; 4],
    /// `Y = (η†η, η†sη)`.
    pub y: [f64; 4],
}

impl ChiralCurrents {
    /// `J = X + Y`.
    pub fn polar(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.x[i] + self.y[i])
    }

    /// `Σ = X − Y`.
    pub fn axial(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.x[i] - self.y[i])
    }
}

pub fn chiral_currents(pair: &WeylPair) -> ChiralCurrents {
    let s = pauli();
    let mut x = [pair.xi.norm_squared(), 0.0, 0.0, 0.0];
    let mut y = [pair.eta.norm_squared(), 0.0, 0.0, 0.0];
    for k in 0..3 {
        x[k + 1] = -pair.xi.dotc(&(s[k] * pair.xi)).re;
        y[k + 1] = pair.eta.dotc(&(s[k] * pair.eta)).re;
    }
    ChiralCurrents { x, y }
}

/// Rotation by `θ` in the chiral plane `(Ω₁, Ω₂)`.
pub fn chiral_rotate(omega1: f64, omega2: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c * omega1 - s * omega2, s * omega1 + c * omega2)
}

/// Spinor-level chiral gauge `Ψ ↦ exp(iγ₅θ/2)Ψ`.
pub fn chiral_gauge_spinor(psi: &Spinor4, theta: f64) -> Spinor4 {
    let (s, c) = (0.5 * theta).sin_cos();
    let g5 = gamma_basis().g(5);
    Spinor4(psi.0 * C64::from(c) + (g5 * psi.0) * (I * s))
}
