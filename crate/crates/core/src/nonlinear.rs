//! Massive nonlinear chiral equations, their plane waves, and the
//! torsion/curvature correspondence.
//!
//! With zero potentials the coupled equations read
//!
//! ```text
//! (1/c)∂tξ − s·∇ξ + iκ(ρ) φ  η = 0
//! (1/c)∂tη + s·∇η + iκ(ρ) φ* ξ = 0,     φ = √(η†ξ / ξ†η)
//! ```
//!
//! For plane waves `ξ = a e^{i(ωt − k·r)}`, `η = b e^{i(ω't − k'·r)}` they
//! reduce to the 4×4 kernel problem
//! `[[ω + s·k, σκ], [σκ, ω' − s·k']] (a, e^{iβ} b) = 0` with `β = arg(b†a)`
//! and `σ = ±1` the square-root branch, whose determinant is the dispersion
//! quartic.

use nalgebra::{Matrix4, Vector2, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{bilinears, gamma_basis, pauli, Matrix2c, Spinor4, WeylPair, RHO_ZERO_REL};
use crate::potentials::{dot, norm, AxialPotential, PotentialJet, Vec3};
use crate::symmetry::{chiral_divergences_at, helicity_eigenvector, weyl_residual_at, FourierField, SpinorJet, WeylJet};
use crate::{Error, Point4, Result, Units, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Mass functional `F(ρ)`; only the homogeneous case is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MassFunctional {
    /// `F(ρ) = κ₀ρ`, so `κ(ρ) = κ₀`.
    #[default]
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearParams {
    pub kappa0: f64,
    pub g: f64,
    #[serde(default)]
    pub mass_functional: MassFunctional,
}

impl NonlinearParams {
    pub fn new(kappa0: f64, g: f64) -> Result<Self> {
        if !(kappa0 >= 0.0) || !kappa0.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa0 must be finite and >= 0, got {kappa0}")));
        }
        Ok(Self {
            kappa0,
            g,
            mass_functional: MassFunctional::Linear,
        })
    }

    /// `κ(ρ) = dF/dρ`.
    pub fn kappa(&self, _rho: f64) -> f64 {
        match self.mass_functional {
            MassFunctional::Linear => self.kappa0,
        }
    }
}

/// Which square root of `η†ξ / ξ†η` enters the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseBranch {
    /// `exp(i·arg(η†ξ))` with the principal argument.
    #[default]
    Principal,
    /// The other root, `−exp(i·arg(η†ξ))`.
    Flipped,
}

impl PhaseBranch {
    fn sign(self) -> f64 {
        match self {
            PhaseBranch::Principal => 1.0,
            PhaseBranch::Flipped => -1.0,
        }
    }
}

/// `√(η†ξ / ξ†η)` on the chosen branch. Undefined when `ξ†η = 0`.
pub fn phase_factor(xi: &Vector2<C64>, eta: &Vector2<C64>, branch: PhaseBranch) -> Result<C64> {
    let ex = eta.dotc(xi);
    let scale = xi.norm_squared() + eta.norm_squared();
    if ex.norm() <= 0.5 * RHO_ZERO_REL * scale || ex.norm() == 0.0 {
        return Err(Error::UndefinedPhase);
    }
    Ok(C64::from_polar(branch.sign(), ex.arg()))
}

/// A pair of Weyl plane waves `ξ = a e^{i(ωt − k·r)}`, `η = b e^{i(ω't − k'·r)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveConfig {
    pub a: Vector2<C64>,
    pub b: Vector2<C64>,
    pub omega: f64,
    pub k: Vec3,
    pub omega_prime: f64,
    pub k_prime: Vec3,
    #[serde(default)]
    pub branch: PhaseBranch,
}

impl PlaneWaveConfig {
    pub fn is_finite(&self) -> bool {
        let fin = |v: &Vector2<C64>| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        fin(&self.a)
            && fin(&self.b)
            && self.omega.is_finite()
            && self.omega_prime.is_finite()
            && self.k.iter().chain(&self.k_prime).all(|x| x.is_finite())
    }

    /// `ρ = 2|ξ†η|`, constant in spacetime for plane waves.
    pub fn rho(&self) -> f64 {
        WeylPair {
            xi: self.a,
            eta: self.b,
        }
        .rho()
    }

    /// True when `ρ` vanishes relative to the amplitudes, in which case the
    /// coupling is dropped.
    pub fn is_degenerate(&self) -> bool {
        self.rho() <= RHO_ZERO_REL * (self.a.norm_squared() + self.b.norm_squared())
    }

    /// Values and first derivatives `(∂t, ∂x, ∂y, ∂z)` at `p`.
    pub fn jet(&self, p: &Point4) -> WeylJet {
        let th = self.omega * p[0] - dot(&self.k, &[p[1], p[2], p[3]]);
        let thp = self.omega_prime * p[0] - dot(&self.k_prime, &[p[1], p[2], p[3]]);
        let xi = self.a * C64::from_polar(1.0, th);
        let eta = self.b * C64::from_polar(1.0, thp);
        let wx = [self.omega, -self.k[0], -self.k[1], -self.k[2]];
        let we = [self.omega_prime, -self.k_prime[0], -self.k_prime[1], -self.k_prime[2]];
        WeylJet {
            xi,
            eta,
            dxi: wx.map(|w| xi * (I * w)),
            deta: we.map(|w| eta * (I * w)),
        }
    }

    /// Constant chiral gauge: `ξ ↦ e^{iα}ξ`, `η ↦ e^{−iα}η`.
    pub fn chiral_gauge(&self, alpha: f64) -> Self {
        Self {
            a: self.a * C64::from_polar(1.0, alpha),
            b: self.b * C64::from_polar(1.0, -alpha),
            ..*self
        }
    }
}

/// Coupling terms `(iκφη, iκφ*ξ)`; zero when `ρ` vanishes.
pub fn coupling_terms(xi: &Vector2<C64>, eta: &Vector2<C64>, kappa: f64, branch: PhaseBranch) -> (Vector2<C64>, Vector2<C64>) {
    match phase_factor(xi, eta, branch) {
        Ok(ph) => (eta * (I * kappa * ph), xi * (I * kappa * ph.conj())),
        Err(_) => (Vector2::zeros(), Vector2::zeros()),
    }
}

/// Residuals of the two nonlinear equations at one point, potentials
/// included.
pub fn nonlinear_residual_at(
    w: &WeylJet,
    pot: &PotentialJet,
    params: &NonlinearParams,
    branch: PhaseBranch,
    units: Units,
) -> (Vector2<C64>, Vector2<C64>) {
    let (mut rx, mut re) = weyl_residual_at(w, pot, units.coupling(params.g), units.c);
    let rho = WeylPair { xi: w.xi, eta: w.eta }.rho();
    let (cx, ce) = coupling_terms(&w.xi, &w.eta, params.kappa(rho), branch);
    rx += cx;
    re += ce;
    (rx, re)
}

/// Max-norm residuals of both equations for a plane-wave pair with zero
/// potentials.
pub fn nonlinear_residual(cfg: &PlaneWaveConfig, params: &NonlinearParams, points: &[Point4]) -> Result<(f64, f64)> {
    if !cfg.is_finite() {
        return Err(Error::InvalidParameter("plane-wave configuration is not finite".into()));
    }
    let zero = PotentialJet::default();
    let units = Units::default();
    Ok(points
        .par_iter()
        .map(|p| {
            let (rx, re) = nonlinear_residual_at(&cfg.jet(p), &zero, params, cfg.branch, units);
            (rx.norm(), re.norm())
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1))))
}

/// Spacetime divergences of the chiral currents `X`, `Y` for a plane-wave pair.
pub fn plane_wave_current_divergences(cfg: &PlaneWaveConfig, points: &[Point4]) -> (f64, f64) {
    points.iter().fold((0.0, 0.0), |acc, p| {
        let (dx, dy) = chiral_divergences_at(&cfg.jet(p), 1.0);
        (acc.0.max(dx.abs()), acc.1.max(dy.abs()))
    })
}

/// Dispersion quartic
/// `(ω² − k²)(ω'² − k'²) − 2(ωω' − k·k')κ² + κ⁴` with `c = 1`.
pub fn dispersion_eval(omega: f64, k: &Vec3, omega_prime: f64, k_prime: &Vec3, kappa0: f64) -> f64 {
    let kk = kappa0 * kappa0;
    (omega * omega - dot(k, k)) * (omega_prime * omega_prime - dot(k_prime, k_prime)) - 2.0 * (omega * omega_prime - dot(k, k_prime)) * kk
        + kk * kk
}

/// Complex-frequency form of [`dispersion_eval`] for the named modes.
fn dispersion_eval_mode(mode: WaveMode, omega: C64, k: f64, kappa0: f64) -> C64 {
    let kk = kappa0 * kappa0;
    let k2 = k * k;
    let (wp, kdot) = match mode {
        WaveMode::CoPhase => (omega, k2),
        WaveMode::AntiPhase => (-omega, -k2),
    };
    (omega * omega - k2) * (wp * wp - k2) - (omega * wp - kdot) * (2.0 * kk) + kk * kk
}

/// The two plane-wave families with a closed-form dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveMode {
    /// `ω' = ω`, `k' = k`.
    CoPhase,
    /// `ω' = −ω`, `k' = −k`.
    AntiPhase,
}

impl WaveMode {
    pub fn name(self) -> &'static str {
        match self {
            WaveMode::CoPhase => "co-phase",
            WaveMode::AntiPhase => "anti-phase",
        }
    }

    /// `(ω', k')` paired with `(ω, k)`.
    pub fn partner(self, omega: f64, k: &Vec3) -> (f64, Vec3) {
        match self {
            WaveMode::CoPhase => (omega, *k),
            WaveMode::AntiPhase => (-omega, [-k[0], -k[1], -k[2]]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveClass {
    /// `ω² = k² + κ₀²`, group velocity below 1.
    Bradyon,
    /// `ω² = k² − κ₀²` with `k ≥ κ₀`, group velocity above 1.
    Tachyon,
    /// `κ₀ = 0`.
    Luminal,
    /// `k < κ₀` in the anti-phase family: imaginary frequency.
    Evanescent,
}

impl WaveClass {
    pub fn name(self) -> &'static str {
        match self {
            WaveClass::Bradyon => "bradyon",
            WaveClass::Tachyon => "tachyon",
            WaveClass::Luminal => "luminal",
            WaveClass::Evanescent => "evanescent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionBranch {
    pub mode: WaveMode,
    pub kappa0: f64,
    /// `|k|`.
    pub k: f64,
    /// Roots in `ω`, the positive (or positive-imaginary) one first.
    pub roots: Vec<C64>,
    pub classification: WaveClass,
}

impl DispersionBranch {
    pub fn real_roots(&self) -> Vec<f64> {
        self.roots.iter().filter(|r| r.im == 0.0).map(|r| r.re).collect()
    }

    /// Largest `|quartic(ω)|` over the roots.
    pub fn max_quartic_residual(&self) -> f64 {
        self.roots
            .iter()
            .map(|w| dispersion_eval_mode(self.mode, *w, self.k, self.kappa0).norm())
            .fold(0.0, f64::max)
    }
}

/// Frequencies of a named mode at wavevector `k`.
pub fn dispersion_solve(k: &Vec3, mode: WaveMode, kappa0: f64) -> DispersionBranch {
    let kn = norm(k);
    let kk = kappa0 * kappa0;
    let (roots, classification) = match mode {
        WaveMode::CoPhase => {
            let w = (kn * kn + kk).sqrt();
            let class = if kappa0 == 0.0 { WaveClass::Luminal } else { WaveClass::Bradyon };
            (vec![C64::from(w), C64::from(-w)], class)
        }
        WaveMode::AntiPhase => {
            if kappa0 == 0.0 {
                (vec![C64::from(kn), C64::from(-kn)], WaveClass::Luminal)
            } else if kn >= kappa0 {
                // (k − κ)(k + κ) avoids cancellation near the edge
                let w = ((kn - kappa0) * (kn + kappa0)).sqrt();
                (vec![C64::from(w), C64::from(-w)], WaveClass::Tachyon)
            } else {
                let w = ((kappa0 - kn) * (kappa0 + kn)).sqrt();
                (vec![C64::new(0.0, w), C64::new(0.0, -w)], WaveClass::Evanescent)
            }
        }
    };
    DispersionBranch {
        mode,
        kappa0,
        k: kn,
        roots,
        classification,
    }
}

/// `|dω/d|k||` on the positive real root, `k/ω` for both families.
pub fn group_velocity(branch: &DispersionBranch) -> Result<f64> {
    if branch.classification == WaveClass::Evanescent {
        return Err(Error::InvalidParameter(format!(
            "no real frequency at k = {} < kappa0 = {}",
            branch.k, branch.kappa0
        )));
    }
    let w = branch.roots[0].re;
    if w == 0.0 {
        return Err(Error::InvalidParameter("group velocity undefined at omega = 0".into()));
    }
    if branch.classification == WaveClass::Luminal {
        return Ok(1.0);
    }
    Ok(branch.k / w)
}

/// The 4×4 plane-wave kernel acting on `(a, e^{iβ}b)`.
pub fn plane_wave_kernel(omega: f64, k: &Vec3, omega_prime: f64, k_prime: &Vec3, kappa: f64) -> Matrix4<C64> {
    let s = pauli();
    let sk: Matrix2c = (0..3).fold(Matrix2c::zeros(), |m, i| m + s[i] * C64::from(k[i]));
    let skp: Matrix2c = (0..3).fold(Matrix2c::zeros(), |m, i| m + s[i] * C64::from(k_prime[i]));
    let id = Matrix2c::identity();
    let top_left = id * C64::from(omega) + sk;
    let bottom_right = id * C64::from(omega_prime) - skp;
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&top_left);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&bottom_right);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(id * C64::from(kappa)));
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(id * C64::from(kappa)));
    m
}

/// Builds an exact plane-wave solution on a real root of `mode`.
///
/// `root` selects the sign of `ω`. The amplitudes are a kernel vector of
/// [`plane_wave_kernel`] in a helicity eigenspace of `s·k`, and the branch is
/// chosen so that `b†a` has the phase the coupling requires.
pub fn construct_plane_wave(k: &Vec3, mode: WaveMode, kappa0: f64, root: f64, amplitude: C64) -> Result<PlaneWaveConfig> {
    let branch_info = dispersion_solve(k, mode, kappa0);
    if branch_info.classification == WaveClass::Evanescent {
        return Err(Error::InvalidParameter(format!(
            "anti-phase waves are evanescent for |k| = {} < kappa0 = {kappa0}",
            branch_info.k
        )));
    }
    let omega = if root >= 0.0 { branch_info.roots[0].re } else { branch_info.roots[1].re };
    let (omega_prime, k_prime) = mode.partner(omega, k);
    let kn = branch_info.k;

    if kappa0 == 0.0 {
        // decoupled free waves: (ω + s·k)a = 0, (ω' − s·k')b = 0
        let a = helicity_eigenvector(k, -omega.signum()) * amplitude;
        let b = helicity_eigenvector(&k_prime, omega_prime.signum()) * amplitude;
        return Ok(PlaneWaveConfig {
            a,
            b,
            omega,
            k: *k,
            omega_prime,
            k_prime,
            branch: PhaseBranch::Principal,
        });
    }

    // helicity λ of a along k; b̃ = −(ω + λ|k|)/(σκ) a must have b̃†a > 0
    let lambda = match mode {
        WaveMode::CoPhase => 1.0,
        WaveMode::AntiPhase => -1.0,
    };
    let num = omega + lambda * kn;
    let sigma = if num < 0.0 { 1.0 } else { -1.0 };
    let branch = if sigma > 0.0 { PhaseBranch::Principal } else { PhaseBranch::Flipped };
    let u = helicity_eigenvector(k, lambda);
    let a = u * amplitude;
    let b_tilde = a * C64::from(-num / (sigma * kappa0));
    // β = arg(b†a) = 0 since b̃†a is real and positive
    let b = b_tilde;

    let m = plane_wave_kernel(omega, k, omega_prime, &k_prime, sigma * kappa0);
    let v = Vector4::new(a[0], a[1], b[0], b[1]);
    let res = (m * v).norm();
    if res > 1e-12 * (1.0 + omega.abs() + kn + kappa0) * v.norm() {
        return Err(Error::NotASolution {
            residual: res,
            threshold: 1e-12,
        });
    }
    Ok(PlaneWaveConfig {
        a,
        b,
        omega,
        k: *k,
        omega_prime,
        k_prime,
        branch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajoranaReport {
    pub rho: f64,
    pub coupling_norm: f64,
}

/// Reports `ρ` and the size of the coupling terms of a plane-wave pair at
/// unit `κ`. The coupling is dropped whenever `ρ` vanishes.
pub fn majorana_decoupling_check(cfg: &PlaneWaveConfig) -> MajoranaReport {
    let (cx, ce) = coupling_terms(&cfg.a, &cfg.b, 1.0, cfg.branch);
    let report = MajoranaReport {
        rho: cfg.rho(),
        coupling_norm: (cx.norm_squared() + ce.norm_squared()).sqrt(),
    };
    debug_assert!(report.rho > 0.0 || report.coupling_norm == 0.0);
    report
}

/// `ξ = e^{iθ} s₂ η*`.
pub fn majorana_partner(eta: &Vector2<C64>, theta: f64) -> Vector2<C64> {
    pauli()[1] * eta.map(|z| z.conj()) * C64::from_polar(1.0, theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    /// `(3/32b²) Σ_μΣ_μ` from the axial current.
    pub r_bilinear: f64,
    /// `(3/32b²)(Ω₁² + Ω₂²)`.
    pub r_omega: f64,
}

/// Total curvature of the self-induced torsion, by the axial-current and the
/// scalar/pseudoscalar paths.
///
/// `Σ_μ = iΨ̄γ_μγ₅Ψ` is contracted over the Euclidean index straight from the
/// gamma matrices, so `Σ₄ = iΣ₀`.
pub fn rodichev_curvature(psi: &Spinor4, b: f64) -> Result<Curvature> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("curvature constant b must be finite and nonzero, got {b}")));
    }
    let gb = gamma_basis();
    let bar = (gb.g(4).transpose() * psi.0.conjugate()).transpose();
    let mut sq = C64::new(0.0, 0.0);
    for mu in 1..=4 {
        let s = I * (bar * gb.g(mu) * gb.g(5) * psi.0)[(0, 0)];
        sq += s * s;
    }
    let bl = bilinears(psi);
    let pref = 3.0 / (32.0 * b * b);
    Ok(Curvature {
        r_bilinear: pref * sq.re,
        r_omega: pref * (bl.omega1 * bl.omega1 + bl.omega2 * bl.omega2),
    })
}

/// Torsion vector `Φ = (2g/ħc)(W, B)` in `(t, x, y, z)` order.
pub fn torsion_from_potential(pot: &AxialPotential, p: &Point4, g: f64, units: Units) -> Result<[f64; 4]> {
    let (b, w) = pot.eval(p)?;
    let q2 = 2.0 * units.coupling(g);
    Ok([q2 * w, q2 * b[0], q2 * b[1], q2 * b[2]])
}

/// Residual of `γ_μ(∂_μ − ½Φ_μγ₅)Ψ` with Euclidean `x₄ = ict`, given the
/// real torsion vector `(Φ_t, Φ_x, Φ_y, Φ_z)`.
pub fn torsion_residual_at(jet: &SpinorJet, phi: &[f64; 4], c: f64) -> Vector4<C64> {
    let gb = gamma_basis();
    // Φ_μ = 2q B_μ with B_μ = (−iB, W)
    let phi_e = [C64::new(0.0, -phi[1]), C64::new(0.0, -phi[2]), C64::new(0.0, -phi[3]), C64::from(phi[0])];
    let d_e = [jet.d[1], jet.d[2], jet.d[3], jet.d[0] * (-I / c)];
    let g5v = gb.g(5) * jet.v;
    let mut r = Vector4::zeros();
    for mu in 0..4 {
        r += gb.g(mu + 1) * (d_e[mu] - g5v * (phi_e[mu] * 0.5));
    }
    r
}

/// Largest torsion-form residual over the points.
pub fn torsion_residual(field: &FourierField, pot: &AxialPotential, g: f64, units: Units, points: &[Point4]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        let phi = torsion_from_potential(pot, p, g, units)?;
        worst = worst.max(torsion_residual_at(&field.jet(p), &phi, units.c).norm());
    }
    Ok(worst)
}
