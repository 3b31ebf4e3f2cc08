//! Exact plane-wave test fields, monopole-equation residuals, and the
//! gauge/P/T/C invariance audit.
//!
//! A [`FourierField`] is a finite sum of spinor plane waves followed by a
//! stack of pointwise operations (phases, matrix maps, conjugation, sign flips
//! of the coordinates). Every operation has an exact chain rule, so residuals
//! of transformed fields stay at roundoff level.

mod transforms;

pub use transforms::{
    apply_gauge, apply_ptc, invariance_certificate, Certificate, SymmetryTransform, TransformRegistry,
    TransformSpec, Verdict, SOLUTION_THRESHOLD,
};

use nalgebra::{Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::clifford::{gamma_basis, pauli, weyl_join, weyl_split, Bilinears, Matrix2c, Matrix4c, Spinor4, WeylPair};
use crate::potentials::{AxialPotential, PotentialJet, ScalarField, Vec3};
use crate::{Error, Point4, Result, Units, C64};

const I: C64 = C64::new(0.0, 1.0);

/// One plane wave `amp · e^{i(ωt − k·x)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorMode {
    pub omega: f64,
    pub k: Vec3,
    pub amp: Spinor4,
}

/// Pointwise operation applied after the mode sum.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldOp {
    /// `Ψ ↦ exp(iγ₅φ)Ψ`.
    ChiralPhase(ScalarField),
    /// `Ψ ↦ exp(iφ)Ψ`.
    GlobalPhase(ScalarField),
    /// `Ψ'(t, x) = M·Ψ(time·t, space·x)`, with `Ψ*` in place of `Ψ` when
    /// `conjugate` is set.
    Discrete {
        matrix: Matrix4c,
        conjugate: bool,
        time: f64,
        space: f64,
    },
}

/// Value and first derivatives `(∂_t, ∂_x, ∂_y, ∂_z)` of a spinor field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorJet {
    pub v: Vector4<C64>,
    pub d: [Vector4<C64>; 4],
}

impl SpinorJet {
    fn zero() -> Self {
        Self {
            v: Vector4::zeros(),
            d: [Vector4::zeros(); 4],
        }
    }

    pub fn value(&self) -> Spinor4 {
        Spinor4(self.v)
    }

    fn left_mul(&self, m: &Matrix4c) -> Self {
        Self {
            v: m * self.v,
            d: self.d.map(|x| m * x),
        }
    }
}

/// A spinor-valued field given as a finite plane-wave sum.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    pub modes: Vec<SpinorMode>,
    /// Periodic box size; when set every wavevector must be a multiple of `2π/L`.
    pub box_size: Option<f64>,
    pub ops: Vec<FieldOp>,
}

impl FourierField {
    pub fn new(modes: Vec<SpinorMode>) -> Self {
        Self {
            modes,
            box_size: None,
            ops: Vec::new(),
        }
    }

    /// Builds the field from Weyl amplitudes `(ξ, η)` of each mode.
    pub fn from_weyl_modes(modes: &[(f64, Vec3, WeylPair)]) -> Self {
        Self::new(
            modes
                .iter()
                .map(|(omega, k, pair)| SpinorMode {
                    omega: *omega,
                    k: *k,
                    amp: weyl_join(pair),
                })
                .collect(),
        )
    }

    pub fn with_op(&self, op: FieldOp) -> Self {
        let mut out = self.clone();
        out.ops.push(op);
        out
    }

    pub fn validate(&self) -> Result<()> {
        for m in &self.modes {
            if !m.amp.is_finite() || !m.omega.is_finite() || m.k.iter().any(|k| !k.is_finite()) {
                return Err(Error::InvalidParameter("non-finite mode".into()));
            }
            if let Some(l) = self.box_size {
                let unit = 2.0 * std::f64::consts::PI / l;
                for k in m.k {
                    let n = k / unit;
                    if (n - n.round()).abs() > 1e-9 {
                        return Err(Error::InvalidParameter(format!(
                            "wavevector component {k} is not commensurate with box size {l}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn jet(&self, p: &Point4) -> SpinorJet {
        self.jet_depth(p, self.ops.len())
    }

    pub fn eval(&self, p: &Point4) -> Spinor4 {
        self.jet(p).value()
    }

    fn jet_depth(&self, p: &Point4, depth: usize) -> SpinorJet {
        if depth == 0 {
            return self.mode_sum(p);
        }
        match &self.ops[depth - 1] {
            FieldOp::ChiralPhase(phi) => {
                let g5 = gamma_basis().g(5);
                let inner = self.jet_depth(p, depth - 1);
                let (s, c) = phi.value(p).sin_cos();
                let u = Matrix4c::identity() * C64::from(c) + g5 * (I * s);
                let grad = phi.gradient_at(p);
                let uv = u * inner.v;
                let g5uv = g5 * uv;
                SpinorJet {
                    v: uv,
                    d: std::array::from_fn(|mu| u * inner.d[mu] + g5uv * (I * grad[mu])),
                }
            }
            FieldOp::GlobalPhase(phi) => {
                let inner = self.jet_depth(p, depth - 1);
                let ph = C64::from_polar(1.0, phi.value(p));
                let grad = phi.gradient_at(p);
                let v = inner.v * ph;
                SpinorJet {
                    v,
                    d: std::array::from_fn(|mu| inner.d[mu] * ph + v * (I * grad[mu])),
                }
            }
            FieldOp::Discrete {
                matrix,
                conjugate,
                time,
                space,
            } => {
                let q = [time * p[0], space * p[1], space * p[2], space * p[3]];
                let mut inner = self.jet_depth(&q, depth - 1);
                if *conjugate {
                    inner.v = inner.v.map(|c| c.conj());
                    inner.d = inner.d.map(|x| x.map(|c| c.conj()));
                }
                let chain = [*time, *space, *space, *space];
                let mut out = inner.left_mul(matrix);
                for mu in 0..4 {
                    out.d[mu] *= C64::from(chain[mu]);
                }
                out
            }
        }
    }

    fn mode_sum(&self, p: &Point4) -> SpinorJet {
        let mut j = SpinorJet::zero();
        for m in &self.modes {
            let th = m.omega * p[0] - (m.k[0] * p[1] + m.k[1] * p[2] + m.k[2] * p[3]);
            let v = m.amp.0 * C64::from_polar(1.0, th);
            j.v += v;
            let dth = [m.omega, -m.k[0], -m.k[1], -m.k[2]];
            for mu in 0..4 {
                j.d[mu] += v * (I * dth[mu]);
            }
        }
        j
    }
}

/// Weyl components of a spinor jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylJet {
    pub xi: Vector2<C64>,
    pub eta: Vector2<C64>,
    pub dxi: [Vector2<C64>; 4],
    pub deta: [Vector2<C64>; 4],
}

pub fn weyl_jet(j: &SpinorJet) -> WeylJet {
    let split = |v: &Vector4<C64>| weyl_split(&Spinor4(*v));
    let p = split(&j.v);
    let d: [WeylPair; 4] = std::array::from_fn(|mu| split(&j.d[mu]));
    WeylJet {
        xi: p.xi,
        eta: p.eta,
        dxi: d.map(|w| w.xi),
        deta: d.map(|w| w.eta),
    }
}

/// Residual 4-spinor of `γ_μ(∂_μ − qγ₅B_μ)Ψ = 0` in real coordinates:
/// `Σ_k γ_k(∂_kΨ + iqγ₅B_kΨ) + γ₄(−(i/c)∂_tΨ − qγ₅WΨ)` with `q = g/ħc`.
pub fn dirac_residual_at(jet: &SpinorJet, pot: &PotentialJet, q: f64, c: f64) -> Vector4<C64> {
    let gb = gamma_basis();
    let g5v = gb.g(5) * jet.v;
    let mut r = Vector4::zeros();
    for k in 0..3 {
        r += gb.g(k + 1) * (jet.d[k + 1] + g5v * (I * (q * pot.b[k])));
    }
    r += gb.g(4) * (jet.d[0] * (-I / c) - g5v * C64::from(q * pot.w));
    r
}

/// Residuals of the two Weyl equations
/// `(1/c)∂_tξ − s·∇ξ − iq(W + s·B)ξ` and `(1/c)∂_tη + s·∇η + iq(W − s·B)η`.
pub fn weyl_residual_at(w: &WeylJet, pot: &PotentialJet, q: f64, c: f64) -> (Vector2<C64>, Vector2<C64>) {
    let s = pauli();
    let sb: Matrix2c = (0..3).fold(Matrix2c::zeros(), |a, k| a + s[k] * C64::from(pot.b[k]));
    let id = Matrix2c::identity();
    let mut rx = w.dxi[0] / C64::from(c) - (id * C64::from(q * pot.w) + sb * C64::from(q)) * w.xi * I;
    let mut re = w.deta[0] / C64::from(c) + (id * C64::from(q * pot.w) - sb * C64::from(q)) * w.eta * I;
    for k in 0..3 {
        rx -= s[k] * w.dxi[k + 1];
        re += s[k] * w.deta[k + 1];
    }
    (rx, re)
}

/// Maximum over the points of the monopole-equation residual norm.
pub fn dirac_monopole_residual(
    psi: &FourierField,
    pot: &AxialPotential,
    g: f64,
    units: Units,
    points: &[Point4],
) -> Result<f64> {
    let q = units.coupling(g);
    let mut worst: f64 = 0.0;
    for p in points {
        let pj = pot.jet(p)?;
        worst = worst.max(dirac_residual_at(&psi.jet(p), &pj, q, units.c).norm());
    }
    Ok(worst)
}

/// Maximum over the points of the ξ- and η-equation residual norms.
pub fn weyl_residuals(
    field: &FourierField,
    pot: &AxialPotential,
    g: f64,
    units: Units,
    points: &[Point4],
) -> Result<(f64, f64)> {
    let q = units.coupling(g);
    let (mut wx, mut we): (f64, f64) = (0.0, 0.0);
    for p in points {
        let pj = pot.jet(p)?;
        let (rx, re) = weyl_residual_at(&weyl_jet(&field.jet(p)), &pj, q, units.c);
        wx = wx.max(rx.norm());
        we = we.max(re.norm());
    }
    Ok((wx, we))
}

fn bilinear_derivative(j: &SpinorJet, m: &Matrix4c, mu: usize) -> C64 {
    j.d[mu].dotc(&(m * j.v)) + j.v.dotc(&(m * j.d[mu]))
}

/// Divergences `(1/c)∂_t J₀ + ∇·J` of the polar current and of the axial
/// current `Σ` at a point.
pub fn current_divergences_at(j: &SpinorJet, c: f64) -> (f64, f64) {
    let gb = gamma_basis();
    let g4 = gb.g(4);
    let g5 = gb.g(5);
    // J₀ = Ψ†Ψ, J_k = iΨ†γ₄γ_kΨ; Σ₀ = Ψ†γ₅Ψ, Σ_k = iΨ†γ₄γ_kγ₅Ψ.
    let mut dj = bilinear_derivative(j, &Matrix4c::identity(), 0).re / c;
    let mut ds = bilinear_derivative(j, g5, 0).re / c;
    for k in 1..=3 {
        dj += (I * bilinear_derivative(j, &(g4 * gb.g(k)), k)).re;
        ds += (I * bilinear_derivative(j, &(g4 * gb.g(k) * g5), k)).re;
    }
    (dj, ds)
}

/// Maximum over the points of `|∂·J|` and `|∂·Σ|`.
pub fn current_divergences(field: &FourierField, points: &[Point4], c: f64) -> (f64, f64) {
    points.iter().fold((0.0f64, 0.0f64), |(a, b), p| {
        let (dj, ds) = current_divergences_at(&field.jet(p), c);
        (a.max(dj.abs()), b.max(ds.abs()))
    })
}

/// Divergences of the chiral currents `X = (ξ†ξ, −ξ†sξ)` and `Y = (η†η, η†sη)`.
pub fn chiral_divergences_at(w: &WeylJet, c: f64) -> (f64, f64) {
    let s = pauli();
    let dn = |v: &Vector2<C64>, dv: &Vector2<C64>, m: &Matrix2c| (dv.dotc(&(m * v)) + v.dotc(&(m * dv))).re;
    let id = Matrix2c::identity();
    let mut dx = dn(&w.xi, &w.dxi[0], &id) / c;
    let mut dy = dn(&w.eta, &w.deta[0], &id) / c;
    for k in 0..3 {
        dx -= dn(&w.xi, &w.dxi[k + 1], &s[k]);
        dy += dn(&w.eta, &w.deta[k + 1], &s[k]);
    }
    (dx, dy)
}

/// Euclidean sine of the angle between the polar and axial 4-currents.
pub fn current_angle_sine(b: &Bilinears) -> f64 {
    let nj: f64 = b.j.iter().map(|x| x * x).sum::<f64>().sqrt();
    let ns: f64 = b.sigma.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nj == 0.0 || ns == 0.0 {
        return 0.0;
    }
    let cos: f64 = (0..4).map(|i| b.j[i] * b.sigma[i]).sum::<f64>() / (nj * ns);
    (1.0 - cos * cos).max(0.0).sqrt()
}

/// Minimum over the points of [`current_angle_sine`].
pub fn min_current_angle_sine(field: &FourierField, points: &[Point4]) -> f64 {
    points
        .iter()
        .map(|p| current_angle_sine(&crate::clifford::bilinears(&field.eval(p))))
        .fold(f64::INFINITY, f64::min)
}

/// Which Weyl component a manufactured mode lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chirality {
    Xi,
    Eta,
}

/// Unit eigenvector of `s·v` with eigenvalue `sign·|v|` (any unit vector when
/// `v = 0`).
pub fn helicity_eigenvector(v: &Vec3, sign: f64) -> Vector2<C64> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n == 0.0 {
        return Vector2::new(C64::from(1.0), C64::from(0.0));
    }
    let s = pauli();
    let sv = (0..3).fold(Matrix2c::zeros(), |a, k| a + s[k] * C64::from(v[k] / n));
    let proj = (Matrix2c::identity() + sv * C64::from(sign)) * C64::from(0.5);
    let c0 = proj.column(0).into_owned();
    let c1 = proj.column(1).into_owned();
    let col = if c0.norm() >= c1.norm() { c0 } else { c1 };
    col / C64::from(col.norm())
}

/// Exact plane-wave solution of one Weyl equation in the constant potential
/// `(W₀, B₀)`: returns `(ω, amplitude)` for wavevector `k` and helicity sign.
///
/// For ξ the kernel condition is `[(ω/c − qW₀) + s·(k − qB₀)]a = 0`; for η it
/// is `[(ω/c + qW₀) − s·(k + qB₀)]b = 0`.
pub fn manufacture_mode(
    which: Chirality,
    k: &Vec3,
    helicity: f64,
    w0: f64,
    b0: &Vec3,
    q: f64,
    c: f64,
) -> (f64, Vector2<C64>) {
    match which {
        Chirality::Xi => {
            let kk = [k[0] - q * b0[0], k[1] - q * b0[1], k[2] - q * b0[2]];
            let lam = helicity * (kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2]).sqrt();
            (c * (q * w0 - lam), helicity_eigenvector(&kk, helicity))
        }
        Chirality::Eta => {
            let kk = [k[0] + q * b0[0], k[1] + q * b0[1], k[2] + q * b0[2]];
            let lam = helicity * (kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2]).sqrt();
            (c * (lam - q * w0), helicity_eigenvector(&kk, helicity))
        }
    }
}

/// Description of a manufactured constant-potential configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedSpec {
    pub g: f64,
    pub units: Units,
    pub w0: f64,
    pub b0: Vec3,
    /// `(chirality, k, helicity sign, complex weight)` per mode.
    pub modes: Vec<(Chirality, Vec3, f64, C64)>,
}

/// Builds an exact solution of the monopole equation in a constant potential.
pub fn manufacture_solution(spec: &ManufacturedSpec) -> (FourierField, AxialPotential) {
    let q = spec.units.coupling(spec.g);
    let zero = Vector2::zeros();
    let modes: Vec<(f64, Vec3, WeylPair)> = spec
        .modes
        .iter()
        .map(|(which, k, h, wgt)| {
            let (omega, a) = manufacture_mode(*which, k, *h, spec.w0, &spec.b0, q, spec.units.c);
            let a = a * *wgt;
            let pair = match which {
                Chirality::Xi => WeylPair { xi: a, eta: zero },
                Chirality::Eta => WeylPair { xi: zero, eta: a },
            };
            (omega, *k, pair)
        })
        .collect();
    (
        FourierField::from_weyl_modes(&modes),
        AxialPotential::uniform(spec.w0, spec.b0),
    )
}

/// A documented generic test configuration: three ξ-modes and three η-modes
/// with distinct wavevectors in the potential `W₀ = 0.3`, `B₀ = (0.2, −0.1, 0.4)`.
pub fn generic_solution(g: f64, units: Units) -> (FourierField, AxialPotential) {
    manufacture_solution(&ManufacturedSpec {
        g,
        units,
        w0: 0.3,
        b0: [0.2, -0.1, 0.4],
        modes: vec![
            (Chirality::Xi, [0.3, 0.5, -0.2], 1.0, C64::new(1.0, 0.0)),
            (Chirality::Xi, [-0.7, 0.1, 0.6], -1.0, C64::new(0.4, 0.3)),
            (Chirality::Xi, [0.2, -0.9, 0.4], 1.0, C64::new(-0.2, 0.5)),
            (Chirality::Eta, [0.5, 0.4, 0.1], 1.0, C64::new(0.8, -0.1)),
            (Chirality::Eta, [-0.1, 0.3, -0.8], -1.0, C64::new(0.3, 0.6)),
            (Chirality::Eta, [0.6, -0.6, 0.2], 1.0, C64::new(-0.5, -0.2)),
        ],
    })
}

/// Deterministic sample points spread over `[-2, 2]⁴`.
pub fn audit_points(n: usize) -> Vec<Point4> {
    // Additive recurrence with irrational steps gives low-discrepancy points.
    let steps = [0.754_877_666_2, 0.569_840_290_9, 0.430_159_709_0, 0.245_122_333_8];
    (0..n)
        .map(|i| std::array::from_fn(|d| 4.0 * ((0.5 + steps[d] * (i + 1) as f64).fract()) - 2.0))
        .collect()
}
