//! Electromagnetic sector: Maxwell equations with magnetic sources, the
//! duality rotation, and the axial pseudo-potential `(B, W)` in the Dirac
//! string and axially symmetric monopole gauges.
//!
//! Field descriptions are plain data (serde-serializable) evaluated on demand.
//! Every evaluation returns a jet (value and first derivatives) computed from
//! closed forms. Finite differences ([`fd_gradient`], [`curl_fd`]) are kept as
//! the independent check path.

use serde::{Deserialize, Serialize};

use crate::{Error, Point4, Result};

pub type Vec3 = [f64; 3];

/// Radius of the exclusion tube around singular lines and points.
pub const SINGULAR_EPS: f64 = 1e-6;

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn space(p: &Point4) -> Vec3 {
    [p[1], p[2], p[3]]
}

/// Curl from a jacobian `jac[i][j] = ∂_j F_i`.
pub fn curl_of(jac: &[[f64; 3]; 3]) -> Vec3 {
    [
        jac[2][1] - jac[1][2],
        jac[0][2] - jac[2][0],
        jac[1][0] - jac[0][1],
    ]
}

pub fn div_of(jac: &[[f64; 3]; 3]) -> f64 {
    jac[0][0] + jac[1][1] + jac[2][2]
}

// ---------------------------------------------------------------------------
// Scalar gauge functions

/// `amplitude · cos(ωt − k·x + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarMode {
    pub amplitude: f64,
    pub omega: f64,
    pub k: Vec3,
    #[serde(default)]
    pub phase: f64,
}

impl ScalarMode {
    fn phase_at(&self, p: &Point4) -> f64 {
        self.omega * p[0] - dot(&self.k, &space(p)) + self.phase
    }

    /// `∂_μ` of the phase, `(ω, −k)`.
    fn phase_grad(&self) -> [f64; 4] {
        [self.omega, -self.k[0], -self.k[1], -self.k[2]]
    }
}

/// A scalar function with exact derivatives: constant, linear part and a
/// finite sum of cosine modes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    #[serde(default)]
    pub constant: f64,
    /// `(∂_t, ∂_x, ∂_y, ∂_z)` of the linear part.
    #[serde(default)]
    pub gradient: [f64; 4],
    #[serde(default)]
    pub modes: Vec<ScalarMode>,
}

impl ScalarField {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            ..Self::default()
        }
    }

    pub fn linear(gradient: [f64; 4]) -> Self {
        Self {
            gradient,
            ..Self::default()
        }
    }

    pub fn is_constant(&self) -> bool {
        self.gradient.iter().all(|&g| g == 0.0) && self.modes.iter().all(|m| m.amplitude == 0.0)
    }

    pub fn value(&self, p: &Point4) -> f64 {
        let lin: f64 = (0..4).map(|i| self.gradient[i] * p[i]).sum();
        self.constant
            + lin
            + self
                .modes
                .iter()
                .map(|m| m.amplitude * m.phase_at(p).cos())
                .sum::<f64>()
    }

    pub fn gradient_at(&self, p: &Point4) -> [f64; 4] {
        let mut g = self.gradient;
        for m in &self.modes {
            let s = -m.amplitude * m.phase_at(p).sin();
            let d = m.phase_grad();
            for mu in 0..4 {
                g[mu] += s * d[mu];
            }
        }
        g
    }

    pub fn hessian_at(&self, p: &Point4) -> [[f64; 4]; 4] {
        let mut h = [[0.0; 4]; 4];
        for m in &self.modes {
            let c = -m.amplitude * m.phase_at(p).cos();
            let d = m.phase_grad();
            for mu in 0..4 {
                for nu in 0..4 {
                    h[mu][nu] += c * d[mu] * d[nu];
                }
            }
        }
        h
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            constant: self.constant * s,
            gradient: self.gradient.map(|g| g * s),
            modes: self
                .modes
                .iter()
                .map(|m| ScalarMode {
                    amplitude: m.amplitude * s,
                    ..m.clone()
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Monopole gauges

fn check_dirac_string(p: &Vec3) -> Result<()> {
    let perp = p[0].hypot(p[1]);
    if perp < SINGULAR_EPS && p[2] <= SINGULAR_EPS {
        return Err(Error::SingularPoint {
            set: "dirac-string",
            point: [0.0, p[0], p[1], p[2]],
        });
    }
    Ok(())
}

fn check_axis(p: &Vec3) -> Result<()> {
    if p[0].hypot(p[1]) < SINGULAR_EPS {
        return Err(Error::SingularPoint {
            set: "z-axis",
            point: [0.0, p[0], p[1], p[2]],
        });
    }
    Ok(())
}

/// Vector potential with a string along the negative z-axis,
/// `B = (e/r)(−y, x, 0)/(r + z)`.
pub fn dirac_string_potential(p: &Vec3, e: f64) -> Result<Vec3> {
    Ok(dirac_string_jet(p, e)?.0)
}

/// Axially symmetric vector potential, `B = (e/r)(yz, −xz, 0)/(x² + y²)`.
pub fn axial_gauge_potential(p: &Vec3, e: f64) -> Result<Vec3> {
    Ok(axial_gauge_jet(p, e)?.0)
}

/// Value and jacobian `∂_j B_i` of [`dirac_string_potential`].
pub fn dirac_string_jet(p: &Vec3, e: f64) -> Result<(Vec3, [[f64; 3]; 3])> {
    check_dirac_string(p)?;
    let [x, y, z] = *p;
    let r = norm(p);
    let den = r * (r + z);
    let f = e / den;
    // ∂_j (1/den) = −(x_j/r (r+z) + r (x_j/r + δ_jz)) / den²
    let mut df = [0.0; 3];
    for j in 0..3 {
        let dr = p[j] / r;
        let dz = if j == 2 { 1.0 } else { 0.0 };
        df[j] = -e * (dr * (r + z) + r * (dr + dz)) / (den * den);
    }
    let v = [-y * f, x * f, 0.0];
    let jac = [
        [-y * df[0], -y * df[1] - f, -y * df[2]],
        [x * df[0] + f, x * df[1], x * df[2]],
        [0.0; 3],
    ];
    Ok((v, jac))
}

/// Value and jacobian `∂_j B_i` of [`axial_gauge_potential`].
pub fn axial_gauge_jet(p: &Vec3, e: f64) -> Result<(Vec3, [[f64; 3]; 3])> {
    check_axis(p)?;
    let [x, y, z] = *p;
    let r = norm(p);
    let rho2 = x * x + y * y;
    let den = r * rho2;
    let f = e / den;
    let mut df = [0.0; 3];
    for j in 0..3 {
        let dr = p[j] / r;
        let drho2 = if j < 2 { 2.0 * p[j] } else { 0.0 };
        df[j] = -e * (dr * rho2 + r * drho2) / (den * den);
    }
    let v = [y * z * f, -x * z * f, 0.0];
    let jac = [
        [y * z * df[0], z * f + y * z * df[1], y * f + y * z * df[2]],
        [-z * f - x * z * df[0], -x * z * df[1], -x * f - x * z * df[2]],
        [0.0; 3],
    ];
    Ok((v, jac))
}

// ---------------------------------------------------------------------------
// Axial pseudo-potential

/// Value and first derivatives of `(B, W)` at a spacetime point. Derivative
/// index 0 is `∂_t`, 1..3 are `∂_x, ∂_y, ∂_z`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PotentialJet {
    pub w: f64,
    pub b: Vec3,
    pub dw: [f64; 4],
    pub db: [[f64; 4]; 3],
}

impl PotentialJet {
    fn accumulate(&mut self, o: &PotentialJet) {
        self.w += o.w;
        for i in 0..3 {
            self.b[i] += o.b[i];
            for mu in 0..4 {
                self.db[i][mu] += o.db[i][mu];
            }
        }
        for mu in 0..4 {
            self.dw[mu] += o.dw[mu];
        }
    }

    /// Spatial jacobian `∂_j B_i`.
    pub fn b_jacobian(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.db[i][j + 1]))
    }
}

/// Sign changes applied to a term: the term is evaluated at
/// `(time·t, space·x)` and its outputs are multiplied by `b` and `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignMap {
    pub time: f64,
    pub space: f64,
    pub b: f64,
    pub w: f64,
}

impl Default for SignMap {
    fn default() -> Self {
        Self {
            time: 1.0,
            space: 1.0,
            b: 1.0,
            w: 1.0,
        }
    }
}

impl SignMap {
    pub fn then(&self, other: &SignMap) -> SignMap {
        SignMap {
            time: self.time * other.time,
            space: self.space * other.space,
            b: self.b * other.b,
            w: self.w * other.w,
        }
    }
}

/// One analytic contribution to `(B, W)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialTerm {
    /// Constant `W₀` and `B₀`.
    Uniform { w: f64, b: Vec3 },
    /// `W = w0 + gradient·x`.
    LinearScalar { w0: f64, gradient: Vec3 },
    /// `(B, W) = (b_amp, w_amp)·cos(ωt − k·x + phase)`.
    Wave {
        w_amp: f64,
        b_amp: Vec3,
        omega: f64,
        k: Vec3,
        #[serde(default)]
        phase: f64,
    },
    /// String gauge monopole of strength `e`.
    DiracString { e: f64 },
    /// Axially symmetric monopole of strength `e`.
    AxialMonopole { e: f64 },
    /// Gauge shift `W += ∂_tφ/c`, `B −= ∇φ`.
    GaugeShift { phi: ScalarField, c: f64 },
}

impl PotentialTerm {
    fn jet(&self, p: &Point4) -> Result<PotentialJet> {
        let mut j = PotentialJet::default();
        match self {
            PotentialTerm::Uniform { w, b } => {
                j.w = *w;
                j.b = *b;
            }
            PotentialTerm::LinearScalar { w0, gradient } => {
                j.w = w0 + dot(gradient, &space(p));
                j.dw[1..].copy_from_slice(gradient);
            }
            PotentialTerm::Wave {
                w_amp,
                b_amp,
                omega,
                k,
                phase,
            } => {
                let th = omega * p[0] - dot(k, &space(p)) + phase;
                let (s, c) = th.sin_cos();
                let dth = [*omega, -k[0], -k[1], -k[2]];
                j.w = w_amp * c;
                for mu in 0..4 {
                    j.dw[mu] = -w_amp * s * dth[mu];
                }
                for i in 0..3 {
                    j.b[i] = b_amp[i] * c;
                    for mu in 0..4 {
                        j.db[i][mu] = -b_amp[i] * s * dth[mu];
                    }
                }
            }
            PotentialTerm::DiracString { e } => {
                let (v, jac) = dirac_string_jet(&space(p), *e)?;
                set_static(&mut j, v, jac);
            }
            PotentialTerm::AxialMonopole { e } => {
                let (v, jac) = axial_gauge_jet(&space(p), *e)?;
                set_static(&mut j, v, jac);
            }
            PotentialTerm::GaugeShift { phi, c } => {
                let g = phi.gradient_at(p);
                let h = phi.hessian_at(p);
                j.w = g[0] / c;
                for mu in 0..4 {
                    j.dw[mu] = h[0][mu] / c;
                }
                for i in 0..3 {
                    j.b[i] = -g[i + 1];
                    for mu in 0..4 {
                        j.db[i][mu] = -h[i + 1][mu];
                    }
                }
            }
        }
        Ok(j)
    }
}

fn set_static(j: &mut PotentialJet, v: Vec3, jac: [[f64; 3]; 3]) {
    j.b = v;
    for i in 0..3 {
        for k in 0..3 {
            j.db[i][k + 1] = jac[i][k];
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedTerm {
    pub term: PotentialTerm,
    #[serde(default)]
    pub map: SignMap,
}

/// The axial pseudo-potential `(B, W)` as a sum of analytic terms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AxialPotential {
    pub terms: Vec<MappedTerm>,
}

impl AxialPotential {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = PotentialTerm>) -> Self {
        Self {
            terms: terms
                .into_iter()
                .map(|term| MappedTerm {
                    term,
                    map: SignMap::default(),
                })
                .collect(),
        }
    }

    pub fn uniform(w: f64, b: Vec3) -> Self {
        Self::from_terms([PotentialTerm::Uniform { w, b }])
    }

    pub fn with_term(mut self, term: PotentialTerm) -> Self {
        self.terms.push(MappedTerm {
            term,
            map: SignMap::default(),
        });
        self
    }

    /// Applies a sign map to every term.
    pub fn mapped(&self, map: SignMap) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| MappedTerm {
                    term: t.term.clone(),
                    map: t.map.then(&map),
                })
                .collect(),
        }
    }

    /// Source strength of the monopole terms, summed.
    pub fn charge_e(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| match t.term {
                PotentialTerm::DiracString { e } | PotentialTerm::AxialMonopole { e } => e * t.map.b,
                _ => 0.0,
            })
            .sum()
    }

    /// Human-readable list of excluded sets.
    pub fn singular_set(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for t in &self.terms {
            let s = match t.term {
                PotentialTerm::DiracString { .. } => "dirac-string: x = y = 0, z <= 0",
                PotentialTerm::AxialMonopole { .. } => "z-axis: x = y = 0",
                _ => continue,
            };
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }

    pub fn jet(&self, p: &Point4) -> Result<PotentialJet> {
        let mut total = PotentialJet::default();
        for t in &self.terms {
            let m = t.map;
            let q = [m.time * p[0], m.space * p[1], m.space * p[2], m.space * p[3]];
            let j = t.term.jet(&q).map_err(|e| match e {
                Error::SingularPoint { set, .. } => Error::SingularPoint { set, point: *p },
                other => other,
            })?;
            let chain = [m.time, m.space, m.space, m.space];
            let mut mj = PotentialJet {
                w: m.w * j.w,
                b: scale(&j.b, m.b),
                ..Default::default()
            };
            for mu in 0..4 {
                mj.dw[mu] = m.w * chain[mu] * j.dw[mu];
                for i in 0..3 {
                    mj.db[i][mu] = m.b * chain[mu] * j.db[i][mu];
                }
            }
            total.accumulate(&mj);
        }
        Ok(total)
    }

    pub fn eval(&self, p: &Point4) -> Result<(Vec3, f64)> {
        let j = self.jet(p)?;
        Ok((j.b, j.w))
    }
}

/// `E = curl B`, `H = ∇W + (1/c)∂B/∂t`.
pub fn fields_from_potential(pot: &AxialPotential, p: &Point4, c: f64) -> Result<(Vec3, Vec3)> {
    let j = pot.jet(p)?;
    let e = curl_of(&j.b_jacobian());
    let h = std::array::from_fn(|i| j.dw[i + 1] + j.db[i][0] / c);
    Ok((e, h))
}

// ---------------------------------------------------------------------------
// Finite differences

/// Fourth-order central difference step used by the check path.
pub fn fd_step(p: &Vec3) -> f64 {
    1e-4 * norm(p).max(1.0)
}

/// Fourth-order central-difference jacobian `∂_j F_i` of a vector field.
pub fn fd_jacobian<F>(f: F, p: &Vec3, h: f64) -> Result<[[f64; 3]; 3]>
where
    F: Fn(&Vec3) -> Result<Vec3>,
{
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let at = |s: f64| {
            let mut q = *p;
            q[j] += s * h;
            f(&q)
        };
        let (m2, m1, p1, p2) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
        for i in 0..3 {
            jac[i][j] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
        }
    }
    Ok(jac)
}

/// Fourth-order central-difference gradient of a scalar function on 4-points.
pub fn fd_gradient<F>(f: F, p: &Point4, h: f64) -> [f64; 4]
where
    F: Fn(&Point4) -> f64,
{
    std::array::from_fn(|mu| {
        let at = |s: f64| {
            let mut q = *p;
            q[mu] += s * h;
            f(&q)
        };
        (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h)
    })
}

/// Curl of a static vector field by fourth-order central differences with
/// step [`fd_step`].
pub fn curl_fd<F>(f: F, p: &Vec3) -> Result<Vec3>
where
    F: Fn(&Vec3) -> Result<Vec3>,
{
    Ok(curl_of(&fd_jacobian(f, p, fd_step(p))?))
}

/// `e r/r³`.
pub fn coulomb_field(p: &Vec3, e: f64) -> Vec3 {
    let r = norm(p);
    scale(p, e / (r * r * r))
}

// ---------------------------------------------------------------------------
// Maxwell sector

/// A 3-vector field jet: value, time derivative, spatial jacobian `∂_j F_i`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldJet {
    pub v: Vec3,
    pub dt: Vec3,
    pub jac: [[f64; 3]; 3],
}

impl FieldJet {
    fn add(&mut self, o: &FieldJet) {
        self.v = add(&self.v, &o.v);
        self.dt = add(&self.dt, &o.dt);
        for i in 0..3 {
            self.jac[i] = add(&self.jac[i], &o.jac[i]);
        }
    }
}

/// Closed-form contributions to `(E, H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldTerm {
    /// `(E, H) = (e_amp, h_amp)·cos(ωt − k·x + phase)`.
    PlaneWave {
        e_amp: Vec3,
        h_amp: Vec3,
        omega: f64,
        k: Vec3,
        #[serde(default)]
        phase: f64,
    },
    /// Point charges at the origin: `E = e r/r³`, `H = h r/r³`.
    Coulomb { e: f64, h: f64 },
    /// Constant fields.
    Uniform { e: Vec3, h: Vec3 },
}

impl FieldTerm {
    fn jets(&self, p: &Point4) -> Result<(FieldJet, FieldJet)> {
        match self {
            FieldTerm::PlaneWave {
                e_amp,
                h_amp,
                omega,
                k,
                phase,
            } => {
                let th = omega * p[0] - dot(k, &space(p)) + phase;
                let (s, c) = th.sin_cos();
                let jet = |a: &Vec3| FieldJet {
                    v: scale(a, c),
                    dt: scale(a, -s * omega),
                    jac: std::array::from_fn(|i| std::array::from_fn(|j| a[i] * s * k[j])),
                };
                Ok((jet(e_amp), jet(h_amp)))
            }
            FieldTerm::Coulomb { e, h } => {
                let x = space(p);
                let r = norm(&x);
                if r < SINGULAR_EPS {
                    return Err(Error::SingularPoint {
                        set: "origin",
                        point: *p,
                    });
                }
                let r3 = r * r * r;
                let r5 = r3 * r * r;
                let jet = |q: f64| FieldJet {
                    v: scale(&x, q / r3),
                    dt: [0.0; 3],
                    jac: std::array::from_fn(|i| {
                        std::array::from_fn(|j| {
                            let d = if i == j { 1.0 / r3 } else { 0.0 };
                            q * (d - 3.0 * x[i] * x[j] / r5)
                        })
                    }),
                };
                Ok((jet(*e), jet(*h)))
            }
            FieldTerm::Uniform { e, h } => Ok((
                FieldJet {
                    v: *e,
                    ..Default::default()
                },
                FieldJet {
                    v: *h,
                    ..Default::default()
                },
            )),
        }
    }

    fn rotated(&self, gamma: f64) -> FieldTerm {
        let (s, c) = gamma.sin_cos();
        let rot = |a: &Vec3, b: &Vec3| (add(&scale(a, c), &scale(b, s)), add(&scale(a, -s), &scale(b, c)));
        match self {
            FieldTerm::PlaneWave {
                e_amp,
                h_amp,
                omega,
                k,
                phase,
            } => {
                let (e2, h2) = rot(e_amp, h_amp);
                FieldTerm::PlaneWave {
                    e_amp: e2,
                    h_amp: h2,
                    omega: *omega,
                    k: *k,
                    phase: *phase,
                }
            }
            FieldTerm::Coulomb { e, h } => FieldTerm::Coulomb {
                e: c * e + s * h,
                h: -s * e + c * h,
            },
            FieldTerm::Uniform { e, h } => {
                let (e2, h2) = rot(e, h);
                FieldTerm::Uniform { e: e2, h: h2 }
            }
        }
    }
}

/// Constant electric and magnetic sources.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Sources {
    #[serde(default)]
    pub rho_e: f64,
    #[serde(default)]
    pub mu_m: f64,
    #[serde(default)]
    pub j: Vec3,
    #[serde(default)]
    pub k: Vec3,
}

/// An electromagnetic configuration: fields `E, H` and sources `ρ, μ, J, K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmState {
    pub terms: Vec<FieldTerm>,
    #[serde(default)]
    pub sources: Sources,
    #[serde(default = "one")]
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

impl EmState {
    pub fn new(terms: Vec<FieldTerm>) -> Self {
        Self {
            terms,
            sources: Sources::default(),
            c: 1.0,
        }
    }

    pub fn singular_set(&self) -> Vec<&'static str> {
        if self.terms.iter().any(|t| matches!(t, FieldTerm::Coulomb { .. })) {
            vec!["origin"]
        } else {
            Vec::new()
        }
    }

    pub fn jets(&self, p: &Point4) -> Result<(FieldJet, FieldJet)> {
        let mut e = FieldJet::default();
        let mut h = FieldJet::default();
        for t in &self.terms {
            let (te, th) = t.jets(p)?;
            e.add(&te);
            h.add(&th);
        }
        Ok((e, h))
    }

    pub fn fields(&self, p: &Point4) -> Result<(Vec3, Vec3)> {
        let (e, h) = self.jets(p)?;
        Ok((e.v, h.v))
    }

    /// The four residual blocks `(R₁, R₂, R₃, R₄)` at a point:
    /// `curl H − ∂_tE/c − 4πJ/c`, `−curl E − ∂_tH/c − 4πK/c`,
    /// `div E − 4πρ`, `div H − 4πμ`.
    pub fn residual_parts(&self, p: &Point4) -> Result<(Vec3, Vec3, f64, f64)> {
        let (e, h) = self.jets(p)?;
        let c = self.c;
        let four_pi = 4.0 * std::f64::consts::PI;
        let s = &self.sources;
        let ch = curl_of(&h.jac);
        let ce = curl_of(&e.jac);
        let r1 = std::array::from_fn(|i| ch[i] - e.dt[i] / c - four_pi * s.j[i] / c);
        let r2 = std::array::from_fn(|i| -ce[i] - h.dt[i] / c - four_pi * s.k[i] / c);
        let r3 = div_of(&e.jac) - four_pi * s.rho_e;
        let r4 = div_of(&h.jac) - four_pi * s.mu_m;
        Ok((r1, r2, r3, r4))
    }
}

/// Duality rotation by `γ`: `E' = E cos γ + H sin γ`, `H' = −E sin γ + H cos γ`,
/// and the same on `(ρ, μ)` and `(J, K)`.
pub fn duality_rotate(state: &EmState, gamma: f64) -> EmState {
    let (s, c) = gamma.sin_cos();
    let src = &state.sources;
    let rot = |a: &Vec3, b: &Vec3| (add(&scale(a, c), &scale(b, s)), add(&scale(a, -s), &scale(b, c)));
    let (j, k) = rot(&src.j, &src.k);
    EmState {
        terms: state.terms.iter().map(|t| t.rotated(gamma)).collect(),
        sources: Sources {
            rho_e: c * src.rho_e + s * src.mu_m,
            mu_m: -s * src.rho_e + c * src.mu_m,
            j,
            k,
        },
        c: state.c,
    }
}

/// Maximum over the points of `√(|R₁|² + |R₂|² + R₃² + R₄²)`.
pub fn maxwell_residual(state: &EmState, points: &[Point4]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        let (r1, r2, r3, r4) = state.residual_parts(p)?;
        let n = (dot(&r1, &r1) + dot(&r2, &r2) + r3 * r3 + r4 * r4).sqrt();
        worst = worst.max(n);
    }
    Ok(worst)
}

/// Superposition of two configurations.
pub fn superpose(a: &EmState, b: &EmState) -> EmState {
    let mut terms = a.terms.clone();
    terms.extend(b.terms.iter().cloned());
    let (sa, sb) = (&a.sources, &b.sources);
    EmState {
        terms,
        sources: Sources {
            rho_e: sa.rho_e + sb.rho_e,
            mu_m: sa.mu_m + sb.mu_m,
            j: add(&sa.j, &sb.j),
            k: add(&sa.k, &sb.k),
        },
        c: a.c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close3(a: &Vec3, b: &Vec3, tol: f64) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
    }

    fn vacuum_wave() -> EmState {
        EmState::new(vec![FieldTerm::PlaneWave {
            e_amp: [0.0, 1.0, 0.0],
            h_amp: [-1.0, 0.0, 0.0],
            omega: 1.0,
            k: [0.0, 0.0, 1.0],
            phase: 0.0,
        }])
    }

    fn sample_points() -> Vec<Point4> {
        (0..20)
            .map(|i| {
                let s = i as f64;
                [0.1 * s, (0.7 * s).sin(), (1.3 * s).cos(), 0.2 * s - 1.0]
            })
            .collect()
    }

    #[test]
    fn dirac_string_examples() {
        assert_eq!(dirac_string_potential(&[0.0, 0.0, 1.0], 1.0).unwrap(), [0.0, 0.0, 0.0]);
        let b = dirac_string_potential(&[1.0, 0.0, 0.0], 1.0).unwrap();
        assert!(close3(&b, &[0.0, 1.0, 0.0], 1e-15));
        assert!(matches!(
            dirac_string_potential(&[0.0, 0.0, -2.0], 1.0),
            Err(Error::SingularPoint { .. })
        ));
        assert!(dirac_string_potential(&[0.0, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn axial_gauge_examples() {
        let b = axial_gauge_potential(&[1.0, 0.0, 1.0], 1.0).unwrap();
        assert!(close3(&b, &[0.0, -FRAC_1_SQRT_2, 0.0], 1e-15));
        assert_eq!(axial_gauge_potential(&[1.0, 0.0, 0.0], 1.0).unwrap(), [0.0, -0.0, 0.0]);
        assert!(axial_gauge_potential(&[0.0, 0.0, 3.0], 1.0).is_err());
    }

    #[test]
    fn curl_of_both_gauges_is_coulomb() {
        for p in [[1.0, 0.0, 1.0], [1.0, 1.0, 1.0], [-0.4, 0.9, -0.3]] {
            let want = coulomb_field(&p, 1.0);
            let fd1 = curl_fd(|q| dirac_string_potential(q, 1.0), &p).unwrap();
            let fd2 = curl_fd(|q| axial_gauge_potential(q, 1.0), &p).unwrap();
            let an1 = curl_of(&dirac_string_jet(&p, 1.0).unwrap().1);
            let an2 = curl_of(&axial_gauge_jet(&p, 1.0).unwrap().1);
            let scale = norm(&want);
            for got in [fd1, fd2] {
                assert!(close3(&got, &want, 1e-8 * scale), "{got:?} vs {want:?}");
            }
            for got in [an1, an2] {
                assert!(close3(&got, &want, 1e-12 * scale), "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn static_axial_potential_gives_coulomb_e() {
        let pot = AxialPotential::from_terms([PotentialTerm::AxialMonopole { e: 2.0 }]);
        let p = [0.0, 0.3, -0.5, 0.8];
        let (e, h) = fields_from_potential(&pot, &p, 1.0).unwrap();
        let want = coulomb_field(&[0.3, -0.5, 0.8], 2.0);
        assert!(close3(&e, &want, 1e-12));
        assert_eq!(h, [0.0; 3]);
    }

    #[test]
    fn linear_w_gives_uniform_h() {
        let pot = AxialPotential::from_terms([PotentialTerm::LinearScalar {
            w0: 0.0,
            gradient: [0.0, 0.0, 0.7],
        }]);
        let (e, h) = fields_from_potential(&pot, &[0.0, 1.0, 2.0, 3.0], 1.0).unwrap();
        assert_eq!(e, [0.0; 3]);
        assert_eq!(h, [0.0, 0.0, 0.7]);
    }

    #[test]
    fn time_dependent_b_gives_h_from_time_derivative() {
        let b0 = 0.4;
        let pot = AxialPotential::from_terms([PotentialTerm::Wave {
            w_amp: 0.0,
            b_amp: [0.0, b0, 0.0],
            omega: 1.0,
            k: [0.0; 3],
            phase: -PI / 2.0,
        }]);
        for t in [0.0, 0.4, 2.2] {
            let (e, h) = fields_from_potential(&pot, &[t, 0.1, 0.2, 0.3], 1.0).unwrap();
            assert!(close3(&h, &[0.0, b0 * t.cos(), 0.0], 1e-15));
            // Spatially uniform B has zero curl.
            assert_eq!(e, [0.0; 3]);
        }
    }

    #[test]
    fn potential_jet_matches_finite_differences() {
        let pot = AxialPotential::from_terms([
            PotentialTerm::Wave {
                w_amp: 0.3,
                b_amp: [0.1, -0.2, 0.5],
                omega: 1.3,
                k: [0.2, 0.7, -0.4],
                phase: 0.4,
            },
            PotentialTerm::DiracString { e: 0.8 },
            PotentialTerm::GaugeShift {
                phi: ScalarField {
                    constant: 0.2,
                    gradient: [0.1, 0.0, -0.3, 0.2],
                    modes: vec![ScalarMode {
                        amplitude: 0.6,
                        omega: 0.9,
                        k: [0.3, -0.1, 0.5],
                        phase: 1.0,
                    }],
                },
                c: 1.0,
            },
        ])
        .mapped(SignMap {
            time: -1.0,
            space: 1.0,
            b: -1.0,
            w: 1.0,
        });
        let p = [0.3, 0.5, -0.7, 0.9];
        let j = pot.jet(&p).unwrap();
        let dw = fd_gradient(|q| pot.jet(q).unwrap().w, &p, 1e-3);
        for mu in 0..4 {
            assert!((dw[mu] - j.dw[mu]).abs() < 1e-9);
            for i in 0..3 {
                let d = fd_gradient(|q| pot.jet(q).unwrap().b[i], &p, 1e-3);
                assert!((d[mu] - j.db[i][mu]).abs() < 1e-9, "i={i} mu={mu}");
            }
        }
    }

    #[test]
    fn vacuum_wave_solves_maxwell() {
        let r = maxwell_residual(&vacuum_wave(), &sample_points()).unwrap();
        assert!(r <= 1e-12, "{r}");
    }

    #[test]
    fn coulomb_is_source_free_off_origin() {
        let s = EmState::new(vec![FieldTerm::Coulomb { e: 1.0, h: 0.0 }]);
        let pts: Vec<Point4> = (0..12)
            .map(|i| {
                let a = i as f64 * 0.5;
                [0.0, a.cos(), a.sin() * 0.6, a.sin() * 0.8]
            })
            .collect();
        assert!(maxwell_residual(&s, &pts).unwrap() <= 1e-10);
        assert!(maxwell_residual(&s, &[[0.0; 4]]).is_err());
    }

    #[test]
    fn quarter_duality_rotation_swaps_fields() {
        let mut s = vacuum_wave();
        s.sources = Sources {
            rho_e: 1.0,
            mu_m: 2.0,
            j: [1.0, 0.0, 0.0],
            k: [0.0, 0.0, 3.0],
        };
        let r = duality_rotate(&s, PI / 2.0);
        let p = [0.2, 0.0, 0.0, 0.7];
        let (e, h) = s.fields(&p).unwrap();
        let (e2, h2) = r.fields(&p).unwrap();
        assert!(close3(&e2, &h, 1e-15));
        assert!(close3(&h2, &scale(&e, -1.0), 1e-15));
        assert!((r.sources.rho_e - 2.0).abs() < 1e-15);
        assert!((r.sources.mu_m + 1.0).abs() < 1e-15);
        assert!(close3(&r.sources.j, &[0.0, 0.0, 3.0], 1e-15));
        assert!(close3(&r.sources.k, &[-1.0, 0.0, 0.0], 1e-15));
        assert_eq!(duality_rotate(&s, 0.0), s);
    }

    #[test]
    fn rotated_vacuum_wave_still_solves_maxwell() {
        for g in [0.3, 1.0, 2.5, -4.0] {
            let r = maxwell_residual(&duality_rotate(&vacuum_wave(), g), &sample_points()).unwrap();
            assert!(r <= 1e-12);
        }
    }

    #[test]
    fn scalar_field_derivatives_match_finite_differences() {
        let f = ScalarField {
            constant: 0.5,
            gradient: [0.2, -0.1, 0.3, 0.0],
            modes: vec![ScalarMode {
                amplitude: 1.1,
                omega: 0.7,
                k: [0.5, 0.2, -0.9],
                phase: 0.3,
            }],
        };
        let p = [0.4, -0.2, 0.8, 1.1];
        let g = f.gradient_at(&p);
        let fd = fd_gradient(|q| f.value(q), &p, 1e-3);
        let h = f.hessian_at(&p);
        for mu in 0..4 {
            assert!((g[mu] - fd[mu]).abs() < 1e-10);
            let fdh = fd_gradient(|q| f.gradient_at(q)[mu], &p, 1e-3);
            for nu in 0..4 {
                assert!((h[mu][nu] - fdh[nu]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn potential_json_round_trip() {
        let pot = AxialPotential::from_terms([
            PotentialTerm::AxialMonopole { e: 1.5 },
            PotentialTerm::Uniform { w: 0.2, b: [0.0, 0.1, 0.0] },
        ]);
        let s = serde_json::to_string(&pot).unwrap();
        assert!(s.contains("axial-monopole"));
        let back: AxialPotential = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pot);
        assert_eq!(pot.charge_e(), 1.5);
        assert_eq!(pot.singular_set(), vec!["z-axis: x = y = 0"]);
    }
}
