//! Angular problem of the monopole in a central electric field.
//!
//! Angular functions live on a tensor grid: Gauss–Legendre nodes in `cos θ`
//! and uniform nodes in `φ`. The grid carries a *sector* `D`; each azimuthal
//! mode `m` of a function in that sector has the form
//! `sin^|m−D|(θ/2) cos^|m+D|(θ/2) · p(cos θ)` with `p` a polynomial, which is
//! how θ-derivatives stay spectrally accurate up to the poles.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, Vector2};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::clifford::pauli;
use crate::potentials::{axial_gauge_potential, Vec3};
use crate::symmetry::Chirality;
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// An integer multiple of 1/2, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);

    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        Self(2 * n)
    }

    /// Rejects values that are not within 1e-12 of a multiple of 1/2.
    pub fn from_f64(v: f64) -> Result<Self> {
        let t = (2.0 * v).round();
        if !v.is_finite() || (2.0 * v - t).abs() > 1e-12 || t.abs() > i32::MAX as f64 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "{v} is not an integer multiple of 1/2"
            )));
        }
        Ok(Self(t as i32))
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        Self(self.0.abs())
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::from_f64(v)
    }
}

impl From<HalfInt> for f64 {
    fn from(h: HalfInt) -> f64 {
        h.value()
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

/// Checks `j ≥ 0`, `|m|, |m'| ≤ j` and `j − m, j − m'` integral.
pub fn check_triple(j: HalfInt, m_prime: HalfInt, m: HalfInt) -> Result<()> {
    let bad = |why: &str| Err(Error::InvalidQuantumNumbers(format!("(j, m', m) = ({j}, {m_prime}, {m}): {why}")));
    if j.0 < 0 {
        return bad("j must be nonnegative");
    }
    if m.abs() > j || m_prime.abs() > j {
        return bad("projections must satisfy |m|, |m'| <= j");
    }
    if (j.0 - m.0) % 2 != 0 || (j.0 - m_prime.0) % 2 != 0 {
        return bad("projections must differ from j by an integer");
    }
    Ok(())
}

/// Quantum numbers of one angular eigenstate together with its Dirac number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracNumber {
    pub d: f64,
    pub j: HalfInt,
    pub m_prime: HalfInt,
    pub m: HalfInt,
}

impl DiracNumber {
    /// Continuity on the rotation group forces `D = m'`; anything else is
    /// rejected.
    pub fn new(d: f64, j: HalfInt, m_prime: HalfInt, m: HalfInt) -> Result<Self> {
        check_triple(j, m_prime, m)?;
        if (d - m_prime.value()).abs() > 1e-12 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "D = {d} differs from m' = {m_prime}; the eigenfunction is not continuous on the rotation group"
            )));
        }
        Ok(Self { d, j, m_prime, m })
    }

    /// `D = eg/ħc` from the charges.
    pub fn from_charges(e: f64, g: f64, units: &crate::Units, j: HalfInt, m: HalfInt) -> Result<Self> {
        let d = e * units.coupling(g);
        let m_prime = HalfInt::from_f64(d)?;
        Self::new(d, j, m_prime, m)
    }
}

/// Admissible Dirac numbers `{−j, −j+1, …, j}` for total angular momentum `j`.
pub fn dirac_condition(j: HalfInt) -> Result<Vec<HalfInt>> {
    if j.0 < 0 {
        return Err(Error::InvalidQuantumNumbers(format!("j = {j} is negative")));
    }
    Ok((0..=j.0).map(|k| HalfInt(-j.0 + 2 * k)).collect())
}

/// Phase `e^{iDχ}` of the lift to the rotation group.
pub fn lift_phase(d: f64, chi: f64) -> C64 {
    C64::from_polar(1.0, d * chi)
}

/// The lift `e^{iDχ} Z` is single-valued iff the phase returns to 1 after
/// `χ → χ + 4π`.
pub fn lift_is_single_valued(d: f64) -> bool {
    (lift_phase(d, 4.0 * PI) - 1.0).norm() <= 1e-12
}

fn ln_factorial(n: i32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0; 171];
        for k in 1..t.len() {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    });
    table[n as usize]
}

/// Wigner small-d function `d^j_{m'm}(θ)` by the explicit factorial sum.
pub fn wigner_d(j: HalfInt, m_prime: HalfInt, m: HalfInt, theta: f64) -> Result<f64> {
    check_triple(j, m_prime, m)?;
    if j.0 > 80 {
        return Err(Error::InvalidQuantumNumbers(format!("j = {j} exceeds the supported range j <= 40")));
    }
    let jpm = (j.0 + m.0) / 2;
    let jmm = (j.0 - m.0) / 2;
    let jpmp = (j.0 + m_prime.0) / 2;
    let jmmp = (j.0 - m_prime.0) / 2;
    let dm = (m_prime.0 - m.0) / 2;
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let pref = 0.5 * (ln_factorial(jpmp) + ln_factorial(jmmp) + ln_factorial(jpm) + ln_factorial(jmm));
    let lo = 0.max(-dm);
    let hi = jpm.min(jmmp);
    let mut sum = 0.0;
    for k in lo..=hi {
        let mag = (pref - ln_factorial(jpm - k) - ln_factorial(k) - ln_factorial(dm + k) - ln_factorial(jmmp - k)).exp();
        let sign = if (dm + k) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * mag * c.powi(j.0 - dm - 2 * k) * s.powi(dm + 2 * k);
    }
    Ok(sum)
}

fn i_pow(k: i32) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => I,
        2 => C64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// Normalised angular eigenfunction
/// `Z^{m'm}_j = √(2j+1) e^{imφ} d^j_{m'm}(θ) i^{m'−m}`, with
/// `∫|Z|² dΩ / 4π = 1`.
///
/// For `m' = 0` this is `i^m √(4π) Y_j^m` in the Condon–Shortley convention.
pub fn monopole_harmonic(j: HalfInt, m_prime: HalfInt, m: HalfInt, theta: f64, phi: f64) -> Result<C64> {
    let d = wigner_d(j, m_prime, m, theta)?;
    Ok((j.0 as f64 + 1.0).sqrt() * d * C64::from_polar(1.0, m.value() * phi) * i_pow((m_prime.0 - m.0) / 2))
}

/// `e^{im'χ} Z^{m'm}_j(θ, φ)`, a matrix element of an irreducible
/// representation of the rotation group in Euler angles.
pub fn lifted_harmonic(j: HalfInt, m_prime: HalfInt, m: HalfInt, theta: f64, phi: f64, chi: f64) -> Result<C64> {
    Ok(lift_phase(m_prime.value(), chi) * monopole_harmonic(j, m_prime, m, theta, phi)?)
}

/// Gauss–Legendre nodes (ascending) and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Differentiation matrix of the polynomial interpolant through `x`,
/// row-major.
fn barycentric_diff(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let w: Vec<f64> = (0..n)
        .map(|i| 1.0 / (0..n).filter(|&k| k != i).map(|k| x[i] - x[k]).product::<f64>())
        .collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = w[j] / w[i] / (x[i] - x[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

/// Tensor grid on the sphere for functions of a fixed sector.
#[derive(Clone)]
pub struct AngularGrid {
    sector: HalfInt,
    theta: Vec<f64>,
    cos_theta: Vec<f64>,
    weights: Vec<f64>,
    phi: Vec<f64>,
    diff: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for AngularGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AngularGrid")
            .field("sector", &self.sector)
            .field("n_theta", &self.n_theta())
            .field("n_phi", &self.n_phi())
            .finish()
    }
}

impl AngularGrid {
    pub fn new(n_theta: usize, n_phi: usize, sector: HalfInt) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidParameter("angular grid needs at least one node per axis".into()));
        }
        let (x, weights) = gauss_legendre(n_theta);
        // θ ascending means cos θ descending.
        let cos_theta: Vec<f64> = x.iter().rev().copied().collect();
        let weights: Vec<f64> = weights.into_iter().rev().collect();
        let theta = cos_theta.iter().map(|c| c.acos()).collect();
        let phi = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
        let diff = barycentric_diff(&cos_theta);
        let mut planner = FftPlanner::new();
        Ok(Self {
            sector,
            theta,
            cos_theta,
            weights,
            phi,
            diff,
            forward: planner.plan_fft_forward(n_phi),
            inverse: planner.plan_fft_inverse(n_phi),
        })
    }

    /// Smallest grid resolving every eigenfunction with total angular
    /// momentum up to `j`, including one ladder step.
    pub fn for_degree(j: HalfInt, sector: HalfInt) -> Result<Self> {
        let n_theta = j.0 as usize + 2;
        let n_phi = 2 * (j.0 as usize + 4);
        Self::new(n_theta, n_phi, sector)
    }

    /// Errors with [`Error::GridTooCoarse`] unless degree `j` is resolved.
    pub fn require(&self, j: HalfInt) -> Result<()> {
        let required = j.0.max(0) as usize + 2;
        if self.n_theta() < required {
            return Err(Error::GridTooCoarse {
                n_theta: self.n_theta(),
                required,
            });
        }
        if self.n_phi() < j.0.max(0) as usize + 4 {
            return Err(Error::InvalidParameter(format!(
                "n_phi = {} cannot resolve azimuthal modes up to |m| = {} + 1",
                self.n_phi(),
                j
            )));
        }
        Ok(())
    }

    pub fn sector(&self) -> HalfInt {
        self.sector
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Gauss–Legendre weights in `cos θ`, aligned with [`Self::theta`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Node `(θ, φ)` at flat index `idx` (θ-major).
    pub fn node(&self, idx: usize) -> (f64, f64) {
        (self.theta[idx / self.n_phi()], self.phi[idx % self.n_phi()])
    }

    pub fn sample<F>(&self, f: F) -> Vec<C64>
    where
        F: Fn(f64, f64) -> C64 + Sync,
    {
        (0..self.len()).into_par_iter().map(|i| {
            let (t, p) = self.node(i);
            f(t, p)
        }).collect()
    }

    pub fn sample_fallible<F>(&self, f: F) -> Result<Vec<C64>>
    where
        F: Fn(f64, f64) -> Result<C64> + Sync,
    {
        (0..self.len()).into_par_iter().map(|i| {
            let (t, p) = self.node(i);
            f(t, p)
        }).collect()
    }

    /// Quadrature of `f` with measure `dΩ / 4π`.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        let np = self.n_phi();
        let mut acc = C64::new(0.0, 0.0);
        for (it, w) in self.weights.iter().enumerate() {
            let row: C64 = f[it * np..(it + 1) * np].iter().sum();
            acc += row * *w;
        }
        acc * (2.0 * PI / np as f64) / (4.0 * PI)
    }

    fn shift(&self) -> f64 {
        if self.sector.is_integer() {
            0.0
        } else {
            0.5
        }
    }

    fn mode(&self, k: usize) -> f64 {
        let n = self.n_phi();
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        self.shift() + signed
    }

    /// `(∂θ f, ∂φ f)` on the grid.
    pub fn derivatives(&self, f: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
        let d = self.spectral(f, false)?;
        Ok((d.theta, d.phi))
    }

    /// First and second derivatives in both angles. Each azimuthal mode is
    /// `sin^|m−D|(θ/2) cos^|m+D|(θ/2)` times a polynomial in `cos θ`. It is
    /// written as `E(θ) Q(cos θ)` with `E` either `1` or `sin(θ/2)cos(θ/2)`,
    /// and `Q` is differentiated as a polynomial. Dividing by the full
    /// envelope would amplify roundoff near the poles.
    fn spectral(&self, f: &[C64], second: bool) -> Result<Derivatives> {
        if f.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "grid function has {} values, grid has {} nodes",
                f.len(),
                self.len()
            )));
        }
        let (nt, np) = (self.n_theta(), self.n_phi());
        let sigma = self.shift();
        let twist: Vec<C64> = self.phi.iter().map(|p| C64::from_polar(1.0, -sigma * p)).collect();

        let mut spec = f.to_vec();
        spec.par_chunks_mut(np).for_each(|row| {
            for (v, t) in row.iter_mut().zip(&twist) {
                *v *= t;
            }
            self.forward.process(row);
        });

        let d = self.sector.value();
        let zero = C64::new(0.0, 0.0);
        let mut out = Derivatives {
            theta: vec![zero; nt * np],
            phi: vec![zero; nt * np],
            theta2: vec![zero; if second { nt * np } else { 0 }],
            phi2: vec![zero; if second { nt * np } else { 0 }],
        };
        let nyquist = (np % 2 == 0).then_some(np / 2);
        for k in 0..np {
            let m = self.mode(k);
            // |m − D| and |m + D| have equal parity; the even part of each
            // power is a polynomial in cos θ, so only the parity is factored out
            let (a, b) = (parity(m - d), parity(m + d));
            let env: Vec<f64> = self
                .theta
                .iter()
                .map(|t| (t / 2.0).sin().powf(a) * (t / 2.0).cos().powf(b))
                .collect();
            let p: Vec<C64> = (0..nt).map(|i| spec[i * np + k] / env[i]).collect();
            let dp: Vec<C64> = (0..nt)
                .map(|i| (0..nt).map(|l| p[l] * self.diff[i * nt + l]).sum())
                .collect();
            let ddp: Vec<C64> = if second {
                (0..nt)
                    .map(|i| (0..nt).map(|l| dp[l] * self.diff[i * nt + l]).sum())
                    .collect()
            } else {
                Vec::new()
            };
            let keep_phi = Some(k) != nyquist;
            for i in 0..nt {
                let t = self.theta[i];
                let (sh, ch) = (t / 2.0).sin_cos();
                let (st, ct) = t.sin_cos();
                let idx = i * np + k;
                let e = env[i];
                // E'/E and E''/E of the envelope
                let l1 = 0.5 * a * ch / sh - 0.5 * b * sh / ch;
                out.theta[idx] = spec[idx] * l1 - dp[i] * e * st;
                if keep_phi {
                    out.phi[idx] = spec[idx] * I * m;
                }
                if second {
                    let l2 = l1 * l1 - 0.25 * a / (sh * sh) - 0.25 * b / (ch * ch);
                    out.theta2[idx] =
                        spec[idx] * l2 - dp[i] * e * (2.0 * l1 * st + ct) + ddp[i] * e * st * st;
                    if keep_phi {
                        out.phi2[idx] = -spec[idx] * m * m;
                    }
                }
            }
        }

        let back = |buf: &mut Vec<C64>| {
            buf.par_chunks_mut(np).for_each(|row| {
                self.inverse.process(row);
                for (v, t) in row.iter_mut().zip(&twist) {
                    *v *= t.conj() / np as f64;
                }
            });
        };
        back(&mut out.theta);
        back(&mut out.phi);
        if second {
            back(&mut out.theta2);
            back(&mut out.phi2);
        }
        Ok(out)
    }
}

fn parity(x: f64) -> f64 {
    (x.abs().round() as i64 % 2) as f64
}

struct Derivatives {
    theta: Vec<C64>,
    phi: Vec<C64>,
    theta2: Vec<C64>,
    phi2: Vec<C64>,
}

/// Component of the orbital monopole operator `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaComponent {
    Plus,
    Minus,
    One,
    Two,
    Three,
}

/// Applies a component of `Λ = r × (−i∇ + D B) + D r̂` in the axial gauge,
/// written in polar angles:
/// `Λ± = e^{±iφ}(i cot θ ∂φ ± ∂θ + D / sin θ)`, `Λ₃ = −i∂φ`.
pub fn apply_lambda(grid: &AngularGrid, component: LambdaComponent, f: &[C64], d: f64) -> Result<Vec<C64>> {
    let (ft, fp) = grid.derivatives(f)?;
    let ladder = |sign: f64| -> Vec<C64> {
        (0..grid.len())
            .map(|i| {
                let (t, p) = grid.node(i);
                let inner = I * fp[i] / t.tan() + ft[i] * sign + f[i] * (d / t.sin());
                C64::from_polar(1.0, sign * p) * inner
            })
            .collect()
    };
    Ok(match component {
        LambdaComponent::Plus => ladder(1.0),
        LambdaComponent::Minus => ladder(-1.0),
        LambdaComponent::One => {
            let (up, down) = (ladder(1.0), ladder(-1.0));
            up.iter().zip(&down).map(|(u, v)| (u + v) * 0.5).collect()
        }
        LambdaComponent::Two => {
            let (up, down) = (ladder(1.0), ladder(-1.0));
            up.iter().zip(&down).map(|(u, v)| (u - v) / (2.0 * I)).collect()
        }
        LambdaComponent::Three => fp.iter().map(|v| -I * v).collect(),
    })
}

/// `Λ² f = Σ_k Λ_k Λ_k f`.
pub fn apply_lambda_sq(grid: &AngularGrid, f: &[C64], d: f64) -> Result<Vec<C64>> {
    let mut out = vec![C64::new(0.0, 0.0); f.len()];
    for c in [LambdaComponent::One, LambdaComponent::Two, LambdaComponent::Three] {
        let once = apply_lambda(grid, c, f, d)?;
        let twice = apply_lambda(grid, c, &once, d)?;
        for (o, v) in out.iter_mut().zip(twice) {
            *o += v;
        }
    }
    Ok(out)
}

/// `Λ² f` in the second-order polar form
/// `−(1/sin θ)∂θ(sin θ ∂θ f) + (−∂φ²f + 2iD cos θ ∂φf + D²f)/sin²θ`,
/// which expands `Λ⁻Λ⁺ + Λ₃² + Λ₃`.
pub fn apply_lambda_sq_polar(grid: &AngularGrid, f: &[C64], d: f64) -> Result<Vec<C64>> {
    let der = grid.spectral(f, true)?;
    Ok((0..grid.len())
        .map(|i| {
            let (t, _) = grid.node(i);
            let (s, c) = t.sin_cos();
            let polar = -der.theta2[i] - der.theta[i] * (c / s);
            polar + (-der.phi2[i] + I * (2.0 * d * c) * der.phi[i] + f[i] * (d * d)) / (s * s)
        })
        .collect())
}

fn max_abs(v: impl Iterator<Item = C64>) -> f64 {
    v.map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenResidual {
    pub residual_sq: f64,
    pub residual_3: f64,
}

/// Max-norm residuals of `(Λ² − j(j+1))Z` and `(Λ₃ − m)Z` on `grid` with an
/// arbitrary `D` in the operators.
pub fn eigen_residual_on(grid: &AngularGrid, j: HalfInt, m_prime: HalfInt, m: HalfInt, d: f64) -> Result<EigenResidual> {
    check_triple(j, m_prime, m)?;
    grid.require(j)?;
    if grid.sector() != m_prime {
        return Err(Error::InvalidParameter(format!(
            "grid sector {} does not match m' = {m_prime}",
            grid.sector()
        )));
    }
    let z = grid.sample_fallible(|t, p| monopole_harmonic(j, m_prime, m, t, p))?;
    let l2 = apply_lambda_sq(grid, &z, d)?;
    let l3 = apply_lambda(grid, LambdaComponent::Three, &z, d)?;
    let jj = j.value() * (j.value() + 1.0);
    Ok(EigenResidual {
        residual_sq: max_abs(l2.iter().zip(&z).map(|(a, b)| a - b * jj)),
        residual_3: max_abs(l3.iter().zip(&z).map(|(a, b)| a - b * m.value())),
    })
}

/// Eigen-residuals of `Z^{m'm}_j` with `D = m'` on the smallest adequate grid.
pub fn eigen_residual(j: HalfInt, m_prime: HalfInt, m: HalfInt) -> Result<EigenResidual> {
    check_triple(j, m_prime, m)?;
    let grid = AngularGrid::for_degree(j, m_prime)?;
    eigen_residual_on(&grid, j, m_prime, m, m_prime.value())
}

/// Every admissible `(j, m', m)` with `j ≤ j_max`, ordered by `j`, then `m'`,
/// then `m`.
pub fn admissible_triples(j_max: HalfInt) -> Vec<(HalfInt, HalfInt, HalfInt)> {
    let mut out = Vec::new();
    for tj in 0..=j_max.0.max(-1) {
        let j = HalfInt(tj);
        for mp in dirac_condition(j).unwrap_or_default() {
            for m in dirac_condition(j).unwrap_or_default() {
                out.push((j, mp, m));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub labels: Vec<(HalfInt, HalfInt, HalfInt)>,
    pub gram: DMatrix<C64>,
}

impl GramReport {
    pub fn max_deviation(&self) -> f64 {
        let n = self.gram.nrows();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((self.gram[(a, b)] - target).norm());
            }
        }
        worst
    }
}

/// Gram matrix of the lifted eigenfunctions `e^{im'χ} Z^{m'm}_j`, `j ≤ j_max`,
/// under the normalised Haar measure `dΩ dχ / 16π²`, `χ ∈ [0, 4π)`.
///
/// Gauss–Legendre in `cos θ` with `2 j_max + 2` nodes and uniform rules in `φ`
/// and `χ` make the quadrature exact for these integrands.
pub fn gram_matrix(j_max: HalfInt) -> Result<GramReport> {
    let labels = admissible_triples(j_max);
    let tj = j_max.0.max(0) as usize;
    let (x, w) = gauss_legendre(tj + 2);
    let n_phi = tj + 2;
    let n_chi = 2 * tj + 2;
    let mut nodes = Vec::with_capacity(x.len() * n_phi * n_chi);
    for (xi, wi) in x.iter().zip(&w) {
        for a in 0..n_phi {
            for c in 0..n_chi {
                let phi = 2.0 * PI * a as f64 / n_phi as f64;
                let chi = 4.0 * PI * c as f64 / n_chi as f64;
                let weight = wi * (2.0 * PI / n_phi as f64) * (4.0 * PI / n_chi as f64) / (16.0 * PI * PI);
                nodes.push((xi.acos(), phi, chi, weight));
            }
        }
    }
    let values: Vec<Vec<C64>> = labels
        .par_iter()
        .map(|&(j, mp, m)| {
            nodes
                .iter()
                .map(|&(t, p, c, _)| lifted_harmonic(j, mp, m, t, p, c))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = labels.len();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    values[a]
                        .iter()
                        .zip(&values[b])
                        .zip(&nodes)
                        .map(|((u, v), node)| u.conj() * v * node.3)
                        .sum()
                })
                .collect()
        })
        .collect();
    let gram = DMatrix::from_fn(n, n, |a, b| rows[a][b]);
    Ok(GramReport { labels, gram })
}

/// Two-component spinor field value.
pub type Spinor2 = Vector2<C64>;

/// Total angular momentum (ħ = 1) of one Weyl component in the axial gauge:
/// `J = r × (−i∇ ± D B) ± D r̂ + s/2`, upper signs for `ξ`.
///
/// Gradients are fourth-order central differences with step `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalAngularMomentum {
    pub d: f64,
    pub which: Chirality,
    pub h: f64,
}

impl TotalAngularMomentum {
    pub fn new(d: f64, which: Chirality) -> Self {
        Self { d, which, h: 1e-3 }
    }

    fn signed_d(&self) -> f64 {
        match self.which {
            Chirality::Xi => self.d,
            Chirality::Eta => -self.d,
        }
    }

    /// Component `k ∈ {0, 1, 2}` of `J f` at `p`.
    pub fn apply_at<F>(&self, k: usize, f: &F, p: &Vec3) -> Result<Spinor2>
    where
        F: Fn(&Vec3) -> Result<Spinor2> + ?Sized,
    {
        let d = self.signed_d();
        let here = f(p)?;
        let mut grad = [Spinor2::zeros(); 3];
        for (b, g) in grad.iter_mut().enumerate() {
            let at = |s: f64| {
                let mut q = *p;
                q[b] += s * self.h;
                f(&q)
            };
            *g = (at(-2.0)? - at(-1.0)? * C64::from(8.0) + at(1.0)? * C64::from(8.0) - at(2.0)?) / C64::from(12.0 * self.h);
        }
        let bhat = axial_gauge_potential(p, 1.0)?;
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        // kinetic = −i∇f + D B f
        let kin: Vec<Spinor2> = (0..3).map(|b| grad[b] * (-I) + here * C64::from(d * bhat[b])).collect();
        let (a1, a2) = ((k + 1) % 3, (k + 2) % 3);
        let orbital = kin[a2] * C64::from(p[a1]) - kin[a1] * C64::from(p[a2]);
        let spin = pauli()[k] * here * C64::from(0.5);
        Ok(orbital + here * C64::from(d * p[k] / r) + spin)
    }

    /// `J_k f` as a new field.
    pub fn apply<'a, F>(&'a self, k: usize, f: &'a F) -> impl Fn(&Vec3) -> Result<Spinor2> + 'a
    where
        F: Fn(&Vec3) -> Result<Spinor2> + ?Sized,
    {
        move |p: &Vec3| self.apply_at(k, f, p)
    }

    /// `J² f` at `p`.
    pub fn squared_at<F>(&self, f: &F, p: &Vec3) -> Result<Spinor2>
    where
        F: Fn(&Vec3) -> Result<Spinor2> + ?Sized,
    {
        let mut acc = Spinor2::zeros();
        for k in 0..3 {
            let jf = self.apply(k, f);
            acc += self.apply_at(k, &jf, p)?;
        }
        Ok(acc)
    }

    /// `[J_k, J_l] f − i ε_{klm} J_m f` at `p` for cyclic `(k, l, m)`.
    pub fn commutator_residual_at<F>(&self, k: usize, f: &F, p: &Vec3) -> Result<f64>
    where
        F: Fn(&Vec3) -> Result<Spinor2> + ?Sized,
    {
        let (l, m) = ((k + 1) % 3, (k + 2) % 3);
        let jl = self.apply(l, f);
        let jk = self.apply(k, f);
        let klf = self.apply_at(k, &jl, p)?;
        let lkf = self.apply_at(l, &jk, p)?;
        let mf = self.apply_at(m, f, p)?;
        Ok((klf - lkf - mf * I).norm())
    }
}

/// Applies all three components of `J` at each point.
pub fn total_j_apply<F>(field: &F, d: f64, which: Chirality, points: &[Vec3]) -> Result<Vec<[Spinor2; 3]>>
where
    F: Fn(&Vec3) -> Result<Spinor2> + Sync,
{
    let op = TotalAngularMomentum::new(d, which);
    points
        .par_iter()
        .map(|p| Ok([op.apply_at(0, field, p)?, op.apply_at(1, field, p)?, op.apply_at(2, field, p)?]))
        .collect()
}

/// Points on a sphere of the given radius at Gauss–Legendre polar nodes and
/// uniform azimuths, so the z-axis is never sampled.
pub fn shell_points(radius: f64, n_theta: usize, n_phi: usize) -> Vec<Vec3> {
    let (x, _) = gauss_legendre(n_theta);
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for c in x {
        let s = (1.0 - c * c).sqrt();
        for k in 0..n_phi {
            let phi = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
            out.push([radius * s * phi.cos(), radius * s * phi.sin(), radius * c]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    /// Three-term recurrence in `j`, seeded at `j₀ = max(|m|, |m'|)` where the
    /// factorial sum has a single term.
    fn wigner_d_recurrence(j: HalfInt, mp: HalfInt, m: HalfInt, beta: f64) -> f64 {
        let (mv, mpv) = (m.value(), mp.value());
        let j0 = m.abs().max(mp.abs());
        let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let fact = |n: f64| (1..=n.round() as u64).map(|k| k as f64).product::<f64>();
        let jv0 = j0.value();
        // single term of the sum: the only admissible summation index
        let seed = {
            let mut acc = 0.0;
            for k in 0..=(2.0 * jv0) as i32 {
                let k = k as f64;
                let args = [jv0 + mv - k, k, mpv - mv + k, jv0 - mpv - k];
                if args.iter().any(|a| *a < -1e-9) {
                    continue;
                }
                let sign = if ((mpv - mv + k).round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * (fact(jv0 + mpv) * fact(jv0 - mpv) * fact(jv0 + mv) * fact(jv0 - mv)).sqrt()
                    / args.iter().map(|a| fact(*a)).product::<f64>()
                    * c.powi((2.0 * jv0 + mv - mpv - 2.0 * k).round() as i32)
                    * s.powi((mpv - mv + 2.0 * k).round() as i32);
            }
            acc
        };
        let (mut prev, mut cur, mut jv) = (0.0, seed, jv0);
        if jv0 == 0.0 && j.value() >= 1.0 {
            prev = seed;
            cur = beta.cos();
            jv = 1.0;
        }
        while jv < j.value() - 1e-9 {
            let jn = jv + 1.0;
            let a = jv * ((jn * jn - mv * mv) * (jn * jn - mpv * mpv)).sqrt();
            let b = (2.0 * jv + 1.0) * (jv * jn * beta.cos() - mv * mpv);
            let cc = jn * ((jv * jv - mv * mv) * (jv * jv - mpv * mpv)).sqrt();
            let next = (b * cur - cc * prev) / a;
            prev = cur;
            cur = next;
            jv = jn;
        }
        cur
    }

    /// `√(4π) Y_l^m` (Condon–Shortley) from the associated Legendre recurrence.
    fn sph_harm_4pi(l: i32, m: i32, theta: f64, phi: f64) -> C64 {
        let am = m.abs();
        let x = theta.cos();
        let sx = theta.sin();
        let mut pmm = 1.0;
        for k in 1..=am {
            pmm *= -((2 * k - 1) as f64) * sx;
        }
        let plm = if l == am {
            pmm
        } else {
            let mut pm1 = x * (2 * am + 1) as f64 * pmm;
            let mut pm0 = pmm;
            for ll in (am + 2)..=l {
                let next = ((2 * ll - 1) as f64 * x * pm1 - (ll + am - 1) as f64 * pm0) / (ll - am) as f64;
                pm0 = pm1;
                pm1 = next;
            }
            if l == am + 1 {
                x * (2 * am + 1) as f64 * pmm
            } else {
                pm1
            }
        };
        let ratio: f64 = ((l - am + 1)..=(l + am)).map(|k| 1.0 / k as f64).product();
        let norm = ((2 * l + 1) as f64 * ratio).sqrt();
        let mut y = norm * plm * C64::from_polar(1.0, am as f64 * phi);
        if m < 0 {
            let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
            y = y.conj() * sign;
        }
        y
    }

    #[test]
    fn half_int_parsing_and_display() {
        assert_eq!(HalfInt::from_f64(1.5).unwrap(), h(3));
        assert!(HalfInt::from_f64(0.3).is_err());
        assert_eq!(h(3).to_string(), "3/2");
        assert_eq!(h(-4).to_string(), "-2");
        let v: HalfInt = serde_json::from_str("-0.5").unwrap();
        assert_eq!(v, h(-1));
        assert!(serde_json::from_str::<HalfInt>("0.25").is_err());
    }

    #[test]
    fn dirac_condition_lists() {
        assert_eq!(dirac_condition(h(1)).unwrap(), vec![h(-1), h(1)]);
        assert_eq!(dirac_condition(h(0)).unwrap(), vec![h(0)]);
        let two = dirac_condition(h(4)).unwrap();
        assert_eq!(two, vec![h(-4), h(-2), h(0), h(2), h(4)]);
        assert!(dirac_condition(h(-1)).is_err());
        for d in two {
            assert!(lift_is_single_valued(d.value()));
        }
        assert!(!lift_is_single_valued(0.3));
    }

    #[test]
    fn dirac_number_requires_d_equal_m_prime() {
        assert!(DiracNumber::new(0.5, h(1), h(1), h(-1)).is_ok());
        assert!(DiracNumber::new(0.8, h(1), h(1), h(-1)).is_err());
        assert!(DiracNumber::new(1.5, h(1), h(3), h(1)).is_err());
        let units = crate::Units::default();
        assert!(DiracNumber::from_charges(1.0, 0.3, &units, h(2), h(0)).is_err());
        let ok = DiracNumber::from_charges(1.0, 0.5, &units, h(3), h(-1)).unwrap();
        assert_eq!(ok.m_prime, h(1));
    }

    #[test]
    fn wigner_d_small_cases() {
        for t in [0.0, 0.4, 1.9, PI] {
            assert_eq!(wigner_d(h(0), h(0), h(0), t).unwrap(), 1.0);
            assert!((wigner_d(h(1), h(1), h(1), t).unwrap() - (t / 2.0).cos()).abs() < 1e-15);
        }
        assert!(wigner_d(h(2), h(4), h(0), 0.3).is_err());
        assert!(wigner_d(h(2), h(1), h(0), 0.3).is_err());
    }

    #[test]
    fn wigner_d_rows_are_unit_vectors() {
        for tj in 0..=8 {
            let j = h(tj);
            for &t in &[0.3, 1.1, 2.7] {
                for mp in dirac_condition(j).unwrap() {
                    let s: f64 = dirac_condition(j)
                        .unwrap()
                        .into_iter()
                        .map(|m| wigner_d(j, mp, m, t).unwrap().powi(2))
                        .sum();
                    assert!((s - 1.0).abs() < 1e-12, "j = {j}: {s}");
                }
            }
        }
    }

    #[test]
    fn wigner_d_matches_j_recurrence() {
        for tj in 0..=12 {
            let j = h(tj);
            for mp in dirac_condition(j).unwrap() {
                for m in dirac_condition(j).unwrap() {
                    for &t in &[0.2, 1.3, 2.9] {
                        let a = wigner_d(j, mp, m, t).unwrap();
                        let b = wigner_d_recurrence(j, mp, m, t);
                        assert!((a - b).abs() < 1e-12, "({j},{mp},{m}) at {t}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn wigner_d_matches_matrix_exponential() {
        // d^j(β) = exp(−iβJ_y) = exp(β (J₋ − J₊)/2) in the |j, m⟩ basis
        for tj in [1, 2, 3, 5] {
            let j = h(tj);
            let n = tj as usize + 1;
            let ms: Vec<f64> = (0..n).map(|k| j.value() - k as f64).collect();
            let mut gen = DMatrix::<f64>::zeros(n, n);
            for c in 1..n {
                // ⟨m+1|J₊|m⟩ with m = ms[c]
                let m = ms[c];
                let up = (j.value() * (j.value() + 1.0) - m * (m + 1.0)).sqrt();
                gen[(c - 1, c)] -= 0.5 * up;
                gen[(c, c - 1)] += 0.5 * up;
            }
            let beta = 0.83;
            let e = (gen * beta).exp();
            for r in 0..n {
                for c in 0..n {
                    let mp = HalfInt::from_f64(ms[r]).unwrap();
                    let m = HalfInt::from_f64(ms[c]).unwrap();
                    assert!((e[(r, c)] - wigner_d(j, mp, m, beta).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn wigner_d_orthogonality_in_j() {
        let (x, w) = gauss_legendre(20);
        for (mp, m) in [(h(1), h(-1)), (h(0), h(2)), (h(3), h(1))] {
            for tj in (m.abs().max(mp.abs()).twice()..=9).step_by(2) {
                for tj2 in (m.abs().max(mp.abs()).twice()..=9).step_by(2) {
                    let s: f64 = x
                        .iter()
                        .zip(&w)
                        .map(|(c, wi)| wi * wigner_d(h(tj), mp, m, c.acos()).unwrap() * wigner_d(h(tj2), mp, m, c.acos()).unwrap())
                        .sum();
                    let want = if tj == tj2 { 2.0 / (tj as f64 + 1.0) } else { 0.0 };
                    assert!((s - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn harmonics_reduce_to_spherical_harmonics() {
        for l in 0..=3 {
            for m in -l..=l {
                for &(t, p) in &[(0.4, 0.1), (1.7, 2.5), (2.8, -1.2)] {
                    let z = monopole_harmonic(h(2 * l), h(0), h(2 * m), t, p).unwrap();
                    let y = sph_harm_4pi(l, m, t, p) * i_pow(m);
                    assert!((z - y).norm() < 1e-10, "l={l} m={m}: {z} vs {y}");
                }
            }
        }
        assert_eq!(monopole_harmonic(h(0), h(0), h(0), 1.0, 2.0).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..=13 {
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s - want).abs() < 1e-14);
        }
    }

    #[test]
    fn harmonics_are_normalised_on_the_sphere() {
        let grid = AngularGrid::for_degree(h(5), h(3)).unwrap();
        let z = grid.sample(|t, p| monopole_harmonic(h(5), h(3), h(-1), t, p).unwrap());
        let norm = grid.integrate(&z.iter().map(|v| v.norm_sqr().into()).collect::<Vec<C64>>());
        assert!((norm.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_three_is_azimuthal_derivative() {
        let grid = AngularGrid::new(8, 16, h(0)).unwrap();
        let f = grid.sample(|t, p| C64::from_polar(1.0, 2.0 * p) * t.sin().powi(2) * (1.0 + t.cos()));
        let out = apply_lambda(&grid, LambdaComponent::Three, &f, 0.0).unwrap();
        for (a, b) in out.iter().zip(&f) {
            assert!((a - b * 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn raising_annihilates_top_harmonic() {
        let grid = AngularGrid::for_degree(h(2), h(0)).unwrap();
        let y11 = grid.sample(|t, p| sph_harm_4pi(1, 1, t, p));
        let up = apply_lambda(&grid, LambdaComponent::Plus, &y11, 0.0).unwrap();
        assert!(max_abs(up.into_iter()) < 1e-10);
    }

    #[test]
    fn composed_and_polar_lambda_sq_agree() {
        for (j, mp, m) in admissible_triples(h(8)) {
            let grid = AngularGrid::for_degree(j, mp).unwrap();
            let z = grid.sample(|t, p| monopole_harmonic(j, mp, m, t, p).unwrap());
            let a = apply_lambda_sq(&grid, &z, mp.value()).unwrap();
            let b = apply_lambda_sq_polar(&grid, &z, mp.value()).unwrap();
            let r = max_abs(a.iter().zip(&b).map(|(x, y)| x - y));
            assert!(r < 1e-10, "{j} {mp} {m}: {r}");
        }
    }

    #[test]
    fn refinement_does_not_amplify_roundoff() {
        // top of the ladder, where Λ⁺Z vanishes
        let (j, mp, m) = (h(8), h(8), h(8));
        for extra in [0, 8, 24] {
            let grid = AngularGrid::new(10 + extra, 24, mp).unwrap();
            let r = eigen_residual_on(&grid, j, mp, m, mp.value()).unwrap();
            assert!(r.residual_sq < 1e-10, "+{extra}: {r:?}");
        }
    }

    #[test]
    fn lambda_commutator_on_test_function() {
        let grid = AngularGrid::new(10, 16, h(0)).unwrap();
        let f = grid.sample(|t, p| C64::from_polar(t.sin(), p));
        let l1f = apply_lambda(&grid, LambdaComponent::One, &f, 0.0).unwrap();
        let l2f = apply_lambda(&grid, LambdaComponent::Two, &f, 0.0).unwrap();
        let l12 = apply_lambda(&grid, LambdaComponent::One, &l2f, 0.0).unwrap();
        let l21 = apply_lambda(&grid, LambdaComponent::Two, &l1f, 0.0).unwrap();
        let l3f = apply_lambda(&grid, LambdaComponent::Three, &f, 0.0).unwrap();
        let r = max_abs((0..f.len()).map(|i| l12[i] - l21[i] - I * l3f[i]));
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn eigen_residuals_small_cases() {
        let r = eigen_residual(h(1), h(1), h(-1)).unwrap();
        assert!(r.residual_sq < 1e-8 && r.residual_3 < 1e-8, "{r:?}");
        let r0 = eigen_residual(h(0), h(0), h(0)).unwrap();
        assert!(r0.residual_sq < 1e-13 && r0.residual_3 < 1e-13, "{r0:?}");
    }

    #[test]
    fn wrong_dirac_number_is_detected() {
        let grid = AngularGrid::for_degree(h(1), h(1)).unwrap();
        let r = eigen_residual_on(&grid, h(1), h(1), h(-1), 0.5 + 0.3).unwrap();
        assert!(r.residual_sq > 1e-2, "{r:?}");
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let grid = AngularGrid::new(3, 16, h(1)).unwrap();
        assert!(matches!(
            eigen_residual_on(&grid, h(3), h(1), h(1), 0.5),
            Err(Error::GridTooCoarse { n_theta: 3, required: 5 })
        ));
    }

    #[test]
    fn theta_derivative_converges_spectrally() {
        let err = |n: usize| {
            let grid = AngularGrid::new(n, 4, h(0)).unwrap();
            let f = grid.sample(|t, _| C64::from(t.cos().exp()));
            let (dt, _) = grid.derivatives(&f).unwrap();
            max_abs((0..grid.len()).map(|i| {
                let (t, _) = grid.node(i);
                dt[i] + t.sin() * t.cos().exp()
            }))
        };
        let (e4, e8) = (err(4), err(8));
        assert!(e4 / e8 > 1e2, "{e4} {e8}");
    }

    #[test]
    fn gram_matrix_small() {
        let g = gram_matrix(h(2)).unwrap();
        assert_eq!(g.labels.len(), 1 + 4 + 9);
        assert!(g.max_deviation() < 1e-12, "{}", g.max_deviation());
    }

    fn spin_up_p_wave(p: &Vec3) -> Result<Spinor2> {
        Ok(Spinor2::new(C64::new(p[0], p[1]), C64::new(0.0, 0.0)))
    }

    fn sigma_dot_r(p: &Vec3) -> Result<Spinor2> {
        Ok(Spinor2::new(C64::from(p[2]), C64::new(p[0], p[1])))
    }

    #[test]
    fn total_j_without_charge_is_spin_orbit() {
        let op = TotalAngularMomentum::new(0.0, Chirality::Xi);
        for p in shell_points(1.3, 4, 5) {
            let top = spin_up_p_wave(&p).unwrap();
            let j3 = op.apply_at(2, &spin_up_p_wave, &p).unwrap();
            assert!((j3 - top * C64::from(1.5)).norm() < 1e-8);
            let jsq = op.squared_at(&spin_up_p_wave, &p).unwrap();
            assert!((jsq - top * C64::from(3.75)).norm() < 1e-8);

            let half = sigma_dot_r(&p).unwrap();
            let jsq = op.squared_at(&sigma_dot_r, &p).unwrap();
            assert!((jsq - half * C64::from(0.75)).norm() < 1e-8);
        }
    }

    #[test]
    fn total_j_chiralities_differ_by_sign_of_d() {
        let f = |p: &Vec3| -> Result<Spinor2> { Ok(Spinor2::new(C64::new(p[0] * p[2], 0.3), C64::new(p[1], -p[0]))) };
        let pts = shell_points(0.9, 3, 4);
        let a = total_j_apply(&f, 0.7, Chirality::Xi, &pts).unwrap();
        let b = total_j_apply(&f, -0.7, Chirality::Eta, &pts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn total_j_obeys_angular_momentum_algebra() {
        let f = |p: &Vec3| -> Result<Spinor2> {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            Ok(Spinor2::new(C64::new(p[0], p[1]) / r, C64::new(0.0, 0.0)))
        };
        for d in [0.0, 0.5, -1.0, 1.5] {
            let op = TotalAngularMomentum::new(d, Chirality::Xi);
            for p in shell_points(1.1, 3, 3) {
                for k in 0..3 {
                    let r = op.commutator_residual_at(k, &f, &p).unwrap();
                    assert!(r < 1e-7, "D = {d}, k = {k}: {r}");
                }
            }
        }
    }
}
