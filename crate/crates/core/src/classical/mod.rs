//! Classical and eikonal dynamics of a charge in the field of a pole:
//! the Poincaré equation, its vector first integral and cone, Birkeland
//! focusing, and the geometric-optics Hamiltonian.

mod eikonal;
mod integrators;

pub use eikonal::{eikonal_hamiltonian, EikonalPoint, HamiltonFlow};
pub use integrators::{
    DormandPrince, IntegrationStats, Integrator, IntegratorRegistry, Observer, OdeSystem, Rk4, StepOptions,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::potentials::{cross, dot, norm, Vec3};
use crate::{Error, Result};

/// Left or right monopole. The left one carries the minus sign of the
/// eikonal equation of motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareParams {
    pub lambda: f64,
    #[serde(default)]
    pub sign: Handedness,
}

impl PoincareParams {
    pub fn new(lambda: f64, sign: Handedness) -> Self {
        Self { lambda, sign }
    }

    /// `λ = eg/mc` for a massive charge.
    pub fn classical(e: f64, g: f64, m: f64, c: f64) -> Self {
        Self::new(e * g / (m * c), Handedness::Left)
    }

    /// `λ = ecg/E` for the massless eikonal limit.
    pub fn eikonal(e: f64, g: f64, energy: f64, c: f64) -> Self {
        Self::new(e * c * g / energy, Handedness::Left)
    }

    /// The coupling with the handedness folded in: `+λ` left, `−λ` right.
    pub fn signed(&self) -> f64 {
        match self.sign {
            Handedness::Left => self.lambda,
            Handedness::Right => -self.lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryState {
    pub t: f64,
    pub r: Vec3,
    pub v: Vec3,
}

impl TrajectoryState {
    pub fn new(r: Vec3, v: Vec3) -> Self {
        Self { t: 0.0, r, v }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.r.iter().chain(&self.v).all(|x| x.is_finite())) {
            return Err(Error::InvalidParameter("non-finite trajectory state".into()));
        }
        if norm(&self.r) == 0.0 {
            return Err(Error::AtOrigin);
        }
        Ok(())
    }
}

/// `d²r/dt² = −s (v × r)/r³` with `s` the signed coupling.
pub fn poincare_rhs(s: &TrajectoryState, p: &PoincareParams) -> Result<Vec3> {
    acceleration(&s.r, &s.v, p.signed())
}

fn acceleration(r: &Vec3, v: &Vec3, s: f64) -> Result<Vec3> {
    let rn = norm(r);
    if rn == 0.0 {
        return Err(Error::AtOrigin);
    }
    let f = -s / (rn * rn * rn);
    let c = cross(v, r);
    Ok([f * c[0], f * c[1], f * c[2]])
}

/// `Λ = r × v + s r/|r|`.
pub fn poincare_integral(s: &TrajectoryState, p: &PoincareParams) -> Result<Vec3> {
    lambda_vector(&s.r, &s.v, p.signed())
}

fn lambda_vector(r: &Vec3, v: &Vec3, s: f64) -> Result<Vec3> {
    let rn = norm(r);
    if rn == 0.0 {
        return Err(Error::AtOrigin);
    }
    let l = cross(r, v);
    Ok([l[0] + s * r[0] / rn, l[1] + s * r[1] / rn, l[2] + s * r[2] / rn])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub lambda_vec: Vec3,
    pub axis: Vec3,
    /// Half-angle `Θ'` with `cos Θ' = s/|Λ|`.
    pub half_angle: f64,
}

pub fn cone_parameters(s0: &TrajectoryState, p: &PoincareParams) -> Result<Cone> {
    let l = poincare_integral(s0, p)?;
    let n = norm(&l);
    if n == 0.0 {
        return Err(Error::InvalidParameter("Λ = 0: the cone is undefined".into()));
    }
    Ok(Cone {
        lambda_vec: l,
        axis: [l[0] / n, l[1] / n, l[2] / n],
        half_angle: (p.signed() / n).clamp(-1.0, 1.0).acos(),
    })
}

/// Angle between two vectors, accurate for small and large angles.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    norm(&cross(a, b)).atan2(dot(a, b))
}

struct PoincareSystem {
    s: f64,
    r_min: f64,
}

impl OdeSystem for PoincareSystem {
    fn dim(&self) -> usize {
        6
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let r = [y[0], y[1], y[2]];
        let v = [y[3], y[4], y[5]];
        if norm(&r) < self.r_min {
            return Err(Error::OriginApproach { t, r_min: self.r_min });
        }
        let a = acceleration(&r, &v, self.s)?;
        dy[..3].copy_from_slice(&v);
        dy[3..].copy_from_slice(&a);
        Ok(())
    }

    fn check_step(&self, t: f64, y_prev: &[f64], y_new: &[f64]) -> Result<()> {
        // Closest approach of the chord to the origin.
        let a = [y_prev[0], y_prev[1], y_prev[2]];
        let d = [y_new[0] - a[0], y_new[1] - a[1], y_new[2] - a[2]];
        let dd = dot(&d, &d);
        let u = if dd > 0.0 { (-dot(&a, &d) / dd).clamp(0.0, 1.0) } else { 0.0 };
        let closest = [a[0] + u * d[0], a[1] + u * d[1], a[2] + u * d[2]];
        if norm(&closest) < self.r_min {
            return Err(Error::OriginApproach { t, r_min: self.r_min });
        }
        Ok(())
    }
}

/// Options of [`integrate_trajectory`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    pub tol: f64,
    pub integrator: String,
    /// Step of fixed-step integrators.
    pub h: Option<f64>,
    pub r_min: f64,
}

impl TrajectoryOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            integrator: "dopri5".into(),
            h: None,
            r_min: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectoryState>,
    pub params: PoincareParams,
    pub stats: IntegrationStats,
    pub tol: f64,
    pub integrator: String,
    /// Set when the run stopped at the origin exclusion radius.
    pub hit_origin: bool,
}

/// Conservation diagnostics of a trajectory, maxima over all samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `max |(|v| − |v₀|)| / |v₀|`.
    pub speed_drift: f64,
    /// `max_i |Λ_i − Λ_i(0)| / |Λ(0)|`.
    pub lambda_drift: f64,
    /// `max |Λ·r̂ − s|`.
    pub projection_error: f64,
    /// `max |angle(r̂, Λ₀) − Θ'|`.
    pub cone_error: f64,
    /// `max (|a·r̂| + |a·v̂|)/|a|` over samples with `a ≠ 0`.
    pub force_orthogonality: f64,
}

impl Trajectory {
    pub fn lambda_at(&self, i: usize) -> Vec3 {
        let s = &self.samples[i];
        lambda_vector(&s.r, &s.v, self.params.signed()).expect("samples avoid the origin")
    }

    /// Per-sample deviation of the cone angle from its initial value.
    pub fn cone_angle_errors(&self) -> Vec<f64> {
        let Ok(cone) = cone_parameters(&self.samples[0], &self.params) else {
            return vec![0.0; self.samples.len()];
        };
        self.samples
            .iter()
            .map(|s| angle_between(&s.r, &cone.axis) - cone.half_angle)
            .collect()
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let s0 = &self.samples[0];
        let v0 = norm(&s0.v);
        let l0 = self.lambda_at(0);
        let l0n = norm(&l0);
        let sgn = self.params.signed();
        let mut d = Diagnostics {
            speed_drift: 0.0,
            lambda_drift: 0.0,
            projection_error: 0.0,
            cone_error: 0.0,
            force_orthogonality: 0.0,
        };
        for (i, s) in self.samples.iter().enumerate() {
            if v0 > 0.0 {
                d.speed_drift = d.speed_drift.max((norm(&s.v) - v0).abs() / v0);
            }
            let l = self.lambda_at(i);
            if l0n > 0.0 {
                for k in 0..3 {
                    d.lambda_drift = d.lambda_drift.max((l[k] - l0[k]).abs() / l0n);
                }
            }
            let rn = norm(&s.r);
            d.projection_error = d.projection_error.max((dot(&l, &s.r) / rn - sgn).abs());
            let a = acceleration(&s.r, &s.v, sgn).expect("samples avoid the origin");
            let an = norm(&a);
            let vn = norm(&s.v);
            if an > 0.0 && vn > 0.0 {
                let o = dot(&a, &s.r).abs() / (an * rn) + dot(&a, &s.v).abs() / (an * vn);
                d.force_orthogonality = d.force_orthogonality.max(o);
            }
        }
        d.cone_error = self.cone_angle_errors().iter().fold(0.0, |m, e| m.max(e.abs()));
        d
    }
}

/// Integrates the Poincaré equation from `s0` to `t_end`.
pub fn integrate_trajectory(
    s0: &TrajectoryState,
    p: &PoincareParams,
    t_end: f64,
    opts: &TrajectoryOptions,
) -> Result<Trajectory> {
    s0.validate()?;
    if !(1e-13..=1e-3).contains(&opts.tol) {
        return Err(Error::InvalidParameter(format!(
            "tol = {} outside [1e-13, 1e-3]",
            opts.tol
        )));
    }
    if !p.lambda.is_finite() {
        return Err(Error::InvalidParameter("lambda must be finite".into()));
    }
    if norm(&s0.r) < opts.r_min {
        return Err(Error::OriginApproach {
            t: s0.t,
            r_min: opts.r_min,
        });
    }
    let integ = IntegratorRegistry::with_defaults().create(&opts.integrator)?;
    let sys = PoincareSystem {
        s: p.signed(),
        r_min: opts.r_min,
    };
    let y0 = [s0.r[0], s0.r[1], s0.r[2], s0.v[0], s0.v[1], s0.v[2]];
    let mut samples = Vec::new();
    let mut step_opts = StepOptions::with_tol(opts.tol);
    step_opts.h = opts.h;
    let result = integ.integrate(&sys, s0.t, &y0, t_end, &step_opts, &mut |t, y| {
        samples.push(TrajectoryState {
            t,
            r: [y[0], y[1], y[2]],
            v: [y[3], y[4], y[5]],
        })
    });
    let (stats, hit_origin) = match result {
        Ok((stats, _)) => (stats, false),
        Err(Error::OriginApproach { .. }) => (
            IntegrationStats {
                steps: samples.len().saturating_sub(1),
                ..Default::default()
            },
            true,
        ),
        Err(e) => return Err(e),
    };
    Ok(Trajectory {
        samples,
        params: *p,
        stats,
        tol: opts.tol,
        integrator: opts.integrator.clone(),
        hit_origin,
    })
}

/// A parallel beam of `n` charges aimed along `+z` at the pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    pub n: usize,
    /// Largest impact parameter.
    pub spread: f64,
    /// Starting plane `z = z0`.
    pub z0: f64,
    pub speed: f64,
}

impl BeamSpec {
    pub fn new(n: usize, spread: f64) -> Self {
        Self {
            n,
            spread,
            z0: -10.0,
            speed: 1.0,
        }
    }

    /// Initial states: impact parameters `spread·√((i + ½)/n)` (uniform areal
    /// density) at golden-angle azimuths.
    pub fn initial_states(&self) -> Vec<TrajectoryState> {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..self.n)
            .map(|i| {
                let b = self.spread * ((i as f64 + 0.5) / self.n as f64).sqrt();
                let (s, c) = (golden * i as f64).sin_cos();
                TrajectoryState::new([b * c, b * s, self.z0], [0.0, 0.0, self.speed])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamRay {
    pub impact: f64,
    pub min_axis_distance: f64,
    /// Axial position where the minimum occurs.
    pub z_at_min: f64,
    pub hit_origin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamReport {
    pub rays: Vec<BeamRay>,
    /// Mean minimum distance to the axis over the mean impact parameter.
    pub convergence_metric: f64,
}

/// Integrates every ray of the beam (in parallel) and measures focusing.
pub fn birkeland_focus(
    beam: &BeamSpec,
    p: &PoincareParams,
    t_end: f64,
    opts: &TrajectoryOptions,
) -> Result<BeamReport> {
    if beam.n < 2 {
        return Err(Error::InvalidParameter(format!("beam needs at least 2 rays, got {}", beam.n)));
    }
    if !(beam.spread > 0.0) {
        return Err(Error::InvalidParameter("beam spread must be positive".into()));
    }
    let starts = beam.initial_states();
    let rays: Vec<BeamRay> = starts
        .par_iter()
        .map(|s0| {
            let tr = integrate_trajectory(s0, p, t_end, opts)?;
            let mut best = (f64::INFINITY, s0.r[2]);
            for s in &tr.samples {
                let d = s.r[0].hypot(s.r[1]);
                if d < best.0 {
                    best = (d, s.r[2]);
                }
            }
            Ok(BeamRay {
                impact: s0.r[0].hypot(s0.r[1]),
                min_axis_distance: best.0,
                z_at_min: best.1,
                hit_origin: tr.hit_origin,
            })
        })
        .collect::<Result<_>>()?;
    let mean_min = rays.iter().map(|r| r.min_axis_distance).sum::<f64>() / rays.len() as f64;
    let mean_b = rays.iter().map(|r| r.impact).sum::<f64>() / rays.len() as f64;
    Ok(BeamReport {
        rays,
        convergence_metric: mean_min / mean_b,
    })
}
