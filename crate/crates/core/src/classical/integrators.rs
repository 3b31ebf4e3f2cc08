//! Explicit Runge–Kutta integrators behind a common trait, selected by name.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem: Sync {
    fn dim(&self) -> usize;

    /// Evaluates `f(t, y)` into `dy`. Errors abort the integration.
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;

    /// Inspects an accepted step from `y_prev` to `y_new` before it is
    /// reported; an error ends the integration.
    fn check_step(&self, _t: f64, _y_prev: &[f64], _y_new: &[f64]) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    /// Relative and absolute tolerance of the adaptive schemes.
    pub tol: f64,
    /// Step of the fixed-step schemes; also the initial step of adaptive ones
    /// when set.
    pub h: Option<f64>,
    pub max_steps: usize,
}

impl StepOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            h: None,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Called after every accepted step with `(t, y)`.
pub type Observer<'a> = dyn FnMut(f64, &[f64]) + 'a;

pub trait Integrator: Send + Sync {
    fn name(&self) -> &str;

    /// Integrates from `t0` to `t_end`, reporting the initial state and every
    /// accepted step to `observe`. Returns stats and the final state.
    fn integrate(
        &self,
        sys: &dyn OdeSystem,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        opts: &StepOptions,
        observe: &mut Observer<'_>,
    ) -> Result<(IntegrationStats, Vec<f64>)>;
}

fn axpy(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..out.len() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] = y[i] + h * s;
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Embedded Dormand–Prince 5(4) with PI step-size control.
#[derive(Debug, Clone, Copy, Default)]
pub struct DormandPrince;

impl DormandPrince {
    fn error_norm(y: &[f64], ynew: &[f64], err: &[f64], tol: f64) -> f64 {
        let n = y.len() as f64;
        let s: f64 = (0..y.len())
            .map(|i| {
                let sc = tol + tol * y[i].abs().max(ynew[i].abs());
                (err[i] / sc).powi(2)
            })
            .sum();
        (s / n).sqrt()
    }

    fn initial_step(sys: &dyn OdeSystem, t0: f64, y0: &[f64], f0: &[f64], tol: f64, span: f64) -> Result<f64> {
        let n = y0.len() as f64;
        let sc: Vec<f64> = y0.iter().map(|y| tol + tol * y.abs()).collect();
        let d0 = (y0.iter().zip(&sc).map(|(y, s)| (y / s).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (f0.iter().zip(&sc).map(|(f, s)| (f / s).powi(2)).sum::<f64>() / n).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
        let mut f1 = vec![0.0; y0.len()];
        sys.rhs(t0 + h0, &y1, &mut f1)?;
        let d2 = (f1
            .iter()
            .zip(f0)
            .zip(&sc)
            .map(|((a, b), s)| ((a - b) / s).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(span))
    }
}

impl Integrator for DormandPrince {
    fn name(&self) -> &str {
        "dopri5"
    }

    fn integrate(
        &self,
        sys: &dyn OdeSystem,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        opts: &StepOptions,
        observe: &mut Observer<'_>,
    ) -> Result<(IntegrationStats, Vec<f64>)> {
        let n = sys.dim();
        let mut stats = IntegrationStats::default();
        let mut t = t0;
        let mut y = y0.to_vec();
        observe(t, &y);
        let span = t_end - t0;
        if span <= 0.0 {
            return Ok((stats, y));
        }
        let tol = opts.tol;
        let mut k1 = vec![0.0; n];
        sys.rhs(t, &y, &mut k1)?;
        stats.evaluations += 1;
        let mut h = match opts.h {
            Some(h) => h.min(span),
            None => {
                stats.evaluations += 1;
                Self::initial_step(sys, t, &y, &k1, tol, span)?
            }
        };
        let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
            (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut tmp = vec![0.0; n];
        let mut ynew = vec![0.0; n];
        let mut err = vec![0.0; n];
        let beta = 0.04;
        let expo1 = 0.2 - beta * 0.75;
        let mut facold: f64 = 1e-4;
        let mut last_rejected = false;

        while t < t_end {
            if stats.steps + stats.rejected >= opts.max_steps {
                return Err(Error::InvalidParameter(format!(
                    "step budget of {} exhausted at t = {t}",
                    opts.max_steps
                )));
            }
            if !(h >= 1e-14 * t.abs().max(1.0)) {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            axpy(&mut tmp, &y, h, &[(A21, &k1)]);
            sys.rhs(t + C2 * h, &tmp, &mut k2)?;
            axpy(&mut tmp, &y, h, &[(A31, &k1), (A32, &k2)]);
            sys.rhs(t + C3 * h, &tmp, &mut k3)?;
            axpy(&mut tmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            sys.rhs(t + C4 * h, &tmp, &mut k4)?;
            axpy(&mut tmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            sys.rhs(t + C5 * h, &tmp, &mut k5)?;
            axpy(
                &mut tmp,
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            sys.rhs(t + h, &tmp, &mut k6)?;
            axpy(
                &mut ynew,
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            sys.rhs(t + h, &ynew, &mut k7)?;
            stats.evaluations += 6;
            for i in 0..n {
                err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let e = Self::error_norm(&y, &ynew, &err, tol);
            let e = if e.is_nan() { f64::INFINITY } else { e };
            let fac11 = e.powf(expo1);
            if e <= 1.0 {
                let fac = (fac11 / facold.powf(beta) / 0.9).clamp(0.1, 5.0);
                let fac = if last_rejected { fac.max(1.0) } else { fac };
                facold = e.max(1e-4);
                t = if last { t_end } else { t + h };
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);
                stats.steps += 1;
                sys.check_step(t, &ynew, &y)?;
                observe(t, &y);
                h /= fac;
                last_rejected = false;
            } else {
                h /= (fac11 / 0.9).min(5.0);
                stats.rejected += 1;
                last_rejected = true;
            }
        }
        Ok((stats, y))
    }
}

/// Classical fixed-step fourth-order Runge–Kutta. The step is `opts.h`, or
/// `tol^(1/4)` when unset.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rk4;

impl Integrator for Rk4 {
    fn name(&self) -> &str {
        "rk4"
    }

    fn integrate(
        &self,
        sys: &dyn OdeSystem,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        opts: &StepOptions,
        observe: &mut Observer<'_>,
    ) -> Result<(IntegrationStats, Vec<f64>)> {
        let n = sys.dim();
        let mut stats = IntegrationStats::default();
        let mut y = y0.to_vec();
        observe(t0, &y);
        let span = t_end - t0;
        if span <= 0.0 {
            return Ok((stats, y));
        }
        let h_req = opts.h.unwrap_or_else(|| opts.tol.powf(0.25));
        if !(h_req > 0.0) {
            return Err(Error::InvalidParameter(format!("rk4 step must be positive, got {h_req}")));
        }
        let steps = (span / h_req).ceil() as usize;
        if steps > opts.max_steps {
            return Err(Error::InvalidParameter(format!("rk4 needs {steps} steps, budget is {}", opts.max_steps)));
        }
        let h = span / steps as f64;
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
            (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut tmp_prev = vec![0.0; n];
        for s in 0..steps {
            let t = t0 + s as f64 * h;
            tmp_prev.copy_from_slice(&y);
            sys.rhs(t, &y, &mut k1)?;
            axpy(&mut tmp, &y, 0.5 * h, &[(1.0, &k1)]);
            sys.rhs(t + 0.5 * h, &tmp, &mut k2)?;
            axpy(&mut tmp, &y, 0.5 * h, &[(1.0, &k2)]);
            sys.rhs(t + 0.5 * h, &tmp, &mut k3)?;
            axpy(&mut tmp, &y, h, &[(1.0, &k3)]);
            sys.rhs(t + h, &tmp, &mut k4)?;
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            stats.steps += 1;
            stats.evaluations += 4;
            let t_next = if s + 1 == steps { t_end } else { t0 + (s + 1) as f64 * h };
            sys.check_step(t_next, &tmp_prev, &y)?;
            observe(t_next, &y);
        }
        Ok((stats, y))
    }
}

type Factory = fn() -> Box<dyn Integrator>;

/// Integrators by name.
pub struct IntegratorRegistry {
    entries: BTreeMap<String, Factory>,
}

impl Default for IntegratorRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl IntegratorRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register("dopri5", || Box::new(DormandPrince));
        r.register("rk4", || Box::new(Rk4));
        r
    }

    pub fn register(&mut self, name: &str, factory: Factory) {
        self.entries.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn Integrator>> {
        self.entries
            .get(name)
            .map(|f| f())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "integrator",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}
