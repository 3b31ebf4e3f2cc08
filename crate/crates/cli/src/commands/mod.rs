//! Validation and dispatch of the individual commands.

mod audit;
mod checks;
mod dispersion;
mod dynamics;
mod harmonics;

use monopole_core::angular::HalfInt;
use monopole_core::classical::IntegratorRegistry;

use crate::{Command, CliError, Outcome, RunConfig};

pub(crate) fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match &cfg.command {
        Command::Trajectory(a) => dynamics::trajectory(cfg, a),
        Command::Beam(a) => dynamics::beam(cfg, a),
        Command::SymmetryAudit(a) => audit::run(cfg, a),
        Command::Harmonics(a) => harmonics::run(cfg, a),
        Command::Dispersion(a) => dispersion::run(cfg, a),
        Command::PotentialsCheck(a) => checks::potentials(cfg, a),
        Command::Identities(a) => checks::identities(cfg, a),
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

fn finite(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("`{name}` must be finite, got {x}")))
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("`{name}` must be positive, got {x}")))
    }
}

fn count(name: &str, n: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    if (lo..=hi).contains(&n) {
        Ok(())
    } else {
        Err(usage(format!("`{name}` must lie in [{lo}, {hi}], got {n}")))
    }
}

fn tolerance(tol: f64) -> Result<(), CliError> {
    if (1e-13..=1e-3).contains(&tol) {
        Ok(())
    } else {
        Err(usage(format!("`tol` must lie in [1e-13, 1e-3], got {tol}")))
    }
}

/// Largest supported `j`.
pub(crate) const J_MAX: f64 = 40.0;

/// Reads a total angular momentum from the ladder `0, 1/2, 1, 3/2, …`.
pub(crate) fn ladder_j(j: f64) -> Result<HalfInt, CliError> {
    let h = HalfInt::from_f64(j).ok().filter(|h| h.twice() >= 0);
    match h {
        Some(h) if j <= J_MAX => Ok(h),
        Some(_) => Err(usage(format!("`j` = {j} exceeds the supported maximum {J_MAX}"))),
        None => Err(usage(format!(
            "`j` = {j} is not admissible: j must lie on the ladder 0, 1/2, 1, 3/2, 2, … (non-negative multiples of 1/2)"
        ))),
    }
}

/// Reads a projection `m` or `m'` compatible with `j`.
pub(crate) fn projection(name: &str, j: HalfInt, v: f64) -> Result<HalfInt, CliError> {
    let h = HalfInt::from_f64(v).map_err(|_| usage(format!("`{name}` = {v} is not a multiple of 1/2")))?;
    if h.abs().twice() > j.twice() || (h.twice() - j.twice()) % 2 != 0 {
        return Err(usage(format!(
            "`{name}` = {v} is not admissible for j = {j}: it must be one of −j, −j+1, …, j"
        )));
    }
    Ok(h)
}

pub(crate) fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    match &cfg.command {
        Command::Trajectory(a) => {
            finite("lambda", a.lambda)?;
            if !a.r0.iter().chain(&a.v0).all(|x| x.is_finite()) {
                return Err(usage("`r0` and `v0` must be finite".into()));
            }
            if a.r0 == [0.0; 3] {
                return Err(usage("`r0` must not be the origin".into()));
            }
            positive("t-end", a.t_end)?;
            tolerance(a.tol)?;
            positive("drift-bound", a.drift_bound)?;
            let reg = IntegratorRegistry::with_defaults();
            if !reg.names().contains(&a.integrator.as_str()) {
                return Err(usage(format!(
                    "unknown `integrator` `{}` (available: {})",
                    a.integrator,
                    reg.names().join(", ")
                )));
            }
            if let Some(h) = a.h {
                positive("h", h)?;
            }
        }
        Command::Beam(a) => {
            finite("lambda", a.lambda)?;
            count("n", a.n, 2, 100_000)?;
            positive("spread", a.spread)?;
            finite("z0", a.z0)?;
            positive("t-end", a.t_end)?;
            tolerance(a.tol)?;
        }
        Command::SymmetryAudit(a) => {
            finite("g", a.g)?;
            count("points", a.points, 1, 100_000)?;
            count("spinors", a.spinors, 1, 10_000_000)?;
        }
        Command::Harmonics(a) => {
            let j = ladder_j(a.j)?;
            if let Some(v) = a.m_prime {
                projection("m-prime", j, v)?;
            }
            if let Some(v) = a.m {
                projection("m", j, v)?;
            }
            if let Some(n) = a.n_theta {
                count("n-theta", n, j.twice() as usize + 2, 4096)?;
            }
            if let Some(n) = a.n_phi {
                count("n-phi", n, 1, 4096)?;
            }
        }
        Command::Dispersion(a) => {
            if !(a.kappa0.is_finite() && a.kappa0 >= 0.0) {
                return Err(usage(format!("`kappa0` must be non-negative, got {}", a.kappa0)));
            }
            if !(a.k_min.is_finite() && a.k_min >= 0.0) {
                return Err(usage(format!("`k-min` must be non-negative, got {}", a.k_min)));
            }
            if !(a.k_max.is_finite() && a.k_max >= a.k_min) {
                return Err(usage(format!("`k-max` must be at least k-min, got {}", a.k_max)));
            }
            count("k-steps", a.k_steps, 1, 1_000_000)?;
        }
        Command::PotentialsCheck(a) => {
            count("points", a.points, 1, 1_000_000)?;
            finite("e", a.e)?;
            if a.e == 0.0 {
                return Err(usage("`e` must be nonzero".into()));
            }
        }
        Command::Identities(a) => {
            count("spinors", a.spinors, 1, 10_000_000)?;
            positive("b", a.b)?;
        }
    }
    Ok(())
}
