use monopole_core::nonlinear::{
    construct_plane_wave, dispersion_solve, group_velocity, nonlinear_residual, NonlinearParams, WaveClass, WaveMode,
};
use monopole_core::symmetry::audit_points;
use monopole_core::C64;
use rayon::prelude::*;
use serde_json::json;

use crate::output::{num, Check};
use crate::{Artifact, CliError, DispersionArgs, Outcome, RunConfig};

struct Row {
    k: f64,
    omega: f64,
    class: WaveClass,
    vg: f64,
    quartic: f64,
    wave_residual: Option<f64>,
    problem: Option<String>,
}

/// Evaluates one grid point. Evanescent rows carry NaN frequency and group
/// velocity, as does the anti-phase edge `k = κ₀` where `ω = 0`.
fn evaluate(mode: WaveMode, kappa0: f64, k: f64, params: &NonlinearParams) -> Row {
    let kv = [0.0, 0.0, k];
    let branch = dispersion_solve(&kv, mode, kappa0);
    let class = branch.classification;
    let omega = if class == WaveClass::Evanescent { f64::NAN } else { branch.roots[0].re };
    let vg = group_velocity(&branch).unwrap_or(f64::NAN);
    let mut problem = None;
    let vg_ok = match class {
        WaveClass::Bradyon => vg < 1.0,
        WaveClass::Tachyon => vg.is_nan() || vg > 1.0,
        WaveClass::Luminal => vg == 1.0,
        WaveClass::Evanescent => k < kappa0,
    };
    let flagged_ok = (mode == WaveMode::AntiPhase && k < kappa0) == (class == WaveClass::Evanescent);
    if !vg_ok || !flagged_ok {
        problem = Some(format!("k = {k}: group velocity {vg} inconsistent with {}", class.name()));
    }
    let wave_residual = if class == WaveClass::Evanescent {
        None
    } else {
        match construct_plane_wave(&kv, mode, kappa0, 1.0, C64::new(0.8, -0.3))
            .and_then(|cfg| nonlinear_residual(&cfg, params, &audit_points(16)))
        {
            Ok((rx, re)) => Some(rx.max(re)),
            Err(e) => {
                problem = Some(format!("k = {k}: no plane wave: {e}"));
                None
            }
        }
    };
    Row {
        k,
        omega,
        class,
        vg,
        quartic: branch.max_quartic_residual(),
        wave_residual,
        problem,
    }
}

pub(super) fn run(cfg: &RunConfig, a: &DispersionArgs) -> Result<Outcome, CliError> {
    let mode: WaveMode = a.mode.into();
    let params = NonlinearParams::new(a.kappa0, 0.0)?;
    let n = a.k_steps;
    let ks: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                a.k_min
            } else {
                a.k_min + (a.k_max - a.k_min) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let eval: Vec<Row> = ks.par_iter().map(|&k| evaluate(mode, a.kappa0, k, &params)).collect();

    let quartic = eval.iter().map(|r| r.quartic).fold(0.0, f64::max);
    let wave = eval.iter().filter_map(|r| r.wave_residual).fold(0.0, f64::max);
    let kk = a.kappa0.powi(4).max(1.0);
    let checks = [
        Check::at_most("quartic-residual", quartic / kk, 1e-12),
        Check::at_most("plane-wave-residual", wave / (1.0 + a.kappa0), 1e-10),
    ];
    let mut violations: Vec<String> = eval.iter().filter_map(|r| r.problem.clone()).collect();
    violations.extend(
        checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {:e} (bound {:e})", c.check, c.value, c.bound)),
    );

    let evanescent = eval.iter().filter(|r| r.class == WaveClass::Evanescent).count();
    let summary = format!(
        "dispersion: {} {} points at kappa0 = {}, {evanescent} evanescent, quartic residual {quartic:.3e}, plane-wave residual {wave:.3e}",
        eval.len(),
        mode.name(),
        a.kappa0
    );
    let rows = eval
        .iter()
        .map(|r| {
            vec![
                mode.name().to_string(),
                num(a.kappa0),
                num(r.k),
                num(r.omega),
                r.class.name().to_string(),
                num(r.vg),
            ]
        })
        .collect();
    // JSON has no NaN, so undefined values become null.
    let finite = |x: f64| if x.is_finite() { json!(x) } else { json!(null) };
    let json = json!({
        "points": eval.iter().map(|r| json!({
            "mode": mode.name(), "kappa0": a.kappa0, "k": r.k, "omega": finite(r.omega),
            "classification": r.class.name(), "vg": finite(r.vg),
        })).collect::<Vec<_>>(),
        "checks": checks,
    });
    Ok(Outcome {
        artifact: Artifact {
            format: cfg.format,
            metadata: cfg.metadata(),
            notes: vec![
                ("max_quartic_residual".into(), num(quartic)),
                ("max_plane_wave_residual".into(), num(wave)),
            ],
            header: vec!["mode", "kappa0", "k", "omega", "classification", "vg"],
            rows,
            json,
        },
        summary,
        violations,
    })
}
