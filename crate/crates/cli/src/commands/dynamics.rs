use monopole_core::classical::{
    birkeland_focus, integrate_trajectory, BeamSpec, PoincareParams, TrajectoryOptions, TrajectoryState,
};
use serde_json::json;

use crate::output::num;
use crate::{Artifact, BeamArgs, CliError, Outcome, RunConfig, TrajectoryArgs};

pub(super) fn trajectory(cfg: &RunConfig, a: &TrajectoryArgs) -> Result<Outcome, CliError> {
    let params = PoincareParams::new(a.lambda, a.hand.into());
    let mut opts = TrajectoryOptions::new(a.tol);
    opts.integrator = a.integrator.clone();
    opts.h = a.h;
    let tr = integrate_trajectory(&TrajectoryState::new(a.r0, a.v0), &params, a.t_end, &opts)?;
    let d = tr.diagnostics();
    let cone = tr.cone_angle_errors();

    let rows = tr
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let l = tr.lambda_at(i);
            let mut row: Vec<String> = vec![num(s.t)];
            row.extend(s.r.iter().chain(&s.v).chain(&l).map(|x| num(*x)));
            row.push(num(cone[i]));
            row
        })
        .collect();

    let mut violations = Vec::new();
    if !(d.speed_drift <= a.drift_bound) {
        violations.push(format!("|v| drift {:e} exceeds {:e}", d.speed_drift, a.drift_bound));
    }
    if !(d.lambda_drift <= a.drift_bound) {
        violations.push(format!("first-integral drift {:e} exceeds {:e}", d.lambda_drift, a.drift_bound));
    }
    let summary = format!(
        "trajectory: {} samples to t = {}, |v| drift {:.3e}, Lambda drift {:.3e}, Lambda.r_hat error {:.3e}, cone error {:.3e}{}",
        tr.samples.len(),
        tr.samples.last().map_or(0.0, |s| s.t),
        d.speed_drift,
        d.lambda_drift,
        d.projection_error,
        d.cone_error,
        if tr.hit_origin { ", stopped at the origin" } else { "" }
    );
    let json = json!({
        "diagnostics": d,
        "stats": tr.stats,
        "hit_origin": tr.hit_origin,
        "samples": tr.samples.iter().enumerate().map(|(i, s)| json!({
            "t": s.t, "r": s.r, "v": s.v, "lambda": tr.lambda_at(i), "cone_angle_err": cone[i],
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        artifact: Artifact {
            format: cfg.format,
            metadata: cfg.metadata(),
            notes: vec![
                ("steps".into(), tr.stats.steps.to_string()),
                ("rejected".into(), tr.stats.rejected.to_string()),
                ("hit_origin".into(), tr.hit_origin.to_string()),
            ],
            header: vec!["t", "x", "y", "z", "vx", "vy", "vz", "Lx", "Ly", "Lz", "cone_angle_err"],
            rows,
            json,
        },
        summary,
        violations,
    })
}

pub(super) fn beam(cfg: &RunConfig, a: &BeamArgs) -> Result<Outcome, CliError> {
    let mut spec = BeamSpec::new(a.n, a.spread);
    spec.z0 = a.z0;
    let params = PoincareParams::new(a.lambda, a.hand.into());
    let report = birkeland_focus(&spec, &params, a.t_end, &TrajectoryOptions::new(a.tol))?;
    let rows = report
        .rays
        .iter()
        .map(|r| {
            vec![
                num(r.impact),
                num(r.min_axis_distance),
                num(r.z_at_min),
                r.hit_origin.to_string(),
            ]
        })
        .collect();
    let summary = format!(
        "beam: {} rays, lambda = {}, convergence metric {:.6}",
        report.rays.len(),
        a.lambda,
        report.convergence_metric
    );
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome {
        artifact: Artifact {
            format: cfg.format,
            metadata: cfg.metadata(),
            notes: vec![("convergence_metric".into(), num(report.convergence_metric))],
            header: vec!["impact", "min_axis_distance", "z_at_min", "hit_origin"],
            rows,
            json,
        },
        summary,
        violations: Vec::new(),
    })
}
