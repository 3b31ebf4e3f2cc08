use monopole_core::angular::{dirac_condition, eigen_residual_on, monopole_harmonic, AngularGrid, HalfInt};
use serde_json::json;

use super::{ladder_j, projection};
use crate::output::num;
use crate::{Artifact, CliError, HarmonicsArgs, Outcome, RunConfig};

/// Eigen-residual bound for `(Λ², Λ₃)`.
const RESIDUAL_BOUND: f64 = 1e-8;

pub(super) fn run(cfg: &RunConfig, a: &HarmonicsArgs) -> Result<Outcome, CliError> {
    let j = ladder_j(a.j)?;
    let ladder = dirac_condition(j)?;
    let pick = |name: &str, v: Option<f64>| -> Result<Vec<HalfInt>, CliError> {
        match v {
            Some(v) => Ok(vec![projection(name, j, v)?]),
            None => Ok(ladder.clone()),
        }
    };
    let (mps, ms) = (pick("m-prime", a.m_prime)?, pick("m", a.m)?);

    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for &mp in &mps {
        let grid = match (a.n_theta, a.n_phi) {
            (None, None) => AngularGrid::for_degree(j, mp)?,
            (nt, np) => {
                let def = AngularGrid::for_degree(j, mp)?;
                AngularGrid::new(nt.unwrap_or(def.n_theta()), np.unwrap_or(def.n_phi()), mp)?
            }
        };
        for &m in &ms {
            // The operators carry the Dirac number D = m'.
            let r = eigen_residual_on(&grid, j, mp, m, mp.value())?;
            let res = r.residual_sq.max(r.residual_3);
            worst = worst.max(res);
            if !(res <= RESIDUAL_BOUND) {
                violations.push(format!(
                    "eigen-residual {res:e} for (j, m', m) = ({j}, {mp}, {m}) exceeds {RESIDUAL_BOUND:e}"
                ));
            }
            table.push(json!({
                "j": j.value(), "m_prime": mp.value(), "m": m.value(),
                "residual_lambda_sq": r.residual_sq, "residual_lambda_3": r.residual_3,
            }));
            let mut values = Vec::with_capacity(grid.len());
            for idx in 0..grid.len() {
                let (theta, phi) = grid.node(idx);
                let z = monopole_harmonic(j, mp, m, theta, phi)?;
                rows.push(vec![
                    num(j.value()),
                    num(mp.value()),
                    num(m.value()),
                    num(theta),
                    num(phi),
                    num(z.re),
                    num(z.im),
                ]);
                values.push(json!([theta, phi, z.re, z.im]));
            }
            if let Some(last) = table.last_mut() {
                last["samples"] = json!(values);
            }
        }
    }
    let summary = format!(
        "harmonics: j = {j}, {} functions, max eigen-residual {worst:.3e}",
        mps.len() * ms.len()
    );
    let json = json!({ "functions": table, "max_residual": worst });
    Ok(Outcome {
        artifact: Artifact {
            format: cfg.format,
            metadata: cfg.metadata(),
            notes: vec![("max_eigen_residual".into(), num(worst))],
            header: vec!["j", "m_prime", "m", "theta", "phi", "Re(Z)", "Im(Z)"],
            rows,
            json,
        },
        summary,
        violations,
    })
}
