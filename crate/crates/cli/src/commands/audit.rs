use monopole_core::clifford::bilinears;
use monopole_core::potentials::{ScalarField, ScalarMode};
use monopole_core::sampling::random_spinor;
use monopole_core::symmetry::{
    audit_points, current_divergences, generic_solution, invariance_certificate, manufacture_solution,
    min_current_angle_sine, Chirality, ManufacturedSpec, TransformRegistry, Verdict,
};
use monopole_core::{Units, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde_json::json;

use super::checks::{check_rows, CHECK_HEADER};
use crate::output::Check;
use crate::{Artifact, AuditArgs, CliError, Outcome, RunConfig};

/// Bound on the transformed residual for the maps that should hold.
const MAPPED_RESIDUAL: f64 = 1e-10;

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

/// A random exact solution in a constant potential whose `W₀` and every
/// component of `B₀` stay away from zero, so the corrupted maps are detectable.
fn random_spec(rng: &mut ChaCha8Rng, g: f64) -> ManufacturedSpec {
    let w0 = signed(rng, 0.2, 0.5);
    let b0 = [signed(rng, 0.1, 0.5), signed(rng, 0.1, 0.5), signed(rng, 0.1, 0.5)];
    let mut modes = Vec::new();
    for which in [Chirality::Xi, Chirality::Eta] {
        for _ in 0..3 {
            let k = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let h = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let w = C64::from_polar(rng.random_range(0.3..1.0), rng.random_range(-3.1..3.1));
            modes.push((which, k, h, w));
        }
    }
    ManufacturedSpec {
        g,
        units: Units::default(),
        w0,
        b0,
        modes,
    }
}

fn random_gauge(rng: &mut ChaCha8Rng) -> ScalarField {
    ScalarField {
        constant: rng.random_range(-1.0..1.0),
        gradient: std::array::from_fn(|_| rng.random_range(-0.5..0.5)),
        modes: (0..2)
            .map(|_| ScalarMode {
                amplitude: rng.random_range(0.2..0.8),
                omega: rng.random_range(-1.5..1.5),
                k: std::array::from_fn(|_| rng.random_range(-1.0..1.0)),
                phase: rng.random_range(0.0..std::f64::consts::TAU),
            })
            .collect(),
    }
}

pub(super) fn run(cfg: &RunConfig, a: &AuditArgs) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spec = random_spec(&mut rng, a.g);
    let phase = ScalarField::constant(rng.random_range(-3.0..3.0));
    let chiral = random_gauge(&mut rng);
    let (field, pot) = manufacture_solution(&spec);
    let units = spec.units;
    let points = audit_points(a.points);

    let reg = TransformRegistry::with_defaults();
    let requests: [(&str, Option<&ScalarField>, Verdict); 9] = [
        ("P", None, Verdict::Pass),
        ("T", None, Verdict::Pass),
        ("C", None, Verdict::Pass),
        ("phase-gauge", Some(&phase), Verdict::Pass),
        ("chiral-gauge", Some(&chiral), Verdict::Pass),
        ("corrupt:P-no-W-flip", None, Verdict::Fail),
        ("corrupt:T-no-B-flip", None, Verdict::Fail),
        ("corrupt:C-no-conjugation", None, Verdict::Fail),
        ("corrupt:chiral-gauge-no-shift", Some(&chiral), Verdict::Fail),
    ];
    let mut checks = Vec::new();
    let mut certificates = Vec::new();
    for (name, phi, expected) in requests {
        let t = reg.create(name, phi)?;
        let c = invariance_certificate(&field, &pot, a.g, units, t.as_ref(), &points)?;
        // A negative control passes when its certificate is rejected.
        let check = match expected {
            Verdict::Pass => Check {
                check: format!("certificate:{name}"),
                value: c.residual_after,
                bound: MAPPED_RESIDUAL,
                pass: c.verdict == Verdict::Pass && c.residual_after <= MAPPED_RESIDUAL,
            },
            Verdict::Fail => Check {
                check: format!("control:{name}"),
                value: c.residual_after,
                bound: (10.0 * c.residual_before).max(1e-10),
                pass: c.verdict == Verdict::Fail,
            },
        };
        let ok = check.pass;
        checks.push(check);
        certificates.push(json!({
            "transform": c.transform,
            "residual_before": c.residual_before,
            "residual_after": c.residual_after,
            "verdict": c.verdict,
            "expected": expected,
            "pass": ok,
        }));
    }

    // Scalar and pseudoscalar signs under the pointwise maps.
    let spinors: Vec<_> = (0..a.spinors).map(|_| random_spinor(&mut rng)).collect();
    let mut table = Vec::new();
    for (name, s1, s2) in [("P", 1.0, -1.0), ("T", 1.0, -1.0), ("C", -1.0, -1.0)] {
        let t = reg.create(name, None)?;
        let mut worst: f64 = 0.0;
        for psi in &spinors {
            let mapped = t
                .pointwise(psi)
                .ok_or_else(|| CliError::Invariant(format!("transform `{name}` has no pointwise spinor map")))?;
            let (b, b2) = (bilinears(psi), bilinears(&mapped));
            let n = psi.norm_sqr().max(f64::MIN_POSITIVE);
            worst = worst.max((b2.omega1 - s1 * b.omega1).abs() / n).max((b2.omega2 - s2 * b.omega2).abs() / n);
        }
        let c = Check::at_most(&format!("bilinear-signs:{name}"), worst, 1e-12);
        table.push(json!({
            "transform": name,
            "omega1_sign": s1,
            "omega2_sign": s2,
            "max_deviation": worst,
            "pass": c.pass,
        }));
        checks.push(c);
    }

    // Both currents are conserved on the solution. The bound scales with the
    // squared amplitude sum times the largest frequency.
    let amp: f64 = field.modes.iter().map(|m| m.amp.norm_sqr().sqrt()).sum();
    let freq = field
        .modes
        .iter()
        .map(|m| m.omega.abs().max(m.k.iter().map(|x| x.abs()).fold(0.0, f64::max)))
        .fold(1.0, f64::max);
    let (dj, ds) = current_divergences(&field, &points, units.c);
    let scale = amp * amp * freq;
    checks.push(Check::at_most("polar-current-divergence", dj / scale, 1e-12));
    checks.push(Check::at_most("axial-current-divergence", ds / scale, 1e-12));
    let (generic, _) = generic_solution(a.g, units);
    checks.push(Check::above(
        "min-current-angle-sine:generic",
        min_current_angle_sine(&generic, &points),
        1e-6,
    ));
    checks.push(Check::above(
        "min-current-angle-sine:random",
        min_current_angle_sine(&field, &points),
        1e-6,
    ));

    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {:e} (bound {:e})", c.check, c.value, c.bound))
        .collect();
    let summary = format!(
        "symmetry-audit: {}/{} checks pass, worst mapped residual {:.3e}",
        checks.len() - failed.len(),
        checks.len(),
        certificates
            .iter()
            .filter(|c| c["expected"] == "PASS")
            .map(|c| c["residual_after"].as_f64().unwrap_or(f64::NAN))
            .fold(0.0, f64::max)
    );
    let json = json!({
        "configuration": {
            "g": a.g,
            "w0": spec.w0,
            "b0": spec.b0,
            "modes": spec.modes.iter().map(|(w, k, h, c)| json!({
                "chirality": w, "k": k, "helicity": h, "weight": [c.re, c.im],
            })).collect::<Vec<_>>(),
            "phase_gauge": phase,
            "chiral_gauge": chiral,
        },
        "certificates": certificates,
        "bilinear_table": table,
        "checks": checks,
        "all_pass": failed.is_empty(),
    });
    Ok(Outcome {
        artifact: Artifact {
            format: cfg.format,
            metadata: cfg.metadata(),
            notes: Vec::new(),
            header: CHECK_HEADER.to_vec(),
            rows: check_rows(&checks),
            json,
        },
        summary,
        violations: failed,
    })
}
