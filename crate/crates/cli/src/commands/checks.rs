use monopole_core::clifford::{bilinears, chiral_currents, contract, weyl_join};
use monopole_core::nonlinear::{rodichev_curvature, torsion_from_potential, torsion_residual_at};
use monopole_core::potentials::{
    axial_gauge_jet, axial_gauge_potential, coulomb_field, curl_fd, curl_of, dirac_string_jet,
    dirac_string_potential, duality_rotate, maxwell_residual, norm, AxialPotential, EmState, FieldTerm,
    PotentialTerm, Sources, Vec3,
};
use monopole_core::sampling::{random_pair, random_point3, random_point4, random_spinor};
use monopole_core::symmetry::{dirac_residual_at, generic_solution};
use monopole_core::{Point4, Units};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::output::{num, Check};
use crate::{Artifact, CliError, IdentitiesArgs, Outcome, PotentialsArgs, RunConfig};

pub(super) const CHECK_HEADER: [&str; 4] = ["check", "value", "bound", "verdict"];

pub(super) fn check_rows(checks: &[Check]) -> Vec<Vec<String>> {
    checks
        .iter()
        .map(|c| {
            vec![
                c.check.clone(),
                num(c.value),
                num(c.bound),
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect()
}

fn outcome(cfg: &RunConfig, label: &str, checks: Vec<Check>) -> Outcome {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {:e} (bound {:e})", c.check, c.value, c.bound))
        .collect();
    let worst = checks
        .iter()
        .max_by(|a, b| (a.value / a.bound).total_cmp(&(b.value / b.bound)))
        .map(|c| format!(", tightest {} = {:.3e} (bound {:.0e})", c.check, c.value, c.bound))
        .unwrap_or_default();
    let summary = format!(
        "{label}: {}/{} checks pass{worst}",
        checks.len() - failed.len(),
        checks.len()
    );
    Outcome {
        artifact: Artifact {
            format: cfg.format,
            metadata: cfg.metadata(),
            notes: Vec::new(),
            header: CHECK_HEADER.to_vec(),
            rows: check_rows(&checks),
            json: json!({ "checks": checks, "all_pass": failed.is_empty() }),
        },
        summary,
        violations: failed,
    }
}

/// Random points in `[-2, 2]³` at least 0.05 from the z-axis, where both
/// monopole gauges are regular.
fn off_axis_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = random_point3(rng, 2.0);
        if p[0].hypot(p[1]) >= 0.05 {
            out.push(p);
        }
    }
    out
}

fn random_em_state(rng: &mut ChaCha8Rng) -> EmState {
    let mut u = || rng.random_range(-1.0..1.0);
    EmState {
        terms: vec![
            FieldTerm::PlaneWave {
                e_amp: [u(), u(), u()],
                h_amp: [u(), u(), u()],
                omega: 1.0 + u().abs(),
                k: [u(), u(), u()],
                phase: u(),
            },
            FieldTerm::Coulomb { e: u(), h: u() },
            FieldTerm::Uniform {
                e: [u(), u(), u()],
                h: [u(), u(), u()],
            },
        ],
        sources: Sources {
            rho_e: u(),
            mu_m: u(),
            j: [u(), u(), u()],
            k: [u(), u(), u()],
        },
        c: 1.0,
    }
}

pub(super) fn potentials(cfg: &RunConfig, a: &PotentialsArgs) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts = off_axis_points(&mut rng, a.points);
    let mut worst = [0.0f64; 5];
    for p in &pts {
        let want = coulomb_field(p, a.e);
        let scale = norm(&want);
        let rel = |c: Vec3| norm(&[c[0] - want[0], c[1] - want[1], c[2] - want[2]]) / scale;
        let errs = [
            rel(curl_of(&dirac_string_jet(p, a.e)?.1)),
            rel(curl_fd(|q| dirac_string_potential(q, a.e), p)?),
            rel(curl_of(&axial_gauge_jet(p, a.e)?.1)),
            rel(curl_fd(|q| axial_gauge_potential(q, a.e), p)?),
        ];
        let diff = curl_fd(
            |q| {
                let (u, v) = (dirac_string_potential(q, a.e)?, axial_gauge_potential(q, a.e)?);
                Ok([u[0] - v[0], u[1] - v[1], u[2] - v[2]])
            },
            p,
        )?;
        for (w, e) in worst.iter_mut().zip(errs.into_iter().chain([norm(&diff) / scale])) {
            *w = w.max(e);
        }
    }
    let mut checks = vec![
        Check::at_most("curl:dirac-string:analytic", worst[0], 1e-8),
        Check::at_most("curl:dirac-string:finite-difference", worst[1], 1e-8),
        Check::at_most("curl:axial-gauge:analytic", worst[2], 1e-8),
        Check::at_most("curl:axial-gauge:finite-difference", worst[3], 1e-8),
        Check::at_most("curl:gauge-difference", worst[4], 1e-8),
    ];

    // Duality rotations leave the Maxwell residual unchanged.
    let mut duality: f64 = 0.0;
    for _ in 0..20 {
        let state = random_em_state(&mut rng);
        let gamma = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let points: Vec<Point4> = (0..50)
            .map(|_| loop {
                let p = random_point4(&mut rng, 2.0);
                if norm(&[p[1], p[2], p[3]]) >= 0.1 {
                    break p;
                }
            })
            .collect();
        let before = maxwell_residual(&state, &points)?;
        let after = maxwell_residual(&duality_rotate(&state, gamma), &points)?;
        duality = duality.max((before - after).abs() / (1.0 + before));
    }
    checks.push(Check::at_most("duality:maxwell-residual", duality, 1e-12));
    Ok(outcome(cfg, "potentials-check", checks))
}

pub(super) fn identities(cfg: &RunConfig, a: &IdentitiesArgs) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let (mut ddb, mut rod) = (0.0f64, 0.0f64);
    for _ in 0..a.spinors {
        let psi = random_spinor(&mut rng);
        let b = bilinears(&psi);
        let n2 = psi.norm_sqr().powi(2).max(f64::MIN_POSITIVE);
        let rr = b.rho_sqr();
        ddb = ddb
            .max((-contract(&b.j, &b.j) - rr).abs() / n2)
            .max((contract(&b.sigma, &b.sigma) - rr).abs() / n2)
            .max(contract(&b.j, &b.sigma).abs() / n2);
        let c = rodichev_curvature(&psi, a.b)?;
        rod = rod.max((c.r_bilinear - c.r_omega).abs() / (3.0 * n2 / (32.0 * a.b * a.b)));
    }

    let (mut iso, mut split, mut omegas) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..a.spinors {
        let p = random_pair(&mut rng);
        let c = chiral_currents(&p);
        let b = bilinears(&weyl_join(&p));
        let n = (p.xi.norm_squared() + p.eta.norm_squared()).max(f64::MIN_POSITIVE);
        iso = iso.max(contract(&c.x, &c.x).abs() / (n * n)).max(contract(&c.y, &c.y).abs() / (n * n));
        let (jp, ja) = (c.polar(), c.axial());
        for i in 0..4 {
            split = split.max((jp[i] - b.j[i]).abs() / n).max((ja[i] - b.sigma[i]).abs() / n);
        }
        let (o1, o2) = p.omegas();
        omegas = omegas.max((o1 - b.omega1).abs() / n).max((o2 - b.omega2).abs() / n);
    }

    // Torsion form against gauge form, off-solution so both residuals are
    // nonzero.
    let units = Units::default();
    let g = 0.45;
    let (field, _) = generic_solution(g, units);
    let pot = AxialPotential::from_terms([
        PotentialTerm::Uniform {
            w: 0.2,
            b: [0.1, -0.3, 0.25],
        },
        PotentialTerm::AxialMonopole { e: 0.7 },
    ]);
    let q = units.coupling(g);
    let mut torsion: f64 = 0.0;
    let mut sampled = 0;
    while sampled < 200 {
        let p = random_point4(&mut rng, 2.0);
        let Ok(pj) = pot.jet(&p) else { continue };
        sampled += 1;
        let jet = field.jet(&p);
        let phi = torsion_from_potential(&pot, &p, g, units)?;
        let lhs = torsion_residual_at(&jet, &phi, units.c);
        let rhs = dirac_residual_at(&jet, &pj, q, units.c);
        torsion = torsion.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
    }

    let checks = vec![
        Check::at_most("darwin-de-broglie", ddb, 1e-12),
        Check::at_most("chiral-currents:isotropic", iso, 1e-12),
        Check::at_most("chiral-currents:polar-axial-split", split, 1e-12),
        Check::at_most("omegas:weyl-vs-bilinear", omegas, 1e-12),
        Check::at_most("curvature:bilinear-vs-omega", rod, 1e-12),
        Check::at_most("torsion-vs-gauge-residual", torsion, 1e-12),
    ];
    Ok(outcome(cfg, "identities", checks))
}
