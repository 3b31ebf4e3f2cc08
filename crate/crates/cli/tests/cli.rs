use std::io::Write;
use std::process::Command as Process;

use monopole_lab::{parse_config, run, CliError, Command, ModeArg, OutputFormat};

fn args(line: &str) -> Vec<String> {
    std::iter::once("monopole-lab").chain(line.split_whitespace()).map(String::from).collect()
}

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_monopole-lab"))
}

#[test]
fn documented_invocations_parse() {
    let cfg = parse_config(args("trajectory --lambda 0.5 --r0 1,0,0 --v0 0,1,0 --t-end 100 --tol 1e-10"), None).unwrap();
    let Command::Trajectory(t) = &cfg.command else { panic!("{cfg:?}") };
    assert_eq!((t.lambda, t.r0, t.v0, t.t_end, t.tol), (0.5, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 100.0, 1e-10));
    assert_eq!(cfg.format, OutputFormat::Csv);

    let cfg = parse_config(args("dispersion --mode anti-phase --kappa0 1 --k-min 0 --k-max 3 --k-steps 300"), None).unwrap();
    let Command::Dispersion(d) = &cfg.command else { panic!("{cfg:?}") };
    assert_eq!(d.mode, ModeArg::AntiPhase);
    assert_eq!((d.kappa0, d.k_min, d.k_max, d.k_steps), (1.0, 0.0, 3.0, 300));

    let cfg = parse_config(args("symmetry-audit"), None).unwrap();
    assert_eq!(cfg.format, OutputFormat::Json);
}

#[test]
fn missing_lambda_is_named() {
    let err = parse_config(args("trajectory"), None).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("lambda"), "{err}");
}

#[test]
fn type_mismatch_and_unknown_command_are_usage_errors() {
    for line in ["beam --lambda abc", "frobnicate", "harmonics --j 1 --n-theta x"] {
        let err = parse_config(args(line), None).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{line}: {err}");
    }
}

#[test]
fn out_of_range_values_are_rejected() {
    for line in [
        "trajectory --lambda 0.5 --tol 1e-20",
        "trajectory --lambda 0.5 --t-end -1",
        "trajectory --lambda 0.5 --r0 0,0,0",
        "trajectory --lambda 0.5 --integrator euler",
        "beam --lambda 0.5 --n 1",
        "beam --lambda 0.5 --spread 0",
        "harmonics --j 1 --m 0.5",
        "harmonics --j 2 --m-prime 3",
        "harmonics --j 2 --n-theta 3",
        "dispersion --mode co-phase --kappa0 -1",
        "dispersion --mode co-phase --kappa0 1 --k-min 2 --k-max 1",
        "identities --b 0",
    ] {
        let err = parse_config(args(line), None).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)), "{line}: {err}");
    }
}

#[test]
fn negative_values_parse() {
    let cfg = parse_config(args("beam --lambda -0.5 --z0 -4"), None).unwrap();
    let Command::Beam(b) = &cfg.command else { panic!("{cfg:?}") };
    assert_eq!((b.lambda, b.z0), (-0.5, -4.0));
    let cfg = parse_config(args("trajectory --lambda 1 --v0 -1,0,0.5"), None).unwrap();
    let Command::Trajectory(t) = &cfg.command else { panic!("{cfg:?}") };
    assert_eq!(t.v0, [-1.0, 0.0, 0.5]);
}

#[test]
fn non_ladder_j_cites_the_ladder() {
    let err = parse_config(args("harmonics --j 0.3"), None).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("0, 1/2, 1, 3/2"), "{err}");
}

#[test]
fn flags_override_the_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# beam defaults\ncommand = beam\nlambda = 0.25\nn = 12\nt_end = 15").unwrap();
    let cfg = parse_config(args("beam --lambda 0.75"), Some(file.path())).unwrap();
    let Command::Beam(b) = &cfg.command else { panic!("{cfg:?}") };
    assert_eq!((b.lambda, b.n, b.t_end), (0.75, 12, 15.0));

    // The command itself may come from the file.
    let path = file.path().to_str().unwrap();
    let cfg = parse_config(args(&format!("--config {path} --seed 3")), None).unwrap();
    let Command::Beam(b) = &cfg.command else { panic!("{cfg:?}") };
    assert_eq!((b.lambda, cfg.seed), (0.25, 3));
}

#[test]
fn unknown_file_keys_are_rejected_by_name() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "lambda = 0.5\nfocus = 2").unwrap();
    let err = parse_config(args("beam"), Some(file.path())).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("`focus`"), "{err}");
}

#[test]
fn beam_without_coupling_reports_unit_metric() {
    let cfg = parse_config(args("beam --lambda 0 --n 20"), None).unwrap();
    let out = run(&cfg).unwrap();
    assert_eq!(out.exit_code(), 0);
    let text = out.artifact.render();
    assert!(text.contains("# convergence_metric: 1.0000000000000000e0"), "{text}");
}

#[test]
fn artifacts_carry_metadata() {
    let cfg = parse_config(args("--format json identities --spinors 10"), None).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&run(&cfg).unwrap().artifact.render()).unwrap();
    let m = &doc["metadata"];
    assert_eq!(m["tool"], "monopole-lab");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["seed"], 0);
    assert_eq!(m["config"]["spinors"], 10);

    let cfg = parse_config(args("--seed 9 potentials-check --points 10"), None).unwrap();
    let text = run(&cfg).unwrap().artifact.render();
    let head: Vec<&str> = text.lines().take(5).collect();
    assert!(head[0].starts_with("# tool: monopole-lab "));
    assert_eq!(head[2], "# seed: 9");
    assert!(head[3].starts_with("# config: {"));
    assert_eq!(head[4], "check,value,bound,verdict");
}

#[test]
fn trajectory_header_and_precision() {
    let cfg = parse_config(args("trajectory --lambda 0.5 --t-end 1"), None).unwrap();
    let text = run(&cfg).unwrap().artifact.render();
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(lines.next(), Some("t,x,y,z,vx,vy,vz,Lx,Ly,Lz,cone_angle_err"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(first.len(), 11);
    assert_eq!(&first[..4], &[0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn binary_exit_codes() {
    let out = bin().args(["--seed", "42", "symmetry-audit"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["all_pass"], true);

    let out = bin().args(["harmonics", "--j", "0.3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ladder"));

    // A drift bound no integrator can meet is an invariant violation.
    let out = bin()
        .args(["trajectory", "--lambda", "0.5", "--tol", "1e-4", "--drift-bound", "1e-15"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invariant violated"));

    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_file_gets_artifact_and_stdout_gets_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beam.csv");
    let out = bin()
        .args(["--output", path.to_str().unwrap(), "beam", "--lambda", "0", "--n", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert_eq!(summary.lines().count(), 1);
    assert!(summary.contains("convergence metric 1.000000"), "{summary}");
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("impact,min_axis_distance,z_at_min,hit_origin"));
}
