use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use jetcalc_cli::{run, Outcome, Report};

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("models")
        .join(name)
        .display()
        .to_string()
}

fn jetcalc(args: &[&str]) -> Outcome {
    run(std::iter::once("jetcalc").chain(args.iter().copied()))
}

fn temp_model(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn l3_of_the_worked_example() {
    let out = jetcalc(&["l3", &model("plane.jet"), "P1", "P2", "P3"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "-2*u1^2\n"));
    let out = jetcalc(&["jacobiator", &model("plane.jet"), "P1", "P2", "P3"]);
    assert_eq!(out.stdout, "4*u1*u1_x\n");
}

#[test]
fn invariant_bracket() {
    let plane = model("plane.jet");
    let out = jetcalc(&["l2", &plane, "beta", "gamma"]);
    assert_eq!(out.stdout, "-u1*u2_xx + u1_xx*u2\n");
    let out = jetcalc(&[
        "check",
        "invariance",
        &plane,
        "C4",
        "--",
        "-u1*u2_xx + u1_xx*u2",
    ]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "pass\n"));
    let out = jetcalc(&["check", "closure", &plane, "C4", "beta", "gamma"]);
    assert_eq!(out.code, 0);
}

#[test]
fn poisson_check_passes_for_symplectic_omega() {
    let out = jetcalc(&["check", "poisson", &model("plane.jet")]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "pass\n"));
}

#[test]
fn scaling_fails_covariance_and_canonicity() {
    let plane = model("plane.jet");
    let out = jetcalc(&["check", "covariance", &plane, "Scale2"]);
    assert_eq!(out.code, 1);
    assert_eq!(out.stdout, "fail\nu1,u2: -1\nu2,u1: 1\n");
    let out = jetcalc(&["check", "canonical", &plane, "Scale2", "u1^2", "u2^2"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("difference: 8*u1*u2"));
    for auto in ["Rot90", "Rot345"] {
        assert_eq!(jetcalc(&["check", "covariance", &plane, auto]).code, 0);
        assert_eq!(
            jetcalc(&["check", "canonical", &plane, auto, "u1^3", "u2^2"]).code,
            0
        );
    }
}

#[test]
fn variational_commands() {
    let plane = model("plane.jet");
    assert_eq!(
        jetcalc(&["euler", &plane, "P1"]).stdout,
        "E_u1: u2_x\nE_u2: -u1_x\n"
    );
    assert_eq!(jetcalc(&["td", &plane, "x", "u1^2"]).stdout, "2*u1*u1_x\n");
    assert_eq!(jetcalc(&["dh", &plane, "u1^2"]).stdout, "2*u1*u1_x\n");
    assert_eq!(
        jetcalc(&["invert-dx", &plane, "u1*u1_x + u2_xx"]).stdout,
        "1/2*u1^2 + u2_x\n"
    );
    let out = jetcalc(&["invert-dx", &plane, "u1*u2_x"]);
    assert_eq!(out.code, 1);
    assert_eq!(out.stdout, "fail\nE_u1: u2_x\nE_u2: -u1_x\n");
    assert_eq!(
        jetcalc(&["average", &plane, "C4", "u1^2"]).stdout,
        "1/2*u1^2 + 1/2*u2^2\n"
    );
}

#[test]
fn forms_in_two_dimensions() {
    let f = temp_model("bundle { base = [x, y]; fibers = [u] }\n");
    let path = f.path().to_str().unwrap();
    assert_eq!(jetcalc(&["dh", path, "u"]).stdout, "dx: u_x\ndy: u_y\n");
    assert_eq!(
        jetcalc(&["dh", path, "--degree", "1", "u_x", "u_y"]).stdout,
        "0\n"
    );
    let out = jetcalc(&["dh", path, "--degree", "1", "u"]);
    assert_eq!(out.code, 2);
    assert_eq!(
        jetcalc(&["dh", path, "--degree", "1", "u_y", "u_x"]).stdout,
        "u_xx - u_yy\n"
    );
    assert_eq!(jetcalc(&["dh", path, "--degree", "2", "u"]).code, 2);
}

#[test]
fn symmetry_checks() {
    let plane = model("plane.jet");
    assert_eq!(
        jetcalc(&["check", "el-transform", &plane, "Shear", "u1*u2_x^2"]).code,
        0
    );
    assert_eq!(
        jetcalc(&["check", "commute", &plane, "Shear", "u1*u2_x"]).code,
        0
    );
    assert_eq!(
        jetcalc(&["check", "invariance", &plane, "C4", "u1^2"]).code,
        1
    );
    assert_eq!(
        jetcalc(&["check", "closure", &plane, "C4", "u1^2", "u2"]).code,
        2
    );
}

#[test]
fn shlie_checks() {
    let plane = model("plane.jet");
    let out = jetcalc(&["check", "shlie", &plane, "--count", "20", "--seed", "4"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "pass\ntriples: 20\npairs: 20\n");
    assert_eq!(
        jetcalc(&["check", "shlie", &plane, "P1", "P2", "P3"]).code,
        0
    );
    assert_eq!(jetcalc(&["check", "shlie", &plane, "P1", "P2"]).code, 2);
    let bad = temp_model("bundle { base = [x]; fibers = [u1, u2, u3] }\nomega = [[0, u1, -1], [-u1, 0, 0], [1, 0, 0]]\n");
    let out = jetcalc(&["check", "shlie", bad.path().to_str().unwrap()]);
    assert_eq!(out.code, 2);
    let out = jetcalc(&["check", "poisson", bad.path().to_str().unwrap()]);
    assert_eq!((out.code, out.stdout.as_str()), (1, "fail\nu1,u2,u3: 1\n"));
}

#[test]
fn sigma_models() {
    let so3 = model("so3_sigma.jet");
    let out = jetcalc(&["check", "sigma-euler", &so3]);
    assert_eq!(out.code, 0);
    assert!(out
        .stdout
        .contains("E^A(L) / eps^{mu nu} R^A_{mu nu}: 1/2\n"));
    let rot = "[[3/5,-4/5,0],[4/5,3/5,0],[0,0,1]]";
    assert_eq!(
        jetcalc(&["check", "sigma-invariance", &so3, "--matrix", rot]).code,
        0
    );
    assert_eq!(
        jetcalc(&[
            "check",
            "sigma-invariance",
            &so3,
            "--matrix",
            "[[2,0,0],[0,1,0],[0,0,1]]"
        ])
        .code,
        2
    );
    let refl = "[[1,0,0],[0,-1,0],[0,0,1]]";
    assert_eq!(
        jetcalc(&["check", "sigma-invariance", &so3, "--matrix", refl]).code,
        1
    );

    // Block omega for non-constant W: cyclic condition and Jacobiator both fail.
    let out = jetcalc(&["check", "poisson", &so3]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("u1,w1m0,w2m0: -u2\n"));
    assert_eq!(
        jetcalc(&["jacobiator", &so3, "w1m0", "w2m0", "u1"]).stdout,
        "u2\n"
    );
    assert_eq!(jetcalc(&["invert-dx", &so3, "u2"]).code, 2);
    assert_eq!(
        jetcalc(&["euler", &so3, "u2"]).stdout.lines().nth(1),
        Some("E_u2: 1")
    );

    let constant = model("symplectic_sigma.jet");
    assert_eq!(jetcalc(&["check", "poisson", &constant]).code, 0);
    assert_eq!(
        jetcalc(&["jacobiator", &constant, "w1m0", "w2m0", "u1"]).stdout,
        "0\n"
    );
    assert_eq!(jetcalc(&["check", "sigma-euler", &constant]).code, 0);
}

#[test]
fn json_round_trips() {
    let out = jetcalc(&[
        "--json",
        "check",
        "covariance",
        &model("plane.jet"),
        "Scale2",
    ]);
    assert_eq!(out.code, 1);
    let report: Report = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report.command, "check covariance");
    assert!(!report.pass);
    assert_eq!(report.residuals.len(), 2);
    assert_eq!(report.to_json(), out.stdout);
    let value: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let keys: Vec<_> = value.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 4);
    for k in ["command", "pass", "results", "residuals"] {
        assert!(keys.contains(&k.to_string()));
    }
    let out = jetcalc(&["l3", "--json", &model("plane.jet"), "P1", "P2", "P3"]);
    let report: Report = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report.results[0].expression, "-2*u1^2");
}

#[test]
fn output_is_deterministic() {
    let args = [
        "--jobs",
        "4",
        "check",
        "shlie",
        &model("plane.jet"),
        "--count",
        "10",
    ];
    let a = jetcalc(&args);
    let b = jetcalc(&args);
    let c = jetcalc(&args[2..]);
    assert_eq!(a, b);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn errors_exit_with_two() {
    let plane = model("plane.jet");
    assert_eq!(jetcalc(&["l3", "missing.jet", "P1", "P2", "P3"]).code, 2);
    assert_eq!(jetcalc(&["l2", &plane, "P1", "Q9"]).code, 2);
    assert_eq!(jetcalc(&["check", "covariance", &plane, "Nope"]).code, 2);
    assert_eq!(jetcalc(&["frobnicate"]).code, 2);
    let bad = temp_model("bundle { base = [x]; fibers = [u] }\nlet A = u +\n");
    let out = jetcalc(&["euler", bad.path().to_str().unwrap(), "A"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);
    let two_d = temp_model("bundle { base = [x, y]; fibers = [u] }\nomega = [[0]]\n");
    assert_eq!(
        jetcalc(&["l3", two_d.path().to_str().unwrap(), "u", "u", "u"]).code,
        2
    );
    assert_eq!(jetcalc(&["--help"]).code, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_jetcalc");
    let plane = model("plane.jet");
    let out = Command::new(bin)
        .args(["l3", &plane, "P1", "P2", "P3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "-2*u1^2\n");
    let out = Command::new(bin)
        .args(["check", "covariance", &plane, "Scale2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(bin)
        .args(["check", "poisson", "missing.jet"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
