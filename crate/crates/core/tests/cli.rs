use std::path::PathBuf;
use std::process::{Command, Output};

fn ellsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellsurf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn context_file(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn genus_bound() {
    let o = ellsurf(&["genus-bound", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "6\n");
    assert_eq!(ellsurf(&["genus-bound", "5"]).status.code(), Some(2));
}

#[test]
fn chow_k_squared() {
    let o = ellsurf(&["chow", "E(3,1;O)(+)L(eta-O)", "T", "T", "3*T-H(tau)", "2*T+H(eta)-H(O)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4\n");
}

#[test]
fn surface_and_moduli() {
    let ci = "ci(E(3,1;O) (+) L(eta-O); Q=2*T + H(eta) - H(O); X=3*T - H(tau))";
    let o = ellsurf(&["--json", "surface", ci]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["K2"].as_i64(), v["pg"].as_i64(), v["q"].as_i64()), (Some(4), Some(1), Some(1)));
    assert_eq!(v["fibre_genus"].as_i64(), Some(4));
    assert_eq!(stdout(&ellsurf(&["moduli-dim", ci])), "4\n");
}

#[test]
fn parse_error_exits_two_with_position() {
    let o = ellsurf(&["bundle", "E(3,1;O) (+) Q(eta)", "stats"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("1:14"), "{err}");
    assert_eq!(ellsurf(&["bundle", "L(nowhere)", "stats"]).status.code(), Some(2));
    assert_eq!(ellsurf(&["--bogus", "verify"]).status.code(), Some(2));
}

#[test]
fn verify_json_schema_and_determinism() {
    let a = ellsurf(&["verify", "--json"]);
    let b = ellsurf(&["verify", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    // C5 and C10 disagree with their stated values
    assert_eq!(a.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let claims = v["claims"].as_array().unwrap();
    for key in ["id", "anchor", "computed", "expected", "status", "note"] {
        assert!(claims.iter().all(|c| c.get(key).is_some()), "missing {key}");
    }
    let failed: Vec<&str> =
        claims.iter().filter(|c| c["status"] == "fail").map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(failed, ["C5", "C10"]);
    assert_eq!(v["context_fingerprint"].as_str().unwrap().len(), 64);
    assert_eq!(v["version"].as_str(), Some(env!("CARGO_PKG_VERSION")));
}

#[test]
fn order_two_eta_fails_c14() {
    let path = context_file("eta2.ctx", "torsion eta 2\ntorsion kappa 3\npoint tau = 2*O - eta\n");
    let o = ellsurf(&["--context", path.to_str().unwrap(), "--json", "verify"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c14 = v["claims"].as_array().unwrap().iter().find(|c| c["id"] == "C14").unwrap();
    assert_eq!(c14["status"], "fail");
}

#[test]
fn bad_context_file_exits_two() {
    let path = context_file("bad.ctx", "torsion eta 3\nmystery line\n");
    let o = ellsurf(&["--context", path.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(ellsurf(&["--context", "/nonexistent/ctx", "verify"]).status.code(), Some(2));
}

#[test]
fn oracle_check() {
    let o = ellsurf(&["oracle", "check", "Sym{2}E(3,1;O)", "E(3,2;O) (+) E(3,2;O)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("necessary condition only"));
    let o = ellsurf(&["oracle", "check", "Sym{2}E(3,1;O)", "E(3,2;O) (+) E(3,1;O)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bundle_ops_with_oracle() {
    let o = ellsurf(&["--oracle", "bundle", "E(3,1;O) (+) L(eta-O)", "wedge2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("oracle: PASS"));
    assert_eq!(stdout(&ellsurf(&["bundle", "E(3,1;O)", "det"])), "(1, 0)\n");
}
