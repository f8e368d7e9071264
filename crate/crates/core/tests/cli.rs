//! End-to-end runs of the `wlab` binary, with JSON snapshots under
//! `fixtures/expected`. Set `UPDATE_SNAPSHOTS=1` to rewrite them.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::fixtures_dir;
use serde_json::Value;

fn wlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlab"))
        .args(args)
        .env_remove("WLAB_TOLERANCE_SCALE")
        .output()
        .expect("run wlab")
}

fn fx(name: &str) -> String {
    fixtures_dir().join(name).to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&o.stdout)
        )
    })
}

fn expected(name: &str) -> PathBuf {
    fixtures_dir().join("expected").join(name)
}

fn updating() -> bool {
    std::env::var_os("UPDATE_SNAPSHOTS").is_some()
}

/// Structural equality with numbers compared to a relative tolerance.
fn json_close(a: &Value, b: &Value, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            let scale = 1.0f64.max(x.abs()).max(y.abs());
            if (x - y).abs() <= 1e-8 * scale {
                Ok(())
            } else {
                Err(format!("{path}: {x} != {y}"))
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Err(format!("{path}: length {} != {}", x.len(), y.len()));
            }
            x.iter()
                .zip(y)
                .enumerate()
                .try_for_each(|(i, (u, v))| json_close(u, v, &format!("{path}[{i}]")))
        }
        (Value::Object(x), Value::Object(y)) => {
            let kx: Vec<_> = x.keys().collect();
            let ky: Vec<_> = y.keys().collect();
            if kx != ky {
                return Err(format!("{path}: keys {kx:?} != {ky:?}"));
            }
            x.iter()
                .try_for_each(|(k, u)| json_close(u, &y[k], &format!("{path}.{k}")))
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} != {b}")),
    }
}

fn snapshot_json(name: &str, got: &Value) {
    let path = expected(name);
    if updating() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(got).unwrap() + "\n").unwrap();
        return;
    }
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|_| {
        panic!(
            "missing snapshot {}; rerun with UPDATE_SNAPSHOTS=1",
            path.display()
        )
    }))
    .unwrap();
    if let Err(e) = json_close(got, &want, "$") {
        panic!("{name} differs from snapshot: {e}");
    }
}

fn snapshot_text(name: &str, got: &str) {
    let path = expected(name);
    if updating() {
        std::fs::write(&path, got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing snapshot {}", path.display()));
    assert_eq!(got, want, "{name} differs from snapshot");
}

#[test]
fn report_snapshots_and_exit_codes() {
    let cases = [
        ("example21", 2),
        ("example22", 2),
        ("example23", 0),
        ("unicity1a", 2),
        ("unicity1b", 2),
        ("unicity2a", 2),
        ("unicity2b", 2),
        ("irregular", 2),
    ];
    for (name, want) in cases {
        let o = wlab(&["report", &fx(&format!("{name}.json"))]);
        let json = stdout_json(&o);
        snapshot_json(&format!("{name}.report.json"), &json);
        assert_eq!(
            code(&o),
            want,
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let verdict = if want == 0 { "pass" } else { "fail" };
        assert_eq!(json["verdict"], verdict, "{name}");
    }
}

#[test]
fn unicity_snapshots() {
    for pair in ["unicity1", "unicity2"] {
        let o = wlab(&[
            "unicity",
            &fx(&format!("{pair}a.json")),
            &fx(&format!("{pair}b.json")),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let json = stdout_json(&o);
        snapshot_json(&format!("{pair}.unicity.json"), &json);
    }
    let o = wlab(&["unicity", &fx("unicity1a.json"), &fx("unicity1b.json")]);
    let u = &stdout_json(&o)["unicity"];
    assert_eq!(u["p"], 6);
    assert_eq!(u["q"], 6);
}

#[test]
fn malformed_input_is_a_usage_error() {
    let o = wlab(&["check", &fx("malformed.json")]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr)
        .unwrap()
        .replace(&fx("malformed.json"), "malformed.json");
    assert!(err.contains("field `h`: syntax error at byte 10"), "{err}");
    snapshot_text("malformed.stderr.txt", &err);
}

#[test]
fn missing_file_and_bad_flags_exit_one() {
    let o = wlab(&["report", "/nonexistent/data.json"]);
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());

    assert_eq!(code(&wlab(&["report"])), 1);
    assert_eq!(code(&wlab(&["frobnicate"])), 1);
    assert_eq!(
        code(&wlab(&[
            "--tol",
            "eps_bogus=1",
            "report",
            &fx("example23.json")
        ])),
        1
    );
    assert_eq!(
        code(&wlab(&[
            "ramify",
            &fx("example21.json"),
            "--component",
            "3"
        ])),
        1
    );
    assert_eq!(code(&wlab(&["--help"])), 0);
}

#[test]
fn check_fails_on_irregular_data() {
    let o = wlab(&["check", &fx("irregular.json")]);
    assert_eq!(code(&o), 2);
    let json = stdout_json(&o);
    let failures: Vec<&str> = json["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(
        failures.iter().any(|f| f.contains("regularity")),
        "{failures:?}"
    );
    assert_eq!(json["check"]["regularity"]["passed"], false);
}

#[test]
fn constant_component_is_reported_not_failed() {
    let o = wlab(&["ramify", &fx("example22.json"), "--component", "2"]);
    assert_eq!(code(&o), 0);
    let json = stdout_json(&o);
    let comps = json["ramification"].as_array().unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0]["component"], 2);
    assert_eq!(comps[0]["verdict"], "constant-component");
    assert!(comps[0]["report"].is_null());
}

#[test]
fn ramify_lists_exceptional_values() {
    let o = wlab(&["ramify", &fx("example21.json"), "--component", "1"]);
    let json = stdout_json(&o);
    let r = &json["ramification"][0]["report"];
    assert_eq!(r["exceptional_count"], 4);
    assert_eq!(r["nu_f"]["num"], 4);
    assert_eq!(r["nu_f"]["den"], 1);
}

#[test]
fn abstract_bounds() {
    // k = 4, d = 1: R = 1/2 each, and nu = 4 meets the bound with equality.
    let o = wlab(&[
        "bounds",
        "--abstract",
        "0",
        "4",
        "1",
        "1",
        "4",
        "4",
        "--r0",
        "4,4",
    ]);
    assert_eq!(code(&o), 0);
    let json = stdout_json(&o);
    let b = &json["bounds"];
    assert_eq!(b["report"]["nu_bound"]["holds"], true);
    assert_eq!(b["report"]["nu_bound"]["sharp"], true);
    assert_eq!(b["corollary"]["verdict"], "consistent-sharp");

    let o = wlab(&["bounds", "--abstract", "0", "4", "1", "1", "9/2", "4"]);
    assert_eq!(code(&o), 2);
    assert_eq!(
        stdout_json(&o)["bounds"]["report"]["consistency"],
        "contradiction"
    );

    let o = wlab(&[
        "bounds",
        "--abstract",
        "0",
        "4",
        "1",
        "1",
        "4",
        "4",
        "--r0",
        "5,5",
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(
        stdout_json(&o)["bounds"]["corollary"]["verdict"],
        "contradiction"
    );

    let o = wlab(&[
        "bounds",
        "--abstract",
        "0",
        "3",
        "1",
        "0",
        "3",
        "0",
        "--mu",
        "2,2,1",
    ]);
    let b = &stdout_json(&o)["bounds"]["report"];
    assert_eq!(b["case"], "one-constant");
    assert_eq!(b["algebraic"], false);
}

#[test]
fn tolerance_overrides_reach_the_report() {
    let o = wlab(&[
        "--tol",
        "eps_pt=1e-7",
        "--tol",
        "quad_rel=0.01",
        "report",
        &fx("example23.json"),
    ]);
    assert_eq!(code(&o), 0);
    let t = &stdout_json(&o)["tolerances"];
    assert_eq!(t["eps_pt"], 1e-7);
    assert_eq!(t["quad_rel"], 0.01);
    assert_eq!(t["eps_res"], 1e-9);
}

#[test]
fn seed_is_recorded() {
    let o = wlab(&["--seed", "7", "bounds", &fx("example21.json")]);
    let json = stdout_json(&o);
    assert_eq!(json["seed"], 7);
    assert_eq!(json["bounds"]["report"]["rotation"]["seed"], 7);
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = wlab(&["-o", out.to_str().unwrap(), "report", &fx("example23.json")]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "report");
}

fn mesh_to(dir: &Path, file: &str, extra: &[&str]) -> (Output, String) {
    let out = dir.join(file);
    let mut args = vec!["mesh", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = wlab(&args);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (o, text)
}

#[test]
fn mesh_exports() {
    let dir = tempfile::tempdir().unwrap();
    let f23 = fx("example23.json");
    let (o, csv) = mesh_to(
        dir.path(),
        "m.csv",
        &[
            &f23,
            "--region",
            "annulus:0,0,0.5,2",
            "--res",
            "9x17",
            "--base",
            "1",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re_z,im_z,x1,x2,x3,x4,metric,K"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9 * 17);
    assert!(rows
        .iter()
        .all(|r| r.len() == 8 && r[7] <= 0.0 && r[6] > 0.0));

    let (o, obj) = mesh_to(
        dir.path(),
        "m.obj",
        &[
            &f23,
            "--region",
            "rect:0.5,1.5,-0.5,0.5",
            "--res",
            "5",
            "--base",
            "1",
            "--format",
            "obj",
            "--project",
            "2,3,4",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 25);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 16);

    // Punctures inside the region are cut out; the period failure is flagged.
    let f21 = fx("example21.json");
    let (o, csv) = mesh_to(
        dir.path(),
        "p.csv",
        &[
            &f21,
            "--region",
            "rect:0,4,-1,1",
            "--res",
            "9",
            "--base",
            "0.5i",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(csv.lines().count() - 1 < 81);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("universal cover"), "{err}");

    let (o, _) = mesh_to(
        dir.path(),
        "bad.csv",
        &[&f23, "--region", "rect:1,0,0,1", "--base", "1"],
    );
    assert_eq!(code(&o), 1);
    let (o, _) = mesh_to(
        dir.path(),
        "bad.csv",
        &[
            &f23,
            "--region",
            "rect:0.5,1,0,1",
            "--base",
            "1",
            "--project",
            "1,1,2",
        ],
    );
    assert_eq!(code(&o), 1);
}
