use std::path::{Path, PathBuf};
use std::process::Command;

use jacobi_core::conjugacy::{conjugate_poisson, riesz};
use jacobi_core::spectral::apply_heat;
use jacobi_core::{Basis, Expansion, MultiIndex, ParamVector};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn jacobi_in(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_jacobi"))
        .args(args)
        .current_dir(dir)
        .env_remove("JACOBI_THREADS")
        .output()
        .expect("spawn jacobi");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn jacobi(args: &[&str]) -> Run {
    jacobi_in(Path::new(env!("CARGO_MANIFEST_DIR")), args)
}

fn ok(args: &[&str]) -> String {
    let r = jacobi(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r.stdout
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("valid json")
}

/// Coefficients of an expansion document as `(k, v)` pairs.
fn coeffs(doc: &Value) -> Vec<(Vec<u32>, f64)> {
    doc["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let k = c["k"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_u64().unwrap() as u32)
                .collect();
            (k, c["v"].as_f64().unwrap())
        })
        .collect()
}

fn to_expansion(doc: &Value) -> Expansion {
    let fl = |key: &str| {
        doc[key]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect::<Vec<_>>()
    };
    let basis = match &doc["basis"] {
        Value::String(s) if s == "standard" => Basis::Standard,
        other => Basis::Shifted(other["shifted"].as_u64().unwrap() as usize - 1),
    };
    let mut f = Expansion::new(
        ParamVector::new(&fl("alpha"), &fl("beta")).unwrap(),
        basis,
        doc["N"].as_u64().unwrap() as u32,
    )
    .unwrap();
    for (k, v) in coeffs(doc) {
        f.set(MultiIndex::new(k), v).unwrap();
    }
    f
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn expand_mode_gives_one_coefficient() {
    let doc = json(&ok(&["expand", "mode", "k=(1,0)"]));
    assert_eq!(coeffs(&doc), vec![(vec![1, 0], 1.0)]);
    assert_eq!(doc["basis"], "standard");
    assert_eq!(doc["config"]["command"]["name"], "expand");
}

#[test]
fn expand_product_of_coordinates() {
    // x = P_1^{(0,0)}, so x1 x2 has the single coefficient 1 at k = (1, 1).
    let doc = json(&ok(&["expand", "poly", "1@1,1"]));
    for (k, v) in coeffs(&doc) {
        let want = if k == [1, 1] { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-14, "k={k:?}: {v}");
    }
}

#[test]
fn expansion_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for spec in [
        &["mode", "k=(2,1)", "shifted=2", "v=-0.375"][..],
        &["bump", "c=(0.1)", "r=0.7"],
        &["poly", "0.5@3 2@0"],
    ] {
        let first = json(&ok(&[&["expand"][..], spec].concat()));
        let path = write(dir.path(), "f.json", &first.to_string());
        let again = json(&ok(&["expand", "file", path.to_str().unwrap()]));
        for key in ["alpha", "beta", "basis", "N", "coeffs"] {
            assert_eq!(first[key], again[key], "{spec:?} {key}");
        }
    }
}

#[test]
fn malformed_specs_exit_2() {
    for spec in [
        &["bogus"][..],
        &["mode"],
        &["mode", "k=(1,x)"],
        &["mode", "k=(1)", "shifted=2"],
        &["mode", "k=(1)", "k=(2)"],
        &["poly", "1@1,1", "2@1"],
        &["poly", "1"],
        &["bump", "r=-1"],
        &["constant", "v=nan"],
        &["file", "/nonexistent/file.json"],
    ] {
        let r = jacobi(&[&["expand"][..], spec].concat());
        assert_eq!(r.code, 2, "{spec:?}");
        assert!(!r.stderr.is_empty());
        assert!(!r.stderr.contains("panicked"), "{}", r.stderr);
    }
}

#[test]
fn usage_errors_exit_2_without_panicking() {
    let dir = tempfile::tempdir().unwrap();
    let mode = write(dir.path(), "m.json", &ok(&["expand", "mode", "k=(1,1)"]));
    let m = mode.to_str().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"alpha\": [0]}");
    let cases: Vec<Vec<&str>> = vec![
        vec!["apply", "frobnicate", m],
        vec!["apply", "riesz-0", m],
        vec!["apply", "riesz-3", m],
        vec!["apply", "heat", m],
        vec!["apply", "heat", m, "--t", "-1"],
        vec!["apply", "riesz-adjoint-1", m],
        vec!["apply", "riesz-1", bad.to_str().unwrap()],
        vec!["verify", "everything"],
        vec!["verify", "exact", "--alpha", "-1"],
        vec!["verify", "exact", "--dim", "7"],
        vec!["verify", "numeric", "--expect-violation"],
        vec!["normprobe", "riesz-1", "--p", "0.5"],
        vec!["normprobe", "riesz-2", "--dim", "1"],
        vec!["normprobe", "heat"],
        vec!["normprobe", "nothing"],
        vec!["kernels", "modified-2"],
        vec!["kernels", "--t", "0"],
        vec!["gfun", m, "--variant", "h"],
        vec!["expand", "constant", "--alpha", "0,0", "--beta", "0,0,0"],
        vec!["--nonsense"],
    ];
    for args in cases {
        let r = jacobi(&args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.contains("panicked"), "{args:?}: {}", r.stderr);
    }
    let r = Command::new(env!("CARGO_BIN_EXE_jacobi"))
        .arg("normprobe")
        .arg("riesz-1")
        .env("JACOBI_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn apply_matches_library_maps() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(
        dir.path(),
        "f.json",
        &ok(&[
            "expand",
            "poly",
            "1@2,1 -0.5@0,3 0.25@1,0",
            "--alpha",
            "0.5,-0.25",
            "--beta",
            "1",
        ]),
    );
    let s = src.to_str().unwrap();
    let f = to_expansion(&json(&std::fs::read_to_string(&src).unwrap()));

    let r = to_expansion(&json(&ok(&["apply", "riesz-1", s])));
    assert_eq!(r, riesz(0, &f).unwrap());

    // Chained apply equals the composed spectral map.
    let p = write(
        dir.path(),
        "p.json",
        &ok(&["apply", "poisson", s, "--t", "0.3"]),
    );
    let chained = to_expansion(&json(&ok(&["apply", "riesz-2", p.to_str().unwrap()])));
    let direct = conjugate_poisson(1, 0.3, &f).unwrap();
    assert!(chained.max_coefficient_difference(&direct).unwrap() < 1e-15);

    let h = write(
        dir.path(),
        "h.json",
        &ok(&["apply", "heat", s, "--t", "0.2"]),
    );
    let hh = to_expansion(&json(&ok(&[
        "apply",
        "heat",
        h.to_str().unwrap(),
        "--t",
        "0.5",
    ])));
    assert!(
        hh.max_coefficient_difference(&apply_heat(0.7, &f).unwrap())
            .unwrap()
            < 1e-15
    );
}

#[test]
fn poisson_leaves_constants_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.json",
        &ok(&["expand", "constant", "v=2.5", "--dim", "2"]),
    );
    let out = json(&ok(&["apply", "poisson", c.to_str().unwrap(), "--t", "1"]));
    assert_eq!(coeffs(&out), vec![(vec![0, 0], 2.5)]);
}

#[test]
fn stdin_input() {
    let mode = ok(&["expand", "mode", "k=(2)"]);
    let mut child = Command::new(env!("CARGO_BIN_EXE_jacobi"))
        .args(["apply", "pi0", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(mode.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        coeffs(&json(&String::from_utf8(out.stdout).unwrap())),
        vec![(vec![2], 1.0)]
    );
}

#[test]
fn verify_exact_default_corpus_passes() {
    let dir = tempfile::tempdir().unwrap();
    let r = jacobi_in(
        dir.path(),
        &["verify", "exact", "--dim", "1", "--out", "exact.json"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc = json(&std::fs::read_to_string(dir.path().join("exact.json")).unwrap());
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["summary"].as_array().unwrap().len(), 17);
    assert_eq!(doc["failures"].as_array().unwrap().len(), 0);

    let one = json(&ok(&[
        "verify", "exact", "--alpha", "-1/2,3/4", "--beta", "0.25", "--degree", "3",
    ]));
    assert_eq!(one["passed"], true);
    let hh2 = one["summary"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["identity"] == "hh2")
        .unwrap();
    assert_eq!(hh2["not_applicable"], hh2["checks"]);
}

#[test]
fn kernel_violation_outside_half_range() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "kernels",
        "--alpha=-0.9",
        "--beta=-0.9",
        "--t",
        "0.01,0.1",
    ];

    let r = jacobi_in(dir.path(), &[&args[..], &["--out", "plain.json"]].concat());
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("kernel_1"), "{}", r.stderr);
    let plain = json(&std::fs::read_to_string(dir.path().join("plain.json")).unwrap());
    assert_eq!(plain["passed"], false);
    assert!(plain["violations"].as_u64().unwrap() > 0);

    let r = jacobi_in(
        dir.path(),
        &[&args[..], &["--expect-violation", "--out", "expected.json"]].concat(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let expected = json(&std::fs::read_to_string(dir.path().join("expected.json")).unwrap());
    assert_eq!(expected["passed"], true);

    // In the half-range the bound holds, so expecting a violation fails.
    let r = jacobi(&["verify", "kernels", "--t", "0.1", "--expect-violation"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("not observed"));
}

#[test]
fn numerical_suites_pass() {
    for suite in ["numeric", "energy", "domination", "kernels"] {
        let doc = json(&ok(&["verify", suite, "--dim", "1"]));
        assert_eq!(doc["passed"], true, "{suite}");
        assert!(!doc["checks"].as_array().unwrap().is_empty());
    }
    let doc = json(&ok(&[
        "verify",
        "domination",
        "--alpha",
        "-0.9,0.5",
        "--beta",
        "0.3,-0.5",
        "--grid",
        "7",
    ]));
    assert_eq!(doc["passed"], true);
}

#[test]
fn normprobe_bounds_and_determinism() {
    let rows = |out: &str| -> Vec<f64> {
        out.lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let poisson = ok(&[
        "normprobe",
        "poisson",
        "--t",
        "0.5",
        "--p",
        "1.5,2,4",
        "--dim",
        "1,2",
        "--samples",
        "30",
    ]);
    let riesz2 = ok(&[
        "normprobe",
        "riesz-1",
        "--p",
        "2",
        "--dim",
        "1,2,3",
        "--samples",
        "30",
    ]);
    for v in rows(&poisson).into_iter().chain(rows(&riesz2)) {
        assert!(v <= 1.0 + 1e-10, "{v}");
    }

    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "normprobe",
        "conjugate-poisson-1",
        "--t",
        "0.2",
        "--p",
        "3",
        "--dim",
        "1,2",
        "--samples",
        "25",
        "--out",
        "p.csv",
    ];
    assert_eq!(jacobi_in(a.path(), &args).code, 0);
    assert_eq!(jacobi_in(b.path(), &args).code, 0);
    let single = Command::new(env!("CARGO_BIN_EXE_jacobi"))
        .args(args.iter().take(args.len() - 2))
        .env("JACOBI_THREADS", "1")
        .output()
        .unwrap();
    let fa = std::fs::read(a.path().join("p.csv")).unwrap();
    assert_eq!(fa, std::fs::read(b.path().join("p.csv")).unwrap());
    // Same rows regardless of the worker count (the config line differs by --out).
    let body = |s: &[u8]| {
        String::from_utf8_lossy(s)
            .lines()
            .skip(1)
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(body(&fa), body(&single.stdout));
}

#[test]
fn output_headers_and_atomic_writes() {
    let dir = tempfile::tempdir().unwrap();
    let r = jacobi_in(dir.path(), &["kernels", "--grid", "4", "--out", "k.csv"]);
    assert_eq!(r.code, 0);
    let entries: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(entries, vec![std::ffi::OsString::from("k.csv")]);
    let text = std::fs::read_to_string(dir.path().join("k.csv")).unwrap();
    assert!(!text.contains('\r'));
    let first = text.lines().next().unwrap();
    let cfg = json(first.strip_prefix("# config: ").unwrap());
    assert_eq!(cfg["grid"], serde_json::json!([4]));
    assert!(text.lines().any(|l| l == "x,y,value,residual_flag"));

    let doc = json(&ok(&["kernels", "--grid", "2", "--format", "json"]));
    assert_eq!(doc["config"]["format"], "json");
    assert_eq!(doc["values"].as_array().unwrap().len(), 4);
}

#[test]
fn gfun_domination_on_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        &ok(&[
            "expand",
            "poly",
            "1@2,1 0.5@1,3",
            "--alpha",
            "-0.3",
            "--beta",
            "0.4",
        ]),
    );
    let r1 = write(
        dir.path(),
        "r.json",
        &ok(&["apply", "riesz-1", f.to_str().unwrap()]),
    );
    let vals = |doc: Value| {
        doc["values"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect::<Vec<_>>()
    };
    let g = vals(json(&ok(&[
        "gfun",
        f.to_str().unwrap(),
        "--grid",
        "6",
        "--format",
        "json",
    ])));
    let gt = vals(json(&ok(&[
        "gfun",
        r1.to_str().unwrap(),
        "--variant",
        "g-tilde-1",
        "--grid",
        "6",
        "--format",
        "json",
    ])));
    for (a, b) in gt.iter().zip(&g) {
        assert!(*a <= b + 1e-10, "{a} > {b}");
    }
}

/// Bit-exact CSV goldens for the default corpus. `JACOBI_UPDATE_GOLDEN=1` rewrites them.
#[test]
fn csv_goldens() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mode = dir.join("mode_2_1.json");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        (
            "expand_mode.csv",
            vec!["expand", "mode", "k=(1,0)", "--format", "csv"],
        ),
        (
            "expand_poly.csv",
            vec!["expand", "poly", "1@1,1", "--format", "csv"],
        ),
        (
            "kernels_heat.csv",
            vec!["kernels", "--grid", "5", "--t", "0.5"],
        ),
        (
            "kernels_modified.csv",
            vec![
                "kernels",
                "modified-1",
                "--alpha",
                "0.5",
                "--beta",
                "-0.25",
                "--grid",
                "4",
                "--t",
                "0.25",
            ],
        ),
        (
            "gfun_mode.csv",
            vec!["gfun", "tests/golden/mode_2_1.json", "--grid", "3"],
        ),
        (
            "normprobe_riesz.csv",
            vec![
                "normprobe",
                "riesz-1",
                "--p",
                "1.5,2,4",
                "--dim",
                "1,2",
                "--samples",
                "20",
            ],
        ),
        (
            "verify_energy.csv",
            vec!["verify", "energy", "--format", "csv"],
        ),
        (
            "verify_exact_d1.csv",
            vec!["verify", "exact", "--dim", "1", "--format", "csv"],
        ),
    ];
    let update = std::env::var_os("JACOBI_UPDATE_GOLDEN").is_some();
    if update {
        std::fs::write(&mode, ok(&["expand", "mode", "k=(2,1)"])).unwrap();
    }
    for (name, args) in cases {
        let got = ok(&args);
        let path = dir.join(name);
        if update {
            std::fs::write(&path, &got).unwrap();
        } else {
            let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(got, want, "{name} differs from its golden file");
        }
    }
}
