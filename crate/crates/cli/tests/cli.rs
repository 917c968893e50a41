use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn milnor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_milnor"))
        .args(args)
        .output()
        .expect("failed to spawn milnor")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// CSV rows keyed by header name.
fn records(o: &Output) -> Vec<std::collections::HashMap<String, String>> {
    let text = stdout(o);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers.iter().map(String::from).zip(rec.iter().map(String::from)).collect()
        })
        .collect()
}

#[test]
fn trefoil_signature() {
    let input = data("trefoil.json");
    let o = milnor(&["signature", "--input", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = records(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["xi"], "6/1");
    assert_eq!(rows[0]["milnor_signature"], "-2");
    assert_eq!(rows[0]["total_signature"], "-2");
}

#[test]
fn figure_eight_has_no_signature_points() {
    let input = data("figure_eight.json");
    let o = milnor(&["signature", "--input", &input]);
    assert_eq!(o.status.code(), Some(0));
    assert!(records(&o).is_empty());
}

#[test]
fn elementary_real_jump() {
    let input = data("e1_real_z6.json");
    let o = milnor(&["jumps", "--input", &input, "--xi", "6/1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = records(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["xi"], "6/1");
    assert_eq!(rows[0]["jump"], "1");
    assert_eq!(rows[0]["route"], "routeA");
}

#[test]
fn elementary_complex_even_crosscheck() {
    let input = data("e2_complex_z8.json");
    let o = milnor(&["crosscheck", "--input", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = records(&o);
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(r["trace"], "0");
        assert_ne!(r["status"], "mismatch");
    }
}

#[test]
fn mixed_sum_both_routes() {
    let input = data("mixed_sum.json");
    let o = milnor(&["jumps", "--input", &input, "--check-both-routes"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let jumps: Vec<(String, String)> = records(&o)
        .into_iter()
        .map(|r| {
            assert_eq!(r["consistent"], "true");
            (r["xi"].clone(), r["jump"].clone())
        })
        .collect();
    assert_eq!(
        jumps,
        vec![("12/1".into(), "1".into()), ("12/5".into(), "-1".into())]
    );
}

#[test]
fn torus_knot_blanchfield_agrees() {
    let input = data("torus_2_7.json");
    let o = milnor(&["crosscheck", "--input", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = records(&o);
    let specs: Vec<&str> = rows.iter().map(|r| r["xi"].as_str()).collect();
    assert_eq!(specs, ["14/1", "14/3", "14/5"]);
    for r in &rows {
        assert_eq!(r["status"], "ok");
        assert_eq!(r["blanchfield"], r["fibered"]);
    }
}

#[test]
fn lt_profile_matches_prediction_off_alexander_roots() {
    for name in ["trefoil.json", "torus_2_7.json", "trefoil_twisted.json"] {
        let input = data(name);
        let o = milnor(&["lt-profile", "--input", &input, "--grid", "14"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        let rows = records(&o);
        assert!(!rows.is_empty());
        for r in rows.iter().filter(|r| r["alexander_root"] == "false") {
            assert_eq!(r["predicted"], r["total_signature"], "{name} at {}", r["omega"]);
        }
    }
}

#[test]
fn csv_round_trip_is_deterministic() {
    let input = data("mixed_sum.json");
    let first = milnor(&["signature", "--input", &input, "--grid", "12"]);
    assert_eq!(first.status.code(), Some(0));
    let rows = records(&first);
    assert!(!rows.is_empty());
    let mut args = vec!["signature".to_string(), "--input".into(), input.clone()];
    for r in &rows {
        args.push("--xi".into());
        args.push(r["xi"].clone());
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let second = milnor(&args);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(records(&second), rows);
    assert_eq!(stdout(&milnor(&args)), stdout(&second));
}

#[test]
fn json_output_is_exact() {
    let input = data("trefoil.json");
    let o = milnor(&["signature", "--input", &input, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v[0];
    assert_eq!(row["xi"], "6/1");
    assert_eq!(row["xi_exact"]["order"], 6);
    assert_eq!(row["xi_exact"]["coeffs"], serde_json::json!(["0", "1"]));
    assert_eq!(row["total_signature"], -2);
}

#[test]
fn float_backend_matches_exact() {
    let inputs = [
        "trefoil.json",
        "torus_2_7.json",
        "structure.json",
        "e1_real_z6.json",
        "e2_complex_z8.json",
    ];
    for name in inputs {
        let input = data(name);
        let exact = milnor(&["signature", "--input", &input]);
        let float = milnor(&["signature", "--input", &input, "--float-tol", "1e-9"]);
        assert_eq!(exact.status.code(), Some(0), "{name}: {}", stderr(&exact));
        assert_eq!(float.status.code(), Some(0), "{name}: {}", stderr(&float));
        let key = |o: &Output| -> Vec<(String, String)> {
            records(o)
                .into_iter()
                .map(|r| (r["xi"].clone(), r["milnor_signature"].clone()))
                .collect()
        };
        assert_eq!(key(&exact), key(&float), "{name}");
    }
}

#[test]
fn float_backend_with_loose_tolerance_handles_jordan_blocks() {
    // a triple root splits by ~1e-5 in double precision
    let input = data("mixed_sum.json");
    let o = milnor(&["signature", "--input", &input, "--float-tol", "1e-4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sigs: Vec<String> = records(&o).into_iter().map(|r| r["milnor_signature"].clone()).collect();
    assert_eq!(sigs, ["-1", "1"]);
}

#[test]
fn elementary_command() {
    let o = milnor(&[
        "elementary", "--n", "1", "--eps", "-1", "--xi", "8/3", "--flavor", "complex", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.get("linking_form").is_some());
    assert!(v.get("structure").is_some());
}

#[test]
fn malformed_json_reports_position() {
    let input = data("malformed.json");
    let o = milnor(&["signature", "--input", &input]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("malformed.json:3:"), "{}", stderr(&o));
}

#[test]
fn schema_error_reports_position() {
    let input = data("bad_schema.json");
    let o = milnor(&["signature", "--input", &input]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("bad_schema.json:2:"), "{}", stderr(&o));
}

#[test]
fn singular_seifert_is_rejected() {
    let input = data("singular_seifert.json");
    let o = milnor(&["signature", "--input", &input]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_arguments_exit_two() {
    let input = data("trefoil.json");
    for args in [
        vec!["signature", "--input", input.as_str(), "--grid", "0"],
        vec!["signature", "--input", input.as_str(), "--grid", "6", "--xi", "6/1"],
        vec!["signature", "--input", input.as_str(), "--xi", "six"],
        vec!["jumps", "--input", input.as_str()],
        vec!["signature", "--input", "/nonexistent/file.json"],
    ] {
        let o = milnor(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}
