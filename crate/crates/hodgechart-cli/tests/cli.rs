//! End-to-end runs of the shipped scenarios through the binary.

use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn scenario(name: &str) -> String {
    format!("{}/../../scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(sub: &str, path: &str, extra: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hodgechart"))
        .arg(sub)
        .arg("--scenario")
        .arg(path)
        .args(extra)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("stdout is UTF-8"),
        String::from_utf8(out.stderr).expect("stderr is UTF-8"),
    )
}

/// Run and parse the JSON report, requiring a clean stderr.
fn report(sub: &str, name: &str, extra: &[&str]) -> (i32, Value) {
    let (code, stdout, stderr) = run(sub, &scenario(name), extra);
    assert!(stderr.is_empty(), "unexpected stderr: {stderr}");
    (code, serde_json::from_str(&stdout).expect("report parses"))
}

#[test]
fn uniformizing_period_map_certifies_harmonic() {
    let (code, rep) = report("rank1", "rank1-uniformizing.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(rep["verdict"], Value::Bool(true));
    assert_eq!(rep["results"]["isotrivial"], Value::Bool(false));
    for tensor in rep["results"]["report"]["tensors"].as_array().unwrap() {
        assert!(tensor["sup"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn bulged_metric_fails_with_an_f11_witness() {
    let (code, rep) = report("harmonic-check", "rank1-negative-control.json", &[]);
    assert_eq!(code, 2);
    assert_eq!(rep["verdict"], Value::Bool(false));
    let curvature = &rep["results"]["report"]["curvature"];
    let f11 = curvature["tensors"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["label"] == "F11")
        .expect("F11 entry");
    assert!(f11["sup"].as_f64().unwrap() > 1e-3);
    assert!(f11["worst"].is_object(), "witness point reported");
}

#[test]
fn henon_composite_doubles_degree_each_power() {
    let (code, rep) = report("autgroup", "rho2-degree-growth.json", &[]);
    assert_eq!(code, 0);
    let degrees: Vec<u64> = rep["results"]["composite_degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_u64().unwrap())
        .collect();
    assert_eq!(degrees, vec![2, 4, 8]);

    // Max Jacobian degree per word length never decreases.
    let mut per_len = std::collections::BTreeMap::new();
    for row in rep["results"]["table"].as_array().unwrap() {
        let len = row["length"].as_u64().unwrap();
        let deg = row["jacobian_degree"].as_u64().unwrap();
        let slot = per_len.entry(len).or_insert(0);
        *slot = deg.max(*slot);
    }
    let maxima: Vec<u64> = per_len.into_values().collect();
    assert!(maxima.windows(2).all(|w| w[0] <= w[1]), "{maxima:?}");
}

#[test]
fn square_root_loop_reports_minus_one_monodromy() {
    let (code, rep) = report("monodromy", "monodromy-sqrt.json", &[]);
    assert_eq!(code, 0);
    let m00 = rep["results"]["matrix"][0][0].as_array().unwrap();
    assert!((m00[0].as_f64().unwrap() + 1.0).abs() < 1e-8);
    assert!(m00[1].as_f64().unwrap().abs() < 1e-8);
    assert!(rep["results"]["fit_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn picard_painleve_loop_transports_every_sample() {
    let (code, rep) = report("monodromy", "painleve-vi.json", &[]);
    assert_eq!(code, 0);
    let samples = rep["results"]["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 2);
    for sample in samples {
        assert!(sample["output"].is_array(), "transported: {sample}");
    }
    // Quadratic right-hand side: no linear matrix to fit.
    assert!(rep["results"]["matrix"].is_null());
}

#[test]
fn forward_transform_reports_all_four_operators() {
    let (code, rep) = report("simpson-forward", "simpson-forward-uniformizing.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(rep["verdict"], Value::Bool(true));
    for key in ["flat_u", "chern_c", "nabla_c", "nabla_cbar"] {
        assert!(rep["results"][key].is_object(), "missing {key}");
    }
}

#[test]
fn schema_violations_name_the_offending_field() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"{{"schema_version": 1, "kind": "rank1", "tau": {{"terms": []}},
           "domain": {{"center": [0, 2], "halfwidth": "wide", "n": 3}}, "tol": 1e-8}}"#
    )
    .unwrap();
    let (code, _, stderr) = run("rank1", file.path().to_str().unwrap(), &[]);
    assert_eq!(code, 1);
    assert!(stderr.contains("domain.halfwidth"), "stderr: {stderr}");
}

#[test]
fn kind_and_subcommand_must_agree() {
    let (code, _, stderr) = run("chern", &scenario("rank1-uniformizing.json"), &[]);
    assert_eq!(code, 1);
    assert!(stderr.contains("does not match"), "stderr: {stderr}");
}

#[test]
fn reports_are_byte_identical_modulo_timings() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timings");
        serde_json::to_string(&v).unwrap()
    };
    let (_, a) = report("autgroup", "rho2-degree-growth.json", &[]);
    let (_, b) = report("autgroup", "rho2-degree-growth.json", &[]);
    assert_eq!(strip(a), strip(b));
}

#[test]
fn echoed_scenarios_reproduce_the_run() {
    let (code, rep) = report("rank1", "rank1-uniformizing.json", &["--grid", "3"]);
    assert_eq!(code, 0);
    assert_eq!(rep["scenario"]["domain"]["n"], Value::from(3));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    serde_json::to_writer(&mut file, &rep["scenario"]).unwrap();
    file.flush().unwrap();
    let (code, stdout, stderr) = run("rank1", file.path().to_str().unwrap(), &[]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let rerun: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(rep["results"], rerun["results"]);
}

#[test]
fn csv_export_sweeps_the_grid() {
    let (code, stdout, stderr) = run(
        "rank1",
        &scenario("rank1-uniformizing.json"),
        &["--format", "csv"],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        lines[0],
        "tensor,i,j,component,s0_re,s0_im,t0_re,t0_im,t1_re,t1_im,value_re,value_im"
    );
    // 5x5 base lattice, two rings of 3: 225 points, one F11 pair, two
    // components. The antisymmetric tensors have no pairs when m = 1.
    assert_eq!(lines.len(), 1 + 225 * 2);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 12);
        assert_eq!(cells[0], "F11");
        for cell in &cells[4..] {
            cell.parse::<f64>().expect("numeric cell");
        }
    }
}

#[test]
fn csv_needs_a_grid_sweep() {
    let (code, _, stderr) = run(
        "monodromy",
        &scenario("monodromy-sqrt.json"),
        &["--format", "csv"],
    );
    assert_eq!(code, 1);
    assert!(stderr.contains("no grid sweep"), "stderr: {stderr}");
}
