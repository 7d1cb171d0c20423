use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn crn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn network(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("networks")
        .join(name)
        .display()
        .to_string()
}

fn read_dir_sorted(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (PathBuf::from(p.file_name().unwrap()), bytes)
        })
        .collect();
    files.sort();
    files
}

/// Runs twice into fresh directories and requires identical files.
fn deterministic(args: &[&str]) -> Vec<(PathBuf, Vec<u8>)> {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let mut full: Vec<&str> = args.to_vec();
            let out = dir.path().display().to_string();
            full.extend(["--out", &out]);
            let o = crn(&full);
            assert!(
                o.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
            read_dir_sorted(dir.path())
        })
        .collect();
    assert_eq!(runs[0], runs[1], "{args:?} is not deterministic");
    runs.into_iter().next().unwrap()
}

fn json(files: &[(PathBuf, Vec<u8>)], name: &str) -> serde_json::Value {
    let (_, bytes) = files
        .iter()
        .find(|(p, _)| p == Path::new(name))
        .expect(name);
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn info_reports_structure() {
    let o = crn(&["info", &network("brusselator_homogenised.crn")]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["is_homogeneous"], true);
    assert_eq!(v["conservation_laws"], serde_json::json!([["1", "1", "1"]]));
    assert_eq!(
        crn(&["info", &network("brusselator_homogenised.crn")]).stdout,
        o.stdout
    );
}

#[test]
fn homogenise_and_lift() {
    let files = deterministic(&["homogenise", &network("lva.crn"), "--eps", "0.001"]);
    let text = String::from_utf8(
        files
            .iter()
            .find(|(p, _)| p == Path::new("lifted.crn"))
            .unwrap()
            .1
            .clone(),
    )
    .unwrap();
    assert!(text.contains("2 X + Z -> 3 X ; k = 0.001"), "{text}");
    assert!(text.contains("Y -> Z"), "{text}");
    let side = json(&files, "lift.json");
    assert_eq!(side["alpha"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));

    let files = deterministic(&["lift", &network("lotka.crn"), "--c-vector", "-1,-1"]);
    let text = String::from_utf8(
        files
            .iter()
            .find(|(p, _)| p == Path::new("lifted.crn"))
            .unwrap()
            .1
            .clone(),
    )
    .unwrap();
    assert!(
        text.contains("X + Z -> 2 X") && text.contains("Y -> Z"),
        "{text}"
    );
}

#[test]
fn invalid_lift_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = crn(&[
        "lift",
        &network("lotka.crn"),
        "--c-vector",
        "1,-2",
        "--r",
        "0,0,0",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.crn");
    std::fs::write(&bad, "X -> -> Y\n").unwrap();
    assert_eq!(crn(&["info", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        crn(&["equilibria", &network("schlogl.crn"), "--k", "6,x"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn numeric_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    // the Brusselator's stable equilibrium has no periodic orbit
    let o = crn(&[
        "orbit",
        &network("brusselator.crn"),
        "--k",
        "1,1,1,1",
        "--x0",
        "1.2,1",
        "--period",
        "6",
        "--out",
        &out,
    ]);
    assert_eq!(
        o.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn equilibria_on_a_class() {
    let files = deterministic(&[
        "equilibria",
        &network("brusselator_homogenised.crn"),
        "--class",
        "6",
        "--box",
        "0.01,5.9",
        "--grid",
        "30",
    ]);
    let v = json(&files, "equilibria.json");
    let eqs = v["equilibria"].as_array().unwrap();
    assert_eq!(eqs.len(), 2);
    let stabilities: Vec<&str> = eqs
        .iter()
        .map(|e| e["stability"].as_str().unwrap())
        .collect();
    assert_eq!(stabilities, ["saddle", "stable"]);
    for e in eqs {
        let total: f64 = e["point"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .sum();
        assert!((total - 6.0).abs() < 1e-12);
    }
}

#[test]
fn simulate_and_orbit() {
    let files = deterministic(&[
        "simulate",
        &network("lotka.crn"),
        "--x0",
        "2,0.5",
        "--t-end",
        "10",
    ]);
    let csv = String::from_utf8(
        files
            .iter()
            .find(|(p, _)| p == Path::new("trajectory.csv"))
            .unwrap()
            .1
            .clone(),
    )
    .unwrap();
    assert!(csv.starts_with("t,x1,x2\n0.0,2.0,0.5\n"));
    assert_eq!(json(&files, "trajectory.json")["t_end"], 10.0);

    let files = deterministic(&[
        "orbit",
        &network("brusselator.crn"),
        "--x0",
        "2,2",
        "--period",
        "7",
    ]);
    let orbit = &json(&files, "orbit.json")["orbit"];
    assert_eq!(orbit["stability"], "stable");
    assert!((orbit["period"].as_f64().unwrap() - 7.1569).abs() < 1e-3);
}

#[test]
fn scans() {
    let files = deterministic(&[
        "hopf-scan",
        &network("lva.crn"),
        "--param",
        "4",
        "--range",
        "0.3,0.7",
        "--x0",
        "0.3,0.21",
    ]);
    let points = json(&files, "hopf.json")["points"]
        .as_array()
        .unwrap()
        .clone();
    assert_eq!(points.len(), 1);
    assert!((points[0]["parameters"]["k4"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let files = deterministic(&[
        "fold-scan",
        &network("schlogl.crn"),
        "--param",
        "1",
        "--range",
        "6,7",
        "--box",
        "0.5,1.5",
        "--grid",
        "5",
    ]);
    let points = json(&files, "fold.json")["points"]
        .as_array()
        .unwrap()
        .clone();
    assert_eq!(points.len(), 1);
    let x = points[0]["state"][0].as_f64().unwrap();
    assert!((x - (2.0 - 1.0 / 3f64.sqrt())).abs() < 1e-8);
}

#[test]
fn brusselator_diagram_outputs() {
    let files = deterministic(&[
        "brusselator-diagram",
        "--k1",
        "2",
        "--k2",
        "4",
        "--c",
        "6",
        "--grid",
        "40",
    ]);
    let names: Vec<_> = files.iter().map(|(p, _)| p.display().to_string()).collect();
    assert_eq!(names, ["fig1.csv", "fig2.csv", "fig2_points.json"]);
    let points = json(&files, "fig2_points.json");
    assert_eq!(points["BT"]["k3"], 9.0);
    assert_eq!(points["BT"]["k4"], 3.0);
    let fig1 = String::from_utf8(files[0].1.clone()).unwrap();
    assert!(fig1.starts_with("a,b,sign_P,on_H_boundary\n"));
}
