use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(sub: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{sub}.toml"));
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_magqrm"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir)
        .args(extra)
        .output()
        .unwrap()
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn model(g_r: &str, g_cr: &str) -> String {
    format!("[model]\nomega_q = \"1 wq\"\ng_r = \"{g_r} wq\"\ng_cr = \"{g_cr} wq\"\n")
}

#[test]
fn pert_breakdown() {
    let dir = TempDir::new().unwrap();
    let out = run("pert", &model("0.1", "0.1"), dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(dir.path(), "pert.json");
    assert!((v["total"].as_f64().unwrap() - 0.84375e-5).abs() < 1e-20);
    assert!((v["omega0_crossing"].as_f64().unwrap() - 2.985).abs() < 1e-12);
    assert_eq!(v["g3"].as_f64().unwrap(), 0.0);
    for key in ["a_c", "b_d", "e", "f", "g"] {
        assert!(v["g5_families"][key].is_f64());
    }

    let out = run("pert", &model("0.1", "0.2"), dir.path(), &[]);
    assert!(out.status.success());
    assert!(
        json(dir.path(), "pert.json")["total"]
            .as_f64()
            .unwrap()
            .abs()
            < 1e-18
    );
}

#[test]
fn pert_singularity_exits_4() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{}omega0 = \"1 wq\"\n", model("0.1", "0.1"));
    let out = run("pert", &cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ω0"));
}

#[test]
fn malformed_config_exits_2_naming_the_key() {
    let dir = TempDir::new().unwrap();
    let out = run(
        "pert",
        "[model]\ng_r = \"0.1 wq\"\ng_cr = \"0.1 wq\"\ng_rr = \"1 wq\"\n",
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g_rr"));

    let out = run(
        "pert",
        "[model]\ng_r = \"0.1\"\ng_cr = \"0.1 wq\"\n",
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g_r"));
}

const SPECTRUM_RUN: &str =
    "[run]\nomega0_min = \"0.5 wq\"\nomega0_max = \"3.5 wq\"\nn_points = 41\nn_levels = 16\n";

#[test]
fn spectrum_outputs_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{}{SPECTRUM_RUN}", model("0.1", "0.1"));
    let out = run("spectrum", &cfg, dir.path(), &["--threads", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 17);
    assert_eq!(header[0], "omega0");
    assert_eq!(header[16], "E_15");
    let grid: Vec<f64> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(grid.len(), 41);
    assert!(grid.windows(2).all(|w| w[0] < w[1]));

    let gaps = json(dir.path(), "gaps.json");
    let kinds: Vec<(&str, &str)> = gaps
        .as_array()
        .unwrap()
        .iter()
        .map(|g| (g["name"].as_str().unwrap(), g["kind"].as_str().unwrap()))
        .collect();
    assert_eq!(
        kinds,
        [
            ("one_excitation", "anticrossing"),
            ("two_excitation", "crossing"),
            ("three_excitation", "anticrossing")
        ]
    );

    let gaps_bytes = std::fs::read(dir.path().join("gaps.json")).unwrap();
    let again = TempDir::new().unwrap();
    let out = run("spectrum", &cfg, again.path(), &["--threads", "1"]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(again.path().join("spectrum.csv")).unwrap(),
        csv
    );
    assert_eq!(
        std::fs::read(again.path().join("gaps.json")).unwrap(),
        gaps_bytes
    );
}

#[test]
fn spectrum_without_counter_rotation_has_three_excitation_crossing() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{}{SPECTRUM_RUN}", model("0.1", "0"));
    let out = run("spectrum", &cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let gaps = json(dir.path(), "gaps.json");
    let three = gaps
        .as_array()
        .unwrap()
        .iter()
        .find(|g| g["name"] == "three_excitation")
        .unwrap();
    assert_eq!(three["kind"], "crossing");
    assert!((three["omega0_star"].as_f64().unwrap() - 3.0).abs() < 0.05);
}

#[test]
fn spectrum_convergence_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = "[model]\nn_qubits = 1\nn_max = 2\ng_r = \"0.3 wq\"\ng_cr = \"0.3 wq\"\n[run]\nn_points = 5\nn_levels = 4\n";
    let out = run("spectrum", cfg, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn dynamics_at_the_anticrossing() {
    let dir = TempDir::new().unwrap();
    let out = run("dynamics", &model("0.1", "0.1"), dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = json(dir.path(), "dynamics_summary.json");
    let expected = std::f64::consts::PI / 0.84375e-5;
    let period = s["period"].as_f64().unwrap();
    assert!((period - expected).abs() / expected < 0.1, "{period}");
    assert!(s["fidelity"].as_f64().unwrap() > 0.98);

    let csv = std::fs::read_to_string(dir.path().join("dynamics.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,n_magnon,p_q1,p_q2,p_q3,p_eee,fidelity"
    );
    let p_eee: Vec<f64> = lines
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert!(p_eee.len() >= 2048);
    assert!(p_eee.iter().cloned().fold(0.0, f64::max) > 0.9);
    assert!(p_eee[0] < 1e-6);
}

#[test]
fn dynamics_without_coupling_is_constant() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{}[run]\nt_max = 500.0\nn_times = 64\n", model("0", "0"));
    let out = run("dynamics", &cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("dynamics.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 64);
    for row in &rows {
        for (c, (a, b)) in row.iter().zip(&rows[0]).enumerate().skip(1) {
            assert!((a - b).abs() < 1e-12, "column {c}");
        }
    }
    let s = json(dir.path(), "dynamics_summary.json");
    assert!(s["period"].is_null());
}

#[test]
fn fit_reports_all_coefficient_sets() {
    let dir = TempDir::new().unwrap();
    let cfg = "[model]\nn_max = 6\ng_r = \"0.1 wq\"\ng_cr = \"0.1 wq\"\n\
               [run]\ncheck_convergence = false\n\
               gr_grid = [\"0.06 wq\", \"0.09 wq\", \"0.12 wq\"]\n\
               gcr_grid = [\"0.06 wq\", \"0.09 wq\", \"0.12 wq\"]\n";
    let out = run("fit", cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(dir.path(), "fit.json");
    assert_eq!(v["reference"]["c1"].as_f64().unwrap(), 1.0);
    assert_eq!(v["perturbative"]["c2"].as_f64().unwrap(), -0.28125);
    assert_eq!(v["points"].as_array().unwrap().len(), 9);
    let c1 = v["c1"].as_f64().unwrap();
    assert!((0.9..=1.3).contains(&c1), "{c1}");
}

fn material(k_x: &str, k_y: &str) -> String {
    format!(
        "[material]\nexchange = \"1 meV\"\nspin = 0.5\nk_x = \"{k_x} meV\"\nk_y = \"{k_y} meV\"\nk_z = \"0 meV\"\n\
         zeeman = \"0.1 meV\"\nn_sites = 500\nlinear_size = 8\n\
         [coupling]\nj_int = \"10 meV\"\nn_int = 100\npsi2 = 0.002\n"
    )
}

#[test]
fn estimate_reports_units_and_assumptions() {
    let dir = TempDir::new().unwrap();
    let out = run("estimate", &material("0.05", "0.05"), dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(dir.path(), "estimate.json");
    assert_eq!(v["units"], "meV");
    assert_eq!(v["b"].as_f64().unwrap(), 0.0);
    assert_eq!(v["r"].as_f64().unwrap(), 0.0);
    let g = v["g"].as_f64().unwrap();
    assert!((v["g_ghz"].as_f64().unwrap() - g * 241.799).abs() < 1e-9);
    assert!(!v["assumptions"].as_array().unwrap().is_empty());
}

#[test]
fn unstable_mode_exits_3() {
    let dir = TempDir::new().unwrap();
    let out = run("estimate", &material("2", "-2"), dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains(">"));
}
