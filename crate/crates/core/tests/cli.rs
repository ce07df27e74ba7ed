use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chemdyn::config::Config;
use chemdyn::models::ModelKind;
use chemdyn::workflow::{self, RunOptions, Shots};
use serde_json::Value;
use tempfile::TempDir;

fn chemdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chemdyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eigen_writes_two_state_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = chemdyn(&["eigen", "--model", "double-well", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(listing(dir.path()), ["eigen.json", "eigen.run.json"]);
    let eigen = json(&dir.path().join("eigen.json"));
    assert_eq!(eigen["energies"].as_array().unwrap().len(), 2);
    let run = json(&dir.path().join("eigen.run.json"));
    assert_eq!(run["command"], "eigen");
    assert_eq!(run["config"]["model"], "double-well");
}

#[test]
fn sampled_runs_repeat_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("dw.toml");
    fs::write(
        &config,
        "model = \"double-well\"\n[eigen]\nmethod = \"vqd\"\nmax_iterations = 20\nrestarts = 0\n",
    )
    .unwrap();
    let mut contents = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let res = chemdyn(&[
            "eigen",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--shots",
            "2000",
            "--seed",
            "11",
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        contents.push(fs::read(out.join("eigen.json")).unwrap());
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn schema_errors_name_the_offending_key() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "model = \"helium\"\n[dynamics]\nstep_fs = \"fast\"\n").unwrap();
    let res = chemdyn(&[
        "evolve-exact",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("dynamics.step_fs"), "{stderr}");
    assert_eq!(listing(dir.path()), ["bad.toml"]);

    let res = chemdyn(&["resources", "--model", "helium", "--shots", "0"]);
    assert!(!res.status.success());
}

#[test]
fn failed_runs_leave_no_outputs_behind() {
    let dir = TempDir::new().unwrap();
    // a directory in the manifest's place makes the final write fail
    fs::create_dir(dir.path().join("eigen.run.json")).unwrap();
    let opts = RunOptions::new(Config::default_for(ModelKind::DoubleWell), dir.path().to_path_buf());
    assert!(workflow::run(workflow::Command::Eigen, &opts).is_err());
    assert_eq!(listing(dir.path()), ["eigen.run.json"]);

    let missing = TempDir::new().unwrap();
    let mut cfg = Config::default_for(ModelKind::Helium);
    cfg.spectrum.input = Some(missing.path().join("absent.csv").to_string_lossy().into_owned());
    let opts = RunOptions::new(cfg, missing.path().to_path_buf());
    assert!(workflow::run(workflow::Command::Spectrum, &opts).is_err());
    assert!(listing(missing.path()).is_empty());
}

#[test]
fn helium_exact_run_feeds_the_spectrum() {
    let dir = TempDir::new().unwrap();
    let opts = RunOptions::new(Config::default_for(ModelKind::Helium), dir.path().to_path_buf());
    let exact = workflow::run(workflow::Command::EvolveExact, &opts).unwrap();
    assert!(exact.outputs.iter().any(|p| p.ends_with("exact.csv")));
    let trace = workflow::read_dipole_csv(&dir.path().join("exact.csv")).unwrap();
    assert_eq!(trace.0.len(), 243);
    assert!(trace.1[0].abs() < 1e-10);

    workflow::run(workflow::Command::Spectrum, &opts).unwrap();
    let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("harmonic_order,omega_au,intensity,normalized"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let peak = rows
        .iter()
        .filter(|r| (0.5..1.5).contains(&r[0]))
        .map(|r| r[3])
        .fold(0.0, f64::max);
    assert!((peak - 1.0).abs() < 1e-12);
}

#[test]
fn resources_lists_every_method() {
    let dir = TempDir::new().unwrap();
    let opts = RunOptions {
        shots: Shots::Exact,
        ..RunOptions::new(Config::default_for(ModelKind::Helium), dir.path().to_path_buf())
    };
    workflow::run(workflow::Command::Resources, &opts).unwrap();
    let estimates = json(&dir.path().join("estimates.json"));
    let list = estimates.as_array().unwrap();
    assert_eq!(list.len(), 3);
    for e in list {
        assert_eq!(e["dims"], 2);
        assert_eq!(e["points"], 8);
    }
    assert_eq!(
        list[0]["f_kinetic"].as_u64().unwrap(),
        2 * 64 * list[0]["n_theta"].as_u64().unwrap()
    );
}

#[test]
fn vqa_and_subspace_tables_have_expected_columns() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("short.toml");
    fs::write(&config, "model = \"double-well\"\n[dynamics]\nduration_fs = 2.0\n").unwrap();
    let out = dir.path().join("o");
    for cmd in ["evolve-subspace", "evolve-vqa"] {
        let res = chemdyn(&[
            cmd,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let sub = fs::read_to_string(out.join("subspace.csv")).unwrap();
    assert!(
        sub.starts_with("time_fs,P_0,P_1,re_c_0,re_c_1,im_c_0,im_c_1,dipole\n"),
        "{sub}"
    );
    assert_eq!(sub.lines().count(), 1 + 21);
    let vqa = fs::read_to_string(out.join("vqa.csv")).unwrap();
    let header = vqa.lines().next().unwrap();
    assert!(header.starts_with("time_fs,energy,P_0,P_1,dipole,theta_0"), "{header}");
    let last: Vec<f64> = vqa
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((last[0] - 2.0).abs() < 1e-9);
}
