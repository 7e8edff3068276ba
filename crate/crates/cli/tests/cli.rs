use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use ensemble_gate::broadening::{broadened_profile, PerturberField};
use ensemble_gate::composite::{infidelity, GateKind};
use ensemble_gate::gate::{compose_cnot_sequence, local_z_cnot_equivalence};
use ensemble_gate::holeburn::{holeburn_sweep, HoleburnConfig};
use ensemble_gate::hyperfine::{cyclic_transition_sim, CyclicConfig};
use ensemble_gate::{GateSchedule, TwoIonHamiltonian};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ensemble-gate"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn read_json(p: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

// serde_json's default float parser may be off in the last bit
fn close(a: &Value, b: f64) -> bool {
    let a = a.as_f64().unwrap();
    (a - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(f64::MIN_POSITIVE)
}

fn csv_rows(p: PathBuf) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn gate_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gate", "--preset", "cnot", "--format", "json", "--out", "g.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(dir.path().join("g.json"));

    let h = TwoIonHamiltonian::new(5.3, -2.1, 1.0).unwrap();
    let u = compose_cnot_sequence(&h, &GateSchedule::new(std::f64::consts::FRAC_PI_4, 0).unwrap());
    let fit = local_z_cnot_equivalence(&u).unwrap();
    assert!(close(&doc["cnot_fidelity"], fit.fidelity));
    assert!((fit.fidelity - 1.0).abs() < 1e-9);
    assert!(doc["delta_residual"].as_f64().unwrap() < 1e-12);
    for r in 0..4 {
        for c in 0..4 {
            assert!(close(&doc["unitary"][r][c][0], u[(r, c)].re));
            assert!(close(&doc["unitary"][r][c][1], u[(r, c)].im));
        }
    }
}

#[test]
fn holeburn_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["holeburn", "--preset", "fig4c", "--eta_stop", "2", "--out", "h.csv"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(dir.path().join("h.csv"));
    assert_eq!(header, ["eta", "N", "survival"]);

    let cfg = HoleburnConfig { gamma: 0.02, eta_grid: ensemble_gate::holeburn::uniform_grid(0.0, 2.0, 0.02), ..HoleburnConfig::default() };
    let lib = holeburn_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), lib.len());
    for (r, l) in rows.iter().zip(&lib) {
        assert_eq!((r[0], r[1] as usize, r[2]), (l.eta, l.cycle, l.survival));
    }
}

#[test]
fn broaden_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["broaden", "--density", "0.5", "--samples", "10000", "--seed", "7", "--out", "b.csv"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(dir.path().join("b.csv"));
    let field = PerturberField::with_mean_count(0.5, 1.0, 200.0, 7).unwrap();
    let lib = broadened_profile(&field, 10_000).unwrap();
    assert_eq!(rows, vec![vec![0.5, lib.fitted_fwhm, lib.ks_distance]]);
}

#[test]
fn composite_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["composite", "--eps_min", "0.01", "--eps_max", "0.2", "--eps_points", "2", "--format", "json", "--out", "c.json"]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("above 1e-6"), "{stdout}");
    let doc = read_json(dir.path().join("c.json"));
    let rows = doc["rows"].as_array().unwrap();
    let eps: Vec<f64> = rows.iter().map(|r| r["epsilon"].as_f64().unwrap()).collect();
    assert_eq!(eps.len(), 3);
    assert!(close(&rows[1]["epsilon"], 0.1));
    for r in rows {
        let e = r["epsilon"].as_f64().unwrap();
        assert!(close(&r["composite_infidelity"], infidelity(GateKind::Composite, e).unwrap()));
        assert!(close(&r["naive_infidelity"], infidelity(GateKind::Naive, e).unwrap()));
    }
    let pb = &doc["point_bound"];
    assert_eq!(pb["met"], Value::Bool(false));
    assert!(pb["composite_infidelity"].as_f64().unwrap() < 2e-6);
}

#[test]
fn hyperfine_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["hyperfine", "--rf_repump", "false", "--format", "json", "--out", "h.json"]);
    assert!(o.status.success());
    let doc = read_json(dir.path().join("h.json"));
    let cfg = CyclicConfig {
        rf_repump: false,
        ground: ensemble_gate::QuadrupoleParams { e: 0.1, ..Default::default() },
        ..CyclicConfig::default()
    };
    let lib = cyclic_transition_sim(&cfg).unwrap();
    assert!(close(&doc["readout"]["photons_emitted"], lib.photons_emitted));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 101);
    assert_eq!(doc["closure"]["max_cross_element"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["kramers"]["one_per_group"], Value::Bool(true));
}

#[test]
fn zero_density_gives_one_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["broaden", "--density", "0", "--out", "z.csv"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("z.csv")).unwrap(), "density,fwhm,ks_distance\n0,0,0\n");
    let summary = String::from_utf8_lossy(&o.stdout);
    assert!(summary.starts_with("broaden: 1 rows -> z.csv"), "{summary}");
}

#[test]
fn unknown_keys_are_rejected_with_a_suggestion() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"experiment": "holeburn", "gamm": 0.1}"#).unwrap();
    let o = run(dir.path(), &["validate", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`gamm`") && err.contains("`gamma`"), "{err}");

    let o = run(dir.path(), &["holeburn", "--config", "bad.json", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("x.csv").exists());

    let o = run(dir.path(), &["holeburn", "--gamm", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--gamma"));
}

#[test]
fn parse_errors_carry_line_context() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{\n  \"gamma\": 0.1,\n  \"dt\": \n}\n").unwrap();
    let o = run(dir.path(), &["validate", "--experiment", "holeburn", "broken.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validate_lists_fig4_parameters() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fig4.json"), r#"{"preset": "fig4b", "branching": 0.5}"#).unwrap();
    let o = run(dir.path(), &["validate", "fig4.json"]);
    assert!(o.status.success());
    let report = String::from_utf8_lossy(&o.stdout);
    assert!(report.starts_with("ok\n"));
    assert!(report.contains("gamma = 0.05 (preset)"));
    assert!(report.contains("branching = 0.5 (file)"));
    assert!(report.contains("dt = 0.7853981633974483"));
    assert!(report.contains("checkpoints = [1,5,20,50]"));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() == 1, "validate must not write outputs");
}

#[test]
fn eu_yso_reports_unit_mapping() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["validate", "--preset", "eu_yso"]);
    assert!(o.status.success());
    let report = String::from_utf8_lossy(&o.stdout);
    assert!(report.contains("10 kHz -> eta = 1"), "{report}");
    assert!(report.contains("500 Hz -> gamma = 0.05"), "{report}");
}

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gate", "--out", "missing/dir/g.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(dir.path(), &["gate", "--dt", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["broaden", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["gate", "--preset", "fig4a"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["hyperfine", "--drive_m", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a member of group A"));
    // overflowing couplings make the optimiser's input non-unitary
    let o = run(dir.path(), &["gate", "--eta", "1e308", "--dt", "1e308"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eta=1e308"));
}

#[test]
fn seeds_control_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = |seed: &'static str, out: &'static str| {
        ["broaden", "--samples", "10000", "--seed", seed, "--format", "json", "--out", out]
    };
    assert!(run(dir.path(), &args("3", "a.json")).status.success());
    assert!(run(dir.path(), &args("3", "b.json")).status.success());
    assert!(run(dir.path(), &args("4", "c.json")).status.success());
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_ne!(read("a.json"), read("c.json"));
}
