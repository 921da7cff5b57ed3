use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dflux::config::{preset_text, ScenarioConfig};
use dflux::riemann::{WaveFan, WaveKind};
use dflux::ModelLaws;

fn dflux(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dflux")).args(args).current_dir(cwd).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_deterministic_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--preset", "scenario_A2", "--dx", "2e-2", "--stride", "10"];
    for out in ["a", "b"] {
        let o = dflux(&[&args[..], &["--out", out]].concat(), dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 2);
    for name in names {
        let a = fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().next(), Some("t,x,rho,q,h,w,c"));
        assert_eq!(text.lines().count(), 101);
    }
}

#[test]
fn simulate_single_file() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        dflux(&["simulate", "--preset", "scenario_C1", "--dx", "1e-2", "--single-file", "--out", "c1.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("c1.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x,rho,q,h,w,c");
    assert_eq!(lines.len(), 1 + 2 * 200);
    let last: Vec<f64> = lines[400].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 0.5);
}

#[test]
fn riemann_wave_list_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflux(&["riemann", "--preset", "scenario_C1", "--samples", "81", "--out", "rp"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let waves = fs::read_to_string(dir.path().join("rp/waves.txt")).unwrap();
    let fan = WaveFan::parse_wave_list(&ModelLaws::quadratic(), &waves).unwrap();
    assert_eq!(
        fan.kinds(),
        [WaveKind::Rarefaction1, WaveKind::NonClassical, WaveKind::Rarefaction1, WaveKind::Contact2]
    );
    let samples = fs::read_to_string(dir.path().join("rp/samples.csv")).unwrap();
    assert_eq!(samples.lines().next(), Some("nu,h,w,rho,q"));
    assert_eq!(samples.lines().count(), 82);

    let o = dflux(&["riemann", "--preset", "scenario_A1", "--nu-min", "1", "--nu-max", "-1"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn compare_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflux(&["compare", "--preset", "scenario_A2", "--meshes", "2e-2,1e-2"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1][1] < rows[0][1]);
    assert!(rows[0][3].is_nan() && rows[1][3] > 0.0);

    let o = dflux(&["compare", "--preset", "scenario_B1"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("usage error"));
}

#[test]
fn check_prints_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflux(&["check", "--preset", "scenario_A1"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("law validation over 40000 samples: pass"));
    assert!(text.contains("tv_c=5.0000000000000000e-1"));
    assert!(text.contains("shock1") && text.contains("admissible=true"));
    let table: Vec<f64> = text
        .lines()
        .skip_while(|l| *l != "k,D_k")
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(table.len() > 1000 && table.iter().all(|&d| d >= -1e-12));

    let soft = preset_text("scenario_A1").unwrap().replace("gamma = 2.0", "gamma = 0.5");
    let path = write_config(dir.path(), "soft.toml", &soft);
    let o = dflux(&["check", &path], dir.path());
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.contains("genuine nonlinearity"));
    assert_eq!(code(&o) == 0, text.contains("samples: pass"));
}

#[test]
fn config_errors_exit_one_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let broken = preset_text("scenario_A1").unwrap().replace("gamma = 2.0", "gamma = \"two\"");
    let path = write_config(dir.path(), "broken.toml", &broken);
    let o = dflux(&["simulate", &path], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let bad_c = preset_text("scenario_A1").unwrap().replace("values = [1.0, 0.5]", "values = [1.0, -0.5]");
    let path = write_config(dir.path(), "bad_c.toml", &bad_c);
    let o = dflux(&["simulate", &path], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("c_min"));

    let o = dflux(&["simulate", "--preset", "scenario_A1", "--dx", "0.3"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn io_and_numeric_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = dflux(&["simulate", "missing.toml"], dir.path());
    assert_eq!(code(&o), 3);

    fs::write(dir.path().join("blocker"), "").unwrap();
    let o = dflux(&["simulate", "--preset", "scenario_A1", "--dx", "0.1", "--out", "blocker/x"], dir.path());
    assert_eq!(code(&o), 3);

    let o = dflux(
        &["simulate", "--preset", "scenario_A1", "--dx", "0.1", "--cfl", "1e30", "--t-final", "1e30", "--out", "o"],
        dir.path(),
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn table_datum_from_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows: Vec<String> = (0..18).map(|j| format!("[{}, 1.0]", 0.5 + 0.01 * j as f64)).collect();
    rows.extend(["[1.0, 1.0]".to_string(), "[0.7, 0.7]".to_string()]);
    let text = preset_text("scenario_A1")
        .unwrap()
        .replace(
            "kind = \"constant\"\nvariables = \"conserved\"\nstate = [0.4, 0.4]",
            &format!("kind = \"table\"\nvariables = \"invariant\"\ntable = [{}]", rows.join(", ")),
        )
        .replace("dx = 1e-3", "dx = 0.1");
    let config = ScenarioConfig::parse(&text).unwrap();
    assert_eq!(ScenarioConfig::parse(&config.to_toml()).unwrap(), config);
    let path = write_config(dir.path(), "table.toml", &text);
    let o = dflux(&["simulate", &path, "--out", "t"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = fs::read_to_string(dir.path().join("t/snapshot_000000.csv")).unwrap();
    let vacuum: Vec<&str> = first.lines().filter(|l| l.contains(",nan,nan,")).collect();
    assert_eq!(vacuum.len(), 2);
    assert!(vacuum[0].contains(",0.0000000000000000e0,0.0000000000000000e0,nan,nan,"));
    let o = dflux(&["simulate", &path, "--dx", "0.05", "--out", "t2"], dir.path());
    assert_eq!(code(&o), 1);
}
