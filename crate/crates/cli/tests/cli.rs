use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_axibem");

fn small_config(frequencies: &str) -> String {
    format!(
        r#"{{
  "geometry": {{ "type": "cylinder_tube", "a1": 0.009, "a2": 0.011, "l": 0.024 }},
  "material": {{ "sigma": 1.37e6, "mu_r": 1.021 }},
  "coil": {{ "r1": 0.007, "r2": 0.0085, "h": 0.002, "turns": 500, "z0": 0.0 }},
  "frequencies": {frequencies},
  "n_s": 16,
  "order": 1,
  "L0": 4.7405622e-3
}}"#
    )
}

fn write(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("AXIBEM_THREADS");
    if let Some(t) = threads {
        cmd.env("AXIBEM_THREADS", t);
    }
    cmd.output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tube.json", &small_config("[1e3, 1e4, 1e3]"));
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(run(&["sweep", arg(&cfg), "--out", arg(&a)], None).status.code(), Some(0));
    assert_eq!(run(&["sweep", arg(&cfg), "--out", arg(&b), "--threads", "1"], None).status.code(), Some(0));
    let stdout = run(&["sweep", arg(&cfg)], Some("3"));
    assert_eq!(stdout.status.code(), Some(0));
    let (a, b) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, stdout.stdout);
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "frequency_hz,dR_re_ohm,dX_im_ohm,dR_over_X0,dX_over_X0,residual");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], lines[3]);
}

#[test]
fn order_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tube.json", &small_config("[1e4]"));
    let p1 = run(&["sweep", arg(&cfg)], None);
    let p2 = run(&["sweep", arg(&cfg), "--order", "2"], None);
    assert_eq!(p2.status.code(), Some(0));
    assert_ne!(p1.stdout, p2.stdout);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.json");
    let out = run(&["sweep", arg(&missing)], None);
    assert_eq!(out.status.code(), Some(1));

    let bad = write(&dir, "bad.json", &small_config("[1e3, -5.0]"));
    let out = run(&["sweep", arg(&bad)], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frequencies[1]"));

    let garbled = write(&dir, "garbled.json", "{ \"geometry\": ");
    assert_eq!(run(&["sweep", arg(&garbled)], None).status.code(), Some(1));

    let cfg = write(&dir, "tube.json", &small_config("[1e3]"));
    assert_eq!(run(&["sweep", arg(&cfg), "--order", "3"], None).status.code(), Some(1));
    assert_eq!(run(&["sweep", arg(&cfg), "--threads", "0"], None).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(
        run(&["converge", arg(&cfg), "--levels", "8,16"], None).status.code(),
        Some(1)
    );
}

#[test]
fn failed_frequency_exits_with_two_and_keeps_other_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tube.json", &small_config("[1e3, 1e300]"));
    let out = run(&["sweep", arg(&cfg)], None);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(!lines[1].contains("NaN"));
    assert!(lines[2].ends_with("NaN,NaN,NaN,NaN,NaN"));
}

#[test]
fn converge_reports_levels_against_largest() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tube.json", &small_config("[1e4]"));
    let out = run(&["converge", arg(&cfg), "--levels", "8,16,32,64"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let levels: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(levels, ["8", "16", "32"]);
    let errors: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().ends_with(", 0 failed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            let text = fs::read_to_string(&p).unwrap();
            axibem::driver::RunConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            n += 1;
        }
    }
    assert!(n >= 6);
}
