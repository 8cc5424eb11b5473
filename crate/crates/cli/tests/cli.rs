use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cat_tomo::fock::coherent_state;
use cat_tomo::grid::AxisSpec;
use cat_tomo::quadrature::{build_table, default_phases, QuadratureTable};
use cat_tomo::wigner::{Convention, WignerGrid};
use cat_tomo::{make_cat, CatSpec, C64};
use serde_json::Value;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn preset(name: &str) -> PathBuf {
    crate_dir().join("presets").join(format!("{name}.toml"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cat-tomo")).args(args).output().expect("binary runs")
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    let mut all = vec!["--out", out.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Structural equality with numbers compared to |a − b| ≤ 1e-9 + 1e-7·|b|.
fn assert_json_close(actual: &Value, expected: &Value, path: &str) {
    match (actual, expected) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() <= 1e-9 + 1e-7 * b.abs(), "{path}: {a} vs golden {b}");
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "{path}: length");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                assert_json_close(x, y, &format!("{path}[{i}]"));
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            let mut ka: Vec<_> = a.keys().collect();
            let mut kb: Vec<_> = b.keys().collect();
            ka.sort();
            kb.sort();
            assert_eq!(ka, kb, "{path}: keys");
            for (k, v) in b {
                assert_json_close(&a[k], v, &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(actual, expected, "{path}"),
    }
}

#[test]
fn presets_match_golden_reports() {
    let cases = [
        ("right-angle", "reconstruct", "reconstruct.json"),
        ("sixty-three", "reconstruct", "reconstruct.json"),
        ("theta-0.2", "reconstruct", "reconstruct.json"),
        ("nbar-10", "reconstruct", "reconstruct.json"),
        ("noise-25", "noise-study", "noise-study.json"),
        ("noise-50", "noise-study", "noise-study.json"),
    ];
    for (name, command, report) in cases {
        let dir = tempfile::tempdir().unwrap();
        let out = run_in(dir.path(), &["--config", preset(name).to_str().unwrap(), command]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        let produced = dir.path().join(report);
        let golden = crate_dir().join("golden").join(format!("{name}.json"));
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::copy(&produced, &golden).unwrap();
        }
        let actual = read_json(&produced);
        assert_eq!(actual["schema"], "cat-tomo.report/v1");
        assert_json_close(&actual, &read_json(&golden), name);
    }
}

#[test]
fn right_angle_reconstruction_finds_the_fringe_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["--config", preset("right-angle").to_str().unwrap(), "reconstruct"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = read_json(&dir.path().join("reconstruct.json"));
    let rec = &report["reconstructed"];
    let u = rec["location"][0].as_f64().unwrap();
    let w = rec["value"].as_f64().unwrap();
    assert!((u - 0.3346).abs() < 5e-4, "{u}");
    assert!((w / -3.16 - 1.0).abs() < 0.03, "{w}");
    assert_eq!(rec["convention"], "paper");
}

#[test]
fn phys_convention_flag_rescales_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset("right-angle");
    let out = run_in(dir.path(), &["--config", cfg.to_str().unwrap(), "--convention", "phys", "reconstruct"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let w = read_json(&dir.path().join("reconstruct.json"))["oracle"]["value"].as_f64().unwrap();
    assert!((w * 2.0 * PI / -3.16 - 1.0).abs() < 0.01, "{w}");
}

#[test]
fn noise_study_at_quarter_error_is_comparable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["--config", preset("noise-25").to_str().unwrap(), "noise-study"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = read_json(&dir.path().join("noise-study.json"));
    let mean = report["minimum"]["mean"].as_f64().unwrap();
    let sd = report["minimum"]["stddev"].as_f64().unwrap();
    assert_eq!(report["samples"].as_array().unwrap().len(), 10);
    let combined = (sd * sd + 0.29 * 0.29).sqrt();
    assert!((mean + 3.08).abs() <= 2.0 * combined, "{mean} ± {sd}");
}

#[test]
fn seed_flag_is_deterministic_and_effective() {
    let cfg = preset("noise-25");
    let mean = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = run_in(dir.path(), &["--config", cfg.to_str().unwrap(), "--seed", seed, "noise-study"]);
        assert!(out.status.success(), "{}", stderr(&out));
        let r = read_json(&dir.path().join("noise-study.json"));
        assert_eq!(r["noise"]["seed"].as_u64().unwrap().to_string(), seed);
        r["minimum"]["mean"].as_f64().unwrap()
    };
    assert_eq!(mean("7").to_bits(), mean("7").to_bits());
    assert_ne!(mean("7"), mean("8"));
}

#[test]
fn ghz_phi_plus_prints_the_expected_state() {
    let out = run(&["ghz", "phi-plus"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("state: (+0.707107+0.000000i)|H,H,45> + (+0.707107+0.000000i)|V,V,135>"), "{text}");
    assert!(text.contains("correlations: perfect"));
    for bell in ["phi-minus", "psi-plus", "psi-minus"] {
        assert!(run(&["ghz", bell]).status.success(), "{bell}");
    }
}

#[test]
fn cat_state_prints_normalized_amplitudes() {
    let out = run(&["--config", preset("right-angle").to_str().unwrap(), "cat-state"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("n,re,im,probability"));
    assert!(text.contains("# norm^2 = 1.000000000000"), "{text}");
    // the even cat has no odd n ≡ 1 (mod 4) population at θ = π/2
    let line = text.lines().find(|l| l.starts_with("1,")).unwrap();
    let p: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
    assert!(p < 1e-25, "{line}");
}

#[test]
fn verify_passes() {
    let out = run(&["verify"]);
    assert!(out.status.success(), "{}{}", stdout(&out), stderr(&out));
    assert_eq!(stdout(&out).matches("PASS").count(), 4);
}

#[test]
fn emitted_csvs_round_trip_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset("sixty-three");
    for command in ["quadrature", "wigner-oracle", "reconstruct"] {
        let out = run_in(dir.path(), &["--config", cfg.to_str().unwrap(), command]);
        assert!(out.status.success(), "{command}: {}", stderr(&out));
    }

    let text = std::fs::read(dir.path().join("quadrature.csv")).unwrap();
    let table = QuadratureTable::read_csv(&text[..]).unwrap();
    let x = AxisSpec::symmetric(6.0, 0.01).unwrap().points().unwrap();
    let cat = make_cat(&CatSpec::even(5f64.sqrt(), 1.11).unwrap(), 50).unwrap();
    assert_eq!(table, build_table(&cat, &default_phases(11), &x).unwrap());
    let mut again = Vec::new();
    table.write_csv(&mut again).unwrap();
    assert_eq!(again, text);
    assert!(text.starts_with(b"phi,x,p\n"));

    for name in ["wigner_oracle.csv", "reconstruction.csv"] {
        let text = std::fs::read(dir.path().join(name)).unwrap();
        let grid = WignerGrid::read_csv(&text[..], Convention::Paper).unwrap();
        let mut again = Vec::new();
        grid.write_csv(&mut again).unwrap();
        assert_eq!(again, text, "{name}");
        assert!(text.starts_with(b"re,im,w\n"));
        assert_eq!(grid.re_axis.len(), 421);
    }
}

#[test]
fn external_table_reconstructs_like_simulated_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset("right-angle");
    assert!(run_in(dir.path(), &["--config", cfg.to_str().unwrap(), "quadrature"]).status.success());
    let table = dir.path().join("quadrature.csv");
    let out = run_in(dir.path(), &["--config", cfg.to_str().unwrap(), "reconstruct", "--table", table.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = read_json(&dir.path().join("reconstruct.json"));
    assert_eq!(report["source"], "file");
    let golden = read_json(&crate_dir().join("golden/right-angle.json"));
    assert_json_close(&report["reconstructed"], &golden["reconstructed"], "reconstructed");
}

fn assert_failure(out: &Output, code: i32, needle: &str) {
    assert_eq!(out.status.code(), Some(code), "{}", stderr(out));
    let err = stderr(out);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with("cat-tomo: ") && err.contains(needle), "{err}");
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("bad.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn malformed_config_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "name = \"x\"\n[cat]\nmean_photons = 5.0\ntheta = [oops\n");
    assert_failure(&run(&["--config", cfg.to_str().unwrap(), "reconstruct"]), 2, "config error");
    assert_failure(&run(&["reconstruct"]), 2, "needs --config");
}

#[test]
fn short_truncation_exits_with_truncation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(preset("right-angle")).unwrap() + "\n[tomography]\nn_max = 10\n";
    let cfg = write_config(dir.path(), &text);
    assert_failure(&run_in(dir.path(), &["--config", cfg.to_str().unwrap(), "reconstruct"]), 3, "truncation");
}

#[test]
fn asymmetric_table_exits_with_symmetry_violation() {
    let dir = tempfile::tempdir().unwrap();
    let x = AxisSpec::symmetric(6.0, 0.01).unwrap().points().unwrap();
    let state = coherent_state(C64::from_polar(2.0, PI / 3.0), 50).unwrap();
    let table = build_table(&state, &default_phases(11), &x).unwrap();
    let path = dir.path().join("tilted.csv");
    table.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    let out = run_in(
        dir.path(),
        &["--config", preset("right-angle").to_str().unwrap(), "reconstruct", "--table", path.to_str().unwrap()],
    );
    assert_failure(&out, 4, "symmetry violation");
}

#[test]
fn boundary_minimum_exits_with_region_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(preset("right-angle"))
        .unwrap()
        .replace("re = [0.05, 0.95]", "re = [0.4, 0.95]");
    let cfg = write_config(dir.path(), &text);
    assert_failure(&run_in(dir.path(), &["--config", cfg.to_str().unwrap(), "reconstruct"]), 5, "boundary");
}
