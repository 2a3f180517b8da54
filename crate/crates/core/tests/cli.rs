mod common;

use std::fs;

use h5geo::classify::profile_from_charges;
use h5geo::cli::run;
use h5geo::cli::sweep::{run_sweep, SweepConfig};
use h5geo::cli::table::read_csv;

fn h5(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut all = vec!["h5geo"];
    all.extend_from_slice(args);
    let code = run(all, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn tmp(name: &str) -> std::path::PathBuf {
    let d = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let (cols, rows) = read_csv(csv).unwrap();
    let i = cols.iter().position(|c| c == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

const CASE_D: [&str; 12] = [
    "--c0", "1", "--c1", "0.5", "--c2", "-0.25", "--c3", "-0.25", "--r0", "1.2", "--sign-pr", "-1",
];

#[test]
fn classify_reports_the_case() {
    let (code, out, _) = h5(&["classify", "--c0", "2", "--c1", "0.5", "--c2", "0.1", "--c3", "-0.1"]);
    assert_eq!(code, 0);
    assert!(out.contains("case      a"), "{out}");
    let (code, out, _) = h5(&["classify", "--c0", "3", "--c1", "0.2", "--c2", "0.3", "--c3", "0.2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["case"], "g");
}

#[test]
fn exit_codes() {
    // malformed or inadmissible input
    assert_eq!(h5(&["classify", "--c0", "0", "--c1", "0", "--c2", "0", "--c3", "0"]).0, 2);
    assert_eq!(h5(&["classify", "--c0", "4", "--c1", "4", "--c2", "0", "--c3", "0"]).0, 2);
    assert_eq!(h5(&["classify", "--c0", "2"]).0, 2);
    assert_eq!(h5(&["nonsense"]).0, 2);
    assert_eq!(h5(&["figures", "--which", "fig-nothing"]).0, 2);
    assert_eq!(h5(&["trace", "--c0", "2", "--c1", "0.5", "--c2", "0.1", "--c3", "-0.1", "--r0", "0.5"]).0, 2);
    // validation
    assert_eq!(h5(&["validate"]).0, 0);
    let (code, out, _) = h5(&["validate", "--tol", "1e-15"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"), "report is still printed");
    // the integrator leaves the chart: r reaches 0
    let (code, _, err) = h5(&["trace", "--c0", "1", "--c1", "0", "--c2", "0", "--c3", "0", "--r0", "0.3", "--sign-pr", "-1"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
}

#[test]
fn output_is_deterministic_and_parses() {
    let args = ["trace", "--c0", "3", "--c1", "0.2", "--c2", "0.3", "--c3", "0.2", "--r0", "0.8", "--samples", "51"];
    let (c1, a, _) = h5(&args);
    let (c2, b, _) = h5(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let (cols, rows) = read_csv(&a).unwrap();
    assert_eq!(cols.len(), 14);
    assert_eq!(rows.len(), 51);
    // Quadrature CSV agrees with the trace CSV.
    let mut q = args.to_vec();
    q[0] = "quadrature";
    let (code, qa, _) = h5(&q);
    assert_eq!(code, 0);
    for name in ["r", "theta1", "theta2", "theta3", "p_r"] {
        assert!(common::sup_dist(&column(&a, name), &column(&qa, name)) < 1e-7, "{name}");
    }
    assert!(qa.lines().next().unwrap().starts_with('#'));
}

#[test]
fn json_and_file_output() {
    let d = tmp("json");
    let path = d.join("trace.json");
    let (code, out, _) = h5(&[
        "quadrature", "--c0", "3", "--c1", "0.2", "--c2", "0.3", "--c3", "0.2", "--r0", "0.8", "--samples", "11",
        "--format", "json", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.to_string().contains("theta1"));
}

#[test]
fn case_d_is_a_hyperbola_in_the_square_radius() {
    let mut args = vec!["quadrature"];
    args.extend_from_slice(&CASE_D);
    args.extend_from_slice(&["--t-end", "6", "--samples", "301"]);
    let (code, out, _) = h5(&args);
    assert_eq!(code, 0);
    let p = profile_from_charges(&common::case_d()).unwrap();
    let alpha2 = p.alpha().unwrap().powi(2);
    let (t, r) = (column(&out, "t"), column(&out, "r"));
    // incoming from 1.2: r² = α² + A (t − t*)² with r(0)² = 1.44
    let t_star = ((1.44 - alpha2) / p.a).sqrt();
    for (t, r) in t.iter().zip(&r) {
        let want = alpha2 + p.a * (t - t_star).powi(2);
        assert!((r * r - want).abs() < 1e-10 * (1.0 + want), "t={t}");
    }
}

#[test]
fn bounded_orbits_are_continuous_across_turning_points() {
    let (code, out, _) = h5(&[
        "quadrature", "--c0", "2.5", "--c1", "0.91", "--c2", "0.53", "--c3", "0.39", "--r0", "1.0", "--t-end", "20",
        "--samples", "4001",
    ]);
    assert_eq!(code, 0);
    let (r, pr, branch) = (column(&out, "r"), column(&out, "p_r"), column(&out, "branch"));
    let h = 20.0 / 4000.0;
    let mut turns = 0;
    for i in 1..r.len() {
        assert!((r[i] - r[i - 1]).abs() < 2.0 * h, "jump at sample {i}");
        assert!((pr[i] - pr[i - 1]).abs() < 0.1, "p_r jump at sample {i}");
        if branch[i] != branch[i - 1] {
            turns += 1;
            assert_eq!(branch[i] - branch[i - 1], 1.0);
        }
    }
    assert!(turns >= 4);
}

#[test]
fn figures_write_their_files() {
    let d = tmp("figures");
    let (code, out, _) = h5(&["figures", "--which", "fig-tr", "--out-dir", d.to_str().unwrap(), "--points", "50"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
    for a in ["-1", "0", "0.5", "2"] {
        let text = fs::read_to_string(d.join(format!("fig-tr_A{a}.csv"))).unwrap();
        assert_eq!(read_csv(&text).unwrap().1.len(), 50);
    }
    let (code, _, _) = h5(&["figures", "--which", "fig-example", "--out-dir", d.to_str().unwrap(), "--samples", "21"]);
    assert_eq!(code, 0);
    assert!(d.join("fig-example.csv").exists());
}

#[test]
fn sweep_is_independent_of_the_thread_count() {
    let d = tmp("sweep");
    let cfg_json = serde_json::json!({
        "t_end": 4.0,
        "samples": 41,
        "runs": [
            { "name": "g", "charges": { "c0": 3.0, "c1": 0.2, "c2": 0.3, "c3": 0.2, "c4": 0.5 }, "r0": 0.8 },
            { "name": "bad", "charges": { "c0": 4.0, "c1": 4.0, "c2": 0.0, "c3": 0.0, "c4": 0.5 }, "r0": 1.0 }
        ],
        "grid": { "c0": [1.5, 2.0], "c1": [0.5], "c2": [0.1], "c3": [-0.1, 0.1], "r0": [1.5] }
    });
    let mut cfg: SweepConfig = serde_json::from_value(cfg_json.clone()).unwrap();
    cfg.out_dir = d.join("one");
    let a = run_sweep(&cfg, 1).unwrap();
    cfg.out_dir = d.join("four");
    let b = run_sweep(&cfg, 4).unwrap();
    assert_eq!(a.len(), 6);
    assert_eq!(a, b);
    assert_eq!(a[1].status, "error");
    assert!(a.iter().filter(|r| r.name != "bad").all(|r| r.status == "ok"), "{a:#?}");
    for r in &a {
        if let Some(f) = &r.file {
            assert_eq!(fs::read(d.join("one").join(f)).unwrap(), fs::read(d.join("four").join(f)).unwrap());
        }
    }
    let index: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("one/index.json")).unwrap()).unwrap();
    assert_eq!(index.as_array().unwrap().len(), 6);

    // Through the command line: one failing run makes the exit code 1.
    let path = d.join("cfg.json");
    fs::write(&path, cfg_json.to_string()).unwrap();
    let (code, out, _) = h5(&[
        "sweep", "--config", path.to_str().unwrap(), "--out-dir", d.join("cli").to_str().unwrap(), "--threads", "2",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("index:"));
}
