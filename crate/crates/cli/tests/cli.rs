//! End-to-end runs of the `zeta-strips` binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeta-strips"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn compute_then_warm_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let first = run(&["compute", "--t-max", "100", "--out", &out]);
    assert!(first.status.success(), "{}", stderr(&first));
    let text = stdout(&first);
    let strips: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("strips="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(strips >= 10, "{text}");
    assert!(text.contains("computed=gram,boundaries,strips,zeros"));
    for f in ["gram.csv", "strips.csv", "zeros.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let strips_csv = std::fs::read(dir.path().join("strips.csv")).unwrap();

    let second = run(&["compute", "--t-max", "100", "--out", &out]);
    assert!(second.status.success());
    let text = stdout(&second);
    assert!(text.contains("loaded=gram,boundaries,strips,zeros"), "{text}");
    assert!(text.lines().any(|l| l == "computed="), "{text}");
    assert_eq!(std::fs::read(dir.path().join("strips.csv")).unwrap(), strips_csv);
}

#[test]
fn strips_csv_schema_and_number_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert!(run(&["compute", "--t-max", "60", "--out", &out]).status.success());
    let strips = std::fs::read_to_string(dir.path().join("strips.csv")).unwrap();
    let mut lines = strips.lines();
    assert_eq!(
        lines.next(),
        Some("m,bottom,top,width,gram_count,n_zeros,primary_index,primary_height,primary_stat")
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert_eq!(first[1], "9.66690805613");
    assert_eq!(first[4], "1");
    assert_eq!(first[5], "1");
    let zeros = std::fs::read_to_string(dir.path().join("zeros.csv")).unwrap();
    assert!(zeros.starts_with("j,t,strip_m\n1,14.1347251417,1\n"), "{zeros}");
    let gram = std::fs::read_to_string(dir.path().join("gram.csv")).unwrap();
    assert!(gram.starts_with("n,g,gap,gap_ratio,gap_ratio_geo\n-1,9.66690805613,,,\n"));
    for line in strips.lines().skip(1).chain(zeros.lines().skip(1)) {
        assert!(!line.contains('e') && !line.contains('E'), "{line}");
    }
}

#[test]
fn analyze_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert!(run(&["compute", "--t-max", "300", "--out", &out]).status.success());
    let a = run(&["analyze", "--out", &out]);
    assert!(a.status.success(), "{}", stderr(&a));
    let text = stdout(&a);
    for key in ["slope=9.0", "intercept=", "top_intercept=", "primary_variance=0.0"] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
    assert!(stderr(&a).contains("small sample"));
    for f in ["fits.json", "deviations.csv", "arches.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let fits: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fits.json")).unwrap()).unwrap();
    assert!(fits["bottoms"]["slope"].as_f64().unwrap() > 9.0);
    assert!(fits["density_vs_m"]["slope"].is_number());
    let arches = std::fs::read_to_string(dir.path().join("arches.csv")).unwrap();
    assert!(arches.starts_with("p,q,m_center,t_center\n"));
    assert!(arches.contains("4,1,11.0903548890,100.530964915"), "{arches}");

    for n in 1..=16 {
        let p = run(&["plot", "--figure", &n.to_string(), "--out", &out]);
        assert!(p.status.success(), "figure {n}: {}", stderr(&p));
        let svg = std::fs::read_to_string(dir.path().join(format!("fig{n}.svg"))).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
    let fig3 = std::fs::read_to_string(dir.path().join("fig3.svg")).unwrap();
    assert!(fig3.contains(r#"class="marker""#));
    assert!(fig3.contains("p=4"));

    let bad = run(&["plot", "--figure", "17", "--out", &out]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn missing_inputs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let a = run(&["analyze", "--out", &out]);
    assert_eq!(a.status.code(), Some(3));
    assert!(stderr(&a).contains("zeta-strips compute"), "{}", stderr(&a));
    let p = run(&["plot", "--figure", "2", "--out", &out]);
    assert_eq!(p.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_4() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(run(&["compute", "--t-max", "20000"]).status.code(), Some(4));
    assert_eq!(run(&["compute", "--threads", "0"]).status.code(), Some(4));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_passes_and_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let v = run(&["verify", "--out", &out]);
    assert!(v.status.success(), "{}", stdout(&v));
    assert!(stdout(&v).contains("PASS first_zero"));

    let reduced = run(&["verify", "--out", &out, "--precision", "1e-3"]);
    assert!(reduced.status.success(), "{}", stdout(&reduced));
    assert!(stdout(&reduced).contains("PASS derivative"));

    assert!(run(&["compute", "--t-max", "60", "--out", &out]).status.success());
    let cached = dir.path().join("cache").join("zeros.csv");
    let text = std::fs::read_to_string(&cached).unwrap();
    std::fs::write(&cached, text.replacen("14.1", "14.2", 1)).unwrap();
    let v = run(&["verify", "--out", &out]);
    assert_eq!(v.status.code(), Some(5));
    assert!(stdout(&v).contains("FAIL cache_zeros"), "{}", stdout(&v));
    assert!(stdout(&v).contains("checksum mismatch"));
    assert!(stderr(&v).contains("cache_zeros"));

    // compute repairs the corrupted entry
    let c = run(&["compute", "--t-max", "60", "--out", &out]);
    assert!(c.status.success());
    assert!(stderr(&c).contains("checksum mismatch"));
    assert!(run(&["verify", "--out", &out]).status.success());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out = dir.path().join("from_file");
    std::fs::write(&conf, format!("# small run\nt_max = 40\nout = {}\n", out.display())).unwrap();
    let c = run(&["compute", "--config", conf.to_str().unwrap()]);
    assert!(c.status.success(), "{}", stderr(&c));
    assert!(stdout(&c).contains("strips=3"), "{}", stdout(&c));
    assert!(out.join("strips.csv").exists());

    let c = run(&["compute", "--config", conf.to_str().unwrap(), "--t-max", "60"]);
    assert!(stdout(&c).contains("strips=5"), "{}", stdout(&c));

    std::fs::write(&conf, "colour = blue\n").unwrap();
    assert_eq!(run(&["compute", "--config", conf.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn m_max_caps_strip_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let c = run(&["compute", "--t-max", "200", "--m-max", "4", "--out", &out]);
    assert!(stdout(&c).contains("strips=4"), "{}", stdout(&c));
}

#[test]
fn contour_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let c = run(&["compute", "--t-max", "40", "--out", &out, "--contour", "2"]);
    assert!(c.status.success(), "{}", stderr(&c));
    let text = std::fs::read_to_string(dir.path().join("contour_k2.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sigma,t,re_zeta,im_zeta"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() > 10);
    // Every recorded point lies on Im zeta = 0.
    assert!(rows.iter().all(|r| r[3].abs() < 1e-8));
    let last = rows.last().unwrap();
    assert!(last[0] <= 0.0 + 1e-9);
}
