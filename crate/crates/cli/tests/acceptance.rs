//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! The full run to t = 10^4 is computed once and shared by criteria 2 to 8.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use zeta_strips::analysis::ArchPrediction;
use zeta_strips::contour::ContourTracer;
use zeta_strips::gram::{gap_model, gram_table, last_index_below};
use zeta_strips::roots::bisect;
use zeta_strips::strips::Strip;
use zeta_strips::zeta::{hardy_z, zeta, zeta_with_derivative};
use zeta_strips::{ComplexPoint, EvalParams, STRIP_PERIOD};
use zeta_strips_cli::analyze::{analyze_strips, Analysis};
use zeta_strips_cli::compute::{compute, write_outputs};
use zeta_strips_cli::config::RunConfig;
use zeta_strips_cli::verify;

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

struct FullRun {
    strips: Vec<Strip>,
    analysis: Analysis,
    elapsed: Duration,
}

struct Suite {
    results: Vec<(String, bool)>,
}

impl Suite {
    fn record(&mut self, name: &str, outcome: Result<(bool, String), String>) {
        let (ok, detail) = match outcome {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.results.push((name.to_string(), ok));
    }
}

fn config(dir: &std::path::Path, t_max: f64, threads: usize) -> RunConfig {
    RunConfig {
        t_max,
        threads,
        out_dir: dir.join("out"),
        cache_dir: dir.join("cache"),
        ..RunConfig::default()
    }
}

fn full_run() -> Result<FullRun, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = config(dir.path(), 1e4, 1);
    let start = Instant::now();
    let out = compute(&cfg).map_err(|e| format!("{e:#}"))?;
    let elapsed = start.elapsed();
    let analysis = analyze_strips(&out.strips).map_err(|e| format!("{e:#}"))?;
    Ok(FullRun {
        strips: out.strips,
        analysis,
        elapsed,
    })
}

fn criterion_1() -> Result<(bool, String), String> {
    let t = ContourTracer::default()
        .special_gram_point(1)
        .map_err(|e| e.to_string())?;
    Ok(((t - 9.6669080561).abs() <= 1e-6, format!("special_gram_point(1) = {t:.10}")))
}

fn criterion_2(run: &FullRun) -> (bool, String) {
    let n = run.strips.len();
    let secs = run.elapsed.as_secs_f64();
    (
        n == 1102 && secs <= 1800.0,
        format!("{n} strips to t = 10^4 in {secs:.1} s on 1 thread (limit 1800 s)"),
    )
}

fn criterion_3(a: &Analysis) -> (bool, String) {
    let b = a.bottoms;
    let t = a.tops;
    let ok = within(b.slope, 9.0644, 9.0650)
        && within(b.intercept, -0.10, 0.12)
        && (t.intercept - 9.07).abs() <= 0.15
        && (t.slope - b.slope).abs() <= 3e-4;
    (
        ok,
        format!(
            "bottoms slope {:.7}({:.0e}) intercept {:.4}({:.0e}); tops slope {:.7} intercept {:.4}",
            b.slope, b.slope_se, b.intercept, b.intercept_se, t.slope, t.intercept
        ),
    )
}

fn criterion_4(a: &Analysis) -> (bool, String) {
    let worst = a.deviations.max_abs();
    let all_in = a.deviations.values().all(|v| v > -2.0 && v < 2.0);
    (all_in, format!("max |bottom - 2m pi/ln 2| = {worst:.4} over {} strips", a.deviations.records.len()))
}

/// Counts Gram points in each strip from an independently built table and
/// compares with the zero count.
fn criterion_5(strips: &[Strip]) -> Result<(bool, String), String> {
    let top = strips.last().map_or(0.0, |s| s.top);
    let n_max = last_index_below(top).map_err(|e| e.to_string())? + 1;
    let table = gram_table(n_max).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for s in strips {
        let gram_in = table.iter().filter(|g| g.height >= s.bottom - 1e-9 && g.height < s.top - 1e-9).count();
        if s.n_zeros() != gram_in || s.n_zeros() != s.gram_count || s.check_invariants().is_err() {
            bad.push(s.m);
        }
    }
    let zeros: usize = strips.iter().map(Strip::n_zeros).sum();
    Ok((
        bad.is_empty() && strips.len() == 1102,
        format!("{} strips, {zeros} zeros, exceptions: {bad:?}", strips.len()),
    ))
}

fn criterion_6(a: &Analysis) -> (bool, String) {
    let p = &a.primary;
    let ok = (p.mean - 0.5).abs() <= 0.02
        && (p.variance - 0.014).abs() <= 0.004
        && p.quartile_variances.iter().all(|&v| within(v, 0.008, 0.020));
    (
        ok,
        format!(
            "mean {:.5}, variance {:.5}, quartiles [{}]",
            p.mean,
            p.variance,
            p.quartile_variances.map(|v| format!("{v:.5}")).join(", ")
        ),
    )
}

fn criterion_7(a: &Analysis) -> (bool, String) {
    let worst = a
        .arches
        .iter()
        .map(|c| (c.t_center / c.m_center - 2.0 * PI / std::f64::consts::LN_2).abs())
        .fold(0.0, f64::max);
    let expected = [11.09, 22.18, 44.36, 88.72, 177.4, 354.9, 709.8];
    let mut centers_ok = true;
    let mut listed = Vec::new();
    for (p, &want) in (4..=10).zip(&expected) {
        let c = a.arches.iter().find(|c| c.p == p && c.q == 1).copied();
        let got = c.map_or(f64::NAN, |c| c.m_center);
        // Match to the number of decimals quoted.
        let tol = if want < 100.0 { 0.006 } else { 0.06 };
        centers_ok &= (got - want).abs() <= tol && c == Some(ArchPrediction::new(p, 1));
        listed.push(format!("{got:.2}"));
    }
    (
        worst <= 1e-9 && centers_ok && !a.arches.is_empty(),
        format!(
            "{} predictions, max |t/m - 2pi/ln2| = {worst:.1e}; alpha(p,1), p=4..10: {}",
            a.arches.len(),
            listed.join(", ")
        ),
    )
}

fn criterion_8(strips: &[Strip]) -> Result<(bool, String), String> {
    let mut total = 0;
    let mut good = 0;
    let mut worst: f64 = 0.0;
    for s in strips.iter().filter(|s| s.m > 10) {
        let model = s.n_zeros() as f64 * gap_model(s.midpoint()).map_err(|e| e.to_string())?;
        let rel = (s.width - model).abs() / s.width;
        worst = worst.max(rel);
        total += 1;
        if rel < 0.05 {
            good += 1;
        }
    }
    let frac = good as f64 / total.max(1) as f64;
    Ok((
        total > 0 && frac >= 0.99,
        format!("{good}/{total} strips ({:.2}%) within 5% of zeros x gap model; worst {:.2}%", 100.0 * frac, 100.0 * worst),
    ))
}

fn criterion_9() -> Result<(bool, String), String> {
    let params = EvalParams::default();
    let e = |e: zeta_strips::Error| e.to_string();

    let z2 = zeta(ComplexPoint::new(2.0, 0.0), &params).map_err(e)?.value;
    let basel = (z2 - PI * PI / 6.0).norm();

    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut conj_worst: f64 = 0.0;
    let mut deriv_worst: f64 = 0.0;
    let h = 1e-5;
    for _ in 0..100 {
        let s = ComplexPoint::new(rng.gen_range(-1.5..6.5), rng.gen_range(2.0..9000.0));
        let a = zeta(s, &params).map_err(e)?.value;
        let b = zeta(s.conj(), &params).map_err(e)?.value;
        conj_worst = conj_worst.max((a - b.conj()).norm());

        let d = zeta_with_derivative(s, &params).map_err(e)?.derivative.unwrap_or_default();
        let plus = zeta(ComplexPoint::new(s.sigma + h, s.t), &params).map_err(e)?.value;
        let minus = zeta(ComplexPoint::new(s.sigma - h, s.t), &params).map_err(e)?.value;
        let fd = (plus - minus) / (2.0 * h);
        deriv_worst = deriv_worst.max((fd - d).norm() / d.norm().max(1.0));
    }

    let first_zero = bisect(|t| hardy_z(t, &params), 14.0, 14.3, 1e-12).map_err(e)?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let report = verify::run(&config(dir.path(), 100.0, 1)).map_err(|e| format!("{e:#}"))?;
    let verify_secs = report.elapsed.as_secs_f64();

    let ok = basel <= 1e-10
        && conj_worst <= 1e-10
        && deriv_worst <= 1e-6
        && (first_zero - 14.134725).abs() <= 1e-5
        && report.passed()
        && verify_secs < 30.0;
    Ok((
        ok,
        format!(
            "zeta(2) err {basel:.1e}; conj err {conj_worst:.1e}; derivative rel err {deriv_worst:.1e}; first zero {first_zero:.7}; verify {} in {verify_secs:.2} s",
            if report.passed() { "passed" } else { "failed" }
        ),
    ))
}

fn criterion_10() -> Result<(bool, String), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in [1, 8] {
        let cfg = config(&dir.path().join(format!("t{threads}")), 500.0, threads);
        let out = compute(&cfg).map_err(|e| format!("{e:#}"))?;
        write_outputs(&cfg, &out).map_err(|e| format!("{e:#}"))?;
        let files: Vec<Vec<u8>> = ["gram.csv", "strips.csv", "zeros.csv"]
            .iter()
            .map(|f| std::fs::read(cfg.out_path(f)).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        outputs.push(files);
    }
    let same = outputs[0] == outputs[1];
    let bytes: usize = outputs[0].iter().map(Vec::len).sum();
    Ok((same, format!("gram.csv, strips.csv, zeros.csv identical for 1 and 8 threads ({bytes} bytes)")))
}

/// Further reproduction checks on the full run: density fit against the gap
/// model, residual decay, curvature of the bottom fit, deviation variance
/// profile and the reported branch spacing.
fn supplementary(suite: &mut Suite, run: &FullRun) {
    let a = &run.analysis;
    let fit = a.density.vs_ln_m;
    let worst = run
        .strips
        .iter()
        .filter(|s| s.m >= 50)
        .map(|s| {
            let model = 1.0 / gap_model(s.m as f64 * STRIP_PERIOD).unwrap();
            (fit.predict((s.m as f64).ln()) - model).abs() / model
        })
        .fold(0.0, f64::max);
    suite.record(
        "density fit vs gap model",
        Ok((worst < 0.05, format!("max relative gap over m in [50, 1102]: {:.2}%", 100.0 * worst))),
    );

    let early = a.density.residuals.mean_abs_between(1, 70).unwrap_or(f64::NAN);
    let late = a.density.residuals.mean_abs_between(560, 1102).unwrap_or(f64::NAN);
    suite.record(
        "density residuals decrease",
        Ok((late < early, format!("mean |residual| m 1..70: {early:.5}, m 560..1102: {late:.5}"))),
    );

    let (s1, s2) = (a.bottoms_first_half.slope, a.bottoms_second_half.slope);
    let d = (s1 - a.bottoms.slope).abs().max((s2 - a.bottoms.slope).abs());
    suite.record(
        "no curvature in bottom fit",
        Ok((d <= 1e-3, format!("half-range slopes {s1:.6}, {s2:.6}; max difference {d:.1e}"))),
    );

    let v = a.deviations.windowed_variance(64);
    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0_f64), |(l, h), &x| (l.min(x), h.max(x)));
    suite.record(
        "deviation variance profile",
        Ok((hi <= 3.0 * lo, format!("{} windows of 64, variance in [{lo:.4}, {hi:.4}]", v.len()))),
    );

    let n = &a.nested;
    println!(
        "INFO branch spacing (reported, not asserted): q=1 mean gap {:?}, q=2 mean gap {:?}, ratio {:?}",
        n.mean_gap_q1, n.mean_gap_q2, n.ratio
    );
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; a name filter
    // that does not match this target skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if args.iter().any(|f| !"acceptance".contains(f.as_str())) {
        return;
    }

    let mut suite = Suite { results: Vec::new() };
    suite.record("1 first strip bottom", criterion_1());

    println!("running the full computation to t = 10^4 on one thread ...");
    match full_run() {
        Ok(run) => {
            let a = &run.analysis;
            suite.record("2 strip census", Ok(criterion_2(&run)));
            suite.record("3 bottom and top fits", Ok(criterion_3(a)));
            suite.record("4 deviation bound", Ok(criterion_4(a)));
            suite.record("5 zero/Gram identity", criterion_5(&run.strips));
            suite.record("6 primary-zero statistics", Ok(criterion_6(a)));
            suite.record("7 arch formula consistency", Ok(criterion_7(a)));
            suite.record("8 width model", criterion_8(&run.strips));
            supplementary(&mut suite, &run);
        }
        Err(e) => {
            for name in [
                "2 strip census",
                "3 bottom and top fits",
                "4 deviation bound",
                "5 zero/Gram identity",
                "6 primary-zero statistics",
                "7 arch formula consistency",
                "8 width model",
            ] {
                suite.record(name, Err(format!("full run failed: {e}")));
            }
        }
    }
    suite.record("9 desk-scale properties", criterion_9());
    suite.record("10 determinism", criterion_10());

    let failed: Vec<&str> = suite.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!(
        "acceptance: {} passed, {} failed",
        suite.results.len() - failed.len(),
        failed.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
