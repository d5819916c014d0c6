//! `analyze`: regressions, deviation series and arch predictions from the
//! cached strips.

use anyhow::{Context, Result};
use serde_json::{json, Number, Value};
use zeta_strips::analysis::{
    arch_centers, bottom_deviation_series, fit_bottoms, fit_density, fit_tops, nested_arch_report,
    primary_stats, resonance_check, ArchPrediction, DensityFit, DeviationSeries, LinearFit, NestedArchReport,
    PrimaryStats, RECOMMENDED_MIN_STRIPS,
};
use zeta_strips::strips::Strip;

use crate::cache::{write_atomic, Cache, Kind, Lookup};
use crate::config::{ensure_dir, RunConfig};
use crate::exit::{coded, ExitKind};
use crate::format::fmt_sig;
use crate::records;

/// Exponents `p/q` up to this value are listed in `arches.csv`.
pub const ARCH_P_MAX: u32 = 10;
pub const ARCH_Q_MAX: u32 = 3;
/// Window width for the bottom-deviation variance profile.
pub const VARIANCE_WINDOW: usize = 64;
/// Branch clustering uses strips within this fraction of the centre.
pub const BRANCH_HALF_WIDTH: f64 = 0.08;
/// Each half-range fit needs three strips.
pub const MIN_ANALYSIS_STRIPS: usize = 6;

#[derive(Debug, Clone)]
pub struct Analysis {
    pub n_strips: usize,
    pub bottoms: LinearFit,
    pub tops: LinearFit,
    pub bottoms_first_half: LinearFit,
    pub bottoms_second_half: LinearFit,
    pub density: DensityFit,
    pub deviations: DeviationSeries,
    pub primary: PrimaryStats,
    pub arches: Vec<ArchPrediction>,
    pub nested: NestedArchReport,
}

const REMEDY: &str = "run `zeta-strips compute` first (with the same --cache directory)";

/// Loads strips from the cache. Strips and zeros must come from the same run.
pub fn load_strips(cache: &Cache) -> Result<Vec<Strip>> {
    let mut payloads = Vec::new();
    for kind in [Kind::Strips, Kind::Zeros] {
        match cache.check(kind) {
            Lookup::Hit(text) => payloads.push(text),
            Lookup::Absent => {
                return Err(coded(
                    ExitKind::MissingInputs,
                    format!("no {} cache in {}; {REMEDY}", kind.name(), cache.dir().display()),
                ))
            }
            Lookup::Stale(why) | Lookup::Corrupt(why) => {
                return Err(coded(ExitKind::MissingInputs, format!("{why}; {REMEDY}")))
            }
        }
    }
    let fingerprints: Vec<Option<String>> = [Kind::Strips, Kind::Zeros]
        .iter()
        .map(|&k| cache.read_manifest(k).ok().flatten().map(|m| m.fingerprint))
        .collect();
    if fingerprints[0] != fingerprints[1] {
        return Err(coded(
            ExitKind::MissingInputs,
            format!("strips and zeros caches come from different runs; {REMEDY}"),
        ));
    }
    records::parse_strips(&payloads[0], &payloads[1])
}

pub fn analyze_strips(strips: &[Strip]) -> Result<Analysis> {
    let half = strips.len() / 2;
    let deviations = bottom_deviation_series(strips)?;
    let m_limit = strips.last().map_or(0.0, |s| s.m as f64);
    Ok(Analysis {
        n_strips: strips.len(),
        bottoms: fit_bottoms(strips)?,
        tops: fit_tops(strips)?,
        bottoms_first_half: fit_bottoms(&strips[..half])?,
        bottoms_second_half: fit_bottoms(&strips[half..])?,
        density: fit_density(strips)?,
        primary: primary_stats(strips)?,
        arches: arch_centers(ARCH_P_MAX, ARCH_Q_MAX, m_limit)?,
        nested: nested_arch_report(strips, &deviations, BRANCH_HALF_WIDTH)?,
        deviations,
    })
}

/// A JSON number carrying exactly the formatted digits.
fn num(x: f64) -> Value {
    match fmt_sig(x).parse::<Number>() {
        Ok(n) if x.is_finite() => Value::Number(n),
        _ => Value::Null,
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn fit_json(f: &LinearFit) -> Value {
    json!({
        "slope": num(f.slope),
        "intercept": num(f.intercept),
        "slope_se": num(f.slope_se),
        "intercept_se": num(f.intercept_se),
        "n": f.n,
    })
}

pub fn fits_json(a: &Analysis) -> Result<String> {
    let resonances: Vec<Value> = (1..=ARCH_P_MAX)
        .map(|p| {
            let r = resonance_check(p)?;
            Ok(json!({"p": p, "t": num(r.t), "in_range": r.in_range}))
        })
        .collect::<Result<_>>()?;
    let branches = |v: &[zeta_strips::analysis::BranchSpacing]| -> Vec<Value> {
        v.iter()
            .map(|b| {
                json!({
                    "p": b.center.p,
                    "q": b.center.q,
                    "m_center": num(b.center.m_center),
                    "mean_gap": opt(b.mean_gap),
                    "branches": b.branches.iter().map(|&(label, mean, n)| json!({
                        "surplus": label, "mean_deviation": num(mean), "strips": n
                    })).collect::<Vec<_>>(),
                })
            })
            .collect()
    };
    let doc = json!({
        "n_strips": a.n_strips,
        "bottoms": fit_json(&a.bottoms),
        "tops": fit_json(&a.tops),
        "bottoms_first_half": fit_json(&a.bottoms_first_half),
        "bottoms_second_half": fit_json(&a.bottoms_second_half),
        "density_vs_ln_m": fit_json(&a.density.vs_ln_m),
        "density_vs_m": fit_json(&a.density.vs_m),
        "primary": {
            "mean": num(a.primary.mean),
            "variance": num(a.primary.variance),
            "quartile_variances": a.primary.quartile_variances.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        },
        "bottom_dev": {
            "max_abs": num(a.deviations.max_abs()),
            "window": VARIANCE_WINDOW,
            "window_variances": a.deviations.windowed_variance(VARIANCE_WINDOW).into_iter().map(num).collect::<Vec<_>>(),
        },
        "resonances": resonances,
        "nested_arches": {
            "mean_gap_q1": opt(a.nested.mean_gap_q1),
            "mean_gap_q2": opt(a.nested.mean_gap_q2),
            "ratio_q2_to_q1": opt(a.nested.ratio),
            "q1": branches(&a.nested.q1),
            "q2": branches(&a.nested.q2),
        },
    });
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn deviations_csv(a: &Analysis) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "bottom_dev", "density_dev"])?;
    for (&(m, b), &(m2, d)) in a.deviations.records.iter().zip(&a.density.residuals.records) {
        debug_assert_eq!(m, m2);
        w.write_record([m.to_string(), fmt_sig(b), fmt_sig(d)])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)
}

pub fn arches_csv(a: &Analysis) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "q", "m_center", "t_center"])?;
    for c in &a.arches {
        w.write_record([c.p.to_string(), c.q.to_string(), fmt_sig(c.m_center), fmt_sig(c.t_center)])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)
}

pub fn summary(a: &Analysis) -> String {
    let q = a.primary.quartile_variances.map(fmt_sig).join(",");
    let ratio = a.nested.ratio.map_or("n/a".to_string(), fmt_sig);
    format!(
        "strips={}\nslope={}\nslope_se={}\nintercept={}\nintercept_se={}\ntop_slope={}\ntop_intercept={}\ntop_intercept_se={}\ndensity_slope_ln_m={}\ndensity_intercept={}\nprimary_mean={}\nprimary_variance={}\nprimary_quartile_variances={q}\nbottom_dev_max_abs={}\nbranch_gap_ratio={ratio}\n",
        a.n_strips,
        fmt_sig(a.bottoms.slope),
        fmt_sig(a.bottoms.slope_se),
        fmt_sig(a.bottoms.intercept),
        fmt_sig(a.bottoms.intercept_se),
        fmt_sig(a.tops.slope),
        fmt_sig(a.tops.intercept),
        fmt_sig(a.tops.intercept_se),
        fmt_sig(a.density.vs_ln_m.slope),
        fmt_sig(a.density.vs_ln_m.intercept),
        fmt_sig(a.primary.mean),
        fmt_sig(a.primary.variance),
        fmt_sig(a.deviations.max_abs()),
    )
}

/// Loads the cache, writes `fits.json`, `deviations.csv` and `arches.csv`
/// and returns the analysis.
pub fn analyze(cfg: &RunConfig) -> Result<Analysis> {
    let strips = load_strips(&Cache::new(&cfg.cache_dir))?;
    if strips.len() < MIN_ANALYSIS_STRIPS {
        return Err(coded(
            ExitKind::MissingInputs,
            format!("only {} strips cached; analysis needs at least {MIN_ANALYSIS_STRIPS} (raise --t-max)", strips.len()),
        ));
    }
    if strips.len() < RECOMMENDED_MIN_STRIPS {
        eprintln!(
            "warning: {} strips is a small sample (fits are meant for at least {RECOMMENDED_MIN_STRIPS})",
            strips.len()
        );
    }
    let a = analyze_strips(&strips).context("analysing strips")?;
    ensure_dir(&cfg.out_dir)?;
    write_atomic(&cfg.out_path("fits.json"), fits_json(&a)?.as_bytes())?;
    write_atomic(&cfg.out_path("deviations.csv"), deviations_csv(&a)?.as_bytes())?;
    write_atomic(&cfg.out_path("arches.csv"), arches_csv(&a)?.as_bytes())?;
    Ok(a)
}
