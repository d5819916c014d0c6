//! `plot`: SVG figures 1 to 16 from the files written by `compute` and
//! `analyze`.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;
use serde_json::Value;

use crate::cache::write_atomic;
use crate::config::RunConfig;
use crate::exit::{coded, ExitKind};
use crate::records::{parse_gram_output, parse_strip_rows, StripRow};
use crate::svg::{Chart, Marker, Scale, Series, Style};

pub const FIGURES: std::ops::RangeInclusive<u32> = 1..=16;

/// Strip ranges of the deviation figures 3 to 7 and 11 to 15.
pub const DEVIATION_RANGES: [(usize, usize); 5] = [(1, 70), (70, 140), (140, 280), (280, 560), (560, 1102)];

const DOT: Style = Style::Markers { radius: 1.8 };
const BLUE: &str = "#1f4e9c";
const RED: &str = "#c0392b";

fn read_input(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    std::fs::read_to_string(&path).map_err(|e| {
        let hint = match name {
            "gram.csv" | "strips.csv" => "run `zeta-strips compute`",
            _ => "run `zeta-strips analyze`",
        };
        coded(
            ExitKind::MissingInputs,
            format!("cannot read {}: {e}; {hint} first", path.display()),
        )
    })
}

#[derive(Debug, Deserialize)]
struct DeviationRow {
    m: usize,
    bottom_dev: f64,
    density_dev: f64,
}

#[derive(Debug, Deserialize)]
struct ArchRow {
    p: u32,
    q: u32,
    m_center: f64,
}

fn parse_csv<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.with_context(|| format!("parsing {what}")))
        .collect()
}

fn strips(dir: &Path) -> Result<Vec<StripRow>> {
    parse_strip_rows(&read_input(dir, "strips.csv")?)
}

fn fits(dir: &Path) -> Result<Value> {
    serde_json::from_str(&read_input(dir, "fits.json")?).context("parsing fits.json")
}

fn fit_line(fits: &Value, key: &str) -> Result<(f64, f64)> {
    let get = |field: &str| {
        fits[key][field]
            .as_f64()
            .with_context(|| format!("fits.json lacks {key}.{field}"))
    };
    Ok((get("intercept")?, get("slope")?))
}

fn scatter(name: &str, points: Vec<(f64, f64)>) -> Series {
    Series {
        name: name.into(),
        points,
        style: DOT,
        color: BLUE,
    }
}

fn line(name: &str, points: Vec<(f64, f64)>) -> Series {
    Series {
        name: name.into(),
        points,
        style: Style::Line,
        color: RED,
    }
}

fn arch_markers(dir: &Path) -> Result<Vec<Marker>> {
    let rows: Vec<ArchRow> = parse_csv(&read_input(dir, "arches.csv")?, "arches.csv")?;
    Ok(rows
        .into_iter()
        .filter(|a| a.q <= 2)
        .map(|a| Marker {
            x: a.m_center,
            label: if a.q == 1 { format!("p={}", a.p) } else { format!("{}/{}", a.p, a.q) },
        })
        .collect())
}

fn deviation_figure(dir: &Path, index: usize, bottom: bool) -> Result<Chart> {
    let (lo, hi) = DEVIATION_RANGES[index];
    let rows: Vec<DeviationRow> = parse_csv(&read_input(dir, "deviations.csv")?, "deviations.csv")?;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.m >= lo && r.m <= hi)
        .map(|r| (r.m as f64, if bottom { r.bottom_dev } else { r.density_dev }))
        .collect();
    let mut chart = if bottom {
        Chart::new(
            &format!("Deviation of the m-th special Gram point, strips {lo} to {hi}"),
            "strip number m",
            "bottom(m) - 2m\u{3c0}/ln 2",
        )
    } else {
        Chart::new(
            &format!("Deviation of zeros per unit height from the fitted line, strips {lo} to {hi}"),
            "strip number m",
            "zeros/width - fit",
        )
    };
    chart.x_range = Some((lo as f64 - 0.5, hi as f64 + 0.5));
    if bottom {
        chart.y_range = Some((-2.0, 2.0));
        chart.markers = arch_markers(dir)?;
    }
    chart.series.push(scatter(if bottom { "bottom_dev" } else { "density_dev" }, points));
    Ok(chart)
}

fn rows_xy(rows: &[StripRow], f: impl Fn(&StripRow) -> f64) -> Vec<(f64, f64)> {
    rows.iter().map(|r| (r.m as f64, f(r))).collect()
}

/// Builds figure `n` from the files in `dir`.
pub fn figure(dir: &Path, n: u32) -> Result<Chart> {
    let chart = match n {
        1 => {
            let rows = parse_gram_output(&read_input(dir, "gram.csv")?)?;
            let pts = rows
                .iter()
                .filter(|r| r.n >= 1)
                .filter_map(|r| r.gap_ratio.map(|v| (r.n as f64, v)))
                .collect();
            let mut c = Chart::new(
                "1 - (Gram gap) / (model gap) against Gram index",
                "Gram point number n",
                "1 - gap / F(g_{n-1})",
            );
            c.x_scale = Scale::Log;
            c.y_scale = Scale::Log;
            c.series.push(scatter("gap_ratio", pts));
            c
        }
        2 => {
            let rows = strips(dir)?;
            let (a, b) = fit_line(&fits(dir)?, "bottoms")?;
            let last = rows.last().map_or(1.0, |r| r.m as f64);
            let mut c = Chart::new("Height of the bottom of each strip on the critical line", "strip number m", "bottom height t");
            c.series.push(scatter("bottom", rows_xy(&rows, |r| r.bottom)));
            c.series.push(line("fit", vec![(1.0, a + b), (last, a + b * last)]));
            c
        }
        3..=7 => deviation_figure(dir, (n - 3) as usize, true)?,
        8 => {
            let rows = strips(dir)?;
            let mut c = Chart::new("Critical zeros per strip", "strip number m", "zeros in strip");
            c.x_scale = Scale::Log;
            c.series.push(scatter("n_zeros", rows_xy(&rows, |r| r.n_zeros as f64)));
            c
        }
        9 => {
            let rows = strips(dir)?;
            let (a, b) = fit_line(&fits(dir)?, "density_vs_ln_m")?;
            let mut c = Chart::new("Zeros per unit height in each strip", "strip number m", "zeros / width");
            c.x_scale = Scale::Log;
            c.series.push(scatter("density", rows_xy(&rows, |r| r.n_zeros as f64 / r.width)));
            c.series.push(line("fit against ln m", rows_xy(&rows, |r| a + b * (r.m as f64).ln())));
            c
        }
        10 => {
            let rows = strips(dir)?;
            let mut c = Chart::new("Strip width on the critical line", "strip number m", "width");
            c.x_scale = Scale::Log;
            c.series.push(scatter("width", rows_xy(&rows, |r| r.width)));
            c
        }
        11..=15 => deviation_figure(dir, (n - 11) as usize, false)?,
        16 => {
            let rows = strips(dir)?;
            let mut c = Chart::new(
                "(primary index - 0.5) / zeros in strip",
                "strip number m",
                "primary_stat",
            );
            c.y_range = Some((0.0, 1.0));
            c.series.push(scatter("primary_stat", rows_xy(&rows, |r| r.primary_stat)));
            c
        }
        _ => {
            return Err(coded(
                ExitKind::Usage,
                format!("unknown figure {n}; figures are numbered 1 to 16"),
            ))
        }
    };
    Ok(chart)
}

/// Writes `fig<n>.svg` into the output directory.
pub fn plot(cfg: &RunConfig, n: u32) -> Result<PathBuf> {
    let chart = figure(&cfg.out_dir, n)?;
    let path = cfg.out_path(&format!("fig{n}.svg"));
    write_atomic(&path, chart.render().as_bytes())?;
    Ok(path)
}
