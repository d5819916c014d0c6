//! CSV encodings of the computed data.
//!
//! Output files use [`fmt_sig`]; cache payloads use [`fmt_exact`] so that a
//! warm cache reproduces the cold run bit for bit.

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;
use zeta_strips::contour::{BoundaryCrossing, ContourPath};
use zeta_strips::gram::{gap_ratios, GramPoint};
use zeta_strips::strips::{Strip, ZeroRecord};

use crate::format::{fmt_exact, fmt_sig};

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| anyhow!("csv buffer: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().from_reader(text.as_bytes())
}

// ---- Gram points ----

pub fn gram_cache(table: &[GramPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "g"])?;
    for g in table {
        w.write_record([g.n.to_string(), fmt_exact(g.height)])?;
    }
    finish(w)
}

#[derive(Deserialize)]
struct GramRow {
    n: i64,
    g: f64,
}

pub fn parse_gram_cache(text: &str) -> Result<Vec<GramPoint>> {
    reader(text)
        .deserialize::<GramRow>()
        .map(|r| {
            let r = r.context("gram cache row")?;
            Ok(GramPoint { n: r.n, height: r.g })
        })
        .collect()
}

/// `n,g,gap,gap_ratio,gap_ratio_geo`; the first row has no predecessor and
/// leaves the gap columns empty.
pub fn gram_output(table: &[GramPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "g", "gap", "gap_ratio", "gap_ratio_geo"])?;
    if let Some(first) = table.first() {
        w.write_record([first.n.to_string(), fmt_sig(first.height), String::new(), String::new(), String::new()])?;
    }
    for r in gap_ratios(table)? {
        w.write_record([
            r.n.to_string(),
            fmt_sig(r.height),
            fmt_sig(r.gap),
            fmt_sig(r.ratio),
            fmt_sig(r.ratio_geo),
        ])?;
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct GramOutputRow {
    pub n: i64,
    pub g: f64,
    pub gap: Option<f64>,
    pub gap_ratio: Option<f64>,
    pub gap_ratio_geo: Option<f64>,
}

pub fn parse_gram_output(text: &str) -> Result<Vec<GramOutputRow>> {
    reader(text)
        .deserialize()
        .map(|r| r.context("gram.csv row"))
        .collect()
}

// ---- Boundaries ----

const BOUNDARY_HEADER: [&str; 7] = ["m", "k", "launch_t", "crossing_t", "gram_index", "crossing_count", "steps"];

pub fn boundaries_cache(boundaries: &[BoundaryCrossing]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BOUNDARY_HEADER)?;
    for b in boundaries {
        w.write_record([
            b.m.to_string(),
            b.k.to_string(),
            fmt_exact(b.launch_t),
            fmt_exact(b.crossing_t),
            b.gram_index.to_string(),
            b.crossing_count.to_string(),
            b.steps.to_string(),
        ])?;
    }
    finish(w)
}

#[derive(Deserialize)]
struct BoundaryRow {
    m: usize,
    k: i64,
    launch_t: f64,
    crossing_t: f64,
    gram_index: i64,
    crossing_count: usize,
    steps: usize,
}

pub fn parse_boundaries_cache(text: &str) -> Result<Vec<BoundaryCrossing>> {
    reader(text)
        .deserialize::<BoundaryRow>()
        .map(|r| {
            let r = r.context("boundary cache row")?;
            Ok(BoundaryCrossing {
                m: r.m,
                k: r.k,
                launch_t: r.launch_t,
                crossing_t: r.crossing_t,
                gram_index: r.gram_index,
                crossing_count: r.crossing_count,
                steps: r.steps,
            })
        })
        .collect()
}

// ---- Strips and zeros ----

type Fmt = fn(f64) -> String;

fn strips_csv(strips: &[Strip], f: Fmt, with_gram_index: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["m", "bottom", "top", "width"];
    if with_gram_index {
        header.push("bottom_gram_index");
    }
    header.extend(["gram_count", "n_zeros", "primary_index", "primary_height", "primary_stat"]);
    w.write_record(&header)?;
    for s in strips {
        let mut row = vec![s.m.to_string(), f(s.bottom), f(s.top), f(s.width)];
        if with_gram_index {
            row.push(s.bottom_gram_index.to_string());
        }
        row.extend([
            s.gram_count.to_string(),
            s.n_zeros().to_string(),
            s.primary_index.to_string(),
            f(s.primary_height),
            f(s.primary_stat),
        ]);
        w.write_record(&row)?;
    }
    finish(w)
}

fn zeros_csv(strips: &[Strip], f: Fmt) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["j", "t", "strip_m"])?;
    for z in strips.iter().flat_map(|s| &s.zeros) {
        w.write_record([z.j.to_string(), f(z.t), z.strip_m.to_string()])?;
    }
    finish(w)
}

pub fn strips_cache(strips: &[Strip]) -> Result<String> {
    strips_csv(strips, fmt_exact, true)
}

pub fn strips_output(strips: &[Strip]) -> Result<String> {
    strips_csv(strips, fmt_sig, false)
}

pub fn zeros_cache(strips: &[Strip]) -> Result<String> {
    zeros_csv(strips, fmt_exact)
}

pub fn zeros_output(strips: &[Strip]) -> Result<String> {
    zeros_csv(strips, fmt_sig)
}

/// One row of `strips.csv` (output or cache; the cache adds
/// `bottom_gram_index`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StripRow {
    pub m: usize,
    pub bottom: f64,
    pub top: f64,
    pub width: f64,
    #[serde(default)]
    pub bottom_gram_index: i64,
    pub gram_count: usize,
    pub n_zeros: usize,
    pub primary_index: usize,
    pub primary_height: f64,
    pub primary_stat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
struct ZeroRow {
    j: usize,
    t: f64,
    strip_m: usize,
}

pub fn parse_strip_rows(text: &str) -> Result<Vec<StripRow>> {
    reader(text)
        .deserialize()
        .map(|r| r.context("strips row"))
        .collect()
}

/// Rebuilds full strips from the strips and zeros payloads.
pub fn parse_strips(strips_text: &str, zeros_text: &str) -> Result<Vec<Strip>> {
    let rows = parse_strip_rows(strips_text)?;
    let mut strips: Vec<Strip> = rows
        .into_iter()
        .map(|r| Strip {
            m: r.m,
            bottom: r.bottom,
            top: r.top,
            width: r.width,
            bottom_gram_index: r.bottom_gram_index,
            gram_count: r.gram_count,
            zeros: Vec::with_capacity(r.n_zeros),
            primary_index: r.primary_index,
            primary_height: r.primary_height,
            primary_stat: r.primary_stat,
        })
        .collect();
    let first_m = strips.first().map_or(1, |s| s.m);
    for row in reader(zeros_text).deserialize::<ZeroRow>() {
        let z = row.context("zeros row")?;
        let strip = z
            .strip_m
            .checked_sub(first_m)
            .and_then(|i| strips.get_mut(i))
            .filter(|s| s.m == z.strip_m)
            .ok_or_else(|| anyhow!("zero {} refers to unknown strip {}", z.j, z.strip_m))?;
        strip.zeros.push(ZeroRecord {
            j: z.j,
            t: z.t,
            strip_m: z.strip_m,
        });
    }
    Ok(strips)
}

// ---- Contours ----

pub fn contour_output(path: &ContourPath) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sigma", "t", "re_zeta", "im_zeta"])?;
    for (p, v) in path.points.iter().zip(&path.values) {
        w.write_record([fmt_sig(p.sigma), fmt_sig(p.t), fmt_sig(v.re), fmt_sig(v.im)])?;
    }
    finish(w)
}
